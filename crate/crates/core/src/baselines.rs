//! Classical median-family filters used as comparison points. None of them
//! has a noise detector; every pixel is filtered.

use crate::error::{Error, Result};
use crate::image::{Image, WindowSize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineConfig {
    pub smf_window: WindowSize,
    pub cwmf_center_weight: usize,
    pub tsmf_threshold: u8,
    pub amf_max_window: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            smf_window: WindowSize::Three,
            cwmf_center_weight: 3,
            tsmf_threshold: 20,
            amf_max_window: 7,
        }
    }
}

fn map_pixels(img: &Image, mut f: impl FnMut(usize, usize, &mut Vec<u8>) -> u8) -> Image {
    let mut buf = Vec::with_capacity(49);
    let mut px = Vec::with_capacity(img.len());
    for y in 0..img.height() {
        for x in 0..img.width() {
            px.push(f(x, y, &mut buf));
        }
    }
    Image::new(img.width(), img.height(), px).expect("same dimensions as input")
}

fn median_in_place(buf: &mut [u8]) -> u8 {
    let mid = buf.len() / 2;
    *buf.select_nth_unstable(mid).1
}

/// Standard median filter.
pub fn smf(img: &Image, window: WindowSize) -> Image {
    map_pixels(img, |x, y, buf| {
        img.neighbourhood_into(x, y, window.radius(), buf);
        median_in_place(buf)
    })
}

fn cwm_value(img: &Image, x: usize, y: usize, weight: usize, buf: &mut Vec<u8>) -> u8 {
    img.neighbourhood_into(x, y, 1, buf);
    let center = img.get(x, y);
    buf.extend(std::iter::repeat_n(center, weight - 1));
    median_in_place(buf)
}

fn check_weight(weight: usize) -> Result<()> {
    if weight == 0 || weight.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "center weight must be odd and positive, got {weight}"
        )));
    }
    Ok(())
}

/// 3×3 center-weighted median: the centre sample enters the multiset
/// `weight` times.
pub fn cwmf(img: &Image, weight: usize) -> Result<Image> {
    check_weight(weight)?;
    Ok(map_pixels(img, |x, y, buf| {
        cwm_value(img, x, y, weight, buf)
    }))
}

/// Tri-state median: keep the pixel if it is within `threshold` of the 3×3
/// median, else take the center-weighted median if that is within
/// `threshold`, else the plain median.
pub fn tsmf(img: &Image, threshold: u8, center_weight: usize) -> Result<Image> {
    check_weight(center_weight)?;
    Ok(map_pixels(img, |x, y, buf| {
        let center = img.get(x, y);
        img.neighbourhood_into(x, y, 1, buf);
        let smf = median_in_place(buf);
        let cwm = cwm_value(img, x, y, center_weight, buf);
        if center.abs_diff(smf) <= threshold {
            center
        } else if center.abs_diff(cwm) <= threshold {
            cwm
        } else {
            smf
        }
    }))
}

/// Adaptive-window median. The window grows from 3×3 in steps of 2 while
/// its median is one of its extremes; at `max_window` the median is used.
pub fn adaptive_median(img: &Image, max_window: usize) -> Result<Image> {
    if max_window < 3 || max_window.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "adaptive median window must be odd and >= 3, got {max_window}"
        )));
    }
    Ok(map_pixels(img, |x, y, buf| {
        let center = img.get(x, y);
        let mut side = 3;
        loop {
            img.neighbourhood_into(x, y, side / 2, buf);
            let (lo, hi) = buf
                .iter()
                .fold((u8::MAX, u8::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let med = median_in_place(buf);
            if lo < med && med < hi {
                return if lo < center && center < hi {
                    center
                } else {
                    med
                };
            }
            if side >= max_window {
                return med;
            }
            side += 2;
        }
    }))
}
