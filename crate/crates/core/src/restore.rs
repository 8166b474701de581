//! Decision-based adaptive median/mean restoration.
//!
//! A pixel is treated as corrupted when it sits at one of the two detector
//! thresholds (0 and 255 by default). Clean pixels are never modified. For a
//! corrupted pixel the number `n` of corrupted samples in its 5×5
//! neighbourhood selects the replacement rule:
//!
//! | case | condition                    | replacement                              |
//! |------|------------------------------|------------------------------------------|
//! | 1    | pixel clean                  | unaltered                                |
//! | 2    | `n <= case2_max`             | 3×3 median                               |
//! | 3    | `case2_max < n <= case3_max` | 5×5 median                               |
//! | 4    | `n > case3_max`              | 3×3 median, then 5×5 if the 3×3 is dead  |
//!
//! Whenever a selected median is itself a corrupted value, the mean of the
//! clean samples of that window is used instead. If a window holds no clean
//! sample at all the next larger window is tried, and as a last resort the
//! already restored west neighbour (or mid-gray at the left edge).

use crate::error::{Error, Result};
use crate::image::{Image, Window, WindowSize};

const FALLBACK_VALUE: u8 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestoreConfig {
    pub low_threshold: u8,
    pub high_threshold: u8,
    /// Largest 5×5 corrupted count handled by the 3×3 median.
    pub case2_max: usize,
    /// Largest 5×5 corrupted count handled by the 5×5 median.
    pub case3_max: usize,
    /// Scan in place so restored pixels feed later windows.
    pub recursive: bool,
}

impl Default for RestoreConfig {
    fn default() -> Self {
        Self {
            low_threshold: 0,
            high_threshold: 255,
            case2_max: 4,
            case3_max: 12,
            recursive: true,
        }
    }
}

impl RestoreConfig {
    pub fn validate(&self) -> Result<()> {
        if self.low_threshold >= self.high_threshold {
            return Err(Error::InvalidParameter(format!(
                "low threshold {} must be below high threshold {}",
                self.low_threshold, self.high_threshold
            )));
        }
        if !(self.case2_max < self.case3_max && self.case3_max < 25) {
            return Err(Error::InvalidParameter(format!(
                "case bounds must satisfy case2_max < case3_max < 25, got {} and {}",
                self.case2_max, self.case3_max
            )));
        }
        Ok(())
    }
}

/// Which branch of the decision rule handled a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecisionCase {
    Unaltered,
    Sparse,
    Moderate,
    Dense,
}

impl DecisionCase {
    /// 1-based case number.
    pub fn number(self) -> u8 {
        match self {
            DecisionCase::Unaltered => 1,
            DecisionCase::Sparse => 2,
            DecisionCase::Moderate => 3,
            DecisionCase::Dense => 4,
        }
    }
}

/// Where a replacement value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Replacement {
    Median3,
    Median5,
    MeanUncorrupted,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseRecord {
    pub x: usize,
    pub y: usize,
    /// Corrupted samples in the 5×5 window when the pixel was visited.
    pub corrupted_count: usize,
    pub case: DecisionCase,
    pub source: Replacement,
    pub value: u8,
}

/// One record per corrupted pixel, in raster order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CaseTrace {
    pub records: Vec<CaseRecord>,
    /// Pixels left untouched because they were clean.
    pub unaltered: usize,
}

impl CaseTrace {
    pub fn case_count(&self, case: DecisionCase) -> usize {
        if case == DecisionCase::Unaltered {
            return self.unaltered;
        }
        self.records.iter().filter(|r| r.case == case).count()
    }

    pub fn source_count(&self, source: Replacement) -> usize {
        self.records.iter().filter(|r| r.source == source).count()
    }

    pub fn at(&self, x: usize, y: usize) -> Option<&CaseRecord> {
        self.records.iter().find(|r| r.x == x && r.y == y)
    }
}

#[inline]
pub fn is_corrupted(value: u8, cfg: &RestoreConfig) -> bool {
    value == cfg.low_threshold || value == cfg.high_threshold
}

/// Corrupted samples in the replicated 5×5 window around `(x, y)`.
pub fn count_corrupted(img: &Image, x: usize, y: usize, cfg: &RestoreConfig) -> Result<usize> {
    let w = img.window(x, y, WindowSize::Five)?;
    Ok(count_in(&w, cfg))
}

fn count_in(win: &Window, cfg: &RestoreConfig) -> usize {
    win.values()
        .iter()
        .filter(|&&v| is_corrupted(v, cfg))
        .count()
}

/// Middle element of the sorted sequence.
pub fn exact_median(values: &[u8]) -> Result<u8> {
    if values.len().is_multiple_of(2) {
        return Err(Error::MedianLength(values.len()));
    }
    let mut buf = values.to_vec();
    let mid = buf.len() / 2;
    Ok(*buf.select_nth_unstable(mid).1)
}

fn window_median(win: &Window) -> u8 {
    let mut buf = [0u8; 25];
    let n = win.values().len();
    buf[..n].copy_from_slice(win.values());
    *buf[..n].select_nth_unstable(n / 2).1
}

/// Sorts rows, then columns, then the anti-diagonal, and returns the centre.
///
/// Exact for 3×3 windows. For 5×5 windows this is only an approximation of
/// the median.
pub fn shear_sort_median(win: &Window) -> u8 {
    let side = win.size().side();
    let mut m = [[0u8; 5]; 5];
    for (r, row) in m.iter_mut().enumerate().take(side) {
        row[..side].copy_from_slice(&win.values()[r * side..(r + 1) * side]);
        row[..side].sort_unstable();
    }
    for c in 0..side {
        let mut col: [u8; 5] = std::array::from_fn(|r| if r < side { m[r][c] } else { 0 });
        col[..side].sort_unstable();
        for (row, &v) in m.iter_mut().zip(&col[..side]) {
            row[c] = v;
        }
    }
    // anti-diagonal, ascending from the top-right corner
    let mut diag = [0u8; 5];
    for (i, d) in diag.iter_mut().enumerate().take(side) {
        *d = m[i][side - 1 - i];
    }
    diag[..side].sort_unstable();
    diag[side / 2]
}

/// Mean of the clean samples, rounded half up; `None` when all are corrupted.
pub fn mean_uncorrupted(win: &Window, cfg: &RestoreConfig) -> Option<u8> {
    let (sum, count) = win
        .values()
        .iter()
        .filter(|&&v| !is_corrupted(v, cfg))
        .fold((0u32, 0u32), |(s, c), &v| (s + u32::from(v), c + 1));
    if count == 0 {
        return None;
    }
    Some(((2 * sum + count) / (2 * count)) as u8)
}

/// Median of the window, or the clean mean if the median is a corrupted value.
fn median_or_mean(win: &Window, cfg: &RestoreConfig) -> Option<(u8, Replacement)> {
    let med = window_median(win);
    if !is_corrupted(med, cfg) {
        let src = match win.size() {
            WindowSize::Three => Replacement::Median3,
            WindowSize::Five => Replacement::Median5,
        };
        return Some((med, src));
    }
    mean_uncorrupted(win, cfg).map(|m| (m, Replacement::MeanUncorrupted))
}

/// Restores every detected pixel of `img`.
pub fn ndb_restore(img: &Image, cfg: &RestoreConfig) -> Result<(Image, CaseTrace)> {
    cfg.validate()?;
    let mut out = img.clone();
    let mut trace = CaseTrace::default();
    let (w, h) = img.dims();

    for y in 0..h {
        for x in 0..w {
            let center = out.get(x, y);
            if !is_corrupted(center, cfg) {
                trace.unaltered += 1;
                continue;
            }
            let source_img = if cfg.recursive { &out } else { img };
            let win5 = Window::gather(source_img, x, y, WindowSize::Five);
            let win3 = Window::gather(source_img, x, y, WindowSize::Three);
            let n = count_in(&win5, cfg);

            let (case, chosen) = if n <= cfg.case2_max {
                let v = median_or_mean(&win3, cfg).or_else(|| median_or_mean(&win5, cfg));
                (DecisionCase::Sparse, v)
            } else if n <= cfg.case3_max {
                (DecisionCase::Moderate, median_or_mean(&win5, cfg))
            } else {
                let v = median_or_mean(&win3, cfg).or_else(|| median_or_mean(&win5, cfg));
                (DecisionCase::Dense, v)
            };
            let (value, source) = chosen.unwrap_or_else(|| {
                let west = if x > 0 {
                    out.get(x - 1, y)
                } else {
                    FALLBACK_VALUE
                };
                (west, Replacement::Fallback)
            });
            out.set(x, y, value);
            trace.records.push(CaseRecord {
                x,
                y,
                corrupted_count: n,
                case,
                source,
                value,
            });
        }
    }
    Ok((out, trace))
}
