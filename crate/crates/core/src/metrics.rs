//! Restoration quality metrics.
//!
//! Sums are accumulated exactly in `u64` and converted to floating point once
//! per ratio. Infinite results are reported as `f64::INFINITY`; results that
//! have no meaning for the given inputs (empty denominators) are `None`.

use crate::degrade::DegradationMask;
use crate::error::Result;
use crate::image::Image;

const PEAK_SQUARED: f64 = 255.0 * 255.0;

fn squared_error_sum(a: &Image, b: &Image) -> Result<u64> {
    a.ensure_same_dims(b)?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&p, &q)| {
            let d = u64::from(p.abs_diff(q));
            d * d
        })
        .sum())
}

fn energy(img: &Image) -> u64 {
    img.pixels()
        .iter()
        .map(|&v| u64::from(v) * u64::from(v))
        .sum()
}

/// Mean squared error over all pixels.
pub fn mse(original: &Image, restored: &Image) -> Result<f64> {
    Ok(squared_error_sum(original, restored)? as f64 / original.len() as f64)
}

/// `10·log10(255² / MSE)`, `+inf` for identical images.
pub fn psnr(original: &Image, restored: &Image) -> Result<f64> {
    Ok(psnr_from_mse(mse(original, restored)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK_SQUARED / mse).log10()
    }
}

/// `10·log10(ΣS² / Σ(S − X)²)`. `None` when the original has no energy,
/// `+inf` when `other == original`.
pub fn snr_db(original: &Image, other: &Image) -> Result<Option<f64>> {
    let err = squared_error_sum(original, other)?;
    let signal = energy(original);
    Ok(match (signal, err) {
        (0, _) => None,
        (_, 0) => Some(f64::INFINITY),
        (s, e) => Some(10.0 * (s as f64 / e as f64).log10()),
    })
}

/// SNR of the restored image minus SNR of the noisy image. `None` when the
/// noisy image equals the original (its SNR is infinite).
pub fn snri(original: &Image, noisy: &Image, restored: &Image) -> Result<Option<f64>> {
    let noisy_snr = snr_db(original, noisy)?;
    let restored_snr = snr_db(original, restored)?;
    Ok(snri_from(restored_snr, noisy_snr))
}

fn snri_from(restored: Option<f64>, noisy: Option<f64>) -> Option<f64> {
    match (restored, noisy) {
        (Some(r), Some(n)) if n.is_finite() => Some(r - n),
        _ => None,
    }
}

fn check_triple(
    original: &Image,
    noisy: &Image,
    restored: &Image,
    mask: &DegradationMask,
) -> Result<()> {
    original.ensure_same_dims(noisy)?;
    original.ensure_same_dims(restored)?;
    mask.ensure_matches(original)
}

/// Percentage of mask pixels whose absolute error strictly decreased.
pub fn pona(
    original: &Image,
    noisy: &Image,
    restored: &Image,
    mask: &DegradationMask,
) -> Result<Option<f64>> {
    check_triple(original, noisy, restored, mask)?;
    let (mut noisy_count, mut improved) = (0u64, 0u64);
    for (i, &flag) in mask.flags().iter().enumerate() {
        if !flag {
            continue;
        }
        noisy_count += 1;
        let s = original.pixels()[i];
        if restored.pixels()[i].abs_diff(s) < noisy.pixels()[i].abs_diff(s) {
            improved += 1;
        }
    }
    Ok(percentage(improved, noisy_count))
}

/// Percentage of pixels outside the mask whose value changed.
pub fn posp(
    original: &Image,
    noisy: &Image,
    restored: &Image,
    mask: &DegradationMask,
) -> Result<Option<f64>> {
    check_triple(original, noisy, restored, mask)?;
    let (mut clean, mut spoiled) = (0u64, 0u64);
    for (i, &flag) in mask.flags().iter().enumerate() {
        if flag {
            continue;
        }
        clean += 1;
        if restored.pixels()[i] != original.pixels()[i] {
            spoiled += 1;
        }
    }
    Ok(percentage(spoiled, clean))
}

fn percentage(part: u64, whole: u64) -> Option<f64> {
    (whole > 0).then(|| 100.0 * part as f64 / whole as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    pub psnr_db: f64,
    pub snr_restored_db: Option<f64>,
    pub snr_noisy_db: Option<f64>,
    pub snri_db: Option<f64>,
    pub pona_pct: Option<f64>,
    pub posp_pct: Option<f64>,
}

impl MetricsReport {
    pub fn compute(
        original: &Image,
        noisy: &Image,
        restored: &Image,
        mask: &DegradationMask,
    ) -> Result<Self> {
        check_triple(original, noisy, restored, mask)?;
        let mse = mse(original, restored)?;
        let snr_restored_db = snr_db(original, restored)?;
        let snr_noisy_db = snr_db(original, noisy)?;
        Ok(Self {
            mse,
            psnr_db: psnr_from_mse(mse),
            snr_restored_db,
            snr_noisy_db,
            snri_db: snri_from(snr_restored_db, snr_noisy_db),
            pona_pct: pona(original, noisy, restored, mask)?,
            posp_pct: posp(original, noisy, restored, mask)?,
        })
    }
}

/// Fixed four decimals; `inf`/`-inf` for infinities and `na` for undefined.
pub fn format_value(value: Option<f64>) -> String {
    match value {
        None => "na".to_string(),
        Some(v) if v.is_nan() => "na".to_string(),
        Some(v) if v == f64::INFINITY => "inf".to_string(),
        Some(v) if v == f64::NEG_INFINITY => "-inf".to_string(),
        Some(v) => format!("{v:.4}"),
    }
}
