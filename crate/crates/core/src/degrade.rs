//! Seeded artifact injectors.
//!
//! Every injector builds a corruption mask `b` and a corruption-value image
//! `c`, then composes them with the clean image through
//! [`apply_degradation`], `a = I·(1 − b) + b·c`. Random draws come from
//! [`Rng64`] (SplitMix64), so a seed reproduces the same artifacts on any
//! platform.

use crate::error::{Error, Result};
use crate::image::Image;

/// SplitMix64 generator. The output sequence is part of the public contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`; `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Fair coin from the top bit.
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// 0 or 255 with equal probability.
    pub fn extreme(&mut self) -> u8 {
        if self.coin() {
            255
        } else {
            0
        }
    }

    /// Standard normal via Box–Muller (cosine branch, two uniforms per draw).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Per-pixel corruption flags, `true` where the injector replaced a sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegradationMask {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl DegradationMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            flags: vec![false; width * height],
        }
    }

    pub fn for_image(img: &Image) -> Self {
        Self::empty(img.width(), img.height())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.flags[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, corrupted: bool) {
        self.flags[y * self.width + x] = corrupted;
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn union_with(&mut self, other: &DegradationMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        for (a, &b) in self.flags.iter_mut().zip(&other.flags) {
            *a |= b;
        }
        Ok(())
    }

    /// 255 where corrupted, 0 elsewhere.
    pub fn to_image(&self) -> Image {
        let px = self
            .flags
            .iter()
            .map(|&f| if f { 255 } else { 0 })
            .collect();
        Image::new(self.width, self.height, px).expect("mask dimensions are positive")
    }

    /// Any nonzero sample counts as corrupted.
    pub fn from_image(img: &Image) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            flags: img.pixels().iter().map(|&v| v != 0).collect(),
        }
    }

    pub fn ensure_matches(&self, img: &Image) -> Result<()> {
        if self.dims() != img.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: img.dims(),
            });
        }
        Ok(())
    }
}

/// `a = I·(1 − b) + b·c`, evaluated per pixel.
pub fn apply_degradation(
    img: &Image,
    mask: &DegradationMask,
    corrupt_values: &Image,
) -> Result<Image> {
    mask.ensure_matches(img)?;
    img.ensure_same_dims(corrupt_values)?;
    let px = img
        .pixels()
        .iter()
        .zip(mask.flags())
        .zip(corrupt_values.pixels())
        .map(|((&i, &b), &c)| {
            let b = u32::from(b);
            (u32::from(i) * (1 - b) + b * u32::from(c)) as u8
        })
        .collect();
    Image::new(img.width(), img.height(), px)
}

/// Each pixel is independently hit with probability `p` and set to 0 or 255.
pub fn inject_impulse(img: &Image, p: f64, rng: &mut Rng64) -> Result<(Image, DegradationMask)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "impulse density {p} outside [0, 1]"
        )));
    }
    let mut mask = DegradationMask::for_image(img);
    let mut values = img.clone();
    for (i, v) in values.pixels_mut().iter_mut().enumerate() {
        if rng.next_f64() < p {
            mask.flags[i] = true;
            *v = rng.extreme();
        }
    }
    let out = apply_degradation(img, &mask, &values)?;
    Ok((out, mask))
}

/// Horizontal scanline artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineArtifact {
    /// `count` distinct random rows, each painted one random extreme.
    Drop { count: usize },
    /// `count` distinct random rows painted 0 and 255 alternately in row order.
    Strip { count: usize },
    /// `width` consecutive rows starting at `start`, one random extreme.
    Band { start: usize, width: usize },
}

pub fn inject_lines(
    img: &Image,
    artifact: LineArtifact,
    rng: &mut Rng64,
) -> Result<(Image, DegradationMask)> {
    let h = img.height();
    let mut rows: Vec<(usize, u8)> = Vec::new();
    match artifact {
        LineArtifact::Drop { count } => {
            for row in pick_rows(h, count, rng)? {
                rows.push((row, rng.extreme()));
            }
        }
        LineArtifact::Strip { count } => {
            let mut picked = pick_rows(h, count, rng)?;
            picked.sort_unstable();
            let mut value = rng.extreme();
            for row in picked {
                rows.push((row, value));
                value = 255 - value;
            }
        }
        LineArtifact::Band { start, width } => {
            if width < 2 {
                return Err(Error::InvalidParameter(format!(
                    "band width must be at least 2, got {width}"
                )));
            }
            if start.checked_add(width).is_none_or(|end| end > h) {
                return Err(Error::InvalidParameter(format!(
                    "band rows {start}..{} exceed image height {h}",
                    start.saturating_add(width)
                )));
            }
            let value = rng.extreme();
            rows.extend((start..start + width).map(|r| (r, value)));
        }
    }

    let mut mask = DegradationMask::for_image(img);
    let mut values = img.clone();
    for (row, value) in rows {
        for x in 0..img.width() {
            mask.set(x, row, true);
            values.set(x, row, value);
        }
    }
    let out = apply_degradation(img, &mask, &values)?;
    Ok((out, mask))
}

/// Distinct rows via a partial Fisher–Yates shuffle.
fn pick_rows(height: usize, count: usize, rng: &mut Rng64) -> Result<Vec<usize>> {
    if count > height {
        return Err(Error::InvalidParameter(format!(
            "{count} lines do not fit in image height {height}"
        )));
    }
    let mut rows: Vec<usize> = (0..height).collect();
    for i in 0..count {
        let j = i + rng.below((height - i) as u64) as usize;
        rows.swap(i, j);
    }
    rows.truncate(count);
    Ok(rows)
}

/// Filled axis-aligned ellipses of a single extreme value, clipped at the
/// borders. Semi-axes are drawn uniformly from `radius_range` (inclusive).
pub fn inject_blotches(
    img: &Image,
    count: usize,
    radius_range: (u32, u32),
    rng: &mut Rng64,
) -> Result<(Image, DegradationMask)> {
    let (rmin, rmax) = radius_range;
    if rmin == 0 || rmin > rmax {
        return Err(Error::InvalidParameter(format!(
            "blotch radius range ({rmin}, {rmax}) must satisfy 1 <= min <= max"
        )));
    }
    let mut mask = DegradationMask::for_image(img);
    let mut values = img.clone();
    let span = u64::from(rmax - rmin) + 1;
    for _ in 0..count {
        let cx = rng.below(img.width() as u64) as i64;
        let cy = rng.below(img.height() as u64) as i64;
        let a = i64::from(rmin) + rng.below(span) as i64;
        let b = i64::from(rmin) + rng.below(span) as i64;
        let value = rng.extreme();
        paint_ellipse(&mut mask, &mut values, (cx, cy), (a, b), value);
    }
    let out = apply_degradation(img, &mask, &values)?;
    Ok((out, mask))
}

/// Lattice points with `dx²/a² + dy²/b² ≤ 1`, tested in integers.
fn paint_ellipse(
    mask: &mut DegradationMask,
    values: &mut Image,
    center: (i64, i64),
    axes: (i64, i64),
    value: u8,
) {
    let (cx, cy) = center;
    let (a, b) = axes;
    let (a2, b2) = (a * a, b * b);
    for dy in -b..=b {
        let y = cy + dy;
        if y < 0 || y >= values.height() as i64 {
            continue;
        }
        for dx in -a..=a {
            let x = cx + dx;
            if x < 0 || x >= values.width() as i64 {
                continue;
            }
            if dx * dx * b2 + dy * dy * a2 <= a2 * b2 {
                mask.set(x as usize, y as usize, true);
                values.set(x as usize, y as usize, value);
            }
        }
    }
}

/// Additive zero-mean Gaussian noise, rounded and clamped to `[0, 255]`.
pub fn inject_gaussian(img: &Image, sigma: f64, rng: &mut Rng64) -> Result<Image> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma {sigma} must be finite and >= 0"
        )));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let px = img
        .pixels()
        .iter()
        .map(|&v| {
            let n = (sigma * rng.standard_normal()).round();
            (f64::from(v) + n).clamp(0.0, 255.0) as u8
        })
        .collect();
    Image::new(img.width(), img.height(), px)
}

/// Full degradation recipe. Stages run in a fixed order from one RNG
/// stream: gaussian, impulse, drop lines, strip lines, band, blotches.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradationSpec {
    pub impulse_density: f64,
    pub drop_lines: usize,
    pub strip_lines: usize,
    /// `(start_row, width)`, width at least 2.
    pub band: Option<(usize, usize)>,
    pub blotches: usize,
    pub blotch_radius: (u32, u32),
    pub gaussian_sigma: Option<f64>,
    pub seed: u64,
}

impl Default for DegradationSpec {
    fn default() -> Self {
        Self {
            impulse_density: 0.0,
            drop_lines: 0,
            strip_lines: 0,
            band: None,
            blotches: 0,
            blotch_radius: (2, 6),
            gaussian_sigma: None,
            seed: 0,
        }
    }
}

impl DegradationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.impulse_density) {
            return Err(Error::InvalidParameter(format!(
                "impulse density {} outside [0, 1]",
                self.impulse_density
            )));
        }
        if let Some((_, width)) = self.band {
            if width < 2 {
                return Err(Error::InvalidParameter(format!(
                    "band width must be at least 2, got {width}"
                )));
            }
        }
        if let Some(sigma) = self.gaussian_sigma {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "gaussian sigma {sigma} must be finite and >= 0"
                )));
            }
        }
        let (rmin, rmax) = self.blotch_radius;
        if self.blotches > 0 && (rmin == 0 || rmin > rmax) {
            return Err(Error::InvalidParameter(format!(
                "blotch radius range ({rmin}, {rmax}) must satisfy 1 <= min <= max"
            )));
        }
        Ok(())
    }

    /// Applies every configured stage and ORs the masks. Gaussian noise is
    /// not recorded in the mask.
    pub fn apply(&self, img: &Image) -> Result<(Image, DegradationMask)> {
        self.validate()?;
        let mut rng = Rng64::new(self.seed);
        let mut current = match self.gaussian_sigma {
            Some(sigma) => inject_gaussian(img, sigma, &mut rng)?,
            None => img.clone(),
        };
        let mut mask = DegradationMask::for_image(img);

        let mut stage = |current: &mut Image, result: (Image, DegradationMask)| -> Result<()> {
            mask.union_with(&result.1)?;
            *current = result.0;
            Ok(())
        };
        if self.impulse_density > 0.0 {
            let r = inject_impulse(&current, self.impulse_density, &mut rng)?;
            stage(&mut current, r)?;
        }
        if self.drop_lines > 0 {
            let r = inject_lines(
                &current,
                LineArtifact::Drop {
                    count: self.drop_lines,
                },
                &mut rng,
            )?;
            stage(&mut current, r)?;
        }
        if self.strip_lines > 0 {
            let r = inject_lines(
                &current,
                LineArtifact::Strip {
                    count: self.strip_lines,
                },
                &mut rng,
            )?;
            stage(&mut current, r)?;
        }
        if let Some((start, width)) = self.band {
            let r = inject_lines(&current, LineArtifact::Band { start, width }, &mut rng)?;
            stage(&mut current, r)?;
        }
        if self.blotches > 0 {
            let r = inject_blotches(&current, self.blotches, self.blotch_radius, &mut rng)?;
            stage(&mut current, r)?;
        }
        Ok((current, mask))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, v: u8) -> Image {
        Image::filled(w, h, v).unwrap()
    }

    #[test]
    fn splitmix_reference_vector() {
        // first outputs for seed 0 published with the reference implementation
        let mut rng = Rng64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn uniform_and_below_stay_in_range() {
        let mut rng = Rng64::new(7);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
            assert!(rng.below(13) < 13);
        }
    }

    #[test]
    fn composition_follows_the_mask() {
        let img = Image::from_fn(4, 3, |x, y| (10 + x + 4 * y) as u8).unwrap();
        let c = gray(4, 3, 200);
        let none = DegradationMask::for_image(&img);
        assert_eq!(apply_degradation(&img, &none, &c).unwrap(), img);

        let mut all = DegradationMask::for_image(&img);
        all.flags.iter_mut().for_each(|f| *f = true);
        assert_eq!(apply_degradation(&img, &all, &c).unwrap(), c);

        let mut one = DegradationMask::for_image(&img);
        one.set(2, 1, true);
        let out = apply_degradation(&img, &one, &c).unwrap();
        for y in 0..3 {
            for x in 0..4 {
                let expect = if (x, y) == (2, 1) { 200 } else { img.get(x, y) };
                assert_eq!(out.get(x, y), expect);
            }
        }
        assert!(apply_degradation(&img, &one, &gray(3, 3, 0)).is_err());
    }

    #[test]
    fn impulse_extremes() {
        let img = gray(32, 32, 128);
        let (out, mask) = inject_impulse(&img, 0.0, &mut Rng64::new(1)).unwrap();
        assert_eq!(out, img);
        assert_eq!(mask.count(), 0);

        let (out, mask) = inject_impulse(&img, 1.0, &mut Rng64::new(1)).unwrap();
        assert!(out.pixels().iter().all(|&v| v == 0 || v == 255));
        assert_eq!(mask.count(), img.len());
        assert!(out.pixels().contains(&0) && out.pixels().contains(&255));

        assert!(inject_impulse(&img, 1.5, &mut Rng64::new(1)).is_err());
    }

    #[test]
    fn impulse_count_matches_binomial() {
        let img = gray(512, 512, 128);
        let (_, mask) = inject_impulse(&img, 0.2, &mut Rng64::new(42)).unwrap();
        let n = 262_144f64;
        let mean = n * 0.2;
        let sd = (n * 0.2 * 0.8).sqrt();
        let got = mask.count() as f64;
        assert!(
            (got - mean).abs() <= 3.0 * sd,
            "count {got} vs {mean} ± {}",
            3.0 * sd
        );
    }

    #[test]
    fn drop_line_paints_one_constant_row() {
        let img = gray(16, 12, 128);
        let (out, mask) =
            inject_lines(&img, LineArtifact::Drop { count: 1 }, &mut Rng64::new(3)).unwrap();
        let bad: Vec<usize> = (0..12).filter(|&y| out.get(0, y) != 128).collect();
        assert_eq!(bad.len(), 1);
        let row = bad[0];
        let v = out.get(0, row);
        assert!(v == 0 || v == 255);
        for x in 0..16 {
            assert_eq!(out.get(x, row), v);
            assert!(mask.get(x, row));
        }
        assert_eq!(mask.count(), 16);
    }

    #[test]
    fn band_rows_only() {
        let img = gray(8, 20, 90);
        let (out, mask) = inject_lines(
            &img,
            LineArtifact::Band {
                start: 10,
                width: 4,
            },
            &mut Rng64::new(9),
        )
        .unwrap();
        let v = out.get(0, 10);
        for y in 0..20 {
            for x in 0..8 {
                if (10..14).contains(&y) {
                    assert_eq!(out.get(x, y), v);
                    assert!(mask.get(x, y));
                } else {
                    assert_eq!(out.get(x, y), 90);
                    assert!(!mask.get(x, y));
                }
            }
        }
        assert!(inject_lines(
            &gray(8, 8, 90),
            LineArtifact::Band {
                start: 10,
                width: 4
            },
            &mut Rng64::new(0)
        )
        .is_err());
        assert!(inject_lines(
            &gray(8, 8, 90),
            LineArtifact::Band { start: 6, width: 4 },
            &mut Rng64::new(0)
        )
        .is_err());
        assert!(inject_lines(
            &gray(8, 8, 90),
            LineArtifact::Band { start: 0, width: 1 },
            &mut Rng64::new(0)
        )
        .is_err());
        assert!(inject_lines(
            &gray(8, 8, 90),
            LineArtifact::Drop { count: 9 },
            &mut Rng64::new(0)
        )
        .is_err());
    }

    #[test]
    fn strip_lines_alternate() {
        for seed in 0..20 {
            let img = gray(10, 30, 128);
            let (out, mask) = inject_lines(
                &img,
                LineArtifact::Strip { count: 2 },
                &mut Rng64::new(seed),
            )
            .unwrap();
            let mut rows: Vec<u8> = (0..30)
                .map(|y| out.get(0, y))
                .filter(|&v| v != 128)
                .collect();
            rows.sort_unstable();
            assert_eq!(rows, vec![0, 255]);
            assert_eq!(mask.count(), 20);
        }
    }

    #[test]
    fn single_disc_blotch_matches_lattice_count() {
        // brute-force oracle: lattice points of x²/9 + y²/9 <= 1 in floating point
        let mut oracle = 0;
        for dy in -5i32..=5 {
            for dx in -5i32..=5 {
                if (dx * dx) as f64 / 9.0 + (dy * dy) as f64 / 9.0 <= 1.0 {
                    oracle += 1;
                }
            }
        }
        assert_eq!(oracle, 29);

        let img = gray(64, 64, 0);
        // a seed whose blotch centre lands at least 3 pixels from every border
        let seed = (0..)
            .find(|&s| {
                let mut r = Rng64::new(s);
                let cx = r.below(64);
                let cy = r.below(64);
                (3..61).contains(&cx) && (3..61).contains(&cy)
            })
            .unwrap();
        let (out, mask) = inject_blotches(&img, 1, (3, 3), &mut Rng64::new(seed)).unwrap();
        assert_eq!(mask.count(), oracle);
        let v = out.pixels().iter().copied().find(|&v| v != 0);
        if v == Some(255) {
            for (i, &p) in out.pixels().iter().enumerate() {
                assert_eq!(p == 255, mask.flags()[i]);
            }
        }
    }

    #[test]
    fn bright_blotch_on_black_is_consistent_with_mask() {
        let img = gray(48, 48, 0);
        for seed in 0..40 {
            let (out, mask) = inject_blotches(&img, 3, (2, 5), &mut Rng64::new(seed)).unwrap();
            let painted: Vec<u8> = out.pixels().iter().copied().filter(|&v| v != 0).collect();
            if painted.iter().all(|&v| v == 255) && mask.count() == painted.len() {
                for (i, &p) in out.pixels().iter().enumerate() {
                    assert_eq!(p == 255, mask.flags()[i]);
                }
                return;
            }
        }
        panic!("no seed produced an all-bright blotch set");
    }

    #[test]
    fn zero_blotches_is_identity() {
        let img = gray(16, 16, 77);
        let (out, mask) = inject_blotches(&img, 0, (1, 3), &mut Rng64::new(5)).unwrap();
        assert_eq!(out, img);
        assert_eq!(mask.count(), 0);
    }

    #[test]
    fn gaussian_moments() {
        let img = gray(512, 512, 128);
        assert_eq!(inject_gaussian(&img, 0.0, &mut Rng64::new(1)).unwrap(), img);
        let out = inject_gaussian(&img, 10.0, &mut Rng64::new(1)).unwrap();
        let n = out.len() as f64;
        let mean = out.pixels().iter().map(|&v| f64::from(v)).sum::<f64>() / n;
        let var = out
            .pixels()
            .iter()
            .map(|&v| (f64::from(v) - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        assert!((mean - 128.0).abs() < 0.2, "mean {mean}");
        assert!((var.sqrt() - 10.0).abs() < 0.2, "sd {}", var.sqrt());

        let dark = inject_gaussian(&gray(64, 64, 3), 40.0, &mut Rng64::new(2)).unwrap();
        assert!(dark.pixels().contains(&0));
    }

    #[test]
    fn spec_masks_are_or_combined_and_deterministic() {
        let img = Image::from_fn(64, 48, |x, y| (40 + (x * 3 + y * 2) % 150) as u8).unwrap();
        let spec = DegradationSpec {
            impulse_density: 0.1,
            drop_lines: 2,
            strip_lines: 2,
            band: Some((20, 3)),
            blotches: 3,
            seed: 11,
            ..Default::default()
        };
        let (a, ma) = spec.apply(&img).unwrap();
        let (b, mb) = spec.apply(&img).unwrap();
        assert_eq!(a, b);
        assert_eq!(ma, mb);
        for (i, (&o, &d)) in img.pixels().iter().zip(a.pixels()).enumerate() {
            if !ma.flags()[i] {
                assert_eq!(o, d);
            } else {
                assert!(d == 0 || d == 255);
            }
        }
        for x in 0..64 {
            for y in 20..23 {
                assert!(ma.get(x, y));
            }
        }
    }

    #[test]
    fn mask_pgm_roundtrip() {
        let mut m = DegradationMask::empty(3, 2);
        m.set(1, 1, true);
        let img = m.to_image();
        assert_eq!(img.pixels(), &[0, 0, 0, 0, 255, 0]);
        assert_eq!(DegradationMask::from_image(&img), m);
    }
}
