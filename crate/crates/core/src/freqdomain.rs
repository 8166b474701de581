//! Frequency-domain filtering: centred 2-D DFT, low-pass transfer functions
//! and homomorphic enhancement.
//!
//! Spectra are stored DC-centred: the coefficient for frequency `(u, v)` sits
//! at index `((u + W/2) mod W, (v + H/2) mod H)`. For even dimensions this is
//! the same as modulating the input by `(−1)^(x+y)` before transforming.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::image::Image;

/// Real-valued row-major grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RealGrid {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        if data.len() != width * height {
            return Err(Error::PixelCount {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_image(img: &Image) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            data: img.pixels().iter().map(|&v| f64::from(v)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Linear map of `[min, max]` onto `[0, 255]`, rounded half up. A flat
    /// grid is rounded and clamped instead.
    pub fn to_image_rescaled(&self) -> Image {
        let (lo, hi) = self
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let span = hi - lo;
        let flat = span.is_nan() || span <= 1e-9 * hi.abs().max(1.0);
        let px = self
            .data
            .iter()
            .map(|&v| {
                let scaled = if flat { v } else { (v - lo) / span * 255.0 };
                (scaled + 0.5).floor().clamp(0.0, 255.0) as u8
            })
            .collect();
        Image::new(self.width, self.height, px).expect("grid dimensions are positive")
    }
}

/// DC-centred complex spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    width: usize,
    height: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(width: usize, height: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        if coeffs.len() != width * height {
            return Err(Error::PixelCount {
                expected: width * height,
                actual: coeffs.len(),
            });
        }
        Ok(Self {
            width,
            height,
            coeffs,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.coeffs[v * self.width + u]
    }

    /// Index of the DC coefficient.
    pub fn center(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }

    /// Euclidean distance of stored index `(u, v)` from the DC coefficient.
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        let (cu, cv) = self.center();
        let du = u as f64 - cu as f64;
        let dv = v as f64 - cv as f64;
        (du * du + dv * dv).sqrt()
    }
}

fn fft_2d(width: usize, height: usize, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = if inverse {
        (
            planner.plan_fft_inverse(width),
            planner.plan_fft_inverse(height),
        )
    } else {
        (
            planner.plan_fft_forward(width),
            planner.plan_fft_forward(height),
        )
    };
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            column[y] = data[y * width + x];
        }
        col_fft.process(&mut column);
        for y in 0..height {
            data[y * width + x] = column[y];
        }
    }
}

/// Forward transform, `F(u,v) = Σ f(x,y)·exp(−2πi(ux/W + vy/H))`, centred.
pub fn dft2(grid: &RealGrid) -> Spectrum {
    let (w, h) = (grid.width, grid.height);
    let mut data: Vec<Complex64> = grid.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_2d(w, h, &mut data, false);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); w * h];
    for v in 0..h {
        let sv = (v + h / 2) % h;
        for u in 0..w {
            let su = (u + w / 2) % w;
            coeffs[sv * w + su] = data[v * w + u];
        }
    }
    Spectrum {
        width: w,
        height: h,
        coeffs,
    }
}

/// Inverse of [`dft2`]; imaginary residue is discarded.
pub fn idft2(spec: &Spectrum) -> RealGrid {
    let (w, h) = (spec.width, spec.height);
    let mut data = vec![Complex64::new(0.0, 0.0); w * h];
    for v in 0..h {
        let sv = (v + h / 2) % h;
        for u in 0..w {
            let su = (u + w / 2) % w;
            data[v * w + u] = spec.coeffs[sv * w + su];
        }
    }
    fft_2d(w, h, &mut data, true);
    let norm = 1.0 / (w * h) as f64;
    RealGrid {
        width: w,
        height: h,
        data: data.iter().map(|c| c.re * norm).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferSpec {
    /// `H = 1` inside radius `cutoff`, 0 outside.
    IdealLowPass { cutoff: f64 },
    /// `H = 1 / (1 + (D/D0)^(2n))`.
    ButterworthLowPass { cutoff: f64, order: u32 },
    /// `H = (γH − γL)·(1 − exp(−c·D²/D0²)) + γL`.
    HomomorphicEmphasis {
        cutoff: f64,
        gamma_low: f64,
        gamma_high: f64,
        sharpness: f64,
    },
}

impl TransferSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            TransferSpec::IdealLowPass { cutoff } if cutoff.is_nan() || cutoff <= 0.0 => {
                bad(format!("cutoff must be positive, got {cutoff}"))
            }
            TransferSpec::ButterworthLowPass { cutoff, order } => {
                if cutoff.is_nan() || cutoff <= 0.0 {
                    bad(format!("cutoff must be positive, got {cutoff}"))
                } else if order == 0 {
                    bad("butterworth order must be positive".into())
                } else {
                    Ok(())
                }
            }
            TransferSpec::HomomorphicEmphasis {
                cutoff,
                gamma_low,
                gamma_high,
                sharpness,
            } => {
                if !(cutoff > 0.0 && sharpness > 0.0) {
                    bad(format!(
                        "cutoff ({cutoff}) and sharpness ({sharpness}) must be positive"
                    ))
                } else if !(gamma_low > 0.0 && gamma_high >= gamma_low && gamma_high.is_finite()) {
                    bad(format!("gains must satisfy 0 < gamma_low <= gamma_high, got {gamma_low} and {gamma_high}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Gain at distance `d` from the spectrum centre.
    pub fn gain(&self, d: f64) -> f64 {
        match *self {
            TransferSpec::IdealLowPass { cutoff } => {
                if d <= cutoff {
                    1.0
                } else {
                    0.0
                }
            }
            TransferSpec::ButterworthLowPass { cutoff, order } => {
                1.0 / (1.0 + (d / cutoff).powi(2 * order as i32))
            }
            TransferSpec::HomomorphicEmphasis {
                cutoff,
                gamma_low,
                gamma_high,
                sharpness,
            } => {
                (gamma_high - gamma_low) * (1.0 - (-sharpness * d * d / (cutoff * cutoff)).exp())
                    + gamma_low
            }
        }
    }
}

/// Pointwise product with the transfer function.
pub fn transfer(spec: &Spectrum, t: &TransferSpec) -> Result<Spectrum> {
    t.validate()?;
    let mut out = spec.clone();
    for v in 0..spec.height {
        for u in 0..spec.width {
            out.coeffs[v * spec.width + u] *= t.gain(spec.distance(u, v));
        }
    }
    Ok(out)
}

/// `exp(IDFT(H · DFT(ln(1 + f)))) − 1`, before any range mapping.
pub fn homomorphic_filter(img: &Image, t: &TransferSpec) -> Result<RealGrid> {
    if !matches!(t, TransferSpec::HomomorphicEmphasis { .. }) {
        return Err(Error::InvalidParameter(
            "homomorphic filtering needs a homomorphic-emphasis transfer".into(),
        ));
    }
    let log = RealGrid::from_image(img).map(f64::ln_1p);
    let filtered = idft2(&transfer(&dft2(&log), t)?);
    Ok(filtered.map(f64::exp_m1))
}

/// Homomorphic enhancement rescaled to the full 8-bit range.
pub fn homomorphic_enhance(img: &Image, t: &TransferSpec) -> Result<Image> {
    Ok(homomorphic_filter(img, t)?.to_image_rescaled())
}
