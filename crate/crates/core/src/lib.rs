//! Restoration of 8-bit grayscale images corrupted by impulse noise, drop
//! lines, strip lines, missing bands and blotches.
//!
//! The centre of the crate is [`restore::ndb_restore`], a decision-based
//! median/mean filter that only touches pixels it detects as corrupted.
//! Around it sit the pieces needed to evaluate it:
//!
//! - [`image`] and [`pgm`]: the grayscale raster type and binary PGM codec.
//! - [`degrade`]: seeded artifact injectors.
//! - [`baselines`]: classical median-family filters for comparison.
//! - [`metrics`]: MSE, PSNR, SNRI, PONA and POSP.
//! - [`freqdomain`]: 2-D DFT, low-pass transfer functions and homomorphic
//!   enhancement.
//! - [`video`]: ARPS block matching and motion-compensated temporal median.

pub mod baselines;
pub mod degrade;
pub mod error;
pub mod freqdomain;
pub mod image;
pub mod metrics;
pub mod pgm;
pub mod restore;
pub mod video;

pub use error::{Error, Result};
pub use image::{Image, Window, WindowSize};
