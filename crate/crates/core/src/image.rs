//! Grayscale raster and windowed access.

use crate::error::{Error, Result};

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidParameter(format!("{width}x{height} overflows")))?;
        if pixels.len() != expected {
            return Err(Error::PixelCount {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds an image by evaluating `f(x, y)` in raster order.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Always false; kept alongside `len` for API symmetry.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Panics if `(x, y)` is out of bounds.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of bounds"
        );
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of bounds"
        );
        self.pixels[y * self.width + x] = value;
    }

    /// Sample at a possibly out-of-range coordinate, replicating the nearest
    /// edge pixel.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.pixels[cy * self.width + cx]
    }

    /// Transposed copy. Row-oriented artifacts become column-oriented.
    pub fn transposed(&self) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for x in 0..self.width {
            for y in 0..self.height {
                pixels.push(self.pixels[y * self.width + x]);
            }
        }
        Self {
            width: self.height,
            height: self.width,
            pixels,
        }
    }

    pub fn ensure_same_dims(&self, other: &Image) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }

    /// Square neighbourhood centred on `(x, y)` with edge replication.
    pub fn window(&self, x: usize, y: usize, size: WindowSize) -> Result<Window> {
        if x >= self.width || y >= self.height {
            return Err(Error::OutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            });
        }
        Ok(Window::gather(self, x, y, size))
    }

    /// Collects the `(2r+1)²` replicated neighbourhood into `buf`, row-major.
    pub fn neighbourhood_into(&self, x: usize, y: usize, radius: usize, buf: &mut Vec<u8>) {
        buf.clear();
        let r = radius as isize;
        let (cx, cy) = (x as isize, y as isize);
        for dy in -r..=r {
            for dx in -r..=r {
                buf.push(self.get_clamped(cx + dx, cy + dy));
            }
        }
    }
}

/// Odd window side length supported by the window-based filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowSize {
    Three,
    Five,
}

impl WindowSize {
    #[inline]
    pub fn side(self) -> usize {
        match self {
            WindowSize::Three => 3,
            WindowSize::Five => 5,
        }
    }

    #[inline]
    pub fn radius(self) -> usize {
        self.side() / 2
    }

    #[inline]
    pub fn area(self) -> usize {
        self.side() * self.side()
    }

    pub fn from_side(side: usize) -> Result<Self> {
        match side {
            3 => Ok(WindowSize::Three),
            5 => Ok(WindowSize::Five),
            _ => Err(Error::InvalidParameter(format!(
                "window size must be 3 or 5, got {side}"
            ))),
        }
    }
}

/// A 3×3 or 5×5 block of samples in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    size: WindowSize,
    values: [u8; 25],
}

impl Window {
    pub fn from_values(size: WindowSize, values: &[u8]) -> Result<Self> {
        if values.len() != size.area() {
            return Err(Error::InvalidParameter(format!(
                "a {0}x{0} window needs {1} values, got {2}",
                size.side(),
                size.area(),
                values.len()
            )));
        }
        let mut buf = [0u8; 25];
        buf[..values.len()].copy_from_slice(values);
        Ok(Self { size, values: buf })
    }

    /// Caller guarantees `(x, y)` is inside `img`.
    pub(crate) fn gather(img: &Image, x: usize, y: usize, size: WindowSize) -> Self {
        let r = size.radius() as isize;
        let side = size.side();
        let (cx, cy) = (x as isize, y as isize);
        let mut values = [0u8; 25];
        let interior = x >= size.radius()
            && y >= size.radius()
            && x + size.radius() < img.width
            && y + size.radius() < img.height;
        if interior {
            for row in 0..side {
                let start = (y + row - size.radius()) * img.width + x - size.radius();
                values[row * side..(row + 1) * side]
                    .copy_from_slice(&img.pixels[start..start + side]);
            }
        } else {
            let mut i = 0;
            for dy in -r..=r {
                for dx in -r..=r {
                    values[i] = img.get_clamped(cx + dx, cy + dy);
                    i += 1;
                }
            }
        }
        Self { size, values }
    }

    #[inline]
    pub fn size(&self) -> WindowSize {
        self.size
    }

    #[inline]
    pub fn values(&self) -> &[u8] {
        &self.values[..self.size.area()]
    }

    #[inline]
    pub fn center(&self) -> u8 {
        self.values[self.size.area() / 2]
    }

    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.values()[row * self.size.side() + col]
    }
}
