//! Block motion estimation with the adaptive rood pattern search (ARPS) and
//! motion-compensated three-frame temporal median denoising.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::pgm;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSequence {
    frames: Vec<Image>,
}

impl FrameSequence {
    pub fn new(frames: Vec<Image>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidParameter("frame sequence is empty".into()))?;
        for f in &frames[1..] {
            first.ensure_same_dims(f)?;
        }
        Ok(Self { frames })
    }

    pub fn frames(&self) -> &[Image] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Image> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }
}

/// Displacement of a block's best match in the reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

impl MotionVector {
    pub const ZERO: MotionVector = MotionVector { dx: 0, dy: 0 };

    pub fn new(dx: i32, dy: i32) -> Self {
        Self { dx, dy }
    }

    fn clamped(self, range: i32) -> Self {
        Self::new(self.dx.clamp(-range, range), self.dy.clamp(-range, range))
    }

    fn l1(self) -> i32 {
        self.dx.abs() + self.dy.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotionField {
    pub block_size: usize,
    pub search_range: usize,
    pub blocks_x: usize,
    pub blocks_y: usize,
    /// Row-major, one per block.
    pub vectors: Vec<MotionVector>,
    /// Distinct SAD evaluations spent on each block.
    pub evaluations: Vec<usize>,
}

impl MotionField {
    pub fn zero(width: usize, height: usize, block_size: usize, search_range: usize) -> Self {
        let blocks_x = width.div_ceil(block_size);
        let blocks_y = height.div_ceil(block_size);
        Self {
            block_size,
            search_range,
            blocks_x,
            blocks_y,
            vectors: vec![MotionVector::ZERO; blocks_x * blocks_y],
            evaluations: vec![0; blocks_x * blocks_y],
        }
    }

    pub fn vector(&self, bx: usize, by: usize) -> MotionVector {
        self.vectors[by * self.blocks_x + bx]
    }

    /// Vector of the block containing pixel `(x, y)`.
    pub fn vector_at_pixel(&self, x: usize, y: usize) -> MotionVector {
        self.vector(x / self.block_size, y / self.block_size)
    }

    /// `block_x,block_y,dx,dy` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block_x,block_y,dx,dy\n");
        for by in 0..self.blocks_y {
            for bx in 0..self.blocks_x {
                let v = self.vector(bx, by);
                let _ = writeln!(out, "{bx},{by},{},{}", v.dx, v.dy);
            }
        }
        out
    }
}

/// Geometry of one (possibly edge-clipped) block.
#[derive(Debug, Clone, Copy)]
pub struct Block {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl Block {
    pub fn new(img: &Image, bx: usize, by: usize, block_size: usize) -> Self {
        let x0 = bx * block_size;
        let y0 = by * block_size;
        Self {
            x0,
            y0,
            width: block_size.min(img.width() - x0),
            height: block_size.min(img.height() - y0),
        }
    }
}

/// Sum of absolute differences between a block of `current` and the block
/// displaced by `mv` in `reference`. Reference reads replicate edges.
pub fn block_sad(current: &Image, reference: &Image, block: Block, mv: MotionVector) -> u64 {
    let mut sad = 0u64;
    for y in block.y0..block.y0 + block.height {
        let ry = y as isize + mv.dy as isize;
        for x in block.x0..block.x0 + block.width {
            let rx = x as isize + mv.dx as isize;
            sad += u64::from(current.get(x, y).abs_diff(reference.get_clamped(rx, ry)));
        }
    }
    sad
}

/// Memoised cost evaluation over the `(2R+1)²` search window.
struct SearchWindow<'a> {
    current: &'a Image,
    reference: &'a Image,
    block: Block,
    range: i32,
    costs: Vec<Option<u64>>,
    evaluations: usize,
}

impl SearchWindow<'_> {
    fn cost(&mut self, mv: MotionVector) -> u64 {
        let side = (2 * self.range + 1) as usize;
        let idx = (mv.dy + self.range) as usize * side + (mv.dx + self.range) as usize;
        if let Some(c) = self.costs[idx] {
            return c;
        }
        let c = block_sad(self.current, self.reference, self.block, mv);
        self.costs[idx] = Some(c);
        self.evaluations += 1;
        c
    }

    /// Lowest `(cost, |dx|+|dy|, dy, dx)` among the candidates.
    fn best_of(&mut self, candidates: impl IntoIterator<Item = MotionVector>) -> MotionVector {
        let mut best: Option<((u64, i32, i32, i32), MotionVector)> = None;
        for mv in candidates {
            let mv = mv.clamped(self.range);
            let key = (self.cost(mv), mv.l1(), mv.dy, mv.dx);
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, mv));
            }
        }
        best.expect("at least one candidate").1
    }
}

/// Adaptive rood pattern search. Each block is predicted from its left
/// neighbour, probed with a rood of arm `max(|pdx|, |pdy|)` (1 for a zero
/// prediction) plus the predicted point, then refined with the small diamond
/// until the centre is the best point.
pub fn arps_estimate(
    current: &Image,
    reference: &Image,
    block_size: usize,
    search_range: usize,
) -> Result<MotionField> {
    current.ensure_same_dims(reference)?;
    if block_size == 0 {
        return Err(Error::InvalidParameter(
            "block size must be positive".into(),
        ));
    }
    let range = i32::try_from(search_range)
        .ok()
        .filter(|&r| r <= 1024)
        .ok_or_else(|| Error::InvalidParameter(format!("search range {search_range} too large")))?;

    let mut field = MotionField::zero(current.width(), current.height(), block_size, search_range);
    let side = (2 * range + 1) as usize;
    for by in 0..field.blocks_y {
        for bx in 0..field.blocks_x {
            let predicted = if bx > 0 {
                field.vector(bx - 1, by)
            } else {
                MotionVector::ZERO
            };
            let mut search = SearchWindow {
                current,
                reference,
                block: Block::new(current, bx, by, block_size),
                range,
                costs: vec![None; side * side],
                evaluations: 0,
            };

            let arm = if predicted == MotionVector::ZERO {
                1
            } else {
                predicted.dx.abs().max(predicted.dy.abs())
            };
            let mut best = search.best_of([
                MotionVector::ZERO,
                MotionVector::new(arm, 0),
                MotionVector::new(-arm, 0),
                MotionVector::new(0, arm),
                MotionVector::new(0, -arm),
                predicted,
            ]);
            loop {
                let MotionVector { dx, dy } = best;
                let next = search.best_of([
                    best,
                    MotionVector::new(dx + 1, dy),
                    MotionVector::new(dx - 1, dy),
                    MotionVector::new(dx, dy + 1),
                    MotionVector::new(dx, dy - 1),
                ]);
                if next == best {
                    break;
                }
                best = next;
            }
            let idx = by * field.blocks_x + bx;
            field.vectors[idx] = best;
            field.evaluations[idx] = search.evaluations;
        }
    }
    Ok(field)
}

fn median3(a: u8, b: u8, c: u8) -> u8 {
    a.max(b).min(a.min(b).max(c))
}

/// Motion-compensated prediction of `target`'s grid from `source`.
pub fn compensate(source: &Image, field: &MotionField) -> Image {
    let mut out = source.clone();
    for y in 0..source.height() {
        for x in 0..source.width() {
            let mv = field.vector_at_pixel(x, y);
            out.set(
                x,
                y,
                source.get_clamped(x as isize + mv.dx as isize, y as isize + mv.dy as isize),
            );
        }
    }
    out
}

/// Backward and forward fields for every interior frame: entry `i` holds
/// `(arps(t, t−1), arps(t, t+1))` for `t = i + 1`.
pub fn estimate_sequence_motion(
    seq: &FrameSequence,
    block_size: usize,
    search_range: usize,
) -> Result<Vec<(MotionField, MotionField)>> {
    let f = seq.frames();
    (1..f.len().saturating_sub(1))
        .map(|t| {
            Ok((
                arps_estimate(&f[t], &f[t - 1], block_size, search_range)?,
                arps_estimate(&f[t], &f[t + 1], block_size, search_range)?,
            ))
        })
        .collect()
}

/// Per-pixel median of the previous, current and next frame, with the
/// neighbours motion-compensated when fields are given. First and last
/// frames pass through.
pub fn temporal_median_denoise(
    seq: &FrameSequence,
    motion: Option<&[(MotionField, MotionField)]>,
) -> Result<FrameSequence> {
    let f = seq.frames();
    if f.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "temporal median needs at least 3 frames, got {}",
            f.len()
        )));
    }
    if let Some(m) = motion {
        if m.len() != f.len() - 2 {
            return Err(Error::InvalidParameter(format!(
                "expected {} motion field pairs, got {}",
                f.len() - 2,
                m.len()
            )));
        }
    }
    let mut out = Vec::with_capacity(f.len());
    out.push(f[0].clone());
    for t in 1..f.len() - 1 {
        let (prev, next) = match motion {
            Some(m) => (
                compensate(&f[t - 1], &m[t - 1].0),
                compensate(&f[t + 1], &m[t - 1].1),
            ),
            None => (f[t - 1].clone(), f[t + 1].clone()),
        };
        let px = prev
            .pixels()
            .iter()
            .zip(f[t].pixels())
            .zip(next.pixels())
            .map(|((&a, &b), &c)| median3(a, b, c))
            .collect();
        out.push(Image::new(f[t].width(), f[t].height(), px)?);
    }
    out.push(f[f.len() - 1].clone());
    FrameSequence::new(out)
}

/// PGM files of a directory in lexicographic order.
pub fn frame_paths(dir: impl AsRef<Path>) -> std::io::Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn read_frame_dir(dir: impl AsRef<Path>) -> std::io::Result<FrameSequence> {
    let frames = frame_paths(dir)?
        .iter()
        .map(pgm::read_pgm_file)
        .collect::<std::io::Result<Vec<_>>>()?;
    FrameSequence::new(frames).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

/// Writes `frame_0001.pgm`, `frame_0002.pgm`, ...
pub fn write_frame_dir(dir: impl AsRef<Path>, seq: &FrameSequence) -> std::io::Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for (i, frame) in seq.frames().iter().enumerate() {
        pgm::write_pgm_file(dir.join(format!("frame_{:04}.pgm", i + 1)), frame)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth(w: usize, h: usize, shift: (i32, i32)) -> Image {
        use std::f64::consts::TAU;
        Image::from_fn(w, h, |x, y| {
            let x = (x as i32 - shift.0).rem_euclid(w as i32) as f64;
            let y = (y as i32 - shift.1).rem_euclid(h as i32) as f64;
            let v = 128.0
                + 45.0 * (TAU * x / w as f64 * 3.0).sin()
                + 35.0 * (TAU * y / h as f64 * 2.0).cos()
                + 25.0 * (TAU * (x / w as f64 + y / h as f64) * 4.0).sin();
            v.round().clamp(1.0, 254.0) as u8
        })
        .unwrap()
    }

    #[test]
    fn identical_frames_give_zero_vectors_and_stop_at_once() {
        let img = smooth(64, 48, (0, 0));
        let field = arps_estimate(&img, &img, 16, 7).unwrap();
        assert!(field.vectors.iter().all(|&v| v == MotionVector::ZERO));
        // (0,0) plus the four unit rood points, then the diamond is all cached
        assert!(field.evaluations.iter().all(|&e| e == 5));
    }

    #[test]
    fn recovers_wrapped_translation() {
        let cur = smooth(96, 96, (0, 0));
        let reference = smooth(96, 96, (3, 2));
        let field = arps_estimate(&cur, &reference, 16, 7).unwrap();
        let hits = field
            .vectors
            .iter()
            .filter(|&&v| v == MotionVector::new(3, 2))
            .count();
        assert!(
            hits * 100 >= field.vectors.len() * 95,
            "{hits}/{}",
            field.vectors.len()
        );
    }

    #[test]
    fn reported_cost_never_exceeds_zero_or_prediction() {
        let cur = smooth(80, 64, (0, 0));
        let reference = smooth(80, 64, (-5, 4));
        let field = arps_estimate(&cur, &reference, 16, 7).unwrap();
        for by in 0..field.blocks_y {
            for bx in 0..field.blocks_x {
                let block = Block::new(&cur, bx, by, 16);
                let c = block_sad(&cur, &reference, block, field.vector(bx, by));
                assert!(c <= block_sad(&cur, &reference, block, MotionVector::ZERO));
                if bx > 0 {
                    assert!(c <= block_sad(&cur, &reference, block, field.vector(bx - 1, by)));
                }
                assert!(field.evaluations[by * field.blocks_x + bx] < 225);
            }
        }
    }

    #[test]
    fn clipped_edge_blocks() {
        let cur = smooth(40, 20, (0, 0));
        let field = arps_estimate(&cur, &cur, 16, 4).unwrap();
        assert_eq!((field.blocks_x, field.blocks_y), (3, 2));
        let b = Block::new(&cur, 2, 1, 16);
        assert_eq!((b.width, b.height), (8, 4));
        assert!(arps_estimate(&cur, &smooth(40, 21, (0, 0)), 16, 4).is_err());
    }

    #[test]
    fn motion_csv_layout() {
        let mut f = MotionField::zero(32, 16, 16, 7);
        f.vectors[1] = MotionVector::new(-2, 3);
        assert_eq!(f.to_csv(), "block_x,block_y,dx,dy\n0,0,0,0\n1,0,-2,3\n");
    }

    #[test]
    fn median_removes_single_frame_blotch() {
        let clean = smooth(32, 32, (0, 0));
        let mut dirty = clean.clone();
        for y in 10..15 {
            for x in 8..14 {
                dirty.set(x, y, 255);
            }
        }
        let seq = FrameSequence::new(vec![clean.clone(), dirty, clean.clone()]).unwrap();
        let out = temporal_median_denoise(&seq, None).unwrap();
        assert_eq!(out.frames()[1], clean);
        assert_eq!(out.frames()[0], seq.frames()[0]);

        let same = FrameSequence::new(vec![clean.clone(); 4]).unwrap();
        assert_eq!(temporal_median_denoise(&same, None).unwrap(), same);
    }

    #[test]
    fn needs_three_frames() {
        let seq = FrameSequence::new(vec![Image::filled(4, 4, 1).unwrap(); 2]).unwrap();
        assert!(temporal_median_denoise(&seq, None).is_err());
        assert!(FrameSequence::new(vec![]).is_err());
        assert!(FrameSequence::new(vec![
            Image::filled(4, 4, 1).unwrap(),
            Image::filled(4, 5, 1).unwrap()
        ])
        .is_err());
    }

    #[test]
    fn median3_is_exact() {
        for a in (0..=255u8).step_by(17) {
            for b in (0..=255u8).step_by(51) {
                for c in (0..=255u8).step_by(85) {
                    let mut v = [a, b, c];
                    v.sort_unstable();
                    assert_eq!(median3(a, b, c), v[1]);
                }
            }
        }
    }
}
