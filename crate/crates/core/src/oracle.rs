//! Slow, literal reference implementations of both criteria.
//!
//! Nothing here calls into the optimized modules: the kernel table, the
//! quantizer, the window walk and the histogram are all written out again
//! with plain nested loops.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::types::{
    Channel, CurvatureConfig, CurvatureMap, Denominator, Element, EntropyConfig, JointHistogram,
    Padding,
};

const KERNEL: [[f64; 3]; 3] = [
    [-1.0 / 16.0, 5.0 / 16.0, -1.0 / 16.0],
    [5.0 / 16.0, -1.0, 5.0 / 16.0],
    [-1.0 / 16.0, 5.0 / 16.0, -1.0 / 16.0],
];

fn read<T: Element>(ch: Channel<'_, T>, y: isize, x: isize, padding: Padding) -> f64 {
    let (h, w) = (ch.height() as isize, ch.width() as isize);
    let inside = y >= 0 && y < h && x >= 0 && x < w;
    match padding {
        Padding::Zero if !inside => 0.0,
        _ => {
            let yy = y.clamp(0, h - 1) as usize;
            let xx = x.clamp(0, w - 1) as usize;
            ch.get(yy, xx).to_f64()
        }
    }
}

pub fn naive_curvature<T: Element>(ch: Channel<'_, T>, cfg: &CurvatureConfig) -> CurvatureMap {
    let (h, w) = ch.shape();
    let mut values = vec![0.0; h * w];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for ky in 0..3 {
                for kx in 0..3 {
                    let sy = y as isize + ky as isize - 1;
                    let sx = x as isize + kx as isize - 1;
                    acc += KERNEL[ky][kx] * read(ch, sy, sx, cfg.padding);
                }
            }
            values[y * w + x] = acc;
        }
    }
    CurvatureMap {
        height: h,
        width: w,
        values,
    }
}

pub fn naive_curvature_score<T: Element>(ch: Channel<'_, T>, cfg: &CurvatureConfig) -> f64 {
    let map = naive_curvature(ch, cfg);
    let mut total = 0.0;
    for v in &map.values {
        total += v.abs();
    }
    total / (map.height * map.width) as f64
}

fn naive_levels<T: Element>(ch: Channel<'_, T>, bins: usize) -> Vec<Vec<usize>> {
    let (h, w) = ch.shape();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for y in 0..h {
        for x in 0..w {
            let v = ch.get(y, x).to_f64();
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
    }
    let mut scale = 1.0;
    if !(hi - lo).is_finite() {
        scale = 0.5;
    }
    let lo = lo * scale;
    let hi = hi * scale;
    let top = (bins - 1) as f64;
    let mut levels = vec![vec![0usize; w]; h];
    for y in 0..h {
        for x in 0..w {
            if hi == lo {
                levels[y][x] = 0;
            } else {
                let v = ch.get(y, x).to_f64() * scale;
                let mut level = (top * ((v - lo) / (hi - lo)) + 0.5).floor();
                if level < 0.0 {
                    level = 0.0;
                }
                if level > top {
                    level = top;
                }
                levels[y][x] = level as usize;
            }
        }
    }
    levels
}

/// Joint histogram and entropy of one channel, by direct enumeration of
/// every window.
pub fn naive_entropy<T: Element>(
    ch: Channel<'_, T>,
    cfg: &EntropyConfig,
) -> Result<(JointHistogram, f64)> {
    let (h, w) = ch.shape();
    let k = cfg.kernel_size();
    let ext = k / 2;
    if h < k - ext || w < k - ext {
        return Err(Error::TooSmall {
            height: h,
            width: w,
            min: k - ext,
        });
    }
    let bins = cfg.bins();
    let levels = naive_levels(ch, bins);

    let mut grid = vec![vec![0u32; bins]; bins];
    for y in 0..h {
        for x in 0..w {
            let center = levels[y][x];
            let mut sum = 0usize;
            for dy in -(ext as isize)..=(ext as isize) {
                for dx in -(ext as isize)..=(ext as isize) {
                    let yy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                    let xx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                    sum += levels[yy][xx];
                }
            }
            let rest = (sum - center) as f64;
            let mut j = (rest / (k * k - 1) as f64 + 0.5).floor() as usize;
            if j > bins - 1 {
                j = bins - 1;
            }
            grid[center][j] += 1;
        }
    }

    let d = match cfg.denominator() {
        Denominator::AlgorithmLiteral => ((h + ext) * (w + ext)) as f64,
        Denominator::ExactNormalize => (h * w) as f64,
    };
    let mut entropy = 0.0;
    for row in &grid {
        for &count in row {
            if count > 0 {
                let p = count as f64 / d;
                entropy -= p * p.log2();
            }
        }
    }
    let hist = JointHistogram::from_counts(bins, grid.concat()).expect("bins² cells");
    Ok((hist, entropy))
}

/// Outcome of comparing two curvature maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareReport {
    pub max_abs_diff: f64,
    /// Position of the largest difference, `(y, x)`.
    pub worst: (usize, usize),
    pub tolerance: f64,
    pub pass: bool,
}

pub fn compare_maps(a: &CurvatureMap, b: &CurvatureMap, tol: f64) -> Result<CompareReport> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut max_abs_diff = 0.0f64;
    let mut worst = (0, 0);
    for y in 0..a.height {
        for x in 0..a.width {
            let d = (a.get(y, x) - b.get(y, x)).abs();
            if d > max_abs_diff || d.is_nan() {
                max_abs_diff = d;
                worst = (y, x);
            }
        }
    }
    Ok(CompareReport {
        max_abs_diff,
        worst,
        tolerance: tol,
        pass: max_abs_diff <= tol,
    })
}
