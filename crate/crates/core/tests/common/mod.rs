#![allow(dead_code)]

use ife_core::FeatureMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random map with the given shape; values mix smooth structure, noise and
/// plateaus so both criteria see non-trivial histograms.
pub fn random_map(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> FeatureMap {
    let mut values = Vec::with_capacity(c * h * w);
    for _ in 0..c {
        let style = rng.gen_range(0..4);
        let scale: f32 = rng.gen_range(0.01..100.0);
        let offset: f32 = rng.gen_range(-50.0..50.0);
        for y in 0..h {
            for x in 0..w {
                let v = match style {
                    0 => rng.gen_range(-1.0..1.0),
                    1 => ((x as f32 * 0.7).sin() + (y as f32 * 0.3).cos()) * 0.5,
                    2 => rng.gen_range(0..4) as f32,
                    _ => {
                        if rng.gen_bool(0.1) {
                            1.0
                        } else {
                            0.0
                        }
                    }
                };
                values.push(v * scale + offset);
            }
        }
    }
    FeatureMap::new(c, h, w, values).unwrap()
}

pub fn random_shape(rng: &mut ChaCha8Rng, max_c: usize, max_side: usize) -> (usize, usize, usize) {
    (
        rng.gen_range(1..=max_c),
        rng.gen_range(3..=max_side),
        rng.gen_range(3..=max_side),
    )
}

/// Values on a 1/256 grid, so power-of-two scalings and dyadic shifts are
/// exact in both f32 and f64.
pub fn dyadic_map(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> FeatureMap {
    let values = (0..c * h * w)
        .map(|_| rng.gen_range(-512i32..=512) as f32 / 256.0)
        .collect();
    FeatureMap::new(c, h, w, values).unwrap()
}

pub fn map_values(fm: &FeatureMap, f: impl Fn(f32) -> f32) -> FeatureMap {
    let (c, h, w) = fm.shape();
    FeatureMap::new(c, h, w, fm.values().iter().map(|&v| f(v)).collect()).unwrap()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}
