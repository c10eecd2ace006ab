use std::time::Instant;

use ife_core::curvature::curvature_scores;
use ife_core::entropy::entropy_scores;
use ife_core::{with_threads, ChannelScores, CurvatureConfig, EntropyConfig, FeatureMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{parse_shape, BenchArgs, MethodArg};
use crate::CliError;

// Single-threaded soft targets for a 64×224×224 tensor, scaled by size.
const ENTROPY_FLOOR_SECS: f64 = 5.0;
const CURVATURE_FLOOR_SECS: f64 = 1.0;
const REFERENCE_ELEMENTS: f64 = 64.0 * 224.0 * 224.0;

fn score(fm: &FeatureMap, method: MethodArg) -> Result<ChannelScores, CliError> {
    match method {
        MethodArg::Curvature => Ok(curvature_scores(fm, &CurvatureConfig::default())),
        MethodArg::Entropy => entropy_scores(fm, &EntropyConfig::default())
            .map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn timed(threads: usize, fm: &FeatureMap, method: MethodArg) -> Result<(ChannelScores, f64), CliError> {
    with_threads(threads, || {
        let t = Instant::now();
        score(fm, method).map(|s| (s, t.elapsed().as_secs_f64()))
    })
    .map_err(|e| CliError::Internal(e.to_string()))?
}

pub fn run(args: &BenchArgs, threads: usize) -> Result<(), CliError> {
    let (c, h, w) = parse_shape(&args.shape)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let fm = FeatureMap::new(c, h, w, (0..c * h * w).map(|_| rng.gen_range(-1.0f32..1.0)).collect())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    // at least two workers, so the determinism check compares something
    let many = if threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        threads
    }
    .max(2);

    let method = match args.method {
        MethodArg::Curvature => "curvature",
        MethodArg::Entropy => "entropy",
    };
    let (one, t1) = timed(1, &fm, args.method)?;
    let (par, tn) = timed(many, &fm, args.method)?;
    let mpix = (c * h * w) as f64 / 1e6;
    println!("{:<10} {:>14} {:>7} {:>10} {:>12} {:>10}", "method", "shape", "threads", "wall_s", "channels/s", "Mpix/s");
    for (n, t) in [(1, t1), (many, tn)] {
        println!(
            "{:<10} {:>14} {:>7} {:>10.4} {:>12.1} {:>10.2}",
            method,
            format!("{c}x{h}x{w}"),
            n,
            t,
            c as f64 / t,
            mpix / t
        );
    }

    let same = one
        .scores
        .iter()
        .zip(&par.scores)
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("determinism 1 vs {many} threads: {}", if same { "ok" } else { "MISMATCH" });
    if !same {
        return Err(CliError::Internal("scores depend on thread count".into()));
    }

    let floor = match args.method {
        MethodArg::Curvature => CURVATURE_FLOOR_SECS,
        MethodArg::Entropy => ENTROPY_FLOOR_SECS,
    } * (c * h * w) as f64
        / REFERENCE_ELEMENTS;
    if t1 > floor {
        eprintln!("warning: single-thread time {t1:.3}s exceeds the soft target of {floor:.3}s");
    }
    Ok(())
}
