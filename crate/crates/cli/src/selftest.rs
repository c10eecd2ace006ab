//! Seeded oracle-equivalence and invariant checks.

use ife_core::curvature::curvature_map;
use ife_core::entropy::{channel_histogram, entropy_score, entropy_scores};
use ife_core::oracle::{compare_maps, naive_curvature, naive_entropy};
use ife_core::{
    select_top, CurvatureConfig, Denominator, EntropyConfig, FeatureMap, Padding,
    SelectionConfig,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::SelftestArgs;
use crate::CliError;

struct Failure {
    suite: &'static str,
    seed: u64,
    shape: (usize, usize, usize),
    detail: String,
}

fn random_tensor(rng: &mut ChaCha8Rng) -> FeatureMap {
    let (c, h, w) = (rng.gen_range(1..=8), rng.gen_range(3..=32), rng.gen_range(3..=32));
    let scale = rng.gen_range(1..=100) as f32;
    // dyadic grid so the invariant suite can transform values exactly
    let values = (0..c * h * w)
        .map(|_| rng.gen_range(-1024i32..=1024) as f32 / 256.0 * scale)
        .collect();
    FeatureMap::new(c, h, w, values).expect("valid random tensor")
}

fn check_curvature(fm: &FeatureMap, fault: bool) -> Result<(), String> {
    for (i, ch) in fm.iter_channels().enumerate() {
        for padding in [Padding::Replicate, Padding::Zero] {
            let cfg = CurvatureConfig { padding };
            let mut fast = curvature_map(ch, &cfg);
            if fault {
                fast.values[0] += 1e-3;
            }
            let report = compare_maps(&fast, &naive_curvature(ch, &cfg), 1e-6).map_err(|e| e.to_string())?;
            if !report.pass {
                return Err(format!(
                    "channel {i} {padding}: max diff {:e} at {:?}",
                    report.max_abs_diff, report.worst
                ));
            }
        }
    }
    Ok(())
}

fn check_entropy(fm: &FeatureMap, fault: bool) -> Result<(), String> {
    for (i, ch) in fm.iter_channels().enumerate() {
        for den in [Denominator::AlgorithmLiteral, Denominator::ExactNormalize] {
            let cfg = EntropyConfig::default().with_denominator(den);
            let (hist, expected) = naive_entropy(ch, &cfg).map_err(|e| e.to_string())?;
            if channel_histogram(ch, &cfg).map_err(|e| e.to_string())? != hist {
                return Err(format!("channel {i} {den}: histograms differ"));
            }
            let mut got = entropy_score(ch, &cfg).map_err(|e| e.to_string())?;
            if fault {
                got += 1e-6;
            }
            if (got - expected).abs() > 1e-9 {
                return Err(format!("channel {i} {den}: entropy {got} vs oracle {expected}"));
            }
        }
    }
    Ok(())
}

fn check_invariants(fm: &FeatureMap) -> Result<(), String> {
    let (c, h, w) = fm.shape();
    let cfg = EntropyConfig::default();
    let base = entropy_scores(fm, &cfg).map_err(|e| e.to_string())?;
    let moved: Vec<f32> = fm.values().iter().map(|&v| 2.0 * v - 3.5).collect();
    let moved = FeatureMap::new(c, h, w, moved).map_err(|e| e.to_string())?;
    let again = entropy_scores(&moved, &cfg).map_err(|e| e.to_string())?;
    if base.scores.iter().zip(&again.scores).any(|(a, b)| a.to_bits() != b.to_bits()) {
        return Err("entropy changed under v -> 2v - 3.5".into());
    }
    for ch in fm.iter_channels() {
        let mass = channel_histogram(ch, &cfg).map_err(|e| e.to_string())?.mass();
        if mass != (h * w) as u64 {
            return Err(format!("histogram mass {mass} != {}", h * w));
        }
    }
    let half = select_top(&base, &SelectionConfig::new(0.5).expect("ratio"));
    let three_q = select_top(&base, &SelectionConfig::new(0.75).expect("ratio"));
    if !three_q.starts_with(&half) {
        return Err("selection at 0.50 is not a prefix of 0.75".into());
    }
    Ok(())
}

pub fn run(args: &SelftestArgs) -> Result<(), CliError> {
    let mut master = ChaCha8Rng::seed_from_u64(args.seed);
    let mut passed = [0usize; 3];
    let mut first: Option<Failure> = None;
    let names = ["curvature", "entropy", "invariants"];

    for _ in 0..args.trials {
        let seed = master.next_u64();
        let fm = random_tensor(&mut ChaCha8Rng::seed_from_u64(seed));
        let results = [
            check_curvature(&fm, args.inject_fault),
            check_entropy(&fm, args.inject_fault),
            check_invariants(&fm),
        ];
        for (k, result) in results.into_iter().enumerate() {
            match result {
                Ok(()) => passed[k] += 1,
                Err(detail) if first.is_none() => {
                    first = Some(Failure {
                        suite: names[k],
                        seed,
                        shape: fm.shape(),
                        detail,
                    })
                }
                Err(_) => {}
            }
        }
    }

    for (name, ok) in names.iter().zip(passed) {
        println!("{name}: {ok}/{} ok", args.trials);
    }
    match first {
        None => Ok(()),
        Some(f) => Err(CliError::Internal(format!(
            "{} suite failed: trial seed {}, shape {}x{}x{}: {}",
            f.suite, f.seed, f.shape.0, f.shape.1, f.shape.2, f.detail
        ))),
    }
}
