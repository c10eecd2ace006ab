use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ife_core::io::{read_array, write_array, ReadOptions, ScoreReport};
use ife_core::FeatureMap;

fn ife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ife"))
        .args(args)
        .env_remove("IFE_THREADS")
        .output()
        .expect("run ife")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn tensor(dir: &Path, name: &str, c: usize, h: usize, w: usize) -> PathBuf {
    let values = (0..c * h * w)
        .map(|k| (((k * 7919) % 257) as f32 * 0.37).sin() * (1 + k / (h * w)) as f32)
        .collect();
    let path = dir.join(name);
    write_array(&FeatureMap::new(c, h, w, values).unwrap(), &path).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn score_entropy_defaults_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor(dir.path(), "t.npy", 2, 9, 7);
    let out = ife(&["score", s(&input), "--method", "entropy"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = ScoreReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.bins, Some(256));
    assert_eq!(report.kernel_size, Some(3));
    assert_eq!(report.channels.len(), 2);
    // stable output
    assert_eq!(stdout(&ife(&["score", s(&input), "--method", "entropy"])), stdout(&out));
}

#[test]
fn score_constant_png_with_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.png");
    {
        let file = fs::File::create(&path).unwrap();
        let mut enc = png::Encoder::new(file, 8, 6);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        enc.write_header().unwrap().write_image_data(&[128; 48]).unwrap();
    }
    let out = ife(&["score", s(&path), "--method", "curvature"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = ScoreReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.channels[0].score, 0.0);
}

#[test]
fn score_fixture_png_verbose_csv() {
    let png = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/phantom.png");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let out = ife(&["score", s(&png), "--method", "entropy", "--denominator", "exact", "-o", s(&csv), "-v"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("channel    0"));
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor(dir.path(), "t.npy", 2, 5, 5);
    for args in [
        vec!["score", s(&input), "--method", "curvature", "--bins", "16"],
        vec!["score", s(&input), "--method", "entropy", "--padding", "zero"],
        vec!["score", s(&input), "--method", "entropy", "--kernel-size", "4"],
        vec!["score", s(&input), "--method", "bogus"],
        vec!["score", s(&input)],
        vec!["enhance", s(&input), "--method", "entropy", "--ratio", "1.5", "-o", "x.npy"],
        vec!["sweep", s(&input), "--method", "entropy", "--ratios", ""],
        vec!["bench", "--shape", "64x", "--method", "curvature"],
    ] {
        let out = ife(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn input_errors_name_the_file() {
    let out = ife(&["score", "/no/such/file.npy", "--method", "entropy"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/no/such/file.npy"));

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.npy");
    fs::write(&junk, b"garbage").unwrap();
    let out = ife(&["score", s(&junk), "--method", "entropy"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("junk.npy"));

    // a window that does not fit reports the channel
    let small = tensor(dir.path(), "small.npy", 2, 3, 3);
    let out = ife(&["score", s(&small), "--method", "entropy", "--kernel-size", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("channel 0"), "{}", stderr(&out));
}

#[test]
fn enhance_channel_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor(dir.path(), "t64.npy", 64, 6, 6);
    let output = dir.path().join("enh.npy");
    let out = ife(&["enhance", s(&input), "--method", "curvature", "--ratio", "0.75", "-o", s(&output)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("64 → 112"));
    let raw = read_array(&input, ReadOptions::default()).unwrap();
    let enhanced = read_array(&output, ReadOptions::default()).unwrap();
    assert_eq!(enhanced.channels(), 112);
    assert_eq!(&enhanced.values()[..raw.values().len()], raw.values());
    let report = fs::read_to_string(dir.path().join("enh.report.json")).unwrap();
    assert_eq!(ScoreReport::from_json(&report).unwrap().selected().len(), 48);
}

#[test]
fn enhance_ratio_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor(dir.path(), "t.npy", 5, 4, 4);
    let output = dir.path().join("same.npy");
    let report = dir.path().join("rep.json");
    let out = ife(&[
        "enhance", s(&input), "--method", "entropy", "--ratio", "0", "-o", s(&output), "--report", s(&report),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read(&input).unwrap(), fs::read(&output).unwrap());
    let report = ScoreReport::from_json(&fs::read_to_string(report).unwrap()).unwrap();
    assert!(report.selected().is_empty());
}

#[test]
fn sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor(dir.path(), "t64.npy", 64, 5, 5);
    let csv = dir.path().join("sweep.csv");
    let out = ife(&["sweep", s(&input), "--method", "entropy", "--csv", s(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(csv).unwrap();
    let ks: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ks, ["32", "48", "64"]);
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn selftest_is_seeded() {
    let a = ife(&["selftest", "--trials", "20", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert!(stdout(&a).contains("curvature: 20/20 ok"));
    assert!(stdout(&a).contains("entropy: 20/20 ok"));
    let b = ife(&["selftest", "--trials", "20", "--seed", "9"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn selftest_catches_injected_fault() {
    let out = ife(&["selftest", "--trials", "3", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("trial seed"));
    assert!(stderr(&out).contains("shape"));
}

#[test]
fn bench_reports_determinism() {
    for method in ["entropy", "curvature"] {
        let out = ife(&["bench", "--shape", "64x224x224", "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stdout(&out).contains("threads: ok"), "{}", stdout(&out));
    }
}

#[test]
fn thread_env_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = tensor(dir.path(), "t.npy", 12, 10, 10);
    let base = ife(&["score", s(&input), "--method", "entropy"]);
    let threaded = Command::new(env!("CARGO_BIN_EXE_ife"))
        .args(["score", s(&input), "--method", "entropy"])
        .env("IFE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(threaded.status.code(), Some(0));
    assert_eq!(stdout(&base), stdout(&threaded));
}
