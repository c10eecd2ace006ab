use std::io::Write;
use std::path::{Path, PathBuf};

use ife_core::enhance::select_top;
use ife_core::io::{
    fnv1a64, read_array_any, read_png_gray, write_array, write_score_report, AnyFeatureMap,
    IoError, ReportFormat, ScoreReport,
};
use ife_core::{ife, score as score_map, Element, FeatureMap, Method, SelectionConfig};

use crate::args::{EnhanceArgs, FormatArg, ScoreArgs, SweepArgs};
use crate::CliError;

fn input_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn output_err(e: IoError) -> CliError {
    CliError::Input(e.to_string())
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Reads a `.npy` tensor or a PNG image (as one channel).
pub fn load_input(path: &Path, narrow_f64: bool) -> Result<AnyFeatureMap, CliError> {
    let map = if is_png(path) {
        let img = read_png_gray(path).map_err(|e| input_err(path, e))?;
        AnyFeatureMap::F32(img.into_feature_map().map_err(|e| input_err(path, e))?)
    } else {
        read_array_any(path).map_err(|e| input_err(path, e))?
    };
    match map {
        AnyFeatureMap::F64(fm) if narrow_f64 => {
            let (c, h, w) = fm.shape();
            let values = fm.values().iter().map(|&v| v as f32).collect();
            let narrowed = FeatureMap::new(c, h, w, values).map_err(|e| input_err(path, e))?;
            Ok(AnyFeatureMap::F32(narrowed))
        }
        other => Ok(other),
    }
}

macro_rules! with_map {
    ($any:expr, $fm:ident => $body:expr) => {
        match $any {
            AnyFeatureMap::F32($fm) => $body,
            AnyFeatureMap::F64($fm) => $body,
        }
    };
}

fn scoring_err(path: &Path, e: ife_core::Error) -> CliError {
    match e {
        ife_core::Error::ThreadPool(_) => CliError::Internal(e.to_string()),
        _ => input_err(path, e),
    }
}

fn build_report<T: Element>(
    path: &Path,
    fm: &FeatureMap<T>,
    method: &Method,
    ratio: f64,
) -> Result<ScoreReport, CliError> {
    let scores = score_map(fm, method).map_err(|e| scoring_err(path, e))?;
    let report = ScoreReport::new(fm, method, &scores, ratio)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    report
        .validate()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(report)
}

fn print_channels(report: &ScoreReport) {
    for r in &report.channels {
        eprintln!(
            "channel {:>4}  score {:<22}  rank {:>4}{}",
            r.index,
            r.score,
            r.rank,
            if r.selected { "  selected" } else { "" }
        );
    }
}

pub fn score(args: &ScoreArgs, verbose: bool) -> Result<(), CliError> {
    let method = args.method.resolve()?;
    SelectionConfig::new(args.ratio).map_err(|e| CliError::Usage(e.to_string()))?;
    let input = load_input(&args.input, args.narrow_f64)?;
    let report = with_map!(&input, fm => build_report(&args.input, fm, &method, args.ratio))?;

    let format = match args.format {
        Some(FormatArg::Json) => ReportFormat::Json,
        Some(FormatArg::Csv) => ReportFormat::Csv,
        None => match &args.output {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => ReportFormat::Csv,
            _ => ReportFormat::Json,
        },
    };
    if verbose {
        print_channels(&report);
    }
    match &args.output {
        Some(path) => write_score_report(&report, path, format).map_err(output_err)?,
        None => {
            let text = report.render(format).map_err(|e| CliError::Internal(e.to_string()))?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Internal(e.to_string()))?;
        }
    }
    Ok(())
}

fn default_report_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("enhanced");
    output.with_file_name(format!("{stem}.report.json"))
}

pub fn enhance(args: &EnhanceArgs, verbose: bool) -> Result<(), CliError> {
    let method = args.method.resolve()?;
    SelectionConfig::new(args.ratio).map_err(|e| CliError::Usage(e.to_string()))?;
    let input = load_input(&args.input, args.narrow_f64)?;
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| default_report_path(&args.output));

    let (c, total, report) = with_map!(&input, fm => {
        let result = ife(fm, &method, args.ratio).map_err(|e| scoring_err(&args.input, e))?;
        let report = ScoreReport::new(fm, &method, &result.scores, args.ratio)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        if report.selected() != result.selected {
            return Err(CliError::Internal("report selection disagrees with enhancement".into()));
        }
        write_array(&result.enhanced, &args.output).map_err(output_err)?;
        (fm.channels(), result.enhanced.channels(), report)
    });
    write_score_report(&report, &report_path, ReportFormat::Json).map_err(output_err)?;
    if verbose {
        print_channels(&report);
    }
    println!(
        "{c} → {total} channels ({} selected by {}, ratio {})",
        total - c,
        report.method,
        args.ratio
    );
    Ok(())
}

/// Digest of a selected index set, independent of selection order.
fn set_digest(selected: &[usize]) -> String {
    let mut sorted = selected.to_vec();
    sorted.sort_unstable();
    let bytes: Vec<u8> = sorted.iter().flat_map(|&i| (i as u64).to_le_bytes()).collect();
    format!("{:016x}", fnv1a64(&bytes))
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let method = args.method.resolve()?;
    let ratios = crate::args::parse_ratios(&args.ratios)?;
    let input = load_input(&args.input, args.narrow_f64)?;
    let scores = with_map!(&input, fm => score_map(fm, &method)).map_err(|e| scoring_err(&args.input, e))?;

    let mut csv = String::from("ratio,k,selected_digest,min_score,max_score\n");
    println!(
        "{:>6}  {:>5}  {:<16}  {:>22}  {:>22}",
        "ratio", "k", "selected_digest", "min_score", "max_score"
    );
    for r in ratios {
        let cfg = SelectionConfig::new(r).map_err(|e| CliError::Usage(e.to_string()))?;
        let selected = select_top(&scores, &cfg);
        let picked = selected.iter().map(|&i| scores.scores[i]);
        let (min, max) = picked.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
        let fmt = |v: f64| if selected.is_empty() { "-".to_string() } else { v.to_string() };
        let digest = set_digest(&selected);
        println!(
            "{:>6}  {:>5}  {:<16}  {:>22}  {:>22}",
            r,
            selected.len(),
            digest,
            fmt(min),
            fmt(max)
        );
        csv.push_str(&format!("{r},{},{digest},{},{}\n", selected.len(), fmt(min), fmt(max)));
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, csv).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
