//! Per-channel score reports in JSON or CSV.
//!
//! JSON layout:
//!
//! ```text
//! {
//!   "method": "curvature" | "entropy",
//!   "ratio": 0.5,
//!   "bins": 256,                         // entropy only
//!   "kernel_size": 3,                    // entropy only
//!   "denominator": "algorithm-literal",  // entropy only
//!   "padding": "replicate" | "zero",
//!   "shape": [C, H, W],
//!   "config_digest": "...",
//!   "input_digest": "<16 hex digits, FNV-1a 64 of the little-endian payload>",
//!   "channels": [{"index": 0, "score": 1.25, "rank": 0, "selected": true}, ...]
//! }
//! ```
//!
//! Channel records are ordered by index; `rank` is the position in descending
//! score order with ties toward the lower index, and `selected` marks the
//! first `ceil(ratio·C)` ranks.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fs_err, IoError};
use crate::enhance::{ranking, selection_count};
use crate::types::{
    ChannelScores, CurvatureConfig, Denominator, Element, EntropyConfig, FeatureMap, Method,
    MethodKind, Padding, SelectionConfig,
};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// FNV-1a 64 of the map's little-endian payload, as 16 hex digits.
pub fn content_digest<T: Element>(fm: &FeatureMap<T>) -> String {
    let mut payload = Vec::with_capacity(fm.values().len() * T::SIZE);
    for &v in fm.values() {
        v.write_le(&mut payload);
    }
    format!("{:016x}", fnv1a64(&payload))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub index: usize,
    pub score: f64,
    pub rank: usize,
    pub selected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub method: MethodKind,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<Denominator>,
    pub padding: Padding,
    pub shape: [usize; 3],
    pub config_digest: String,
    pub input_digest: String,
    pub channels: Vec<ChannelRecord>,
}

impl ScoreReport {
    /// Builds the report for `scores` computed from `fm` with `method`.
    pub fn new<T: Element>(
        fm: &FeatureMap<T>,
        method: &Method,
        scores: &ChannelScores,
        ratio: f64,
    ) -> Result<Self, IoError> {
        let ratio = SelectionConfig::new(ratio)?.ratio();
        if scores.len() != fm.channels() {
            return Err(IoError::Report(format!(
                "{} scores for {} channels",
                scores.len(),
                fm.channels()
            )));
        }
        if scores.method != method.kind() || scores.config_digest != method.digest() {
            return Err(IoError::Report(format!(
                "scores were produced by {:?}, not {:?}",
                scores.config_digest,
                method.digest()
            )));
        }
        let order = ranking(&scores.scores);
        let k = selection_count(ratio, order.len());
        let mut channels: Vec<ChannelRecord> = scores
            .scores
            .iter()
            .enumerate()
            .map(|(index, &score)| ChannelRecord {
                index,
                score,
                rank: 0,
                selected: false,
            })
            .collect();
        for (rank, &index) in order.iter().enumerate() {
            channels[index].rank = rank;
            channels[index].selected = rank < k;
        }
        let (bins, kernel_size, denominator, padding) = match method {
            Method::Curvature(cfg) => (None, None, None, cfg.padding),
            Method::Entropy(cfg) => (
                Some(cfg.bins()),
                Some(cfg.kernel_size()),
                Some(cfg.denominator()),
                cfg.padding(),
            ),
        };
        let (c, h, w) = fm.shape();
        Ok(Self {
            method: method.kind(),
            ratio,
            bins,
            kernel_size,
            denominator,
            padding,
            shape: [c, h, w],
            config_digest: method.digest(),
            input_digest: content_digest(fm),
            channels,
        })
    }

    /// Reconstructs the scoring configuration recorded in the report.
    pub fn method_config(&self) -> Result<Method, IoError> {
        let method = match self.method {
            MethodKind::Curvature => Method::Curvature(CurvatureConfig {
                padding: self.padding,
            }),
            MethodKind::Entropy => {
                let defaults = EntropyConfig::default();
                Method::Entropy(EntropyConfig::new(
                    self.bins.unwrap_or(defaults.bins()),
                    self.kernel_size.unwrap_or(defaults.kernel_size()),
                    self.denominator.unwrap_or(defaults.denominator()),
                )?)
            }
        };
        if method.digest() != self.config_digest {
            return Err(IoError::Report(format!(
                "config digest {:?} disagrees with recorded fields ({:?})",
                self.config_digest,
                method.digest()
            )));
        }
        Ok(method)
    }

    /// Selected indices, best first.
    pub fn selected(&self) -> Vec<usize> {
        let mut sel: Vec<&ChannelRecord> = self.channels.iter().filter(|r| r.selected).collect();
        sel.sort_by_key(|r| r.rank);
        sel.into_iter().map(|r| r.index).collect()
    }

    /// Checks that ranks and selection flags agree with the scores.
    pub fn validate(&self) -> Result<(), IoError> {
        let scores: Vec<f64> = self.channels.iter().map(|r| r.score).collect();
        let order = ranking(&scores);
        let k = selection_count(self.ratio, order.len());
        for (rank, &index) in order.iter().enumerate() {
            let rec = &self.channels[index];
            if rec.index != index || rec.rank != rank || rec.selected != (rank < k) {
                return Err(IoError::Report(format!(
                    "inconsistent record for channel {index}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, IoError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let report: Self = serde_json::from_str(text)?;
        report.validate()?;
        Ok(report)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,score,rank,selected\n");
        for r in &self.channels {
            let _ = writeln!(s, "{},{},{},{}", r.index, r.score, r.rank, r.selected);
        }
        s
    }

    pub fn render(&self, format: ReportFormat) -> Result<String, IoError> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => Ok(self.to_csv()),
        }
    }
}

pub fn write_score_report(
    report: &ScoreReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, report.render(format)?).map_err(fs_err(path))
}
