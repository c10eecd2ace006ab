//! Top-ratio channel selection and concatenation onto the raw map.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::types::{ChannelScores, Element, FeatureMap, Method, SelectionConfig};
use crate::{curvature, entropy};

/// Number of channels selected at `ratio` out of `channels`: `ceil(ratio·C)`,
/// at least one whenever `ratio > 0`.
///
/// Products within `1e-9` of an integer snap to it, so decimal ratios such as
/// `0.7` or `0.1` give the count their decimal value implies rather than one
/// more.
pub fn selection_count(ratio: f64, channels: usize) -> usize {
    if ratio <= 0.0 || channels == 0 {
        return 0;
    }
    let x = ratio * channels as f64;
    let nearest = x.round();
    let k = if (x - nearest).abs() <= 1e-9 * x.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    (k as usize).clamp(1, channels)
}

/// All channel indices ordered by descending score, ties toward the lower
/// index.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// The `ceil(r·C)` highest-scoring channels, best first.
pub fn select_top(scores: &ChannelScores, cfg: &SelectionConfig) -> Vec<usize> {
    let k = selection_count(cfg.ratio(), scores.len());
    let mut order = ranking(&scores.scores);
    order.truncate(k);
    order
}

/// Appends copies of the `selected` channels, in the given order, after the
/// raw channels.
pub fn enhance<T: Element>(fm: &FeatureMap<T>, selected: &[usize]) -> Result<FeatureMap<T>> {
    let c = fm.channels();
    let mut seen = vec![false; c];
    for &index in selected {
        if index >= c {
            return Err(Error::IndexOutOfRange { index, len: c });
        }
        if std::mem::replace(&mut seen[index], true) {
            return Err(Error::DuplicateIndex { index });
        }
    }
    let n = fm.plane_len();
    let mut values = Vec::with_capacity((c + selected.len()) * n);
    values.extend_from_slice(fm.values());
    for &index in selected {
        values.extend_from_slice(&fm.values()[index * n..(index + 1) * n]);
    }
    FeatureMap::new(c + selected.len(), fm.height(), fm.width(), values)
}

/// Scores every channel with the given criterion.
pub fn score<T: Element>(fm: &FeatureMap<T>, method: &Method) -> Result<ChannelScores> {
    match method {
        Method::Curvature(cfg) => Ok(curvature::curvature_scores(fm, cfg)),
        Method::Entropy(cfg) => entropy::entropy_scores(fm, cfg),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult<T: Element = f32> {
    /// Selected channel indices, best first.
    pub selected: Vec<usize>,
    pub ratio: f64,
    pub scores: ChannelScores,
    /// `C + k` channels: the raw map followed by the selected copies.
    pub enhanced: FeatureMap<T>,
}

/// Score, select the top `ratio` of channels and concatenate them onto `fm`.
pub fn ife<T: Element>(fm: &FeatureMap<T>, method: &Method, ratio: f64) -> Result<SelectionResult<T>> {
    let cfg = SelectionConfig::new(ratio)?;
    let scores = score(fm, method)?;
    let selected = select_top(&scores, &cfg);
    let enhanced = enhance(fm, &selected)?;
    Ok(SelectionResult {
        selected,
        ratio,
        scores,
        enhanced,
    })
}
