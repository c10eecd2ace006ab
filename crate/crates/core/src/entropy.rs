//! 2D information entropy of a channel.
//!
//! Each channel is min-max quantized to `bins` levels. A `k×k` window slides
//! over the replicate-padded plane, producing one `(center, neighbor mean)`
//! level pair per pixel. The pairs are counted in a dense joint histogram and
//! the entropy is `-Σ p·log₂ p` over the non-empty cells.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{
    Channel, ChannelScores, Denominator, Element, EntropyConfig, FeatureMap, JointHistogram,
    MethodKind,
};

/// A channel mapped onto integer levels `0..bins`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedChannel {
    height: usize,
    width: usize,
    bins: usize,
    levels: Vec<u16>,
}

impl QuantizedChannel {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn levels(&self) -> &[u16] {
        &self.levels
    }
}

/// One `(center, neighbor mean)` pair per pixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowTuples {
    height: usize,
    width: usize,
    pairs: Vec<(u16, u16)>,
}

impl WindowTuples {
    pub fn pairs(&self) -> &[(u16, u16)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }
}

fn check_bins(bins: usize) -> Result<()> {
    if !(2..=EntropyConfig::MAX_BINS).contains(&bins) {
        return Err(Error::InvalidConfig(format!(
            "bins must be in [2, {}], got {bins}",
            EntropyConfig::MAX_BINS
        )));
    }
    Ok(())
}

/// Min-max quantization:
/// `level = floor((bins-1)·((v-lo)/(hi-lo)) + 0.5)`, clamped to `[0, bins-1]`.
/// A constant channel maps to level 0 everywhere.
pub fn quantize_channel<T: Element>(ch: Channel<'_, T>, bins: usize) -> Result<QuantizedChannel> {
    check_bins(bins)?;
    let (mut lo, mut hi) = ch.min_max();
    let top = (bins - 1) as f64;
    // Halve everything when the span itself overflows f64.
    let halve = !(hi - lo).is_finite();
    if halve {
        lo *= 0.5;
        hi *= 0.5;
    }
    let span = hi - lo;
    let levels = ch
        .values()
        .iter()
        .map(|v| {
            if span == 0.0 {
                return 0;
            }
            let v = if halve { v.to_f64() * 0.5 } else { v.to_f64() };
            let level = (top * ((v - lo) / span) + 0.5).floor();
            level.clamp(0.0, top) as u16
        })
        .collect();
    Ok(QuantizedChannel {
        height: ch.height(),
        width: ch.width(),
        bins,
        levels,
    })
}

/// Slides the window over the replicate-padded plane. `j` is the neighbor
/// mean rounded half up.
pub fn window_tuples(q: &QuantizedChannel, cfg: &EntropyConfig) -> Result<WindowTuples> {
    let k = cfg.kernel_size();
    let ext = cfg.ext_k();
    let (h, w) = (q.height, q.width);
    if h < k - ext || w < k - ext {
        return Err(Error::TooSmall {
            height: h,
            width: w,
            min: k - ext,
        });
    }

    // Replicate-padded copy of the levels.
    let pw = w + 2 * ext;
    let ph = h + 2 * ext;
    let mut padded = Vec::with_capacity(pw * ph);
    for py in 0..ph {
        let y = py.saturating_sub(ext).min(h - 1);
        let row = &q.levels[y * w..(y + 1) * w];
        padded.extend(std::iter::repeat_n(row[0] as u64, ext));
        padded.extend(row.iter().map(|&l| l as u64));
        padded.extend(std::iter::repeat_n(row[w - 1] as u64, ext));
    }

    // Box sums: vertical running column sums, then a horizontal slide.
    let mut cols: Vec<u64> = vec![0; pw];
    for py in 0..k {
        for (c, &v) in cols.iter_mut().zip(&padded[py * pw..(py + 1) * pw]) {
            *c += v;
        }
    }
    let others = (k * k - 1) as u64;
    let top = (q.bins - 1) as u64;
    let mut pairs = Vec::with_capacity(h * w);
    for y in 0..h {
        if y > 0 {
            let (out_row, in_row) = (y - 1, y + k - 1);
            for x in 0..pw {
                cols[x] = cols[x] + padded[in_row * pw + x] - padded[out_row * pw + x];
            }
        }
        let mut window: u64 = cols[..k].iter().sum();
        for x in 0..w {
            if x > 0 {
                window = window + cols[x + k - 1] - cols[x - 1];
            }
            let center = q.levels[y * w + x] as u64;
            let rest = window - center;
            let mean = ((2 * rest + others) / (2 * others)).min(top);
            pairs.push((center as u16, mean as u16));
        }
    }
    Ok(WindowTuples {
        height: h,
        width: w,
        pairs,
    })
}

pub fn joint_histogram(t: &WindowTuples, bins: usize) -> JointHistogram {
    let mut hist = JointHistogram::new(bins);
    for &(i, j) in &t.pairs {
        hist.add(i as usize, j as usize);
    }
    hist
}

/// Probability normalizer for a source plane of `height×width`.
pub fn denominator(height: usize, width: usize, hist: &JointHistogram, cfg: &EntropyConfig) -> f64 {
    match cfg.denominator() {
        Denominator::AlgorithmLiteral => {
            ((height + cfg.ext_k()) as f64) * ((width + cfg.ext_k()) as f64)
        }
        Denominator::ExactNormalize => hist.total_windows() as f64,
    }
}

/// `-Σ p·log₂ p` over non-empty cells, `p = count / D`. Empty cells
/// contribute nothing.
pub fn entropy_from_histogram(
    hist: &JointHistogram,
    source_dims: (usize, usize),
    cfg: &EntropyConfig,
) -> f64 {
    let d = denominator(source_dims.0, source_dims.1, hist, cfg);
    let e: f64 = hist
        .counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / d;
            -p * p.log2()
        })
        .sum();
    // a single full cell yields -0.0
    if e > 0.0 {
        e
    } else {
        0.0
    }
}

/// Joint histogram of one channel.
pub fn channel_histogram<T: Element>(
    ch: Channel<'_, T>,
    cfg: &EntropyConfig,
) -> Result<JointHistogram> {
    let q = quantize_channel(ch, cfg.bins())?;
    let tuples = window_tuples(&q, cfg)?;
    Ok(joint_histogram(&tuples, cfg.bins()))
}

pub fn entropy_score<T: Element>(ch: Channel<'_, T>, cfg: &EntropyConfig) -> Result<f64> {
    let hist = channel_histogram(ch, cfg)?;
    Ok(entropy_from_histogram(&hist, ch.shape(), cfg))
}

/// Scores every channel, in parallel across channels. Histograms are
/// channel-local, so the result does not depend on the thread count.
pub fn entropy_scores<T: Element>(fm: &FeatureMap<T>, cfg: &EntropyConfig) -> Result<ChannelScores> {
    let planes: Vec<_> = fm.iter_channels().collect();
    let scores = planes
        .into_par_iter()
        .enumerate()
        .map(|(c, ch)| entropy_score(ch, cfg).map_err(|e| e.in_channel(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelScores {
        method: MethodKind::Entropy,
        scores,
        config_digest: cfg.digest(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact() -> EntropyConfig {
        EntropyConfig::default().with_denominator(Denominator::ExactNormalize)
    }

    fn quantized(h: usize, w: usize, levels: Vec<u16>, bins: usize) -> QuantizedChannel {
        QuantizedChannel {
            height: h,
            width: w,
            bins,
            levels,
        }
    }

    #[test]
    fn quantize_constant_and_three_point() {
        let data = [4.2f32; 9];
        let q = quantize_channel(Channel::new(3, 3, &data).unwrap(), 256).unwrap();
        assert!(q.levels().iter().all(|&l| l == 0));

        let data = [0.0f32, 0.5, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let q = quantize_channel(Channel::new(3, 3, &data).unwrap(), 256).unwrap();
        assert_eq!(&q.levels()[..3], &[0, 128, 255]);
    }

    #[test]
    fn quantize_survives_span_overflow() {
        let data = [-f64::MAX, 0.0, f64::MAX, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let q = quantize_channel(Channel::new(3, 3, &data).unwrap(), 256).unwrap();
        assert_eq!(&q.levels()[..3], &[0, 128, 255]);
    }

    #[test]
    fn quantize_rejects_bad_bins() {
        let data = [0.0f32; 9];
        let ch = Channel::new(3, 3, &data).unwrap();
        assert!(quantize_channel(ch, 1).is_err());
        assert!(quantize_channel(ch, EntropyConfig::MAX_BINS + 1).is_err());
    }

    #[test]
    fn constant_levels_give_diagonal_pairs() {
        let q = quantized(4, 5, vec![7; 20], 16);
        let t = window_tuples(&q, &EntropyConfig::new(16, 3, Denominator::default()).unwrap())
            .unwrap();
        assert_eq!(t.len(), 20);
        assert!(t.pairs().iter().all(|&p| p == (7, 7)));
    }

    #[test]
    fn isolated_center_pairs() {
        // Enumerated by hand: with replicate padding every border window
        // contains the center pixel exactly once, so its neighbor sum is 8.
        let mut levels = vec![0u16; 9];
        levels[4] = 8;
        let t = window_tuples(&quantized(3, 3, levels, 256), &EntropyConfig::default()).unwrap();
        let mut expected = vec![(0u16, 1u16); 9];
        expected[4] = (8, 0);
        assert_eq!(t.pairs(), expected.as_slice());
    }

    #[test]
    fn mean_rounds_half_up() {
        // Neighbor sum 4 over 8 neighbors: mean 0.5 rounds to 1.
        let levels = vec![1, 0, 1, 0, 0, 0, 1, 0, 1];
        let t = window_tuples(&quantized(3, 3, levels, 4), &EntropyConfig::new(4, 3, Denominator::default()).unwrap())
            .unwrap();
        assert_eq!(t.pairs()[4], (0, 1));
    }

    #[test]
    fn large_kernel_needs_room() {
        let q = quantized(3, 3, vec![0; 9], 4);
        let cfg5 = EntropyConfig::new(4, 5, Denominator::default()).unwrap();
        assert_eq!(window_tuples(&q, &cfg5).unwrap().len(), 9);
        let cfg7 = EntropyConfig::new(4, 7, Denominator::default()).unwrap();
        assert!(matches!(window_tuples(&q, &cfg7), Err(Error::TooSmall { min: 4, .. })));
    }

    #[test]
    fn histogram_counts() {
        let t = WindowTuples {
            height: 1,
            width: 3,
            pairs: vec![(0, 1), (0, 1), (2, 3)],
        };
        let h = joint_histogram(&t, 4);
        assert_eq!(h.count(0, 1), 2);
        assert_eq!(h.count(2, 3), 1);
        assert_eq!(h.mass(), 3);
        assert_eq!(h.total_windows(), 3);
    }

    #[test]
    fn two_equal_cells_is_one_bit() {
        let t = WindowTuples {
            height: 2,
            width: 3,
            pairs: vec![(0, 0), (0, 0), (0, 0), (1, 1), (1, 1), (1, 1)],
        };
        let h = joint_histogram(&t, 2);
        assert_eq!(entropy_from_histogram(&h, (2, 3), &exact()), 1.0);
    }

    #[test]
    fn constant_channel_entropy() {
        let data = [3.0f32; 16];
        let ch = Channel::new(4, 4, &data).unwrap();
        assert_eq!(entropy_score(ch, &exact()).unwrap(), 0.0);
        let literal = entropy_score(ch, &EntropyConfig::default()).unwrap();
        let p: f64 = 16.0 / 25.0;
        assert!((literal - (-p * p.log2())).abs() < 1e-15);
    }

    #[test]
    fn spread_channel_beats_constant() {
        let mut data = vec![1.0f32; 36];
        data.extend((0..36).map(|k| ((k * 37) % 11) as f32));
        let fm = FeatureMap::new(2, 6, 6, data).unwrap();
        for cfg in [EntropyConfig::default(), exact()] {
            let s = entropy_scores(&fm, &cfg).unwrap();
            assert_eq!(s.method, MethodKind::Entropy);
            assert!(s.scores[0] < s.scores[1]);
        }
    }

    #[test]
    fn channel_errors_carry_the_index() {
        let fm = FeatureMap::new(2, 3, 3, vec![0.0f32; 18]).unwrap();
        let cfg = EntropyConfig::new(8, 7, Denominator::default()).unwrap();
        match entropy_scores(&fm, &cfg) {
            Err(Error::Channel { index: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
