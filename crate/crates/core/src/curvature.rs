//! Approximate mean curvature via a fixed 3×3 linear filter.
//!
//! The kernel is
//!
//! ```text
//! [ α  β  α ]
//! [ β  γ  β ]      α = -1/16, β = 5/16, γ = -1
//! [ α  β  α ]
//! ```
//!
//! It sums to zero and is symmetric under flips and transposition, so
//! convolution and correlation coincide. A channel's score is the mean of the
//! absolute curvature response.

use rayon::prelude::*;

use crate::types::{
    Channel, ChannelScores, CurvatureConfig, CurvatureMap, Element, FeatureMap, MethodKind,
    Padding,
};

pub const ALPHA: f64 = -1.0 / 16.0;
pub const BETA: f64 = 5.0 / 16.0;
pub const GAMMA: f64 = -1.0;

/// The kernel as a row-major 3×3 grid.
pub const fn kernel() -> [[f64; 3]; 3] {
    [[ALPHA, BETA, ALPHA], [BETA, GAMMA, BETA], [ALPHA, BETA, ALPHA]]
}

/// Copies the channel into an `(H+2)×(W+2)` buffer with a one-pixel border.
fn padded<T: Element>(ch: Channel<'_, T>, padding: Padding) -> (Vec<f64>, usize) {
    let (h, w) = ch.shape();
    let pw = w + 2;
    let mut buf = vec![0.0; (h + 2) * pw];
    let src = ch.values();
    for y in 0..h {
        let row = &mut buf[(y + 1) * pw + 1..(y + 1) * pw + 1 + w];
        for (dst, v) in row.iter_mut().zip(&src[y * w..(y + 1) * w]) {
            *dst = v.to_f64();
        }
    }
    if padding == Padding::Replicate {
        for y in 1..=h {
            buf[y * pw] = buf[y * pw + 1];
            buf[y * pw + w + 1] = buf[y * pw + w];
        }
        let (top, rest) = buf.split_at_mut(pw);
        top.copy_from_slice(&rest[..pw]);
        let last = (h + 1) * pw;
        let (body, bottom) = buf.split_at_mut(last);
        bottom.copy_from_slice(&body[last - pw..]);
    }
    (buf, pw)
}

/// Curvature response of one channel; same shape as the input.
pub fn curvature_map<T: Element>(ch: Channel<'_, T>, cfg: &CurvatureConfig) -> CurvatureMap {
    let (h, w) = ch.shape();
    let (buf, pw) = padded(ch, cfg.padding);
    let mut out = Vec::with_capacity(h * w);
    for y in 0..h {
        let up = &buf[y * pw..(y + 1) * pw];
        let mid = &buf[(y + 1) * pw..(y + 2) * pw];
        let down = &buf[(y + 2) * pw..(y + 3) * pw];
        for x in 0..w {
            let c = mid[x + 1];
            // Zero-sum lets each ring be measured against the center, which
            // makes constant inputs cancel exactly for any element type.
            let edges = up[x + 1] + down[x + 1] + mid[x] + mid[x + 2] - 4.0 * c;
            let corners = up[x] + up[x + 2] + down[x] + down[x + 2] - 4.0 * c;
            out.push(BETA * edges + ALPHA * corners);
        }
    }
    CurvatureMap {
        height: h,
        width: w,
        values: out,
    }
}

/// Mean absolute curvature, summed sequentially in row-major order.
pub fn curvature_score<T: Element>(ch: Channel<'_, T>, cfg: &CurvatureConfig) -> f64 {
    let map = curvature_map(ch, cfg);
    let total: f64 = map.values.iter().map(|v| v.abs()).sum();
    total / map.values.len() as f64
}

/// Scores every channel. Channels are processed in parallel on the current
/// rayon pool; each channel's sum is sequential, so the result does not
/// depend on the thread count.
pub fn curvature_scores<T: Element>(fm: &FeatureMap<T>, cfg: &CurvatureConfig) -> ChannelScores {
    let planes: Vec<_> = fm.iter_channels().collect();
    let scores = planes
        .into_par_iter()
        .map(|ch| curvature_score(ch, cfg))
        .collect();
    ChannelScores {
        method: MethodKind::Curvature,
        scores,
        config_digest: cfg.digest(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REPLICATE: CurvatureConfig = CurvatureConfig {
        padding: Padding::Replicate,
    };
    const ZERO: CurvatureConfig = CurvatureConfig {
        padding: Padding::Zero,
    };

    fn impulse_5x5() -> Vec<f32> {
        let mut v = vec![0.0f32; 25];
        v[12] = 1.0;
        v
    }

    #[test]
    fn kernel_constants() {
        assert_eq!(
            kernel(),
            [
                [-0.0625, 0.3125, -0.0625],
                [0.3125, -1.0, 0.3125],
                [-0.0625, 0.3125, -0.0625]
            ]
        );
        assert_eq!(4.0 * ALPHA + 4.0 * BETA + GAMMA, 0.0);
        let k = kernel();
        for y in 0..3 {
            for x in 0..3 {
                assert_eq!(k[y][x], k[2 - y][x]);
                assert_eq!(k[y][x], k[y][2 - x]);
                assert_eq!(k[y][x], k[x][y]);
            }
        }
    }

    #[test]
    fn constant_channel_is_annihilated() {
        for v in [0.0f32, 1.0, -3.5, 1234.567] {
            let data = vec![v; 7 * 5];
            let ch = Channel::new(7, 5, &data).unwrap();
            assert!(curvature_map(ch, &REPLICATE).values.iter().all(|&o| o == 0.0));
            assert_eq!(curvature_score(ch, &REPLICATE), 0.0);
        }
        let data = vec![0.1f64; 16];
        let ch = Channel::new(4, 4, &data).unwrap();
        assert!(curvature_map(ch, &REPLICATE).values.iter().all(|&o| o == 0.0));
    }

    #[test]
    fn zero_padding_does_not_annihilate_constants_at_the_border() {
        let data = vec![1.0f32; 25];
        let map = curvature_map(Channel::new(5, 5, &data).unwrap(), &ZERO);
        for y in 1..4 {
            for x in 1..4 {
                assert_eq!(map.get(y, x), 0.0);
            }
        }
        // only the 2×2 block of taps inside the plane contributes at a corner
        assert_eq!(map.get(0, 0), GAMMA + 2.0 * BETA + ALPHA);
    }

    #[test]
    fn impulse_response_is_the_kernel() {
        let data = impulse_5x5();
        let ch = Channel::new(5, 5, &data).unwrap();
        for cfg in [REPLICATE, ZERO] {
            let map = curvature_map(ch, &cfg);
            let k = kernel();
            for y in 0..5 {
                for x in 0..5 {
                    let expected = if (1..=3).contains(&y) && (1..=3).contains(&x) {
                        k[y - 1][x - 1]
                    } else {
                        0.0
                    };
                    assert_eq!(map.get(y, x), expected, "({y},{x}) {cfg:?}");
                }
            }
        }
    }

    #[test]
    fn impulse_score() {
        let data = impulse_5x5();
        let ch = Channel::new(5, 5, &data).unwrap();
        assert!((curvature_score(ch, &ZERO) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn affine_ramp_interior_is_zero() {
        let (h, w) = (6, 9);
        let data: Vec<f64> = (0..h * w)
            .map(|k| 0.75 * (k % w) as f64 - 1.5 * (k / w) as f64 + 2.0)
            .collect();
        let map = curvature_map(Channel::new(h, w, &data).unwrap(), &REPLICATE);
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                assert!(map.get(y, x).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn scores_per_channel() {
        let mut data = vec![2.0f32; 25];
        data.extend(impulse_5x5());
        let fm = FeatureMap::new(2, 5, 5, data).unwrap();
        let scores = curvature_scores(&fm, &ZERO);
        assert_eq!(scores.method, MethodKind::Curvature);
        assert_eq!(scores.scores[1], curvature_score(fm.channel(1).unwrap(), &ZERO));
        assert!(scores.scores[1] > 0.0);
        assert_eq!(curvature_scores(&fm, &REPLICATE).scores[0], 0.0);
        assert!(scores.scores[0] > 0.0);
    }
}
