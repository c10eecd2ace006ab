//! Tensors, scores and configuration shared by every scoring and enhancement
//! routine.
//!
//! Feature maps are dense row-major `C×H×W` arrays. Both criteria need a full
//! 3×3 window, so construction rejects planes smaller than 3×3, and it rejects
//! NaN/Inf because histogram binning and mean reductions silently corrupt
//! under them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest legal height and width of a channel.
pub const MIN_SIDE: usize = 3;

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Floating-point element types a [`FeatureMap`] can hold.
pub trait Element:
    sealed::Sealed + Copy + Send + Sync + PartialEq + PartialOrd + fmt::Debug + 'static
{
    /// Size in bytes of one element.
    const SIZE: usize;
    /// `.npy` type descriptor (little-endian).
    const DESCR: &'static str;

    fn to_f64(self) -> f64;
    fn from_f64(v: f64) -> Self;
    fn is_finite(self) -> bool;
    fn write_le(self, out: &mut Vec<u8>);
    /// Decodes one element from exactly `SIZE` little-endian bytes.
    fn read_le(bytes: &[u8]) -> Self;
}

impl Element for f32 {
    const SIZE: usize = 4;
    const DESCR: &'static str = "<f4";

    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }
}

impl Element for f64 {
    const SIZE: usize = 8;
    const DESCR: &'static str = "<f8";

    fn to_f64(self) -> f64 {
        self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }
}

fn check_values<T: Element>(values: &[T]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteValue { index }),
        None => Ok(()),
    }
}

fn check_side(height: usize, width: usize) -> Result<()> {
    if height < MIN_SIDE || width < MIN_SIDE {
        return Err(Error::TooSmall {
            height,
            width,
            min: MIN_SIDE,
        });
    }
    Ok(())
}

/// A validated, immutable `C×H×W` feature map stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap<T: Element = f32> {
    channels: usize,
    height: usize,
    width: usize,
    values: Vec<T>,
}

impl<T: Element> FeatureMap<T> {
    pub fn new(channels: usize, height: usize, width: usize, values: Vec<T>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::NoChannels);
        }
        let expected = channels
            .checked_mul(height)
            .and_then(|n| n.checked_mul(width))
            .ok_or(Error::DimensionMismatch {
                expected: usize::MAX,
                actual: values.len(),
            })?;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        check_side(height, width)?;
        check_values(&values)?;
        Ok(Self {
            channels,
            height,
            width,
            values,
        })
    }

    /// Stacks equally sized channels into a map, in order.
    pub fn from_channels(planes: &[Channel<'_, T>]) -> Result<Self> {
        let first = planes.first().ok_or(Error::NoChannels)?;
        let (height, width) = first.shape();
        let mut values = Vec::with_capacity(planes.len() * height * width);
        for plane in planes {
            if plane.shape() != (height, width) {
                return Err(Error::ShapeMismatch {
                    left: (height, width),
                    right: plane.shape(),
                });
            }
            values.extend_from_slice(plane.values());
        }
        Ok(Self {
            channels: planes.len(),
            height,
            width,
            values,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(C, H, W)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Borrowed view of channel `index`.
    pub fn channel(&self, index: usize) -> Result<Channel<'_, T>> {
        if index >= self.channels {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.channels,
            });
        }
        let n = self.plane_len();
        Ok(Channel {
            height: self.height,
            width: self.width,
            values: &self.values[index * n..(index + 1) * n],
        })
    }

    pub fn iter_channels(&self) -> impl ExactSizeIterator<Item = Channel<'_, T>> + '_ {
        self.values
            .chunks_exact(self.plane_len())
            .map(move |values| Channel {
                height: self.height,
                width: self.width,
                values,
            })
    }
}

/// Read-only view of one `H×W` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel<'a, T: Element = f32> {
    height: usize,
    width: usize,
    values: &'a [T],
}

impl<'a, T: Element> Channel<'a, T> {
    /// Wraps a standalone plane, applying the same checks as [`FeatureMap::new`].
    pub fn new(height: usize, width: usize, values: &'a [T]) -> Result<Self> {
        let expected = height.saturating_mul(width);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        check_side(height, width)?;
        check_values(values)?;
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &'a [T] {
        self.values
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> T {
        self.values[y * self.width + x]
    }

    /// Smallest and largest value, as `f64`.
    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let v = v.to_f64();
                (lo.min(v), hi.max(v))
            })
    }
}

/// Border handling for out-of-range reads.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Padding {
    /// Clamp coordinates to the nearest edge pixel.
    #[default]
    Replicate,
    /// Read zero outside the plane.
    Zero,
}

impl fmt::Display for Padding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Padding::Replicate => "replicate",
            Padding::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CurvatureConfig {
    pub padding: Padding,
}

impl CurvatureConfig {
    pub fn digest(&self) -> String {
        format!("curvature;padding={}", self.padding)
    }
}

/// Normalizer used to turn joint-histogram counts into probabilities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// `(H + ext_k)·(W + ext_k)`, as written in the reference algorithm.
    /// Probabilities then sum to less than one.
    #[default]
    AlgorithmLiteral,
    /// The number of windows, `H·W`; probabilities sum to one.
    ExactNormalize,
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Denominator::AlgorithmLiteral => "algorithm-literal",
            Denominator::ExactNormalize => "exact-normalize",
        })
    }
}

/// Tunables of the 2D entropy criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntropyConfig {
    bins: usize,
    kernel_size: usize,
    denominator: Denominator,
}

impl EntropyConfig {
    pub const DEFAULT_BINS: usize = 256;
    pub const DEFAULT_KERNEL_SIZE: usize = 3;
    /// Dense `bins²` histograms stop being reasonable past this.
    pub const MAX_BINS: usize = 4096;

    pub fn new(bins: usize, kernel_size: usize, denominator: Denominator) -> Result<Self> {
        if !(2..=Self::MAX_BINS).contains(&bins) {
            return Err(Error::InvalidConfig(format!(
                "bins must be in [2, {}], got {bins}",
                Self::MAX_BINS
            )));
        }
        if kernel_size < 3 || kernel_size.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "kernel_size must be odd and >= 3, got {kernel_size}"
            )));
        }
        Ok(Self {
            bins,
            kernel_size,
            denominator,
        })
    }

    pub fn with_denominator(mut self, denominator: Denominator) -> Self {
        self.denominator = denominator;
        self
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    pub fn denominator(&self) -> Denominator {
        self.denominator
    }

    /// Half-width of the window.
    pub fn ext_k(&self) -> usize {
        self.kernel_size / 2
    }

    /// Entropy windows always replicate the border.
    pub fn padding(&self) -> Padding {
        Padding::Replicate
    }

    pub fn digest(&self) -> String {
        format!(
            "entropy;bins={};kernel_size={};denominator={};padding={}",
            self.bins,
            self.kernel_size,
            self.denominator,
            self.padding()
        )
    }
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            bins: Self::DEFAULT_BINS,
            kernel_size: Self::DEFAULT_KERNEL_SIZE,
            denominator: Denominator::AlgorithmLiteral,
        }
    }
}

/// Proportion of channels to duplicate. Ties go to the lower channel index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    ratio: f64,
}

impl SelectionConfig {
    pub fn new(ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(Error::InvalidRatio(ratio));
        }
        Ok(Self { ratio })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }
}

/// Which criterion produced a set of scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Curvature,
    Entropy,
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodKind::Curvature => "curvature",
            MethodKind::Entropy => "entropy",
        })
    }
}

/// A scoring criterion together with its configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Curvature(CurvatureConfig),
    Entropy(EntropyConfig),
}

impl Method {
    pub fn kind(&self) -> MethodKind {
        match self {
            Method::Curvature(_) => MethodKind::Curvature,
            Method::Entropy(_) => MethodKind::Entropy,
        }
    }

    pub fn digest(&self) -> String {
        match self {
            Method::Curvature(cfg) => cfg.digest(),
            Method::Entropy(cfg) => cfg.digest(),
        }
    }
}

/// Per-channel scores and the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScores {
    pub method: MethodKind,
    pub scores: Vec<f64>,
    pub config_digest: String,
}

impl ChannelScores {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Curvature response of one channel, same shape as the input.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMap {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

impl CurvatureMap {
    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }
}

/// Dense `bins×bins` count grid over `(center, neighbor-mean)` level pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    bins: usize,
    counts: Vec<u32>,
    total_windows: u64,
}

impl JointHistogram {
    pub fn new(bins: usize) -> Self {
        Self {
            bins,
            counts: vec![0; bins * bins],
            total_windows: 0,
        }
    }

    /// Builds a histogram from row-major counts; `None` if the length is not
    /// `bins²`.
    pub fn from_counts(bins: usize, counts: Vec<u32>) -> Option<Self> {
        if counts.len() != bins * bins {
            return None;
        }
        let total_windows = counts.iter().map(|&c| c as u64).sum();
        Some(Self {
            bins,
            counts,
            total_windows,
        })
    }

    #[inline]
    pub fn add(&mut self, center: usize, neighbor: usize) {
        self.counts[center * self.bins + neighbor] += 1;
        self.total_windows += 1;
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    #[inline]
    pub fn count(&self, center: usize, neighbor: usize) -> u32 {
        self.counts[center * self.bins + neighbor]
    }

    /// Row-major counts, `counts[i * bins + j]`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total_windows(&self) -> u64 {
        self.total_windows
    }

    /// Sum of all cells; equal to [`Self::total_windows`] for any histogram
    /// built through [`Self::add`].
    pub fn mass(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Non-empty cells as `(center, neighbor, count)`, row-major.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let bins = self.bins;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(k, &c)| (k / bins, k % bins, c))
    }
}
