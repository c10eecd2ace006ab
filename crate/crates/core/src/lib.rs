//! Channel scoring and instructive feature enhancement for `C×H×W` feature
//! maps.
//!
//! Two criteria rank channels by how much texture they carry:
//!
//! * [`curvature`]: mean absolute response of a 3×3 mean-curvature filter;
//! * [`entropy`]: 2D entropy of `(center, neighbor mean)` level pairs.
//!
//! [`enhance`] keeps the top `ceil(r·C)` channels and appends copies of them
//! to the raw map. [`oracle`] holds slow reference implementations of both
//! criteria and [`io`] reads and writes `.npy` tensors, grayscale PNGs and
//! score reports.

pub mod curvature;
pub mod enhance;
pub mod entropy;
mod error;
pub mod io;
pub mod oracle;
pub mod types;

pub use enhance::{ife, score, select_top, SelectionResult};
pub use error::{Error, Result};
pub use types::{
    Channel, ChannelScores, CurvatureConfig, CurvatureMap, Denominator, Element, EntropyConfig,
    FeatureMap, JointHistogram, Method, MethodKind, Padding, SelectionConfig,
};

/// Runs `f` on a dedicated rayon pool of `threads` workers (`0` picks the
/// rayon default).
pub fn with_threads<R, F>(threads: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}
