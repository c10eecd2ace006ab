//! File interchange: `.npy` tensors, grayscale PNG input and score reports.

mod npy;
mod png;
mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use self::npy::{
    decode_npy, encode_npy, read_array, read_array_any, read_array_as, write_array,
    write_array_with_rank, AnyFeatureMap, ArrayFileHeader, DType, ReadOptions, Rank,
};
pub use self::png::{decode_png_gray, read_png_gray, GrayImage};
pub use self::report::{
    content_digest, fnv1a64, write_score_report, ChannelRecord, ReportFormat, ScoreReport,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Fs {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("not an .npy file (bad magic)")]
    BadMagic,

    #[error("unsupported .npy format version {0}.{1}")]
    UnsupportedVersion(u8, u8),

    #[error("malformed .npy header: {0}")]
    MalformedHeader(String),

    #[error("unsupported dtype {0:?}")]
    UnsupportedDType(String),

    #[error("unsupported rank {0}, expected 2 (H×W) or 3 (C×H×W)")]
    UnsupportedRank(usize),

    #[error("column-major (fortran_order) arrays are not supported")]
    ColumnMajorUnsupported,

    #[error("payload holds {actual} bytes, shape needs {expected}")]
    PayloadLength { expected: usize, actual: usize },

    #[error("unsupported PNG color type {0}")]
    UnsupportedColorType(String),

    #[error("unsupported PNG bit depth {0}")]
    UnsupportedBitDepth(u8),

    #[error("PNG decode: {0}")]
    Decode(String),

    #[error("report: {0}")]
    Report(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Invalid(#[from] crate::Error),
}

pub(crate) fn fs_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Fs {
        path: path.to_path_buf(),
        source,
    }
}
