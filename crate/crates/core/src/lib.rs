//! Complementary textures for aligning virtual replicas with real objects.
//!
//! The crate is organized as a small pipeline:
//!
//! 1. [`texture`] derives photometric complements (inversion, predominant
//!    color masking, region patches) from a real object's texture.
//! 2. [`geometry`] derives geometric complements (edges, diagonals,
//!    bisectors, inscribed and enclosing circles, Delaunay meshes) from the
//!    object's silhouette and rasterizes them.
//! 3. [`compositor`] renders a static real object plus a posed virtual
//!    replica under additive (optical see-through) or source-over (video
//!    see-through) blending.
//! 4. [`saliency`] scores composites with an eigen-axis phase quaternion
//!    Fourier transform saliency map.
//! 5. [`sweep`] runs pose-error sweeps and exports tables and plots.

// NaN-rejecting argument checks are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compositor;
pub mod geometry;
pub mod image;
pub mod quat;
pub mod saliency;
pub mod scene;
pub mod sweep;
pub mod texture;

mod font;

use std::path::{Path, PathBuf};

pub use compositor::{BlendMode, Pose2D, VisMode};
pub use image::{ColorRGB, Image, Mask, Rgba};
pub use scene::Scene;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("decode error: {0}")]
    Decode(String),
    #[error("encode error: {0}")]
    Encode(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("image dimensions must be positive")]
    EmptyDimensions,
    #[error("color channel {0} outside [0, 1]")]
    InvalidColor(f64),
    #[error("image has no opaque pixels")]
    EmptyImage,
    #[error("polygon is not convex")]
    NonConvexPolygon,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("scene has no asset for mode {0}")]
    MissingAsset(VisMode),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }
}

impl From<png::DecodingError> for Error {
    fn from(e: png::DecodingError) -> Self {
        Error::Decode(e.to_string())
    }
}

impl From<png::EncodingError> for Error {
    fn from(e: png::EncodingError) -> Self {
        Error::Encode(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
