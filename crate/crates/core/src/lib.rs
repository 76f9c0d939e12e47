//! Forward simulation and filtered back projection for impedance tomography
//! phantoms.
//!
//! A circular subject with embedded circular perturbations is cut into
//! parallel strips; each strip is a bundle of parallel resistors whose
//! conductance (or average conductivity) forms one projection value. The
//! resulting sinogram is reconstructed by filtered back projection and
//! compared against a rasterized ground truth.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below name the double-precision instantiations used by the CLI.

pub mod analysis;
pub mod fbp;
pub mod phantom;
pub mod projector;
pub mod radon;
pub mod raster;
pub mod scalar;

use thiserror::Error;

pub use fbp::{
    back_project, filter_gain, filter_projection, filter_sinogram, reconstruct, sample_projection, FbpError,
    FilterKind, InterpKind, ReconConfig,
};
pub use phantom::{chord_length, circle_chord_at, rotate_center, Circle, Phantom, PhantomError, Point};
pub use projector::{
    compute_sinogram, project, slice_avg_conductivity, slice_bounds, slice_conductance, Projection, Projector,
    ProjectorError, Quantity, Sinogram, SliceGrid, SliceRule,
};
pub use radon::{discrete_radon, round_trip, RadonError};
pub use raster::{compare, normalize_image, rasterize_target, MetricsReport, RasterError, RasterImage, TargetQuantity};
pub use scalar::Scalar;

pub type Phantom64 = Phantom<f64>;
pub type Circle64 = Circle<f64>;
pub type Point64 = Point<f64>;
pub type Projection64 = Projection<f64>;
pub type Sinogram64 = Sinogram<f64>;
pub type RasterImage64 = RasterImage<f64>;
pub type MetricsReport64 = MetricsReport<f64>;

pub type Phantom32 = Phantom<f32>;
pub type Sinogram32 = Sinogram<f32>;
pub type RasterImage32 = RasterImage<f32>;

/// Any failure from the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Phantom(#[from] PhantomError),
    #[error(transparent)]
    Projector(#[from] ProjectorError),
    #[error(transparent)]
    Fbp(#[from] FbpError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Radon(#[from] RadonError),
}

impl Error {
    /// The phantom-level cause, if the error originates in phantom validation.
    pub fn phantom_error(&self) -> Option<&PhantomError> {
        match self {
            Error::Phantom(e)
            | Error::Projector(ProjectorError::Phantom(e))
            | Error::Raster(RasterError::Phantom(e))
            | Error::Fbp(FbpError::Projector(ProjectorError::Phantom(e))) => Some(e),
            _ => None,
        }
    }
}
