//! Discrete Radon transform of raster images.
//!
//! Each pixel's value is split between the two lateral bins whose centers
//! bracket the pixel center's projection. Pixel-driven and shares no code
//! path with the analytic strip model, so the two can cross-check each
//! other.

use ndarray::Array2;
use thiserror::Error;

use crate::fbp::{reconstruct, FbpError, ReconConfig};
use crate::projector::{angle_sweep, ProjectorError, Quantity, Sinogram, SliceGrid};
use crate::raster::RasterImage;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadonError {
    #[error("angle step {step}° must be positive and divide 180° evenly")]
    InvalidAngleStep { step: f64 },
    #[error("need at least 2 bins (got {0})")]
    InvalidBinCount(usize),
    #[error(transparent)]
    Projector(#[from] ProjectorError),
    #[error(transparent)]
    Fbp(#[from] FbpError),
}

/// Line integrals of `img` over `n_bins` lateral bins spanning
/// `[-extent, extent]`, for the half-open sweep `[0°, 180°)`.
pub fn discrete_radon<T: Scalar>(
    img: &RasterImage<T>,
    angle_step: T,
    n_bins: usize,
) -> Result<Sinogram<T>, RadonError> {
    let angles = angle_sweep(angle_step).map_err(|_| RadonError::InvalidAngleStep {
        step: angle_step.to_f64_lossy(),
    })?;
    if n_bins < 2 {
        return Err(RadonError::InvalidBinCount(n_bins));
    }
    let extent = img.extent();
    let bin_width = T::lit(2.0) * extent / T::from_count(n_bins);
    let h = img.pixel_pitch();
    let weight = h * h / bin_width;
    let grid = SliceGrid {
        subject_radius: extent,
        slice_width: bin_width,
        count: n_bins,
    };

    let pixels: Vec<(T, T, T)> = img
        .pixels()
        .indexed_iter()
        .filter(|(_, v)| **v != T::zero())
        .map(|((r, c), v)| {
            let p = img.pixel_center(r, c);
            (p.x, p.y, *v)
        })
        .collect();

    let last = T::from_count(n_bins - 1);
    let mut data = Array2::zeros((n_bins, angles.len()));
    for (a, theta) in angles.iter().enumerate() {
        let (sin, cos) = theta.to_radians().sin_cos();
        for &(x, y, v) in &pixels {
            let s = x * cos + y * sin;
            if !(s >= -extent && s <= extent) {
                continue;
            }
            // fractional position against bin centers, clamped so edge
            // pixels keep their full mass
            let u = ((s + extent) / bin_width - T::lit(0.5)).max(T::zero()).min(last);
            let j0 = u.floor();
            let t = u - j0;
            let j0 = j0.to_usize().unwrap_or(0);
            let mass = v * weight;
            data[[j0, a]] = data[[j0, a]] + mass * (T::one() - t);
            if t > T::zero() {
                data[[j0 + 1, a]] = data[[j0 + 1, a]] + mass * t;
            }
        }
    }
    Ok(Sinogram::new(data, angles, Quantity::Conductance, grid)?)
}

/// Default bin count for [`round_trip`]: two pixels per bin.
pub fn default_bins(size: usize) -> usize {
    (size / 2).max(2)
}

/// `reconstruct(discrete_radon(img))` with [`default_bins`] lateral bins.
pub fn round_trip<T: Scalar>(
    img: &RasterImage<T>,
    config: &ReconConfig,
    angle_step: T,
) -> Result<RasterImage<T>, RadonError> {
    round_trip_with_bins(img, config, angle_step, default_bins(img.size()))
}

pub fn round_trip_with_bins<T: Scalar>(
    img: &RasterImage<T>,
    config: &ReconConfig,
    angle_step: T,
    n_bins: usize,
) -> Result<RasterImage<T>, RadonError> {
    let sino = discrete_radon(img, angle_step, n_bins)?;
    Ok(reconstruct(&sino, config)?)
}
