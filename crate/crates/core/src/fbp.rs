//! Filtered back projection.
//!
//! Each projection is zero-padded, filtered in the frequency domain by a
//! ramp (optionally windowed), then smeared back along its lines and summed
//! over the angle sweep.

use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::phantom::Point;
use crate::projector::{Projection, ProjectorError, Sinogram, SliceGrid};
use crate::raster::{normalize_image, RasterImage};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FbpError {
    #[error("normalized frequency {0} outside [0, 1]")]
    FrequencyOutOfRange(f64),
    #[error("sinogram has no projections")]
    EmptySinogram,
    #[error("grid size must be at least 2 (got {0})")]
    InvalidGridSize(usize),
    #[error(transparent)]
    Projector(#[from] ProjectorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    RamLak,
    SheppLogan,
    Cosine,
    Hamming,
    Hann,
    /// Plain (unfiltered) back projection.
    None,
}

impl FilterKind {
    pub const ALL: [FilterKind; 6] = [
        FilterKind::RamLak,
        FilterKind::SheppLogan,
        FilterKind::Cosine,
        FilterKind::Hamming,
        FilterKind::Hann,
        FilterKind::None,
    ];

    /// The five ramp-based filters.
    pub const RAMPS: [FilterKind; 5] = [
        FilterKind::RamLak,
        FilterKind::SheppLogan,
        FilterKind::Cosine,
        FilterKind::Hamming,
        FilterKind::Hann,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FilterKind::RamLak => "ramlak",
            FilterKind::SheppLogan => "shepplogan",
            FilterKind::Cosine => "cosine",
            FilterKind::Hamming => "hamming",
            FilterKind::Hann => "hann",
            FilterKind::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterpKind {
    Nearest,
    Linear,
    /// Catmull-Rom cubic through the four surrounding samples.
    Spline,
}

impl InterpKind {
    pub const ALL: [InterpKind; 3] = [InterpKind::Nearest, InterpKind::Linear, InterpKind::Spline];

    pub fn tag(self) -> &'static str {
        match self {
            InterpKind::Nearest => "nearest",
            InterpKind::Linear => "linear",
            InterpKind::Spline => "spline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReconConfig {
    pub filter: FilterKind,
    pub interp: InterpKind,
    pub grid_size: usize,
    pub normalize: bool,
}

impl ReconConfig {
    pub fn new(filter: FilterKind, interp: InterpKind, grid_size: usize) -> Self {
        Self {
            filter,
            interp,
            grid_size,
            normalize: false,
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    pub fn validate(&self) -> Result<(), FbpError> {
        if self.grid_size < 2 {
            return Err(FbpError::InvalidGridSize(self.grid_size));
        }
        Ok(())
    }
}

/// Frequency response at normalized frequency `f` (1 = Nyquist).
pub fn filter_gain<T: Scalar>(kind: FilterKind, f: T) -> Result<T, FbpError> {
    if !(f >= T::zero() && f <= T::one()) {
        return Err(FbpError::FrequencyOutOfRange(f.to_f64_lossy()));
    }
    Ok(gain_unchecked(kind, f))
}

fn gain_unchecked<T: Scalar>(kind: FilterKind, f: T) -> T {
    let pi = T::PI();
    let half = T::lit(0.5);
    match kind {
        FilterKind::RamLak => f,
        FilterKind::SheppLogan => {
            let x = pi * f * half;
            if x == T::zero() {
                f
            } else {
                f * x.sin() / x
            }
        }
        FilterKind::Cosine => f * (pi * f * half).cos(),
        FilterKind::Hamming => f * (T::lit(0.54) + T::lit(0.46) * (pi * f).cos()),
        FilterKind::Hann => f * half * (T::one() + (pi * f).cos()),
        FilterKind::None => T::one(),
    }
}

/// Zero-padded length used when filtering `n` samples.
pub fn padded_len(n: usize) -> usize {
    (2 * n).next_power_of_two().max(2)
}

/// Normalized frequency of FFT bin `k` out of `len`.
pub fn bin_frequency<T: Scalar>(k: usize, len: usize) -> T {
    let folded = k.min(len - k);
    T::from_count(folded) / (T::from_count(len) * T::lit(0.5))
}

/// Reusable FFT plan for one padded length.
struct FilterPlan<T: Scalar> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    gains: Vec<T>,
}

impl<T: Scalar> FilterPlan<T> {
    fn new(kind: FilterKind, n: usize) -> Self {
        let len = padded_len(n);
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            gains: (0..len)
                .map(|k| gain_unchecked(kind, bin_frequency::<T>(k, len)))
                .collect(),
        }
    }

    fn apply(&self, values: &[T]) -> Vec<T> {
        let len = self.gains.len();
        let mut buf: Vec<Complex<T>> = values
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
            .take(len)
            .collect();
        self.forward.process(&mut buf);
        for (b, &g) in buf.iter_mut().zip(&self.gains) {
            *b = *b * g;
        }
        self.inverse.process(&mut buf);
        let scale = T::from_count(len).recip();
        buf.iter().take(values.len()).map(|c| c.re * scale).collect()
    }
}

/// Frequency-domain filtering of one projection. `FilterKind::None` returns
/// the input untouched.
pub fn filter_projection<T: Scalar>(p: &Projection<T>, kind: FilterKind) -> Projection<T> {
    if kind == FilterKind::None || p.values.is_empty() {
        return p.clone();
    }
    let plan = FilterPlan::new(kind, p.values.len());
    Projection {
        values: plan.apply(&p.values),
        ..p.clone()
    }
}

/// Filters every column of a sinogram.
pub fn filter_sinogram<T: Scalar>(sino: &Sinogram<T>, kind: FilterKind) -> Result<Sinogram<T>, FbpError> {
    if kind == FilterKind::None {
        return Ok(sino.clone());
    }
    let plan = FilterPlan::new(kind, sino.n_slices());
    let mut data = Array2::zeros((sino.n_slices(), sino.n_angles()));
    let filtered: Vec<Vec<T>> = (0..sino.n_angles())
        .into_par_iter()
        .map(|a| plan.apply(&sino.data().column(a).to_vec()))
        .collect();
    for (a, col) in filtered.iter().enumerate() {
        for (j, &v) in col.iter().enumerate() {
            data[[j, a]] = v;
        }
    }
    Ok(Sinogram::new(
        data,
        sino.angles().to_vec(),
        sino.quantity(),
        *sino.grid(),
    )?)
}

/// Samples a projection at lateral coordinate `s`, treating sample `j` as
/// located at the strip center `-R + (j + ½)·w`. Zero outside `[-R, R]` and
/// beyond the first and last samples.
pub fn sample_projection<T: Scalar>(p: &Projection<T>, s: T, kind: InterpKind) -> T {
    sample_values(&p.values, &p.grid, s, kind)
}

fn sample_values<T: Scalar>(values: &[T], grid: &SliceGrid<T>, s: T, kind: InterpKind) -> T {
    let r = grid.subject_radius;
    if !(s >= -r && s <= r) || values.is_empty() {
        return T::zero();
    }
    let at = |j: isize| -> T {
        if j >= 0 && (j as usize) < values.len() {
            values[j as usize]
        } else {
            T::zero()
        }
    };
    let u = (s + r - grid.slice_width * T::lit(0.5)) / grid.slice_width;
    match kind {
        // f64::round is half away from zero
        InterpKind::Nearest => at(u.round().to_isize().unwrap_or(-1)),
        InterpKind::Linear => {
            let j0 = u.floor();
            let t = u - j0;
            let j0 = j0.to_isize().unwrap_or(-2);
            at(j0) * (T::one() - t) + at(j0 + 1) * t
        }
        InterpKind::Spline => {
            let j0 = u.floor();
            let t = u - j0;
            let j = j0.to_isize().unwrap_or(-3);
            let (p0, p1, p2, p3) = (at(j - 1), at(j), at(j + 1), at(j + 2));
            let half = T::lit(0.5);
            let two = T::lit(2.0);
            let a = two * p1;
            let b = p2 - p0;
            let c = two * p0 - T::lit(5.0) * p1 + T::lit(4.0) * p2 - p3;
            let d = -p0 + T::lit(3.0) * p1 - T::lit(3.0) * p2 + p3;
            half * (a + t * (b + t * (c + t * d)))
        }
    }
}

/// Back projection of (already filtered) columns onto a `grid_size²` image
/// spanning `[-R, R]²`, weighted by `Δθ = π / A`. Pixels outside the
/// inscribed circle are zero.
pub fn back_project<T: Scalar>(sino: &Sinogram<T>, config: &ReconConfig) -> Result<RasterImage<T>, FbpError> {
    config.validate()?;
    if sino.n_angles() == 0 || sino.n_slices() == 0 {
        return Err(FbpError::EmptySinogram);
    }
    let grid = *sino.grid();
    let size = config.grid_size;
    let dtheta = T::PI() / T::from_count(sino.n_angles());
    let trig: Vec<(T, T)> = sino.angles().iter().map(|a| a.to_radians().sin_cos()).collect();
    let columns: Vec<Vec<T>> = (0..sino.n_angles()).map(|a| sino.data().column(a).to_vec()).collect();
    let frame = RasterImage::<T>::zeros(size, grid.subject_radius, true);

    let rows: Vec<Vec<T>> = (0..size)
        .into_par_iter()
        .map(|row| {
            (0..size)
                .map(|col| {
                    let p: Point<T> = frame.pixel_center(row, col);
                    if !frame.in_support(p) {
                        return T::zero();
                    }
                    let acc = trig
                        .iter()
                        .zip(&columns)
                        .map(|(&(sin, cos), values)| sample_values(values, &grid, p.x * cos + p.y * sin, config.interp))
                        .fold(T::zero(), |acc, v| acc + v);
                    acc * dtheta
                })
                .collect()
        })
        .collect();

    let mut pixels = Array2::zeros((size, size));
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            pixels[[r, c]] = v;
        }
    }
    Ok(RasterImage::from_pixels(pixels, grid.subject_radius, true).expect("square by construction"))
}

/// Filters every column, back projects, and optionally min-max normalizes
/// over the support disk.
pub fn reconstruct<T: Scalar>(sino: &Sinogram<T>, config: &ReconConfig) -> Result<RasterImage<T>, FbpError> {
    config.validate()?;
    if sino.n_angles() == 0 {
        return Err(FbpError::EmptySinogram);
    }
    let filtered = filter_sinogram(sino, config.filter)?;
    let img = back_project(&filtered, config)?;
    Ok(if config.normalize { normalize_image(&img) } else { img })
}

/// Gain table `(f, [gain per filter in FilterKind::RAMPS order])` at
/// `points` evenly spaced frequencies in `[0, 1]`.
pub fn gain_table(points: usize) -> Vec<(f64, [f64; 5])> {
    let points = points.max(2);
    (0..points)
        .map(|i| {
            let f = i as f64 / (points - 1) as f64;
            let mut row = [0.0; 5];
            for (slot, kind) in row.iter_mut().zip(FilterKind::RAMPS) {
                *slot = gain_unchecked(kind, f);
            }
            (f, row)
        })
        .collect()
}
