//! Parallel-resistance forward model.
//!
//! The subject is cut into parallel strips of width `w`. For each strip the
//! background and every perturbation contribute a conductance
//! `w · L / (ρ · d)` where `L` is the material's average length across the
//! strip; the strip's conductance is the sum of those parallel paths.
//! Rotating the perturbation centers and repeating the cut gives one
//! projection per angle.

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;
use thiserror::Error;

use crate::phantom::{chord_unchecked, circle_chord_at, circle_strip_area, strip_area, Circle, Phantom, PhantomError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectorError {
    #[error(transparent)]
    Phantom(#[from] PhantomError),
    #[error("slice index {index} out of range (0..{count})")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("angle step {step}° must be positive and divide 180° evenly")]
    InvalidAngleStep { step: f64 },
    #[error("sinogram shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Which projection quantity a sinogram carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Conductance,
    AvgConductivity,
}

impl Quantity {
    /// Short tag used in file names.
    pub fn tag(self) -> &'static str {
        match self {
            Quantity::Conductance => "conductance",
            Quantity::AvgConductivity => "avgcond",
        }
    }
}

/// How the average length of a material across one strip is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SliceRule {
    /// Exact mean chord over the strip (strip area / strip width). Column
    /// sums are then independent of angle.
    #[default]
    StripMean,
    /// Mean of the chords on the strip's two bounding lines.
    ChordAverage,
}

/// Uniform partition of `[-R, R]` into strips of width `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceGrid<T> {
    pub subject_radius: T,
    pub slice_width: T,
    pub count: usize,
}

impl<T: Scalar> SliceGrid<T> {
    /// `floor(2R / w)` strips; the last one absorbs any remainder.
    pub fn new(subject_radius: T, slice_width: T) -> Self {
        let ratio = (T::lit(2.0) * subject_radius / slice_width).to_f64_lossy();
        let count = ((ratio + 1e-9).floor() as usize).max(1);
        Self {
            subject_radius,
            slice_width,
            count,
        }
    }

    pub fn bounds(&self, index: usize) -> Result<(T, T), ProjectorError> {
        if index >= self.count {
            return Err(ProjectorError::IndexOutOfRange {
                index,
                count: self.count,
            });
        }
        let lower = -self.subject_radius + T::from_count(index) * self.slice_width;
        let upper = if index + 1 == self.count {
            self.subject_radius
        } else {
            lower + self.slice_width
        };
        Ok((lower, upper))
    }

    /// Lateral coordinate of the nominal center of strip `index`.
    pub fn center(&self, index: usize) -> T {
        -self.subject_radius + (T::from_count(index) + T::lit(0.5)) * self.slice_width
    }
}

/// Bounds of strip `slice_index` for a subject of radius `subject_radius`.
pub fn slice_bounds<T: Scalar>(
    subject_radius: T,
    slice_width: T,
    slice_index: usize,
) -> Result<(T, T), ProjectorError> {
    SliceGrid::new(subject_radius, slice_width).bounds(slice_index)
}

/// One projection: per-strip values at a single angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T> {
    pub values: Vec<T>,
    pub angle: T,
    pub quantity: Quantity,
    pub grid: SliceGrid<T>,
}

/// Projections over a sweep of angles, stored strip-major (`N × A`).
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram<T> {
    data: Array2<T>,
    angles: Vec<T>,
    quantity: Quantity,
    grid: SliceGrid<T>,
}

impl<T: Scalar> Sinogram<T> {
    pub fn new(
        data: Array2<T>,
        angles: Vec<T>,
        quantity: Quantity,
        grid: SliceGrid<T>,
    ) -> Result<Self, ProjectorError> {
        if data.nrows() != grid.count || data.ncols() != angles.len() {
            return Err(ProjectorError::ShapeMismatch(format!(
                "data is {}x{}, expected {}x{}",
                data.nrows(),
                data.ncols(),
                grid.count,
                angles.len()
            )));
        }
        Ok(Self {
            data,
            angles,
            quantity,
            grid,
        })
    }

    /// Assembles a sinogram from projections sharing one grid and quantity.
    pub fn from_projections(projections: Vec<Projection<T>>) -> Result<Self, ProjectorError> {
        let first = projections
            .first()
            .ok_or_else(|| ProjectorError::ShapeMismatch("no projections".into()))?;
        let grid = first.grid;
        let quantity = first.quantity;
        let mut data = Array2::zeros((grid.count, projections.len()));
        let mut angles = Vec::with_capacity(projections.len());
        for (a, p) in projections.iter().enumerate() {
            if p.grid != grid || p.quantity != quantity || p.values.len() != grid.count {
                return Err(ProjectorError::ShapeMismatch(format!(
                    "projection {a} does not match the first"
                )));
            }
            data.column_mut(a).assign(&ArrayView1::from(&p.values[..]));
            angles.push(p.angle);
        }
        Self::new(data, angles, quantity, grid)
    }

    pub fn data(&self) -> &Array2<T> {
        &self.data
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn grid(&self) -> &SliceGrid<T> {
        &self.grid
    }

    pub fn n_slices(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_angles(&self) -> usize {
        self.data.ncols()
    }

    pub fn value(&self, slice: usize, angle: usize) -> T {
        self.data[[slice, angle]]
    }

    pub fn column(&self, angle: usize) -> Projection<T> {
        Projection {
            values: self.data.column(angle).to_vec(),
            angle: self.angles[angle],
            quantity: self.quantity,
            grid: self.grid,
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = Projection<T>> + '_ {
        (0..self.n_angles()).map(move |a| self.column(a))
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            data: self.data.mapv(|v| v * factor),
            ..self.clone()
        }
    }

    /// Elementwise `self + other` on matching sinograms.
    pub fn added(&self, other: &Self) -> Result<Self, ProjectorError> {
        if self.data.dim() != other.data.dim() || self.grid != other.grid {
            return Err(ProjectorError::ShapeMismatch(
                "cannot add sinograms of different shapes".into(),
            ));
        }
        Ok(Self {
            data: &self.data + &other.data,
            ..self.clone()
        })
    }

    /// Per-angle column sums.
    pub fn column_sums(&self) -> Vec<T> {
        self.data
            .columns()
            .into_iter()
            .map(|c| c.iter().copied().sum())
            .collect()
    }
}

/// Angles `0, step, …, 180 − step` in degrees.
pub fn angle_sweep<T: Scalar>(step: T) -> Result<Vec<T>, ProjectorError> {
    let step_f = step.to_f64_lossy();
    let invalid = ProjectorError::InvalidAngleStep { step: step_f };
    if !step_f.is_finite() || step_f <= 0.0 || step_f > 180.0 {
        return Err(invalid);
    }
    let count = (180.0 / step_f).round();
    if (count * step_f - 180.0).abs() > 1e-9 * 180.0 {
        return Err(invalid);
    }
    Ok((0..count as usize).map(|k| T::from_count(k) * step).collect())
}

/// Material lengths across one strip.
struct StripComposition<T> {
    lower: T,
    upper: T,
    /// Average length of the whole subject across the strip.
    total: T,
    /// `Σ L / ρ` over background and perturbations.
    weighted: T,
}

/// Forward projector bound to a validated phantom.
#[derive(Debug, Clone)]
pub struct Projector<'a, T> {
    phantom: &'a Phantom<T>,
    grid: SliceGrid<T>,
    rule: SliceRule,
}

impl<'a, T: Scalar> Projector<'a, T> {
    pub fn new(phantom: &'a Phantom<T>) -> Result<Self, ProjectorError> {
        phantom.check()?;
        Ok(Self {
            phantom,
            grid: SliceGrid::new(phantom.subject_radius, phantom.slice_width),
            rule: SliceRule::default(),
        })
    }

    pub fn with_rule(mut self, rule: SliceRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn grid(&self) -> &SliceGrid<T> {
        &self.grid
    }

    pub fn rule(&self) -> SliceRule {
        self.rule
    }

    fn rotated(&self, theta: T) -> Vec<Circle<T>> {
        self.phantom.perturbations.iter().map(|c| c.rotated(theta)).collect()
    }

    fn composition(&self, rotated: &[Circle<T>], index: usize) -> Result<StripComposition<T>, ProjectorError> {
        let (lower, upper) = self.grid.bounds(index)?;
        let radius = self.phantom.subject_radius;
        let half = T::lit(0.5);
        let mut weighted = T::zero();
        let (total, background) = match self.rule {
            SliceRule::ChordAverage => {
                let (chord1, chord2) = (chord_unchecked(radius, lower), chord_unchecked(radius, upper));
                let (mut sum_upper, mut sum_lower) = (T::zero(), T::zero());
                for c in rotated {
                    let (cu, cl) = (circle_chord_at(c, lower), circle_chord_at(c, upper));
                    sum_upper = sum_upper + cu;
                    sum_lower = sum_lower + cl;
                    weighted = weighted + (cu + cl) * half / c.resistivity;
                }
                let background = ((chord1 - sum_upper).max(T::zero()) + (chord2 - sum_lower).max(T::zero())) * half;
                ((chord1 + chord2) * half, background)
            }
            SliceRule::StripMean => {
                let width = upper - lower;
                let total = strip_area(radius, lower, upper) / width;
                let mut covered = T::zero();
                for c in rotated {
                    let len = circle_strip_area(c, lower, upper) / width;
                    covered = covered + len;
                    weighted = weighted + len / c.resistivity;
                }
                (total, (total - covered).max(T::zero()))
            }
        };
        weighted = weighted + background / self.phantom.subject_resistivity;
        Ok(StripComposition {
            lower,
            upper,
            total,
            weighted,
        })
    }

    fn conductance_of(&self, s: &StripComposition<T>) -> T {
        (s.upper - s.lower) * s.weighted / self.phantom.depth
    }

    fn avg_conductivity_of(&self, s: &StripComposition<T>) -> T {
        if s.total > T::zero() {
            s.weighted / s.total
        } else {
            T::zero()
        }
    }

    fn value_of(&self, s: &StripComposition<T>, quantity: Quantity) -> T {
        match quantity {
            Quantity::Conductance => self.conductance_of(s),
            Quantity::AvgConductivity => self.avg_conductivity_of(s),
        }
    }

    pub fn slice_conductance(&self, theta: T, index: usize) -> Result<T, ProjectorError> {
        let s = self.composition(&self.rotated(theta), index)?;
        Ok(self.conductance_of(&s))
    }

    /// `G · d / (w · L)`, which is `1/ρ` on a homogeneous strip.
    pub fn slice_avg_conductivity(&self, theta: T, index: usize) -> Result<T, ProjectorError> {
        let s = self.composition(&self.rotated(theta), index)?;
        Ok(self.avg_conductivity_of(&s))
    }

    pub fn project(&self, theta: T, quantity: Quantity) -> Result<Projection<T>, ProjectorError> {
        let rotated = self.rotated(theta);
        let values = (0..self.grid.count)
            .map(|j| self.composition(&rotated, j).map(|s| self.value_of(&s, quantity)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Projection {
            values,
            angle: theta,
            quantity,
            grid: self.grid,
        })
    }

    pub fn sinogram(&self, angle_step: T, quantity: Quantity) -> Result<Sinogram<T>, ProjectorError> {
        let angles = angle_sweep(angle_step)?;
        let columns = angles
            .par_iter()
            .map(|&theta| self.project(theta, quantity))
            .collect::<Result<Vec<_>, _>>()?;
        Sinogram::from_projections(columns)
    }
}

pub fn slice_conductance<T: Scalar>(phantom: &Phantom<T>, theta: T, slice_index: usize) -> Result<T, ProjectorError> {
    Projector::new(phantom)?.slice_conductance(theta, slice_index)
}

pub fn slice_avg_conductivity<T: Scalar>(
    phantom: &Phantom<T>,
    theta: T,
    slice_index: usize,
) -> Result<T, ProjectorError> {
    Projector::new(phantom)?.slice_avg_conductivity(theta, slice_index)
}

pub fn project<T: Scalar>(phantom: &Phantom<T>, theta: T, quantity: Quantity) -> Result<Projection<T>, ProjectorError> {
    Projector::new(phantom)?.project(theta, quantity)
}

/// Sinogram over the half-open sweep `[0°, 180°)`.
pub fn compute_sinogram<T: Scalar>(
    phantom: &Phantom<T>,
    angle_step: T,
    quantity: Quantity,
) -> Result<Sinogram<T>, ProjectorError> {
    Projector::new(phantom)?.sinogram(angle_step, quantity)
}
