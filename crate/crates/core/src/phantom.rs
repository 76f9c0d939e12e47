//! Circular subject with embedded circular perturbations, plus the pure
//! geometry the forward model is built on.
//!
//! Lengths are millimetres and resistivities Ω·m, exactly as the phantom
//! parameters are usually quoted. Angles are degrees at every public
//! boundary.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhantomError {
    #[error("{what} must be positive (got {value}){}", index_suffix(*.index))]
    NonPositiveDimension {
        what: &'static str,
        index: Option<usize>,
        value: f64,
    },
    #[error("slice width {slice_width} exceeds subject radius {subject_radius}")]
    SliceWiderThanSubject { slice_width: f64, subject_radius: f64 },
    #[error("perturbation {index} extends outside the subject ({reach} > {subject_radius})")]
    PerturbationOutsideSubject {
        index: usize,
        reach: f64,
        subject_radius: f64,
    },
    #[error("perturbations {first} and {second} overlap (center distance {distance} < {radii_sum})")]
    OverlappingPerturbations {
        first: usize,
        second: usize,
        distance: f64,
        radii_sum: f64,
    },
}

fn index_suffix(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" for perturbation {i}"),
        None => String::new(),
    }
}

/// A point in the subject plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Embedded circular perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle<T> {
    pub center_x: T,
    pub center_y: T,
    pub radius: T,
    pub resistivity: T,
}

impl<T: Scalar> Circle<T> {
    pub fn new(center_x: T, center_y: T, radius: T, resistivity: T) -> Self {
        Self {
            center_x,
            center_y,
            radius,
            resistivity,
        }
    }

    pub fn center(&self) -> Point<T> {
        Point::new(self.center_x, self.center_y)
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        let dx = p.x - self.center_x;
        let dy = p.y - self.center_y;
        dx * dx + dy * dy <= self.radius * self.radius
    }

    /// Same circle with its center expressed in axes rotated by `theta_deg`.
    pub fn rotated(&self, theta_deg: T) -> Self {
        let c = rotate_center(self.center(), theta_deg);
        Self {
            center_x: c.x,
            center_y: c.y,
            ..*self
        }
    }
}

/// Circular subject of depth `depth`, sliced into strips of `slice_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom<T> {
    pub subject_radius: T,
    pub subject_resistivity: T,
    pub depth: T,
    pub slice_width: T,
    pub perturbations: Vec<Circle<T>>,
}

impl<T: Scalar> Phantom<T> {
    /// Phantom with no perturbations.
    pub fn homogeneous(subject_radius: T, subject_resistivity: T, depth: T, slice_width: T) -> Self {
        Self {
            subject_radius,
            subject_resistivity,
            depth,
            slice_width,
            perturbations: Vec::new(),
        }
    }

    pub fn with_perturbation(mut self, circle: Circle<T>) -> Self {
        self.perturbations.push(circle);
        self
    }

    /// Checks every structural invariant, returning the phantom unchanged.
    pub fn validate(self) -> Result<Self, PhantomError> {
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<(), PhantomError> {
        let positive = |what: &'static str, index: Option<usize>, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(PhantomError::NonPositiveDimension {
                    what,
                    index,
                    value: v.to_f64_lossy(),
                })
            }
        };
        positive("subject radius", None, self.subject_radius)?;
        positive("subject resistivity", None, self.subject_resistivity)?;
        positive("depth", None, self.depth)?;
        positive("slice width", None, self.slice_width)?;
        if self.slice_width > self.subject_radius {
            return Err(PhantomError::SliceWiderThanSubject {
                slice_width: self.slice_width.to_f64_lossy(),
                subject_radius: self.subject_radius.to_f64_lossy(),
            });
        }
        for (i, c) in self.perturbations.iter().enumerate() {
            positive("radius", Some(i), c.radius)?;
            positive("resistivity", Some(i), c.resistivity)?;
            if !c.center_x.is_finite() || !c.center_y.is_finite() {
                return Err(PhantomError::PerturbationOutsideSubject {
                    index: i,
                    reach: f64::INFINITY,
                    subject_radius: self.subject_radius.to_f64_lossy(),
                });
            }
            let reach = c.center().norm() + c.radius;
            if reach > self.subject_radius {
                return Err(PhantomError::PerturbationOutsideSubject {
                    index: i,
                    reach: reach.to_f64_lossy(),
                    subject_radius: self.subject_radius.to_f64_lossy(),
                });
            }
        }
        for (i, a) in self.perturbations.iter().enumerate() {
            for (j, b) in self.perturbations.iter().enumerate().skip(i + 1) {
                let distance = a.center().distance(&b.center());
                let radii_sum = a.radius + b.radius;
                if distance < radii_sum {
                    return Err(PhantomError::OverlappingPerturbations {
                        first: i,
                        second: j,
                        distance: distance.to_f64_lossy(),
                        radii_sum: radii_sum.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Resistivity of the material at `p`: 0 outside the subject.
    pub fn resistivity_at(&self, p: Point<T>) -> Option<T> {
        if p.norm() > self.subject_radius {
            return None;
        }
        let rho = self
            .perturbations
            .iter()
            .find(|c| c.contains(p))
            .map_or(self.subject_resistivity, |c| c.resistivity);
        Some(rho)
    }
}

/// Coordinates of `p` in axes rotated counterclockwise by `theta_deg`:
/// `X = x cosθ + y sinθ`, `Y = -x sinθ + y cosθ`.
pub fn rotate_center<T: Scalar>(p: Point<T>, theta_deg: T) -> Point<T> {
    let (sin, cos) = theta_deg.to_radians().sin_cos();
    Point {
        x: p.x * cos + p.y * sin,
        y: -p.x * sin + p.y * cos,
    }
}

/// Length of the chord cut from a circle of `radius` by a line at signed
/// distance `offset` from its center. Lines that miss the circle give 0.
pub fn chord_length<T: Scalar>(radius: T, offset: T) -> Result<T, PhantomError> {
    if radius.is_nan() || radius <= T::zero() {
        return Err(PhantomError::NonPositiveDimension {
            what: "radius",
            index: None,
            value: radius.to_f64_lossy(),
        });
    }
    Ok(chord_unchecked(radius, offset))
}

#[inline]
pub(crate) fn chord_unchecked<T: Scalar>(radius: T, offset: T) -> T {
    let h = radius * radius - offset * offset;
    if h > T::zero() {
        T::lit(2.0) * h.sqrt()
    } else {
        T::zero()
    }
}

/// Chord of an already rotated circle cut by the slicing line `X = s`.
pub fn circle_chord_at<T: Scalar>(circle: &Circle<T>, lateral_offset: T) -> T {
    chord_unchecked(circle.radius, lateral_offset - circle.center_x)
}

/// Area of the part of a disk (centered at 0) lying between the lines
/// `X = a` and `X = b`, `a <= b`.
pub(crate) fn strip_area<T: Scalar>(radius: T, a: T, b: T) -> T {
    // antiderivative of 2 sqrt(r^2 - s^2)
    // s·h and r²·asin(s/r) are individually ill-conditioned at the rim;
    // sharing h through atan2 keeps their sum stable.
    let prim = |s: T| {
        let s = s.max(-radius).min(radius);
        let h = ((radius - s) * (radius + s)).max(T::zero()).sqrt();
        s * h + radius * radius * s.atan2(h)
    };
    (prim(b) - prim(a)).max(T::zero())
}

/// Area of `circle` (already rotated) between the lines `X = a` and `X = b`.
pub(crate) fn circle_strip_area<T: Scalar>(circle: &Circle<T>, a: T, b: T) -> T {
    strip_area(circle.radius, a - circle.center_x, b - circle.center_x)
}
