//! Square images on the physical frame `[-R, R]²`, ground-truth targets
//! and reconstruction/target comparison metrics.

use ndarray::Array2;
use thiserror::Error;

use crate::phantom::{Phantom, PhantomError, Point};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RasterError {
    #[error(transparent)]
    Phantom(#[from] PhantomError),
    #[error("grid size must be at least 2 (got {0})")]
    InvalidGridSize(usize),
    #[error("image mismatch: {0}")]
    SizeMismatch(String),
}

/// Material property painted into a target image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetQuantity {
    Conductivity,
    Resistivity,
}

/// `size × size` pixels, row 0 at the top (`y` decreasing downwards).
///
/// Pixel `(row, col)` covers a cell of side `2R / size`; its center is
/// `x = -R + (col + ½)·h`, `y = R - (row + ½)·h`. A masked image is zero at
/// every pixel whose center lies outside the inscribed circle.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage<T> {
    pixels: Array2<T>,
    extent: T,
    masked: bool,
}

impl<T: Scalar> RasterImage<T> {
    pub fn zeros(size: usize, extent: T, masked: bool) -> Self {
        Self {
            pixels: Array2::zeros((size, size)),
            extent,
            masked,
        }
    }

    /// Builds an image by evaluating `f` at every pixel center; pixels
    /// outside the inscribed circle are zeroed when `masked`.
    pub fn from_fn(size: usize, extent: T, masked: bool, mut f: impl FnMut(Point<T>) -> T) -> Self {
        let mut img = Self::zeros(size, extent, masked);
        for row in 0..size {
            for col in 0..size {
                let p = img.pixel_center(row, col);
                if !masked || img.in_support(p) {
                    img.pixels[[row, col]] = f(p);
                }
            }
        }
        img
    }

    pub fn from_pixels(pixels: Array2<T>, extent: T, masked: bool) -> Result<Self, RasterError> {
        if pixels.nrows() != pixels.ncols() {
            return Err(RasterError::SizeMismatch(format!(
                "pixels must be square, got {}x{}",
                pixels.nrows(),
                pixels.ncols()
            )));
        }
        let mut img = Self { pixels, extent, masked };
        if masked {
            img.apply_mask();
        }
        Ok(img)
    }

    pub fn size(&self) -> usize {
        self.pixels.nrows()
    }

    pub fn extent(&self) -> T {
        self.extent
    }

    pub fn masked(&self) -> bool {
        self.masked
    }

    pub fn pixels(&self) -> &Array2<T> {
        &self.pixels
    }

    pub fn pixel_pitch(&self) -> T {
        T::lit(2.0) * self.extent / T::from_count(self.size())
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.pixels[[row, col]]
    }

    pub fn pixel_center(&self, row: usize, col: usize) -> Point<T> {
        let h = self.pixel_pitch();
        let half = T::lit(0.5);
        Point::new(
            -self.extent + (T::from_count(col) + half) * h,
            self.extent - (T::from_count(row) + half) * h,
        )
    }

    /// Pixel containing `p`, if inside the frame.
    pub fn pixel_at(&self, p: Point<T>) -> Option<(usize, usize)> {
        let h = self.pixel_pitch();
        let col = ((p.x + self.extent) / h).floor();
        let row = ((self.extent - p.y) / h).floor();
        let n = T::from_count(self.size());
        if col < T::zero() || row < T::zero() || col >= n || row >= n {
            return None;
        }
        Some((row.to_usize()?, col.to_usize()?))
    }

    pub fn value_at(&self, p: Point<T>) -> Option<T> {
        self.pixel_at(p).map(|(r, c)| self.pixels[[r, c]])
    }

    /// Whether `p` lies in the inscribed circle.
    pub fn in_support(&self, p: Point<T>) -> bool {
        p.x * p.x + p.y * p.y <= self.extent * self.extent
    }

    /// Whether pixel `(row, col)` takes part in masked statistics.
    pub fn is_active(&self, row: usize, col: usize) -> bool {
        !self.masked || self.in_support(self.pixel_center(row, col))
    }

    /// Values of the active pixels in row-major order.
    pub fn active_values(&self) -> Vec<T> {
        self.indexed_active().map(|(_, _, v)| v).collect()
    }

    pub(crate) fn indexed_active(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.pixels
            .indexed_iter()
            .filter(move |((r, c), _)| self.is_active(*r, *c))
            .map(|((r, c), v)| (r, c, *v))
    }

    fn apply_mask(&mut self) {
        let n = self.size();
        for row in 0..n {
            for col in 0..n {
                if !self.in_support(self.pixel_center(row, col)) {
                    self.pixels[[row, col]] = T::zero();
                }
            }
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let mut out = Self {
            pixels: self.pixels.mapv(f),
            ..self.clone()
        };
        if out.masked {
            out.apply_mask();
        }
        out
    }

    pub fn scaled(&self, factor: T) -> Self {
        self.map(|v| v * factor)
    }

    pub fn min_max(&self) -> Option<(T, T)> {
        self.indexed_active().fold(None, |acc, (_, _, v)| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

/// Ground-truth image: each pixel center takes the conductivity `1/ρ` (or
/// resistivity `ρ`) of the material containing it; 0 outside the subject.
pub fn rasterize_target<T: Scalar>(
    phantom: &Phantom<T>,
    grid_size: usize,
    quantity: TargetQuantity,
) -> Result<RasterImage<T>, RasterError> {
    phantom.check()?;
    if grid_size < 2 {
        return Err(RasterError::InvalidGridSize(grid_size));
    }
    Ok(RasterImage::from_fn(
        grid_size,
        phantom.subject_radius,
        true,
        |p| match phantom.resistivity_at(p) {
            Some(rho) => match quantity {
                TargetQuantity::Conductivity => rho.recip(),
                TargetQuantity::Resistivity => rho,
            },
            None => T::zero(),
        },
    ))
}

/// Min-max rescaling of the active region to `[0, 1]`. A constant region
/// maps to 0.5.
pub fn normalize_image<T: Scalar>(img: &RasterImage<T>) -> RasterImage<T> {
    let Some((lo, hi)) = img.min_max() else {
        return img.clone();
    };
    let range = hi - lo;
    let mut out = img.clone();
    let n = img.size();
    for row in 0..n {
        for col in 0..n {
            if img.is_active(row, col) {
                let v = img.pixels[[row, col]];
                out.pixels[[row, col]] = if range > T::zero() {
                    (v - lo) / range
                } else {
                    T::lit(0.5)
                };
            }
        }
    }
    out
}

/// Comparison between two images over their shared active region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport<T> {
    pub rmse: T,
    pub pearson: T,
    /// Peak signal-to-noise ratio with peak 1; `+∞` for identical images.
    pub psnr: T,
}

/// Pearson correlation; 0 when either input is constant.
pub fn pearson<T: Scalar>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    if n == 0 {
        return T::zero();
    }
    let nf = T::from_count(n);
    let ma = a[..n].iter().copied().sum::<T>() / nf;
    let mb = b[..n].iter().copied().sum::<T>() / nf;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa <= T::zero() || sbb <= T::zero() {
        return T::zero();
    }
    (sab / (saa.sqrt() * sbb.sqrt())).max(-T::one()).min(T::one())
}

pub fn compare<T: Scalar>(a: &RasterImage<T>, b: &RasterImage<T>) -> Result<MetricsReport<T>, RasterError> {
    if a.size() != b.size() {
        return Err(RasterError::SizeMismatch(format!(
            "sizes {} and {}",
            a.size(),
            b.size()
        )));
    }
    let tol = T::lit(1e-12) * a.extent.abs().max(b.extent.abs());
    if (a.extent - b.extent).abs() > tol {
        return Err(RasterError::SizeMismatch(format!(
            "extents {} and {}",
            a.extent, b.extent
        )));
    }
    let n = a.size();
    let mut xs = Vec::with_capacity(n * n);
    let mut ys = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            if a.is_active(row, col) && b.is_active(row, col) {
                xs.push(a.pixels[[row, col]]);
                ys.push(b.pixels[[row, col]]);
            }
        }
    }
    let mse = if xs.is_empty() {
        T::zero()
    } else {
        xs.iter().zip(&ys).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>() / T::from_count(xs.len())
    };
    let psnr = if mse > T::zero() {
        -T::lit(10.0) * mse.log10()
    } else {
        T::infinity()
    };
    Ok(MetricsReport {
        rmse: mse.sqrt(),
        pearson: pearson(&xs, &ys),
        psnr,
    })
}
