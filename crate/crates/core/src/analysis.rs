//! Blob localization on reconstructed images.

use crate::phantom::Point;
use crate::raster::RasterImage;
use crate::scalar::Scalar;

/// Selection of active pixels whose value is at or above the `q` quantile
/// of the active values (`q = 0.9` is the top decile).
pub fn quantile_selection<T: Scalar>(img: &RasterImage<T>, q: f64) -> Vec<bool> {
    let mut values = img.active_values();
    let n = img.size();
    if values.is_empty() {
        return vec![false; n * n];
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let keep = (((1.0 - q.clamp(0.0, 1.0)) * values.len() as f64).ceil() as usize).clamp(1, values.len());
    let threshold = values[values.len() - keep];
    let mut sel = vec![false; n * n];
    for row in 0..n {
        for col in 0..n {
            sel[row * n + col] = img.is_active(row, col) && img.get(row, col) >= threshold;
        }
    }
    sel
}

pub fn top_decile<T: Scalar>(img: &RasterImage<T>) -> Vec<bool> {
    quantile_selection(img, 0.9)
}

/// Unweighted centroid of the selected pixel centers.
pub fn centroid<T: Scalar>(img: &RasterImage<T>, selection: &[bool]) -> Option<Point<T>> {
    let n = img.size();
    let (mut sx, mut sy, mut count) = (T::zero(), T::zero(), 0usize);
    for (i, _) in selection.iter().enumerate().filter(|(_, s)| **s) {
        let p = img.pixel_center(i / n, i % n);
        sx = sx + p.x;
        sy = sy + p.y;
        count += 1;
    }
    if count == 0 {
        return None;
    }
    let c = T::from_count(count);
    Some(Point::new(sx / c, sy / c))
}

pub fn top_decile_centroid<T: Scalar>(img: &RasterImage<T>) -> Option<Point<T>> {
    centroid(img, &top_decile(img))
}

/// A 4-connected component of a pixel selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Blob<T> {
    pub pixels: Vec<(usize, usize)>,
    pub centroid: Point<T>,
}

/// Connected components of `selection`, largest first.
pub fn blobs<T: Scalar>(img: &RasterImage<T>, selection: &[bool]) -> Vec<Blob<T>> {
    let n = img.size();
    let mut seen = vec![false; n * n];
    let mut out = Vec::new();
    for start in 0..n * n {
        if !selection[start] || seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            let (r, c) = (i / n, i % n);
            pixels.push((r, c));
            let mut visit = |j: usize| {
                if selection[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if r > 0 {
                visit(i - n);
            }
            if r + 1 < n {
                visit(i + n);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < n {
                visit(i + 1);
            }
        }
        let mut mask = vec![false; n * n];
        for &(r, c) in &pixels {
            mask[r * n + c] = true;
        }
        let centroid = centroid(img, &mask).expect("non-empty component");
        out.push(Blob { pixels, centroid });
    }
    out.sort_by_key(|b| std::cmp::Reverse(b.pixels.len()));
    out
}

/// Mean over active pixels whose center satisfies `inside`.
pub fn region_mean<T: Scalar>(img: &RasterImage<T>, inside: impl Fn(Point<T>) -> bool) -> Option<T> {
    let (mut sum, mut count) = (T::zero(), 0usize);
    let n = img.size();
    for row in 0..n {
        for col in 0..n {
            if img.is_active(row, col) && inside(img.pixel_center(row, col)) {
                sum = sum + img.get(row, col);
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / T::from_count(count))
}

/// Mean and population standard deviation over a region.
pub fn region_stats<T: Scalar>(img: &RasterImage<T>, inside: impl Fn(Point<T>) -> bool) -> Option<(T, T)> {
    let n = img.size();
    let values: Vec<T> = (0..n * n)
        .map(|i| (i / n, i % n))
        .filter(|&(r, c)| img.is_active(r, c) && inside(img.pixel_center(r, c)))
        .map(|(r, c)| img.get(r, c))
        .collect();
    if values.is_empty() {
        return None;
    }
    let k = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / k;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / k;
    Some((mean, var.sqrt()))
}
