//! Artifact writers: sinogram CSV, 16-bit PGM, 8-bit PNG preview.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use eit_fbp_core::{RasterImage64, Sinogram64};
use image::{GrayImage, Luma};

/// Header row of angles, then one row per slice. Values keep full double
/// precision.
pub fn write_sinogram_csv(path: &Path, sino: &Sinogram64) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["slice".to_string()];
    header.extend(sino.angles().iter().map(|a| format!("{a}")));
    w.write_record(&header)?;
    for (j, row) in sino.data().rows().into_iter().enumerate() {
        let mut record = vec![j.to_string()];
        record.extend(row.iter().map(|v| format!("{v:.17e}")));
        w.write_record(&record)?;
    }
    w.flush()
}

/// Maps active pixels linearly from `[lo, hi]` to `[0, 1]`; masked-out pixels
/// become 0.
pub fn display_levels(img: &RasterImage64, lo: f64, hi: f64) -> Vec<f64> {
    let n = img.size();
    let span = hi - lo;
    let mut out = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let level = if !img.is_active(row, col) {
                0.0
            } else if span > 0.0 {
                ((img.get(row, col) - lo) / span).clamp(0.0, 1.0)
            } else {
                0.5
            };
            out.push(level);
        }
    }
    out
}

/// Binary PGM (P5) with maxval 65535, big-endian samples, row 0 at the top.
pub fn write_pgm16(path: &Path, size: usize, levels: &[f64]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{size} {size}\n65535\n")?;
    for &v in levels {
        let sample = (v * 65535.0).round() as u16;
        w.write_all(&sample.to_be_bytes())?;
    }
    w.flush()
}

pub fn write_png8(path: &Path, size: usize, levels: &[f64]) -> io::Result<()> {
    let side = size as u32;
    let img = GrayImage::from_fn(side, side, |x, y| {
        Luma([(levels[y as usize * size + x as usize] * 255.0).round() as u8])
    });
    img.save(path).map_err(io::Error::other)
}

/// Writes `<stem>.pgm` and `<stem>.png` and returns both file names.
pub fn write_image_pair(dir: &Path, stem: &str, img: &RasterImage64, lo: f64, hi: f64) -> io::Result<[String; 2]> {
    let levels = display_levels(img, lo, hi);
    let pgm = format!("{stem}.pgm");
    let png = format!("{stem}.png");
    write_pgm16(&dir.join(&pgm), img.size(), &levels)?;
    if let Err(e) = write_png8(&dir.join(&png), img.size(), &levels) {
        let _ = std::fs::remove_file(dir.join(&pgm));
        return Err(e);
    }
    Ok([pgm, png])
}

#[cfg(test)]
mod tests {
    use super::*;
    use eit_fbp_core::{compute_sinogram, Phantom64, Quantity};

    #[test]
    fn pgm_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        write_pgm16(&path, 2, &[0.0, 1.0, 0.5, 0.25]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = b"P5\n2 2\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        let body: Vec<u16> = bytes[header.len()..]
            .chunks(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(body, vec![0, 65535, 32768, 16384]);
    }

    #[test]
    fn display_masks_and_clamps() {
        let img = RasterImage64::from_fn(4, 1.0, true, |p| p.x);
        let levels = display_levels(&img, -0.5, 0.5);
        assert_eq!(levels[0], 0.0);
        assert!(levels.iter().all(|v| (0.0..=1.0).contains(v)));
        let flat = display_levels(&img, 0.2, 0.2);
        assert_eq!(flat[5], 0.5);
    }

    #[test]
    fn csv_round_trips_values() {
        let p = Phantom64::homogeneous(4.0, 0.5, 1.0, 1.0);
        let sino = compute_sinogram(&p, 45.0, Quantity::Conductance).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_sinogram_csv(&path, &sino).unwrap();
        let mut r = csv::Reader::from_path(&path).unwrap();
        let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, ["slice", "0", "45", "90", "135"]);
        for (j, rec) in r.records().enumerate() {
            let rec = rec.unwrap();
            for a in 0..4 {
                let v: f64 = rec[a + 1].parse().unwrap();
                assert_eq!(v, sino.value(j, a));
            }
        }
    }
}
