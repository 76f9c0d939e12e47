//! Forward projection, reconstruction, comparison and artifact output for one
//! validated config.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use eit_fbp_core::{
    compare, normalize_image, rasterize_target, reconstruct, Error as CoreError, Projector, Quantity, RasterImage64,
    ReconConfig, Sinogram64, TargetQuantity,
};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::config::{ConfigFile, Emit, FilterName, InterpName, QuantityName, RunConfig};
use crate::output::{write_image_pair, write_sinogram_csv};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub quiet: bool,
}

fn finite_or_tag<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SinogramRecord {
    pub quantity: QuantityName,
    pub slices: usize,
    pub angles: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconRecord {
    pub quantity: QuantityName,
    pub filter: FilterName,
    pub interpolation: InterpName,
    pub grid_size: usize,
    pub normalize: bool,
    pub images: Vec<String>,
    #[serde(serialize_with = "finite_or_tag")]
    pub rmse: f64,
    #[serde(serialize_with = "finite_or_tag")]
    pub pearson: f64,
    #[serde(serialize_with = "finite_or_tag")]
    pub psnr: f64,
    /// Raw values mapped to black and white in the written images.
    pub display_min: f64,
    pub display_max: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ConfigFile,
    pub target_images: Vec<String>,
    pub sinograms: Vec<SinogramRecord>,
    pub reconstructions: Vec<ReconRecord>,
    pub total_ms: f64,
}

/// Files written so far, deleted again if the run fails.
struct Written {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
}

impl Written {
    fn open(dir: &Path) -> Result<Self, RunError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            files: Vec::new(),
        })
    }

    fn add(&mut self, names: impl IntoIterator<Item = String>) {
        self.files.extend(names.into_iter().map(|n| self.dir.join(n)));
    }

    fn io<T>(&self, name: &str, r: std::io::Result<T>) -> Result<T, RunError> {
        r.map_err(|source| RunError::Io {
            path: self.dir.join(name),
            source,
        })
    }

    fn rollback(self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn image_stem(quantity: Quantity, r: &ReconConfig, grid_suffix: bool) -> String {
    let mut stem = format!("{}_{}_{}", quantity.tag(), r.filter.tag(), r.interp.tag());
    if !r.normalize {
        stem.push_str("_raw");
    }
    if grid_suffix {
        stem.push_str(&format!("_{}", r.grid_size));
    }
    stem
}

fn target_stem(grid: usize, grid_suffix: bool) -> String {
    if grid_suffix {
        format!("target_{grid}")
    } else {
        "target".into()
    }
}

pub fn run_pipeline(config: &RunConfig, options: RunOptions) -> Result<RunReport, RunError> {
    let mut written = Written::open(&config.output_dir)?;
    match run_inner(config, options, &mut written) {
        Ok(report) => Ok(report),
        Err(e) => {
            written.rollback();
            Err(e)
        }
    }
}

fn run_inner(config: &RunConfig, options: RunOptions, written: &mut Written) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let log = |msg: String| {
        if !options.quiet {
            eprintln!("{msg}");
        }
    };
    let dir = config.output_dir.clone();
    let grids: BTreeSet<usize> = config.recon.iter().map(|r| r.grid_size).collect();
    let grid_suffix = grids.len() > 1;

    let mut targets = Vec::new();
    let mut target_images = Vec::new();
    for &n in &grids {
        let target = normalize_image(
            &rasterize_target(&config.phantom, n, TargetQuantity::Conductivity).map_err(CoreError::from)?,
        );
        if config.emits(Emit::TargetImage) {
            let stem = target_stem(n, grid_suffix);
            let names = written.io(&stem, write_image_pair(&dir, &stem, &target, 0.0, 1.0))?;
            written.add(names.clone());
            target_images.extend(names);
        }
        targets.push((n, target));
    }
    let target_for = |n: usize| {
        &targets
            .iter()
            .find(|(g, _)| *g == n)
            .expect("target rasterized per grid")
            .1
    };

    let projector = Projector::new(&config.phantom)
        .map_err(CoreError::from)?
        .with_rule(config.slice_rule);
    let mut sinograms = Vec::new();
    let mut reconstructions = Vec::new();
    for &quantity in &config.quantities {
        let t = Instant::now();
        let sino: Sinogram64 = projector
            .sinogram(config.angle_step, quantity)
            .map_err(CoreError::from)?;
        let mut file = None;
        if config.emits(Emit::SinogramCsv) {
            let name = format!("sinogram_{}.csv", quantity.tag());
            written.io(&name, write_sinogram_csv(&dir.join(&name), &sino))?;
            written.add([name.clone()]);
            file = Some(name);
        }
        log(format!(
            "{}: {} slices x {} angles",
            quantity.tag(),
            sino.n_slices(),
            sino.n_angles()
        ));
        sinograms.push(SinogramRecord {
            quantity: quantity.into(),
            slices: sino.n_slices(),
            angles: sino.n_angles(),
            file,
            elapsed_ms: ms(t),
        });

        let results: Vec<Result<(ReconRecord, Vec<String>), RunError>> = config
            .recon
            .par_iter()
            .map(|r| {
                let t = Instant::now();
                let img: RasterImage64 = reconstruct(&sino, r).map_err(CoreError::from)?;
                let (lo, hi) = if r.normalize {
                    (0.0, 1.0)
                } else {
                    img.min_max().unwrap_or((0.0, 0.0))
                };
                let metrics = compare(target_for(r.grid_size), &normalize_image(&img)).map_err(CoreError::from)?;
                let stem = image_stem(quantity, r, grid_suffix);
                let images = if config.emits(Emit::ReconImages) {
                    write_image_pair(&dir, &stem, &img, lo, hi)
                        .map_err(|source| RunError::Io {
                            path: dir.join(&stem),
                            source,
                        })?
                        .to_vec()
                } else {
                    Vec::new()
                };
                let record = ReconRecord {
                    quantity: quantity.into(),
                    filter: r.filter.into(),
                    interpolation: r.interp.into(),
                    grid_size: r.grid_size,
                    normalize: r.normalize,
                    images: images.clone(),
                    rmse: metrics.rmse,
                    pearson: metrics.pearson,
                    psnr: metrics.psnr,
                    display_min: lo,
                    display_max: hi,
                    elapsed_ms: ms(t),
                };
                Ok((record, images))
            })
            .collect();
        let mut first_error = None;
        for res in results {
            match res {
                Ok((record, images)) => {
                    written.add(images);
                    log(format!(
                        "  {} pearson {:.4} rmse {:.4}",
                        image_stem(quantity, &to_recon(&record), grid_suffix),
                        record.pearson,
                        record.rmse
                    ));
                    reconstructions.push(record);
                }
                Err(e) => first_error = first_error.or(Some(e)),
            }
        }
        if let Some(e) = first_error {
            return Err(e);
        }
    }

    let mut report = RunReport {
        config: config.to_file(),
        target_images,
        sinograms,
        reconstructions,
        total_ms: 0.0,
    };
    report.total_ms = ms(start);
    if config.emits(Emit::MetricsJson) {
        let name = "metrics.json";
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        written.io(name, fs::write(dir.join(name), text + "\n"))?;
        written.add([name.to_string()]);
    }
    log(format!("wrote {} file(s) to {}", written.files.len(), dir.display()));
    Ok(report)
}

fn to_recon(r: &ReconRecord) -> ReconConfig {
    ReconConfig {
        filter: r.filter.into(),
        interp: r.interpolation.into(),
        grid_size: r.grid_size,
        normalize: r.normalize,
    }
}
