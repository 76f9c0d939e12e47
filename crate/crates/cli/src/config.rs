//! JSON run configuration. Keys carry their units: millimetres, ohm-metres
//! and degrees.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use eit_fbp_core::projector::angle_sweep;
use eit_fbp_core::{Circle64, Error as CoreError, FilterKind, InterpKind, Phantom64, Quantity, ReconConfig, SliceRule};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(#[from] CoreError),
    #[error("invalid config: {0}")]
    Rule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityName {
    Conductance,
    AvgConductivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterName {
    RamLak,
    SheppLogan,
    Cosine,
    Hamming,
    Hann,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpName {
    Nearest,
    Linear,
    Spline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleName {
    StripMean,
    ChordAverage,
}

/// Artifacts a run may write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    SinogramCsv,
    TargetImage,
    ReconImages,
    MetricsJson,
}

impl Emit {
    pub const ALL: [Emit; 4] = [
        Emit::SinogramCsv,
        Emit::TargetImage,
        Emit::ReconImages,
        Emit::MetricsJson,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationFile {
    pub center_x_mm: f64,
    pub center_y_mm: f64,
    pub radius_mm: f64,
    pub resistivity_ohm_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhantomFile {
    pub subject_radius_mm: f64,
    pub subject_resistivity_ohm_m: f64,
    pub depth_mm: f64,
    pub slice_width_mm: f64,
    #[serde(default)]
    pub perturbations: Vec<PerturbationFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconEntry {
    pub filter: FilterName,
    pub interpolation: InterpName,
    pub grid_size: usize,
    #[serde(default = "yes")]
    pub normalize: bool,
}

/// Cartesian product of filters and interpolations sharing one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconMatrix {
    pub filters: Vec<FilterName>,
    pub interpolations: Vec<InterpName>,
    pub grid_size: usize,
    #[serde(default = "yes")]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReconSpec {
    List(Vec<ReconEntry>),
    Matrix(ReconMatrix),
}

fn yes() -> bool {
    true
}

fn all_emits() -> Vec<Emit> {
    Emit::ALL.to_vec()
}

/// The file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub phantom: PhantomFile,
    pub angle_step_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_rule: Option<RuleName>,
    pub quantities: Vec<QuantityName>,
    pub recon: ReconSpec,
    pub output_dir: PathBuf,
    #[serde(default = "all_emits")]
    pub emit: Vec<Emit>,
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub phantom: Phantom64,
    pub angle_step: f64,
    pub slice_rule: SliceRule,
    pub quantities: Vec<Quantity>,
    pub recon: Vec<ReconConfig>,
    pub output_dir: PathBuf,
    pub emit: Vec<Emit>,
}

impl From<QuantityName> for Quantity {
    fn from(q: QuantityName) -> Self {
        match q {
            QuantityName::Conductance => Quantity::Conductance,
            QuantityName::AvgConductivity => Quantity::AvgConductivity,
        }
    }
}

impl From<Quantity> for QuantityName {
    fn from(q: Quantity) -> Self {
        match q {
            Quantity::Conductance => QuantityName::Conductance,
            Quantity::AvgConductivity => QuantityName::AvgConductivity,
        }
    }
}

impl From<FilterName> for FilterKind {
    fn from(f: FilterName) -> Self {
        match f {
            FilterName::RamLak => FilterKind::RamLak,
            FilterName::SheppLogan => FilterKind::SheppLogan,
            FilterName::Cosine => FilterKind::Cosine,
            FilterName::Hamming => FilterKind::Hamming,
            FilterName::Hann => FilterKind::Hann,
            FilterName::None => FilterKind::None,
        }
    }
}

impl From<FilterKind> for FilterName {
    fn from(f: FilterKind) -> Self {
        match f {
            FilterKind::RamLak => FilterName::RamLak,
            FilterKind::SheppLogan => FilterName::SheppLogan,
            FilterKind::Cosine => FilterName::Cosine,
            FilterKind::Hamming => FilterName::Hamming,
            FilterKind::Hann => FilterName::Hann,
            FilterKind::None => FilterName::None,
        }
    }
}

impl From<InterpName> for InterpKind {
    fn from(i: InterpName) -> Self {
        match i {
            InterpName::Nearest => InterpKind::Nearest,
            InterpName::Linear => InterpKind::Linear,
            InterpName::Spline => InterpKind::Spline,
        }
    }
}

impl From<InterpKind> for InterpName {
    fn from(i: InterpKind) -> Self {
        match i {
            InterpKind::Nearest => InterpName::Nearest,
            InterpKind::Linear => InterpName::Linear,
            InterpKind::Spline => InterpName::Spline,
        }
    }
}

impl From<RuleName> for SliceRule {
    fn from(r: RuleName) -> Self {
        match r {
            RuleName::StripMean => SliceRule::StripMean,
            RuleName::ChordAverage => SliceRule::ChordAverage,
        }
    }
}

impl From<SliceRule> for RuleName {
    fn from(r: SliceRule) -> Self {
        match r {
            SliceRule::StripMean => RuleName::StripMean,
            SliceRule::ChordAverage => RuleName::ChordAverage,
        }
    }
}

impl ReconSpec {
    fn expand(&self) -> Vec<ReconConfig> {
        match self {
            ReconSpec::List(entries) => entries
                .iter()
                .map(|e| ReconConfig {
                    filter: e.filter.into(),
                    interp: e.interpolation.into(),
                    grid_size: e.grid_size,
                    normalize: e.normalize,
                })
                .collect(),
            ReconSpec::Matrix(m) => m
                .interpolations
                .iter()
                .flat_map(|&i| {
                    m.filters.iter().map(move |&f| ReconConfig {
                        filter: f.into(),
                        interp: i.into(),
                        grid_size: m.grid_size,
                        normalize: m.normalize,
                    })
                })
                .collect(),
        }
    }
}

impl ConfigFile {
    pub fn validate(&self) -> Result<RunConfig, ConfigError> {
        let p = &self.phantom;
        let phantom = p
            .perturbations
            .iter()
            .fold(
                Phantom64::homogeneous(
                    p.subject_radius_mm,
                    p.subject_resistivity_ohm_m,
                    p.depth_mm,
                    p.slice_width_mm,
                ),
                |acc, c| {
                    acc.with_perturbation(Circle64::new(
                        c.center_x_mm,
                        c.center_y_mm,
                        c.radius_mm,
                        c.resistivity_ohm_m,
                    ))
                },
            )
            .validate()
            .map_err(CoreError::from)?;
        angle_sweep(self.angle_step_deg).map_err(CoreError::from)?;

        let quantities = dedup(self.quantities.iter().map(|&q| Quantity::from(q)));
        if quantities.is_empty() {
            return Err(ConfigError::Rule("at least one quantity is required".into()));
        }
        let recon = self.recon.expand();
        if recon.is_empty() {
            return Err(ConfigError::Rule("at least one reconstruction is required".into()));
        }
        let mut seen = HashSet::new();
        for r in &recon {
            r.validate().map_err(CoreError::from)?;
            if !seen.insert(*r) {
                return Err(ConfigError::Rule(format!(
                    "reconstruction {}/{} at grid {} listed twice",
                    r.filter.tag(),
                    r.interp.tag(),
                    r.grid_size
                )));
            }
        }

        Ok(RunConfig {
            phantom,
            angle_step: self.angle_step_deg,
            slice_rule: self.slice_rule.map(Into::into).unwrap_or_default(),
            quantities,
            recon,
            output_dir: self.output_dir.clone(),
            emit: dedup(self.emit.iter().copied()),
        })
    }
}

fn dedup<T: Eq + std::hash::Hash + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut seen = HashSet::new();
    items.filter(|x| seen.insert(*x)).collect()
}

impl RunConfig {
    /// The on-disk form of this config. Reconstructions are listed one by one.
    pub fn to_file(&self) -> ConfigFile {
        let p = &self.phantom;
        ConfigFile {
            phantom: PhantomFile {
                subject_radius_mm: p.subject_radius,
                subject_resistivity_ohm_m: p.subject_resistivity,
                depth_mm: p.depth,
                slice_width_mm: p.slice_width,
                perturbations: p
                    .perturbations
                    .iter()
                    .map(|c| PerturbationFile {
                        center_x_mm: c.center_x,
                        center_y_mm: c.center_y,
                        radius_mm: c.radius,
                        resistivity_ohm_m: c.resistivity,
                    })
                    .collect(),
            },
            angle_step_deg: self.angle_step,
            slice_rule: Some(self.slice_rule.into()),
            quantities: self.quantities.iter().map(|&q| q.into()).collect(),
            recon: ReconSpec::List(
                self.recon
                    .iter()
                    .map(|r| ReconEntry {
                        filter: r.filter.into(),
                        interpolation: r.interp.into(),
                        grid_size: r.grid_size,
                        normalize: r.normalize,
                    })
                    .collect(),
            ),
            output_dir: self.output_dir.clone(),
            emit: self.emit.clone(),
        }
    }

    pub fn emits(&self, what: Emit) -> bool {
        self.emit.contains(&what)
    }

    pub fn with_grid(mut self, grid_size: usize) -> Result<Self, ConfigError> {
        for r in &mut self.recon {
            r.grid_size = grid_size;
        }
        let unique: HashSet<_> = self.recon.iter().collect();
        if unique.len() != self.recon.len() {
            return Err(ConfigError::Rule("grid override makes reconstructions collide".into()));
        }
        for r in &self.recon {
            r.validate().map_err(CoreError::from)?;
        }
        Ok(self)
    }
}

pub fn parse_str(text: &str, path: &Path) -> Result<RunConfig, ConfigError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.validate()
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_str(&text, path)
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} perturbation(s), {} slices, {} angles, {} quantity(ies), {} reconstruction(s)",
            self.phantom.perturbations.len(),
            (2.0 * self.phantom.subject_radius / self.phantom.slice_width).floor(),
            angle_sweep(self.angle_step).map(|a| a.len()).unwrap_or(0),
            self.quantities.len(),
            self.recon.len()
        )
    }
}
