//! Dataset manifests, CSV ingestion, and run configuration.
//!
//! Data lives in plain CSV files (one row per observation), described by a
//! small JSON manifest. The manifest exists because functional data needs
//! grid metadata a CSV cannot carry: a curve component names its grid
//! explicitly and the file's columns are values at those grid points, in
//! order.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{Grid, HilbertPoint, Sample};
use crate::kernels::{KernelChoice, KernelSpec};
use crate::simulate::Scenario;
use crate::weights::WeightFamily;

/// Manifest format version this build understands.
pub const MANIFEST_VERSION: u32 = 1;

/// One side of a paired dataset: either vectors of a fixed dimension or
/// curves sampled on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentSpec {
    Vector { path: PathBuf, dimension: usize },
    Curve { path: PathBuf, grid: Vec<f64> },
}

impl ComponentSpec {
    fn path_mut(&mut self) -> &mut PathBuf {
        match self {
            Self::Vector { path, .. } | Self::Curve { path, .. } => path,
        }
    }
}

/// Description of a paired dataset on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u32,
    pub x: ComponentSpec,
    pub y: ComponentSpec,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default)]
    pub has_header: bool,
}

fn default_delimiter() -> char {
    ','
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Reads a manifest and resolves its data paths relative to the manifest's
/// own directory, so a dataset directory can be moved as a unit.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = read_file(path)?;
    let mut manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
    if manifest.version != MANIFEST_VERSION {
        return Err(Error::InvalidParameter(format!(
            "manifest version {} is not supported (expected {MANIFEST_VERSION})",
            manifest.version
        )));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for component in [&mut manifest.x, &mut manifest.y] {
        let p = component.path_mut();
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(manifest)
}

/// Loads both CSV files named by the manifest into a [`Sample`].
///
/// Every cell must parse as a finite number; failures carry the 1-based data
/// row and column. A vector file must have exactly `dimension` columns and a
/// curve file exactly as many columns as grid points.
pub fn load_sample(manifest: &DatasetManifest) -> Result<Sample> {
    let delimiter = delimiter_byte(manifest.delimiter)?;
    let xs = load_component(&manifest.x, delimiter, manifest.has_header)?;
    let ys = load_component(&manifest.y, delimiter, manifest.has_header)?;
    if xs.len() != ys.len() {
        return Err(Error::RowCountMismatch {
            x_rows: xs.len(),
            y_rows: ys.len(),
        });
    }
    Sample::new(xs, ys)
}

fn delimiter_byte(delimiter: char) -> Result<u8> {
    u8::try_from(delimiter).map_err(|_| {
        Error::InvalidParameter(format!(
            "delimiter {delimiter:?} is not a single-byte character"
        ))
    })
}

fn load_component(
    spec: &ComponentSpec,
    delimiter: u8,
    has_header: bool,
) -> Result<Vec<HilbertPoint>> {
    match spec {
        ComponentSpec::Vector { path, dimension } => {
            if *dimension == 0 {
                return Err(Error::InvalidParameter(format!(
                    "vector component {} declares dimension 0",
                    path.display()
                )));
            }
            let rows = read_numeric_csv(path, delimiter, has_header)?;
            rows.into_iter()
                .enumerate()
                .map(|(i, row)| {
                    if row.len() != *dimension {
                        return Err(Error::ShapeMismatch(format!(
                            "{}: row {} has {} columns, expected dimension {}",
                            path.display(),
                            i + 1,
                            row.len(),
                            dimension
                        )));
                    }
                    HilbertPoint::vector(row)
                })
                .collect()
        }
        ComponentSpec::Curve { path, grid } => {
            let grid = Arc::new(Grid::new(grid.clone())?);
            let rows = read_numeric_csv(path, delimiter, has_header)?;
            rows.into_iter()
                .enumerate()
                .map(|(i, row)| {
                    if row.len() != grid.len() {
                        return Err(Error::GridViolation(format!(
                            "{}: row {} has {} columns, expected one per grid point ({})",
                            path.display(),
                            i + 1,
                            row.len(),
                            grid.len()
                        )));
                    }
                    HilbertPoint::curve(row, Arc::clone(&grid))
                })
                .collect()
        }
    }
}

/// Reads a CSV file of finite numbers. Row numbers in errors count data rows
/// from 1, after any header.
fn read_numeric_csv(path: &Path, delimiter: u8, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(std::io::Error::new(
                io.kind(),
                format!("{}: {io}", path.display()),
            )),
            other => Error::Parse {
                path: path.display().to_string(),
                row: 0,
                column: 0,
                message: format!("{other:?}"),
            },
        })?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            row: i + 1,
            column: 0,
            message: e.to_string(),
        })?;
        let mut row = Vec::with_capacity(record.len());
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                row: i + 1,
                column: j + 1,
                message: format!("{field:?} is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    row: i + 1,
                    column: j + 1,
                    message: format!("{field:?} is not finite"),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

// =============================================================================
// Run configuration
// =============================================================================

/// Bandwidth choice in a config file: the string `"median"` or a positive
/// number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaConfig {
    Fixed(f64),
    Named(String),
}

impl Default for OmegaConfig {
    fn default() -> Self {
        Self::Named("median".to_string())
    }
}

/// Kernel section of a config file. The linear kernel is unbounded, which
/// the test's conditions exclude; it must be opted into explicitly and is
/// meant only for cross-checking small analytic cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelConfig {
    Gaussian {
        #[serde(default)]
        omega: OmegaConfig,
    },
    Linear {
        #[serde(default)]
        allow_unbounded: bool,
    },
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self::Gaussian {
            omega: OmegaConfig::default(),
        }
    }
}

impl KernelConfig {
    pub fn to_kernel_choice(&self) -> Result<KernelChoice> {
        match self {
            Self::Gaussian { omega } => match omega {
                OmegaConfig::Named(name) if name == "median" => Ok(KernelChoice::GaussianMedian),
                OmegaConfig::Named(name) => Err(Error::InvalidParameter(format!(
                    "unknown omega {name:?}; use \"median\" or a positive number"
                ))),
                OmegaConfig::Fixed(omega) => {
                    // KernelSpec::gaussian rejects bad bandwidths.
                    KernelSpec::gaussian(*omega)?;
                    Ok(KernelChoice::Gaussian { omega: *omega })
                }
            },
            Self::Linear { allow_unbounded } => {
                if *allow_unbounded {
                    Ok(KernelChoice::Linear)
                } else {
                    Err(Error::UnboundedKernel)
                }
            }
        }
    }
}

/// Weight section of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            family: "alternating".to_string(),
            gamma: Some(0.5),
        }
    }
}

impl WeightConfig {
    pub fn to_weight_family(&self) -> Result<WeightFamily> {
        let gamma = self.gamma.unwrap_or(0.5);
        match self.family.as_str() {
            "alternating" => WeightFamily::alternating(gamma),
            "sinusoidal" => WeightFamily::sinusoidal(gamma),
            "constant_one" => Ok(WeightFamily::ConstantOne),
            other => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }
}

/// Everything a run needs besides the data: kernel, weights, level, and
/// optional seed/output overrides. Defaults: Gaussian kernel with median
/// bandwidth, alternating weights with γ = 0.5, α = 0.05.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub weights: WeightConfig,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_alpha() -> f64 {
    0.05
}

impl Default for RunConfig {
    fn default() -> Self {
        // Identical to deserializing "{}": every field takes its serde default.
        Self {
            kernel: KernelConfig::default(),
            weights: WeightConfig::default(),
            alpha: default_alpha(),
            seed: None,
            output: None,
        }
    }
}

impl RunConfig {
    /// Checks every field eagerly so config errors surface before any data
    /// is read.
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::OutOfRange(format!(
                "alpha must lie strictly in (0, 1), got {}",
                self.alpha
            )));
        }
        self.kernel.to_kernel_choice()?;
        self.weights.to_weight_family()?;
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = read_file(path)?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}
