//! JSON-facing configuration types and field file I/O.
//!
//! Every deserializable type rejects unknown keys, so a typo in a config
//! file fails loudly instead of silently running a different experiment.
//! Fields on disk are a JSON header next to a flat little-endian `f64`
//! binary payload, so other tools can read them without this crate.

use crate::error::{Error, Result};
use crate::field::{power_weight, FieldKind, SampledField};
use crate::maximal::MaximalMode;
use crate::verify::{
    default_t_grid, mixed_weak_report, weight_divergence_scan, VerificationReport,
};
use crate::young::YoungFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Serializable Young-function description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum YoungSpec {
    /// `Phi(t) = t`.
    Identity,
    /// `Phi(t) = t^p`, `p >= 1`.
    Power { p: f64 },
    /// `Phi(t) = t^r (1 + log^+ t)^delta`.
    LogPower { r: f64, delta: f64 },
    /// `t^q` below 1, `t^r log(e + log(e + t))^delta` above.
    LogLog { q: f64, r: f64, delta: f64 },
}

impl YoungSpec {
    pub fn build(&self) -> Result<YoungFunction> {
        match *self {
            YoungSpec::Identity => Ok(YoungFunction::identity()),
            YoungSpec::Power { p } => YoungFunction::power(p),
            YoungSpec::LogPower { r, delta } => YoungFunction::log_power(r, delta),
            YoungSpec::LogLog { q, r, delta } => YoungFunction::loglog(q, r, delta),
        }
    }
}

/// Serializable weight description, built at any requested resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Constant { value: f64 },
    /// `w(x) = |x|^alpha`, exact cell averages.
    Power { alpha: f64 },
    /// Cellwise power of another weight: `base(x)^exponent`.
    PowerOf { base: Box<WeightSpec>, exponent: f64 },
    /// Explicit cell values; only valid at the matching resolution.
    Cells { values: Vec<f64> },
}

impl WeightSpec {
    pub fn build(&self, n: u8, half_width: f64, cells: usize) -> Result<SampledField> {
        match self {
            WeightSpec::Constant { value } => {
                SampledField::constant(n, half_width, cells, FieldKind::Weight, *value)
            }
            WeightSpec::Power { alpha } => power_weight(*alpha, n, half_width, cells),
            WeightSpec::PowerOf { base, exponent } => {
                let b = base.build(n, half_width, cells)?;
                b.map(FieldKind::Weight, |x| x.powf(*exponent))
            }
            WeightSpec::Cells { values } => {
                SampledField::new(n, half_width, cells, FieldKind::Weight, values.clone())
            }
        }
    }

    /// Whether this description can be rebuilt at other resolutions (needed
    /// for the refinement divergence scan).
    pub fn rebuildable(&self) -> bool {
        match self {
            WeightSpec::Cells { .. } => false,
            WeightSpec::PowerOf { base, .. } => base.rebuildable(),
            _ => true,
        }
    }
}

/// Serializable data-function description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Constant { value: f64 },
    /// Indicator of the box `[low, low + side)^n`, snapped to cells.
    Indicator { low: Vec<f64>, side: f64 },
    Cells { values: Vec<f64> },
    /// Sparse random field: each cell nonzero with probability `density`,
    /// uniform in `[0, amplitude)`. Uses the run seed.
    RandomSparse { density: f64, amplitude: f64 },
}

impl FieldSpec {
    pub fn build(&self, n: u8, half_width: f64, cells: usize, seed: u64) -> Result<SampledField> {
        match self {
            FieldSpec::Constant { value } => {
                SampledField::constant(n, half_width, cells, FieldKind::Function, *value)
            }
            FieldSpec::Indicator { low, side } => {
                SampledField::indicator(n, half_width, cells, low, *side)
            }
            FieldSpec::Cells { values } => {
                SampledField::new(n, half_width, cells, FieldKind::Function, values.clone())
            }
            FieldSpec::RandomSparse { density, amplitude } => {
                if !(0.0..=1.0).contains(density) || !(*amplitude > 0.0) {
                    return Err(Error::Config(
                        "f.density must lie in [0,1] and f.amplitude must be positive".into(),
                    ));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let count = if n == 2 { cells * cells } else { cells };
                let values = (0..count)
                    .map(|_| {
                        if rng.gen::<f64>() < *density {
                            rng.gen_range(0.0..*amplitude)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                SampledField::new(n, half_width, cells, FieldKind::Function, values)
            }
        }
    }
}

fn default_dim() -> u8 {
    1
}
fn default_t_points() -> usize {
    40
}
fn default_a() -> f64 {
    4.0
}
fn default_seed() -> u64 {
    0
}

/// Maximal-transform route selector for configs.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Auto,
    UncenteredHl,
    DyadicMax,
    Inflated,
}

/// Full description of one verification run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Box half-width `L`; the domain is `[-L, L]^n`.
    pub half_width: f64,
    /// Cells per axis (power of two).
    pub cells: usize,
    #[serde(default = "default_dim")]
    pub dim: u8,
    pub u: WeightSpec,
    pub v: WeightSpec,
    pub r: f64,
    pub phi: YoungSpec,
    pub f: FieldSpec,
    #[serde(default = "default_t_points")]
    pub t_points: usize,
    /// Optional explicit threshold range; defaults to
    /// `[0.01, 100] * sup|f|`.
    #[serde(default)]
    pub t_range: Option<(f64, f64)>,
    /// Layer base for decompositions and claims.
    #[serde(default = "default_a")]
    pub a: f64,
    /// Principal-cube exponent; defaults to half the fitted surplus.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub mode: ModeSpec,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0) {
            return Err(Error::Config("half_width must be positive".into()));
        }
        if self.cells < 4 || !self.cells.is_power_of_two() {
            return Err(Error::Config("cells must be a power of two, at least 4".into()));
        }
        if !(1..=2).contains(&self.dim) {
            return Err(Error::Config("dim must be 1 or 2".into()));
        }
        if !(self.r >= 1.0) {
            return Err(Error::Config(format!("r must be >= 1, got {}", self.r)));
        }
        if self.t_points < 2 {
            return Err(Error::Config("t_points must be at least 2".into()));
        }
        if let Some((lo, hi)) = self.t_range {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::Config("t_range must satisfy 0 < lo < hi".into()));
            }
        }
        if !(self.a > 2.0f64.powi(self.dim as i32)) {
            return Err(Error::Config(format!(
                "layer base a must exceed 2^dim, got {}",
                self.a
            )));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn t_grid(&self, f: &SampledField) -> Vec<f64> {
        match self.t_range {
            Some((lo, hi)) => crate::quad::log_grid(lo, hi, self.t_points),
            None => default_t_grid(f, self.t_points),
        }
    }

    pub fn maximal_mode(&self, phi: &YoungFunction) -> MaximalMode {
        match self.mode {
            ModeSpec::UncenteredHl => MaximalMode::UncenteredHl,
            ModeSpec::DyadicMax => MaximalMode::DyadicMax,
            ModeSpec::Inflated => MaximalMode::Inflated,
            ModeSpec::Auto => {
                if phi.is_identity() && self.dim == 1 {
                    MaximalMode::UncenteredHl
                } else {
                    MaximalMode::DyadicMax
                }
            }
        }
    }

    /// Builds the fields at the configured resolution (or an override, for
    /// resolution-doubling diagnostics).
    pub fn build_fields(
        &self,
        cells: usize,
    ) -> Result<(SampledField, SampledField, SampledField, YoungFunction)> {
        let u = self.u.build(self.dim, self.half_width, cells)?;
        let v = self.v.build(self.dim, self.half_width, cells)?;
        let f = self.f.build(self.dim, self.half_width, cells, self.seed)?;
        let phi = self.phi.build()?;
        Ok((u, v, f, phi))
    }

    /// Runs the full divergence scans (rebuilding weights natively at
    /// coarser resolutions where the description allows), then measures the
    /// sweep.
    pub fn run(&self) -> Result<VerificationReport> {
        self.validate()?;
        for (label, spec, exponent) in [
            ("u", &self.u, 1.0),
            ("v", &self.v, 1.0),
            ("v^r", &self.v, self.r),
        ] {
            if !spec.rebuildable() {
                continue;
            }
            let mut ladder = Vec::new();
            for shift in (0..3).rev() {
                let cells = self.cells >> shift;
                if cells < 4 {
                    continue;
                }
                let base = spec.build(self.dim, self.half_width, cells)?;
                ladder.push(if exponent == 1.0 {
                    base
                } else {
                    base.map(FieldKind::Weight, |x| x.powf(exponent))?
                });
            }
            weight_divergence_scan(&ladder, 1.0, label)?;
        }
        let (u, v, f, phi) = self.build_fields(self.cells)?;
        let t_grid = self.t_grid(&f);
        mixed_weak_report(
            &u,
            &v,
            self.r,
            &phi,
            &f,
            &t_grid,
            self.maximal_mode(&phi),
            self.seed,
        )
    }
}

/// Config of the Young-function check command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YoungCheckConfig {
    pub phi: YoungSpec,
    pub r: f64,
}

fn default_random_cubes() -> usize {
    200
}

/// Config of the weight-constants command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub half_width: f64,
    pub cells: usize,
    #[serde(default = "default_dim")]
    pub dim: u8,
    pub weight: WeightSpec,
    /// Muckenhoupt exponents to scan.
    #[serde(default)]
    pub p: Vec<f64>,
    /// Reverse Hölder exponents to scan.
    #[serde(default)]
    pub s: Vec<f64>,
    #[serde(default = "default_random_cubes")]
    pub random_cubes: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// Config of the maximal-transform command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalConfig {
    pub half_width: f64,
    pub cells: usize,
    #[serde(default = "default_dim")]
    pub dim: u8,
    pub f: FieldSpec,
    pub phi: YoungSpec,
    /// Optional perturbing weight: computes `M_Phi(f v)/v` instead of
    /// `M_Phi f`.
    #[serde(default)]
    pub v: Option<WeightSpec>,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// Config of the single-cube Luxemburg-average command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LuxemburgConfig {
    pub half_width: f64,
    pub cells: usize,
    #[serde(default = "default_dim")]
    pub dim: u8,
    pub f: FieldSpec,
    pub phi: YoungSpec,
    /// Lower corner and side of the averaging box, snapped to cells.
    pub low: Vec<f64>,
    pub side: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_grid() -> u16 {
    1
}

/// Config of the level-set decomposition command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub half_width: f64,
    pub cells: usize,
    #[serde(default = "default_dim")]
    pub dim: u8,
    pub g: FieldSpec,
    pub phi: YoungSpec,
    pub lambda: f64,
    #[serde(default = "default_grid")]
    pub grid: u16,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl DecomposeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::Config(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Config of the claims battery command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimsConfig {
    pub experiment: ExperimentConfig,
    /// Fixed threshold defining `g = f v / t`.
    pub t: f64,
    /// Truncation level: layers run upward from here.
    pub n_trunc: i32,
    #[serde(default = "default_grid")]
    pub grid: u16,
    /// Sample cells for the pointwise claim; defaults to 5 spread cells.
    #[serde(default)]
    pub sample_cells: Option<Vec<usize>>,
}

/// On-disk field header, stored as `<base>.json` next to `<base>.bin`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub dim: u8,
    pub half_width: f64,
    pub cells: usize,
    pub kind: FieldKind,
}

/// Writes `base.json` (header) and `base.bin` (little-endian `f64` cells).
pub fn write_field(base: &Path, f: &SampledField) -> Result<()> {
    let header = FieldHeader {
        dim: f.dim(),
        half_width: f.half_width(),
        cells: f.cells(),
        kind: f.kind(),
    };
    std::fs::write(base.with_extension("json"), serde_json::to_vec_pretty(&header)?)?;
    let mut bytes = Vec::with_capacity(f.values().len() * 8);
    for v in f.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(base.with_extension("bin"), bytes)?;
    Ok(())
}

/// Reads a field written by [`write_field`]. The payload length must match
/// the header exactly.
pub fn read_field(base: &Path) -> Result<SampledField> {
    let text = std::fs::read_to_string(base.with_extension("json"))?;
    let header: FieldHeader = serde_json::from_str(&text)?;
    let bytes = std::fs::read(base.with_extension("bin"))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Config(format!(
            "field payload length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let expected = if header.dim == 2 {
        header.cells * header.cells
    } else {
        header.cells
    };
    if values.len() != expected {
        return Err(Error::Config(format!(
            "field payload holds {} cells, header promises {expected}",
            values.len()
        )));
    }
    SampledField::new(header.dim, header.half_width, header.cells, header.kind, values)
}
