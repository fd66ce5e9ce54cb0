//! TOML run configuration. Lengths are SI meters.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context};
use cavity_core::geometry::{horwitz_params, CavityGeometry};
use cavity_core::operators::{default_half_width, make_grid, Grid, Parity};
use cavity_core::spectrum::OperatorKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptotics: Option<AsymptoticsConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// end-mirror radius R
    pub mirror_radius: f64,
    /// central convex mirror radius r
    pub convex_radius: f64,
    /// half-cavity length l
    pub half_length: f64,
    /// central mirror half-aperture a
    pub half_aperture: f64,
    pub wavelength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// Window half-width in units of `a`; defaults to `max(3, 1.5 M)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub apodization: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    Coupled,
    ParityPlus,
    ParityMinus,
    Decoupled,
    Scaled,
}

impl fmt::Display for KindConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KindConfig::Coupled => "coupled",
            KindConfig::ParityPlus => "parity_plus",
            KindConfig::ParityMinus => "parity_minus",
            KindConfig::Decoupled => "decoupled",
            KindConfig::Scaled => "scaled",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityConfig {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub operator_kind: KindConfig,
    /// Rows reported in `spectrum.csv` and files written by `modes`; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Sector of the scaled operator.
    #[serde(default = "default_parity")]
    pub parity: ParityConfig,
    /// Longitudinal orders `[q_min, q_max]` for `resonances.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_range: Option<[i64; 2]>,
    /// One fixed-point pass on the dominant resonance.
    #[serde(default)]
    pub refine: bool,
    /// Linear-algebra threads; `1` keeps results bit-reproducible, `0` uses every core.
    #[serde(default = "default_threads")]
    pub threads: usize,
}

fn default_parity() -> ParityConfig {
    ParityConfig::Even
}

fn default_threads() -> usize {
    1
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            operator_kind: KindConfig::Coupled,
            modes: None,
            parity: ParityConfig::Even,
            q_range: None,
            refine: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    /// Any of `csv`, `json`, `pgm`. CSV is always written.
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            formats: default_formats(),
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f.eq_ignore_ascii_case(format))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// half-aperture
    A,
    /// half-cavity length
    L,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    pub y: Vec<f64>,
    pub t: Vec<f64>,
    /// Overrides the magnification of the geometry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnification: Option<f64>,
    /// Gaussian test profile `exp(-(x - center)^2 / width^2)`.
    #[serde(default)]
    pub center: f64,
    #[serde(default = "default_width")]
    pub width: f64,
}

fn default_width() -> f64 {
    1.0
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        Ok(config)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    fn check(&self) -> anyhow::Result<()> {
        self.cavity()?;
        if let Some(w) = self.grid.half_width {
            if !(w.is_finite() && w > 1.0) {
                bail!("grid.half_width must exceed 1 (the aperture edge), got {w}");
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.steps == 0 {
                bail!("sweep.steps must be at least 1");
            }
        }
        Ok(())
    }

    pub fn cavity(&self) -> anyhow::Result<CavityGeometry> {
        let g = &self.geometry;
        Ok(CavityGeometry::new(
            g.mirror_radius,
            g.convex_radius,
            g.half_length,
            g.half_aperture,
            g.wavelength,
        )?)
    }

    pub fn half_width(&self, geom: &CavityGeometry) -> f64 {
        self.grid.half_width.unwrap_or_else(|| {
            default_half_width(horwitz_params(geom).ok().map(|h| h.magnification))
        })
    }

    pub fn build_grid(&self, geom: &CavityGeometry) -> anyhow::Result<Grid> {
        Ok(make_grid(self.grid.n, self.half_width(geom))?.with_apodization(self.grid.apodization))
    }

    pub fn kind(&self) -> OperatorKind {
        match self.solve.operator_kind {
            KindConfig::Coupled => OperatorKind::Coupled,
            KindConfig::ParityPlus => OperatorKind::ParityPlus,
            KindConfig::ParityMinus => OperatorKind::ParityMinus,
            KindConfig::Decoupled => OperatorKind::DecoupledSubcavity,
            KindConfig::Scaled => OperatorKind::Scaled(match self.solve.parity {
                ParityConfig::Even => Parity::Even,
                ParityConfig::Odd => Parity::Odd,
            }),
        }
    }
}
