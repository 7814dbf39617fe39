//! Run configuration: strict TOML or JSON, normalized or SI units.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use magnomech::optimize::{Objective, OptimizerOptions};
use magnomech::steady::{DriveConfig, SolveMode, SolverOptions};
use magnomech::sweep::{linspace, Metric, SqueezingMode};
use magnomech::SystemParams;
use serde::{Deserialize, Serialize};

use crate::exit::Exit;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// Every frequency in units of `omega_b`.
    #[default]
    Normalized,
    /// Every frequency in Hz; `system.omega_b` sets the scale.
    Si,
}

impl Units {
    fn is_normalized(&self) -> bool {
        *self == Units::Normalized
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Significant digits in CSV output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

pub const DEFAULT_PRECISION: usize = 12;
pub const DEFAULT_OMEGA_RANGE: (f64, f64) = (-3.0, 3.0);
pub const DEFAULT_OMEGA_POINTS: usize = 1201;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Add the frequency-domain oracle column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyBlock {
    pub mode: SolveMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

impl SteadyBlock {
    pub fn solver_options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            relaxation: self.relaxation.unwrap_or(d.relaxation),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub variable: String,
    /// Explicit grid, or `start`/`stop`/`points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    pub metrics: Vec<Metric>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SweepBlock {
    pub fn grid(&self) -> anyhow::Result<Vec<f64>> {
        match (&self.grid, self.start, self.stop, self.points) {
            (Some(g), None, None, None) => Ok(g.clone()),
            (None, Some(a), Some(b), Some(n)) => Ok(linspace(a, b, n)),
            _ => bail!("sweep: give either `grid` or all of `start`, `stop`, `points`"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
}

impl OptimizerBlock {
    pub fn options(&self) -> OptimizerOptions {
        let d = OptimizerOptions::default();
        OptimizerOptions {
            zeta_points: self.zeta_points.unwrap_or(d.zeta_points),
            phi_points: self.phi_points.unwrap_or(d.phi_points),
            zeta_max: self.zeta_max.or(d.zeta_max),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            max_cycles: self.max_cycles.unwrap_or(d.max_cycles),
            objective: self.objective.unwrap_or(d.objective),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Units::is_normalized")]
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezing: Option<SqueezingMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
}

/// A previously emitted JSON report; its `config` can be re-run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report<T> {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub result: T,
}

/// Variables that carry frequency units.
const FREQUENCY_FIELDS: [&str; 8] = [
    "omega_b", "delta_a", "delta_m", "gamma_a", "gamma_b", "gamma_m", "g", "g_mag",
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, Exit> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(Exit::config)?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        };
        parsed
            .with_context(|| format!("parsing config {}", path.display()))
            .map_err(Exit::config)
    }

    pub fn from_toml(text: &str) -> anyhow::Result<RunConfig> {
        Ok(toml::from_str(text)?)
    }

    /// Accepts a bare config or an emitted report.
    pub fn from_json(text: &str) -> anyhow::Result<RunConfig> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("command").is_some() {
            let report: Report<serde_json::Value> = serde_json::from_value(value)?;
            Ok(report.config)
        } else {
            Ok(serde_json::from_value(value)?)
        }
    }

    pub fn system(&self) -> anyhow::Result<SystemParams> {
        self.system.ok_or_else(|| anyhow!("missing [system] block"))
    }

    pub fn precision(&self) -> usize {
        self.output
            .as_ref()
            .and_then(|o| o.precision)
            .unwrap_or(DEFAULT_PRECISION)
    }

    /// Copy with every frequency divided by `omega_b`, so that `omega_b = 1`.
    pub fn normalized(&self) -> anyhow::Result<RunConfig> {
        let mut out = self.clone();
        out.units = Units::Normalized;
        if self.units == Units::Normalized {
            return Ok(out);
        }
        let sys = self.system()?;
        let w = sys.omega_b;
        if !(w > 0.0 && w.is_finite()) {
            bail!("units = \"si\" needs system.omega_b > 0 in Hz, got {w}");
        }
        out.system = Some(sys.normalized());
        if let Some(d) = &mut out.drive {
            d.e_abs /= w;
            d.g0 /= w;
            d.xi /= w;
        }
        if let Some(SqueezingMode::Fixed { zeta_abs, .. }) = &mut out.squeezing {
            *zeta_abs /= w;
        }
        if let Some(s) = &mut out.spectrum {
            s.omega_min = s.omega_min.map(|v| v / w);
            s.omega_max = s.omega_max.map(|v| v / w);
        }
        if let Some(o) = &mut out.optimizer {
            o.zeta_max = o.zeta_max.map(|v| v / w);
        }
        if let Some(s) = &mut out.sweep {
            if s.variable == "omega_b" {
                bail!("sweeping omega_b is not supported with units = \"si\"");
            }
            if FREQUENCY_FIELDS.contains(&s.variable.as_str())
                || s.variable == "omega"
                || s.variable == "zeta_abs"
            {
                for v in [&mut s.start, &mut s.stop].into_iter().flatten() {
                    *v /= w;
                }
                if let Some(g) = &mut s.grid {
                    g.iter_mut().for_each(|v| *v /= w);
                }
            }
        }
        Ok(out)
    }
}
