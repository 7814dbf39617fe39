//! One-dimensional parameter sweeps.
//!
//! Grid points are independent and evaluated in parallel; rows are
//! returned in grid order. A failing point (instability, singular
//! spectrum, heating) keeps its row with null metrics and the error text.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{magnon_spectrum, optimal_squeezing, scattering_rates, steady_phonon_number};
use crate::optimize::optimize_squeezing_numeric;
use crate::oracle::{build_drift, check_stability, full_phonon_number, SpectrumOracle};
use crate::params::{SqueezingParams, SystemParams, SYSTEM_FIELDS};

/// Default number of points in a 1-D sweep.
pub const DEFAULT_POINTS: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `S(-omega_b)`
    SMinus,
    /// `S(+omega_b)`
    SPlus,
    APlus,
    AMinus,
    GammaNet,
    NSt,
    /// Phonon number of the full covariance model.
    NFull,
    /// Largest real part of the drift eigenvalues.
    Abscissa,
    /// Squeezing used at the point.
    ZetaAbs,
    Phi,
    /// Closed-form `S(omega)` at the probe frequency (omega sweeps only).
    SOmega,
    /// Frequency-domain oracle `S(omega)` (omega sweeps only).
    SOracle,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::SMinus => "s_minus",
            Metric::SPlus => "s_plus",
            Metric::APlus => "a_plus",
            Metric::AMinus => "a_minus",
            Metric::GammaNet => "gamma_net",
            Metric::NSt => "n_st",
            Metric::NFull => "n_full",
            Metric::Abscissa => "abscissa",
            Metric::ZetaAbs => "zeta_abs",
            Metric::Phi => "phi",
            Metric::SOmega => "s_omega",
            Metric::SOracle => "s_oracle",
        }
    }

    fn spectral(&self) -> bool {
        matches!(self, Metric::SOmega | Metric::SOracle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SqueezingMode {
    None,
    AnalyticOptimal,
    NumericOptimal,
    Fixed { zeta_abs: f64, phi: f64 },
}

impl SqueezingMode {
    pub fn label(&self) -> &'static str {
        match self {
            SqueezingMode::None => "none",
            SqueezingMode::AnalyticOptimal => "analytic_optimal",
            SqueezingMode::NumericOptimal => "numeric_optimal",
            SqueezingMode::Fixed { .. } => "fixed",
        }
    }

    pub fn resolve(&self, p: &SystemParams) -> Result<SqueezingParams> {
        match *self {
            SqueezingMode::None => Ok(SqueezingParams::NONE),
            SqueezingMode::AnalyticOptimal => optimal_squeezing(p),
            SqueezingMode::NumericOptimal => Ok(optimize_squeezing_numeric(p)?.squeezing()),
            SqueezingMode::Fixed { zeta_abs, phi } => SqueezingParams::new(zeta_abs, phi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Label used for file names and provenance.
    pub label: String,
    /// A [`SystemParams`] field, `zeta_abs`/`phi` (fixed squeezing only) or
    /// `omega` (probe frequency).
    pub variable: String,
    pub grid: Vec<f64>,
    pub fixed: SystemParams,
    pub metrics: Vec<Metric>,
    pub squeezing: SqueezingMode,
    /// Free-form provenance lines copied into the result.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    /// One entry per requested metric, `None` where it could not be evaluated.
    pub values: Vec<Option<f64>>,
    pub stable: bool,
    pub weak_coupling_ok: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub label: String,
    pub variable: String,
    pub metrics: Vec<Metric>,
    pub squeezing: SqueezingMode,
    pub fixed: SystemParams,
    pub notes: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Column of one metric, in grid order.
    pub fn column(&self, metric: Metric) -> Option<Vec<Option<f64>>> {
        let k = self.metrics.iter().position(|m| *m == metric)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.x).collect()
    }
}

/// Evenly spaced grid including both ends.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let var = self.variable.as_str();
        let is_system = SYSTEM_FIELDS.contains(&var);
        let is_squeezing = matches!(var, "zeta_abs" | "phi");
        let is_omega = var == "omega";
        if !(is_system || is_squeezing || is_omega) {
            return Err(Error::Schema(format!(
                "unknown sweep variable `{var}`; expected one of {SYSTEM_FIELDS:?}, zeta_abs, phi, omega"
            )));
        }
        if is_squeezing && !matches!(self.squeezing, SqueezingMode::Fixed { .. }) {
            return Err(Error::Schema(format!(
                "sweeping `{var}` requires fixed squeezing"
            )));
        }
        if self.grid.is_empty() {
            return Err(Error::Schema("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Schema("sweep grid has non-finite values".into()));
        }
        let inc = self.grid.windows(2).all(|w| w[1] > w[0]);
        let dec = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(Error::Schema("sweep grid must be strictly monotone".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::Schema("no metrics requested".into()));
        }
        for m in &self.metrics {
            if m.spectral() != is_omega
                && !matches!(m, Metric::Abscissa | Metric::ZetaAbs | Metric::Phi)
            {
                return Err(Error::Schema(format!(
                    "metric `{}` is not available when sweeping `{var}`",
                    m.name()
                )));
            }
        }
        if let SqueezingMode::Fixed { zeta_abs, phi } = self.squeezing {
            SqueezingParams::new(zeta_abs, phi)?;
        }
        self.fixed.validate()
    }
}

struct PointContext<'a> {
    spec: &'a SweepSpec,
    /// Shared state of an omega sweep, where only the probe frequency moves.
    spectral: Option<std::result::Result<(SqueezingParams, SpectrumOracle, f64), String>>,
}

fn record(err: &mut Option<String>, e: &Error) {
    if err.is_none() {
        *err = Some(e.to_string());
    }
}

impl PointContext<'_> {
    fn point_params(&self, x: f64) -> Result<(SystemParams, SqueezingParams)> {
        let spec = self.spec;
        let mut p = spec.fixed;
        let mut squeezing = spec.squeezing;
        match (spec.variable.as_str(), &mut squeezing) {
            ("zeta_abs", SqueezingMode::Fixed { zeta_abs, .. }) => *zeta_abs = x,
            ("phi", SqueezingMode::Fixed { phi, .. }) => *phi = x,
            ("omega", _) => {}
            (name, _) => p.set(name, x)?,
        }
        p.validate()?;
        let sq = squeezing.resolve(&p)?;
        Ok((p, sq))
    }

    fn eval(&self, x: f64) -> SweepRow {
        let spec = self.spec;
        let n = spec.metrics.len();
        let mut row = SweepRow {
            x,
            values: vec![None; n],
            stable: false,
            weak_coupling_ok: false,
            error: None,
        };
        if let Some(shared) = &self.spectral {
            let (sq, oracle, abscissa) = match shared {
                Ok(s) => s,
                Err(e) => {
                    row.error = Some(e.clone());
                    return row;
                }
            };
            row.stable = true;
            row.weak_coupling_ok = spec.fixed.weak_coupling_ok();
            for (k, m) in spec.metrics.iter().enumerate() {
                let v = match m {
                    Metric::SOmega => magnon_spectrum(x, &spec.fixed, sq),
                    Metric::SOracle => oracle.eval(x),
                    Metric::Abscissa => Ok(*abscissa),
                    Metric::ZetaAbs => Ok(sq.zeta_abs),
                    Metric::Phi => Ok(sq.phi),
                    _ => unreachable!("validated"),
                };
                match v {
                    Ok(v) => row.values[k] = Some(v),
                    Err(e) => record(&mut row.error, &e),
                }
            }
            return row;
        }

        let (p, sq) = match self.point_params(x) {
            Ok(v) => v,
            Err(e) => {
                row.error = Some(e.to_string());
                return row;
            }
        };
        row.weak_coupling_ok = p.weak_coupling_ok();
        let st = check_stability(
            &build_drift(&p, Complex64::new(p.g_mag, 0.0), sq.to_complex()),
            p.omega_b,
        );
        row.stable = st.stable;

        for (k, m) in spec.metrics.iter().enumerate() {
            match m {
                Metric::Abscissa => row.values[k] = Some(st.abscissa),
                Metric::ZetaAbs => row.values[k] = Some(sq.zeta_abs),
                Metric::Phi => row.values[k] = Some(sq.phi),
                _ => {}
            }
        }
        if !st.stable {
            row.error = Some(
                Error::Unstable {
                    abscissa: st.abscissa,
                }
                .to_string(),
            );
            return row;
        }

        let rates = scattering_rates(&p, &sq);
        let report = steady_phonon_number(&p, &sq);
        let needs_full = spec.metrics.contains(&Metric::NFull);
        let full = needs_full.then(|| full_phonon_number(&p, &sq));
        for (k, m) in spec.metrics.iter().enumerate() {
            let v: std::result::Result<f64, &Error> = match m {
                Metric::SMinus => rates.as_ref().map(|r| r.s_minus),
                Metric::SPlus => rates.as_ref().map(|r| r.s_plus),
                Metric::APlus => rates.as_ref().map(|r| r.a_plus),
                Metric::AMinus => rates.as_ref().map(|r| r.a_minus),
                Metric::GammaNet => rates.as_ref().map(|r| r.a_minus - r.a_plus),
                Metric::NSt => report.as_ref().map(|r| r.n_st),
                Metric::NFull => full.as_ref().expect("requested").as_ref().copied(),
                _ => continue,
            };
            match v {
                Ok(v) => row.values[k] = Some(v),
                Err(e) => record(&mut row.error, e),
            }
        }
        row
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let spectral = (spec.variable == "omega").then(|| {
        let p = &spec.fixed;
        spec.squeezing
            .resolve(p)
            .and_then(|sq| {
                let st = check_stability(
                    &build_drift(p, Complex64::new(p.g_mag, 0.0), sq.to_complex()),
                    p.omega_b,
                );
                if !st.stable {
                    return Err(Error::Unstable {
                        abscissa: st.abscissa,
                    });
                }
                // the closed form describes the bare magnon reservoir, so the
                // oracle runs with the mechanics decoupled
                let oracle = SpectrumOracle::new(p, Complex64::new(0.0, 0.0), sq.to_complex())?;
                Ok((sq, oracle, st.abscissa))
            })
            .map_err(|e| e.to_string())
    });
    let ctx = PointContext { spec, spectral };
    let rows: Vec<SweepRow> = spec.grid.par_iter().map(|&x| ctx.eval(x)).collect();
    Ok(SweepResult {
        label: spec.label.clone(),
        variable: spec.variable.clone(),
        metrics: spec.metrics.clone(),
        squeezing: spec.squeezing,
        fixed: spec.fixed,
        notes: spec.notes.clone(),
        rows,
    })
}

/// Provenance key/value pairs describing a sweep's fixed inputs.
pub fn provenance(result: &SweepResult) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    out.insert("label".into(), result.label.clone());
    out.insert("variable".into(), result.variable.clone());
    out.insert("squeezing".into(), result.squeezing.label().into());
    if let SqueezingMode::Fixed { zeta_abs, phi } = result.squeezing {
        out.insert("zeta_abs".into(), format!("{zeta_abs:e}"));
        out.insert("phi".into(), format!("{phi:e}"));
    }
    for name in SYSTEM_FIELDS {
        if name != result.variable {
            out.insert(
                name.into(),
                format!("{:e}", result.fixed.get(name).expect("field")),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(
        variable: &str,
        grid: Vec<f64>,
        metrics: Vec<Metric>,
        squeezing: SqueezingMode,
    ) -> SweepSpec {
        SweepSpec {
            label: "t".into(),
            variable: variable.into(),
            grid,
            fixed: SystemParams::figure2(0.1),
            metrics,
            squeezing,
            notes: vec![],
        }
    }

    #[test]
    fn schema_errors() {
        let bad = spec("gamma_x", vec![1.0], vec![Metric::NSt], SqueezingMode::None);
        assert!(matches!(run_sweep(&bad), Err(Error::Schema(_))));
        let bad = spec(
            "phi",
            vec![1.0],
            vec![Metric::NSt],
            SqueezingMode::AnalyticOptimal,
        );
        assert!(matches!(run_sweep(&bad), Err(Error::Schema(_))));
        let bad = spec(
            "g",
            vec![0.0, 0.5, 0.5],
            vec![Metric::NSt],
            SqueezingMode::None,
        );
        assert!(matches!(run_sweep(&bad), Err(Error::Schema(_))));
        let bad = spec("g", vec![], vec![Metric::NSt], SqueezingMode::None);
        assert!(matches!(run_sweep(&bad), Err(Error::Schema(_))));
        let bad = spec("g", vec![0.0], vec![Metric::SOmega], SqueezingMode::None);
        assert!(matches!(run_sweep(&bad), Err(Error::Schema(_))));
        let bad = spec("omega", vec![0.0], vec![Metric::NSt], SqueezingMode::None);
        assert!(matches!(run_sweep(&bad), Err(Error::Schema(_))));
    }

    #[test]
    fn single_point_matches_direct_evaluation() {
        let s = spec(
            "delta_m",
            vec![1.0],
            vec![Metric::APlus, Metric::AMinus, Metric::GammaNet, Metric::NSt],
            SqueezingMode::AnalyticOptimal,
        );
        let r = run_sweep(&s).unwrap();
        let p = SystemParams::figure2(0.1);
        let direct = steady_phonon_number(&p, &optimal_squeezing(&p).unwrap()).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.values[0], Some(direct.a_plus));
        assert_eq!(row.values[1], Some(direct.a_minus));
        assert_eq!(row.values[2], Some(direct.gamma_net));
        assert_eq!(row.values[3], Some(direct.n_st));
        assert!(row.stable && row.weak_coupling_ok && row.error.is_none());
    }

    #[test]
    fn unstable_points_keep_their_row() {
        let s = spec(
            "zeta_abs",
            vec![0.05, 0.5, 5.0],
            vec![Metric::NSt, Metric::ZetaAbs],
            SqueezingMode::Fixed {
                zeta_abs: 0.0,
                phi: 0.0,
            },
        );
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows[0].stable);
        let last = &r.rows[2];
        assert!(!last.stable);
        assert_eq!(last.values[0], None);
        assert_eq!(last.values[1], Some(5.0));
        assert!(last.error.as_deref().unwrap().contains("unstable"));
    }

    #[test]
    fn sweeps_are_deterministic() {
        let s = spec(
            "delta_m",
            linspace(0.2, 2.0, 64),
            vec![Metric::NSt, Metric::NFull, Metric::SMinus],
            SqueezingMode::AnalyticOptimal,
        );
        let a = run_sweep(&s).unwrap();
        let b = run_sweep(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.xs(), s.grid);
    }

    #[test]
    fn detuning_sweep_without_squeezing_is_best_near_resonance() {
        let s = spec(
            "delta_m",
            linspace(0.0, 2.0, DEFAULT_POINTS),
            vec![Metric::NSt],
            SqueezingMode::None,
        );
        let r = run_sweep(&s).unwrap();
        let col = r.column(Metric::NSt).unwrap();
        let (imin, _) = col
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((r.rows[imin].x - 1.0).abs() < 0.02, "{}", r.rows[imin].x);
    }

    #[test]
    fn omega_sweep_matches_oracle() {
        let mut s = spec(
            "omega",
            linspace(-3.0, 3.0, 121),
            vec![Metric::SOmega, Metric::SOracle],
            SqueezingMode::AnalyticOptimal,
        );
        s.fixed.g = 0.4;
        let r = run_sweep(&s).unwrap();
        for row in &r.rows {
            let (a, b) = (row.values[0].unwrap(), row.values[1].unwrap());
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-300) || (a - b).abs() < 1e-14);
        }
    }
}
