//! Sweep bundles reproducing the published figure panels.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::optimal_squeezing;
use crate::params::SystemParams;
use crate::sweep::{
    linspace, run_sweep, Metric, SqueezingMode, SweepResult, SweepSpec, DEFAULT_POINTS,
};

/// Magnon damping of the three Fig. 2 rows.
pub const FIG2_GAMMA_M: [f64; 3] = [0.1, 1.0, 5.0];
/// Cavity couplings of the Fig. 3(b) curves.
pub const FIG3B_COUPLINGS: [f64; 3] = [0.0, 0.5, 1.0];
/// Fig. 3(b) runs at this magnon damping.
pub const FIG3B_GAMMA_M: f64 = 1.0;
pub const FIG3B_GAMMA_A_RANGE: (f64, f64) = (0.1, 10.0);
pub const SPECTRUM_RANGE: (f64, f64) = (-3.0, 3.0);
pub const SPECTRUM_POINTS: usize = 1201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigurePanels {
    Fig2Row1,
    Fig2Row2,
    Fig2Row3,
    Fig3a,
    Fig3b,
}

impl FigurePanels {
    pub const ALL: [FigurePanels; 5] = [
        FigurePanels::Fig2Row1,
        FigurePanels::Fig2Row2,
        FigurePanels::Fig2Row3,
        FigurePanels::Fig3a,
        FigurePanels::Fig3b,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigurePanels::Fig2Row1 => "fig2_row1",
            FigurePanels::Fig2Row2 => "fig2_row2",
            FigurePanels::Fig2Row3 => "fig2_row3",
            FigurePanels::Fig3a => "fig3a",
            FigurePanels::Fig3b => "fig3b",
        }
    }
}

impl fmt::Display for FigurePanels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigurePanels {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigurePanels::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown figure panel set `{s}`")))
    }
}

fn fig2_specs(row: usize, points: usize) -> Result<Vec<SweepSpec>> {
    let gamma_m = FIG2_GAMMA_M[row];
    let letters = [["a", "b", "c"], ["d", "e", "f"], ["g", "h", "i"]][row];
    let fixed = SystemParams::figure2(gamma_m);
    let note = format!("Fig. 2 row {}: gamma_m = {gamma_m} omega_b", row + 1);
    let opt = optimal_squeezing(&fixed)?;
    let n_metrics = vec![
        Metric::NSt,
        Metric::NFull,
        Metric::APlus,
        Metric::AMinus,
        Metric::ZetaAbs,
        Metric::Phi,
    ];
    let spectrum = |label: &str, squeezing| SweepSpec {
        label: format!("fig2{}_spectrum_{label}", letters[0]),
        variable: "omega".into(),
        grid: linspace(SPECTRUM_RANGE.0, SPECTRUM_RANGE.1, SPECTRUM_POINTS),
        fixed,
        metrics: vec![Metric::SOmega],
        squeezing,
        notes: vec![note.clone()],
    };
    let detuning = |label: &str, squeezing| SweepSpec {
        label: format!("fig2{}_detuning_{label}", letters[2]),
        variable: "delta_m".into(),
        grid: linspace(0.0, 2.0, points),
        fixed,
        metrics: n_metrics.clone(),
        squeezing,
        notes: vec![note.clone()],
    };
    // (-pi, pi] without the duplicated endpoint
    let phases: Vec<f64> = (1..=points)
        .map(|j| -PI + 2.0 * PI * j as f64 / points as f64)
        .collect();
    Ok(vec![
        spectrum("none", SqueezingMode::None),
        spectrum("opt", SqueezingMode::AnalyticOptimal),
        SweepSpec {
            label: format!("fig2{}_phase", letters[1]),
            variable: "phi".into(),
            grid: phases,
            fixed,
            metrics: n_metrics.clone(),
            squeezing: SqueezingMode::Fixed {
                zeta_abs: opt.zeta_abs,
                phi: opt.phi,
            },
            notes: vec![note.clone()],
        },
        detuning("none", SqueezingMode::None),
        detuning("opt", SqueezingMode::AnalyticOptimal),
    ])
}

fn fig3a_specs(points: usize) -> Vec<SweepSpec> {
    FIG2_GAMMA_M
        .iter()
        .map(|&gamma_m| SweepSpec {
            label: format!("fig3a_gamma_m_{gamma_m}"),
            variable: "g".into(),
            grid: linspace(0.0, 1.0, points),
            fixed: SystemParams::figure2(gamma_m),
            metrics: vec![Metric::NSt, Metric::NFull, Metric::ZetaAbs, Metric::Phi],
            squeezing: SqueezingMode::AnalyticOptimal,
            notes: vec![format!(
                "Fig. 3(a): gamma_m = {gamma_m} omega_b, delta_a = delta_m = omega_b"
            )],
        })
        .collect()
}

fn fig3b_specs(points: usize) -> Vec<SweepSpec> {
    FIG3B_COUPLINGS
        .iter()
        .map(|&g| {
            let mut fixed = SystemParams::figure2(FIG3B_GAMMA_M);
            fixed.g = g;
            SweepSpec {
                label: format!("fig3b_g_{g}"),
                variable: "gamma_a".into(),
                grid: linspace(FIG3B_GAMMA_A_RANGE.0, FIG3B_GAMMA_A_RANGE.1, points),
                fixed,
                metrics: vec![Metric::NSt, Metric::NFull, Metric::ZetaAbs, Metric::Phi],
                squeezing: SqueezingMode::AnalyticOptimal,
                notes: vec![
                    format!("Fig. 3(b): g = {g} omega_b, delta_a = delta_m = omega_b"),
                    format!(
                        "gamma_a range [{}, {}] omega_b and gamma_m = {FIG3B_GAMMA_M} omega_b are choices of this dataset",
                        FIG3B_GAMMA_A_RANGE.0, FIG3B_GAMMA_A_RANGE.1
                    ),
                ],
            }
        })
        .collect()
}

/// Sweep specifications for a panel set, `points` per 1-D sweep
/// (spectra always use 1201 points over `[-3, 3]`).
pub fn figure_specs(which: FigurePanels, points: usize) -> Result<Vec<SweepSpec>> {
    Ok(match which {
        FigurePanels::Fig2Row1 => fig2_specs(0, points)?,
        FigurePanels::Fig2Row2 => fig2_specs(1, points)?,
        FigurePanels::Fig2Row3 => fig2_specs(2, points)?,
        FigurePanels::Fig3a => fig3a_specs(points),
        FigurePanels::Fig3b => fig3b_specs(points),
    })
}

pub fn figure_dataset(which: FigurePanels) -> Result<Vec<SweepResult>> {
    figure_specs(which, DEFAULT_POINTS)?
        .iter()
        .map(run_sweep)
        .collect()
}
