//! Driven mean fields and the effective linearized parameters.
//!
//! The classical steady state satisfies
//!
//! ```text
//! a_s = -i g m_s / (gamma_a + i delta_a)
//! b_s = -i G0 |m_s|^2 / (gamma_b + i omega_b)
//! m_s = (E - i g a_s) / (gamma_m + i delta_eff)
//! delta_eff = delta_m + 2 G0 Re(b_s) + 2 xi |m_s|^2
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::optimal_squeezing;
use crate::params::{principal_angle, SqueezingParams, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// Drive amplitude |E| (rate units).
    pub e_abs: f64,
    /// Drive phase theta.
    pub theta: f64,
    /// Bare magnomechanical coupling G0.
    pub g0: f64,
    /// Self-Kerr coefficient xi.
    pub xi: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("e_abs", self.e_abs), ("g0", self.g0), ("xi", self.xi)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        Ok(())
    }

    pub fn drive(&self) -> Complex64 {
        Complex64::from_polar(self.e_abs, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Closed form with `delta_eff ≈ delta_m`.
    Approximate,
    /// Damped fixed-point iteration on `delta_eff`.
    SelfConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub relaxation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            relaxation: 0.5,
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub a_s: Complex64,
    pub b_s: Complex64,
    pub m_s: Complex64,
    pub delta_m_eff: f64,
    /// `|delta_eff - delta_m|`.
    pub shift: f64,
    /// Largest relative residual of the three mean-field relations.
    pub residual: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// The Kerr/magnetostriction cubic admits three positive `|m_s|^2`
    /// roots; only the branch reached from the linear seed is reported.
    pub other_branches: bool,
}

struct Fields<'a> {
    p: &'a SystemParams,
    d: &'a DriveConfig,
}

impl Fields<'_> {
    fn cavity(&self) -> Complex64 {
        Complex64::new(self.p.gamma_a, self.p.delta_a)
    }

    fn magnon(&self, delta_eff: f64) -> Complex64 {
        let c = self.cavity();
        self.d.drive() * c / (self.p.g * self.p.g + Complex64::new(self.p.gamma_m, delta_eff) * c)
    }

    fn cavity_field(&self, m: Complex64) -> Complex64 {
        -Complex64::i() * self.p.g * m / self.cavity()
    }

    fn phonon_field(&self, m: Complex64) -> Complex64 {
        -Complex64::i() * self.d.g0 * m.norm_sqr() / Complex64::new(self.p.gamma_b, self.p.omega_b)
    }

    fn detuning(&self, m: Complex64, b: Complex64) -> f64 {
        self.p.delta_m + 2.0 * self.d.g0 * b.re + 2.0 * self.d.xi * m.norm_sqr()
    }

    fn residual(&self, a: Complex64, b: Complex64, m: Complex64, delta_eff: f64) -> f64 {
        let rel = |lhs: Complex64, rhs: Complex64| {
            let scale = lhs.norm().max(rhs.norm());
            if scale == 0.0 {
                0.0
            } else {
                (lhs - rhs).norm() / scale
            }
        };
        let ra = rel(a, self.cavity_field(m));
        let rb = rel(b, self.phonon_field(m));
        let rhs_m = (self.d.drive() - Complex64::i() * self.p.g * a)
            / Complex64::new(self.p.gamma_m, delta_eff);
        ra.max(rb).max(rel(m, rhs_m))
    }

    /// `n [gamma_e^2 + (d0 + k n)^2] = |E|^2` for `n = |m_s|^2` has three
    /// positive roots.
    fn multistable(&self) -> bool {
        let p = self.p;
        let c2 = p.gamma_a * p.gamma_a + p.delta_a * p.delta_a;
        let gamma_e = p.gamma_m + p.g * p.g * p.gamma_a / c2;
        let d0 = p.delta_m - p.g * p.g * p.delta_a / c2;
        let k = 2.0 * self.d.xi
            - 2.0 * self.d.g0 * self.d.g0 * p.omega_b
                / (p.gamma_b * p.gamma_b + p.omega_b * p.omega_b);
        if k == 0.0 || self.d.e_abs == 0.0 {
            return false;
        }
        let e2 = self.d.e_abs * self.d.e_abs;
        let f = |n: f64| n * (gamma_e * gamma_e + (d0 + k * n).powi(2)) - e2;
        // f'(n) = 3k^2 n^2 + 4 d0 k n + gamma_e^2 + d0^2
        let (qa, qb, qc) = (3.0 * k * k, 4.0 * d0 * k, gamma_e * gamma_e + d0 * d0);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            return false;
        }
        let sq = disc.sqrt();
        let n1 = (-qb - sq) / (2.0 * qa);
        let n2 = (-qb + sq) / (2.0 * qa);
        n1 > 0.0 && f(n1) > 0.0 && f(n2) < 0.0
    }
}

pub fn solve_steady_state(
    p: &SystemParams,
    d: &DriveConfig,
    mode: SolveMode,
) -> Result<SteadyState> {
    solve_steady_state_with(p, d, mode, &SolverOptions::default())
}

pub fn solve_steady_state_with(
    p: &SystemParams,
    d: &DriveConfig,
    mode: SolveMode,
    opts: &SolverOptions,
) -> Result<SteadyState> {
    p.validate()?;
    d.validate()?;
    let f = Fields { p, d };
    let other_branches = f.multistable();

    let assemble = |delta_seed: f64, iterations: usize| {
        let m = f.magnon(delta_seed);
        let a = f.cavity_field(m);
        let b = f.phonon_field(m);
        let delta_eff = f.detuning(m, b);
        (a, b, m, delta_eff, iterations)
    };

    let (a, b, m, delta_eff, iterations) = match mode {
        SolveMode::Approximate => assemble(p.delta_m, 0),
        SolveMode::SelfConsistent => {
            let mut delta = p.delta_m;
            let mut last = f64::INFINITY;
            let mut found = None;
            for it in 1..=opts.max_iterations {
                let (a, b, m, next, _) = assemble(delta, it);
                last = f.residual(a, b, m, next);
                if last < opts.tolerance {
                    found = Some((a, b, m, next, it));
                    break;
                }
                delta = (1.0 - opts.relaxation) * delta + opts.relaxation * next;
            }
            found.ok_or(Error::NonConvergence {
                iterations: opts.max_iterations,
                residual: last,
            })?
        }
    };

    Ok(SteadyState {
        a_s: a,
        b_s: b,
        m_s: m,
        delta_m_eff: delta_eff,
        shift: (delta_eff - p.delta_m).abs(),
        residual: f.residual(a, b, m, delta_eff),
        iterations_used: iterations,
        converged: true,
        other_branches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// `G = G0 m_s`.
    pub g_eff: Complex64,
    /// `zeta = -2 i xi m_s^2`.
    pub zeta: Complex64,
    pub zeta_abs: f64,
    pub phi: f64,
}

impl EffectiveParams {
    /// Squeezing expressed in the frame where `G` is real and positive,
    /// which is the frame the closed-form spectrum assumes
    /// (`phi - 2 arg G`).
    pub fn coupling_frame_squeezing(&self) -> SqueezingParams {
        let rot = if self.g_eff.norm() > 0.0 {
            -2.0 * self.g_eff.arg()
        } else {
            0.0
        };
        SqueezingParams {
            zeta_abs: self.zeta_abs,
            phi: principal_angle(self.phi + rot),
        }
    }

    /// Copy of `p` with `g_mag = |G|`.
    pub fn apply_to(&self, p: &SystemParams) -> SystemParams {
        SystemParams {
            g_mag: self.g_eff.norm(),
            ..*p
        }
    }
}

pub fn effective_params(d: &DriveConfig, ss: &SteadyState) -> EffectiveParams {
    let g_eff = d.g0 * ss.m_s;
    let zeta = Complex64::new(0.0, -2.0 * d.xi) * ss.m_s * ss.m_s;
    let sq = SqueezingParams::from_complex(zeta);
    EffectiveParams {
        g_eff,
        zeta,
        zeta_abs: 2.0 * d.xi * ss.m_s.norm_sqr(),
        phi: sq.phi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub zeta_abs: f64,
    /// Optimal `|zeta|` at `delta_m = omega_b`, `g = 0`.
    pub target: f64,
    pub meets_optimum: bool,
}

/// Squeezing reachable from a pumped magnon population, `|zeta| = 2 xi |m_s|^2`,
/// compared with the Stokes-nulling value for a red-detuned drive.
pub fn feasibility_report(
    xi: f64,
    pump_magnon_number: f64,
    omega_b: f64,
    gamma_m: f64,
) -> Result<Feasibility> {
    for (name, v) in [("xi", xi), ("pump_magnon_number", pump_magnon_number)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(
                name,
                format!("must be finite and >= 0, got {v}"),
            ));
        }
    }
    let mut p = SystemParams::figure2(gamma_m);
    p.omega_b = omega_b;
    p.delta_m = omega_b;
    p.delta_a = omega_b;
    let target = optimal_squeezing(&p)?.zeta_abs;
    let zeta_abs = 2.0 * xi * pump_magnon_number;
    Ok(Feasibility {
        zeta_abs,
        target,
        meets_optimum: zeta_abs >= target,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn drive(e_abs: f64, theta: f64, g0: f64, xi: f64) -> DriveConfig {
        DriveConfig {
            e_abs,
            theta,
            g0,
            xi,
        }
    }

    #[test]
    fn undriven_system_is_empty() {
        let p = SystemParams::figure2(0.1);
        for mode in [SolveMode::Approximate, SolveMode::SelfConsistent] {
            let ss = solve_steady_state(&p, &drive(0.0, 0.0, 0.01, 0.01), mode).unwrap();
            assert_eq!(ss.m_s, Complex64::new(0.0, 0.0));
            assert_eq!(ss.a_s.norm() + ss.b_s.norm(), 0.0);
            assert_eq!(ss.delta_m_eff, p.delta_m);
            let eff = effective_params(&drive(0.0, 0.0, 0.01, 0.01), &ss);
            assert_eq!(eff.g_eff.norm() + eff.zeta.norm(), 0.0);
        }
    }

    #[test]
    fn no_cavity_coupling_closed_form() {
        let p = SystemParams::figure2(0.3);
        let d = drive(2.0, 0.4, 1e-3, 1e-3);
        let ss = solve_steady_state(&p, &d, SolveMode::SelfConsistent).unwrap();
        assert_eq!(ss.a_s, Complex64::new(0.0, 0.0));
        let expected = d.drive() / Complex64::new(0.3, ss.delta_m_eff);
        assert!((ss.m_s - expected).norm() < 1e-9 * expected.norm());
    }

    #[test]
    fn self_consistent_residuals() {
        let mut p = SystemParams::figure2(0.4);
        p.g = 0.6;
        p.delta_a = 0.8;
        p.delta_m = 1.1;
        let d = drive(1.5, -0.7, 0.02, 0.01);
        let ss = solve_steady_state(&p, &d, SolveMode::SelfConsistent).unwrap();
        assert!(ss.converged);
        assert!(ss.residual < 1e-10, "{}", ss.residual);
        // the reported detuning satisfies its defining relation exactly
        let rebuilt = p.delta_m + 2.0 * d.g0 * ss.b_s.re + 2.0 * d.xi * ss.m_s.norm_sqr();
        assert_eq!(ss.delta_m_eff, rebuilt);
        assert!(ss.shift > 0.0 && ss.shift < 0.1 * p.delta_m);
        assert!(!ss.other_branches);
    }

    #[test]
    fn approximate_mode_scaling_and_phase() {
        let mut p = SystemParams::figure2(0.2);
        p.g = 0.5;
        let d1 = drive(1.0, 0.3, 0.05, 0.02);
        let d2 = drive(2.0, 0.3, 0.05, 0.02);
        let s1 = solve_steady_state(&p, &d1, SolveMode::Approximate).unwrap();
        let s2 = solve_steady_state(&p, &d2, SolveMode::Approximate).unwrap();
        assert!((s2.m_s - 2.0 * s1.m_s).norm() < 1e-15);

        let alpha = 0.9;
        let d3 = drive(1.0, 0.3 + alpha, 0.05, 0.02);
        let s3 = solve_steady_state(&p, &d3, SolveMode::Approximate).unwrap();
        assert!((s3.m_s - s1.m_s * Complex64::from_polar(1.0, alpha)).norm() < 1e-15);
        let e1 = effective_params(&d1, &s1);
        let e3 = effective_params(&d3, &s3);
        assert!((e3.zeta_abs - e1.zeta_abs).abs() < 1e-15);
        assert!((e3.g_eff.norm() - e1.g_eff.norm()).abs() < 1e-15);
        assert!((principal_angle(e3.phi - e1.phi - 2.0 * alpha)).abs() < 1e-12);
        // the phase relative to G is fixed by the Kerr term
        assert!((e1.coupling_frame_squeezing().phi + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn real_mean_field_gives_negative_imaginary_squeezing() {
        let d = drive(1.0, 0.0, 0.1, 0.3);
        let mut ss =
            solve_steady_state(&SystemParams::figure2(1.0), &d, SolveMode::Approximate).unwrap();
        ss.m_s = Complex64::new(2.0, 0.0);
        let eff = effective_params(&d, &ss);
        assert!((eff.phi + PI / 2.0).abs() < 1e-15);
        assert_eq!(eff.zeta_abs, 2.0 * 0.3 * 4.0);
        assert!((eff.zeta.norm() - eff.zeta_abs).abs() < 1e-15);
    }

    #[test]
    fn strong_kerr_is_flagged_multistable() {
        let mut p = SystemParams::figure2(0.1);
        p.delta_m = -1.0;
        let d = drive(0.2, 0.0, 0.0, 0.5);
        let ss = solve_steady_state(&p, &d, SolveMode::Approximate).unwrap();
        assert!(ss.other_branches);
    }

    #[test]
    fn non_convergence_reports_residual() {
        // red of the Kerr resonance the damped map overshoots and cycles
        let mut p = SystemParams::figure2(0.1);
        p.delta_m = -0.5;
        let d = drive(0.5, 0.0, 0.0, 0.5);
        let opts = SolverOptions::default();
        match solve_steady_state_with(&p, &d, SolveMode::SelfConsistent, &opts) {
            Err(Error::NonConvergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 10_000);
                assert!(residual > 1e-10);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_numbers() {
        let two_pi = 2.0 * PI;
        let r = feasibility_report(two_pi * 6.4e-9, 1e15, two_pi * 10e6, two_pi * 1e6).unwrap();
        assert!((r.zeta_abs / two_pi - 12.8e6).abs() < 1e-8);
        assert!(r.meets_optimum);
        let r = feasibility_report(two_pi * 6.4e-9, 1e15, two_pi * 10e6, two_pi * 50e6).unwrap();
        assert!(!r.meets_optimum);
        let r = feasibility_report(0.0, 1e15, 1.0, 0.1).unwrap();
        assert_eq!(r.zeta_abs, 0.0);
        assert!(!r.meets_optimum);
        assert!(feasibility_report(-1.0, 1.0, 1.0, 0.1).is_err());
    }
}
