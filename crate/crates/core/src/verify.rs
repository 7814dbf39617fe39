//! Acceptance checks, shared by the `acceptance` test target and the
//! `verify` subcommand.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{magnon_spectrum, optimal_squeezing, steady_phonon_number, thermal_occupancy};
use crate::optimize::{optimize_squeezing_with, Objective, OptimizerOptions};
use crate::oracle::{
    full_phonon_number, GaussianModel, SpectrumOracle, IX_PA, IX_PB, IX_PM, IX_XA, IX_XB, IX_XM,
};
use crate::params::{principal_angle, SqueezingParams, SystemParams};
use crate::steady::feasibility_report;
use crate::sweep::linspace;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Skip the optimizer criterion and use fewer random draws.
    pub quick: bool,
    /// Added to the analytic optimal phase in the sideband-suppression check.
    pub phase_offset: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quick: false,
            phase_offset: 0.0,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub time_limit_s: Option<f64>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.3} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_s
        )
    }
}

struct Check {
    passed: bool,
    detail: String,
}

fn timed(
    id: u8,
    name: &'static str,
    limit: Option<f64>,
    f: impl FnOnce() -> Result<Check>,
) -> CriterionOutcome {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match res {
        Ok(c) => (c.passed, c.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > Duration::from_secs_f64(limit) {
            passed = false;
            detail.push_str(&format!("; exceeded time limit {limit} s"));
        }
    }
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed_s: elapsed.as_secs_f64(),
        time_limit_s: limit,
    }
}

pub fn run(opts: &VerifyOptions) -> Vec<CriterionOutcome> {
    let mut out = vec![
        timed(1, "Stokes sideband suppression", Some(1.0), || {
            stokes_suppression(opts.phase_offset)
        }),
        timed(
            2,
            "ground state in the unresolved-sideband regime",
            Some(1.0),
            unresolved_ground_state,
        ),
    ];
    if !opts.quick {
        out.push(timed(3, "analytic optimum recovery", Some(30.0), || {
            optimum_recovery(opts.seed)
        }));
    }
    let spectrum_draws = if opts.quick { 10 } else { 50 };
    out.push(timed(
        4,
        "closed-form vs numeric spectrum",
        Some(30.0),
        || spectrum_equivalence(opts.seed, spectrum_draws),
    ));
    out.push(timed(
        5,
        "weak-coupling convergence",
        Some(5.0),
        weak_coupling_convergence,
    ));
    out.push(timed(
        6,
        "cavity adverse effect",
        Some(10.0),
        cavity_adverse_effect,
    ));
    out.push(timed(7, "thermal occupancy anchor", None, thermal_anchor));
    out.push(timed(8, "feasibility anchor", None, feasibility_anchor));
    out.push(timed(9, "fluctuation-dissipation anchor", None, || {
        fluctuation_dissipation(opts.seed)
    }));
    out.push(timed(10, "stability guard", None, || {
        stability_guard(opts.seed)
    }));
    out
}

pub fn all_passed(outcomes: &[CriterionOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

fn stokes_suppression(phase_offset: f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for gamma_m in [0.1, 1.0, 5.0] {
        let p = SystemParams::figure2(gamma_m);
        let opt = optimal_squeezing(&p)?;
        let sq = SqueezingParams::new(opt.zeta_abs, opt.phi + phase_offset)?;
        let ratio = magnon_spectrum(-p.omega_b, &p, &sq)? / magnon_spectrum(p.omega_b, &p, &sq)?;
        worst = worst.max(ratio);
        parts.push(format!("gamma_m={gamma_m}: {ratio:.3e}"));
    }
    Ok(Check {
        passed: worst < 1e-10,
        detail: format!("S(-wb)/S(wb) {} (need < 1e-10)", parts.join(", ")),
    })
}

fn unresolved_ground_state() -> Result<Check> {
    let p = SystemParams::figure2(5.0);
    let n_opt = steady_phonon_number(&p, &optimal_squeezing(&p)?)?.n_st;
    let n_none = steady_phonon_number(&p, &SqueezingParams::NONE)?.n_st;
    let ok_opt = (0.3..=0.7).contains(&n_opt);
    let ok_none = n_none > 100.0;
    Ok(Check {
        passed: ok_opt && ok_none,
        detail: format!(
            "optimal N_st = {n_opt:.6} (need [0.3, 0.7]: {}), |zeta|=0 N_st = {n_none:.6} (need > 100: {})",
            verdict(ok_opt),
            verdict(ok_none)
        ),
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "violated"
    }
}

/// Random cooling configuration with `delta_a = omega_b` that is stable
/// at the analytic optimum.
fn draw_cooling_params(rng: &mut StdRng) -> Result<SystemParams> {
    loop {
        let mut p = SystemParams::figure2(log_uniform(rng, 0.05, 5.0));
        p.gamma_a = log_uniform(rng, 0.2, 5.0);
        p.g = rng.gen_range(0.0..1.0);
        p.g_mag = rng.gen_range(0.01..0.1);
        p.delta_m = rng.gen_range(0.5..1.5);
        let sq = optimal_squeezing(&p)?;
        if full_phonon_number(&p, &sq).is_ok() && steady_phonon_number(&p, &sq).is_ok() {
            return Ok(p);
        }
    }
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn optimum_recovery(seed: u64) -> Result<Check> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cases: Vec<SystemParams> = [0.1, 1.0, 5.0]
        .into_iter()
        .map(SystemParams::figure2)
        .collect();
    for _ in 0..20 {
        cases.push(draw_cooling_params(&mut rng)?);
    }
    let compare = |objective: Objective| -> Result<(usize, f64, f64)> {
        let opts = OptimizerOptions {
            objective,
            ..Default::default()
        };
        let (mut hits, mut worst_z, mut worst_phi) = (0, 0.0f64, 0.0f64);
        for p in &cases {
            let num = optimize_squeezing_with(p, &opts)?;
            let ana = optimal_squeezing(p)?;
            let dz = (num.zeta_abs - ana.zeta_abs).abs() / ana.zeta_abs;
            let dphi = principal_angle(num.phi - ana.phi).abs();
            if dz < 1e-3 && dphi < 1e-3 {
                hits += 1;
            }
            worst_z = worst_z.max(dz);
            worst_phi = worst_phi.max(dphi);
        }
        Ok((hits, worst_z, worst_phi))
    };
    let (hits, wz, wp) = compare(Objective::PhononNumber)?;
    let (s_hits, s_wz, s_wp) = compare(Objective::StokesRate)?;
    Ok(Check {
        passed: hits == cases.len(),
        detail: format!(
            "N_st minimizer: {hits}/{n} within tolerance (worst |zeta| rel {wz:.2e}, phi {wp:.2e} rad); \
             Stokes-rate minimizer: {s_hits}/{n} (worst {s_wz:.2e}, {s_wp:.2e}); need 1e-3 and 1e-3 rad",
            n = cases.len()
        ),
    })
}

fn spectrum_equivalence(seed: u64, draws: usize) -> Result<Check> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x4);
    let grid = linspace(-5.0, 5.0, 1001);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < draws {
        let mut p = SystemParams::figure2(log_uniform(&mut rng, 0.05, 5.0));
        p.gamma_a = log_uniform(&mut rng, 0.1, 5.0);
        p.delta_a = rng.gen_range(-2.0..2.0);
        p.delta_m = rng.gen_range(-2.0..2.0);
        p.g = rng.gen_range(0.0..1.5);
        let zeta = Complex64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(-PI..PI));
        let sq = SqueezingParams::from_complex(zeta);
        // closed form is exact for an uncoupled mechanical mode
        let oracle = match SpectrumOracle::new(&p, Complex64::new(0.0, 0.0), zeta) {
            Ok(o) => o,
            Err(Error::Unstable { .. }) => continue,
            Err(e) => return Err(e),
        };
        for &w in &grid {
            let closed = magnon_spectrum(w, &p, &sq)?;
            let numeric = oracle.eval(w)?;
            worst = worst.max((closed - numeric).abs() / numeric.abs());
        }
        done += 1;
    }
    Ok(Check {
        passed: worst < 1e-8,
        detail: format!("max relative deviation {worst:.3e} over {draws} stable sets x 1001 points (need < 1e-8)"),
    })
}

fn weak_coupling_convergence() -> Result<Check> {
    let mut disc = Vec::new();
    for g_mag in [0.1, 0.05, 0.02] {
        let mut p = SystemParams::figure2(0.1);
        p.g_mag = g_mag;
        let sq = optimal_squeezing(&p)?;
        let n_st = steady_phonon_number(&p, &sq)?.n_st;
        let n_full = full_phonon_number(&p, &sq)?;
        disc.push((g_mag, n_st, n_full, (n_st - n_full).abs() / n_full));
    }
    let finite = disc[0].3.is_finite();
    let decreasing = disc.windows(2).all(|w| w[1].3 < w[0].3);
    let within = disc[0].3 <= 0.2;
    let rows: Vec<String> = disc
        .iter()
        .map(|(g, a, b, d)| format!("G={g}: N_st={a:.6}, N_full={b:.6}, rel {d:.3}"))
        .collect();
    Ok(Check {
        passed: finite && decreasing && within,
        detail: format!(
            "{}; finite {}, strictly decreasing {}, within 20% at G=0.1 {}",
            rows.join("; "),
            verdict(finite),
            verdict(decreasing),
            verdict(within)
        ),
    })
}

fn n_st_optimal(p: &SystemParams) -> Result<f64> {
    Ok(steady_phonon_number(p, &optimal_squeezing(p)?)?.n_st)
}

fn cavity_adverse_effect() -> Result<Check> {
    let mut failures = Vec::new();
    let mut unstable = 0;
    let mut total = 0;
    for gamma_m in [0.1, 1.0, 5.0] {
        let mut p = SystemParams::figure2(gamma_m);
        let mut prev = f64::NEG_INFINITY;
        for g in linspace(0.0, 1.0, 41) {
            p.g = g;
            total += 1;
            if full_phonon_number(&p, &optimal_squeezing(&p)?).is_err() {
                unstable += 1;
            }
            let n = n_st_optimal(&p)?;
            if n < prev {
                failures.push(format!("gamma_m={gamma_m}: N_st drops at g={g:.3}"));
                break;
            }
            prev = n;
        }
        let mut p = SystemParams::figure2(gamma_m);
        p.g = 0.5;
        let mut prev = f64::INFINITY;
        for gamma_a in linspace(0.1, 10.0, 41) {
            p.gamma_a = gamma_a;
            let n = n_st_optimal(&p)?;
            if n > prev {
                failures.push(format!(
                    "gamma_m={gamma_m}, g=0.5: N_st rises at gamma_a={gamma_a:.3}"
                ));
                break;
            }
            prev = n;
        }
    }
    let summary = if failures.is_empty() {
        "N_st nondecreasing in g on [0, 1] and nonincreasing in gamma_a on [0.1, 10] (g=0.5) for gamma_m in {0.1, 1, 5}"
            .to_string()
    } else {
        failures.join("; ")
    };
    Ok(Check {
        passed: failures.is_empty(),
        detail: format!(
            "{summary}; full linear model unstable at {unstable}/{total} g-grid points"
        ),
    })
}

fn thermal_anchor() -> Result<Check> {
    let n = thermal_occupancy(2.0 * PI * 10e6, 48e-3)?;
    Ok(Check {
        passed: (95.0..=105.0).contains(&n),
        detail: format!("n(10 MHz, 48 mK) = {n:.4} (need [95, 105])"),
    })
}

fn feasibility_anchor() -> Result<Check> {
    // frequencies in units of 2 pi Hz
    let f = feasibility_report(6.4e-9, 1e15, 10e6, 1e6)?;
    let rel = (f.zeta_abs - 12.8e6).abs() / 12.8e6;
    Ok(Check {
        passed: rel <= 4.0 * f64::EPSILON,
        detail: format!(
            "|zeta|/2pi = {:.9} MHz (target 12.8 MHz, rel {rel:.1e})",
            f.zeta_abs / 1e6
        ),
    })
}

fn fluctuation_dissipation(seed: u64) -> Result<Check> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut p = SystemParams::figure2(log_uniform(&mut rng, 0.05, 5.0));
        p.g = 0.0;
        p.g_mag = 0.0;
        p.gamma_a = log_uniform(&mut rng, 0.1, 5.0);
        p.gamma_b = log_uniform(&mut rng, 1e-5, 1e-1);
        p.delta_a = rng.gen_range(-2.0..2.0);
        p.delta_m = rng.gen_range(-2.0..2.0);
        p.n_a = rng.gen_range(0.0..10.0);
        p.n_b = rng.gen_range(0.0..200.0);
        p.n_m = rng.gen_range(0.0..10.0);
        let cov = GaussianModel::new(&p, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))?
            .covariance(p.omega_b)?;
        for (n, x, q) in [
            (p.n_a, IX_XA, IX_PA),
            (p.n_b, IX_XB, IX_PB),
            (p.n_m, IX_XM, IX_PM),
        ] {
            worst = worst.max((cov.v[(x, x)] - n - 0.5).abs());
            worst = worst.max((cov.v[(q, q)] - n - 0.5).abs());
        }
    }
    Ok(Check {
        passed: worst < 1e-10,
        detail: format!(
            "max |V_kk - (n + 1/2)| = {worst:.3e} over 20 decoupled draws (need < 1e-10)"
        ),
    })
}

fn accepted(p: &SystemParams, zeta_abs: f64, phi: f64) -> Result<bool> {
    match full_phonon_number(p, &SqueezingParams::new(zeta_abs, phi)?) {
        Ok(_) => Ok(true),
        Err(Error::Unstable { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

fn stability_guard(seed: u64) -> Result<Check> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0xa);
    let mut worst: f64 = 0.0;
    let mut misclassified = 0;
    let draws = 20;
    for _ in 0..draws {
        let mut p = SystemParams::figure2(log_uniform(&mut rng, 0.05, 5.0));
        p.g = 0.0;
        p.g_mag = 0.0;
        p.delta_m = rng.gen_range(-2.0..2.0);
        let phi = rng.gen_range(-PI..PI);
        let critical = p.gamma_m.hypot(p.delta_m);
        for (factor, expect) in [
            (0.5, true),
            (1.0 - 1e-3, true),
            (1.0, false),
            (1.0 + 1e-3, false),
            (2.0, false),
        ] {
            if accepted(&p, factor * critical, phi)? != expect {
                misclassified += 1;
            }
        }
        let (mut lo, mut hi) = (0.0, 2.0 * critical);
        while hi - lo > 1e-9 * critical {
            let mid = 0.5 * (lo + hi);
            if accepted(&p, mid, phi)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        worst = worst.max((0.5 * (lo + hi) - critical).abs() / critical);
    }
    Ok(Check {
        passed: misclassified == 0 && worst < 1e-6,
        detail: format!(
            "{misclassified} misclassified of {}; detected boundary within {worst:.2e} relative of sqrt(gamma_m^2 + delta_m^2) (need < 1e-6)",
            5 * draws
        ),
    })
}
