//! Full linearized Gaussian model of the three modes.
//!
//! Quadratures are ordered `(x_a, p_a, x_b, p_b, x_m, p_m)` with
//! `x = (k + k†)/√2` and `p = i(k† - k)/√2`, so the vacuum variance is 1/2.
//! This model keeps everything the weak-coupling rate theory drops
//! (mechanical back-action, counter-rotating terms, hot magnon/cavity
//! baths) and is used to check it.

use nalgebra::{DMatrix, DVector, Matrix6, Vector6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CoolingReport;
use crate::params::{SqueezingParams, SystemParams};

pub const IX_XA: usize = 0;
pub const IX_PA: usize = 1;
pub const IX_XB: usize = 2;
pub const IX_PB: usize = 3;
pub const IX_XM: usize = 4;
pub const IX_PM: usize = 5;

/// Eigenvalues must satisfy `Re(lambda) < -STABILITY_MARGIN * omega_b`.
pub const STABILITY_MARGIN: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
const CONDITION_LIMIT: f64 = 1e12;
const PHYSICALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    pub drift: Matrix6<f64>,
    pub diffusion: Matrix6<f64>,
}

impl GaussianModel {
    pub fn new(p: &SystemParams, g_eff: Complex64, zeta: Complex64) -> Result<Self> {
        p.validate()?;
        Ok(GaussianModel {
            drift: build_drift(p, g_eff, zeta),
            diffusion: build_diffusion(p),
        })
    }

    pub fn stability(&self, omega_b: f64) -> Stability {
        check_stability(&self.drift, omega_b)
    }

    pub fn covariance(&self, omega_b: f64) -> Result<CovarianceMatrix> {
        let st = self.stability(omega_b);
        if !st.stable {
            return Err(Error::Unstable {
                abscissa: st.abscissa,
            });
        }
        solve_lyapunov(&self.drift, &self.diffusion)
    }
}

fn rotation_block(a: &mut Matrix6<f64>, i: usize, gamma: f64, freq: f64) {
    a[(i, i)] = -gamma;
    a[(i, i + 1)] = freq;
    a[(i + 1, i)] = -freq;
    a[(i + 1, i + 1)] = -gamma;
}

/// Quadrature drift matrix of the linearized Langevin equations
///
/// ```text
/// da/dt = -(gamma_a + i delta_a) a - i g m
/// db/dt = -(gamma_b + i omega_b) b - i (G* m + G m†)
/// dm/dt = -(gamma_m + i delta_m) m - i g a - i G (b + b†) + zeta m†
/// ```
pub fn build_drift(p: &SystemParams, g_eff: Complex64, zeta: Complex64) -> Matrix6<f64> {
    let mut a = Matrix6::zeros();
    rotation_block(&mut a, IX_XA, p.gamma_a, p.delta_a);
    rotation_block(&mut a, IX_XB, p.gamma_b, p.omega_b);
    rotation_block(&mut a, IX_XM, p.gamma_m, p.delta_m);

    // beam splitter a <-> m
    a[(IX_XA, IX_PM)] += p.g;
    a[(IX_PA, IX_XM)] -= p.g;
    a[(IX_XM, IX_PA)] += p.g;
    a[(IX_PM, IX_XA)] -= p.g;

    // dispersive magnomechanics: mechanics is pushed by sqrt2 (G_r x_m + G_i p_m),
    // the magnon is displaced along the G direction by x_b
    a[(IX_PB, IX_XM)] -= 2.0 * g_eff.re;
    a[(IX_PB, IX_PM)] -= 2.0 * g_eff.im;
    a[(IX_XM, IX_XB)] += 2.0 * g_eff.im;
    a[(IX_PM, IX_XB)] -= 2.0 * g_eff.re;

    // squeezing zeta m†
    a[(IX_XM, IX_XM)] += zeta.re;
    a[(IX_XM, IX_PM)] += zeta.im;
    a[(IX_PM, IX_XM)] += zeta.im;
    a[(IX_PM, IX_PM)] -= zeta.re;
    a
}

/// Symmetrized input-noise matrix: `gamma_k (2 n_k + 1)` on both
/// quadratures of mode `k`.
pub fn build_diffusion(p: &SystemParams) -> Matrix6<f64> {
    let mut d = Matrix6::zeros();
    for (i, gamma, n) in [
        (IX_XA, p.gamma_a, p.n_a),
        (IX_XB, p.gamma_b, p.n_b),
        (IX_XM, p.gamma_m, p.n_m),
    ] {
        let v = gamma * (2.0 * n + 1.0);
        d[(i, i)] = v;
        d[(i + 1, i + 1)] = v;
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub stable: bool,
    /// Largest real part over the drift eigenvalues.
    pub abscissa: f64,
}

pub fn check_stability(drift: &Matrix6<f64>, omega_b: f64) -> Stability {
    let abscissa = drift
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Stability {
        stable: abscissa < -STABILITY_MARGIN * omega_b,
        abscissa,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub v: Matrix6<f64>,
    /// `||A V + V A^T + D||_F / ||D||_F`.
    pub residual: f64,
    pub condition: f64,
    /// Set when the Kronecker system is badly conditioned or the residual
    /// exceeds 1e-10.
    pub ill_conditioned: bool,
}

impl CovarianceMatrix {
    /// Smallest eigenvalue of the Hermitian matrix `V + (i/2) Omega`.
    pub fn physicality_margin(&self) -> f64 {
        let mut h = self.v.map(|x| Complex64::new(x, 0.0));
        for k in 0..3 {
            let (i, j) = (2 * k, 2 * k + 1);
            h[(i, j)] += Complex64::new(0.0, 0.5);
            h[(j, i)] -= Complex64::new(0.0, 0.5);
        }
        h.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_physical(&self) -> bool {
        self.physicality_margin() >= -PHYSICALITY_TOL
    }
}

/// Solve `A V + V A^T + D = 0` through the 36-unknown Kronecker system.
pub fn solve_lyapunov(drift: &Matrix6<f64>, diffusion: &Matrix6<f64>) -> Result<CovarianceMatrix> {
    let st = check_stability(drift, 1.0);
    if !(st.abscissa < 0.0) {
        return Err(Error::Unstable {
            abscissa: st.abscissa,
        });
    }
    const N: usize = 6;
    let mut k = DMatrix::<f64>::zeros(N * N, N * N);
    for j in 0..N {
        for i in 0..N {
            let row = i + N * j;
            for m in 0..N {
                k[(row, m + N * j)] += drift[(i, m)];
                k[(row, i + N * m)] += drift[(j, m)];
            }
        }
    }
    let rhs = DVector::from_iterator(N * N, diffusion.iter().map(|x| -x));
    let lu = k.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::Unstable {
        abscissa: st.abscissa,
    })?;
    // one step of iterative refinement
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let condition = match lu.try_inverse() {
        Some(inv) => one_norm(&k) * one_norm(&inv),
        None => f64::INFINITY,
    };

    let raw = Matrix6::from_column_slice(x.as_slice());
    let v = (raw + raw.transpose()) * 0.5;
    let res = drift * v + v * drift.transpose() + diffusion;
    let residual = res.norm() / diffusion.norm();
    Ok(CovarianceMatrix {
        v,
        residual,
        condition,
        ill_conditioned: condition > CONDITION_LIMIT || residual > RESIDUAL_TOL,
    })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Mean phonon number `(V_xb,xb + V_pb,pb - 1)/2`.
pub fn phonon_number(cov: &CovarianceMatrix) -> Result<f64> {
    let margin = cov.physicality_margin();
    if margin < -PHYSICALITY_TOL {
        return Err(Error::UnphysicalCovariance {
            min_eigenvalue: margin,
        });
    }
    Ok((cov.v[(IX_XB, IX_XB)] + cov.v[(IX_PB, IX_PB)] - 1.0) / 2.0)
}

/// Phonon number of the full linear model with real coupling `|G|`.
pub fn full_phonon_number(p: &SystemParams, sq: &SqueezingParams) -> Result<f64> {
    let model = GaussianModel::new(p, Complex64::new(p.g_mag, 0.0), sq.to_complex())?;
    phonon_number(&model.covariance(p.omega_b)?)
}

/// Attach the full-model phonon number to a rate-theory report.
pub fn with_full_model(
    mut report: CoolingReport,
    p: &SystemParams,
    sq: &SqueezingParams,
) -> Result<CoolingReport> {
    report.n_full = Some(full_phonon_number(p, sq)?);
    Ok(report)
}

/// Frequency-domain evaluation of the `X = m + m†` spectrum.
///
/// Works in the mode basis `u = (a, a†, b, b†, m, m†)`, where the dynamics
/// read `du/dt = M u + B xi` with input correlations
/// `<k_in(t) k_in†(t')> = (n_k + 1) delta` and `<k_in† k_in> = n_k delta`.
/// With `u(w) = ∫ u(t) e^{iwt} dt`, `(-i w - M) u(w) = B xi(w)` and
/// `S(w) = sum_jk r_j(w) C_jk r_k(-w)` where `r = c^T (-i w - M)^{-1} B`.
#[derive(Debug, Clone)]
pub struct SpectrumOracle {
    mode_drift: Matrix6<Complex64>,
    input_gain: Vector6<f64>,
    occupancy: [f64; 3],
}

impl SpectrumOracle {
    pub fn new(p: &SystemParams, g_eff: Complex64, zeta: Complex64) -> Result<Self> {
        let model = GaussianModel::new(p, g_eff, zeta)?;
        let st = model.stability(p.omega_b);
        if !st.stable {
            return Err(Error::Unstable {
                abscissa: st.abscissa,
            });
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let mut to_modes = Matrix6::<Complex64>::zeros();
        let mut to_quads = Matrix6::<Complex64>::zeros();
        for k in 0..3 {
            let (r, c) = (2 * k, 2 * k + 1);
            to_modes[(r, r)] = one * s;
            to_modes[(r, c)] = i * s;
            to_modes[(c, r)] = one * s;
            to_modes[(c, c)] = -i * s;
            to_quads[(r, r)] = one * s;
            to_quads[(r, c)] = one * s;
            to_quads[(c, r)] = -i * s;
            to_quads[(c, c)] = i * s;
        }
        let drift = model.drift.map(|x| Complex64::new(x, 0.0));
        let mode_drift = to_modes * drift * to_quads;
        let gains = [
            p.gamma_a, p.gamma_a, p.gamma_b, p.gamma_b, p.gamma_m, p.gamma_m,
        ];
        Ok(SpectrumOracle {
            mode_drift,
            input_gain: Vector6::from_iterator(gains.iter().map(|g| (2.0 * g).sqrt())),
            occupancy: [p.n_a, p.n_b, p.n_m],
        })
    }

    fn response_row(&self, omega: f64) -> Result<Vector6<Complex64>> {
        let sys = Matrix6::<Complex64>::identity() * Complex64::new(0.0, -omega) - self.mode_drift;
        let mut c = Vector6::<Complex64>::zeros();
        c[4] = Complex64::new(1.0, 0.0);
        c[5] = Complex64::new(1.0, 0.0);
        let y = sys
            .transpose()
            .lu()
            .solve(&c)
            .filter(|y| y.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            .ok_or(Error::SingularSpectrum { omega })?;
        Ok(y.component_mul(&self.input_gain.map(|g| Complex64::new(g, 0.0))))
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        let fwd = self.response_row(omega)?;
        let bwd = self.response_row(-omega)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (k, n) in self.occupancy.iter().enumerate() {
            let (ann, cre) = (2 * k, 2 * k + 1);
            s += fwd[ann] * bwd[cre] * (n + 1.0) + fwd[cre] * bwd[ann] * *n;
        }
        Ok(s.re)
    }
}

pub fn numeric_spectrum(
    omega: f64,
    p: &SystemParams,
    g_eff: Complex64,
    zeta: Complex64,
) -> Result<f64> {
    SpectrumOracle::new(p, g_eff, zeta)?.eval(omega)
}
