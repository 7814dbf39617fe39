//! Closed-form weak-coupling cooling theory.
//!
//! The magnon mode (optionally hybridized with the cavity) acts as a
//! reservoir for the mechanics. Its quadrature spectrum `S(omega)` of
//! `X = m + m†`, transformed with `exp(+i omega t)`, sets the Stokes and
//! anti-Stokes rates `A± = |G|^2 S(∓omega_b)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{SqueezingParams, SystemParams};

const HBAR: f64 = 1.054_571_817e-34;
const K_B: f64 = 1.380_649e-23;

/// Relative size below which the spectrum denominator counts as zero.
const SINGULAR_RTOL: f64 = 1e-14;

/// `chi(omega) = 1 / (gamma + i (detuning - omega))`.
pub fn natural_susceptibility(gamma: f64, detuning: f64, omega: f64) -> Result<Complex64> {
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
    }
    Ok(Complex64::new(gamma, detuning - omega).inv())
}

/// `A(omega) = 1/chi_m(omega) + g^2 chi_a(omega)`.
pub fn coupled_response(omega: f64, p: &SystemParams) -> Result<Complex64> {
    p.validate()?;
    Ok(response(omega, p))
}

fn response(omega: f64, p: &SystemParams) -> Complex64 {
    let chi_a = Complex64::new(p.gamma_a, p.delta_a - omega).inv();
    Complex64::new(p.gamma_m, p.delta_m - omega) + p.g * p.g * chi_a
}

/// Magnon quadrature spectrum
///
/// `S(w) = 2 (gamma_m + g^2 gamma_a |chi_a(w)|^2) |zeta + A(-w)|^2 / |A(w) A*(-w) - |zeta|^2|^2`
///
/// for vacuum magnon and cavity baths. Stability of the full model is not
/// checked here; see [`crate::oracle::check_stability`].
pub fn magnon_spectrum(omega: f64, p: &SystemParams, sq: &SqueezingParams) -> Result<f64> {
    p.validate()?;
    spectrum_unchecked(omega, p, sq)
}

pub(crate) fn spectrum_unchecked(
    omega: f64,
    p: &SystemParams,
    sq: &SqueezingParams,
) -> Result<f64> {
    let zeta = sq.to_complex();
    let zeta2 = sq.zeta_abs * sq.zeta_abs;
    let a_pos = response(omega, p);
    let a_neg = response(-omega, p);
    let denom = a_pos * a_neg.conj() - zeta2;
    let scale = a_pos.norm() * a_neg.norm() + zeta2;
    if !(denom.norm() > SINGULAR_RTOL * scale) {
        return Err(Error::SingularSpectrum { omega });
    }
    let chi_a2 = 1.0 / (p.gamma_a * p.gamma_a + (p.delta_a - omega).powi(2));
    let weight = p.gamma_m + p.g * p.g * p.gamma_a * chi_a2;
    Ok(2.0 * weight * (zeta + a_neg).norm_sqr() / denom.norm_sqr())
}

/// Stokes (`a_plus`) and anti-Stokes (`a_minus`) scattering rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringRates {
    pub s_minus: f64,
    pub s_plus: f64,
    pub a_plus: f64,
    pub a_minus: f64,
}

pub fn scattering_rates(p: &SystemParams, sq: &SqueezingParams) -> Result<ScatteringRates> {
    p.validate()?;
    let s_minus = spectrum_unchecked(-p.omega_b, p, sq)?;
    let s_plus = spectrum_unchecked(p.omega_b, p, sq)?;
    let g2 = p.g_mag * p.g_mag;
    Ok(ScatteringRates {
        s_minus,
        s_plus,
        a_plus: g2 * s_minus,
        a_minus: g2 * s_plus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingReport {
    pub s_minus: f64,
    pub s_plus: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub gamma_net: f64,
    pub n_st: f64,
    /// Phonon number of the full linear model, when it has been evaluated.
    pub n_full: Option<f64>,
    pub weak_coupling_ok: bool,
}

/// Steady-state phonon number from the rate balance
///
/// `N_st = (2 gamma_b n_b + A+) / (2 gamma_b + Gamma_b)`, `Gamma_b = A- - A+`.
///
/// `gamma_b` is an amplitude damping rate, so thermal phonons relax at
/// `2 gamma_b`; this is the form the full covariance model converges to.
pub fn steady_phonon_number(p: &SystemParams, sq: &SqueezingParams) -> Result<CoolingReport> {
    let rates = scattering_rates(p, sq)?;
    let gamma_net = rates.a_minus - rates.a_plus;
    let relax = 2.0 * p.gamma_b;
    let total = relax + gamma_net;
    if !(total > 0.0) {
        return Err(Error::Heating { total });
    }
    Ok(CoolingReport {
        s_minus: rates.s_minus,
        s_plus: rates.s_plus,
        a_plus: rates.a_plus,
        a_minus: rates.a_minus,
        gamma_net,
        n_st: (relax * p.n_b + rates.a_plus) / total,
        n_full: None,
        weak_coupling_ok: p.weak_coupling_ok(),
    })
}

/// Squeezing that nulls the Stokes sideband `S(-omega_b)` when
/// `delta_a = omega_b`: `zeta = -(gamma'_m + i (delta_m - omega_b))` with
/// `gamma'_m = gamma_m + g^2/gamma_a`.
///
/// At `delta_m = omega_b` this is `(gamma'_m, pi)`.
pub fn optimal_squeezing(p: &SystemParams) -> Result<SqueezingParams> {
    p.validate()?;
    Ok(SqueezingParams::from_complex(optimal_zeta(p)))
}

pub(crate) fn optimal_zeta(p: &SystemParams) -> Complex64 {
    -Complex64::new(p.dressed_magnon_damping(), p.delta_m - p.omega_b)
}

/// Bose-Einstein occupancy of a mode at angular frequency `omega` (rad/s)
/// and temperature `temperature` (K).
pub fn thermal_occupancy(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::invalid(
            "temperature",
            format!("must be >= 0, got {temperature}"),
        ));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn lorentzian(gamma: f64, delta: f64, omega: f64) -> f64 {
        2.0 * gamma / (gamma * gamma + (delta - omega).powi(2))
    }

    #[test]
    fn susceptibility_identity_and_resonance() {
        assert_eq!(
            natural_susceptibility(1.0, 0.0, 0.0).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let chi = natural_susceptibility(0.3, 0.7, 0.7).unwrap();
        assert_eq!(chi.im, 0.0);
        assert!((chi.re - 1.0 / 0.3).abs() < 1e-15);
        assert!(natural_susceptibility(0.0, 1.0, 0.0).is_err());
        assert!(natural_susceptibility(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn susceptibility_off_resonance() {
        // 1/(0.1 + 2i) = (0.1 - 2i)/4.01
        let chi = natural_susceptibility(0.1, 1.0, -1.0).unwrap();
        assert!((chi.re - 0.1 / 4.01).abs() < 1e-16);
        assert!((chi.im + 2.0 / 4.01).abs() < 1e-16);
    }

    #[test]
    fn coupled_response_limits() {
        let mut p = SystemParams::figure2(0.1);
        p.delta_m = 1.3;
        let a = coupled_response(0.4, &p).unwrap();
        assert_eq!(a, Complex64::new(0.1, 0.9));
        assert_eq!(coupled_response(1.3, &p).unwrap(), Complex64::new(0.1, 0.0));

        // g=0.5, gamma_a=1, delta_a=1, gamma_m=0.1, delta_m=1, omega=1:
        // 0.1 + 0i + 0.25 * 1/(1 + 0i) = 0.35
        p.g = 0.5;
        p.delta_m = 1.0;
        let a = coupled_response(1.0, &p).unwrap();
        assert!((a - Complex64::new(0.35, 0.0)).norm() < 1e-16);
        // omega = 0: 0.1 + 1i + 0.25/(1 + 1i) = 0.225 + 0.875i
        let a = coupled_response(0.0, &p).unwrap();
        assert!((a - Complex64::new(0.225, 0.875)).norm() < 1e-15);
    }

    #[test]
    fn spectrum_reduces_to_lorentzian() {
        let mut p = SystemParams::figure2(0.37);
        p.delta_m = 0.8;
        for i in 0..=200 {
            let w = -5.0 + 0.05 * i as f64;
            let s = magnon_spectrum(w, &p, &SqueezingParams::NONE).unwrap();
            let l = lorentzian(0.37, 0.8, w);
            assert!((s - l).abs() <= 1e-12 * l, "w={w}: {s} vs {l}");
        }
        let peak = magnon_spectrum(0.8, &p, &SqueezingParams::NONE).unwrap();
        assert!((peak - 2.0 / 0.37).abs() < 1e-13);
    }

    #[test]
    fn stokes_sideband_nulled_at_optimum() {
        for gm in [0.1, 1.0, 5.0] {
            let p = SystemParams::figure2(gm);
            let sq = optimal_squeezing(&p).unwrap();
            assert!((sq.zeta_abs - gm).abs() < 1e-15);
            assert_eq!(sq.phi, PI);
            let s_minus = magnon_spectrum(-1.0, &p, &sq).unwrap();
            let s_plus = magnon_spectrum(1.0, &p, &sq).unwrap();
            assert!(
                s_minus < 1e-10 * s_plus,
                "gamma_m={gm}: {s_minus} / {s_plus}"
            );
        }
    }

    #[test]
    fn optimal_squeezing_with_cavity_and_detuning() {
        let mut p = SystemParams::figure2(0.1);
        p.g = 0.4;
        p.gamma_a = 2.0;
        let sq = optimal_squeezing(&p).unwrap();
        assert!((sq.zeta_abs - 0.18).abs() < 1e-15);
        assert_eq!(sq.phi, PI);

        let mut p = SystemParams::figure2(0.1);
        p.delta_m = 1.2;
        let sq = optimal_squeezing(&p).unwrap();
        assert!((sq.zeta_abs - 0.05f64.sqrt()).abs() < 1e-15);
        let z = sq.to_complex();
        assert!((z - Complex64::new(-0.1, -0.2)).norm() < 1e-15);
        assert!(magnon_spectrum(-1.0, &p, &sq).unwrap() < 1e-28);
    }

    #[test]
    fn lorentzian_rates() {
        let p = SystemParams::figure2(0.1);
        let r = scattering_rates(&p, &SqueezingParams::NONE).unwrap();
        let g2 = 0.01;
        assert!((r.a_minus - g2 * 2.0 / 0.1).abs() < 1e-14);
        assert!((r.a_plus - g2 * 0.2 / (0.01 + 4.0)).abs() < 1e-16);

        let mut p0 = p;
        p0.g_mag = 0.0;
        let r0 = scattering_rates(&p0, &optimal_squeezing(&p0).unwrap()).unwrap();
        assert_eq!((r0.a_plus, r0.a_minus), (0.0, 0.0));
    }

    #[test]
    fn report_without_coupling_is_thermal() {
        let mut p = SystemParams::figure2(1.0);
        p.g_mag = 0.0;
        let r = steady_phonon_number(&p, &SqueezingParams::NONE).unwrap();
        assert_eq!(r.n_st, 100.0);
        assert_eq!(r.gamma_net, 0.0);
    }

    #[test]
    fn report_identity_and_closed_form() {
        // Lorentzian rates substituted by hand: A- = 0.2, A+ = 0.002/4.01
        let p = SystemParams::figure2(0.1);
        let r = steady_phonon_number(&p, &SqueezingParams::NONE).unwrap();
        let a_plus = 0.002 / 4.01;
        let expected = (2e-5 * 100.0 + a_plus) / (2e-5 + 0.2 - a_plus);
        assert!((r.n_st - expected).abs() < 1e-14 * expected);
        assert_eq!(r.gamma_net, r.a_minus - r.a_plus);
        assert!(r.weak_coupling_ok);
    }

    #[test]
    fn heating_is_rejected() {
        let mut p = SystemParams::figure2(0.1);
        p.delta_m = -1.0;
        assert!(matches!(
            steady_phonon_number(&p, &SqueezingParams::NONE),
            Err(Error::Heating { .. })
        ));
    }

    #[test]
    fn singular_denominator_is_an_error() {
        // g=0, zeta real, omega=0: denominator gamma^2 + delta^2 - |zeta|^2
        let mut p = SystemParams::figure2(0.6);
        p.delta_m = 0.8;
        let sq = SqueezingParams::new(1.0, 0.3).unwrap();
        assert_eq!(
            magnon_spectrum(0.0, &p, &sq),
            Err(Error::SingularSpectrum { omega: 0.0 })
        );
    }

    #[test]
    fn thermal_occupancy_anchors() {
        assert_eq!(thermal_occupancy(1.0, 0.0).unwrap(), 0.0);
        let n = thermal_occupancy(2.0 * PI * 10e6, 0.048).unwrap();
        assert!((95.0..=105.0).contains(&n), "{n}");
        let n = thermal_occupancy(2.0 * PI * 10e9, 0.048).unwrap();
        assert!(n < 1e-4);
        assert!(thermal_occupancy(0.0, 1.0).is_err());
        assert!(thermal_occupancy(1.0, -1.0).is_err());
    }
}
