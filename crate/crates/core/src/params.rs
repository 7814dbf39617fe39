//! Parameter records shared by every computation.
//!
//! All frequencies and rates are expressed in units of the mechanical
//! frequency, so `omega_b` is normally `1.0`. Damping rates are amplitude
//! (half-width) rates: a free mode obeys `dk/dt = -(gamma + i*delta) k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear-response parameters of the three-mode system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega_b: f64,
    pub delta_a: f64,
    pub delta_m: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_m: f64,
    /// Magnon-cavity coupling.
    pub g: f64,
    /// Magnitude of the effective magnomechanical coupling |G|.
    pub g_mag: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub n_m: f64,
}

/// Names accepted by [`SystemParams::get`] and [`SystemParams::set`].
pub const SYSTEM_FIELDS: [&str; 11] = [
    "omega_b", "delta_a", "delta_m", "gamma_a", "gamma_b", "gamma_m", "g", "g_mag", "n_a", "n_b",
    "n_m",
];

impl SystemParams {
    /// The fixed parameter set shared by all Fig. 2 panels, for a given
    /// magnon damping: `n_b = 100`, `n_a = n_m = 0`, `|G| = 0.1`,
    /// `gamma_a = 1`, `g = 0`, `gamma_b = 1e-5`, `delta_a = delta_m = 1`.
    pub fn figure2(gamma_m: f64) -> Self {
        SystemParams {
            omega_b: 1.0,
            delta_a: 1.0,
            delta_m: 1.0,
            gamma_a: 1.0,
            gamma_b: 1e-5,
            gamma_m,
            g: 0.0,
            g_mag: 0.1,
            n_a: 0.0,
            n_b: 100.0,
            n_m: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_b", self.omega_b),
            ("delta_a", self.delta_a),
            ("delta_m", self.delta_m),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_m", self.gamma_m),
            ("g", self.g),
            ("g_mag", self.g_mag),
            ("n_a", self.n_a),
            ("n_b", self.n_b),
            ("n_m", self.n_m),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("omega_b", self.omega_b),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_m", self.gamma_m),
        ] {
            if v <= 0.0 {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("g", self.g),
            ("g_mag", self.g_mag),
            ("n_a", self.n_a),
            ("n_b", self.n_b),
            ("n_m", self.n_m),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// `|G| < omega_b`, the regime where the rate formula for the phonon
    /// number is meaningful.
    pub fn weak_coupling_ok(&self) -> bool {
        self.g_mag < self.omega_b
    }

    /// Magnon damping dressed by the cavity, `gamma_m + g^2/gamma_a`.
    pub fn dressed_magnon_damping(&self) -> f64 {
        self.gamma_m + self.g * self.g / self.gamma_a
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "omega_b" => self.omega_b,
            "delta_a" => self.delta_a,
            "delta_m" => self.delta_m,
            "gamma_a" => self.gamma_a,
            "gamma_b" => self.gamma_b,
            "gamma_m" => self.gamma_m,
            "g" => self.g,
            "g_mag" => self.g_mag,
            "n_a" => self.n_a,
            "n_b" => self.n_b,
            "n_m" => self.n_m,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "omega_b" => &mut self.omega_b,
            "delta_a" => &mut self.delta_a,
            "delta_m" => &mut self.delta_m,
            "gamma_a" => &mut self.gamma_a,
            "gamma_b" => &mut self.gamma_b,
            "gamma_m" => &mut self.gamma_m,
            "g" => &mut self.g,
            "g_mag" => &mut self.g_mag,
            "n_a" => &mut self.n_a,
            "n_b" => &mut self.n_b,
            "n_m" => &mut self.n_m,
            other => return Err(Error::Schema(format!("unknown system parameter `{other}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Express every rate in units of `omega_b` (occupancies unchanged).
    pub fn normalized(&self) -> Self {
        let w = self.omega_b;
        SystemParams {
            omega_b: 1.0,
            delta_a: self.delta_a / w,
            delta_m: self.delta_m / w,
            gamma_a: self.gamma_a / w,
            gamma_b: self.gamma_b / w,
            gamma_m: self.gamma_m / w,
            g: self.g / w,
            g_mag: self.g_mag / w,
            ..*self
        }
    }
}

/// Fold an angle into the principal range `(-pi, pi]`.
pub fn principal_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Magnon squeezing parameter `zeta = zeta_abs * exp(i phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezingParams {
    pub zeta_abs: f64,
    pub phi: f64,
}

impl SqueezingParams {
    pub const NONE: SqueezingParams = SqueezingParams {
        zeta_abs: 0.0,
        phi: 0.0,
    };

    pub fn new(zeta_abs: f64, phi: f64) -> Result<Self> {
        if !(zeta_abs.is_finite() && zeta_abs >= 0.0) {
            return Err(Error::invalid(
                "zeta_abs",
                format!("must be finite and >= 0, got {zeta_abs}"),
            ));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", format!("must be finite, got {phi}")));
        }
        Ok(SqueezingParams {
            zeta_abs,
            phi: principal_angle(phi),
        })
    }

    pub fn from_complex(zeta: Complex64) -> Self {
        let zeta_abs = zeta.norm();
        let phi = if zeta_abs == 0.0 {
            0.0
        } else {
            principal_angle(zeta.arg())
        };
        SqueezingParams { zeta_abs, phi }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.zeta_abs, self.phi)
    }
}
