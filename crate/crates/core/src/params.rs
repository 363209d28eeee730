//! Physical parameters and the reduction from the ice/liquid/salt Hamiltonian
//! to Ising variables.
//!
//! The inverse temperature is absorbed into every coupling; all quantities are
//! dimensionless.

use alloc::format;
use libm::exp;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frozen spin value on the one-site shell around the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Plus,
    Minus,
}

impl Boundary {
    pub fn spin(self) -> i8 {
        match self {
            Boundary::Plus => 1,
            Boundary::Minus => -1,
        }
    }
}

/// Parameters of the fixed-concentration model in Ising form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Ferromagnetic coupling `J >= 0`.
    #[serde(rename = "J")]
    pub j: f64,
    /// External field acting on the spins (the swept axis of the phase diagram).
    pub h: f64,
    /// Salt-ice repulsion; finite and non-negative.
    pub kappa: f64,
    /// Salt concentration in `[0, 1)`.
    pub c: f64,
    /// Lattice dimension.
    pub d: u32,
    pub bc: Boundary,
}

/// Couplings of the general Hamiltonian before the change to Ising variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    /// Ice-ice attraction.
    pub alpha_ice: f64,
    /// Liquid-liquid attraction.
    pub alpha_liquid: f64,
    /// Liquid fugacity.
    pub mu_liquid: f64,
    /// Salt fugacity; only meaningful in the grand-canonical picture.
    pub mu_salt: f64,
    pub kappa: f64,
    pub d: u32,
}

/// Maps the raw couplings to `(J, h)`:
/// `J = (alpha_L + alpha_I) / 4`, `h = (d / 2)(alpha_L - alpha_I) + mu_L / 2`.
pub fn reduce_to_ising(raw: &RawParams) -> Result<(f64, f64)> {
    let fields = [
        ("alpha_ice", raw.alpha_ice),
        ("alpha_liquid", raw.alpha_liquid),
        ("mu_liquid", raw.mu_liquid),
        ("mu_salt", raw.mu_salt),
        ("kappa", raw.kappa),
    ];
    for (name, v) in fields {
        if !v.is_finite() {
            return Err(Error::param(name, format!("{name} not finite")));
        }
    }
    if raw.kappa < 0.0 {
        return Err(Error::param("kappa", "kappa negative"));
    }
    let j = (raw.alpha_liquid + raw.alpha_ice) / 4.0;
    let h = 0.5 * raw.d as f64 * (raw.alpha_liquid - raw.alpha_ice) + 0.5 * raw.mu_liquid;
    Ok((j, h))
}

/// Field of the Ising model obtained by summing out salt grand-canonically:
/// `h + ½ log[(1 + e^{mu_S}) / (1 + e^{mu_S - kappa})]`.
///
/// This is the picture the fixed-concentration ensemble replaces; it is kept
/// for comparison only.
pub fn effective_field(h: f64, mu_salt: f64, kappa: f64) -> f64 {
    if kappa == 0.0 {
        return h;
    }
    h + 0.5 * (softplus(mu_salt) - softplus(mu_salt - kappa))
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(exp(-x))
    } else {
        libm::log1p(exp(x))
    }
}

impl ModelParams {
    /// Checks every invariant and returns the parameters unchanged.
    pub fn validate(self) -> Result<Self> {
        let ModelParams {
            j, h, kappa, c, d, ..
        } = self;
        if !j.is_finite() {
            return Err(Error::param("J", "J not finite"));
        }
        if j < 0.0 {
            return Err(Error::param("J", "J negative"));
        }
        if !h.is_finite() {
            return Err(Error::param("h", "h not finite"));
        }
        if kappa.is_nan() {
            return Err(Error::param("kappa", "kappa not a number"));
        }
        if kappa < 0.0 {
            return Err(Error::param("kappa", "kappa negative"));
        }
        if kappa.is_infinite() {
            return Err(Error::param(
                "kappa",
                "kappa infinite (only finite kappa is supported)",
            ));
        }
        if !(0.0..1.0).contains(&c) {
            return Err(Error::param("c", "c out of [0,1)"));
        }
        if d < 1 {
            return Err(Error::param("d", "d must be at least 1"));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn raw(alpha_ice: f64, alpha_liquid: f64, mu_liquid: f64, d: u32) -> RawParams {
        RawParams {
            alpha_ice,
            alpha_liquid,
            mu_liquid,
            mu_salt: 0.3,
            kappa: 1.0,
            d,
        }
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_to_ising(&raw(2.0, 2.0, 0.0, 2)).unwrap(), (1.0, 0.0));
        assert_eq!(reduce_to_ising(&raw(0.0, 4.0, 0.0, 2)).unwrap(), (1.0, 4.0));
        assert_eq!(
            reduce_to_ising(&raw(1.0, 3.0, -2.0, 3)).unwrap(),
            (1.0, 2.0)
        );
    }

    #[test]
    fn reduction_rejects_non_finite() {
        let err = reduce_to_ising(&raw(f64::NAN, 1.0, 0.0, 2)).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidParam {
                field: "alpha_ice",
                ..
            }
        ));
        let mut r = raw(1.0, 1.0, 0.0, 2);
        r.mu_salt = f64::INFINITY;
        assert!(reduce_to_ising(&r).is_err());
    }

    #[test]
    fn effective_field_limits() {
        for &mu in &[-30.0, -1.0, 0.0, 2.5, 40.0] {
            assert_eq!(effective_field(0.7, mu, 0.0), 0.7);
        }
        assert!((effective_field(0.1, -60.0, 3.0) - 0.1).abs() < 1e-20);
        let big = effective_field(0.1, 0.0, 80.0);
        assert!((big - (0.1 + 0.5 * core::f64::consts::LN_2)).abs() < 1e-15);
        // large fugacity saturates to h + kappa/2
        assert!((effective_field(0.0, 800.0, 2.0) - 1.0).abs() < 1e-12);
    }

    fn good() -> ModelParams {
        ModelParams {
            j: 0.6,
            h: -0.01,
            kappa: 1.0,
            c: 0.1,
            d: 2,
            bc: Boundary::Plus,
        }
    }

    #[test]
    fn validate_accepts_valid() {
        assert_eq!(good().validate().unwrap(), good());
    }

    #[test]
    fn validate_reports_offending_field() {
        let err = ModelParams { c: 1.2, ..good() }.validate().unwrap_err();
        assert_eq!(
            err,
            Error::InvalidParam {
                field: "c",
                reason: "c out of [0,1)".into()
            }
        );
        let err = ModelParams {
            kappa: -1.0,
            ..good()
        }
        .validate()
        .unwrap_err();
        assert!(err.to_string().contains("kappa negative"));
        assert!(ModelParams {
            kappa: f64::INFINITY,
            ..good()
        }
        .validate()
        .is_err());
        assert!(ModelParams { d: 0, ..good() }.validate().is_err());
        assert!(ModelParams { j: -0.1, ..good() }.validate().is_err());
        assert!(ModelParams { c: 1.0, ..good() }.validate().is_err());
    }
}
