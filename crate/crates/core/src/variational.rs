//! The variational principle for the magnetization at fixed salt
//! concentration.
//!
//! `G(m) = inf_theta [-h m - kappa theta c - xi(m, theta; c) + F(m)]` is
//! strictly convex for `kappa c > 0`, and its minimizer `m(h, c)` is strictly
//! increasing in `h`. Differentiating along the optimal split gives the
//! stationarity condition
//!
//! ```text
//! ½ log[(1 - q+(m)) / (1 - q-(m))] + F'(m) = h
//! ```
//!
//! where `q±` are the mole fractions, which the minimizer finds by bisection.
//! On the coexistence interval `F' = 0`, so the same formula traces the
//! phase boundaries `h±(c)`.

use alloc::vec::Vec;
use libm::{exp, log1p};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_energy::free_energy;
use crate::magnetization::MagnetizationModel;
use crate::numeric::bisect_increasing;
use crate::params::{Boundary, ModelParams};
use crate::salt::{optimal_theta, xi};

/// `-h m - kappa theta c - xi(m, theta; c) + F(m)`; `+inf` where the split is
/// infeasible or `|m|` reaches 1.
pub fn script_g(m: f64, theta: f64, params: &ModelParams, model: &MagnetizationModel) -> f64 {
    let ModelParams { h, kappa, c, .. } = *params;
    let f = match free_energy(m, model) {
        Ok(f) => f,
        Err(_) => return f64::INFINITY,
    };
    let entropy = xi(m, theta, c);
    if entropy == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    -h * m - kappa * theta * c - entropy + f
}

/// `G(m) = script_g(m, theta*(m))`.
pub fn big_g(m: f64, params: &ModelParams, model: &MagnetizationModel) -> f64 {
    match optimal_theta(m, params.c, params.kappa) {
        Ok(split) => script_g(m, split.theta, params, model),
        Err(_) => f64::INFINITY,
    }
}

/// Equilibrium salt occupation on plus (`q_plus`) and minus (`q_minus`)
/// spins at magnetization `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleFractions {
    pub q_plus: f64,
    pub q_minus: f64,
    pub m: f64,
    pub c: f64,
    pub kappa: f64,
}

impl MoleFractions {
    /// `q+ / (1 - q+)`.
    pub fn odds_plus(&self) -> f64 {
        self.q_plus / (1.0 - self.q_plus)
    }

    /// `q- / (1 - q-)`, equal to `e^{-kappa}` times [`Self::odds_plus`].
    pub fn odds_minus(&self) -> f64 {
        self.q_minus / (1.0 - self.q_minus)
    }

    /// `½ log[(1 - q+) / (1 - q-)]`.
    pub fn field_shift(&self) -> f64 {
        0.5 * (log1p(-self.q_plus) - log1p(-self.q_minus))
    }
}

fn minus_from_plus(q_plus: f64, damp: f64) -> f64 {
    // odds(q-) = damp * odds(q+), damp = e^{-kappa}
    q_plus * damp / (1.0 - q_plus + q_plus * damp)
}

/// Solves `odds(q+) = e^kappa odds(q-)` together with
/// `q+ (1+m)/2 + q- (1-m)/2 = c`.
///
/// The solution is unique for every `c < 1`; the left side of the mass
/// balance is increasing in `q+` and the bracket `[0, 1]` always straddles it.
pub fn mole_fractions(m: f64, c: f64, kappa: f64) -> Result<MoleFractions> {
    if m.is_nan() || m.abs() >= 1.0 {
        return Err(Error::OutOfDomain { m });
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::Infeasible { m, c });
    }
    if kappa.is_nan() || kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::param("kappa", "kappa negative"));
    }
    let (a, b) = (0.5 * (1.0 + m), 0.5 * (1.0 - m));
    if c == 0.0 {
        return Ok(MoleFractions {
            q_plus: 0.0,
            q_minus: 0.0,
            m,
            c,
            kappa,
        });
    }
    if kappa == 0.0 {
        return Ok(MoleFractions {
            q_plus: c,
            q_minus: c,
            m,
            c,
            kappa,
        });
    }
    let damp = exp(-kappa);
    let q_plus = bisect_increasing(|q| a * q + b * minus_from_plus(q, damp) - c, 0.0, 1.0);
    Ok(MoleFractions {
        q_plus,
        q_minus: minus_from_plus(q_plus, damp),
        m,
        c,
        kappa,
    })
}

/// The field at which the minimizer equals `m`, for `m` on the coexistence
/// interval: `h = ½ log[(1 - q+) / (1 - q-)]`.
pub fn field_for_m(m: f64, c: f64, kappa: f64, m_star: f64) -> Result<f64> {
    if m.abs() > m_star {
        return Err(Error::OutsideCoexistence { m, m_star });
    }
    Ok(mole_fractions(m, c, kappa)?.field_shift())
}

/// `G'(m) + h`: the salt shift plus the free-energy slope. Strictly increasing
/// when `kappa c > 0`.
pub fn stationarity_field(m: f64, c: f64, kappa: f64, model: &MagnetizationModel) -> Result<f64> {
    let shift = mole_fractions(m, c, kappa)?.field_shift();
    Ok(shift + model.free_energy_slope(m)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `m >= m*`: the whole box looks like the plus (liquid) phase.
    Liquid,
    /// `m <= -m*`.
    Ice,
    /// `-m* < m < m*`: a macroscopic droplet of one phase inside the other.
    PhaseSeparation,
}

impl Region {
    pub fn classify(m: f64, m_star: f64) -> Region {
        if m >= m_star {
            Region::Liquid
        } else if m <= -m_star {
            Region::Ice
        } else {
            Region::PhaseSeparation
        }
    }
}

/// Minimizer of `G` with its optimal salt split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalSolution {
    pub m: f64,
    pub theta: f64,
    /// `G(m)` at the minimizer.
    pub value: f64,
    #[serde(rename = "q_plus")]
    pub p_plus: f64,
    #[serde(rename = "q_minus")]
    pub p_minus: f64,
    pub region: Region,
    /// Volume fraction of the droplet (the phase opposite to the boundary
    /// condition) from the lever rule, clamped to `[0, 1]`.
    pub droplet_fraction: f64,
}

/// Lever-rule volume fraction of the droplet: the minus phase inside a plus
/// boundary, or the plus phase inside a minus boundary.
pub fn droplet_fraction(m: f64, m_star: f64, bc: Boundary) -> f64 {
    if m_star <= 0.0 {
        return 0.0;
    }
    let lambda = match bc {
        Boundary::Plus => (m_star - m) / (2.0 * m_star),
        Boundary::Minus => (m_star + m) / (2.0 * m_star),
    };
    lambda.clamp(0.0, 1.0)
}

/// Finds the unique minimizer `m(h, c)` of `G` by bisection on the
/// stationarity map.
///
/// When `kappa c = 0`, `h = 0` and `m* > 0` every point of `[-m*, m*]`
/// minimizes `G`; this returns [`Error::NonUnique`] rather than picking one.
pub fn minimize_g(params: &ModelParams, model: &MagnetizationModel) -> Result<VariationalSolution> {
    let params = params.validate()?;
    let ModelParams {
        h, kappa, c, bc, ..
    } = params;
    let m_star = model.spontaneous_m();
    if kappa * c == 0.0 && h == 0.0 && m_star > 0.0 {
        return Err(Error::NonUnique { m_star });
    }
    let m = bisect_increasing(
        |m| match stationarity_field(m, c, kappa, model) {
            Ok(v) => v - h,
            Err(_) => {
                if m > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
        },
        -1.0,
        1.0,
    );
    let split = optimal_theta(m, c, kappa)?;
    Ok(VariationalSolution {
        m,
        theta: split.theta,
        value: script_g(m, split.theta, &params, model),
        p_plus: split.p_plus,
        p_minus: split.p_minus,
        region: Region::classify(m, m_star),
        droplet_fraction: droplet_fraction(m, m_star, bc),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub c: f64,
    pub h_minus: f64,
    pub h_plus: f64,
}

/// Boundary lines `h-(c) < h+(c)` of the phase-separation region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseBoundary {
    pub m_star: f64,
    pub kappa: f64,
    pub rows: Vec<BoundaryRow>,
}

impl PhaseBoundary {
    /// Second differences of `(h-, h+)` along the `c` grid, reported for
    /// inspection only; their sign may change near the origin.
    pub fn curvature(&self) -> Vec<(f64, f64, f64)> {
        self.rows
            .windows(3)
            .map(|w| {
                let dd = |f: fn(&BoundaryRow) -> f64| {
                    let (x0, x1, x2) = (w[0].c, w[1].c, w[2].c);
                    let s1 = (f(&w[1]) - f(&w[0])) / (x1 - x0);
                    let s2 = (f(&w[2]) - f(&w[1])) / (x2 - x1);
                    2.0 * (s2 - s1) / (x2 - x0)
                };
                (w[1].c, dd(|r| r.h_minus), dd(|r| r.h_plus))
            })
            .collect()
    }
}

/// One boundary row `(c, h-(c), h+(c))` with `h± = field_for_m(±m*, c, kappa)`.
pub fn boundary_row(c: f64, kappa: f64, m_star: f64) -> Result<BoundaryRow> {
    Ok(BoundaryRow {
        c,
        h_minus: field_for_m(-m_star, c, kappa, m_star)?,
        h_plus: field_for_m(m_star, c, kappa, m_star)?,
    })
}

/// Region of the minimizer at `(h, c)` read off the boundary lines:
/// `h >= h+` is liquid, `h <= h-` is ice, anything between separates.
pub fn classify(h: f64, c: f64, kappa: f64, m_star: f64) -> Result<Region> {
    let row = boundary_row(c, kappa, m_star)?;
    Ok(if h >= row.h_plus {
        Region::Liquid
    } else if h <= row.h_minus {
        Region::Ice
    } else {
        Region::PhaseSeparation
    })
}

/// Traces `h±(c)` over `c_grid`.
pub fn phase_boundaries(
    c_grid: &[f64],
    kappa: f64,
    model: &MagnetizationModel,
) -> Result<PhaseBoundary> {
    let m_star = model.spontaneous_m();
    if m_star <= 0.0 {
        return Err(Error::NoCoexistence);
    }
    let rows = c_grid
        .iter()
        .map(|&c| boundary_row(c, kappa, m_star))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseBoundary {
        m_star,
        kappa,
        rows,
    })
}

/// Dilute-limit comparison at `m = m*`: returns `(2 h+(c), q- - q+)`, which
/// agree to second order in `c`.
pub fn dilute_check(c: f64, kappa: f64, model: &MagnetizationModel) -> Result<(f64, f64)> {
    let m_star = model.spontaneous_m();
    let q = mole_fractions(m_star, c, kappa)?;
    Ok((2.0 * q.field_shift(), q.q_minus - q.q_plus))
}
