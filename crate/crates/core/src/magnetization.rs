//! Magnetization models: the field-to-magnetization map `m(h)`, its inverse
//! `h(m)` above the spontaneous magnetization, and `m* = m(0+)`.
//!
//! The true Ising curve has no closed form, so three providers are offered:
//!
//! * [`MagnetizationModel::MeanField`]: roots of `m = tanh(2dJ m + h)`.
//! * [`MagnetizationModel::Onsager2D`]: the exact square-lattice `m*`, with
//!   `h(m)` taken from the mean-field shape `atanh(m) - K m` whose gain `K` is
//!   calibrated so that `h(m*) = 0` exactly.
//! * [`MagnetizationModel::Tabulated`]: a measured `(h, m)` curve, interpolated
//!   with a monotone cubic and continued by a `tanh` tail beyond the last row.
//!
//! Every model is odd in `h`, strictly increasing for `h > 0`, and has
//! `h(m) -> inf` as `m -> 1`.

use alloc::{format, vec::Vec};
use libm::{atanh, log1p, sinh, sqrt, tanh};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect_increasing;

/// Critical coupling of the square-lattice Ising model, `½ log(1 + √2)`.
pub const ONSAGER_JC: f64 = 0.440_686_793_509_771_5;

/// Magnetization of the mean-field Ising model: the root of
/// `m = tanh(2dJ m + h)` carrying the sign of `h`.
///
/// At `h = 0` the largest non-negative root is returned, i.e. the
/// spontaneous magnetization `h -> 0+`.
pub fn mean_field_mag(h: f64, j: f64, d: u32) -> f64 {
    mag_for_gain(h, 2.0 * d as f64 * j)
}

fn mag_for_gain(h: f64, gain: f64) -> f64 {
    if h < 0.0 {
        return -mag_for_gain(-h, gain);
    }
    // g(m) = m - tanh(K m + h) is convex on m >= 0 with g(0) <= 0 < g(1).
    bisect_increasing(|m| m - tanh(gain * m + h), 0.0, 1.0)
}

/// Exact spontaneous magnetization of the square-lattice Ising model:
/// `(1 - sinh(2J)^{-4})^{1/8}` above `J_c`, zero below.
pub fn onsager_spontaneous_m(j: f64) -> f64 {
    if j <= ONSAGER_JC {
        return 0.0;
    }
    let s = sinh(2.0 * j);
    let s4 = s * s * s * s;
    let base = 1.0 - 1.0 / s4;
    if base <= 0.0 {
        return 0.0;
    }
    sqrt(sqrt(sqrt(base)))
}

/// `½[(1+m) log(1+m) + (1-m) log(1-m)]`, the mean-field entropy term.
fn half_entropy(m: f64) -> f64 {
    let a = if m == -1.0 { 0.0 } else { (1.0 + m) * log1p(m) };
    let b = if m == 1.0 { 0.0 } else { (1.0 - m) * log1p(-m) };
    0.5 * (a + b)
}

/// A measured magnetization curve `m(h)` for `h >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCurve {
    h: Vec<f64>,
    m: Vec<f64>,
    /// Hermite slopes `dm/dh` at the knots.
    slope: Vec<f64>,
    /// Gain of the `tanh` continuation past the last knot.
    tail_gain: f64,
}

impl TabulatedCurve {
    /// Builds the curve from rows `(h, m)`.
    ///
    /// The first row must sit at `h = 0` (its `m` is taken as `m*`); `h` and
    /// `m` must both be strictly increasing and `m` must lie in `[0, 1)`.
    pub fn new(rows: &[(f64, f64)]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Table(format!(
                "need at least 2 rows, got {}",
                rows.len()
            )));
        }
        if rows[0].0 != 0.0 {
            return Err(Error::Table(format!(
                "first row must have h = 0, got {}",
                rows[0].0
            )));
        }
        for (i, &(h, m)) in rows.iter().enumerate() {
            if !h.is_finite() || !m.is_finite() {
                return Err(Error::Table(format!("row {i}: non-finite value")));
            }
            if !(0.0..1.0).contains(&m) {
                return Err(Error::Table(format!("row {i}: m = {m} outside [0, 1)")));
            }
            if i > 0 {
                let (hp, mp) = rows[i - 1];
                if h <= hp {
                    return Err(Error::Table(format!("row {i}: h not strictly increasing")));
                }
                if m <= mp {
                    return Err(Error::Table(format!("row {i}: m not strictly increasing")));
                }
            }
        }
        let h: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let m: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let slope = pchip_slopes(&h, &m);
        let last = m.len() - 1;
        let tail_gain = {
            let g = slope[last] / (1.0 - m[last] * m[last]);
            if g > 0.0 && g.is_finite() {
                g
            } else {
                1.0
            }
        };
        Ok(TabulatedCurve {
            h,
            m,
            slope,
            tail_gain,
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.h.iter().copied().zip(self.m.iter().copied())
    }

    fn spontaneous(&self) -> f64 {
        self.m[0]
    }

    /// `m(h)` for `h >= 0`.
    fn mag_nonneg(&self, h: f64) -> f64 {
        let last = self.h.len() - 1;
        if h >= self.h[last] {
            return tanh(atanh(self.m[last]) + self.tail_gain * (h - self.h[last]));
        }
        let k = match self.h.binary_search_by(|x| x.partial_cmp(&h).unwrap()) {
            Ok(k) => return self.m[k],
            Err(k) => k - 1,
        };
        let (h0, h1) = (self.h[k], self.h[k + 1]);
        let w = h1 - h0;
        let t = (h - h0) / w;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.m[k]
            + h10 * w * self.slope[k]
            + h01 * self.m[k + 1]
            + h11 * w * self.slope[k + 1]
    }

    /// `h(m)` for `m* <= m < 1`.
    fn field_nonneg(&self, m: f64) -> f64 {
        let last = self.m.len() - 1;
        if m >= self.m[last] {
            return self.h[last] + (atanh(m) - atanh(self.m[last])) / self.tail_gain;
        }
        let k = match self.m.binary_search_by(|x| x.partial_cmp(&m).unwrap()) {
            Ok(k) => return self.h[k],
            Err(k) => k - 1,
        };
        bisect_increasing(|h| self.mag_nonneg(h) - m, self.h[k], self.h[k + 1])
    }
}

/// Fritsch–Carlson monotone slopes for a strictly increasing data set.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    if n == 2 {
        return alloc::vec![delta[0], delta[0]];
    }
    let mut d = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let w1 = 2.0 * h1 + h0;
        let w2 = h1 + 2.0 * h0;
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    d[0] = end_slope(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
    d[n - 1] = end_slope(
        x[n - 1] - x[n - 2],
        x[n - 2] - x[n - 3],
        delta[n - 2],
        delta[n - 3],
    );
    d
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d <= 0.0 {
        0.0
    } else if d > 3.0 * del0 {
        3.0 * del0
    } else {
        d
    }
}

/// Provider of `m(h)`, its inverse and `m*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MagnetizationModel {
    MeanField { j: f64, d: u32 },
    Onsager2D { j: f64 },
    Tabulated { curve: TabulatedCurve },
}

impl MagnetizationModel {
    pub fn mean_field(j: f64, d: u32) -> Self {
        MagnetizationModel::MeanField { j, d }
    }

    pub fn onsager(j: f64) -> Self {
        MagnetizationModel::Onsager2D { j }
    }

    pub fn tabulated(curve: TabulatedCurve) -> Self {
        MagnetizationModel::Tabulated { curve }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MagnetizationModel::MeanField { .. } => "mean_field",
            MagnetizationModel::Onsager2D { .. } => "onsager2d",
            MagnetizationModel::Tabulated { .. } => "tabulated",
        }
    }

    /// Gain `K` of the closed-form shape `h(m) = atanh(m) - K m`, if the model
    /// has one.
    pub fn closed_form_gain(&self) -> Option<f64> {
        match *self {
            MagnetizationModel::MeanField { j, d } => Some(2.0 * d as f64 * j),
            MagnetizationModel::Onsager2D { j } => {
                let ms = onsager_spontaneous_m(j);
                // atanh(x)/x -> 1 as x -> 0 keeps the shape continuous at J_c.
                Some(if ms > 0.0 { atanh(ms) / ms } else { 1.0 })
            }
            MagnetizationModel::Tabulated { .. } => None,
        }
    }

    /// Spontaneous magnetization `m* = m(0+)`.
    pub fn spontaneous_m(&self) -> f64 {
        match self {
            MagnetizationModel::MeanField { j, d } => mean_field_mag(0.0, *j, *d),
            MagnetizationModel::Onsager2D { j } => onsager_spontaneous_m(*j),
            MagnetizationModel::Tabulated { curve } => curve.spontaneous(),
        }
    }

    /// `m(h)`; odd in `h`, returns `m*` at `h = 0`.
    pub fn mag_for(&self, h: f64) -> f64 {
        if h < 0.0 {
            return -self.mag_for(-h);
        }
        match self {
            MagnetizationModel::MeanField { j, d } => mean_field_mag(h, *j, *d),
            MagnetizationModel::Onsager2D { .. } => {
                if h == 0.0 {
                    return self.spontaneous_m();
                }
                mag_for_gain(h, self.closed_form_gain().unwrap())
            }
            MagnetizationModel::Tabulated { curve } => curve.mag_nonneg(h),
        }
    }

    /// The unique field `h >= 0` with `m(h) = m`, for `m* <= m < 1`.
    pub fn field_for(&self, m: f64) -> Result<f64> {
        if m >= 1.0 || m.is_nan() {
            return Err(Error::OutOfDomain { m });
        }
        let ms = self.spontaneous_m();
        if m < ms {
            return Err(Error::InsideCoexistence { m, m_star: ms });
        }
        if m == ms {
            return Ok(0.0);
        }
        Ok(match self {
            MagnetizationModel::Tabulated { curve } => curve.field_nonneg(m),
            _ => {
                let gain = self.closed_form_gain().unwrap();
                (atanh(m) - gain * m).max(0.0)
            }
        })
    }

    /// `sign(m) h(|m|)` outside the coexistence interval, zero inside; this
    /// is the derivative of the canonical free energy.
    pub fn free_energy_slope(&self, m: f64) -> Result<f64> {
        if m.is_nan() || m.abs() >= 1.0 {
            return Err(Error::OutOfDomain { m });
        }
        let a = m.abs();
        if a <= self.spontaneous_m() {
            return Ok(0.0);
        }
        Ok(self.field_for(a)?.copysign(m))
    }

    /// Antiderivative of the closed-form shape,
    /// `½[(1+m)log(1+m) + (1-m)log(1-m)] - K m²/2`.
    pub(crate) fn closed_form_potential(gain: f64, m: f64) -> f64 {
        half_entropy(m) - 0.5 * gain * m * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use libm::log;

    // Oracle values from 40-digit bisection / closed forms (mpmath).
    const MF_MSTAR_K15: f64 = 0.858_559_636_640_110_4;
    const ONSAGER_MSTAR_06: f64 = 0.973_608_667_440_300_5;

    #[test]
    fn mean_field_independent_spins() {
        assert_relative_eq!(
            mean_field_mag(0.3, 0.0, 2),
            0.291_312_612_451_590_9,
            epsilon = 1e-14
        );
        assert_relative_eq!(mean_field_mag(0.3, 0.0, 5), tanh(0.3), epsilon = 1e-15);
    }

    #[test]
    fn mean_field_zero_field() {
        assert!(mean_field_mag(0.0, 0.25, 2).abs() < 1e-8); // 2dJ = 1: critical
        assert!(mean_field_mag(0.0, 0.1, 2) < 1e-12);
        assert_relative_eq!(mean_field_mag(0.0, 0.375, 2), MF_MSTAR_K15, epsilon = 1e-12);
        assert_relative_eq!(
            mean_field_mag(-0.2, 0.375, 2),
            -mean_field_mag(0.2, 0.375, 2)
        );
    }

    #[test]
    fn onsager_values() {
        assert_eq!(onsager_spontaneous_m(ONSAGER_JC), 0.0);
        assert_eq!(onsager_spontaneous_m(0.3), 0.0);
        assert_relative_eq!(
            onsager_spontaneous_m(0.6),
            ONSAGER_MSTAR_06,
            epsilon = 1e-13
        );
        assert_relative_eq!(onsager_spontaneous_m(20.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(ONSAGER_JC, 0.5 * log(1.0 + sqrt(2.0)), epsilon = 1e-16);
    }

    #[test]
    fn field_for_examples() {
        let mf0 = MagnetizationModel::mean_field(0.0, 2);
        assert_relative_eq!(
            mf0.field_for(0.5).unwrap(),
            0.549_306_144_334_054_8,
            epsilon = 1e-14
        );
        let mf = MagnetizationModel::mean_field(0.375, 2);
        assert_relative_eq!(
            mf.field_for(0.95).unwrap(),
            0.406_780_823_064_823_2,
            epsilon = 1e-13
        );
        for model in [mf.clone(), MagnetizationModel::onsager(0.6)] {
            let ms = model.spontaneous_m();
            assert_eq!(model.field_for(ms).unwrap(), 0.0);
            assert!(matches!(
                model.field_for(ms - 0.01),
                Err(Error::InsideCoexistence { .. })
            ));
            assert!(matches!(
                model.field_for(1.0),
                Err(Error::OutOfDomain { .. })
            ));
        }
    }

    #[test]
    fn onsager_hybrid_vanishes_at_exact_mstar() {
        let model = MagnetizationModel::onsager(0.6);
        let k = model.closed_form_gain().unwrap();
        assert!((atanh(ONSAGER_MSTAR_06) - k * ONSAGER_MSTAR_06).abs() < 1e-14);
        assert_relative_eq!(model.mag_for(1e-300), ONSAGER_MSTAR_06, epsilon = 1e-12);
        let h = model.field_for(0.99).unwrap();
        assert_relative_eq!(model.mag_for(h), 0.99, epsilon = 1e-12);
    }

    fn sample_table() -> TabulatedCurve {
        let model = MagnetizationModel::onsager(0.6);
        let rows: Vec<(f64, f64)> = (0..12)
            .map(|i| i as f64 * 0.05)
            .map(|h| (h, model.mag_for(h)))
            .collect();
        TabulatedCurve::new(&rows).unwrap()
    }

    #[test]
    fn tabulated_is_monotone_and_invertible() {
        let t = MagnetizationModel::tabulated(sample_table());
        let ms = t.spontaneous_m();
        assert_relative_eq!(ms, ONSAGER_MSTAR_06, epsilon = 1e-12);
        let mut prev = ms;
        for i in 1..400 {
            let h = i as f64 * 0.005;
            let m = t.mag_for(h);
            assert!(m > prev, "not increasing at h={h}");
            assert_relative_eq!(t.mag_for(-h), -m);
            prev = m;
        }
        for i in 0..200 {
            let m = ms + (1.0 - 1e-6 - ms) * i as f64 / 199.0;
            let h = t.field_for(m).unwrap();
            assert!((t.mag_for(h) - m).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        assert!(TabulatedCurve::new(&[(0.0, 0.5)]).is_err());
        assert!(TabulatedCurve::new(&[(0.1, 0.5), (0.2, 0.6)]).is_err());
        assert!(TabulatedCurve::new(&[(0.0, 0.5), (0.0, 0.6)]).is_err());
        assert!(TabulatedCurve::new(&[(0.0, 0.5), (0.1, 0.4)]).is_err());
        assert!(TabulatedCurve::new(&[(0.0, 0.5), (0.1, 1.0)]).is_err());
    }

    #[test]
    fn field_diverges_at_saturation() {
        for model in [
            MagnetizationModel::mean_field(0.375, 2),
            MagnetizationModel::onsager(0.6),
            MagnetizationModel::tabulated(sample_table()),
        ] {
            let a = model.field_for(1.0 - 1e-3).unwrap();
            let b = model.field_for(1.0 - 1e-6).unwrap();
            // h(m) grows like ½ log(1/(1-m)): three decades add about 3.45.
            assert!(b > a + 3.0, "{}: {a} {b}", model.name());
            assert!(
                model.field_for(1.0 - 1e-12).unwrap() > 10.0,
                "{}",
                model.name()
            );
        }
    }
}
