//! Canonical Ising free energy `F(m) = ∫_{m*}^{|m|} h(m') dm'`.
//!
//! `F` vanishes on the coexistence interval `[-m*, m*]`, is even, convex, and
//! steep at `±1`. Closed-form models use the exact antiderivative; tabulated
//! models are integrated by adaptive Simpson.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnetization::MagnetizationModel;
use crate::numeric::adaptive_simpson;

/// Absolute tolerance of the free-energy quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Magnetizations closer than this to `±1` are rejected: `h(m)` is only
/// logarithmically integrable there.
pub const SINGULAR_GUARD: f64 = 1e-12;

/// `F(m)` for the given model.
pub fn free_energy(m: f64, model: &MagnetizationModel) -> Result<f64> {
    let a = guarded_abs(m)?;
    let ms = model.spontaneous_m();
    if a <= ms {
        return Ok(0.0);
    }
    Ok(match model.closed_form_gain() {
        Some(gain) => {
            let v = MagnetizationModel::closed_form_potential(gain, a)
                - MagnetizationModel::closed_form_potential(gain, ms);
            v.max(0.0)
        }
        None => free_energy_quadrature(a, model)?,
    })
}

/// `F(m)` by adaptive quadrature of `h` regardless of the model kind.
///
/// For closed-form models this is an independent route to the same value.
pub fn free_energy_quadrature(m: f64, model: &MagnetizationModel) -> Result<f64> {
    let a = guarded_abs(m)?;
    let ms = model.spontaneous_m();
    if a <= ms {
        return Ok(0.0);
    }
    let integrand = |x: f64| model.field_for(x.max(ms)).unwrap_or(0.0);
    Ok(adaptive_simpson(integrand, ms, a, QUAD_TOL))
}

fn guarded_abs(m: f64) -> Result<f64> {
    let a = m.abs();
    if a.is_nan() || a > 1.0 - SINGULAR_GUARD {
        return Err(Error::OutOfDomain { m });
    }
    Ok(a)
}

/// `F` sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub m_star: f64,
}

impl FreeEnergyCurve {
    /// Smallest second divided difference (scaled to a unit grid spacing).
    /// Non-negative for a convex curve.
    pub fn min_second_difference(&self) -> f64 {
        let (x, y) = (&self.grid, &self.values);
        let mut worst = f64::INFINITY;
        for i in 1..x.len().saturating_sub(1) {
            let left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            let right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
            let dd = (right - left) * 0.5 * (x[i + 1] - x[i - 1]);
            worst = worst.min(dd);
        }
        worst
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.min_second_difference() >= -tol
    }

    pub fn is_even(&self, tol: f64) -> bool {
        let n = self.grid.len();
        (0..n).all(|i| {
            (self.grid[i] + self.grid[n - 1 - i]).abs() <= tol
                && (self.values[i] - self.values[n - 1 - i]).abs() <= tol
        })
    }
}

/// Evaluates `F` on the symmetric grid of `grid_size` equally spaced points
/// spanning `±(1 - 1/grid_size)`.
pub fn tabulate(model: &MagnetizationModel, grid_size: usize) -> Result<FreeEnergyCurve> {
    if grid_size < 3 {
        return Err(Error::param("grid_size", "grid_size must be at least 3"));
    }
    let edge = 1.0 - 1.0 / grid_size as f64;
    let step = 2.0 * edge / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| {
            // mirror the lower half so the grid is exactly symmetric
            let k = i.min(grid_size - 1 - i);
            let x = -edge + k as f64 * step;
            if 2 * i + 1 == grid_size {
                0.0
            } else if i == k {
                x
            } else {
                -x
            }
        })
        .collect();
    tabulate_on(model, grid)
}

/// Evaluates `F` on a caller-supplied ascending grid in `(-1, 1)`.
pub fn tabulate_on(model: &MagnetizationModel, grid: Vec<f64>) -> Result<FreeEnergyCurve> {
    let values = grid
        .iter()
        .map(|&m| free_energy(m, model))
        .collect::<Result<Vec<_>>>()?;
    Ok(FreeEnergyCurve {
        grid,
        values,
        m_star: model.spontaneous_m(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnetization::TabulatedCurve;
    use approx::assert_relative_eq;

    #[test]
    fn flat_piece_is_exactly_zero() {
        for model in [
            MagnetizationModel::mean_field(0.45, 2),
            MagnetizationModel::onsager(0.6),
        ] {
            let ms = model.spontaneous_m();
            for i in 0..=50 {
                let m = -ms + 2.0 * ms * i as f64 / 50.0;
                assert_eq!(free_energy(m, &model).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn independent_spin_value() {
        // ∫_0^0.5 atanh = ½[1.5 log 1.5 + 0.5 log 0.5], frozen from mpmath quadrature.
        let model = MagnetizationModel::mean_field(0.0, 2);
        assert_relative_eq!(
            free_energy(0.5, &model).unwrap(),
            0.130_812_035_941_136_96,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            free_energy_quadrature(0.5, &model).unwrap(),
            0.130_812_035_941_136_96,
            epsilon = 1e-10
        );
    }

    #[test]
    fn even_and_guarded() {
        let model = MagnetizationModel::mean_field(0.3, 2);
        for &m in &[0.1, 0.7, 0.95, 0.999_999] {
            assert_eq!(
                free_energy(-m, &model).unwrap(),
                free_energy(m, &model).unwrap()
            );
        }
        assert!(free_energy(1.0, &model).is_err());
        assert!(free_energy(-1.0 + 1e-13, &model).is_err());
    }

    #[test]
    fn tabulate_five_points() {
        let model = MagnetizationModel::mean_field(0.0, 2);
        let curve = tabulate(&model, 5).unwrap();
        let expected = [-0.8, -0.4, 0.0, 0.4, 0.8];
        for (g, e) in curve.grid.iter().zip(expected) {
            assert!((g - e).abs() < 1e-15);
        }
        assert_eq!(curve.values[2], 0.0);
        assert!(curve.is_even(0.0));
        assert!(curve.is_convex(1e-10));
        assert!(tabulate(&model, 2).is_err());
    }

    #[test]
    fn tabulated_model_curve_is_convex() {
        let source = MagnetizationModel::onsager(0.6);
        let rows: Vec<(f64, f64)> = (0..25)
            .map(|i| i as f64 * 0.04)
            .map(|h| (h, source.mag_for(h)))
            .collect();
        let model = MagnetizationModel::tabulated(TabulatedCurve::new(&rows).unwrap());
        let curve = tabulate(&model, 201).unwrap();
        assert!(curve.is_convex(1e-10), "{}", curve.min_second_difference());
        assert!(curve.is_even(1e-14));
        for (m, v) in curve.grid.iter().zip(&curve.values) {
            if m.abs() <= curve.m_star {
                assert_eq!(*v, 0.0);
            }
        }
    }
}
