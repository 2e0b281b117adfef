//! Classical fourth-order Runge-Kutta reference for `ẋ = Σ_i c_i(t) x^i`.
//!
//! Controls are sampled on the same uniform grid as the expansion; between
//! samples they are linearly interpolated, so the stage at `t + h/2` uses the
//! average of the two neighbouring samples.

use crate::error::{Error, Result};

pub const DEFAULT_CEILING: f64 = 1e8;

fn rhs(coefficients: &[Vec<f64>], j: usize, mid: bool, x: f64) -> f64 {
    // Horner in x
    coefficients.iter().rev().fold(0.0, |acc, c| {
        let u = if mid { 0.5 * (c[j] + c[j + 1]) } else { c[j] };
        acc * x + u
    })
}

/// Integrates from `x(0) = x0` with `coefficients[i][j] = c_i(t_j)` on a grid
/// of spacing `step`. Fails with [`Error::BlowUp`] once `|x|` exceeds
/// `ceiling` or stops being finite.
pub fn rk4_polynomial(coefficients: &[Vec<f64>], step: f64, x0: f64, ceiling: f64) -> Result<Vec<f64>> {
    let points = coefficients.first().map_or(0, Vec::len);
    if points < 2 || coefficients.iter().any(|c| c.len() != points) {
        return Err(Error::Grid("coefficient samples must share a grid of at least two points".into()));
    }
    let mut out = Vec::with_capacity(points);
    let mut x = x0;
    out.push(x);
    for j in 0..points - 1 {
        let k1 = rhs(coefficients, j, false, x);
        let k2 = rhs(coefficients, j, true, x + 0.5 * step * k1);
        let k3 = rhs(coefficients, j, true, x + 0.5 * step * k2);
        let k4 = rhs(coefficients, j + 1, false, x + step * k3);
        x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !x.is_finite() || x.abs() > ceiling {
            return Err(Error::BlowUp {
                time: (j + 1) as f64 * step,
                last_safe: j as f64 * step,
                ceiling,
            });
        }
        out.push(x);
    }
    Ok(out)
}
