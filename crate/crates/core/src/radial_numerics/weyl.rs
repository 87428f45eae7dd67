//! The auxiliary integral
//!
//! ```text
//! I(α) = ∫ r² |(α δr − i p̂_r) R|² dr = ∫ (α r R δr − r R′ − R)² dr ≥ 0
//! ```
//!
//! evaluated directly by quadrature and compared with the quadratic
//! `α²⟨δr²⟩ + α + ⟨δp̂_r²⟩`.

use serde::{Deserialize, Serialize};

use super::{mean_r, variance_pr_gradient_form, variance_pr_laplacian_form, variance_r, Derivative, SampledRadialFunction};
use crate::error::{Error, Result};
use crate::special_math::integrate_sampled;

pub const DEFAULT_ALPHA_COUNT: usize = 41;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylScanResult {
    pub alphas: Vec<f64>,
    pub i_direct: Vec<f64>,
    pub i_quadratic: Vec<f64>,
    /// `−1/(2⟨δr²⟩)` from the sampled variance.
    pub alpha_star: f64,
    /// Least-squares coefficients of `I_direct ≈ i1 α² + i3 α + i2`.
    pub i1_coeff: f64,
    pub i2_coeff: f64,
    pub i3_coeff: f64,
}

impl WeylScanResult {
    /// Minimizer of the fitted quadratic.
    pub fn fitted_vertex(&self) -> f64 {
        -self.i3_coeff / (2.0 * self.i1_coeff)
    }

    pub fn min_direct(&self) -> f64 {
        self.i_direct.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_form_gap(&self) -> f64 {
        self.i_direct
            .iter()
            .zip(&self.i_quadratic)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `count` values spanning `[3α*, −α*]` around `α* = −1/(2 var_r)`.
pub fn default_alphas(var_r: f64, count: usize) -> Vec<f64> {
    let star = -0.5 / var_r;
    let (lo, hi) = (3.0 * star, -star);
    if count < 2 {
        return vec![star; count];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Cross term `−2α ∫ r² R (r − ⟨r⟩)(R′ + R/r) dr`.
pub fn weyl_i3_check(f: &SampledRadialFunction, alpha: f64) -> Result<f64> {
    let mean = mean_r(f)?;
    let d1 = f.derivative(Derivative::First)?;
    let integral = f.integrate_with(&d1, |r, v, d| (r - mean) * (r * r * v * d + r * v * v))?;
    Ok(-2.0 * alpha * integral)
}

pub fn weyl_scan(f: &SampledRadialFunction, alphas: &[f64]) -> Result<WeylScanResult> {
    if alphas.len() < 3 {
        return Err(Error::Contract(format!(
            "quadratic fit needs at least 3 alpha values, got {}",
            alphas.len()
        )));
    }
    let mean = mean_r(f)?;
    let var_r = variance_r(f)?;
    let var_pr = 0.5 * (variance_pr_gradient_form(f)? + variance_pr_laplacian_form(f)?);
    let d1 = f.derivative(Derivative::First)?;
    let r = f.grid().points();
    let v = f.values();

    let mut i_direct = Vec::with_capacity(alphas.len());
    let mut scratch = vec![0.0; r.len()];
    for &alpha in alphas {
        for (i, slot) in scratch.iter_mut().enumerate() {
            let term = alpha * r[i] * v[i] * (r[i] - mean) - r[i] * d1[i] - v[i];
            *slot = term * term;
        }
        i_direct.push(integrate_sampled(&scratch, f.grid())?);
    }
    let i_quadratic = alphas
        .iter()
        .map(|&a| a * a * var_r + a + var_pr)
        .collect();
    let [c0, c1, c2] = fit_quadratic(alphas, &i_direct)?;

    Ok(WeylScanResult {
        alphas: alphas.to_vec(),
        i_direct,
        i_quadratic,
        alpha_star: -0.5 / var_r,
        i1_coeff: c2,
        i2_coeff: c0,
        i3_coeff: c1,
    })
}

/// Least-squares `[c0, c1, c2]` for `y ≈ c0 + c1 x + c2 x²`.
fn fit_quadratic(x: &[f64], y: &[f64]) -> Result<[f64; 3]> {
    // Fit in a centred, scaled variable for conditioning, then map back.
    let n = x.len() as f64;
    let centre = x.iter().sum::<f64>() / n;
    let scale = x.iter().map(|v| (v - centre).abs()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::Contract("alpha values must not all coincide".into()));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let t = (xi - centre) / scale;
        let basis = [1.0, t, t * t];
        for row in 0..3 {
            aty[row] += basis[row] * yi;
            for col in 0..3 {
                ata[row][col] += basis[row] * basis[col];
            }
        }
    }
    let [b0, b1, b2] = solve3(ata, aty)
        .ok_or_else(|| Error::Contract("alpha values do not determine a quadratic".into()))?;
    // y = b0 + b1 t + b2 t², t = (x − c)/s
    let c2 = b2 / (scale * scale);
    let c1 = b1 / scale - 2.0 * b2 * centre / (scale * scale);
    let c0 = b0 - b1 * centre / scale + b2 * centre * centre / (scale * scale);
    Ok([c0, c1, c2])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}
