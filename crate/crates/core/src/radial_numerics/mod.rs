//! Grid numerics for normalized real radial functions `R(r)` with measure
//! `r² dr`.
//!
//! Every integrand that contains `R/r` is rewritten so it stays finite at
//! `r = 0`: `r²(R′ + R/r)² = (rR′ + R)²` and `r² R (R′ + R/r) = r²RR′ + rR²`.
//! Grids may therefore start at the origin.

mod diff;
mod grid;
mod weyl;

use serde::{Deserialize, Serialize};

pub use diff::{differentiate, fornberg_weights, Derivative};
pub use grid::{GridScheme, RadialGrid, MIN_GRID_POINTS};
pub use weyl::{default_alphas, weyl_i3_check, weyl_scan, WeylScanResult, DEFAULT_ALPHA_COUNT};

use crate::error::{Error, Result};
use crate::hydrogen::{radial_wavefunction, QuantumNumbers, UncertaintyReport};
use crate::special_math::integrate_sampled;

/// Largest `|∫ r²R² dr − 1|` accepted by the expectation-value operations.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Slack below 1/4 tolerated before a product counts as a bound violation.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Largest tail mass beyond `r_max` accepted by [`sample_hydrogen`].
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// A radial function tabulated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledRadialFunction {
    grid: RadialGrid,
    values: Vec<f64>,
    norm_defect: f64,
}

impl SampledRadialFunction {
    /// Wraps values as given and records `|∫ r²R² dr − 1|`.
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "{} values supplied for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!(
                "non-finite value at r = {}",
                grid.points()[i]
            )));
        }
        let norm = norm_integral(&grid, &values)?;
        Ok(Self { grid, values, norm_defect: (norm - 1.0).abs() })
    }

    /// Rescales the values so that `∫ r²R² dr = 1` on the grid.
    pub fn normalized(grid: RadialGrid, mut values: Vec<f64>) -> Result<Self> {
        let probe = Self::new(grid, values.clone())?;
        let norm = norm_integral(&probe.grid, &values)?;
        if !(norm > 0.0) {
            return Err(Error::Contract("cannot normalize a function with zero norm".into()));
        }
        let scale = norm.sqrt().recip();
        values.iter_mut().for_each(|v| *v *= scale);
        Self::new(probe.grid, values)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm_defect(&self) -> f64 {
        self.norm_defect
    }

    /// Returns a copy with every value multiplied by `factor(r)`.
    pub fn map_values<F: Fn(f64) -> f64>(&self, factor: F) -> Result<Self> {
        let values = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| v * factor(r))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    fn require_normalized(&self) -> Result<()> {
        if self.norm_defect > NORM_TOLERANCE {
            return Err(Error::Contract(format!(
                "function is not normalized: |∫r²R²dr − 1| = {:.3e}",
                self.norm_defect
            )));
        }
        Ok(())
    }

    pub(crate) fn derivative(&self, which: Derivative) -> Result<Vec<f64>> {
        differentiate(&self.values, &self.grid, which)
    }

    /// `∫ g(r, R, R′) dr` over the grid.
    pub(crate) fn integrate_with<F>(&self, first: &[f64], integrand: F) -> Result<f64>
    where
        F: Fn(f64, f64, f64) -> f64,
    {
        let values: Vec<f64> = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .zip(first)
            .map(|((&r, &v), &d)| integrand(r, v, d))
            .collect();
        integrate_sampled(&values, &self.grid)
    }
}

fn norm_integral(grid: &RadialGrid, values: &[f64]) -> Result<f64> {
    let density: Vec<f64> = grid
        .points()
        .iter()
        .zip(values)
        .map(|(&r, &v)| r * r * v * v)
        .collect();
    integrate_sampled(&density, grid)
}

/// Optional overrides for the automatic hydrogen grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GridHint {
    pub r_max: Option<f64>,
    pub spacing: Option<f64>,
}

/// Automatic outer radius for state `(n, ·)`: `2n² + 12n√(2n+1) + 10`.
pub fn hydrogen_r_max(n: u32) -> f64 {
    let n = n as f64;
    2.0 * n * n + 12.0 * n * (2.0 * n + 1.0).sqrt() + 10.0
}

/// Automatic spacing for state `(n, ·)`: `n/200`, capped at `0.01`.
pub fn hydrogen_spacing(n: u32) -> f64 {
    (n as f64 / 200.0).min(0.01)
}

/// Tabulates `R_nl` on a uniform grid starting at the origin and
/// renormalizes it by quadrature.
pub fn sample_hydrogen(q: QuantumNumbers, hint: Option<GridHint>) -> Result<SampledRadialFunction> {
    let hint = hint.unwrap_or_default();
    let r_max = hint.r_max.unwrap_or_else(|| hydrogen_r_max(q.n()));
    let spacing = hint.spacing.unwrap_or_else(|| hydrogen_spacing(q.n()));
    let grid = RadialGrid::uniform_with_spacing(0.0, r_max, spacing)?;
    let values = grid
        .points()
        .iter()
        .map(|&r| radial_wavefunction(q, r))
        .collect::<Result<Vec<_>>>()?;
    let raw = SampledRadialFunction::new(grid, values)?;
    // R_nl is normalized analytically, so the missing mass is the tail beyond r_max.
    let tail = 1.0 - norm_integral(raw.grid(), raw.values())?;
    if tail > TAIL_TOLERANCE {
        return Err(Error::Resolution(format!(
            "grid up to r = {r_max} leaves tail mass {tail:.3e} for state {q}"
        )));
    }
    SampledRadialFunction::normalized(raw.grid, raw.values)
}

/// `⟨r⟩ = ∫ r³R² dr`.
pub fn mean_r(f: &SampledRadialFunction) -> Result<f64> {
    f.require_normalized()?;
    let zeros = vec![0.0; f.grid.len()];
    f.integrate_with(&zeros, |r, v, _| r * r * r * v * v)
}

/// `⟨δr²⟩ = ∫ r²R²(r − ⟨r⟩)² dr`.
pub fn variance_r(f: &SampledRadialFunction) -> Result<f64> {
    let mean = mean_r(f)?;
    let zeros = vec![0.0; f.grid.len()];
    let var = f.integrate_with(&zeros, |r, v, _| {
        let d = r - mean;
        r * r * v * v * d * d
    })?;
    Ok(var.max(0.0))
}

/// `i⟨p̂_r⟩ = ∫ r²R(R′ + R/r) dr`, which vanishes for admissible states.
pub fn mean_pr(f: &SampledRadialFunction) -> Result<f64> {
    f.require_normalized()?;
    let d1 = f.derivative(Derivative::First)?;
    f.integrate_with(&d1, |r, v, d| r * r * v * d + r * v * v)
}

/// `∫ r²(R′ + R/r)² dr`.
pub fn variance_pr_gradient_form(f: &SampledRadialFunction) -> Result<f64> {
    f.require_normalized()?;
    let d1 = f.derivative(Derivative::First)?;
    f.integrate_with(&d1, |r, v, d| {
        let g = r * d + v;
        g * g
    })
}

/// `−∫ r² R (R″ + 2R′/r) dr`.
pub fn variance_pr_laplacian_form(f: &SampledRadialFunction) -> Result<f64> {
    f.require_normalized()?;
    let d1 = f.derivative(Derivative::First)?;
    let d2 = f.derivative(Derivative::Second)?;
    let integrand: Vec<f64> = f
        .grid
        .points()
        .iter()
        .zip(&f.values)
        .zip(d1.iter().zip(&d2))
        .map(|((&r, &v), (&p, &pp))| -(r * r * v * pp + 2.0 * r * v * p))
        .collect();
    integrate_sampled(&integrand, &f.grid)
}

/// `∫ r³ R R′ dr`, equal to `−3/2` for any normalized decaying state.
pub fn r_cubed_rr_prime(f: &SampledRadialFunction) -> Result<f64> {
    f.require_normalized()?;
    let d1 = f.derivative(Derivative::First)?;
    f.integrate_with(&d1, |r, v, d| r * r * r * v * d)
}

/// `2∫ r R R′ dr + ∫ R² dr`, which vanishes when the boundary term `rR²` does.
pub fn r_rr_prime_identity_residual(f: &SampledRadialFunction) -> Result<f64> {
    f.require_normalized()?;
    let d1 = f.derivative(Derivative::First)?;
    f.integrate_with(&d1, |r, v, d| 2.0 * r * v * d + v * v)
}

/// Assembles the full uncertainty report for a normalized function.
pub fn uncertainty_report(f: &SampledRadialFunction, label: &str) -> Result<UncertaintyReport> {
    let mean = mean_r(f)?;
    let var_r = variance_r(f)?;
    let mean_p = mean_pr(f)?;
    let gradient = variance_pr_gradient_form(f)?;
    let laplacian = variance_pr_laplacian_form(f)?;
    let var_pr = 0.5 * (gradient + laplacian);
    let product = var_r * var_pr;
    Ok(UncertaintyReport {
        label: label.to_string(),
        mean_r: mean,
        var_r,
        mean_pr: mean_p,
        var_pr,
        product,
        bound_satisfied: product >= 0.25 - BOUND_TOLERANCE,
        var_pr_gradient: gradient,
        var_pr_laplacian: laplacian,
        norm_defect: f.norm_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrogen::{coordinate_variance, radial_momentum_variance, to_f64};

    fn h(n: u32, l: u32) -> SampledRadialFunction {
        sample_hydrogen(QuantumNumbers::new(n, l).unwrap(), None).unwrap()
    }

    #[test]
    fn sample_hydrogen_ground_state() {
        let f = h(1, 0);
        assert!(f.norm_defect() <= 1e-10);
        let r1 = f.grid().points()[1];
        assert!((f.values()[1] - 2.0 * (-r1).exp()).abs() <= 1e-9);
    }

    #[test]
    fn sample_hydrogen_circular_twenty() {
        let f = h(20, 19);
        assert!(f.grid().r_max() >= 2.0 * 400.0);
        assert!(f.norm_defect() <= 1e-10);
    }

    #[test]
    fn sample_hydrogen_rejects_short_grid() {
        let q = QuantumNumbers::new(3, 0).unwrap();
        let hint = GridHint { r_max: Some(10.0), spacing: None };
        assert!(matches!(sample_hydrogen(q, Some(hint)), Err(Error::Resolution(_))));
    }

    #[test]
    fn expectation_ops_reject_unnormalized_input() {
        let f = h(1, 0).map_values(|_| 1.1).unwrap();
        assert!(matches!(mean_r(&f), Err(Error::Contract(_))));
        assert!(matches!(mean_pr(&f), Err(Error::Contract(_))));
        assert!(matches!(uncertainty_report(&f, "x"), Err(Error::Contract(_))));
    }

    #[test]
    fn rejects_non_finite_values() {
        let grid = RadialGrid::uniform(0.0, 1.0, 100).unwrap();
        let mut values = vec![1.0; 100];
        values[3] = f64::NAN;
        assert!(matches!(SampledRadialFunction::new(grid, values), Err(Error::Contract(_))));
    }

    #[test]
    fn mean_and_variance_examples() {
        let f = h(1, 0);
        assert!((mean_r(&f).unwrap() - 1.5).abs() <= 1e-8);
        assert!((variance_r(&f).unwrap() - 0.75).abs() <= 1e-8);
        let f = h(2, 1);
        assert!((mean_r(&f).unwrap() - 5.0).abs() <= 1e-8);
        assert!((variance_r(&f).unwrap() - 5.0).abs() <= 1e-8);
    }

    #[test]
    fn narrow_profile_variance() {
        // r²R² a normalized Gaussian of variance 1e−4 centred at r = 10.
        let grid = RadialGrid::uniform(9.8, 10.2, 4001).unwrap();
        let sigma2 = 1e-4_f64;
        let values: Vec<f64> = grid
            .points()
            .iter()
            .map(|&r| (-(r - 10.0).powi(2) / (4.0 * sigma2)).exp() / r)
            .collect();
        let f = SampledRadialFunction::normalized(grid, values).unwrap();
        assert!((variance_r(&f).unwrap() - 1e-4).abs() <= 1e-9);
    }

    #[test]
    fn mean_momentum_vanishes() {
        assert!(mean_pr(&h(1, 0)).unwrap().abs() <= 1e-8);
        assert!(mean_pr(&h(5, 2)).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn momentum_variance_examples() {
        assert!((variance_pr_gradient_form(&h(1, 0)).unwrap() - 1.0).abs() <= 1e-6);
        assert!((variance_pr_gradient_form(&h(3, 2)).unwrap() - 1.0 / 45.0).abs() <= 1e-6);
        assert!((variance_pr_gradient_form(&h(2, 0)).unwrap() - 0.25).abs() <= 1e-6);
        assert!((variance_pr_laplacian_form(&h(1, 0)).unwrap() - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn integration_by_parts_identities() {
        for (n, l) in [(1, 0), (2, 1), (4, 0), (6, 3)] {
            let f = h(n, l);
            let g = variance_pr_gradient_form(&f).unwrap();
            let lap = variance_pr_laplacian_form(&f).unwrap();
            assert!((g - lap).abs() <= 1e-5, "n={n} l={l}");
            assert!((r_cubed_rr_prime(&f).unwrap() + 1.5).abs() <= 1e-6);
            assert!(r_rr_prime_identity_residual(&f).unwrap().abs() <= 1e-8);
        }
    }

    #[test]
    fn report_examples() {
        let rep = uncertainty_report(&h(1, 0), "1s").unwrap();
        assert!((rep.product - 0.75).abs() <= 1e-6);
        assert!(rep.bound_satisfied);
        assert_eq!(rep.label, "1s");
        let rep = uncertainty_report(&h(2, 0), "2s").unwrap();
        assert!((rep.product - 1.5).abs() <= 1e-6);
        let rep = uncertainty_report(&h(10, 9), "10l").unwrap();
        assert!((rep.product - 21.0 / 76.0).abs() <= 1e-6);
    }

    #[test]
    fn report_matches_exact_variances() {
        for (n, l) in [(3, 1), (5, 4), (7, 0)] {
            let q = QuantumNumbers::new(n, l).unwrap();
            let rep = uncertainty_report(&h(n, l), "").unwrap();
            assert!((rep.var_r - to_f64(&coordinate_variance(q))).abs() <= 1e-8 * rep.var_r.max(1.0));
            assert!((rep.var_pr - to_f64(&radial_momentum_variance(q))).abs() <= 1e-6);
        }
    }
}
