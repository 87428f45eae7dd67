//! The radial state that saturates the uncertainty bound:
//!
//! ```text
//! R(r) = (C/r) exp[−(r − r̄)² / (4σ²)]
//! ```
//!
//! It solves `[(r − r̄)/(2σ²) + d/dr + 1/r] R = 0` exactly but is singular at
//! the origin, so it is tabulated on `[ε, r̄ + 12σ]` and is only meaningful
//! when `r̄² ≫ σ²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydrogen::UncertaintyReport;
use crate::radial_numerics::{
    mean_r, uncertainty_report, variance_r, Derivative, RadialGrid, SampledRadialFunction,
    MIN_GRID_POINTS,
};

/// Smallest `r̄²/σ²` accepted by [`build_min_state`].
pub const MIN_MEAN_SQ_OVER_VAR: f64 = 4.0;

/// Smallest `r̄/σ` accepted by [`product_vs_ratio`].
pub const MIN_RATIO: f64 = 3.0;

/// Grid points per standard deviation.
const POINTS_PER_SIGMA: f64 = 200.0;

/// Inverse log-spacing when the profile is not negligible at the cutoff.
const POINTS_PER_CUTOFF: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianRadialState {
    pub mean: f64,
    pub var: f64,
    pub cutoff: f64,
    pub norm_constant: f64,
}

impl GaussianRadialState {
    pub fn sigma(&self) -> f64 {
        self.var.sqrt()
    }

    /// Unnormalized profile `exp[−(r − r̄)²/(4σ²)]/r`.
    fn profile(&self, r: f64) -> f64 {
        let d = r - self.mean;
        (-d * d / (4.0 * self.var)).exp() / r
    }
}

/// Default inner cutoff: `max(r̄ − 10σ, r̄/1000)`, kept below `r̄/10`.
pub fn default_cutoff(mean: f64, var: f64) -> f64 {
    (mean - 10.0 * var.sqrt()).max(mean / 1000.0).min(mean / 10.0)
}

pub fn build_min_state(mean: f64, var: f64) -> Result<(GaussianRadialState, SampledRadialFunction)> {
    build_min_state_with_cutoff(mean, var, default_cutoff(mean, var))
}

/// Builds the state with an explicit inner cutoff `ε ∈ (0, r̄)`.
///
/// The stored state carries the cutoff actually used by the grid.
pub fn build_min_state_with_cutoff(
    mean: f64,
    var: f64,
    cutoff: f64,
) -> Result<(GaussianRadialState, SampledRadialFunction)> {
    if !(mean > 0.0 && mean.is_finite() && var > 0.0 && var.is_finite()) {
        return Err(Error::Domain(format!("mean and variance must be positive, got {mean}, {var}")));
    }
    if mean * mean / var < MIN_MEAN_SQ_OVER_VAR {
        return Err(Error::Validity(format!(
            "r̄²/σ² = {:.3} is below {MIN_MEAN_SQ_OVER_VAR}; the origin singularity carries non-negligible weight",
            mean * mean / var
        )));
    }
    if !(cutoff > 0.0 && cutoff < mean) {
        return Err(Error::Domain(format!("cutoff {cutoff} must lie in (0, {mean})")));
    }
    let sigma = var.sqrt();
    let r_end = mean + 12.0 * sigma;
    let grid = if mean - cutoff < 9.0 * sigma {
        // The 1/r rise at the cutoff needs spacing ∝ r there, which a
        // geometric grid provides without refining the bulk.
        let log_step = (1.0 / POINTS_PER_CUTOFF).min(sigma / (POINTS_PER_SIGMA * r_end));
        let count = ((r_end / cutoff).ln() / log_step).ceil() as usize + 1;
        RadialGrid::geometric(cutoff, r_end, count.max(MIN_GRID_POINTS))?
    } else {
        RadialGrid::uniform_with_spacing(cutoff, r_end, sigma / POINTS_PER_SIGMA)?
    };
    // Uniform grids snap the cutoff down to a multiple of the spacing.
    let cutoff = grid.r_min();
    if !(cutoff > 0.0) {
        return Err(Error::Domain(format!("cutoff {cutoff} rounds to the origin")));
    }
    let mut state = GaussianRadialState { mean, var, cutoff, norm_constant: 1.0 };
    let raw: Vec<f64> = grid.points().iter().map(|&r| state.profile(r)).collect();
    let unit = SampledRadialFunction::new(grid.clone(), raw.clone())?;
    // ∫ r²R² dr = C² ∫ r² profile² dr
    let raw_norm = 1.0 + signed_defect(&unit, &raw)?;
    state.norm_constant = raw_norm.sqrt().recip();
    let values = raw.iter().map(|v| v * state.norm_constant).collect();
    Ok((state, SampledRadialFunction::new(grid, values)?))
}

fn signed_defect(f: &SampledRadialFunction, raw: &[f64]) -> Result<f64> {
    let density: Vec<f64> = f
        .grid()
        .points()
        .iter()
        .zip(raw)
        .map(|(&r, &v)| r * r * v * v)
        .collect();
    Ok(crate::special_math::integrate_sampled(&density, f.grid())? - 1.0)
}

/// `max_r |(r − r̄)/(2σ²) R + R′ + R/r| / max_r |R|`.
pub fn residual_eq15(state: &GaussianRadialState, f: &SampledRadialFunction) -> Result<f64> {
    let r = f.grid().points();
    if r[0] <= 0.0 {
        return Err(Error::Contract("residual needs a grid that excludes the origin".into()));
    }
    let d1 = f.derivative(Derivative::First)?;
    let scale = f.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Contract("function vanishes identically".into()));
    }
    let worst = r
        .iter()
        .zip(f.values())
        .zip(&d1)
        .map(|((&r, &v), &d)| ((r - state.mean) / (2.0 * state.var) * v + d + v / r).abs())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// One row of [`product_vs_ratio`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub ratio: f64,
    pub state: GaussianRadialState,
    pub achieved_mean: f64,
    pub achieved_var: f64,
    pub residual: f64,
    pub report: UncertaintyReport,
}

impl RatioRow {
    pub fn product(&self) -> f64 {
        self.report.product
    }
}

/// Builds the state with `σ = 1, r̄ = ratio` and audits it.
pub fn audit_ratio(ratio: f64) -> Result<RatioRow> {
    if !(ratio >= MIN_RATIO) {
        return Err(Error::Validity(format!("ratio {ratio} is below {MIN_RATIO}")));
    }
    let (state, f) = build_min_state(ratio, 1.0)?;
    let report = uncertainty_report(&f, &format!("ratio={ratio}"))?;
    Ok(RatioRow {
        ratio,
        state,
        achieved_mean: mean_r(&f)?,
        achieved_var: variance_r(&f)?,
        residual: residual_eq15(&state, &f)?,
        report,
    })
}

/// Audits each ratio independently; failures are reported per entry.
pub fn product_vs_ratio(ratios: &[f64]) -> Vec<Result<RatioRow>> {
    ratios.iter().map(|&r| audit_ratio(r)).collect()
}
