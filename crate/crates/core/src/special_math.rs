//! Special functions and quadrature kernels on `[0, ∞)`.
//!
//! Associated Laguerre polynomials are evaluated with the three-term
//! recurrence in the degree. Gauss–Laguerre rules are built by Newton
//! iteration on `L_m` and integrate `∫₀^∞ e^(−x/scale) p(x) dx` exactly for
//! polynomials of degree `≤ 2m − 1`. Tabulated integrands on a [`RadialGrid`]
//! go through an end-corrected trapezoid rule of order six on uniform grids
//! and the plain trapezoid rule otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial_numerics::{GridScheme, RadialGrid};

/// Largest Gauss–Laguerre order accepted by [`build_gauss_laguerre`].
///
/// Above this order the outermost weights (∝ e^(−x_max), x_max ≈ 4m)
/// underflow the smallest normal `f64`.
pub const MAX_GAUSS_LAGUERRE_ORDER: usize = 160;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 200;

/// Evaluates the associated Laguerre polynomial `L_k^α(x)`.
pub fn assoc_laguerre(k: usize, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!(
            "associated Laguerre parameter must exceed -1, got {alpha}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {x}")));
    }
    Ok(laguerre_recurrence(k, alpha, x))
}

/// Recurrence core without argument validation.
pub(crate) fn laguerre_recurrence(k: usize, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + alpha - x;
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + alpha - x) * curr - (j + alpha) * prev) / (j + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// Exact-product table of `ln(n!)` for `n ≤ 170` (the last factorial that
/// fits in an `f64`).
fn log_factorial_table() -> &'static [f64; 171] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; 171]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; 171];
        let mut product = 1.0_f64;
        for (n, slot) in table.iter_mut().enumerate().skip(1) {
            product *= n as f64;
            *slot = product.ln();
        }
        table
    })
}

/// Returns `ln(n!)`.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 170 {
        return log_factorial_table()[n as usize];
    }
    // Stirling series; the first omitted term is below 1e-20 for n > 170.
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// How a [`QuadratureRule`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    GaussLaguerre { order: usize, scale: f64 },
    CompositeOnGrid,
}

/// Nodes and positive weights of a quadrature on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: QuadratureKind,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule: `Σ w_i f(x_i)`.
    ///
    /// For a Gauss–Laguerre rule this approximates `∫₀^∞ e^(−x/scale) f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the `order`-point Gauss–Laguerre rule for the weight `e^(−x/scale)`.
pub fn build_gauss_laguerre(order: usize, scale: f64) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::Domain("Gauss-Laguerre order must be at least 1".into()));
    }
    if order > MAX_GAUSS_LAGUERRE_ORDER {
        return Err(Error::Unsupported(format!(
            "Gauss-Laguerre order {order} exceeds maximum {MAX_GAUSS_LAGUERRE_ORDER}"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }

    let m = order as f64;
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let mut z = 0.0_f64;
    for i in 0..order {
        // Initial guesses for the i-th smallest root of L_m.
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * m),
            1 => z + 15.0 / (1.0 + 2.5 * m),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut converged = false;
        let mut log_weight = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            // L_m(z) and L_{m-1}(z) with derivative m(L_m - L_{m-1})/z.
            let mut p1 = 1.0_f64;
            let mut p2 = 0.0_f64;
            for j in 1..=order {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            let dp = m * (p1 - p2) / z;
            let step = p1 / dp;
            z -= step;
            log_weight = -(m.ln() + dp.abs().ln() + p2.abs().ln());
            if step.abs() <= NEWTON_TOL * z.max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Unsupported(format!(
                "Newton iteration for Gauss-Laguerre root {i} of order {order} did not converge"
            )));
        }
        nodes.push(z);
        weights.push(log_weight.exp());
    }

    for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
        *x *= scale;
        *w *= scale;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: QuadratureKind::GaussLaguerre { order, scale },
    })
}

/// Gregory end weights (in units of the spacing) for the first six points
/// of a uniform grid; mirrored at the far end, interior weights are 1.
/// Exact for polynomials of degree ≤ 5, error O(h⁶).
const GREGORY_END_WEIGHTS: [f64; 6] = [
    19087.0 / 60480.0,
    84199.0 / 60480.0,
    18869.0 / 30240.0,
    37621.0 / 30240.0,
    55031.0 / 60480.0,
    61343.0 / 60480.0,
];

/// Composite quadrature weights for a grid: end-corrected (Gregory)
/// trapezoid on uniform grids, plain trapezoid otherwise.
pub fn composite_weights(grid: &RadialGrid) -> Vec<f64> {
    let r = grid.points();
    let len = r.len();
    let ends = GREGORY_END_WEIGHTS.len();
    match grid.scheme() {
        GridScheme::Uniform { spacing: h } if len >= 2 * ends => gregory(len, h),
        // Uniform in t = ln r: ∫ f dr = ∫ f r dt.
        GridScheme::Geometric { ratio } if len >= 2 * ends => {
            let mut w = gregory(len, ratio.ln());
            w.iter_mut().zip(r).for_each(|(w, &r)| *w *= r);
            w
        }
        _ => {
            let mut w = vec![0.0; len];
            for i in 0..len.saturating_sub(1) {
                let half = 0.5 * (r[i + 1] - r[i]);
                w[i] += half;
                w[i + 1] += half;
            }
            w
        }
    }
}

fn gregory(len: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; len];
    for (j, &c) in GREGORY_END_WEIGHTS.iter().enumerate() {
        w[j] = h * c;
        w[len - 1 - j] = h * c;
    }
    w
}

/// Integrates tabulated values over the span of `grid`.
pub fn integrate_sampled(values: &[f64], grid: &RadialGrid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::Contract(format!(
            "{} values supplied for a grid of {} points",
            values.len(),
            grid.len()
        )));
    }
    Ok(values
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| v * w)
        .sum())
}

/// The composite rule of `grid`, packaged as a [`QuadratureRule`].
pub fn composite_rule(grid: &RadialGrid) -> QuadratureRule {
    QuadratureRule {
        nodes: grid.points().to_vec(),
        weights: grid.weights().to_vec(),
        kind: QuadratureKind::CompositeOnGrid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Explicit expansions L_k^α(x) = Σ_j (−1)^j C(k+α, k−j) x^j / j!.
    fn laguerre_explicit(k: usize, alpha: f64, x: f64) -> f64 {
        let binom = |top: f64, bottom: usize| -> f64 {
            (0..bottom).fold(1.0, |acc, i| acc * (top - i as f64) / (i as f64 + 1.0))
        };
        (0..=k)
            .map(|j| {
                let fact: f64 = (1..=j).map(|i| i as f64).product();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * binom(k as f64 + alpha, k - j) * x.powi(j as i32) / fact
            })
            .sum()
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(assoc_laguerre(0, 2.5, 7.0).unwrap(), 1.0);
        assert_eq!(assoc_laguerre(1, 0.0, 3.0).unwrap(), -2.0);
        // L_2^1(x) = 3 − 3x + x²/2 at x = 2.
        assert_relative_eq!(assoc_laguerre(2, 1.0, 2.0).unwrap(), -1.0, epsilon = 1e-15);
        assert_relative_eq!(laguerre_explicit(2, 1.0, 2.0), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_rejects_alpha_at_or_below_minus_one() {
        assert!(matches!(assoc_laguerre(3, -1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(assoc_laguerre(3, -2.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(assoc_laguerre(3, f64::NAN, 0.5), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn recurrence_matches_explicit_expansion(
            k in 0usize..=5,
            alpha in -0.9f64..5.0,
            x in 0.0f64..50.0,
        ) {
            let rec = assoc_laguerre(k, alpha, x).unwrap();
            let exp = laguerre_explicit(k, alpha, x);
            let scale = exp.abs().max(1.0);
            prop_assert!((rec - exp).abs() <= 1e-10 * scale, "k={k} α={alpha} x={x}: {rec} vs {exp}");
        }

        #[test]
        fn recurrence_is_finite_up_to_degree_thirty(
            k in 0usize..=30,
            alpha in -0.9f64..5.0,
            x in 0.0f64..50.0,
        ) {
            prop_assert!(assoc_laguerre(k, alpha, x).unwrap().is_finite());
        }
    }

    #[test]
    fn log_factorial_examples() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert_relative_eq!(log_factorial(5), 120.0_f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(log_factorial(5), 4.787491742782046, max_relative = 1e-15);
    }

    #[test]
    fn log_factorial_is_continuous_across_stirling_switch() {
        for n in 171..200u64 {
            let step = log_factorial(n) - log_factorial(n - 1);
            assert_relative_eq!(step, (n as f64).ln(), max_relative = 1e-12);
        }
        // ln(20!) from the exact integer product.
        let exact: u64 = (1..=20).product();
        assert_relative_eq!(log_factorial(20), (exact as f64).ln(), max_relative = 1e-15);
    }

    #[test]
    fn gauss_laguerre_small_orders() {
        let one = build_gauss_laguerre(1, 1.0).unwrap();
        assert_relative_eq!(one.nodes()[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(one.weights()[0], 1.0, epsilon = 1e-14);

        let two = build_gauss_laguerre(2, 1.0).unwrap();
        let s2 = 2.0_f64.sqrt();
        assert_relative_eq!(two.nodes()[0], 2.0 - s2, epsilon = 1e-14);
        assert_relative_eq!(two.nodes()[1], 2.0 + s2, epsilon = 1e-14);
    }

    #[test]
    fn gauss_laguerre_invariants() {
        for order in [1, 2, 5, 17, 64, 100, MAX_GAUSS_LAGUERRE_ORDER] {
            let rule = build_gauss_laguerre(order, 1.0).unwrap();
            assert_eq!(rule.len(), order);
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(rule.nodes()[0] >= 0.0);
            assert!(rule.weights().iter().all(|&w| w > 0.0), "order {order}");
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() <= 1e-12, "order {order}: Σw = {total}");
        }
    }

    #[test]
    fn gauss_laguerre_exact_for_monomials() {
        for m in 1..=20usize {
            let rule = build_gauss_laguerre(m, 1.0).unwrap();
            let mut factorial = 1.0;
            for j in 0..=(2 * m - 1) {
                if j > 0 {
                    factorial *= j as f64;
                }
                let got = rule.integrate(|x| x.powi(j as i32));
                assert!(
                    (got - factorial).abs() <= 1e-10 * factorial,
                    "m={m} j={j}: {got} vs {factorial}"
                );
            }
        }
    }

    #[test]
    fn gauss_laguerre_scale() {
        // ∫₀^∞ e^(−x/3) x² dx = 2·3³.
        let rule = build_gauss_laguerre(4, 3.0).unwrap();
        assert_relative_eq!(rule.integrate(|x| x * x), 54.0, max_relative = 1e-13);
        let total: f64 = rule.weights().iter().sum();
        assert_relative_eq!(total, 3.0, max_relative = 1e-13);
    }

    #[test]
    fn gauss_laguerre_errors() {
        assert!(matches!(build_gauss_laguerre(0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(
            build_gauss_laguerre(MAX_GAUSS_LAGUERRE_ORDER + 1, 1.0),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(build_gauss_laguerre(256, 1.0), Err(Error::Unsupported(_))));
        assert!(matches!(build_gauss_laguerre(3, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn integrate_sampled_examples() {
        let grid = RadialGrid::uniform(0.0, 1.0, 1001).unwrap();
        assert_eq!(integrate_sampled(&vec![0.0; 1001], &grid).unwrap(), 0.0);
        let linear: Vec<f64> = grid.points().to_vec();
        assert!((integrate_sampled(&linear, &grid).unwrap() - 0.5).abs() <= 1e-10);

        let grid = RadialGrid::uniform(0.0, 40.0, 4001).unwrap();
        let density: Vec<f64> = grid
            .points()
            .iter()
            .map(|&r| 4.0 * r * r * (-2.0 * r).exp())
            .collect();
        assert!((integrate_sampled(&density, &grid).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn integrate_sampled_length_mismatch() {
        let grid = RadialGrid::uniform(0.0, 1.0, 101).unwrap();
        assert!(matches!(
            integrate_sampled(&[1.0; 100], &grid),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn uniform_rule_exact_for_quintics() {
        let grid = RadialGrid::uniform(0.0, 2.0, 64).unwrap();
        let quintic: Vec<f64> = grid.points().iter().map(|&r| r.powi(5) - r * r * r - r).collect();
        // ∫₀² (r⁵ − r³ − r) dr = 64/6 − 4 − 2
        assert_relative_eq!(
            integrate_sampled(&quintic, &grid).unwrap(),
            64.0 / 6.0 - 6.0,
            epsilon = 1e-12
        );
        assert!(grid.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn composite_rules_converge_at_nominal_order() {
        let err = |grid: RadialGrid| {
            let exact = (-grid.r_min()).exp() - (-grid.r_max()).exp();
            let v: Vec<f64> = grid.points().iter().map(|&r| (-r).exp()).collect();
            (integrate_sampled(&v, &grid).unwrap() - exact).abs()
        };
        // At least sixth order: halving the spacing divides the error by ≥ 2⁶.
        let coarse = err(RadialGrid::uniform(0.0, 10.0, 101).unwrap());
        let fine = err(RadialGrid::uniform(0.0, 10.0, 201).unwrap());
        let ratio = coarse / fine;
        assert!(ratio > 55.0, "uniform ratio {ratio}");

        // Same rule in ln r on a geometric grid.
        let coarse = err(RadialGrid::geometric(1e-3, 10.0, 101).unwrap());
        let fine = err(RadialGrid::geometric(1e-3, 10.0, 201).unwrap());
        let ratio = coarse / fine;
        assert!(ratio > 55.0, "geometric ratio {ratio}");

    }
}
