//! Fourth-order finite differences on radial grids.
//!
//! Weights come from Fornberg's recursion. Geometric grids are differentiated
//! as uniform grids in `ln r` followed by the chain rule. First derivatives use five-point windows (centered
//! in the interior, one-sided at the ends). Second derivatives use centered
//! five-point windows in the interior and six-point one-sided windows at the
//! two outermost points of each end, which keeps every stencil fourth order.

use crate::error::{Error, Result};
use crate::radial_numerics::grid::{GridScheme, RadialGrid};

/// Finite-difference weights for derivatives `0..=max_order` at `x0`,
/// indexed `[order][node]`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    First,
    Second,
}

impl Derivative {
    fn order(self) -> usize {
        match self {
            Derivative::First => 1,
            Derivative::Second => 2,
        }
    }

    /// Window `(start, width)` used at index `i` of a grid with `len` points.
    fn window(self, i: usize, len: usize) -> (usize, usize) {
        let width = match self {
            Derivative::Second if i < 2 || i + 2 >= len => 6,
            _ => 5,
        };
        let start = i.saturating_sub(2).min(len - width);
        (start, width)
    }
}

/// Differentiates tabulated values on `grid`.
pub fn differentiate(values: &[f64], grid: &RadialGrid, which: Derivative) -> Result<Vec<f64>> {
    let len = grid.len();
    if values.len() != len {
        return Err(Error::Contract(format!(
            "{} values supplied for a grid of {len} points",
            values.len()
        )));
    }
    if len < 6 {
        return Err(Error::Contract("differentiation stencil needs at least 6 points".into()));
    }
    match grid.scheme() {
        GridScheme::Uniform { spacing } => Ok(uniform(values, spacing, which)),
        GridScheme::Geometric { ratio } => {
            // Uniform in t = ln r: f′ = f_t / r, f″ = (f_tt − f_t) / r².
            let dt = ratio.ln();
            let ft = uniform(values, dt, Derivative::First);
            let r = grid.points();
            Ok(match which {
                Derivative::First => ft.iter().zip(r).map(|(d, r)| d / r).collect(),
                Derivative::Second => uniform(values, dt, Derivative::Second)
                    .iter()
                    .zip(&ft)
                    .zip(r)
                    .map(|((tt, t), r)| (tt - t) / (r * r))
                    .collect(),
            })
        }
    }
}

fn uniform(values: &[f64], spacing: f64, which: Derivative) -> Vec<f64> {
    let len = values.len();
    let order = which.order();
    // Weights depend only on the offset pattern; cache the interior one.
    let offsets: Vec<f64> = (0..6).map(|k| k as f64 * spacing).collect();
    let interior = fornberg_weights(2.0 * spacing, &offsets[..5], order).swap_remove(order);
    let mut out = vec![0.0; len];
    for (i, slot) in out.iter_mut().enumerate() {
        let (start, width) = which.window(i, len);
        let window = &values[start..start + width];
        if width == 5 && start + 2 == i {
            *slot = dot(&interior, window);
        } else {
            let x0 = (i - start) as f64 * spacing;
            let w = fornberg_weights(x0, &offsets[..width], order).swap_remove(order);
            *slot = dot(&w, window);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
