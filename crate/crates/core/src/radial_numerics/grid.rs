use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_math::composite_weights;

/// Smallest grid accepted anywhere in the crate.
pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    Uniform { spacing: f64 },
    Geometric { ratio: f64 },
}

/// A strictly increasing set of radii with its composite quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    points: Vec<f64>,
    scheme: GridScheme,
    r_max: f64,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl RadialGrid {
    /// `count` equally spaced points on `[r_min, r_max]`, both ends included.
    pub fn uniform(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        check_span(r_min, r_max, count)?;
        let spacing = (r_max - r_min) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| r_min + i as f64 * spacing).collect();
        points[count - 1] = r_max;
        Ok(Self::assemble(points, GridScheme::Uniform { spacing }))
    }

    /// Uniform grid covering `[r_min, r_max]` with spacing at most `max_spacing`.
    ///
    /// The spacing is the largest power of two not above `max_spacing` and the
    /// ends are snapped outward to multiples of it, so every node is exact in
    /// binary floating point. Second-difference stencils would otherwise pick
    /// up `R′ · δr / h²` from rounded node positions.
    pub fn uniform_with_spacing(r_min: f64, r_max: f64, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0 && max_spacing.is_finite()) {
            return Err(Error::Domain(format!("grid spacing must be positive, got {max_spacing}")));
        }
        if !(r_min >= 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::Domain(format!("invalid grid span [{r_min}, {r_max}]")));
        }
        let mut spacing = 2f64.powi(max_spacing.log2().floor() as i32);
        let mut start = (r_min / spacing).floor();
        let mut stop = (r_max / spacing).ceil();
        // Halve until the grid is long enough.
        while ((stop - start) as usize) + 1 < MIN_GRID_POINTS {
            spacing *= 0.5;
            start = (r_min / spacing).floor();
            stop = (r_max / spacing).ceil();
        }
        let count = (stop - start) as usize + 1;
        let points: Vec<f64> = (0..count).map(|i| (start + i as f64) * spacing).collect();
        Ok(Self::assemble(points, GridScheme::Uniform { spacing }))
    }

    /// `count` points `r_first · q^i` ending exactly at `r_max`.
    pub fn geometric(r_first: f64, r_max: f64, count: usize) -> Result<Self> {
        if !(r_first > 0.0) {
            return Err(Error::Domain("geometric grid must start at a positive radius".into()));
        }
        check_span(r_first, r_max, count)?;
        let ratio = (r_max / r_first).powf(1.0 / (count - 1) as f64);
        let mut points: Vec<f64> = (0..count).map(|i| r_first * ratio.powi(i as i32)).collect();
        points[count - 1] = r_max;
        Ok(Self::assemble(points, GridScheme::Geometric { ratio }))
    }

    fn assemble(points: Vec<f64>, scheme: GridScheme) -> Self {
        let r_max = *points.last().expect("grid is non-empty");
        let mut grid = Self { points, scheme, r_max, weights: Vec::new() };
        grid.weights = composite_weights(&grid);
        grid
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn r_min(&self) -> f64 {
        self.points[0]
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Composite quadrature weights matching [`RadialGrid::points`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Spacing for uniform grids.
    pub fn spacing(&self) -> Option<f64> {
        match self.scheme {
            GridScheme::Uniform { spacing } => Some(spacing),
            GridScheme::Geometric { .. } => None,
        }
    }
}

fn check_span(r_min: f64, r_max: f64, count: usize) -> Result<()> {
    if count < MIN_GRID_POINTS {
        return Err(Error::Contract(format!(
            "grid needs at least {MIN_GRID_POINTS} points, got {count}"
        )));
    }
    if !(r_min >= 0.0 && r_min.is_finite() && r_max.is_finite() && r_max > r_min) {
        return Err(Error::Domain(format!("invalid grid span [{r_min}, {r_max}]")));
    }
    Ok(())
}
