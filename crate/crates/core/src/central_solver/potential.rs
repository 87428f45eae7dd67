use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A potential tabulated on strictly increasing radii, interpolated with
/// monotone piecewise-cubic Hermite (Fritsch–Carlson) slopes so no spurious
/// extrema appear between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct TabulatedPotential {
    r: Vec<f64>,
    u: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedPotential {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "tabulated potential needs at least 2 points, got {}",
                points.len()
            )));
        }
        let (r, u): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if let Some(i) = r.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Domain(format!("radius {} is not a finite nonnegative number", r[i])));
        }
        if let Some(i) = u.iter().position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("potential at r = {} is not finite", r[i])));
        }
        if let Some(w) = r.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Domain(format!(
                "radii must be strictly increasing: {} follows {}",
                w[1], w[0]
            )));
        }
        let slopes = pchip_slopes(&r, &u);
        Ok(Self { r, u, slopes })
    }

    /// Parses whitespace-separated `r U` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            let number = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("invalid number {s:?}: {e}"),
                })
            };
            points.push((number(fields[0])?, number(fields[1])?));
        }
        if points.is_empty() {
            return Err(Error::Parse { line: 0, message: "no data lines".into() });
        }
        Self::new(points)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.r.iter().copied().zip(self.u.iter().copied())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!("r = {x} lies outside the table range [{lo}, {hi}]")));
        }
        let k = self.r.partition_point(|&ri| ri <= x).clamp(1, self.r.len() - 1) - 1;
        let h = self.r[k + 1] - self.r[k];
        let t = (x - self.r[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        Ok((2.0 * t3 - 3.0 * t2 + 1.0) * self.u[k]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[k]
            + (-2.0 * t3 + 3.0 * t2) * self.u[k + 1]
            + (t3 - t2) * h * self.slopes[k + 1])
    }

    /// Value and slope at the first tabulated radius.
    pub(crate) fn head(&self) -> (f64, f64) {
        (self.u[0], self.slopes[0])
    }
}

impl TryFrom<Vec<(f64, f64)>> for TabulatedPotential {
    type Error = Error;
    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<TabulatedPotential> for Vec<(f64, f64)> {
    fn from(t: TabulatedPotential) -> Self {
        t.r.into_iter().zip(t.u).collect()
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// Three-point end slope, limited to keep the end interval monotone.
fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `U = −Z/r`.
    Coulomb { charge: f64 },
    /// `U = ω²r²/2`.
    Harmonic { omega: f64 },
    Tabulated(TabulatedPotential),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub l: u32,
    pub description: String,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, l: u32, description: impl Into<String>) -> Result<Self> {
        match &kind {
            PotentialKind::Coulomb { charge } if !(*charge > 0.0 && charge.is_finite()) => {
                return Err(Error::Domain(format!("Coulomb charge must be positive, got {charge}")));
            }
            PotentialKind::Harmonic { omega } if !(*omega > 0.0 && omega.is_finite()) => {
                return Err(Error::Domain(format!("oscillator frequency must be positive, got {omega}")));
            }
            _ => {}
        }
        Ok(Self { kind, l, description: description.into() })
    }

    pub fn coulomb(charge: f64, l: u32) -> Result<Self> {
        Self::new(PotentialKind::Coulomb { charge }, l, format!("coulomb Z={charge}"))
    }

    pub fn harmonic(omega: f64, l: u32) -> Result<Self> {
        Self::new(PotentialKind::Harmonic { omega }, l, format!("harmonic omega={omega}"))
    }

    pub fn tabulated(table: TabulatedPotential, l: u32, description: impl Into<String>) -> Result<Self> {
        Self::new(PotentialKind::Tabulated(table), l, description)
    }

    /// `U(r)` without the centrifugal term.
    pub fn potential(&self, r: f64) -> Result<f64> {
        match &self.kind {
            PotentialKind::Coulomb { charge } => {
                if !(r > 0.0) {
                    return Err(Error::Domain(format!("Coulomb potential needs r > 0, got {r}")));
                }
                Ok(-charge / r)
            }
            PotentialKind::Harmonic { omega } => Ok(0.5 * omega * omega * r * r),
            PotentialKind::Tabulated(t) => t.eval(r),
        }
    }

    /// Upper end of the discrete spectrum.
    pub fn threshold(&self) -> f64 {
        match &self.kind {
            PotentialKind::Coulomb { .. } => 0.0,
            PotentialKind::Harmonic { .. } => f64::INFINITY,
            PotentialKind::Tabulated(t) => {
                let (_, end) = t.range();
                self.potential(end).unwrap_or(f64::NAN) + centrifugal(self.l, end)
            }
        }
    }

    /// Radial interval the solver may use.
    pub(crate) fn domain(&self) -> (f64, f64) {
        match &self.kind {
            PotentialKind::Tabulated(t) => t.range(),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Coefficients of `U(r) ≈ −Z/r + Σ_j c_j r^j` near the inner end.
    pub(crate) fn origin_expansion(&self) -> (f64, [f64; 3]) {
        match &self.kind {
            PotentialKind::Coulomb { charge } => (*charge, [0.0; 3]),
            PotentialKind::Harmonic { omega } => (0.0, [0.0, 0.0, 0.5 * omega * omega]),
            PotentialKind::Tabulated(t) => {
                let (u0, slope) = t.head();
                (0.0, [u0, slope, 0.0])
            }
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, l={}", self.description, self.l)
    }
}

pub(crate) fn centrifugal(l: u32, r: f64) -> f64 {
    let l = l as f64;
    l * (l + 1.0) / (2.0 * r * r)
}

/// `U(r) + l(l+1)/(2r²)` for `r > 0`.
pub fn effective_potential(spec: &PotentialSpec, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("effective potential needs r > 0, got {r}")));
    }
    Ok(spec.potential(r)? + centrifugal(spec.l, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_potential_examples() {
        let c0 = PotentialSpec::coulomb(1.0, 0).unwrap();
        let c1 = PotentialSpec::coulomb(1.0, 1).unwrap();
        let h0 = PotentialSpec::harmonic(1.0, 0).unwrap();
        assert_eq!(effective_potential(&c0, 2.0).unwrap(), -0.5);
        assert_eq!(effective_potential(&c1, 1.0).unwrap(), 0.0);
        assert_eq!(effective_potential(&h0, 2.0).unwrap(), 2.0);
        assert!(matches!(effective_potential(&c0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn spec_invariants() {
        assert!(matches!(PotentialSpec::coulomb(0.0, 0), Err(Error::Domain(_))));
        assert!(matches!(PotentialSpec::harmonic(-1.0, 0), Err(Error::Domain(_))));
        assert!(TabulatedPotential::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(TabulatedPotential::new(vec![(0.0, 1.0), (1.0, f64::NAN)]).is_err());
        assert!(TabulatedPotential::new(vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn table_interpolates_and_rejects_outside() {
        let pts: Vec<(f64, f64)> = (0..=40).map(|i| {
            let r = 0.25 * i as f64;
            (r, 0.5 * r * r)
        }).collect();
        let t = TabulatedPotential::new(pts).unwrap();
        assert_eq!(t.eval(2.0).unwrap(), 2.0);
        assert!((t.eval(2.1).unwrap() - 0.5 * 2.1 * 2.1).abs() < 2e-3);
        assert!(matches!(t.eval(10.5), Err(Error::Domain(_))));
        let spec = PotentialSpec::tabulated(t, 0, "table").unwrap();
        assert!(matches!(effective_potential(&spec, 11.0), Err(Error::Domain(_))));
    }

    #[test]
    fn interpolation_stays_monotone() {
        // A step: an unconstrained cubic spline would overshoot.
        let t = TabulatedPotential::new(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let v = t.eval(0.01 * i as f64).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let ok = TabulatedPotential::parse("# header\n0 1\n1.0 2 # trailing\n\n2 3.5\n").unwrap();
        assert_eq!(ok.range(), (0.0, 2.0));
        match TabulatedPotential::parse("0 1\n1 2\n2 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match TabulatedPotential::parse("0 1\n1 2 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(TabulatedPotential::parse("# nothing\n"), Err(Error::Parse { .. })));
        assert!(matches!(TabulatedPotential::parse("1 0\n0 1\n"), Err(Error::Domain(_))));
    }

    #[test]
    fn serde_round_trip() {
        let t = TabulatedPotential::new(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 2.5)]).unwrap();
        let spec = PotentialSpec::tabulated(t, 1, "t").unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: PotentialSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
