//! Bound states of `u″ = 2[U_eff(r) − E] u`, `u = rR`, by Numerov shooting.
//!
//! Outward and inward Numerov solutions are compared through their discrete
//! Wronskian in the variable `y = (1 − h²g/12) u`. The three-term recurrence
//! for `y` is symmetric, so that Wronskian is the same at every grid index:
//! its sign is a pole-free mismatch function of `E` whatever matching point
//! is used, and bisection on it cannot lock onto a spurious crossing. The
//! matching point (outermost classical turning point) only controls
//! conditioning.

mod potential;

use serde::{Deserialize, Serialize};

pub use potential::{effective_potential, PotentialKind, PotentialSpec, TabulatedPotential};

use crate::error::{Error, Result};
use crate::hydrogen::UncertaintyReport;
use crate::radial_numerics::{uncertainty_report, RadialGrid, SampledRadialFunction, MIN_GRID_POINTS};
use crate::special_math::integrate_sampled;

/// Bisection stops once the energy bracket is narrower than this.
pub const ENERGY_TOLERANCE: f64 = 1e-11;

/// Grid points per local de Broglie wavelength at the top of the bracket.
/// Numerov's energy error scales as the fourth power of this ratio's
/// inverse; 400 keeps Coulomb and oscillator levels within ~1e-9.
pub const POINTS_PER_WAVELENGTH: f64 = 400.0;

/// `∫ κ dr` from the outer turning point to `r_max`: the tail is cut where
/// the WKB amplitude has dropped by `e^(−TAIL_DECAY)`.
pub const TAIL_DECAY: f64 = 12.0;

/// Largest `|⟨p̂_r²⟩ − 2[E − ⟨U_eff⟩]|` accepted by [`audit_uncertainty`].
pub const ENERGY_CONSISTENCY_TOLERANCE: f64 = 1e-5;

const MAX_BISECTIONS: u32 = 200;
const MAX_GRID_POINTS: usize = 1 << 23;
const SERIES_TERMS: usize = 12;
const RESCALE_ABOVE: f64 = 1e150;
/// The wavelength criterion starts this many spacings from the origin.
const ORIGIN_SKIP: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub iterations: u32,
    pub bracket_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateSolution {
    pub energy: f64,
    pub nodes: u32,
    pub wavefunction: SampledRadialFunction,
    pub convergence: Convergence,
}

/// An energy interval over which the shooting mismatch changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBracket {
    pub lo: f64,
    pub hi: f64,
    /// Radial node count of the level inside the bracket.
    pub nodes: u32,
}

/// A solved state, its uncertainty report, and the energy cross-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverAudit {
    pub report: UncertaintyReport,
    /// `⟨p̂_r²⟩` from quadrature.
    pub p2_quadrature: f64,
    /// `2[E − ⟨U_eff⟩]`.
    pub p2_from_energy: f64,
}

impl SolverAudit {
    pub fn energy_mismatch(&self) -> f64 {
        (self.p2_quadrature - self.p2_from_energy).abs()
    }

    pub fn energy_consistent(&self) -> bool {
        self.energy_mismatch() <= ENERGY_CONSISTENCY_TOLERANCE
    }
}

/// The grid and the energy-independent part of `g = 2(U_eff − E)`.
struct Shooter<'a> {
    spec: &'a PotentialSpec,
    grid: RadialGrid,
    h: f64,
    /// `2 U_eff` at each point; unused at a regular origin.
    two_v: Vec<f64>,
    /// Points below this index come from the origin series.
    series_end: usize,
    regular_origin: bool,
}

/// One energy's outward and inward solutions.
struct Shot {
    u_out: Vec<f64>,
    u_in: Vec<f64>,
    matching: usize,
    /// `sin` of the angle between the two `(y_m, y_{m+1})` vectors.
    mismatch: f64,
}

impl<'a> Shooter<'a> {
    fn new(spec: &'a PotentialSpec, e_top: f64) -> Result<Self> {
        let threshold = spec.threshold();
        if !(e_top < threshold) {
            return Err(Error::Domain(format!(
                "energy {e_top} is not below the dissociation threshold {threshold}"
            )));
        }
        let (r0, domain_end) = spec.domain();
        let survey = Survey::new(spec, e_top)?;
        let (h, r_max) = (survey.spacing(), survey.r_max);
        let mut intervals = ((r_max - r0) / h).ceil();
        if r0 + intervals * h > domain_end {
            intervals -= 1.0;
        }
        let count = intervals as usize + 1;
        if count > MAX_GRID_POINTS {
            return Err(Error::Resolution(format!(
                "shooting grid would need {count} points (spacing {h:e} up to r = {r_max})"
            )));
        }
        let count = count.max(MIN_GRID_POINTS);
        let grid = RadialGrid::uniform(r0, r0 + (count - 1) as f64 * h, count)?;
        let regular_origin = r0 == 0.0;
        let two_v = grid
            .points()
            .iter()
            .map(|&r| if r > 0.0 { effective_potential(spec, r).map(|v| 2.0 * v) } else { Ok(f64::NAN) })
            .collect::<Result<Vec<f64>>>()?;
        // Keep h²g/12 well below 1 where the recurrence starts.
        let l = spec.l as f64;
        let series_end = if regular_origin {
            (((l * (l + 1.0)) / 3.0).sqrt().ceil() as usize).max(1)
        } else {
            1
        };
        Ok(Self { spec, grid, h, two_v, series_end, regular_origin })
    }

    fn len(&self) -> usize {
        self.two_v.len()
    }

    /// `u(r)` near a regular origin with leading coefficient 1.
    fn series(&self, energy: f64) -> [f64; SERIES_TERMS] {
        let (charge, c) = self.spec.origin_expansion();
        let l = self.spec.l as f64;
        let mut a = [0.0; SERIES_TERMS];
        a[0] = 1.0;
        for k in 1..SERIES_TERMS {
            let mut rhs = -2.0 * charge * a[k - 1];
            if k >= 2 {
                rhs -= 2.0 * energy * a[k - 2];
                for (j, &cj) in c.iter().enumerate() {
                    if k >= 2 + j {
                        rhs += 2.0 * cj * a[k - 2 - j];
                    }
                }
            }
            a[k] = rhs / (k as f64 * (k as f64 + 2.0 * l + 1.0));
        }
        a
    }

    fn series_value(&self, a: &[f64; SERIES_TERMS], r: f64) -> f64 {
        let poly = a.iter().rev().fold(0.0, |acc, &c| acc * r + c);
        r.powi(self.spec.l as i32 + 1) * poly
    }

    fn f(&self, j: usize, energy: f64) -> f64 {
        1.0 - self.h * self.h * (self.two_v[j] - 2.0 * energy) / 12.0
    }

    /// Outward solution on `0..=last`, its last two `y` values.
    fn outward(&self, energy: f64, last: usize) -> (Vec<f64>, [f64; 2]) {
        let h2 = self.h * self.h;
        let s = self.series_end;
        let mut u = vec![0.0; last + 1];
        let mut y_prev;
        if self.regular_origin {
            let a = self.series(energy);
            for (j, slot) in u.iter_mut().enumerate().take(s + 1) {
                *slot = self.series_value(&a, j as f64 * self.h);
            }
            // (g u)(0) = u″(0): 2a₁ for l = 0, 2 for l = 1, 0 otherwise.
            let gu0 = match self.spec.l {
                0 => 2.0 * a[1],
                1 => 2.0,
                _ => 0.0,
            };
            y_prev = if s == 1 { -h2 * gu0 / 12.0 } else { self.f(s - 1, energy) * u[s - 1] };
        } else {
            u[1] = self.h;
            y_prev = 0.0;
        }
        let mut y = self.f(s, energy) * u[s];
        for j in s..last {
            let g = self.two_v[j] - 2.0 * energy;
            let next = 2.0 * y - y_prev + h2 * g * u[j];
            y_prev = y;
            y = next;
            u[j + 1] = y / self.f(j + 1, energy);
            if u[j + 1].abs() > RESCALE_ABOVE {
                let scale = RESCALE_ABOVE.recip();
                u.iter_mut().take(j + 2).for_each(|v| *v *= scale);
                y *= scale;
                y_prev *= scale;
            }
        }
        (u, [y_prev, y])
    }

    /// Inward solution on `first..len`, seeded with the local decay rate.
    fn inward(&self, energy: f64, first: usize) -> (Vec<f64>, [f64; 2]) {
        let n = self.len();
        let h2 = self.h * self.h;
        let mut u = vec![0.0; n];
        let kappa = (self.two_v[n - 1] - 2.0 * energy).max(0.0).sqrt();
        u[n - 1] = 1.0;
        u[n - 2] = (kappa * self.h).exp();
        let mut y_next = self.f(n - 1, energy) * u[n - 1];
        let mut y = self.f(n - 2, energy) * u[n - 2];
        for j in (first + 1..n - 1).rev() {
            let g = self.two_v[j] - 2.0 * energy;
            let prev = 2.0 * y - y_next + h2 * g * u[j];
            y_next = y;
            y = prev;
            u[j - 1] = y / self.f(j - 1, energy);
            if u[j - 1].abs() > RESCALE_ABOVE {
                let scale = RESCALE_ABOVE.recip();
                u.iter_mut().skip(j - 1).for_each(|v| *v *= scale);
                y *= scale;
                y_next *= scale;
            }
        }
        (u, [y, y_next])
    }

    fn matching_index(&self, energy: f64) -> usize {
        let n = self.len();
        let lo = self.series_end + 2;
        let turning = (lo..n).rev().find(|&j| self.two_v[j] <= 2.0 * energy);
        let j = turning.unwrap_or_else(|| {
            (lo..n)
                .min_by(|&a, &b| self.two_v[a].total_cmp(&self.two_v[b]))
                .unwrap_or(lo)
        });
        j.clamp(lo, n - 3)
    }

    fn shoot(&self, energy: f64) -> Shot {
        let m = self.matching_index(energy);
        let (u_out, [yo0, yo1]) = self.outward(energy, m + 1);
        let (u_in, [yi0, yi1]) = self.inward(energy, m);
        let w = yo0 * yi1 - yo1 * yi0;
        let scale = yo0.hypot(yo1) * yi0.hypot(yi1);
        Shot { u_out, u_in, matching: m, mismatch: w / scale }
    }

    /// Radial nodes of the outward solution across the whole grid: by the
    /// oscillation theorem, the number of levels below `energy`.
    fn levels_below(&self, energy: f64) -> u32 {
        let (u, _) = self.outward(energy, self.len() - 1);
        sign_changes(&u[1..])
    }

    fn assemble(&self, shot: &Shot) -> Vec<f64> {
        let m = shot.matching;
        let out = &shot.u_out;
        let inn = &shot.u_in;
        // Least-squares match of the inward branch over the two shared points.
        let num = out[m] * inn[m] + out[m + 1] * inn[m + 1];
        let den = inn[m] * inn[m] + inn[m + 1] * inn[m + 1];
        let s = num / den;
        let mut u = out[..=m].to_vec();
        u.extend(inn[m + 1..].iter().map(|v| v * s));
        u
    }
}

/// What the grid needs to know about `U_eff` at the top energy `e`.
struct Survey {
    /// `(r, 2[e − U_eff(r)])` on a geometric sample of the allowed region.
    allowed: Vec<(f64, f64)>,
    /// Where the tail has decayed by `e^(−TAIL_DECAY)`.
    r_max: f64,
}

impl Survey {
    fn new(spec: &PotentialSpec, e: f64) -> Result<Self> {
        const STEP: f64 = 1.002;
        let (r0, end) = spec.domain();
        let mut r = if r0 > 0.0 { r0 } else { 1e-6 };
        let mut allowed = Vec::new();
        let (mut v_min, mut r_at_min) = (f64::INFINITY, r);
        let mut tail = 0.0;
        let mut prev_kappa: Option<(f64, f64)> = None;
        loop {
            let v = effective_potential(spec, r)?;
            if v < v_min {
                (v_min, r_at_min) = (v, r);
            }
            if v <= e {
                allowed.push((r, 2.0 * (e - v)));
                tail = 0.0;
                prev_kappa = None;
            } else if !allowed.is_empty() {
                let kappa = (2.0 * (v - e)).sqrt();
                if let Some((rp, kp)) = prev_kappa {
                    tail += 0.5 * (kappa + kp) * (r - rp);
                }
                prev_kappa = Some((r, kappa));
                if tail >= TAIL_DECAY {
                    return Ok(Self { allowed, r_max: r });
                }
            }
            if r >= end {
                if allowed.is_empty() {
                    break;
                }
                return Err(Error::Resolution(format!(
                    "potential table ends at r = {end} before the bound-state tail has decayed"
                )));
            }
            r = (r * STEP).min(end);
        }
        // Below the bottom of the well there is no level; any grid serves a
        // sign check.
        let k2 = 2.0 * (v_min - e);
        Ok(Self { allowed: vec![(r_at_min, k2)], r_max: r_at_min + TAIL_DECAY / k2.sqrt() })
    }

    /// Largest power-of-two spacing giving [`POINTS_PER_WAVELENGTH`] at every
    /// allowed radius not below the spacing itself.
    fn spacing(&self) -> f64 {
        let dyadic = |length: f64| 2f64.powi(length.log2().floor() as i32);
        let resolving = |k2: f64| {
            dyadic(2.0 * std::f64::consts::PI / (k2.max(1e-300).sqrt() * POINTS_PER_WAVELENGTH))
        };
        let k2_from = |h: f64| {
            self.allowed.iter().filter(|(r, _)| *r >= ORIGIN_SKIP * h).map(|&(_, k2)| k2).fold(0.0, f64::max)
        };
        // The search descends from a spacing that already puts
        // POINTS_PER_WAVELENGTH points across the allowed region; starting
        // coarser can stop at a spurious fixed point whose origin skip hides
        // the whole well. The floor keeps a barely-open well affordable.
        let extent = match (self.allowed.first(), self.allowed.last()) {
            (Some(first), Some(last)) if last.0 > first.0 => last.0 - first.0,
            _ => self.r_max,
        };
        let seed = (self.r_max / MIN_GRID_POINTS as f64)
            .min(extent / POINTS_PER_WAVELENGTH)
            .max(4.0 * self.r_max / MAX_GRID_POINTS as f64);
        // k² over r ≥ h grows as h shrinks, so this descends to a fixed point.
        let mut h = dyadic(seed);
        loop {
            let next = resolving(k2_from(h)).min(h);
            if next == h {
                return h;
            }
            h = next;
        }
    }
}

fn sign_changes(u: &[f64]) -> u32 {
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in u {
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    count
}

fn check_bracket(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid energy range [{lo}, {hi}]")));
    }
    Ok(())
}

/// Locates sign changes of the shooting mismatch on `samples` evenly spaced
/// energies spanning `range`.
pub fn scan_spectrum(spec: &PotentialSpec, range: (f64, f64), samples: usize) -> Result<Vec<EnergyBracket>> {
    if samples < 2 {
        return Err(Error::Contract(format!("spectrum scan needs at least 2 samples, got {samples}")));
    }
    let (lo, hi) = range;
    check_bracket(lo, hi)?;
    let shooter = Shooter::new(spec, hi)?;
    let energies: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let signs: Vec<f64> = energies.iter().map(|&e| shooter.shoot(e).mismatch).collect();
    let mut out = Vec::new();
    for i in 0..samples - 1 {
        if signs[i] * signs[i + 1] < 0.0 {
            let (a, b) = (energies[i], energies[i + 1]);
            out.push(EnergyBracket { lo: a, hi: b, nodes: shooter.levels_below(a) });
        }
    }
    Ok(out)
}

/// Bisects `bracket` down to [`ENERGY_TOLERANCE`] and returns the normalized
/// state.
pub fn solve_bound_state(
    spec: &PotentialSpec,
    radial_nodes: u32,
    bracket: (f64, f64),
) -> Result<BoundStateSolution> {
    let (mut lo, mut hi) = bracket;
    check_bracket(lo, hi)?;
    let shooter = Shooter::new(spec, hi)?;
    let f_lo = shooter.shoot(lo).mismatch;
    let f_hi = shooter.shoot(hi).mismatch;
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::NoEigenvalue { lo, hi });
    }
    let mut iterations = 0;
    while hi - lo >= ENERGY_TOLERANCE && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shooter.shoot(mid).mismatch * f_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let energy = 0.5 * (lo + hi);
    let shot = shooter.shoot(energy);
    let u = shooter.assemble(&shot);
    let nodes = sign_changes(&u[1..u.len() - 1]);
    if nodes != radial_nodes {
        return Err(Error::Bracket { expected: radial_nodes as usize, found: nodes as usize });
    }
    let wavefunction = to_radial(&shooter, &u)?;
    Ok(BoundStateSolution {
        energy,
        nodes,
        wavefunction,
        convergence: Convergence { iterations, bracket_width: hi - lo },
    })
}

/// `R = u/r`, normalized, with the `r → 0` limit at a regular origin.
fn to_radial(shooter: &Shooter<'_>, u: &[f64]) -> Result<SampledRadialFunction> {
    let grid = &shooter.grid;
    let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    let norm = integrate_sampled(&sq, grid)?.sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Contract("shooting produced a vanishing wavefunction".into()));
    }
    let values: Vec<f64> = grid
        .points()
        .iter()
        .zip(u)
        .map(|(&r, &v)| {
            if r > 0.0 {
                v / (r * norm)
            } else if shooter.spec.l == 0 {
                // u = r(1 + a₁r + …) so R(0) is the leading coefficient.
                1.0 / norm
            } else {
                0.0
            }
        })
        .collect();
    SampledRadialFunction::new(grid.clone(), values)
}

/// Uncertainty report for a solved state plus the check
/// `⟨p̂_r²⟩ = 2[E − ⟨U_eff⟩]`.
pub fn audit_uncertainty(spec: &PotentialSpec, solution: &BoundStateSolution) -> Result<SolverAudit> {
    let f = &solution.wavefunction;
    let report = uncertainty_report(f, &format!("{spec}, nodes={}", solution.nodes))?;
    let r = f.grid().points();
    let integrand = r
        .iter()
        .zip(f.values())
        .map(|(&r, &v)| if r > 0.0 { effective_potential(spec, r).map(|u| u * r * r * v * v) } else { Ok(0.0) })
        .collect::<Result<Vec<f64>>>()?;
    let mean_u = integrate_sampled(&integrand, f.grid())?;
    let p2_quadrature = report.var_pr + report.mean_pr * report.mean_pr;
    Ok(SolverAudit { report, p2_quadrature, p2_from_energy: 2.0 * (solution.energy - mean_u) })
}
