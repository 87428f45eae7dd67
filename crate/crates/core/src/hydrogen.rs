//! Analytic hydrogen atom (ħ = m = e = 1).
//!
//! Radial moments `⟨r^k⟩` are exact rationals generated by the
//! Kramers–Pasternack recursion
//!
//! ```text
//! (k+1)/n² ⟨r^k⟩ − (2k+1) ⟨r^(k−1)⟩ + (k/4) [(2l+1)² − k²] ⟨r^(k−2)⟩ = 0
//! ```
//!
//! run upward from `⟨r⁰⟩ = 1` and `⟨r⁻¹⟩ = 1/n²`, with `⟨r⁻²⟩ = 2/(n³(2l+1))`
//! as a separate seed. The closed-form variances and their product are kept
//! as independent expressions so they can be checked against the moments.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_math::{laguerre_recurrence, log_factorial};

/// Default highest moment order kept in a [`MomentTable`].
pub const DEFAULT_MAX_MOMENT: i32 = 4;

/// Lowest moment order the recursion supports.
pub const MIN_MOMENT: i32 = -2;

/// Principal and orbital quantum numbers of a bound hydrogen state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    n: u32,
    l: u32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("principal quantum number must be at least 1".into()));
        }
        if l >= n {
            return Err(Error::Domain(format!("orbital quantum number l={l} must be below n={n}")));
        }
        Ok(Self { n, l })
    }

    /// The circular state `(n, n − 1)`.
    pub fn circular(n: u32) -> Result<Self> {
        Self::new(n, n.saturating_sub(1))
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn l(self) -> u32 {
        self.l
    }

    /// Number of radial nodes, `n − l − 1`.
    pub fn radial_nodes(self) -> u32 {
        self.n - self.l - 1
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={},l={}", self.n, self.l)
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `E_n = −1/(2n²)`.
pub fn energy(n: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("principal quantum number must be at least 1".into()));
    }
    let n = n as i64;
    Ok(rat(-1, 2 * n * n))
}

/// Normalized radial wavefunction `R_nl(r)`, positive as `r → 0⁺`.
pub fn radial_wavefunction(q: QuantumNumbers, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be finite and nonnegative, got {r}")));
    }
    Ok(radial_polynomial_part(q, r) * (-r / q.n as f64).exp())
}

/// `R_nl(r) · e^(r/n)`: the wavefunction with its exponential envelope removed.
pub(crate) fn radial_polynomial_part(q: QuantumNumbers, r: f64) -> f64 {
    let n = q.n as f64;
    let l = q.l;
    let x = 2.0 * r / n;
    let poly = laguerre_recurrence(q.radial_nodes() as usize, 2.0 * l as f64 + 1.0, x);
    // N² = (2/n)³ (n−l−1)! / (2n (n+l)!)
    let log_norm = 0.5
        * (3.0 * (2.0 / n).ln() + log_factorial(u64::from(q.n - l - 1))
            - (2.0 * n).ln()
            - log_factorial(u64::from(q.n + l)));
    if l == 0 {
        return log_norm.exp() * poly;
    }
    if x == 0.0 {
        return 0.0;
    }
    (log_norm + l as f64 * x.ln()).exp() * poly
}

/// `⟨r^k⟩` for `k ∈ [−2, ∞)`, exact.
pub fn moment_kramers(q: QuantumNumbers, k: i32) -> Result<BigRational> {
    if k < MIN_MOMENT {
        return Err(Error::Unsupported(format!(
            "moment order {k} is below the recursion limit {MIN_MOMENT}"
        )));
    }
    let table = MomentTable::new(q, k.max(0))?;
    Ok(table.get(k).cloned().expect("table covers requested order"))
}

/// Exact radial moments `⟨r^k⟩` of one state for `k ∈ [−2, max_order]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    state: QuantumNumbers,
    moments: BTreeMap<i32, BigRational>,
}

impl MomentTable {
    pub fn new(state: QuantumNumbers, max_order: i32) -> Result<Self> {
        if max_order < 0 {
            return Err(Error::Domain(format!("max moment order must be nonnegative, got {max_order}")));
        }
        let n = u64::from(state.n);
        let l = u64::from(state.l);
        let n2 = int(n * n);
        let two_l_plus_one_sq = int((2 * l + 1) * (2 * l + 1));

        let mut moments = BTreeMap::new();
        moments.insert(-2, rat(2, 1) / (int(n * n * n) * int(2 * l + 1)));
        moments.insert(-1, BigRational::one() / n2.clone());
        moments.insert(0, BigRational::one());
        for k in 1..=max_order {
            let kk = int(k as u64);
            let prev1 = &moments[&(k - 1)];
            let prev2 = &moments[&(k - 2)];
            let coupling = kk.clone() / int(4) * (two_l_plus_one_sq.clone() - kk.clone() * kk.clone());
            let value = n2.clone() / int(k as u64 + 1)
                * (int(2 * k as u64 + 1) * prev1 - coupling * prev2);
            moments.insert(k, value);
        }
        Ok(Self { state, moments })
    }

    pub fn state(&self) -> QuantumNumbers {
        self.state
    }

    pub fn get(&self, k: i32) -> Option<&BigRational> {
        self.moments.get(&k)
    }

    pub fn max_order(&self) -> i32 {
        *self.moments.keys().next_back().expect("table is non-empty")
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.moments.iter().map(|(&k, v)| (k, v))
    }
}

/// `⟨δr²⟩ = [n²(n²+2) − l²(l+1)²]/4`.
pub fn coordinate_variance(q: QuantumNumbers) -> BigRational {
    let n = u64::from(q.n);
    let l = u64::from(q.l);
    (int(n * n) * int(n * n + 2) - int(l * l) * int((l + 1) * (l + 1))) / int(4)
}

/// `⟨r²⟩ − ⟨r⟩²` from the Kramers moments.
pub fn coordinate_variance_from_moments(q: QuantumNumbers) -> BigRational {
    let table = MomentTable::new(q, 2).expect("order 2 is valid");
    let mean = table.get(1).expect("order 1 present");
    table.get(2).expect("order 2 present") - mean * mean
}

/// `⟨δp̂_r²⟩ = 1/n² − 2l(l+1)/(n³(2l+1))`.
pub fn radial_momentum_variance(q: QuantumNumbers) -> BigRational {
    let n = u64::from(q.n);
    let l = u64::from(q.l);
    BigRational::one() / int(n * n) - int(2 * l * (l + 1)) / (int(n * n * n) * int(2 * l + 1))
}

/// `2E_n + 2⟨1/r⟩ − l(l+1)⟨1/r²⟩`, the expectation of `k²(r)` over the state.
pub fn radial_momentum_variance_from_energy(q: QuantumNumbers) -> BigRational {
    let table = MomentTable::new(q, 0).expect("order 0 is valid");
    let l = u64::from(q.l);
    let e = energy(q.n).expect("n >= 1");
    int(2) * e + int(2) * table.get(-1).expect("order -1 present")
        - int(l * (l + 1)) * table.get(-2).expect("order -2 present")
}

/// `{(n²+2)/4 − l²(l+1)²/(4n²)} · [1 − 2l(l+1)/(n(2l+1))]`.
pub fn uncertainty_product(q: QuantumNumbers) -> BigRational {
    let n = u64::from(q.n);
    let l = u64::from(q.l);
    let coordinate = int(n * n + 2) / int(4) - int(l * l * (l + 1) * (l + 1)) / int(4 * n * n);
    let momentum = BigRational::one() - int(2 * l * (l + 1)) / int(n * (2 * l + 1));
    coordinate * momentum
}

/// `(2n+1)/(4(2n−1))`, the circular-state product.
pub fn circular_product(n: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("principal quantum number must be at least 1".into()));
    }
    let n = i64::from(n);
    Ok(rat(2 * n + 1, 4 * (2 * n - 1)))
}

/// Scans `l ∈ [0, n−1]` and returns the first minimizer of the product.
pub fn min_product_over_l(n: u32) -> Result<(u32, BigRational)> {
    let mut best: Option<(u32, BigRational)> = None;
    for l in 0..n.max(1) {
        let value = uncertainty_product(QuantumNumbers::new(n, l)?);
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((l, value));
        }
    }
    best.ok_or_else(|| Error::Domain("principal quantum number must be at least 1".into()))
}

/// `⟨r⟩²`, `⟨δr²⟩` and their ratio for the circular state of shell `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularAsymptotics {
    pub mean_r_sq: BigRational,
    pub var_r: BigRational,
    pub ratio: f64,
}

pub fn circular_asymptotics(n: u32) -> Result<CircularAsymptotics> {
    let q = QuantumNumbers::circular(n)?;
    let mean = moment_kramers(q, 1)?;
    let mean_r_sq = &mean * &mean;
    let var_r = coordinate_variance(q);
    let ratio = to_f64(&(&mean_r_sq / &var_r));
    Ok(CircularAsymptotics { mean_r_sq, var_r, ratio })
}

/// Coordinate/momentum uncertainties of one state and the bound verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub label: String,
    pub mean_r: f64,
    pub var_r: f64,
    /// `i⟨p̂_r⟩`, real for real wavefunctions.
    pub mean_pr: f64,
    pub var_pr: f64,
    pub product: f64,
    pub bound_satisfied: bool,
    /// `∫ r²(R′ + R/r)² dr`.
    pub var_pr_gradient: f64,
    /// `−∫ r² R (R″ + 2R′/r) dr`.
    pub var_pr_laplacian: f64,
    pub norm_defect: f64,
}

impl UncertaintyReport {
    pub fn var_pr_disagreement(&self) -> f64 {
        (self.var_pr_gradient - self.var_pr_laplacian).abs()
    }
}

/// The report implied by the closed forms, for comparison with quadrature.
pub fn exact_report(q: QuantumNumbers, bound_tolerance: f64) -> UncertaintyReport {
    let var_r = to_f64(&coordinate_variance(q));
    let var_pr = to_f64(&radial_momentum_variance(q));
    let product = to_f64(&uncertainty_product(q));
    UncertaintyReport {
        label: q.to_string(),
        mean_r: to_f64(&moment_kramers(q, 1).expect("order 1 is supported")),
        var_r,
        mean_pr: 0.0,
        var_pr,
        product,
        bound_satisfied: product >= 0.25 - bound_tolerance,
        var_pr_gradient: var_pr,
        var_pr_laplacian: var_pr,
        norm_defect: 0.0,
    }
}

/// True when `value > 1/4` exactly.
pub fn exceeds_quarter(value: &BigRational) -> bool {
    *value > rat(1, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_math::build_gauss_laguerre;
    use approx::assert_relative_eq;

    fn q(n: u32, l: u32) -> QuantumNumbers {
        QuantumNumbers::new(n, l).unwrap()
    }

    #[test]
    fn quantum_number_validation() {
        assert!(QuantumNumbers::new(0, 0).is_err());
        assert!(QuantumNumbers::new(2, 2).is_err());
        assert!(QuantumNumbers::new(2, 5).is_err());
        assert_eq!(q(5, 2).radial_nodes(), 2);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(1).unwrap(), rat(-1, 2));
        assert_eq!(energy(2).unwrap(), rat(-1, 8));
        assert_eq!(energy(10).unwrap(), rat(-1, 200));
        assert!(matches!(energy(0), Err(Error::Domain(_))));
    }

    #[test]
    fn wavefunction_examples() {
        assert_relative_eq!(radial_wavefunction(q(1, 0), 0.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            radial_wavefunction(q(1, 0), 1.0).unwrap(),
            0.7357588823428847,
            max_relative = 1e-14
        );
        // R_21 = r e^(−r/2) / (2√6)
        let r = 1.7;
        assert_relative_eq!(
            radial_wavefunction(q(2, 1), r).unwrap(),
            r * (-r / 2.0).exp() / (2.0 * 6.0_f64.sqrt()),
            max_relative = 1e-14
        );
        assert!(radial_wavefunction(q(1, 0), -1.0).is_err());
    }

    #[test]
    fn wavefunction_positive_near_origin() {
        for n in 1..=8 {
            for l in 0..n {
                let r = 1e-3;
                assert!(radial_wavefunction(q(n, l), r).unwrap() > 0.0, "n={n} l={l}");
            }
        }
    }

    // Gauss–Laguerre with weight e^(−2r/n): r^(k+2) R² e^(2r/n) is a polynomial of
    // degree 2(n−1) + k + 2, so order n + 2 is exact up to rounding.
    fn quadrature_moment(state: QuantumNumbers, k: i32) -> f64 {
        let n = state.n as f64;
        let rule = build_gauss_laguerre(state.n as usize + 3, n / 2.0).unwrap();
        rule.integrate(|r| {
            let p = radial_polynomial_part(state, r);
            r.powi(k + 2) * p * p
        })
    }

    #[test]
    fn normalization_by_quadrature() {
        for n in 1..=12 {
            for l in 0..n {
                let norm = quadrature_moment(q(n, l), 0);
                assert!((norm - 1.0).abs() <= 1e-9, "n={n} l={l}: {norm}");
            }
        }
    }

    #[test]
    fn ground_state_moments_match_quadrature_oracle() {
        // Frozen from the oracle: ∫ r^(k+2) 4 e^(−2r) dr = (k+2)!/2^(k+1).
        assert_relative_eq!(quadrature_moment(q(1, 0), 1), 1.5, max_relative = 1e-13);
        assert_relative_eq!(quadrature_moment(q(1, 0), 2), 3.0, max_relative = 1e-13);
        assert_eq!(moment_kramers(q(1, 0), 1).unwrap(), rat(3, 2));
        assert_eq!(moment_kramers(q(1, 0), 2).unwrap(), rat(3, 1));
    }

    #[test]
    fn moment_seeds() {
        for n in 1..=10u32 {
            for l in 0..n {
                let s = q(n, l);
                let n64 = i64::from(n);
                assert_eq!(moment_kramers(s, 0).unwrap(), rat(1, 1));
                assert_eq!(moment_kramers(s, -1).unwrap(), rat(1, n64 * n64));
                assert_eq!(
                    moment_kramers(s, -2).unwrap(),
                    rat(2, n64 * n64 * n64 * (2 * i64::from(l) + 1))
                );
            }
        }
        assert!(matches!(moment_kramers(q(2, 0), -3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mean_radius_closed_form() {
        for n in 1..=20u32 {
            for l in 0..n {
                let (n64, l64) = (i64::from(n), i64::from(l));
                assert_eq!(
                    moment_kramers(q(n, l), 1).unwrap(),
                    rat(3 * n64 * n64 - l64 * (l64 + 1), 2)
                );
            }
        }
    }

    #[test]
    fn moments_cross_validate_against_gauss_laguerre() {
        for n in 1..=8u32 {
            for l in 0..n {
                let table = MomentTable::new(q(n, l), DEFAULT_MAX_MOMENT).unwrap();
                for k in [-2, -1, 1, 2, 3] {
                    let exact = to_f64(table.get(k).unwrap());
                    let quad = quadrature_moment(q(n, l), k);
                    assert!(
                        (quad - exact).abs() <= 1e-9 * exact.abs(),
                        "n={n} l={l} k={k}: {quad} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn moment_table_layout() {
        let table = MomentTable::new(q(3, 1), DEFAULT_MAX_MOMENT).unwrap();
        assert_eq!(table.max_order(), 4);
        assert_eq!(table.iter().count(), 7);
        assert_eq!(table.get(0).unwrap(), &rat(1, 1));
        assert!(table.get(5).is_none());
    }

    #[test]
    fn coordinate_variance_examples() {
        assert_eq!(coordinate_variance(q(1, 0)), rat(3, 4));
        assert_eq!(coordinate_variance(q(2, 1)), rat(5, 1));
        assert_eq!(coordinate_variance(q(3, 2)), rat(63, 4));
        assert_eq!(coordinate_variance_from_moments(q(3, 2)), rat(63, 4));
        for n in 1..=30u32 {
            let n64 = i64::from(n);
            assert_eq!(
                coordinate_variance(QuantumNumbers::circular(n).unwrap()),
                rat(n64 * n64 * (2 * n64 + 1), 4)
            );
        }
    }

    #[test]
    fn momentum_variance_examples() {
        assert_eq!(radial_momentum_variance(q(1, 0)), rat(1, 1));
        for n in 1..=20u32 {
            let n64 = i64::from(n);
            assert_eq!(radial_momentum_variance(q(n, 0)), rat(1, n64 * n64));
            assert_eq!(
                radial_momentum_variance(QuantumNumbers::circular(n).unwrap()),
                rat(1, n64 * n64 * (2 * n64 - 1))
            );
            for l in 0..n {
                assert_eq!(
                    radial_momentum_variance(q(n, l)),
                    radial_momentum_variance_from_energy(q(n, l))
                );
            }
        }
    }

    #[test]
    fn product_examples() {
        assert_eq!(uncertainty_product(q(1, 0)), rat(3, 4));
        assert_eq!(uncertainty_product(q(2, 0)), rat(3, 2));
        assert_eq!(uncertainty_product(q(2, 1)), rat(5, 12));
        assert_eq!(uncertainty_product(q(10, 9)), rat(21, 76));
        for n in 1..=30 {
            assert_eq!(
                uncertainty_product(QuantumNumbers::circular(n).unwrap()),
                circular_product(n).unwrap()
            );
        }
    }

    #[test]
    fn min_over_l_examples() {
        assert_eq!(min_product_over_l(1).unwrap(), (0, rat(3, 4)));
        assert_eq!(min_product_over_l(2).unwrap(), (1, rat(5, 12)));
        assert_eq!(min_product_over_l(50).unwrap(), (49, rat(101, 396)));
        assert!(min_product_over_l(0).is_err());
    }

    #[test]
    fn circular_asymptotics_examples() {
        let one = circular_asymptotics(1).unwrap();
        assert_eq!(one.mean_r_sq, rat(9, 4));
        assert_eq!(one.var_r, rat(3, 4));
        assert_relative_eq!(one.ratio, 3.0, max_relative = 1e-15);

        let big = circular_asymptotics(100).unwrap();
        let var_scaled = to_f64(&big.var_r) / (100f64.powi(3) / 2.0);
        let mean_scaled = to_f64(&big.mean_r_sq) / 100f64.powi(4);
        assert!((var_scaled - 1.0).abs() <= 0.01, "{var_scaled}");
        assert!((mean_scaled - 1.0).abs() <= 0.02, "{mean_scaled}");
        assert!(big.ratio > 190.0 && big.ratio < 210.0);
    }

    #[test]
    fn exact_report_fields() {
        let rep = exact_report(q(1, 0), 1e-9);
        assert_eq!(rep.mean_r, 1.5);
        assert_eq!(rep.var_r, 0.75);
        assert_eq!(rep.var_pr, 1.0);
        assert_eq!(rep.product, 0.75);
        assert!(rep.bound_satisfied);
        assert!(exceeds_quarter(&uncertainty_product(q(1, 0))));
    }
}
