use radunc_core::hydrogen::{coordinate_variance, moment_kramers, radial_momentum_variance, to_f64};
use radunc_core::radial_numerics::{
    default_alphas, r_cubed_rr_prime, sample_hydrogen, uncertainty_report, weyl_scan, GridHint,
};
use radunc_core::QuantumNumbers;

fn states(n_max: u32) -> impl Iterator<Item = QuantumNumbers> {
    (1..=n_max).flat_map(|n| (0..n).map(move |l| QuantumNumbers::new(n, l).unwrap()))
}

#[test]
fn sampled_states_match_exact_moments() {
    for q in states(6) {
        let f = sample_hydrogen(q, None).unwrap();
        let rep = uncertainty_report(&f, &q.to_string()).unwrap();
        let mean = to_f64(&moment_kramers(q, 1).unwrap());
        assert!((rep.mean_r - mean).abs() <= 1e-8 * mean, "{q}");
        assert!((rep.var_r / to_f64(&coordinate_variance(q)) - 1.0).abs() <= 1e-8, "{q}");
        assert!((rep.var_pr / to_f64(&radial_momentum_variance(q)) - 1.0).abs() <= 1e-7, "{q}");
        assert!(rep.bound_satisfied);
        assert!((r_cubed_rr_prime(&f).unwrap() + 1.5).abs() <= 1e-6, "{q}");
    }
}

#[test]
fn coarser_grids_lose_accuracy_but_not_the_bound() {
    let q = QuantumNumbers::new(3, 0).unwrap();
    let exact = to_f64(&radial_momentum_variance(q));
    let error = |spacing: f64| {
        let f = sample_hydrogen(q, Some(GridHint { r_max: None, spacing: Some(spacing) })).unwrap();
        let rep = uncertainty_report(&f, "coarse").unwrap();
        assert!(rep.product >= 0.25);
        (rep.var_pr - exact).abs()
    };
    assert!(error(0.1) > error(0.01));
}

#[test]
fn weyl_scan_excited_state() {
    let q = QuantumNumbers::new(5, 2).unwrap();
    let f = sample_hydrogen(q, None).unwrap();
    let rep = uncertainty_report(&f, "5,2").unwrap();
    let scan = weyl_scan(&f, &default_alphas(rep.var_r, 41)).unwrap();
    let target = -0.5 / to_f64(&coordinate_variance(q));
    assert!(scan.min_direct() >= -1e-10);
    assert!((scan.fitted_vertex() / target - 1.0).abs() <= 1e-4);
    assert!((scan.i3_coeff - 1.0).abs() <= 1e-5);
    // The minimum of the quadratic is the bound's slack.
    let at_vertex = rep.var_pr - 1.0 / (4.0 * rep.var_r);
    assert!((scan.i2_coeff - scan.i3_coeff.powi(2) / (4.0 * scan.i1_coeff) - at_vertex).abs() <= 1e-6);
}
