use std::path::PathBuf;

use rayon::prelude::*;
use radunc_core::central_solver::{
    audit_uncertainty, solve_bound_state, PotentialSpec, TabulatedPotential, ENERGY_TOLERANCE,
};
use radunc_core::hydrogen::{
    coordinate_variance, coordinate_variance_from_moments, exceeds_quarter, min_product_over_l,
    moment_kramers, radial_momentum_variance, radial_momentum_variance_from_energy, to_f64,
    uncertainty_product, QuantumNumbers,
};
use radunc_core::min_state::product_vs_ratio;
use radunc_core::radial_numerics::{
    default_alphas, r_cubed_rr_prime, sample_hydrogen, uncertainty_report, weyl_scan,
};
use radunc_core::{Error, Result};
use num_rational::BigRational;

use crate::output::{Cell, Check, Report};
use crate::tolerance::{Tolerance, Tolerances};

/// `p/q`, also for integers.
fn fraction(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn record_overrides(report: &mut Report, tol: &Tolerances) {
    for (t, v) in tol.overrides() {
        report.parameter(&format!("tol.{t}"), v);
    }
}

struct TableRow {
    cells: Vec<Cell>,
    identities_hold: bool,
    above_quarter: bool,
}

pub fn table(n_max: u32) -> Result<Report> {
    let mut report = Report::new("table");
    report.parameter("n_max", n_max);
    report.columns = columns(&[
        "n", "l", "var_r", "var_r_decimal", "var_pr", "var_pr_decimal", "product",
        "product_decimal", "min_over_l",
    ]);
    let shells: Vec<(u32, u32, Vec<TableRow>)> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let (argmin, _) = min_product_over_l(n)?;
            let rows = (0..n)
                .map(|l| {
                    let q = QuantumNumbers::new(n, l)?;
                    let var_r = coordinate_variance(q);
                    let var_pr = radial_momentum_variance(q);
                    let product = uncertainty_product(q);
                    let identities_hold = var_r == coordinate_variance_from_moments(q)
                        && var_pr == radial_momentum_variance_from_energy(q)
                        && product == &var_r * &var_pr;
                    Ok(TableRow {
                        cells: vec![
                            n.into(),
                            l.into(),
                            fraction(&var_r).into(),
                            to_f64(&var_r).into(),
                            fraction(&var_pr).into(),
                            to_f64(&var_pr).into(),
                            fraction(&product).into(),
                            to_f64(&product).into(),
                            (l == argmin).into(),
                        ],
                        identities_hold,
                        above_quarter: exceeds_quarter(&product),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((n, argmin, rows))
        })
        .collect::<Result<Vec<_>>>()?;

    let total: usize = shells.iter().map(|(_, _, r)| r.len()).sum();
    let broken = shells.iter().flat_map(|(_, _, r)| r).filter(|r| !r.identities_hold).count();
    let below = shells.iter().flat_map(|(_, _, r)| r).filter(|r| !r.above_quarter).count();
    let off_circular: Vec<String> = shells
        .iter()
        .filter(|(n, argmin, _)| *argmin != n - 1)
        .map(|(n, argmin, _)| format!("n={n}: l={argmin}"))
        .collect();
    report.checks = vec![
        Check::holds("exact_identities", broken == 0, format!("{broken} of {total} rows disagree")),
        Check::holds("above_quarter", below == 0, format!("{below} of {total} products <= 1/4")),
        Check::holds(
            "argmin_circular",
            off_circular.is_empty(),
            if off_circular.is_empty() {
                format!("l = n-1 minimizes for every n <= {n_max}")
            } else {
                format!("other minimizers: {}", off_circular.join(", "))
            },
        ),
    ];
    report.rows = shells.into_iter().flat_map(|(_, _, r)| r).map(|r| r.cells).collect();
    Ok(report)
}

pub fn verify(n: u32, l: u32, tol: &Tolerances) -> Result<Report> {
    let q = QuantumNumbers::new(n, l)?;
    let f = sample_hydrogen(q, None)?;
    let rep = uncertainty_report(&f, &q.to_string())?;
    let r3 = r_cubed_rr_prime(&f)?;
    let mean_exact = to_f64(&moment_kramers(q, 1)?);
    let var_r = coordinate_variance(q);
    let var_pr = radial_momentum_variance(q);
    let product = uncertainty_product(q);
    let (var_r_exact, var_pr_exact, product_exact) = (to_f64(&var_r), to_f64(&var_pr), to_f64(&product));

    let mut report = Report::new("verify");
    report.parameter("n", n);
    report.parameter("l", l);
    report.parameter("grid_points", f.grid().len());
    report.parameter("r_max", f.grid().r_max());
    report.parameter("spacing", f.grid().spacing().unwrap_or(f64::NAN));
    record_overrides(&mut report, tol);
    report.columns = columns(&["quantity", "quadrature", "exact", "exact_fraction", "delta"]);
    let mut row = |name: &str, value: f64, exact: f64, frac: String| {
        report.rows.push(vec![name.into(), value.into(), exact.into(), frac.into(), (value - exact).into()]);
    };
    row("mean_r", rep.mean_r, mean_exact, fraction(&moment_kramers(q, 1)?));
    row("var_r", rep.var_r, var_r_exact, fraction(&var_r));
    row("mean_pr", rep.mean_pr, 0.0, "0/1".into());
    row("var_pr_gradient", rep.var_pr_gradient, var_pr_exact, fraction(&var_pr));
    row("var_pr_laplacian", rep.var_pr_laplacian, var_pr_exact, fraction(&var_pr));
    row("var_pr", rep.var_pr, var_pr_exact, fraction(&var_pr));
    row("product", rep.product, product_exact, fraction(&product));
    row("r3_r_dr", r3, -1.5, "-3/2".into());

    let moments = (rep.mean_r - mean_exact).abs().max((rep.var_r - var_r_exact).abs());
    report.checks = vec![
        Check::at_most("norm", rep.norm_defect, tol.get(Tolerance::Norm)),
        Check::at_most("mean_pr", rep.mean_pr.abs(), tol.get(Tolerance::MeanPr)),
        Check::at_most("ibp", rep.var_pr_disagreement(), tol.get(Tolerance::Ibp)),
        Check::near("r_cubed", r3, -1.5, tol.get(Tolerance::RCubed)),
        Check::at_most("moments", moments, tol.get(Tolerance::Moments)),
        Check::near("var_pr", rep.var_pr, var_pr_exact, tol.get(Tolerance::Product)),
        Check::near("product", rep.product, product_exact, tol.get(Tolerance::Product)),
        Check::at_least("bound", rep.product, 0.25 - tol.get(Tolerance::Bound)),
    ];
    Ok(report)
}

pub fn weyl(n: u32, l: u32, count: usize, tol: &Tolerances) -> Result<Report> {
    let q = QuantumNumbers::new(n, l)?;
    let f = sample_hydrogen(q, None)?;
    let rep = uncertainty_report(&f, &q.to_string())?;
    let scan = weyl_scan(&f, &default_alphas(rep.var_r, count))?;

    let mut report = Report::new("weyl");
    report.parameter("n", n);
    report.parameter("l", l);
    report.parameter("alphas", count);
    record_overrides(&mut report, tol);
    report.columns = columns(&["alpha", "i_direct", "i_quadratic", "gap"]);
    for ((&a, &d), &qd) in scan.alphas.iter().zip(&scan.i_direct).zip(&scan.i_quadratic) {
        report.rows.push(vec![a.into(), d.into(), qd.into(), (d - qd).into()]);
    }
    let vertex_error = (scan.fitted_vertex() / scan.alpha_star - 1.0).abs();
    report.checks = vec![
        Check::at_least("nonnegative", scan.min_direct(), -tol.get(Tolerance::WeylMin)),
        Check::at_most("quadratic_form", scan.max_form_gap(), tol.get(Tolerance::WeylGap)),
        Check::near("i1_coefficient", scan.i1_coeff, rep.var_r, tol.get(Tolerance::WeylGap)),
        Check::near("i2_coefficient", scan.i2_coeff, rep.var_pr, tol.get(Tolerance::WeylGap)),
        Check::near("i3_coefficient", scan.i3_coeff, 1.0, tol.get(Tolerance::Linear)),
        Check::near("vertex", scan.fitted_vertex(), scan.alpha_star, tol.get(Tolerance::Vertex) * scan.alpha_star.abs()),
    ];
    report.checks.last_mut().expect("just pushed").detail += &format!(" (relative {vertex_error:.3e})");
    Ok(report)
}

pub fn minstate(ratios: &[f64], tol: &Tolerances) -> Result<Report> {
    let mut report = Report::new("minstate");
    report.parameter("ratios", ratios.to_vec());
    record_overrides(&mut report, tol);
    report.columns = columns(&[
        "ratio", "cutoff", "achieved_mean", "achieved_var", "product", "residual", "status",
    ]);
    let rows = product_vs_ratio(ratios);
    let mut valid: Vec<(f64, f64)> = Vec::new();
    for (ratio, row) in ratios.iter().zip(&rows) {
        match row {
            Ok(r) => {
                report.rows.push(vec![
                    r.ratio.into(),
                    r.state.cutoff.into(),
                    r.achieved_mean.into(),
                    r.achieved_var.into(),
                    r.product().into(),
                    r.residual.into(),
                    "ok".into(),
                ]);
                report.checks.push(Check::at_most(
                    format!("residual ratio={ratio}"),
                    r.residual,
                    tol.get(Tolerance::Residual),
                ));
                report.checks.push(Check::at_least(
                    format!("bound ratio={ratio}"),
                    r.product(),
                    0.25 - tol.get(Tolerance::Bound),
                ));
                if r.ratio >= 20.0 {
                    report.checks.push(Check::near(
                        format!("saturation ratio={ratio}"),
                        r.product(),
                        0.25,
                        tol.get(Tolerance::Saturation),
                    ));
                }
                valid.push((r.ratio, r.product()));
            }
            Err(e) => {
                let mut cells = vec![Cell::from(*ratio)];
                cells.extend(std::iter::repeat_n(Cell::Empty, 5));
                cells.push(format!("error: {e}").into());
                report.rows.push(cells);
            }
        }
    }
    report.checks.push(Check::holds(
        "any_valid_row",
        !valid.is_empty(),
        format!("{} of {} ratios accepted", valid.len(), ratios.len()),
    ));
    if valid.len() >= 2 {
        valid.sort_by(|a, b| a.0.total_cmp(&b.0));
        let offending: Vec<String> = valid
            .windows(2)
            .filter(|w| !(w[1].1 < w[0].1))
            .map(|w| format!("product({}) = {} not below product({}) = {}", w[1].0, w[1].1, w[0].0, w[0].1))
            .collect();
        report.checks.push(Check::holds(
            "decreasing",
            offending.is_empty(),
            if offending.is_empty() {
                "products strictly decrease with ratio".to_string()
            } else {
                offending.join("; ")
            },
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub enum PotentialArg {
    Coulomb,
    Harmonic,
    File(PathBuf),
}

impl std::str::FromStr for PotentialArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "coulomb" => PotentialArg::Coulomb,
            "harmonic" => PotentialArg::Harmonic,
            path => PotentialArg::File(PathBuf::from(path)),
        })
    }
}

pub struct SolveArgs {
    pub potential: PotentialArg,
    pub l: u32,
    pub nodes: u32,
    pub bracket: (f64, f64),
    pub charge: f64,
    pub omega: f64,
}

pub fn solve(args: &SolveArgs, tol: &Tolerances) -> Result<Report> {
    let spec = match &args.potential {
        PotentialArg::Coulomb => PotentialSpec::coulomb(args.charge, args.l)?,
        PotentialArg::Harmonic => PotentialSpec::harmonic(args.omega, args.l)?,
        PotentialArg::File(path) => {
            let table = TabulatedPotential::from_path(path).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", path.display()),
                },
                other => other,
            })?;
            PotentialSpec::tabulated(table, args.l, path.display().to_string())?
        }
    };
    let sol = solve_bound_state(&spec, args.nodes, args.bracket)?;
    let audit = audit_uncertainty(&spec, &sol)?;
    let rep = &audit.report;

    let mut report = Report::new("solve");
    report.parameter("potential", spec.description.clone());
    report.parameter("l", args.l);
    report.parameter("nodes", args.nodes);
    report.parameter("bracket", vec![args.bracket.0, args.bracket.1]);
    record_overrides(&mut report, tol);
    report.columns = columns(&[
        "energy", "nodes", "iterations", "bracket_width", "grid_points", "mean_r", "var_r",
        "var_pr", "product", "p2_quadrature", "p2_from_energy",
    ]);
    report.rows.push(vec![
        sol.energy.into(),
        sol.nodes.into(),
        sol.convergence.iterations.into(),
        sol.convergence.bracket_width.into(),
        Cell::Int(sol.wavefunction.grid().len() as i64),
        rep.mean_r.into(),
        rep.var_r.into(),
        rep.var_pr.into(),
        rep.product.into(),
        audit.p2_quadrature.into(),
        audit.p2_from_energy.into(),
    ]);
    report.checks = vec![
        Check::holds(
            "converged",
            sol.convergence.bracket_width < ENERGY_TOLERANCE,
            format!("bracket width {:.3e} after {} bisections", sol.convergence.bracket_width, sol.convergence.iterations),
        ),
        Check::at_most("norm", rep.norm_defect, 1e-8),
        Check::at_most("ibp", rep.var_pr_disagreement(), tol.get(Tolerance::Ibp)),
        Check::near("energy", audit.p2_quadrature, audit.p2_from_energy, tol.get(Tolerance::Energy)),
        Check::at_least("bound", rep.product, 0.25 - tol.get(Tolerance::Bound)),
    ];
    Ok(report)
}
