//! Acceptance gate. Each criterion below runs end to end at its stated
//! tolerance and prints one pass/fail line; the randomized invariants
//! (criterion 7) live in the properties module and print one line per
//! invariant. Run with:
//!
//!     cargo test --test acceptance -- --nocapture

mod properties;

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::Instant;

use lancaster::families::FamilySpec;
use lancaster::identities::{
    check_diagonal_covariance, check_gamma_covariance, check_normal_covariance,
    check_records_covariance, SmoothFn,
};
use lancaster::maxcorr::{maximal_correlation, splitting_record_bound};
use lancaster::oracle::{
    ace_maxcorr, discretize, joint_pmf, max_residual, svd_maxcorr, unit_disc_grid, verify_diagonal,
};
use lancaster::simulate::{run as run_sim, Model, Params, Parent, SimRequest};

fn report(label: &str, budget_secs: f64, body: impl FnOnce() -> String) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("{label}: PASS ({elapsed:.2}s) - {detail}");
            assert!(
                elapsed < budget_secs,
                "{label} exceeded its {budget_secs}s budget: {elapsed:.2}s"
            );
        }
        Err(cause) => {
            println!("{label}: FAIL ({elapsed:.2}s)");
            resume_unwind(cause);
        }
    }
}

fn assert_close(label: &str, computed: f64, expected: f64, tol: f64) {
    assert!(
        (computed - expected).abs() <= tol,
        "{label}: computed {computed:.17e}, expected {expected:.17e}, tol {tol:.1e}"
    );
}

/// Criterion 1: every closed form matches its formula to 1e-12 across a
/// broad parameter sweep, and the splitting bound is bit-identical to
/// the gamma route it factors through.
#[test]
fn criterion_1_closed_forms() {
    report("criterion 1 [closed forms, 1e-12]", 1.0, || {
        let tol = 1e-12;
        let mut cases = 0usize;

        for &rho in &[-0.9, -0.5, 0.0, 0.3, 0.99] {
            for &(mu1, sigma1, mu2, sigma2) in
                &[(0.0, 1.0, 0.0, 1.0), (-1.5, 0.3, 2.0, 4.0), (7.0, 11.0, -3.0, 0.05)]
            {
                let spec = FamilySpec::BivariateNormal {
                    rho,
                    mu1,
                    sigma1,
                    mu2,
                    sigma2,
                };
                let r = maximal_correlation(&spec, 12).unwrap().r;
                assert_close("normal", r, rho.abs(), tol);
                cases += 1;
            }
        }

        for &(alpha, beta, gamma) in &[
            (1.0, 1.0, 1.0),
            (2.0, 1.0, 3.0),
            (0.5, 2.5, 1.5),
            (3.0, 0.0, 2.0),
            (1.0, 4.0, 1.0),
            (2.0, 2.0, 2.0),
            (0.3, 0.7, 5.0),
            (4.0, 1.0, 0.5),
            (1.5, 0.0, 1.5),
            (6.0, 3.0, 2.0),
        ] {
            let spec = FamilySpec::BetaType { alpha, beta, gamma };
            let expected = (alpha * gamma / ((alpha + beta) * (beta + gamma))).sqrt();
            let r = maximal_correlation(&spec, 12).unwrap().r;
            assert_close("beta-type", r, expected, tol);
            cases += 1;
        }

        for n in 2..=6usize {
            for j in 2..=n {
                for i in 1..j {
                    let spec = FamilySpec::UniformOrderStats { i, j, n };
                    let expected = (i as f64 * (n + 1 - j) as f64
                        / (j as f64 * (n + 1 - i) as f64))
                        .sqrt();
                    let r = maximal_correlation(&spec, 12).unwrap().r;
                    assert_close("uniform order stats", r, expected, tol);
                    cases += 1;
                }
            }
        }

        for n in 1..=6usize {
            for m in 1..=6usize {
                let spec = FamilySpec::ExponentialRecords { n, m };
                let expected = (n as f64 / (n + m) as f64).sqrt();
                let r = maximal_correlation(&spec, 12).unwrap().r;
                assert_close("records", r, expected, tol);
                cases += 1;
            }
        }

        for &(alpha0, alpha1, alpha2, lambda) in &[
            (2.0, 1.0, 3.0, 1.0),
            (1.0, 0.0, 1.0, 1.0),
            (0.7, 2.0, 0.0, 1.0),
            (2.0, 1.0, 3.0, 2.5),
            (0.5, 0.5, 0.5, 0.3),
            (3.0, 0.0, 0.0, 1.0),
            (1.0, 2.0, 3.0, 4.0),
            (5.0, 1.0, 1.0, 1.0),
            (0.25, 1.5, 2.5, 7.0),
            (2.0, 0.0, 5.0, 0.6),
        ] {
            let spec = FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda,
            };
            let expected = alpha0 / ((alpha0 + alpha1) * (alpha0 + alpha2)).sqrt();
            let r = maximal_correlation(&spec, 12).unwrap().r;
            assert_close("gamma", r, expected, tol);
            cases += 1;
        }

        for n in 1..=4usize {
            for n1 in 1..=4usize {
                for n2 in 1..=4usize {
                    let bound = splitting_record_bound(n, n1, n2).unwrap();
                    let expected =
                        n as f64 / ((n + n1) as f64 * (n + n2) as f64).sqrt();
                    assert_close("splitting bound", bound, expected, tol);
                    let gamma = FamilySpec::BivariateGamma {
                        alpha0: n as f64,
                        alpha1: n1 as f64,
                        alpha2: n2 as f64,
                        lambda: 1.0,
                    };
                    let via_gamma = maximal_correlation(&gamma, 1).unwrap().r;
                    assert_eq!(
                        bound.to_bits(),
                        via_gamma.to_bits(),
                        "splitting bound is not bit-identical to the gamma route"
                    );
                    cases += 1;
                }
            }
        }

        format!("{cases} parameter points across six families")
    });
}

/// Criterion 2: the exact singular-value oracle on the enumerated
/// finite-population pmf reproduces the closed form to 1e-10 for every
/// admissible (i, j, n, N) with N <= 10.
#[test]
fn criterion_2_exact_oracle() {
    report("criterion 2 [svd oracle vs closed form, 1e-10]", 10.0, || {
        let mut cases = 0usize;
        let mut worst = 0.0f64;
        for pop in 3..=10usize {
            for n in 2..pop {
                for j in 2..=n {
                    for i in 1..j {
                        let spec = FamilySpec::FinitePopOrderStats { i, j, n, pop };
                        let joint = joint_pmf(&spec).unwrap();
                        let svd = svd_maxcorr(&joint).unwrap();
                        let closed = spec.closed_form_r().unwrap();
                        worst = worst.max((svd - closed).abs());
                        assert_close(
                            &format!("svd (i={i}, j={j}, n={n}, N={pop})"),
                            svd,
                            closed,
                            1e-10,
                        );
                        let r = maximal_correlation(&spec, 12).unwrap().r;
                        assert_close("closed form route", r, closed, 1e-12);
                        cases += 1;
                    }
                }
            }
        }
        format!("{cases} populations, worst |svd - closed form| = {worst:.1e}")
    });
}

/// Criterion 3: the ACE iteration on 200-bin quantile discretizations
/// recovers R within 1e-2 for normal and beta-type joints.
#[test]
fn criterion_3_ace_iteration() {
    report("criterion 3 [ace on 200-bin grids, 1e-2]", 60.0, || {
        let mut details = Vec::new();
        let mut check = |spec: FamilySpec, expected: f64, label: &str| {
            let joint = discretize(&spec, 200).unwrap();
            let ace = ace_maxcorr(&joint, 1e-7, 50_000).unwrap();
            assert!(ace.converged, "{label}: ace did not converge");
            assert_close(label, ace.r_hat, expected, 1e-2);
            details.push(format!("{label} err {:.1e}", (ace.r_hat - expected).abs()));
        };
        for &rho in &[0.3, 0.6, 0.9] {
            check(
                FamilySpec::BivariateNormal {
                    rho,
                    mu1: 0.0,
                    sigma1: 1.0,
                    mu2: 0.0,
                    sigma2: 1.0,
                },
                rho,
                &format!("normal rho={rho}"),
            );
        }
        check(
            FamilySpec::BetaType {
                alpha: 2.0,
                beta: 1.0,
                gamma: 3.0,
            },
            0.5f64.sqrt(),
            "beta-type (2,1,3)",
        );
        details.join(", ")
    });
}

/// Criterion 4: the cross-moment matrix E[phi_n(X) psi_k(Y)] is
/// rho_n delta_nk to 1e-7 through degree 6, including the enlarged basis
/// past a finite support.
#[test]
fn criterion_4_diagonal_structure() {
    report("criterion 4 [diagonal structure, 1e-7]", 30.0, || {
        let specs = [
            FamilySpec::BetaType {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
            },
            FamilySpec::BetaType {
                alpha: 2.0,
                beta: 3.0,
                gamma: 1.0,
            },
            FamilySpec::BivariateGamma {
                alpha0: 2.0,
                alpha1: 1.0,
                alpha2: 3.0,
                lambda: 1.0,
            },
            FamilySpec::FinitePopOrderStats {
                i: 1,
                j: 3,
                n: 4,
                pop: 8,
            },
        ];
        let mut worst = 0.0f64;
        for spec in &specs {
            let residuals = verify_diagonal(spec, 6).unwrap();
            let max = max_residual(&residuals);
            assert!(
                max <= 1e-7,
                "diagonal residual {max:.1e} for {spec:?} exceeds 1e-7"
            );
            worst = worst.max(max);
        }
        format!("4 joints through degree 6, worst residual {worst:.1e}")
    });
}

/// Criterion 5: one million replicates per model. The plain correlation
/// attains the bound (within 4 standard errors) exactly for the
/// distributions the closed forms describe, and falls short by at least
/// 5 standard errors off-family.
#[test]
fn criterion_5_simulation() {
    report("criterion 5 [simulation, 1e6 replicates]", 300.0, || {
        let replicates = 1_000_000;
        let seed = 2026u64;
        let os = |parent: Parent, seed: u64| SimRequest {
            model: Model::OrderStats,
            parent,
            params: Params {
                i: Some(1),
                j: Some(2),
                n: Some(3),
                ..Params::default()
            },
            replicates,
            seed,
        };
        let rec = |parent: Parent, seed: u64| SimRequest {
            model: Model::Records,
            parent,
            params: Params {
                n: Some(2),
                m: Some(2),
                ..Params::default()
            },
            replicates,
            seed,
        };
        let pop = |values: Vec<f64>, seed: u64| SimRequest {
            model: Model::FinitePop,
            parent: Parent::Uniform,
            params: Params {
                i: Some(1),
                j: Some(2),
                n: Some(2),
                values: Some(values),
                ..Params::default()
            },
            replicates,
            seed,
        };
        let third = (1.0f64 / 3.0).sqrt();
        let half = 0.5f64.sqrt();
        let contrasts = [
            ("uniform order stats", os(Parent::Uniform, seed), third, true),
            ("exp order stats", os(Parent::Exp, seed + 1), third, false),
            ("exp records", rec(Parent::Exp, seed + 2), half, true),
            ("uniform records", rec(Parent::Uniform, seed + 3), half, false),
            (
                "arithmetic population",
                pop(vec![1.0, 2.0, 3.0, 4.0], seed + 4),
                0.5,
                true,
            ),
            (
                "geometric population",
                pop(vec![1.0, 2.0, 4.0, 8.0], seed + 5),
                0.5,
                false,
            ),
            (
                "split records",
                SimRequest {
                    model: Model::Splitting,
                    parent: Parent::Exp,
                    params: Params {
                        n: Some(2),
                        n1: Some(2),
                        n2: Some(2),
                        ..Params::default()
                    },
                    replicates,
                    seed: seed + 6,
                },
                0.5,
                true,
            ),
        ];
        let mut details = Vec::new();
        for (label, request, bound, attains) in contrasts {
            let est = run_sim(&request).unwrap();
            let gap_se = (bound - est.corr_hat) / est.stderr;
            if attains {
                assert!(
                    gap_se.abs() <= 4.0,
                    "{label}: expected to attain the bound, gap {gap_se:.1} s.e."
                );
            } else {
                assert!(
                    gap_se >= 5.0,
                    "{label}: expected a shortfall of 5+ s.e., gap {gap_se:.1} s.e."
                );
            }
            details.push(format!("{label} {gap_se:+.1}se"));
        }
        details.join(", ")
    });
}

/// Criterion 6: the covariance expansions agree with direct quadrature
/// to 1e-6 on polynomial transforms through degree 4, and the record
/// series is the gamma series to 1e-12.
#[test]
fn criterion_6_covariance_identities() {
    report("criterion 6 [covariance identities, 1e-6]", 30.0, || {
        let pairs = [
            (SmoothFn::poly(&[0.0, 1.0]), SmoothFn::poly(&[0.0, -2.0, 0.0, 1.0])),
            (SmoothFn::poly(&[1.0, 0.0, 1.0]), SmoothFn::poly(&[0.0, 0.5, 1.0])),
            (
                SmoothFn::poly(&[0.0, 0.0, -1.0, 0.0, 0.25]),
                SmoothFn::poly(&[0.0, 0.0, 0.0, 1.0]),
            ),
        ];
        let specs = [
            FamilySpec::BetaType {
                alpha: 2.0,
                beta: 1.0,
                gamma: 3.0,
            },
            FamilySpec::BivariateNormal {
                rho: 0.6,
                mu1: 0.5,
                sigma1: 1.2,
                mu2: -1.0,
                sigma2: 0.8,
            },
            FamilySpec::BivariateGamma {
                alpha0: 1.5,
                alpha1: 0.5,
                alpha2: 2.0,
                lambda: 2.0,
            },
            FamilySpec::UniformOrderStats { i: 2, j: 4, n: 5 },
            FamilySpec::ExponentialRecords { n: 2, m: 3 },
            FamilySpec::FinitePopOrderStats {
                i: 1,
                j: 2,
                n: 3,
                pop: 7,
            },
        ];
        let mut checks = 0usize;
        let mut worst = 0.0f64;
        let mut note = |residual: f64, scale: f64, label: &str, tol: f64| {
            let rel = residual.abs() / scale.max(1.0);
            assert!(rel <= tol, "{label}: relative residual {rel:.1e} exceeds {tol:.0e}");
            worst = worst.max(rel);
            checks += 1;
        };
        for (g1, g2) in &pairs {
            for spec in &specs {
                let check = check_diagonal_covariance(spec, g1, g2, 10).unwrap();
                note(check.residual, check.lhs.abs(), "moment route", 1e-6);
            }
            let normal = check_normal_covariance(0.5, 1.2, -1.0, 0.8, 0.6, g1, g2, 10).unwrap();
            note(normal.residual, normal.lhs.abs(), "normal derivative route", 1e-6);
            let gamma = check_gamma_covariance(1.5, 0.5, 2.0, 2.0, g1, g2, 10).unwrap();
            note(gamma.residual, gamma.lhs.abs(), "gamma derivative route", 1e-6);
            let records = check_records_covariance(2, 3, g1, g2, 10).unwrap();
            note(records.residual, records.lhs.abs(), "record derivative route", 1e-6);
            for &(n, m) in &[(1usize, 1usize), (2, 3), (3, 2)] {
                let special = check_records_covariance(n, m, g1, g2, 8).unwrap();
                let general =
                    check_gamma_covariance(n as f64, 0.0, m as f64, 1.0, g1, g2, 8).unwrap();
                note(
                    special.rhs - general.rhs,
                    special.rhs.abs(),
                    "record specialization",
                    1e-12,
                );
            }
        }
        format!("{checks} identity checks, worst relative residual {worst:.1e}")
    });
}

/// Criterion 8: on the uniform disc the coordinates are uncorrelated
/// (both linear regression slopes vanish), yet the dependence is real:
/// the exact oracle on a 100-cell quantile grid puts R_hat well above
/// 0.3, at the pinned value 0.333159868221081401 that approaches the
/// limit 1/3 under refinement. The ACE iteration, whose identity
/// initializer is annihilated here, restarts on even powers and agrees.
#[test]
fn criterion_8_disc_dependence() {
    report("criterion 8 [uncorrelated but dependent disc]", 60.0, || {
        let grid = unit_disc_grid(100, 32).unwrap();
        let px = grid.px();
        let py = grid.py();
        let mean = |support: &[f64], weights: &[f64]| -> f64 {
            support.iter().zip(weights).map(|(&v, &w)| w * v).sum()
        };
        let mx = mean(&grid.x_support, &px);
        let my = mean(&grid.y_support, &py);
        let var_x: f64 = grid
            .x_support
            .iter()
            .zip(&px)
            .map(|(&v, &w)| w * (v - mx) * (v - mx))
            .sum();
        let var_y: f64 = grid
            .y_support
            .iter()
            .zip(&py)
            .map(|(&v, &w)| w * (v - my) * (v - my))
            .sum();
        let mut cov = 0.0;
        for (a, &x) in grid.x_support.iter().enumerate() {
            for (b, &y) in grid.y_support.iter().enumerate() {
                cov += grid.p[a][b] * (x - mx) * (y - my);
            }
        }
        let a1 = cov / var_y;
        let b1 = cov / var_x;
        assert!(a1.abs() <= 1e-3, "linear regression slope A_1 = {a1:.1e}");
        assert!(b1.abs() <= 1e-3, "linear regression slope B_1 = {b1:.1e}");

        let r = svd_maxcorr(&grid).unwrap();
        assert!(r > 0.3, "R_hat = {r} is not above 0.3");
        assert_close("disc grid R_hat", r, 0.3331598682210814, 1e-9);

        let ace = ace_maxcorr(&grid, 1e-7, 50_000).unwrap();
        assert!(ace.converged, "ace did not converge on the disc grid");
        assert_close("ace on the disc grid", ace.r_hat, r, 1e-3);

        format!(
            "slopes ({a1:.1e}, {b1:.1e}) vanish, yet R_hat = {r:.9} \
             (one third in the refinement limit); ace agrees at {:.6}",
            ace.r_hat
        )
    });
}
