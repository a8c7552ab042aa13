//! The reproduction matrix: every published numeric claim this crate
//! implements, recomputed from scratch and compared against its
//! reference value.
//!
//! Each row names a check, carries the reference value and the freshly
//! computed one, and records the signed residual. Deterministic rows use
//! fixed tolerances; Monte Carlo rows pass when the estimate lands
//! within four jackknife standard errors of the reference.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::families::FamilySpec;
use crate::identities::{
    check_diagonal_covariance, check_gamma_covariance, check_normal_covariance,
    check_records_covariance, SmoothFn,
};
use crate::maxcorr::{
    lancaster_sequence, maximal_correlation, regression_coeffs, splitting_record_bound,
};
use crate::oracle::{
    ace_maxcorr, discretize, joint_pmf, max_residual, svd_maxcorr, unit_disc_grid, verify_diagonal,
};
use crate::simulate::{run as run_sim, Model, Params, Parent, SimRequest};

/// One reproduced value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub check_id: String,
    pub paper_value: f64,
    pub computed: f64,
    pub residual: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(check_id: &str, paper_value: f64, computed: f64, tol: f64) -> CheckRow {
        let residual = computed - paper_value;
        CheckRow {
            check_id: check_id.to_string(),
            paper_value,
            computed,
            residual,
            pass: residual.abs() <= tol,
        }
    }
}

/// Knobs shared by the whole matrix.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub seed: u64,
    pub replicates: usize,
    pub bins: usize,
}

impl Default for SuiteParams {
    fn default() -> SuiteParams {
        SuiteParams {
            seed: 12345,
            replicates: 100_000,
            bins: 128,
        }
    }
}

const EXACT_TOL: f64 = 1e-9;

type RowBuilder = Box<dyn Fn(&SuiteParams) -> Result<CheckRow>>;

fn registry() -> Vec<(String, RowBuilder)> {
    let mut rows: Vec<(String, RowBuilder)> = Vec::new();
    let mut add = |id: &str, f: RowBuilder| rows.push((id.to_string(), f));

    for rho in [-0.9_f64, -0.5, 0.0, 0.3, 0.99] {
        let id = format!("closed-form/normal/rho-{rho}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let spec = FamilySpec::BivariateNormal {
                    rho,
                    mu1: 0.0,
                    sigma1: 1.0,
                    mu2: 0.0,
                    sigma2: 1.0,
                };
                Ok(CheckRow::new(
                    &id,
                    rho.abs(),
                    maximal_correlation(&spec, 8)?.r,
                    EXACT_TOL,
                ))
            }),
        );
    }

    for (alpha, beta, gamma) in [(1.0, 1.0, 1.0), (2.0, 1.0, 3.0), (0.5, 2.5, 1.5)] {
        let id = format!("closed-form/beta/{alpha}-{beta}-{gamma}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let spec = FamilySpec::BetaType { alpha, beta, gamma };
                let reference =
                    (alpha * gamma / ((alpha + beta) * (beta + gamma))).sqrt();
                Ok(CheckRow::new(
                    &id,
                    reference,
                    maximal_correlation(&spec, 8)?.r,
                    EXACT_TOL,
                ))
            }),
        );
    }

    for (i, j, n) in [(1usize, 2usize, 3usize), (2, 4, 5)] {
        let id = format!("closed-form/uos/{i}-{j}-{n}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let spec = FamilySpec::UniformOrderStats { i, j, n };
                let (i, j, n) = (i as f64, j as f64, n as f64);
                let reference = (i * (n + 1.0 - j) / (j * (n + 1.0 - i))).sqrt();
                Ok(CheckRow::new(
                    &id,
                    reference,
                    maximal_correlation(&spec, 8)?.r,
                    EXACT_TOL,
                ))
            }),
        );
    }

    for (n, m) in [(1usize, 1usize), (2, 3)] {
        let id = format!("closed-form/records/{n}-{m}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let spec = FamilySpec::ExponentialRecords { n, m };
                let reference = (n as f64 / (n + m) as f64).sqrt();
                Ok(CheckRow::new(
                    &id,
                    reference,
                    maximal_correlation(&spec, 8)?.r,
                    EXACT_TOL,
                ))
            }),
        );
    }

    for (alpha0, alpha1, alpha2) in [(2.0, 1.0, 3.0), (1.0, 0.0, 1.0), (0.7, 2.0, 0.0)] {
        let id = format!("closed-form/gamma/{alpha0}-{alpha1}-{alpha2}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let spec = FamilySpec::BivariateGamma {
                    alpha0,
                    alpha1,
                    alpha2,
                    lambda: 1.0,
                };
                let reference = alpha0 / ((alpha0 + alpha1) * (alpha0 + alpha2)).sqrt();
                Ok(CheckRow::new(
                    &id,
                    reference,
                    maximal_correlation(&spec, 8)?.r,
                    EXACT_TOL,
                ))
            }),
        );
    }

    for (n, n1, n2) in [(1usize, 1usize, 1usize), (2, 1, 2)] {
        let id = format!("closed-form/splitting/{n}-{n1}-{n2}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let (nf, n1f, n2f) = (n as f64, n1 as f64, n2 as f64);
                let reference = nf / ((nf + n1f) * (nf + n2f)).sqrt();
                Ok(CheckRow::new(
                    &id,
                    reference,
                    splitting_record_bound(n, n1, n2)?,
                    EXACT_TOL,
                ))
            }),
        );
    }

    for (i, j, n, pop) in [(1usize, 2usize, 2usize, 4usize), (2, 3, 5, 10)] {
        let id = format!("closed-form/finite-pop/{i}-{j}-{n}-{pop}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let spec = FamilySpec::FinitePopOrderStats { i, j, n, pop };
                let (fi, fj, fn_) = (i as f64, j as f64, n as f64);
                let reference = (fi * (fn_ + 1.0 - fj) / (fj * (fn_ + 1.0 - fi))).sqrt();
                Ok(CheckRow::new(
                    &id,
                    reference,
                    maximal_correlation(&spec, 8)?.r,
                    EXACT_TOL,
                ))
            }),
        );
    }

    add(
        "corr-seq/normal/rho-0.7-n-3",
        Box::new(|_| {
            let spec = FamilySpec::BivariateNormal {
                rho: 0.7,
                mu1: 0.0,
                sigma1: 1.0,
                mu2: 0.0,
                sigma2: 1.0,
            };
            let seq = lancaster_sequence(&regression_coeffs(&spec, 4)?, spec.nu())?;
            Ok(CheckRow::new(
                "corr-seq/normal/rho-0.7-n-3",
                0.343,
                seq.rho[2],
                EXACT_TOL,
            ))
        }),
    );
    add(
        "corr-seq/records/1-1-n-2",
        Box::new(|_| {
            let spec = FamilySpec::ExponentialRecords { n: 1, m: 1 };
            let seq = lancaster_sequence(&regression_coeffs(&spec, 3)?, spec.nu())?;
            Ok(CheckRow::new(
                "corr-seq/records/1-1-n-2",
                (1.0_f64 / 3.0).sqrt(),
                seq.rho[1],
                EXACT_TOL,
            ))
        }),
    );
    add(
        "corr-seq/beta/1-1-1-n-2",
        Box::new(|_| {
            let spec = FamilySpec::BetaType {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
            };
            let seq = lancaster_sequence(&regression_coeffs(&spec, 3)?, spec.nu())?;
            Ok(CheckRow::new(
                "corr-seq/beta/1-1-1-n-2",
                1.0 / 3.0,
                seq.rho[1],
                EXACT_TOL,
            ))
        }),
    );
    add(
        "enlargement/finite-pop/1-2-2-4-rho-3",
        Box::new(|_| {
            let spec = FamilySpec::FinitePopOrderStats {
                i: 1,
                j: 2,
                n: 2,
                pop: 4,
            };
            let seq = lancaster_sequence(&regression_coeffs(&spec, 5)?, spec.nu())?;
            Ok(CheckRow::new(
                "enlargement/finite-pop/1-2-2-4-rho-3",
                0.0,
                seq.rho[2],
                0.0,
            ))
        }),
    );

    for (i, j, n, pop) in [(1usize, 2usize, 2usize, 4usize), (2, 3, 4, 8)] {
        let id = format!("oracle/svd/finite-pop-{i}-{j}-{n}-{pop}");
        add(
            &id.clone(),
            Box::new(move |_| {
                let spec = FamilySpec::FinitePopOrderStats { i, j, n, pop };
                let (fi, fj, fn_) = (i as f64, j as f64, n as f64);
                let reference = (fi * (fn_ + 1.0 - fj) / (fj * (fn_ + 1.0 - fi))).sqrt();
                Ok(CheckRow::new(
                    &id,
                    reference,
                    svd_maxcorr(&joint_pmf(&spec)?)?,
                    1e-10,
                ))
            }),
        );
    }
    add(
        "oracle/ace/finite-pop-1-2-2-4",
        Box::new(|_| {
            let spec = FamilySpec::FinitePopOrderStats {
                i: 1,
                j: 2,
                n: 2,
                pop: 4,
            };
            let ace = ace_maxcorr(&joint_pmf(&spec)?, 1e-10, 10_000)?;
            Ok(CheckRow::new(
                "oracle/ace/finite-pop-1-2-2-4",
                0.5,
                ace.r_hat,
                1e-6,
            ))
        }),
    );
    add(
        "oracle/discretize/normal-0.6",
        Box::new(|p| {
            let spec = FamilySpec::BivariateNormal {
                rho: 0.6,
                mu1: 0.0,
                sigma1: 1.0,
                mu2: 0.0,
                sigma2: 1.0,
            };
            Ok(CheckRow::new(
                "oracle/discretize/normal-0.6",
                0.6,
                svd_maxcorr(&discretize(&spec, p.bins)?)?,
                1e-2,
            ))
        }),
    );
    add(
        "oracle/discretize/beta-1-1-1",
        Box::new(|p| {
            let spec = FamilySpec::BetaType {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
            };
            Ok(CheckRow::new(
                "oracle/discretize/beta-1-1-1",
                0.5,
                svd_maxcorr(&discretize(&spec, p.bins)?)?,
                1e-2,
            ))
        }),
    );
    add(
        "oracle/discretize/records-1-1",
        Box::new(|p| {
            let spec = FamilySpec::ExponentialRecords { n: 1, m: 1 };
            Ok(CheckRow::new(
                "oracle/discretize/records-1-1",
                0.5_f64.sqrt(),
                svd_maxcorr(&discretize(&spec, p.bins)?)?,
                1e-2,
            ))
        }),
    );
    add(
        "oracle/disc-grid/svd-100",
        Box::new(|_| {
            let grid = unit_disc_grid(100, 32)?;
            Ok(CheckRow::new(
                "oracle/disc-grid/svd-100",
                1.0 / 3.0,
                svd_maxcorr(&grid)?,
                5e-4,
            ))
        }),
    );

    for (spec, name, degree) in [
        (
            FamilySpec::BetaType {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
            },
            "beta-1-1-1",
            4usize,
        ),
        (
            FamilySpec::BivariateGamma {
                alpha0: 2.0,
                alpha1: 1.0,
                alpha2: 3.0,
                lambda: 1.0,
            },
            "gamma-2-1-3",
            4,
        ),
        (
            FamilySpec::FinitePopOrderStats {
                i: 1,
                j: 3,
                n: 4,
                pop: 8,
            },
            "finite-pop-1-3-4-8",
            6,
        ),
    ] {
        let id = format!("diagonal/{name}-deg-{degree}");
        add(
            &id.clone(),
            Box::new(move |_| {
                Ok(CheckRow::new(
                    &id,
                    0.0,
                    max_residual(&verify_diagonal(&spec, degree)?),
                    1e-7,
                ))
            }),
        );
    }

    add(
        "identity/beta-1-1-1-linear-cov",
        Box::new(|_| {
            let spec = FamilySpec::BetaType {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
            };
            let id_fn = SmoothFn::poly(&[0.0, 1.0]);
            let check = check_diagonal_covariance(&spec, &id_fn, &id_fn, 6)?;
            Ok(CheckRow::new(
                "identity/beta-1-1-1-linear-cov",
                1.0 / 36.0,
                check.rhs,
                1e-12,
            ))
        }),
    );
    add(
        "identity/records-2-3-linear-cov",
        Box::new(|_| {
            let id_fn = SmoothFn::poly(&[0.0, 1.0]);
            let check = check_records_covariance(2, 3, &id_fn, &id_fn, 6)?;
            Ok(CheckRow::new(
                "identity/records-2-3-linear-cov",
                2.0,
                check.rhs,
                1e-8,
            ))
        }),
    );
    add(
        "identity/normal-square-cov",
        Box::new(|_| {
            let (mu, sigma) = (0.7, 1.3);
            let g = SmoothFn::poly(&[0.0, 0.0, 1.0]);
            let check = check_normal_covariance(mu, sigma, mu, sigma, 1.0, &g, &g, 8)?;
            let reference = 4.0 * mu * mu * sigma * sigma + 2.0 * sigma.powi(4);
            Ok(CheckRow::new(
                "identity/normal-square-cov",
                reference,
                check.rhs,
                1e-8,
            ))
        }),
    );
    add(
        "identity/gamma-shared-variance",
        Box::new(|_| {
            let id_fn = SmoothFn::poly(&[0.0, 1.0]);
            let check = check_gamma_covariance(2.0, 0.0, 0.0, 1.0, &id_fn, &id_fn, 6)?;
            Ok(CheckRow::new(
                "identity/gamma-shared-variance",
                2.0,
                check.rhs,
                1e-8,
            ))
        }),
    );

    add(
        "sim/records-exp-1-1",
        Box::new(|p| {
            let est = run_sim(&SimRequest {
                model: Model::Records,
                parent: Parent::Exp,
                params: Params {
                    n: Some(1),
                    m: Some(1),
                    ..Params::default()
                },
                replicates: p.replicates,
                seed: p.seed,
            })?;
            Ok(CheckRow::new(
                "sim/records-exp-1-1",
                0.5_f64.sqrt(),
                est.corr_hat,
                4.0 * est.stderr,
            ))
        }),
    );
    add(
        "sim/order-stats-uniform-1-2-2",
        Box::new(|p| {
            let est = run_sim(&SimRequest {
                model: Model::OrderStats,
                parent: Parent::Uniform,
                params: Params {
                    i: Some(1),
                    j: Some(2),
                    n: Some(2),
                    ..Params::default()
                },
                replicates: p.replicates,
                seed: p.seed.wrapping_add(1),
            })?;
            Ok(CheckRow::new(
                "sim/order-stats-uniform-1-2-2",
                0.5,
                est.corr_hat,
                4.0 * est.stderr,
            ))
        }),
    );
    add(
        "sim/splitting-exp-1-1-1",
        Box::new(|p| {
            let est = run_sim(&SimRequest {
                model: Model::Splitting,
                parent: Parent::Exp,
                params: Params {
                    n: Some(1),
                    n1: Some(1),
                    n2: Some(1),
                    ..Params::default()
                },
                replicates: p.replicates,
                seed: p.seed.wrapping_add(2),
            })?;
            Ok(CheckRow::new(
                "sim/splitting-exp-1-1-1",
                0.5,
                est.corr_hat,
                4.0 * est.stderr,
            ))
        }),
    );
    add(
        "sim/finite-pop-arithmetic-1-2-2-4",
        Box::new(|p| {
            let est = run_sim(&SimRequest {
                model: Model::FinitePop,
                parent: Parent::Uniform,
                params: Params {
                    i: Some(1),
                    j: Some(2),
                    n: Some(2),
                    values: Some(vec![1.0, 2.0, 3.0, 4.0]),
                    ..Params::default()
                },
                replicates: p.replicates,
                seed: p.seed.wrapping_add(3),
            })?;
            Ok(CheckRow::new(
                "sim/finite-pop-arithmetic-1-2-2-4",
                0.5,
                est.corr_hat,
                4.0 * est.stderr,
            ))
        }),
    );
    add(
        "sim/finite-pop-geometric-1-2-2-4",
        Box::new(|p| {
            let est = run_sim(&SimRequest {
                model: Model::FinitePop,
                parent: Parent::Uniform,
                params: Params {
                    i: Some(1),
                    j: Some(2),
                    n: Some(2),
                    values: Some(vec![1.0, 2.0, 4.0, 8.0]),
                    ..Params::default()
                },
                replicates: p.replicates,
                seed: p.seed.wrapping_add(4),
            })?;
            Ok(CheckRow::new(
                "sim/finite-pop-geometric-1-2-2-4",
                46.0 / 8692.0_f64.sqrt(),
                est.corr_hat,
                4.0 * est.stderr,
            ))
        }),
    );

    rows
}

/// Build the matrix, computing only rows whose check_id contains the
/// filter substring (all rows when the filter is empty or absent).
pub fn reproduce(params: &SuiteParams, filter: Option<&str>) -> Result<Vec<CheckRow>> {
    let mut out = Vec::new();
    for (id, build) in registry() {
        if let Some(f) = filter {
            if !f.is_empty() && !id.contains(f) {
                continue;
            }
        }
        out.push(build(params)?);
    }
    Ok(out)
}

/// Render rows as CSV with a header line.
pub fn to_csv(rows: &[CheckRow]) -> String {
    let mut out = String::from("check_id,paper_value,computed,residual,pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e},{}\n",
            r.check_id, r.paper_value, r.computed, r.residual, r.pass
        ));
    }
    out
}
