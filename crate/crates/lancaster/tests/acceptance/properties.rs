//! Invariant checks over randomized inputs (criterion 7). Every invariant
//! runs 200 generated cases through an explicit, deterministically seeded
//! runner so the gate prints one line per invariant and reruns are stable.

use lancaster::families::FamilySpec;
use lancaster::identities::{
    check_diagonal_covariance, check_gamma_covariance, check_records_covariance, SmoothFn,
};
use lancaster::maxcorr::{lancaster_sequence, maximal_correlation, regression_coeffs};
use lancaster::numeric::binomial;
use lancaster::oracle::{ace_maxcorr, discretize, joint_pmf, svd_maxcorr, DiscreteJoint};
use lancaster::orthopoly::PolySystem;
use lancaster::simulate::{run as run_sim, Model, Params, Parent, SimRequest};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

fn run_property<S>(label: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>)
where
    S: Strategy,
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    };
    let mut seed = [7u8; 32];
    for (k, byte) in label.bytes().enumerate() {
        seed[k % 32] ^= byte;
    }
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &seed);
    let mut runner = TestRunner::new_with_rng(config, rng);
    match runner.run(&strategy, test) {
        Ok(()) => println!("criterion 7 [{label}]: PASS (200 cases)"),
        Err(err) => {
            println!("criterion 7 [{label}]: FAIL");
            panic!("{label}: {err}");
        }
    }
}

fn any_family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (-0.99..0.99f64, -3.0..3.0f64, 0.1..3.0f64, -3.0..3.0f64, 0.1..3.0f64).prop_map(
            |(rho, mu1, sigma1, mu2, sigma2)| FamilySpec::BivariateNormal {
                rho,
                mu1,
                sigma1,
                mu2,
                sigma2,
            }
        ),
        (0.2..5.0f64, 0.0..4.0f64, 0.2..5.0f64).prop_map(|(alpha, beta, gamma)| {
            FamilySpec::BetaType { alpha, beta, gamma }
        }),
        (2..8usize)
            .prop_flat_map(|n| (1..n, Just(n)))
            .prop_flat_map(|(j0, n)| (0..j0, Just(j0 + 1), Just(n)))
            .prop_map(|(i0, j, n)| FamilySpec::UniformOrderStats { i: i0 + 1, j, n }),
        (1..6usize, 1..6usize).prop_map(|(n, m)| FamilySpec::ExponentialRecords { n, m }),
        (0.3..4.0f64, 0.0..3.0f64, 0.0..3.0f64, 0.25..4.0f64).prop_map(
            |(alpha0, alpha1, alpha2, lambda)| FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda,
            }
        ),
        finite_pop(),
    ]
}

fn finite_pop() -> impl Strategy<Value = FamilySpec> {
    (3..12usize)
        .prop_flat_map(|pop| (2..pop, Just(pop)))
        .prop_flat_map(|(n, pop)| (1..n, Just(n), Just(pop)))
        .prop_flat_map(|(j0, n, pop)| (0..j0, Just(j0 + 1), Just(n), Just(pop)))
        .prop_map(|(i0, j, n, pop)| FamilySpec::FinitePopOrderStats {
            i: i0 + 1,
            j,
            n,
            pop,
        })
}

/// Conditioning points where cond_x_moment is defined, spaced apart for
/// stable divided differences.
fn conditioning_points(spec: &FamilySpec, count: usize, offset: f64) -> Vec<f64> {
    match *spec {
        FamilySpec::BivariateNormal { mu2, sigma2, .. } => (0..count)
            .map(|k| mu2 + sigma2 * (offset - 1.0 + 0.7 * k as f64))
            .collect(),
        FamilySpec::BetaType { .. } | FamilySpec::UniformOrderStats { .. } => (0..count)
            .map(|k| 0.08 + 0.03 * offset + 0.84 * k as f64 / count as f64)
            .collect(),
        FamilySpec::ExponentialRecords { .. } | FamilySpec::BivariateGamma { .. } => (0..count)
            .map(|k| 0.3 + 0.2 * offset + 0.8 * k as f64)
            .collect(),
        FamilySpec::FinitePopOrderStats { j, .. } => (0..count).map(|k| (j + k) as f64).collect(),
    }
}

fn divided_differences(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut table = ys.to_vec();
    let mut out = vec![table[0]];
    for level in 1..xs.len() {
        for row in 0..(xs.len() - level) {
            table[row] = (table[row + 1] - table[row]) / (xs[row + level] - xs[row]);
        }
        out.push(table[0]);
    }
    out
}

/// Both regression coefficient sequences carry the same sign at every
/// degree: their product is nonnegative.
#[test]
fn property_regression_products_nonnegative() {
    run_property("A_n B_n >= 0", any_family(), |spec| {
        for n in 1..=8usize {
            let a = spec.a_coeff(n).unwrap();
            let b = spec.b_coeff(n).unwrap();
            prop_assert!(a * b >= 0.0, "degree {}: a = {}, b = {}", n, a, b);
        }
        Ok(())
    });
}

/// E[X^n | Y = y] is a polynomial in y of degree n whose leading
/// coefficient is A_n: the n-th divided difference over any distinct
/// points recovers A_n and the (n+1)-st vanishes.
#[test]
fn property_conditional_moments_polynomial() {
    run_property(
        "E[X^n|Y] poly, leading coeff A_n",
        (any_family(), 1..4usize, 0.0..1.0f64),
        |(spec, n, offset)| {
            if let FamilySpec::FinitePopOrderStats { n: sample, pop, .. } = spec {
                prop_assume!(pop - sample + 1 >= n + 2);
            }
            let points = conditioning_points(&spec, n + 2, offset);
            let values: Vec<f64> = points
                .iter()
                .map(|&y| spec.cond_x_moment(n, y).unwrap())
                .collect();
            let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let dd = divided_differences(&points, &values);
            let a_n = spec.a_coeff(n).unwrap();
            prop_assert!(
                (dd[n] - a_n).abs() <= 1e-8 * scale.max(a_n.abs()),
                "leading coefficient {} vs A_{} = {}",
                dd[n],
                n,
                a_n
            );
            prop_assert!(
                dd[n + 1].abs() <= 1e-8 * scale,
                "degree overshoot: {}",
                dd[n + 1]
            );
            Ok(())
        },
    );
}

/// The correlation sequence is bounded by 1 and non-increasing in
/// absolute value, and R lands in [0, 1].
#[test]
fn property_correlation_sequence_monotone() {
    run_property("|rho_n| <= 1, non-increasing", any_family(), |spec| {
        let seq = lancaster_sequence(&regression_coeffs(&spec, 8).unwrap(), spec.nu()).unwrap();
        prop_assert!(seq.monotone_decreasing);
        for pair in seq.rho.windows(2) {
            prop_assert!(pair[0].abs() <= 1.0 + 1e-12);
            prop_assert!(pair[1].abs() <= pair[0].abs() + 1e-12);
        }
        let report = maximal_correlation(&spec, 8).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&report.r));
        Ok(())
    });
}

/// The enumerated finite-population pmf has total mass 1 and the exact
/// order-statistic marginal on every row.
#[test]
fn property_joint_pmf_marginals() {
    run_property("joint pmf marginal consistency", finite_pop(), |spec| {
        let FamilySpec::FinitePopOrderStats { i, n, pop, .. } = spec else {
            unreachable!()
        };
        let joint = joint_pmf(&spec).unwrap();
        let total: f64 = joint.p.iter().flatten().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for (row, &x) in joint.p.iter().zip(&joint.x_support) {
            let k = x as u64;
            let expected = binomial(k - 1, i as u64 - 1) * binomial(pop as u64 - k, (n - i) as u64)
                / binomial(pop as u64, n as u64);
            let row_sum: f64 = row.iter().sum();
            prop_assert!(
                (row_sum - expected).abs() < 1e-12,
                "at x = {}: {} vs {}",
                x,
                row_sum,
                expected
            );
        }
        Ok(())
    });
}

/// R is invariant under location and scale changes of either marginal.
#[test]
fn property_affine_invariance() {
    run_property(
        "R affine invariance",
        (
            -0.99..0.99f64,
            -5.0..5.0f64,
            0.05..10.0f64,
            -5.0..5.0f64,
            0.05..10.0f64,
            0.1..8.0f64,
            (0.3..4.0f64, 0.0..3.0f64, 0.0..3.0f64),
        ),
        |(rho, mu1, sigma1, mu2, sigma2, lambda, shapes)| {
            let standard = FamilySpec::BivariateNormal {
                rho,
                mu1: 0.0,
                sigma1: 1.0,
                mu2: 0.0,
                sigma2: 1.0,
            };
            let moved = FamilySpec::BivariateNormal {
                rho,
                mu1,
                sigma1,
                mu2,
                sigma2,
            };
            let r0 = maximal_correlation(&standard, 8).unwrap().r;
            let r1 = maximal_correlation(&moved, 8).unwrap().r;
            prop_assert!((r0 - r1).abs() < 1e-10, "{} vs {}", r0, r1);

            let (alpha0, alpha1, alpha2) = shapes;
            let unit = FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda: 1.0,
            };
            let scaled = FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda,
            };
            let g0 = maximal_correlation(&unit, 8).unwrap().r;
            let g1 = maximal_correlation(&scaled, 8).unwrap().r;
            prop_assert!((g0 - g1).abs() < 1e-12, "{} vs {}", g0, g1);
            Ok(())
        },
    );
}

/// The singular-value oracle reports (near) zero on product joints and
/// is invariant under relabeling the supports.
#[test]
fn property_svd_products_and_permutations() {
    run_property(
        "svd: products vanish, permutations fix R",
        (
            proptest::collection::vec(0.05..1.0f64, 2..6),
            proptest::collection::vec(0.05..1.0f64, 2..6),
            0..5usize,
        ),
        |(px, py, swap_rows)| {
            let sx: f64 = px.iter().sum();
            let sy: f64 = py.iter().sum();
            let p: Vec<Vec<f64>> = px
                .iter()
                .map(|&a| py.iter().map(|&b| a * b / (sx * sy)).collect())
                .collect();
            let x_support: Vec<f64> = (0..px.len()).map(|k| k as f64).collect();
            let y_support: Vec<f64> = (0..py.len()).map(|k| k as f64).collect();
            let joint = DiscreteJoint::new(x_support, y_support, p).unwrap();
            prop_assert!(svd_maxcorr(&joint).unwrap() < 1e-10);

            let spec = FamilySpec::FinitePopOrderStats {
                i: 1,
                j: 2,
                n: 3,
                pop: 6,
            };
            let base = joint_pmf(&spec).unwrap();
            let rows = base.p.len();
            let (a, b) = (swap_rows % rows, (swap_rows + 1) % rows);
            let mut perm: Vec<usize> = (0..rows).collect();
            perm.swap(a, b);
            let shuffled = DiscreteJoint::new(
                perm.iter().map(|&r| base.x_support[r]).collect(),
                base.y_support.clone(),
                perm.iter().map(|&r| base.p[r].clone()).collect(),
            )
            .unwrap();
            let r0 = svd_maxcorr(&base).unwrap();
            let r1 = svd_maxcorr(&shuffled).unwrap();
            prop_assert!((r0 - r1).abs() < 1e-12);
            Ok(())
        },
    );
}

/// The iterative estimate agrees with the exact singular value well
/// within ten times its tolerance.
#[test]
fn property_ace_tracks_svd() {
    run_property("ace within 10 tol of svd", finite_pop(), |spec| {
        let joint = joint_pmf(&spec).unwrap();
        let svd = svd_maxcorr(&joint).unwrap();
        let ace = ace_maxcorr(&joint, 1e-8, 10_000).unwrap();
        prop_assert!(ace.converged);
        prop_assert!(
            (ace.r_hat - svd).abs() < 1e-7,
            "ace {} vs svd {}",
            ace.r_hat,
            svd
        );
        Ok(())
    });
}

/// Quantile-grid refinement at nested bin counts never loses
/// correlation, and never exceeds the closed form it approaches.
#[test]
fn property_refinement_monotone() {
    run_property("refinement monotone over 16..128 bins", 0.05..0.95f64, |rho| {
        let spec = FamilySpec::BivariateNormal {
            rho,
            mu1: 0.0,
            sigma1: 1.0,
            mu2: 0.0,
            sigma2: 1.0,
        };
        let mut last = 0.0;
        for bins in [16usize, 32, 64, 128] {
            let r = svd_maxcorr(&discretize(&spec, bins).unwrap()).unwrap();
            prop_assert!(r >= last - 1e-9, "bins {}: {} -> {}", bins, last, r);
            last = r;
        }
        prop_assert!(last <= rho + 1e-9);
        Ok(())
    });
}

/// Orthonormal systems built from clean atomic measures: the collapse is
/// detected exactly at the support size, orthonormality holds below it,
/// and the Parseval defect of a representable polynomial is zero.
#[test]
fn property_orthopoly_support_detection() {
    run_property(
        "orthopoly support detection and orthonormality",
        (
            proptest::collection::vec(0.25..1.5f64, 1..5),
            -2.0..2.0f64,
            proptest::collection::vec(0.1..1.0f64, 5),
            -2.0..2.0f64,
        ),
        |(gaps, start, raw_weights, coeff)| {
            let mut atoms = vec![start];
            for g in &gaps {
                atoms.push(atoms.last().unwrap() + g);
            }
            let k = atoms.len();
            let total: f64 = raw_weights[..k].iter().sum();
            let weights: Vec<f64> = raw_weights[..k].iter().map(|w| w / total).collect();
            let degree = k + 2;
            let moments: Vec<f64> = (0..=2 * degree)
                .map(|m| {
                    atoms
                        .iter()
                        .zip(&weights)
                        .map(|(&x, &w)| w * x.powi(m as i32))
                        .sum()
                })
                .collect();
            let system = PolySystem::from_moments(&moments, degree).unwrap();
            prop_assert_eq!(system.support_points(), Some(k));
            prop_assert_eq!(system.max_degree(), k - 1);
            prop_assert!(system.orthonormality_residual() < 1e-9);

            let poly = vec![coeff, 1.0 - coeff];
            let defect = system.parseval_defect(&poly).unwrap();
            prop_assert!(defect.abs() < 1e-9, "defect = {}", defect);
            Ok(())
        },
    );
}

/// Simulated plain correlation respects the maximal-correlation bound up
/// to sampling noise, is invariant under affine maps of the population
/// values, and is bit-reproducible per seed.
#[test]
fn property_simulation_bounds_and_seeds() {
    run_property(
        "simulation bound, affine invariance, reproducibility",
        (finite_pop(), 0..u64::MAX / 2, 0.5..3.0f64, -5.0..5.0f64),
        |(spec, seed, scale, shift)| {
            let FamilySpec::FinitePopOrderStats { i, j, n, pop } = spec else {
                unreachable!()
            };
            let request = |values: Vec<f64>| SimRequest {
                model: Model::FinitePop,
                parent: Parent::Uniform,
                params: Params {
                    i: Some(i),
                    j: Some(j),
                    n: Some(n),
                    values: Some(values),
                    ..Params::default()
                },
                replicates: 4000,
                seed,
            };
            let bound = maximal_correlation(&spec, 6).unwrap().r;
            let arithmetic: Vec<f64> = (1..=pop).map(|v| v as f64).collect();
            let est = run_sim(&request(arithmetic.clone())).unwrap();
            prop_assert!(
                est.corr_hat <= bound + 6.0 * est.stderr,
                "corr {} above bound {} (se {})",
                est.corr_hat,
                bound,
                est.stderr
            );

            let again = run_sim(&request(arithmetic.clone())).unwrap();
            prop_assert_eq!(est.corr_hat.to_bits(), again.corr_hat.to_bits());

            let mapped: Vec<f64> = arithmetic.iter().map(|v| shift + scale * v).collect();
            let affine = run_sim(&request(mapped)).unwrap();
            prop_assert!(
                (affine.corr_hat - est.corr_hat).abs() < 1e-9,
                "affine map changed the correlation: {} vs {}",
                affine.corr_hat,
                est.corr_hat
            );
            Ok(())
        },
    );
}

/// Covariance series terminate for polynomial transforms, expand to the
/// exact covariance, and the record specialization matches the general
/// gamma series.
#[test]
fn property_identity_series() {
    run_property(
        "identity series terminate and specialize",
        (
            any_family(),
            proptest::collection::vec(-2.0..2.0f64, 2..5),
            proptest::collection::vec(-2.0..2.0f64, 2..5),
            1..5usize,
            1..5usize,
        ),
        |(spec, c1, c2, n, m)| {
            prop_assume!(c1[1..].iter().any(|&c| c != 0.0));
            prop_assume!(c2[1..].iter().any(|&c| c != 0.0));
            let g1 = SmoothFn::poly(&c1);
            let g2 = SmoothFn::poly(&c2);
            let check = check_diagonal_covariance(&spec, &g1, &g2, 10).unwrap();
            prop_assert!(check.terms_used <= (c1.len() - 1).min(c2.len() - 1));
            let scale = 1.0f64.max(check.lhs.abs());
            prop_assert!(check.residual.abs() <= 1e-6 * scale, "{:?}", check);

            let special = check_records_covariance(n, m, &g1, &g2, 8).unwrap();
            let general =
                check_gamma_covariance(n as f64, 0.0, m as f64, 1.0, &g1, &g2, 8).unwrap();
            let scale = 1.0f64.max(special.rhs.abs());
            prop_assert!((special.rhs - general.rhs).abs() <= 1e-10 * scale);
            Ok(())
        },
    );
}
