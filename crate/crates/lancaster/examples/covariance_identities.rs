//! Covariance expansions along the correlation sequence.
//!
//! The diagonal structure turns Cov(g1(X), g2(Y)) into the series
//! sum_n rho_n c_n d_n over Fourier coefficients, and for normal and
//! additive-gamma pairs the coefficients become derivative expectations.
//! Each check computes both sides by unrelated routes.
//!
//! Run with: cargo run --example covariance_identities

use lancaster::families::FamilySpec;
use lancaster::identities::{
    check_diagonal_covariance, check_gamma_covariance, check_normal_covariance,
    check_records_covariance, SmoothFn,
};

fn main() -> Result<(), lancaster::Error> {
    let id_fn = SmoothFn::poly(&[0.0, 1.0]);
    let square = SmoothFn::poly(&[0.0, 0.0, 1.0]);
    let cubic = SmoothFn::poly(&[0.0, 0.5, -1.0, 0.25]);

    println!("diagonal route (exact moments vs rho_n c_n d_n):");
    let beta = FamilySpec::BetaType {
        alpha: 1.0,
        beta: 1.0,
        gamma: 1.0,
    };
    let check = check_diagonal_covariance(&beta, &id_fn, &id_fn, 8)?;
    println!(
        "  beta ( 1,1,1), g1 = g2 = x:        lhs = {:.15} (= 1/36), residual = {:+.2e}",
        check.lhs, check.residual
    );
    let pop = FamilySpec::FinitePopOrderStats {
        i: 1,
        j: 2,
        n: 2,
        pop: 4,
    };
    let check = check_diagonal_covariance(&pop, &cubic, &square, 8)?;
    println!(
        "  finite pop (1,2,2,4), cubic/square: lhs = {:.15}, residual = {:+.2e}, {} terms",
        check.lhs, check.residual, check.terms_used
    );

    println!("\nnormal route (2-d quadrature vs derivative series):");
    let check = check_normal_covariance(0.7, 1.3, 0.7, 1.3, 1.0, &square, &square, 8)?;
    println!(
        "  mu = 0.7, sigma = 1.3, rho = 1, g = x^2: lhs = {:.12} (= 4 mu^2 sigma^2 + 2 sigma^4), residual = {:+.2e}",
        check.lhs, check.residual
    );
    let exp_half = || {
        let derivatives: Vec<Box<dyn Fn(f64) -> f64 + Sync>> = (1..=20)
            .map(|order| {
                Box::new(move |x: f64| 0.5_f64.powi(order) * (0.5 * x).exp())
                    as Box<dyn Fn(f64) -> f64 + Sync>
            })
            .collect();
        SmoothFn::new(|x| (0.5 * x).exp(), derivatives)
    };
    let check = check_normal_covariance(0.0, 1.0, 0.0, 1.0, 0.5, &exp_half(), &exp_half(), 16)?;
    println!(
        "  standard pair, rho = 0.5, g = exp(x/2): lhs = {:.12}, series used {} terms, residual = {:+.2e}",
        check.lhs, check.terms_used, check.residual
    );

    println!("\ngamma route (component quadrature vs derivative series):");
    let check = check_gamma_covariance(2.0, 1.0, 3.0, 1.5, &square, &cubic, 8)?;
    println!(
        "  shapes (2,1,3), rate 1.5, x^2 vs cubic: lhs = {:.12}, residual = {:+.2e}",
        check.lhs, check.residual
    );
    let check = check_gamma_covariance(2.0, 0.0, 0.0, 1.0, &id_fn, &id_fn, 4)?;
    println!(
        "  degenerate shapes (2,0,0), g = x:       lhs = {:.12} (= shared variance 2), residual = {:+.2e}",
        check.lhs, check.residual
    );

    println!("\nrecord-value specialization:");
    let check = check_records_covariance(2, 3, &id_fn, &id_fn, 6)?;
    println!(
        "  records (2,3), g = x: lhs = {:.12} (= n = 2), residual = {:+.2e}",
        check.lhs, check.residual
    );
    let special = check_records_covariance(2, 3, &square, &cubic, 8)?;
    let general = check_gamma_covariance(2.0, 0.0, 3.0, 1.0, &square, &cubic, 8)?;
    println!(
        "  records (2,3) vs gamma (2,0,3): series values differ by {:.2e}",
        (special.rhs - general.rhs).abs()
    );
    Ok(())
}
