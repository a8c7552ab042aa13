//! Maximal correlation and correlation sequences for one instance of
//! every supported family.
//!
//! Run with: cargo run --example closed_forms

use lancaster::families::FamilySpec;
use lancaster::maxcorr::{
    lancaster_sequence, maximal_correlation, regression_coeffs, splitting_record_bound,
};

fn main() -> Result<(), lancaster::Error> {
    let specs = [
        (
            "bivariate normal, rho = -0.8",
            FamilySpec::BivariateNormal {
                rho: -0.8,
                mu1: 1.0,
                sigma1: 2.0,
                mu2: -3.0,
                sigma2: 0.5,
            },
        ),
        (
            "beta type (2, 1, 3)",
            FamilySpec::BetaType {
                alpha: 2.0,
                beta: 1.0,
                gamma: 3.0,
            },
        ),
        (
            "uniform order statistics (i, j, n) = (1, 3, 4)",
            FamilySpec::UniformOrderStats { i: 1, j: 3, n: 4 },
        ),
        (
            "exponential records (n, m) = (2, 3)",
            FamilySpec::ExponentialRecords { n: 2, m: 3 },
        ),
        (
            "additive gamma (2, 1, 3), rate 1",
            FamilySpec::BivariateGamma {
                alpha0: 2.0,
                alpha1: 1.0,
                alpha2: 3.0,
                lambda: 1.0,
            },
        ),
        (
            "finite population (i, j, n, N) = (1, 2, 2, 5)",
            FamilySpec::FinitePopOrderStats {
                i: 1,
                j: 2,
                n: 2,
                pop: 5,
            },
        ),
    ];

    for (label, spec) in &specs {
        let report = maximal_correlation(spec, 8)?;
        let seq = lancaster_sequence(&regression_coeffs(spec, 6)?, spec.nu())?;
        println!("{label}");
        println!("  R = {:.12}", report.r);
        let terms: Vec<String> = seq.rho.iter().map(|r| format!("{r:+.6}")).collect();
        println!("  rho_1..6 = [{}]", terms.join(", "));
        println!("  {}", report.truncation_note);
        println!();
    }

    println!("record-splitting bound, shared prefix n against n1 and n2 extra steps:");
    for (n, n1, n2) in [(1, 1, 1), (2, 1, 2), (3, 2, 4)] {
        println!(
            "  n = {n}, n1 = {n1}, n2 = {n2}:  sup corr = {:.12}",
            splitting_record_bound(n, n1, n2)?
        );
    }
    Ok(())
}
