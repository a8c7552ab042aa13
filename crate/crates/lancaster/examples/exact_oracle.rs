//! The singular-value oracle on exact finite-population joints.
//!
//! For every (i, j, n, N) with sampling a proper subset, the maximal
//! correlation of the i-th and j-th order statistics has a closed form;
//! the second singular value of the normalized joint pmf matrix must
//! reproduce it to near machine precision.
//!
//! Run with: cargo run --example exact_oracle

use lancaster::families::FamilySpec;
use lancaster::maxcorr::maximal_correlation;
use lancaster::oracle::{joint_pmf, svd_maxcorr};

fn main() -> Result<(), lancaster::Error> {
    println!("{:>3} {:>3} {:>3} {:>3}  {:>18} {:>18} {:>10}", "i", "j", "n", "N", "closed form", "svd oracle", "residual");
    let mut worst: f64 = 0.0;
    for pop in 3..=8usize {
        for n in 2..pop {
            for j in 2..=n {
                for i in 1..j {
                    let spec = FamilySpec::FinitePopOrderStats { i, j, n, pop };
                    let closed = maximal_correlation(&spec, 6)?.r;
                    let oracle = svd_maxcorr(&joint_pmf(&spec)?)?;
                    let residual = oracle - closed;
                    worst = worst.max(residual.abs());
                    println!(
                        "{i:>3} {j:>3} {n:>3} {pop:>3}  {closed:>18.15} {oracle:>18.15} {residual:>10.1e}"
                    );
                }
            }
        }
    }
    println!("\nlargest |residual| over the grid: {worst:.3e}");
    Ok(())
}
