//! The Lancaster correlation sequence and the maximal correlation report.
//!
//! When both conditional moment regressions are polynomial with leading
//! coefficients A_n and B_n, the diagonal correlations are
//! rho_n = sign(A_n) sqrt(A_n B_n 1{n <= nu}) and the maximal
//! correlation is sup_n |rho_n|. The supremum here runs over n <= K; the
//! report carries a monotonicity audit so a truncated sup is never
//! silently presented as proven.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;

/// Leading regression coefficients A_n, B_n for n = 1..=K.
#[derive(Debug, Clone)]
pub struct RegressionCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Collect the closed-form leading coefficients of a family.
pub fn regression_coeffs(spec: &FamilySpec, k: usize) -> Result<RegressionCoeffs> {
    let a = (1..=k).map(|n| spec.a_coeff(n)).collect::<Result<_>>()?;
    let b = (1..=k).map(|n| spec.b_coeff(n)).collect::<Result<_>>()?;
    Ok(RegressionCoeffs { a, b })
}

/// The diagonal correlations rho_1..rho_K with audit flags.
#[derive(Debug, Clone)]
pub struct LancasterSequence {
    pub rho: Vec<f64>,
    pub nu: Option<usize>,
    /// True when |rho_n| is non-increasing over the computed range, which
    /// makes the truncated supremum provably the full supremum.
    pub monotone_decreasing: bool,
}

/// rho_n = sign(A_n) sqrt(A_n B_n) for n <= nu, zero beyond. A negative
/// product A_n B_n is a structural violation and is rejected, not
/// clamped.
pub fn lancaster_sequence(
    coeffs: &RegressionCoeffs,
    nu: Option<usize>,
) -> Result<LancasterSequence> {
    let rho: Vec<f64> = coeffs
        .a
        .iter()
        .zip(&coeffs.b)
        .enumerate()
        .map(|(idx, (&a, &b))| {
            let n = idx + 1;
            if nu.is_some_and(|nu| n > nu) {
                return Ok(0.0);
            }
            let product = a * b;
            if product < 0.0 {
                return Err(Error::NegativeProduct { n, product });
            }
            Ok(if a == 0.0 { 0.0 } else { a.signum() * product.sqrt() })
        })
        .collect::<Result<_>>()?;
    let monotone = rho.windows(2).all(|w| w[1].abs() <= w[0].abs() + 1e-15);
    Ok(LancasterSequence {
        rho,
        nu,
        monotone_decreasing: monotone,
    })
}

/// Maximal correlation with attainment diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxCorrReport {
    #[serde(rename = "R")]
    pub r: f64,
    /// Smallest n attaining max |rho_n|; absent when R = 0 (independence,
    /// where no transform pair attains a positive correlation).
    pub attaining_index: Option<usize>,
    /// True when every other computed |rho_n| is strictly below the max.
    pub unique_max: bool,
    pub truncation_note: String,
    /// Filled by callers that ran an independent oracle against this
    /// report; None when no oracle was consulted.
    pub oracle_residual: Option<f64>,
}

impl MaxCorrReport {
    /// Whether the truncation audit proved the K-truncated supremum
    /// equals the full supremum.
    pub fn truncation_proven(&self) -> bool {
        !self.truncation_note.contains("UNPROVEN")
    }
}

/// R(X, Y) = sup_n |rho_n| over n = 1..=K, with the finite-support
/// cutoff from the family's nu.
pub fn maximal_correlation(spec: &FamilySpec, k: usize) -> Result<MaxCorrReport> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::InvalidSpec("K must be at least 1".into()));
    }
    if let FamilySpec::FinitePopOrderStats { n, pop, .. } = *spec {
        if n == pop {
            return Err(Error::DegenerateSupport(
                "sampling the whole population makes both order statistics constant".into(),
            ));
        }
    }
    let seq = lancaster_sequence(&regression_coeffs(spec, k)?, spec.nu())?;
    let r = seq.rho.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let attaining_index = if r == 0.0 {
        None
    } else {
        seq.rho.iter().position(|&x| x.abs() == r).map(|i| i + 1)
    };
    let unique_max = r > 0.0 && seq.rho.iter().filter(|&&x| x.abs() == r).count() == 1;

    let truncation_note = match attaining_index {
        None => "all computed rho_n are zero; the supremum over this range is 0".into(),
        Some(n0) => {
            let sign = if seq.rho[n0 - 1] > 0.0 { "+" } else { "-" };
            let tail = match (seq.nu, seq.monotone_decreasing) {
                (Some(nu), _) => format!(
                    "sequence cut off by the finite support at nu = {nu}; sup over n <= {k} is exact for K >= nu"
                ),
                (None, true) => format!(
                    "|rho_n| non-increasing through n = {k}, so the truncated sup is the full sup"
                ),
                (None, false) => format!(
                    "UNPROVEN: |rho_n| not non-increasing by n = {k}; the sup may sit past the truncation"
                ),
            };
            format!("attained at n = {n0} with sign({sign}); {tail}")
        }
    };

    Ok(MaxCorrReport {
        r,
        attaining_index,
        unique_max,
        truncation_note,
        oracle_residual: None,
    })
}

/// Largest correlation attainable between the two branch records of the
/// splitting model: n / (sqrt(n + n1) sqrt(n + n2)). Computed through the
/// additive-gamma report so the two routes are bit-identical.
pub fn splitting_record_bound(n: usize, n1: usize, n2: usize) -> Result<f64> {
    if n < 1 || n1 < 1 || n2 < 1 {
        return Err(Error::InvalidSpec(format!(
            "splitting bound needs n, n1, n2 >= 1, got {n}, {n1}, {n2}"
        )));
    }
    let gamma = FamilySpec::BivariateGamma {
        alpha0: n as f64,
        alpha1: n1 as f64,
        alpha2: n2 as f64,
        lambda: 1.0,
    };
    Ok(maximal_correlation(&gamma, 1)?.r)
}
