//! Small numeric helpers shared across modules: ascending factorials,
//! binomials, Stirling triangles, polynomial coefficient arithmetic, and a
//! robust CDF inverter.

use crate::error::{Error, Result};

/// Ascending factorial `[a]_n = a (a+1) ... (a+n-1)`, with `[a]_0 = 1`.
///
/// The zero-parameter edge cases matter: `[0]_0 = 1` while `[0]_n = 0`
/// for n >= 1, which is what makes degenerate shape parameters collapse
/// whole correlation sequences to zero rather than to NaN.
pub fn ascending_factorial(a: f64, n: usize) -> f64 {
    let mut out = 1.0;
    for k in 0..n {
        out *= a + k as f64;
    }
    out
}

/// Factorial as f64 (exact through 22!).
pub fn factorial(n: usize) -> f64 {
    ascending_factorial(1.0, n)
}

/// Binomial coefficient as f64; zero when k > n.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out.round()
}

/// Unsigned Stirling numbers of the first kind, rows 0..=max:
/// `x (x+1) ... (x+m-1) = sum_t c[m][t] x^t`.
pub fn stirling_first_unsigned(max: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; max + 1]; max + 1];
    c[0][0] = 1.0;
    for m in 0..max {
        for t in 0..=m {
            let v = c[m][t];
            if v != 0.0 {
                c[m + 1][t + 1] += v;
                c[m + 1][t] += m as f64 * v;
            }
        }
    }
    c
}

/// Convert ascending factorial moments `E[X]_m` (m = 0..=M, with the
/// zeroth entry 1) into raw moments `E[X^m]` by inverting the triangular
/// Stirling relation.
pub fn ascending_to_raw(asc: &[f64]) -> Vec<f64> {
    let m_max = asc.len().saturating_sub(1);
    let c = stirling_first_unsigned(m_max);
    let mut raw = vec![0.0; asc.len()];
    if !asc.is_empty() {
        raw[0] = asc[0];
    }
    for m in 1..asc.len() {
        let mut s = asc[m];
        for t in 1..m {
            s -= c[m][t] * raw[t];
        }
        raw[m] = s;
    }
    raw
}

/// Evaluate a polynomial given ascending coefficients.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Product of two polynomials in ascending coefficient form.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Invert a nondecreasing CDF by bisection on [lo, hi].
///
/// Assumes cdf(lo) <= p <= cdf(hi); 200 halvings put the interval far
/// below f64 resolution for any bracket arising here.
pub fn invert_cdf(cdf: impl Fn(f64) -> f64, p: f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (flo, fhi) = (cdf(lo), cdf(hi));
    if !(flo <= p && p <= fhi) {
        return Err(Error::QuadratureFailure(format!(
            "quantile target {p} not bracketed by cdf values [{flo}, {fhi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
