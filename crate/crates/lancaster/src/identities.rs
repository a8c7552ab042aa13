//! Covariance expansion identities.
//!
//! For a pair with diagonal cross-moment structure, the covariance of any
//! two square-integrable transforms expands along the correlation
//! sequence: Cov(g1(X), g2(Y)) = sum_n rho_n c_n d_n with c_n, d_n the
//! Fourier coefficients in the marginal orthonormal systems. For normal
//! and additive-gamma pairs the Rodrigues formulas turn the coefficients
//! into derivative expectations, giving series whose terms need no
//! orthogonal polynomials at all. Each checker here computes the left
//! side by quadrature or exact moment algebra and the right side by the
//! series, and reports both with their residual.

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::maxcorr::{lancaster_sequence, regression_coeffs};
use crate::numeric::{ascending_factorial, factorial, horner};
use crate::orthopoly::PolySystem;
use crate::quadrature::{gauss_gamma, gauss_hermite_normal, Rule};

/// Outcome of one identity check: both sides of the equality, the number
/// of series terms the right side used, and the signed difference.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub terms_used: usize,
    pub residual: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, terms_used: usize) -> IdentityCheck {
        IdentityCheck {
            lhs,
            rhs,
            terms_used,
            residual: lhs - rhs,
        }
    }
}

type DynFn = Box<dyn Fn(f64) -> f64 + Sync>;

/// A transform together with as many derivatives as the caller can
/// supply. Polynomials carry their coefficients, so every derivative is
/// available and the expansion series terminates exactly.
pub struct SmoothFn {
    f: DynFn,
    derivatives: Vec<DynFn>,
    coeffs: Option<Vec<f64>>,
}

impl SmoothFn {
    /// A general smooth transform with explicitly listed derivatives
    /// (entry k is the (k+1)-st derivative).
    pub fn new(f: impl Fn(f64) -> f64 + Sync + 'static, derivatives: Vec<DynFn>) -> SmoothFn {
        SmoothFn {
            f: Box::new(f),
            derivatives,
            coeffs: None,
        }
    }

    /// The polynomial with the given coefficients, constant term first.
    pub fn poly(coeffs: &[f64]) -> SmoothFn {
        let degree = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        let trimmed: Vec<f64> = coeffs[..=degree].to_vec();
        let mut derivatives: Vec<DynFn> = Vec::new();
        let mut current = trimmed.clone();
        for _ in 0..degree {
            current = poly_derivative(&current);
            let captured = current.clone();
            derivatives.push(Box::new(move |x| horner(&captured, x)));
        }
        let body = trimmed.clone();
        SmoothFn {
            f: Box::new(move |x| horner(&body, x)),
            derivatives,
            coeffs: Some(trimmed),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Coefficients when the transform is a polynomial.
    pub fn poly_coeffs(&self) -> Option<&[f64]> {
        self.coeffs.as_deref()
    }

    /// Whether the given derivative order can be evaluated. Polynomials
    /// answer yes for every order (high orders are identically zero).
    pub fn has_derivative(&self, order: usize) -> bool {
        order == 0 || order <= self.derivatives.len() || self.coeffs.is_some()
    }

    fn derivative_at(&self, order: usize, x: f64) -> f64 {
        if order == 0 {
            (self.f)(x)
        } else if let Some(d) = self.derivatives.get(order - 1) {
            d(x)
        } else {
            0.0
        }
    }

    /// Series order after which every term vanishes, when known.
    fn terminates_after(&self) -> Option<usize> {
        self.coeffs.as_ref().map(|c| c.len().saturating_sub(1))
    }
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(u, &c)| u as f64 * c)
        .collect()
}

/// Covariance along the correlation sequence, for any supported family
/// and polynomial transforms: the left side from exact mixed moments,
/// the right side from sum_n rho_n c_n d_n.
pub fn check_diagonal_covariance(
    spec: &FamilySpec,
    g1: &SmoothFn,
    g2: &SmoothFn,
    k: usize,
) -> Result<IdentityCheck> {
    spec.validate()?;
    if k < 1 {
        return Err(Error::InvalidSpec("need at least one series term".into()));
    }
    let a = g1.poly_coeffs().ok_or_else(|| {
        Error::InvalidSpec("the moment route needs polynomial transforms".into())
    })?;
    let b = g2.poly_coeffs().ok_or_else(|| {
        Error::InvalidSpec("the moment route needs polynomial transforms".into())
    })?;

    let mut lhs = 0.0;
    for (u, &au) in a.iter().enumerate() {
        for (v, &bv) in b.iter().enumerate() {
            if au != 0.0 && bv != 0.0 {
                lhs += au * bv * spec.mixed_moment(u, v)?;
            }
        }
    }
    let mx = spec.x_moments(a.len() - 1)?;
    let my = spec.y_moments(b.len() - 1)?;
    let mean_x: f64 = a.iter().enumerate().map(|(u, &au)| au * mx[u]).sum();
    let mean_y: f64 = b.iter().enumerate().map(|(v, &bv)| bv * my[v]).sum();
    lhs -= mean_x * mean_y;

    // The series cannot need terms past the polynomial degrees, and on a
    // finite support the orthonormal system itself stops at nu.
    let depth = k.min(a.len() - 1).min(b.len() - 1);
    let need_x = depth.max(a.len() - 1);
    let need_y = depth.max(b.len() - 1);
    let sx = PolySystem::from_moments(&spec.x_moments(2 * need_x)?, need_x)?;
    let sy = PolySystem::from_moments(&spec.y_moments(2 * need_y)?, need_y)?;
    let cut = depth.min(sx.max_degree()).min(sy.max_degree());
    let c = sx.fourier_coeffs(a)?;
    let d = sy.fourier_coeffs(b)?;
    let rho = lancaster_sequence(&regression_coeffs(spec, cut.max(1))?, spec.nu())?.rho;
    let mut rhs = 0.0;
    for n in 1..=cut {
        rhs += rho[n - 1] * c[n] * d[n];
    }
    Ok(IdentityCheck::new(lhs, rhs, cut))
}

/// Covariance of transforms of a bivariate normal pair:
/// Cov(g1(X), g2(Y)) = sum_n (rho sigma1 sigma2)^n / n! E[g1^(n)(X)] E[g2^(n)(Y)],
/// against two-dimensional quadrature on the left.
pub fn check_normal_covariance(
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
    rho: f64,
    g1: &SmoothFn,
    g2: &SmoothFn,
    k: usize,
) -> Result<IdentityCheck> {
    let spec = FamilySpec::BivariateNormal {
        rho,
        mu1,
        sigma1,
        mu2,
        sigma2,
    };
    spec.validate()?;
    let rule = gauss_hermite_normal(48)?;
    let s = (1.0 - rho * rho).sqrt();
    let mut joint = 0.0;
    for (&z1, &w1) in rule.nodes.iter().zip(&rule.weights) {
        let x = mu1 + sigma1 * z1;
        let gx = g1.eval(x);
        for (&z2, &w2) in rule.nodes.iter().zip(&rule.weights) {
            let y = mu2 + sigma2 * (rho * z1 + s * z2);
            joint += w1 * w2 * gx * g2.eval(y);
        }
    }
    let mean1 = rule.integrate(|z| g1.eval(mu1 + sigma1 * z));
    let mean2 = rule.integrate(|z| g2.eval(mu2 + sigma2 * z));
    let lhs = joint - mean1 * mean2;

    let (rhs, terms_used) = derivative_series(k, g1, g2, |n| {
        let e1 = rule.integrate(|z| g1.derivative_at(n, mu1 + sigma1 * z));
        let e2 = rule.integrate(|z| g2.derivative_at(n, mu2 + sigma2 * z));
        (rho * sigma1 * sigma2).powi(n as i32) / factorial(n) * e1 * e2
    })?;
    Ok(IdentityCheck::new(lhs, rhs, terms_used))
}

/// Covariance of transforms of an additive-gamma pair
/// (X, Y) = (X0 + X1, X0 + X2):
/// Cov(g1(X), g2(Y)) = sum_n [a0]_n / (n! [a0+a1]_n [a0+a2]_n)
///                     E[X^n g1^(n)(X)] E[Y^n g2^(n)(Y)],
/// against component-wise quadrature on the left.
pub fn check_gamma_covariance(
    alpha0: f64,
    alpha1: f64,
    alpha2: f64,
    lambda: f64,
    g1: &SmoothFn,
    g2: &SmoothFn,
    k: usize,
) -> Result<IdentityCheck> {
    let spec = FamilySpec::BivariateGamma {
        alpha0,
        alpha1,
        alpha2,
        lambda,
    };
    spec.validate()?;
    let lhs = gamma_covariance_lhs(alpha0, alpha1, alpha2, lambda, g1, g2)?;
    let x_rule = scaled_gamma_rule(alpha0 + alpha1, lambda)?;
    let y_rule = scaled_gamma_rule(alpha0 + alpha2, lambda)?;
    let (rhs, terms_used) = derivative_series(k, g1, g2, |n| {
        let e1 = x_rule.integrate(|x| x.powi(n as i32) * g1.derivative_at(n, x));
        let e2 = y_rule.integrate(|y| y.powi(n as i32) * g2.derivative_at(n, y));
        let coeff = ascending_factorial(alpha0, n)
            / (factorial(n)
                * ascending_factorial(alpha0 + alpha1, n)
                * ascending_factorial(alpha0 + alpha2, n));
        coeff * e1 * e2
    })?;
    Ok(IdentityCheck::new(lhs, rhs, terms_used))
}

/// The record-value specialization of the gamma series: with X the n-th
/// and Y the (n+m)-th exponential record value,
/// Cov(g1(X), g2(Y)) = sum_k E[X^k g1^(k)(X)] E[Y^k g2^(k)(Y)] / (k! [n+m]_k).
pub fn check_records_covariance(
    n: usize,
    m: usize,
    g1: &SmoothFn,
    g2: &SmoothFn,
    k: usize,
) -> Result<IdentityCheck> {
    let spec = FamilySpec::ExponentialRecords { n, m };
    spec.validate()?;
    let (a0, a2) = (n as f64, m as f64);
    let lhs = gamma_covariance_lhs(a0, 0.0, a2, 1.0, g1, g2)?;
    let x_rule = scaled_gamma_rule(a0, 1.0)?;
    let y_rule = scaled_gamma_rule(a0 + a2, 1.0)?;
    let (rhs, terms_used) = derivative_series(k, g1, g2, |order| {
        let e1 = x_rule.integrate(|x| x.powi(order as i32) * g1.derivative_at(order, x));
        let e2 = y_rule.integrate(|y| y.powi(order as i32) * g2.derivative_at(order, y));
        e1 * e2 / (factorial(order) * ascending_factorial(a0 + a2, order))
    })?;
    Ok(IdentityCheck::new(lhs, rhs, terms_used))
}

/// E[g1(X0+X1) g2(X0+X2)] - E[g1] E[g2] by quadrature over the three
/// independent components; zero-shape components are point masses at 0.
fn gamma_covariance_lhs(
    alpha0: f64,
    alpha1: f64,
    alpha2: f64,
    lambda: f64,
    g1: &SmoothFn,
    g2: &SmoothFn,
) -> Result<f64> {
    let component = |shape: f64| -> Result<Rule> {
        if shape == 0.0 {
            Ok(Rule {
                nodes: vec![0.0],
                weights: vec![1.0],
            })
        } else {
            scaled_gamma_rule(shape, lambda)
        }
    };
    let shared = component(alpha0)?;
    let own1 = component(alpha1)?;
    let own2 = component(alpha2)?;
    let mut joint = 0.0;
    for (&x0, &w0) in shared.nodes.iter().zip(&shared.weights) {
        for (&x1, &w1) in own1.nodes.iter().zip(&own1.weights) {
            let gx = g1.eval(x0 + x1);
            for (&x2, &w2) in own2.nodes.iter().zip(&own2.weights) {
                joint += w0 * w1 * w2 * gx * g2.eval(x0 + x2);
            }
        }
    }
    let x_rule = scaled_gamma_rule(alpha0 + alpha1, lambda)?;
    let y_rule = scaled_gamma_rule(alpha0 + alpha2, lambda)?;
    let mean1 = x_rule.integrate(|x| g1.eval(x));
    let mean2 = y_rule.integrate(|y| g2.eval(y));
    Ok(joint - mean1 * mean2)
}

/// Quadrature for Gamma(shape, lambda) expectations.
fn scaled_gamma_rule(shape: f64, lambda: f64) -> Result<Rule> {
    let mut rule = gauss_gamma(48, shape)?;
    for node in &mut rule.nodes {
        *node /= lambda;
    }
    Ok(rule)
}

/// Evaluate a derivative-expectation series up to k terms. Polynomial
/// transforms stop once both degrees are exhausted; otherwise the series
/// must have decayed below 1e-12 (relative to its size) by the k-th term,
/// and a transform whose derivative list runs out first is an error.
fn derivative_series(
    k: usize,
    g1: &SmoothFn,
    g2: &SmoothFn,
    term: impl Fn(usize) -> f64,
) -> Result<(f64, usize)> {
    if k < 1 {
        return Err(Error::InvalidSpec("need at least one series term".into()));
    }
    let stop = match (g1.terminates_after(), g2.terminates_after()) {
        (Some(d1), Some(d2)) => Some(d1.min(d2)),
        _ => None,
    };
    let depth = stop.map_or(k, |d| d.min(k));
    let mut rhs = 0.0;
    let mut last_term = 0.0;
    for n in 1..=depth {
        if !g1.has_derivative(n) || !g2.has_derivative(n) {
            return Err(Error::SeriesNotTerminated {
                cap: n - 1,
                last_term,
            });
        }
        last_term = term(n);
        rhs += last_term;
    }
    if stop.is_none() && last_term.abs() > 1e-12 * (1.0 + rhs.abs()) {
        return Err(Error::SeriesNotTerminated {
            cap: depth,
            last_term,
        });
    }
    Ok((rhs, depth))
}
