//! The six bivariate families with polynomial conditional moments, their
//! closed-form correlation sequences, and exact moment algebra.
//!
//! Each family satisfies E(X^n | Y) = A_n Y^n + lower order and
//! E(Y^n | X) = B_n X^n + lower order, which forces the orthonormal
//! polynomials of the two marginals into a diagonal relationship:
//! E[phi_n(X) psi_k(Y)] = rho_n delta_nk with
//! rho_n = sign(A_n) sqrt(A_n B_n). The maximal correlation is then
//! sup_n |rho_n| (over n at most nu when a marginal has nu + 1 support
//! points). This module carries the closed forms for A_n, B_n, marginal
//! moments, conditional moments, and mixed moments E[X^a Y^b], all exact
//! up to f64 rounding; the oracles elsewhere never reuse them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ascending_factorial, ascending_to_raw, binomial};

/// A fully parameterized bivariate family.
///
/// Serialized with an external tag so specs read
/// `{"family": "BetaType", "params": {"alpha": 2, "beta": 1, "gamma": 3}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", deny_unknown_fields)]
pub enum FamilySpec {
    /// Bivariate normal with correlation rho.
    BivariateNormal {
        rho: f64,
        mu1: f64,
        sigma1: f64,
        mu2: f64,
        sigma2: f64,
    },
    /// X = Y B with B ~ Beta(alpha, beta) independent of Y ~ Beta(alpha +
    /// beta, gamma); equivalently (X, Y) are consecutive ratios of a
    /// Dirichlet. Marginally X ~ Beta(alpha, beta + gamma).
    BetaType { alpha: f64, beta: f64, gamma: f64 },
    /// The pair (U_{i:n}, U_{j:n}) of order statistics from n iid
    /// uniforms on (0, 1), i < j.
    UniformOrderStats { i: usize, j: usize, n: usize },
    /// The pair (R_n, R_{n+m}) of upper record values from iid standard
    /// exponentials (R_n ~ Gamma(n, 1)).
    ExponentialRecords { n: usize, m: usize },
    /// The pair (U_{i:n}, U_{j:n}) of order statistics from a simple
    /// random sample of size n drawn without replacement from {1..N}.
    FinitePopOrderStats {
        i: usize,
        j: usize,
        n: usize,
        #[serde(rename = "N")]
        pop: usize,
    },
    /// X = X0 + X1, Y = X0 + X2 with independent X_k ~ Gamma(alpha_k,
    /// rate lambda); alpha1 or alpha2 may be zero (a zero-shape gamma is
    /// the constant 0).
    BivariateGamma {
        alpha0: f64,
        alpha1: f64,
        alpha2: f64,
        lambda: f64,
    },
}

/// Maximal correlation of the additive gamma pair. Shared by the exact
/// route and the record-splitting bound so the two are bit-identical.
pub(crate) fn gamma_max_corr(alpha0: f64, alpha1: f64, alpha2: f64) -> f64 {
    alpha0 / ((alpha0 + alpha1).sqrt() * (alpha0 + alpha2).sqrt())
}

impl FamilySpec {
    /// Reject parameters outside the family's domain.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            FamilySpec::BivariateNormal {
                rho,
                sigma1,
                sigma2,
                mu1,
                mu2,
            } => {
                if !(rho.abs() <= 1.0) {
                    return fail(format!("normal needs |rho| <= 1, got {rho}"));
                }
                if !(sigma1 > 0.0 && sigma2 > 0.0) {
                    return fail(format!(
                        "normal needs positive sigmas, got {sigma1}, {sigma2}"
                    ));
                }
                if !(mu1.is_finite() && mu2.is_finite()) {
                    return fail("normal needs finite means".into());
                }
                Ok(())
            }
            FamilySpec::BetaType { alpha, beta, gamma } => {
                if !(alpha > 0.0 && gamma > 0.0 && beta >= 0.0) {
                    return fail(format!(
                        "beta type needs alpha > 0, gamma > 0, beta >= 0, got {alpha}, {beta}, {gamma}"
                    ));
                }
                Ok(())
            }
            FamilySpec::UniformOrderStats { i, j, n } => {
                if !(1 <= i && i < j && j <= n) {
                    return fail(format!("order stats need 1 <= i < j <= n, got {i}, {j}, {n}"));
                }
                Ok(())
            }
            FamilySpec::ExponentialRecords { n, m } => {
                if n < 1 || m < 1 {
                    return fail(format!("records need n >= 1 and m >= 1, got {n}, {m}"));
                }
                Ok(())
            }
            FamilySpec::FinitePopOrderStats { i, j, n, pop } => {
                if !(1 <= i && i < j && j <= n && n <= pop) {
                    return fail(format!(
                        "finite population needs 1 <= i < j <= n <= N, got {i}, {j}, {n}, {pop}"
                    ));
                }
                Ok(())
            }
            FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda,
            } => {
                if !(alpha0 > 0.0 && alpha1 >= 0.0 && alpha2 >= 0.0 && lambda > 0.0) {
                    return fail(format!(
                        "gamma needs alpha0 > 0, alpha1 >= 0, alpha2 >= 0, lambda > 0, got {alpha0}, {alpha1}, {alpha2}, {lambda}"
                    ));
                }
                Ok(())
            }
        }
    }

    /// Leading coefficient A_n of E(X^n | Y).
    pub fn a_coeff(&self, n: usize) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::BivariateNormal {
                rho,
                sigma1,
                sigma2,
                ..
            } => (rho * sigma1 / sigma2).powi(n as i32),
            FamilySpec::BetaType { alpha, beta, .. } => {
                ascending_factorial(alpha, n) / ascending_factorial(alpha + beta, n)
            }
            FamilySpec::UniformOrderStats { i, j, .. }
            | FamilySpec::FinitePopOrderStats { i, j, .. } => {
                ascending_factorial(i as f64, n) / ascending_factorial(j as f64, n)
            }
            FamilySpec::ExponentialRecords { n: rn, m } => {
                ascending_factorial(rn as f64, n) / ascending_factorial((rn + m) as f64, n)
            }
            FamilySpec::BivariateGamma { alpha0, alpha2, .. } => {
                ascending_factorial(alpha0, n) / ascending_factorial(alpha0 + alpha2, n)
            }
        })
    }

    /// Leading coefficient B_n of E(Y^n | X).
    pub fn b_coeff(&self, n: usize) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::BivariateNormal {
                rho,
                sigma1,
                sigma2,
                ..
            } => (rho * sigma2 / sigma1).powi(n as i32),
            FamilySpec::BetaType { beta, gamma, .. } => {
                ascending_factorial(gamma, n) / ascending_factorial(beta + gamma, n)
            }
            FamilySpec::UniformOrderStats { i, j, n: size }
            | FamilySpec::FinitePopOrderStats { i, j, n: size, .. } => {
                let (i, j, size) = (i as f64, j as f64, size as f64);
                ascending_factorial(size + 1.0 - j, n) / ascending_factorial(size + 1.0 - i, n)
            }
            FamilySpec::ExponentialRecords { .. } => 1.0,
            FamilySpec::BivariateGamma { alpha0, alpha1, .. } => {
                ascending_factorial(alpha0, n) / ascending_factorial(alpha0 + alpha1, n)
            }
        })
    }

    /// nu + 1 is the smaller marginal support cardinality; correlation
    /// terms with n > nu vanish. None means both supports are infinite.
    pub fn nu(&self) -> Option<usize> {
        match *self {
            FamilySpec::FinitePopOrderStats { n, pop, .. } => Some(pop - n),
            _ => None,
        }
    }

    /// Closed-form maximal correlation.
    pub fn closed_form_r(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::BivariateNormal { rho, .. } => rho.abs(),
            FamilySpec::BetaType { alpha, beta, gamma } => {
                (alpha * gamma / ((alpha + beta) * (beta + gamma))).sqrt()
            }
            FamilySpec::UniformOrderStats { i, j, n }
            | FamilySpec::FinitePopOrderStats { i, j, n, .. } => {
                let (i, j, n) = (i as f64, j as f64, n as f64);
                (i * (n + 1.0 - j) / (j * (n + 1.0 - i))).sqrt()
            }
            FamilySpec::ExponentialRecords { n, m } => {
                gamma_max_corr(n as f64, 0.0, m as f64)
            }
            FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                ..
            } => gamma_max_corr(alpha0, alpha1, alpha2),
        })
    }

    /// Raw moments E[X^k] for k = 0..=upto.
    pub fn x_moments(&self, upto: usize) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::BivariateNormal { mu1, sigma1, .. } => normal_moments(mu1, sigma1, upto),
            FamilySpec::BetaType { alpha, beta, gamma } => {
                beta_moments(alpha, beta + gamma, upto)
            }
            FamilySpec::UniformOrderStats { i, n, .. } => {
                beta_moments(i as f64, (n + 1 - i) as f64, upto)
            }
            FamilySpec::ExponentialRecords { n, .. } => gamma_moments(n as f64, 1.0, upto),
            FamilySpec::FinitePopOrderStats { i, n, pop, .. } => {
                finite_pop_moments(i, n, pop, upto)
            }
            FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                lambda,
                ..
            } => gamma_moments(alpha0 + alpha1, lambda, upto),
        })
    }

    /// Raw moments E[Y^k] for k = 0..=upto.
    pub fn y_moments(&self, upto: usize) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::BivariateNormal { mu2, sigma2, .. } => normal_moments(mu2, sigma2, upto),
            FamilySpec::BetaType { alpha, beta, gamma } => {
                beta_moments(alpha + beta, gamma, upto)
            }
            FamilySpec::UniformOrderStats { j, n, .. } => {
                beta_moments(j as f64, (n + 1 - j) as f64, upto)
            }
            FamilySpec::ExponentialRecords { n, m } => gamma_moments((n + m) as f64, 1.0, upto),
            FamilySpec::FinitePopOrderStats { j, n, pop, .. } => {
                finite_pop_moments(j, n, pop, upto)
            }
            FamilySpec::BivariateGamma {
                alpha0,
                alpha2,
                lambda,
                ..
            } => gamma_moments(alpha0 + alpha2, lambda, upto),
        })
    }

    /// E(X^n | Y = y), exact in closed form.
    pub fn cond_x_moment(&self, n: usize, y: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            FamilySpec::BivariateNormal {
                rho,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                let mean = mu1 + rho * sigma1 / sigma2 * (y - mu2);
                let sd = sigma1 * (1.0 - rho * rho).max(0.0).sqrt();
                Ok(normal_moments(mean, sd, n)[n])
            }
            FamilySpec::BetaType { alpha, beta, .. } => {
                check_unit(y)?;
                Ok(y.powi(n as i32) * ascending_factorial(alpha, n)
                    / ascending_factorial(alpha + beta, n))
            }
            FamilySpec::UniformOrderStats { i, j, .. } => {
                check_unit(y)?;
                Ok(y.powi(n as i32) * ascending_factorial(i as f64, n)
                    / ascending_factorial(j as f64, n))
            }
            FamilySpec::ExponentialRecords { n: rn, m } => {
                check_nonneg(y)?;
                Ok(y.powi(n as i32) * ascending_factorial(rn as f64, n)
                    / ascending_factorial((rn + m) as f64, n))
            }
            FamilySpec::FinitePopOrderStats { i, j, .. } => {
                let s = check_lattice(y)?;
                // Given U_j = s, the i-th of the first j - 1 order
                // statistics is distributed as U_{i:j-1} sampled from
                // {1..s-1}, whose ascending moments are in closed form.
                let asc: Vec<f64> = (0..=n)
                    .map(|m| {
                        ascending_factorial(s as f64, m) * ascending_factorial(i as f64, m)
                            / ascending_factorial(j as f64, m)
                    })
                    .collect();
                Ok(ascending_to_raw(&asc)[n])
            }
            FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda,
            } => {
                check_nonneg(y)?;
                gamma_cond_moment(alpha0, alpha1, alpha2, lambda, n, y)
            }
        }
    }

    /// E(Y^n | X = x), exact in closed form.
    pub fn cond_y_moment(&self, n: usize, x: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            FamilySpec::BivariateNormal {
                rho,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                let mean = mu2 + rho * sigma2 / sigma1 * (x - mu1);
                let sd = sigma2 * (1.0 - rho * rho).max(0.0).sqrt();
                Ok(normal_moments(mean, sd, n)[n])
            }
            FamilySpec::BetaType { beta, gamma, .. } => {
                check_unit(x)?;
                // Y | X = x is x + (1 - x) V with V ~ Beta(beta, gamma).
                Ok((0..=n)
                    .map(|k| {
                        binomial(n as u64, k as u64)
                            * x.powi((n - k) as i32)
                            * (1.0 - x).powi(k as i32)
                            * ascending_factorial(beta, k)
                            / ascending_factorial(beta + gamma, k)
                    })
                    .sum())
            }
            FamilySpec::UniformOrderStats { i, j, n: size } => FamilySpec::BetaType {
                alpha: i as f64,
                beta: (j - i) as f64,
                gamma: (size + 1 - j) as f64,
            }
            .cond_y_moment(n, x),
            FamilySpec::ExponentialRecords { m, .. } => {
                check_nonneg(x)?;
                // Y - x given X = x is the m-th record of a fresh
                // sequence, so E(Y^n | x) = sum C(n,k) [m]_k x^(n-k).
                Ok((0..=n)
                    .map(|k| {
                        binomial(n as u64, k as u64)
                            * ascending_factorial(m as f64, k)
                            * x.powi((n - k) as i32)
                    })
                    .sum())
            }
            FamilySpec::FinitePopOrderStats { i, j, n: size, pop } => {
                let k = check_lattice(x)?;
                // Given U_i = k, the j-th order statistic is k plus the
                // (j-i)-th of n-i order statistics sampled from {1..N-k}.
                let asc: Vec<f64> = (0..=n)
                    .map(|m| {
                        ascending_factorial((pop - k + 1) as f64, m)
                            * ascending_factorial((j - i) as f64, m)
                            / ascending_factorial((size - i + 1) as f64, m)
                    })
                    .collect();
                let raw = ascending_to_raw(&asc);
                Ok((0..=n)
                    .map(|t| binomial(n as u64, t as u64) * (k as f64).powi((n - t) as i32) * raw[t])
                    .sum())
            }
            FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda,
            } => {
                check_nonneg(x)?;
                gamma_cond_moment(alpha0, alpha2, alpha1, lambda, n, x)
            }
        }
    }

    /// E[X^a Y^b], exact in closed form.
    pub fn mixed_moment(&self, a: usize, b: usize) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::BivariateNormal {
                rho,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => normal_mixed_moment(rho, mu1, sigma1, mu2, sigma2, a, b),
            FamilySpec::BetaType { alpha, beta, gamma } => {
                beta_mixed_moment(alpha, beta, gamma, a, b)
            }
            FamilySpec::UniformOrderStats { i, j, n } => beta_mixed_moment(
                i as f64,
                (j - i) as f64,
                (n + 1 - j) as f64,
                a,
                b,
            ),
            FamilySpec::ExponentialRecords { n, m } => {
                gamma_mixed_moment(n as f64, 0.0, m as f64, 1.0, a, b)
            }
            FamilySpec::FinitePopOrderStats { .. } => {
                let mut acc = 0.0;
                self.for_each_joint_atom(|x, y, p| {
                    acc += p * x.powi(a as i32) * y.powi(b as i32);
                })?;
                acc
            }
            FamilySpec::BivariateGamma {
                alpha0,
                alpha1,
                alpha2,
                lambda,
            } => gamma_mixed_moment(alpha0, alpha1, alpha2, lambda, a, b),
        })
    }

    /// Visit every atom (x, y, mass) of the finite-population joint pmf.
    pub fn for_each_joint_atom(&self, mut f: impl FnMut(f64, f64, f64)) -> Result<()> {
        let FamilySpec::FinitePopOrderStats { i, j, n, pop } = *self else {
            return Err(Error::UnsupportedFamily(format!(
                "joint pmf atoms exist only for finite populations, not {self:?}"
            )));
        };
        let total = binomial(pop as u64, n as u64);
        for k in i..=(pop - n + i) {
            for s in (k + j - i)..=(pop - n + j) {
                let ways = binomial((k - 1) as u64, (i - 1) as u64)
                    * binomial((s - k - 1) as u64, (j - i - 1) as u64)
                    * binomial((pop - s) as u64, (n - j) as u64);
                if ways > 0.0 {
                    f(k as f64, s as f64, ways / total);
                }
            }
        }
        Ok(())
    }
}

/// Raw moments of N(mu, sigma^2) for k = 0..=upto, by the recurrence
/// m_k = mu m_{k-1} + (k-1) sigma^2 m_{k-2}.
fn normal_moments(mu: f64, sigma: f64, upto: usize) -> Vec<f64> {
    let mut m = vec![1.0; upto + 1];
    if upto >= 1 {
        m[1] = mu;
    }
    for k in 2..=upto {
        m[k] = mu * m[k - 1] + (k as f64 - 1.0) * sigma * sigma * m[k - 2];
    }
    m
}

/// Raw moments of Beta(p, q).
fn beta_moments(p: f64, q: f64, upto: usize) -> Vec<f64> {
    (0..=upto)
        .map(|k| ascending_factorial(p, k) / ascending_factorial(p + q, k))
        .collect()
}

/// Raw moments of Gamma(shape, rate).
fn gamma_moments(shape: f64, rate: f64, upto: usize) -> Vec<f64> {
    (0..=upto)
        .map(|k| ascending_factorial(shape, k) / rate.powi(k as i32))
        .collect()
}

/// Raw moments of the i-th order statistic of a size-n sample without
/// replacement from {1..N}, via its ascending factorial moments
/// E[U]_m = [N+1]_m [i]_m / [n+1]_m.
fn finite_pop_moments(i: usize, n: usize, pop: usize, upto: usize) -> Vec<f64> {
    let asc: Vec<f64> = (0..=upto)
        .map(|m| {
            ascending_factorial((pop + 1) as f64, m) * ascending_factorial(i as f64, m)
                / ascending_factorial((n + 1) as f64, m)
        })
        .collect();
    ascending_to_raw(&asc)
}

/// E(X^n | Y = y) for the additive gamma pair, by conditioning the
/// shared component: X0 | Y = y is y B with B ~ Beta(alpha0, alphac).
fn gamma_cond_moment(
    alpha0: f64,
    alphao: f64,
    alphac: f64,
    lambda: f64,
    n: usize,
    y: f64,
) -> Result<f64> {
    Ok((0..=n)
        .map(|j| {
            binomial(n as u64, j as u64)
                * (ascending_factorial(alpha0, j) / ascending_factorial(alpha0 + alphac, j))
                * (ascending_factorial(alphao, n - j) / lambda.powi((n - j) as i32))
                * y.powi(j as i32)
        })
        .sum())
}

/// E[X^a Y^b] for the beta type, using X = Y B with B independent of Y.
fn beta_mixed_moment(alpha: f64, beta: f64, gamma: f64, a: usize, b: usize) -> f64 {
    let eb = ascending_factorial(alpha, a) / ascending_factorial(alpha + beta, a);
    let ey = ascending_factorial(alpha + beta, a + b) / ascending_factorial(alpha + beta + gamma, a + b);
    eb * ey
}

/// E[X^a Y^b] for the additive gamma pair, by expanding both binomials
/// over the independent components.
fn gamma_mixed_moment(alpha0: f64, alpha1: f64, alpha2: f64, lambda: f64, a: usize, b: usize) -> f64 {
    let mut acc = 0.0;
    for p in 0..=a {
        for q in 0..=b {
            acc += binomial(a as u64, p as u64)
                * binomial(b as u64, q as u64)
                * ascending_factorial(alpha0, p + q)
                * ascending_factorial(alpha1, a - p)
                * ascending_factorial(alpha2, b - q);
        }
    }
    acc / lambda.powi((a + b) as i32)
}

/// E[X^a Y^b] for the bivariate normal: the standardized table follows
/// M[p][q] = (p-1) M[p-2][q] + rho q M[p-1][q-1], then both location
/// scales enter binomially.
fn normal_mixed_moment(
    rho: f64,
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
    a: usize,
    b: usize,
) -> f64 {
    let mut m = vec![vec![0.0; b + 1]; a + 1];
    for p in 0..=a {
        for q in 0..=b {
            m[p][q] = if p == 0 && q == 0 {
                1.0
            } else if p == 0 {
                // Symmetric recurrence in q alone.
                if q >= 2 { (q as f64 - 1.0) * m[0][q - 2] } else { 0.0 }
            } else {
                let from_pp = if p >= 2 { (p as f64 - 1.0) * m[p - 2][q] } else { 0.0 };
                let from_pq = if q >= 1 { rho * q as f64 * m[p - 1][q - 1] } else { 0.0 };
                from_pp + from_pq
            };
        }
    }
    let mut acc = 0.0;
    for p in 0..=a {
        for q in 0..=b {
            acc += binomial(a as u64, p as u64)
                * binomial(b as u64, q as u64)
                * mu1.powi((a - p) as i32)
                * mu2.powi((b - q) as i32)
                * sigma1.powi(p as i32)
                * sigma2.powi(q as i32)
                * m[p][q];
        }
    }
    acc
}

fn check_unit(v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfSupport { value: v })
    }
}

fn check_nonneg(v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfSupport { value: v })
    }
}

fn check_lattice(v: f64) -> Result<usize> {
    let r = v.round();
    if (v - r).abs() < 1e-9 && r >= 1.0 {
        Ok(r as usize)
    } else {
        Err(Error::OutOfSupport { value: v })
    }
}
