//! Paper-independent estimation of the maximal correlation, used to
//! cross-check every closed form in this crate.
//!
//! Three routes, none of which shares arithmetic with the closed forms:
//!
//! * exact: R equals the second singular value of the normalized joint
//!   matrix Q[a][b] = P[a][b] / sqrt(px[a] py[b]) on finite supports
//!   ([`svd_maxcorr`]),
//! * iterative: alternating conditional expectations on a discretized
//!   joint converge to the optimal transform pair ([`ace_maxcorr`]),
//! * structural: the cross-moment matrix E[phi_n(X) psi_k(Y)] of the
//!   marginal orthonormal systems must be diagonal with the Lancaster
//!   sequence on the diagonal ([`verify_diagonal`]).

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::maxcorr::{lancaster_sequence, regression_coeffs};
use crate::numeric::{horner, invert_cdf, poly_mul};
use crate::orthopoly::PolySystem;
use crate::quadrature::gauss_legendre_on;

/// A finite bivariate distribution: supports plus a joint probability
/// matrix, rows indexed by x_support and columns by y_support.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteJoint {
    pub x_support: Vec<f64>,
    pub y_support: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

impl DiscreteJoint {
    /// Validate and normalize: entries must be nonnegative with total
    /// mass 1 within 1e-12; rows or columns carrying zero mass are
    /// pruned; at least two support points must survive on each axis.
    pub fn new(x_support: Vec<f64>, y_support: Vec<f64>, p: Vec<Vec<f64>>) -> Result<DiscreteJoint> {
        let joint = DiscreteJoint {
            x_support,
            y_support,
            p,
        };
        joint.validated()
    }

    fn validated(mut self) -> Result<DiscreteJoint> {
        if self.p.len() != self.x_support.len()
            || self.p.iter().any(|row| row.len() != self.y_support.len())
        {
            return Err(Error::InvalidSpec(
                "joint matrix shape does not match the supports".into(),
            ));
        }
        let mut total = 0.0;
        for row in &self.p {
            for &v in row {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidSpec(format!("joint mass {v} is not allowed")));
                }
                total += v;
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "joint mass sums to {total}, not 1"
            )));
        }
        let keep_rows: Vec<usize> = (0..self.p.len())
            .filter(|&a| self.p[a].iter().sum::<f64>() > 0.0)
            .collect();
        let keep_cols: Vec<usize> = (0..self.y_support.len())
            .filter(|&b| self.p.iter().map(|row| row[b]).sum::<f64>() > 0.0)
            .collect();
        if keep_rows.len() < self.p.len() || keep_cols.len() < self.y_support.len() {
            self.x_support = keep_rows.iter().map(|&a| self.x_support[a]).collect();
            self.p = keep_rows
                .iter()
                .map(|&a| keep_cols.iter().map(|&b| self.p[a][b]).collect())
                .collect();
            self.y_support = keep_cols.iter().map(|&b| self.y_support[b]).collect();
        }
        if self.x_support.len() < 2 || self.y_support.len() < 2 {
            return Err(Error::DegenerateMarginal(format!(
                "need at least 2 support points per axis, have {}x{}",
                self.x_support.len(),
                self.y_support.len()
            )));
        }
        Ok(self)
    }

    /// Marginal probabilities of x_support (row sums).
    pub fn px(&self) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().sum()).collect()
    }

    /// Marginal probabilities of y_support (column sums).
    pub fn py(&self) -> Vec<f64> {
        (0..self.y_support.len())
            .map(|b| self.p.iter().map(|row| row[b]).sum())
            .collect()
    }
}

/// The joint pmf of a finite-population order-statistic pair.
///
/// For N <= 20 the C(N, n) equally likely subsets are enumerated
/// directly; beyond that the closed-form pmf (a product of three
/// binomial coefficients over C(N, n)) takes over. The two paths agree
/// on the overlap, which the tests pin.
pub fn joint_pmf(spec: &FamilySpec) -> Result<DiscreteJoint> {
    spec.validate()?;
    let FamilySpec::FinitePopOrderStats { i, j, n, pop } = *spec else {
        return Err(Error::UnsupportedFamily(format!(
            "joint pmf requires a finite-population spec, not {spec:?}"
        )));
    };
    if n == pop {
        return Err(Error::DegenerateSupport(
            "sampling the whole population makes both order statistics constant".into(),
        ));
    }
    let x_support: Vec<f64> = (i..=(pop - n + i)).map(|v| v as f64).collect();
    let y_support: Vec<f64> = (j..=(pop - n + j)).map(|v| v as f64).collect();
    let mut p = vec![vec![0.0; y_support.len()]; x_support.len()];
    if pop <= 20 {
        let subsets = (1..=pop).combinations(n);
        let weight = 1.0 / crate::numeric::binomial(pop as u64, n as u64);
        for subset in subsets {
            let a = subset[i - 1] - i;
            let b = subset[j - 1] - j;
            p[a][b] += weight;
        }
    } else {
        spec.for_each_joint_atom(|x, y, mass| {
            p[x as usize - i][y as usize - j] += mass;
        })?;
    }
    DiscreteJoint::new(x_support, y_support, p)
}

/// Maximal correlation of a finite joint, exactly: the second singular
/// value of Q[a][b] = P[a][b]/sqrt(px[a] py[b]).
///
/// The leading singular pair of Q is (sqrt(px), sqrt(py)) with value 1
/// (the constant transforms), so it is deflated by subtraction and the
/// largest remaining singular value is returned.
pub fn svd_maxcorr(joint: &DiscreteJoint) -> Result<f64> {
    let joint = joint.clone().validated()?;
    let px = joint.px();
    let py = joint.py();
    let (r, c) = (px.len(), py.len());
    let mut q = DMatrix::zeros(r, c);
    for a in 0..r {
        for b in 0..c {
            q[(a, b)] = joint.p[a][b] / (px[a] * py[b]).sqrt() - (px[a] * py[b]).sqrt();
        }
    }
    let sigma = q.svd(false, false).singular_values[0];
    Ok(sigma.clamp(0.0, 1.0))
}

/// Result of the alternating-conditional-expectations iteration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AceResult {
    #[serde(rename = "R_hat")]
    pub r_hat: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Optimal transform of X, tabulated on x_support, standardized to
    /// zero mean and unit variance under the x marginal.
    pub g_table: Vec<f64>,
    /// Optimal transform of Y on y_support, standardized likewise.
    pub h_table: Vec<f64>,
}

/// Power iteration on the conditional-expectation operator:
/// h <- standardize E[g(X) | Y], g <- standardize E[h(Y) | X], with the
/// correlation estimate read off each sweep.
///
/// The iteration starts from the standardized identity. When an iterate's
/// variance collapses (the operator annihilated the current function, as
/// happens for the identity on symmetric joints where E[X | Y] vanishes),
/// it restarts deterministically from x^2, then x^3, then x^4. If every
/// initializer collapses the joint is a product and R_hat = 0.
pub fn ace_maxcorr(joint: &DiscreteJoint, tol: f64, max_iter: usize) -> Result<AceResult> {
    let joint = joint.clone().validated()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tol}")));
    }
    let px = joint.px();
    let py = joint.py();
    let identity_g = standardize(&joint.x_support, &px).ok_or_else(|| {
        Error::DegenerateMarginal("x support carries no variance".into())
    })?;
    let identity_h = standardize(&joint.y_support, &py).ok_or_else(|| {
        Error::DegenerateMarginal("y support carries no variance".into())
    })?;

    let mut iterations = 0;
    for power in 1..=4u32 {
        let init: Vec<f64> = joint.x_support.iter().map(|&x| x.powi(power as i32)).collect();
        let Some(mut g) = standardize(&init, &px) else {
            continue;
        };
        let mut r_prev = 0.0;
        let mut diff_prev = f64::INFINITY;
        for _ in 0..max_iter {
            iterations += 1;
            let Some(h) = standardize(&cond_expect_cols(&joint.p, &g, &py), &py) else {
                break;
            };
            let Some(g_next) = standardize(&cond_expect_rows(&joint.p, &h, &px), &px) else {
                break;
            };
            g = g_next;
            let r: f64 = joint
                .p
                .iter()
                .enumerate()
                .map(|(a, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(b, &m)| m * g[a] * h[b])
                        .sum::<f64>()
                })
                .sum();
            let diff = (r - r_prev).abs();
            r_prev = r;
            if diff < tol {
                // A small step can mean convergence or a plateau near a
                // tied subdominant singular value; the geometric tail
                // estimate diff * q / (1 - q) separates the two.
                let q = (diff / diff_prev).min(0.999);
                if diff * q / (1.0 - q) < 5.0 * tol {
                    return Ok(AceResult {
                        r_hat: r.clamp(0.0, 1.0),
                        iterations,
                        converged: true,
                        g_table: g,
                        h_table: h,
                    });
                }
            }
            diff_prev = diff.max(1e-300);
        }
        if r_prev != 0.0 {
            // Ran out of iterations while making progress: report the
            // best estimate without claiming convergence.
            let h = standardize(&cond_expect_cols(&joint.p, &g, &py), &py).unwrap_or(identity_h);
            return Ok(AceResult {
                r_hat: r_prev.clamp(0.0, 1.0),
                iterations,
                converged: false,
                g_table: g,
                h_table: h,
            });
        }
    }
    // Every polynomial initializer was annihilated: a product joint.
    Ok(AceResult {
        r_hat: 0.0,
        iterations,
        converged: true,
        g_table: identity_g,
        h_table: identity_h,
    })
}

/// E[g(X) | Y = y_b] for every column b.
fn cond_expect_cols(p: &[Vec<f64>], g: &[f64], py: &[f64]) -> Vec<f64> {
    (0..py.len())
        .map(|b| {
            p.iter()
                .enumerate()
                .map(|(a, row)| row[b] * g[a])
                .sum::<f64>()
                / py[b]
        })
        .collect()
}

/// E[h(Y) | X = x_a] for every row a.
fn cond_expect_rows(p: &[Vec<f64>], h: &[f64], px: &[f64]) -> Vec<f64> {
    p.iter()
        .zip(px)
        .map(|(row, &mass)| {
            row.iter()
                .zip(h)
                .map(|(&m, &hv)| m * hv)
                .sum::<f64>()
                / mass
        })
        .collect()
}

/// Center and scale v to zero mean, unit variance under weights w;
/// None when the variance is numerically zero.
fn standardize(v: &[f64], w: &[f64]) -> Option<Vec<f64>> {
    let mean: f64 = v.iter().zip(w).map(|(&x, &p)| p * x).sum();
    let var: f64 = v.iter().zip(w).map(|(&x, &p)| p * (x - mean) * (x - mean)).sum();
    let scale: f64 = v.iter().zip(w).map(|(&x, &p)| p * x * x).sum::<f64>().max(1.0);
    if var <= 1e-24 * scale {
        return None;
    }
    let sd = var.sqrt();
    Some(v.iter().map(|&x| (x - mean) / sd).collect())
}

/// Discretize a continuous family onto an equal-marginal-mass grid with
/// the given number of bins per axis; finite-population specs pass
/// through their exact pmf untouched.
///
/// Bin edges sit at marginal quantiles k/bins, so grids at powers of two
/// nest and refinement can only gain correlation. Cell masses come from
/// per-bin integrals of the conditional CDF in quantile space, which
/// telescope to the exact marginal masses.
pub fn discretize(spec: &FamilySpec, bins: usize) -> Result<DiscreteJoint> {
    spec.validate()?;
    if let FamilySpec::FinitePopOrderStats { .. } = spec {
        return joint_pmf(spec);
    }
    if bins < 8 {
        return Err(Error::InvalidSpec(format!("need at least 8 bins, got {bins}")));
    }
    match *spec {
        FamilySpec::BivariateNormal {
            rho,
            mu1,
            sigma1,
            mu2,
            sigma2,
        } => discretize_normal(rho, mu1, sigma1, mu2, sigma2, bins),
        FamilySpec::BetaType { alpha, beta, gamma } => discretize_beta(alpha, beta, gamma, bins),
        FamilySpec::UniformOrderStats { i, j, n } => discretize_beta(
            i as f64,
            (j - i) as f64,
            (n + 1 - j) as f64,
            bins,
        ),
        FamilySpec::ExponentialRecords { n, m } => {
            discretize_gamma(n as f64, 0.0, m as f64, 1.0, bins)
        }
        FamilySpec::BivariateGamma {
            alpha0,
            alpha1,
            alpha2,
            lambda,
        } => discretize_gamma(alpha0, alpha1, alpha2, lambda, bins),
        FamilySpec::FinitePopOrderStats { .. } => unreachable!("handled above"),
    }
}

fn phi(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn phi_inv(p: f64) -> Result<f64> {
    invert_cdf(phi, p, -40.0, 40.0)
}

/// Normal: cell masses from T[a][b] = integral over the a-th x strip of
/// Phi((z_b - rho x)/s) in quantile space, differenced across the z
/// edges. The b = 0 and b = bins columns are 0 and the exact strip mass,
/// so row sums are exact.
fn discretize_normal(
    rho: f64,
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
    bins: usize,
) -> Result<DiscreteJoint> {
    let x_support: Vec<f64> = (0..bins)
        .map(|a| phi_inv((a as f64 + 0.5) / bins as f64).map(|z| mu1 + sigma1 * z))
        .collect::<Result<_>>()?;
    let y_support: Vec<f64> = (0..bins)
        .map(|b| phi_inv((b as f64 + 0.5) / bins as f64).map(|z| mu2 + sigma2 * z))
        .collect::<Result<_>>()?;

    let mut p = vec![vec![0.0; bins]; bins];
    if rho.abs() >= 1.0 {
        // Perfect dependence: all strip mass sits on the matched (or
        // reversed) quantile cell.
        for a in 0..bins {
            let b = if rho > 0.0 { a } else { bins - 1 - a };
            p[a][b] = 1.0 / bins as f64;
        }
        return DiscreteJoint::new(x_support, y_support, p);
    }
    let s = (1.0 - rho * rho).sqrt();
    let z_edges: Vec<f64> = (1..bins)
        .map(|b| phi_inv(b as f64 / bins as f64))
        .collect::<Result<_>>()?;
    let rule = gauss_legendre_on(32, 0.0, 1.0)?;
    for a in 0..bins {
        let (u0, u1) = (a as f64 / bins as f64, (a as f64 + 1.0) / bins as f64);
        // Conditional CDF of Y's quantile position at each interior edge,
        // integrated over this strip.
        let mut t = vec![0.0; bins + 1];
        t[bins] = 1.0 / bins as f64;
        for (node, weight) in rule.nodes.iter().zip(&rule.weights) {
            let x = phi_inv(u0 + (u1 - u0) * node)?;
            for (b, &z) in z_edges.iter().enumerate() {
                t[b + 1] += (u1 - u0) * weight * phi((z - rho * x) / s);
            }
        }
        for b in 0..bins {
            p[a][b] = (t[b + 1] - t[b]).max(0.0);
        }
    }
    normalize(&mut p);
    DiscreteJoint::new(x_support, y_support, p)
}

/// Beta type: X | Y = y is y B with B ~ Beta(alpha, beta), so the cell
/// mass over an x bin is the regularized incomplete beta difference at
/// the scaled edges, integrated over the y bin in quantile space.
fn discretize_beta(alpha: f64, beta: f64, gamma: f64, bins: usize) -> Result<DiscreteJoint> {
    let x_cdf = move |x: f64| beta_reg(alpha, beta + gamma, x.clamp(0.0, 1.0));
    let y_cdf = move |y: f64| beta_reg(alpha + beta, gamma, y.clamp(0.0, 1.0));
    let x_support = quantile_grid(&x_cdf, bins, 0.0, 1.0)?;
    let y_support = quantile_grid(&y_cdf, bins, 0.0, 1.0)?;

    let mut p = vec![vec![0.0; bins]; bins];
    if beta == 0.0 {
        // X = Y exactly; both marginals share one quantile grid.
        for a in 0..bins {
            p[a][a] = 1.0 / bins as f64;
        }
        return DiscreteJoint::new(x_support, y_support, p);
    }
    let x_edges: Vec<f64> = (1..bins)
        .map(|a| invert_cdf(x_cdf, a as f64 / bins as f64, 0.0, 1.0))
        .collect::<Result<_>>()?;
    let rule = gauss_legendre_on(32, 0.0, 1.0)?;
    for b in 0..bins {
        let (u0, u1) = (b as f64 / bins as f64, (b as f64 + 1.0) / bins as f64);
        let mut t = vec![0.0; bins + 1];
        t[bins] = 1.0 / bins as f64;
        for (node, weight) in rule.nodes.iter().zip(&rule.weights) {
            let y = invert_cdf(y_cdf, u0 + (u1 - u0) * node, 0.0, 1.0)?;
            for (a, &xe) in x_edges.iter().enumerate() {
                let v = if y <= 0.0 { 1.0 } else { (xe / y).min(1.0) };
                t[a + 1] += (u1 - u0) * weight * beta_reg(alpha, beta, v);
            }
        }
        for a in 0..bins {
            p[a][b] = (t[a + 1] - t[a]).max(0.0);
        }
    }
    normalize(&mut p);
    DiscreteJoint::new(x_support, y_support, p)
}

/// Additive gamma: X = X0 + X1, Y = X0 + X2. Given Y = y, the shared
/// component is y B with B ~ Beta(alpha0, alpha2), so
/// P(X <= x | y) = E_B[G1(x - y B)] with G1 the Gamma(alpha1) CDF; the
/// alpha1 = 0 and alpha2 = 0 degenerations replace the convolution by a
/// step. Cell masses integrate this over y bins in quantile space.
fn discretize_gamma(
    alpha0: f64,
    alpha1: f64,
    alpha2: f64,
    lambda: f64,
    bins: usize,
) -> Result<DiscreteJoint> {
    let x_shape = alpha0 + alpha1;
    let y_shape = alpha0 + alpha2;
    let x_cdf = move |x: f64| if x <= 0.0 { 0.0 } else { gamma_lr(x_shape, lambda * x) };
    let y_cdf = move |y: f64| if y <= 0.0 { 0.0 } else { gamma_lr(y_shape, lambda * y) };
    let x_hi = gamma_upper_bracket(x_shape, lambda);
    let y_hi = gamma_upper_bracket(y_shape, lambda);
    let x_support = quantile_grid(&x_cdf, bins, 0.0, x_hi)?;
    let y_support = quantile_grid(&y_cdf, bins, 0.0, y_hi)?;

    let mut p = vec![vec![0.0; bins]; bins];
    if alpha1 == 0.0 && alpha2 == 0.0 {
        for a in 0..bins {
            p[a][a] = 1.0 / bins as f64;
        }
        return DiscreteJoint::new(x_support, y_support, p);
    }
    let x_edges: Vec<f64> = (1..bins)
        .map(|a| invert_cdf(x_cdf, a as f64 / bins as f64, 0.0, x_hi))
        .collect::<Result<_>>()?;
    let cond_cdf: Box<dyn Fn(f64, f64) -> f64> = if alpha1 == 0.0 {
        // X is the shared component itself: P(X <= x | y) = I_{x/y}.
        Box::new(move |xe: f64, y: f64| {
            if y <= 0.0 {
                1.0
            } else {
                beta_reg(alpha0, alpha2, (xe / y).min(1.0))
            }
        })
    } else if alpha2 == 0.0 {
        // Y is the shared component: X = y + X1.
        Box::new(move |xe: f64, y: f64| {
            if xe <= y {
                0.0
            } else {
                gamma_lr(alpha1, lambda * (xe - y))
            }
        })
    } else {
        let inner = gauss_legendre_on(24, 0.0, 1.0)?;
        Box::new(move |xe: f64, y: f64| {
            if y <= 0.0 {
                return if xe >= 0.0 { gamma_lr(alpha1, lambda * xe.max(0.0)) } else { 0.0 };
            }
            // E over B ~ Beta(alpha0, alpha2) of G1(xe - y B), written as
            // an integral of the beta quantile to keep the integrand
            // bounded for shape parameters below 1.
            inner.integrate(|u| {
                let b = invert_beta(alpha0, alpha2, u);
                let rem = xe - y * b;
                if rem <= 0.0 {
                    0.0
                } else {
                    gamma_lr(alpha1, lambda * rem)
                }
            })
        })
    };

    let rule = gauss_legendre_on(32, 0.0, 1.0)?;
    for b in 0..bins {
        let (u0, u1) = (b as f64 / bins as f64, (b as f64 + 1.0) / bins as f64);
        let mut t = vec![0.0; bins + 1];
        t[bins] = 1.0 / bins as f64;
        for (node, weight) in rule.nodes.iter().zip(&rule.weights) {
            let y = invert_cdf(y_cdf, u0 + (u1 - u0) * node, 0.0, y_hi)?;
            for (a, &xe) in x_edges.iter().enumerate() {
                t[a + 1] += (u1 - u0) * weight * cond_cdf(xe, y);
            }
        }
        for a in 0..bins {
            p[a][b] = (t[a + 1] - t[a]).max(0.0);
        }
    }
    normalize(&mut p);
    DiscreteJoint::new(x_support, y_support, p)
}

fn invert_beta(a: f64, b: f64, u: f64) -> f64 {
    invert_cdf(|t| beta_reg(a, b, t), u.clamp(0.0, 1.0), 0.0, 1.0).unwrap_or(u)
}

fn gamma_upper_bracket(shape: f64, rate: f64) -> f64 {
    let mut hi = (shape + 10.0 * shape.sqrt() + 10.0) / rate;
    while gamma_lr(shape, rate * hi) < 1.0 - 1e-15 {
        hi *= 2.0;
    }
    hi
}

/// Representative values (quantile midpoints) for an equal-mass grid.
fn quantile_grid(cdf: &impl Fn(f64) -> f64, bins: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    (0..bins)
        .map(|k| invert_cdf(cdf, (k as f64 + 0.5) / bins as f64, lo, hi))
        .collect()
}

fn normalize(p: &mut [Vec<f64>]) {
    let total: f64 = p.iter().flatten().sum();
    for row in p.iter_mut() {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
}

/// Fixture: the uniform distribution on the unit disc, rasterized onto a
/// square grid over [-1, 1]^2. Cell masses count subsample midpoints
/// falling inside the disc, so the grid is symmetric under both axis
/// reflections. This joint is the standard witness that a positive
/// maximal correlation can coexist with zero linear regression slopes in
/// both directions.
pub fn unit_disc_grid(cells_per_axis: usize, subsamples: usize) -> Result<DiscreteJoint> {
    if cells_per_axis < 2 || subsamples < 1 {
        return Err(Error::InvalidSpec(
            "disc grid needs at least 2 cells per axis and 1 subsample".into(),
        ));
    }
    let k = cells_per_axis;
    let width = 2.0 / k as f64;
    let center = |a: usize| -1.0 + width * (a as f64 + 0.5);
    let mut p = vec![vec![0.0; k]; k];
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let (x0, y0) = (-1.0 + width * a as f64, -1.0 + width * b as f64);
            let mut inside = 0usize;
            for sa in 0..subsamples {
                let x = x0 + width * (sa as f64 + 0.5) / subsamples as f64;
                for sb in 0..subsamples {
                    let y = y0 + width * (sb as f64 + 0.5) / subsamples as f64;
                    if x * x + y * y <= 1.0 {
                        inside += 1;
                    }
                }
            }
            p[a][b] = inside as f64;
            total += p[a][b];
        }
    }
    for row in &mut p {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    let support: Vec<f64> = (0..k).map(center).collect();
    DiscreteJoint::new(support.clone(), support, p)
}

/// Cross-moment residual matrix: entry (n, k) is
/// E[phi_n(X) psi_k(Y)] - rho_n delta_nk for the marginal orthonormal
/// systems, n, k = 0..=max_degree. Everything is computed from exact
/// moment algebra; the diagonal structure claims every entry is zero.
///
/// Past a finite support (degree > nu) the basis continues with
/// x^(n-nu-1) (x - x_0)...(x - x_nu), which vanishes on the support, so
/// those rows and columns must vanish identically.
pub fn verify_diagonal(spec: &FamilySpec, max_degree: usize) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let sx = PolySystem::from_moments(&spec.x_moments(2 * max_degree)?, max_degree)?;
    let sy = PolySystem::from_moments(&spec.y_moments(2 * max_degree)?, max_degree)?;
    let rho = lancaster_sequence(&regression_coeffs(spec, max_degree)?, spec.nu())?.rho;

    let x_basis = enlarged_basis(spec, &sx, max_degree, true)?;
    let y_basis = enlarged_basis(spec, &sy, max_degree, false)?;
    let target = |n: usize, k: usize| {
        if n != k {
            0.0
        } else if n == 0 {
            1.0
        } else {
            rho[n - 1]
        }
    };

    let mut residuals = vec![vec![0.0; max_degree + 1]; max_degree + 1];
    if let FamilySpec::FinitePopOrderStats { .. } = spec {
        spec.for_each_joint_atom(|x, y, mass| {
            for (n, xp) in x_basis.iter().enumerate() {
                let fx = horner(xp, x);
                for (k, yp) in y_basis.iter().enumerate() {
                    residuals[n][k] += mass * fx * horner(yp, y);
                }
            }
        })?;
        for (n, row) in residuals.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v -= target(n, k);
            }
        }
    } else {
        for (n, xp) in x_basis.iter().enumerate() {
            for (k, yp) in y_basis.iter().enumerate() {
                let mut cross = 0.0;
                for (u, &cu) in xp.iter().enumerate() {
                    for (v, &cv) in yp.iter().enumerate() {
                        cross += cu * cv * spec.mixed_moment(u, v)?;
                    }
                }
                residuals[n][k] = cross - target(n, k);
            }
        }
    }
    Ok(residuals)
}

/// Largest absolute entry of a residual matrix.
pub fn max_residual(residuals: &[Vec<f64>]) -> f64 {
    residuals
        .iter()
        .flatten()
        .fold(0.0_f64, |m, &v| m.max(v.abs()))
}

/// The orthonormal basis extended past a finite support by monomial
/// multiples of the support annihilator polynomial.
fn enlarged_basis(
    spec: &FamilySpec,
    sys: &PolySystem,
    max_degree: usize,
    x_side: bool,
) -> Result<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = (0..=sys.max_degree().min(max_degree))
        .map(|n| sys.coeffs(n))
        .collect::<Result<_>>()?;
    if basis.len() == max_degree + 1 {
        return Ok(basis);
    }
    let FamilySpec::FinitePopOrderStats { i, j, n, pop } = *spec else {
        return Err(Error::DegreeOutOfRange {
            degree: max_degree,
            cap: sys.max_degree(),
        });
    };
    let lo = if x_side { i } else { j };
    let mut annihilator = vec![1.0];
    for t in 0..(pop - n + 1) {
        annihilator = poly_mul(&annihilator, &[-((lo + t) as f64), 1.0]);
    }
    while basis.len() <= max_degree {
        let shift = basis.len() - (pop - n + 1);
        let mut mono = vec![0.0; shift + 1];
        mono[shift] = 1.0;
        basis.push(poly_mul(&mono, &annihilator));
    }
    Ok(basis)
}
