//! Gaussian quadrature rules built by Golub-Welsch: eigenvalues of the
//! Jacobi matrix give nodes, squared first eigenvector components give
//! weights.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A quadrature rule: `integrate(f)` approximates the integral of f
/// against the rule's weight measure.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Nodes and weights from a symmetric tridiagonal Jacobi matrix with the
/// given diagonal and off-diagonal, scaled so weights sum to `mass`.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mass: f64) -> Result<Rule> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::QuadratureFailure("empty Jacobi matrix".into()));
    }
    let mut j = DMatrix::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        j[(i, i)] = d;
    }
    for (i, &e) in offdiag.iter().enumerate() {
        j[(i, i + 1)] = e;
        j[(i + 1, i)] = e;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// n-point Gauss-Legendre on [-1, 1] (weights sum to 2).
pub fn gauss_legendre(n: usize) -> Result<Rule> {
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&diag, &offdiag, 2.0)
}

/// n-point Gauss-Legendre mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Result<Rule> {
    let base = gauss_legendre(n)?;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    Ok(Rule {
        nodes: base.nodes.iter().map(|&x| mid + half * x).collect(),
        weights: base.weights.iter().map(|&w| half * w).collect(),
    })
}

/// n-point rule exact for polynomial expectations under N(0, 1).
pub fn gauss_hermite_normal(n: usize) -> Result<Rule> {
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let raw = golub_welsch(&diag, &offdiag, 1.0)?;
    Ok(Rule {
        nodes: raw
            .nodes
            .iter()
            .map(|&x| x * std::f64::consts::SQRT_2)
            .collect(),
        weights: raw.weights,
    })
}

/// n-point rule exact for polynomial expectations under Gamma(shape, rate 1).
pub fn gauss_gamma(n: usize, shape: f64) -> Result<Rule> {
    if shape <= 0.0 {
        return Err(Error::QuadratureFailure(format!(
            "gamma rule needs positive shape, got {shape}"
        )));
    }
    let a = shape - 1.0;
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + a)).sqrt()).collect();
    golub_welsch(&diag, &offdiag, 1.0)
}
