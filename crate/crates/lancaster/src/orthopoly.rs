//! Orthonormal polynomial systems built from raw moments.
//!
//! Given the moments m_k = E[X^k] of a distribution, Gram-Schmidt on the
//! monomial basis under the Hankel functional L(x^i x^j) = m_{i+j}
//! produces the unique (up to sign) orthonormal system phi_0, phi_1, ...
//! with positive leading coefficients. Construction, coefficient storage,
//! and evaluation run in double-double arithmetic: the squared monic
//! norms (Hankel pivots) of a compact-support measure decay like
//! (width/4)^(2n), so plain f64 loses orthonormality around degree 10.
//!
//! A distribution supported on s points has rank-s Hankel matrices, so
//! the pivot collapses at degree s. The constructor detects this by the
//! consecutive pivot ratio h_n / h_{n-1}. Smooth measures keep the ratio
//! above ~0.05: on a width-w interval it tends to (w/4)^2 from above
//! (0.0626 at degree 12 for the uniform), and it exceeds 1 for normal
//! and gamma weights. A collapse pivot is exactly zero in exact
//! arithmetic; computed from f64-rounded input moments it lands at
//! eps times the moment scale with arbitrary sign, which keeps the
//! observed ratio below ~1e-6 for every finite support in range. The
//! threshold 1e-4 sits two orders clear of both sides. A ratio clearly
//! beyond it on the negative side is not noise but an indefinite Hankel
//! matrix, so those moments are rejected outright.

use nalgebra::DMatrix;

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Ratio |h_n / h_{n-1}| below which the moment sequence is declared
/// finitely supported (or, if clearly negative, invalid).
const COLLAPSE_RATIO: f64 = 1e-4;

/// An orthonormal polynomial system for one moment sequence.
#[derive(Debug, Clone)]
pub struct PolySystem {
    /// coeffs[n] holds the ascending coefficients of phi_n.
    coeffs: Vec<Vec<Dd>>,
    /// Moments normalized to unit mass, lifted to double-double.
    moments: Vec<Dd>,
    /// Number of support points when rank collapse was detected.
    support_points: Option<usize>,
}

impl PolySystem {
    /// Build the system for degrees 0..=max_degree from raw moments
    /// m_0..m_{2 max_degree}. Construction stops early (without error)
    /// when the moments come from a finitely supported distribution.
    pub fn from_moments(raw_moments: &[f64], max_degree: usize) -> Result<PolySystem> {
        if raw_moments.len() < 2 * max_degree + 1 {
            return Err(Error::InvalidSpec(format!(
                "need {} moments for degree {}, got {}",
                2 * max_degree + 1,
                max_degree,
                raw_moments.len()
            )));
        }
        let m0 = raw_moments[0];
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::DegenerateSupport(format!("total mass {m0}")));
        }
        let moments: Vec<Dd> = raw_moments
            .iter()
            .map(|&m| Dd::from_f64(m) / Dd::from_f64(m0))
            .collect();

        let mut monic: Vec<Vec<Dd>> = vec![vec![Dd::ONE]];
        let mut norms: Vec<Dd> = vec![Dd::ONE];
        let mut support_points = None;

        for n in 1..=max_degree {
            let mut p = vec![Dd::ZERO; n + 1];
            p[n] = Dd::ONE;
            for k in 0..n {
                let c = functional(&moments, &p, &monic[k]) / norms[k];
                for (pj, mj) in p.iter_mut().zip(&monic[k]) {
                    *pj = *pj - c * *mj;
                }
            }
            let h = functional(&moments, &p, &p);
            let ratio = h.to_f64() / norms[n - 1].to_f64();
            if ratio < -COLLAPSE_RATIO {
                return Err(Error::MomentMatrixNotPsd {
                    eigenvalue: h.to_f64(),
                });
            }
            if ratio < COLLAPSE_RATIO {
                support_points = Some(n);
                break;
            }
            monic.push(p);
            norms.push(h);
        }

        let coeffs = monic
            .into_iter()
            .zip(&norms)
            .map(|(p, &h)| {
                let inv = Dd::ONE / h.sqrt();
                p.into_iter().map(|c| c * inv).collect()
            })
            .collect();

        Ok(PolySystem {
            coeffs,
            moments,
            support_points,
        })
    }

    /// Highest constructed degree. Equals the requested degree unless the
    /// distribution has s support points, in which case it is s - 1.
    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of support points, when the moments revealed one.
    pub fn support_points(&self) -> Option<usize> {
        self.support_points
    }

    /// phi_n(x).
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        let c = self.coeffs_dd(n)?;
        let xd = Dd::from_f64(x);
        let mut acc = Dd::ZERO;
        for ck in c.iter().rev() {
            acc = acc * xd + *ck;
        }
        Ok(acc.to_f64())
    }

    /// Ascending coefficients of phi_n as f64.
    pub fn coeffs(&self, n: usize) -> Result<Vec<f64>> {
        Ok(self.coeffs_dd(n)?.iter().map(|c| c.to_f64()).collect())
    }

    fn coeffs_dd(&self, n: usize) -> Result<&[Dd]> {
        self.coeffs
            .get(n)
            .map(|c| c.as_slice())
            .ok_or(Error::DegreeOutOfRange {
                degree: n,
                cap: self.max_degree(),
            })
    }

    /// Largest |E[phi_i phi_j] - delta_ij| over the constructed degrees,
    /// evaluated by exact summation against the moment functional.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.coeffs.len() {
            for j in i..self.coeffs.len() {
                let ip = functional(&self.moments, &self.coeffs[i], &self.coeffs[j]).to_f64();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    /// Coefficients of the polynomial f (ascending f64 coefficients) in
    /// the phi basis: c_n = E[f(X) phi_n(X)].
    pub fn fourier_coeffs(&self, poly: &[f64]) -> Result<Vec<f64>> {
        let deg = poly.len().saturating_sub(1);
        if 2 * deg + 1 > self.moments.len() || deg + self.max_degree() + 1 > self.moments.len() {
            return Err(Error::DegreeOutOfRange {
                degree: deg,
                cap: (self.moments.len() - 1) / 2,
            });
        }
        let f: Vec<Dd> = poly.iter().map(|&c| Dd::from_f64(c)).collect();
        Ok(self
            .coeffs
            .iter()
            .map(|phi| functional(&self.moments, &f, phi).to_f64())
            .collect())
    }

    /// |E[f^2] - sum c_n^2| for a polynomial f: zero exactly when the
    /// constructed system spans f, which completeness guarantees for
    /// deg f <= max_degree (and, on finite supports, for every f).
    pub fn parseval_defect(&self, poly: &[f64]) -> Result<f64> {
        let c = self.fourier_coeffs(poly)?;
        let f: Vec<Dd> = poly.iter().map(|&x| Dd::from_f64(x)).collect();
        let ef2 = functional(&self.moments, &f, &f).to_f64();
        Ok((ef2 - c.iter().map(|x| x * x).sum::<f64>()).abs())
    }

    /// The support points themselves, recovered as eigenvalues of the
    /// truncated Jacobi matrix. Only available after a rank collapse.
    pub fn support_nodes(&self) -> Result<Vec<f64>> {
        let s = self.support_points.ok_or_else(|| {
            Error::DegenerateSupport("support nodes need a detected finite support".into())
        })?;
        let mut j = DMatrix::zeros(s, s);
        for k in 0..s {
            j[(k, k)] = self.functional_x(&self.coeffs[k], &self.coeffs[k]);
            if k + 1 < s {
                let b = self.functional_x(&self.coeffs[k], &self.coeffs[k + 1]);
                j[(k, k + 1)] = b;
                j[(k + 1, k)] = b;
            }
        }
        let mut nodes: Vec<f64> = j.symmetric_eigen().eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        Ok(nodes)
    }

    /// E[X a(X) b(X)] under the moment functional.
    fn functional_x(&self, a: &[Dd], b: &[Dd]) -> f64 {
        let mut acc = Dd::ZERO;
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                acc = acc + *ai * *bj * self.moments[i + j + 1];
            }
        }
        acc.to_f64()
    }
}

/// E[a(X) b(X)] under the moment functional.
fn functional(moments: &[Dd], a: &[Dd], b: &[Dd]) -> Dd {
    let mut acc = Dd::ZERO;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc = acc + *ai * *bj * moments[i + j];
        }
    }
    acc
}
