//! Monte Carlo estimation of plain correlations for the sampling models
//! behind each closed form: order statistics, record values, record
//! streams split after a common prefix, and sampling without replacement
//! from a finite population.
//!
//! Replicates are split into batches, each driven by its own counter-mode
//! RNG stream derived from the request seed, so results are bit-identical
//! across runs and across thread counts. Standard errors come from a
//! leave-one-batch-out jackknife of the pooled correlation.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling model for one simulation request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    OrderStats,
    Records,
    Splitting,
    FinitePop,
}

/// Parent distribution the observations are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parent {
    Uniform,
    Exp,
}

/// Model parameters; which fields are required depends on the model.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    /// Population values for the finite-population model; the population
    /// size is the length of this list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

/// One simulation request, as accepted on the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimRequest {
    pub model: Model,
    /// Ignored by the finite-population model, which samples the given
    /// values directly.
    pub parent: Parent,
    pub params: Params,
    pub replicates: usize,
    pub seed: u64,
}

/// Pooled correlation estimate with its jackknife standard error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimEstimate {
    pub corr_hat: f64,
    pub stderr: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Run a simulation request.
pub fn run(request: &SimRequest) -> Result<SimEstimate> {
    if request.replicates < 4 {
        return Err(Error::InvalidSpec(format!(
            "need at least 4 replicates, got {}",
            request.replicates
        )));
    }
    let p = &request.params;
    match request.model {
        Model::OrderStats => {
            let (i, j, n) = (need(p.i, "i")?, need(p.j, "j")?, need(p.n, "n")?);
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::InvalidSpec(format!(
                    "order statistics need 1 <= i < j <= n, got i={i}, j={j}, n={n}"
                )));
            }
            let parent = request.parent;
            simulate_pairs(request, move |rng| sample_order_stats(rng, i, j, n, parent))
        }
        Model::Records => {
            let (n, m) = (need(p.n, "n")?, need(p.m, "m")?);
            if n < 1 || m < 1 {
                return Err(Error::InvalidSpec(format!(
                    "records need n >= 1 and m >= 1, got n={n}, m={m}"
                )));
            }
            let parent = request.parent;
            simulate_pairs(request, move |rng| {
                let t_a = exp_sum(rng, n);
                let t_b = t_a + exp_sum(rng, m);
                (record_value(parent, t_a), record_value(parent, t_b))
            })
        }
        Model::Splitting => {
            let (n, n1, n2) = (need(p.n, "n")?, need(p.n1, "n1")?, need(p.n2, "n2")?);
            if n < 1 {
                return Err(Error::InvalidSpec("splitting needs n >= 1".into()));
            }
            let parent = request.parent;
            simulate_pairs(request, move |rng| {
                let shared = exp_sum(rng, n);
                let t_a = shared + exp_sum(rng, n1);
                let t_b = shared + exp_sum(rng, n2);
                (record_value(parent, t_a), record_value(parent, t_b))
            })
        }
        Model::FinitePop => {
            let (i, j, n) = (need(p.i, "i")?, need(p.j, "j")?, need(p.n, "n")?);
            let values = p
                .values
                .clone()
                .ok_or_else(|| Error::InvalidSpec("finite-pop needs `values`".into()))?;
            let pop = values.len();
            if !(1 <= i && i < j && j <= n && n <= pop) {
                return Err(Error::InvalidSpec(format!(
                    "finite population needs 1 <= i < j <= n <= N, got i={i}, j={j}, n={n}, N={pop}"
                )));
            }
            simulate_pairs(request, move |rng| {
                sample_finite_pop(rng, i, j, n, &values)
            })
        }
    }
}

fn need(v: Option<usize>, name: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidSpec(format!("missing parameter `{name}`")))
}

fn exp_sum(rng: &mut ChaCha8Rng, count: usize) -> f64 {
    (0..count)
        .map(|_| {
            let draw: f64 = Exp1.sample(rng);
            draw
        })
        .sum()
}

/// Record values of any parent are the exponential record values pushed
/// through the parent quantile function, since records are preserved by
/// increasing transforms and exponential records are partial sums of
/// standard exponentials.
fn record_value(parent: Parent, t: f64) -> f64 {
    match parent {
        Parent::Exp => t,
        Parent::Uniform => -(-t).exp_m1(),
    }
}

fn parent_draw(rng: &mut ChaCha8Rng, parent: Parent) -> f64 {
    match parent {
        Parent::Uniform => rng.gen::<f64>(),
        Parent::Exp => Exp1.sample(rng),
    }
}

fn sample_order_stats(rng: &mut ChaCha8Rng, i: usize, j: usize, n: usize, parent: Parent) -> (f64, f64) {
    let mut draws: Vec<f64> = (0..n).map(|_| parent_draw(rng, parent)).collect();
    draws.sort_by(|a, b| a.total_cmp(b));
    (draws[i - 1], draws[j - 1])
}

/// Draw n of the population values without replacement (partial
/// Fisher-Yates) and return the i-th and j-th smallest of the sample.
fn sample_finite_pop(rng: &mut ChaCha8Rng, i: usize, j: usize, n: usize, values: &[f64]) -> (f64, f64) {
    let pop = values.len();
    let mut idx: Vec<usize> = (0..pop).collect();
    for k in 0..n {
        let pick = k + rng.gen_range(0..pop - k);
        idx.swap(k, pick);
    }
    let mut sample: Vec<f64> = idx[..n].iter().map(|&t| values[t]).collect();
    sample.sort_by(|a, b| a.total_cmp(b));
    (sample[i - 1], sample[j - 1])
}

#[derive(Clone, Copy, Default)]
struct Sums {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Sums {
    fn add(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    fn merge(mut self, other: &Sums) -> Sums {
        self.n += other.n;
        self.sx += other.sx;
        self.sy += other.sy;
        self.sxx += other.sxx;
        self.syy += other.syy;
        self.sxy += other.sxy;
        self
    }

    fn corr(&self) -> Option<f64> {
        let vx = self.sxx - self.sx * self.sx / self.n;
        let vy = self.syy - self.sy * self.sy / self.n;
        let cxy = self.sxy - self.sx * self.sy / self.n;
        if vx <= 0.0 || vy <= 0.0 {
            return None;
        }
        Some(cxy / (vx * vy).sqrt())
    }
}

/// Batched simulation driver: batch b runs on stream b + 1 of a ChaCha
/// generator seeded from the request seed, batches are pooled in index
/// order, and the standard error is the leave-one-batch-out jackknife of
/// the pooled correlation.
fn simulate_pairs<F>(request: &SimRequest, sample: F) -> Result<SimEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> (f64, f64) + Sync,
{
    let replicates = request.replicates;
    let batches = 100.min(2.max(replicates / 2));
    let base = replicates / batches;
    let extra = replicates % batches;

    let batch_sums: Vec<Sums> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(request.seed);
            rng.set_stream(b as u64 + 1);
            let size = base + usize::from(b < extra);
            let mut sums = Sums::default();
            for _ in 0..size {
                let (x, y) = sample(&mut rng);
                sums.add(x, y);
            }
            sums
        })
        .collect();

    let total = batch_sums
        .iter()
        .fold(Sums::default(), |acc, s| acc.merge(s));
    let corr_hat = total.corr().ok_or_else(|| {
        Error::DegenerateVariance("simulated coordinates have zero variance".into())
    })?;

    let mut leave_out = Vec::with_capacity(batches);
    for b in 0..batches {
        let mut rest = Sums::default();
        for (k, s) in batch_sums.iter().enumerate() {
            if k != b {
                rest = rest.merge(s);
            }
        }
        let r = rest.corr().ok_or_else(|| {
            Error::DegenerateVariance(
                "a leave-one-batch-out correlation is undefined".into(),
            )
        })?;
        leave_out.push(r);
    }
    let bf = batches as f64;
    let mean: f64 = leave_out.iter().sum::<f64>() / bf;
    let var: f64 = leave_out.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() * (bf - 1.0) / bf;
    Ok(SimEstimate {
        corr_hat,
        stderr: var.sqrt(),
        replicates,
        seed: request.seed,
    })
}
