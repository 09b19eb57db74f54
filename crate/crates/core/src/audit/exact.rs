use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ipp::{exact_pmf_sorted, OracleMedianIpp, SolverKind, EXACT_DOMAIN_LIMIT};
use crate::learner::{NoiseMode, RandMarginsParams};
use crate::model::Dataset;
use crate::noise::{ceil_shifted_laplace_cdf, ceil_shifted_laplace_mass, ceil_shifted_laplace_pmf};

/// Block sizes whose noise mass is below this are dropped from the sum.
const TRUNCATION_MASS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    /// `pmf[v] = Pr[p_1 = v]` for `v` in `0..=domain_max`.
    pub pmf: Vec<f64>,
    /// Noise mass of the block sizes left out; `pmf` sums to one minus this.
    pub truncated_mass: f64,
}

/// Exact law of the single corner RandMargins outputs on one-dimensional
/// input `data` (every row is used).
///
/// Only the rounded block size `k = clamp(⌈μ + w⌉, Δ, n)` matters, and for
/// each `k` the inner block is the ascending sorted window `[n - k, n - k + Δ)`.
pub fn exact_rand_margins_distribution_1d(
    data: &Dataset,
    params: &RandMarginsParams,
    solver: SolverKind,
) -> Result<ExactDistribution> {
    params.ipp.validate()?;
    if data.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "exact audit needs d = 1, got d = {}",
            data.dim()
        )));
    }
    let domain_max = params.ipp.domain_max;
    if domain_max > EXACT_DOMAIN_LIMIT {
        return Err(Error::DomainTooLarge {
            domain_max,
            limit: EXACT_DOMAIN_LIMIT,
        });
    }
    let mut sorted = data.projection(0);
    sorted.sort_unstable();
    if let Some(&v) = sorted.last() {
        if v > domain_max {
            return Err(Error::OutOfDomain {
                axis: 0,
                value: v as u64,
                x_max: domain_max,
            });
        }
    }
    let n = sorted.len() as i64;
    let delta = params.block_size as i64;
    if n < delta {
        return Err(Error::InsufficientData {
            iteration: 0,
            remaining: n as usize,
            needed: delta as usize,
        });
    }
    let mu = params.margin;
    let b = 2.0 * delta as f64;

    // Weights of the clamped block sizes, with a window of interior sizes.
    let mut weights: Vec<(i64, f64)> = Vec::new();
    let mut truncated_mass = 0.0;
    match params.noise {
        NoiseMode::Zero => {
            weights.push(((mu.ceil() as i64).clamp(delta, n), 1.0));
        }
        NoiseMode::Laplace if n == delta => weights.push((delta, 1.0)),
        NoiseMode::Laplace => {
            let reach = b * (1.0 / TRUNCATION_MASS).ln() + 2.0;
            let lo = ((mu - reach).floor() as i64).max(delta + 1);
            let hi = ((mu + reach).ceil() as i64).min(n - 1);
            weights.push((delta, ceil_shifted_laplace_cdf(mu, b, delta)));
            for k in lo..=hi {
                weights.push((k, ceil_shifted_laplace_pmf(mu, b, k)));
            }
            weights.push((n, 1.0 - ceil_shifted_laplace_cdf(mu, b, n - 1)));
            if lo <= hi {
                truncated_mass = ceil_shifted_laplace_mass(mu, b, delta + 1, lo - 1)
                    + ceil_shifted_laplace_mass(mu, b, hi + 1, n - 1);
            } else {
                truncated_mass = ceil_shifted_laplace_mass(mu, b, delta + 1, n - 1);
            }
        }
    }

    let mut pmf = vec![0.0; domain_max as usize + 1];
    for (k, w) in weights {
        if w == 0.0 {
            continue;
        }
        let start = (n - k) as usize;
        let inner = &sorted[start..start + delta as usize];
        match solver {
            SolverKind::ExpMech => {
                let inner_pmf = exact_pmf_sorted(inner, params.ipp.epsilon, domain_max);
                for (acc, p) in pmf.iter_mut().zip(inner_pmf) {
                    *acc += w * p;
                }
            }
            SolverKind::OracleMedian => {
                pmf[OracleMedianIpp::lower_median(inner)? as usize] += w;
            }
        }
    }
    Ok(ExactDistribution {
        pmf,
        truncated_mass,
    })
}
