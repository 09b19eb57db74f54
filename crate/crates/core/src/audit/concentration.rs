use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ipp::IppSolver;
use crate::learner::{IndexedDataset, RandMarginsParams};
use crate::seed::derive_seed;
use crate::stats::clopper_pearson_upper;

use super::partition::{partition_iterations, NeighboringPair};

pub const MIN_CONCENTRATION_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub trials: usize,
    /// Trials where either run failed; excluded from the tail estimate.
    pub failed_trials: usize,
    pub delta: f64,
    /// `35 ln(1/δ)`.
    pub threshold: f64,
    pub exceedances: u64,
    pub tail_estimate: f64,
    /// One-sided Clopper-Pearson upper bound at 99%.
    pub tail_upper: f64,
    pub mean_e_in: f64,
    /// `histogram[j]` trials had `|E_in| = j`.
    pub histogram: Vec<usize>,
}

/// Paired runs on `S` and `S'` over `trials` seeds `derive_seed(seed, t)`,
/// counting how often `|E_in| > 35 ln(1/δ)`.
pub fn concentration_experiment(
    pair: &NeighboringPair,
    params: &RandMarginsParams,
    solver: &dyn IppSolver,
    trials: usize,
    delta: f64,
    seed: u64,
    exec: Execution,
) -> Result<ConcentrationReport> {
    if trials < MIN_CONCENTRATION_TRIALS {
        return Err(Error::InsufficientTrials {
            got: trials,
            needed: MIN_CONCENTRATION_TRIALS,
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams(format!("delta must lie in (0, 1), got {delta}")));
    }
    let base = IndexedDataset::new(pair.base.positives());
    let prime = base.with_extra(&pair.extra)?;
    let sizes = exec.map(trials, |t| -> Option<usize> {
        let p = params.seeded(derive_seed(seed, t as u64));
        let a = base.rand_margins(&p, solver).ok()?;
        let b = prime.rand_margins(&p, solver).ok()?;
        partition_iterations(&a.trace, &b.trace, &pair.extra)
            .ok()
            .map(|part| part.e_in.len())
    });
    let threshold = 35.0 * (1.0 / delta).ln();
    let ok: Vec<usize> = sizes.iter().flatten().copied().collect();
    let completed = ok.len();
    let exceedances = ok.iter().filter(|&&s| s as f64 > threshold).count() as u64;
    let mut histogram = vec![0usize; ok.iter().copied().max().unwrap_or(0) + 1];
    for &s in &ok {
        histogram[s] += 1;
    }
    let tail_upper = if completed == 0 {
        1.0
    } else {
        clopper_pearson_upper(exceedances, completed as u64, 0.99)?
    };
    Ok(ConcentrationReport {
        trials,
        failed_trials: trials - completed,
        delta,
        threshold,
        exceedances,
        tail_estimate: if completed == 0 { 0.0 } else { exceedances as f64 / completed as f64 },
        tail_upper,
        mean_e_in: if completed == 0 {
            0.0
        } else {
            ok.iter().sum::<usize>() as f64 / completed as f64
        },
        histogram,
    })
}
