use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ipp::IppSolver;
use crate::learner::{IndexedDataset, PrivacyBudget, RandMarginsParams};
use crate::model::Hypothesis;
use crate::seed::derive_seed;
use crate::stats::{clopper_pearson_lower, clopper_pearson_upper};

use super::partition::NeighboringPair;

pub const MIN_MC_TRIALS: usize = 100;
const PILOT_STREAM: u64 = 0x5049_4c4f_5400_0000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: usize,
    /// Family-wise confidence of the reported lower bound.
    pub confidence: f64,
    /// Thresholds per axis, picked as quantiles of a separate pilot sample.
    pub max_thresholds: usize,
    pub pilot_trials: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            confidence: 0.99,
            max_thresholds: 64,
            pilot_trials: trials.min(1000),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub trials: usize,
    pub events: usize,
    /// Largest lower confidence bound on the privacy loss over all events.
    pub epsilon_lower: f64,
    /// Largest plug-in estimate over all events.
    pub epsilon_point: f64,
    /// The event attaining `epsilon_lower`.
    pub witness: Option<String>,
    pub claimed_epsilon: f64,
    pub claimed_delta: f64,
    pub violation: bool,
}

/// Output coordinates, with the empty hypothesis mapped to `-1` on every axis.
fn encode(h: &Hypothesis) -> Vec<i64> {
    match h {
        Hypothesis::Empty { d } => vec![-1; *d],
        Hypothesis::Rectangle(r) => r.corner.iter().map(|&c| c as i64).collect(),
    }
}

fn outputs(
    data: &IndexedDataset,
    params: &RandMarginsParams,
    solver: &dyn IppSolver,
    trials: usize,
    seed_of: impl Fn(usize) -> u64 + Sync + Send,
    exec: Execution,
) -> Result<Vec<Vec<i64>>> {
    exec.map(trials, |t| {
        data.learn(&params.seeded(seed_of(t)), solver)
            .map(|out| encode(&out.hypothesis))
    })
    .into_iter()
    .collect()
}

fn per_axis_sorted(outs: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    (0..d)
        .map(|i| {
            let mut col: Vec<i64> = outs.iter().map(|o| o[i]).collect();
            col.sort_unstable();
            col
        })
        .collect()
}

/// Empirical lower bound on the privacy loss of the learner between `S` and
/// `S'`, from threshold events `{p_i <= t}` and `{p_i > t}` in both
/// directions.
///
/// For events `F` and direction `(A, B)` the bound is
/// `ln((lo(Pr[M(A) ∈ F]) - δ̃) / hi(Pr[M(B) ∈ F]))` with Clopper-Pearson
/// bounds Bonferroni-corrected over all events. Runs on `S` use seeds
/// `derive_seed(seed, 2t)` and runs on `S'` use `derive_seed(seed, 2t + 1)`.
pub fn monte_carlo_privacy_lower_bound(
    pair: &NeighboringPair,
    params: &RandMarginsParams,
    solver: &dyn IppSolver,
    config: &McConfig,
    budget: &PrivacyBudget,
    exec: Execution,
) -> Result<McReport> {
    if config.trials < MIN_MC_TRIALS {
        return Err(Error::InsufficientTrials {
            got: config.trials,
            needed: MIN_MC_TRIALS,
        });
    }
    let d = pair.base.dim();
    let base = IndexedDataset::new(pair.base.positives());
    let prime = if pair.extra.label {
        base.with_extra(&pair.extra)?
    } else {
        base.clone()
    };

    let pilot_seed = derive_seed(config.seed, PILOT_STREAM);
    let mut pilot = outputs(&base, params, solver, config.pilot_trials, |t| derive_seed(pilot_seed, 2 * t as u64), exec)?;
    pilot.extend(outputs(&prime, params, solver, config.pilot_trials, |t| {
        derive_seed(pilot_seed, 2 * t as u64 + 1)
    }, exec)?);
    let thresholds: Vec<Vec<i64>> = per_axis_sorted(&pilot, d)
        .into_iter()
        .map(|mut col| {
            col.dedup();
            // Thresholds at the top value give trivial events.
            col.pop();
            let m = config.max_thresholds.max(1);
            if col.len() <= m {
                col
            } else {
                let mut picked: Vec<i64> = (0..m).map(|j| col[j * col.len() / m]).collect();
                picked.dedup();
                picked
            }
        })
        .collect();

    let seed = config.seed;
    let outs_s = outputs(&base, params, solver, config.trials, |t| derive_seed(seed, 2 * t as u64), exec)?;
    let outs_p = outputs(&prime, params, solver, config.trials, |t| derive_seed(seed, 2 * t as u64 + 1), exec)?;
    let cols_s = per_axis_sorted(&outs_s, d);
    let cols_p = per_axis_sorted(&outs_p, d);

    let events: usize = thresholds.iter().map(|t| 2 * t.len()).sum();
    let tests = (2 * events).max(1);
    let level = 1.0 - (1.0 - config.confidence) / (2.0 * tests as f64);
    let n = config.trials as u64;
    let delta = budget.delta_total;
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_point = f64::NEG_INFINITY;
    let mut witness = None;
    for axis in 0..d {
        for &t in &thresholds[axis] {
            let le_s = cols_s[axis].partition_point(|&v| v <= t) as u64;
            let le_p = cols_p[axis].partition_point(|&v| v <= t) as u64;
            let cases = [
                ("<=", le_s, le_p),
                (">", n - le_s, n - le_p),
            ];
            for (op, c_s, c_p) in cases {
                for (dir, c1, c2) in [("S vs S'", c_s, c_p), ("S' vs S", c_p, c_s)] {
                    let lo1 = clopper_pearson_lower(c1, n, level)?;
                    let hi2 = clopper_pearson_upper(c2, n, level)?;
                    let lower = if lo1 > delta { ((lo1 - delta) / hi2).ln() } else { f64::NEG_INFINITY };
                    let p1 = c1 as f64 / n as f64 - delta;
                    let point = if p1 <= 0.0 {
                        f64::NEG_INFINITY
                    } else if c2 == 0 {
                        f64::INFINITY
                    } else {
                        (p1 / (c2 as f64 / n as f64)).ln()
                    };
                    best_point = best_point.max(point);
                    if lower > best_lower {
                        best_lower = lower;
                        witness = Some(format!("{dir}: p_{} {op} {t}", axis + 1));
                    }
                }
            }
        }
    }
    Ok(McReport {
        trials: config.trials,
        events,
        epsilon_lower: best_lower,
        epsilon_point: best_point,
        witness,
        claimed_epsilon: budget.epsilon_total,
        claimed_delta: delta,
        violation: best_lower > budget.epsilon_total,
    })
}
