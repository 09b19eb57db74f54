//! Learning benchmarks: many seeded trials per sweep point.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;
use crate::ipp::IppSolver;
use crate::learner::{
    baseline_composition_learner, learn_rectangle, required_sample_size, variant_learner, RandMarginsParams,
    SampleSizeConstants,
};
use crate::model::{empirical_error, Hypothesis};
use crate::seed::{derive_seed, rng_from_seed};
use crate::stats::clopper_pearson;

use super::config::{ExperimentConfig, LearnerKind};
use super::generate::Population;

/// One trial. Column order here is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub learner: LearnerKind,
    pub d: usize,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub empirical_error: Option<f64>,
    pub generalization_error: Option<f64>,
    /// `generalization_error > alpha`, or the trial errored.
    pub failure: bool,
    pub empty_hypothesis: Option<bool>,
    pub removed_total: Option<usize>,
    pub max_clamped_size: Option<usize>,
    pub clamp_events: Option<usize>,
    pub solver_failures: Option<usize>,
    pub fallback: Option<String>,
    pub error: Option<String>,
}

impl ResultRecord {
    pub const COLUMNS: [&'static str; 16] = [
        "config_hash",
        "learner",
        "d",
        "n",
        "trial",
        "seed",
        "empirical_error",
        "generalization_error",
        "failure",
        "empty_hypothesis",
        "removed_total",
        "max_clamped_size",
        "clamp_events",
        "solver_failures",
        "fallback",
        "error",
    ];
}

/// Aggregate over the trials of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub learner: LearnerKind,
    pub d: usize,
    pub n: usize,
    pub trials: usize,
    pub errored: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub failure_rate: f64,
    /// Two-sided 99% Clopper-Pearson interval for the failure rate.
    pub failure_ci: (f64, f64),
    pub clamp_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOutput {
    pub config_hash: String,
    pub records: Vec<ResultRecord>,
    pub points: Vec<PointSummary>,
    /// Sweep points where the mean error grew with `n` by more than three
    /// standard errors.
    pub flags: Vec<String>,
}

/// Seed of the sample at `(d, n, trial)`; shared by all learners so sweep
/// comparisons are paired.
pub fn sample_seed(master: u64, d: usize, n: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(derive_seed(master, d as u64), n as u64), trial as u64)
}

fn sample_sizes(config: &ExperimentConfig, d: usize, solver: &dyn IppSolver) -> Result<Vec<usize>> {
    if !config.sweep.n.is_empty() {
        return Ok(config.sweep.n.clone());
    }
    match config.n {
        Some(n) => Ok(vec![n]),
        None => Ok(vec![required_sample_size(
            config.alpha,
            &config.ipp()?,
            d,
            solver,
            SampleSizeConstants::default(),
        )?]),
    }
}

fn run_trial(
    config: &ExperimentConfig,
    config_hash: &str,
    population: &Population,
    learner: LearnerKind,
    solver: &dyn IppSolver,
    n: usize,
    trial: usize,
) -> ResultRecord {
    let d = population.domain().d;
    let seed = sample_seed(config.seed, d, n, trial);
    let mut record = ResultRecord {
        config_hash: config_hash.to_string(),
        learner,
        d,
        n,
        trial,
        seed,
        empirical_error: None,
        generalization_error: None,
        failure: true,
        empty_hypothesis: None,
        removed_total: None,
        max_clamped_size: None,
        clamp_events: None,
        solver_failures: None,
        fallback: None,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let ipp = config.ipp()?;
        let sample = population.sample(n, &mut rng_from_seed(seed))?;
        let learner_seed = derive_seed(seed, 1);
        let hypothesis = match learner {
            LearnerKind::RandMargins => {
                let params = RandMarginsParams::new(ipp, solver, learner_seed)?;
                let out = learn_rectangle(&sample, &params, solver)?;
                if let Some(run) = &out.run {
                    record.removed_total = Some(run.trace.removed_total());
                    record.max_clamped_size = Some(run.trace.max_clamped_size());
                    record.clamp_events = Some(run.trace.clamp_events());
                    record.solver_failures = Some(run.trace.solver_failures());
                }
                if let Some(f) = &out.fallback {
                    record.fallback = Some(serde_json::to_string(f)?);
                }
                out.hypothesis
            }
            LearnerKind::Baseline => baseline_composition_learner(&sample, &ipp, solver, learner_seed)?.hypothesis,
            LearnerKind::Failed1 | LearnerKind::Failed2 => {
                let variant = learner.variant().expect("variant learner");
                variant_learner(&sample, &ipp, solver, variant, learner_seed, None)?.hypothesis
            }
        };
        record.empty_hypothesis = Some(matches!(hypothesis, Hypothesis::Empty { .. }));
        record.empirical_error = Some(empirical_error(&hypothesis, &sample)?.ratio());
        let gen = population.generalization_error(&hypothesis)?;
        record.generalization_error = Some(gen);
        record.failure = gen > config.alpha;
        Ok(())
    })();
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
        record.failure = true;
    }
    record
}

fn summarize(records: &[ResultRecord]) -> Result<PointSummary> {
    let first = &records[0];
    let errs: Vec<f64> = records.iter().filter_map(|r| r.generalization_error).collect();
    let trials = records.len();
    let failures = records.iter().filter(|r| r.failure).count();
    let mean = crate::stats::mean(&errs);
    let std = if errs.len() > 1 { crate::stats::variance(&errs).sqrt() } else { 0.0 };
    let clamp: Vec<usize> = records.iter().filter_map(|r| r.clamp_events).collect();
    Ok(PointSummary {
        learner: first.learner,
        d: first.d,
        n: first.n,
        trials,
        errored: records.iter().filter(|r| r.error.is_some()).count(),
        mean_error: mean,
        std_error: std,
        failure_rate: failures as f64 / trials as f64,
        failure_ci: clopper_pearson(failures as u64, trials as u64, 0.99)?,
        clamp_rate: if clamp.is_empty() {
            None
        } else {
            Some(clamp.iter().filter(|&&c| c > 0).count() as f64 / clamp.len() as f64)
        },
    })
}

fn monotonicity_flags(points: &[PointSummary]) -> Vec<String> {
    let mut flags = Vec::new();
    for a in points {
        for b in points {
            if a.learner == b.learner && a.d == b.d && a.n < b.n {
                let se = (a.std_error.powi(2) / a.trials as f64 + b.std_error.powi(2) / b.trials as f64).sqrt();
                if b.mean_error > a.mean_error + 3.0 * se {
                    flags.push(format!(
                        "{} d={}: mean error {:.4} at n={} exceeds {:.4} at n={}",
                        a.learner.name(),
                        a.d,
                        b.mean_error,
                        b.n,
                        a.mean_error,
                        a.n
                    ));
                }
            }
        }
    }
    flags
}

/// Runs every `(d, n, learner)` point of the sweep for `config.trials`
/// trials. Learner errors are recorded in the trial's record and never stop
/// the sweep.
pub fn run_learning_benchmark(config: &ExperimentConfig, exec: Execution) -> Result<BenchOutput> {
    config.validate()?;
    let config_hash = config.hash();
    let solver = config.solver.build();
    let mut records = Vec::new();
    let mut points = Vec::new();
    for d in config.dims() {
        let population = Population::from_config(config, d)?;
        for n in sample_sizes(config, d, solver.as_ref())? {
            for learner in config.learners() {
                let batch = exec.map(config.trials, |t| {
                    run_trial(config, &config_hash, &population, learner, solver.as_ref(), n, t)
                });
                points.push(summarize(&batch)?);
                records.extend(batch);
            }
        }
    }
    let flags = monotonicity_flags(&points);
    Ok(BenchOutput {
        config_hash,
        records,
        points,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::DistributionSpec;
    use crate::experiments::config::{OutputSpec, SweepSpec, TargetSpec};
    use crate::ipp::SolverKind;

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            x_max: 1023,
            d: 2,
            target: TargetSpec::Uniform(600),
            distribution: DistributionSpec::TargetUniform { inside: 0.7 },
            learner: LearnerKind::RandMargins,
            solver: SolverKind::ExpMech,
            epsilon: 1.0,
            delta: 1e-6,
            alpha: 0.1,
            beta: 0.1,
            trials: 8,
            seed: 3,
            n: Some(4000),
            sweep: SweepSpec::default(),
            output: OutputSpec::default(),
        }
    }

    #[test]
    fn alpha_one_never_fails() {
        let mut c = config();
        c.alpha = 1.0;
        let out = run_learning_benchmark(&c, Execution::default()).unwrap();
        assert_eq!(out.points[0].failure_rate, 0.0);
        assert!(out.records.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn errors_are_recorded_not_raised() {
        let mut c = config();
        c.n = Some(50);
        c.sweep.learners = vec![LearnerKind::Baseline, LearnerKind::RandMargins];
        let out = run_learning_benchmark(&c, Execution::default()).unwrap();
        assert_eq!(out.records.len(), 16);
        let baseline: Vec<_> = out.records.iter().filter(|r| r.learner == LearnerKind::Baseline).collect();
        assert!(baseline.iter().all(|r| r.error.is_some() && r.failure));
        // RandMargins falls back to the empty hypothesis instead.
        let rm: Vec<_> = out.records.iter().filter(|r| r.learner == LearnerKind::RandMargins).collect();
        assert!(rm.iter().all(|r| r.error.is_none() && r.fallback.is_some()));
    }

    #[test]
    fn failure_rate_is_mean_of_indicators() {
        let mut c = config();
        c.sweep.n = vec![1000, 4000];
        let out = run_learning_benchmark(&c, Execution::default()).unwrap();
        for p in &out.points {
            let hits = out.records.iter().filter(|r| r.n == p.n && r.failure).count();
            assert_eq!(p.failure_rate, hits as f64 / p.trials as f64);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = config();
        let a = run_learning_benchmark(&c, Execution::Sequential).unwrap();
        let b = run_learning_benchmark(&c, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
