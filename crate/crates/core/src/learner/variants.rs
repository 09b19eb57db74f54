//! Two deletion-based constructions that look private but are not: fixed-size
//! blocks with deletion, and noisy-size blocks with deletion. Kept to measure
//! how far one extra point propagates through their executions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ipp::{IppParams, IppSolver};
use crate::model::{Dataset, Hypothesis, LabeledExample, OriginRectangle};
use crate::noise::Laplace;
use crate::seed::iteration_rng;

use super::survivors::{ScanSurvivors, Survivors};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `|A_i| = |B_i| = n`.
    Failed1,
    /// `|A_i|, |B_i| = ⌈2n + Lap(n)⌉`, clamped to the available data.
    Failed2,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "failed_1" | "failed-1" => Ok(Variant::Failed1),
            "failed_2" | "failed-2" => Ok(Variant::Failed2),
            other => Err(Error::Parse(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantIteration {
    pub axis: usize,
    /// Ids of the lowest block, lowest first.
    pub low_ids: Vec<usize>,
    /// Ids of the highest block, highest first.
    pub high_ids: Vec<usize>,
    pub lower: u32,
    pub upper: u32,
    pub survivors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantRun {
    pub variant: Variant,
    /// Origin rectangle with corner `upper`.
    pub hypothesis: Hypothesis,
    pub lower: Vec<u32>,
    pub upper: Vec<u32>,
    pub iterations: Vec<VariantIteration>,
}

impl VariantRun {
    pub fn sizes(&self) -> Vec<(usize, usize)> {
        self.iterations
            .iter()
            .map(|it| (it.low_ids.len(), it.high_ids.len()))
            .collect()
    }
}

/// Runs `variant` on the positives of `sample`. Ids in the result index the
/// positives in their original order. `forced_sizes` overrides the block sizes
/// per axis.
pub fn variant_learner(
    sample: &Dataset,
    ipp: &IppParams,
    solver: &dyn IppSolver,
    variant: Variant,
    seed: u64,
    forced_sizes: Option<&[(usize, usize)]>,
) -> Result<VariantRun> {
    let positives = sample.positives();
    run_variant(&positives, ScanSurvivors::new(&positives), ipp, solver, variant, seed, forced_sizes)
}

pub(crate) fn run_variant<S: Survivors>(
    positives: &Dataset,
    mut survivors: S,
    ipp: &IppParams,
    solver: &dyn IppSolver,
    variant: Variant,
    seed: u64,
    forced_sizes: Option<&[(usize, usize)]>,
) -> Result<VariantRun> {
    ipp.validate()?;
    let d = positives.dim();
    if let Some(f) = forced_sizes {
        if f.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: f.len(),
            });
        }
    }
    let n = solver.sample_complexity(ipp);
    let lap = Laplace::centered(n as f64)?;
    let mut iterations = Vec::with_capacity(d);
    for axis in 0..d {
        let remaining = survivors.len();
        let (low, high) = match (forced_sizes, variant) {
            (Some(f), _) => f[axis],
            (None, Variant::Failed1) => (n, n),
            (None, Variant::Failed2) => {
                let draw = |stream| {
                    let w = lap.sample(&mut iteration_rng(seed, axis, stream));
                    (2.0 * n as f64 + w).ceil().max(0.0) as usize
                };
                let low = draw(0).clamp(n, remaining.saturating_sub(n).max(n));
                let high = draw(1).clamp(n, remaining.saturating_sub(low).max(n));
                (low, high)
            }
        };
        if low < n || high < n || low + high > remaining {
            return Err(Error::InsufficientData {
                iteration: axis,
                remaining,
                needed: low.max(n) + high.max(n),
            });
        }
        let low_ids = survivors.bottom_block(axis, low);
        survivors.remove_ids(&low_ids);
        let high_ids = survivors.top_block(axis, high);
        survivors.remove_ids(&high_ids);
        let values = |ids: &[usize]| -> Vec<u32> {
            ids.iter().map(|&id| positives.coord(id, axis)).collect()
        };
        let lower = solver.solve(&values(&low_ids), ipp, &mut iteration_rng(seed, axis, 2))?;
        let upper = solver.solve(&values(&high_ids), ipp, &mut iteration_rng(seed, axis, 3))?;
        iterations.push(VariantIteration {
            axis,
            low_ids,
            high_ids,
            lower,
            upper,
            survivors: survivors.len(),
        });
    }
    let lower: Vec<u32> = iterations.iter().map(|it| it.lower).collect();
    let upper: Vec<u32> = iterations.iter().map(|it| it.upper).collect();
    Ok(VariantRun {
        variant,
        hypothesis: OriginRectangle::new(upper.clone()).into(),
        lower,
        upper,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    /// Iterations whose low or high block differs between the two runs.
    pub divergent_iterations: Vec<usize>,
    pub domino_length: usize,
}

fn same_set(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Compares blocks of two runs whose shared ids coincide.
pub fn compare_runs(run: &VariantRun, run_prime: &VariantRun) -> DivergenceReport {
    let divergent_iterations: Vec<usize> = run
        .iterations
        .iter()
        .zip(&run_prime.iterations)
        .filter(|(a, b)| !same_set(&a.low_ids, &b.low_ids) || !same_set(&a.high_ids, &b.high_ids))
        .map(|(a, _)| a.axis)
        .collect();
    DivergenceReport {
        domino_length: divergent_iterations.len(),
        divergent_iterations,
    }
}

/// Paired-seed runs on `sample` and `sample ∪ {extra}`.
pub fn divergence_report(
    sample: &Dataset,
    extra: &LabeledExample,
    ipp: &IppParams,
    solver: &dyn IppSolver,
    variant: Variant,
    seed: u64,
) -> Result<DivergenceReport> {
    let run = variant_learner(sample, ipp, solver, variant, seed, None)?;
    let run_prime = variant_learner(&sample.appended(extra)?, ipp, solver, variant, seed, None)?;
    Ok(compare_runs(&run, &run_prime))
}

/// The size map that tries to synchronize a run on `S'` with one on `S`: at
/// the first iteration where the extra point (positive id `extra_id`) enters
/// a block of `run_prime`, shrink that block by one.
pub fn synchronizing_sizes(run_prime: &VariantRun, extra_id: usize) -> Vec<(usize, usize)> {
    let mut sizes = run_prime.sizes();
    for (it, size) in run_prime.iterations.iter().zip(sizes.iter_mut()) {
        if it.low_ids.contains(&extra_id) {
            size.0 -= 1;
            break;
        }
        if it.high_ids.contains(&extra_id) {
            size.1 -= 1;
            break;
        }
    }
    sizes
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionDemo {
    /// Two distinct size vectors for the run on `S'`.
    pub sizes_prime: [Vec<(usize, usize)>; 2],
    /// Their images under [`synchronizing_sizes`].
    pub mapped: [Vec<(usize, usize)>; 2],
    /// Whether each mapped run on `S` differs from its `S'` run in exactly
    /// one block.
    pub synchronized: [bool; 2],
    pub collision: bool,
}

/// Two-dimensional instance where the synchronizing map sends two different
/// `S'` size vectors to the same `S` size vector: `copies` each of `(2, 0)`
/// and `(0, 2)`, then `bulk` copies of `(0, 0)`, and extra point `(1, 1)`.
/// Low blocks hold one point; the `S'` high-block sizes are
/// `(copies + 1, copies)` and `(copies, copies + 1)`.
pub fn collision_demo(copies: usize, bulk: usize) -> Result<CollisionDemo> {
    let domain = crate::model::GridDomain::new(2, 2)?;
    let points = std::iter::repeat_n(vec![2, 0], copies)
        .chain(std::iter::repeat_n(vec![0, 2], copies))
        .chain(std::iter::repeat_n(vec![0, 0], bulk));
    let s = Dataset::positives_from_points(domain, points)?;
    let extra = LabeledExample::positive(vec![1, 1]);
    let s_prime = s.appended(&extra)?;
    let extra_id = s.len();
    let solver = crate::ipp::OracleMedianIpp;
    let ipp = IppParams::new(1.0, 0.0, 0.1, 2)?;
    let low = 1;
    let sizes_prime = [
        vec![(low, copies + 1), (low, copies)],
        vec![(low, copies), (low, copies + 1)],
    ];
    let mut mapped: [Vec<(usize, usize)>; 2] = Default::default();
    let mut synchronized = [false; 2];
    for k in 0..2 {
        let run_prime = variant_learner(&s_prime, &ipp, &solver, Variant::Failed2, 0, Some(&sizes_prime[k]))?;
        mapped[k] = synchronizing_sizes(&run_prime, extra_id);
        let run = variant_learner(&s, &ipp, &solver, Variant::Failed2, 0, Some(&mapped[k]))?;
        let differing: usize = run
            .iterations
            .iter()
            .zip(&run_prime.iterations)
            .map(|(a, b)| {
                (!same_set(&a.low_ids, &b.low_ids)) as usize
                    + (!same_set(&a.high_ids, &b.high_ids)) as usize
            })
            .sum();
        synchronized[k] = differing == 1;
    }
    Ok(CollisionDemo {
        collision: sizes_prime[0] != sizes_prime[1] && mapped[0] == mapped[1],
        sizes_prime,
        mapped,
        synchronized,
    })
}
