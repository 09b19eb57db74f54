use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ipp::{IppParams, IppSolver};
use crate::model::{Dataset, Hypothesis, LabeledExample, OriginRectangle};
use crate::noise::Laplace;
use crate::seed::iteration_rng;

use super::survivors::{IndexedSurvivors, ScanSurvivors, SortedAxes, Survivors};
use super::variants::{run_variant, Variant, VariantRun};

/// Source of the block-size noise `w_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    #[default]
    Laplace,
    /// `w_i = 0`. Not private; for hand-checkable debugging runs.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandMarginsParams {
    pub ipp: IppParams,
    /// `Δ`, the number of points handed to the interior-point solver.
    pub block_size: usize,
    /// `μ = 4 Δ ln(1/β)`, the expected top-block size.
    pub margin: f64,
    pub seed: u64,
    pub noise: NoiseMode,
    /// Return the empty hypothesis instead of failing when data runs out.
    pub fallback: bool,
}

impl RandMarginsParams {
    /// `Δ` from the solver's sample complexity.
    pub fn new(ipp: IppParams, solver: &dyn IppSolver, seed: u64) -> Result<Self> {
        ipp.validate()?;
        Self::with_block_size(ipp, solver.sample_complexity(&ipp), seed)
    }

    pub fn with_block_size(ipp: IppParams, block_size: usize, seed: u64) -> Result<Self> {
        ipp.validate()?;
        if block_size == 0 {
            return Err(Error::InvalidParams("block size must be at least 1".into()));
        }
        Ok(Self {
            ipp,
            block_size,
            margin: 4.0 * block_size as f64 * (1.0 / ipp.beta).ln(),
            seed,
            noise: NoiseMode::Laplace,
            fallback: true,
        })
    }

    pub fn seeded(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn noise_mode(self, noise: NoiseMode) -> Self {
        Self { noise, ..self }
    }

    pub fn fallback(self, fallback: bool) -> Self {
        Self { fallback, ..self }
    }

    /// Positives needed before [`learn_rectangle`] attempts a run:
    /// `Δ + ⌈6 Δ ln(1/β)⌉`.
    pub fn working_threshold(&self) -> usize {
        let d = self.block_size as f64;
        self.block_size + (6.0 * d * (1.0 / self.ipp.beta).ln()).ceil() as usize
    }

    fn trace_params(&self) -> TraceParams {
        TraceParams {
            epsilon: self.ipp.epsilon,
            delta: self.ipp.delta,
            beta: self.ipp.beta,
            domain_max: self.ipp.domain_max,
            block_size: self.block_size,
            margin: self.margin,
            noise: self.noise,
        }
    }
}

/// End-to-end privacy of RandMargins run with a per-call `(ε, δ)` solver in
/// dimension `d`: `ε̃ = 70 ε ln(1/δ)`, `δ̃ = (d + 2) δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_total: f64,
    pub delta_total: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64, d: usize) -> Self {
        Self {
            epsilon,
            delta,
            epsilon_total: 70.0 * epsilon * (1.0 / delta).ln(),
            delta_total: (d as f64 + 2.0) * delta,
        }
    }
}

/// One loop iteration. Id lists refer to rows of the input dataset;
/// `block_ids` is ordered highest rank first and `inner_ids` is its tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub axis: usize,
    pub noise: f64,
    pub raw_size: i64,
    pub clamped_size: usize,
    pub clamp_event: bool,
    pub block_ids: Vec<usize>,
    pub inner_ids: Vec<usize>,
    pub inner_min: u32,
    pub inner_max: u32,
    pub corner: u32,
    pub solver_success: bool,
    pub removed_ids: Vec<usize>,
    pub removed_count: usize,
    /// Removed points lying exactly on `corner`; `h_p` labels them positive.
    pub boundary_removed: usize,
    pub survivors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub domain_max: u32,
    pub block_size: usize,
    pub margin: f64,
    pub noise: NoiseMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub seed: u64,
    pub input_hash: String,
    pub input_len: usize,
    pub params: TraceParams,
    pub iterations: Vec<IterationTrace>,
    pub corner: Vec<u32>,
}

impl RunTrace {
    pub fn removed_total(&self) -> usize {
        self.iterations.iter().map(|it| it.removed_count).sum()
    }

    pub fn clamp_events(&self) -> usize {
        self.iterations.iter().filter(|it| it.clamp_event).count()
    }

    pub fn solver_failures(&self) -> usize {
        self.iterations.iter().filter(|it| !it.solver_success).count()
    }

    pub fn max_clamped_size(&self) -> usize {
        self.iterations
            .iter()
            .map(|it| it.clamped_size)
            .max()
            .unwrap_or(0)
    }

    /// JSON Lines, one iteration per line.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for it in &self.iterations {
            out.push_str(&serde_json::to_string(it)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandMarginsRun {
    pub rectangle: OriginRectangle,
    pub trace: RunTrace,
}

fn run<S: Survivors>(
    data: &Dataset,
    mut survivors: S,
    input_hash: String,
    params: &RandMarginsParams,
    solver: &dyn IppSolver,
) -> Result<RandMarginsRun> {
    params.ipp.validate()?;
    let delta = params.block_size;
    let lap = Laplace::centered(2.0 * delta as f64)?;
    let mut iterations = Vec::with_capacity(data.dim());
    for axis in 0..data.dim() {
        let remaining = survivors.len();
        if remaining < delta {
            return Err(Error::InsufficientData {
                iteration: axis,
                remaining,
                needed: delta,
            });
        }
        let noise = match params.noise {
            NoiseMode::Laplace => lap.sample(&mut iteration_rng(params.seed, axis, 0)),
            NoiseMode::Zero => 0.0,
        };
        let raw_size = (params.margin + noise).ceil() as i64;
        let clamped_size = raw_size.clamp(delta as i64, remaining as i64) as usize;
        let block_ids = survivors.top_block(axis, clamped_size);
        let inner_ids = block_ids[clamped_size - delta..].to_vec();
        let values: Vec<u32> = inner_ids.iter().map(|&id| data.coord(id, axis)).collect();
        let inner_min = *values.iter().min().expect("block size is positive");
        let inner_max = *values.iter().max().expect("block size is positive");
        let corner = solver.solve(
            &values,
            &params.ipp,
            &mut iteration_rng(params.seed, axis, 1),
        )?;
        let removed_ids = survivors.remove_at_or_above(axis, corner);
        let boundary_removed = removed_ids
            .iter()
            .filter(|&&id| data.coord(id, axis) == corner)
            .count();
        iterations.push(IterationTrace {
            axis,
            noise,
            raw_size,
            clamped_size,
            clamp_event: raw_size != clamped_size as i64,
            block_ids,
            inner_ids,
            inner_min,
            inner_max,
            corner,
            solver_success: inner_min <= corner && corner <= inner_max,
            removed_count: removed_ids.len(),
            removed_ids,
            boundary_removed,
            survivors: survivors.len(),
        });
    }
    let corner: Vec<u32> = iterations.iter().map(|it| it.corner).collect();
    Ok(RandMarginsRun {
        rectangle: OriginRectangle::new(corner.clone()),
        trace: RunTrace {
            seed: params.seed,
            input_hash,
            input_len: data.len(),
            params: params.trace_params(),
            iterations,
            corner,
        },
    })
}

/// RandMargins over every row of `data` (callers pass positives only).
pub fn rand_margins(
    data: &Dataset,
    params: &RandMarginsParams,
    solver: &dyn IppSolver,
) -> Result<RandMarginsRun> {
    run(
        data,
        ScanSurvivors::new(data),
        data.content_hash(),
        params,
        solver,
    )
}

/// A dataset with per-axis orders and content hash computed once, for many
/// runs over the same input.
#[derive(Debug, Clone)]
pub struct IndexedDataset {
    data: Dataset,
    hash: String,
    axes: SortedAxes,
}

impl IndexedDataset {
    pub fn new(data: Dataset) -> Self {
        let axes = SortedAxes::new(&data);
        let hash = data.content_hash();
        Self { data, hash, axes }
    }

    /// The same dataset with `extra` appended as the last row.
    pub fn with_extra(&self, extra: &LabeledExample) -> Result<Self> {
        let data = self.data.appended(extra)?;
        let axes = self.axes.with_last_of(&data);
        let hash = data.content_hash();
        Ok(Self { data, hash, axes })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn rand_margins(
        &self,
        params: &RandMarginsParams,
        solver: &dyn IppSolver,
    ) -> Result<RandMarginsRun> {
        run(
            &self.data,
            IndexedSurvivors::new(&self.data, &self.axes),
            self.hash.clone(),
            params,
            solver,
        )
    }

    /// [`variant_learner`](super::variant_learner) with every row as input.
    pub fn variant_learner(
        &self,
        ipp: &IppParams,
        solver: &dyn IppSolver,
        variant: Variant,
        seed: u64,
        forced_sizes: Option<&[(usize, usize)]>,
    ) -> Result<VariantRun> {
        run_variant(
            &self.data,
            IndexedSurvivors::new(&self.data, &self.axes),
            ipp,
            solver,
            variant,
            seed,
            forced_sizes,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Fallback {
    TooFewPositives { positives: usize, threshold: usize },
    InsufficientData { iteration: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnOutcome {
    pub hypothesis: Hypothesis,
    pub run: Option<RandMarginsRun>,
    pub fallback: Option<Fallback>,
}

fn with_fallback(
    d: usize,
    positives: usize,
    params: &RandMarginsParams,
    run: impl FnOnce() -> Result<RandMarginsRun>,
) -> Result<LearnOutcome> {
    let threshold = params.working_threshold();
    if params.fallback && positives < threshold {
        return Ok(LearnOutcome {
            hypothesis: Hypothesis::Empty { d },
            run: None,
            fallback: Some(Fallback::TooFewPositives {
                positives,
                threshold,
            }),
        });
    }
    match run() {
        Ok(run) => Ok(LearnOutcome {
            hypothesis: run.rectangle.clone().into(),
            run: Some(run),
            fallback: None,
        }),
        Err(Error::InsufficientData { iteration, .. }) if params.fallback => Ok(LearnOutcome {
            hypothesis: Hypothesis::Empty { d },
            run: None,
            fallback: Some(Fallback::InsufficientData { iteration }),
        }),
        Err(e) => Err(e),
    }
}

/// PAC wrapper: RandMargins on the positives of `sample`, falling back to the
/// all-negative hypothesis when there are too few of them (unless
/// `params.fallback` is off, in which case the run's error is returned).
pub fn learn_rectangle(
    sample: &Dataset,
    params: &RandMarginsParams,
    solver: &dyn IppSolver,
) -> Result<LearnOutcome> {
    params.ipp.validate()?;
    let positives = sample.positives();
    with_fallback(sample.dim(), positives.len(), params, || {
        rand_margins(&positives, params, solver)
    })
}

impl IndexedDataset {
    /// [`learn_rectangle`] for an indexed dataset of positives.
    pub fn learn(&self, params: &RandMarginsParams, solver: &dyn IppSolver) -> Result<LearnOutcome> {
        params.ipp.validate()?;
        with_fallback(self.data.dim(), self.data.len(), params, || {
            self.rand_margins(params, solver)
        })
    }
}
