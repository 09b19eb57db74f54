//! Rectangle learners: RandMargins and its PAC wrapper, the composition
//! baseline, the two deletion variants, and the sample-size calculator.

mod baseline;
mod rand_margins;
mod sample_size;
pub(crate) mod survivors;
mod variants;

pub use baseline::{baseline_composition_learner, composition_budget, BaselineOutcome};
pub use rand_margins::{
    learn_rectangle, rand_margins, Fallback, IndexedDataset, IterationTrace, LearnOutcome,
    NoiseMode, PrivacyBudget, RandMarginsParams, RandMarginsRun, RunTrace, TraceParams,
};
pub use sample_size::{required_sample_size, sample_size_formula, SampleSizeConstants};
pub use survivors::SortedAxes;
pub use variants::{
    collision_demo, compare_runs, divergence_report, synchronizing_sizes, variant_learner,
    CollisionDemo, DivergenceReport, Variant, VariantIteration, VariantRun,
};
