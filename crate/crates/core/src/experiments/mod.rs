//! Reproducible experiment driver: configuration, synthetic data, learning
//! benchmarks, and result files.

pub mod bench;
pub mod config;
pub mod generate;
pub mod report;

pub use bench::{run_learning_benchmark, sample_seed, BenchOutput, PointSummary, ResultRecord};
pub use config::{DistributionSpec, ExperimentConfig, LearnerKind, OutputSpec, SweepSpec, TargetSpec};
pub use generate::{generate_synthetic, Population};
pub use report::{emit_report, records_csv, ReportPaths};
