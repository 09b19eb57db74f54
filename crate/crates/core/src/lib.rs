//! Differentially private learning of origin-anchored rectangles on a finite
//! grid, with interior-point solvers, baselines, and privacy audits.

pub mod audit;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod hash;
pub mod io;
pub mod ipp;
pub mod learner;
pub mod model;
pub mod noise;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{Dataset, GridDomain, Hypothesis, LabeledExample, OriginRectangle};
