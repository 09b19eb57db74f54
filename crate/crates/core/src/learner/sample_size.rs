use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ipp::{IppParams, IppSolver};

/// Multipliers for the two sample-size terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeConstants {
    /// Multiplies `Δ (d/α) ln(e/α) ln(e/β)`.
    pub main: f64,
    /// Multiplies the VC floor `(1/α)(2d ln(1/α) + ln(1/β))`.
    pub vc: f64,
}

impl Default for SampleSizeConstants {
    fn default() -> Self {
        Self { main: 12.0, vc: 8.0 }
    }
}

/// Labeled sample size for `(α, β)`-accuracy in dimension `d`, where `β` is
/// `ipp.beta`.
pub fn required_sample_size(
    alpha: f64,
    ipp: &IppParams,
    d: usize,
    solver: &dyn IppSolver,
    constants: SampleSizeConstants,
) -> Result<usize> {
    ipp.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be positive".into()));
    }
    Ok(sample_size_formula(
        alpha,
        ipp.beta,
        d,
        solver.sample_complexity(ipp),
        constants,
    ))
}

pub fn sample_size_formula(
    alpha: f64,
    beta: f64,
    d: usize,
    block_size: usize,
    constants: SampleSizeConstants,
) -> usize {
    let e = std::f64::consts::E;
    let d = d as f64;
    let main = constants.main
        * block_size as f64
        * (d / alpha)
        * (e / alpha).ln()
        * (e / beta).ln();
    let vc = constants.vc * (1.0 / alpha) * (2.0 * d * (1.0 / alpha).ln() + (1.0 / beta).ln());
    (main.ceil() as usize).max(vc.ceil() as usize)
}
