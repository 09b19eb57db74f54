use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ipp::{IppParams, IppSolver};
use crate::model::{Dataset, Hypothesis, OriginRectangle};
use crate::seed::iteration_rng;

/// Per-call budget for `2d` solver calls under advanced composition:
/// `ε' = ε / (2 √(4 d ln(1/δ)))`, `δ' = δ / (4d)`.
pub fn composition_budget(epsilon: f64, delta: f64, d: usize) -> (f64, f64) {
    let d = d as f64;
    let eps = epsilon / (2.0 * (4.0 * d * (1.0 / delta).ln()).sqrt());
    (eps, delta / (4.0 * d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineOutcome {
    /// `h_b`, the origin rectangle with corner `upper`.
    pub hypothesis: Hypothesis,
    pub lower: Vec<u32>,
    pub upper: Vec<u32>,
    pub per_call_epsilon: f64,
    pub per_call_delta: f64,
    /// Points given to each solver call.
    pub block_size: usize,
}

/// Per axis, an interior point of the `n'` lowest and of the `n'` highest
/// projected positives, each call at the composed per-call budget.
/// `ipp` carries the end-to-end `(ε, δ)`, which must have `δ > 0`.
pub fn baseline_composition_learner(
    sample: &Dataset,
    ipp: &IppParams,
    solver: &dyn IppSolver,
    seed: u64,
) -> Result<BaselineOutcome> {
    ipp.validate()?;
    if ipp.delta <= 0.0 {
        return Err(Error::InvalidParams(
            "composition baseline needs delta > 0".into(),
        ));
    }
    let d = sample.dim();
    let (eps, dlt) = composition_budget(ipp.epsilon, ipp.delta, d);
    let call = ipp.with_privacy(eps, dlt)?;
    let n = solver.sample_complexity(&call);
    let positives = sample.positives();
    if positives.len() < 2 * n {
        return Err(Error::InsufficientData {
            iteration: 0,
            remaining: positives.len(),
            needed: 2 * n,
        });
    }
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for axis in 0..d {
        let mut values = positives.projection(axis);
        values.sort_unstable();
        let len = values.len();
        lower.push(solver.solve(&values[..n], &call, &mut iteration_rng(seed, axis, 0))?);
        upper.push(solver.solve(&values[len - n..], &call, &mut iteration_rng(seed, axis, 1))?);
    }
    Ok(BaselineOutcome {
        hypothesis: OriginRectangle::new(upper.clone()).into(),
        lower,
        upper,
        per_call_epsilon: eps,
        per_call_delta: dlt,
        block_size: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipp::{ExpMechIpp, OracleMedianIpp};
    use crate::model::{GridDomain, LabeledExample};

    #[test]
    fn one_dimension_interval_inside_span() {
        let domain = GridDomain::new(20, 1).unwrap();
        let s = Dataset::positives_from_points(domain, (2..=9).map(|v| vec![v])).unwrap();
        let ipp = IppParams::new(1.0, 1e-6, 0.1, 20).unwrap();
        let out = baseline_composition_learner(&s, &ipp, &OracleMedianIpp, 0).unwrap();
        assert!(2 <= out.lower[0] && out.lower[0] <= out.upper[0] && out.upper[0] <= 9);
    }

    #[test]
    fn per_call_epsilon_scales_inverse_sqrt_d() {
        let (e1, _) = composition_budget(1.0, 1e-6, 4);
        let (e4, d4) = composition_budget(1.0, 1e-6, 16);
        assert!((e1 / e4 - 2.0).abs() < 1e-12);
        assert!((d4 - 1e-6 / 64.0).abs() < 1e-20);
    }

    #[test]
    fn pinned_small_instance() {
        let domain = GridDomain::new(9, 2).unwrap();
        let pts = [[1, 8], [3, 2], [5, 5], [7, 0], [2, 6], [9, 4]];
        let mut ex: Vec<LabeledExample> = pts.iter().map(|p| LabeledExample::positive(p.to_vec())).collect();
        ex.push(LabeledExample::new(vec![0, 0], false));
        let s = Dataset::from_examples(domain, ex).unwrap();
        let ipp = IppParams::new(1.0, 1e-6, 0.1, 9).unwrap();
        let out = baseline_composition_learner(&s, &ipp, &OracleMedianIpp, 0).unwrap();
        // One point per call: the lowest and highest coordinate on each axis.
        assert_eq!(out.lower, vec![1, 0]);
        assert_eq!(out.upper, vec![9, 8]);
        assert_eq!(out.block_size, 1);
        assert_eq!(out.hypothesis, Hypothesis::Rectangle(OriginRectangle::new(vec![9, 8])));
    }

    #[test]
    fn too_few_positives() {
        let domain = GridDomain::new(1000, 2).unwrap();
        let s = Dataset::positives_from_points(domain, (0..50).map(|v| vec![v, v])).unwrap();
        let ipp = IppParams::new(1.0, 1e-6, 0.1, 1000).unwrap();
        assert!(matches!(
            baseline_composition_learner(&s, &ipp, &ExpMechIpp, 0),
            Err(Error::InsufficientData { .. })
        ));
    }
}
