use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::ipp::SolverKind;
use crate::learner::{PrivacyBudget, RandMarginsParams};

use super::concentration::ConcentrationReport;
use super::divergence::{tightest_epsilon, two_sided_hockey_stick};
use super::exact::exact_rand_margins_distribution_1d;
use super::game::GameReport;
use super::montecarlo::McReport;
use super::partition::NeighboringPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Uniform report emitted by every audit mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mode: String,
    pub params: Value,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub claimed_bound: f64,
    pub verdict: Verdict,
    /// Mode-specific details.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactPairResult {
    pub base_len: usize,
    pub extra: u32,
    /// Two-sided divergence at the claimed `ε̃`, plus the truncated mass.
    pub divergence: f64,
    pub truncated_mass: f64,
    /// Smallest `ε` meeting `δ̃` on this pair.
    pub tightest_epsilon: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactAudit {
    pub pairs: Vec<ExactPairResult>,
    pub claimed_epsilon: f64,
    pub claimed_delta: f64,
    pub max_divergence: f64,
    pub max_tightest_epsilon: f64,
    pub violations: usize,
}

/// Exact two-sided hockey-stick audit of the `p_1` marginal on each 1-d pair,
/// at the budget `(ε̃, δ̃)`. Truncated mass counts against `δ̃`.
pub fn exact_pair_audit(
    pairs: &[NeighboringPair],
    params: &RandMarginsParams,
    solver: SolverKind,
) -> Result<ExactAudit> {
    let budget = PrivacyBudget::new(params.ipp.epsilon, params.ipp.delta, 1);
    let mut results = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let p = exact_rand_margins_distribution_1d(&pair.base, params, solver)?;
        let q = exact_rand_margins_distribution_1d(&pair.prime()?, params, solver)?;
        let truncated_mass = p.truncated_mass.max(q.truncated_mass);
        let divergence = two_sided_hockey_stick(&p.pmf, &q.pmf, budget.epsilon_total) + truncated_mass;
        let tight = tightest_epsilon(&p.pmf, &q.pmf, (budget.delta_total - truncated_mass).max(0.0));
        results.push(ExactPairResult {
            base_len: pair.base.len(),
            extra: pair.extra.coords[0],
            divergence,
            truncated_mass,
            tightest_epsilon: tight,
            violation: divergence > budget.delta_total,
        });
    }
    Ok(ExactAudit {
        claimed_epsilon: budget.epsilon_total,
        claimed_delta: budget.delta_total,
        max_divergence: results.iter().map(|r| r.divergence).fold(0.0, f64::max),
        max_tightest_epsilon: results.iter().map(|r| r.tightest_epsilon).fold(0.0, f64::max),
        violations: results.iter().filter(|r| r.violation).count(),
        pairs: results,
    })
}

impl ExactAudit {
    pub fn report(&self, params: Value) -> Result<AuditReport> {
        Ok(AuditReport {
            mode: "exact-1d".into(),
            params,
            estimate: self.max_divergence,
            ci_low: self.max_divergence,
            ci_high: self.max_divergence,
            claimed_bound: self.claimed_delta,
            verdict: Verdict::from_ok(self.violations == 0),
            details: serde_json::to_value(self)?,
        })
    }
}

impl McReport {
    pub fn report(&self, params: Value) -> Result<AuditReport> {
        Ok(AuditReport {
            mode: "mc".into(),
            params,
            estimate: self.epsilon_point,
            ci_low: self.epsilon_lower,
            ci_high: f64::INFINITY,
            claimed_bound: self.claimed_epsilon,
            verdict: Verdict::from_ok(!self.violation),
            details: serde_json::to_value(self)?,
        })
    }
}

impl ConcentrationReport {
    /// Passes when the upper bound on the tail probability is at most `δ`.
    pub fn report(&self, params: Value) -> Result<AuditReport> {
        Ok(AuditReport {
            mode: "concentration".into(),
            params,
            estimate: self.tail_estimate,
            ci_low: 0.0,
            ci_high: self.tail_upper,
            claimed_bound: self.delta,
            verdict: Verdict::from_ok(self.tail_upper <= self.delta),
            details: serde_json::to_value(self)?,
        })
    }
}

impl GameReport {
    /// Summarizes the largest `γ`-tail ratio; passes when every tail's upper
    /// bound is within its bound.
    pub fn report(&self, params: Value) -> Result<AuditReport> {
        let worst = self
            .tails
            .iter()
            .max_by(|a, b| (a.upper / a.bound).total_cmp(&(b.upper / b.bound)));
        let (estimate, ci_high, bound) = worst.map_or((0.0, 0.0, f64::INFINITY), |t| (t.estimate, t.upper, t.bound));
        Ok(AuditReport {
            mode: "game".into(),
            params,
            estimate,
            ci_low: 0.0,
            ci_high,
            claimed_bound: bound,
            verdict: Verdict::from_ok(self.tails.iter().all(|t| t.within_bound)),
            details: serde_json::to_value(self)?,
        })
    }
}
