use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::RunTrace;
use crate::model::{Dataset, LabeledExample};

/// `S` and `S' = S ∪ {extra}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighboringPair {
    pub base: Dataset,
    pub extra: LabeledExample,
}

impl NeighboringPair {
    pub fn new(base: Dataset, extra: LabeledExample) -> Result<Self> {
        base.domain().check_point(&extra.coords)?;
        Ok(Self { base, extra })
    }

    pub fn prime(&self) -> Result<Dataset> {
        self.base.appended(&self.extra)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationPartition {
    /// Iteration that deletes the extra point from the `S'` run, if any.
    pub i_star: Option<usize>,
    pub e_in: Vec<usize>,
    pub e_out: Vec<usize>,
    pub e_after: Vec<usize>,
}

fn check_paired(trace: &RunTrace, trace_prime: &RunTrace) -> Result<()> {
    if trace.seed != trace_prime.seed {
        return Err(Error::UnpairedTraces(format!(
            "seeds differ: {} vs {}",
            trace.seed, trace_prime.seed
        )));
    }
    if trace.params != trace_prime.params {
        return Err(Error::UnpairedTraces("parameters differ".into()));
    }
    if trace_prime.input_len != trace.input_len + 1 {
        return Err(Error::UnpairedTraces(format!(
            "expected inputs of sizes n and n + 1, got {} and {}",
            trace.input_len, trace_prime.input_len
        )));
    }
    if trace.iterations.len() != trace_prime.iterations.len() {
        return Err(Error::UnpairedTraces("iteration counts differ".into()));
    }
    Ok(())
}

/// Splits iterations by the behaviour of the extra point in the `S'` run.
/// Both traces come from runs on the positives, so `extra` must be positive
/// and carries the last id of `trace_prime`.
///
/// `i*` is the iteration whose deletion set holds the extra point. Deletion
/// keeps `y[i] >= p_i`, so this is the first iteration with `x'[i] > p_i`
/// unless the point goes out on a tie. An `i*` with the point outside `B'`
/// (possible only on a tie with the block's bottom) joins `E_out`.
pub fn partition_iterations(
    trace: &RunTrace,
    trace_prime: &RunTrace,
    extra: &LabeledExample,
) -> Result<IterationPartition> {
    check_paired(trace, trace_prime)?;
    if !extra.label {
        return Err(Error::InvalidParams(
            "the extra example must be positive to enter the learner's input".into(),
        ));
    }
    let x_id = trace_prime.input_len - 1;
    let d = trace_prime.iterations.len();
    let i_star = trace_prime
        .iterations
        .iter()
        .position(|it| it.removed_ids.contains(&x_id));
    let last = i_star.unwrap_or(d);
    let mut part = IterationPartition {
        i_star,
        e_in: Vec::new(),
        e_out: Vec::new(),
        e_after: Vec::new(),
    };
    for (i, it) in trace_prime.iterations.iter().enumerate() {
        if i > last {
            part.e_after.push(i);
        } else if it.block_ids.contains(&x_id) {
            part.e_in.push(i);
        } else {
            part.e_out.push(i);
        }
    }
    Ok(part)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedCheck {
    /// Iterations where the shared survivors coincided and `x' ∉ B'_i`.
    pub checked: usize,
    pub violations: Vec<String>,
}

/// Literal trace equalities behind the `E_out` and `E_after` arguments.
///
/// Whenever the survivors of the two runs agree apart from `x'` and `x'` is
/// outside `B'_i`, iteration `i` must select the same block, inner block and
/// corner, and remove the same points except `x'`. The noise must agree on
/// every iteration.
pub fn paired_trace_check(trace: &RunTrace, trace_prime: &RunTrace) -> Result<PairedCheck> {
    check_paired(trace, trace_prime)?;
    let n = trace.input_len;
    let x_id = n;
    let mut removed = vec![false; n];
    let mut removed_prime = vec![false; n];
    let mut mismatched = 0usize;
    let mut out = PairedCheck {
        checked: 0,
        violations: Vec::new(),
    };
    for (i, (a, b)) in trace.iterations.iter().zip(&trace_prime.iterations).enumerate() {
        if a.noise.to_bits() != b.noise.to_bits() {
            out.violations.push(format!("iteration {i}: noise differs"));
        }
        if mismatched == 0 && !b.block_ids.contains(&x_id) {
            out.checked += 1;
            let shared_removed: Vec<usize> =
                b.removed_ids.iter().copied().filter(|&id| id != x_id).collect();
            let fields = [
                ("clamped size", a.clamped_size == b.clamped_size),
                ("block", a.block_ids == b.block_ids),
                ("inner block", a.inner_ids == b.inner_ids),
                ("corner", a.corner == b.corner),
                ("removed set", a.removed_ids == shared_removed),
            ];
            for (name, ok) in fields {
                if !ok {
                    out.violations.push(format!("iteration {i}: {name} differs"));
                }
            }
        }
        let mut mark = |id: usize, prime: bool| {
            let before = removed[id] != removed_prime[id];
            if prime {
                removed_prime[id] = true;
            } else {
                removed[id] = true;
            }
            let after = removed[id] != removed_prime[id];
            mismatched = mismatched + after as usize - before as usize;
        };
        for &id in &a.removed_ids {
            mark(id, false);
        }
        for &id in b.removed_ids.iter().filter(|&&id| id != x_id) {
            mark(id, true);
        }
    }
    Ok(out)
}
