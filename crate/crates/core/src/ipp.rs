//! Interior point solvers.
//!
//! Given a multiset of values in `{0, ..., domain_max}`, an interior point
//! solver returns some `v` with `min <= v <= max` except with probability
//! `beta`. [`ExpMechIpp`] does so under pure `epsilon`-differential privacy;
//! [`OracleMedianIpp`] is the non-private reference.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::seed::{derive_seed, rng_from_seed, SeededRng};

/// Largest domain for which [`ExpMechIpp::exact_output_distribution`] runs.
pub const EXACT_DOMAIN_LIMIT: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IppParams {
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub domain_max: u32,
}

impl IppParams {
    pub fn new(epsilon: f64, delta: f64, beta: f64, domain_max: u32) -> Result<Self> {
        let params = Self {
            epsilon,
            delta,
            beta,
            domain_max,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        let delta_max = (-2.0f64).exp();
        if !(self.delta >= 0.0 && self.delta < delta_max) {
            return Err(Error::InvalidParams(format!(
                "delta must lie in [0, 1/e^2), got {}",
                self.delta
            )));
        }
        if !(self.beta > 0.0 && self.beta < 0.25) {
            return Err(Error::InvalidParams(format!(
                "beta must lie in (0, 1/4), got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn with_privacy(&self, epsilon: f64, delta: f64) -> Result<Self> {
        Self::new(epsilon, delta, self.beta, self.domain_max)
    }
}

pub trait IppSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Minimum input size for which the interior-point guarantee holds.
    fn sample_complexity(&self, params: &IppParams) -> usize;

    fn solve(&self, values: &[u32], params: &IppParams, rng: &mut SeededRng) -> Result<u32>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    ExpMech,
    OracleMedian,
}

impl SolverKind {
    pub fn build(self) -> Box<dyn IppSolver> {
        match self {
            SolverKind::ExpMech => Box::new(ExpMechIpp),
            SolverKind::OracleMedian => Box::new(OracleMedianIpp),
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp-mech" => Ok(SolverKind::ExpMech),
            "oracle-median" => Ok(SolverKind::OracleMedian),
            other => Err(Error::Parse(format!("unknown solver {other:?}"))),
        }
    }
}

fn check_values(values: &[u32], params: &IppParams) -> Result<()> {
    if let Some(&v) = values.iter().find(|&&v| v > params.domain_max) {
        return Err(Error::OutOfDomain {
            axis: 0,
            value: v as u64,
            x_max: params.domain_max,
        });
    }
    Ok(())
}

/// Interior point via the exponential mechanism with quality
/// `q(v) = min(#{s <= v}, #{s >= v})`.
///
/// `q` has sensitivity 1 under adding or removing one value, so sampling
/// `v` with probability proportional to `exp(epsilon * q(v) / 2)` is
/// `epsilon`-DP. `delta` is accepted and ignored.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpMechIpp;

/// A run of domain values sharing one quality score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Segment {
    pub start: u32,
    pub len: u64,
    pub quality: usize,
}

/// Splits `{0, ..., domain_max}` into maximal constant-quality runs.
/// `sorted` must be ascending.
pub(crate) fn quality_segments(sorted: &[u32], domain_max: u32) -> Vec<Segment> {
    let n = sorted.len();
    if n == 0 {
        return vec![Segment {
            start: 0,
            len: domain_max as u64 + 1,
            quality: 0,
        }];
    }
    let mut segments = Vec::with_capacity(2 * n + 2);
    // Below the minimum nothing is <= v.
    if sorted[0] > 0 {
        segments.push(Segment {
            start: 0,
            len: sorted[0] as u64,
            quality: 0,
        });
    }
    let mut below = 0usize; // #{s < value}
    while below < n {
        let value = sorted[below];
        let le = below + sorted[below..].iter().take_while(|&&s| s == value).count();
        segments.push(Segment {
            start: value,
            len: 1,
            quality: le.min(n - below),
        });
        // Strictly between this value and the next one, or up to domain_max.
        let gap_end = sorted.get(le).map_or(domain_max as u64 + 1, |&s| s as u64);
        if gap_end > value as u64 + 1 {
            segments.push(Segment {
                start: value + 1,
                len: gap_end - value as u64 - 1,
                quality: le.min(n - le),
            });
        }
        below = le;
    }
    segments
}

/// `q(v)` for every `v` in the domain, by direct counting.
pub fn quality_vector(values: &[u32], domain_max: u32) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut q = Vec::with_capacity(domain_max as usize + 1);
    for seg in quality_segments(&sorted, domain_max) {
        q.extend(std::iter::repeat_n(seg.quality, seg.len as usize));
    }
    q
}

impl ExpMechIpp {
    /// `ceil((4 / epsilon) * ln((domain_max + 1) / beta))`.
    ///
    /// With `n` values the median has quality at least `n / 2`, while every
    /// non-interior output has quality 0; at this size the total mass of the
    /// `domain_max + 1` possible non-interior outputs is at most `beta`.
    pub fn required_points(params: &IppParams) -> usize {
        let side = params.domain_max as f64 + 1.0;
        ((4.0 / params.epsilon) * (side / params.beta).ln()).ceil().max(1.0) as usize
    }

    /// Exact output pmf over `{0, ..., domain_max}`.
    pub fn exact_output_distribution(
        &self,
        values: &[u32],
        epsilon: f64,
        domain_max: u32,
    ) -> Result<Vec<f64>> {
        if domain_max > EXACT_DOMAIN_LIMIT {
            return Err(Error::DomainTooLarge {
                domain_max,
                limit: EXACT_DOMAIN_LIMIT,
            });
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParams("epsilon must be positive".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        if let Some(&v) = sorted.last() {
            if v > domain_max {
                return Err(Error::OutOfDomain {
                    axis: 0,
                    value: v as u64,
                    x_max: domain_max,
                });
            }
        }
        Ok(exact_pmf_sorted(&sorted, epsilon, domain_max))
    }
}

/// Exact pmf for ascending `sorted` values; no validation.
pub(crate) fn exact_pmf_sorted(sorted: &[u32], epsilon: f64, domain_max: u32) -> Vec<f64> {
    let segments = quality_segments(sorted, domain_max);
    let top = segments.iter().map(|s| s.quality).max().unwrap_or(0) as f64;
    let mut pmf = Vec::with_capacity(domain_max as usize + 1);
    for seg in &segments {
        let w = (epsilon * (seg.quality as f64 - top) / 2.0).exp();
        pmf.extend(std::iter::repeat_n(w, seg.len as usize));
    }
    let z: f64 = pmf.iter().sum();
    for p in &mut pmf {
        *p /= z;
    }
    pmf
}

fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

impl IppSolver for ExpMechIpp {
    fn name(&self) -> &'static str {
        "exp-mech"
    }

    fn sample_complexity(&self, params: &IppParams) -> usize {
        Self::required_points(params)
    }

    fn solve(&self, values: &[u32], params: &IppParams, rng: &mut SeededRng) -> Result<u32> {
        let needed = self.sample_complexity(params);
        if values.len() < needed {
            return Err(Error::TooFewPoints {
                needed,
                got: values.len(),
            });
        }
        check_values(values, params)?;
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        Ok(sample_sorted(&sorted, params.epsilon, params.domain_max, rng))
    }
}

/// One exponential-mechanism draw for ascending `sorted`; no size check.
/// Picks a constant-quality segment by weight, then a uniform point in it,
/// consuming exactly two `u64` draws.
pub(crate) fn sample_sorted<R: RngCore + ?Sized>(
    sorted: &[u32],
    epsilon: f64,
    domain_max: u32,
    rng: &mut R,
) -> u32 {
    let segments = quality_segments(sorted, domain_max);
    let top = segments.iter().map(|s| s.quality).max().unwrap_or(0) as f64;
    let weights: Vec<f64> = segments
        .iter()
        .map(|s| (epsilon * (s.quality as f64 - top) / 2.0).exp() * s.len as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let u_segment = open_unit(rng) * total;
    let u_offset = rng.next_u64();
    let mut acc = 0.0;
    let mut chosen = segments.len() - 1;
    for (idx, w) in weights.iter().enumerate() {
        acc += w;
        if u_segment < acc {
            chosen = idx;
            break;
        }
    }
    let seg = segments[chosen];
    seg.start + (u_offset % seg.len) as u32
}

/// Deterministic lower median. Not private; sample complexity 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleMedianIpp;

impl OracleMedianIpp {
    pub fn lower_median(values: &[u32]) -> Result<u32> {
        if values.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        let mut sorted = values.to_vec();
        let mid = (sorted.len() - 1) / 2;
        let (_, m, _) = sorted.select_nth_unstable(mid);
        Ok(*m)
    }
}

impl IppSolver for OracleMedianIpp {
    fn name(&self) -> &'static str {
        "oracle-median"
    }

    fn sample_complexity(&self, _params: &IppParams) -> usize {
        1
    }

    fn solve(&self, values: &[u32], params: &IppParams, _rng: &mut SeededRng) -> Result<u32> {
        check_values(values, params)?;
        Self::lower_median(values)
    }
}

pub fn solve_interior_point(
    solver: &dyn IppSolver,
    values: &[u32],
    params: &IppParams,
    rng: &mut SeededRng,
) -> Result<u32> {
    params.validate()?;
    let needed = solver.sample_complexity(params);
    if values.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: values.len(),
        });
    }
    solver.solve(values, params, rng)
}

/// Result of running a solver on many random inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractReport {
    pub solver: String,
    pub n: usize,
    pub eps: f64,
    pub beta: f64,
    pub trials: usize,
    pub failures: usize,
}

/// Random input for contract trials: `n` values packed into a window whose
/// width ranges from a single point to the whole domain.
pub fn contract_trial_values(n: usize, domain_max: u32, rng: &mut SeededRng) -> Vec<u32> {
    let side = domain_max as u64 + 1;
    let widths = [1u64, 2, 10, 1000, side];
    let width = widths[(rng.next_u64() % widths.len() as u64) as usize].min(side);
    let lo = rng.next_u64() % (side - width + 1);
    (0..n)
        .map(|_| (lo + rng.next_u64() % width) as u32)
        .collect()
}

/// Counts interior-point failures over `trials` seeded inputs of size
/// `solver.sample_complexity(params)`.
pub fn contract_benchmark(
    solver: &dyn IppSolver,
    params: &IppParams,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<ContractReport> {
    params.validate()?;
    let n = solver.sample_complexity(params);
    let outcomes = exec.map(trials, |t| -> Result<bool> {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let values = contract_trial_values(n, params.domain_max, &mut rng);
        let v = solver.solve(&values, params, &mut rng)?;
        let lo = *values.iter().min().unwrap();
        let hi = *values.iter().max().unwrap();
        Ok(v < lo || v > hi)
    });
    let mut failures = 0;
    for o in outcomes {
        failures += o? as usize;
    }
    Ok(ContractReport {
        solver: solver.name().to_string(),
        n,
        eps: params.epsilon,
        beta: params.beta,
        trials,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_quality(values: &[u32], v: u32) -> usize {
        let le = values.iter().filter(|&&s| s <= v).count();
        let ge = values.iter().filter(|&&s| s >= v).count();
        le.min(ge)
    }

    #[test]
    fn params_validation() {
        assert!(IppParams::new(1.0, 0.0, 0.1, 10).is_ok());
        assert!(IppParams::new(0.0, 0.0, 0.1, 10).is_err());
        assert!(IppParams::new(1.0, 0.2, 0.1, 10).is_err());
        assert!(IppParams::new(1.0, 0.0, 0.25, 10).is_err());
        assert!(IppParams::new(1.0, 0.0, 0.0, 10).is_err());
    }

    #[test]
    fn quality_of_constant_multiset() {
        let q = quality_vector(&[3, 3, 3], 10);
        assert_eq!(q.len(), 11);
        assert_eq!((q[2], q[3], q[4]), (0, 3, 0));
    }

    #[test]
    fn quality_matches_brute_force() {
        let cases: [&[u32]; 6] = [&[], &[0], &[5, 1, 9, 9, 2], &[0, 10, 10], &[4, 4, 5, 6], &[10]];
        for values in cases {
            let q = quality_vector(values, 10);
            for v in 0..=10 {
                assert_eq!(q[v as usize], brute_quality(values, v), "{values:?} at {v}");
            }
        }
    }

    #[test]
    fn quality_peaks_at_medians() {
        let cases: [&[u32]; 4] = [&[1, 2, 3, 4], &[7, 7, 1], &[0, 5, 5, 5, 9], &[2, 8]];
        for values in cases {
            let q = quality_vector(values, 10);
            let best = *q.iter().max().unwrap();
            let mut sorted = values.to_vec();
            sorted.sort_unstable();
            let n = sorted.len();
            assert_eq!(q[sorted[(n - 1) / 2] as usize], best);
            assert_eq!(q[sorted[n / 2] as usize], best);
        }
    }

    #[test]
    fn sample_complexity_formula() {
        let p = IppParams::new(1.0, 1e-6, 0.1, 1_000_000).unwrap();
        // 4 * ln(10^7) = 64.47...
        assert_eq!(ExpMechIpp.sample_complexity(&p), 65);
        let coarse = IppParams::new(2.0, 1e-6, 0.1, 1_000_000).unwrap();
        assert!(ExpMechIpp.sample_complexity(&coarse) <= 65);
        let loose = IppParams::new(1.0, 1e-6, 0.2, 1_000_000).unwrap();
        assert!(ExpMechIpp.sample_complexity(&loose) <= 65);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(OracleMedianIpp::lower_median(&[4]).unwrap(), 4);
        assert_eq!(OracleMedianIpp::lower_median(&[1, 2, 3, 4]).unwrap(), 2);
        assert_eq!(OracleMedianIpp::lower_median(&[9, 1, 9]).unwrap(), 9);
        assert!(OracleMedianIpp::lower_median(&[]).is_err());

        let p = IppParams::new(1.0, 0.0, 0.1, 20).unwrap();
        let mut rng = rng_from_seed(0);
        let sevens = vec![7; 5];
        assert_eq!(solve_interior_point(&OracleMedianIpp, &sevens, &p, &mut rng).unwrap(), 7);
        let mut mixed = vec![2; 4];
        mixed.extend([9; 4]);
        assert_eq!(solve_interior_point(&OracleMedianIpp, &mixed, &p, &mut rng).unwrap(), 2);
    }

    #[test]
    fn too_few_points() {
        let p = IppParams::new(1.0, 0.0, 0.1, 100).unwrap();
        let mut rng = rng_from_seed(0);
        assert!(matches!(
            solve_interior_point(&ExpMechIpp, &[1, 2, 3], &p, &mut rng),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn exact_pmf_properties() {
        let pmf = ExpMechIpp.exact_output_distribution(&[], 1.0, 9).unwrap();
        assert!(pmf.iter().all(|&p| (p - 0.1).abs() < 1e-15));
        let pmf = ExpMechIpp.exact_output_distribution(&[2, 3, 3, 8], 0.7, 50).unwrap();
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(matches!(
            ExpMechIpp.exact_output_distribution(&[1], 1.0, 5000),
            Err(Error::DomainTooLarge { .. })
        ));
    }

    #[test]
    fn exact_pmf_matches_weights() {
        // Oracle: p(v) proportional to exp(eps q(v) / 2) with brute-force q.
        let values = [1u32, 4, 4, 6];
        let eps = 1.3;
        let w: Vec<f64> = (0..=8)
            .map(|v| (eps * brute_quality(&values, v) as f64 / 2.0).exp())
            .collect();
        let z: f64 = w.iter().sum();
        let pmf = ExpMechIpp.exact_output_distribution(&values, eps, 8).unwrap();
        for v in 0..=8 {
            assert!((pmf[v] - w[v] / z).abs() < 1e-12);
        }
    }

    #[test]
    fn concentrated_input_succeeds_with_high_probability() {
        // n copies of 5 at eps = 1: mass on 5 exceeds 1 - beta.
        let p = IppParams::new(1.0, 0.0, 0.1, 15).unwrap();
        let n = ExpMechIpp.sample_complexity(&p);
        let pmf = ExpMechIpp
            .exact_output_distribution(&vec![5; n], 1.0, 15)
            .unwrap();
        assert!(pmf[5] > 1.0 - p.beta);

        let pmf = ExpMechIpp.exact_output_distribution(&[5; 50], 8.0, 15).unwrap();
        assert!(pmf[5] > 0.99);
    }

    #[test]
    fn sampler_matches_exact_pmf() {
        let values = [3u32, 4, 4, 5, 9, 9, 10, 12, 12, 12];
        let pmf = ExpMechIpp.exact_output_distribution(&values, 0.8, 15).unwrap();
        let draws = 1_000_000;
        let mut counts = vec![0usize; 16];
        let mut rng = rng_from_seed(21);
        for _ in 0..draws {
            let v = sample_sorted(&values, 0.8, 15, &mut rng);
            counts[v as usize] += 1;
        }
        for v in 0..16 {
            let p = pmf[v];
            let f = counts[v] as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((f - p).abs() <= 3.0 * se + 1e-9, "v={v} f={f} p={p}");
        }
    }

    #[test]
    fn contract_frequency_small_domain() {
        for solver in [SolverKind::ExpMech.build(), SolverKind::OracleMedian.build()] {
            let p = IppParams::new(1.0, 1e-6, 0.1, 200).unwrap();
            let r = contract_benchmark(solver.as_ref(), &p, 10_000, 3, Execution::default()).unwrap();
            let bound = p.beta + 3.0 * (p.beta / 1e4).sqrt();
            assert!((r.failures as f64 / 1e4) <= bound, "{r:?}");
        }
    }

    #[test]
    fn pure_dp_on_small_neighbors() {
        let eps = 0.9;
        let base = [2u32, 2, 5];
        let p = ExpMechIpp.exact_output_distribution(&base, eps, 8).unwrap();
        for extra in 0..=8 {
            let mut nb = base.to_vec();
            nb.push(extra);
            let q = ExpMechIpp.exact_output_distribution(&nb, eps, 8).unwrap();
            for v in 0..=8 {
                assert!(p[v] / q[v] <= eps.exp() + 1e-9);
                assert!(q[v] / p[v] <= eps.exp() + 1e-9);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn quality_symmetric_under_reversal(values in proptest::collection::vec(0u32..20, 0..12)) {
            let q = quality_vector(&values, 19);
            let reversed: Vec<u32> = values.iter().map(|v| 19 - v).collect();
            let qr = quality_vector(&reversed, 19);
            for v in 0..20usize {
                proptest::prop_assert_eq!(q[v], qr[19 - v]);
            }
        }

        #[test]
        fn segments_cover_domain(values in proptest::collection::vec(0u32..50, 0..20)) {
            let mut sorted = values.clone();
            sorted.sort_unstable();
            let segs = quality_segments(&sorted, 49);
            let mut next = 0u64;
            for s in &segs {
                proptest::prop_assert_eq!(s.start as u64, next);
                next += s.len;
            }
            proptest::prop_assert_eq!(next, 50);
        }
    }
}
