//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and prints a single `PASS`/`FAIL` line before asserting.

use std::io::Write;
use std::time::Instant;

use randmargins::audit::{
    adversarial_pairs_1d, adversary_game_simulator, concentration_experiment, concentration_pair, domino_chain_pair,
    exact_pair_audit, game_tail_bound, paired_trace_check, partition_iterations, GameConfig, NeighboringPair,
    Strategy,
};
use randmargins::experiments::{
    run_learning_benchmark, DistributionSpec, ExperimentConfig, LearnerKind, OutputSpec, SweepSpec, TargetSpec,
};
use randmargins::ipp::{contract_benchmark, ExpMechIpp, IppParams, IppSolver, OracleMedianIpp, SolverKind};
use randmargins::learner::{compare_runs, IndexedDataset, RandMarginsParams, RandMarginsRun, Variant};
use randmargins::model::{empirical_error, Dataset, GridDomain, Hypothesis, LabeledExample};
use randmargins::seed::{derive_seed, rng_from_seed};
use randmargins::stats::{binomial_upper_quantile, clopper_pearson_upper, paired_mean_lower_bound};
use randmargins::Execution;

use rand::Rng;

fn verdict(criterion: u32, name: &str, ok: bool, detail: String, started: Instant) {
    let tag = if ok { "PASS" } else { "FAIL" };
    // Written to the raw handle so the line survives libtest output capture.
    let line = format!(
        "{tag} criterion {criterion} ({name}): {detail} [{:.1}s]\n",
        started.elapsed().as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_ipp_contract() {
    let started = Instant::now();
    let params = IppParams::new(1.0, 0.0, 0.1, 1_000_000).unwrap();
    let trials = 10_000;
    let r = contract_benchmark(&ExpMechIpp, &params, trials, 0xC1, Execution::default()).unwrap();
    let upper = clopper_pearson_upper(r.failures as u64, trials as u64, 0.99).unwrap();
    verdict(
        1,
        "ipp contract",
        upper <= params.beta,
        format!("n={} failures={}/{trials}, 99% upper bound {upper:.5} <= {}", r.n, r.failures, params.beta),
        started,
    );
}

fn multisets(max_len: usize, domain_max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.last().copied().unwrap_or(0);
            for v in start..=domain_max {
                let mut grown: Vec<u32> = m.clone();
                grown.push(v);
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn criterion_2_exp_mech_pure_dp() {
    let started = Instant::now();
    let domain_max = 8;
    let bases = multisets(5, domain_max);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let mut ok = true;
    for eps in [0.1, 0.5, 1.0, 2.0] {
        for base in &bases {
            let p = ExpMechIpp.exact_output_distribution(base, eps, domain_max).unwrap();
            for extra in 0..=domain_max {
                let mut nb = base.clone();
                nb.push(extra);
                let q = ExpMechIpp.exact_output_distribution(&nb, eps, domain_max).unwrap();
                for v in 0..=domain_max as usize {
                    let ratio = (p[v] / q[v]).max(q[v] / p[v]);
                    worst = worst.max(ratio.ln() / eps);
                    ok &= ratio <= eps.exp() + 1e-9;
                }
                checked += 1;
            }
        }
    }
    verdict(
        2,
        "exp-mech pure dp",
        ok,
        format!("{checked} neighboring pairs over {{0..8}}, worst ln(ratio)/eps = {worst:.6}"),
        started,
    );
}

#[test]
fn criterion_3_exact_audit() {
    let started = Instant::now();
    let (eps, delta, x_max) = (0.5, 0.01, 64);
    let ipp = IppParams::new(eps, delta, 0.1, x_max).unwrap();
    let params = RandMarginsParams::new(ipp, &ExpMechIpp, 0).unwrap();
    let pairs = adversarial_pairs_1d(x_max, params.block_size).unwrap();
    assert!(pairs.len() >= 20);
    let audit = exact_pair_audit(&pairs, &params, SolverKind::ExpMech).unwrap();
    verdict(
        3,
        "exact 1-d audit",
        audit.violations == 0,
        format!(
            "{} pairs, max divergence {:.3e} at eps~={:.1} vs delta~={}, largest tightest eps {:.3}",
            audit.pairs.len(),
            audit.max_divergence,
            audit.claimed_epsilon,
            audit.claimed_delta,
            audit.max_tightest_epsilon
        ),
        started,
    );
}

#[test]
fn criterion_4_concentration() {
    let started = Instant::now();
    let delta = 0.05;
    let ipp = IppParams::new(1.0, delta, 0.1, 1023).unwrap();
    let params = RandMarginsParams::new(ipp, &ExpMechIpp, 0).unwrap();
    let group = params.margin.ceil() as usize;
    let pair = concentration_pair(64, 1023, group, 600, 0xC4).unwrap();
    let trials = 10_000;
    let r = concentration_experiment(&pair, &params, &ExpMechIpp, trials, delta, 0xC4, Execution::default()).unwrap();
    // Trials that errored count as exceedances.
    let bad = r.exceedances + r.failed_trials as u64;
    let upper = clopper_pearson_upper(bad, trials as u64, 0.99).unwrap();
    verdict(
        4,
        "E_in concentration",
        upper <= delta,
        format!(
            "threshold {:.1}, exceedances {} + failed {} of {trials}, 99% upper {upper:.5} <= {delta}; mean |E_in| {:.3}, max {}",
            r.threshold,
            r.exceedances,
            r.failed_trials,
            r.mean_e_in,
            r.histogram.len() - 1
        ),
        started,
    );
}

#[test]
fn criterion_5_game_bound() {
    let started = Instant::now();
    let gammas = [35.0, 50.0, 70.0];
    let strategies = [
        Strategy::Constant { q: 0.5, q_bar: 0.125 },
        Strategy::Boundary { q: 0.5 },
        Strategy::Greedy { target: 35 },
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, strategy) in strategies.into_iter().enumerate() {
        let config = GameConfig { rounds: 500, strategy };
        let r = adversary_game_simulator(&config, 100_000, &gammas, 0.99, 0xC5 + i as u64, Execution::default())
            .unwrap();
        for t in &r.tails {
            ok &= t.upper <= game_tail_bound(t.gamma);
        }
        let uppers: Vec<String> = r.tails.iter().map(|t| format!("{:.2e}", t.upper)).collect();
        lines.push(format!("{} max {} uppers [{}]", r.strategy, r.max_score, uppers.join(", ")));
    }
    verdict(5, "adversary game", ok, lines.join("; "), started);
}

#[test]
fn criterion_6_utility() {
    let started = Instant::now();
    let config = ExperimentConfig {
        x_max: 1_000_000,
        d: 8,
        target: TargetSpec::Uniform(500_000),
        distribution: DistributionSpec::TargetUniform { inside: 0.5 },
        learner: LearnerKind::RandMargins,
        solver: SolverKind::ExpMech,
        epsilon: 1.0,
        delta: 1e-6,
        alpha: 0.1,
        beta: 0.1,
        trials: 50,
        seed: 0xC6,
        n: None,
        sweep: SweepSpec::default(),
        output: OutputSpec::default(),
    };
    let out = run_learning_benchmark(&config, Execution::default()).unwrap();
    let point = &out.points[0];
    let failures = out.records.iter().filter(|r| r.failure).count() as u64;
    let allowed = binomial_upper_quantile(50, config.beta, 0.01).unwrap();
    let iterations = (out.records.len() * config.d) as f64;
    let clamps: usize = out.records.iter().filter_map(|r| r.clamp_events).sum();
    let clamp_rate = clamps as f64 / iterations;
    let ok = failures <= allowed && clamp_rate < config.beta;
    verdict(
        6,
        "utility",
        ok,
        format!(
            "n={} failures {failures}/50 <= {allowed}, mean error {:.4}, clamp rate {clamp_rate:.4} < {}",
            point.n, point.mean_error, config.beta
        ),
        started,
    );
}

struct Instance {
    sample: Dataset,
    target: Vec<u32>,
    extra: LabeledExample,
    params: RandMarginsParams,
    oracle: bool,
}

fn random_instance(index: u64) -> Instance {
    let mut rng = rng_from_seed(derive_seed(0xC7, index));
    let d = rng.random_range(1..=5);
    let oracle = index % 2 == 0;
    let x_max = if oracle { rng.random_range(3..=200) } else { rng.random_range(50..=2000) };
    let domain = GridDomain::new(x_max, d).unwrap();
    let target: Vec<u32> = (0..d).map(|_| rng.random_range(x_max / 3..=x_max)).collect();
    let ipp = IppParams::new(1.0, 1e-3, 0.1, x_max).unwrap();
    let params = if oracle {
        RandMarginsParams::with_block_size(ipp, rng.random_range(1..=6), index).unwrap()
    } else {
        RandMarginsParams::new(ipp, &ExpMechIpp, index).unwrap()
    };
    let needed = d * (params.margin as usize + 6 * params.block_size) + params.block_size;
    let positives = rng.random_range(needed..=2 * needed + 50);
    let negatives = rng.random_range(0..=positives / 2);
    let mut examples = Vec::with_capacity(positives + negatives);
    for _ in 0..positives {
        let coords = target.iter().map(|&c| rng.random_range(0..=c)).collect();
        examples.push(LabeledExample::positive(coords));
    }
    for _ in 0..negatives {
        let mut coords: Vec<u32> = (0..d).map(|_| rng.random_range(0..=x_max)).collect();
        let axis = rng.random_range(0..d);
        if target[axis] == x_max {
            continue;
        }
        coords[axis] = rng.random_range(target[axis] + 1..=x_max);
        examples.push(LabeledExample::new(coords, false));
    }
    let sample = Dataset::from_examples(domain, examples).unwrap();
    let extra = if rng.random_bool(0.5) {
        LabeledExample::positive(target.iter().map(|&c| rng.random_range(0..=c)).collect())
    } else {
        LabeledExample::positive(target.clone())
    };
    Instance {
        sample,
        target,
        extra,
        params,
        oracle,
    }
}

fn trace_violations(inst: &Instance, positives: &Dataset, run: &RandMarginsRun) -> Vec<String> {
    let mut v = Vec::new();
    let trace = &run.trace;
    let mut alive = vec![true; positives.len()];
    let mut prev = positives.len();
    let mut all_success = true;
    for it in &trace.iterations {
        let i = it.axis;
        if it.survivors > prev {
            v.push(format!("survivors grew at axis {i}"));
        }
        if it.survivors + it.removed_count != prev {
            v.push(format!("survivor count mismatch at axis {i}"));
        }
        prev = it.survivors;
        for &id in &it.removed_ids {
            if !alive[id] {
                v.push(format!("id {id} removed twice"));
            }
            alive[id] = false;
            if positives.coord(id, i) < it.corner {
                v.push(format!("id {id} removed below p at axis {i}"));
            }
        }
        if it.removed_ids.len() != it.removed_count {
            v.push(format!("removed count mismatch at axis {i}"));
        }
        for (id, &a) in alive.iter().enumerate() {
            if a && positives.coord(id, i) >= it.corner {
                v.push(format!("survivor {id} at or above p on axis {i}"));
            }
        }
        if !it.inner_ids.iter().all(|id| it.block_ids.contains(id)) || it.inner_ids.len() != inst.params.block_size {
            v.push(format!("inner block malformed at axis {i}"));
        }
        let inside = it.inner_min <= it.corner && it.corner <= it.inner_max;
        if it.solver_success != inside {
            v.push(format!("solver success flag wrong at axis {i}"));
        }
        if inst.oracle && !inside {
            v.push(format!("oracle missed the interior at axis {i}"));
        }
        all_success &= inside;
    }
    let h = Hypothesis::Rectangle(run.rectangle.clone());
    let mistakes = empirical_error(&h, positives).unwrap().mistakes;
    if mistakes > trace.removed_total() {
        v.push(format!("mistakes {mistakes} exceed removals {}", trace.removed_total()));
    }
    for id in 0..positives.len() {
        if alive[id] && !h.predict(positives.point(id)).unwrap() {
            v.push(format!("surviving positive {id} misclassified"));
        }
    }
    if all_success {
        if run.rectangle.corner.iter().zip(&inst.target).any(|(p, t)| p > t) {
            v.push("corner outside the target despite solver success".into());
        }
        let false_positives = (0..inst.sample.len())
            .filter(|&id| !inst.sample.label(id) && h.predict(inst.sample.point(id)).unwrap())
            .count();
        if false_positives > 0 {
            v.push(format!("{false_positives} false positives despite solver success"));
        }
    }
    v
}

#[test]
fn criterion_7_trace_invariants() {
    let started = Instant::now();
    let instances = 1000u64;
    // Runs that stop with InsufficientData are skipped and counted; any other
    // error is a violation.
    let results = Execution::default().map(instances as usize, |t| -> (usize, Vec<String>, bool) {
        let inst = random_instance(t as u64);
        let solver: &dyn IppSolver = if inst.oracle { &OracleMedianIpp } else { &ExpMechIpp };
        let positives = inst.sample.positives();
        let base = IndexedDataset::new(positives.clone());
        let prime = base.with_extra(&inst.extra).unwrap();
        let (a, b) = match (base.rand_margins(&inst.params, solver), prime.rand_margins(&inst.params, solver)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(randmargins::Error::InsufficientData { .. }), _) | (_, Err(randmargins::Error::InsufficientData { .. })) => {
                return (0, vec![], true)
            }
            (Err(e), _) | (_, Err(e)) => return (0, vec![format!("instance {t}: run failed: {e}")], false),
        };
        let mut v = trace_violations(&inst, &positives, &a);
        let pair = NeighboringPair::new(positives, inst.extra.clone()).unwrap();
        v.extend(trace_violations(&inst, &pair.prime().unwrap(), &b));
        let part = partition_iterations(&a.trace, &b.trace, &inst.extra).unwrap();
        let mut all: Vec<usize> = part.e_in.iter().chain(&part.e_out).chain(&part.e_after).copied().collect();
        all.sort_unstable();
        if all != (0..a.trace.iterations.len()).collect::<Vec<_>>() {
            v.push("partition does not cover the iterations".into());
        }
        let check = paired_trace_check(&a.trace, &b.trace).unwrap();
        v.extend(check.violations);
        (check.checked, v.into_iter().map(|s| format!("instance {t}: {s}")).collect(), false)
    });
    let skipped = results.iter().filter(|r| r.2).count();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let violations: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    let sample: Vec<&&String> = violations.iter().take(5).collect();
    verdict(
        7,
        "trace invariants",
        violations.is_empty() && skipped * 10 < instances as usize,
        format!(
            "{instances} instances ({skipped} ran out of data), {checked} paired iterations checked, {} violations {sample:?}",
            violations.len()
        ),
        started,
    );
}

#[test]
fn criterion_8_domino() {
    let started = Instant::now();
    let ipp = IppParams::new(1.0, 1e-6, 0.1, 1023).unwrap();
    let params = RandMarginsParams::new(ipp, &ExpMechIpp, 0).unwrap();
    let (d, trials) = (32, 1000);
    let pair = domino_chain_pair(d, 1023, params.block_size, 80_000, 0xC8).unwrap();
    let base = IndexedDataset::new(pair.base.clone());
    let prime = base.with_extra(&pair.extra).unwrap();
    let outcomes = Execution::default().map(trials, |t| -> Option<(usize, usize)> {
        let seed = derive_seed(0xC8, t as u64);
        let f = base.variant_learner(&ipp, &ExpMechIpp, Variant::Failed1, seed, None).ok()?;
        let f_prime = prime.variant_learner(&ipp, &ExpMechIpp, Variant::Failed1, seed, None).ok()?;
        let domino = compare_runs(&f, &f_prime);
        let p = params.seeded(seed);
        let a = base.rand_margins(&p, &ExpMechIpp).ok()?;
        let b = prime.rand_margins(&p, &ExpMechIpp).ok()?;
        let part = partition_iterations(&a.trace, &b.trace, &pair.extra).ok()?;
        Some((domino.divergent_iterations.len(), part.e_in.len()))
    });
    let wins = outcomes.iter().flatten().filter(|(f, r)| f > r).count();
    let errored = outcomes.iter().filter(|o| o.is_none()).count();
    let mean = |f: fn(&(usize, usize)) -> usize| {
        outcomes.iter().flatten().map(f).sum::<usize>() as f64 / (trials - errored).max(1) as f64
    };
    let ok = wins as f64 >= 0.95 * trials as f64;
    verdict(
        8,
        "domino demonstration",
        ok,
        format!(
            "failed_1 diverges more in {wins}/{trials} trials ({errored} errored); mean divergent {:.2} vs mean |E_in| {:.2}",
            mean(|o| o.0),
            mean(|o| o.1)
        ),
        started,
    );
}

#[test]
fn criterion_9_scaling_order() {
    let started = Instant::now();
    let config = ExperimentConfig {
        x_max: 1023,
        d: 2,
        target: TargetSpec::Uniform(800),
        distribution: DistributionSpec::TargetUniform { inside: 0.5 },
        learner: LearnerKind::RandMargins,
        solver: SolverKind::ExpMech,
        epsilon: 1.0,
        delta: 1e-6,
        alpha: 0.1,
        beta: 0.1,
        trials: 100,
        seed: 0xC9,
        n: Some(100_000),
        sweep: SweepSpec {
            d: vec![2, 4, 8, 16, 32],
            n: vec![],
            learners: vec![LearnerKind::RandMargins, LearnerKind::Baseline],
        },
        output: OutputSpec::default(),
    };
    let out = run_learning_benchmark(&config, Execution::default()).unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for d in [2, 4, 8, 16, 32] {
        // Errored trials count as error 1.
        let errors = |learner: LearnerKind| -> Vec<f64> {
            out.records
                .iter()
                .filter(|r| r.d == d && r.learner == learner)
                .map(|r| r.generalization_error.unwrap_or(1.0))
                .collect()
        };
        let rm = errors(LearnerKind::RandMargins);
        let base = errors(LearnerKind::Baseline);
        let lower = paired_mean_lower_bound(&base, &rm, 0.99).unwrap();
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        if d >= 16 {
            ok &= lower >= 0.0;
        }
        lines.push(format!(
            "d={d}: rand-margins {:.4} baseline {:.4} (99% lower bound on gap {lower:.4})",
            mean(&rm),
            mean(&base)
        ));
    }
    verdict(9, "scaling order", ok, lines.join("; "), started);
}
