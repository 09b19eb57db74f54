use proptest::prelude::*;

use randmargins::io::{read_dataset, write_dataset};
use randmargins::ipp::{ExpMechIpp, IppParams, OracleMedianIpp};
use randmargins::learner::{learn_rectangle, rand_margins, IndexedDataset, RandMarginsParams};
use randmargins::model::empirical_error;
use randmargins::noise::ceil_shifted_laplace_mass;
use randmargins::{Dataset, GridDomain, LabeledExample};

const X_MAX: u32 = 63;

fn labeled(d: usize) -> impl Strategy<Value = (Vec<u32>, Vec<Vec<u32>>)> {
    (
        prop::collection::vec(0..=X_MAX, d),
        prop::collection::vec(prop::collection::vec(0..=X_MAX, d), 40..300),
    )
}

fn realizable(target: &[u32], points: &[Vec<u32>]) -> Dataset {
    let domain = GridDomain::new(X_MAX, target.len()).unwrap();
    let examples = points.iter().map(|p| {
        let label = p.iter().zip(target).all(|(x, t)| x <= t);
        LabeledExample::new(p.clone(), label)
    });
    Dataset::from_examples(domain, examples).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_solver_never_overshoots_target((target, points) in labeled(3), seed in any::<u64>()) {
        let sample = realizable(&target, &points);
        let ipp = IppParams::new(1.0, 1e-6, 0.1, X_MAX).unwrap();
        let params = RandMarginsParams::with_block_size(ipp, 2, seed).unwrap().fallback(true);
        let outcome = learn_rectangle(&sample, &params, &OracleMedianIpp).unwrap();
        if let Some(rect) = outcome.hypothesis.rectangle() {
            prop_assert!(rect.corner.iter().zip(&target).all(|(c, t)| c <= t));
        }
        let err = empirical_error(&outcome.hypothesis, &sample).unwrap();
        prop_assert!(err.mistakes <= sample.positive_ids().len());
    }

    #[test]
    fn engines_agree((_, points) in labeled(4), seed in any::<u64>()) {
        let domain = GridDomain::new(X_MAX, 4).unwrap();
        let data = Dataset::positives_from_points(domain, points).unwrap();
        let ipp = IppParams::new(1.0, 1e-6, 0.1, X_MAX).unwrap();
        let params = RandMarginsParams::with_block_size(ipp, 3, seed).unwrap();
        let scan = rand_margins(&data, &params, &ExpMechIpp);
        let indexed = IndexedDataset::new(data).rand_margins(&params, &ExpMechIpp);
        prop_assert_eq!(scan.ok(), indexed.ok());
    }

    #[test]
    fn removals_are_disjoint_and_bounded((_, points) in labeled(2), seed in any::<u64>()) {
        let n = points.len();
        let domain = GridDomain::new(X_MAX, 2).unwrap();
        let data = Dataset::positives_from_points(domain, points).unwrap();
        let ipp = IppParams::new(0.5, 1e-6, 0.1, X_MAX).unwrap();
        let params = RandMarginsParams::with_block_size(ipp, 2, seed).unwrap();
        if let Ok(run) = rand_margins(&data, &params, &OracleMedianIpp) {
            let mut seen = std::collections::HashSet::new();
            for it in &run.trace.iterations {
                for id in &it.removed_ids {
                    prop_assert!(seen.insert(*id));
                }
            }
            prop_assert!(run.trace.removed_total() <= n);
        }
    }

    #[test]
    fn csv_round_trip((target, points) in labeled(3)) {
        let sample = realizable(&target, &points);
        let mut buf = Vec::new();
        write_dataset(&mut buf, &sample).unwrap();
        let back = read_dataset(buf.as_slice(), X_MAX).unwrap();
        prop_assert_eq!(back, sample);
    }

    #[test]
    fn rounded_noise_mass_is_one(mu in -50.0f64..50.0, b in 0.5f64..20.0) {
        let total = ceil_shifted_laplace_mass(mu, b, -100_000, 100_000);
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn same_seed_same_run() {
    let domain = GridDomain::new(1023, 5).unwrap();
    let pts = (0..5000u32).map(|i| (0..5).map(|a| i.wrapping_mul(40503).rotate_left(a * 3) % 1024).collect::<Vec<_>>());
    let data = IndexedDataset::new(Dataset::positives_from_points(domain, pts).unwrap());
    let ipp = IppParams::new(1.0, 1e-6, 0.1, 1023).unwrap();
    let params = RandMarginsParams::new(ipp, &ExpMechIpp, 17).unwrap();
    let a = data.learn(&params, &ExpMechIpp).unwrap();
    let b = data.learn(&params, &ExpMechIpp).unwrap();
    assert_eq!(a, b);
    let c = data.learn(&params.seeded(18), &ExpMechIpp).unwrap();
    assert_ne!(a.run.map(|r| r.trace), c.run.map(|r| r.trace));
}
