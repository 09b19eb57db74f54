//! Neighboring pairs built to stress particular parts of the analysis.

use rand::Rng;

use crate::error::Result;
use crate::model::{Dataset, GridDomain, LabeledExample};
use crate::seed::rng_from_seed;

use super::partition::NeighboringPair;

/// Pair where, on every axis, the extra point sits right below a group of
/// `group` points and above `filler` points, so it falls inside the noisy top
/// block about half the time.
///
/// Axis `i` owns `group` points with coordinate `i` in `(mid, x_max]` and
/// `filler` points with coordinate `i` in `[1, mid)`, all other coordinates
/// 0, where `mid = (x_max + 1) / 2`. The extra point is `(mid, ..., mid)`.
/// Choose `group = ⌈μ⌉`.
pub fn concentration_pair(
    d: usize,
    x_max: u32,
    group: usize,
    filler: usize,
    seed: u64,
) -> Result<NeighboringPair> {
    let domain = GridDomain::new(x_max, d)?;
    let mid = x_max.div_ceil(2);
    let mut rng = rng_from_seed(seed);
    let mut points = Vec::with_capacity(d * (group + filler));
    for axis in 0..d {
        for _ in 0..group {
            let mut p = vec![0; d];
            p[axis] = rng.random_range(mid + 1..=x_max);
            points.push(p);
        }
        for _ in 0..filler {
            let mut p = vec![0; d];
            p[axis] = rng.random_range(1..mid);
            points.push(p);
        }
    }
    let base = Dataset::positives_from_points(domain, points)?;
    NeighboringPair::new(base, LabeledExample::positive(vec![mid; d]))
}

/// Pair on which fixed-size deletion propagates the extra point's influence
/// through every axis.
///
/// For each axis `j`, `block - 1` points sit at 1000 on axis `j`; a link point
/// has 990 on axis `j` and 1010 on axis `j + 1`; everything else is 500. The
/// extra point has 1010 on the first axis. `bulk` points are uniform on
/// `[100, 900]^d`. Needs `x_max >= 1010`.
pub fn domino_chain_pair(
    d: usize,
    x_max: u32,
    block: usize,
    bulk: usize,
    seed: u64,
) -> Result<NeighboringPair> {
    let domain = GridDomain::new(x_max, d)?;
    let mut rng = rng_from_seed(seed);
    let mut points = Vec::with_capacity(bulk + d * block);
    for _ in 0..bulk {
        points.push((0..d).map(|_| rng.random_range(100..=900)).collect());
    }
    for j in 0..d {
        for _ in 0..block.saturating_sub(1) {
            let mut p = vec![500; d];
            p[j] = 1000;
            points.push(p);
        }
        if j + 1 < d {
            let mut link = vec![500; d];
            link[j] = 990;
            link[j + 1] = 1010;
            points.push(link);
        }
    }
    let base = Dataset::positives_from_points(domain, points)?;
    let mut extra = vec![500; d];
    extra[0] = 1010;
    NeighboringPair::new(base, LabeledExample::positive(extra))
}

/// One-dimensional pairs for exact audits, each with at least `min_size`
/// base points: constant data with the extra point far away or on top of it,
/// spread data with the extra point at either end or in the middle, two
/// clusters, and the smallest admissible sizes.
pub fn adversarial_pairs_1d(x_max: u32, min_size: usize) -> Result<Vec<NeighboringPair>> {
    let domain = GridDomain::new(x_max, 1)?;
    let top = x_max;
    let mid = x_max / 2;
    let mut specs: Vec<(Vec<u32>, u32)> = Vec::new();
    for &n in &[min_size, min_size + 1, 2 * min_size, 8 * min_size] {
        specs.push((vec![0; n], top));
        specs.push((vec![top; n], 0));
        specs.push((vec![mid; n], mid));
        specs.push(((0..n).map(|i| (i as u64 * top as u64 / n as u64) as u32).collect(), top));
        specs.push(((0..n).map(|i| (i as u64 * top as u64 / n as u64) as u32).collect(), 0));
    }
    for &n in &[min_size, 3 * min_size] {
        let two: Vec<u32> = (0..n).map(|i| if i % 2 == 0 { 1 } else { top - 1 }).collect();
        specs.push((two.clone(), mid));
        specs.push((two, top));
        let skew: Vec<u32> = (0..n).map(|i| if i < n - 1 { 2 } else { top }).collect();
        specs.push((skew, top));
    }
    specs
        .into_iter()
        .map(|(values, extra)| {
            let base = Dataset::positives_from_points(domain, values.into_iter().map(|v| vec![v]))?;
            NeighboringPair::new(base, LabeledExample::positive(vec![extra]))
        })
        .collect()
}
