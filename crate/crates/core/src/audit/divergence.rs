/// `Σ_v max(0, P(v) - e^ε Q(v))` over a common enumeration of outcomes.
pub fn hockey_stick_divergence(p: &[f64], q: &[f64], epsilon: f64) -> f64 {
    assert_eq!(p.len(), q.len(), "pmfs must share an enumeration");
    let scale = epsilon.exp();
    p.iter()
        .zip(q)
        .map(|(&pv, &qv)| {
            if qv == 0.0 {
                pv.max(0.0)
            } else {
                (pv - scale * qv).max(0.0)
            }
        })
        .sum()
}

/// The larger of the two directed divergences.
pub fn two_sided_hockey_stick(p: &[f64], q: &[f64], epsilon: f64) -> f64 {
    hockey_stick_divergence(p, q, epsilon).max(hockey_stick_divergence(q, p, epsilon))
}

/// Smallest `ε >= 0` with two-sided divergence at most `delta`, to within
/// `1e-9`; infinite if no finite `ε` suffices.
pub fn tightest_epsilon(p: &[f64], q: &[f64], delta: f64) -> f64 {
    let ok = |eps: f64| two_sided_hockey_stick(p, q, eps) <= delta;
    if ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e4 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
