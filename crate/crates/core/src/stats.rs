//! Exact binomial confidence bounds and small summary statistics.

use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, StudentsT};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// `Pr[Bin(n, p) >= k]`.
fn upper_tail(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        1.0
    } else if k > n {
        0.0
    } else {
        beta_reg(k as f64, (n - k + 1) as f64, p)
    }
}

fn bisect(mut lo: f64, mut hi: f64, mut below: impl FnMut(f64) -> bool) -> f64 {
    // `below(x)` is true on [lo, root) and false on (root, hi].
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check(k: u64, n: u64, level: f64) -> Result<()> {
    if n == 0 || k > n {
        return Err(Error::InvalidParams(format!("need 0 <= k <= n, n > 0; got k={k}, n={n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParams(format!("confidence must lie in (0, 1), got {level}")));
    }
    Ok(())
}

/// One-sided Clopper-Pearson upper bound: the largest `p` with
/// `Pr[Bin(n, p) <= k] >= 1 - level`.
pub fn clopper_pearson_upper(k: u64, n: u64, level: f64) -> Result<f64> {
    check(k, n, level)?;
    if k == n {
        return Ok(1.0);
    }
    let alpha = 1.0 - level;
    Ok(bisect(0.0, 1.0, |p| 1.0 - upper_tail(k + 1, n, p) > alpha))
}

/// One-sided Clopper-Pearson lower bound: the smallest `p` with
/// `Pr[Bin(n, p) >= k] >= 1 - level`.
pub fn clopper_pearson_lower(k: u64, n: u64, level: f64) -> Result<f64> {
    check(k, n, level)?;
    if k == 0 {
        return Ok(0.0);
    }
    let alpha = 1.0 - level;
    Ok(bisect(0.0, 1.0, |p| upper_tail(k, n, p) < alpha))
}

/// Two-sided interval at confidence `level`.
pub fn clopper_pearson(k: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    let one_sided = 1.0 - (1.0 - level) / 2.0;
    Ok((
        clopper_pearson_lower(k, n, one_sided)?,
        clopper_pearson_upper(k, n, one_sided)?,
    ))
}

/// Smallest `c` with `Pr[Bin(n, p) > c] <= alpha`.
pub fn binomial_upper_quantile(n: u64, p: f64, alpha: f64) -> Result<u64> {
    let dist = Binomial::new(p, n).map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok((0..=n).find(|&c| dist.sf(c) <= alpha).unwrap_or(n))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// One-sided lower confidence bound on `mean(a - b)` from paired samples,
/// using Student's t.
pub fn paired_mean_lower_bound(a: &[f64], b: &[f64], level: f64) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidParams("need two equal-length samples of size >= 2".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len() as f64;
    let se = (variance(&diffs) / n).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| Error::InvalidParams(e.to_string()))?
        .inverse_cdf(level);
    Ok(mean(&diffs) - t * se)
}
