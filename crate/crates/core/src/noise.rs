//! Laplace noise and the exact law of the rounded noisy block size.

use rand::RngCore;

use crate::error::{Error, Result};

/// `Lap(mean, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laplace {
    mean: f64,
    scale: f64,
}

impl Laplace {
    pub fn new(mean: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !mean.is_finite() {
            return Err(Error::InvalidParams(format!(
                "Laplace needs finite mean and positive scale, got ({mean}, {scale})"
            )));
        }
        Ok(Self { mean, scale })
    }

    pub fn centered(scale: f64) -> Result<Self> {
        Self::new(0.0, scale)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// One draw by inverse CDF. Consumes exactly one `u64` from `rng`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        // Uniform on the open interval (0, 1).
        let u = ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        let centered = u - 0.5;
        self.mean - self.scale * centered.signum() * (1.0 - 2.0 * centered.abs()).ln()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        laplace_cdf(x - self.mean, self.scale)
    }
}

/// CDF of `Lap(0, b)`.
pub fn laplace_cdf(x: f64, b: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    }
}

/// `Pr[ceil(mu + w) = k]` for `w ~ Lap(0, b)`, i.e. `F(k - mu) - F(k - 1 - mu)`.
///
/// Evaluated without cancellation in either tail.
pub fn ceil_shifted_laplace_pmf(mu: f64, b: f64, k: i64) -> f64 {
    let hi = k as f64 - mu;
    let lo = hi - 1.0;
    if lo >= 0.0 {
        0.5 * ((-lo / b).exp() - (-hi / b).exp())
    } else if hi <= 0.0 {
        0.5 * ((hi / b).exp() - (lo / b).exp())
    } else {
        1.0 - 0.5 * (-hi / b).exp() - 0.5 * (lo / b).exp()
    }
}

/// `Pr[ceil(mu + w) <= k]`.
pub fn ceil_shifted_laplace_cdf(mu: f64, b: f64, k: i64) -> f64 {
    laplace_cdf(k as f64 - mu, b)
}

/// `Pr[lo <= ceil(mu + w) <= hi]`, evaluated from whichever tail is smaller.
pub fn ceil_shifted_laplace_mass(mu: f64, b: f64, lo: i64, hi: i64) -> f64 {
    if hi < lo {
        return 0.0;
    }
    let upper = hi as f64 - mu;
    let lower = (lo - 1) as f64 - mu;
    if lower >= 0.0 {
        0.5 * ((-lower / b).exp() - (-upper / b).exp())
    } else if upper <= 0.0 {
        0.5 * ((upper / b).exp() - (lower / b).exp())
    } else {
        laplace_cdf(upper, b) - laplace_cdf(lower, b)
    }
}
