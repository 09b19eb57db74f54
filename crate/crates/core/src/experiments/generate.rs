//! Realizable synthetic populations with exact generalization error.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::io::read_distribution;
use crate::model::{generalization_error, Dataset, ExplicitDistribution, GridDomain, Hypothesis, LabeledExample};

use super::config::{DistributionSpec, ExperimentConfig};

#[derive(Debug, Clone)]
enum Shape {
    /// Mixture of a component on the target (weight `inside`) and the uniform
    /// distribution on the rest of the domain. `point` puts the target
    /// component on the corner alone, otherwise it is uniform on the target.
    Mixture { inside: f64, point: bool },
    Explicit {
        dist: ExplicitDistribution,
        cumulative: Vec<f64>,
    },
}

/// A labeled population over the grid, labeled by the target rectangle.
#[derive(Debug, Clone)]
pub struct Population {
    domain: GridDomain,
    target: Vec<u32>,
    shape: Shape,
}

fn uniform_mass(corner: &[u32], x_max: u32) -> f64 {
    let side = x_max as f64 + 1.0;
    corner.iter().map(|&c| (c as f64 + 1.0) / side).product()
}

fn meet(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect()
}

impl Population {
    pub fn new(domain: GridDomain, target: Vec<u32>, spec: &DistributionSpec) -> Result<Self> {
        domain.check_point(&target)?;
        let outside = 1.0 - uniform_mass(&target, domain.x_max);
        let shape = match spec {
            DistributionSpec::TargetUniform { inside } => Shape::Mixture {
                inside: *inside,
                point: false,
            },
            DistributionSpec::CornerMass { corner_mass } => Shape::Mixture {
                inside: *corner_mass,
                point: true,
            },
            DistributionSpec::File { path } => {
                let raw = read_distribution(std::fs::File::open(path)?, domain.x_max)?;
                if raw.domain() != domain {
                    return Err(Error::InvalidDistribution(format!(
                        "file domain {:?} does not match configured {:?}",
                        raw.domain(),
                        domain
                    )));
                }
                let h = Hypothesis::Rectangle(crate::model::OriginRectangle::new(target.clone()));
                let support = raw
                    .support()
                    .iter()
                    .map(|(ex, p)| Ok((LabeledExample::new(ex.coords.clone(), h.predict(&ex.coords)?), *p)))
                    .collect::<Result<Vec<_>>>()?;
                let dist = ExplicitDistribution::new(domain, support)?;
                let cumulative = dist.cumulative();
                Shape::Explicit { dist, cumulative }
            }
        };
        if let Shape::Mixture { inside, .. } = shape {
            if inside < 1.0 && outside <= 0.0 {
                return Err(Error::InvalidDistribution(
                    "the target covers the domain, so there is nothing outside it".into(),
                ));
            }
        }
        Ok(Self { domain, target, shape })
    }

    pub fn from_config(config: &ExperimentConfig, d: usize) -> Result<Self> {
        let domain = GridDomain::new(config.x_max, d)?;
        Self::new(domain, config.target.corner(d)?, &config.distribution)
    }

    pub fn domain(&self) -> GridDomain {
        self.domain
    }

    pub fn target(&self) -> &[u32] {
        &self.target
    }

    fn uniform_outside<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        // Pick the first axis that leaves the target with the right
        // probability, then fill the rest.
        let x_max = self.domain.x_max;
        let side = x_max as f64 + 1.0;
        let fracs: Vec<f64> = self.target.iter().map(|&c| (c as f64 + 1.0) / side).collect();
        let mut weights = Vec::with_capacity(fracs.len());
        let mut prefix = 1.0;
        for f in &fracs {
            weights.push(prefix * (1.0 - f));
            prefix *= f;
        }
        let total: f64 = weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        let mut first = weights.len() - 1;
        for (j, w) in weights.iter().enumerate() {
            if u < *w {
                first = j;
                break;
            }
            u -= w;
        }
        while self.target[first] == x_max {
            first -= 1;
        }
        self.target
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                if j < first {
                    rng.random_range(0..=c)
                } else if j == first {
                    rng.random_range(c + 1..=x_max)
                } else {
                    rng.random_range(0..=x_max)
                }
            })
            .collect()
    }

    /// `n` independent labeled draws.
    pub fn sample<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Dataset> {
        let d = self.domain.d;
        let mut coords = Vec::with_capacity(n * d);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            match &self.shape {
                Shape::Mixture { inside, point } => {
                    if rng.random::<f64>() < *inside {
                        if *point {
                            coords.extend_from_slice(&self.target);
                        } else {
                            coords.extend(self.target.iter().map(|&c| rng.random_range(0..=c)));
                        }
                        labels.push(true);
                    } else {
                        coords.extend(self.uniform_outside(rng));
                        labels.push(false);
                    }
                }
                Shape::Explicit { dist, cumulative } => {
                    let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                    let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
                    let ex = &dist.support()[idx].0;
                    coords.extend_from_slice(&ex.coords);
                    labels.push(ex.label);
                }
            }
        }
        Dataset::from_parts(self.domain, coords, labels)
    }

    /// Exact probability that `h` mislabels a draw.
    pub fn generalization_error(&self, h: &Hypothesis) -> Result<f64> {
        if h.dim() != self.domain.d {
            return Err(Error::DimensionMismatch {
                expected: self.domain.d,
                got: h.dim(),
            });
        }
        match &self.shape {
            Shape::Explicit { dist, .. } => generalization_error(h, dist),
            Shape::Mixture { inside, point } => {
                let x_max = self.domain.x_max;
                let Some(rect) = h.rectangle() else {
                    // Every mislabeled point is a positive.
                    return Ok(*inside);
                };
                let in_target = if *point {
                    if rect.contains(&self.target) {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    1.0 - uniform_mass(&meet(&rect.corner, &self.target), x_max) / uniform_mass(&self.target, x_max)
                };
                let target_mass = uniform_mass(&self.target, x_max);
                let out_target = if target_mass >= 1.0 {
                    0.0
                } else {
                    let h_mass = uniform_mass(&rect.corner, x_max);
                    let both = uniform_mass(&meet(&rect.corner, &self.target), x_max);
                    ((h_mass - both) / (1.0 - target_mass)).max(0.0)
                };
                Ok(inside * in_target + (1.0 - inside) * out_target)
            }
        }
    }
}

/// Draws `n` examples for dimension `d` of `config`.
pub fn generate_synthetic<R: RngCore + ?Sized>(
    config: &ExperimentConfig,
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<Dataset> {
    Population::from_config(config, d)?.sample(n, rng)
}
