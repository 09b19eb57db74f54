use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::sha256_hex;
use crate::ipp::{IppParams, SolverKind};
use crate::learner::Variant;
use crate::model::GridDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    RandMargins,
    Baseline,
    #[serde(rename = "failed-1", alias = "failed_1")]
    Failed1,
    #[serde(rename = "failed-2", alias = "failed_2")]
    Failed2,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::RandMargins => "rand-margins",
            LearnerKind::Baseline => "baseline",
            LearnerKind::Failed1 => "failed-1",
            LearnerKind::Failed2 => "failed-2",
        }
    }

    pub fn variant(self) -> Option<Variant> {
        match self {
            LearnerKind::Failed1 => Some(Variant::Failed1),
            LearnerKind::Failed2 => Some(Variant::Failed2),
            _ => None,
        }
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rand-margins" => Ok(LearnerKind::RandMargins),
            "baseline" => Ok(LearnerKind::Baseline),
            "failed-1" | "failed_1" => Ok(LearnerKind::Failed1),
            "failed-2" | "failed_2" => Ok(LearnerKind::Failed2),
            other => Err(Error::Parse(format!("unknown learner {other:?}"))),
        }
    }
}

/// Where examples come from. Labels are always assigned by the target
/// rectangle, so every sample is realizable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionSpec {
    /// With probability `inside`, uniform on the target rectangle; otherwise
    /// uniform on the rest of the domain.
    TargetUniform { inside: f64 },
    /// With probability `corner_mass`, exactly the target corner; otherwise
    /// uniform outside the target rectangle.
    CornerMass { corner_mass: f64 },
    /// An explicit distribution in the CSV format of [`crate::io`].
    File { path: PathBuf },
}

/// Target corner: one value for every axis, or one per axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Uniform(u32),
    PerAxis(Vec<u32>),
}

impl TargetSpec {
    pub fn corner(&self, d: usize) -> Result<Vec<u32>> {
        match self {
            TargetSpec::Uniform(v) => Ok(vec![*v; d]),
            TargetSpec::PerAxis(c) if c.len() == d => Ok(c.clone()),
            TargetSpec::PerAxis(c) => Err(Error::DimensionMismatch {
                expected: d,
                got: c.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub d: Vec<usize>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub learners: Vec<LearnerKind>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

/// A declarative experiment, read from TOML.
///
/// ```toml
/// x_max = 1000000
/// d = 8
/// target = 500000          # or one value per axis
/// learner = "rand-margins" # rand-margins | baseline | failed-1 | failed-2
/// solver = "exp-mech"      # exp-mech | oracle-median
/// epsilon = 1.0
/// delta = 1e-6
/// alpha = 0.1
/// beta = 0.1
/// trials = 50
/// seed = 7
/// # n = 20000            # default: required_sample_size
///
/// [distribution]
/// kind = "target-uniform"
/// inside = 0.5
///
/// [sweep]                # optional
/// d = [2, 4, 8]
/// n = [10000, 20000]
/// learners = ["rand-margins", "baseline"]
///
/// [output]
/// dir = "results"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub x_max: u32,
    pub d: usize,
    pub target: TargetSpec,
    pub distribution: DistributionSpec,
    #[serde(default = "default_learner")]
    pub learner: LearnerKind,
    #[serde(default = "default_solver")]
    pub solver: SolverKind,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub trials: usize,
    pub seed: u64,
    pub n: Option<usize>,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_learner() -> LearnerKind {
    LearnerKind::RandMargins
}

fn default_solver() -> SolverKind {
    SolverKind::ExpMech
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn ipp(&self) -> Result<IppParams> {
        IppParams::new(self.epsilon, self.delta, self.beta, self.x_max)
    }

    pub fn dims(&self) -> Vec<usize> {
        if self.sweep.d.is_empty() {
            vec![self.d]
        } else {
            self.sweep.d.clone()
        }
    }

    pub fn learners(&self) -> Vec<LearnerKind> {
        if self.sweep.learners.is_empty() {
            vec![self.learner]
        } else {
            self.sweep.learners.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ipp()?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParams(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be positive".into()));
        }
        for d in self.dims() {
            let domain = GridDomain::new(self.x_max, d)?;
            domain.check_point(&self.target.corner(d)?)?;
        }
        if self.sweep.n.contains(&0) || self.n == Some(0) {
            return Err(Error::InvalidParams("sample sizes must be positive".into()));
        }
        match &self.distribution {
            DistributionSpec::TargetUniform { inside } if !(0.0..=1.0).contains(inside) => {
                Err(Error::InvalidDistribution(format!("inside mass {inside} outside [0, 1]")))
            }
            DistributionSpec::CornerMass { corner_mass } if !(0.0..=1.0).contains(corner_mass) => {
                Err(Error::InvalidDistribution(format!("corner mass {corner_mass} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        sha256_hex(&json)
    }
}
