//! The adaptive three-outcome game behind the `|E_in|` tail bound.
//!
//! Each round the adversary picks `(q, q̄)` with `0 <= q <= 1/2` and
//! `q/4 <= q̄ <= 1 - q`; then `X = 1` with probability `q`, `X = 2` with
//! probability `q̄`, otherwise `X = 0`. The score counts rounds with `X = 1`
//! before the first `X = 2`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::seed::{derive_seed, rng_from_seed};
use crate::stats::clopper_pearson_upper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Constant { q: f64, q_bar: f64 },
    /// `q̄ = q/4`, the smallest failure probability allowed.
    Boundary { q: f64 },
    /// Plays `(1/2, 1/8)` until the score exceeds `target`, then `(0, 0)`.
    Greedy { target: u32 },
    /// `(0.4, 0.1)` right after an `X = 1`, otherwise `(1/2, 1/8)`.
    Alternating,
}

impl Strategy {
    fn choose(&self, history: &[u8], score: u32) -> (f64, f64) {
        match *self {
            Strategy::Constant { q, q_bar } => (q, q_bar),
            Strategy::Boundary { q } => (q, q / 4.0),
            Strategy::Greedy { target } => {
                if score > target {
                    (0.0, 0.0)
                } else {
                    (0.5, 0.125)
                }
            }
            Strategy::Alternating => match history.last() {
                Some(1) => (0.4, 0.1),
                _ => (0.5, 0.125),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            Strategy::Constant { q, q_bar } => format!("constant(q={q}, q_bar={q_bar})"),
            Strategy::Boundary { q } => format!("boundary(q={q})"),
            Strategy::Greedy { target } => format!("greedy(target={target})"),
            Strategy::Alternating => "alternating".to_string(),
        }
    }
}

fn validate(round: usize, q: f64, q_bar: f64) -> Result<()> {
    let eps = 1e-12;
    let ok = (0.0..=0.5).contains(&q) && q_bar >= q / 4.0 - eps && q_bar <= 1.0 - q + eps;
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidStrategy { round, q, q_bar })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub rounds: usize,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameEpisode {
    /// Outcomes up to and including the first `X = 2`; later rounds cannot
    /// change the score.
    pub outcomes: Vec<u8>,
    pub score: u32,
}

impl GameEpisode {
    /// `Z_i = 1` iff no `X_j = 2` for `j <= i`, over all `rounds`.
    pub fn alive(&self, rounds: usize) -> Vec<bool> {
        let mut alive = true;
        (0..rounds)
            .map(|i| {
                if self.outcomes.get(i) == Some(&2) {
                    alive = false;
                }
                alive
            })
            .collect()
    }
}

pub fn play_episode<R: RngCore + ?Sized>(config: &GameConfig, rng: &mut R) -> Result<GameEpisode> {
    let mut outcomes = Vec::new();
    let mut score = 0u32;
    for round in 0..config.rounds {
        let (q, q_bar) = config.strategy.choose(&outcomes, score);
        validate(round, q, q_bar)?;
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let x = if u < q {
            1
        } else if u < q + q_bar {
            2
        } else {
            0
        };
        outcomes.push(x);
        match x {
            1 => score += 1,
            2 => break,
            _ => {}
        }
    }
    Ok(GameEpisode { outcomes, score })
}

/// Expected score of a constant strategy: `q (1 - (1 - q̄)^m) / q̄`.
pub fn constant_expected_score(q: f64, q_bar: f64, rounds: usize) -> f64 {
    if q_bar == 0.0 {
        q * rounds as f64
    } else {
        q * (1.0 - (1.0 - q_bar).powi(rounds as i32)) / q_bar
    }
}

/// `e^{-γ/5 + 6}`.
pub fn game_tail_bound(gamma: f64) -> f64 {
    (-gamma / 5.0 + 6.0).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub gamma: f64,
    pub exceedances: u64,
    pub estimate: f64,
    /// One-sided Clopper-Pearson upper bound at the report's confidence.
    pub upper: f64,
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub strategy: String,
    pub rounds: usize,
    pub episodes: usize,
    pub confidence: f64,
    pub mean_score: f64,
    pub max_score: u32,
    pub tails: Vec<TailEstimate>,
}

/// Plays `episodes` independent episodes (episode `e` seeded by
/// `derive_seed(seed, e)`) and estimates `Pr[score > γ]` for each `γ`.
pub fn adversary_game_simulator(
    config: &GameConfig,
    episodes: usize,
    gammas: &[f64],
    confidence: f64,
    seed: u64,
    exec: Execution,
) -> Result<GameReport> {
    if episodes == 0 {
        return Err(Error::InsufficientTrials { got: 0, needed: 1 });
    }
    let scores = exec
        .map(episodes, |e| {
            let mut rng = rng_from_seed(derive_seed(seed, e as u64));
            play_episode(config, &mut rng).map(|ep| ep.score)
        })
        .into_iter()
        .collect::<Result<Vec<u32>>>()?;
    let mut tails = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let exceedances = scores.iter().filter(|&&s| s as f64 > gamma).count() as u64;
        let upper = clopper_pearson_upper(exceedances, episodes as u64, confidence)?;
        let bound = game_tail_bound(gamma);
        tails.push(TailEstimate {
            gamma,
            exceedances,
            estimate: exceedances as f64 / episodes as f64,
            upper,
            bound,
            within_bound: upper <= bound,
        });
    }
    Ok(GameReport {
        strategy: config.strategy.name(),
        rounds: config.rounds,
        episodes,
        confidence,
        mean_score: scores.iter().map(|&s| s as f64).sum::<f64>() / episodes as f64,
        max_score: scores.iter().copied().max().unwrap_or(0),
        tails,
    })
}
