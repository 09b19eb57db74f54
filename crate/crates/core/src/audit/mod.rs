//! Exact and statistical checks of the learner's privacy and concentration
//! behavior.

pub mod concentration;
pub mod divergence;
pub mod exact;
pub mod game;
pub mod montecarlo;
pub mod pairs;
pub mod partition;
pub mod report;

pub use concentration::{concentration_experiment, ConcentrationReport, MIN_CONCENTRATION_TRIALS};
pub use divergence::{hockey_stick_divergence, tightest_epsilon, two_sided_hockey_stick};
pub use exact::{exact_rand_margins_distribution_1d, ExactDistribution};
pub use game::{
    adversary_game_simulator, constant_expected_score, game_tail_bound, play_episode, GameConfig, GameEpisode,
    GameReport, Strategy, TailEstimate,
};
pub use montecarlo::{monte_carlo_privacy_lower_bound, McConfig, McReport, MIN_MC_TRIALS};
pub use pairs::{adversarial_pairs_1d, concentration_pair, domino_chain_pair};
pub use partition::{
    paired_trace_check, partition_iterations, IterationPartition, NeighboringPair, PairedCheck,
};
pub use report::{exact_pair_audit, AuditReport, ExactAudit, ExactPairResult, Verdict};
