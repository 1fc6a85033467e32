//! Exact and simulated analysis of the two envelope problem.
//!
//! Two envelopes hold `X` and `2X`. A player who opens one and sees `A`
//! reasons that the other holds `A/2` or `2A` with equal probability and so is
//! worth `1.25A`. This crate computes what each observer of the game believes
//! and what is actually true, with exact rational money throughout, and checks
//! the exact answers against seeded Monte Carlo runs.
//!
//! * [`money`]: exact amounts, gains and ratios.
//! * [`game`]: envelope pairs, roles, priors and single plays.
//! * [`beliefs`]: the naive player, the third party and the omniscient runner.
//! * [`analysis`]: the aggregate `1.875X / 1.5X = 1.25` bias.
//! * [`strategies`]: switch/stay rules.
//! * [`simulate`]: the enumeration oracle and the Monte Carlo harness.

pub mod analysis;
pub mod beliefs;
pub mod error;
pub mod game;
pub mod money;
pub mod simulate;
pub mod strategies;

pub use analysis::{derive_aggregate_ratio, verify_ratio_against_pair, RatioDerivation};
pub use beliefs::{
    estimation_error, naive_gain_distribution, naive_switch_ev, omniscient_gain,
    third_party_envelope_ev, third_party_gain_distribution, GainDistribution, Outcome, Perspective,
    PerspectiveReport,
};
pub use error::{Error, Result};
pub use game::{
    choose, deal, observed, resolve, Decision, EnvelopePair, Prior, PriorEntry, Role, Trial,
};
pub use money::{delta, scale, GainDelta, Money, Ratio};
pub use simulate::{
    compare, exact_expected_payoff, exact_payoff_variance, run, PairedSummary, RunSummary,
    SimConfig, TrialRunner,
};
pub use strategies::{decide, Strategy, SwitchProbability};
