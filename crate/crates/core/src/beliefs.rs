//! What each observer believes switching is worth.
//!
//! Three observers look at the same trial:
//!
//! * the naive player, who opened an envelope holding `A` and gives equal
//!   weight to the other holding `A/2` or `2A`;
//! * a third party who knows both amounts but not which one the player holds;
//! * the game runner, who knows both amounts and the held role.
//!
//! The naive player's belief puts weight on an amount that is not in play,
//! and [`estimation_error`] measures by how much that skews the believed
//! value of the other envelope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{observed, EnvelopePair, Role};
use crate::money::{delta, GainDelta, Money, Ratio};

/// Weight the naive player puts on "the other envelope holds half of mine".
#[cfg(not(feature = "fault-injection"))]
const HALF_HYPOTHESIS_WEIGHT: (u64, u64) = (1, 2);
#[cfg(feature = "fault-injection")]
const HALF_HYPOTHESIS_WEIGHT: (u64, u64) = (51, 100);

fn half_hypothesis_weight() -> Ratio {
    Ratio::new(HALF_HYPOTHESIS_WEIGHT.0, HALF_HYPOTHESIS_WEIGHT.1).expect("nonzero denominator")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub delta: GainDelta,
    pub prob: Ratio,
}

/// Finite distribution of the gain from switching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainDistribution {
    outcomes: Vec<Outcome>,
}

impl GainDistribution {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        let total = outcomes
            .iter()
            .fold(Ratio::zero(), |acc, o| acc.add(&o.prob));
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(GainDistribution { outcomes })
    }

    fn two_point(a: GainDelta, b: GainDelta) -> Self {
        GainDistribution {
            outcomes: vec![
                Outcome {
                    delta: a,
                    prob: Ratio::half(),
                },
                Outcome {
                    delta: b,
                    prob: Ratio::half(),
                },
            ],
        }
    }

    fn certain(delta: GainDelta) -> Self {
        GainDistribution {
            outcomes: vec![Outcome {
                delta,
                prob: Ratio::one(),
            }],
        }
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn expected_gain(&self) -> GainDelta {
        self.outcomes.iter().map(|o| o.delta.scale(&o.prob)).sum()
    }

    /// Probability assigned to `delta` (zero if absent).
    pub fn prob_of(&self, delta: &GainDelta) -> Ratio {
        self.outcomes
            .iter()
            .filter(|o| &o.delta == delta)
            .fold(Ratio::zero(), |acc, o| acc.add(&o.prob))
    }
}

impl<'de> Deserialize<'de> for GainDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            outcomes: Vec<Outcome>,
        }
        GainDistribution::new(Raw::deserialize(deserializer)?.outcomes)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Perspective {
    NaivePlayer,
    ThirdParty,
    Omniscient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerspectiveReport {
    pub perspective: Perspective,
    #[serde(flatten)]
    pub gain_distribution: GainDistribution,
    pub expected_gain: GainDelta,
    pub other_envelope_ev: Money,
}

impl PerspectiveReport {
    /// The opened-envelope player's view of switching away from `observed`.
    pub fn naive_player(observed: &Money) -> Result<Self> {
        let gain_distribution = naive_gain_distribution(observed)?;
        Ok(PerspectiveReport {
            perspective: Perspective::NaivePlayer,
            expected_gain: gain_distribution.expected_gain(),
            other_envelope_ev: naive_switch_ev(observed)?,
            gain_distribution,
        })
    }

    /// The value-knowing third party. Its envelope value is the mean of the
    /// pair and applies to either envelope; it is computed separately from
    /// the (zero) expected gain.
    pub fn third_party(pair: &EnvelopePair) -> Self {
        let gain_distribution = third_party_gain_distribution(pair);
        PerspectiveReport {
            perspective: Perspective::ThirdParty,
            expected_gain: gain_distribution.expected_gain(),
            other_envelope_ev: third_party_envelope_ev(pair),
            gain_distribution,
        }
    }

    pub fn omniscient(pair: &EnvelopePair, held: Role) -> Self {
        PerspectiveReport {
            perspective: Perspective::Omniscient,
            gain_distribution: omniscient_gain(pair, held),
            expected_gain: delta(pair.amount(held), pair.amount(held.other())),
            other_envelope_ev: observed(pair, held.other()),
        }
    }
}

/// The naive player's value for the other envelope: `.5 * (A/2) + .5 * (2A)`.
pub fn naive_switch_ev(observed: &Money) -> Result<Money> {
    if !observed.is_positive() {
        return Err(Error::ZeroAmount);
    }
    let w_half = half_hypothesis_weight();
    let w_double = Ratio::one()
        .checked_sub(&w_half)
        .expect("weight at most one");
    let if_half = observed.scale(&Ratio::half()).scale(&w_half);
    let if_double = observed.scale(&Ratio::integer(2)).scale(&w_double);
    Ok(&if_half + &if_double)
}

/// `{-A/2 with prob 1/2, +A with prob 1/2}` for observed amount `A`.
pub fn naive_gain_distribution(observed: &Money) -> Result<GainDistribution> {
    if !observed.is_positive() {
        return Err(Error::ZeroAmount);
    }
    let w_half = half_hypothesis_weight();
    let w_double = Ratio::one()
        .checked_sub(&w_half)
        .expect("weight at most one");
    let lose = delta(observed, &observed.scale(&Ratio::half()));
    let gain = delta(observed, &observed.scale(&Ratio::integer(2)));
    Ok(GainDistribution {
        outcomes: vec![
            Outcome {
                delta: lose,
                prob: w_half,
            },
            Outcome {
                delta: gain,
                prob: w_double,
            },
        ],
    })
}

/// Switching gains or loses the smaller amount with equal probability.
pub fn third_party_gain_distribution(pair: &EnvelopePair) -> GainDistribution {
    GainDistribution::two_point(
        GainDelta::gain(pair.smaller()),
        GainDelta::loss(pair.smaller()),
    )
}

/// Mean of the two envelopes, `1.5 * smaller`.
pub fn third_party_envelope_ev(pair: &EnvelopePair) -> Money {
    pair.smaller()
        .scale(&Ratio::new(3, 2).expect("nonzero denominator"))
}

pub fn omniscient_gain(pair: &EnvelopePair, held: Role) -> GainDistribution {
    GainDistribution::certain(delta(pair.amount(held), pair.amount(held.other())))
}

/// Believed value of the other envelope minus what it actually holds.
/// Positive means the player overestimates.
pub fn estimation_error(pair: &EnvelopePair, held: Role) -> Result<GainDelta> {
    let believed = naive_switch_ev(pair.amount(held))?;
    Ok(delta(pair.amount(held.other()), &believed))
}
