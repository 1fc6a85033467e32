//! The aggregate bias of the naive argument, in multiples of the smaller amount `X`.
//!
//! Holding `X`, the player values the other envelope at `1.25X`; holding `2X`,
//! at `2.5X`. Averaged over the two equally likely picks that is `1.875X`,
//! against an objective average of `1.5X`, a ratio of exactly `5/4`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::beliefs::{estimation_error, naive_switch_ev, third_party_envelope_ev};
use crate::error::Result;
use crate::game::{EnvelopePair, Role};
use crate::money::{Money, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioDerivation {
    pub believed_small_holder: Ratio,
    pub believed_large_holder: Ratio,
    pub believed_average: Ratio,
    pub objective_average: Ratio,
    pub ratio: Ratio,
}

impl RatioDerivation {
    fn from_parts(
        believed_small_holder: Ratio,
        believed_large_holder: Ratio,
        objective_average: Ratio,
    ) -> Self {
        let believed_average = believed_small_holder
            .add(&believed_large_holder)
            .mul(&Ratio::half());
        let ratio = believed_average
            .checked_div(&objective_average)
            .expect("objective average is positive");
        RatioDerivation {
            believed_small_holder,
            believed_large_holder,
            believed_average,
            objective_average,
            ratio,
        }
    }

    /// `believed_average - objective_average`, in multiples of `X`.
    pub fn bias(&self) -> BigRational {
        self.believed_average.as_rational() - self.objective_average.as_rational()
    }
}

/// Closed form, with `X = 1`.
pub fn derive_aggregate_ratio() -> RatioDerivation {
    let half = Ratio::half();
    let two = Ratio::integer(2);
    // Believed value of the other envelope when holding `held`: .5(held/2 + 2 held).
    let believed = |held: &Ratio| held.mul(&half).add(&held.mul(&two)).mul(&half);
    let small = Ratio::one();
    let large = two.clone();
    let objective = small.add(&large).mul(&half);
    RatioDerivation::from_parts(believed(&small), believed(&large), objective)
}

/// Recomputes the derivation in money for a concrete pair, then divides out
/// the smaller amount.
pub fn verify_ratio_against_pair(pair: &EnvelopePair) -> Result<RatioDerivation> {
    let absolute = absolute_derivation(pair)?;
    let x = pair.smaller();
    let norm = |m: &Money| m.ratio_to(x).expect("smaller amount is positive");
    Ok(RatioDerivation::from_parts(
        norm(&absolute.believed_small_holder),
        norm(&absolute.believed_large_holder),
        norm(&absolute.objective_average),
    ))
}

/// The same quantities before normalisation, in money.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbsoluteDerivation {
    pub believed_small_holder: Money,
    pub believed_large_holder: Money,
    pub believed_average: Money,
    pub objective_average: Money,
}

pub fn absolute_derivation(pair: &EnvelopePair) -> Result<AbsoluteDerivation> {
    let believed_small_holder = naive_switch_ev(pair.smaller())?;
    let believed_large_holder = naive_switch_ev(pair.larger())?;
    let believed_average = (&believed_small_holder + &believed_large_holder).scale(&Ratio::half());
    Ok(AbsoluteDerivation {
        believed_small_holder,
        believed_large_holder,
        believed_average,
        objective_average: third_party_envelope_ev(pair),
    })
}

/// Estimation error averaged over the two equally likely roles, in multiples of `X`.
/// Equals [`RatioDerivation::bias`].
pub fn role_averaged_estimation_error(pair: &EnvelopePair) -> Result<BigRational> {
    let x = pair.smaller().cents();
    let mut total = BigRational::from_integer(0.into());
    for role in Role::BOTH {
        total += estimation_error(pair, role)?.cents() / x;
    }
    Ok(total / BigRational::from_integer(2.into()))
}
