//! Switch/stay rules.

use std::fmt;
use std::str::FromStr;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::beliefs::naive_switch_ev;
use crate::error::{Error, Result};
use crate::game::Decision;
use crate::money::{Money, Ratio};

/// Probability in `[0, 1]`, with its 64-bit draw threshold precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchProbability {
    prob: Ratio,
    threshold: u128,
}

impl SwitchProbability {
    pub fn new(prob: Ratio) -> Result<Self> {
        if prob > Ratio::one() {
            return Err(Error::ProbabilityOutOfRange(prob.to_string()));
        }
        let threshold = prob.u64_threshold();
        Ok(SwitchProbability { prob, threshold })
    }

    pub fn get(&self) -> &Ratio {
        &self.prob
    }

    /// `draw / 2^64 < p`, decided exactly.
    fn accepts(&self, draw: u64) -> bool {
        u128::from(draw) < self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    AlwaysSwitch,
    NeverSwitch,
    RandomSwitch(SwitchProbability),
    /// Switches whenever the naive expected value of the other envelope
    /// exceeds the observed amount.
    NaiveBayesian,
}

impl Strategy {
    pub fn random(p: Ratio) -> Result<Self> {
        Ok(Strategy::RandomSwitch(SwitchProbability::new(p)?))
    }

    /// Consumes one draw for `RandomSwitch` and none otherwise.
    pub fn decide<R: RngCore + ?Sized>(&self, observed: &Money, rng: &mut R) -> Result<Decision> {
        if !observed.is_positive() {
            return Err(Error::ZeroAmount);
        }
        let switch = match self {
            Strategy::AlwaysSwitch => true,
            Strategy::NeverSwitch => false,
            Strategy::RandomSwitch(p) => p.accepts(rng.next_u64()),
            Strategy::NaiveBayesian => naive_switch_ev(observed)? > *observed,
        };
        Ok(if switch {
            Decision::Switch
        } else {
            Decision::Stay
        })
    }

    /// Exact probability that the rule switches when it sees `observed`.
    pub fn switch_probability(&self, observed: &Money) -> Result<Ratio> {
        if !observed.is_positive() {
            return Err(Error::ZeroAmount);
        }
        Ok(match self {
            Strategy::AlwaysSwitch => Ratio::one(),
            Strategy::NeverSwitch => Ratio::zero(),
            Strategy::RandomSwitch(p) => p.get().clone(),
            Strategy::NaiveBayesian => {
                if naive_switch_ev(observed)? > *observed {
                    Ratio::one()
                } else {
                    Ratio::zero()
                }
            }
        })
    }

    pub fn consumes_randomness(&self) -> bool {
        matches!(self, Strategy::RandomSwitch(_))
    }
}

pub fn decide<R: RngCore + ?Sized>(
    strategy: &Strategy,
    observed: &Money,
    rng: &mut R,
) -> Result<Decision> {
    strategy.decide(observed, rng)
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::AlwaysSwitch => f.write_str("always-switch"),
            Strategy::NeverSwitch => f.write_str("never-switch"),
            Strategy::RandomSwitch(p) => write!(f, "random:{}", p.get()),
            Strategy::NaiveBayesian => f.write_str("naive-bayesian"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "always-switch" => Ok(Strategy::AlwaysSwitch),
            "never-switch" => Ok(Strategy::NeverSwitch),
            "naive-bayesian" => Ok(Strategy::NaiveBayesian),
            other => match other.strip_prefix("random:") {
                Some(p) => Strategy::random(p.parse()?),
                None => Err(Error::ParseStrategy(other.to_string())),
            },
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};
    use rand_core::SeedableRng;
    use rand_xoshiro::SplitMix64;

    /// Counts draws so tests can check how much randomness a rule used.
    struct Counting<R> {
        inner: R,
        draws: usize,
    }

    impl<R: RngCore> RngCore for Counting<R> {
        fn next_u32(&mut self) -> u32 {
            self.draws += 1;
            self.inner.next_u32()
        }
        fn next_u64(&mut self) -> u64 {
            self.draws += 1;
            self.inner.next_u64()
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            self.draws += 1;
            self.inner.fill_bytes(dst)
        }
    }

    fn usd(s: &str) -> Money {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        let mut rng = SplitMix64::seed_from_u64(1);
        assert_eq!(
            Strategy::NaiveBayesian
                .decide(&usd("10"), &mut rng)
                .unwrap(),
            Decision::Switch
        );
        for amt in ["0.01", "5", "1000000"] {
            assert_eq!(
                Strategy::NeverSwitch.decide(&usd(amt), &mut rng).unwrap(),
                Decision::Stay
            );
        }
        assert_eq!(
            Strategy::AlwaysSwitch.decide(&Money::zero(), &mut rng),
            Err(Error::ZeroAmount)
        );
    }

    #[test]
    fn random_half_frequency() {
        // Binomial(10^5, 1/2): 4 sd = 632.5.
        let s: Strategy = "random:1/2".parse().unwrap();
        let mut rng = SplitMix64::seed_from_u64(7);
        let switches = (0..100_000)
            .filter(|_| s.decide(&usd("5"), &mut rng).unwrap() == Decision::Switch)
            .count() as f64;
        assert!((switches - 50_000.0).abs() < 632.5, "{switches}");
    }

    #[test]
    fn randomness_consumption() {
        let mut rng = Counting {
            inner: SplitMix64::seed_from_u64(0),
            draws: 0,
        };
        for s in [
            Strategy::AlwaysSwitch,
            Strategy::NeverSwitch,
            Strategy::NaiveBayesian,
        ] {
            s.decide(&usd("3"), &mut rng).unwrap();
            assert!(!s.consumes_randomness());
        }
        assert_eq!(rng.draws, 0);
        Strategy::random(Ratio::half())
            .unwrap()
            .decide(&usd("3"), &mut rng)
            .unwrap();
        assert_eq!(rng.draws, 1);
    }

    #[test]
    fn parsing() {
        for s in [
            "always-switch",
            "never-switch",
            "naive-bayesian",
            "random:1/3",
            "random:0.25",
        ] {
            let parsed: Strategy = s.parse().unwrap();
            let again: Strategy = parsed.to_string().parse().unwrap();
            assert_eq!(parsed, again);
        }
        assert_eq!(
            "random:0.25".parse::<Strategy>().unwrap().to_string(),
            "random:1/4"
        );
        assert!(matches!(
            "random:3/2".parse::<Strategy>(),
            Err(Error::ProbabilityOutOfRange(_))
        ));
        assert!("random:".parse::<Strategy>().is_err());
        assert!(matches!(
            "sometimes".parse::<Strategy>(),
            Err(Error::ParseStrategy(_))
        ));
    }

    proptest! {
        #[test]
        fn naive_matches_always(n in 1u64..1_000_000_000, d in 1u64..10_000, seed: u64) {
            let observed = Money::from_cents_rational(BigRational::new(n.into(), d.into())).unwrap();
            let mut rng = SplitMix64::seed_from_u64(seed);
            prop_assert_eq!(
                Strategy::NaiveBayesian.decide(&observed, &mut rng).unwrap(),
                Strategy::AlwaysSwitch.decide(&observed, &mut rng).unwrap()
            );
            prop_assert!(Strategy::NaiveBayesian.switch_probability(&observed).unwrap().is_one());
        }

        #[test]
        fn random_endpoints(seed: u64) {
            let zero = Strategy::random(Ratio::zero()).unwrap();
            let one = Strategy::random(Ratio::one()).unwrap();
            let mut rng = SplitMix64::seed_from_u64(seed);
            for _ in 0..64 {
                prop_assert_eq!(zero.decide(&usd("2"), &mut rng).unwrap(), Decision::Stay);
                prop_assert_eq!(one.decide(&usd("2"), &mut rng).unwrap(), Decision::Switch);
            }
        }
    }
}
