//! The game itself: envelope pairs, which envelope the player holds, and
//! finite priors over the smaller amount.
//!
//! A pair is built from its smaller amount only, and the held envelope is
//! always described by its [`Role`]. There is no way to name "the amount in
//! my envelope" without also saying whether it is the smaller or the larger.

use std::fmt;
use std::str::FromStr;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::{Money, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnvelopePair {
    smaller: Money,
    larger: Money,
}

impl EnvelopePair {
    /// Builds the pair `(smaller, 2 * smaller)`.
    pub fn new(smaller: Money) -> Result<Self> {
        if !smaller.is_positive() {
            return Err(Error::ZeroAmount);
        }
        let larger = smaller.scale(&Ratio::integer(2));
        Ok(EnvelopePair { smaller, larger })
    }

    pub fn smaller(&self) -> &Money {
        &self.smaller
    }

    pub fn larger(&self) -> &Money {
        &self.larger
    }

    pub fn amount(&self, role: Role) -> &Money {
        match role {
            Role::Smaller => &self.smaller,
            Role::Larger => &self.larger,
        }
    }

    pub fn total(&self) -> Money {
        &self.smaller + &self.larger
    }
}

impl fmt::Display for EnvelopePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.smaller, self.larger)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Smaller,
    Larger,
}

impl Role {
    pub const BOTH: [Role; 2] = [Role::Smaller, Role::Larger];

    pub fn other(self) -> Role {
        match self {
            Role::Smaller => Role::Larger,
            Role::Larger => Role::Smaller,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Smaller => "smaller",
            Role::Larger => "larger",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Switch,
    Stay,
}

impl Decision {
    pub const BOTH: [Decision; 2] = [Decision::Switch, Decision::Stay];

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Switch => "switch",
            Decision::Stay => "stay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorEntry {
    pub base: Money,
    pub prob: Ratio,
}

/// Finite distribution over the smaller amount of the pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prior {
    support: Vec<PriorEntry>,
}

impl Prior {
    pub fn new(support: Vec<PriorEntry>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidPrior("support is empty".into()));
        }
        for (i, entry) in support.iter().enumerate() {
            if !entry.base.is_positive() {
                return Err(Error::InvalidPrior(format!(
                    "base {} is not positive",
                    entry.base
                )));
            }
            if entry.prob.is_zero() || entry.prob > Ratio::one() {
                return Err(Error::InvalidPrior(format!(
                    "probability {} of base {} is outside (0, 1]",
                    entry.prob, entry.base
                )));
            }
            if support[..i].iter().any(|e| e.base == entry.base) {
                return Err(Error::InvalidPrior(format!(
                    "base {} listed twice",
                    entry.base
                )));
            }
        }
        let total = support
            .iter()
            .fold(Ratio::zero(), |acc, e| acc.add(&e.prob));
        if !total.is_one() {
            return Err(Error::InvalidPrior(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Prior { support })
    }

    pub fn point(base: Money) -> Result<Self> {
        Prior::new(vec![PriorEntry {
            base,
            prob: Ratio::one(),
        }])
    }

    pub fn uniform(bases: Vec<Money>) -> Result<Self> {
        let n = bases.len() as u64;
        if n == 0 {
            return Err(Error::InvalidPrior("support is empty".into()));
        }
        let prob = Ratio::new(1, n)?;
        Prior::new(
            bases
                .into_iter()
                .map(|base| PriorEntry {
                    base,
                    prob: prob.clone(),
                })
                .collect(),
        )
    }

    pub fn support(&self) -> &[PriorEntry] {
        &self.support
    }

    /// Probability-weighted mean of the base amount.
    pub fn mean_base(&self) -> Money {
        self.support.iter().map(|e| e.base.scale(&e.prob)).sum()
    }

    pub fn sampler(&self) -> PriorSampler {
        let mut cumulative = Ratio::zero();
        let thresholds = self
            .support
            .iter()
            .map(|e| {
                cumulative = cumulative.add(&e.prob);
                cumulative.u64_threshold()
            })
            .collect();
        PriorSampler { thresholds }
    }
}

impl FromStr for Prior {
    type Err = Error;

    /// `point:<dollars>`, `uniform:<d1>,<d2>,...` or `table:<d1>=<p1>,<d2>=<p2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').ok_or_else(|| {
            Error::InvalidPrior(format!("{s:?}: expected point:, uniform: or table:"))
        })?;
        let items = || body.split(',').map(str::trim);
        match kind {
            "point" => Prior::point(body.trim().parse()?),
            "uniform" => Prior::uniform(items().map(str::parse).collect::<Result<_>>()?),
            "table" => {
                let support = items()
                    .map(|item| {
                        let (base, prob) = item.split_once('=').ok_or_else(|| {
                            Error::InvalidPrior(format!(
                                "table entry {item:?} is not <dollars>=<prob>"
                            ))
                        })?;
                        Ok(PriorEntry {
                            base: base.trim().parse()?,
                            prob: prob.trim().parse()?,
                        })
                    })
                    .collect::<Result<_>>()?;
                Prior::new(support)
            }
            other => Err(Error::InvalidPrior(format!(
                "unknown prior kind {other:?}: expected point, uniform or table"
            ))),
        }
    }
}

impl fmt::Display for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("table:")?;
        for (i, e) in self.support.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", e.base.to_plain_string(), e.prob)?;
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Prior {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            support: Vec<PriorEntry>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Prior::new(raw.support).map_err(serde::de::Error::custom)
    }
}

/// Inverse-CDF sampler for a [`Prior`].
///
/// A 64-bit draw `u` stands for the rational `u / 2^64` in `[0, 1)`. Entry `k`
/// is chosen for the first `k` whose cumulative probability exceeds it, so the
/// listed order breaks ties. Thresholds are stored as `ceil(cum_k * 2^64)`,
/// which makes the integer comparison exact.
#[derive(Debug, Clone)]
pub struct PriorSampler {
    thresholds: Vec<u128>,
}

impl PriorSampler {
    pub fn index_for(&self, draw: u64) -> usize {
        let u = u128::from(draw);
        self.thresholds
            .iter()
            .position(|&t| u < t)
            .unwrap_or(self.thresholds.len() - 1)
    }

    pub fn sample_index<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        self.index_for(rng.next_u64())
    }
}

/// Draws a base amount from `prior` (one 64-bit draw) and builds its pair.
pub fn deal<R: RngCore + ?Sized>(prior: &Prior, rng: &mut R) -> EnvelopePair {
    let index = prior.sampler().sample_index(rng);
    EnvelopePair::new(prior.support[index].base.clone()).expect("prior bases are positive")
}

/// Picks an envelope uniformly: one 64-bit draw, top bit clear means the smaller.
pub fn choose<R: RngCore + ?Sized>(rng: &mut R) -> Role {
    role_for(rng.next_u64())
}

pub(crate) fn role_for(draw: u64) -> Role {
    if draw >> 63 == 0 {
        Role::Smaller
    } else {
        Role::Larger
    }
}

pub fn observed(pair: &EnvelopePair, held: Role) -> Money {
    pair.amount(held).clone()
}

pub fn resolve(pair: &EnvelopePair, held: Role, decision: Decision) -> Money {
    match decision {
        Decision::Stay => observed(pair, held),
        Decision::Switch => observed(pair, held.other()),
    }
}

/// One complete play of the game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub pair: EnvelopePair,
    pub held: Role,
    pub observed: Money,
    pub decision: Decision,
    pub payoff: Money,
}

impl Trial {
    pub fn play(pair: EnvelopePair, held: Role, decision: Decision) -> Self {
        let observed = observed(&pair, held);
        let payoff = resolve(&pair, held, decision);
        Trial {
            pair,
            held,
            observed,
            decision,
            payoff,
        }
    }
}

impl Serialize for EnvelopePair {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("EnvelopePair", 2)?;
        s.serialize_field("smaller", &self.smaller)?;
        s.serialize_field("larger", &self.larger)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_core::SeedableRng;
    use rand_xoshiro::SplitMix64;

    fn usd(s: &str) -> Money {
        s.parse().unwrap()
    }

    fn pair(s: &str) -> EnvelopePair {
        EnvelopePair::new(usd(s)).unwrap()
    }

    #[test]
    fn deal_point_mass() {
        let mut rng = SplitMix64::seed_from_u64(3);
        for _ in 0..10 {
            assert_eq!(
                deal(&Prior::point(usd("5.00")).unwrap(), &mut rng),
                pair("5.00")
            );
        }
        let p = deal(&Prior::point(usd("0.01")).unwrap(), &mut rng);
        assert_eq!(p.smaller(), &usd("0.01"));
        assert_eq!(p.larger(), &usd("0.02"));
    }

    #[test]
    fn deal_uniform_frequency() {
        // Binomial(10^5, 1/2): sd = 158.1, 4 sd = 632.5.
        let prior = Prior::uniform(vec![usd("1"), usd("2")]).unwrap();
        let mut rng = SplitMix64::seed_from_u64(2024);
        let n = 100_000;
        let ones = (0..n)
            .filter(|_| {
                let p = deal(&prior, &mut rng);
                assert!(p == pair("1") || p == pair("2"));
                p == pair("1")
            })
            .count() as f64;
        assert!((ones - 50_000.0).abs() < 632.5, "count {ones}");
    }

    #[test]
    fn choose_frequency_and_determinism() {
        let mut rng = SplitMix64::seed_from_u64(42);
        let n = 100_000;
        let smaller = (0..n).filter(|_| choose(&mut rng) == Role::Smaller).count() as f64;
        let freq = smaller / n as f64;
        assert!((0.49..=0.51).contains(&freq), "frequency {freq}");

        let a: Vec<Role> = {
            let mut r = SplitMix64::seed_from_u64(9);
            (0..64).map(|_| choose(&mut r)).collect()
        };
        let b: Vec<Role> = {
            let mut r = SplitMix64::seed_from_u64(9);
            (0..64).map(|_| choose(&mut r)).collect()
        };
        assert_eq!(a, b);
        let firsts: std::collections::HashSet<Role> = (0..32u64)
            .map(|s| choose(&mut SplitMix64::seed_from_u64(s)))
            .collect();
        assert_eq!(firsts.len(), 2);
    }

    #[test]
    fn role_split_is_exact() {
        assert_eq!(role_for(0), Role::Smaller);
        assert_eq!(role_for((1 << 63) - 1), Role::Smaller);
        assert_eq!(role_for(1 << 63), Role::Larger);
        assert_eq!(role_for(u64::MAX), Role::Larger);
    }

    #[test]
    fn observed_and_resolve() {
        let p = pair("5.00");
        assert_eq!(observed(&p, Role::Smaller), usd("5.00"));
        assert_eq!(observed(&p, Role::Larger), usd("10.00"));
        assert_eq!(resolve(&p, Role::Smaller, Decision::Switch), usd("10.00"));
        assert_eq!(resolve(&p, Role::Larger, Decision::Switch), usd("5.00"));
        for r in Role::BOTH {
            assert_eq!(resolve(&p, r, Decision::Stay), observed(&p, r));
        }
        let t = Trial::play(p.clone(), Role::Larger, Decision::Stay);
        assert_eq!(t.observed, usd("10.00"));
        assert_eq!(t.payoff, usd("10.00"));
    }

    #[test]
    fn zero_base_rejected() {
        assert_eq!(EnvelopePair::new(Money::zero()), Err(Error::ZeroAmount));
    }

    #[test]
    fn sampler_tie_break_and_edges() {
        let prior: Prior = "table:1=1/2,2=1/4,3=1/4".parse().unwrap();
        let s = prior.sampler();
        assert_eq!(s.index_for(0), 0);
        assert_eq!(s.index_for((1 << 63) - 1), 0);
        // u / 2^64 = 1/2 exactly is not below the first cumulative 1/2.
        assert_eq!(s.index_for(1 << 63), 1);
        assert_eq!(s.index_for(3 << 62), 2);
        assert_eq!(s.index_for(u64::MAX), 2);
    }

    #[test]
    fn prior_parsing() {
        let p: Prior = "point:5.00".parse().unwrap();
        assert_eq!(p.support().len(), 1);
        let u: Prior = "uniform:1.00, 3.00".parse().unwrap();
        assert_eq!(u.support()[1].prob, Ratio::half());
        let t: Prior = "table:1=1/3,2=0.5,4=1/6".parse().unwrap();
        assert_eq!(t.support()[1].prob, Ratio::half());
        assert_eq!(t.mean_base(), usd("2"));
        let round: Prior = t.to_string().parse().unwrap();
        assert_eq!(round, t);

        for bad in [
            "",
            "point:",
            "point:0",
            "uniform:",
            "uniform:1,1",
            "table:1=1/2,2=1/3",
            "table:1=0,2=1",
            "table:1=3/2",
            "table:1",
            "normal:1,2",
            "point:-3",
        ] {
            assert!(bad.parse::<Prior>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn prior_json_validates() {
        let t: Prior = "table:1=1/3,2=2/3".parse().unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Prior>(&json).unwrap(), t);
        let bad = json.replace("2/3", "1/3");
        assert!(serde_json::from_str::<Prior>(&bad).is_err());
    }

    proptest! {
        #[test]
        fn decisions_partition_pair(cents in 1u64..10_000_000) {
            let p = EnvelopePair::new(Money::from_cents(cents)).unwrap();
            for r in Role::BOTH {
                let sum = &resolve(&p, r, Decision::Switch) + &resolve(&p, r, Decision::Stay);
                prop_assert_eq!(sum, p.total());
            }
            prop_assert_eq!(
                resolve(&p, Role::Smaller, Decision::Switch),
                resolve(&p, Role::Larger, Decision::Stay)
            );
            prop_assert_eq!(observed(&p, Role::Larger), observed(&p, Role::Smaller).scale(&Ratio::integer(2)));
        }
    }

    #[test]
    fn dealt_pairs_keep_doubling() {
        let prior: Prior = "table:0.01=1/10,3.33=3/10,7=1/5,1000.5=2/5"
            .parse()
            .unwrap();
        let mut rng = SplitMix64::seed_from_u64(11);
        for _ in 0..10_000 {
            let p = deal(&prior, &mut rng);
            assert_eq!(p.larger(), &p.smaller().scale(&Ratio::integer(2)));
        }
    }
}
