//! Seeded Monte Carlo runs and the exact enumeration oracle they are checked against.
//!
//! # Seeding
//!
//! Trial `i` of a run with seed `s` draws from its own SplitMix64 stream whose
//! initial state is `mix64(s ^ i)`, where `mix64` is the SplitMix64 output
//! finalizer (Stafford's "Mix13" constants). Each trial consumes, in order:
//! one draw to pick the base amount from the prior, one draw to pick the held
//! envelope, and one more draw only if the strategy is `RandomSwitch`.
//!
//! Because streams depend only on `(seed, i)`, trials can run in any order on
//! any number of workers. Per-trial statistics are reduced in fixed blocks of
//! [`BLOCK_TRIALS`] trials and the block results are merged in block order, so
//! the floating-point summary is bit-identical for every worker count.

use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{choose, Decision, EnvelopePair, Prior, PriorSampler, Role, Trial};
use crate::money::{delta, GainDelta, Money, Ratio};
use crate::strategies::Strategy;

/// Trials per reduction block.
pub const BLOCK_TRIALS: u64 = 4096;

/// z-value of the two-sided 95% normal interval.
const Z95: f64 = 1.96;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The random stream owned by trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> SplitMix64 {
    SplitMix64::from_seed(mix64(seed ^ index).to_le_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub prior: Prior,
    pub strategy: Strategy,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(
        prior: Prior,
        strategy: Strategy,
        trials: u64,
        seed: u64,
        workers: usize,
    ) -> Result<Self> {
        let config = SimConfig {
            prior,
            strategy,
            trials,
            seed,
            workers,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// One sampled outcome of the enumeration, with its exact probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTrial {
    pub prob: Ratio,
    pub trial: Trial,
}

/// Every `(base, role, decision)` outcome with nonzero probability.
pub fn enumerate_outcomes(prior: &Prior, strategy: &Strategy) -> Vec<WeightedTrial> {
    let mut out = Vec::with_capacity(prior.support().len() * 4);
    for entry in prior.support() {
        let pair = EnvelopePair::new(entry.base.clone()).expect("prior bases are positive");
        let role_weight = entry.prob.mul(&Ratio::half());
        for held in Role::BOTH {
            let p_switch = strategy
                .switch_probability(pair.amount(held))
                .expect("observed amounts are positive");
            let p_stay = Ratio::one()
                .checked_sub(&p_switch)
                .expect("probability at most one");
            for (decision, p) in [(Decision::Switch, p_switch), (Decision::Stay, p_stay)] {
                if p.is_zero() {
                    continue;
                }
                out.push(WeightedTrial {
                    prob: role_weight.mul(&p),
                    trial: Trial::play(pair.clone(), held, decision),
                });
            }
        }
    }
    out
}

pub fn exact_expected_payoff(prior: &Prior, strategy: &Strategy) -> Money {
    enumerate_outcomes(prior, strategy)
        .iter()
        .map(|w| w.trial.payoff.scale(&w.prob))
        .sum()
}

/// Exact variance of a single trial's payoff, in dollars squared.
pub fn exact_payoff_variance(prior: &Prior, strategy: &Strategy) -> Ratio {
    let outcomes = enumerate_outcomes(prior, strategy);
    let mean = exact_expected_payoff(prior, strategy);
    let second_moment = outcomes.iter().fold(Ratio::zero(), |acc, w| {
        let payoff = Ratio::from_rational(w.trial.payoff.cents().clone()).expect("non-negative");
        acc.add(&payoff.mul(&payoff).mul(&w.prob))
    });
    let mean = Ratio::from_rational(mean.cents().clone()).expect("non-negative");
    let cents_sq = second_moment
        .checked_sub(&mean.mul(&mean))
        .expect("variance is non-negative");
    cents_sq.mul(&Ratio::new(1, 10_000).expect("nonzero"))
}

/// Exact mean and variance (dollars squared) of `payoff(a) - payoff(b)` when
/// both strategies see the same deal, the same held envelope and, for random
/// rules, the same decision draw.
pub fn exact_paired_difference(prior: &Prior, a: &Strategy, b: &Strategy) -> (GainDelta, Ratio) {
    let mut mean = GainDelta::zero();
    let mut second = Ratio::zero();
    for entry in prior.support() {
        let pair = EnvelopePair::new(entry.base.clone()).expect("prior bases are positive");
        let role_weight = entry.prob.mul(&Ratio::half());
        for held in Role::BOTH {
            let observed = pair.amount(held);
            let pa = a.switch_probability(observed).expect("positive");
            let pb = b.switch_probability(observed).expect("positive");
            // A shared draw u switches a rule iff u < p, so the decisions are comonotone.
            let (lo, hi) = if pa <= pb {
                (pa.clone(), pb.clone())
            } else {
                (pb.clone(), pa.clone())
            };
            let only_one = hi.checked_sub(&lo).expect("ordered");
            if only_one.is_zero() {
                continue;
            }
            // In the band where exactly one rule switches, the difference is
            // +/- the smaller amount; everywhere else it is zero.
            let swing = delta(pair.amount(held), pair.amount(held.other()));
            let diff = if pa > pb { swing } else { -swing };
            let w = role_weight.mul(&only_one);
            let d_sq = Ratio::from_rational(diff.cents() * diff.cents()).expect("square");
            second = second.add(&d_sq.mul(&w));
            mean = mean + diff.scale(&w);
        }
    }
    let mean_sq = Ratio::from_rational(mean.cents() * mean.cents()).expect("square");
    let var = second
        .checked_sub(&mean_sq)
        .expect("variance is non-negative");
    (mean, var.mul(&Ratio::new(1, 10_000).expect("nonzero")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub trials: u64,
    /// Dollars.
    pub mean_payoff: f64,
    /// Unbiased sample variance of the payoff, dollars squared. Zero for a single trial.
    pub sample_variance: f64,
    /// Normal-approximation half-width, `1.96 * s / sqrt(n)`.
    pub ci95_halfwidth: f64,
    pub exact_expected_payoff: Money,
    /// Dollars squared.
    pub exact_payoff_variance: Ratio,
    /// Mean of `payoff - observed`, dollars.
    pub mean_switch_gain: f64,
}

impl RunSummary {
    /// Standard error of the mean implied by the exact per-trial variance.
    pub fn exact_standard_error(&self) -> f64 {
        (self.exact_payoff_variance.to_f64() / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSummary {
    pub trials: u64,
    pub strategy_a: Strategy,
    pub strategy_b: Strategy,
    pub mean_payoff_a: f64,
    pub mean_payoff_b: f64,
    /// Mean of `payoff(a) - payoff(b)`, dollars.
    pub mean_difference: f64,
    pub difference_variance: f64,
    pub ci95_halfwidth: f64,
    pub exact_difference: GainDelta,
    /// Dollars squared.
    pub exact_difference_variance: Ratio,
    /// Trials on which the two strategies were paid different amounts.
    pub differing_trials: u64,
}

impl PairedSummary {
    pub fn exact_standard_error(&self) -> f64 {
        (self.exact_difference_variance.to_f64() / self.trials as f64).sqrt()
    }
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise update.
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        Moments {
            n,
            mean: self.mean + d * nb / nf,
            m2: self.m2 + other.m2 + d * d * na * nb / nf,
        }
    }

    fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    fn ci95(&self) -> f64 {
        Z95 * (self.sample_variance() / self.n as f64).sqrt()
    }
}

/// Plays individual trials of a run. `trial(i)` is a pure function of the
/// prior, the strategy, the seed and `i`.
#[derive(Debug, Clone)]
pub struct TrialRunner<'a> {
    prior: &'a Prior,
    strategy: &'a Strategy,
    seed: u64,
    sampler: PriorSampler,
    pairs: Vec<EnvelopePair>,
    dollars: Vec<[f64; 2]>,
}

struct Dealt {
    index: usize,
    held: Role,
    rng: SplitMix64,
}

impl<'a> TrialRunner<'a> {
    pub fn new(prior: &'a Prior, strategy: &'a Strategy, seed: u64) -> Self {
        let pairs: Vec<EnvelopePair> = prior
            .support()
            .iter()
            .map(|e| EnvelopePair::new(e.base.clone()).expect("prior bases are positive"))
            .collect();
        let dollars = pairs
            .iter()
            .map(|p| [p.smaller().to_dollars_f64(), p.larger().to_dollars_f64()])
            .collect();
        TrialRunner {
            prior,
            strategy,
            seed,
            sampler: prior.sampler(),
            pairs,
            dollars,
        }
    }

    pub fn prior(&self) -> &Prior {
        self.prior
    }

    fn deal(&self, index: u64) -> Dealt {
        let mut rng = trial_rng(self.seed, index);
        let support_index = self.sampler.sample_index(&mut rng);
        let held = choose(&mut rng);
        Dealt {
            index: support_index,
            held,
            rng,
        }
    }

    fn decide(
        &self,
        strategy: &Strategy,
        index: usize,
        held: Role,
        rng: &mut SplitMix64,
    ) -> Decision {
        strategy
            .decide(self.pairs[index].amount(held), rng)
            .expect("observed amounts are positive")
    }

    fn payoff_dollars(&self, dealt: &Dealt, decision: Decision) -> f64 {
        let role = match decision {
            Decision::Stay => dealt.held,
            Decision::Switch => dealt.held.other(),
        };
        self.dollars[dealt.index][role as usize]
    }

    pub fn trial(&self, index: u64) -> Trial {
        let mut dealt = self.deal(index);
        let decision = self.decide(self.strategy, dealt.index, dealt.held, &mut dealt.rng);
        Trial::play(self.pairs[dealt.index].clone(), dealt.held, decision)
    }

    pub fn trials(&self, count: u64) -> impl Iterator<Item = Trial> + '_ {
        (0..count).map(move |i| self.trial(i))
    }

    fn run_block(&self, block: u64, total: u64) -> (Moments, Moments) {
        let mut payoff = Moments::default();
        let mut gain = Moments::default();
        for i in block_range(block, total) {
            let mut dealt = self.deal(i);
            let decision = self.decide(self.strategy, dealt.index, dealt.held, &mut dealt.rng);
            let p = self.payoff_dollars(&dealt, decision);
            payoff.push(p);
            gain.push(p - self.dollars[dealt.index][dealt.held as usize]);
        }
        (payoff, gain)
    }

    fn compare_block(&self, baseline: &Strategy, block: u64, total: u64) -> ([Moments; 3], u64) {
        let mut m = [Moments::default(); 3];
        let mut differing = 0;
        for i in block_range(block, total) {
            let dealt = self.deal(i);
            let mut rng_a = dealt.rng.clone();
            let mut rng_b = dealt.rng.clone();
            let da = self.decide(self.strategy, dealt.index, dealt.held, &mut rng_a);
            let db = self.decide(baseline, dealt.index, dealt.held, &mut rng_b);
            let pa = self.payoff_dollars(&dealt, da);
            let pb = self.payoff_dollars(&dealt, db);
            m[0].push(pa);
            m[1].push(pb);
            m[2].push(pa - pb);
            if pa != pb {
                differing += 1;
            }
        }
        (m, differing)
    }
}

fn block_range(block: u64, total: u64) -> std::ops::Range<u64> {
    let start = block * BLOCK_TRIALS;
    start..start.saturating_add(BLOCK_TRIALS).min(total)
}

/// Evaluates `f` on every block index and folds the results in block order.
/// Memory use is bounded by one round of blocks regardless of the trial count.
fn reduce_blocks<T, F, G>(trials: u64, workers: usize, init: T, f: F, mut fold: G) -> Result<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
    G: FnMut(T, T) -> T,
{
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let mut acc = init;
    if workers == 1 {
        for b in 0..blocks {
            acc = fold(acc, f(b));
        }
        return Ok(acc);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| {
            Error::ResourceExhausted(format!("cannot start {workers} worker threads: {e}"))
        })?;
    let round = workers as u64 * 8;
    let mut start = 0;
    while start < blocks {
        let end = (start + round).min(blocks);
        let results: Vec<T> = pool.install(|| (start..end).into_par_iter().map(&f).collect());
        for r in results {
            acc = fold(acc, r);
        }
        start = end;
    }
    Ok(acc)
}

pub fn run(config: &SimConfig) -> Result<RunSummary> {
    config.validate()?;
    let runner = TrialRunner::new(&config.prior, &config.strategy, config.seed);
    let (payoff, gain) = reduce_blocks(
        config.trials,
        config.workers,
        (Moments::default(), Moments::default()),
        |b| runner.run_block(b, config.trials),
        |(pa, ga), (pb, gb)| (pa.merge(pb), ga.merge(gb)),
    )?;
    Ok(RunSummary {
        trials: payoff.n,
        mean_payoff: payoff.mean,
        sample_variance: payoff.sample_variance(),
        ci95_halfwidth: payoff.ci95(),
        exact_expected_payoff: exact_expected_payoff(&config.prior, &config.strategy),
        exact_payoff_variance: exact_payoff_variance(&config.prior, &config.strategy),
        mean_switch_gain: gain.mean,
    })
}

/// Runs `config.strategy` against `baseline` on common random numbers.
pub fn compare(config: &SimConfig, baseline: &Strategy) -> Result<PairedSummary> {
    config.validate()?;
    let runner = TrialRunner::new(&config.prior, &config.strategy, config.seed);
    let ([a, b, d], differing_trials) = reduce_blocks(
        config.trials,
        config.workers,
        ([Moments::default(); 3], 0u64),
        |blk| runner.compare_block(baseline, blk, config.trials),
        |(x, nx), (y, ny)| {
            (
                [x[0].merge(y[0]), x[1].merge(y[1]), x[2].merge(y[2])],
                nx + ny,
            )
        },
    )?;
    let (exact_difference, exact_difference_variance) =
        exact_paired_difference(&config.prior, &config.strategy, baseline);
    Ok(PairedSummary {
        trials: d.n,
        strategy_a: config.strategy.clone(),
        strategy_b: baseline.clone(),
        mean_payoff_a: a.mean,
        mean_payoff_b: b.mean,
        mean_difference: d.mean,
        difference_variance: d.sample_variance(),
        ci95_halfwidth: d.ci95(),
        exact_difference,
        exact_difference_variance,
        differing_trials,
    })
}
