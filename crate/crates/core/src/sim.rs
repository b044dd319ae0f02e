//! Monte Carlo oracle for the attacker models.
//!
//! Users are drawn by cumulative-mass binary search over the run-compressed
//! lists: a uniform integer `u ∈ [0, N)` selects the run whose cumulative
//! mass first exceeds it, and the offset inside the run selects the rank.
//! Construction reuses the list's prefix index (`O(runs)`), and each draw is
//! `O(log runs)` and exact in integer arithmetic.
//!
//! Trial `t` draws from its own substream `(seed, t)`, and per-trial results
//! are accumulated as integers, so outcomes are bit-identical for any thread
//! count and with or without the `parallel` feature.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, FrequencyList};
use crate::econ::optimal_budget;
use crate::error::{Error, Result};
use crate::par;
use crate::stream::substream;

const CHUNK: u64 = 4096;
const SIM_DOMAIN: u64 = 0x0053_494d;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Fixed budget, length unknown.
    FixedBudget,
    /// Fixed budget per length, length revealed.
    FixedBudgetWithLength,
    /// Gain-maximising budget on the overall list.
    Rational,
    /// Gain-maximising budget per revealed length.
    RationalWithLength,
}

impl SimMode {
    fn with_length(self) -> bool {
        matches!(self, Self::FixedBudgetWithLength | Self::RationalWithLength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, mode: SimMode) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        Ok(Self { trials, seed, mode })
    }
}

/// Empirical estimates with their standard errors. Costs and gains are in
/// the caller's currency; fixed-budget modes carry no value model, report
/// costs with `k = 1` and a zero gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub trials: u64,
    pub success_rate: f64,
    /// Standard error of `success_rate`.
    pub std_error: f64,
    pub mean_cost: f64,
    pub cost_std_error: f64,
    pub mean_gain: f64,
    pub gain_std_error: f64,
}

/// Draws 1-based ranks from one frequency list with probability `f_i / N`.
#[derive(Debug, Clone)]
pub struct RankSampler<'a> {
    list: &'a FrequencyList,
}

impl<'a> RankSampler<'a> {
    pub fn new(list: &'a FrequencyList) -> Result<Self> {
        if list.total() == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self { list })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let idx = self.list.prefix_index();
        let u = rng.random_range(0..self.list.total());
        let j = idx.cum_mass().partition_point(|&m| m <= u);
        let (start_rank, start_mass) = if j == 0 { (0, 0) } else { (idx.cum_ranks()[j - 1], idx.cum_mass()[j - 1]) };
        start_rank + (u - start_mass) / self.list.runs()[j].count + 1
    }
}

/// Samples users from a corpus, either from the overall list or in two
/// stages (length by weight, then rank within that length).
#[derive(Debug, Clone)]
pub struct CorpusSampler<'a> {
    corpus: &'a Corpus,
    overall: RankSampler<'a>,
    length_cum: Vec<u64>,
    lengths: Vec<(u32, RankSampler<'a>)>,
}

impl<'a> CorpusSampler<'a> {
    pub fn new(corpus: &'a Corpus) -> Result<Self> {
        let overall = RankSampler::new(corpus.overall())?;
        let mut length_cum = Vec::new();
        let mut lengths = Vec::new();
        let mut acc = 0u64;
        for (&len, list) in corpus.by_length() {
            if list.total() == 0 {
                continue;
            }
            acc += list.total();
            length_cum.push(acc);
            lengths.push((len, RankSampler::new(list)?));
        }
        Ok(Self { corpus, overall, length_cum, lengths })
    }

    /// Overall rank and, when the corpus has rank tags, its length.
    pub fn sample_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, Option<u32>) {
        let rank = self.overall.sample(rng);
        (rank, self.corpus.length_tags().and_then(|t| t.tag(rank)))
    }

    /// Length drawn by weight `N_ℓ`, then a rank within that length's list.
    pub fn sample_with_length<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(u32, u64)> {
        let total = *self.length_cum.last().ok_or(Error::EmptyCorpus)?;
        let u = rng.random_range(0..total);
        let j = self.length_cum.partition_point(|&m| m <= u);
        let (len, sampler) = &self.lengths[j];
        Ok((*len, sampler.sample(rng)))
    }
}

/// One draw from the overall list: `(rank, length)`.
pub fn sample_rank<R: Rng + ?Sized>(corpus: &Corpus, rng: &mut R) -> Result<(u64, Option<u32>)> {
    Ok(CorpusSampler::new(corpus)?.sample_rank(rng))
}

/// Integer trial accumulators; order-independent under summation.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    successes: u64,
    /// Σ guesses spent
    cost: u128,
    /// Σ guesses²
    cost_sq: u128,
    /// Σ guesses over successful trials
    success_cost: u128,
}

impl Tally {
    fn record(&mut self, rank: u64, budget: u64) {
        let (success, guesses) = if rank <= budget { (true, rank) } else { (false, budget) };
        let g = guesses as u128;
        self.cost += g;
        self.cost_sq += g * g;
        if success {
            self.successes += 1;
            self.success_cost += g;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.successes += other.successes;
        self.cost += other.cost;
        self.cost_sq += other.cost_sq;
        self.success_cost += other.success_cost;
        self
    }

    fn outcome(&self, trials: u64, value: f64, cost: f64, with_gain: bool) -> SimOutcome {
        let t = trials as f64;
        let s = self.successes as f64 / t;
        let c1 = self.cost as f64 / t;
        let c2 = self.cost_sq as f64 / t;
        let sc = self.success_cost as f64 / t;
        let se = |var: f64| (var.max(0.0) / t).sqrt();
        let mean_cost = cost * c1;
        let (mean_gain, gain_var) = if with_gain {
            let mean = value * s - cost * c1;
            let second = value * value * s - 2.0 * value * cost * sc + cost * cost * c2;
            (mean, second - mean * mean)
        } else {
            (0.0, 0.0)
        };
        SimOutcome {
            trials,
            success_rate: s,
            std_error: se(s * (1.0 - s)),
            mean_cost,
            cost_std_error: cost * se(c2 - c1 * c1),
            mean_gain,
            gain_std_error: se(gain_var),
        }
    }
}

/// Budget rule: one overall budget, or one per revealed length.
enum Budgets {
    Overall(u64),
    PerLength(BTreeMap<u32, u64>),
}

fn run_trials(corpus: &Corpus, budgets: &Budgets, config: &SimConfig) -> Result<Tally> {
    let sampler = CorpusSampler::new(corpus)?;
    if config.mode.with_length() && !corpus.is_consistent() {
        return Err(Error::InconsistentInput);
    }
    let chunks = config.trials.div_ceil(CHUNK);
    let tallies = par::map_range(chunks, |chunk| -> Result<Tally> {
        let mut tally = Tally::default();
        let end = ((chunk + 1) * CHUNK).min(config.trials);
        for trial in chunk * CHUNK..end {
            let mut rng = substream(config.seed, SIM_DOMAIN, 0, trial);
            let (rank, budget) = if config.mode.with_length() {
                let (len, rank) = sampler.sample_with_length(&mut rng)?;
                let budget = match budgets {
                    Budgets::Overall(b) => *b,
                    Budgets::PerLength(map) => map[&len],
                };
                (rank, budget)
            } else {
                let (rank, _) = sampler.sample_rank(&mut rng);
                let Budgets::Overall(b) = budgets else { unreachable!("overall budget") };
                (rank, *b)
            };
            tally.record(rank, budget);
        }
        Ok(tally)
    });
    tallies.into_iter().try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
}

/// Fixed-budget attack: success iff the sampled rank (overall, or within the
/// revealed length) is at most `budget`. Estimates `λ_B` or `λ*_B`.
pub fn simulate_fixed(corpus: &Corpus, budget: u64, config: &SimConfig) -> Result<SimOutcome> {
    if !matches!(config.mode, SimMode::FixedBudget | SimMode::FixedBudgetWithLength) {
        return Err(Error::InvalidParams("simulate_fixed needs a fixed-budget mode".into()));
    }
    let tally = run_trials(corpus, &Budgets::Overall(budget), config)?;
    Ok(tally.outcome(config.trials, 0.0, 1.0, false))
}

/// Rational attack at the gain-maximising budget. A successful trial at
/// guess `i` earns `v − i·k`; a failed one costs `B·k`. Estimates `G(v,k)`
/// and `λ̄`, or `G*(v,k)` and `λ̄*` when the length is revealed.
pub fn simulate_rational(corpus: &Corpus, v: f64, k: f64, config: &SimConfig) -> Result<SimOutcome> {
    let budgets = match config.mode {
        SimMode::Rational => Budgets::Overall(optimal_budget(corpus.overall(), v, k)?.b_opt),
        SimMode::RationalWithLength => Budgets::PerLength(
            corpus
                .by_length()
                .iter()
                .filter(|(_, l)| l.total() > 0)
                .map(|(&len, list)| Ok((len, optimal_budget(list, v, k)?.b_opt)))
                .collect::<Result<_>>()?,
        ),
        _ => return Err(Error::InvalidParams("simulate_rational needs a rational mode".into())),
    };
    let tally = run_trials(corpus, &budgets, config)?;
    Ok(tally.outcome(config.trials, v, k, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_plaintext_corpus;

    fn toy() -> Corpus {
        let text = "123456\n".repeat(5) + &"password\n".repeat(3) + &"abc123\n".repeat(2) + &"letmein\n".repeat(2);
        load_plaintext_corpus(text.as_bytes()).unwrap()
    }

    fn within(est: f64, exact: f64, se: f64, sigmas: f64) -> bool {
        (est - exact).abs() <= sigmas * se.max(1e-12)
    }

    #[test]
    fn singleton_corpus_always_rank_one() {
        let c = load_plaintext_corpus("a\n".as_bytes()).unwrap();
        let s = CorpusSampler::new(&c).unwrap();
        let mut rng = substream(0, 0, 0, 0);
        for _ in 0..100 {
            assert_eq!(s.sample_rank(&mut rng), (1, Some(1)));
        }
    }

    #[test]
    fn rank_one_frequency() {
        let c = toy();
        let s = CorpusSampler::new(&c).unwrap();
        let mut rng = substream(5, 0, 0, 0);
        let draws = 120_000;
        let hits = (0..draws).filter(|_| s.sample_rank(&mut rng).0 == 1).count();
        let p = 5.0 / 12.0;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!(within(hits as f64 / draws as f64, p, se, 3.0));
    }

    #[test]
    fn fixed_budget_estimates() {
        let c = toy();
        let cfg = SimConfig::new(100_000, 1, SimMode::FixedBudget).unwrap();
        let out = simulate_fixed(&c, 2, &cfg).unwrap();
        assert!(within(out.success_rate, 2.0 / 3.0, out.std_error, 3.0));
        let zero = simulate_fixed(&c, 0, &cfg).unwrap();
        assert_eq!(zero.success_rate, 0.0);
        assert_eq!(zero.mean_cost, 0.0);

        let cfg = SimConfig::new(100_000, 2, SimMode::FixedBudgetWithLength).unwrap();
        let out = simulate_fixed(&c, 1, &cfg).unwrap();
        assert!(within(out.success_rate, 10.0 / 12.0, out.std_error, 3.0));
    }

    #[test]
    fn rational_estimates() {
        let c = toy();
        let cfg = SimConfig::new(100_000, 3, SimMode::Rational).unwrap();
        let out = simulate_rational(&c, 4.0, 1.0, &cfg).unwrap();
        assert!(within(out.mean_gain, 23.0 / 12.0, out.gain_std_error, 3.0));
        let zero = simulate_rational(&c, 0.0, 1.0, &cfg).unwrap();
        assert_eq!(zero.mean_gain, 0.0);
        assert_eq!(zero.success_rate, 0.0);

        let cfg_len = SimConfig::new(100_000, 3, SimMode::RationalWithLength).unwrap();
        let with = simulate_rational(&c, 4.0, 1.0, &cfg_len).unwrap();
        assert!(with.mean_gain >= out.mean_gain - 3.0 * with.gain_std_error.max(out.gain_std_error));
    }

    #[test]
    fn modes_are_checked() {
        let c = toy();
        let cfg = SimConfig::new(10, 0, SimMode::Rational).unwrap();
        assert!(simulate_fixed(&c, 1, &cfg).is_err());
        let cfg = SimConfig::new(10, 0, SimMode::FixedBudget).unwrap();
        assert!(simulate_rational(&c, 1.0, 1.0, &cfg).is_err());
        assert!(SimConfig::new(0, 0, SimMode::FixedBudget).is_err());
    }

    #[test]
    fn same_seed_same_outcome() {
        let c = toy();
        let cfg = SimConfig::new(10_000, 42, SimMode::Rational).unwrap();
        assert_eq!(simulate_rational(&c, 4.0, 1.0, &cfg).unwrap(), simulate_rational(&c, 4.0, 1.0, &cfg).unwrap());
    }
}
