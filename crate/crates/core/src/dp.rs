//! Differentially private release of frequency lists.
//!
//! Two lists are neighbours when `Σ_i |f_i − f'_i| ≤ 1`, i.e. one user is
//! added, removed or moved by one rank-count. The mechanism splits a list at
//! a count threshold `C ≈ √N`:
//!
//! * the tail is described by its conjugate partition `d[c] = #{i : f_i ≥ c}`
//!   for `c = 1..=C`,
//! * the head (ranks with `f_i > C`, at most `N/C` of them) is described by
//!   the shifted counts `f_i − C` in `⌈Ñ/C⌉` slots, zero-padded.
//!
//! A neighbour changes exactly one coordinate of `(head, d)` by one. The
//! threshold and the slot count depend only on a noisy `N`, so every released
//! vector has a data-independent shape and plain two-sided geometric noise
//! gives pure ε-DP (which implies (ε,δ)-DP for every δ). The noisy vectors
//! are projected back onto non-increasing, non-negative sequences with
//! isotonic regression, and head slots below a noise threshold are folded
//! into the tail; both steps are post-processing.
//!
//! The L1 error is `Σ_c |d[c] − d̃[c]|` plus the head error, so it scales
//! with the number of released coordinates, `O(√N/ε)` before smoothing.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::corpus::{assemble_corpus, Corpus, FrequencyList, RunList};
use crate::error::{Error, Result};
use crate::par;
use crate::stream::substream;

/// Share of ε spent on the noisy user count that picks the split threshold.
const COUNT_SHARE: f64 = 0.05;
/// Share of ε spent on the head and tail vectors.
const VECTOR_SHARE: f64 = 1.0 - COUNT_SHARE;

const BLOCK_COUNT: u64 = 0;
const BLOCK_HEAD: u64 = 2;
const BLOCK_TAIL: u64 = 3;

/// Privacy parameters for one list. `epsilon = +∞` disables noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DPParams {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
}

impl DPParams {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        let p = Self { epsilon, delta, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        Ok(())
    }
}

/// L1 distortion of a release against `(√N + ln(1/δ))/ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DPReport {
    pub l1_error: u64,
    pub bound_value: f64,
    pub ratio: f64,
}

/// Two-sided geometric noise, `Pr[z] ∝ exp(−ε|z|)`, i.e. sensitivity one.
struct TwoSidedGeometric(Option<Geometric>);

impl TwoSidedGeometric {
    fn new(epsilon: f64) -> Self {
        if epsilon.is_infinite() {
            return Self(None);
        }
        let alpha = (-epsilon).exp();
        // p = 1 − α is in (0, 1) for any finite positive ε
        Self(Some(Geometric::new(1.0 - alpha).expect("valid geometric parameter")))
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> i64 {
        match &self.0 {
            None => 0,
            Some(g) => g.sample(rng) as i64 - g.sample(rng) as i64,
        }
    }
}

/// Pool-adjacent-violators fit of a non-increasing sequence (least squares).
fn isotonic_non_increasing(values: &[f64]) -> Vec<f64> {
    // blocks of (mean, weight)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        let mut cur = (v, 1usize);
        while let Some(&(mean, w)) = blocks.last() {
            if mean >= cur.0 {
                break;
            }
            blocks.pop();
            let total = w + cur.1;
            cur = ((mean * w as f64 + cur.0 * cur.1 as f64) / total as f64, total);
        }
        blocks.push(cur);
    }
    blocks.into_iter().flat_map(|(m, w)| std::iter::repeat_n(m, w)).collect()
}

/// Rounds a smoothed non-increasing sequence to non-negative integers.
fn to_counts(smoothed: Vec<f64>) -> Vec<u64> {
    smoothed.into_iter().map(|x| x.max(0.0).round() as u64).collect()
}

fn noisy<R: Rng>(value: u64, noise: &TwoSidedGeometric, rng: &mut R) -> i64 {
    value as i64 + noise.sample(rng)
}

fn release_tagged(list: &FrequencyList, params: &DPParams, domain: u64) -> Result<FrequencyList> {
    params.validate()?;
    let seed = params.seed;
    let eps = params.epsilon;
    let count_noise = TwoSidedGeometric::new(eps * COUNT_SHARE);
    let vector_noise = TwoSidedGeometric::new(eps * VECTOR_SHARE);

    let noisy_total = noisy(list.total(), &count_noise, &mut substream(seed, domain, BLOCK_COUNT, 0)).max(1) as u64;
    let split = (noisy_total as f64).sqrt().ceil() as u64;
    let slots = noisy_total.div_ceil(split);

    let head: Vec<f64> = par::map_range(slots, |i| {
        let shifted = list.count_at(i + 1).saturating_sub(split);
        noisy(shifted, &vector_noise, &mut substream(seed, domain, BLOCK_HEAD, i)) as f64
    });
    let tail: Vec<f64> = par::map_range(split, |c| {
        let at_least = list.ranks_at_least(c + 1);
        noisy(at_least, &vector_noise, &mut substream(seed, domain, BLOCK_TAIL, c)) as f64
    });

    // an all-zero slot rarely clears ln(slots)/ε after smoothing
    let cutoff = ((slots as f64).ln() / (eps * VECTOR_SHARE)).ceil().max(1.0) as u64;
    let head: Vec<u64> = to_counts(isotonic_non_increasing(&head)).into_iter().take_while(|&g| g >= cutoff).collect();
    let kept = head.len() as u64;
    let mut tail = to_counts(isotonic_non_increasing(&tail));
    for d in &mut tail {
        *d = (*d).max(kept);
    }

    // head counts, then counts C, C-1, .., 1 with multiplicity d[c] − d[c+1]
    let mut pairs: Vec<(u64, u64)> = head.iter().map(|&g| (g + split, 1)).collect();
    let mut above = kept;
    for c in (1..=split).rev() {
        let at_least = tail[(c - 1) as usize];
        pairs.push((c, at_least - above));
        above = at_least;
    }
    Ok(FrequencyList::from_runs(RunList::from_pairs(pairs)?))
}

/// Releases one list with the given parameters.
pub fn release(list: &FrequencyList, params: &DPParams) -> Result<FrequencyList> {
    release_tagged(list, params, 0)
}

/// Releases the overall list and every per-length list at `total_epsilon / 2`
/// each; a password touches exactly two lists, so the whole release costs
/// `total_epsilon`. Each list draws from its own substream.
pub fn release_corpus(corpus: &Corpus, total_epsilon: f64, delta: f64, seed: u64) -> Result<Corpus> {
    if !corpus.is_consistent() {
        return Err(Error::InconsistentInput);
    }
    let params = DPParams::new(total_epsilon / 2.0, delta, seed)?;
    let mut jobs: Vec<(u64, &FrequencyList)> = vec![(0, corpus.overall())];
    jobs.extend(corpus.by_length().iter().map(|(&len, list)| (u64::from(len), list)));
    let released = par::map(&jobs, |&(domain, list)| release_tagged(list, &params, domain));
    let mut released = released.into_iter();
    let overall = released.next().expect("overall job")?;
    let by_length =
        corpus.lengths().zip(released).map(|(len, list)| list.map(|l| (len, l))).collect::<Result<BTreeMap<_, _>>>()?;
    Ok(assemble_corpus(overall, by_length).mark_released())
}

/// Exact `Σ|f_i − f̃_i|`, padding the shorter list with zeros.
pub fn l1_distance(a: &FrequencyList, b: &FrequencyList) -> u64 {
    let mut ra = a.runs().iter().map(|r| (r.count, r.multiplicity));
    let mut rb = b.runs().iter().map(|r| (r.count, r.multiplicity));
    let (mut ca, mut cb) = (ra.next(), rb.next());
    let mut total = 0u64;
    loop {
        match (ca, cb) {
            (None, None) => return total,
            (Some((c, m)), None) => {
                total += c * m;
                ca = ra.next();
            }
            (None, Some((c, m))) => {
                total += c * m;
                cb = rb.next();
            }
            (Some((x, mx)), Some((y, my))) => {
                let step = mx.min(my);
                total += x.abs_diff(y) * step;
                ca = if mx > step { Some((x, mx - step)) } else { ra.next() };
                cb = if my > step { Some((y, my - step)) } else { rb.next() };
            }
        }
    }
}

/// `(√N + ln(1/δ)) / ε` for the original list's `N`.
pub fn l1_bound(total: u64, params: &DPParams) -> f64 {
    ((total as f64).sqrt() + (1.0 / params.delta).ln()) / params.epsilon
}

pub fn l1_report(original: &FrequencyList, released: &FrequencyList, params: &DPParams) -> DPReport {
    let l1_error = l1_distance(original, released);
    let bound_value = l1_bound(original.total(), params);
    DPReport { l1_error, bound_value, ratio: l1_error as f64 / bound_value }
}
