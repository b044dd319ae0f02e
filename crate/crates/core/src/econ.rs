//! Rational-attacker economics: expected reward `R(v,B) = v·λ_B`, expected
//! cost `C(k,B) = (1−λ_B)·B·k + k·Σ_{i≤B} i·p_i` and gain `G = R − C`.
//!
//! All three share the denominator `N`, so they are evaluated from the exact
//! integer prefix sums `Σ f_i` and `Σ i·f_i` and divided once at the end.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, FrequencyList};
use crate::error::{Error, Result};
use crate::par;

/// Attacker classes by value-to-cost ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackerClass {
    Hacker,
    Criminal,
    NationState,
    Custom,
}

impl AttackerClass {
    /// Hacker for `v/k ∈ [10², 10³]`, criminal for `[10⁴, 10⁵]`, nation
    /// state for `[10⁶, 10⁷]`, custom otherwise.
    pub fn for_ratio(ratio: f64) -> Self {
        match ratio {
            r if (1e2..=1e3).contains(&r) => Self::Hacker,
            r if (1e4..=1e5).contains(&r) => Self::Criminal,
            r if (1e6..=1e7).contains(&r) => Self::NationState,
            _ => Self::Custom,
        }
    }
}

/// Value per cracked password and cost per guess.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackerSpec {
    pub value: f64,
    pub cost: f64,
    pub class: AttackerClass,
}

impl AttackerSpec {
    pub fn new(value: f64, cost: f64, class: AttackerClass) -> Result<Self> {
        check_value(value)?;
        check_cost(cost)?;
        if class != AttackerClass::Custom && AttackerClass::for_ratio(value / cost) != class {
            return Err(Error::InvalidParams(format!("v/k = {} is outside the {class:?} band", value / cost)));
        }
        Ok(Self { value, cost, class })
    }

    /// Spec with `k = 1` and the class implied by the ratio.
    pub fn from_ratio(ratio: f64) -> Result<Self> {
        Self::new(ratio, 1.0, AttackerClass::for_ratio(ratio))
    }

    pub fn ratio(&self) -> f64 {
        self.value / self.cost
    }
}

/// Outcome of the gain-maximising budget search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconResult {
    pub b_opt: u64,
    pub gain: f64,
    pub success: f64,
    pub tail_flagged: bool,
}

fn check_value(v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("value must be finite and non-negative, got {v}")))
    }
}

fn check_cost(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("cost must be finite and positive, got {k}")))
    }
}

fn nonempty(view: &FrequencyList) -> Result<f64> {
    match view.total() {
        0 => Err(Error::EmptyCorpus),
        n => Ok(n as f64),
    }
}

/// `N·C(1,B)`: guesses spent, summed over all users.
fn cost_units(view: &FrequencyList, b: u64) -> u128 {
    let b = b.min(view.len());
    let (mass, rank_mass) = view.prefix_index().prefix(b);
    b as u128 * (view.total() - mass) as u128 + rank_mass
}

/// `N·G(v,k,B)`.
fn scaled_gain(view: &FrequencyList, v: f64, k: f64, b: u64) -> f64 {
    v * view.mass(b) as f64 - k * cost_units(view, b) as f64
}

/// Expected guessing cost after at most `b` guesses.
pub fn expected_cost(view: &FrequencyList, k: f64, b: u64) -> Result<f64> {
    let n = nonempty(view)?;
    check_cost(k)?;
    Ok(k * cost_units(view, b) as f64 / n)
}

/// Expected reward after at most `b` guesses.
pub fn expected_reward(view: &FrequencyList, v: f64, b: u64) -> Result<f64> {
    let n = nonempty(view)?;
    check_value(v)?;
    Ok(v * view.mass(b) as f64 / n)
}

/// Expected gain, reward minus cost.
pub fn gain(view: &FrequencyList, v: f64, k: f64, b: u64) -> Result<f64> {
    let n = nonempty(view)?;
    check_value(v)?;
    check_cost(k)?;
    Ok(scaled_gain(view, v, k, b) / n)
}

/// Finds `argmax_B G(v,k,B)` over `B ∈ [0, n]`, preferring the smallest `B`
/// on ties.
///
/// Inside a run of equal counts `c` the marginal gain `v·c/N − k·(1−λ_B)`
/// grows with every step (`λ_B` grows, `c` does not), so `G` is convex on
/// the run and its maximum sits at one of the run's end points. Scanning
/// `B = 0` and every run end is therefore an exact search in `O(runs)` that
/// makes no unimodality assumption across runs.
pub fn optimal_budget(view: &FrequencyList, v: f64, k: f64) -> Result<EconResult> {
    let n = nonempty(view)?;
    check_value(v)?;
    check_cost(k)?;
    let mut best_b = 0u64;
    let mut best = 0.0f64;
    for &end in view.prefix_index().cum_ranks() {
        let g = scaled_gain(view, v, k, end);
        if g > best {
            best = g;
            best_b = end;
        }
    }
    Ok(EconResult {
        b_opt: best_b,
        gain: best / n,
        success: view.mass(best_b) as f64 / n,
        tail_flagged: view.tail_flag(best_b),
    })
}

/// `num / den` with `+∞` for a zero denominator and NaN when both are zero.
pub fn safe_ratio(num: f64, den: f64) -> f64 {
    if den != 0.0 {
        num / den
    } else if num == 0.0 {
        f64::NAN
    } else {
        f64::INFINITY
    }
}

/// Per-length optimum inside a [`RatioRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthOptimum {
    pub b_opt: u64,
    pub gain: f64,
    /// `λ̄*_{v,k,ℓ}`: success with the length known.
    pub success_with_length: f64,
    /// `λ̄_{v,k,ℓ}`: success of the length-blind optimum on length-ℓ
    /// passwords; present only for corpora with rank tags.
    pub success_without_length: Option<f64>,
    pub tail_flagged: bool,
}

/// With- and without-length outcomes at one `v/k` ratio, in units of `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub ratio: f64,
    /// `G*/k`
    pub gain_with_length: f64,
    /// `G/k`
    pub gain_without_length: f64,
    /// `λ̄*`
    pub success_with_length: f64,
    /// `λ̄`
    pub success_without_length: f64,
    /// `B^OPT` on the overall list.
    pub b_opt: u64,
    pub by_length: BTreeMap<u32, LengthOptimum>,
    pub tail_flagged: bool,
}

impl RatioRecord {
    pub fn gain_diff(&self) -> f64 {
        self.gain_with_length - self.gain_without_length
    }

    pub fn gain_ratio(&self) -> f64 {
        safe_ratio(self.gain_with_length, self.gain_without_length)
    }

    pub fn success_diff(&self) -> f64 {
        self.success_with_length - self.success_without_length
    }

    pub fn success_ratio(&self) -> f64 {
        safe_ratio(self.success_with_length, self.success_without_length)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconSummary {
    pub records: Vec<RatioRecord>,
}

/// Evaluates both experiments at each `v/k` ratio with `k = 1`.
pub fn econ_summary(corpus: &Corpus, ratios: &[f64]) -> Result<EconSummary> {
    let length_total = corpus.length_total();
    if corpus.overall().total() == 0 || length_total == 0 {
        return Err(Error::EmptyCorpus);
    }
    for &r in ratios {
        check_value(r)?;
    }
    let lengths: Vec<(u32, &FrequencyList)> = corpus.by_length().iter().map(|(&l, list)| (l, list)).collect();
    let records = par::map(ratios, |&ratio| -> Result<RatioRecord> {
        let overall = optimal_budget(corpus.overall(), ratio, 1.0)?;
        let per_length = par::map(&lengths, |&(len, list)| -> Result<(u32, LengthOptimum)> {
            let opt = optimal_budget(list, ratio, 1.0)?;
            let without =
                corpus.length_tags().map(|tags| tags.mass_in_top(overall.b_opt, len) as f64 / list.total() as f64);
            Ok((
                len,
                LengthOptimum {
                    b_opt: opt.b_opt,
                    gain: opt.gain,
                    success_with_length: opt.success,
                    success_without_length: without,
                    tail_flagged: opt.tail_flagged,
                },
            ))
        });
        let by_length = per_length.into_iter().collect::<Result<BTreeMap<_, _>>>()?;

        let denom = length_total as f64;
        let mut gain_star = 0.0;
        let mut cracked = 0u64;
        for (&len, opt) in &by_length {
            let list = &corpus.by_length()[&len];
            gain_star += list.total() as f64 / denom * opt.gain;
            cracked += list.mass(opt.b_opt);
        }
        let tail_flagged = overall.tail_flagged || by_length.values().any(|o| o.tail_flagged);
        Ok(RatioRecord {
            ratio,
            gain_with_length: gain_star,
            gain_without_length: overall.gain,
            success_with_length: cracked as f64 / denom,
            success_without_length: overall.success,
            b_opt: overall.b_opt,
            by_length,
            tail_flagged,
        })
    });
    Ok(EconSummary { records: records.into_iter().collect::<Result<Vec<_>>>()? })
}
