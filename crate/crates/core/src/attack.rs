//! Success probabilities of an attacker that stops after a fixed number of
//! guesses, with and without knowing the password length.
//!
//! Budgets past the end of a list are clamped: the empirical list is taken
//! as the whole distribution, so success saturates at 1.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Number of guesses.
pub type Budget = u64;

/// A fixed number of guesses per day over a number of days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub days: u64,
    pub guesses_per_day: u64,
}

impl Schedule {
    pub fn new(days: u64, guesses_per_day: u64) -> Result<Self> {
        if days == 0 || guesses_per_day == 0 {
            return Err(Error::InvalidParams("schedule needs positive days and rate".into()));
        }
        Ok(Self { days, guesses_per_day })
    }

    pub fn budget(&self) -> Budget {
        self.days.saturating_mul(self.guesses_per_day)
    }
}

/// Probability of cracking a random password with the `b` globally most
/// popular guesses.
pub fn lambda_b(corpus: &Corpus, b: Budget) -> Result<f64> {
    let list = corpus.overall();
    if list.total() == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(list.mass(b) as f64 / list.total() as f64)
}

/// Probability of cracking a length-`length` password with the `b` most
/// popular guesses of that length.
pub fn lambda_star_b_ell(corpus: &Corpus, b: Budget, length: u32) -> Result<f64> {
    let list = corpus.length_list(length)?;
    if list.total() == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(list.mass(b) as f64 / list.total() as f64)
}

/// Length-weighted success when the attacker learns the length:
/// `Σ_ℓ Pr[P^ℓ]·λ*_{B,ℓ}`, evaluated as one integer sum over lengths.
pub fn lambda_star_b(corpus: &Corpus, b: Budget) -> Result<f64> {
    let denom = corpus.length_total();
    if denom == 0 {
        return Err(Error::EmptyCorpus);
    }
    let cracked: u64 = corpus.by_length().values().map(|l| l.mass(b)).sum();
    Ok(cracked as f64 / denom as f64)
}

/// Success without the length, conditioned on the password having
/// `length`. Needs per-rank length tags.
pub fn lambda_b_ell(corpus: &Corpus, b: Budget, length: u32) -> Result<f64> {
    let tags = corpus.length_tags().ok_or(Error::LengthTagsUnavailable)?;
    let list = corpus.length_list(length)?;
    if list.total() == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(tags.mass_in_top(b, length) as f64 / list.total() as f64)
}

/// `(with length, without length)` success after a daily-limited attack,
/// treating the whole schedule as one popularity-ordered guess sequence.
pub fn time_attack(corpus: &Corpus, schedule: Schedule) -> Result<(f64, f64)> {
    let b = schedule.budget();
    Ok((lambda_star_b(corpus, b)?, lambda_b(corpus, b)?))
}

/// Whether budget `b` on the overall list reaches singleton observations.
pub fn tail_flag(corpus: &Corpus, b: Budget) -> bool {
    corpus.overall().tail_flag(b)
}
