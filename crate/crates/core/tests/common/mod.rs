//! Random corpora and a brute-force per-user enumerator used as an oracle.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use pwleak_core::corpus::load_plaintext_corpus;
use pwleak_core::{Corpus, FrequencyList};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One password per user, skewed towards a small pool of favourites.
pub fn random_users(seed: u64, max_users: usize, max_lengths: usize) -> Vec<String> {
    let mut rng = rng(seed);
    let users = rng.random_range(1..=max_users);
    let all: Vec<usize> = (1..=30).collect();
    let take = rng.random_range(1..=max_lengths);
    let lengths: Vec<usize> = all.choose_multiple(&mut rng, take).copied().collect();
    let pool_size = rng.random_range(1..=users.max(2));
    let alphabet: Vec<char> = "abcde0123".chars().collect();
    let pool: Vec<String> = (0..pool_size)
        .map(|_| {
            let len = *lengths.choose(&mut rng).unwrap();
            (0..len).map(|_| *alphabet.choose(&mut rng).unwrap()).collect()
        })
        .collect();
    let exponent = rng.random_range(0.3..1.6);
    let zipf = Zipf::new(pool.len() as f64, exponent).unwrap();
    (0..users).map(|_| pool[rng.sample(zipf) as usize - 1].clone()).collect()
}

pub fn corpus_of(users: &[String]) -> Corpus {
    let text: String = users.iter().map(|p| format!("{p}\n")).collect();
    load_plaintext_corpus(text.as_bytes()).unwrap()
}

/// Sorted counts of a Zipf sample of `n` users over `10·n` passwords.
pub fn zipf_list(n: u64, seed: u64) -> FrequencyList {
    let mut rng = rng(seed);
    let zipf = Zipf::new((10 * n) as f64, 1.0).unwrap();
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for _ in 0..n {
        *counts.entry(rng.sample(zipf) as u64).or_default() += 1;
    }
    let mut c: Vec<u64> = counts.into_values().collect();
    c.sort_unstable_by(|a, b| b.cmp(a));
    FrequencyList::from_counts(&c).unwrap()
}

/// Per-user enumeration: every user's overall rank, rank within their
/// length and length, summarised as curves over every budget `0..=n+1`.
pub struct Oracle {
    pub users: Vec<(u64, u64, u32)>,
    pub distinct: u64,
    pub distinct_by_length: BTreeMap<u32, u64>,
}

fn ranking<'a>(passwords: impl Iterator<Item = &'a String>) -> HashMap<&'a str, u64> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for p in passwords {
        *counts.entry(p.as_str()).or_default() += 1;
    }
    let mut order: Vec<(&str, u64)> = counts.into_iter().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    order.into_iter().enumerate().map(|(i, (p, _))| (p, i as u64 + 1)).collect()
}

/// Curves indexed by budget `b ∈ 0..=limit`.
pub struct Curves {
    /// users cracked within `b` guesses
    pub cracked: Vec<u64>,
    /// total guesses spent, `N·C(1,b)`
    pub guesses: Vec<i128>,
}

impl Curves {
    pub fn new(ranks: &[u64], limit: u64) -> Self {
        let mut cracked = Vec::new();
        let mut guesses = Vec::new();
        for b in 0..=limit {
            cracked.push(ranks.iter().filter(|&&r| r <= b).count() as u64);
            guesses.push(ranks.iter().map(|&r| r.min(b) as i128).sum());
        }
        Curves { cracked, guesses }
    }

    /// `N·G(v,k,b)`: a cracked user pays `v`, every guess costs `k`.
    pub fn scaled_gain(&self, v: i128, k: i128, b: u64) -> i128 {
        v * self.cracked[b as usize] as i128 - k * self.guesses[b as usize]
    }

    /// Smallest maximiser of `N·G` over `0..=distinct`.
    pub fn argmax(&self, v: i128, k: i128, distinct: u64) -> (u64, i128) {
        let mut best = (0u64, self.scaled_gain(v, k, 0));
        for b in 1..=distinct {
            let g = self.scaled_gain(v, k, b);
            if g > best.1 {
                best = (b, g);
            }
        }
        best
    }
}

impl Oracle {
    pub fn new(users: &[String]) -> Self {
        let overall = ranking(users.iter());
        let mut by_len: BTreeMap<u32, Vec<&String>> = BTreeMap::new();
        for p in users {
            by_len.entry(p.chars().count() as u32).or_default().push(p);
        }
        let per_len: BTreeMap<u32, HashMap<&str, u64>> =
            by_len.iter().map(|(&l, ps)| (l, ranking(ps.iter().copied()))).collect();
        let users = users
            .iter()
            .map(|p| {
                let len = p.chars().count() as u32;
                (overall[p.as_str()], per_len[&len][p.as_str()], len)
            })
            .collect();
        Oracle {
            users,
            distinct: overall.len() as u64,
            distinct_by_length: per_len.iter().map(|(&l, m)| (l, m.len() as u64)).collect(),
        }
    }

    pub fn n(&self) -> u64 {
        self.users.len() as u64
    }

    pub fn lengths(&self) -> impl Iterator<Item = u32> + '_ {
        self.distinct_by_length.keys().copied()
    }

    pub fn overall_ranks(&self) -> Vec<u64> {
        self.users.iter().map(|u| u.0).collect()
    }

    /// Ranks within the length list of every length-`len` user.
    pub fn length_ranks(&self, len: u32) -> Vec<u64> {
        self.users.iter().filter(|u| u.2 == len).map(|u| u.1).collect()
    }

    /// Overall ranks of every length-`len` user.
    pub fn overall_ranks_of_length(&self, len: u32) -> Vec<u64> {
        self.users.iter().filter(|u| u.2 == len).map(|u| u.0).collect()
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
