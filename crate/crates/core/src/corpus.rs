//! Password frequency lists and corpora.
//!
//! A [`FrequencyList`] is stored in count-of-counts form: a [`RunList`] of
//! `(count, multiplicity)` pairs with strictly decreasing counts, plus a
//! [`PrefixIndex`] with per-run cumulative sums. Every rank-prefix quantity
//! the attacker models need (`Σ f_i` and `Σ i·f_i` over the first `B` ranks)
//! is then an `O(log runs)` lookup, which keeps corpora with ~10⁸ users
//! cheap to evaluate.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a + (a+1) + ... + b`, zero when `b < a`.
pub(crate) fn arith_sum(a: u64, b: u64) -> u128 {
    if b < a {
        return 0;
    }
    let (a, b) = (a as u128, b as u128);
    (a + b) * (b - a + 1) / 2
}

/// A block of consecutive ranks sharing the same count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub count: u64,
    pub multiplicity: u64,
}

/// Count-of-counts compression of a frequency list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunList {
    runs: Vec<Run>,
    total: u64,
    len: u64,
}

impl RunList {
    /// Builds a run list, rejecting counts that are not strictly decreasing
    /// and runs with zero multiplicity.
    pub fn new(runs: Vec<Run>) -> Result<Self> {
        let mut total: u64 = 0;
        let mut len: u64 = 0;
        for (i, run) in runs.iter().enumerate() {
            if run.multiplicity == 0 {
                return Err(Error::InvalidParams(format!("run {} has zero multiplicity", i + 1)));
            }
            if i > 0 && runs[i - 1].count <= run.count {
                return Err(Error::NotSorted { line: i + 1 });
            }
            total = run
                .count
                .checked_mul(run.multiplicity)
                .and_then(|m| total.checked_add(m))
                .ok_or_else(|| Error::InvalidParams("total count overflows u64".into()))?;
            len += run.multiplicity;
        }
        Ok(Self { runs, total, len })
    }

    /// Builds a run list from pairs that may repeat a count, merging adjacent
    /// equal counts and dropping empty runs. Counts must be non-increasing.
    pub(crate) fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Self> {
        let mut runs: Vec<Run> = Vec::new();
        for (count, multiplicity) in pairs {
            if multiplicity == 0 {
                continue;
            }
            match runs.last_mut() {
                Some(last) if last.count == count => last.multiplicity += multiplicity,
                Some(last) if last.count < count => return Err(Error::NotSorted { line: runs.len() + 1 }),
                _ => runs.push(Run { count, multiplicity }),
            }
        }
        Self::new(runs)
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Number of users, `Σ c·m`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of ranks, `Σ m`.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Expands the runs back into a frequency list.
    pub fn expand(&self) -> FrequencyList {
        FrequencyList::from_runs(self.clone())
    }
}

/// Per-run prefix sums over a [`RunList`].
///
/// Entry `j` covers every rank up to and including the last rank of run `j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrefixIndex {
    counts: Vec<u64>,
    cum_ranks: Vec<u64>,
    cum_mass: Vec<u64>,
    cum_rank_mass: Vec<u128>,
}

impl PrefixIndex {
    pub fn cum_ranks(&self) -> &[u64] {
        &self.cum_ranks
    }

    pub fn cum_mass(&self) -> &[u64] {
        &self.cum_mass
    }

    pub fn cum_rank_mass(&self) -> &[u128] {
        &self.cum_rank_mass
    }

    fn len(&self) -> u64 {
        self.cum_ranks.last().copied().unwrap_or(0)
    }

    /// Returns `(ranks, mass, rank_mass)` accumulated before run `j`.
    fn before(&self, j: usize) -> (u64, u64, u128) {
        if j == 0 {
            (0, 0, 0)
        } else {
            (self.cum_ranks[j - 1], self.cum_mass[j - 1], self.cum_rank_mass[j - 1])
        }
    }

    /// `(Σ_{i≤b} f_i, Σ_{i≤b} i·f_i)` with `b` clamped to the list length.
    pub fn prefix(&self, b: u64) -> (u64, u128) {
        let b = b.min(self.len());
        if b == 0 {
            return (0, 0);
        }
        let j = self.cum_ranks.partition_point(|&end| end < b);
        let (start, mass, rank_mass) = self.before(j);
        let c = self.counts[j];
        let t = b - start;
        (mass + c * t, rank_mass + c as u128 * arith_sum(start + 1, b))
    }

    /// Count at 1-based `rank`, zero beyond the end of the list.
    pub fn count_at(&self, rank: u64) -> u64 {
        if rank == 0 || rank > self.len() {
            return 0;
        }
        self.counts[self.cum_ranks.partition_point(|&end| end < rank)]
    }
}

/// Builds the prefix structure for a run list.
pub fn index(runs: &RunList) -> PrefixIndex {
    let n = runs.runs.len();
    let mut idx = PrefixIndex {
        counts: Vec::with_capacity(n),
        cum_ranks: Vec::with_capacity(n),
        cum_mass: Vec::with_capacity(n),
        cum_rank_mass: Vec::with_capacity(n),
    };
    let (mut ranks, mut mass, mut rank_mass) = (0u64, 0u64, 0u128);
    for run in &runs.runs {
        rank_mass += run.count as u128 * arith_sum(ranks + 1, ranks + run.multiplicity);
        ranks += run.multiplicity;
        mass += run.count * run.multiplicity;
        idx.counts.push(run.count);
        idx.cum_ranks.push(ranks);
        idx.cum_mass.push(mass);
        idx.cum_rank_mass.push(rank_mass);
    }
    idx
}

/// Compresses a frequency list into runs.
pub fn compress(list: &FrequencyList) -> RunList {
    list.runs.clone()
}

/// Non-increasing list of per-password user counts.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FrequencyList {
    runs: RunList,
    index: PrefixIndex,
}

impl fmt::Debug for FrequencyList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyList").field("total", &self.total()).field("runs", &self.runs.runs).finish()
    }
}

impl FrequencyList {
    /// Validates and wraps explicit counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if let Some(i) = counts.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::NotSorted { line: i + 2 });
        }
        let mut runs: Vec<Run> = Vec::new();
        for &c in counts {
            match runs.last_mut() {
                Some(last) if last.count == c => last.multiplicity += 1,
                _ => runs.push(Run { count: c, multiplicity: 1 }),
            }
        }
        Ok(Self::from_runs(RunList::new(runs)?))
    }

    pub fn from_runs(runs: RunList) -> Self {
        let index = index(&runs);
        Self { runs, index }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn run_list(&self) -> &RunList {
        &self.runs
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs.runs
    }

    pub fn prefix_index(&self) -> &PrefixIndex {
        &self.index
    }

    /// Total number of users `N`.
    pub fn total(&self) -> u64 {
        self.runs.total
    }

    /// Number of ranks (distinct passwords).
    pub fn len(&self) -> u64 {
        self.runs.len
    }

    pub fn is_empty(&self) -> bool {
        self.runs.len == 0
    }

    /// Iterates the counts in rank order.
    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.runs.runs.iter().flat_map(|r| std::iter::repeat_n(r.count, r.multiplicity as usize))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.counts().collect()
    }

    /// `f_rank` for a 1-based rank; zero past the end.
    pub fn count_at(&self, rank: u64) -> u64 {
        self.index.count_at(rank)
    }

    /// `Σ_{i≤b} f_i`, saturating at `N`.
    pub fn mass(&self, b: u64) -> u64 {
        self.index.prefix(b).0
    }

    /// `Σ_{i≤b} i·f_i`, saturating at the full list.
    pub fn rank_mass(&self, b: u64) -> u128 {
        self.index.prefix(b).1
    }

    /// Number of ranks whose count is at least `threshold`.
    pub fn ranks_at_least(&self, threshold: u64) -> u64 {
        self.runs.runs.iter().take_while(|r| r.count >= threshold).map(|r| r.multiplicity).sum()
    }

    /// True when the first `b` ranks reach into entries observed at most once,
    /// where empirical probabilities overestimate the true tail.
    pub fn tail_flag(&self, b: u64) -> bool {
        b.min(self.len()) > self.ranks_at_least(2)
    }

    /// Count → multiplicity map, ignoring zero counts.
    fn count_histogram(&self) -> BTreeMap<u64, u64> {
        self.runs.runs.iter().filter(|r| r.count > 0).map(|r| (r.count, r.multiplicity)).collect()
    }
}

/// On-disk frequency list encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ListFormat {
    /// One decimal count per line.
    Freq,
    /// `count<TAB>multiplicity` per line.
    Runs,
}

impl FromStr for ListFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "freq" => Ok(Self::Freq),
            "runs" => Ok(Self::Runs),
            other => Err(Error::InvalidParams(format!("unknown list format {other:?}"))),
        }
    }
}

fn parse_count(token: &str, line: usize) -> Result<u64> {
    let token = token.trim();
    if let Some(rest) = token.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::NegativeCount { line });
        }
    }
    token.parse::<u64>().map_err(|_| Error::MalformedLine { line, content: token.to_string() })
}

/// Reads a frequency list in `freq` or `runs` format. Blank lines are ignored;
/// ordering is verified, never repaired.
pub fn load_frequency_list<R: Read>(source: R, format: ListFormat) -> Result<FrequencyList> {
    let reader = BufReader::new(source);
    let mut runs: Vec<Run> = Vec::new();
    for (i, line) in reader.split(b'\n').enumerate() {
        let lineno = i + 1;
        let bytes = line?;
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::InvalidUtf8 { line: lineno })?;
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        let (count, multiplicity) = match format {
            ListFormat::Freq => (parse_count(text, lineno)?, 1),
            ListFormat::Runs => {
                let mut parts = text.split('\t');
                let (Some(c), Some(m), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(Error::MalformedLine { line: lineno, content: text.to_string() });
                };
                (parse_count(c, lineno)?, parse_count(m, lineno)?)
            }
        };
        if multiplicity == 0 {
            continue;
        }
        match runs.last_mut() {
            Some(last) if last.count == count => last.multiplicity += multiplicity,
            Some(last) if last.count < count => return Err(Error::NotSorted { line: lineno }),
            _ => runs.push(Run { count, multiplicity }),
        }
    }
    Ok(FrequencyList::from_runs(RunList::new(runs)?))
}

/// Writes a list in the given format, one line per rank (`freq`) or per run
/// (`runs`).
pub fn write_frequency_list<W: std::io::Write>(
    list: &FrequencyList,
    format: ListFormat,
    mut out: W,
) -> std::io::Result<()> {
    match format {
        ListFormat::Freq => {
            for run in list.runs() {
                for _ in 0..run.multiplicity {
                    writeln!(out, "{}", run.count)?;
                }
            }
        }
        ListFormat::Runs => {
            for run in list.runs() {
                writeln!(out, "{}\t{}", run.count, run.multiplicity)?;
            }
        }
    }
    Ok(())
}

/// Length of every overall rank, with per-length lookups of which global
/// ranks carry that length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthTags {
    tags: Vec<u32>,
    positions: BTreeMap<u32, TagPositions>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct TagPositions {
    ranks: Vec<u64>,
    cum_mass: Vec<u64>,
}

impl LengthTags {
    fn build(tags: Vec<u32>, overall: &FrequencyList) -> Self {
        let mut positions: BTreeMap<u32, TagPositions> = BTreeMap::new();
        for ((rank, &tag), count) in (1u64..).zip(&tags).zip(overall.counts()) {
            let entry = positions.entry(tag).or_default();
            let prev = entry.cum_mass.last().copied().unwrap_or(0);
            entry.ranks.push(rank);
            entry.cum_mass.push(prev + count);
        }
        Self { tags, positions }
    }

    /// Length of the password at 1-based `rank`.
    pub fn tag(&self, rank: u64) -> Option<u32> {
        rank.checked_sub(1).and_then(|i| self.tags.get(i as usize)).copied()
    }

    pub fn tags(&self) -> &[u32] {
        &self.tags
    }

    /// Users among the global top-`b` ranks whose password has `length`.
    pub fn mass_in_top(&self, b: u64, length: u32) -> u64 {
        let Some(pos) = self.positions.get(&length) else {
            return 0;
        };
        let k = pos.ranks.partition_point(|&r| r <= b);
        if k == 0 {
            0
        } else {
            pos.cum_mass[k - 1]
        }
    }
}

/// An overall frequency list with per-length lists and length weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    overall: FrequencyList,
    by_length: BTreeMap<u32, FrequencyList>,
    length_tags: Option<LengthTags>,
    consistent: bool,
}

impl Corpus {
    pub fn overall(&self) -> &FrequencyList {
        &self.overall
    }

    pub fn by_length(&self) -> &BTreeMap<u32, FrequencyList> {
        &self.by_length
    }

    pub fn length_list(&self, length: u32) -> Result<&FrequencyList> {
        self.by_length.get(&length).ok_or(Error::UnknownLength(length))
    }

    pub fn lengths(&self) -> impl Iterator<Item = u32> + '_ {
        self.by_length.keys().copied()
    }

    pub fn length_tags(&self) -> Option<&LengthTags> {
        self.length_tags.as_ref()
    }

    /// True when the per-length lists partition the overall multiset.
    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub(crate) fn mark_released(mut self) -> Self {
        self.consistent = false;
        self
    }

    /// `Σ_ℓ N_ℓ`, the denominator of the length weights.
    pub fn length_total(&self) -> u64 {
        self.by_length.values().map(FrequencyList::total).sum()
    }

    /// `Pr[P^ℓ] = N_ℓ / Σ_ℓ' N_ℓ'`; zero for absent lengths.
    pub fn length_weight(&self, length: u32) -> f64 {
        let denom = self.length_total();
        match self.by_length.get(&length) {
            Some(list) if denom > 0 => list.total() as f64 / denom as f64,
            _ => 0.0,
        }
    }
}

/// Combines independently supplied lists, flagging (not rejecting) corpora
/// whose per-length lists do not partition the overall list.
pub fn assemble_corpus(overall: FrequencyList, by_length: BTreeMap<u32, FrequencyList>) -> Corpus {
    let consistent = is_partition(&overall, &by_length);
    Corpus { overall, by_length, length_tags: None, consistent }
}

fn is_partition(overall: &FrequencyList, by_length: &BTreeMap<u32, FrequencyList>) -> bool {
    let sum: u64 = by_length.values().map(FrequencyList::total).sum();
    if sum != overall.total() {
        return false;
    }
    let mut available = overall.count_histogram();
    for list in by_length.values() {
        for (count, mult) in list.count_histogram() {
            match available.get_mut(&count) {
                Some(left) if *left >= mult => *left -= mult,
                _ => return false,
            }
        }
    }
    true
}

/// Builds a corpus from one password per line. Length is the number of
/// Unicode scalar values; equal frequencies are ranked lexicographically.
pub fn load_plaintext_corpus<R: Read>(source: R) -> Result<Corpus> {
    let reader = BufReader::new(source);
    let mut freq: HashMap<String, u64> = HashMap::new();
    for (i, line) in reader.split(b'\n').enumerate() {
        let mut bytes = line?;
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
        if bytes.is_empty() {
            continue;
        }
        let pwd = String::from_utf8(bytes).map_err(|_| Error::InvalidUtf8 { line: i + 1 })?;
        *freq.entry(pwd).or_insert(0) += 1;
    }
    if freq.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut entries: Vec<(String, u64)> = freq.into_iter().collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let counts: Vec<u64> = entries.iter().map(|e| e.1).collect();
    let tags: Vec<u32> = entries.iter().map(|e| e.0.chars().count() as u32).collect();
    drop(entries);

    let mut grouped: BTreeMap<u32, Vec<(u64, u64)>> = BTreeMap::new();
    for (&count, &tag) in counts.iter().zip(&tags) {
        grouped.entry(tag).or_default().push((count, 1));
    }
    let by_length = grouped
        .into_iter()
        .map(|(len, pairs)| Ok((len, FrequencyList::from_runs(RunList::from_pairs(pairs)?))))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let overall = FrequencyList::from_counts(&counts)?;
    let length_tags = LengthTags::build(tags, &overall);
    Ok(Corpus { overall, by_length, length_tags: Some(length_tags), consistent: true })
}

/// Corpus file encodings accepted by [`load_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    List(ListFormat),
    Plain,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Self::Plain),
            other => other.parse().map(Self::List),
        }
    }
}

/// Loads a corpus from disk.
///
/// List formats read a directory holding `overall.txt` and one `len<ℓ>.txt`
/// per length. The plain format reads a password file, or `passwords.txt`
/// when given a directory.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    match format {
        CorpusFormat::Plain => {
            let file = if path.is_dir() { path.join("passwords.txt") } else { path.to_path_buf() };
            load_plaintext_corpus(File::open(file)?)
        }
        CorpusFormat::List(fmt) => {
            let overall = load_frequency_list(File::open(path.join("overall.txt"))?, fmt)?;
            let mut by_length = BTreeMap::new();
            for entry in std::fs::read_dir(path)? {
                let entry = entry?;
                let name = entry.file_name();
                let Some(name) = name.to_str() else { continue };
                let Some(len) =
                    name.strip_prefix("len").and_then(|s| s.strip_suffix(".txt")).and_then(|s| s.parse::<u32>().ok())
                else {
                    continue;
                };
                if len == 0 {
                    continue;
                }
                by_length.insert(len, load_frequency_list(File::open(entry.path())?, fmt)?);
            }
            Ok(assemble_corpus(overall, by_length))
        }
    }
}

/// Writes a corpus in the directory convention read by [`load_corpus`].
pub fn write_corpus_dir(corpus: &Corpus, dir: &Path, format: ListFormat) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let write = |name: String, list: &FrequencyList| -> Result<()> {
        let file = std::io::BufWriter::new(File::create(dir.join(name))?);
        write_frequency_list(list, format, file)?;
        Ok(())
    };
    write("overall.txt".into(), &corpus.overall)?;
    for (len, list) in &corpus.by_length {
        write(format!("len{len}.txt"), list)?;
    }
    Ok(())
}
