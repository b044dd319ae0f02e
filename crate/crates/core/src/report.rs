//! Result tables and their CSV, Markdown and JSON renderings.
//!
//! Probabilities are printed with three decimals, gains with two, and
//! quotients with three; a zero denominator prints `inf`, and `0/0` or a
//! quantity the corpus cannot support prints `n/a`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::attack::{self, Schedule};
use crate::corpus::Corpus;
use crate::econ::{econ_summary, safe_ratio};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableKind {
    /// Success with and without the length at fixed budgets.
    LimitAdv,
    /// Per-length conditional success at fixed budgets.
    LimitStats,
    /// Rational-attacker gains.
    Gain,
    /// Rational-attacker success rates.
    EconAdv,
    /// Gain-maximising budgets.
    Bopt,
    /// Daily-limited attacks.
    TimeAttack,
}

impl TableKind {
    pub const ALL: [TableKind; 6] =
        [Self::LimitAdv, Self::LimitStats, Self::Gain, Self::EconAdv, Self::Bopt, Self::TimeAttack];

    pub fn name(self) -> &'static str {
        match self {
            Self::LimitAdv => "limitadv",
            Self::LimitStats => "limitstats",
            Self::Gain => "gain",
            Self::EconAdv => "econadv",
            Self::Bopt => "bopt",
            Self::TimeAttack => "timeattack",
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown table {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Md,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "md" => Ok(Self::Md),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParams(format!("unknown output format {other:?}"))),
        }
    }
}

/// Table selection and parameters. Ratios are `v/k` with `k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportSpec {
    pub table: TableKind,
    pub budgets: Vec<u64>,
    pub ratios: Vec<f64>,
    pub lengths: Vec<u32>,
    pub schedules: Vec<Schedule>,
    pub format: OutputFormat,
}

impl ReportSpec {
    /// Budgets and ratios `10²..10⁷`, lengths `5..9`, and schedules of
    /// {30, 90, 180, 360} days at {1, 10, 100} guesses per day.
    pub fn new(table: TableKind) -> Self {
        let decades = [1e2, 1e3, 1e4, 1e5, 1e6, 1e7];
        let schedules = [30, 90, 180, 360]
            .into_iter()
            .flat_map(|days| [1, 10, 100].map(|rate| Schedule { days, guesses_per_day: rate }))
            .collect();
        Self {
            table,
            budgets: decades.iter().map(|&d| d as u64).collect(),
            ratios: decades.to_vec(),
            lengths: (5..=9).collect(),
            schedules,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = match self.table {
            TableKind::LimitAdv => self.budgets.is_empty(),
            TableKind::LimitStats => self.budgets.is_empty() || self.lengths.is_empty(),
            TableKind::Gain | TableKind::EconAdv => self.ratios.is_empty(),
            TableKind::Bopt => self.ratios.is_empty() || self.lengths.is_empty(),
            TableKind::TimeAttack => self.schedules.is_empty(),
        };
        if empty {
            return Err(Error::InvalidParams(format!("{} table needs non-empty parameters", self.table)));
        }
        Ok(())
    }
}

/// One formatted cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    /// Input parameter such as a `v/k` ratio, printed as given.
    Param(f64),
    Prob(f64),
    Gain(f64),
    Quotient(f64),
    Flag(bool),
    Label(&'static str),
    NotAvailable,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let special = |x: f64, f: &mut fmt::Formatter<'_>| -> Option<fmt::Result> {
            if x.is_nan() {
                Some(f.write_str("n/a"))
            } else if x.is_infinite() {
                Some(f.write_str(if x > 0.0 { "inf" } else { "-inf" }))
            } else {
                None
            }
        };
        match *self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Param(x) => special(x, f).unwrap_or_else(|| write!(f, "{x}")),
            Cell::Prob(x) | Cell::Quotient(x) => special(x, f).unwrap_or_else(|| write!(f, "{x:.3}")),
            Cell::Gain(x) => special(x, f).unwrap_or_else(|| write!(f, "{x:.2}")),
            Cell::Flag(b) => write!(f, "{b}"),
            Cell::Label(s) => f.write_str(s),
            Cell::NotAvailable => f.write_str("n/a"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn lengths_present(corpus: &Corpus, lengths: &[u32]) -> Vec<u32> {
    lengths.iter().copied().filter(|l| corpus.by_length().contains_key(l)).collect()
}

/// Computes a table from a corpus. Requested lengths absent from the corpus
/// are skipped.
pub fn build_table(corpus: &Corpus, spec: &ReportSpec) -> Result<Table> {
    spec.validate()?;
    match spec.table {
        TableKind::LimitAdv => limit_adv(corpus, &spec.budgets),
        TableKind::LimitStats => limit_stats(corpus, &spec.budgets, &lengths_present(corpus, &spec.lengths)),
        TableKind::Gain | TableKind::EconAdv | TableKind::Bopt => {
            econ_table(corpus, spec.table, &spec.ratios, &lengths_present(corpus, &spec.lengths))
        }
        TableKind::TimeAttack => time_attack(corpus, &spec.schedules),
    }
}

fn limit_adv(corpus: &Corpus, budgets: &[u64]) -> Result<Table> {
    let mut table = Table::new("limitadv", &["B", "lambda_star", "diff", "ratio", "tail_flag"]);
    let rows = par::map(budgets, |&b| -> Result<Vec<Cell>> {
        let star = attack::lambda_star_b(corpus, b)?;
        let plain = attack::lambda_b(corpus, b)?;
        Ok(vec![
            Cell::Int(b),
            Cell::Prob(star),
            Cell::Prob(star - plain),
            Cell::Quotient(safe_ratio(star, plain)),
            Cell::Flag(attack::tail_flag(corpus, b)),
        ])
    });
    table.rows = rows.into_iter().collect::<Result<_>>()?;
    Ok(table)
}

fn limit_stats(corpus: &Corpus, budgets: &[u64], lengths: &[u32]) -> Result<Table> {
    let mut table =
        Table::new("limitstats", &["length", "B", "lambda_star_b_l", "lambda_b_l", "diff", "ratio", "tail_flag"]);
    let cells: Vec<(u32, u64)> = lengths.iter().flat_map(|&l| budgets.iter().map(move |&b| (l, b))).collect();
    let rows = par::map(&cells, |&(len, b)| -> Result<Vec<Cell>> {
        let star = attack::lambda_star_b_ell(corpus, b, len)?;
        let flag = Cell::Flag(corpus.length_list(len)?.tail_flag(b));
        let mut row = vec![Cell::Int(len as u64), Cell::Int(b), Cell::Prob(star)];
        match attack::lambda_b_ell(corpus, b, len) {
            Ok(plain) => {
                row.extend([Cell::Prob(plain), Cell::Prob(star - plain), Cell::Quotient(safe_ratio(star, plain))])
            }
            Err(Error::LengthTagsUnavailable) => row.extend([Cell::NotAvailable; 3]),
            Err(e) => return Err(e),
        }
        row.push(flag);
        Ok(row)
    });
    table.rows = rows.into_iter().collect::<Result<_>>()?;
    Ok(table)
}

fn econ_table(corpus: &Corpus, kind: TableKind, ratios: &[f64], lengths: &[u32]) -> Result<Table> {
    let summary = econ_summary(corpus, ratios)?;
    let mut table = match kind {
        TableKind::Gain => Table::new("gain", &["ratio", "gain_star", "gain", "diff", "gain_ratio", "tail_flag"]),
        TableKind::EconAdv => {
            Table::new("econadv", &["ratio", "lambda_bar_star", "lambda_bar", "diff", "success_ratio", "tail_flag"])
        }
        _ => {
            let mut cols = vec!["ratio".to_string(), "bopt".to_string()];
            cols.extend(lengths.iter().map(|l| format!("bopt_l{l}")));
            cols.push("tail_flag".into());
            Table { name: "bopt".into(), columns: cols, rows: Vec::new() }
        }
    };
    for rec in &summary.records {
        let mut row = vec![Cell::Param(rec.ratio)];
        match kind {
            TableKind::Gain => row.extend([
                Cell::Gain(rec.gain_with_length),
                Cell::Gain(rec.gain_without_length),
                Cell::Gain(rec.gain_diff()),
                Cell::Quotient(rec.gain_ratio()),
            ]),
            TableKind::EconAdv => row.extend([
                Cell::Prob(rec.success_with_length),
                Cell::Prob(rec.success_without_length),
                Cell::Prob(rec.success_diff()),
                Cell::Quotient(rec.success_ratio()),
            ]),
            _ => {
                row.push(Cell::Int(rec.b_opt));
                row.extend(lengths.iter().map(|l| Cell::Int(rec.by_length[l].b_opt)));
            }
        }
        row.push(Cell::Flag(rec.tail_flagged));
        table.rows.push(row);
    }
    Ok(table)
}

fn time_attack(corpus: &Corpus, schedules: &[Schedule]) -> Result<Table> {
    let mut table =
        Table::new("timeattack", &["days", "guesses_per_day", "budget", "with_length", "without_length", "tail_flag"]);
    let rows = par::map(schedules, |&s| -> Result<Vec<Cell>> {
        let schedule = Schedule::new(s.days, s.guesses_per_day)?;
        let (with, without) = attack::time_attack(corpus, schedule)?;
        Ok(vec![
            Cell::Int(s.days),
            Cell::Int(s.guesses_per_day),
            Cell::Int(schedule.budget()),
            Cell::Prob(with),
            Cell::Prob(without),
            Cell::Flag(attack::tail_flag(corpus, schedule.budget())),
        ])
    });
    table.rows = rows.into_iter().collect::<Result<_>>()?;
    Ok(table)
}

/// Corpus overview: one row for the overall list and one per length.
pub fn corpus_summary(corpus: &Corpus) -> Table {
    let mut table = Table::new("corpus", &["list", "users", "distinct", "weight", "singletons", "consistent"]);
    let singletons = |l: &crate::corpus::FrequencyList| l.ranks_at_least(1) - l.ranks_at_least(2);
    let o = corpus.overall();
    table.rows.push(vec![
        Cell::Label("overall"),
        Cell::Int(o.total()),
        Cell::Int(o.len()),
        Cell::Prob(1.0),
        Cell::Int(singletons(o)),
        Cell::Flag(corpus.is_consistent()),
    ]);
    for (&len, list) in corpus.by_length() {
        table.rows.push(vec![
            Cell::Int(len as u64),
            Cell::Int(list.total()),
            Cell::Int(list.len()),
            Cell::Prob(corpus.length_weight(len)),
            Cell::Int(singletons(list)),
            Cell::Flag(corpus.is_consistent()),
        ]);
    }
    table
}

#[derive(Serialize)]
struct JsonTable<'a> {
    table: &'a str,
    columns: &'a [String],
    rows: Vec<Vec<String>>,
}

fn render_rows(table: &Table) -> Vec<Vec<String>> {
    table.rows.iter().map(|r| r.iter().map(Cell::to_string).collect()).collect()
}

/// Renders a table. Output depends only on the table contents.
pub fn emit_table(table: &Table, format: OutputFormat) -> String {
    let rows = render_rows(table);
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns).expect("in-memory write");
            for row in &rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        OutputFormat::Md => {
            let mut out = String::new();
            let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
            out.push_str(&line(&table.columns));
            out.push_str(&line(&vec!["---".to_string(); table.columns.len()]));
            for row in &rows {
                out.push_str(&line(row));
            }
            out
        }
        OutputFormat::Json => {
            let doc = JsonTable { table: &table.name, columns: &table.columns, rows };
            let mut s = serde_json::to_string_pretty(&doc).expect("serialisable table");
            s.push('\n');
            s
        }
    }
}
