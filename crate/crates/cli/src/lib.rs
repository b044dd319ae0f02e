//! `pwleak` command line: load a corpus, compute tables, release noisy
//! lists, simulate attacks and infer lengths from payload sizes.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pwleak_core::corpus::{load_corpus, write_corpus_dir, CorpusFormat, ListFormat};
use pwleak_core::dp::{l1_report, release_corpus};
use pwleak_core::length::{calibrate, infer_length, read_pairs};
use pwleak_core::report::{build_table, corpus_summary, emit_table, Cell};
use pwleak_core::{
    sim, Corpus, DPParams, Error, OutputFormat, ReportSpec, Schedule, SimConfig, SimMode, SiteProfile, Table, TableKind,
};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pwleak", version, about = "Password length leakage analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarise a corpus: users, distinct passwords and weight per list.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Print one of the analysis tables.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long, value_parser = parse_table)]
        table: TableKind,
        #[command(flatten)]
        params: TableParams,
    },
    /// Print the gain, econadv and bopt tables for a set of v/k ratios.
    Econ {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        params: TableParams,
    },
    /// Release differentially private copies of every list in a corpus.
    DpRelease {
        #[command(flatten)]
        input: Input,
        /// Output directory for the released corpus and dp_report.json.
        #[arg(long)]
        out: PathBuf,
        /// Total budget; each list is released at half of it.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Accepts plain numbers or powers such as `2^-100`.
        #[arg(long, default_value = "2^-100", value_parser = parse_real)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "freq", value_parser = parse_list_format)]
        list_format: ListFormat,
    },
    /// Monte Carlo estimate of an attack's success, cost and gain.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value = "100000", value_parser = parse_count)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Guessing budget for the fixed modes.
        #[arg(long, value_parser = parse_count)]
        budget: Option<u64>,
        /// Value per cracked account for the rational modes.
        #[arg(long, value_parser = parse_real)]
        value: Option<f64>,
        /// Cost per guess for the rational modes.
        #[arg(long, default_value_t = 1.0)]
        cost: f64,
    },
    /// Password length behind an encrypted payload size.
    InferLength {
        /// `bytes_per_char,overhead`
        #[arg(long, value_parser = parse_profile)]
        profile: SiteProfile,
        #[arg(long)]
        payload: u64,
    },
    /// Recover a site profile from `length,payload` observations.
    Calibrate {
        #[arg(long)]
        pairs: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Corpus directory (freq/runs) or password file (plain).
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "freq", value_parser = parse_corpus_format)]
    format: CorpusFormat,
}

#[derive(Args, Debug)]
struct Output {
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_output_format)]
    out_format: OutputFormat,
}

#[derive(Args, Debug)]
struct TableParams {
    /// Comma-separated budgets, e.g. `1e2,1e3,5000`.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    budgets: Option<Vec<u64>>,
    /// Comma-separated v/k ratios.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    ratios: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<u32>>,
    /// Comma-separated `days x guesses_per_day`, e.g. `30x100`.
    #[arg(long, value_delimiter = ',', value_parser = parse_schedule)]
    schedules: Option<Vec<Schedule>>,
}

impl TableParams {
    fn spec(&self, table: TableKind, format: OutputFormat) -> ReportSpec {
        let mut spec = ReportSpec::new(table);
        spec.format = format;
        if let Some(b) = &self.budgets {
            spec.budgets = b.clone();
        }
        if let Some(r) = &self.ratios {
            spec.ratios = r.clone();
        }
        if let Some(l) = &self.lengths {
            spec.lengths = l.clone();
        }
        if let Some(s) = &self.schedules {
            spec.schedules = s.clone();
        }
        spec
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Fixed,
    FixedLength,
    Rational,
    RationalLength,
}

impl From<Mode> for SimMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Fixed => SimMode::FixedBudget,
            Mode::FixedLength => SimMode::FixedBudgetWithLength,
            Mode::Rational => SimMode::Rational,
            Mode::RationalLength => SimMode::RationalWithLength,
        }
    }
}

fn parse_table(s: &str) -> Result<TableKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_output_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_corpus_format(s: &str) -> Result<CorpusFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_list_format(s: &str) -> Result<ListFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A real number, or `base^exponent`.
fn parse_real(s: &str) -> Result<f64, String> {
    let value = match s.split_once('^') {
        Some((base, exp)) => {
            let base: f64 = base.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
            let exp: f64 = exp.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
            base.powf(exp)
        }
        None => s.trim().parse().map_err(|_| format!("bad number {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

/// A non-negative integer, also written as `1e5` or `2^20`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.trim().parse::<u64>() {
        return Ok(n);
    }
    let x = parse_real(s)?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(format!("{s:?} is not a non-negative integer"));
    }
    Ok(x as u64)
}

fn parse_profile(s: &str) -> Result<SiteProfile, String> {
    let (r, o) = s.split_once(',').ok_or_else(|| format!("expected bytes_per_char,overhead, got {s:?}"))?;
    let r = parse_count(r)?;
    let o = parse_count(o)?;
    SiteProfile::new(r, o).map_err(|e| e.to_string())
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    let (d, g) = s.split_once('x').ok_or_else(|| format!("expected DAYSxGUESSES, got {s:?}"))?;
    Schedule::new(parse_count(d)?, parse_count(g)?).map_err(|e| e.to_string())
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::UnknownLength(_) | Error::LengthTagsUnavailable => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure { code, message: e.to_string() }
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INTERNAL, message: e.to_string() }
}

fn write_output(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::from(Error::Io(e))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(internal)
        }
    }
}

fn emit_tables(tables: &[Table], format: OutputFormat) -> String {
    match format {
        // one JSON document per table, one per line block
        OutputFormat::Json => tables.iter().map(|t| emit_table(t, format)).collect(),
        _ => tables.iter().map(|t| emit_table(t, format)).collect::<Vec<_>>().join("\n"),
    }
}

fn load(input: &Input) -> Result<Corpus, Failure> {
    Ok(load_corpus(&input.corpus, input.format)?)
}

fn dp_release(
    corpus: &Corpus,
    out: &Path,
    epsilon: f64,
    delta: f64,
    seed: u64,
    list_format: ListFormat,
) -> Result<(), Failure> {
    let released = release_corpus(corpus, epsilon, delta, seed)?;
    write_corpus_dir(&released, out, list_format)?;
    let params = DPParams::new(epsilon / 2.0, delta, seed)?;
    let mut report = BTreeMap::new();
    report.insert("overall".to_string(), l1_report(corpus.overall(), released.overall(), &params));
    for (len, list) in corpus.by_length() {
        report.insert(format!("len{len}"), l1_report(list, &released.by_length()[len], &params));
    }
    let mut text = serde_json::to_string_pretty(&report).map_err(internal)?;
    text.push('\n');
    std::fs::write(out.join("dp_report.json"), text).map_err(|e| Failure::from(Error::Io(e)))
}

fn simulate(
    corpus: &Corpus,
    mode: SimMode,
    config: SimConfig,
    budget: Option<u64>,
    value: Option<f64>,
    cost: f64,
) -> Result<Table, Failure> {
    let usage = |m: &str| Failure { code: EXIT_USAGE, message: m.to_string() };
    let outcome = match mode {
        SimMode::FixedBudget | SimMode::FixedBudgetWithLength => {
            let b = budget.ok_or_else(|| usage("fixed modes need --budget"))?;
            sim::simulate_fixed(corpus, b, &config)?
        }
        SimMode::Rational | SimMode::RationalWithLength => {
            let v = value.ok_or_else(|| usage("rational modes need --value"))?;
            sim::simulate_rational(corpus, v, cost, &config)?
        }
    };
    let mut table = Table::new(
        "simulate",
        &["trials", "success_rate", "std_error", "mean_cost", "cost_std_error", "mean_gain", "gain_std_error"],
    );
    table.rows.push(vec![
        Cell::Int(outcome.trials),
        Cell::Param(outcome.success_rate),
        Cell::Param(outcome.std_error),
        Cell::Param(outcome.mean_cost),
        Cell::Param(outcome.cost_std_error),
        Cell::Param(outcome.mean_gain),
        Cell::Param(outcome.gain_std_error),
    ]);
    Ok(table)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { input, output } => {
            let corpus = load(&input)?;
            write_output(&output, &emit_table(&corpus_summary(&corpus), output.out_format))
        }
        Command::Report { input, output, table, params } => {
            let spec = params.spec(table, output.out_format);
            spec.validate()?;
            let corpus = load(&input)?;
            let table = build_table(&corpus, &spec)?;
            write_output(&output, &emit_table(&table, spec.format))
        }
        Command::Econ { input, output, params } => {
            let corpus = load(&input)?;
            let tables = [TableKind::Gain, TableKind::EconAdv, TableKind::Bopt]
                .into_iter()
                .map(|kind| build_table(&corpus, &params.spec(kind, output.out_format)))
                .collect::<pwleak_core::Result<Vec<_>>>()?;
            write_output(&output, &emit_tables(&tables, output.out_format))
        }
        Command::DpRelease { input, out, epsilon, delta, seed, list_format } => {
            DPParams::new(epsilon / 2.0, delta, seed)?;
            let corpus = load(&input)?;
            dp_release(&corpus, &out, epsilon, delta, seed, list_format)
        }
        Command::Simulate { input, output, mode, trials, seed, budget, value, cost } => {
            let config = SimConfig::new(trials, seed, mode.into())?;
            let corpus = load(&input)?;
            let table = simulate(&corpus, mode.into(), config, budget, value, cost)?;
            write_output(&output, &emit_table(&table, output.out_format))
        }
        Command::InferLength { profile, payload } => {
            let length = infer_length(payload, &profile)?;
            println!("{length}");
            Ok(())
        }
        Command::Calibrate { pairs } => {
            let file = File::open(&pairs).map_err(|e| Failure::from(Error::Io(e)))?;
            let profile = calibrate(&read_pairs(file)?)?;
            println!("{},{}", profile.bytes_per_char, profile.overhead);
            Ok(())
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
