//! Online password-guessing analytics with and without leaked password lengths.
//!
//! The crate is organised around password frequency lists (non-increasing
//! user counts per distinct password). On top of them it provides:
//!
//! * [`corpus`]: loading, validation and run-length compression of corpora,
//! * [`attack`]: fixed-budget success probabilities for attackers that do or
//!   do not learn the password length,
//! * [`econ`]: expected reward, cost and gain of a rational attacker and the
//!   gain-maximising guessing budget,
//! * [`dp`]: differentially private release of frequency lists,
//! * [`sim`]: a Monte Carlo oracle for all of the above,
//! * [`length`]: payload-size to password-length inference,
//! * [`report`]: table generation in CSV, Markdown and JSON.
//!
//! With the default `parallel` feature, batch evaluations run on rayon. All
//! randomised results are keyed by per-item substreams and are identical with
//! or without the feature.

pub mod attack;
pub mod corpus;
pub mod dp;
pub mod econ;
mod error;
pub mod length;
mod par;
pub mod report;
pub mod sim;
mod stream;

pub use attack::{Budget, Schedule};
pub use corpus::{Corpus, FrequencyList, PrefixIndex, Run, RunList};
pub use dp::{DPParams, DPReport};
pub use econ::{AttackerClass, AttackerSpec, EconResult, EconSummary};
pub use error::{Error, Result};
pub use length::SiteProfile;
pub use report::{OutputFormat, ReportSpec, Table, TableKind};
pub use sim::{SimConfig, SimMode, SimOutcome};
