//! The checker: a depth-first interpreter for the goal language with the
//! inference rules built in and a clause store for everything else.

pub mod goal;
mod matching;
mod solve;
mod store;

pub use goal::{def_to_eqclause, valid_clause, with_type_checks, Atom, Goal};
pub use matching::match_pattern;
pub use solve::Session;
pub use store::{ClauseStore, MetaVarStore};

use thiserror::Error;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Conditions that abort a check, as opposed to the proof simply failing.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum KernelError {
    /// A proof tried to introduce a clause outside the permitted grammar,
    /// or bound a non-object-level type with `elam`.
    #[error("validity error: {0}")]
    Validity(String),
    /// Unification left the higher-order pattern fragment.
    #[error("pattern error: {0}")]
    Pattern(String),
    #[error("resource limit: step budget of {0} exhausted")]
    Resource(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Success,
    Failure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraceLevel {
    Quiet,
    Summary,
    Trace,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub budget: u64,
    pub trace: TraceLevel,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            budget: DEFAULT_BUDGET,
            trace: TraceLevel::Summary,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Atomic goals dispatched plus clauses tried.
    pub steps: u64,
    pub clauses_pushed: u64,
    pub max_store_depth: usize,
    pub eigenvariables: u64,
    pub metavariables: u64,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub stats: Stats,
    /// On failure, the chain of atomic goals leading to the deepest point
    /// reached, outermost first. Only collected at `TraceLevel::Trace`.
    pub trace: Vec<String>,
    /// On failure, the goal that could not be solved at that point.
    pub failed_goal: Option<String>,
    /// Notes on why the deepest goal failed.
    pub reason: Option<String>,
}

impl CheckReport {
    pub fn success(&self) -> bool {
        self.verdict == Verdict::Success
    }
}
