//! Exact branch-and-bound over visit placements.
//!
//! The search fills the timetable in day and slot order: at the first slot
//! still open to visits it either starts some student's next visit there or
//! keeps the slot free of visits. Emergency slots are never branched on: once
//! visits are fixed, the cheapest valid reservation on each day is its lowest
//! free available slots. Nodes are bounded with the slot-packing relaxation in
//! [`state`](self) and explored depth-first under an increasing cost
//! threshold, so every completed pass raises the proven lower bound.

mod propagate;
mod search;
mod state;

pub use propagate::{lower_bound, propagate, Partial, Propagation, StudentDomain};
pub use search::{solve, solve_with_observer};

use crate::schedule::Schedule;
use std::fmt;
use std::time::Duration;
use thiserror::Error;

/// Widest day the solver handles; one bit per slot.
pub const MAX_SLOTS_PER_DAY: usize = state::MAX_SLOTS;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    /// Seconds; `0` means no limit.
    pub time_limit: f64,
    pub thread_count: usize,
    /// Single-threaded traversal with reproducible output.
    pub deterministic: bool,
    /// Seconds between progress reports; `0` disables periodic reports.
    pub log_interval: f64,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self { time_limit: 0.0, thread_count: 1, deterministic: false, log_interval: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimeoutNoSolution,
    /// Only produced by the brute-force oracle.
    BudgetExceeded,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeoutNoSolution => "timeout_no_solution",
            SolveStatus::BudgetExceeded => "budget_exceeded",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// Children or nodes discarded as infeasible by propagation.
    pub prunings: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<i64>,
    pub lower_bound: i64,
    pub schedule: Option<Schedule>,
    pub stats: SearchStats,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("thread_count must be at least 1")]
    NoThreads,
    #[error("time_limit must be finite and non-negative")]
    BadTimeLimit,
    #[error("days with {0} slots are not supported (at most {MAX_SLOTS_PER_DAY})")]
    TooManySlots(usize),
}

/// One progress report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub nodes: u64,
    pub incumbent: Option<i64>,
    pub bound: i64,
}

impl fmt::Display for Progress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nodes={} incumbent=", self.nodes)?;
        match self.incumbent {
            Some(v) => write!(f, "{v}")?,
            None => f.write_str("-")?,
        }
        write!(f, " bound={} gap=", self.bound)?;
        match self.incumbent {
            Some(v) if v > 0 => write!(f, "{:.2}%", 100.0 * (v - self.bound).max(0) as f64 / v as f64),
            Some(_) => f.write_str("0.00%"),
            None => f.write_str("inf"),
        }
    }
}

impl Progress {
    /// Parses a line produced by `Display`.
    pub fn parse(line: &str) -> Option<Progress> {
        let mut nodes = None;
        let mut incumbent = None;
        let mut bound = None;
        for field in line.split_whitespace() {
            let (key, value) = field.split_once('=')?;
            match key {
                "nodes" => nodes = value.parse().ok(),
                "incumbent" => incumbent = Some(if value == "-" { None } else { Some(value.parse().ok()?) }),
                "bound" => bound = value.parse().ok(),
                "gap" => {}
                _ => return None,
            }
        }
        Some(Progress { nodes: nodes?, incumbent: incumbent?, bound: bound? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progress_line_format() {
        let p = Progress { nodes: 12, incumbent: Some(200), bound: 150 };
        assert_eq!(p.to_string(), "nodes=12 incumbent=200 bound=150 gap=25.00%");
        assert_eq!(Progress::parse(&p.to_string()), Some(p));
        let q = Progress { nodes: 0, incumbent: None, bound: 3 };
        assert_eq!(q.to_string(), "nodes=0 incumbent=- bound=3 gap=inf");
        assert_eq!(Progress::parse(&q.to_string()), Some(q));
    }
}
