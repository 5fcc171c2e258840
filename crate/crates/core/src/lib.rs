//! Periodic provider-client meeting scheduling.
//!
//! A provider offers half-hour slots over a horizon of workdays; clients fall
//! into cohorts that each need a number of fixed-length meetings spaced by a
//! minimum gap, and every day keeps a quota of slots free for emergencies.
//! This crate builds the binary linear program for such an instance, solves it
//! exactly with an embedded branch-and-bound, and checks schedules against
//! every constraint without going through either.

pub mod fixtures;
pub mod instance;
pub mod model;
pub mod oracle;
pub mod rows;
pub mod schedule;
pub mod solver;
pub mod validator;

pub use instance::{
    parse_instance, precheck, serialize_instance, tile_availability, CohortSpec, Diagnostic, InstanceError,
    ProblemInstance, Severity, StudentId,
};
pub use model::{
    build_model, export_lp, model_stats, ConstraintRow, IlpModel, ModelStats, RowSense, VarKind, Variable,
};
pub use oracle::{brute_force_optimum, enumerate_feasible};
pub use rows::{Family, RowId};
pub use schedule::{parse_schedule, serialize_schedule, Placement, Schedule};
pub use solver::{
    lower_bound, propagate, solve, solve_with_observer, Partial, Progress, Propagation, SolveError, SolveParams,
    SolveResult, SolveStatus,
};
pub use validator::{check_schedule, check_schedule_scoped, evaluate_objective, CheckScope, Violation};
