use crate::exit;
use crate::render::{parse_student, render, RenderOptions, Scope, Style};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use meetplan::{
    build_model, check_schedule, evaluate_objective, export_lp, parse_instance, parse_schedule, precheck,
    serialize_schedule, solve_with_observer, ProblemInstance, Progress, Schedule, SolveParams, SolveStatus,
};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "meetplan", version, about = "Schedule periodic meetings with emergency slots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance to optimality.
    Solve {
        config: PathBuf,
        /// Seconds; 0 means no limit.
        #[arg(long, default_value_t = 0.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Single-threaded with reproducible output.
        #[arg(long)]
        deterministic: bool,
        /// Write the schedule here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seconds between periodic progress lines on standard error; 0 logs only improvements.
        #[arg(long, default_value_t = 5.0)]
        log_interval: f64,
    },
    /// Check a schedule against every constraint.
    Validate { config: PathBuf, schedule: PathBuf },
    /// Write the binary program in LP format.
    ExportLp {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a schedule as a timetable.
    Render {
        config: PathBuf,
        schedule: PathBuf,
        #[arg(long, conflicts_with = "student")]
        week: Option<usize>,
        /// COHORT:MEMBER, for example master:5 or M:5.
        #[arg(long)]
        student: Option<String>,
        #[arg(long, value_enum, default_value_t = Style::Grid)]
        style: Style,
    },
    /// Screen an instance for obvious infeasibility.
    Precheck { config: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_instance(path: &Path) -> Result<ProblemInstance> {
    parse_instance(&read(path)?).with_context(|| format!("invalid instance {}", path.display()))
}

fn load_schedule(inst: &ProblemInstance, path: &Path) -> Result<Schedule> {
    parse_schedule(inst, &read(path)?).with_context(|| format!("invalid schedule {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    match out {
        Some(path) => fs::write(path, &text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve { config, time_limit, threads, deterministic, out, log_interval } => {
            let inst = load_instance(&config)?;
            let params = SolveParams { time_limit, thread_count: threads, deterministic, log_interval };
            let r = solve_with_observer(&inst, &params, &|p: &Progress| eprintln!("{p}"))?;
            let objective = r.objective.map_or("-".to_string(), |v| v.to_string());
            let gap = match r.objective {
                Some(v) if v > 0 => format!("{:.2}%", 100.0 * (v - r.lower_bound).max(0) as f64 / v as f64),
                Some(_) => "0.00%".into(),
                None => "inf".into(),
            };
            println!(
                "status={} objective={objective} bound={} gap={gap} nodes={} time={:.3}s",
                r.status,
                r.lower_bound,
                r.stats.nodes,
                r.stats.wall_time.as_secs_f64()
            );
            if let Some(s) = &r.schedule {
                write_or_print(out.as_deref(), &serialize_schedule(&inst, s))?;
            }
            Ok(match r.status {
                SolveStatus::Optimal | SolveStatus::Feasible => exit::OK,
                SolveStatus::Infeasible => exit::INFEASIBLE,
                SolveStatus::TimeoutNoSolution | SolveStatus::BudgetExceeded => exit::TIMEOUT,
            })
        }
        Command::Validate { config, schedule } => {
            let inst = load_instance(&config)?;
            let sched = load_schedule(&inst, &schedule)?;
            let violations = check_schedule(&inst, &sched);
            for v in &violations {
                println!("{v}");
            }
            println!("{} violations", violations.len());
            println!("objective={}", evaluate_objective(&inst, &sched));
            Ok(if violations.is_empty() { exit::OK } else { exit::VIOLATIONS })
        }
        Command::ExportLp { config, out } => {
            let inst = load_instance(&config)?;
            write_or_print(out.as_deref(), &export_lp(&build_model(&inst)))?;
            Ok(exit::OK)
        }
        Command::Render { config, schedule, week, student, style } => {
            let inst = load_instance(&config)?;
            let sched = load_schedule(&inst, &schedule)?;
            let scope = match (week, student) {
                (Some(w), _) => Scope::Week(w),
                (None, Some(s)) => Scope::Student(parse_student(&inst, &s)?),
                (None, None) => Scope::Full,
            };
            print!("{}", render(&inst, &sched, &RenderOptions { scope, style })?);
            Ok(exit::OK)
        }
        Command::Precheck { config } => {
            let inst = load_instance(&config)?;
            let diags = precheck(&inst);
            for d in &diags {
                println!("{d}");
            }
            if diags.is_empty() {
                println!("no issues found");
            }
            Ok(if diags.iter().any(|d| d.is_fatal()) { exit::INFEASIBLE } else { exit::OK })
        }
    }
}
