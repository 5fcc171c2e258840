//! Exhaustive enumeration of schedules for tiny instances.
//!
//! Every student-day cell either stays empty or hosts one visit at any start
//! whose slots are available; every day then picks any `L`-subset of its
//! remaining free slots. Partial assignments are only discarded when they are
//! already infeasible (overlap, too many visits, gap broken, totals
//! unreachable). Leaves are judged by [`check_schedule`] and scored by
//! [`evaluate_objective`]. Nothing here is shared with the solver.

use crate::instance::{ProblemInstance, StudentId};
use crate::schedule::{Placement, Schedule};
use crate::solver::{SearchStats, SolveResult, SolveStatus};
use crate::validator::{check_schedule, evaluate_objective};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

/// Enumeration tree grew past its node budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded;

struct Enumerator<'a> {
    inst: &'a ProblemInstance,
    students: Vec<StudentId>,
    grid: Vec<Vec<bool>>,
    placements: Vec<Placement>,
    counts: Vec<usize>,
    last_day: Vec<Option<usize>>,
    nodes: u64,
    budget: u64,
}

impl<'a> Enumerator<'a> {
    fn new(inst: &'a ProblemInstance, budget: u64) -> Self {
        let students: Vec<StudentId> = inst.students().collect();
        let n = students.len();
        Self {
            inst,
            students,
            grid: vec![vec![false; inst.slots_per_day() + 1]; inst.days() + 1],
            placements: Vec::new(),
            counts: vec![0; n],
            last_day: vec![None; n],
            nodes: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(BudgetExceeded)
        } else {
            Ok(())
        }
    }

    /// Cell index runs over students (outer) and days (inner).
    fn visits(&mut self, cell: usize, leaf: &mut dyn FnMut(&Schedule)) -> Result<(), BudgetExceeded> {
        self.tick()?;
        let days = self.inst.days();
        if cell == self.students.len() * days {
            return self.emergencies(1, &mut BTreeMap::new(), leaf);
        }
        let (si, day) = (cell / days, cell % days + 1);
        let student = self.students[si];
        let spec = self.inst.cohort(student.cohort);

        // Skip this day: the student must still be able to reach its total.
        if self.counts[si] + (days - day) >= spec.visits {
            self.visits(cell + 1, leaf)?;
        }

        if self.counts[si] >= spec.visits {
            return Ok(());
        }
        // Spacing windows only exist when the horizon covers one.
        let gap = if days > spec.gap { spec.gap } else { 0 };
        if let Some(last) = self.last_day[si] {
            if day - last <= gap {
                return Ok(());
            }
        }
        let len = spec.slot_length;
        for start in 1..=self.inst.slots_per_day() + 1 - len {
            let fits = (start..start + len).all(|k| self.inst.is_available(day, k) && !self.grid[day][k]);
            if !fits {
                continue;
            }
            for k in start..start + len {
                self.grid[day][k] = true;
            }
            self.placements.push(Placement::new(student, day, start, len));
            self.counts[si] += 1;
            let prev = self.last_day[si].replace(day);
            let r = self.visits(cell + 1, leaf);
            self.last_day[si] = prev;
            self.counts[si] -= 1;
            self.placements.pop();
            for k in start..start + len {
                self.grid[day][k] = false;
            }
            r?;
        }
        Ok(())
    }

    fn emergencies(
        &mut self,
        day: usize,
        chosen: &mut BTreeMap<usize, BTreeSet<usize>>,
        leaf: &mut dyn FnMut(&Schedule),
    ) -> Result<(), BudgetExceeded> {
        self.tick()?;
        if day > self.inst.days() {
            let schedule = Schedule { placements: self.placements.clone(), emergency: chosen.clone() };
            if check_schedule(self.inst, &schedule).is_empty() {
                leaf(&schedule);
            }
            return Ok(());
        }
        let free: Vec<usize> =
            (1..=self.inst.slots_per_day()).filter(|&k| self.inst.is_available(day, k) && !self.grid[day][k]).collect();
        let quota = self.inst.emergency_quota();
        let mut picks = Vec::with_capacity(quota);
        self.subsets(day, &free, 0, quota, &mut picks, chosen, leaf)
    }

    #[allow(clippy::too_many_arguments)]
    fn subsets(
        &mut self,
        day: usize,
        free: &[usize],
        from: usize,
        quota: usize,
        picks: &mut Vec<usize>,
        chosen: &mut BTreeMap<usize, BTreeSet<usize>>,
        leaf: &mut dyn FnMut(&Schedule),
    ) -> Result<(), BudgetExceeded> {
        if picks.len() == quota {
            if quota > 0 {
                chosen.insert(day, picks.iter().copied().collect());
            }
            let r = self.emergencies(day + 1, chosen, leaf);
            chosen.remove(&day);
            return r;
        }
        for i in from..free.len() {
            if free.len() - i < quota - picks.len() {
                break;
            }
            picks.push(free[i]);
            let r = self.subsets(day, free, i + 1, quota, picks, chosen, leaf);
            picks.pop();
            r?;
        }
        Ok(())
    }
}

/// Calls `leaf` on every feasible schedule. Returns the number of nodes visited.
pub fn for_each_feasible(
    instance: &ProblemInstance,
    node_budget: u64,
    mut leaf: impl FnMut(&Schedule),
) -> Result<u64, BudgetExceeded> {
    let mut e = Enumerator::new(instance, node_budget);
    e.visits(0, &mut leaf)?;
    Ok(e.nodes)
}

/// All feasible schedules, in canonical form.
pub fn enumerate_feasible(instance: &ProblemInstance, node_budget: u64) -> Result<Vec<Schedule>, BudgetExceeded> {
    let mut all = Vec::new();
    for_each_feasible(instance, node_budget, |s| all.push(s.canonical()))?;
    Ok(all)
}

/// True optimum by exhaustive enumeration, or [`SolveStatus::BudgetExceeded`].
pub fn brute_force_optimum(instance: &ProblemInstance, node_budget: u64) -> SolveResult {
    let started = Instant::now();
    let mut best: Option<(i64, Schedule)> = None;
    let outcome = for_each_feasible(instance, node_budget, |s| {
        let value = evaluate_objective(instance, s);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, s.clone()));
        }
    });
    let mut stats = SearchStats { wall_time: started.elapsed(), ..SearchStats::default() };
    match outcome {
        Err(BudgetExceeded) => {
            stats.nodes = node_budget;
            SolveResult { status: SolveStatus::BudgetExceeded, objective: None, lower_bound: 0, schedule: None, stats }
        }
        Ok(nodes) => {
            stats.nodes = nodes;
            match best {
                Some((value, schedule)) => SolveResult {
                    status: SolveStatus::Optimal,
                    objective: Some(value),
                    lower_bound: value,
                    schedule: Some(schedule),
                    stats,
                },
                None => SolveResult {
                    status: SolveStatus::Infeasible,
                    objective: None,
                    lower_bound: 0,
                    schedule: None,
                    stats,
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, CohortSpec};

    #[test]
    fn two_slot_day_optimum_is_4() {
        let inst = ProblemInstance::new(2, 1, vec![vec![true, true]], vec![CohortSpec::new("u", 1, 1, 1, 0)]).unwrap();
        let all = enumerate_feasible(&inst, 1_000).unwrap();
        assert_eq!(all.len(), 2);
        let r = brute_force_optimum(&inst, 1_000);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(4));
    }

    #[test]
    fn gap_too_long_is_infeasible() {
        let inst =
            ProblemInstance::new(2, 0, vec![vec![true, true]; 2], vec![CohortSpec::new("u", 1, 2, 1, 1)]).unwrap();
        let r = brute_force_optimum(&inst, 10_000);
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.schedule.is_none());
    }

    #[test]
    fn small_example_exceeds_tiny_budget() {
        let inst = parse_instance(include_str!("../../../fixtures/small.json")).unwrap();
        assert_eq!(brute_force_optimum(&inst, 100).status, SolveStatus::BudgetExceeded);
    }

    #[test]
    fn empty_instance_has_one_empty_schedule() {
        let inst = ProblemInstance::new(1, 0, vec![vec![true]], vec![]).unwrap();
        let r = brute_force_optimum(&inst, 10);
        assert_eq!(r.objective, Some(0));
    }
}
