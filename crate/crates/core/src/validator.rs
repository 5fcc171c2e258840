//! Solver-free feasibility checks and objective evaluation over explicit
//! schedules. Each check works from the constraint definitions directly; it
//! never consults the model builder.

use crate::instance::{ProblemInstance, StudentId};
use crate::rows::{Family, RowId};
use crate::schedule::Schedule;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    /// A failed instantiation of one model row.
    Row(RowId),
    /// The schedule references something outside the instance.
    Structural,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl Violation {
    fn row(id: RowId, detail: String) -> Self {
        Self { kind: ViolationKind::Row(id), detail }
    }

    fn structural(detail: String) -> Self {
        Self { kind: ViolationKind::Structural, detail }
    }

    /// `eq1`..`eq14`, or `structural`.
    pub fn tag(&self) -> String {
        match &self.kind {
            ViolationKind::Row(id) => id.tag(),
            ViolationKind::Structural => "structural".into(),
        }
    }

    pub fn family(&self) -> Option<Family> {
        match &self.kind {
            ViolationKind::Row(id) => Some(id.family),
            ViolationKind::Structural => None,
        }
    }

    pub fn row_id(&self) -> Option<RowId> {
        match &self.kind {
            ViolationKind::Row(id) => Some(*id),
            ViolationKind::Structural => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Row(id) => write!(f, "{id}: {}", self.detail),
            ViolationKind::Structural => write!(f, "structural: {}", self.detail),
        }
    }
}

/// Which constraint families to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckScope {
    All,
    /// Daily emergency quota, slot capacity and per-day consecutiveness only.
    /// Used for excerpts of a longer horizon where totals and gaps cannot be
    /// judged.
    WithinDay,
}

/// Every failed constraint instantiation of `schedule` against `instance`.
pub fn check_schedule(instance: &ProblemInstance, schedule: &Schedule) -> Vec<Violation> {
    check_schedule_scoped(instance, schedule, CheckScope::All)
}

pub fn check_schedule_scoped(instance: &ProblemInstance, schedule: &Schedule, scope: CheckScope) -> Vec<Violation> {
    let days = instance.days();
    let slots = instance.slots_per_day();
    let mut out = Vec::new();

    // occupancy[day][slot] = number of entities on the slot
    let mut occupancy = vec![vec![0usize; slots + 1]; days + 1];
    // per student-day covered slot counts
    let mut covered: BTreeMap<(StudentId, usize), Vec<usize>> = BTreeMap::new();
    let mut seen_day: BTreeMap<(StudentId, usize), usize> = BTreeMap::new();

    for p in &schedule.placements {
        if !instance.contains(p.student) {
            out.push(Violation::structural(format!("unknown student {}", p.student)));
            continue;
        }
        if p.day < 1 || p.day > days {
            out.push(Violation::structural(format!(
                "student {} placed on day {} outside 1..={days}",
                p.student, p.day
            )));
            continue;
        }
        if p.length == 0 || p.start_slot < 1 || p.start_slot + p.length - 1 > slots {
            out.push(Violation::structural(format!(
                "student {} on day {} uses slots {}..{} outside 1..={slots}",
                p.student,
                p.day,
                p.start_slot,
                p.start_slot + p.length
            )));
            continue;
        }
        let n = seen_day.entry((p.student, p.day)).or_default();
        *n += 1;
        if *n == 2 {
            out.push(Violation::structural(format!("student {} has several placements on day {}", p.student, p.day)));
        }
        let cell = covered.entry((p.student, p.day)).or_insert_with(|| vec![0; slots + 1]);
        for k in p.slots() {
            cell[k] += 1;
            occupancy[p.day][k] += 1;
        }
    }
    for (&day, set) in &schedule.emergency {
        for &k in set {
            if day < 1 || day > days || k < 1 || k > slots {
                out.push(Violation::structural(format!("emergency slot {k} on day {day} outside the horizon")));
            } else {
                occupancy[day][k] += 1;
            }
        }
    }
    for (&(s, day), cell) in &covered {
        for (k, &n) in cell.iter().enumerate().filter(|(_, &n)| n > 1) {
            out.push(Violation::structural(format!("student {s} covers slot {k} on day {day} {n} times")));
        }
    }

    // Daily emergency quota.
    let quota = instance.emergency_quota();
    for j in 1..=days {
        let n = schedule.emergency.get(&j).map_or(0, |s| s.iter().filter(|&&k| k >= 1 && k <= slots).count());
        if n != quota {
            out.push(Violation::row(
                RowId::emergency(j),
                format!("day {j} reserves {n} emergency slots, expected {quota}"),
            ));
        }
    }

    // Slot capacity and availability.
    #[allow(clippy::needless_range_loop)]
    for j in 1..=days {
        for k in 1..=slots {
            let cap = usize::from(instance.is_available(j, k));
            let n = occupancy[j][k];
            if n > cap {
                let why = if cap == 0 { "unavailable slot" } else { "slot" };
                out.push(Violation::row(
                    RowId::capacity(j, k),
                    format!("{why} used by {n} entities on day {j}, slot {k}"),
                ));
            }
        }
    }

    // Per student-day: zero or R slots, all within one run of length R.
    for (&(s, day), cell) in &covered {
        let len = instance.cohort(s.cohort).slot_length;
        let used: Vec<usize> = (1..=slots).filter(|&k| cell[k] > 0).collect();
        if used.len() != len {
            out.push(Violation::row(
                RowId::linking(s.cohort, s.member, day),
                format!("student {s} uses {} slots on day {day}, expected 0 or {len}", used.len()),
            ));
        }
        for (a, &k) in used.iter().enumerate() {
            for &h in &used[a + 1..] {
                if h >= k + len {
                    out.push(Violation::row(
                        RowId::consecutive(s.cohort, s.member, day, k, h),
                        format!("student {s} uses slots {k} and {h} on day {day}, more than {len} apart"),
                    ));
                }
            }
        }
    }

    if scope == CheckScope::All {
        for s in instance.students() {
            let spec = instance.cohort(s.cohort);
            let per_day: Vec<usize> = (0..=days)
                .map(|j| covered.get(&(s, j)).map_or(0, |cell| cell.iter().filter(|&&n| n > 0).count()))
                .collect();
            let total: usize = per_day.iter().sum();
            let want = spec.slot_length * spec.visits;
            if total != want {
                out.push(Violation::row(
                    RowId::total(s.cohort, s.member),
                    format!("student {s} has {total} visit slots, expected {want}"),
                ));
            }
            for t in 1..=days.saturating_sub(spec.gap) {
                let window: usize = per_day[t..=t + spec.gap].iter().sum();
                if window > spec.slot_length {
                    out.push(Violation::row(
                        RowId::gap(s.cohort, s.member, t),
                        format!(
                            "student {s} has {window} visit slots in days {t}..={}, more than one visit",
                            t + spec.gap
                        ),
                    ));
                }
            }
        }
    }
    out
}

/// `2 * sum(k over visit slots) + sum(k over emergency slots)`. Structural
/// problems are ignored; only in-range cells contribute.
pub fn evaluate_objective(instance: &ProblemInstance, schedule: &Schedule) -> i64 {
    let slots = instance.slots_per_day();
    let visits: usize =
        schedule.placements.iter().map(|p| p.slots().filter(|&k| k >= 1 && k <= slots).sum::<usize>()).sum();
    let emergency: usize = schedule.emergency.values().flatten().filter(|&&k| k >= 1 && k <= slots).sum();
    2 * visits as i64 + emergency as i64
}
