//! Candidate filtering and bounds for arbitrary partial assignments.

use super::state::{SearchState, MAX_SLOTS};
use crate::instance::{ProblemInstance, StudentId};
use crate::schedule::Placement;
use std::collections::{BTreeMap, BTreeSet};

/// Fixed visits and fixed emergency slots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partial {
    pub placements: Vec<Placement>,
    pub emergency: BTreeMap<usize, BTreeSet<usize>>,
}

/// Remaining candidates for one student's unplaced visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StudentDomain {
    pub student: StudentId,
    pub remaining: usize,
    pub candidates: Vec<Placement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagation {
    Consistent(Vec<StudentDomain>),
    Contradiction(String),
}

fn load(instance: &ProblemInstance, partial: &Partial) -> Result<SearchState, String> {
    if instance.slots_per_day() > MAX_SLOTS {
        return Err(format!("{} slots per day exceeds {MAX_SLOTS}", instance.slots_per_day()));
    }
    let mut state = SearchState::new(instance, false);
    let index: BTreeMap<StudentId, usize> = state.students.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
    for p in &partial.placements {
        let si = *index.get(&p.student).ok_or_else(|| format!("unknown student {}", p.student))?;
        let st = &state.students[si];
        if p.length != st.len {
            return Err(format!("placement of {} has length {}, expected {}", p.student, p.length, st.len));
        }
        if p.day < 1 || p.day > state.days || !state.fits(p.day, p.start_slot, p.length) {
            return Err(format!(
                "placement of {} on day {} slot {} overlaps or is unavailable",
                p.student, p.day, p.start_slot
            ));
        }
        if !state.day_allowed(si, p.day) {
            return Err(format!("placement of {} on day {} breaks its visit count or gap", p.student, p.day));
        }
        state.apply(si, p.day, p.start_slot);
    }
    for (&day, slots) in &partial.emergency {
        for &k in slots {
            if day < 1 || day > state.days || k < 1 || k > state.slots || !state.reserve(day, k) {
                return Err(format!("emergency slot {k} on day {day} cannot be reserved"));
            }
        }
    }
    Ok(state)
}

/// Removes candidate placements that overlap fixed entities or unavailable
/// slots, fall within a fixed visit's gap window for the same student, or
/// would leave a day too few slots for its emergency quota. Sound but not
/// complete.
pub fn propagate(instance: &ProblemInstance, partial: &Partial) -> Propagation {
    let state = match load(instance, partial) {
        Ok(s) => s,
        Err(why) => return Propagation::Contradiction(why),
    };
    if state.bound().is_none() {
        return Propagation::Contradiction("remaining demand does not fit the free slots".into());
    }
    let mut domains = Vec::new();
    for (si, st) in state.students.iter().enumerate() {
        let mut candidates = Vec::new();
        for day in (1..=state.days).filter(|&d| state.day_allowed(si, d)) {
            let mut starts = state.valid_starts(day, st.len_idx);
            while starts != 0 {
                let start = starts.trailing_zeros() as usize + 1;
                starts &= starts - 1;
                candidates.push(Placement::new(st.id, day, start, st.len));
            }
        }
        if st.remaining > 0 && (candidates.is_empty() || state.chain_capacity(si) < st.remaining) {
            return Propagation::Contradiction(format!("student {} cannot fit {} more visits", st.id, st.remaining));
        }
        domains.push(StudentDomain { student: st.id, remaining: st.remaining, candidates });
    }
    Propagation::Consistent(domains)
}

/// A value no larger than the objective of any completion of `partial`;
/// `i64::MAX` when the partial assignment admits no completion.
pub fn lower_bound(instance: &ProblemInstance, partial: &Partial) -> i64 {
    load(instance, partial).ok().and_then(|s| s.bound()).unwrap_or(i64::MAX)
}
