//! Mutable search state: per-day slot masks, per-student progress, and the
//! bookkeeping behind the slot-packing lower bound.
//!
//! Lower bound. For a day whose free available slots are `F` and whose slots
//! still open to visits are `V ⊆ F` (`v_1 < v_2 < ...`), with `m` emergency
//! slots still owed, hosting `n` more visit slots costs at least
//! `c(n) = 2 * (v_1 + .. + v_n) + (m smallest of F \ {v_1 .. v_n})`. The
//! increment `c(n+1) - c(n) = v_{n+1} + max(v_{n+1}, g_n)`, where `g_n` is the
//! `(m+1)`-th smallest slot of `F \ {v_1 .. v_n}`, never decreases in `n`, so
//! the cheapest way to spread the remaining `S` visit slots over all days is
//! to take the `S` smallest increments across days. Consecutiveness,
//! per-student limits and gaps are relaxed away.

use crate::instance::{ProblemInstance, StudentId};
use crate::schedule::{Placement, Schedule};
use std::collections::BTreeSet;

pub(crate) const MAX_SLOTS: usize = 64;

#[derive(Debug, Clone)]
pub(crate) struct StudentState {
    pub id: StudentId,
    pub len: usize,
    pub gap: usize,
    pub len_idx: usize,
    pub remaining: usize,
    pub placed_days: Vec<usize>,
    /// Earliest day for the next visit; visits are placed in day order.
    pub next_min_day: usize,
}

/// A search decision: start a visit, or keep a slot free of visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Move {
    Place { student: usize, day: usize, start: usize },
    Skip { day: usize, slot: usize },
}

#[derive(Debug, Clone, Copy)]
enum Undo {
    Place { student: usize, mask: u64, prev_next_min: usize },
    Skip { day: usize, mask: u64 },
}

#[derive(Debug, Clone)]
pub(crate) struct SearchState {
    pub days: usize,
    pub slots: usize,
    avail: Vec<u64>,
    busy: Vec<u64>,
    reserved: Vec<u64>,
    /// Slots closed to visits but still usable for emergencies.
    blocked: Vec<u64>,
    need_e: Vec<usize>,
    pub lengths: Vec<usize>,
    /// starts[day][len_idx]: bit `s - 1` set when a visit of that length can start at slot `s`.
    starts: Vec<Vec<u64>>,
    hist: Vec<u32>,
    day_hist: Vec<Vec<u32>>,
    day_base: Vec<Option<i64>>,
    base_sum: i64,
    bad_days: usize,
    fixed_cost: i64,
    pub remaining_slots: usize,
    pub students: Vec<StudentState>,
    /// Placements in application order: (student index, day, start).
    pub placed: Vec<(usize, usize, usize)>,
    trail: Vec<Undo>,
    /// Enforce day order per student.
    pub ordered: bool,
}

#[inline]
fn run_mask(start: usize, len: usize) -> u64 {
    let bits = if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
    bits << (start - 1)
}

#[inline]
fn slot_sum(start: usize, len: usize) -> i64 {
    ((start + start + len - 1) * len / 2) as i64
}

/// 1-based position of the `i`-th (0-based) set bit of `mask`.
#[inline]
fn nth_bit(mut mask: u64, i: usize) -> Option<u32> {
    for _ in 0..i {
        if mask == 0 {
            return None;
        }
        mask &= mask - 1;
    }
    (mask != 0).then(|| mask.trailing_zeros() + 1)
}

/// Marginal costs and base cost of one day with `free` slots, of which `open`
/// may take visits, and `need` emergency slots still owed. Returns `None`
/// when the day cannot host the emergencies.
fn day_profile(free: u64, open: u64, need: usize, out: &mut [u32]) -> Option<i64> {
    let total = free.count_ones() as usize;
    if total < need {
        return None;
    }
    let mut base = 0;
    let mut bits = free;
    for _ in 0..need {
        base += bits.trailing_zeros() + 1;
        bits &= bits - 1;
    }
    let mut rest = free;
    let mut vis = open & free;
    let mut n = 0;
    while vis != 0 && total > n + need {
        let v = vis.trailing_zeros() + 1;
        let g = nth_bit(rest, need).expect("enough free slots");
        out[(v + v.max(g)) as usize] += 1;
        let bit = vis & vis.wrapping_neg();
        vis ^= bit;
        rest &= !bit;
        n += 1;
    }
    Some(i64::from(base))
}

impl SearchState {
    pub fn new(inst: &ProblemInstance, ordered: bool) -> Self {
        let days = inst.days();
        let slots = inst.slots_per_day();
        assert!(slots <= MAX_SLOTS);
        let mut lengths: Vec<usize> = inst.cohorts().iter().map(|c| c.slot_length).collect();
        lengths.sort_unstable();
        lengths.dedup();

        let mut students = Vec::new();
        for (c, spec) in inst.cohorts().iter().enumerate() {
            for m in 1..=spec.population {
                students.push(StudentState {
                    id: StudentId::new(c, m),
                    len: spec.slot_length,
                    gap: inst.effective_gap(c),
                    len_idx: lengths.binary_search(&spec.slot_length).unwrap(),
                    remaining: spec.visits,
                    placed_days: Vec::with_capacity(spec.visits),
                    next_min_day: 1,
                });
            }
        }
        let avail = (1..=days)
            .map(|j| (1..=slots).filter(|&k| inst.is_available(j, k)).fold(0u64, |m, k| m | run_mask(k, 1)))
            .collect();
        let hist_len = 2 * slots + 2;
        let mut state = Self {
            days,
            slots,
            avail,
            busy: vec![0; days],
            reserved: vec![0; days],
            blocked: vec![0; days],
            need_e: vec![inst.emergency_quota(); days],
            starts: vec![vec![0; lengths.len()]; days],
            lengths,
            hist: vec![0; hist_len],
            day_hist: vec![vec![0; hist_len]; days],
            day_base: vec![Some(0); days],
            base_sum: 0,
            bad_days: 0,
            fixed_cost: 0,
            remaining_slots: students.iter().map(|s| s.len * s.remaining).sum(),
            students,
            placed: Vec::new(),
            trail: Vec::new(),
            ordered,
        };
        for d in 0..days {
            state.refresh_day(d);
        }
        state
    }

    fn free(&self, d: usize) -> u64 {
        self.avail[d] & !self.busy[d] & !self.reserved[d]
    }

    fn open(&self, d: usize) -> u64 {
        self.free(d) & !self.blocked[d]
    }

    /// Recomputes cached data for day index `d` (0-based).
    fn refresh_day(&mut self, d: usize) {
        for (v, c) in self.day_hist[d].iter_mut().enumerate() {
            self.hist[v] -= *c;
            *c = 0;
        }
        match self.day_base[d] {
            Some(b) => self.base_sum -= b,
            None => self.bad_days -= 1,
        }
        let free = self.free(d);
        let open = self.open(d);
        let base = day_profile(free, open, self.need_e[d], &mut self.day_hist[d]);
        for (v, c) in self.day_hist[d].iter().enumerate() {
            self.hist[v] += *c;
        }
        match base {
            Some(b) => self.base_sum += b,
            None => self.bad_days += 1,
        }
        self.day_base[d] = base;

        let spare = (free.count_ones() as usize).checked_sub(self.need_e[d]);
        for (li, &len) in self.lengths.iter().enumerate() {
            self.starts[d][li] = match spare {
                Some(spare) if spare >= len => {
                    let mut run = open;
                    for i in 1..len {
                        run &= open >> i;
                    }
                    run
                }
                _ => 0,
            };
        }
    }

    /// Reserves emergency slots given by a partial assignment. Returns false
    /// when a slot is unavailable or already taken.
    pub fn reserve(&mut self, day: usize, slot: usize) -> bool {
        let d = day - 1;
        let bit = run_mask(slot, 1);
        if self.free(d) & bit == 0 || self.need_e[d] == 0 {
            return false;
        }
        self.reserved[d] |= bit;
        self.need_e[d] -= 1;
        self.fixed_cost += slot as i64;
        self.refresh_day(d);
        true
    }

    /// Sum of the `need` smallest marginal costs, with day `swap` replaced by `alt`.
    fn smallest(&self, need: usize, swap: Option<(usize, &[u32])>) -> Option<i64> {
        let mut left = need;
        let mut total = 0i64;
        for v in 0..self.hist.len() {
            if left == 0 {
                break;
            }
            let mut c = self.hist[v] as usize;
            if let Some((d, alt)) = swap {
                c = c + alt[v] as usize - self.day_hist[d][v] as usize;
            }
            let take = c.min(left);
            total += (take * v) as i64;
            left -= take;
        }
        (left == 0).then_some(total)
    }

    /// Objective lower bound of every completion of this state.
    pub fn bound(&self) -> Option<i64> {
        if self.bad_days > 0 {
            return None;
        }
        Some(self.fixed_cost + self.base_sum + self.smallest(self.remaining_slots, None)?)
    }

    /// Bound of the state reached by `mv`, without applying it.
    pub fn move_bound(&self, mv: Move) -> Option<i64> {
        if self.bad_days > 0 {
            return None;
        }
        let (d, taken, closed, len, cost) = match mv {
            Move::Place { student, day, start } => {
                let len = self.students[student].len;
                let m = run_mask(start, len);
                (day - 1, m, 0, len, 2 * slot_sum(start, len))
            }
            Move::Skip { day, slot } => (day - 1, 0, run_mask(slot, 1), 0, 0),
        };
        let free = self.free(d) & !taken;
        let open = free & !self.blocked[d] & !closed;
        let mut alt = [0u32; 2 * MAX_SLOTS + 2];
        let base = day_profile(free, open, self.need_e[d], &mut alt)?;
        let base_sum = self.base_sum - self.day_base[d].unwrap() + base;
        let rest = self.smallest(self.remaining_slots - len, Some((d, &alt[..self.hist.len()])))?;
        Some(self.fixed_cost + cost + base_sum + rest)
    }

    pub fn valid_starts(&self, day: usize, len_idx: usize) -> u64 {
        self.starts[day - 1][len_idx]
    }

    /// Whether `day` may host the next visit of student `si`.
    pub fn day_allowed(&self, si: usize, day: usize) -> bool {
        let st = &self.students[si];
        if st.remaining == 0 {
            return false;
        }
        if self.ordered {
            return day >= st.next_min_day && day + (st.remaining - 1) * (st.gap + 1) <= self.days;
        }
        st.placed_days.iter().all(|&p| p.abs_diff(day) > st.gap)
    }

    /// Upper estimate of how many more visits `si` could fit: greedy chain of
    /// days with some valid start, spaced by the gap.
    pub fn chain_capacity(&self, si: usize) -> usize {
        let st = &self.students[si];
        let li = st.len_idx;
        let step = st.gap + 1;
        let lo = if self.ordered { st.next_min_day } else { 1 };
        let mut count = 0;
        let mut d = lo;
        while d <= self.days && count < st.remaining {
            let open = self.starts[d - 1][li] != 0 && st.placed_days.iter().all(|&p| p.abs_diff(d) > st.gap);
            if open {
                count += 1;
                d += step;
            } else {
                d += 1;
            }
        }
        count
    }

    /// First day and slot still open to visits.
    pub fn cursor(&self) -> Option<(usize, usize)> {
        (0..self.days).find_map(|d| {
            let open = self.open(d);
            (open != 0).then(|| (d + 1, open.trailing_zeros() as usize + 1))
        })
    }

    pub fn play(&mut self, mv: Move) {
        match mv {
            Move::Place { student, day, start } => self.apply(student, day, start),
            Move::Skip { day, slot } => {
                let mask = run_mask(slot, 1);
                self.blocked[day - 1] |= mask;
                self.trail.push(Undo::Skip { day, mask });
                self.refresh_day(day - 1);
            }
        }
    }

    pub fn apply(&mut self, si: usize, day: usize, start: usize) {
        let d = day - 1;
        let st = &mut self.students[si];
        let mask = run_mask(start, st.len);
        debug_assert_eq!(self.busy[d] & mask, 0);
        self.trail.push(Undo::Place { student: si, mask, prev_next_min: st.next_min_day });
        st.remaining -= 1;
        st.placed_days.push(day);
        st.next_min_day = st.next_min_day.max(day + st.gap + 1);
        self.remaining_slots -= st.len;
        self.fixed_cost += 2 * slot_sum(start, st.len);
        self.busy[d] |= mask;
        self.placed.push((si, day, start));
        self.refresh_day(d);
    }

    pub fn undo(&mut self) {
        match self.trail.pop().expect("undo without move") {
            Undo::Place { student, mask, prev_next_min } => {
                let (_, day, start) = self.placed.pop().unwrap();
                let st = &mut self.students[student];
                st.remaining += 1;
                st.placed_days.pop();
                st.next_min_day = prev_next_min;
                self.remaining_slots += st.len;
                self.fixed_cost -= 2 * slot_sum(start, st.len);
                self.busy[day - 1] &= !mask;
                self.refresh_day(day - 1);
            }
            Undo::Skip { day, mask } => {
                self.blocked[day - 1] &= !mask;
                self.refresh_day(day - 1);
            }
        }
    }

    /// Whether a visit of `len` slots at `start` on `day` hits nothing taken or unavailable.
    pub fn fits(&self, day: usize, start: usize, len: usize) -> bool {
        start >= 1 && start + len - 1 <= self.slots && self.free(day - 1) & run_mask(start, len) == run_mask(start, len)
    }

    pub fn is_complete(&self) -> bool {
        self.remaining_slots == 0
    }

    /// Emergency slots for day `day`: the reserved ones plus the lowest free slots owed.
    pub fn emergency_for(&self, day: usize) -> BTreeSet<usize> {
        let d = day - 1;
        let mut set: BTreeSet<usize> = (1..=self.slots).filter(|&k| self.reserved[d] & run_mask(k, 1) != 0).collect();
        let free = self.free(d);
        set.extend((1..=self.slots).filter(|&k| free & run_mask(k, 1) != 0).take(self.need_e[d]));
        set
    }

    /// Complete schedule with optimal emergency completion.
    pub fn to_schedule(&self) -> Schedule {
        let mut placements: Vec<Placement> = self
            .placed
            .iter()
            .map(|&(si, day, start)| {
                let st = &self.students[si];
                Placement::new(st.id, day, start, st.len)
            })
            .collect();
        placements.sort();
        let emergency = (1..=self.days).map(|j| (j, self.emergency_for(j))).filter(|(_, s)| !s.is_empty()).collect();
        Schedule { placements, emergency }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, CohortSpec};

    #[test]
    fn root_bound_of_small_example_is_139() {
        let inst = parse_instance(include_str!("../../../../fixtures/small.json")).unwrap();
        let s = SearchState::new(&inst, true);
        assert_eq!(s.bound(), Some(139));
    }

    #[test]
    fn root_bound_of_case_study_is_3682() {
        let inst = parse_instance(include_str!("../../../../fixtures/case_study.json")).unwrap();
        let s = SearchState::new(&inst, true);
        assert_eq!(s.bound(), Some(3682));
    }

    #[test]
    fn child_bound_matches_apply() {
        let inst = parse_instance(include_str!("../../../../fixtures/small.json")).unwrap();
        let mut s = SearchState::new(&inst, true);
        for (day, start) in [(1, 1), (3, 4), (7, 2)] {
            let si = 3;
            let expect = s.move_bound(Move::Place { student: si, day, start });
            s.apply(si, day, start);
            assert_eq!(s.bound(), expect);
            s.undo();
        }
        assert_eq!(s.bound(), Some(139));
    }

    #[test]
    fn skip_bound_matches_play() {
        let inst = parse_instance(include_str!("../../../../fixtures/case_study.json")).unwrap();
        let mut s = SearchState::new(&inst, true);
        for (day, slot) in [(1, 1), (2, 4), (3, 16), (5, 7)] {
            let mv = Move::Skip { day, slot };
            let expect = s.move_bound(mv);
            s.play(mv);
            assert_eq!(s.bound(), expect);
            s.undo();
        }
        s.play(Move::Skip { day: 1, slot: 1 });
        // Monday's visits shift up one slot while its emergency stays at slot 1.
        assert!(s.bound().unwrap() > 3682);
        s.undo();
        assert_eq!(s.bound(), Some(3682));
    }

    #[test]
    fn starts_respect_emergency_room() {
        // P=3, L=2: a 2-slot visit would leave one slot for two emergencies.
        let inst = ProblemInstance::new(3, 2, vec![vec![true; 3]], vec![CohortSpec::new("m", 1, 1, 2, 0)]).unwrap();
        let s = SearchState::new(&inst, true);
        assert_eq!(s.valid_starts(1, 0), 0);
        assert_eq!(s.bound(), None);
    }
}
