use super::state::{Move, SearchState, MAX_SLOTS};
use super::{Progress, SearchStats, SolveError, SolveParams, SolveResult, SolveStatus};
use crate::instance::ProblemInstance;
use crate::schedule::Schedule;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

const NONE: i64 = i64::MAX;
const FLUSH_EVERY: u64 = 256;

struct Shared<'o> {
    incumbent: AtomicI64,
    best: Mutex<Option<Schedule>>,
    /// Set when a pass finds its leaf or time runs out.
    stop: AtomicBool,
    found: AtomicBool,
    timed_out: AtomicBool,
    nodes: AtomicU64,
    prunings: AtomicU64,
    /// Smallest child bound cut off by the current threshold.
    next_limit: AtomicI64,
    /// Proven lower bound, only ever raised.
    bound: AtomicI64,
    deadline: Option<Instant>,
    log_every: Option<Duration>,
    last_log: Mutex<Instant>,
    observer: &'o (dyn Fn(&Progress) + Sync),
}

impl Shared<'_> {
    fn incumbent(&self) -> Option<i64> {
        Some(self.incumbent.load(Ordering::SeqCst)).filter(|&v| v != NONE)
    }

    fn report(&self) {
        let progress = Progress {
            nodes: self.nodes.load(Ordering::SeqCst),
            incumbent: self.incumbent(),
            bound: self.bound.load(Ordering::SeqCst),
        };
        (self.observer)(&progress);
    }

    fn raise_bound(&self, value: i64) {
        let prev = self.bound.fetch_max(value, Ordering::SeqCst);
        if value > prev {
            self.report();
        }
    }

    fn offer(&self, value: i64, state: &SearchState) {
        let mut best = self.best.lock().unwrap();
        if value < self.incumbent.load(Ordering::SeqCst) {
            *best = Some(state.to_schedule());
            self.incumbent.store(value, Ordering::SeqCst);
            drop(best);
            self.report();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Found,
    Exhausted,
    Stopped,
}

enum Selection {
    Leaf(i64),
    DeadEnd,
    Branch(usize, usize),
}

/// Leaf, dead end, or the first day and slot still open to visits.
fn select(state: &SearchState) -> Selection {
    if state.is_complete() {
        return match state.bound() {
            Some(v) => Selection::Leaf(v),
            None => Selection::DeadEnd,
        };
    }
    for si in 0..state.students.len() {
        let st = &state.students[si];
        if st.remaining > 0 && state.chain_capacity(si) < st.remaining {
            return Selection::DeadEnd;
        }
    }
    match state.cursor() {
        Some((day, slot)) => Selection::Branch(day, slot),
        None => Selection::DeadEnd,
    }
}

/// Child moves at `(day, slot)` with bound within `limit`: one visit start per
/// cohort and visit count (members in the same position are interchangeable),
/// then keeping the slot free. Cheapest first, visits before skips, most
/// urgent student first.
fn children(
    state: &SearchState,
    day: usize,
    slot: usize,
    limit: i64,
    shared: &Shared<'_>,
    prunings: &mut u64,
) -> Vec<Move> {
    let incumbent = shared.incumbent.load(Ordering::Relaxed);
    let bit = 1u64 << (slot - 1);
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let mut kids: Vec<(i64, u8, usize, Move)> = Vec::new();
    let mut cut = NONE;
    let mut consider = |mv: Move, skip: u8, urgency: usize, kids: &mut Vec<_>| match state.move_bound(mv) {
        None => *prunings += 1,
        Some(b) if b >= incumbent => *prunings += 1,
        Some(b) if b > limit => cut = cut.min(b),
        Some(b) => kids.push((b, skip, urgency, mv)),
    };
    for (si, st) in state.students.iter().enumerate() {
        let key = (st.id.cohort, st.remaining);
        if st.remaining == 0 || seen.contains(&key) || !state.day_allowed(si, day) {
            continue;
        }
        if state.valid_starts(day, st.len_idx) & bit == 0 {
            continue;
        }
        seen.push(key);
        let latest = state.days - (st.remaining - 1) * (st.gap + 1);
        consider(Move::Place { student: si, day, start: slot }, 0, latest, &mut kids);
    }
    consider(Move::Skip { day, slot }, 1, usize::MAX, &mut kids);
    if cut != NONE {
        shared.next_limit.fetch_min(cut, Ordering::SeqCst);
    }
    kids.sort_unstable();
    kids.into_iter().map(|k| k.3).collect()
}

struct Worker<'s, 'o> {
    state: SearchState,
    shared: &'s Shared<'o>,
    nodes: u64,
    prunings: u64,
    budget: Option<u64>,
    spent: u64,
}

impl<'s, 'o> Worker<'s, 'o> {
    fn new(state: SearchState, shared: &'s Shared<'o>, budget: Option<u64>) -> Self {
        Self { state, shared, nodes: 0, prunings: 0, budget, spent: 0 }
    }

    fn flush(&mut self) {
        let sh = self.shared;
        sh.nodes.fetch_add(self.nodes, Ordering::SeqCst);
        sh.prunings.fetch_add(self.prunings, Ordering::SeqCst);
        self.nodes = 0;
        self.prunings = 0;
        let now = Instant::now();
        if sh.deadline.is_some_and(|d| now >= d) {
            sh.timed_out.store(true, Ordering::SeqCst);
            sh.stop.store(true, Ordering::SeqCst);
        }
        if let Some(every) = sh.log_every {
            let due = {
                let mut last = sh.last_log.lock().unwrap();
                if now.duration_since(*last) >= every {
                    *last = now;
                    true
                } else {
                    false
                }
            };
            if due {
                sh.report();
            }
        }
    }

    fn dfs(&mut self, limit: i64) -> Outcome {
        self.nodes += 1;
        self.spent += 1;
        if self.nodes >= FLUSH_EVERY {
            self.flush();
        }
        if self.shared.stop.load(Ordering::Relaxed) {
            return Outcome::Stopped;
        }
        if self.budget.is_some_and(|b| self.spent > b) {
            return Outcome::Stopped;
        }
        match select(&self.state) {
            Selection::Leaf(v) => {
                self.shared.offer(v, &self.state);
                Outcome::Found
            }
            Selection::DeadEnd => {
                self.prunings += 1;
                Outcome::Exhausted
            }
            Selection::Branch(day, slot) => {
                for mv in children(&self.state, day, slot, limit, self.shared, &mut self.prunings) {
                    if self.state.move_bound(mv).is_none_or(|b| b >= self.shared.incumbent.load(Ordering::Relaxed)) {
                        continue;
                    }
                    self.state.play(mv);
                    let r = self.dfs(limit);
                    self.state.undo();
                    if r != Outcome::Exhausted {
                        return r;
                    }
                }
                Outcome::Exhausted
            }
        }
    }
}

impl Drop for Worker<'_, '_> {
    fn drop(&mut self) {
        self.flush();
    }
}

/// Expands the tree breadth-first, keeping depth-first order, until there
/// are enough open nodes to share out. `Err` carries a pass outcome reached
/// during expansion.
fn frontier(root: &SearchState, limit: i64, shared: &Shared<'_>, want: usize) -> Result<Vec<Vec<Move>>, Outcome> {
    let mut level: Vec<Vec<Move>> = vec![Vec::new()];
    let mut state = root.clone();
    let (mut nodes, mut prunings) = (0, 0);
    for _ in 0..64 {
        if level.len() >= want {
            break;
        }
        let mut next = Vec::new();
        let mut grew = false;
        for path in &level {
            for &mv in path {
                state.play(mv);
            }
            nodes += 1;
            match select(&state) {
                Selection::Leaf(v) => {
                    shared.offer(v, &state);
                    return Err(Outcome::Found);
                }
                Selection::DeadEnd => prunings += 1,
                Selection::Branch(day, slot) => {
                    let kids = children(&state, day, slot, limit, shared, &mut prunings);
                    grew |= kids.len() > 1;
                    next.extend(kids.into_iter().map(|mv| {
                        let mut p = path.clone();
                        p.push(mv);
                        p
                    }));
                }
            }
            for _ in path {
                state.undo();
            }
        }
        level = next;
        if level.is_empty() || !grew && level.len() >= want {
            break;
        }
    }
    shared.nodes.fetch_add(nodes, Ordering::SeqCst);
    shared.prunings.fetch_add(prunings, Ordering::SeqCst);
    if level.is_empty() {
        return Err(Outcome::Exhausted);
    }
    Ok(level)
}

/// One depth-first pass under `limit`, open nodes shared out to `threads` workers.
fn run_pass(root: &SearchState, limit: i64, shared: &Shared<'_>, threads: usize) -> Outcome {
    shared.found.store(false, Ordering::SeqCst);
    let want = if threads <= 1 { 1 } else { 16 * threads };
    let paths = match frontier(root, limit, shared, want) {
        Ok(p) => p,
        Err(outcome) => return outcome,
    };
    let next = AtomicUsize::new(0);
    let work = |w: &mut Worker<'_, '_>| loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= paths.len() || shared.stop.load(Ordering::SeqCst) {
            break;
        }
        for &mv in &paths[i] {
            w.state.play(mv);
        }
        let r = if w.state.bound().is_some_and(|b| b < shared.incumbent.load(Ordering::SeqCst)) {
            w.dfs(limit)
        } else {
            Outcome::Exhausted
        };
        for _ in &paths[i] {
            w.state.undo();
        }
        if r == Outcome::Found {
            shared.found.store(true, Ordering::SeqCst);
            shared.stop.store(true, Ordering::SeqCst);
            break;
        }
    };
    if threads <= 1 || paths.len() <= 1 {
        work(&mut Worker::new(root.clone(), shared, None));
    } else {
        std::thread::scope(|scope| {
            for _ in 0..threads {
                let work = &work;
                scope.spawn(move || {
                    let mut w = Worker::new(root.clone(), shared, None);
                    work(&mut w);
                });
            }
        });
    }
    if shared.found.load(Ordering::SeqCst) {
        Outcome::Found
    } else if shared.timed_out.load(Ordering::SeqCst) {
        Outcome::Stopped
    } else {
        Outcome::Exhausted
    }
}

/// Solves `instance` to proven optimality unless the time limit intervenes.
pub fn solve(instance: &ProblemInstance, params: &SolveParams) -> Result<SolveResult, SolveError> {
    solve_with_observer(instance, params, &|_| {})
}

/// As [`solve`], reporting progress to `observer` at start, on every
/// incumbent or bound change, every `log_interval` seconds, and at the end.
pub fn solve_with_observer(
    instance: &ProblemInstance,
    params: &SolveParams,
    observer: &(dyn Fn(&Progress) + Sync),
) -> Result<SolveResult, SolveError> {
    if params.thread_count == 0 {
        return Err(SolveError::NoThreads);
    }
    if !(params.time_limit.is_finite() && params.time_limit >= 0.0) {
        return Err(SolveError::BadTimeLimit);
    }
    if instance.slots_per_day() > MAX_SLOTS {
        return Err(SolveError::TooManySlots(instance.slots_per_day()));
    }
    let started = Instant::now();
    let threads = if params.deterministic { 1 } else { params.thread_count };
    let shared = Shared {
        incumbent: AtomicI64::new(NONE),
        best: Mutex::new(None),
        stop: AtomicBool::new(false),
        found: AtomicBool::new(false),
        timed_out: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        prunings: AtomicU64::new(0),
        next_limit: AtomicI64::new(NONE),
        bound: AtomicI64::new(0),
        deadline: (params.time_limit > 0.0).then(|| started + Duration::from_secs_f64(params.time_limit)),
        log_every: (params.log_interval > 0.0).then(|| Duration::from_secs_f64(params.log_interval)),
        last_log: Mutex::new(started),
        observer,
    };
    let root = SearchState::new(instance, true);

    let finish = |status: SolveStatus, lower_bound: i64| {
        shared.report();
        let objective = shared.incumbent();
        let schedule = shared.best.lock().unwrap().take();
        SolveResult {
            status,
            objective: if status == SolveStatus::Infeasible { None } else { objective },
            lower_bound,
            schedule: if status == SolveStatus::Infeasible { None } else { schedule },
            stats: SearchStats {
                nodes: shared.nodes.load(Ordering::SeqCst),
                prunings: shared.prunings.load(Ordering::SeqCst),
                wall_time: started.elapsed(),
            },
        }
    };

    let Some(root_bound) = root.bound() else {
        shared.prunings.fetch_add(1, Ordering::SeqCst);
        return Ok(finish(SolveStatus::Infeasible, 0));
    };
    shared.bound.store(root_bound, Ordering::SeqCst);
    shared.report();

    // Greedy dive for an early incumbent.
    let visits: u64 = root.students.iter().map(|s| s.remaining as u64).sum();
    {
        let mut diver = Worker::new(root.clone(), &shared, Some(1_000 + 20 * visits));
        diver.dfs(NONE);
    }
    shared.stop.store(shared.timed_out.load(Ordering::SeqCst), Ordering::SeqCst);

    let mut limit = root_bound;
    loop {
        if let Some(inc) = shared.incumbent() {
            if inc <= limit {
                shared.raise_bound(inc);
                return Ok(finish(SolveStatus::Optimal, inc));
            }
        }
        if shared.timed_out.load(Ordering::SeqCst) {
            break;
        }
        shared.next_limit.store(NONE, Ordering::SeqCst);
        match run_pass(&root, limit, &shared, threads) {
            Outcome::Found => {
                let inc = shared.incumbent().expect("found leaf recorded");
                shared.raise_bound(inc);
                return Ok(finish(SolveStatus::Optimal, inc));
            }
            Outcome::Stopped => break,
            Outcome::Exhausted => {
                let next = shared.next_limit.load(Ordering::SeqCst).min(shared.incumbent.load(Ordering::SeqCst));
                if next == NONE {
                    return Ok(finish(SolveStatus::Infeasible, limit));
                }
                limit = next;
                shared.raise_bound(limit);
            }
        }
    }
    match shared.incumbent() {
        Some(inc) => Ok(finish(SolveStatus::Feasible, limit.min(inc))),
        None => Ok(finish(SolveStatus::TimeoutNoSolution, limit)),
    }
}
