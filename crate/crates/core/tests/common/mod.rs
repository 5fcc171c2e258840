#![allow(dead_code)]

use meetplan::oracle::for_each_feasible;
use meetplan::{
    build_model, check_schedule, evaluate_objective, CohortSpec, IlpModel, ProblemInstance, RowSense, Schedule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Random instance with D <= 4, P <= 5, at most 5 visits in total, up to three
/// cohorts of at most two members, L in 0..=2 and roughly 80% availability.
/// Weighted so that feasible and infeasible instances both occur often.
pub fn tiny_instance(seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let days = [1, 2, 3, 4, 4][rng.gen_range(0..5)];
    let slots = [1, 2, 3, 4, 5, 5, 5][rng.gen_range(0..7)];
    let quota = [0, 1, 1, 2][rng.gen_range(0..4)];
    let availability = (0..days).map(|_| (0..slots).map(|_| rng.gen_bool(0.8)).collect()).collect();
    let mut cohorts = Vec::new();
    let mut budget = 5usize;
    for c in 0..rng.gen_range(1..=3) {
        if budget == 0 {
            break;
        }
        let population = rng.gen_range(1..=2usize.min(budget));
        let visits = rng.gen_range(1..=(budget / population).clamp(1, 2));
        budget -= population * visits;
        let slot_length = [1, 1, 2, 3][rng.gen_range(0..4)].min(slots);
        let gap = [0, 0, 1, 2][rng.gen_range(0..4)];
        cohorts.push(CohortSpec::new(format!("c{c}"), population, visits, slot_length, gap));
    }
    ProblemInstance::new(slots, quota, availability, cohorts).expect("generated instance is well formed")
}

/// Somewhat larger random instances for solver-only checks.
pub fn medium_instance(seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let days = rng.gen_range(5..=10);
    let slots = rng.gen_range(4..=8);
    let quota = rng.gen_range(0..=2);
    let availability = (0..days).map(|_| (0..slots).map(|_| rng.gen_bool(0.85)).collect()).collect();
    let cohorts = (0..rng.gen_range(1..=3))
        .map(|c| {
            CohortSpec::new(
                format!("c{c}"),
                rng.gen_range(1..=3),
                rng.gen_range(1..=3),
                rng.gen_range(1..=3),
                rng.gen_range(0..=2),
            )
        })
        .collect();
    ProblemInstance::new(slots, quota, availability, cohorts).expect("generated instance is well formed")
}

/// Calls `visit` on every 0/1 point satisfying every row, by depth-first
/// search over variables in model order with row-activity interval pruning.
/// Returns the number of points, or `None` past `budget` nodes.
pub fn for_each_ilp_point(model: &IlpModel, budget: u64, mut visit: impl FnMut(&[bool])) -> Option<u64> {
    let n = model.variables.len();
    let mut uses: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    let mut lo = vec![0i64; model.constraints.len()];
    let mut hi = vec![0i64; model.constraints.len()];
    for (r, row) in model.constraints.iter().enumerate() {
        for &(v, c) in &row.terms {
            uses[v].push((r, c));
            if c < 0 {
                lo[r] += c;
            } else {
                hi[r] += c;
            }
        }
    }
    let ok = |r: usize, lo: &[i64], hi: &[i64]| {
        let row = &model.constraints[r];
        match row.sense {
            RowSense::Le => lo[r] <= row.rhs,
            RowSense::Ge => hi[r] >= row.rhs,
            RowSense::Eq => lo[r] <= row.rhs && row.rhs <= hi[r],
        }
    };
    if !(0..model.constraints.len()).all(|r| ok(r, &lo, &hi)) {
        return Some(0);
    }

    type RowCheck<'a> = dyn Fn(usize, &[i64], &[i64]) -> bool + 'a;
    struct Ctx<'v> {
        point: Vec<bool>,
        found: u64,
        nodes: u64,
        budget: u64,
        visit: &'v mut dyn FnMut(&[bool]),
    }
    fn go(
        i: usize,
        ctx: &mut Ctx<'_>,
        uses: &[Vec<(usize, i64)>],
        lo: &mut [i64],
        hi: &mut [i64],
        ok: &RowCheck<'_>,
    ) -> bool {
        ctx.nodes += 1;
        if ctx.nodes > ctx.budget {
            return false;
        }
        if i == uses.len() {
            ctx.found += 1;
            (ctx.visit)(&ctx.point);
            return true;
        }
        for value in [false, true] {
            // Fixing the variable removes its coefficient from one side of the interval.
            for &(r, c) in &uses[i] {
                match (value, c < 0) {
                    (false, true) => lo[r] -= c,
                    (false, false) => hi[r] -= c,
                    (true, true) => hi[r] += c,
                    (true, false) => lo[r] += c,
                }
            }
            ctx.point[i] = value;
            let feasible = uses[i].iter().all(|&(r, _)| ok(r, lo, hi));
            let cont = !feasible || go(i + 1, ctx, uses, lo, hi, ok);
            for &(r, c) in &uses[i] {
                match (value, c < 0) {
                    (false, true) => lo[r] += c,
                    (false, false) => hi[r] += c,
                    (true, true) => hi[r] -= c,
                    (true, false) => lo[r] -= c,
                }
            }
            ctx.point[i] = false;
            if !cont {
                return false;
            }
        }
        true
    }
    let mut ctx = Ctx { point: vec![false; n], found: 0, nodes: 0, budget, visit: &mut visit };
    go(0, &mut ctx, &uses, &mut lo, &mut hi, &ok).then_some(ctx.found)
}

fn pack(point: &[bool]) -> Vec<u64> {
    point.chunks(64).map(|c| c.iter().enumerate().fold(0u64, |w, (i, &b)| w | (u64::from(b) << i))).collect()
}

/// Compares the feasible points of the built model with the schedules the
/// validator accepts: same count, each side maps into the other, and
/// objectives agree pointwise. `Ok(None)` when either enumeration runs out of
/// budget; otherwise the number of feasible points.
pub fn cross_check(inst: &ProblemInstance, budget: u64) -> Result<Option<u64>, String> {
    let model = build_model(inst);
    let mut from_validator = BTreeSet::new();
    let mut errors = Vec::new();
    let schedules = for_each_feasible(inst, budget, |s| match model.encode(s) {
        Ok(p) if model.is_feasible(&p) => {
            if model.objective_value(&p) != evaluate_objective(inst, s) {
                errors.push(format!("objective differs on {s:?}"));
            }
            from_validator.insert(pack(&p));
        }
        _ => errors.push(format!("validator-clean schedule not feasible for the model: {s:?}")),
    });
    let Ok(_) = schedules else { return Ok(None) };
    let mut seen = 0u64;
    let points = for_each_ilp_point(&model, budget, |p| {
        let s = model.decode(p);
        if !check_schedule(inst, &s).is_empty() {
            errors.push(format!("model point rejected by the validator: {s:?}"));
        } else if evaluate_objective(inst, &s) != model.objective_value(p) {
            errors.push(format!("objective differs on {s:?}"));
        }
        if from_validator.contains(&pack(p)) {
            seen += 1;
        }
    });
    let Some(points) = points else { return Ok(None) };
    if seen != points || points != from_validator.len() as u64 {
        errors.push(format!("{points} model points, {} validator schedules, {seen} shared", from_validator.len()));
    }
    match errors.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(Some(points)),
    }
}

/// Smallest sum over all `k`-subsets of `free`, by enumeration.
pub fn cheapest_subset(free: &[usize], k: usize) -> Option<usize> {
    fn go(free: &[usize], k: usize, acc: usize, best: &mut Option<usize>) {
        if k == 0 {
            *best = Some(best.map_or(acc, |b| b.min(acc)));
            return;
        }
        for i in 0..free.len() {
            if free.len() - i >= k {
                go(&free[i + 1..], k - 1, acc + free[i], best);
            }
        }
    }
    let mut best = None;
    go(free, k, 0, &mut best);
    best
}

/// Slots of `day` that are available and not covered by a visit.
pub fn free_slots(inst: &ProblemInstance, sched: &Schedule, day: usize) -> Vec<usize> {
    let busy: BTreeSet<usize> = sched.placements.iter().filter(|p| p.day == day).flat_map(|p| p.slots()).collect();
    (1..=inst.slots_per_day()).filter(|&k| inst.is_available(day, k) && !busy.contains(&k)).collect()
}
