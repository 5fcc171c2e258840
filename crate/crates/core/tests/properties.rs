mod common;

use common::{cheapest_subset, cross_check, free_slots, tiny_instance};
use meetplan::{
    brute_force_optimum, check_schedule, enumerate_feasible, evaluate_objective, lower_bound, parse_instance, precheck,
    propagate, serialize_instance, solve, tile_availability, Partial, Propagation, SolveParams, SolveStatus,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

const BUDGET: u64 = 2_000_000;

fn quiet() -> SolveParams {
    SolveParams { log_interval: 0.0, deterministic: true, ..SolveParams::default() }
}

fn pattern_strategy() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..=6).prop_flat_map(|slots| prop::collection::vec(prop::collection::vec(any::<bool>(), slots), 1..=5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tiling_repeats_pattern_rows(pattern in pattern_strategy(), weeks in 0usize..5) {
        let rows = tile_availability(&pattern, weeks);
        prop_assert_eq!(rows.len(), pattern.len() * weeks);
        for (j, row) in rows.iter().enumerate() {
            prop_assert_eq!(row, &pattern[j % pattern.len()]);
        }
    }

    #[test]
    fn instance_round_trips(seed in any::<u64>()) {
        let inst = tiny_instance(seed);
        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn precheck_never_contradicts_oracle(seed in any::<u64>()) {
        let inst = tiny_instance(seed);
        if precheck(&inst).iter().any(|d| d.is_fatal()) {
            let truth = brute_force_optimum(&inst, BUDGET);
            prop_assert_ne!(truth.status, SolveStatus::Optimal);
        }
    }

    #[test]
    fn validator_ignores_placement_order(seed in any::<u64>()) {
        let inst = tiny_instance(seed);
        let Ok(all) = enumerate_feasible(&inst, BUDGET) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in all.iter().take(20) {
            // Break it a little so there is something to report.
            let mut broken = s.clone();
            if let Some(p) = broken.placements.first_mut() {
                p.start_slot = 1;
            }
            let before: BTreeSet<String> = check_schedule(&inst, &broken).iter().map(|v| v.to_string()).collect();
            broken.placements.shuffle(&mut rng);
            let after: BTreeSet<String> = check_schedule(&inst, &broken).iter().map(|v| v.to_string()).collect();
            prop_assert_eq!(before, after);
            prop_assert_eq!(evaluate_objective(&inst, s), evaluate_objective(&inst, &s.canonical()));
        }
    }

    #[test]
    fn lower_bound_never_exceeds_restricted_optimum(seed in any::<u64>(), keep in 0usize..4) {
        let inst = tiny_instance(seed);
        let Ok(all) = enumerate_feasible(&inst, BUDGET) else { return Ok(()) };
        let Some(witness) = all.first() else { return Ok(()) };
        let partial = Partial { placements: witness.placements.iter().take(keep).copied().collect(), ..Partial::default() };
        let best = all
            .iter()
            .filter(|s| partial.placements.iter().all(|p| s.placements.contains(p)))
            .map(|s| evaluate_objective(&inst, s))
            .min()
            .expect("the witness extends its own prefix");
        prop_assert!(lower_bound(&inst, &partial) <= best);
        prop_assert!(lower_bound(&inst, &Partial::default()) <= all.iter().map(|s| evaluate_objective(&inst, s)).min().unwrap());
    }

    #[test]
    fn propagation_keeps_every_completion(seed in any::<u64>(), keep in 0usize..3) {
        let inst = tiny_instance(seed);
        let Ok(all) = enumerate_feasible(&inst, BUDGET) else { return Ok(()) };
        let Some(witness) = all.get(seed as usize % all.len().max(1)) else { return Ok(()) };
        let partial = Partial { placements: witness.placements.iter().take(keep).copied().collect(), ..Partial::default() };
        let completions: Vec<_> =
            all.iter().filter(|s| partial.placements.iter().all(|p| s.placements.contains(p))).collect();
        match propagate(&inst, &partial) {
            Propagation::Contradiction(why) => prop_assert!(completions.is_empty(), "{why}"),
            Propagation::Consistent(domains) => {
                for s in completions {
                    for p in s.placements.iter().filter(|p| !partial.placements.contains(p)) {
                        let dom = domains.iter().find(|d| d.student == p.student).unwrap();
                        prop_assert!(dom.candidates.contains(p), "{p:?} pruned");
                    }
                }
            }
        }
    }

    #[test]
    fn solver_completes_emergencies_optimally(seed in any::<u64>()) {
        let inst = common::medium_instance(seed);
        let r = solve(&inst, &quiet()).unwrap();
        if let Some(s) = r.schedule {
            for day in 1..=inst.days() {
                let chosen: usize = s.emergency_on(day).sum();
                let best = cheapest_subset(&free_slots(&inst, &s, day), inst.emergency_quota()).unwrap();
                prop_assert_eq!(chosen, best, "day {}", day);
            }
        }
    }

    #[test]
    fn model_and_validator_agree(seed in any::<u64>()) {
        let inst = tiny_instance(seed);
        if let Err(e) = cross_check(&inst, BUDGET) {
            return Err(TestCaseError::fail(e));
        }
    }
}

#[test]
fn solver_matches_oracle_on_fixed_seeds() {
    for seed in 0..60 {
        let inst = tiny_instance(seed);
        let truth = brute_force_optimum(&inst, BUDGET);
        if truth.status == SolveStatus::BudgetExceeded {
            continue;
        }
        let r = solve(&inst, &quiet()).unwrap();
        assert_eq!(r.status, truth.status, "seed {seed}");
        assert_eq!(r.objective, truth.objective, "seed {seed}");
    }
}
