use proptest::prelude::*;

use siphons::analysis::{
    brute_force_minimal_siphons, brute_force_minimal_traps, enumerate_minimal_siphons, enumerate_minimal_traps,
    max_trap_within,
};
use siphons::bb::{enumerate_minimal_bb_with, BbOptions};
use siphons::cnf::{encode_siphon, export_dimacs, parse_dimacs};
use siphons::dynamics::{check_siphon_emptiness, check_trap_persistence, random_walk};
use siphons::generators::gen_random_net;
use siphons::ingest::pnml::{export_pnml, parse_pnml};
use siphons::ingest::rxn::{export_rxn, parse_rxn};
use siphons::sat::{minimize_model, solve, Assignment, SolveOutcome};
use siphons::{Budget, Engine, Marking, PetriNet, Strategy as Order};

fn net_strategy() -> impl Strategy<Value = PetriNet> {
    (2usize..=10, 1usize..=12, 1usize..=4, any::<u64>())
        .prop_map(|(p, t, d, seed)| gen_random_net(p, t, d.min(p), seed).unwrap())
}

fn marked_net() -> impl Strategy<Value = (PetriNet, Marking)> {
    net_strategy().prop_flat_map(|net| {
        let n = net.num_places();
        (Just(net), prop::collection::vec(0u64..4, n).prop_map(Marking::from_vec))
    })
}

fn bb_strategy() -> impl Strategy<Value = Order> {
    prop_oneof![
        Just(Order::FixedIndex),
        Just(Order::SiphonFrequency),
        any::<u64>().prop_map(Order::Random),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_reported_siphon_is_a_minimal_siphon(net in net_strategy()) {
        let r = enumerate_minimal_siphons(&net, Engine::Sat, Budget::unlimited()).unwrap();
        for s in &r.sets {
            prop_assert!(net.is_siphon(s).unwrap());
            for o in &r.sets {
                prop_assert!(o == s || !o.is_subset(s));
            }
        }
        prop_assert_eq!(r.canonical(), brute_force_minimal_siphons(&net).unwrap());
    }

    #[test]
    fn bb_matches_oracle_under_any_strategy(net in net_strategy(), strategy in bb_strategy(), restart in any::<bool>()) {
        let opts = BbOptions { strategy, restart };
        let r = enumerate_minimal_bb_with(&net, opts, Budget::unlimited(), None).unwrap();
        prop_assert_eq!(r.canonical(), brute_force_minimal_siphons(&net).unwrap());
    }

    #[test]
    fn traps_are_siphons_of_the_dual(net in net_strategy()) {
        let traps = enumerate_minimal_traps(&net, Engine::Sat, Budget::unlimited()).unwrap().canonical();
        let dual = enumerate_minimal_siphons(&net.dual(), Engine::Sat, Budget::unlimited()).unwrap().canonical();
        prop_assert_eq!(&traps, &dual);
        prop_assert_eq!(&traps, &brute_force_minimal_traps(&net).unwrap());
        prop_assert_eq!(net.dual().dual(), net);
    }

    #[test]
    fn sat_solve_call_count_is_sets_plus_one(net in net_strategy()) {
        let r = enumerate_minimal_siphons(&net, Engine::Sat, Budget::unlimited()).unwrap();
        prop_assert_eq!(r.stats.solve_calls, r.sets.len() as u64 + 1);
    }

    #[test]
    fn minimized_models_are_minimal(net in net_strategy()) {
        let (f, _) = encode_siphon(&net).unwrap();
        if let SolveOutcome::Sat(m) = solve(&f, &[]) {
            let min = minimize_model(&f, &m, Budget::unlimited()).unwrap();
            prop_assert!(f.is_satisfied_by(min.as_slice()));
            for v in min.true_vars() {
                let mut values = min.as_slice().to_vec();
                values[v as usize - 1] = false;
                prop_assert!(!f.is_satisfied_by(&values));
            }
            // The shrunk model never gains a true variable.
            for (a, b) in min.as_slice().iter().zip(m.as_slice()) {
                prop_assert!(!a | b);
            }
        }
    }

    #[test]
    fn minimize_rejects_non_models(net in net_strategy()) {
        let (f, _) = encode_siphon(&net).unwrap();
        let zero = Assignment::new(vec![false; f.num_vars()]);
        prop_assert!(minimize_model(&f, &zero, Budget::unlimited()).is_err());
    }

    #[test]
    fn dimacs_round_trip(net in net_strategy()) {
        let (f, vm) = encode_siphon(&net).unwrap();
        let back = parse_dimacs(&export_dimacs(&f, &vm)).unwrap();
        prop_assert_eq!(back.num_vars(), f.num_vars());
        prop_assert_eq!(back.clauses(), f.clauses());
    }

    #[test]
    fn model_formats_round_trip((net, m) in marked_net()) {
        let (n1, m1) = parse_pnml(&export_pnml(&net, &m)).unwrap();
        prop_assert_eq!(&n1, &net);
        prop_assert_eq!(&m1, &m);
        let (n2, m2) = parse_rxn(&export_rxn(&net, &m).unwrap()).unwrap();
        prop_assert_eq!(&n2, &net);
        prop_assert_eq!(&m2, &m);
    }

    #[test]
    fn token_game_respects_traps_and_siphons((net, m) in marked_net(), seed in any::<u64>()) {
        let walk = random_walk(&net, &m, 200, seed).unwrap();
        for t in enumerate_minimal_traps(&net, Engine::Sat, Budget::unlimited()).unwrap().sets {
            prop_assert!(check_trap_persistence(&net, &t, &walk).unwrap());
        }
        for s in enumerate_minimal_siphons(&net, Engine::Sat, Budget::unlimited()).unwrap().sets {
            prop_assert!(check_siphon_emptiness(&net, &s, &walk).unwrap());
            let trap = max_trap_within(&net, &s).unwrap();
            prop_assert!(trap.is_subset(&s));
            prop_assert!(trap.is_empty() || net.is_trap(&trap).unwrap());
        }
        for w in walk.markings.windows(2).zip(&walk.fired) {
            let ((before, after), t) = ((&w.0[0], &w.0[1]), *w.1);
            prop_assert_eq!(&net.fire(before, t).unwrap(), after);
        }
    }
}
