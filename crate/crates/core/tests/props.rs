//! Randomized cross-checks: every algebraic operation against an element-wise
//! model, and the solver against the brute-force oracle.

use std::collections::BTreeSet;

use proptest::prelude::*;

use sortsupport::instance::{
    build_intersection_graph, representatives, validate_witness, SortInstance,
};
use sortsupport::intervals::IntegerSet;
use sortsupport::nae::{balance_occurrences, nae_brute_force, nae_check, Assignment, CnfFormula};
use sortsupport::solver::{brute_force_support, decide_support, Pin, Side, SolveOptions};

fn arb_pairs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-10i64..10, 0i64..4).prop_map(|(lo, w)| (lo, lo + w)), 0..4)
}

fn arb_set() -> impl Strategy<Value = IntegerSet> {
    arb_pairs().prop_map(|pairs| IntegerSet::normalize(&pairs).unwrap())
}

fn arb_nonempty_set() -> impl Strategy<Value = IntegerSet> {
    prop::collection::vec((-8i64..8, 0i64..3).prop_map(|(lo, w)| (lo, lo + w)), 1..3)
        .prop_map(|pairs| IntegerSet::normalize(&pairs).unwrap())
}

fn elements(s: &IntegerSet) -> BTreeSet<i64> {
    s.iter().collect()
}

proptest! {
    #[test]
    fn normalize_is_idempotent(s in arb_set()) {
        let again = IntegerSet::normalize(s.intervals()).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn intersect_matches_elementwise(a in arb_set(), b in arb_set()) {
        let expected: BTreeSet<i64> =
            elements(&a).intersection(&elements(&b)).copied().collect();
        prop_assert_eq!(elements(&a.intersect(&b)), expected);
    }

    #[test]
    fn union_matches_elementwise(a in arb_set(), b in arb_set()) {
        let expected: BTreeSet<i64> =
            elements(&a).union(&elements(&b)).copied().collect();
        prop_assert_eq!(elements(&a.union(&b)), expected);
    }

    #[test]
    fn disjointness_matches_intersection(a in arb_set(), b in arb_set()) {
        prop_assert_eq!(a.is_disjoint_from(&b), a.intersect(&b).is_empty());
    }

    #[test]
    fn contains_matches_elementwise(s in arb_set(), x in -15i64..15) {
        prop_assert_eq!(s.contains(x), elements(&s).contains(&x));
    }

    #[test]
    fn lex_leq_is_min_vs_max(a in arb_nonempty_set(), b in arb_nonempty_set()) {
        prop_assert_eq!(
            a.lex_leq(&b).unwrap(),
            a.min().unwrap() <= b.max().unwrap()
        );
    }

    #[test]
    fn least_geq_matches_scan(s in arb_set(), x in -15i64..15) {
        let expected = elements(&s).into_iter().find(|&e| e >= x);
        prop_assert_eq!(s.least_geq(x), expected);
    }

    #[test]
    fn set_render_parse_roundtrip(s in arb_set()) {
        let text = s.to_string();
        prop_assert_eq!(text.parse::<IntegerSet>().unwrap(), s);
    }

    #[test]
    fn shift_translates_elements(s in arb_set(), d in -5i64..5) {
        let expected: BTreeSet<i64> = elements(&s).into_iter().map(|e| e + d).collect();
        prop_assert_eq!(elements(&s.shift(d)), expected);
    }
}

/// Exhaustive model for the greedy representative selection: some choice of
/// one element per Q-set is nondecreasing.
fn some_nondecreasing_choice(q: &[IntegerSet], idx: usize, floor: i64) -> bool {
    if idx == q.len() {
        return true;
    }
    q[idx]
        .iter()
        .any(|x| x >= floor && some_nondecreasing_choice(q, idx + 1, x))
}

proptest! {
    #[test]
    fn greedy_representatives_are_complete(
        q in prop::collection::vec(arb_nonempty_set(), 1..5)
    ) {
        let greedy = representatives(&q);
        let exhaustive = some_nondecreasing_choice(&q, 0, i64::MIN);
        prop_assert_eq!(greedy.is_some(), exhaustive);
        if let Some(values) = greedy {
            for (v, qi) in values.iter().zip(&q) {
                prop_assert!(qi.contains(*v));
            }
            prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

fn arb_instance() -> impl Strategy<Value = SortInstance> {
    (1usize..=5).prop_flat_map(|n| {
        let u = prop::collection::vec(arb_nonempty_set(), n..=n);
        let v = prop::collection::vec(arb_nonempty_set(), n..=n);
        let p = prop::option::of(prop::collection::vec(
            prop::collection::vec((1i64..=n as i64, 0i64..2), 1..3).prop_map(move |pairs| {
                let clipped: Vec<(i64, i64)> =
                    pairs.into_iter().map(|(lo, w)| (lo, (lo + w).min(n as i64))).collect();
                IntegerSet::normalize(&clipped).unwrap()
            }),
            n..=n,
        ));
        (u, v, p, any::<bool>()).prop_map(|(u, v, p, stable)| {
            SortInstance::new(u, v, p, stable).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn instance_render_parse_roundtrip(inst in arb_instance()) {
        prop_assert_eq!(SortInstance::parse(&inst.render()).unwrap(), inst);
    }

    #[test]
    fn solver_agrees_with_oracle(
        inst in arb_instance(),
        respect_p in any::<bool>(),
        respect_stability in any::<bool>(),
    ) {
        let opts = SolveOptions { respect_p, respect_stability, ..SolveOptions::default() };
        let fast = decide_support(&inst, &opts).unwrap();
        let slow = brute_force_support(&inst, &opts).unwrap();
        prop_assert_eq!(fast.is_yes(), slow.is_yes());
        if let Some(w) = fast.witness() {
            let mut checked = inst.clone();
            checked.stable = respect_stability;
            if !respect_p {
                checked.p_domains = None;
            }
            let report = validate_witness(&checked, w);
            prop_assert!(report.ok(), "{}", report);
        }
    }

    #[test]
    fn pruning_does_not_change_verdicts(inst in arb_instance()) {
        let pruned = decide_support(&inst, &SolveOptions::default()).unwrap();
        let unpruned =
            decide_support(&inst, &SolveOptions { prune: false, ..SolveOptions::default() })
                .unwrap();
        prop_assert_eq!(pruned.is_yes(), unpruned.is_yes());
        prop_assert!(unpruned.stats.nodes >= pruned.stats.nodes);
    }

    #[test]
    fn full_permutation_domains_change_nothing(inst in arb_instance()) {
        let mut unrestricted = inst.clone();
        unrestricted.p_domains =
            Some(vec![IntegerSet::interval(1, inst.n as i64).unwrap(); inst.n]);
        let without = decide_support(
            &inst,
            &SolveOptions { respect_p: false, ..SolveOptions::default() },
        )
        .unwrap();
        let with = decide_support(
            &unrestricted,
            &SolveOptions { respect_p: true, ..SolveOptions::default() },
        )
        .unwrap();
        prop_assert_eq!(without.is_yes(), with.is_yes());
    }

    #[test]
    fn witness_values_are_repinnable(inst in arb_instance()) {
        let verdict = decide_support(&inst, &SolveOptions::default()).unwrap();
        if let Some(w) = verdict.witness() {
            // pinning any single witnessed value must keep the instance YES
            for (j, &value) in w.values.iter().enumerate() {
                let opts = SolveOptions {
                    pins: vec![Pin { side: Side::V, index: j, value }],
                    ..SolveOptions::default()
                };
                prop_assert!(decide_support(&inst, &opts).unwrap().is_yes());
            }
        }
    }

    #[test]
    fn pinned_solver_agrees_with_oracle(inst in arb_instance(), pick in any::<prop::sample::Index>()) {
        // pin some u-variable to some domain value, chosen by index
        let i = pick.index(inst.n);
        let dom = &inst.u_domains[i];
        let value = dom.iter().nth(pick.index(dom.iter().count())).unwrap();
        let opts = SolveOptions {
            pins: vec![Pin { side: Side::U, index: i, value }],
            ..SolveOptions::default()
        };
        let fast = decide_support(&inst, &opts).unwrap();
        let slow = brute_force_support(&inst, &opts).unwrap();
        prop_assert_eq!(fast.is_yes(), slow.is_yes());
        if let Some(w) = fast.witness() {
            prop_assert_eq!(w.values[w.perm[i] - 1], value);
        }
    }

    #[test]
    fn stability_is_vacuous_on_disjoint_u_domains(
        base in prop::collection::vec((0i64..30, 0i64..2), 1..5)
    ) {
        // build pairwise disjoint U-domains by spacing windows 10 apart
        let u: Vec<IntegerSet> = base
            .iter()
            .enumerate()
            .map(|(i, &(lo, w))| {
                let lo = lo % 8 + (i as i64) * 10;
                IntegerSet::interval(lo, lo + w).unwrap()
            })
            .collect();
        let v: Vec<IntegerSet> = u.iter().rev().map(|d| d.hull()).collect();
        let inst = SortInstance::new(u, v, None, false).unwrap();
        let plain = decide_support(&inst, &SolveOptions::default()).unwrap();
        let stable = decide_support(
            &inst,
            &SolveOptions { respect_stability: true, ..SolveOptions::default() },
        )
        .unwrap();
        prop_assert_eq!(plain.is_yes(), stable.is_yes());
    }
}

fn arb_formula() -> impl Strategy<Value = CnfFormula> {
    (1usize..=4).prop_flat_map(|p| {
        prop::collection::vec(
            prop::collection::vec((1i64..=p as i64, any::<bool>()), 3),
            1..=4,
        )
        .prop_map(move |clauses| {
            let clauses = clauses
                .into_iter()
                .map(|lits| {
                    let v: Vec<i64> =
                        lits.into_iter().map(|(x, neg)| if neg { -x } else { x }).collect();
                    [v[0], v[1], v[2]]
                })
                .collect();
            CnfFormula::new(p, clauses).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn balancing_preserves_nae_satisfiability(f in arb_formula()) {
        let balanced = balance_occurrences(&f);
        prop_assert!(balanced.is_balanced());
        prop_assert_eq!(
            nae_brute_force(&f).unwrap().is_some(),
            nae_brute_force(&balanced).unwrap().is_some()
        );
    }

    #[test]
    fn nae_is_complement_invariant(f in arb_formula(), bits in any::<u8>()) {
        let a = Assignment {
            values: (0..f.num_vars).map(|i| bits >> i & 1 == 1).collect(),
        };
        prop_assert_eq!(nae_check(&f, &a), nae_check(&f, &a.complement()));
    }

    #[test]
    fn dimacs_render_parse_roundtrip(f in arb_formula()) {
        prop_assert_eq!(sortsupport::nae::parse_dimacs(&f.render_dimacs()).unwrap(), f);
    }
}

fn arb_small_formula() -> impl Strategy<Value = CnfFormula> {
    (1usize..=3).prop_flat_map(|p| {
        prop::collection::vec(
            prop::collection::vec((1i64..=p as i64, any::<bool>()), 3),
            1..=3,
        )
        .prop_map(move |clauses| {
            let clauses = clauses
                .into_iter()
                .map(|lits| {
                    let v: Vec<i64> =
                        lits.into_iter().map(|(x, neg)| if neg { -x } else { x }).collect();
                    [v[0], v[1], v[2]]
                })
                .collect();
            CnfFormula::new(p, clauses).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn reduction_roundtrip_random_formulas(
        f in arb_small_formula(),
        disjoint in any::<bool>(),
    ) {
        use sortsupport::reduction::{reduce, roundtrip_verify, verify_structure, Variant};
        let variant = if disjoint { Variant::Disjoint } else { Variant::Overlapping };
        let balanced = balance_occurrences(&f);
        // skip formulas where some variable never occurs after balancing
        prop_assume!(balanced.occurrence_counts().iter().all(|&(p, n)| p + n > 0));
        let (inst, trace) = reduce(&balanced, variant).unwrap();
        let diff = verify_structure(&inst, &trace);
        prop_assert!(diff.ok(), "{}", diff);
        let report = roundtrip_verify(&f, variant).unwrap();
        prop_assert!(report.ok(), "{}", report);
        // intersection graph size matches the closed form k^2 + 26k
        let k = trace.k;
        prop_assert_eq!(build_intersection_graph(&inst).edge_count(), k * k + 26 * k);
    }
}
