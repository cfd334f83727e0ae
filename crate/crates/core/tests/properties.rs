//! Randomized invariants: group axioms on `S_2k`, ring axioms for the exact algebra,
//! shift invariance of the graph model and agreement of the fast and graph paths.

use num_bigint::BigInt;
use proptest::prelude::*;
use twisted_coe::classify::{membership, Membership};
use twisted_coe::graphmodel::{build_graph, cycle_report, phi};
use twisted_coe::perm::{fixed_perms, Permutation, MAX_K};
use twisted_coe::twist::{cycle_lengths, is_bijection, Twist};
use twisted_coe::{Partition, Polynomial, RationalFunction};

fn perm_of(k: usize) -> impl Strategy<Value = Permutation> {
    Just((0..2 * k).collect::<Vec<usize>>()).prop_shuffle().prop_map(move |v| Permutation::from_images(k, &v).unwrap())
}

fn triple() -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1..=MAX_K).prop_flat_map(|k| (perm_of(k), perm_of(k), perm_of(k)))
}

fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-20i64..20, 0..5).prop_map(|c| Polynomial::from_i64s(&c))
}

fn ratfun() -> impl Strategy<Value = RationalFunction> {
    (poly(), poly().prop_filter("nonzero denominator", |p| !p.is_zero()))
        .prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}

proptest! {
    #[test]
    fn group_axioms((a, b, c) in triple()) {
        let id = Permutation::identity(a.k());
        prop_assert_eq!(a.compose(&b).unwrap().compose(&c).unwrap(), a.compose(&b.compose(&c).unwrap()).unwrap());
        prop_assert_eq!(a.compose(&id).unwrap(), a);
        prop_assert_eq!(id.compose(&a).unwrap(), a);
        prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
        let expected = a.compose(&b).unwrap().compose(&a.inverse()).unwrap().compose(&b.inverse()).unwrap();
        prop_assert_eq!(a.commutator(&b).unwrap(), expected);
    }

    #[test]
    fn powers_add((a, _, _) in triple(), m in -6i64..6, n in -6i64..6) {
        prop_assert_eq!(a.pow(m).compose(&a.pow(n)).unwrap(), a.pow(m + n));
    }

    #[test]
    fn cycle_notation_round_trips((a, _, _) in triple()) {
        prop_assert_eq!(Permutation::parse_cycles(&a.render_cycles(), a.k()).unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Permutation>(&json).unwrap(), a);
    }

    #[test]
    fn graph_is_invariant_under_shifts((w, _, _) in triple(), n in 0i64..8) {
        let s = fixed_perms(w.k()).s.pow(n);
        let right = w.compose(&s).unwrap();
        prop_assert_eq!(build_graph(&right), build_graph(&w));
        let left = s.compose(&w).unwrap();
        prop_assert_eq!(phi(&left), phi(&w));
    }

    #[test]
    fn fast_path_matches_graph((w, _, _) in triple()) {
        let report = cycle_report(&w);
        let t = fixed_perms(w.k()).t;
        prop_assert_eq!(report.alpha(), w.commutator(&t).unwrap().half_type().unwrap());
        match membership(&w) {
            Membership::NotContributing => prop_assert!(!report.chi()),
            Membership::Contributing(key) => {
                prop_assert!(report.chi());
                prop_assert_eq!(key.alpha, report.alpha());
                prop_assert_eq!(key.beta, report.beta());
                prop_assert_eq!(key.regular, w.is_regular());
            }
        }
    }

    #[test]
    fn polynomial_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a.clone()));
        }
    }

    #[test]
    fn rational_function_field_axioms(a in ratfun(), b in ratfun(), c in ratfun(), x in -50i64..50) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).checked_div(&b).unwrap(), a.clone());
        }
        let x = BigInt::from(x);
        if let (Ok(va), Ok(vb), Ok(vab)) = (a.eval(&x), b.eval(&x), (&a * &b).eval(&x)) {
            prop_assert_eq!(vab, va * vb);
        }
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<RationalFunction>(&json).unwrap(), a);
    }

    #[test]
    fn partitions_round_trip(k in 1usize..=8, i in 0usize..1000) {
        let all = Partition::all(k);
        let p = &all[i % all.len()];
        prop_assert_eq!(&Partition::from_code(p.code()), p);
        prop_assert_eq!(&p.to_string().parse::<Partition>().unwrap(), p);
        prop_assert_eq!(&Partition::from_dash_key(&p.dash_key()).unwrap(), p);
        prop_assert_eq!(p.weight(), k);
    }

    #[test]
    fn twists_are_permutations(n in 1usize..60) {
        for twist in [Twist::Grand, Twist::TwoCycle, Twist::Stride, Twist::Involution, Twist::Identity] {
            if let Ok(p) = twist.permutation(n) {
                prop_assert!(is_bijection(&p));
                prop_assert_eq!(cycle_lengths(&p).iter().sum::<usize>(), n);
            }
        }
    }
}
