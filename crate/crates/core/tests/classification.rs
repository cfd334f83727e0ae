//! Exhaustive classification checks and the graph-model structure on small `S_2k`.

use twisted_coe::classify::{census, regular_identity_check, verify_lemmas};
use twisted_coe::graphmodel::{build_graph, chi, chi_algebraic, cycle_report, EdgeStyle};
use twisted_coe::perm::{enumerate_s2k, fixed_perms};

#[test]
fn lemmas_and_identity_hold_for_k3_to_k5() {
    for k in 3..=5u64 {
        let c = census(k as usize, 2, false, None).unwrap();
        let report = verify_lemmas(&c);
        assert!(report.all_pass(), "k={k}: {:?}", report.first_violation());
        assert_eq!(regular_identity_check(&c).total, 0, "k={k}");
        assert_eq!(c.count_of(false, &[], &[2]), k * k);
        assert_eq!(c.count_of(false, &[2], &[2]), k * k * (k - 2));
        assert_eq!(c.count_of(false, &[], &[2, 2]), k * k * (k - 3));
        assert_eq!(c.count_of(false, &[], &[3]), k * k);
        assert_eq!(c.count_of(true, &[], &[]), k);
    }
}

#[test]
fn small_k_clauses_are_degenerate() {
    // At k = 1 the one-transposition family exists although 2^1 does not fit.
    let report = verify_lemmas(&census(1, 1, false, None).unwrap());
    assert!(!report.all_pass());
}

#[test]
fn graph_cycles_alternate_and_match_commutators() {
    for k in 1..=4 {
        let fp = fixed_perms(k);
        for w in enumerate_s2k(k) {
            let g = build_graph(&w);
            let report = cycle_report(&w);
            for (directed, cycles, fixed) in
                [(false, &report.undirected_cycles, &fp.t), (true, &report.directed_cycles, &fp.q)]
            {
                let mut halves = Vec::new();
                for cyc in cycles {
                    let slots: Vec<usize> = cyc.vertices.iter().map(|s| s.slot()).collect();
                    assert_eq!(slots.len() % 2, 0);
                    halves.push(slots.len() / 2);
                    for (i, &v) in slots.iter().enumerate() {
                        let next = slots[(i + 1) % slots.len()];
                        let style = if i % 2 == 0 { EdgeStyle::Solid } else { EdgeStyle::Dashed };
                        assert!(g.edges().iter().any(|e| e.style == style
                            && e.directed == directed
                            && ((e.a, e.b) == (v, next) || (e.a, e.b) == (next, v))));
                    }
                }
                halves.sort_unstable();
                let mut expected = w.commutator(fixed).unwrap().half_type().unwrap().parts().to_vec();
                expected.sort_unstable();
                assert_eq!(halves, expected, "{w}");
            }
            for n in 1..k as i64 {
                assert_eq!(build_graph(&w.compose(&fp.s.pow(n)).unwrap()), g);
            }
            assert_eq!(chi(&w), chi_algebraic(&w));
        }
    }
}
