//! Exact moments against aggregation-free sums, the brute-force index count and the
//! class census.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use twisted_coe::classify::census;
use twisted_coe::graphmodel::{phi, phi_oracle, DEFAULT_ORACLE_BUDGET};
use twisted_coe::moments::{coe_moment, evaluate_moment, tail_check, EnumOptions};
use twisted_coe::perm::{enumerate_s2k, s2k_order};
use twisted_coe::twist::Twist;
use twisted_coe::weingarten::{coe_table, tables_up_to, Ensemble};
use twisted_coe::{Partition, Polynomial, RationalFunction};

fn moment(k: usize, coset: bool) -> twisted_coe::moments::MomentReport {
    let table = coe_table(k).unwrap();
    coe_moment(k, &table, 4, &EnumOptions { coset_speedup: coset, ..Default::default() }).unwrap()
}

#[test]
fn direct_sum_equals_aggregated_moment() {
    let tables = tables_up_to(Ensemble::Coe, 3).unwrap();
    for k in 1..=3 {
        let direct: RationalFunction = enumerate_s2k(k)
            .map(|w| {
                let ph = phi(&w);
                if !ph.chi {
                    return RationalFunction::zero();
                }
                let power = RationalFunction::from_poly(Polynomial::monomial(1, ph.half_ell_q));
                tables[k - 1].wg_of_perm(&w).unwrap() * &power
            })
            .sum();
        assert_eq!(direct, moment(k, false).moment, "k={k}");
    }
}

#[test]
fn coset_enumeration_is_exact() {
    for k in 2..=4 {
        let plain = moment(k, false);
        let coset = moment(k, true);
        assert_eq!(plain.counts, coset.counts, "k={k}");
        assert_eq!(plain.moment, coset.moment);
    }
}

#[test]
fn census_reproduces_moment_counts() {
    for k in 2..=4 {
        let c = census(k, 1, false, None).unwrap();
        let mut counts: BTreeMap<(Partition, usize), u64> = BTreeMap::new();
        for (key, entry) in &c.table {
            *counts.entry((key.alpha.clone(), key.beta.len())).or_default() += entry.count;
        }
        let report = moment(k, false);
        assert_eq!(counts, report.counts, "k={k}");
        assert_eq!(c.contributing() + c.non_contributing, s2k_order(k));
    }
}

#[test]
fn small_moments() {
    assert_eq!(moment(2, false).moment, RationalFunction::from_int(2));
    assert_eq!(moment(4, true).moment, RationalFunction::from_int(4));
    let m3 = moment(3, false);
    assert_eq!(evaluate_moment(&m3, 5).unwrap(), BigRational::new(BigInt::from(193), BigInt::from(64)));
    let m1 = moment(1, false);
    let expected = RationalFunction::new(Polynomial::monomial(1, 1), Polynomial::from_i64s(&[1, 1])).unwrap();
    assert_eq!(m1.moment, expected);
}

/// `M_5(N) = 5 − 20 / ((N−2)(N−1)(N+1)(N+2)(N+5))`, so the tail vanishes through `1/N^4`.
#[test]
fn fifth_moment() {
    let m5 = moment(5, true);
    let den = [2, 1, -1, -2, -5].iter().fold(Polynomial::one(), |acc, &r| &acc * &Polynomial::linear_factor(r));
    let correction = RationalFunction::new(Polynomial::constant(-20), den).unwrap();
    assert_eq!(m5.moment, &RationalFunction::from_int(5) + &correction);
    let tail = tail_check(&m5).unwrap();
    assert!(tail.holds());
    assert_eq!(tail.c3, BigRational::from_integer(BigInt::from(0)));
}

#[test]
fn oracle_matches_graph_count() {
    let k = 2;
    for (n, twist) in [(5, Twist::Grand), (7, Twist::Grand), (5, Twist::Stride), (7, Twist::Stride), (11, Twist::TwoCycle)] {
        let p = twist.permutation(n).unwrap();
        for w in enumerate_s2k(k) {
            let count = phi_oracle(&w, &p, DEFAULT_ORACLE_BUDGET).unwrap();
            assert_eq!(u128::from(count), phi(&w).eval(n as u64), "{w} N={n} {twist}");
        }
    }
}

#[test]
fn short_cycles_break_the_count() {
    // With cycles of length <= 2k the brute-force count no longer follows the graph model.
    let p = Twist::Identity.permutation(5).unwrap();
    let mismatches = enumerate_s2k(2)
        .filter(|w| u128::from(phi_oracle(w, &p, DEFAULT_ORACLE_BUDGET).unwrap()) != phi(w).eval(5))
        .count();
    assert!(mismatches > 0);
}
