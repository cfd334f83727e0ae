//! Exact twisted moments `M_k(N) = Σ_ω χ_ω Wg^COE(ω) N^{½ℓ[ω,Q]}`.
//!
//! The sum over `S_2k` is first reduced to integer counts per key `(α, m)` with `α` the
//! half-type of `[ω,T]` and `m = ½ℓ[ω,Q]`; only then are the Weingarten values brought
//! in, so the symbolic work is a few dozen rational-function products.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactalg::{inverse_power_coeffs, series_in_inverse_n, AlgError, Polynomial, RationalFunction, SeriesTail};
use crate::graphmodel::omega_stats;
use crate::partition::{Partition, PartitionCode};
use crate::perm::{plain_slot, s2k_chunks, s2k_order, LexPermutations, Permutation};
use crate::weingarten::{WeingartenTable, WgError};

/// Largest `k` enumerated without an explicit opt-in.
pub const DEFAULT_MAX_K: usize = 5;
/// Largest `k` enumerated at all; `(12)!` permutations.
pub const OPT_IN_MAX_K: usize = 6;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("k = {k} exceeds the enumeration cap of {cap} (k = {OPT_IN_MAX_K} needs an explicit opt-in)")]
    BudgetExceeded { k: usize, cap: usize },
    #[error(transparent)]
    Wg(#[from] WgError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("moment has a pole at N = {0}")]
    PoleAtN(BigInt),
    #[error("Weingarten table is for k = {table} but the moment needs k = {k}")]
    TableMismatch { k: usize, table: usize },
}

/// Progress callback: (chunks done, total chunks).
pub type Progress<'a> = &'a (dyn Fn(u64, u64) + Sync);

#[derive(Clone, Copy, Default)]
pub struct EnumOptions<'a> {
    /// Visit one element per right coset `ω⟨s⟩` and weight it by `k`.
    pub coset_speedup: bool,
    /// Permit `k = OPT_IN_MAX_K`.
    pub allow_large: bool,
    pub progress: Option<Progress<'a>>,
}

pub(crate) fn check_budget(k: usize, allow_large: bool) -> Result<(), MomentError> {
    let cap = if allow_large { OPT_IN_MAX_K } else { DEFAULT_MAX_K };
    if k == 0 || k > cap {
        return Err(MomentError::BudgetExceeded { k, cap });
    }
    Ok(())
}

/// Roughly a thousand chunks for the large cases, fixed by `k` alone so the reduction
/// order never depends on the thread count.
fn chunk_len(k: usize) -> u64 {
    (s2k_order(k) / 1024).max(64)
}

/// Map-reduce over `S_2k` in lexicographic chunks. Each chunk folds into its own
/// accumulator; accumulators are merged in chunk order.
pub(crate) fn map_reduce_s2k<A, F, M>(k: usize, progress: Option<Progress<'_>>, init: impl Fn() -> A + Sync, fold: F, merge: M) -> A
where
    A: Send,
    F: Fn(&mut A, &Permutation) + Sync,
    M: Fn(&mut A, A),
{
    let chunks = s2k_chunks(k, chunk_len(k));
    let total = chunks.len() as u64;
    let done = std::sync::atomic::AtomicU64::new(0);
    let parts: Vec<A> = chunks
        .par_iter()
        .map(|&(start, len)| {
            let mut acc = init();
            for w in LexPermutations::range(k, start, len) {
                fold(&mut acc, &w);
            }
            let d = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            if let Some(p) = progress {
                p(d, total);
            }
            acc
        })
        .collect();
    let mut it = parts.into_iter();
    let mut out = it.next().unwrap_or_else(&init);
    for p in it {
        merge(&mut out, p);
    }
    out
}

/// `ω` is the chosen element of its coset `ω⟨s⟩`: `ω(1)` is the smallest of the
/// images of the unbarred symbols, since `(ω s^n)(1) = ω(1+n)`.
#[inline]
pub(crate) fn is_coset_rep(w: &Permutation) -> bool {
    let first = w.apply(0);
    (1..w.k()).all(|b| w.apply(plain_slot(b)) > first)
}

/// Integer pass: counts per (α code, m) and the number of `χ = 0` permutations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawCounts {
    pub counts: BTreeMap<(PartitionCode, usize), u64>,
    pub chi_zero: u64,
    pub evaluated: u64,
}

pub fn count_pass(k: usize, opts: &EnumOptions<'_>) -> Result<RawCounts, MomentError> {
    check_budget(k, opts.allow_large)?;
    let coset = opts.coset_speedup && k > 1;
    #[derive(Default)]
    struct Acc {
        map: HashMap<(PartitionCode, usize), u64>,
        chi_zero: u64,
        evaluated: u64,
    }
    let acc = map_reduce_s2k(
        k,
        opts.progress,
        Acc::default,
        |acc, w| {
            if coset && !is_coset_rep(w) {
                return;
            }
            acc.evaluated += 1;
            let st = omega_stats(w);
            if st.chi {
                let m = Partition::from_code(st.beta).len();
                *acc.map.entry((st.alpha, m)).or_insert(0) += 1;
            } else {
                acc.chi_zero += 1;
            }
        },
        |a, b| {
            for (key, c) in b.map {
                *a.map.entry(key).or_insert(0) += c;
            }
            a.chi_zero += b.chi_zero;
            a.evaluated += b.evaluated;
        },
    );
    let weight = if coset { k as u64 } else { 1 };
    Ok(RawCounts {
        counts: acc.map.into_iter().map(|(key, c)| (key, c * weight)).collect(),
        chi_zero: acc.chi_zero * weight,
        evaluated: acc.evaluated,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationMeta {
    /// `(2k)!`.
    pub permutations: u64,
    /// Permutations actually examined (fewer with the coset speedup).
    pub evaluated: u64,
    pub chi_zero: u64,
    pub coset_speedup: bool,
    /// Excluded from JSON so that repeated runs produce identical files.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub k: usize,
    #[serde(serialize_with = "serialize_counts")]
    pub counts: BTreeMap<(Partition, usize), u64>,
    pub moment: RationalFunction,
    pub tail: SeriesTail,
    pub meta: EnumerationMeta,
}

fn serialize_counts<S: Serializer>(counts: &BTreeMap<(Partition, usize), u64>, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(counts.len()))?;
    for ((alpha, m), c) in counts {
        map.serialize_entry(&format!("{}|{m}", alpha.dash_key()), c)?;
    }
    map.end()
}

/// `Σ count(α,m) · Wg(α) · N^m`.
pub fn assemble(counts: &BTreeMap<(Partition, usize), u64>, table: &WeingartenTable) -> Result<RationalFunction, WgError> {
    let mut total = RationalFunction::zero();
    for ((alpha, m), &c) in counts {
        let term = table.get(alpha)?.mul_poly(&Polynomial::monomial(c, *m));
        total = &total + &term;
    }
    Ok(total)
}

/// Exact `M_k(N)` from a full enumeration of `S_2k`.
pub fn coe_moment(
    k: usize,
    table: &WeingartenTable,
    series_order: usize,
    opts: &EnumOptions<'_>,
) -> Result<MomentReport, MomentError> {
    if table.k != k {
        return Err(MomentError::TableMismatch { k, table: table.k });
    }
    let start = Instant::now();
    let raw = count_pass(k, opts)?;
    let counts: BTreeMap<(Partition, usize), u64> =
        raw.counts.iter().map(|(&(code, m), &c)| ((Partition::from_code(code), m), c)).collect();
    let moment = assemble(&counts, table)?;
    let tail = series_in_inverse_n(&moment, series_order.max(1))?;
    Ok(MomentReport {
        k,
        counts,
        moment,
        tail,
        meta: EnumerationMeta {
            permutations: s2k_order(k),
            evaluated: raw.evaluated,
            chi_zero: raw.chi_zero,
            coset_speedup: opts.coset_speedup && k > 1,
            wall_time: start.elapsed(),
        },
    })
}

/// The `1/N`, `1/N²`, `1/N³` coefficients of `M_k(N) − k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailCheck {
    #[serde(with = "rational_string")]
    pub c1: BigRational,
    #[serde(with = "rational_string")]
    pub c2: BigRational,
    #[serde(with = "rational_string")]
    pub c3: BigRational,
}

impl TailCheck {
    /// The first two corrections vanish.
    pub fn holds(&self) -> bool {
        use num_traits::Zero;
        self.c1.is_zero() && self.c2.is_zero()
    }
}

mod rational_string {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}

pub fn tail_check(report: &MomentReport) -> Result<TailCheck, MomentError> {
    let diff = &report.moment - &RationalFunction::from_int(report.k as i64);
    let c = inverse_power_coeffs(&diff, 3)?;
    Ok(TailCheck { c1: c[0].clone(), c2: c[1].clone(), c3: c[2].clone() })
}

pub fn evaluate_moment(report: &MomentReport, n: i64) -> Result<BigRational, MomentError> {
    report.moment.eval(&BigInt::from(n)).map_err(|e| match e {
        AlgError::PoleAt(p) => MomentError::PoleAtN(p),
        other => other.into(),
    })
}

impl MomentReport {
    /// CSV with header `k,alpha,m,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,alpha,m,count\n");
        for ((alpha, m), c) in &self.counts {
            out.push_str(&format!("{},{},{m},{c}\n", self.k, alpha.dash_key()));
        }
        out
    }
}

/// Apply `σ⁻¹π` for the regular permutation `ω = (σ, π)`.
pub fn sigma_inv_pi(w: &Permutation) -> Vec<usize> {
    let k = w.k();
    let mut sigma_inv = vec![0; k];
    for b in 0..k {
        sigma_inv[w.apply(2 * b) / 2] = b;
    }
    (0..k).map(|b| sigma_inv[w.apply(2 * b + 1) / 2]).collect()
}

/// The CUE moment recomputed through the regular permutations only:
/// `Σ_{(σ,π)} Wg^CUE(σ⁻¹π) Φ(σ,π)`. Equals `k` exactly.
pub fn cue_moment_via_weingarten(cue: &WeingartenTable) -> Result<RationalFunction, MomentError> {
    let k = cue.k;
    let mut counts: BTreeMap<(Partition, usize), u64> = BTreeMap::new();
    let mut images = vec![0usize; 2 * k];
    for sigma in sk_permutations(k) {
        for pi in sk_permutations(k) {
            for b in 0..k {
                images[2 * b] = 2 * sigma[b];
                images[2 * b + 1] = 2 * pi[b] + 1;
            }
            let w = Permutation::from_images(k, &images).expect("regular permutation");
            let st = omega_stats(&w);
            debug_assert!(st.chi, "regular permutations always have χ = 1");
            let lambda = crate::weingarten::sk_cycle_type(&sigma_inv_pi(&w));
            *counts.entry((lambda, Partition::from_code(st.beta).len())).or_insert(0) += 1;
        }
    }
    Ok(assemble(&counts, cue)?)
}

/// All of `S_k` in lexicographic order, 0-based.
pub fn sk_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..k).collect();
    loop {
        out.push(a.clone());
        let Some(i) = (1..k).rev().find(|&i| a[i - 1] < a[i]) else { break };
        let j = (i..k).rev().find(|&j| a[j] > a[i - 1]).unwrap();
        a.swap(i - 1, j);
        a[i..].reverse();
    }
    out
}
