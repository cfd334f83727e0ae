//! Census of the contributing permutations (`χ_ω = 1`) by regularity and by the
//! half-types `α` of `[ω,T]` and `β` of `[ω,Q]`, with set-level checks of the
//! classification lemmas.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graphmodel::omega_stats;
use crate::moments::{check_budget, map_reduce_s2k, MomentError, Progress};
use crate::partition::{Partition, PartitionCode};
use crate::perm::{fixed_perms, Permutation};

/// Default number of witnesses kept per class.
pub const DEFAULT_SAMPLE_CAP: usize = 8;

/// Full member lists are kept for the classes the lemmas describe, up to this size.
const TRACKED_LIMIT: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassKey {
    pub regular: bool,
    pub alpha: Partition,
    pub beta: Partition,
}

impl ClassKey {
    pub fn new(regular: bool, alpha: Partition, beta: Partition) -> Self {
        ClassKey { regular, alpha, beta }
    }
}

fn short(p: &Partition) -> String {
    if p.is_ones() {
        "id".into()
    } else {
        p.parts().iter().filter(|&&x| x > 1).map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// `Reg(α, β)` / `Irreg(α, β)` with parts equal to 1 dropped, e.g. `Irreg(2, 2)`.
impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.regular { "Reg" } else { "Irreg" };
        write!(f, "{name}({}; {})", short(&self.alpha), short(&self.beta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Contributing(ClassKey),
    NotContributing,
}

pub fn membership(omega: &Permutation) -> Membership {
    let st = omega_stats(omega);
    if !st.chi {
        return Membership::NotContributing;
    }
    Membership::Contributing(ClassKey::new(
        omega.is_regular(),
        Partition::from_code(st.alpha),
        Partition::from_code(st.beta),
    ))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub count: u64,
    /// The first witnesses in enumeration order.
    pub samples: Vec<Permutation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassCensus {
    pub k: usize,
    pub sample_cap: usize,
    pub non_contributing: u64,
    #[serde(serialize_with = "serialize_table")]
    pub table: BTreeMap<ClassKey, ClassEntry>,
    /// Complete member lists of the classes the lemmas describe.
    #[serde(skip)]
    pub tracked: BTreeMap<ClassKey, Vec<Permutation>>,
}

fn serialize_table<S: serde::Serializer>(t: &BTreeMap<ClassKey, ClassEntry>, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Row<'a> {
        regular: bool,
        alpha: &'a Partition,
        beta: &'a Partition,
        count: u64,
        samples: Vec<String>,
    }
    s.collect_seq(t.iter().map(|(key, e)| Row {
        regular: key.regular,
        alpha: &key.alpha,
        beta: &key.beta,
        count: e.count,
        samples: e.samples.iter().map(|w| w.render_cycles()).collect(),
    }))
}

impl ClassCensus {
    pub fn count(&self, key: &ClassKey) -> u64 {
        self.table.get(key).map_or(0, |e| e.count)
    }

    /// Count of `Reg(α, β)` or `Irreg(α, β)` given by their long parts, padded with 1s.
    /// Zero when either half-type does not fit in `k`.
    pub fn count_of(&self, regular: bool, alpha: &[usize], beta: &[usize]) -> u64 {
        match (Partition::padded(alpha, self.k), Partition::padded(beta, self.k)) {
            (Some(a), Some(b)) => self.count(&ClassKey::new(regular, a, b)),
            _ => 0,
        }
    }

    pub fn contributing(&self) -> u64 {
        self.table.values().map(|e| e.count).sum()
    }
}

/// Classes whose full membership the lemma checks need.
fn is_tracked(regular: bool, alpha: &Partition, beta: &Partition) -> bool {
    let long = |p: &Partition| p.parts().iter().filter(|&&x| x > 1).copied().collect::<Vec<_>>();
    let (a, b) = (long(alpha), long(beta));
    if regular {
        a.is_empty() && (b.is_empty() || b == [2])
    } else {
        b.is_empty() || (a.is_empty() && (b == [2] || b == [2, 2] || b == [3])) || (a == [2] && b == [2])
    }
}

pub fn census(k: usize, sample_cap: usize, allow_large: bool, progress: Option<Progress<'_>>) -> Result<ClassCensus, MomentError> {
    check_budget(k, allow_large)?;
    type Key = (bool, PartitionCode, PartitionCode);
    #[derive(Default)]
    struct Acc {
        table: HashMap<Key, (u64, Vec<Permutation>)>,
        tracked: HashMap<Key, Vec<Permutation>>,
        non_contributing: u64,
    }
    let tracked_codes: BTreeSet<Key> = Partition::all(k)
        .iter()
        .flat_map(|a| Partition::all(k).into_iter().map(move |b| (a.clone(), b)))
        .flat_map(|(a, b)| [(true, a.clone(), b.clone()), (false, a, b)])
        .filter(|(r, a, b)| is_tracked(*r, a, b))
        .map(|(r, a, b)| (r, a.code(), b.code()))
        .collect();

    let acc = map_reduce_s2k(
        k,
        progress,
        Acc::default,
        |acc, w| {
            let st = omega_stats(w);
            if !st.chi {
                acc.non_contributing += 1;
                return;
            }
            let key = (w.is_regular(), st.alpha, st.beta);
            let e = acc.table.entry(key).or_default();
            e.0 += 1;
            if e.1.len() < sample_cap {
                e.1.push(*w);
            }
            if tracked_codes.contains(&key) {
                let list = acc.tracked.entry(key).or_default();
                if list.len() < TRACKED_LIMIT {
                    list.push(*w);
                }
            }
        },
        |a, b| {
            a.non_contributing += b.non_contributing;
            for (key, (count, samples)) in b.table {
                let e = a.table.entry(key).or_default();
                e.0 += count;
                let room = sample_cap.saturating_sub(e.1.len());
                e.1.extend(samples.into_iter().take(room));
            }
            for (key, list) in b.tracked {
                let e = a.tracked.entry(key).or_default();
                let room = TRACKED_LIMIT.saturating_sub(e.len());
                e.extend(list.into_iter().take(room));
            }
        },
    );
    let key_of = |(r, a, b): Key| ClassKey::new(r, Partition::from_code(a), Partition::from_code(b));
    Ok(ClassCensus {
        k,
        sample_cap,
        non_contributing: acc.non_contributing,
        table: acc
            .table
            .into_iter()
            .map(|(key, (count, samples))| (key_of(key), ClassEntry { count, samples }))
            .collect(),
        tracked: acc.tracked.into_iter().map(|(key, list)| (key_of(key), list)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause {clause:?} fails: {detail}{}", witness.as_ref().map(|w| format!(" (witness {w})")).unwrap_or_default())]
pub struct LemmaViolation {
    pub clause: String,
    pub detail: String,
    pub witness: Option<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub passed: bool,
    /// No parameter values or partitions apply at this `k`.
    pub vacuous: bool,
    pub detail: String,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub k: usize,
    pub clauses: Vec<ClauseResult>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn first_violation(&self) -> Option<LemmaViolation> {
        self.clauses.iter().find(|c| !c.passed).map(|c| LemmaViolation {
            clause: c.clause.clone(),
            detail: c.detail.clone(),
            witness: None,
        })
    }

    pub fn into_result(self, k: usize) -> Result<LemmaReport, LemmaViolation> {
        match self.clauses.iter().find(|c| !c.passed) {
            None => Ok(self),
            Some(c) => Err(LemmaViolation {
                clause: c.clause.clone(),
                detail: c.detail.clone(),
                witness: c.witness.as_ref().and_then(|w| Permutation::parse_cycles(w, k).ok()),
            }),
        }
    }
}

/// `{s^n g s^m : n, m ∈ [k]}` for each generator, as a list with repetitions.
pub fn shifted_family(generators: &[Permutation]) -> Vec<Permutation> {
    let Some(first) = generators.first() else { return Vec::new() };
    let s = fixed_perms(first.k()).s;
    let k = first.k() as i64;
    let mut out = Vec::new();
    for g in generators {
        for n in 0..k {
            for m in 0..k {
                out.push(s.pow(n).compose_unchecked(g).compose_unchecked(&s.pow(m)));
            }
        }
    }
    out
}

fn cycles(text: &str, k: usize) -> Permutation {
    Permutation::parse_cycles(text, k).expect("family generator is well formed")
}

/// The generators of the families in the classification, by parameter `b`.
pub mod families {
    use super::*;

    pub fn irreg_id_2(k: usize) -> Vec<Permutation> {
        vec![cycles("(1 ~1)", k)]
    }

    pub fn irreg_2_2(k: usize) -> Vec<Permutation> {
        (3..=k).map(|b| cycles(&format!("(~1 {b})"), k)).collect()
    }

    /// `(1 b̄)(b 1̄)` for `3 ≤ b ≤ k-1`.
    pub fn irreg_id_22_crossed(k: usize, b: usize) -> Permutation {
        cycles(&format!("(1 ~{b})({b} ~1)"), k)
    }

    /// `(1 1̄)(b b̄)` for `3 ≤ b ≤ k-1`.
    pub fn irreg_id_22_parallel(k: usize, b: usize) -> Permutation {
        cycles(&format!("(1 ~1)({b} ~{b})"), k)
    }

    pub fn irreg_id_22(k: usize) -> Vec<Permutation> {
        (3..k).flat_map(|b| [irreg_id_22_crossed(k, b), irreg_id_22_parallel(k, b)]).collect()
    }

    pub fn irreg_id_3(k: usize) -> Vec<Permutation> {
        if k < 2 {
            return Vec::new();
        }
        vec![cycles("(1 ~1)(2 ~2)", k)]
    }
}

struct Checker<'a> {
    census: &'a ClassCensus,
    out: Vec<ClauseResult>,
}

impl Checker<'_> {
    fn push(&mut self, clause: &str, passed: bool, vacuous: bool, detail: String, witness: Option<&Permutation>) {
        self.out.push(ClauseResult {
            clause: clause.to_string(),
            passed,
            vacuous,
            detail,
            witness: witness.map(|w| w.render_cycles()),
        });
    }

    fn members(&self, regular: bool, alpha: &[usize], beta: &[usize]) -> Option<BTreeSet<Permutation>> {
        let k = self.census.k;
        let key = ClassKey::new(regular, Partition::padded(alpha, k)?, Partition::padded(beta, k)?);
        Some(self.census.tracked.get(&key).map(|v| v.iter().copied().collect()).unwrap_or_default())
    }

    /// Compare a class with a family as sets and check both cardinalities.
    fn set_equality(
        &mut self,
        clause: &str,
        regular: bool,
        alpha: &[usize],
        beta: &[usize],
        family: Vec<Permutation>,
        expected: i64,
    ) {
        let k = self.census.k;
        let family_set: BTreeSet<Permutation> = family.iter().copied().collect();
        let Some(members) = self.members(regular, alpha, beta) else {
            let ok = family_set.is_empty();
            let detail = format!("half-types do not fit k = {k}; family has {} elements", family_set.len());
            self.push(clause, ok, true, detail, family_set.iter().next());
            return;
        };
        let count = self.census.count_of(regular, alpha, beta);
        if let Some(w) = members.difference(&family_set).next() {
            self.push(clause, false, false, format!("class member outside the family ({count} members)"), Some(w));
        } else if let Some(w) = family_set.difference(&members).next() {
            self.push(clause, false, false, "family element outside the class".into(), Some(w));
        } else if count as i64 != expected || members.len() as i64 != expected {
            self.push(clause, false, false, format!("count {count}, expected {expected}"), members.iter().next());
        } else {
            self.push(clause, true, false, format!("{count} members"), None);
        }
    }
}

/// Check every clause of the regular and irregular classification lemmas.
pub fn verify_lemmas(census: &ClassCensus) -> LemmaReport {
    let k = census.k;
    let ki = k as i64;
    let mut c = Checker { census, out: Vec::new() };
    let s = fixed_perms(k).s;

    let shifts: Vec<Permutation> = (0..ki).map(|n| s.pow(n)).collect();
    c.set_equality("Reg(id,id) = {s^n}, |.| = k", true, &[], &[], shifts, ki);
    c.set_equality("Reg(id,2^1) is empty", true, &[], &[2], Vec::new(), 0);

    let irreg_beta_id: Vec<(&ClassKey, &ClassEntry)> =
        census.table.iter().filter(|(key, _)| !key.regular && key.beta.is_ones()).collect();
    match irreg_beta_id.first() {
        None => c.push("Irreg(alpha,id) is empty for every alpha", true, false, "no members".into(), None),
        Some((key, e)) => {
            let w = e.samples.first();
            c.push("Irreg(alpha,id) is empty for every alpha", false, false, format!("{key} has {} members", e.count), w)
        }
    }

    c.set_equality(
        "Irreg(id,2^1) = {s^n (1 ~1) s^m}, |.| = k^2",
        false,
        &[],
        &[2],
        shifted_family(&families::irreg_id_2(k)),
        ki * ki,
    );
    c.set_equality(
        "Irreg(2^1,2^1) = {s^n (b ~1) s^m : 3 <= b <= k}, |.| = k^2(k-2)",
        false,
        &[2],
        &[2],
        shifted_family(&families::irreg_2_2(k)),
        ki * ki * (ki - 2).max(0),
    );
    let fam22 = shifted_family(&families::irreg_id_22(k));
    c.set_equality(
        "Irreg(id,2^2) = {s^n (1 ~b)(b ~1) s^m, s^n (1 ~1)(b ~b) s^m : 3 <= b <= k-1}, |.| = k^2(k-3)",
        false,
        &[],
        &[2, 2],
        fam22.clone(),
        ki * ki * (ki - 3).max(0),
    );
    double_count_clause(&mut c, k, &fam22);
    c.set_equality(
        "Irreg(id,3^1) = {s^n (1 ~1)(2 ~2) s^m}, |.| = k^2",
        false,
        &[],
        &[3],
        shifted_family(&families::irreg_id_3(k)),
        ki * ki,
    );

    if k >= 3 {
        for text in ["(2 ~1)", "(1 ~2)(2 ~1)"] {
            let w = cycles(text, k);
            let ok = membership(&w) == Membership::NotContributing;
            c.push(&format!("{text} does not contribute"), ok, false, format!("chi = {}", (!ok) as u8), (!ok).then_some(&w));
        }
    }
    LemmaReport { k, clauses: c.out }
}

/// Each element of the `Irreg(id, 2²)` parametrization occurs exactly twice, and the
/// parameter values `b` and `k+2-b` give the same set in each of the two shapes.
fn double_count_clause(c: &mut Checker<'_>, k: usize, family: &[Permutation]) {
    let clause = "Irreg(id,2^2) parametrization counts each element exactly twice (b <-> k+2-b)";
    if family.is_empty() {
        c.push(clause, true, true, "no parameter values".into(), None);
        return;
    }
    let mut mult: BTreeMap<Permutation, usize> = BTreeMap::new();
    for w in family {
        *mult.entry(*w).or_insert(0) += 1;
    }
    if let Some((w, m)) = mult.iter().find(|(_, &m)| m != 2) {
        c.push(clause, false, false, format!("element listed {m} times"), Some(w));
        return;
    }
    for b in 3..k {
        let partner = k + 2 - b;
        for shape in [families::irreg_id_22_crossed, families::irreg_id_22_parallel] {
            let here: BTreeSet<_> = shifted_family(&[shape(k, b)]).into_iter().collect();
            let there: BTreeSet<_> = shifted_family(&[shape(k, partner)]).into_iter().collect();
            if here != there {
                let w = here.symmetric_difference(&there).next().copied();
                c.push(clause, false, false, format!("b = {b} and b = {partner} give different sets"), w.as_ref());
                return;
            }
        }
    }
    c.push(clause, true, false, format!("{} listings, {} distinct", family.len(), mult.len()), None);
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub terms: Vec<(String, i64)>,
    pub total: i64,
}

/// `k²(k-1)/2 + |Reg(id,2²)| + |Reg(id,3¹)| − |Reg(2¹,2¹)| + 2|Reg(3¹,id)| + |Reg(2²,id)|`,
/// which vanishes when the regular classes balance the `1/N²` term.
pub fn regular_identity_check(census: &ClassCensus) -> IdentityReport {
    let k = census.k as i64;
    let c = |a: &[usize], b: &[usize]| census.count_of(true, a, b) as i64;
    let terms = vec![
        ("k^2(k-1)/2".to_string(), k * k * (k - 1) / 2),
        ("|Reg(id,2^2)|".to_string(), c(&[], &[2, 2])),
        ("|Reg(id,3^1)|".to_string(), c(&[], &[3])),
        ("-|Reg(2^1,2^1)|".to_string(), -c(&[2], &[2])),
        ("2|Reg(3^1,id)|".to_string(), 2 * c(&[3], &[])),
        ("|Reg(2^2,id)|".to_string(), c(&[2, 2], &[])),
    ];
    let total = terms.iter().map(|(_, v)| v).sum();
    IdentityReport { terms, total }
}
