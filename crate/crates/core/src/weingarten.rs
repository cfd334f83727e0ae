//! CUE and COE Weingarten functions as exact rational functions of `N`.
//!
//! Tables are built bottom-up in `k` from the orthogonality relations. The unknowns
//! are the partitions of `k`; each equation is the relation evaluated at a canonical
//! representative of one class, with every permutation appearing in it classified by
//! cycle type (CUE) or half-type of `[ω,T]` (COE).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{series_in_inverse_n, solve_linear_system, AlgError, Polynomial, RationalFunction, SeriesTail};
use crate::partition::Partition;
use crate::perm::{bar_slot, fixed_perms, plain_slot, Permutation, MAX_K};

#[derive(Debug, Error)]
pub enum WgError {
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("no entry for {key} in the {ensemble} table with k = {k}")]
    KeyMissing { ensemble: Ensemble, k: usize, key: String },
    #[error("orthogonality relations do not determine the {ensemble} table at k = {k}")]
    RankDeficient { ensemble: Ensemble, k: usize },
    #[error("k = {0} outside the supported range 1..={MAX_K}")]
    UnsupportedK(usize),
    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Cue,
    Coe,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Cue => "cue",
            Ensemble::Coe => "coe",
        })
    }
}

impl FromStr for Ensemble {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cue" => Ok(Ensemble::Cue),
            "coe" => Ok(Ensemble::Coe),
            other => Err(format!("unknown ensemble {other:?} (expected cue or coe)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeingartenTable {
    pub ensemble: Ensemble,
    pub k: usize,
    pub entries: BTreeMap<Partition, RationalFunction>,
}

impl WeingartenTable {
    pub fn get(&self, lambda: &Partition) -> Result<&RationalFunction, WgError> {
        self.entries.get(lambda).ok_or_else(|| WgError::KeyMissing {
            ensemble: self.ensemble,
            k: self.k,
            key: lambda.to_string(),
        })
    }

    /// COE value at `ω ∈ S_2k`, keyed by the half-type of `[ω,T]`.
    pub fn wg_of_perm(&self, omega: &Permutation) -> Result<&RationalFunction, WgError> {
        let missing = || WgError::KeyMissing { ensemble: self.ensemble, k: self.k, key: omega.render_cycles() };
        if self.ensemble != Ensemble::Coe || omega.k() != self.k {
            return Err(missing());
        }
        let t = fixed_perms(self.k).t;
        let alpha = omega.commutator_unchecked(&t).half_type().map_err(|_| missing())?;
        self.get(&alpha)
    }

    /// CUE value at `σ ∈ S_k` (0-based images), keyed by cycle type.
    pub fn wg_of_sk(&self, sigma: &[usize]) -> Result<&RationalFunction, WgError> {
        if self.ensemble != Ensemble::Cue || sigma.len() != self.k {
            return Err(WgError::KeyMissing { ensemble: self.ensemble, k: self.k, key: format!("{sigma:?}") });
        }
        self.get(&sk_cycle_type(sigma))
    }

    pub fn asymptotics(&self, lambda: &Partition, order: usize) -> Result<SeriesTail, WgError> {
        Ok(series_in_inverse_n(self.get(lambda)?, order)?)
    }
}

/// Cycle type of a 0-based permutation of `[k]`.
pub fn sk_cycle_type(sigma: &[usize]) -> Partition {
    let mut seen = vec![false; sigma.len()];
    let mut parts = Vec::new();
    for start in 0..sigma.len() {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            x = sigma[x];
        }
        if len > 0 {
            parts.push(len);
        }
    }
    Partition::new(parts).unwrap()
}

/// Cycles of `λ` laid out left to right on `0..k`, with the part at `last` moved to the
/// end so that it contains `k-1`.
fn layout(lambda: &Partition, last: usize) -> Vec<usize> {
    let mut parts = lambda.parts().to_vec();
    let moved = parts.remove(last);
    parts.push(moved);
    let mut sigma = vec![0; lambda.weight()];
    let mut start = 0;
    for p in parts {
        for i in 0..p {
            sigma[start + i] = start + (i + 1) % p;
        }
        start += p;
    }
    sigma
}

/// Representatives of `λ`: one per distinct part size placed last, the primary
/// (smallest part last) first.
fn layouts(lambda: &Partition) -> Vec<Vec<usize>> {
    let parts = lambda.parts();
    let mut out = vec![layout(lambda, parts.len() - 1)];
    for i in (0..parts.len() - 1).rev() {
        if parts[i] != parts[i + 1] {
            out.push(layout(lambda, i));
        }
    }
    out
}

fn n_plus(c: i64) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::from_i64s(&[c, 1]))
}

/// The lower-level value `Wg_{k-1}` of a partition of `k-1`; `Wg_0 = 1`.
fn lower_value(lower: Option<&WeingartenTable>, lambda: &Partition) -> Result<RationalFunction, WgError> {
    match lower {
        None => Ok(RationalFunction::one()),
        Some(t) => Ok(t.get(lambda)?.clone()),
    }
}

/// One linear equation: coefficients per partition of `k` and a right-hand side.
struct Equation {
    coeffs: BTreeMap<Partition, RationalFunction>,
    rhs: RationalFunction,
}

impl Equation {
    fn new() -> Self {
        Equation { coeffs: BTreeMap::new(), rhs: RationalFunction::zero() }
    }

    fn add(&mut self, lambda: Partition, c: &RationalFunction) {
        let slot = self.coeffs.entry(lambda).or_insert_with(RationalFunction::zero);
        *slot = &*slot + c;
    }

    fn residual(&self, table: &WeingartenTable) -> Result<RationalFunction, WgError> {
        let mut acc = -&self.rhs;
        for (lambda, c) in &self.coeffs {
            acc = &acc + &(c * table.get(lambda)?);
        }
        Ok(acc)
    }
}

/// `N·Wg(σ) + Σ_{i<k} Wg((i k)σ) = δ_{σ(k),k} Wg_{k-1}(σ↓)`.
fn cue_equation(sigma: &[usize], lower: Option<&WeingartenTable>) -> Result<Equation, WgError> {
    let k = sigma.len();
    let mut eq = Equation::new();
    eq.add(sk_cycle_type(sigma), &RationalFunction::from_poly(Polynomial::var()));
    for i in 0..k - 1 {
        let swapped: Vec<usize> = sigma
            .iter()
            .map(|&x| {
                if x == i {
                    k - 1
                } else if x == k - 1 {
                    i
                } else {
                    x
                }
            })
            .collect();
        eq.add(sk_cycle_type(&swapped), &RationalFunction::one());
    }
    if sigma[k - 1] == k - 1 {
        eq.rhs = lower_value(lower, &sk_cycle_type(&sigma[..k - 1]))?;
    }
    Ok(eq)
}

fn transposition(k: usize, a: usize, b: usize) -> Permutation {
    let mut images: Vec<usize> = (0..2 * k).collect();
    images.swap(a, b);
    Permutation::from_images(k, &images).unwrap()
}

/// Drop the slots of `k` and `k̄`; meaningful when `ω` maps that pair to itself.
fn project(omega: &Permutation) -> Permutation {
    let k = omega.k();
    let images: Vec<usize> = omega.images()[..2 * k - 2].iter().map(|&x| x as usize).collect();
    Permutation::from_images(k - 1, &images).unwrap()
}

/// The relation at a regular representative `ω`, read literally:
/// `(N+1)Wg(ω) + Σ_{z<k} [Wg((z k)ω) + Wg((z̄ k)ω)] = δ Wg_{k-1}(ω↓)` with `δ` the
/// condition that `ω` leaves `{k, k̄}` invariant.
fn coe_equation_literal(omega: &Permutation, lower: Option<&WeingartenTable>) -> Result<Equation, WgError> {
    let k = omega.k();
    let t = fixed_perms(k).t;
    let half = |w: &Permutation| w.commutator_unchecked(&t).half_type().expect("commutator with T has even type");
    let (kp, kb) = (plain_slot(k - 1), bar_slot(k - 1));
    let mut eq = Equation::new();
    eq.add(half(omega), &n_plus(1));
    for z in 0..k - 1 {
        for zs in [plain_slot(z), bar_slot(z)] {
            eq.add(half(&transposition(k, zs, kp).compose_unchecked(omega)), &RationalFunction::one());
        }
    }
    let (a, b) = (omega.apply(kp), omega.apply(kb));
    if (a == kp && b == kb) || (a == kb && b == kp) {
        let rhs = if k == 1 { RationalFunction::one() } else { lower_value(lower, &half(&project(omega)))? };
        eq.rhs = rhs;
    }
    Ok(eq)
}

/// The relation in the form that holds at every `ω ∈ S_2k`: transpositions multiply on
/// the right, `δ` asks that `ω` carry `{k, k̄}` onto some pair `{j, j̄}`, and the
/// right-hand side is `Wg_{k-1}` of the half-type of `[ω,T]` with one part 1 removed.
fn coe_equation_general(omega: &Permutation, lower: Option<&WeingartenTable>) -> Result<Equation, WgError> {
    let k = omega.k();
    let t = fixed_perms(k).t;
    let half = |w: &Permutation| w.commutator_unchecked(&t).half_type().expect("commutator with T has even type");
    let (kp, kb) = (plain_slot(k - 1), bar_slot(k - 1));
    let mut eq = Equation::new();
    let alpha = half(omega);
    eq.add(alpha.clone(), &n_plus(1));
    for z in 0..k - 1 {
        for zs in [plain_slot(z), bar_slot(z)] {
            eq.add(half(&omega.compose_unchecked(&transposition(k, zs, kp))), &RationalFunction::one());
        }
    }
    if omega.apply(kp) / 2 == omega.apply(kb) / 2 {
        let reduced = alpha.without_one().expect("a fixed T-pair gives a part 1");
        eq.rhs = lower_value(lower, &reduced)?;
    }
    Ok(eq)
}

fn regular_rep(sigma: &[usize]) -> Permutation {
    let k = sigma.len();
    let mut images: Vec<usize> = (0..2 * k).collect();
    for (b, &x) in sigma.iter().enumerate() {
        images[plain_slot(b)] = plain_slot(x);
    }
    Permutation::from_images(k, &images).unwrap()
}

fn equations_for(
    ensemble: Ensemble,
    sigma: &[usize],
    lower: Option<&WeingartenTable>,
) -> Result<Equation, WgError> {
    match ensemble {
        Ensemble::Cue => cue_equation(sigma, lower),
        Ensemble::Coe => coe_equation_literal(&regular_rep(sigma), lower),
    }
}

/// Solve for the level-`k` table given the level-`k-1` table (`None` at `k = 1`).
pub fn build_table(ensemble: Ensemble, k: usize, lower: Option<&WeingartenTable>) -> Result<WeingartenTable, WgError> {
    if !(1..=MAX_K).contains(&k) {
        return Err(WgError::UnsupportedK(k));
    }
    let unknowns = Partition::all(k);
    let index: BTreeMap<&Partition, usize> = unknowns.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let to_row = |eq: &Equation| -> Vec<RationalFunction> {
        let mut row = vec![RationalFunction::zero(); unknowns.len()];
        for (lambda, c) in &eq.coeffs {
            row[index[lambda]] = c.clone();
        }
        row
    };

    let primary: Vec<Equation> =
        unknowns.iter().map(|l| equations_for(ensemble, &layouts(l)[0], lower)).collect::<Result<_, _>>()?;
    let a: Vec<Vec<RationalFunction>> = primary.iter().map(to_row).collect();
    let b: Vec<RationalFunction> = primary.iter().map(|e| e.rhs.clone()).collect();
    let solution = match solve_linear_system(&a, &b) {
        Ok(x) => x,
        Err(AlgError::SingularSystem) => solve_with_alternatives(ensemble, &unknowns, lower, &to_row)?,
        Err(e) => return Err(e.into()),
    };
    Ok(WeingartenTable { ensemble, k, entries: unknowns.into_iter().zip(solution).collect() })
}

/// Fallback when the primary representatives leave the system singular: pool the
/// equations of every representative and pick a full-rank square subset greedily,
/// judging rank at a large integer value of `N`.
fn solve_with_alternatives(
    ensemble: Ensemble,
    unknowns: &[Partition],
    lower: Option<&WeingartenTable>,
    to_row: &dyn Fn(&Equation) -> Vec<RationalFunction>,
) -> Result<Vec<RationalFunction>, WgError> {
    let k = unknowns[0].weight();
    let mut pool = Vec::new();
    for l in unknowns {
        for sigma in layouts(l) {
            pool.push(equations_for(ensemble, &sigma, lower)?);
        }
    }
    let probe = BigInt::from(1_000_003);
    let mut basis: Vec<Vec<BigRational>> = Vec::new();
    let mut chosen = Vec::new();
    for eq in &pool {
        let row = to_row(eq);
        let Ok(mut v) = row.iter().map(|f| f.eval(&probe)).collect::<Result<Vec<_>, _>>() else { continue };
        for b in &basis {
            let pivot = b.iter().position(|x| !x.is_zero()).unwrap();
            if !v[pivot].is_zero() {
                let f = &v[pivot] / &b[pivot];
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= &f * bi;
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            basis.push(v);
            chosen.push(row_and_rhs(row, eq));
        }
        if chosen.len() == unknowns.len() {
            break;
        }
    }
    if chosen.len() < unknowns.len() {
        return Err(WgError::RankDeficient { ensemble, k });
    }
    let (a, b): (Vec<_>, Vec<_>) = chosen.into_iter().unzip();
    let x = solve_linear_system(&a, &b).map_err(|_| WgError::RankDeficient { ensemble, k })?;
    Ok(x)
}

fn row_and_rhs(row: Vec<RationalFunction>, eq: &Equation) -> (Vec<RationalFunction>, RationalFunction) {
    (row, eq.rhs.clone())
}

/// Tables for `k = 1..=k_max`, each built from the one below.
pub fn tables_up_to(ensemble: Ensemble, k_max: usize) -> Result<Vec<WeingartenTable>, WgError> {
    let mut out: Vec<WeingartenTable> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let t = build_table(ensemble, k, out.last())?;
        out.push(t);
    }
    Ok(out)
}

pub fn cue_table(k: usize) -> Result<WeingartenTable, WgError> {
    Ok(tables_up_to(Ensemble::Cue, k)?.pop().expect("k >= 1"))
}

pub fn coe_table(k: usize) -> Result<WeingartenTable, WgError> {
    Ok(tables_up_to(Ensemble::Coe, k)?.pop().expect("k >= 1"))
}

/// Residual of the CUE relation at `σ ∈ S_k`; zero for a correct table.
pub fn cue_residual(
    table: &WeingartenTable,
    lower: Option<&WeingartenTable>,
    sigma: &[usize],
) -> Result<RationalFunction, WgError> {
    cue_equation(sigma, lower)?.residual(table)
}

/// Residual of the COE relation at `ω ∈ S_2k` in the form valid on all of `S_2k`.
pub fn coe_residual(
    table: &WeingartenTable,
    lower: Option<&WeingartenTable>,
    omega: &Permutation,
) -> Result<RationalFunction, WgError> {
    coe_equation_general(omega, lower)?.residual(table)
}

/// Residual of the COE relation read literally (left multiplication, `δ` by invariance
/// of the set `{k, k̄}`). Exact on the regular representatives used for assembly.
pub fn coe_literal_residual(
    table: &WeingartenTable,
    lower: Option<&WeingartenTable>,
    omega: &Permutation,
) -> Result<RationalFunction, WgError> {
    coe_equation_literal(omega, lower)?.residual(table)
}

/// Residuals of every assembly equation (all representatives); all zero when valid.
pub fn representative_residuals(
    table: &WeingartenTable,
    lower: Option<&WeingartenTable>,
) -> Result<Vec<(Partition, RationalFunction)>, WgError> {
    let mut out = Vec::new();
    for lambda in Partition::all(table.k) {
        for sigma in layouts(&lambda) {
            out.push((lambda.clone(), equations_for(table.ensemble, &sigma, lower)?.residual(table)?));
        }
    }
    Ok(out)
}

/// The regular representative `(σ_λ, id)` of a COE class, or `σ_λ` itself for CUE
/// (as the regular permutation `(σ_λ, id)` as well).
pub fn representative(lambda: &Partition) -> Permutation {
    regular_rep(&layouts(lambda)[0])
}

/// On-disk store of tables, one JSON file per (ensemble, k).
pub struct WgCache {
    dir: PathBuf,
}

/// Counts of tables served from disk versus rebuilt.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
}

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "TWCOE_CACHE_DIR";

impl WgCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        WgCache { dir: dir.into() }
    }

    /// `$TWCOE_CACHE_DIR`, else `$XDG_CACHE_HOME/twisted-coe`, else `~/.cache/twisted-coe`.
    pub fn from_env() -> Self {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return Self::new(d);
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache")))
            .unwrap_or_else(std::env::temp_dir);
        Self::new(base.join("twisted-coe"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, ensemble: Ensemble, k: usize) -> PathBuf {
        self.dir.join(format!("wg-{ensemble}-k{k}.json"))
    }

    /// Load a cached table, accepting it only if it has the right shape and the
    /// identity-class equation still has zero residual.
    fn load(&self, ensemble: Ensemble, k: usize, lower: Option<&WeingartenTable>) -> Option<WeingartenTable> {
        let text = std::fs::read_to_string(self.path(ensemble, k)).ok()?;
        let table: WeingartenTable = serde_json::from_str(&text).ok()?;
        if table.ensemble != ensemble || table.k != k || table.entries.len() != Partition::all(k).len() {
            return None;
        }
        let id = Partition::ones(k);
        let eq = equations_for(ensemble, &layouts(&id)[0], lower).ok()?;
        eq.residual(&table).ok()?.is_zero().then_some(table)
    }

    fn store(&self, table: &WeingartenTable) -> Result<(), WgError> {
        let path = self.path(table.ensemble, table.k);
        let err = |reason: String| WgError::Cache { path: path.clone(), reason };
        std::fs::create_dir_all(&self.dir).map_err(|e| err(e.to_string()))?;
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        let text = serde_json::to_string_pretty(table).map_err(|e| err(e.to_string()))?;
        std::fs::write(&tmp, text).map_err(|e| err(e.to_string()))?;
        std::fs::rename(&tmp, &path).map_err(|e| err(e.to_string()))
    }

    /// Tables `1..=k_max`, from disk where valid, rebuilt (and written back) otherwise.
    /// A failure to write the cache is not fatal.
    pub fn tables_up_to(&self, ensemble: Ensemble, k_max: usize) -> Result<(Vec<WeingartenTable>, CacheStats), WgError> {
        let mut stats = CacheStats::default();
        let mut out: Vec<WeingartenTable> = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let table = match self.load(ensemble, k, out.last()) {
                Some(t) => {
                    stats.hits += 1;
                    t
                }
                None => {
                    stats.misses += 1;
                    let t = build_table(ensemble, k, out.last())?;
                    let _ = self.store(&t);
                    t
                }
            };
            out.push(table);
        }
        Ok((out, stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::inverse_power_coeffs;
    use crate::perm::enumerate_s2k;

    #[test]
    fn primary_representatives_are_nonsingular() {
        for ensemble in [Ensemble::Cue, Ensemble::Coe] {
            let mut lower: Option<WeingartenTable> = None;
            for k in 1..=6 {
                let unknowns = Partition::all(k);
                let eqs: Vec<Equation> =
                    unknowns.iter().map(|l| equations_for(ensemble, &layouts(l)[0], lower.as_ref()).unwrap()).collect();
                let a: Vec<Vec<RationalFunction>> = eqs
                    .iter()
                    .map(|eq| unknowns.iter().map(|u| eq.coeffs.get(u).cloned().unwrap_or_else(RationalFunction::zero)).collect())
                    .collect();
                let b: Vec<RationalFunction> = eqs.iter().map(|e| e.rhs.clone()).collect();
                assert!(solve_linear_system(&a, &b).is_ok(), "{ensemble} k={k}");
                lower = Some(build_table(ensemble, k, lower.as_ref()).unwrap());
            }
        }
    }

    fn rf(num: &[i64], den_roots: &[i64]) -> RationalFunction {
        let den = den_roots.iter().fold(Polynomial::one(), |acc, &r| &acc * &Polynomial::linear_factor(r));
        RationalFunction::new(Polynomial::from_i64s(num), den).unwrap()
    }

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn cue_small() {
        assert_eq!(cue_table(1).unwrap().get(&part("1")).unwrap(), &rf(&[1], &[0]));
        let t = cue_table(2).unwrap();
        assert_eq!(t.get(&part("1,1")).unwrap(), &rf(&[1], &[1, -1]));
        assert_eq!(t.get(&part("2")).unwrap(), &rf(&[-1], &[0, 1, -1]));
    }

    #[test]
    fn coe_anchors() {
        let tables = tables_up_to(Ensemble::Coe, 3).unwrap();
        assert_eq!(tables[0].get(&part("1")).unwrap(), &rf(&[1], &[-1]));
        assert_eq!(tables[1].get(&part("2")).unwrap(), &rf(&[-1], &[0, -1, -3]));
        assert_eq!(tables[1].get(&part("1,1")).unwrap(), &rf(&[2, 1], &[0, -1, -3]));
        assert_eq!(tables[2].get(&part("3")).unwrap(), &rf(&[2], &[1, 0, -1, -3, -5]));
        assert_eq!(tables[2].get(&part("2,1")).unwrap(), &rf(&[-1], &[1, 0, -1, -5]));
        assert_eq!(tables[2].get(&part("1,1,1")).unwrap(), &rf(&[2, 5, 1], &[1, 0, -1, -3, -5]));
    }

    #[test]
    fn representatives_have_their_class() {
        for k in 1..=6 {
            let t = fixed_perms(k).t;
            for lambda in Partition::all(k) {
                for sigma in layouts(&lambda) {
                    assert_eq!(sk_cycle_type(&sigma), lambda);
                    assert_eq!(regular_rep(&sigma).commutator(&t).unwrap().half_type().unwrap(), lambda);
                }
            }
        }
    }

    #[test]
    fn assembly_residuals_vanish() {
        for ensemble in [Ensemble::Cue, Ensemble::Coe] {
            let tables = tables_up_to(ensemble, 5).unwrap();
            for (i, t) in tables.iter().enumerate() {
                let lower = if i == 0 { None } else { Some(&tables[i - 1]) };
                for (lambda, r) in representative_residuals(t, lower).unwrap() {
                    assert!(r.is_zero(), "{ensemble} k={} {lambda}: {r}", t.k);
                }
            }
        }
    }

    #[test]
    fn coe_relation_on_all_of_s2k() {
        let tables = tables_up_to(Ensemble::Coe, 3).unwrap();
        for (i, t) in tables.iter().enumerate() {
            let lower = if i == 0 { None } else { Some(&tables[i - 1]) };
            for w in enumerate_s2k(t.k) {
                assert!(coe_residual(t, lower, &w).unwrap().is_zero(), "k={} {w}", t.k);
            }
        }
    }

    #[test]
    fn cue_relation_on_all_of_sk() {
        let tables = tables_up_to(Ensemble::Cue, 5).unwrap();
        for (i, t) in tables.iter().enumerate() {
            let lower = if i == 0 { None } else { Some(&tables[i - 1]) };
            let k = t.k;
            let mut sigma: Vec<usize> = (0..k).collect();
            loop {
                assert!(cue_residual(t, lower, &sigma).unwrap().is_zero());
                if !next_perm(&mut sigma) {
                    break;
                }
            }
        }
    }

    fn next_perm(a: &mut [usize]) -> bool {
        let n = a.len();
        let Some(i) = (1..n).rev().find(|&i| a[i - 1] < a[i]) else { return false };
        let j = (i..n).rev().find(|&j| a[j] > a[i - 1]).unwrap();
        a.swap(i - 1, j);
        a[i..].reverse();
        true
    }

    #[test]
    fn wg_lookups() {
        let t = coe_table(2).unwrap();
        assert_eq!(t.wg_of_perm(&Permutation::identity(2)).unwrap(), t.get(&part("1,1")).unwrap());
        let w = Permutation::parse_cycles("(1 ~1)", 2).unwrap();
        assert_eq!(t.wg_of_perm(&w).unwrap(), t.get(&part("1,1")).unwrap());
        let w = Permutation::parse_cycles("(1 ~2)", 2).unwrap();
        assert_eq!(t.wg_of_perm(&w).unwrap(), t.get(&part("2")).unwrap());
        assert!(matches!(t.wg_of_perm(&Permutation::identity(3)), Err(WgError::KeyMissing { .. })));
        let c = cue_table(3).unwrap();
        assert_eq!(c.wg_of_sk(&[1, 2, 0]).unwrap(), c.get(&part("3")).unwrap());
    }

    #[test]
    fn leading_orders() {
        let cue = cue_table(3).unwrap();
        let s = cue.asymptotics(&part("3"), 1).unwrap();
        assert_eq!((s.start_power, s.coeffs[0].clone()), (5, BigRational::from_integer(2.into())));
        let coe = coe_table(4).unwrap();
        let c = inverse_power_coeffs(coe.get(&part("1,1,1,1")).unwrap(), 6).unwrap();
        let ints: Vec<BigRational> = [0, 0, 0, 1, -4, 22].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        assert_eq!(c, ints);
    }

    #[test]
    fn cache_roundtrip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = WgCache::new(dir.path());
        let (first, s1) = cache.tables_up_to(Ensemble::Coe, 3).unwrap();
        assert_eq!(s1, CacheStats { hits: 0, misses: 3 });
        let (second, s2) = cache.tables_up_to(Ensemble::Coe, 3).unwrap();
        assert_eq!(s2, CacheStats { hits: 3, misses: 0 });
        assert_eq!(first, second);

        let path = cache.path(Ensemble::Coe, 2);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"ensemble\": \"coe\"") && text.contains("\"1-1\""));
        let mut tampered = second[1].clone();
        tampered.entries.insert(part("2"), RationalFunction::one());
        std::fs::write(&path, serde_json::to_string(&tampered).unwrap()).unwrap();
        let (third, s3) = cache.tables_up_to(Ensemble::Coe, 3).unwrap();
        assert_eq!(s3.misses, 1);
        assert_eq!(third, first);
    }
}
