//! Permutations of the ordered symbol set `1, 1̄, 2, 2̄, …, k, k̄`.
//!
//! Symbols are stored as slots: unbarred `b` is slot `2(b-1)`, barred `b̄` is slot
//! `2(b-1)+1`. With this interleaving `T` swaps adjacent slots (`slot ^ 1`).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::partition::Partition;

/// Largest supported `k`; permutations act on at most `2 * MAX_K` slots.
pub const MAX_K: usize = 8;
const MAX_SLOTS: usize = 2 * MAX_K;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("permutations act on different symbol sets (k = {0} vs k = {1})")]
    DimensionMismatch(usize, usize),
    #[error("k = {0} outside the supported range 1..={MAX_K}")]
    UnsupportedK(usize),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("symbol {symbol} out of range for k = {k}")]
    OutOfRange { symbol: String, k: usize },
    #[error("image array is not a bijection of 0..{0}")]
    NotBijection(usize),
    #[error("cycle length {length} occurs {count} times; half-type needs even multiplicities")]
    OddMultiplicity { length: usize, count: usize },
}

/// One of the `2k` symbols: `value` in `1..=k`, optionally barred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub value: usize,
    pub barred: bool,
}

impl Symbol {
    pub fn plain(value: usize) -> Self {
        Symbol { value, barred: false }
    }

    pub fn bar(value: usize) -> Self {
        Symbol { value, barred: true }
    }

    pub fn slot(self) -> usize {
        2 * (self.value - 1) + self.barred as usize
    }

    pub fn from_slot(slot: usize) -> Self {
        Symbol { value: slot / 2 + 1, barred: slot % 2 == 1 }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "~{}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Successor of a 0-based symbol index modulo `k`: the single home of the
/// "b+1 taken mod k" convention.
#[inline]
pub fn succ(index: usize, k: usize) -> usize {
    if index + 1 == k {
        0
    } else {
        index + 1
    }
}

#[inline]
pub fn pred(index: usize, k: usize) -> usize {
    if index == 0 {
        k - 1
    } else {
        index - 1
    }
}

#[inline]
pub fn plain_slot(index: usize) -> usize {
    2 * index
}

#[inline]
pub fn bar_slot(index: usize) -> usize {
    2 * index + 1
}

/// A bijection of the `2k` slots. `images[slot]` is the slot it maps to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    k: u8,
    images: [u8; MAX_SLOTS],
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        assert!((1..=MAX_K).contains(&k), "k = {k} unsupported");
        let mut images = [0u8; MAX_SLOTS];
        for (i, x) in images.iter_mut().enumerate() {
            *x = i as u8;
        }
        Permutation { k: k as u8, images }
    }

    pub fn from_images(k: usize, images: &[usize]) -> Result<Self, PermError> {
        if !(1..=MAX_K).contains(&k) {
            return Err(PermError::UnsupportedK(k));
        }
        let n = 2 * k;
        if images.len() != n {
            return Err(PermError::NotBijection(n));
        }
        let mut seen = 0u32;
        let mut out = Self::identity(k);
        for (i, &x) in images.iter().enumerate() {
            if x >= n || seen & (1 << x) != 0 {
                return Err(PermError::NotBijection(n));
            }
            seen |= 1 << x;
            out.images[i] = x as u8;
        }
        Ok(out)
    }

    /// Build from disjoint cycles of symbols; unlisted symbols are fixed.
    pub fn from_cycles(k: usize, cycles: &[Vec<Symbol>]) -> Result<Self, PermError> {
        let mut out = Self::identity(k);
        let mut seen = 0u32;
        for cycle in cycles {
            for (i, s) in cycle.iter().enumerate() {
                if s.value == 0 || s.value > k {
                    return Err(PermError::OutOfRange { symbol: s.to_string(), k });
                }
                if seen & (1 << s.slot()) != 0 {
                    return Err(PermError::Parse { pos: 0, msg: format!("symbol {s} repeated") });
                }
                seen |= 1 << s.slot();
                out.images[s.slot()] = cycle[(i + 1) % cycle.len()].slot() as u8;
            }
        }
        Ok(out)
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn slots(&self) -> usize {
        2 * self.k as usize
    }

    #[inline]
    pub fn apply(&self, slot: usize) -> usize {
        self.images[slot] as usize
    }

    pub fn apply_symbol(&self, s: Symbol) -> Symbol {
        Symbol::from_slot(self.apply(s.slot()))
    }

    pub fn images(&self) -> &[u8] {
        &self.images[..self.slots()]
    }

    pub fn is_identity(&self) -> bool {
        self.images().iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Every unbarred symbol maps to an unbarred symbol.
    pub fn is_regular(&self) -> bool {
        (0..self.k()).all(|b| self.images[plain_slot(b)] % 2 == 0)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.k != other.k {
            return Err(PermError::DimensionMismatch(self.k(), other.k()));
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        let mut out = *self;
        for i in 0..self.slots() {
            out.images[i] = self.images[other.images[i] as usize];
        }
        out
    }

    pub fn inverse(&self) -> Permutation {
        let mut out = *self;
        for i in 0..self.slots() {
            out.images[self.images[i] as usize] = i as u8;
        }
        out
    }

    /// Integer power, negative exponents allowed.
    pub fn pow(&self, exp: i64) -> Permutation {
        let base = if exp < 0 { self.inverse() } else { *self };
        let mut acc = Self::identity(self.k());
        for _ in 0..exp.unsigned_abs() {
            acc = acc.compose_unchecked(&base);
        }
        acc
    }

    /// `self · g · self⁻¹ · g⁻¹`.
    pub fn commutator(&self, g: &Permutation) -> Result<Permutation, PermError> {
        if self.k != g.k {
            return Err(PermError::DimensionMismatch(self.k(), g.k()));
        }
        Ok(self.commutator_unchecked(g))
    }

    #[inline]
    pub(crate) fn commutator_unchecked(&self, g: &Permutation) -> Permutation {
        self.compose_unchecked(g).compose_unchecked(&self.inverse()).compose_unchecked(&g.inverse())
    }

    /// Disjoint cycles (fixed points included), each starting at its smallest slot,
    /// ordered by that slot.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = 0u32;
        let mut out = Vec::new();
        for start in 0..self.slots() {
            if seen & (1 << start) != 0 {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while seen & (1 << x) == 0 {
                seen |= 1 << x;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Multiplicity of each cycle length, indexed by length (index 0 unused).
    #[inline]
    pub(crate) fn cycle_length_counts(&self) -> [u8; MAX_SLOTS + 1] {
        let mut counts = [0u8; MAX_SLOTS + 1];
        let mut seen = 0u32;
        for start in 0..self.slots() {
            if seen & (1 << start) != 0 {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while seen & (1 << x) == 0 {
                seen |= 1 << x;
                len += 1;
                x = self.images[x] as usize;
            }
            counts[len] += 1;
        }
        counts
    }

    pub fn num_cycles(&self) -> usize {
        self.cycle_length_counts().iter().map(|&c| c as usize).sum()
    }

    pub fn cycle_type(&self) -> CycleType {
        let counts = self.cycle_length_counts();
        CycleType {
            multiplicities: counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(len, &c)| (len, c as usize))
                .collect(),
        }
    }

    /// Halve each cycle-length multiplicity, giving a partition of `k`.
    pub fn half_type(&self) -> Result<Partition, PermError> {
        self.cycle_type().half()
    }

    /// Cycle notation with `~` for bars and fixed points omitted; identity is `()`.
    pub fn render_cycles(&self) -> String {
        let mut out = String::new();
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            let syms: Vec<String> = cycle.iter().map(|&s| Symbol::from_slot(s).to_string()).collect();
            out.push('(');
            out.push_str(&syms.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    /// Parse cycle notation such as `(2 4)(3 5)(~2 ~4)(~3 ~5)`.
    pub fn parse_cycles(text: &str, k: usize) -> Result<Self, PermError> {
        if !(1..=MAX_K).contains(&k) {
            return Err(PermError::UnsupportedK(k));
        }
        let bytes = text.as_bytes();
        let mut pos = 0;
        let mut cycles: Vec<Vec<Symbol>> = Vec::new();
        let mut seen = 0u32;
        let err = |pos: usize, msg: &str| PermError::Parse { pos, msg: msg.to_string() };
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        while pos < bytes.len() {
            if bytes[pos] != b'(' {
                return Err(err(pos, "expected '('"));
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                skip_ws(&mut pos);
                if pos >= bytes.len() {
                    return Err(err(pos, "unterminated cycle, expected ')'"));
                }
                if bytes[pos] == b')' {
                    pos += 1;
                    break;
                }
                let start = pos;
                let barred = bytes[pos] == b'~';
                if barred {
                    pos += 1;
                }
                let digits_start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if digits_start == pos {
                    return Err(err(pos, "expected a symbol (digits, optionally prefixed by '~')"));
                }
                let value: usize = text[digits_start..pos].parse().map_err(|_| err(digits_start, "symbol value too large"))?;
                let sym = Symbol { value, barred };
                if value == 0 || value > k {
                    return Err(PermError::OutOfRange { symbol: sym.to_string(), k });
                }
                if seen & (1 << sym.slot()) != 0 {
                    return Err(err(start, &format!("symbol {sym} appears twice")));
                }
                seen |= 1 << sym.slot();
                cycle.push(sym);
            }
            cycles.push(cycle);
            skip_ws(&mut pos);
        }
        Self::from_cycles(k, &cycles)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_cycles())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[k={}]{}", self.k, self.render_cycles())
    }
}

/// JSON form: the 0-based image array of length `2k`.
impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.images().iter())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.len() % 2 != 0 {
            return Err(serde::de::Error::custom("image array must have even length 2k"));
        }
        Permutation::from_images(v.len() / 2, &v).map_err(serde::de::Error::custom)
    }
}

/// Number of cycles of each length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleType {
    pub multiplicities: BTreeMap<usize, usize>,
}

impl CycleType {
    pub fn total(&self) -> usize {
        self.multiplicities.iter().map(|(l, c)| l * c).sum()
    }

    pub fn num_cycles(&self) -> usize {
        self.multiplicities.values().sum()
    }

    pub fn half(&self) -> Result<Partition, PermError> {
        let mut parts = Vec::new();
        for (&length, &count) in &self.multiplicities {
            if count % 2 != 0 {
                return Err(PermError::OddMultiplicity { length, count });
            }
            parts.extend(std::iter::repeat_n(length, count / 2));
        }
        Ok(Partition::new(parts).expect("cycle lengths are positive"))
    }
}

/// The fixed permutations of the trace structure.
#[derive(Clone, Copy, Debug)]
pub struct FixedPerms {
    /// `(1 1̄)(2 2̄)…(k k̄)`.
    pub t: Permutation,
    /// `(1 k̄)(2 1̄)(3 2̄)…(k (k-1)bar)`.
    pub q: Permutation,
    /// `(1 2 … k)(1̄ 2̄ … k̄)`.
    pub s: Permutation,
}

pub fn fixed_perms(k: usize) -> FixedPerms {
    let mut t = Permutation::identity(k);
    let mut q = Permutation::identity(k);
    let mut s = Permutation::identity(k);
    for b in 0..k {
        t.images[plain_slot(b)] = bar_slot(b) as u8;
        t.images[bar_slot(b)] = plain_slot(b) as u8;
        // Q pairs b with (b-1)bar, i.e. b̄ with b+1.
        let partner = bar_slot(pred(b, k));
        q.images[plain_slot(b)] = partner as u8;
        q.images[partner] = plain_slot(b) as u8;
        s.images[plain_slot(b)] = plain_slot(succ(b, k)) as u8;
        s.images[bar_slot(b)] = bar_slot(succ(b, k)) as u8;
    }
    FixedPerms { t, q, s }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of permutations in `S_2k`.
pub fn s2k_order(k: usize) -> u64 {
    factorial(2 * k)
}

/// The permutation at lexicographic rank `rank` (0-based) among all image arrays of `S_2k`.
pub fn unrank(k: usize, mut rank: u64) -> Permutation {
    let n = 2 * k;
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut out = Permutation::identity(k);
    for i in 0..n {
        let f = factorial(n - 1 - i);
        let idx = (rank / f) as usize;
        rank %= f;
        out.images[i] = pool.remove(idx);
    }
    out
}

/// Lexicographic walk over a contiguous rank range of `S_2k`.
pub struct LexPermutations {
    current: Permutation,
    remaining: u64,
}

impl LexPermutations {
    pub fn range(k: usize, start: u64, len: u64) -> Self {
        let total = s2k_order(k);
        let start = start.min(total);
        LexPermutations { current: unrank(k, start.min(total.saturating_sub(1))), remaining: len.min(total - start) }
    }
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.current;
        if self.remaining > 0 {
            next_lex(&mut self.current.images[..2 * self.current.k as usize]);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

fn next_lex(a: &mut [u8]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Every element of `S_2k` exactly once, in lexicographic order of the image array.
pub fn enumerate_s2k(k: usize) -> LexPermutations {
    LexPermutations::range(k, 0, s2k_order(k))
}

/// Split `S_2k` into contiguous lexicographic chunks of (at most) `chunk_len` ranks.
pub fn s2k_chunks(k: usize, chunk_len: u64) -> Vec<(u64, u64)> {
    let total = s2k_order(k);
    let chunk_len = chunk_len.max(1);
    (0..total.div_ceil(chunk_len)).map(|i| (i * chunk_len, chunk_len.min(total - i * chunk_len))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, k: usize) -> Permutation {
        Permutation::parse_cycles(s, k).unwrap()
    }

    #[test]
    fn fixed_k3() {
        let f = fixed_perms(3);
        assert_eq!(f.q, parse("(1 ~3)(2 ~1)(3 ~2)", 3));
        assert_eq!(f.t, parse("(1 ~1)(2 ~2)(3 ~3)", 3));
    }

    #[test]
    fn fixed_k1_and_k2() {
        let f = fixed_perms(1);
        assert_eq!(f.t, parse("(1 ~1)", 1));
        assert!(f.s.is_identity());
        assert_eq!(fixed_perms(2).s, parse("(1 2)(~1 ~2)", 2));
    }

    #[test]
    fn fixed_perm_orders() {
        for k in 1..=MAX_K {
            let f = fixed_perms(k);
            let id = Permutation::identity(k);
            assert_eq!(f.t.compose(&f.t).unwrap(), id);
            assert_eq!(f.q.compose(&f.q).unwrap(), id);
            assert_eq!(f.s.pow(k as i64), id);
            for n in 1..k {
                assert_ne!(f.s.pow(n as i64), id);
            }
        }
    }

    #[test]
    fn group_basics() {
        let f = fixed_perms(4);
        assert_eq!(f.s.inverse(), f.s.pow(3));
        assert!(f.q.compose(&f.q.inverse()).unwrap().is_identity());
        assert_eq!(f.q.compose(&fixed_perms(3).q), Err(PermError::DimensionMismatch(4, 3)));
    }

    #[test]
    fn commutators_of_transposition() {
        let f = fixed_perms(3);
        let w = parse("(1 ~1)", 3);
        assert!(w.commutator(&f.t).unwrap().is_identity());
        let c = w.commutator(&f.q).unwrap();
        assert_eq!(c, parse("(1 ~1)(2 ~3)", 3));
        assert_eq!(c.cycle_type().multiplicities, BTreeMap::from([(1, 2), (2, 2)]));
        assert_eq!(c.half_type().unwrap(), "2,1".parse().unwrap());
        assert_eq!(c.num_cycles(), 4);
    }

    #[test]
    fn half_types() {
        assert_eq!(Permutation::identity(4).half_type().unwrap(), Partition::ones(4));
        let f = fixed_perms(6);
        let w = parse("(1 ~4)", 6);
        assert_eq!(w.commutator(&f.t).unwrap().half_type().unwrap(), "2,1,1,1,1".parse().unwrap());
        assert!(matches!(parse("(1 2)", 2).half_type(), Err(PermError::OddMultiplicity { .. })));
    }

    #[test]
    fn shift_powers_have_full_half_counts() {
        for k in 1..=6 {
            let f = fixed_perms(k);
            for n in 0..k as i64 {
                let w = f.s.pow(n);
                assert_eq!(w.commutator(&f.t).unwrap().num_cycles(), 2 * k);
                assert_eq!(w.commutator(&f.q).unwrap().num_cycles(), 2 * k);
            }
        }
    }

    #[test]
    fn parse_examples() {
        let w = parse("(1 ~1)", 3);
        assert_eq!(w.apply(0), 1);
        assert_eq!(w.apply(1), 0);
        let fig = parse("(2 4)(3 5)(~2 ~4)(~3 ~5)", 6);
        assert_eq!(fig.apply_symbol(Symbol::bar(2)), Symbol::bar(4));
        assert_eq!(fig.render_cycles(), "(2 4)(~2 ~4)(3 5)(~3 ~5)");
        assert_eq!(Permutation::parse_cycles(&fig.render_cycles(), 6).unwrap(), fig);
        assert!(matches!(Permutation::parse_cycles("(1 7)", 3), Err(PermError::OutOfRange { .. })));
        assert!(matches!(Permutation::parse_cycles("(1", 2), Err(PermError::Parse { pos: 2, .. })));
        assert!(matches!(Permutation::parse_cycles("(1 1)", 2), Err(PermError::Parse { .. })));
        assert!(matches!(Permutation::parse_cycles("1 2", 2), Err(PermError::Parse { pos: 0, .. })));
        assert!(parse("()", 2).is_identity());
        assert!(parse("", 2).is_identity());
        assert_eq!(Permutation::identity(2).render_cycles(), "()");
    }

    #[test]
    fn json_images() {
        let w = parse("(1 ~2)", 2);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, "[3,1,2,0]");
        assert_eq!(serde_json::from_str::<Permutation>(&s).unwrap(), w);
        assert!(serde_json::from_str::<Permutation>("[0,0]").is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_s2k(1).count(), 2);
        assert_eq!(enumerate_s2k(2).count(), 24);
        assert_eq!(s2k_order(5), 3_628_800);
        let all: Vec<_> = enumerate_s2k(3).collect();
        assert_eq!(all.len(), 720);
        assert!(all.windows(2).all(|w| w[0].images() < w[1].images()));
    }

    #[test]
    fn chunks_tile_the_stream() {
        let whole: Vec<_> = enumerate_s2k(3).collect();
        let chunked: Vec<_> =
            s2k_chunks(3, 97).into_iter().flat_map(|(start, len)| LexPermutations::range(3, start, len)).collect();
        assert_eq!(whole, chunked);
        for (rank, w) in whole.iter().enumerate() {
            assert_eq!(unrank(3, rank as u64), *w);
        }
    }
}
