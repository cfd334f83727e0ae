//! The graph model `G_ω`: a 4-regular multigraph on the `2k` symbols with solid
//! edges from the trace structure and dashed edges from their image under `ω`.
//!
//! Undirected cycles of `G_ω` correspond to pairs of cycles of `[ω,T]`, directed
//! cycles to pairs of cycles of `[ω,Q]`, and `χ_ω = 1` exactly when every directed
//! cycle has as many edges pointing one way as the other.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::partition::{Partition, PartitionCode};
use crate::perm::{bar_slot, plain_slot, pred, succ, Permutation, Symbol};
use crate::twist::is_bijection;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("oracle needs N^k = {needed} index tuples, over the budget of {budget}")]
    Infeasible { needed: u128, budget: u64 },
    #[error("twist is not a permutation of [N] with N = {0}")]
    InvalidTwist(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeStyle {
    Solid,
    Dashed,
}

/// An edge between two slots. Directed edges point from `a` to `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub style: EdgeStyle,
    pub directed: bool,
}

impl Edge {
    /// Undirected edges with endpoints sorted, so equal edges compare equal.
    fn normalized(self) -> Edge {
        if !self.directed && self.a > self.b {
            Edge { a: self.b, b: self.a, ..self }
        } else {
            self
        }
    }
}

#[derive(Clone, Debug)]
pub struct GraphModel {
    k: usize,
    edges: Vec<Edge>,
}

/// Graph equality ignores edge order, as for multigraphs.
impl PartialEq for GraphModel {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.canonical_edges() == other.canonical_edges()
    }
}

impl Eq for GraphModel {}

/// One cycle of the undirected or directed subgraph, as a vertex walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphCycle {
    pub vertices: Vec<Symbol>,
    /// Only meaningful for directed cycles; always true for undirected ones.
    pub balanced: bool,
}

impl GraphCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub undirected_cycles: Vec<GraphCycle>,
    pub directed_cycles: Vec<GraphCycle>,
}

impl CycleReport {
    pub fn chi(&self) -> bool {
        self.directed_cycles.iter().all(|c| c.balanced)
    }

    /// Half of each undirected cycle length, i.e. the half-type of `[ω,T]`.
    pub fn alpha(&self) -> Partition {
        Partition::new(self.undirected_cycles.iter().map(|c| c.len() / 2).collect()).unwrap()
    }

    /// Half of each directed cycle length, i.e. the half-type of `[ω,Q]`.
    pub fn beta(&self) -> Partition {
        Partition::new(self.directed_cycles.iter().map(|c| c.len() / 2).collect()).unwrap()
    }
}

pub fn build_graph(omega: &Permutation) -> GraphModel {
    let k = omega.k();
    let mut edges = Vec::with_capacity(4 * k);
    for b in 0..k {
        edges.push(Edge { a: plain_slot(b), b: bar_slot(b), style: EdgeStyle::Solid, directed: false });
        edges.push(Edge { a: bar_slot(b), b: plain_slot(succ(b, k)), style: EdgeStyle::Solid, directed: true });
        edges.push(Edge {
            a: omega.apply(plain_slot(b)),
            b: omega.apply(bar_slot(b)),
            style: EdgeStyle::Dashed,
            directed: false,
        });
        edges.push(Edge {
            a: omega.apply(bar_slot(b)),
            b: omega.apply(plain_slot(succ(b, k))),
            style: EdgeStyle::Dashed,
            directed: true,
        });
    }
    GraphModel { k, edges }
}

/// Incident edge of one kind at each vertex: (neighbour, +1 outgoing / -1 incoming / 0).
type Incidence = Vec<(usize, i32)>;

impl GraphModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn canonical_edges(&self) -> Vec<Edge> {
        let mut e: Vec<Edge> = self.edges.iter().map(|e| e.normalized()).collect();
        e.sort();
        e
    }

    fn incidence(&self, style: EdgeStyle, directed: bool) -> Incidence {
        let mut inc = vec![(usize::MAX, 0); 2 * self.k];
        for e in self.edges.iter().filter(|e| e.style == style && e.directed == directed) {
            let sign = if directed { 1 } else { 0 };
            assert_eq!(inc[e.a].0, usize::MAX, "vertex with two edges of one kind");
            inc[e.a] = (e.b, sign);
            // A loop cannot occur: both families pair distinct slots.
            assert_eq!(inc[e.b].0, usize::MAX, "vertex with two edges of one kind");
            inc[e.b] = (e.a, -sign);
        }
        inc
    }

    /// Walk the cycles of the solid+dashed subgraph of one directedness, alternating
    /// solid and dashed edges and tallying orientation along the walk direction.
    fn walk(&self, directed: bool) -> Vec<GraphCycle> {
        let solid = self.incidence(EdgeStyle::Solid, directed);
        let dashed = self.incidence(EdgeStyle::Dashed, directed);
        let mut seen = vec![false; 2 * self.k];
        let mut out = Vec::new();
        for start in 0..2 * self.k {
            if seen[start] {
                continue;
            }
            let mut vertices = Vec::new();
            let mut balance = 0;
            let mut v = start;
            loop {
                seen[v] = true;
                vertices.push(Symbol::from_slot(v));
                let (u, s) = solid[v];
                seen[u] = true;
                vertices.push(Symbol::from_slot(u));
                let (w, d) = dashed[u];
                balance += s + d;
                v = w;
                if v == start {
                    break;
                }
            }
            out.push(GraphCycle { vertices, balanced: balance == 0 });
        }
        out
    }

    pub fn cycle_report(&self) -> CycleReport {
        CycleReport { undirected_cycles: self.walk(false), directed_cycles: self.walk(true) }
    }

    /// Graphviz text. Vertices are listed in slot order and edges in canonical order,
    /// so the output is a pure function of the graph.
    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for slot in 0..2 * self.k {
            let _ = writeln!(out, "  \"{}\";", Symbol::from_slot(slot));
        }
        for e in self.canonical_edges() {
            let style = match e.style {
                EdgeStyle::Solid => "solid",
                EdgeStyle::Dashed => "dashed",
            };
            let dir = if e.directed { "" } else { ", dir=none" };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [style={style}{dir}];",
                Symbol::from_slot(e.a),
                Symbol::from_slot(e.b)
            );
        }
        out.push_str("}\n");
        out
    }
}

pub fn cycle_report(omega: &Permutation) -> CycleReport {
    build_graph(omega).cycle_report()
}

/// `χ_ω`, read off the directed cycles of the graph.
pub fn chi(omega: &Permutation) -> bool {
    cycle_report(omega).chi()
}

/// `Φ(ω) = χ · N^m` with `m = ½ℓ[ω,Q]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Phi {
    pub chi: bool,
    pub half_ell_q: usize,
}

impl Phi {
    pub fn render(&self) -> String {
        match (self.chi, self.half_ell_q) {
            (false, _) => "0".into(),
            (true, 0) => "1".into(),
            (true, 1) => "N".into(),
            (true, m) => format!("N^{m}"),
        }
    }

    pub fn eval(&self, n: u64) -> u128 {
        if self.chi {
            (n as u128).pow(self.half_ell_q as u32)
        } else {
            0
        }
    }
}

pub fn phi(omega: &Permutation) -> Phi {
    let report = cycle_report(omega);
    Phi { chi: report.chi(), half_ell_q: report.directed_cycles.len() }
}

/// Per-permutation data needed by the enumeration passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct OmegaStats {
    pub alpha: PartitionCode,
    pub beta: PartitionCode,
    pub chi: bool,
}

/// The same walks as [`GraphModel::cycle_report`], done directly on slot arrays without
/// materializing edges: the solid partner of `v` is `T(v)` or `Q(v)`, the dashed partner
/// of `u` is `ω(T(ω⁻¹u))` or `ω(Q(ω⁻¹u))`.
#[inline]
pub(crate) fn omega_stats(omega: &Permutation) -> OmegaStats {
    let k = omega.k();
    let n = 2 * k;
    let inv = omega.inverse();
    let q = |v: usize| if v % 2 == 1 { plain_slot(succ(v / 2, k)) } else { bar_slot(pred(v / 2, k)) };

    let mut alpha = 0u32;
    let mut seen = 0u32;
    for start in 0..n {
        if seen & (1 << start) != 0 {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        loop {
            let u = v ^ 1;
            seen |= (1 << v) | (1 << u);
            len += 1;
            v = omega.apply(inv.apply(u) ^ 1);
            if v == start {
                break;
            }
        }
        alpha += 1 << (4 * (len - 1));
    }

    let mut beta = 0u32;
    let mut chi = true;
    seen = 0;
    for start in 0..n {
        if seen & (1 << start) != 0 {
            continue;
        }
        let mut len = 0;
        let mut balance = 0i32;
        let mut v = start;
        loop {
            let u = q(v);
            seen |= (1 << v) | (1 << u);
            len += 1;
            // Solid directed edges leave barred vertices; so do dashed edges whose
            // preimage under ω is barred.
            balance += if v % 2 == 1 { 1 } else { -1 };
            let x = inv.apply(u);
            balance += if x % 2 == 1 { 1 } else { -1 };
            v = omega.apply(q(x));
            if v == start {
                break;
            }
        }
        beta += 1 << (4 * (len - 1));
        chi &= balance == 0;
    }
    OmegaStats { alpha: PartitionCode(alpha), beta: PartitionCode(beta), chi }
}

/// Experimental algebraic test for `χ`: every orbit `O` of `[ω,Q]` and its preimage
/// `ω⁻¹(O)` contain the same number of barred symbols. Compared against [`chi`], never
/// used in its place.
pub fn chi_algebraic(omega: &Permutation) -> bool {
    let q = crate::perm::fixed_perms(omega.k()).q;
    let c = omega.commutator_unchecked(&q);
    let inv = omega.inverse();
    c.cycles().iter().all(|orbit| {
        let barred = orbit.iter().filter(|&&z| z % 2 == 1).count();
        let pre_barred = orbit.iter().filter(|&&z| inv.apply(z) % 2 == 1).count();
        barred == pre_barred
    })
}

/// Default bound on the number of index tuples `phi_oracle` will visit.
pub const DEFAULT_ORACLE_BUDGET: u64 = 50_000_000;

/// Count tuples `I ∈ F_N` with `I∘ω ∈ F_N` by brute force.
///
/// `p` is the twist, 0-based. The barred indices of `I` range freely over `[N]^k` and
/// fix the unbarred ones through `i_{b+1} = P(i_b̄)`.
pub fn phi_oracle(omega: &Permutation, p: &[usize], budget: u64) -> Result<u64, GraphError> {
    let n = p.len();
    if n == 0 || !is_bijection(p) {
        return Err(GraphError::InvalidTwist(n));
    }
    let k = omega.k();
    let needed = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(GraphError::Infeasible { needed, budget });
    }
    let mut free = vec![0usize; k];
    let mut tuple = vec![0usize; 2 * k];
    let mut count = 0u64;
    loop {
        for b in 0..k {
            tuple[bar_slot(b)] = free[b];
            tuple[plain_slot(succ(b, k))] = p[free[b]];
        }
        let ok = (0..k).all(|b| p[tuple[omega.apply(bar_slot(b))]] == tuple[omega.apply(plain_slot(succ(b, k)))]);
        count += ok as u64;

        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(count);
            }
            free[pos] += 1;
            if free[pos] < n {
                break;
            }
            free[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{enumerate_s2k, fixed_perms};
    use crate::twist::Twist;

    fn parse(s: &str, k: usize) -> Permutation {
        Permutation::parse_cycles(s, k).unwrap()
    }

    fn lengths(cycles: &[GraphCycle]) -> Vec<usize> {
        let mut v: Vec<usize> = cycles.iter().map(|c| c.len()).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn identity_graph_is_all_two_cycles() {
        let g = build_graph(&Permutation::identity(3));
        assert_eq!(g.edges().len(), 12);
        let r = g.cycle_report();
        assert_eq!(lengths(&r.undirected_cycles), vec![2, 2, 2]);
        assert_eq!(lengths(&r.directed_cycles), vec![2, 2, 2]);
        assert!(r.chi());
    }

    #[test]
    fn shift_has_k_balanced_two_cycles() {
        for k in 1..=6 {
            let r = cycle_report(&fixed_perms(k).s);
            assert_eq!(r.undirected_cycles.len(), k);
            assert_eq!(r.directed_cycles.len(), k);
            assert!(r.directed_cycles.iter().all(|c| c.len() == 2 && c.balanced));
        }
    }

    #[test]
    fn unbalanced_example() {
        let w = parse("(2 ~3)(~2 3)(4 ~5)(~4 5)", 6);
        let r = cycle_report(&w);
        let bad: Vec<Vec<Symbol>> = r
            .directed_cycles
            .iter()
            .filter(|c| !c.balanced)
            .map(|c| {
                let mut v = c.vertices.clone();
                v.sort();
                v
            })
            .collect();
        assert_eq!(bad, vec![vec![Symbol::bar(2), Symbol::plain(3)], vec![Symbol::bar(4), Symbol::plain(5)]]);
        assert!(!chi(&w));
        assert_eq!(phi(&w).render(), "0");
        assert!(!chi_algebraic(&w));
    }

    #[test]
    fn transposition_one_bar() {
        let w = parse("(1 ~1)", 3);
        let r = cycle_report(&w);
        assert_eq!(lengths(&r.undirected_cycles), vec![2, 2, 2]);
        assert_eq!(lengths(&r.directed_cycles), vec![2, 4]);
        assert!(r.chi());
        assert_eq!(phi(&w), Phi { chi: true, half_ell_q: 2 });
        assert!(chi_algebraic(&w));
        let p = Twist::Grand.permutation(7).unwrap();
        assert_eq!(phi_oracle(&w, &p, DEFAULT_ORACLE_BUDGET).unwrap(), 49);
    }

    #[test]
    fn six_cycle_example() {
        let w = parse("(2 4)(3 5)(~2 ~4)(~3 ~5)", 6);
        let r = cycle_report(&w);
        assert!(r.directed_cycles.iter().any(|c| c.len() == 6));
        assert_eq!(r.beta(), "3,1,1,1".parse().unwrap());
        assert!(r.alpha().is_ones());
    }

    #[test]
    fn fast_stats_match_graph_and_commutators() {
        for k in 1..=3 {
            let f = fixed_perms(k);
            for w in enumerate_s2k(k) {
                let r = cycle_report(&w);
                let st = omega_stats(&w);
                assert_eq!(st.chi, r.chi());
                assert_eq!(Partition::from_code(st.alpha), r.alpha());
                assert_eq!(Partition::from_code(st.beta), r.beta());
                assert_eq!(r.alpha(), w.commutator(&f.t).unwrap().half_type().unwrap());
                assert_eq!(r.beta(), w.commutator(&f.q).unwrap().half_type().unwrap());
            }
        }
    }

    #[test]
    fn oracle_simple_values() {
        let grand5 = Twist::Grand.permutation(5).unwrap();
        assert_eq!(phi_oracle(&Permutation::identity(2), &grand5, 1000).unwrap(), 25);
        let w = parse("(1 ~2)", 2);
        assert_eq!(phi_oracle(&w, &grand5, 1000).unwrap() as u128, phi(&w).eval(5));
        assert!(matches!(phi_oracle(&w, &grand5, 10), Err(GraphError::Infeasible { .. })));
        assert_eq!(phi_oracle(&w, &[0, 0], 10), Err(GraphError::InvalidTwist(2)));
    }

    #[test]
    fn dot_export() {
        let dot = build_graph(&Permutation::identity(2)).export_dot();
        assert_eq!(dot.matches("->").count(), 8);
        assert_eq!(dot.matches("dir=none").count(), 4);
        let w = parse("(1 ~4)", 6);
        assert_eq!(build_graph(&w).export_dot(), build_graph(&w).export_dot());
        assert!(build_graph(&w).export_dot().contains("\"~6\" -> \"~4\" [style=dashed]"));
    }

    #[test]
    fn degree_four_everywhere() {
        for w in enumerate_s2k(2) {
            let g = build_graph(&w);
            let mut deg = [0; 4];
            for e in g.edges() {
                deg[e.a] += 1;
                deg[e.b] += 1;
            }
            assert_eq!(deg, [4; 4]);
        }
    }
}
