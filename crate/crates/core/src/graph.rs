//! Simple graphs on `0..n` with bitset adjacency, the `G(n,p)` sampler and
//! the combinatorial helpers used by the closure bootstrap: greedy matchings
//! between vertex sets, degree peeling and simplicial vertices.
//!
//! Ties are always broken towards the lowest vertex index (or the
//! lexicographically smallest edge), so every routine is replayable.

use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Below this edge probability the sampler skips geometrically over absent pairs.
pub const GEOMETRIC_CUTOFF: f64 = 0.1;

/// A subset of `0..n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { bits: FixedBitSet::with_capacity(n) }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet { bits }
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(n: usize, vertices: I) -> Result<Self> {
        let mut set = VertexSet::empty(n);
        for v in vertices {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            set.bits.insert(v);
        }
        Ok(set)
    }

    /// Size of the universe `0..n`.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    /// Panics when `v` is outside the universe.
    pub fn insert(&mut self, v: usize) {
        self.bits.insert(v);
    }

    pub fn remove(&mut self, v: usize) {
        self.bits.set(v, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        VertexSet { bits }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn as_bitset(&self) -> &FixedBitSet {
        &self.bits
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for v in self.iter() {
            seq.serialize_element(&v)?;
        }
        seq.end()
    }
}

/// A nonnegative rational threshold `num / den`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("rational with zero denominator".into()));
        }
        Ok(Rational { num, den })
    }

    pub const fn integer(k: u64) -> Self {
        Rational { num: k, den: 1 }
    }

    /// `k < num / den`, compared exactly.
    pub fn exceeds(&self, k: usize) -> bool {
        (k as u128) * (self.den as u128) < self.num as u128
    }
}

/// An immutable simple undirected graph on `0..n`.
///
/// `edges` is sorted lexicographically with `u < v` in every pair and the
/// adjacency bitsets are kept consistent with it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<FixedBitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_sorted_unique(n, edges)
    }

    /// `K_n` without the edge `(0, 1)`.
    pub fn complete_minus_edge(n: usize) -> Self {
        let mut g = Self::complete(n);
        if n >= 2 {
            g.edges.remove(0);
            g.adj[0].set(1, false);
            g.adj[1].set(0, false);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_unique(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Builds a graph from unordered pairs; rejects loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    /// `edges` must already be sorted, unique and normalized.
    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for &(u, v) in &edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Graph { n, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn adjacency(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    /// Minimum degree; zero for graphs with an isolated vertex and for `n <= 1`.
    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Keeps the vertex labels and drops every edge leaving `set`.
    pub fn restrict(&self, set: &VertexSet) -> Graph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| set.contains(u) && set.contains(v))
            .collect();
        Self::from_sorted_unique(self.n, edges)
    }

    /// Whether `set` induces a complete subgraph.
    pub fn is_clique(&self, set: &VertexSet) -> bool {
        let k = set.len();
        set.iter().all(|v| self.adj[v].intersection_count(&set.bits) == k - 1)
    }

    /// Component label of every vertex; labels are the lowest vertex of each component.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for w in self.adj[u].ones() {
                    if label[w] == usize::MAX {
                        label[w] = s;
                        stack.push(w);
                    }
                }
            }
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    pub fn component_count(&self) -> usize {
        self.components().iter().enumerate().filter(|&(v, &c)| v == c).count()
    }
}

/// Samples `G(n, p)`: every pair `u < v` is present independently with probability `p`.
///
/// Pairs are visited in lexicographic order. For `p < 0.1` absent pairs are
/// skipped with geometric jumps, otherwise one Bernoulli draw is made per
/// pair. Both modes produce the same distribution; the mode is fixed by `p`,
/// so the output is a pure function of `(n, p, rng seed)`.
pub fn gnp_sample(n: usize, p: f64, rng: &mut RngStream) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Domain("G(n,p) needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Probability(p));
    }
    let mut edges = Vec::new();
    if p == 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    if p < GEOMETRIC_CUTOFF {
        let log_q = libm::log1p(-p);
        let (mut u, mut v) = (0usize, 0usize);
        loop {
            // 1 - U lies in (0, 1]
            let r = 1.0 - rng.next_f64();
            let skip = libm::floor(libm::log(r) / log_q);
            if !(skip < (n * n) as f64) {
                break;
            }
            v += skip as usize + 1;
            while v >= n {
                let overflow = v - n;
                u += 1;
                if u + 1 >= n {
                    return Ok(Graph::from_sorted_unique(n, edges));
                }
                v = u + 1 + overflow;
            }
            edges.push((u, v));
        }
    } else {
        for u in 0..n {
            for v in u + 1..n {
                if rng.next_f64() < p {
                    edges.push((u, v));
                }
            }
        }
    }
    Ok(Graph::from_sorted_unique(n, edges))
}

/// Greedy matching between disjoint sets `a` and `b`: scans edges in
/// lexicographic order and keeps every `a`-`b` edge whose endpoints are both
/// still free. The result is maximal.
pub fn greedy_matching(g: &Graph, a: &VertexSet, b: &VertexSet) -> Result<Vec<(usize, usize)>> {
    if !a.is_disjoint(b) {
        return Err(Error::OverlappingSets);
    }
    let mut used = FixedBitSet::with_capacity(g.n());
    let mut matching = Vec::new();
    for &(u, v) in g.edges() {
        let crosses = (a.contains(u) && b.contains(v)) || (b.contains(u) && a.contains(v));
        if crosses && !used.contains(u) && !used.contains(v) {
            used.insert(u);
            used.insert(v);
            matching.push((u, v));
        }
    }
    Ok(matching)
}

/// Repeatedly deletes a vertex of `set` whose degree inside the surviving set
/// is below `threshold`; returns the survivors (possibly empty).
///
/// The survivor set is the largest subset of `set` with internal minimum
/// degree at least `threshold`, so it does not depend on deletion order.
pub fn peel_within(g: &Graph, set: &VertexSet, threshold: Rational) -> VertexSet {
    let mut alive = set.clone();
    let mut deg = vec![0usize; g.n()];
    let mut stack = Vec::new();
    for v in set.iter() {
        deg[v] = g.adjacency(v).intersection_count(alive.as_bitset());
        if threshold.exceeds(deg[v]) {
            stack.push(v);
        }
    }
    // lowest index first
    stack.reverse();
    while let Some(v) = stack.pop() {
        if !alive.contains(v) {
            continue;
        }
        alive.remove(v);
        for w in g.neighbors(v) {
            if alive.contains(w) {
                let was_low = threshold.exceeds(deg[w]);
                deg[w] -= 1;
                if !was_low && threshold.exceeds(deg[w]) {
                    stack.push(w);
                }
            }
        }
    }
    alive
}

/// [`peel_within`] over all vertices.
pub fn peel_to_min_degree(g: &Graph, threshold: Rational) -> VertexSet {
    peel_within(g, &VertexSet::full(g.n()), threshold)
}

/// Whether the neighbours of `v` inside `set` form a clique.
pub fn is_simplicial_within(g: &Graph, v: usize, set: &VertexSet) -> bool {
    let mut nbhd = g.adjacency(v).clone();
    nbhd.intersect_with(set.as_bitset());
    let k = nbhd.count_ones(..);
    nbhd.ones().all(|u| g.adjacency(u).intersection_count(&nbhd) == k - 1)
}

/// Lowest-index vertex whose neighbourhood induces a clique.
pub fn simplicial_vertex(g: &Graph) -> Option<usize> {
    let all = VertexSet::full(g.n());
    (0..g.n()).find(|&v| is_simplicial_within(g, v, &all))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (0, v))).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        );
        let g = Graph::from_edges(4, [(3, 1), (0, 2), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 3)]);
        for v in 0..4 {
            assert_eq!(g.degree(v), g.neighbors(v).count());
            for u in g.neighbors(v) {
                assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn gnp_extremes() {
        let mut rng = RngStream::new(1);
        assert_eq!(gnp_sample(5, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(gnp_sample(5, 1.0, &mut rng).unwrap(), Graph::complete(5));
        assert_eq!(gnp_sample(1, 0.5, &mut rng).unwrap().edge_count(), 0);
        assert!(matches!(gnp_sample(5, 1.5, &mut rng), Err(Error::Probability(_))));
        assert!(gnp_sample(5, f64::NAN, &mut rng).is_err());
        assert!(gnp_sample(0, 0.5, &mut rng).is_err());
    }

    #[test]
    fn gnp_is_deterministic_in_both_modes() {
        for p in [0.02, 0.3] {
            let a = gnp_sample(60, p, &mut RngStream::new(77)).unwrap();
            let b = gnp_sample(60, p, &mut RngStream::new(77)).unwrap();
            assert_eq!(a, b);
            let c = gnp_sample(60, p, &mut RngStream::new(78)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn gnp_mean_edge_count() {
        // |E| ~ Bin(499500, 0.01): mean 4995, sd ~ 70.3; the mean over 200
        // samples has sd ~ 4.97
        let (n, p, trials) = (1000usize, 0.01, 200);
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = pairs * p;
        let sd_of_mean = libm::sqrt(pairs * p * (1.0 - p) / trials as f64);
        let total: usize = (0..trials)
            .map(|s| gnp_sample(n, p, &mut RngStream::new(s)).unwrap().edge_count())
            .sum();
        let observed = total as f64 / trials as f64;
        assert!((observed - mean).abs() < 3.0 * sd_of_mean, "{observed} vs {mean}");
    }

    #[test]
    fn gnp_dense_mode_mean() {
        let (n, p, trials) = (100usize, 0.3, 200);
        let pairs = (n * (n - 1) / 2) as f64;
        let sd_of_mean = libm::sqrt(pairs * p * (1.0 - p) / trials as f64);
        let total: usize = (0..trials)
            .map(|s| gnp_sample(n, p, &mut RngStream::new(s)).unwrap().edge_count())
            .sum();
        assert!((total as f64 / trials as f64 - pairs * p).abs() < 3.0 * sd_of_mean);
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(Graph::complete(6).min_degree(), 5);
        assert_eq!(Graph::empty(4).min_degree(), 0);
        assert_eq!(Graph::path(5).min_degree(), 1);
        assert_eq!(Graph::empty(1).min_degree(), 0);
    }

    #[test]
    fn matching_examples() {
        let a = VertexSet::from_vertices(4, [0, 1]).unwrap();
        let b = VertexSet::from_vertices(4, [2, 3]).unwrap();
        let g = Graph::from_edges(4, [(0, 2), (1, 3)]).unwrap();
        assert_eq!(greedy_matching(&g, &a, &b).unwrap(), vec![(0, 2), (1, 3)]);
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(greedy_matching(&g, &a, &b).unwrap().is_empty());
        assert_eq!(greedy_matching(&g, &a, &a), Err(Error::OverlappingSets));

        let k = 7;
        let edges = (0..k).flat_map(|u| (k..2 * k).map(move |v| (u, v)));
        let g = Graph::from_edges(2 * k, edges).unwrap();
        let a = VertexSet::from_vertices(2 * k, 0..k).unwrap();
        let m = greedy_matching(&g, &a, &a.complement()).unwrap();
        assert_eq!(m.len(), k);
    }

    #[test]
    fn matching_in_random_graphs_is_large() {
        // disjoint sets of size 0.1n; the greedy matching has at least 0.05n edges
        let n = 500;
        let delta_n = 50;
        for seed in 0..100 {
            let g = gnp_sample(n, 0.05, &mut RngStream::new(seed)).unwrap();
            let a = VertexSet::from_vertices(n, 0..delta_n).unwrap();
            let b = VertexSet::from_vertices(n, 250..250 + delta_n).unwrap();
            let m = greedy_matching(&g, &a, &b).unwrap();
            assert!(m.len() >= delta_n / 2, "seed {seed}: {}", m.len());
            let mut seen = VertexSet::empty(n);
            for (u, v) in m {
                assert!(!seen.contains(u) && !seen.contains(v));
                seen.insert(u);
                seen.insert(v);
                assert!(a.contains(u) != a.contains(v));
            }
        }
    }

    #[test]
    fn peel_examples() {
        assert_eq!(peel_to_min_degree(&Graph::complete(5), Rational::integer(4)).len(), 5);
        assert!(peel_to_min_degree(&star(6), Rational::integer(2)).is_empty());
        assert_eq!(peel_to_min_degree(&star(6), Rational::integer(0)).len(), 6);
    }

    #[test]
    fn peel_keeps_dense_core() {
        // a-vertex b-edge graphs keep a nonempty core of min degree >= b/(4a)
        for seed in 0..50u64 {
            let mut rng = RngStream::new(seed);
            let n = 5 + (seed as usize % 40);
            let p = 0.05 + 0.9 * rng.next_f64();
            let g = gnp_sample(n, p, &mut rng).unwrap();
            if g.edge_count() == 0 {
                continue;
            }
            let t = Rational::new(g.edge_count() as u64, 4 * n as u64).unwrap();
            let core = peel_to_min_degree(&g, t);
            assert!(!core.is_empty());
            let h = g.restrict(&core);
            for v in core.iter() {
                assert!(!t.exceeds(h.degree(v)));
            }
        }
    }

    #[test]
    fn simplicial_examples() {
        assert_eq!(simplicial_vertex(&Graph::complete(5)), Some(0));
        assert_eq!(simplicial_vertex(&Graph::cycle(4).unwrap()), None);
        let tree = Graph::from_edges(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]).unwrap();
        let v = simplicial_vertex(&tree).unwrap();
        assert_eq!(tree.degree(v), 1);
        assert_eq!(v, 3);
    }

    #[test]
    fn components_and_cliques() {
        let g = Graph::from_edges(5, [(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![0, 0, 2, 3, 3]);
        assert_eq!(g.component_count(), 3);
        assert!(!g.is_connected());
        assert!(Graph::path(4).is_connected());
        let k = Graph::complete(4);
        assert!(k.is_clique(&VertexSet::full(4)));
        assert!(!g.is_clique(&VertexSet::full(5)));
        assert!(g.is_clique(&VertexSet::empty(5)));
    }
}
