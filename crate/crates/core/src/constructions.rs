//! Henneberg extensions, the matching gadget and the clique bootstrap that
//! grows a rigid clique inside the closure of a graph.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{greedy_matching, is_simplicial_within, peel_within, Graph, Rational, VertexSet};
use crate::rigidity::{closure, Embedding};
use crate::rng::{derive_seed, labels};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum StepKind {
    /// Join a new vertex to `d` existing vertices.
    Zero,
    /// Remove an edge `xy`, then join a new vertex to `x`, `y` and `d - 1`
    /// further vertices.
    One,
}

/// One Henneberg extension. For a 1-step the removed edge is
/// `targets[0]`-`targets[1]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HennebergStep {
    pub kind: StepKind,
    pub targets: Vec<usize>,
}

impl HennebergStep {
    pub fn zero(targets: Vec<usize>) -> Self {
        HennebergStep { kind: StepKind::Zero, targets }
    }

    pub fn one(targets: Vec<usize>) -> Self {
        HennebergStep { kind: StepKind::One, targets }
    }

    pub fn removed_edge(&self) -> Option<(usize, usize)> {
        match self.kind {
            StepKind::Zero => None,
            StepKind::One => {
                let (x, y) = (self.targets[0], self.targets[1]);
                Some((x.min(y), x.max(y)))
            }
        }
    }
}

/// Applies `step` to `g`; the new vertex is `g.n()`.
///
/// Both steps preserve generic `d`-rigidity and independence.
pub fn henneberg_apply(g: &Graph, d: usize, step: &HennebergStep) -> Result<Graph> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let want = match step.kind {
        StepKind::Zero => d,
        StepKind::One => d + 1,
    };
    if step.targets.len() != want {
        return Err(Error::MalformedStep(format!(
            "{:?}-step in dimension {d} needs {want} targets, got {}",
            step.kind,
            step.targets.len()
        )));
    }
    let n = g.n();
    let mut seen = VertexSet::empty(n);
    for &t in &step.targets {
        if t >= n {
            return Err(Error::VertexOutOfRange { vertex: t, n });
        }
        if seen.contains(t) {
            return Err(Error::MalformedStep(format!("target {t} repeated")));
        }
        seen.insert(t);
    }
    let removed = step.removed_edge();
    if let Some((x, y)) = removed {
        if !g.has_edge(x, y) {
            return Err(Error::MalformedStep(format!("1-step removes missing edge ({x}, {y})")));
        }
    }
    let edges = g
        .edges()
        .iter()
        .copied()
        .filter(|&e| Some(e) != removed)
        .chain(step.targets.iter().map(|&t| (t, n)));
    Graph::from_edges(n + 1, edges)
}

/// A base graph followed by a sequence of steps; step `i` creates vertex
/// `base.n() + i`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct HennebergTrace {
    pub d: usize,
    pub base_n: usize,
    pub steps: Vec<HennebergStep>,
}

impl HennebergTrace {
    pub fn replay(&self, base: &Graph) -> Result<Graph> {
        if base.n() != self.base_n {
            return Err(Error::LengthMismatch { expected: self.base_n, found: base.n() });
        }
        let mut g = base.clone();
        for step in &self.steps {
            g = henneberg_apply(&g, self.d, step)?;
        }
        Ok(g)
    }
}

/// The doubled banana: two copies of `K_5 - e` glued along the missing edge's
/// endpoints 0 and 1. It satisfies every counting condition for 3-rigidity but
/// is flexible, since each banana can rotate about the axis through 0 and 1.
pub fn double_banana() -> Graph {
    let mut edges = Vec::new();
    for block in [[0, 1, 2, 3, 4], [0, 1, 5, 6, 7]] {
        for i in 0..5 {
            for j in i + 1..5 {
                if (block[i], block[j]) != (0, 1) {
                    edges.push((block[i], block[j]));
                }
            }
        }
    }
    Graph::from_edges(8, edges).expect("fixed edge list")
}

/// Minimally `d`-rigid graph on `2K` vertices, `K = binom(d + 1, 2)`, whose
/// edges between the halves `X = 0..K` and `Y = K..2K` are exactly the
/// perfect matching `k <-> K + k`.
#[derive(Clone, PartialEq, Debug)]
pub struct MatchingGadget {
    pub d: usize,
    pub half: usize,
    pub graph: Graph,
    /// Construction in internal labels, replayable from `K_{d+1}`.
    pub trace: HennebergTrace,
    /// `relabel[internal] = final label`.
    pub relabel: Vec<usize>,
}

impl MatchingGadget {
    pub fn x(&self, k: usize) -> usize {
        k
    }

    pub fn y(&self, k: usize) -> usize {
        self.half + k
    }
}

/// Builds the gadget by Henneberg steps.
///
/// Start from the clique on `x_1..x_d, y_1`, add `y_i` (`i = 2..d`) by a
/// 0-step onto `y_1..y_{i-1}, x_i..x_d`. The `X`-`Y` edges are now the pairs
/// `x_i y_j` with `j <= i`; the ones with `j < i` are extra. Each extra edge
/// `x_i y_j` is traded for a fresh matching edge `x_k y_k` by two 1-steps:
/// `x_k` onto `x_i, y_j` and the other `x`'s (removing `x_i y_j`), then `y_k`
/// onto `x_k, y_j` and the other `y`'s (removing `x_k y_j`).
pub fn build_matching_gadget(d: usize) -> Result<MatchingGadget> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let half = d * (d + 1) / 2;
    // internal labels of x_1..x_K and y_1..y_K, 1-based in the comments
    let mut xs = vec![usize::MAX; half];
    let mut ys = vec![usize::MAX; half];
    for (i, x) in xs.iter_mut().enumerate().take(d) {
        *x = i;
    }
    ys[0] = d;
    let mut g = Graph::complete(d + 1);
    let mut steps = Vec::new();
    let mut push = |g: &mut Graph, step: HennebergStep| -> Result<usize> {
        *g = henneberg_apply(g, d, &step)?;
        steps.push(step);
        Ok(g.n() - 1)
    };
    for i in 1..d {
        let targets = ys[..i].iter().chain(&xs[i..d]).copied().collect();
        ys[i] = push(&mut g, HennebergStep::zero(targets))?;
    }
    let mut k = d;
    for j in 0..d {
        for i in j + 1..d {
            let mut targets = vec![xs[i], ys[j]];
            targets.extend((0..d).filter(|&t| t != i).map(|t| xs[t]));
            xs[k] = push(&mut g, HennebergStep::one(targets))?;
            let mut targets = vec![xs[k], ys[j]];
            targets.extend((0..d).filter(|&t| t != j).map(|t| ys[t]));
            ys[k] = push(&mut g, HennebergStep::one(targets))?;
            k += 1;
        }
    }
    debug_assert_eq!(k, half);
    let mut relabel = vec![0; 2 * half];
    for k in 0..half {
        relabel[xs[k]] = k;
        relabel[ys[k]] = half + k;
    }
    let graph = Graph::from_edges(2 * half, g.edges().iter().map(|&(u, v)| (relabel[u], relabel[v])))?;
    let trace = HennebergTrace { d, base_n: d + 1, steps };
    Ok(MatchingGadget { d, half, graph, trace, relabel })
}

/// Which graph supplies the matching edges in a merge.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub enum MatchingSource {
    /// Pairs of the closure (the default).
    #[default]
    Closure,
    /// Edges of the input graph only.
    Graph,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StuckReason {
    /// The peeled remainder outside the clique is empty.
    NoDenseRemainder,
    /// No vertex of the peeled remainder has a clique neighbourhood there.
    NoSimplicialVertex,
    /// The matching between the clique and the block is too small.
    SmallMatching { found: usize, needed: usize },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "event")]
pub enum BootstrapEvent {
    /// `vertex` has at least `d` closure neighbours in the clique.
    ExtendByHeavyVertex { vertex: usize, clique_neighbors: usize },
    /// The clique `block` was joined through `matching`.
    MergeByMatching { block: Vec<usize>, matching: Vec<(usize, usize)> },
    Stuck { reason: StuckReason },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BootstrapLog {
    pub n: usize,
    pub d: usize,
    pub embedding_seed: u64,
    pub matching_source: MatchingSource,
    pub initial_clique: Vec<usize>,
    pub events: Vec<BootstrapEvent>,
    pub final_clique: Vec<usize>,
    /// The final clique is the whole vertex set, which certifies `d`-rigidity.
    pub certified: bool,
}

/// Seed of the embedding the bootstrap uses for its closure.
pub fn bootstrap_embedding_seed(seed: u64, d: usize) -> u64 {
    derive_seed(derive_seed(seed, labels::BOOTSTRAP), d as u64)
}

pub fn bootstrap_clique(g: &Graph, d: usize, seed: u64) -> Result<BootstrapLog> {
    bootstrap_clique_with(g, d, seed, MatchingSource::Closure)
}

/// Grows a clique `A` of the closure `M = C_d(g)` until it covers every vertex
/// or no rule applies.
///
/// Rules, tried in order after every event:
///
/// 1. extend `A` by the lowest vertex with at least `d` `M`-neighbours in `A`;
/// 2. peel `M` restricted to the complement `R` down to internal minimum
///    degree `e(R) / (4|R|)`, pick a simplicial vertex `v` of the survivors
///    (largest neighbourhood, then lowest index) and merge the block
///    `B = {v} + N(v)` when a greedy `A`-`B` matching has `binom(d + 1, 2)`
///    edges.
///
/// Both rules keep `A` a clique of `M`: a vertex with `d` neighbours in a
/// rigid set is rigidly attached, and two rigid cliques joined by a matching
/// of `binom(d + 1, 2)` edges form a rigid set. A violation is reported as
/// [`Error::InvariantViolation`].
pub fn bootstrap_clique_with(g: &Graph, d: usize, seed: u64, source: MatchingSource) -> Result<BootstrapLog> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let n = g.n();
    let embedding_seed = bootstrap_embedding_seed(seed, d);
    let emb = Embedding::random(n, d, embedding_seed)?;
    let m = closure(g, d, &emb)?.member_graph();
    let (initial_clique, events, a) = grow_clique(&m, g, d, source)?;
    let certified = a.len() == n;
    Ok(BootstrapLog {
        n,
        d,
        embedding_seed,
        matching_source: source,
        initial_clique,
        events,
        final_clique: a.to_vec(),
        certified,
    })
}

/// The growth loop of [`bootstrap_clique_with`] over a given closure graph
/// `m`; `g` only supplies matching edges for [`MatchingSource::Graph`].
///
/// Returns the initial clique, the events and the final clique. When `m` is
/// not closed under the two rules the clique check can fail, which is
/// reported as [`Error::InvariantViolation`].
pub fn grow_clique(
    m: &Graph,
    g: &Graph,
    d: usize,
    source: MatchingSource,
) -> Result<(Vec<usize>, Vec<BootstrapEvent>, VertexSet)> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if g.n() != m.n() {
        return Err(Error::LengthMismatch { expected: m.n(), found: g.n() });
    }
    let n = m.n();
    let needed = d * (d + 1) / 2;
    let mut a = initial_clique(m);
    check_clique(m, &a, "initial clique")?;
    let initial = a.to_vec();
    let mut events = Vec::new();

    while a.len() < n {
        if let Some((v, k)) = heavy_vertex(m, &a, d) {
            a.insert(v);
            events.push(BootstrapEvent::ExtendByHeavyVertex { vertex: v, clique_neighbors: k });
            check_clique(m, &a, "extension")?;
            continue;
        }
        let rest = a.complement();
        let inner = m.restrict(&rest).edge_count() as u64;
        let threshold = Rational::new(inner, 4 * rest.len() as u64)?;
        let dense = peel_within(m, &rest, threshold);
        if dense.is_empty() {
            events.push(BootstrapEvent::Stuck { reason: StuckReason::NoDenseRemainder });
            break;
        }
        let Some(v) = best_simplicial(m, &dense) else {
            events.push(BootstrapEvent::Stuck { reason: StuckReason::NoSimplicialVertex });
            break;
        };
        let block = closed_neighborhood(m, v, &dense);
        let matching = match source {
            MatchingSource::Closure => greedy_matching(m, &a, &block)?,
            MatchingSource::Graph => greedy_matching(g, &a, &block)?,
        };
        if matching.len() < needed {
            events.push(BootstrapEvent::Stuck {
                reason: StuckReason::SmallMatching { found: matching.len(), needed },
            });
            break;
        }
        a.union_with(&block);
        events.push(BootstrapEvent::MergeByMatching { block: block.to_vec(), matching });
        check_clique(m, &a, "merge")?;
    }
    Ok((initial, events, a))
}

fn check_clique(m: &Graph, a: &VertexSet, stage: &str) -> Result<()> {
    if m.is_clique(a) {
        Ok(())
    } else {
        Err(Error::InvariantViolation(format!("bootstrap set is not a closure clique after {stage}")))
    }
}

fn closed_neighborhood(m: &Graph, v: usize, within: &VertexSet) -> VertexSet {
    let mut set = VertexSet::empty(m.n());
    set.insert(v);
    for u in m.neighbors(v) {
        if within.contains(u) {
            set.insert(u);
        }
    }
    set
}

/// Simplicial vertex of `m` restricted to `within` with the most neighbours
/// there, lowest index on ties.
fn best_simplicial(m: &Graph, within: &VertexSet) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for v in within.iter() {
        if is_simplicial_within(m, v, within) {
            let k = m.adjacency(v).intersection_count(within.as_bitset());
            if best.map_or(true, |(_, bk)| k > bk) {
                best = Some((v, k));
            }
        }
    }
    best.map(|(v, _)| v)
}

/// Closed neighbourhood of the best simplicial vertex of `m`; when none
/// exists, a greedy maximal clique grown from a maximum-degree vertex.
fn initial_clique(m: &Graph) -> VertexSet {
    let n = m.n();
    let all = VertexSet::full(n);
    if n == 0 {
        return all;
    }
    if let Some(v) = best_simplicial(m, &all) {
        return closed_neighborhood(m, v, &all);
    }
    let start = (0..n).max_by_key(|&v| (m.degree(v), core::cmp::Reverse(v))).unwrap_or(0);
    let mut a = VertexSet::empty(n);
    a.insert(start);
    for v in 0..n {
        if !a.contains(v) && m.adjacency(v).intersection_count(a.as_bitset()) == a.len() {
            a.insert(v);
        }
    }
    a
}

fn heavy_vertex(m: &Graph, a: &VertexSet, d: usize) -> Option<(usize, usize)> {
    (0..m.n()).filter(|&v| !a.contains(v)).find_map(|v| {
        let k = m.adjacency(v).intersection_count(a.as_bitset());
        (k >= d).then_some((v, k))
    })
}
