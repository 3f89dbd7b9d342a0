//! Rigidity-matrix rows at random field points, rank and `d`-rigidity
//! decisions, rigidity-matroid closures (plain and contracted), the maximum
//! rigid dimension and the global-rigidity certificate.
//!
//! Error semantics are one-sided. A `Rigid` verdict or a closure membership
//! can only be spurious if a generically nonzero reduction happens to vanish
//! at the sampled point (probability at most `rank / q` per query). A
//! `Flexible` verdict is spurious only if the point misses the generic rank.
//! Re-running with independent embeddings (`repeats`) and keeping the largest
//! rank drives the second probability down geometrically.
//!
//! Graphs with `n <= d` vertices are treated as `d`-rigid iff they are
//! complete, matching the generic rank `binom(n, 2)` of such graphs.

use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Fp, RowBasis, RowVector};
use crate::graph::{Graph, VertexSet};
use crate::rng::{derive_seed, RngStream};

/// Per-vertex `d`-tuples of field elements standing in for a generic embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    n: usize,
    d: usize,
    seed: Option<u64>,
    coords: Vec<Fp>,
}

impl Embedding {
    /// Uniform coordinates drawn from the stream seeded with `seed`.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut rng = RngStream::new(seed);
        let coords = (0..n * d).map(|_| rng.next_field()).collect();
        Ok(Embedding { n, d, seed: Some(seed), coords })
    }

    /// Explicit coordinates, vertex-major (`coords[v * d + k]`).
    pub fn from_coords(n: usize, d: usize, coords: Vec<Fp>) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if coords.len() != n * d {
            return Err(Error::LengthMismatch { expected: n * d, found: coords.len() });
        }
        Ok(Embedding { n, d, seed: None, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn point(&self, v: usize) -> &[Fp] {
        &self.coords[v * self.d..(v + 1) * self.d]
    }

    fn check(&self, n: usize, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.n != n || self.d != d {
            return Err(Error::DimensionMismatch { n, d, emb_n: self.n, emb_d: self.d });
        }
        Ok(())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    /// Writes the row of `(x, y)` into a zeroed buffer of length `d * n`.
    fn write_row(&self, x: usize, y: usize, buf: &mut [Fp]) {
        let d = self.d;
        for k in 0..d {
            let diff = self.coords[x * d + k] - self.coords[y * d + k];
            buf[x * d + k] = diff;
            buf[y * d + k] = -diff;
        }
    }

    /// `r_xy . z` without materializing the row.
    fn row_dot(&self, x: usize, y: usize, z: &[Fp]) -> Fp {
        let d = self.d;
        let mut acc = Fp::ZERO;
        for k in 0..d {
            let diff = self.coords[x * d + k] - self.coords[y * d + k];
            acc += diff * (z[x * d + k] - z[y * d + k]);
        }
        acc
    }
}

/// Embedding seed for the `repeat`-th probe of dimension `d`.
pub fn probe_seed(seed: u64, d: usize, repeat: usize) -> u64 {
    derive_seed(derive_seed(seed, d as u64), repeat as u64)
}

/// Rigidity-matrix row of the pair `(x, y)`: `p(x) - p(y)` in the block of
/// `x`, `p(y) - p(x)` in the block of `y`, zero elsewhere.
pub fn edge_row(x: usize, y: usize, emb: &Embedding) -> Result<RowVector> {
    emb.check_vertex(x)?;
    emb.check_vertex(y)?;
    if x == y {
        return Err(Error::SelfLoop(x));
    }
    let mut row = RowVector::zero(emb.n * emb.d);
    emb.write_row(x, y, row.entries_mut());
    Ok(row)
}

/// Generic rank of the rigidity matrix of `K_n` in dimension `d`:
/// `binom(n, 2)` when `n <= d + 1`, otherwise `d n - binom(d + 1, 2)`.
pub fn generic_rank_formula(n: usize, d: usize) -> usize {
    if n <= d + 1 {
        n * n.saturating_sub(1) / 2
    } else {
        d * n - d * (d + 1) / 2
    }
}

/// Largest `d` in `[0, n - 1]` with `m >= d n - binom(d + 1, 2)`, the most a
/// graph with `m` edges can support.
pub fn edge_count_dmax(n: usize, m: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    // d n - d(d+1)/2 <= m  <=>  d <= (n - 1/2) - sqrt((n - 1/2)^2 - 2m)
    let b = n as f64 - 0.5;
    let disc = (b * b - 2.0 * m as f64).max(0.0);
    let mut d = libm::floor(b - libm::sqrt(disc)).max(0.0) as usize;
    d = d.min(n - 1);
    while d > 0 && generic_rank_formula(n, d) > m {
        d -= 1;
    }
    while d < n - 1 && generic_rank_formula(n, d + 1) <= m {
        d += 1;
    }
    d
}

fn basis_of_graph(g: &Graph, emb: &Embedding, basis: &mut RowBasis, cap: usize) {
    let len = emb.n * emb.d;
    let mut buf = vec![Fp::ZERO; len];
    for &(u, v) in g.edges() {
        if basis.rank() >= cap {
            break;
        }
        buf.fill(Fp::ZERO);
        emb.write_row(u, v, &mut buf);
        basis.insert_slice(&buf).expect("row length matches");
    }
}

/// Rank of the rigidity matrix of `g` at the point `emb`.
///
/// Insertion stops once the rank reaches the generic rank of `K_n`, which no
/// point rank can exceed.
pub fn rigidity_rank(g: &Graph, d: usize, emb: &Embedding) -> Result<usize> {
    emb.check(g.n(), d)?;
    let mut basis = RowBasis::new(g.n() * d);
    basis_of_graph(g, emb, &mut basis, generic_rank_formula(g.n(), d));
    Ok(basis.rank())
}

/// Largest point rank over `repeats` independent embeddings derived from `seed`.
pub fn rank_repeated(g: &Graph, d: usize, seed: u64, repeats: usize) -> Result<usize> {
    let mut best = 0;
    for r in 0..repeats.max(1) {
        let emb = Embedding::random(g.n(), d, probe_seed(seed, d, r))?;
        best = best.max(rigidity_rank(g, d, &emb)?);
    }
    Ok(best)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Verdict {
    Rigid,
    Flexible,
}

impl Verdict {
    pub fn is_rigid(self) -> bool {
        self == Verdict::Rigid
    }
}

/// Flexibility that follows from counting alone: fewer rows than the generic
/// rank, or (for `n >= d + 2`) a vertex of degree below `d`.
fn flexible_by_counting(g: &Graph, d: usize) -> bool {
    let n = g.n();
    g.edge_count() < generic_rank_formula(n, d) || (n >= d + 2 && g.min_degree() < d)
}

/// Decides `d`-rigidity at the point `emb`: `Rigid` iff the point rank equals
/// [`generic_rank_formula`].
pub fn is_d_rigid(g: &Graph, d: usize, emb: &Embedding) -> Result<Verdict> {
    emb.check(g.n(), d)?;
    if flexible_by_counting(g, d) {
        return Ok(Verdict::Flexible);
    }
    Ok(verdict(rigidity_rank(g, d, emb)? == generic_rank_formula(g.n(), d)))
}

/// [`is_d_rigid`] with `repeats` embeddings derived from `seed`; the
/// rank-maximizing outcome wins.
pub fn is_d_rigid_seeded(g: &Graph, d: usize, seed: u64, repeats: usize) -> Result<Verdict> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if flexible_by_counting(g, d) {
        return Ok(Verdict::Flexible);
    }
    let target = generic_rank_formula(g.n(), d);
    for r in 0..repeats.max(1) {
        let emb = Embedding::random(g.n(), d, probe_seed(seed, d, r))?;
        if rigidity_rank(g, d, &emb)? == target {
            return Ok(Verdict::Rigid);
        }
    }
    Ok(Verdict::Flexible)
}

fn verdict(rigid: bool) -> Verdict {
    if rigid {
        Verdict::Rigid
    } else {
        Verdict::Flexible
    }
}

/// Index of the pair `u < v` in member bitmaps: `v (v - 1) / 2 + u`.
pub fn pair_index(u: usize, v: usize) -> usize {
    let (u, v) = (u.min(v), u.max(v));
    v * (v - 1) / 2 + u
}

/// Every pair `u < v` of `0..n` in [`pair_index`] order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(|v| (0..v).map(move |u| (u, v)))
}

/// Closure of a graph in the (possibly contracted) `d`-rigidity matroid.
///
/// The report's domain is every pair outside `binom(contracted, 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    n: usize,
    d: usize,
    contracted: VertexSet,
    member: FixedBitSet,
    base_rank: usize,
    embedding_seed: Option<u64>,
}

impl ClosureReport {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn contracted(&self) -> &VertexSet {
        &self.contracted
    }

    /// Rank of the spanning rows in the contracted matroid; for an empty
    /// contracted set this is the rank of the graph's rows.
    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    pub fn embedding_seed(&self) -> Option<u64> {
        self.embedding_seed
    }

    pub fn in_domain(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n && v < self.n && !(self.contracted.contains(u) && self.contracted.contains(v))
    }

    /// `None` for pairs outside the domain.
    pub fn is_member(&self, u: usize, v: usize) -> Option<bool> {
        self.in_domain(u, v).then(|| self.member.contains(pair_index(u, v)))
    }

    pub fn member_count(&self) -> usize {
        self.member.count_ones(..)
    }

    /// Domain pairs with their membership, in [`pair_index`] order.
    pub fn domain(&self) -> impl Iterator<Item = ((usize, usize), bool)> + '_ {
        pairs(self.n)
            .filter(|&(u, v)| self.in_domain(u, v))
            .map(|(u, v)| ((u, v), self.member.contains(pair_index(u, v))))
    }

    pub fn members(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.domain().filter(|&(_, m)| m).map(|(e, _)| e)
    }

    /// The graph on `0..n` whose edges are the members.
    pub fn member_graph(&self) -> Graph {
        let mut edges: Vec<_> = self.members().collect();
        edges.sort_unstable();
        Graph::from_sorted_unique(self.n, edges)
    }
}

/// `C_d(G)`: every pair whose row lies in the span of the rows of `g`.
pub fn closure(g: &Graph, d: usize, emb: &Embedding) -> Result<ClosureReport> {
    contracted_closure(g, d, &VertexSet::empty(g.n()), emb)
}

/// `C_{d,A}(G)`: closure in the matroid obtained by contracting every pair of
/// `binom(A, 2)`.
///
/// A pair `f` outside `binom(A, 2)` is a member iff its row lies in the span
/// of the rows of `g` together with the rows of `binom(A, 2)`. This is the
/// quotient by `V_A = span(r_e : e in binom(A, 2))`, which is the same test as
/// projecting onto the orthogonal complement of `V_A`, and keeps all
/// arithmetic inside the prime field.
///
/// Membership is read off the annihilator of the span: a sparse pair row is
/// in the span iff it is orthogonal to every annihilator vector.
pub fn contracted_closure(g: &Graph, d: usize, a: &VertexSet, emb: &Embedding) -> Result<ClosureReport> {
    let n = g.n();
    emb.check(n, d)?;
    if a.universe() != n {
        return Err(Error::Domain("contracted set has the wrong universe".into()));
    }
    let len = n * d;
    let mut basis = RowBasis::new(len);
    let mut buf = vec![Fp::ZERO; len];
    let clique = a.to_vec();
    let clique_cap = generic_rank_formula(clique.len(), d);
    'clique: for (i, &v) in clique.iter().enumerate() {
        for &u in &clique[..i] {
            if basis.rank() >= clique_cap {
                break 'clique;
            }
            buf.fill(Fp::ZERO);
            emb.write_row(u, v, &mut buf);
            basis.insert_slice(&buf)?;
        }
    }
    let clique_rank = basis.rank();
    let full = generic_rank_formula(n, d);
    for &(u, v) in g.edges() {
        if basis.rank() >= full {
            break;
        }
        if a.contains(u) && a.contains(v) {
            continue;
        }
        buf.fill(Fp::ZERO);
        emb.write_row(u, v, &mut buf);
        basis.insert_slice(&buf)?;
    }

    let mut member = FixedBitSet::with_capacity(n * n.saturating_sub(1) / 2);
    let in_domain = |u: usize, v: usize| !(a.contains(u) && a.contains(v));
    if basis.rank() >= full {
        // the span already equals the row space of K_n at this point
        for (u, v) in pairs(n).filter(|&(u, v)| in_domain(u, v)) {
            member.insert(pair_index(u, v));
        }
    } else {
        let ann = basis.annihilator();
        for (u, v) in pairs(n).filter(|&(u, v)| in_domain(u, v)) {
            if ann.iter().all(|z| emb.row_dot(u, v, z).is_zero()) {
                member.insert(pair_index(u, v));
            }
        }
    }
    Ok(ClosureReport {
        n,
        d,
        contracted: a.clone(),
        member,
        base_rank: basis.rank() - clique_rank,
        embedding_seed: emb.seed(),
    })
}

/// Outcome of [`max_rigid_dim_search`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSearch {
    pub d_max: usize,
    /// Upper end of the searched range: `min(delta, edge_count_dmax, n - 1)`.
    pub upper: usize,
    /// Rank probes in the order they were made.
    pub probes: Vec<(usize, Verdict)>,
}

/// Largest `d` in `[0, n - 1]` for which `g` is `d`-rigid.
///
/// Disconnected graphs give 0 and connected graphs are 1-rigid, both decided
/// combinatorially. Above that the search runs over `[1, upper]`, where
/// `upper = min(delta(G), edge_count_dmax, n - 1)` bounds every rigid
/// dimension by counting. `upper` is probed first; if it fails, a binary
/// search keeps a rigid lower end and a flexible upper end. `d`-rigidity is
/// monotone decreasing in `d` because the `d`-rigidity closure contains the
/// `d'`-closure for `d < d'`. Each probe uses fresh embeddings derived from
/// `(seed, d)`.
pub fn max_rigid_dim_search(g: &Graph, seed: u64, repeats: usize) -> Result<DimensionSearch> {
    let n = g.n();
    let mut probes = Vec::new();
    if n <= 1 || !g.is_connected() {
        return Ok(DimensionSearch { d_max: 0, upper: 0, probes });
    }
    let upper = g.min_degree().min(edge_count_dmax(n, g.edge_count())).min(n - 1);
    if upper <= 1 {
        return Ok(DimensionSearch { d_max: upper, upper, probes });
    }
    let probe = |d: usize, probes: &mut Vec<(usize, Verdict)>| -> Result<bool> {
        let v = is_d_rigid_seeded(g, d, seed, repeats)?;
        probes.push((d, v));
        Ok(v.is_rigid())
    };
    if probe(upper, &mut probes)? {
        return Ok(DimensionSearch { d_max: upper, upper, probes });
    }
    let (mut lo, mut hi) = (1, upper);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe(mid, &mut probes)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DimensionSearch { d_max: lo, upper, probes })
}

pub fn max_rigid_dim(g: &Graph, seed: u64) -> Result<usize> {
    Ok(max_rigid_dim_search(g, seed, 1)?.d_max)
}

/// Global `d`-rigidity evidence.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GlobalRigidity {
    /// `g` is `(d + 1)`-rigid, hence globally `d`-rigid.
    pub certified: bool,
    /// `n >= d + 2` and some vertex has degree at most `d`: such a vertex can
    /// be reflected through the hyperplane of its neighbours, so `g` is
    /// certainly not globally `d`-rigid.
    pub hard_negative: bool,
}

pub fn globally_rigid_cert(g: &Graph, d: usize, seed: u64) -> Result<GlobalRigidity> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let certified = is_d_rigid_seeded(g, d + 1, seed, 1)?.is_rigid();
    let hard_negative = g.n() >= d + 2 && g.min_degree() < d + 1;
    Ok(GlobalRigidity { certified, hard_negative })
}
