use proptest::prelude::*;
use rigor_core::constructions::bootstrap_clique;
use rigor_core::graph::{gnp_sample, peel_to_min_degree, simplicial_vertex};
use rigor_core::rigidity::{
    closure, contracted_closure, generic_rank_formula, is_d_rigid_seeded, rigidity_rank, Embedding,
};
use rigor_core::{Fp, Graph, Rational, RngStream, Verdict, VertexSet};

fn sample(n: usize, p: f64, seed: u64) -> Graph {
    gnp_sample(n, p, &mut RngStream::new(seed)).unwrap()
}

/// Drops the last coordinate of every point.
fn truncate(emb: &Embedding) -> Embedding {
    let d = emb.d() - 1;
    let coords: Vec<Fp> = (0..emb.n()).flat_map(|v| emb.point(v)[..d].to_vec()).collect();
    Embedding::from_coords(emb.n(), d, coords).unwrap()
}

/// Pairs joined in `g`'s spanning forest closure: same component.
fn same_component_pairs(g: &Graph) -> Vec<(usize, usize)> {
    let comp = g.components();
    let mut out = Vec::new();
    for v in 0..g.n() {
        for u in 0..v {
            if comp[u] == comp[v] {
                out.push((u, v));
            }
        }
    }
    out.sort_unstable();
    out
}

fn greedy_clique(m: &Graph, start: usize) -> VertexSet {
    let mut a = VertexSet::empty(m.n());
    a.insert(start);
    for v in 0..m.n() {
        if !a.contains(v) && m.adjacency(v).intersection_count(a.as_bitset()) == a.len() {
            a.insert(v);
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_is_idempotent(seed: u64, n in 2usize..=10, d in 1usize..=3, p in 0.1f64..0.9) {
        let g = sample(n, p, seed);
        let emb = Embedding::random(n, d, seed ^ 1).unwrap();
        let m = closure(&g, d, &emb).unwrap().member_graph();
        let again = closure(&m, d, &emb).unwrap().member_graph();
        prop_assert_eq!(m.edges(), again.edges());
        prop_assert!(g.edges().iter().all(|&(u, v)| m.has_edge(u, v)));
    }

    #[test]
    fn closure_shrinks_as_dimension_grows(seed: u64, n in 2usize..=10, d in 1usize..=3, p in 0.1f64..0.9) {
        let g = sample(n, p, seed);
        let high = Embedding::random(n, d + 1, seed ^ 2).unwrap();
        let low = truncate(&high);
        let upper = closure(&g, d + 1, &high).unwrap().member_graph();
        let lower = closure(&g, d, &low).unwrap().member_graph();
        prop_assert!(upper.edges().iter().all(|&(u, v)| lower.has_edge(u, v)));
    }

    #[test]
    fn contraction_of_a_closure_clique_stays_inside(seed: u64, n in 3usize..=10, d in 1usize..=3, p in 0.2f64..0.9, start in 0usize..10) {
        let g = sample(n, p, seed);
        let emb = Embedding::random(n, d, seed ^ 3).unwrap();
        let full = closure(&g, d, &emb).unwrap();
        let m = full.member_graph();
        let a = greedy_clique(&m, start % n);
        let contracted = contracted_closure(&g, d, &a, &emb).unwrap();
        for (u, v) in contracted.members() {
            prop_assert!(m.has_edge(u, v), "pair ({}, {}) outside the closure", u, v);
        }
        prop_assert!(contracted.base_rank() <= d * (n - a.len()));
    }

    #[test]
    fn one_dimensional_closure_is_graphic(seed: u64, n in 1usize..=8, p in 0.0f64..0.8) {
        let g = sample(n, p, seed);
        let emb = Embedding::random(n, 1, seed ^ 4).unwrap();
        let members: Vec<_> = closure(&g, 1, &emb).unwrap().member_graph().edges().to_vec();
        prop_assert_eq!(members, same_component_pairs(&g));
    }

    #[test]
    fn point_rank_never_exceeds_generic(seed: u64, n in 1usize..=14, d in 1usize..=5, p in 0.0f64..1.0) {
        let g = sample(n, p, seed);
        let emb = Embedding::random(n, d, seed ^ 5).unwrap();
        let r = rigidity_rank(&g, d, &emb).unwrap();
        prop_assert!(r <= generic_rank_formula(n, d));
        prop_assert!(r <= g.edge_count());
    }

    #[test]
    fn peeled_core_has_the_threshold_degree(seed: u64, n in 1usize..=40, p in 0.0f64..0.6, num in 0u64..20, den in 1u64..5) {
        let g = sample(n, p, seed);
        let t = Rational::new(num, den).unwrap();
        let core = peel_to_min_degree(&g, t);
        for v in core.iter() {
            prop_assert!(!t.exceeds(g.adjacency(v).intersection_count(core.as_bitset())));
        }
    }

    #[test]
    fn bootstrap_certificates_are_sound(seed: u64, n in 2usize..=16, d in 1usize..=3, p in 0.2f64..1.0) {
        let g = sample(n, p, seed);
        let log = bootstrap_clique(&g, d, seed).unwrap();
        if log.certified {
            prop_assert_eq!(is_d_rigid_seeded(&g, d, seed ^ 6, 1).unwrap(), Verdict::Rigid);
        }
    }

    #[test]
    fn sampling_is_reproducible(seed: u64, n in 1usize..=200, p in 0.0f64..=1.0) {
        prop_assert_eq!(sample(n, p, seed), sample(n, p, seed));
    }
}

/// Closed graphs with minimum degree at least `d (d + 1)` have a simplicial
/// vertex; checked on closures of random graphs.
#[test]
fn closed_dense_graphs_have_simplicial_vertices() {
    let mut checked = 0;
    for seed in 0..300u64 {
        let n = 8 + (seed % 8) as usize;
        let p = 0.3 + 0.05 * (seed % 12) as f64;
        let g = sample(n, p, seed);
        for d in 1..=2 {
            let m = closure(&g, d, &Embedding::random(n, d, seed + 17).unwrap()).unwrap().member_graph();
            if m.min_degree() >= d * (d + 1) {
                checked += 1;
                assert!(simplicial_vertex(&m).is_some(), "seed {seed}, d {d}");
            }
        }
    }
    assert!(checked > 100, "only {checked} closed graphs met the degree bound");
}
