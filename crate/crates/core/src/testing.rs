//! Independent oracles shared by the unit tests.

use alloc::vec::Vec;

use crate::ffield::Fp;
use crate::graph::Graph;

/// Rank by textbook Gauss-Jordan elimination on a full matrix copy.
pub fn naive_rank(mut m: Vec<Vec<Fp>>, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].inv().unwrap();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col] * inv;
                for c in 0..cols {
                    let v = m[rank][c];
                    m[r][c] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Closure in the graphic matroid: all pairs inside each component.
pub fn graphic_closure(g: &Graph) -> Graph {
    let comp = g.components();
    let n = g.n();
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges.filter(|&(u, v)| comp[u] == comp[v]).collect::<Vec<_>>()).unwrap()
}
