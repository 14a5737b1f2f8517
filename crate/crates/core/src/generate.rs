//! Seeded synthetic graphs for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_graph, Graph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p): every pair is an edge independently with probability `p`.
pub fn erdos_renyi(n: u64, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    from_edges(n, edges)
}

/// Preferential attachment: starts from a clique on `m + 1` vertices, then
/// each new vertex links to `m` distinct existing vertices picked with
/// probability proportional to degree.
pub fn barabasi_albert(n: u64, m: u64, rng: &mut impl Rng) -> Graph {
    assert!(m >= 1, "attachment count must be positive");
    let seed = (m + 1).min(n);
    let mut edges = Vec::new();
    // One entry per edge endpoint, so uniform sampling is degree-proportional.
    let mut endpoints: Vec<u64> = Vec::new();
    for u in 0..seed {
        for v in u + 1..seed {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut picked = Vec::with_capacity(m as usize);
    for v in seed..n {
        picked.clear();
        while (picked.len() as u64) < m.min(v) {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !picked.contains(&t) {
                picked.push(t);
            }
        }
        for &t in &picked {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    from_edges(n, edges)
}

pub fn complete(n: u64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    from_edges(n, edges)
}

pub fn cycle(n: u64) -> Graph {
    from_edges(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
}

pub fn path(n: u64) -> Graph {
    from_edges(n, (1..n).map(|i| (i - 1, i)).collect())
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: u64) -> Graph {
    from_edges(leaves + 1, (1..=leaves).map(|x| (0, x)).collect())
}

/// Keeps all `n` vertices even when the highest ids end up isolated.
fn from_edges(n: u64, mut edges: Vec<(u64, u64)>) -> Graph {
    if n > 0 {
        edges.push((n - 1, n - 1));
    }
    build_graph(&edges).expect("generated ids fit the vertex index")
}
