//! Sequential bin-sort peeling and a brute-force definitional checker.
//!
//! Peeling repeatedly removes an edge of minimum current h-support, assigns it
//! the current level, and recomputes the supports the removal may have
//! lowered. It is slow but simple, and serves as the reference result for the
//! fixed-point engines.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::error::{check_hop, Result};
use crate::graph::{all_h_supports, EdgeId, EdgeMask, Graph, HopBfs, NeighborhoodScratch};
use crate::stats::{CancelToken, Mode, RunStats};

/// Per-edge h-trussness for one hop threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrussnessResult {
    pub h: u32,
    pub trussness: Vec<u32>,
}

impl TrussnessResult {
    pub fn get(&self, e: EdgeId) -> u32 {
        self.trussness[e.index()]
    }

    pub fn max(&self) -> Option<u32> {
        self.trussness.iter().copied().max()
    }
}

/// Which edge leaves a bin first. Results do not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PopOrder {
    #[default]
    LowestFirst,
    HighestFirst,
}

/// Edges bucketed by candidate trussness level.
#[derive(Clone, Debug)]
pub struct BinQueue {
    bins: Vec<BTreeSet<EdgeId>>,
    level: Vec<Option<u32>>,
}

impl BinQueue {
    pub fn new(edge_count: usize, max_level: u32) -> Self {
        BinQueue {
            bins: vec![BTreeSet::new(); max_level as usize + 1],
            level: vec![None; edge_count],
        }
    }

    pub fn insert(&mut self, e: EdgeId, level: u32) {
        debug_assert!(self.level[e.index()].is_none());
        self.bins[level as usize].insert(e);
        self.level[e.index()] = Some(level);
    }

    pub fn level(&self, e: EdgeId) -> Option<u32> {
        self.level[e.index()]
    }

    pub fn move_to(&mut self, e: EdgeId, level: u32) {
        let old = self.level[e.index()].expect("edge is not queued");
        if old != level {
            self.bins[old as usize].remove(&e);
            self.bins[level as usize].insert(e);
            self.level[e.index()] = Some(level);
        }
    }

    pub fn pop(&mut self, level: u32, order: PopOrder) -> Option<EdgeId> {
        let bin = &mut self.bins[level as usize];
        let e = match order {
            PopOrder::LowestFirst => bin.pop_first(),
            PopOrder::HighestFirst => bin.pop_last(),
        }?;
        self.level[e.index()] = None;
        Some(e)
    }

    pub fn bin_len(&self, level: u32) -> usize {
        self.bins[level as usize].len()
    }
}

/// Alive edges whose h-support may drop once `e` is removed: every alive edge
/// with an endpoint within `h - 1` hops of either endpoint of `e`, distances
/// measured before the removal. `mask` must already have `e` removed.
pub fn affected_edges(g: &Graph, mask: &EdgeMask, e: EdgeId, h: u32) -> Result<Vec<EdgeId>> {
    check_hop(h)?;
    let mut bfs = HopBfs::new(g.vertex_count());
    let mut out = Vec::new();
    collect_affected(g, mask, e, h, &mut bfs, &mut out);
    Ok(out)
}

fn collect_affected(
    g: &Graph,
    mask: &EdgeMask,
    e: EdgeId,
    h: u32,
    bfs: &mut HopBfs,
    out: &mut Vec<EdgeId>,
) {
    let (u, v) = g.endpoints(e);
    out.clear();
    let before_removal = |x: EdgeId| x == e || mask.is_alive(x);
    for end in [u, v] {
        bfs.run(g, end, h - 1, before_removal);
        for &x in bfs.reached() {
            out.extend(
                g.incident_edges(x)
                    .iter()
                    .copied()
                    .filter(|&f| mask.is_alive(f)),
            );
        }
    }
    out.sort_unstable();
    out.dedup();
}

pub fn peel(g: &Graph, h: u32) -> Result<TrussnessResult> {
    peel_with(g, h, PopOrder::LowestFirst, None).map(|(r, _)| r)
}

/// Peeling with explicit bin pop order and optional cancellation; also
/// returns run statistics (`evaluations` counts support recomputations).
pub fn peel_with(
    g: &Graph,
    h: u32,
    order: PopOrder,
    cancel: Option<&CancelToken>,
) -> Result<(TrussnessResult, RunStats)> {
    check_hop(h)?;
    let start = Instant::now();
    let mut support = all_h_supports(g, h)?.0;
    let ubtruss = support.iter().max().map_or(2, |s| s + 2);

    let mut queue = BinQueue::new(g.edge_count(), ubtruss);
    for e in g.edges() {
        queue.insert(e, support[e.index()] + 2);
    }

    let mut mask = EdgeMask::full(g);
    let mut trussness = vec![0u32; g.edge_count()];
    let mut bfs = HopBfs::new(g.vertex_count());
    let mut scratch = NeighborhoodScratch::new(g.vertex_count());
    let mut affected = Vec::new();
    let mut evaluations = 0u64;

    for k in 2..=ubtruss {
        while let Some(e) = queue.pop(k, order) {
            if let Some(token) = cancel {
                token.check()?;
            }
            trussness[e.index()] = k;
            mask.remove(e);
            collect_affected(g, &mask, e, h, &mut bfs, &mut affected);
            scratch.invalidate();
            for &f in &affected {
                let old = support[f.index()];
                if old + 2 <= k {
                    continue;
                }
                let new = scratch.count_common_neighbors(g, f, h, |x| mask.is_alive(x));
                evaluations += 1;
                assert!(
                    new <= old,
                    "support of {f} rose from {old} to {new} after a deletion"
                );
                support[f.index()] = new;
                queue.move_to(f, (new + 2).max(k));
            }
        }
    }
    debug_assert_eq!(mask.alive_count(), 0);

    let stats = RunStats {
        mode: Mode::Peel,
        h,
        workers: 1,
        rounds: 0,
        evaluations,
        skipped: 0,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        edge_count: g.edge_count(),
        vertex_count: g.vertex_count(),
    };
    Ok((TrussnessResult { h, trussness }, stats))
}

/// Computes h-trussness straight from the definition: for k = 2, 3, ... strip
/// every edge whose in-subgraph h-support is below `k - 2` until nothing
/// changes; edges that survive level k but not level k+1 get trussness k.
/// Distances are recomputed from scratch by Floyd-Warshall after every pass,
/// so this shares no code with the BFS routines. Meant for small graphs.
pub fn brute_force_decompose(g: &Graph, h: u32) -> Result<TrussnessResult> {
    check_hop(h)?;
    let n = g.vertex_count();
    let mut alive = vec![true; g.edge_count()];
    let mut trussness = vec![0u32; g.edge_count()];
    let mut remaining = g.edge_count();
    let mut k = 2u32;
    while remaining > 0 {
        // Fixpoint for level k + 1, starting from the level-k survivors.
        loop {
            let dist = floyd_warshall(g, &alive, n);
            let doomed: Vec<usize> = (0..g.edge_count())
                .filter(|&i| alive[i])
                .filter(|&i| {
                    let (u, v) = g.endpoints(EdgeId(i as u32));
                    let (u, v) = (u as usize, v as usize);
                    let sup = (0..n)
                        .filter(|&w| w != u && w != v && dist[u][w] <= h && dist[v][w] <= h)
                        .count() as u32;
                    sup + 2 < k + 1
                })
                .collect();
            if doomed.is_empty() {
                break;
            }
            for i in doomed {
                alive[i] = false;
                trussness[i] = k;
                remaining -= 1;
            }
        }
        k += 1;
    }
    Ok(TrussnessResult { h, trussness })
}

fn floyd_warshall(g: &Graph, alive: &[bool], n: usize) -> Vec<Vec<u32>> {
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (i, &(u, v)) in g.edge_list().iter().enumerate() {
        if alive[i] {
            d[u as usize][v as usize] = 1;
            d[v as usize][u as usize] = 1;
        }
    }
    for m in 0..n {
        let row_m = d[m].clone();
        for row in d.iter_mut() {
            let dim = row[m];
            if dim >= inf {
                continue;
            }
            for (dij, &dmj) in row.iter_mut().zip(&row_m) {
                *dij = (*dij).min(dim + dmj);
            }
        }
    }
    d
}
