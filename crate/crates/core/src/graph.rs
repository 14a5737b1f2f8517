//! Immutable undirected graph in compressed adjacency form, plus hop-bounded
//! neighborhood queries (h-hop neighbors, common h-neighbors, h-support).
//!
//! Every query takes an edge filter so the same code serves the full graph and
//! the shrinking subgraphs produced while peeling.

use std::fmt;
use std::ops::Index;

use crate::error::{check_hop, Error, Result};
use crate::parallel::for_each_block;

pub type VertexId = u32;

/// Dense handle of an undirected edge. Ids follow the lexicographic order of
/// the `(u, v)` endpoint pairs with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    incident: Vec<EdgeId>,
    endpoints: Vec<(VertexId, VertexId)>,
}

/// Builds a simple undirected graph. Self-loops are dropped, duplicate pairs
/// and reversed orientations are merged. `vertex_count` is one more than the
/// largest id seen, so unused lower ids become isolated vertices.
pub fn build_graph(edges: &[(u64, u64)]) -> Result<Graph> {
    let mut pairs = Vec::with_capacity(edges.len());
    let mut max_id: Option<u64> = None;
    for &(a, b) in edges {
        for id in [a, b] {
            if id >= u64::from(VertexId::MAX) {
                return Err(Error::VertexOverflow(id));
            }
        }
        max_id = Some(max_id.map_or(a.max(b), |m| m.max(a).max(b)));
        if a != b {
            pairs.push((a.min(b) as VertexId, a.max(b) as VertexId));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    if pairs.len() > VertexId::MAX as usize {
        return Err(Error::InvalidArgument(format!(
            "{} edges exceed the 32-bit edge index",
            pairs.len()
        )));
    }
    let vertex_count = max_id.map_or(0, |m| m as usize + 1);
    Ok(Graph::from_sorted_pairs(vertex_count, pairs))
}

impl Graph {
    fn from_sorted_pairs(vertex_count: usize, endpoints: Vec<(VertexId, VertexId)>) -> Self {
        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in &endpoints {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..vertex_count].to_vec();
        let mut targets = vec![0; offsets[vertex_count]];
        let mut incident = vec![EdgeId(0); offsets[vertex_count]];
        // Endpoints are sorted by (u, v), so each adjacency list comes out
        // sorted: a vertex first receives its smaller neighbors (as v, in u
        // order) and then its larger ones (as u, in v order).
        for (i, &(u, v)) in endpoints.iter().enumerate() {
            let id = EdgeId(i as u32);
            let slot = &mut fill[v as usize];
            targets[*slot] = u;
            incident[*slot] = id;
            *slot += 1;
        }
        for (i, &(u, v)) in endpoints.iter().enumerate() {
            let id = EdgeId(i as u32);
            let slot = &mut fill[u as usize];
            targets[*slot] = v;
            incident[*slot] = id;
            *slot += 1;
        }
        Graph {
            offsets,
            targets,
            incident,
            endpoints,
        }
    }

    pub fn empty() -> Self {
        Graph::from_sorted_pairs(0, Vec::new())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbor list of `v`.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids parallel to [`Graph::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        let v = v as usize;
        &self.incident[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbor, edge)` pairs around `v`.
    #[inline]
    pub fn adjacency(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.neighbors(v)
            .iter()
            .copied()
            .zip(self.incident_edges(v).iter().copied())
    }

    /// Endpoints `(u, v)` with `u < v`.
    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.endpoints[e.index()]
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        if a as usize >= self.vertex_count() || b as usize >= self.vertex_count() {
            return None;
        }
        let (x, y) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        self.neighbors(x)
            .binary_search(&y)
            .ok()
            .map(|i| self.incident_edges(x)[i])
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.edge_count() as u32).map(EdgeId)
    }

    pub fn edge_list(&self) -> &[(VertexId, VertexId)] {
        &self.endpoints
    }
}

/// Marks which edges are still present. Removing an edge only hides it; the
/// underlying [`Graph`] is never modified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMask {
    alive: Vec<bool>,
    alive_count: usize,
}

impl EdgeMask {
    pub fn full(g: &Graph) -> Self {
        EdgeMask {
            alive: vec![true; g.edge_count()],
            alive_count: g.edge_count(),
        }
    }

    pub fn from_fn(g: &Graph, mut keep: impl FnMut(EdgeId) -> bool) -> Self {
        let alive: Vec<bool> = g.edges().map(&mut keep).collect();
        let alive_count = alive.iter().filter(|&&a| a).count();
        EdgeMask { alive, alive_count }
    }

    #[inline]
    pub fn is_alive(&self, e: EdgeId) -> bool {
        self.alive[e.index()]
    }

    pub fn remove(&mut self, e: EdgeId) -> bool {
        let was = std::mem::replace(&mut self.alive[e.index()], false);
        if was {
            self.alive_count -= 1;
        }
        was
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn alive_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| EdgeId(i as u32))
    }
}

/// Per-edge support values (h-supports or current H-index values).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HSupportArray(pub Vec<u32>);

impl HSupportArray {
    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.iter().copied().max()
    }
}

impl Index<EdgeId> for HSupportArray {
    type Output = u32;

    fn index(&self, e: EdgeId) -> &u32 {
        &self.0[e.index()]
    }
}

const UNSEEN: u32 = u32::MAX;

/// Reusable breadth-first search bounded by a hop count.
#[derive(Clone, Debug)]
pub struct HopBfs {
    dist: Vec<u32>,
    order: Vec<VertexId>,
    source: Option<VertexId>,
}

impl HopBfs {
    pub fn new(vertex_count: usize) -> Self {
        HopBfs {
            dist: vec![UNSEEN; vertex_count],
            order: Vec::new(),
            source: None,
        }
    }

    fn clear(&mut self) {
        for &v in &self.order {
            self.dist[v as usize] = UNSEEN;
        }
        self.order.clear();
        self.source = None;
    }

    /// Visits every vertex within `h` hops of `source` over edges accepted by
    /// `alive`.
    pub fn run(
        &mut self,
        g: &Graph,
        source: VertexId,
        h: u32,
        alive: impl Fn(EdgeId) -> bool,
    ) -> &mut Self {
        self.clear();
        self.source = Some(source);
        self.dist[source as usize] = 0;
        self.order.push(source);
        let mut head = 0;
        while head < self.order.len() {
            let x = self.order[head];
            head += 1;
            let d = self.dist[x as usize];
            if d == h {
                // BFS order is level order, so every later vertex is at depth h too.
                break;
            }
            for (y, e) in g.adjacency(x) {
                if self.dist[y as usize] == UNSEEN && alive(e) {
                    self.dist[y as usize] = d + 1;
                    self.order.push(y);
                }
            }
        }
        self
    }

    pub fn source(&self) -> Option<VertexId> {
        self.source
    }

    #[inline]
    pub fn dist(&self, v: VertexId) -> Option<u32> {
        match self.dist[v as usize] {
            UNSEEN => None,
            d => Some(d),
        }
    }

    /// Vertices reached by the last run, source first, in BFS order.
    pub fn reached(&self) -> &[VertexId] {
        &self.order
    }
}

/// Scratch for common-neighbor queries. Remembers the BFS of the last first
/// endpoint so consecutive edges sharing it reuse the traversal.
#[derive(Clone, Debug)]
pub struct NeighborhoodScratch {
    from_u: HopBfs,
    from_v: HopBfs,
    cached_u: Option<(VertexId, u32)>,
}

impl NeighborhoodScratch {
    pub fn new(vertex_count: usize) -> Self {
        NeighborhoodScratch {
            from_u: HopBfs::new(vertex_count),
            from_v: HopBfs::new(vertex_count),
            cached_u: None,
        }
    }

    /// Forgets the cached traversal; needed whenever the edge filter changes.
    pub fn invalidate(&mut self) {
        self.cached_u = None;
    }

    /// Writes the sorted common h-neighbors of `e` into `out`.
    pub fn common_neighbors_into<F>(
        &mut self,
        g: &Graph,
        e: EdgeId,
        h: u32,
        alive: F,
        out: &mut Vec<VertexId>,
    ) where
        F: Fn(EdgeId) -> bool + Copy,
    {
        let (u, v) = g.endpoints(e);
        if self.cached_u != Some((u, h)) {
            self.from_u.run(g, u, h, alive);
            self.cached_u = Some((u, h));
        }
        self.from_v.run(g, v, h, alive);
        out.clear();
        // Scan the smaller ball and probe the other one.
        let (small, large) = if self.from_v.reached().len() <= self.from_u.reached().len() {
            (&self.from_v, &self.from_u)
        } else {
            (&self.from_u, &self.from_v)
        };
        out.extend(
            small
                .reached()
                .iter()
                .copied()
                .filter(|&w| w != u && w != v && large.dist(w).is_some()),
        );
        out.sort_unstable();
    }

    pub fn count_common_neighbors<F>(&mut self, g: &Graph, e: EdgeId, h: u32, alive: F) -> u32
    where
        F: Fn(EdgeId) -> bool + Copy,
    {
        let (u, v) = g.endpoints(e);
        if self.cached_u != Some((u, h)) {
            self.from_u.run(g, u, h, alive);
            self.cached_u = Some((u, h));
        }
        self.from_v.run(g, v, h, alive);
        let (small, large) = if self.from_v.reached().len() <= self.from_u.reached().len() {
            (&self.from_v, &self.from_u)
        } else {
            (&self.from_u, &self.from_v)
        };
        small
            .reached()
            .iter()
            .filter(|&&w| w != u && w != v && large.dist(w).is_some())
            .count() as u32
    }
}

/// All `w != v` within `h` hops of `v` in the alive subgraph, sorted.
pub fn h_neighbors(g: &Graph, mask: &EdgeMask, v: VertexId, h: u32) -> Result<Vec<VertexId>> {
    check_hop(h)?;
    let mut bfs = HopBfs::new(g.vertex_count());
    bfs.run(g, v, h, |e| mask.is_alive(e));
    let mut out: Vec<VertexId> = bfs.reached()[1..].to_vec();
    out.sort_unstable();
    Ok(out)
}

/// Vertices within `h` hops of both endpoints of `e`, excluding the endpoints.
pub fn common_h_neighbors(g: &Graph, mask: &EdgeMask, e: EdgeId, h: u32) -> Result<Vec<VertexId>> {
    check_hop(h)?;
    let mut scratch = NeighborhoodScratch::new(g.vertex_count());
    let mut out = Vec::new();
    scratch.common_neighbors_into(g, e, h, |x| mask.is_alive(x), &mut out);
    Ok(out)
}

pub fn h_support(g: &Graph, mask: &EdgeMask, e: EdgeId, h: u32) -> Result<u32> {
    check_hop(h)?;
    let mut scratch = NeighborhoodScratch::new(g.vertex_count());
    Ok(scratch.count_common_neighbors(g, e, h, |x| mask.is_alive(x)))
}

/// h-support of every edge on the full graph, single-threaded.
pub fn all_h_supports(g: &Graph, h: u32) -> Result<HSupportArray> {
    all_h_supports_parallel(g, h, 1)
}

/// h-support of every edge on the full graph, split across `workers` threads
/// in contiguous edge-id blocks.
pub fn all_h_supports_parallel(g: &Graph, h: u32, workers: usize) -> Result<HSupportArray> {
    check_hop(h)?;
    if workers == 0 {
        return Err(Error::InvalidWorkers);
    }
    let blocks = for_each_block(g.edge_count(), workers, |range| {
        let mut scratch = NeighborhoodScratch::new(g.vertex_count());
        range
            .map(|i| scratch.count_common_neighbors(g, EdgeId(i as u32), h, |_| true))
            .collect::<Vec<u32>>()
    });
    Ok(HSupportArray(blocks.concat()))
}
