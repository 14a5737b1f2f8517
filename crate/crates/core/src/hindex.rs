//! Parallel fixed-point decomposition over per-edge higher-order H-indices.
//!
//! Every edge starts at its h-support. A sweep replaces the value of edge
//! `(u, v)` by the H-index of `min(P(u, w), P(v, w))` over its common
//! h-neighbors `w` in the full graph, where `P(s, w)` is the best bottleneck
//! value (max over walks of at most `h` hops of the min edge value on the walk)
//! from `s` to `w`. Values never increase and settle at `t(e, h) - 2`.
//!
//! Three execution strategies share one engine:
//!
//! * synchronous: each sweep reads a frozen copy of the previous sweep;
//! * asynchronous: each sweep reads the live values, including ones already
//!   lowered earlier in the same sweep;
//! * pruned: asynchronous, and an edge is skipped when none of the edges it
//!   depends on crossed its current value since its last evaluation.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Instant;

use crate::error::{check_hop, Error, Result};
use crate::graph::{EdgeId, Graph, HopBfs, NeighborhoodScratch, VertexId};
use crate::parallel::for_each_block;
use crate::peel::TrussnessResult;
use crate::stats::{CancelToken, Mode, RunStats};

/// Dependency sets larger than this are not stored; those edges are always
/// recomputed under pruning.
pub const DEFAULT_DEPENDENCY_CAP: usize = 4096;

const UNREACHED: u32 = u32::MAX;

/// Largest `y` such that at least `y` of `values` are `>= y`.
pub fn h_index(values: &[u32]) -> u32 {
    h_index_with(values, &mut Vec::new())
}

fn h_index_with(values: &[u32], counts: &mut Vec<u32>) -> u32 {
    let n = values.len();
    counts.clear();
    counts.resize(n + 1, 0);
    for &x in values {
        counts[(x as usize).min(n)] += 1;
    }
    let mut at_least = 0;
    for y in (1..=n).rev() {
        at_least += counts[y];
        if at_least as usize >= y {
            return y as u32;
        }
    }
    0
}

/// Hop-bounded bottleneck values from one source.
///
/// Hop `d` extends the entries kept at hop `d - 1` by one edge. An entry is
/// kept only when it beats every value already recorded for its vertex: an
/// equal-or-better value reached in fewer hops dominates it for all longer
/// walks.
#[derive(Clone, Debug)]
pub struct PathKeys {
    best: Vec<u32>,
    next_value: Vec<u32>,
    touched: Vec<VertexId>,
    frontier: Vec<(VertexId, u32)>,
    next: Vec<VertexId>,
    source: Option<VertexId>,
}

impl PathKeys {
    pub fn new(vertex_count: usize) -> Self {
        PathKeys {
            best: vec![UNREACHED; vertex_count],
            next_value: vec![UNREACHED; vertex_count],
            touched: Vec::new(),
            frontier: Vec::new(),
            next: Vec::new(),
            source: None,
        }
    }

    pub fn compute(
        &mut self,
        g: &Graph,
        source: VertexId,
        h: u32,
        value: impl Fn(EdgeId) -> u32,
    ) -> &Self {
        for &x in &self.touched {
            self.best[x as usize] = UNREACHED;
        }
        self.touched.clear();
        self.frontier.clear();
        self.source = Some(source);

        for (v, e) in g.adjacency(source) {
            let key = value(e);
            self.best[v as usize] = key;
            self.touched.push(v);
            self.frontier.push((v, key));
        }

        for hop in 2..=h {
            let last = hop == h;
            self.next.clear();
            for &(v, through) in &self.frontier {
                for (w, e) in g.adjacency(v) {
                    if w == source {
                        continue;
                    }
                    let key = through.min(value(e));
                    let best = &mut self.best[w as usize];
                    if *best != UNREACHED && key <= *best {
                        continue;
                    }
                    if *best == UNREACHED {
                        self.touched.push(w);
                    }
                    *best = key;
                    if !last {
                        let slot = &mut self.next_value[w as usize];
                        if *slot == UNREACHED {
                            self.next.push(w);
                            *slot = key;
                        } else {
                            *slot = (*slot).max(key);
                        }
                    }
                }
            }
            self.frontier.clear();
            for &w in &self.next {
                let slot = &mut self.next_value[w as usize];
                self.frontier.push((w, *slot));
                *slot = UNREACHED;
            }
            if self.frontier.is_empty() {
                break;
            }
        }
        self
    }

    /// Key from the last source to `w`, if `w` was reached.
    #[inline]
    pub fn key(&self, w: VertexId) -> Option<u32> {
        match self.best[w as usize] {
            UNREACHED => None,
            k => Some(k),
        }
    }

    pub fn source(&self) -> Option<VertexId> {
        self.source
    }
}

/// Bottleneck keys from `source` to each reachable target using walks of at
/// most `h` hops over `edge_values`.
pub fn path_keys(
    g: &Graph,
    source: VertexId,
    targets: &[VertexId],
    h: u32,
    edge_values: &[u32],
) -> Result<BTreeMap<VertexId, u32>> {
    check_hop(h)?;
    let mut keys = PathKeys::new(g.vertex_count());
    keys.compute(g, source, h, |e| edge_values[e.index()]);
    Ok(targets
        .iter()
        .filter_map(|&w| keys.key(w).map(|k| (w, k)))
        .collect())
}

/// Common h-neighbors of every edge in the full graph, computed once.
#[derive(Clone, Debug)]
pub struct CommonNeighborCache {
    h: u32,
    offsets: Vec<usize>,
    vertices: Vec<VertexId>,
}

impl CommonNeighborCache {
    pub fn build(g: &Graph, h: u32, workers: usize) -> Result<Self> {
        check_hop(h)?;
        if workers == 0 {
            return Err(Error::InvalidWorkers);
        }
        let blocks = for_each_block(g.edge_count(), workers, |range| {
            let mut scratch = NeighborhoodScratch::new(g.vertex_count());
            let mut lens = Vec::with_capacity(range.len());
            let mut flat = Vec::new();
            let mut buf = Vec::new();
            for i in range {
                scratch.common_neighbors_into(g, EdgeId(i as u32), h, |_| true, &mut buf);
                lens.push(buf.len());
                flat.extend_from_slice(&buf);
            }
            (lens, flat)
        });
        let mut offsets = Vec::with_capacity(g.edge_count() + 1);
        offsets.push(0);
        let mut vertices = Vec::with_capacity(blocks.iter().map(|b| b.1.len()).sum());
        for (lens, flat) in blocks {
            for len in lens {
                offsets.push(offsets.last().unwrap() + len);
            }
            vertices.extend(flat);
        }
        Ok(CommonNeighborCache {
            h,
            offsets,
            vertices,
        })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    #[inline]
    pub fn get(&self, e: EdgeId) -> &[VertexId] {
        &self.vertices[self.offsets[e.index()]..self.offsets[e.index() + 1]]
    }

    /// h-support of `e` on the full graph.
    pub fn support(&self, e: EdgeId) -> u32 {
        self.get(e).len() as u32
    }

    pub fn supports(&self) -> Vec<u32> {
        self.offsets
            .windows(2)
            .map(|w| (w[1] - w[0]) as u32)
            .collect()
    }
}

/// Per-worker state for evaluating edges. Keeps the key table of the last
/// first endpoint, since consecutive edge ids usually share it.
#[derive(Clone, Debug)]
pub struct HSupEvaluator {
    from_u: PathKeys,
    from_v: PathKeys,
    mins: Vec<u32>,
    counts: Vec<u32>,
    cached_u: bool,
}

impl HSupEvaluator {
    pub fn new(vertex_count: usize) -> Self {
        HSupEvaluator {
            from_u: PathKeys::new(vertex_count),
            from_v: PathKeys::new(vertex_count),
            mins: Vec::new(),
            counts: Vec::new(),
            cached_u: false,
        }
    }

    /// Drops the reused key table; required when the values it was built
    /// from must not be reused.
    pub fn invalidate(&mut self) {
        self.cached_u = false;
    }

    pub fn evaluate<F>(
        &mut self,
        g: &Graph,
        cache: &CommonNeighborCache,
        e: EdgeId,
        value: F,
    ) -> u32
    where
        F: Fn(EdgeId) -> u32 + Copy,
    {
        let targets = cache.get(e);
        if targets.is_empty() {
            return 0;
        }
        let h = cache.h();
        let (u, v) = g.endpoints(e);
        if !self.cached_u || self.from_u.source() != Some(u) {
            self.from_u.compute(g, u, h, value);
            self.cached_u = true;
        }
        self.from_v.compute(g, v, h, value);
        self.mins.clear();
        for &w in targets {
            let pu = self
                .from_u
                .key(w)
                .expect("common neighbor unreachable from u");
            let pv = self
                .from_v
                .key(w)
                .expect("common neighbor unreachable from v");
            self.mins.push(pu.min(pv));
        }
        h_index_with(&self.mins, &mut self.counts)
    }
}

/// H-index over `min(P(u, w), P(v, w))` for the cached common h-neighbors of
/// `e = (u, v)`, with keys taken over `edge_values`.
pub fn compute_h_sup(
    g: &Graph,
    cache: &CommonNeighborCache,
    e: EdgeId,
    edge_values: &[u32],
) -> u32 {
    HSupEvaluator::new(g.vertex_count()).evaluate(g, cache, e, |f| edge_values[f.index()])
}

/// Edges other than `e` whose both endpoints lie within `h` hops of `u` or
/// `v`. Any walk of at most `h` hops from an endpoint of `e` stays inside this
/// set, so these are the only values that can influence `e`'s evaluation.
pub fn dependency_edges(g: &Graph, e: EdgeId, h: u32) -> Result<Vec<EdgeId>> {
    check_hop(h)?;
    let mut scratch = DependencyScratch::new(g.vertex_count());
    let mut out = Vec::new();
    scratch.collect(g, e, h, usize::MAX, &mut out);
    Ok(out)
}

struct DependencyScratch {
    from_u: HopBfs,
    from_v: HopBfs,
}

impl DependencyScratch {
    fn new(vertex_count: usize) -> Self {
        DependencyScratch {
            from_u: HopBfs::new(vertex_count),
            from_v: HopBfs::new(vertex_count),
        }
    }

    /// Fills `out` with the sorted dependency set of `e`. Returns false, with
    /// `out` left partial, once more than `cap` edges are found.
    fn collect(&mut self, g: &Graph, e: EdgeId, h: u32, cap: usize, out: &mut Vec<EdgeId>) -> bool {
        let (u, v) = g.endpoints(e);
        self.from_u.run(g, u, h, |_| true);
        self.from_v.run(g, v, h, |_| true);
        out.clear();
        let (from_u, from_v) = (&self.from_u, &self.from_v);
        let in_ball = |x: VertexId| from_u.dist(x).is_some() || from_v.dist(x).is_some();
        let ball = from_u.reached().iter().chain(
            from_v
                .reached()
                .iter()
                .filter(|&&x| from_u.dist(x).is_none()),
        );
        for &x in ball {
            for (y, f) in g.adjacency(x) {
                if x < y && f != e && in_ball(y) {
                    out.push(f);
                    if out.len() > cap {
                        return false;
                    }
                }
            }
        }
        out.sort_unstable();
        true
    }
}

/// Cached dependency sets; `None` for edges over the cap.
#[derive(Clone, Debug)]
pub struct DependencyIndex {
    offsets: Vec<usize>,
    capped: Vec<bool>,
    edges: Vec<EdgeId>,
}

impl DependencyIndex {
    pub fn build(g: &Graph, h: u32, cap: usize, workers: usize) -> Result<Self> {
        check_hop(h)?;
        if workers == 0 {
            return Err(Error::InvalidWorkers);
        }
        let blocks = for_each_block(g.edge_count(), workers, |range| {
            let mut scratch = DependencyScratch::new(g.vertex_count());
            let mut buf = Vec::new();
            let mut lens = Vec::with_capacity(range.len());
            let mut capped = Vec::with_capacity(range.len());
            let mut flat = Vec::new();
            for i in range {
                if scratch.collect(g, EdgeId(i as u32), h, cap, &mut buf) {
                    lens.push(buf.len());
                    capped.push(false);
                    flat.extend_from_slice(&buf);
                } else {
                    lens.push(0);
                    capped.push(true);
                }
            }
            (lens, capped, flat)
        });
        let mut offsets = Vec::with_capacity(g.edge_count() + 1);
        offsets.push(0);
        let mut all_capped = Vec::with_capacity(g.edge_count());
        let mut edges = Vec::new();
        for (lens, capped, flat) in blocks {
            for len in lens {
                offsets.push(offsets.last().unwrap() + len);
            }
            all_capped.extend(capped);
            edges.extend(flat);
        }
        Ok(DependencyIndex {
            offsets,
            capped: all_capped,
            edges,
        })
    }

    pub fn get(&self, e: EdgeId) -> Option<&[EdgeId]> {
        if self.capped[e.index()] {
            None
        } else {
            Some(&self.edges[self.offsets[e.index()]..self.offsets[e.index() + 1]])
        }
    }

    pub fn capped_count(&self) -> usize {
        self.capped.iter().filter(|&&c| c).count()
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub h: u32,
    pub workers: usize,
    /// Read live values instead of the previous sweep's snapshot.
    pub asynchronous: bool,
    pub pruning: bool,
    pub dependency_cap: usize,
    pub cancel: Option<CancelToken>,
}

impl EngineConfig {
    pub fn new(mode: Mode, h: u32, workers: usize) -> Result<Self> {
        let (asynchronous, pruning) = match mode {
            Mode::Sync => (false, false),
            Mode::Async => (true, false),
            Mode::Pruned => (true, true),
            Mode::Peel => {
                return Err(Error::InvalidArgument(
                    "peel is not a fixed-point mode".to_string(),
                ))
            }
        };
        Ok(EngineConfig {
            h,
            workers,
            asynchronous,
            pruning,
            dependency_cap: DEFAULT_DEPENDENCY_CAP,
            cancel: None,
        })
    }

    /// Reported mode. Pruning on synchronous sweeps also reports `pruned`.
    pub fn mode(&self) -> Mode {
        match (self.asynchronous, self.pruning) {
            (_, true) => Mode::Pruned,
            (true, false) => Mode::Async,
            (false, false) => Mode::Sync,
        }
    }
}

/// Per-edge iteration state.
#[derive(Debug)]
pub struct HState {
    /// Live values, written by exactly one worker per sweep.
    pub current: Vec<AtomicU32>,
    /// Values at the start of the running (or last finished) sweep.
    pub previous: Vec<u32>,
    /// Values at the start of the sweep before that.
    pub before_previous: Vec<u32>,
    pub round: u64,
    pub changed_last_round: Vec<bool>,
}

impl HState {
    fn new(initial: Vec<u32>) -> Self {
        HState {
            current: initial.iter().map(|&x| AtomicU32::new(x)).collect(),
            changed_last_round: vec![false; initial.len()],
            before_previous: initial.clone(),
            previous: initial,
            round: 0,
        }
    }

    pub fn snapshot(&self) -> Vec<u32> {
        self.current
            .iter()
            .map(|x| x.load(Ordering::Relaxed))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub round: u64,
    pub changed: u64,
    pub evaluations: u64,
    pub skipped: u64,
}

pub struct FixpointEngine<'g> {
    graph: &'g Graph,
    config: EngineConfig,
    cache: CommonNeighborCache,
    deps: Option<DependencyIndex>,
    state: HState,
    evaluations: u64,
    skipped: u64,
    converged: bool,
    started: Instant,
    elapsed_ms: f64,
}

impl<'g> FixpointEngine<'g> {
    /// Builds the common-neighbor cache (and dependency sets when pruning) and
    /// sets every edge to its h-support.
    pub fn new(graph: &'g Graph, config: EngineConfig) -> Result<Self> {
        check_hop(config.h)?;
        if config.workers == 0 {
            return Err(Error::InvalidWorkers);
        }
        let started = Instant::now();
        let cache = CommonNeighborCache::build(graph, config.h, config.workers)?;
        let deps = if config.pruning {
            Some(DependencyIndex::build(
                graph,
                config.h,
                config.dependency_cap,
                config.workers,
            )?)
        } else {
            None
        };
        let state = HState::new(cache.supports());
        Ok(FixpointEngine {
            graph,
            config,
            cache,
            deps,
            state,
            evaluations: 0,
            skipped: 0,
            converged: graph.edge_count() == 0,
            started,
            elapsed_ms: 0.0,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn cache(&self) -> &CommonNeighborCache {
        &self.cache
    }

    pub fn dependencies(&self) -> Option<&DependencyIndex> {
        self.deps.as_ref()
    }

    pub fn state(&self) -> &HState {
        &self.state
    }

    pub fn values(&self) -> Vec<u32> {
        self.state.snapshot()
    }

    pub fn round(&self) -> u64 {
        self.state.round
    }

    pub fn is_converged(&self) -> bool {
        self.converged
    }

    /// Runs one sweep over every edge.
    pub fn step(&mut self) -> Result<SweepReport> {
        if let Some(token) = &self.config.cancel {
            token.check()?;
        }
        let state = &mut self.state;
        std::mem::swap(&mut state.before_previous, &mut state.previous);
        for (slot, cell) in state.previous.iter_mut().zip(&state.current) {
            *slot = cell.load(Ordering::Relaxed);
        }
        state.round += 1;

        let g = self.graph;
        let cache = &self.cache;
        let prune = if state.round >= 2 {
            self.deps.as_ref()
        } else {
            None
        };
        let state = &self.state;
        let cancel = self.config.cancel.as_ref();
        let edge_count = g.edge_count();

        let sweep = |range: Range<usize>| -> SweepReport {
            let mut evaluator = HSupEvaluator::new(g.vertex_count());
            if self.config.asynchronous {
                let live = |f: EdgeId| state.current[f.index()].load(Ordering::Relaxed);
                sweep_block(g, cache, state, prune, cancel, range, &mut evaluator, live)
            } else {
                let frozen = |f: EdgeId| state.previous[f.index()];
                sweep_block(
                    g,
                    cache,
                    state,
                    prune,
                    cancel,
                    range,
                    &mut evaluator,
                    frozen,
                )
            }
        };
        let parts = for_each_block(edge_count, self.config.workers, sweep);

        let mut report = SweepReport {
            round: self.state.round,
            ..SweepReport::default()
        };
        for part in parts {
            report.changed += part.changed;
            report.evaluations += part.evaluations;
            report.skipped += part.skipped;
        }
        if let Some(token) = cancel {
            // A cancelled sweep may have stopped partway through.
            token.check()?;
        }
        let state = &mut self.state;
        for ((changed, cell), &prev) in state
            .changed_last_round
            .iter_mut()
            .zip(&state.current)
            .zip(&state.previous)
        {
            *changed = cell.load(Ordering::Relaxed) != prev;
        }
        self.evaluations += report.evaluations;
        self.skipped += report.skipped;
        if report.changed == 0 {
            self.converged = true;
        }
        self.elapsed_ms = self.started.elapsed().as_secs_f64() * 1e3;
        Ok(report)
    }

    /// Sweeps until a sweep changes nothing.
    pub fn run(&mut self) -> Result<()> {
        self.run_observed(|_, _| {})
    }

    /// Like [`FixpointEngine::run`], calling `observe(round, values)` after
    /// every sweep.
    pub fn run_observed(&mut self, mut observe: impl FnMut(u64, &[u32])) -> Result<()> {
        while !self.converged {
            self.step()?;
            observe(self.state.round, &self.values());
        }
        self.elapsed_ms = self.started.elapsed().as_secs_f64() * 1e3;
        Ok(())
    }

    pub fn result(&self) -> TrussnessResult {
        TrussnessResult {
            h: self.config.h,
            trussness: self.values().into_iter().map(|x| x + 2).collect(),
        }
    }

    pub fn stats(&self) -> RunStats {
        RunStats {
            mode: self.config.mode(),
            h: self.config.h,
            workers: self.config.workers,
            rounds: self.state.round,
            evaluations: self.evaluations,
            skipped: self.skipped,
            wall_time_ms: self.elapsed_ms,
            edge_count: self.graph.edge_count(),
            vertex_count: self.graph.vertex_count(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep_block<F>(
    g: &Graph,
    cache: &CommonNeighborCache,
    state: &HState,
    prune: Option<&DependencyIndex>,
    cancel: Option<&CancelToken>,
    range: Range<usize>,
    evaluator: &mut HSupEvaluator,
    value: F,
) -> SweepReport
where
    F: Fn(EdgeId) -> u32 + Copy,
{
    let mut report = SweepReport::default();
    for i in range {
        if i % 256 == 0 && cancel.is_some_and(CancelToken::is_cancelled) {
            break;
        }
        let e = EdgeId(i as u32);
        let current = state.current[i].load(Ordering::Relaxed);
        if let Some(deps) = prune {
            if can_skip(deps, state, e, current, value) {
                report.skipped += 1;
                continue;
            }
        }
        let next = evaluator.evaluate(g, cache, e, value);
        report.evaluations += 1;
        debug_assert!(
            next <= current,
            "value of {e} rose from {current} to {next}"
        );
        if next != current {
            state.current[i].store(next, Ordering::Relaxed);
            report.changed += 1;
        }
    }
    report
}

/// An edge at value `x` keeps its value when no dependency went from `>= x` to
/// `< x` since it was last evaluated. For each dependency, `old` is its value
/// at the start of the previous sweep (an upper bound on what that
/// evaluation read) and `new` is what an evaluation would read now; it is
/// harmless when unchanged, when it already sat below `x`, or when it is
/// still at least `x`.
fn can_skip<F>(deps: &DependencyIndex, state: &HState, e: EdgeId, x: u32, value: F) -> bool
where
    F: Fn(EdgeId) -> u32,
{
    let Some(list) = deps.get(e) else {
        return false;
    };
    list.iter().all(|&f| {
        let old = state.before_previous[f.index()];
        let new = value(f);
        old == new || old < x || new >= x
    })
}

/// Runs one fixed-point mode to convergence.
pub fn decompose_mode(
    g: &Graph,
    mode: Mode,
    h: u32,
    workers: usize,
) -> Result<(TrussnessResult, RunStats)> {
    let mut engine = FixpointEngine::new(g, EngineConfig::new(mode, h, workers)?)?;
    engine.run()?;
    Ok((engine.result(), engine.stats()))
}

pub fn decompose_sync(g: &Graph, h: u32, workers: usize) -> Result<(TrussnessResult, RunStats)> {
    decompose_mode(g, Mode::Sync, h, workers)
}

pub fn decompose_async(g: &Graph, h: u32, workers: usize) -> Result<(TrussnessResult, RunStats)> {
    decompose_mode(g, Mode::Async, h, workers)
}

pub fn decompose_pruned(g: &Graph, h: u32, workers: usize) -> Result<(TrussnessResult, RunStats)> {
    decompose_mode(g, Mode::Pruned, h, workers)
}
