//! Benchmark harness: runs a grid of (mode, h, threads) cells on one graph
//! and tabulates mean wall time, rounds, evaluation counts and speedup over
//! the single-thread cell of the same mode and h.

use std::io::Write;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hindex::{EngineConfig, FixpointEngine};
use crate::peel::{peel_with, PopOrder, TrussnessResult};
use crate::stats::{CancelToken, Mode, RunStats};

pub const DEFAULT_REPS: usize = 3;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchCell {
    pub mode: Mode,
    pub h: u32,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    /// Did not finish within the timeout.
    Inf,
    Failed(String),
}

impl CellStatus {
    pub fn label(&self) -> &str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Inf => "INF",
            CellStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub cell: BenchCell,
    pub status: CellStatus,
    /// Stats of the last repetition, with `wall_time_ms` replaced by the mean.
    pub stats: Option<RunStats>,
    pub speedup: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub reps: usize,
    /// Budget for all repetitions of one cell.
    pub timeout: Option<Duration>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            reps: DEFAULT_REPS,
            timeout: Some(DEFAULT_TIMEOUT),
        }
    }
}

/// Runs one decomposition in any mode, honoring `cancel`.
pub fn run_mode(
    g: &Graph,
    mode: Mode,
    h: u32,
    workers: usize,
    cancel: Option<CancelToken>,
) -> Result<(TrussnessResult, RunStats)> {
    if workers == 0 {
        return Err(Error::InvalidWorkers);
    }
    match mode {
        Mode::Peel => peel_with(g, h, PopOrder::LowestFirst, cancel.as_ref()),
        _ => {
            let mut config = EngineConfig::new(mode, h, workers)?;
            config.cancel = cancel;
            let mut engine = FixpointEngine::new(g, config)?;
            engine.run()?;
            Ok((engine.result(), engine.stats()))
        }
    }
}

/// Cartesian product of modes, hop thresholds and thread counts.
pub fn grid(modes: &[Mode], hs: &[u32], workers: &[usize]) -> Vec<BenchCell> {
    let mut cells = Vec::new();
    for &h in hs {
        for &mode in modes {
            for &w in workers {
                cells.push(BenchCell {
                    mode,
                    h,
                    workers: w,
                });
            }
        }
    }
    cells
}

pub fn run_cell(g: &Graph, cell: BenchCell, options: &BenchOptions) -> BenchRow {
    let reps = options.reps.max(1);
    let token = CancelToken::new();
    let (tx, rx) = mpsc::channel();
    let outcome = thread::scope(|scope| {
        let worker_token = token.clone();
        scope.spawn(move || {
            let mut total_ms = 0.0;
            let mut last = None;
            for _ in 0..reps {
                match run_mode(
                    g,
                    cell.mode,
                    cell.h,
                    cell.workers,
                    Some(worker_token.clone()),
                ) {
                    Ok((_, stats)) => {
                        total_ms += stats.wall_time_ms;
                        last = Some(stats);
                    }
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        return;
                    }
                }
            }
            let mut stats = last.expect("at least one repetition");
            stats.wall_time_ms = total_ms / reps as f64;
            let _ = tx.send(Ok(stats));
        });
        let started = Instant::now();
        let received = match options.timeout {
            Some(limit) => rx
                .recv_timeout(limit.saturating_sub(started.elapsed()))
                .ok(),
            None => rx.recv().ok(),
        };
        if received.is_none() {
            token.cancel();
        }
        received
    });
    let (status, stats) = match outcome {
        None | Some(Err(Error::Cancelled)) => (CellStatus::Inf, None),
        Some(Err(e)) => (CellStatus::Failed(e.to_string()), None),
        Some(Ok(stats)) => (CellStatus::Ok, Some(stats)),
    };
    BenchRow {
        cell,
        status,
        stats,
        speedup: None,
    }
}

/// Runs every cell in order (never concurrently) and fills in speedups.
pub fn run_bench(
    g: &Graph,
    cells: &[BenchCell],
    options: &BenchOptions,
    mut on_row: impl FnMut(&BenchRow),
) -> Vec<BenchRow> {
    let mut rows = Vec::with_capacity(cells.len());
    for &cell in cells {
        let row = run_cell(g, cell, options);
        on_row(&row);
        rows.push(row);
    }
    fill_speedups(&mut rows);
    rows
}

/// Speedup = mean time of the 1-thread cell with the same mode and h divided
/// by this cell's mean time.
pub fn fill_speedups(rows: &mut [BenchRow]) {
    let baselines: Vec<(Mode, u32, f64)> = rows
        .iter()
        .filter(|r| r.cell.workers == 1)
        .filter_map(|r| {
            r.stats
                .as_ref()
                .map(|s| (r.cell.mode, r.cell.h, s.wall_time_ms))
        })
        .collect();
    for row in rows.iter_mut() {
        row.speedup = row.stats.as_ref().and_then(|s| {
            baselines
                .iter()
                .find(|(m, h, _)| *m == row.cell.mode && *h == row.cell.h)
                .map(|&(_, _, base)| {
                    if s.wall_time_ms > 0.0 {
                        base / s.wall_time_ms
                    } else {
                        0.0
                    }
                })
        });
    }
}

/// Mean rounds(async) / rounds(sync) over the h values where both finished.
pub fn async_round_ratio(rows: &[BenchRow]) -> Option<f64> {
    let rounds = |mode: Mode, h: u32| {
        rows.iter()
            .filter(|r| r.cell.mode == mode && r.cell.h == h)
            .find_map(|r| r.stats.as_ref().map(|s| s.rounds))
    };
    let mut hs: Vec<u32> = rows.iter().map(|r| r.cell.h).collect();
    hs.sort_unstable();
    hs.dedup();
    let ratios: Vec<f64> = hs
        .into_iter()
        .filter_map(|h| match (rounds(Mode::Async, h), rounds(Mode::Sync, h)) {
            (Some(a), Some(s)) if s > 0 => Some(a as f64 / s as f64),
            _ => None,
        })
        .collect();
    if ratios.is_empty() {
        None
    } else {
        Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }
}

pub fn write_table(out: &mut impl Write, rows: &[BenchRow]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<7} {:>3} {:>7} {:>7} {:>12} {:>12} {:>14} {:>8}  status",
        "mode", "h", "threads", "rounds", "evaluations", "skipped", "wall_time_ms", "speedup"
    )?;
    for row in rows {
        let speedup = row.speedup.map_or("-".to_string(), |s| format!("{s:.2}"));
        match &row.stats {
            Some(s) => writeln!(
                out,
                "{:<7} {:>3} {:>7} {:>7} {:>12} {:>12} {:>14.3} {:>8}  {}",
                row.cell.mode,
                row.cell.h,
                row.cell.workers,
                s.rounds,
                s.evaluations,
                s.skipped,
                s.wall_time_ms,
                speedup,
                row.status.label()
            )?,
            None => writeln!(
                out,
                "{:<7} {:>3} {:>7} {:>7} {:>12} {:>12} {:>14} {:>8}  {}",
                row.cell.mode,
                row.cell.h,
                row.cell.workers,
                "-",
                "-",
                "-",
                "-",
                speedup,
                row.status.label()
            )?,
        }
        if let CellStatus::Failed(msg) = &row.status {
            writeln!(out, "        error: {msg}")?;
        }
    }
    Ok(())
}

pub const CSV_HEADER: &str =
    "mode,h,threads,rounds,evaluations,skipped,wall_time_ms,vertices,edges,speedup,status";

pub fn write_csv(out: &mut impl Write, rows: &[BenchRow]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let speedup = row.speedup.map_or(String::new(), |s| format!("{s:.4}"));
        match &row.stats {
            Some(s) => writeln!(out, "{},{},{}", s.to_csv_row(), speedup, row.status.label())?,
            None => writeln!(
                out,
                "{},{},{},,,,,,,{},{}",
                row.cell.mode,
                row.cell.h,
                row.cell.workers,
                speedup,
                row.status.label()
            )?,
        }
    }
    Ok(())
}
