use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Sequential bin-sort peeling.
    Peel,
    /// Fixed-point rounds reading a frozen snapshot of the previous round.
    Sync,
    /// Fixed-point sweeps reading the live values.
    Async,
    /// Asynchronous sweeps that skip edges whose value provably cannot move.
    Pruned,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Peel, Mode::Sync, Mode::Async, Mode::Pruned];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Peel => "peel",
            Mode::Sync => "sync",
            Mode::Async => "async",
            Mode::Pruned => "pruned",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peel" => Ok(Mode::Peel),
            "sync" => Ok(Mode::Sync),
            "async" => Ok(Mode::Async),
            "pruned" => Ok(Mode::Pruned),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode {other:?} (expected peel, sync, async or pruned)"
            ))),
        }
    }
}

/// Statistics of one decomposition run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub mode: Mode,
    pub h: u32,
    pub workers: usize,
    /// Full sweeps including the final one that changed nothing; 0 for peel.
    pub rounds: u64,
    /// `compute_h_sup` calls, or support recomputations when peeling.
    pub evaluations: u64,
    /// Evaluations avoided by pruning.
    pub skipped: u64,
    pub wall_time_ms: f64,
    pub edge_count: usize,
    pub vertex_count: usize,
}

impl RunStats {
    pub const CSV_HEADER: &'static str =
        "mode,h,threads,rounds,evaluations,skipped,wall_time_ms,vertices,edges";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{},{}",
            self.mode,
            self.h,
            self.workers,
            self.rounds,
            self.evaluations,
            self.skipped,
            self.wall_time_ms,
            self.vertex_count,
            self.edge_count
        )
    }

    /// Single-line `key=value` record.
    pub fn to_key_values(&self) -> String {
        format!(
            "mode={} h={} threads={} rounds={} evaluations={} skipped={} wall_time_ms={:.3} vertices={} edges={}",
            self.mode,
            self.h,
            self.workers,
            self.rounds,
            self.evaluations,
            self.skipped,
            self.wall_time_ms,
            self.vertex_count,
            self.edge_count
        )
    }
}

/// Shared flag that asks a running engine to stop at its next checkpoint.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }

    pub fn check(&self) -> Result<()> {
        if self.is_cancelled() {
            Err(Error::Cancelled)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_round_trip_through_strings() {
        for mode in Mode::ALL {
            assert_eq!(mode.as_str().parse::<Mode>().unwrap(), mode);
        }
        assert!("fast".parse::<Mode>().is_err());
    }

    #[test]
    fn csv_row_matches_header_width() {
        let stats = RunStats {
            mode: Mode::Sync,
            h: 2,
            workers: 4,
            rounds: 3,
            evaluations: 30,
            skipped: 0,
            wall_time_ms: 1.5,
            edge_count: 10,
            vertex_count: 6,
        };
        assert_eq!(
            stats.to_csv_row().split(',').count(),
            RunStats::CSV_HEADER.split(',').count()
        );
        assert_eq!(stats.to_csv_row(), "sync,2,4,3,30,0,1.500,6,10");
        assert!(stats
            .to_key_values()
            .starts_with("mode=sync h=2 threads=4 rounds=3"));
    }
}
