//! Range verification sweeps.
//!
//! `[lo, hi)` is cut into chunks of `segment_span` even numbers. Each chunk
//! sieves its own window (reaching [`PROBE_MARGIN`] below the chunk so that
//! `e - p1` for small `p1` is a bitmap lookup), finds the minimal partition
//! of every even number, optionally certifies it, and produces a
//! [`RangeReport`]. Chunks run on a rayon pool and are merged in range order
//! by a single collector, which also owns checkpoint writes. Reports do not
//! depend on the chunk size or worker count.

mod checkpoint;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{checkpoint_resume, checkpoint_save, Checkpoint, CheckpointError, SCHEMA};

use crate::geometry::{build_certificate, verify_certificate_with, GeometryError, MAX_RADIUS};
use crate::partitions::{count_partitions, minimal_partition, CometPoint, PartitionError};
use crate::primes::{segment_sieve, sieve_upto, PrimeError, PrimeTable, Windowed, DEFAULT_SEGMENT_SPAN, MAX_TABLE_LIMIT};

/// Primes up to this bound are always available as `p1` probes.
pub const DEFAULT_PROBE_LIMIT: u64 = 100_000;

/// How far below a chunk its sieve window reaches.
pub const PROBE_MARGIN: u64 = 1 << 16;

pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 10_000_000;

/// Chunks handed to the pool per worker between collector passes.
const CHUNKS_PER_WORKER: usize = 4;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("reports [{a_lo}, {a_hi}) and [{b_lo}, {b_hi}) are not adjacent")]
    NotAdjacent { a_lo: u64, a_hi: u64, b_lo: u64, b_hi: u64 },
    #[error("certificate for {e} failed verification")]
    CertificateRejected { e: u64 },
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Prime(#[from] PrimeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub lo: u64,
    /// Exclusive.
    pub hi: u64,
    /// Even numbers per chunk.
    pub segment_span: u64,
    pub workers: usize,
    /// Build and verify a certificate for every instance.
    pub certify: bool,
    pub collect_comet: bool,
    pub checkpoint_path: Option<PathBuf>,
    /// Even numbers between checkpoint writes.
    pub checkpoint_interval: u64,
}

impl SweepConfig {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self {
            lo,
            hi,
            segment_span: DEFAULT_SEGMENT_SPAN,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            certify: true,
            collect_comet: false,
            checkpoint_path: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let fail = |m: String| Err(EngineError::Config(m));
        if self.lo < 6 || self.lo & 1 == 1 {
            return fail(format!("lo = {} must be even and at least 6", self.lo));
        }
        if self.hi & 1 == 1 || self.hi <= self.lo {
            return fail(format!("hi = {} must be even and above lo = {}", self.hi, self.lo));
        }
        if self.segment_span < 2 {
            return fail(format!("segment span {} is below 2", self.segment_span));
        }
        if self.workers == 0 {
            return fail("at least one worker is required".into());
        }
        if self.checkpoint_interval == 0 {
            return fail("checkpoint interval must be positive".into());
        }
        if self.certify && self.hi - 2 > 2 * MAX_RADIUS {
            return fail(format!(
                "certificates need 2n <= {}; disable certification above that",
                2 * MAX_RADIUS
            ));
        }
        if self.collect_comet && self.hi > MAX_TABLE_LIMIT {
            return fail(format!("comet statistics need hi <= {MAX_TABLE_LIMIT}"));
        }
        Ok(())
    }
}

/// An even number whose minimal `p1` beats every earlier one in the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub e: u64,
    pub min_p1: u64,
}

/// Outcome of verifying `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct RangeReport {
    pub lo: u64,
    pub hi: u64,
    pub verified_count: u64,
    /// Even numbers with no partition.
    pub failures: Vec<u64>,
    pub records: Vec<RecordEntry>,
    pub comet: Option<Vec<CometPoint>>,
    pub wall_time: Duration,
}

impl RangeReport {
    /// The identity for [`merge_reports`] at position `at`.
    pub fn empty(at: u64) -> Self {
        Self {
            lo: at,
            hi: at,
            verified_count: 0,
            failures: Vec::new(),
            records: Vec::new(),
            comet: Some(Vec::new()),
            wall_time: Duration::ZERO,
        }
    }

    pub fn is_empty_span(&self) -> bool {
        self.lo == self.hi
    }

    pub fn evens(&self) -> u64 {
        (self.hi - self.lo).div_ceil(2)
    }

    /// Everything except `wall_time`, as stable text.
    pub fn canonical(&self) -> String {
        let failures: Vec<String> = self.failures.iter().map(u64::to_string).collect();
        let records: Vec<String> = self
            .records
            .iter()
            .map(|r| format!("{}:{}", r.e, r.min_p1))
            .collect();
        let comet = match &self.comet {
            Some(points) => points
                .iter()
                .map(|c| format!("{}:{}", c.e, c.count))
                .collect::<Vec<_>>()
                .join(","),
            None => "none".to_string(),
        };
        format!(
            "lo={}\nhi={}\nverified={}\nfailures={}\nrecords={}\ncomet={}\n",
            self.lo,
            self.hi,
            self.verified_count,
            failures.join(","),
            records.join(","),
            comet
        )
    }

    pub fn same_outcome(&self, other: &RangeReport) -> bool {
        self.lo == other.lo
            && self.hi == other.hi
            && self.verified_count == other.verified_count
            && self.failures == other.failures
            && self.records == other.records
            && self.comet == other.comet
    }

    fn checkpoint(&self, hi: u64) -> Checkpoint {
        Checkpoint {
            lo: self.lo,
            hi,
            next_e: self.hi,
            verified: self.verified_count,
            failures: self.failures.clone(),
            records: self.records.clone(),
        }
    }
}

/// Concatenates reports over adjacent ranges `[a.lo, a.hi)` and `[a.hi, b.hi)`.
pub fn merge_reports(a: &RangeReport, b: &RangeReport) -> Result<RangeReport, EngineError> {
    if a.hi != b.lo {
        return Err(EngineError::NotAdjacent {
            a_lo: a.lo,
            a_hi: a.hi,
            b_lo: b.lo,
            b_hi: b.hi,
        });
    }
    if a.is_empty_span() {
        let mut out = b.clone();
        out.wall_time += a.wall_time;
        return Ok(out);
    }
    if b.is_empty_span() {
        let mut out = a.clone();
        out.wall_time += b.wall_time;
        return Ok(out);
    }
    let best = a.records.last().map_or(0, |r| r.min_p1);
    let mut records = a.records.clone();
    records.extend(b.records.iter().filter(|r| r.min_p1 > best));
    let mut failures = a.failures.clone();
    failures.extend_from_slice(&b.failures);
    let comet = match (&a.comet, &b.comet) {
        (Some(x), Some(y)) => Some(x.iter().chain(y).copied().collect()),
        _ => None,
    };
    Ok(RangeReport {
        lo: a.lo,
        hi: b.hi,
        verified_count: a.verified_count + b.verified_count,
        failures,
        records,
        comet,
        wall_time: a.wall_time + b.wall_time,
    })
}

/// Immutable state shared by all chunks.
struct SweepContext {
    table: PrimeTable,
    certify: bool,
    collect_comet: bool,
}

impl SweepContext {
    fn new(cfg: &SweepConfig) -> Result<Self, EngineError> {
        let mut limit = DEFAULT_PROBE_LIMIT.max(cfg.hi.isqrt() + 1);
        if cfg.collect_comet {
            limit = limit.max(cfg.hi);
        }
        Ok(Self {
            table: sieve_upto(limit.min(MAX_TABLE_LIMIT))?,
            certify: cfg.certify,
            collect_comet: cfg.collect_comet,
        })
    }

    fn process_chunk(&self, lo: u64, hi: u64) -> Result<RangeReport, EngineError> {
        let started = Instant::now();
        let window_lo = lo.saturating_sub(PROBE_MARGIN) & !1;
        let window = segment_sieve(window_lo, hi, &self.table)?;
        let primes = Windowed {
            table: &self.table,
            window: &window,
        };
        let mut report = RangeReport::empty(lo);
        report.hi = hi;
        let mut comet = self.collect_comet.then(Vec::new);
        let mut best = 0;
        for e in (lo..hi).step_by(2) {
            match minimal_partition(e, &self.table, &primes)? {
                Some(p) => {
                    report.verified_count += 1;
                    if p.p1() > best {
                        best = p.p1();
                        report.records.push(RecordEntry { e, min_p1: best });
                    }
                    if self.certify {
                        let cert = build_certificate::<u128>(e / 2, &p)?;
                        if !verify_certificate_with(&cert, &primes) {
                            return Err(EngineError::CertificateRejected { e });
                        }
                    }
                }
                None => {
                    log::error!("no Goldbach partition found for {e}");
                    report.failures.push(e);
                }
            }
            if let Some(points) = comet.as_mut() {
                points.push(CometPoint {
                    e,
                    count: count_partitions(e, &self.table)?,
                });
            }
        }
        report.comet = comet;
        report.wall_time = started.elapsed();
        Ok(report)
    }

    fn comet_prefix(&self, lo: u64, hi: u64) -> Result<Vec<CometPoint>, EngineError> {
        let n = (hi - lo) / 2;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let e = lo + 2 * i;
                Ok(CometPoint {
                    e,
                    count: count_partitions(e, &self.table)?,
                })
            })
            .collect()
    }
}

/// A sweep in progress. Drive it with [`Sweep::run_until`] or
/// [`Sweep::finish`].
pub struct Sweep {
    cfg: SweepConfig,
    ctx: SweepContext,
    pool: rayon::ThreadPool,
    done: RangeReport,
    last_checkpoint: u64,
    started: Instant,
}

impl Sweep {
    /// Starts a fresh sweep. With a checkpoint path, writes an initial
    /// checkpoint so an unwritable path fails here.
    pub fn new(cfg: SweepConfig) -> Result<Self, EngineError> {
        cfg.validate()?;
        let mut done = RangeReport::empty(cfg.lo);
        if !cfg.collect_comet {
            done.comet = None;
        }
        let sweep = Self::assemble(cfg, done)?;
        sweep.save_checkpoint()?;
        Ok(sweep)
    }

    /// Continues from a checkpoint file. The range comes from the file;
    /// the rest of `runtime` (span, workers, certification, comet) applies
    /// to the remaining work. Checkpoints keep being written to `path`.
    pub fn resume(path: &Path, runtime: &SweepConfig) -> Result<Self, EngineError> {
        let cp = checkpoint_resume(path)?;
        let cfg = SweepConfig {
            lo: cp.lo,
            hi: cp.hi,
            checkpoint_path: Some(path.to_path_buf()),
            ..runtime.clone()
        };
        cfg.validate()?;
        let done = RangeReport {
            lo: cp.lo,
            hi: cp.next_e,
            verified_count: cp.verified,
            failures: cp.failures,
            records: cp.records,
            comet: None,
            wall_time: Duration::ZERO,
        };
        let mut sweep = Self::assemble(cfg, done)?;
        if sweep.cfg.collect_comet {
            let (lo, hi) = (sweep.done.lo, sweep.done.hi);
            let ctx = &sweep.ctx;
            sweep.done.comet = Some(sweep.pool.install(|| ctx.comet_prefix(lo, hi))?);
        }
        Ok(sweep)
    }

    fn assemble(cfg: SweepConfig, done: RangeReport) -> Result<Self, EngineError> {
        let ctx = SweepContext::new(&cfg)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| EngineError::Pool(e.to_string()))?;
        let last_checkpoint = done.hi;
        Ok(Self {
            cfg,
            ctx,
            pool,
            done,
            last_checkpoint,
            started: Instant::now(),
        })
    }

    pub fn config(&self) -> &SweepConfig {
        &self.cfg
    }

    /// First even number not yet processed.
    pub fn next_e(&self) -> u64 {
        self.done.hi
    }

    pub fn is_complete(&self) -> bool {
        self.done.hi >= self.cfg.hi
    }

    /// Report over `[lo, next_e)`.
    pub fn progress(&self) -> &RangeReport {
        &self.done
    }

    pub fn checkpoint(&self) -> Checkpoint {
        self.done.checkpoint(self.cfg.hi)
    }

    fn save_checkpoint(&self) -> Result<(), EngineError> {
        if let Some(path) = &self.cfg.checkpoint_path {
            checkpoint_save(&self.checkpoint(), path)?;
        }
        Ok(())
    }

    /// Processes every even number below `stop` (clamped to the range),
    /// then writes a checkpoint if configured.
    pub fn run_until(&mut self, stop: u64) -> Result<(), EngineError> {
        let stop = stop.min(self.cfg.hi);
        let chunk_len = self.cfg.segment_span.saturating_mul(2);
        let batch_len = chunk_len.saturating_mul((self.cfg.workers * CHUNKS_PER_WORKER) as u64);
        let interval_len = self.cfg.checkpoint_interval.saturating_mul(2);
        while self.done.hi < stop {
            let next_checkpoint = self.last_checkpoint.saturating_add(interval_len);
            let batch_hi = stop
                .min(self.done.hi.saturating_add(batch_len))
                .min(next_checkpoint.max(self.done.hi + 2));
            let mut bounds = Vec::new();
            let mut lo = self.done.hi;
            while lo < batch_hi {
                let hi = lo.saturating_add(chunk_len).min(batch_hi);
                bounds.push((lo, hi));
                lo = hi;
            }
            let ctx = &self.ctx;
            let reports: Vec<RangeReport> = self.pool.install(|| {
                bounds
                    .par_iter()
                    .map(|&(lo, hi)| ctx.process_chunk(lo, hi))
                    .collect::<Result<_, _>>()
            })?;
            for r in &reports {
                self.done = merge_reports(&self.done, r)?;
            }
            if self.done.hi >= next_checkpoint {
                self.save_checkpoint()?;
                self.last_checkpoint = self.done.hi;
            }
            log::debug!("verified through {}", self.done.hi);
        }
        self.save_checkpoint()
    }

    /// Runs to the end of the range and returns the full report.
    pub fn finish(mut self) -> Result<RangeReport, EngineError> {
        self.run_until(self.cfg.hi)?;
        let mut report = self.done;
        report.wall_time = self.started.elapsed();
        Ok(report)
    }
}

/// Verifies every even number in `[cfg.lo, cfg.hi)`.
pub fn verify_range(cfg: SweepConfig) -> Result<RangeReport, EngineError> {
    Sweep::new(cfg)?.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lo: u64, hi: u64) -> SweepConfig {
        SweepConfig {
            workers: 2,
            ..SweepConfig::new(lo, hi)
        }
    }

    fn records(r: &RangeReport) -> Vec<(u64, u64)> {
        r.records.iter().map(|r| (r.e, r.min_p1)).collect()
    }

    #[test]
    fn sweep_to_hundred() {
        let r = verify_range(cfg(6, 100)).unwrap();
        assert_eq!(r.verified_count, 47);
        assert!(r.failures.is_empty());
        assert_eq!(records(&r), vec![(6, 3), (12, 5), (30, 7), (98, 19)]);
        assert!(r.comet.is_none());
    }

    #[test]
    fn single_even() {
        let r = verify_range(cfg(6, 8)).unwrap();
        assert_eq!(r.verified_count, 1);
        assert_eq!(records(&r), vec![(6, 3)]);
    }

    #[test]
    fn config_errors() {
        for (lo, hi) in [(4, 10), (7, 10), (6, 6), (6, 11), (10, 8)] {
            assert!(matches!(verify_range(cfg(lo, hi)), Err(EngineError::Config(_))), "{lo} {hi}");
        }
        let c = SweepConfig {
            segment_span: 1,
            ..cfg(6, 100)
        };
        assert!(verify_range(c).is_err());
        let c = SweepConfig { workers: 0, ..cfg(6, 100) };
        assert!(verify_range(c).is_err());
        let c = SweepConfig {
            lo: 1 << 40,
            hi: (1 << 40) + 100,
            ..cfg(6, 100)
        };
        assert!(verify_range(c).is_err());
    }

    #[test]
    fn uncertified_sweep_past_certificate_range() {
        let lo = 1u64 << 40;
        let c = SweepConfig {
            certify: false,
            segment_span: 1 << 10,
            ..cfg(lo, lo + 10_000)
        };
        let r = verify_range(c).unwrap();
        assert_eq!(r.verified_count, 5000);
        assert!(r.failures.is_empty());
    }

    #[test]
    fn comet_collection() {
        let c = SweepConfig {
            collect_comet: true,
            segment_span: 3,
            ..cfg(6, 12)
        };
        let r = verify_range(c).unwrap();
        let pts: Vec<_> = r.comet.unwrap().iter().map(|c| (c.e, c.count)).collect();
        assert_eq!(pts, vec![(6, 1), (8, 1), (10, 2)]);
    }

    #[test]
    fn merge_rules() {
        let a = verify_range(cfg(6, 50)).unwrap();
        let b = verify_range(cfg(50, 100)).unwrap();
        let whole = verify_range(cfg(6, 100)).unwrap();
        assert!(merge_reports(&a, &b).unwrap().same_outcome(&whole));
        assert!(matches!(merge_reports(&b, &a), Err(EngineError::NotAdjacent { .. })));
        let id = RangeReport::empty(6);
        assert!(merge_reports(&id, &a).unwrap().same_outcome(&a));
        let id = RangeReport::empty(50);
        assert!(merge_reports(&a, &id).unwrap().same_outcome(&a));
    }

    #[test]
    fn unwritable_checkpoint_path() {
        let c = SweepConfig {
            checkpoint_path: Some(PathBuf::from("/nonexistent/dir/ckpt")),
            ..cfg(6, 100)
        };
        assert!(matches!(
            verify_range(c),
            Err(EngineError::Checkpoint(CheckpointError::Io { .. }))
        ));
    }
}
