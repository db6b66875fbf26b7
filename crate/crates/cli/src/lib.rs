//! `goldbach` command-line tool.
//!
//! [`run`] takes the argument vector and two writers so the whole command
//! surface can be driven in-process. Exit codes: 0 on success, 1 when a
//! sweep reports an even number without a partition, 2 for usage or domain
//! errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use goldbach_core::engine::{Sweep, SweepConfig, DEFAULT_CHECKPOINT_INTERVAL, DEFAULT_PROBE_LIMIT};
use goldbach_core::geometry::{check_version_with, Version};
use goldbach_core::primes::{MillerRabin, DEFAULT_SEGMENT_SPAN, MAX_TABLE_LIMIT};
use goldbach_core::{
    all_partitions, build_certificate, emit_svg, fermat_like, layout, minimal_partition, sieve_upto,
    Certificate, CertificateRecord, GoldbachPartition, RangeReport, Scene, StyleOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const MAX_ARG: u64 = 1 << 63;

#[derive(Debug, Parser)]
#[command(name = "goldbach", about = "Goldbach sweeps with exact Goldbach Circle certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify every even number in [--from, --to)
    Verify(VerifyArgs),
    /// Continue a sweep from a checkpoint file
    Resume(ResumeArgs),
    /// Goldbach partitions of one even number
    Partition(PartitionArgs),
    /// Exact Goldbach Circle certificate for radius n
    Certificate(CertificateArgs),
    /// Decompositions n^2 = g^2 + h^2 for radius n
    Fermat(FermatArgs),
    /// Partition counts per even number
    Comet(CometArgs),
    /// Records of the minimal p1 over a range
    Records(RecordsArgs),
    /// Draw the Goldbach Circle as SVG
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

fn parse_num(s: &str) -> Result<u64, String> {
    let v: u64 = s
        .replace('_', "")
        .parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))?;
    if v > MAX_ARG {
        return Err(format!("{v} exceeds 2^63"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Args)]
struct SweepFlags {
    /// Worker threads (default: logical CPUs)
    #[arg(long, value_parser = parse_num)]
    workers: Option<u64>,
    /// Even numbers per sieve window
    #[arg(long, value_parser = parse_num, default_value_t = DEFAULT_SEGMENT_SPAN)]
    segment_span: u64,
    /// Build and verify a certificate for every instance
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    certify: OnOff,
    /// Even numbers between checkpoint writes
    #[arg(long, value_parser = parse_num, default_value_t = DEFAULT_CHECKPOINT_INTERVAL)]
    checkpoint_interval: u64,
}

impl SweepFlags {
    fn apply(&self, cfg: &mut SweepConfig) {
        if let Some(w) = self.workers {
            cfg.workers = w as usize;
        }
        cfg.segment_span = self.segment_span;
        cfg.certify = self.certify == OnOff::On;
        cfg.checkpoint_interval = self.checkpoint_interval;
    }
}

#[derive(Debug, Clone, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_num)]
    from: u64,
    /// Exclusive upper bound
    #[arg(long, value_parser = parse_num)]
    to: u64,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[command(flatten)]
    sweep: SweepFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ResumeArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    sweep: SweepFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    #[arg(value_parser = parse_num)]
    e: u64,
    /// List every partition instead of the minimal one
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VersionSel {
    One(Version),
    All,
}

fn parse_version(s: &str) -> Result<VersionSel, String> {
    if s == "all" {
        return Ok(VersionSel::All);
    }
    let k: u64 = s.parse().map_err(|_| format!("`{s}` is not 1..5 or all"))?;
    Version::from_index(k)
        .map(VersionSel::One)
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct CertificateArgs {
    /// Radius; the even number is 2n
    #[arg(value_parser = parse_num)]
    n: u64,
    /// Use the partition with this p1 instead of the minimal one
    #[arg(long, value_parser = parse_num)]
    p1: Option<u64>,
    #[arg(long = "version", value_parser = parse_version, default_value = "all")]
    version: VersionSel,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FermatArgs {
    #[arg(value_parser = parse_num)]
    n: u64,
    /// Also print g rounded to 12 significant digits
    #[arg(long)]
    float: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct CometArgs {
    #[arg(long, value_parser = parse_num)]
    from: u64,
    #[arg(long, value_parser = parse_num)]
    to: u64,
    #[arg(long, value_parser = parse_num)]
    workers: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RecordsArgs {
    #[arg(long, value_parser = parse_num)]
    from: u64,
    #[arg(long, value_parser = parse_num)]
    to: u64,
    #[command(flatten)]
    sweep: SweepFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(value_parser = parse_num)]
    n: u64,
    #[arg(long, value_parser = parse_num)]
    p1: Option<u64>,
    /// Canvas width and height in user units
    #[arg(long, value_parser = parse_num, default_value_t = 800)]
    canvas: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One line of `verify` / `resume` machine output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub lo: u64,
    pub hi: u64,
    pub verified: u64,
    pub failures: Vec<u64>,
    pub records: Vec<(u64, u64)>,
    pub wall_ms: u64,
}

impl From<&RangeReport> for SweepSummary {
    fn from(r: &RangeReport) -> Self {
        Self {
            lo: r.lo,
            hi: r.hi,
            verified: r.verified_count,
            failures: r.failures.clone(),
            records: r.records.iter().map(|x| (x.e, x.min_p1)).collect(),
            wall_ms: r.wall_time.as_millis() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionLine {
    pub e: u64,
    pub p1: u64,
    pub p2: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermatLine {
    pub n: u64,
    pub g_sq: u128,
    pub h: u128,
    pub p1: u64,
    pub p2: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionLine {
    pub version: u8,
    pub holds: bool,
    pub lhs: u128,
    pub rhs: u128,
}

/// Parses `argv` (including the program name), runs the command, and
/// returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn with_output(path: Option<&Path>, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<i32>) -> Result<i32> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(file);
            let code = body(&mut w)?;
            w.flush()?;
            Ok(code)
        }
        None => {
            let code = body(stdout)?;
            stdout.flush()?;
            Ok(code)
        }
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Verify(a) => {
            let mut cfg = SweepConfig::new(a.from, a.to);
            a.sweep.apply(&mut cfg);
            cfg.checkpoint_path = a.checkpoint;
            let report = Sweep::new(cfg)?.finish()?;
            with_output(a.output.out.as_deref(), stdout, |w| write_summary(w, &report, a.output.format))
        }
        Command::Resume(a) => {
            let mut runtime = SweepConfig::new(6, 8);
            a.sweep.apply(&mut runtime);
            let report = Sweep::resume(&a.checkpoint, &runtime)?.finish()?;
            with_output(a.output.out.as_deref(), stdout, |w| write_summary(w, &report, a.output.format))
        }
        Command::Partition(a) => with_output(a.output.out.as_deref(), stdout, |w| partition(w, &a)),
        Command::Certificate(a) => with_output(a.output.out.as_deref(), stdout, |w| certificate(w, &a)),
        Command::Fermat(a) => with_output(a.output.out.as_deref(), stdout, |w| fermat(w, &a)),
        Command::Comet(a) => {
            let mut cfg = SweepConfig::new(a.from, a.to);
            if let Some(wk) = a.workers {
                cfg.workers = wk as usize;
            }
            cfg.certify = false;
            cfg.collect_comet = true;
            cfg.segment_span = 1 << 12;
            let report = Sweep::new(cfg)?.finish()?;
            with_output(a.out.as_deref(), stdout, |w| {
                for c in report.comet.iter().flatten() {
                    match a.format {
                        Format::Csv => writeln!(w, "{},{}", c.e, c.count)?,
                        Format::Text => writeln!(w, "{} {}", c.e, c.count)?,
                        Format::Jsonl => writeln!(w, "{}", serde_json::to_string(c)?)?,
                    }
                }
                Ok(exit_for(&report))
            })
        }
        Command::Records(a) => {
            let mut cfg = SweepConfig::new(a.from, a.to);
            a.sweep.apply(&mut cfg);
            cfg.certify = false;
            let report = Sweep::new(cfg)?.finish()?;
            with_output(a.output.out.as_deref(), stdout, |w| {
                if a.output.format == Format::Csv {
                    writeln!(w, "e,min_p1")?;
                }
                for r in &report.records {
                    match a.output.format {
                        Format::Csv => writeln!(w, "{},{}", r.e, r.min_p1)?,
                        Format::Text => writeln!(w, "{} {}", r.e, r.min_p1)?,
                        Format::Jsonl => writeln!(w, "{}", serde_json::to_string(r)?)?,
                    }
                }
                Ok(exit_for(&report))
            })
        }
        Command::Render(a) => {
            let cert = certificate_for(a.n, a.p1)?;
            let scene: Scene = layout(&cert)?;
            let canvas = u32::try_from(a.canvas).map_err(|_| anyhow!("canvas {} too large", a.canvas))?;
            let style = StyleOptions {
                canvas,
                ..StyleOptions::default()
            };
            let svg = emit_svg(&scene, &style)?;
            with_output(a.out.as_deref(), stdout, |w| {
                w.write_all(svg.as_bytes())?;
                Ok(EXIT_OK)
            })
        }
    }
}

fn exit_for(report: &RangeReport) -> i32 {
    if report.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_COUNTEREXAMPLE
    }
}

fn write_summary(w: &mut dyn Write, report: &RangeReport, format: Format) -> Result<i32> {
    let s = SweepSummary::from(report);
    match format {
        Format::Text => {
            let last = s
                .records
                .last()
                .map_or("none".to_string(), |(e, p)| format!("{e}:{p}"));
            writeln!(
                w,
                "range=[{},{}) verified={} failures={} records={} last_record={} wall={:.3}s",
                s.lo,
                s.hi,
                s.verified,
                s.failures.len(),
                s.records.len(),
                last,
                report.wall_time.as_secs_f64()
            )?;
            for f in &s.failures {
                writeln!(w, "FAILURE e={f}")?;
            }
        }
        Format::Jsonl => writeln!(w, "{}", serde_json::to_string(&s)?)?,
        Format::Csv => {
            writeln!(w, "lo,hi,verified,failures,records,wall_ms")?;
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.lo,
                s.hi,
                s.verified,
                s.failures.len(),
                s.records.len(),
                s.wall_ms
            )?;
        }
    }
    Ok(exit_for(report))
}

fn probe_table(e: u64) -> Result<goldbach_core::PrimeTable> {
    Ok(sieve_upto((e / 2).clamp(2, DEFAULT_PROBE_LIMIT))?)
}

fn partition(w: &mut dyn Write, a: &PartitionArgs) -> Result<i32> {
    let found = if a.all {
        let table = sieve_upto(a.e.clamp(2, MAX_TABLE_LIMIT))?;
        all_partitions(a.e, &table)?
    } else {
        minimal_partition(a.e, &probe_table(a.e)?, &MillerRabin)?
            .into_iter()
            .collect()
    };
    if a.output.format == Format::Csv {
        writeln!(w, "e,p1,p2")?;
    }
    for p in &found {
        match a.output.format {
            Format::Text => writeln!(w, "{} {}", p.p1(), p.p2())?,
            Format::Csv => writeln!(w, "{},{},{}", p.e(), p.p1(), p.p2())?,
            Format::Jsonl => {
                let line = PartitionLine {
                    e: p.e(),
                    p1: p.p1(),
                    p2: p.p2(),
                };
                writeln!(w, "{}", serde_json::to_string(&line)?)?
            }
        }
    }
    if found.is_empty() {
        writeln!(w, "NO PARTITION e={}", a.e)?;
        return Ok(EXIT_COUNTEREXAMPLE);
    }
    Ok(EXIT_OK)
}

fn certificate_for(n: u64, p1: Option<u64>) -> Result<Certificate> {
    if n < 3 {
        bail!("radius {n} is below 3");
    }
    let e = n.checked_mul(2).ok_or_else(|| anyhow!("2n overflows for n = {n}"))?;
    let p = match p1 {
        Some(p1) => {
            let p2 = e
                .checked_sub(p1)
                .ok_or_else(|| anyhow!("p1 = {p1} exceeds 2n = {e}"))?;
            if p1 > p2 {
                bail!("p1 = {p1} must not exceed p2 = {p2}");
            }
            GoldbachPartition::new(p1, p2)?
        }
        None => minimal_partition(e, &probe_table(e)?, &MillerRabin)?
            .ok_or_else(|| anyhow!("no Goldbach partition of {e}"))?,
    };
    Ok(build_certificate(n, &p)?)
}

/// Text or JSON rendering of a certificate and its verdicts.
pub fn format_certificate(c: &Certificate, jsonl: bool) -> String {
    let rec = c.record(&MillerRabin);
    if jsonl {
        serde_json::to_string(&rec).expect("plain record")
    } else {
        rec.to_string()
    }
}

fn certificate(w: &mut dyn Write, a: &CertificateArgs) -> Result<i32> {
    let cert = certificate_for(a.n, a.p1)?;
    let jsonl = match a.output.format {
        Format::Text => false,
        Format::Jsonl => true,
        Format::Csv => bail!("certificate output supports text and jsonl"),
    };
    match a.version {
        VersionSel::All => writeln!(w, "{}", format_certificate(&cert, jsonl))?,
        VersionSel::One(v) => {
            let check = check_version_with(&cert, v, &MillerRabin);
            let line = VersionLine {
                version: v.index(),
                holds: check.holds,
                lhs: check.lhs,
                rhs: check.rhs,
            };
            if jsonl {
                writeln!(w, "{}", serde_json::to_string(&line)?)?;
            } else {
                let verdict = if line.holds { "PASS" } else { "FAIL" };
                writeln!(w, "{v}={verdict} lhs={} rhs={}", line.lhs, line.rhs)?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// `g` to 12 significant digits.
fn sig12(g: f64) -> String {
    if g == 0.0 {
        return "0".to_string();
    }
    let int_digits = g.abs().log10().floor() as i32 + 1;
    let decimals = (12 - int_digits).max(0) as usize;
    format!("{g:.decimals$}")
}

fn fermat(w: &mut dyn Write, a: &FermatArgs) -> Result<i32> {
    if a.n < 3 {
        bail!("radius {} is below 3", a.n);
    }
    let e = a.n.checked_mul(2).ok_or_else(|| anyhow!("2n overflows"))?;
    let table = sieve_upto(e.clamp(2, MAX_TABLE_LIMIT))?;
    let rows = fermat_like::<u128>(a.n, &table)?;
    if a.output.format == Format::Csv {
        writeln!(w, "{}", if a.float { "n,g_sq,h,g" } else { "n,g_sq,h" })?;
    }
    for d in &rows {
        let g = a.float.then(|| d.g_approx());
        match a.output.format {
            Format::Text | Format::Csv => {
                let sep = if a.output.format == Format::Csv { "," } else { " " };
                let mut line = [d.n.to_string(), d.g_sq.to_string(), d.h.to_string()].join(sep);
                if let Some(g) = g {
                    line.push_str(sep);
                    line.push_str(&sig12(g));
                }
                writeln!(w, "{line}")?;
            }
            Format::Jsonl => {
                let line = FermatLine {
                    n: d.n,
                    g_sq: d.g_sq,
                    h: d.h,
                    p1: d.source.p1(),
                    p2: d.source.p2(),
                    g,
                };
                writeln!(w, "{}", serde_json::to_string(&line)?)?;
            }
        }
    }
    if rows.is_empty() {
        return Ok(EXIT_COUNTEREXAMPLE);
    }
    Ok(EXIT_OK)
}

/// Parses a text certificate line back into its record.
pub fn parse_certificate_line(line: &str) -> Result<CertificateRecord> {
    Ok(line.parse()?)
}

/// Entry point used by the binary.
pub fn main_with_stdio() -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let stderr = io::stderr();
    let mut err = stderr.lock();
    run(std::env::args_os(), &mut out, &mut err)
}
