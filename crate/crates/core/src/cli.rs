//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 census cache, 4 formula consistency
//! (failed divisibility or a failed self-test invariant).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::census::Genus2Options;
use crate::ff::is_prime;
use crate::selftest::{self, SelftestConfig};
use crate::trace2::{
    hecke_trace_genus2, PrimeCensus, TraceError, TraceReport, WeightPair, DEFAULT_NORMALIZATION,
};

pub const CACHE_ENV: &str = "SIEGEL_HECKE_CACHE";

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CACHE: u8 = 3;
pub const EXIT_FORMULA: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "siegel-hecke",
    version,
    about = "Hecke traces on genus-2 Siegel cusp forms of level 1"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build (or verify) the point-count censuses for each prime.
    Census(CensusArgs),
    /// Evaluate Hecke traces over a weight/prime grid.
    Trace(TraceArgs),
    /// Run the invariant battery.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Census cache directory.
    #[arg(long, env = CACHE_ENV, default_value = "census-cache")]
    pub cache: PathBuf,
    /// Worker threads for census enumeration.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub primes: Vec<u64>,
    #[command(flatten)]
    pub cache: CacheArgs,
    /// Recompute even when valid files are present.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long, requires = "k2", conflicts_with = "max_weight_sum")]
    pub k1: Option<i64>,
    #[arg(long, requires = "k1")]
    pub k2: Option<i64>,
    /// All regular weights with `k1 + k2` up to this bound.
    #[arg(long, required_unless_present = "k1")]
    pub max_weight_sum: Option<i64>,
    #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
    pub primes: Vec<u64>,
    #[command(flatten)]
    pub cache: CacheArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_NORMALIZATION)]
    pub normalization: u32,
    /// Build missing censuses instead of failing.
    #[arg(long)]
    pub auto_census: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[command(flatten)]
    pub cache: CacheArgs,
    #[arg(long, value_delimiter = ',', default_value = "3,5")]
    pub primes: Vec<u64>,
    /// Largest `l + m` handed to the weight-multiplicity oracle.
    #[arg(long, default_value_t = crate::sp4char::freudenthal::DEFAULT_BUDGET)]
    pub oracle_budget: u32,
    #[arg(long, default_value_t = DEFAULT_NORMALIZATION)]
    pub normalization: u32,
    /// Zero-dimensional weights, e.g. `6:4,8:6`; default all with `k1 + k2 <= 14`.
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    pub dim0: Option<Vec<(i64, i64)>>,
}

fn parse_weight(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected k1:k2, got {s:?}"))?;
    let k1 = a.trim().parse().map_err(|_| format!("bad k1 in {s:?}"))?;
    let k2 = b.trim().parse().map_err(|_| format!("bad k2 in {s:?}"))?;
    Ok((k1, k2))
}

/// Validated settings shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub primes: Vec<u64>,
    pub weights: Vec<WeightPair>,
    pub cache_dir: PathBuf,
    pub format: Format,
    pub workers: Option<usize>,
    pub normalization: u32,
    pub dim0: Vec<WeightPair>,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn cache_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CACHE,
        message: message.into(),
    }
}

pub fn validate_primes(primes: &[u64]) -> Result<Vec<u64>, Failure> {
    if primes.is_empty() {
        return Err(usage("no primes given"));
    }
    for &p in primes {
        if p == 2 || !is_prime(p) {
            return Err(usage(format!("{p} is not an odd prime")));
        }
    }
    let mut out = primes.to_vec();
    out.dedup();
    Ok(out)
}

fn validate_workers(workers: Option<usize>) -> Result<Option<usize>, Failure> {
    match workers {
        Some(0) => Err(usage("worker count must be at least 1")),
        w => Ok(w),
    }
}

impl RunConfig {
    fn base(primes: &[u64], cache: &CacheArgs) -> Result<Self, Failure> {
        Ok(Self {
            primes: validate_primes(primes)?,
            weights: Vec::new(),
            cache_dir: cache.cache.clone(),
            format: Format::Csv,
            workers: validate_workers(cache.workers)?,
            normalization: DEFAULT_NORMALIZATION,
            dim0: WeightPair::all_up_to(14),
        })
    }

    pub fn from_trace(args: &TraceArgs) -> Result<Self, Failure> {
        let mut config = Self::base(&args.primes, &args.cache)?;
        config.weights = match (args.k1, args.k2, args.max_weight_sum) {
            (Some(k1), Some(k2), _) => {
                vec![WeightPair::new(k1, k2).map_err(|e| usage(e.to_string()))?]
            }
            (_, _, Some(s)) => WeightPair::all_up_to(s),
            _ => return Err(usage("give --k1/--k2 or --max-weight-sum")),
        };
        if config.weights.is_empty() {
            return Err(usage("no regular weights in range"));
        }
        if args.normalization == 0 {
            return Err(usage("normalization factor must be positive"));
        }
        config.normalization = args.normalization;
        config.format = args.format;
        Ok(config)
    }

    fn options(&self) -> Genus2Options {
        Genus2Options {
            workers: self.workers,
        }
    }
}

fn progress(msg: &str) {
    eprintln!("{msg}");
}

/// `census`: verify existing files, compute and store missing ones.
pub fn cmd_census(args: &CensusArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let config = RunConfig::base(&args.primes, &args.cache)?;
    let mut failed = false;
    for &p in &config.primes {
        let cached = !args.force && PrimeCensus::exists(&config.cache_dir, p);
        let data = if cached {
            match PrimeCensus::load(&config.cache_dir, p) {
                Ok(d) => {
                    progress(&format!("p = {p}: cache hit"));
                    Some(d)
                }
                Err(e) => {
                    progress(&format!("p = {p}: cached files invalid ({e}); recomputing"));
                    None
                }
            }
        } else {
            None
        };
        let data = match data {
            Some(d) => d,
            None => {
                let start = Instant::now();
                progress(&format!("p = {p}: computing census"));
                let d = PrimeCensus::compute(p, config.options())
                    .map_err(|e| cache_failure(e.to_string()))?;
                d.store(&config.cache_dir)
                    .map_err(|e| cache_failure(e.to_string()))?;
                progress(&format!(
                    "p = {p}: done in {:.2}s",
                    start.elapsed().as_secs_f64()
                ));
                PrimeCensus::load(&config.cache_dir, p).map_err(|e| cache_failure(e.to_string()))?
            }
        };
        let checks = [
            ("elliptic-fp", data.elliptic_p.verify()),
            ("elliptic-fp2", data.elliptic_p2.verify()),
            ("genus2-jacobian", data.genus2.verify()),
        ];
        for (locus, result) in checks {
            let status = match &result {
                Ok(()) => "ok".to_string(),
                Err(e) => {
                    failed = true;
                    format!("FAILED: {e}")
                }
            };
            writeln!(out, "p={p} {locus} mass-check {status}").map_err(io_failure)?;
        }
    }
    if failed {
        return Err(cache_failure("mass identity failure"));
    }
    Ok(())
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn obtain(dir: &Path, p: u64, auto: bool, options: Genus2Options) -> Result<PrimeCensus, Failure> {
    if !PrimeCensus::exists(dir, p) {
        if !auto {
            return Err(cache_failure(format!(
                "no census for p = {p} in {}; run `census` or pass --auto-census",
                dir.display()
            )));
        }
        progress(&format!("p = {p}: building census"));
        let data = PrimeCensus::compute(p, options).map_err(|e| cache_failure(e.to_string()))?;
        data.store(dir).map_err(|e| cache_failure(e.to_string()))?;
    }
    PrimeCensus::load(dir, p).map_err(|e| cache_failure(format!("p = {p}: {e}")))
}

/// Evaluates every (weight, prime) pair; divisibility failures are kept as
/// reports with `divisible = false`.
pub fn compute_reports(config: &RunConfig, auto_census: bool) -> Result<Vec<TraceReport>, Failure> {
    let mut reports = Vec::new();
    for &p in &config.primes {
        let data = obtain(&config.cache_dir, p, auto_census, config.options())?;
        for &w in &config.weights {
            match hecke_trace_genus2(w, &data, config.normalization) {
                Ok(r) => reports.push(r),
                Err(TraceError::NotDivisible { report, .. }) => reports.push(*report),
                Err(e) => {
                    return Err(Failure {
                        code: EXIT_FORMULA,
                        message: e.to_string(),
                    })
                }
            }
        }
    }
    reports.sort_by_key(|r| (r.k1 + r.k2, r.k1, r.p));
    Ok(reports)
}

pub fn write_reports(
    reports: &[TraceReport],
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let err = |e: csv::Error| Failure {
                code: 1,
                message: e.to_string(),
            };
            w.write_record(TraceReport::CSV_HEADER).map_err(err)?;
            for r in reports {
                w.write_record(r.csv_row()).map_err(err)?;
            }
            w.flush().map_err(io_failure)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, reports).map_err(|e| Failure {
                code: 1,
                message: e.to_string(),
            })?;
            writeln!(out).map_err(io_failure)?;
        }
    }
    Ok(())
}

pub fn cmd_trace(args: &TraceArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let config = RunConfig::from_trace(args)?;
    let reports = compute_reports(&config, args.auto_census)?;
    match &args.output {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(io_failure)?;
            write_reports(&reports, config.format, &mut file)?;
        }
        None => write_reports(&reports, config.format, out)?,
    }

    eprintln!(
        "{:>4} {:>4} {:>3} {:>24} {:>6}",
        "k1", "k2", "p", "heckeTrace", "checks"
    );
    for r in &reports {
        let t = r
            .hecke_trace
            .as_ref()
            .map(ToString::to_string)
            .unwrap_or_else(|| "-".into());
        let status = if r.checks_passed() { "pass" } else { "FAIL" };
        eprintln!("{:>4} {:>4} {:>3} {:>24} {:>6}", r.k1, r.k2, r.p, t, status);
    }
    let failed = reports.iter().filter(|r| !r.checks_passed()).count();
    if failed > 0 {
        return Err(Failure {
            code: EXIT_FORMULA,
            message: format!(
                "{failed} of {} evaluations failed the divisibility check (normalization {})",
                reports.len(),
                config.normalization
            ),
        });
    }
    Ok(())
}

pub fn cmd_selftest(args: &SelftestArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut config = SelftestConfig::new(&args.cache.cache);
    config.primes = validate_primes(&args.primes)?;
    config.workers = validate_workers(args.cache.workers)?;
    config.oracle_budget = args.oracle_budget;
    if args.normalization == 0 {
        return Err(usage("normalization factor must be positive"));
    }
    config.normalization = args.normalization;
    if let Some(list) = &args.dim0 {
        config.dim0_weights = list
            .iter()
            .map(|&(k1, k2)| WeightPair::new(k1, k2).map_err(|e| usage(e.to_string())))
            .collect::<Result<_, _>>()?;
    }

    let outcomes = selftest::run(&config, progress);
    let mut failed = Vec::new();
    for s in &outcomes {
        let status = if s.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {} ({} checks)", s.name, s.checks).map_err(io_failure)?;
        for n in &s.notices {
            writeln!(out, "  notice: {n}").map_err(io_failure)?;
        }
        for f in &s.failures {
            writeln!(out, "  failed: {f}").map_err(io_failure)?;
        }
        if !s.passed() {
            failed.push(s.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_FORMULA,
            message: format!("failed suites: {}", failed.join(", ")),
        })
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Census(a) => cmd_census(a, &mut out),
        Command::Trace(a) => cmd_trace(a, &mut out),
        Command::Selftest(a) => cmd_selftest(a, &mut out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Parses `std::env::args`; clap's own usage errors exit with code 2.
pub fn main() -> ExitCode {
    run(Cli::parse())
}
