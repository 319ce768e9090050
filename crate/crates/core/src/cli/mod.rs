//! Command-line surface: table caching and CSV/JSON/SVG output.

pub mod cache;
pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::brackets::{deligne_audit, identity_a_side, identity_b_side, pihol_coeff};
use crate::clausen::{build_trace_table, moment, TraceTable};
use crate::error::{Error, Result};
use crate::field::{primes_between, FieldContext};
use crate::hurwitz::{build_hurwitz_table, moment_rhs, HurwitzTable};
use crate::measures::{ear_parameters, SIGN_DEFINITE_CONSTANT};
use crate::selberg::{proof_bound_audit, simplified_chain, ChainVariant};
use crate::stats::{
    default_grid, discrepancy_report, empirical_a_count, random_grid, DiscrepancyReport, Interval,
    Rational, Statistic,
};

/// Reference prime threshold for `T = 10`.
const QUOTED_EAR_THRESHOLD: f64 = 3.45e14;

#[derive(Debug, Parser)]
#[command(name = "batman", about = "Clausen/K3 trace statistics and exact class-number checks")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory for cached trace and Hurwitz tables.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for random interval grids.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clausen traces a_λ and φ(-λ).
    Traces {
        #[arg(long)]
        p: u64,
    },
    /// Exact A_μ(p) = num/den.
    Avalues {
        #[arg(long)]
        p: u64,
    },
    /// SVG histogram of A_μ(p) on [-3, 3].
    Hist {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 61)]
        bins: usize,
        /// Leave out the f(t)/4π curve.
        #[arg(long)]
        no_overlay: bool,
    },
    #[command(subcommand)]
    Verify(Verify),
    /// Explicit-constant inequality chains over a range of primes.
    AuditConstants {
        #[arg(long, default_value = "5..1000000")]
        p: PrimeSpec,
    },
    /// Ear width and prime threshold for a target height T.
    Ears {
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        delta: Option<f64>,
        /// Also measure the empirical ear height at this prime.
        #[arg(long)]
        p: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Trace power moments against the class-number sums.
    Moments {
        #[arg(long)]
        p: PrimeSpec,
        #[arg(long, default_value_t = 5)]
        nmax: u32,
    },
    /// Bracket coefficients: corrected identities and coefficient bounds.
    Brackets {
        #[arg(long)]
        p: PrimeSpec,
        #[arg(long, default_value_t = 4)]
        mmax: u32,
    },
    /// Discrepancy of the trace and A-value statistics.
    Distribution {
        #[arg(long)]
        p: u64,
        /// Number of intervals per statistic.
        #[arg(long, default_value_t = 60)]
        grid: usize,
        /// One of clausen_N, clausen_Hpm, clausen_M, batman (default: all).
        #[arg(long)]
        stat: Option<Statistic>,
    },
}

/// A single prime `p` or an inclusive range `lo..hi`.
#[derive(Debug, Clone)]
pub struct PrimeSpec {
    lo: u64,
    hi: u64,
}

impl PrimeSpec {
    fn primes(&self) -> Result<Vec<u64>> {
        if self.lo == self.hi {
            FieldContext::new(self.lo)?;
            return Ok(vec![self.lo]);
        }
        let primes = primes_between(self.lo.max(5), self.hi);
        if primes.is_empty() {
            return Err(Error::Argument(format!("no primes >= 5 in {}..{}", self.lo, self.hi)));
        }
        Ok(primes)
    }
}

impl std::str::FromStr for PrimeSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
        match s.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty range {s}"));
                }
                Ok(Self { lo, hi })
            }
            None => {
                let p = parse(s)?;
                Ok(Self { lo: p, hi: p })
            }
        }
    }
}

/// Runs the CLI and returns the process exit code: 0 when everything
/// passes, 1 on a failed check or runtime failure, 2 on usage errors.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Argument(_)
                | Error::Composite { .. }
                | Error::PrimeTooSmall(_)
                | Error::Interval { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Traces { p } => {
            let table = trace_table(*p, g)?;
            let rows: Vec<TraceRow> = table
                .entries()
                .map(|e| TraceRow { lambda: e.lambda, a: e.trace, phi: e.sign })
                .collect();
            emit(g, &rows, "lambda,a,phi", |r| format!("{},{},{}", r.lambda, r.a, r.phi))?;
            Ok(true)
        }
        Command::Avalues { p } => {
            let ctx = FieldContext::new(*p)?;
            let table = trace_table(*p, g)?;
            let rows: Vec<AValueRow> = table
                .a_values(&ctx)
                .into_iter()
                .map(|v| AValueRow { mu: v.mu, num: v.num, den: v.p })
                .collect();
            emit(g, &rows, "mu,num,den", |r| format!("{},{},{}", r.mu, r.num, r.den))?;
            Ok(true)
        }
        Command::Hist { p, bins, no_overlay } => {
            let ctx = FieldContext::new(*p)?;
            let values = trace_table(*p, g)?.a_values(&ctx);
            let spec = svg::HistogramSpec { p: *p, bins: *bins, overlay: !no_overlay };
            write_out(g.out.as_deref(), &svg::render(&values, &spec)?)?;
            Ok(true)
        }
        Command::Verify(Verify::Moments { p, nmax }) => verify_moments(p, *nmax, g),
        Command::Verify(Verify::Brackets { p, mmax }) => verify_brackets(p, *mmax, g),
        Command::Verify(Verify::Distribution { p, grid, stat }) => {
            verify_distribution(*p, *grid, *stat, g)
        }
        Command::AuditConstants { p } => audit_constants(p, g),
        Command::Ears { t, delta, p } => ears(*t, *delta, *p, g),
    }
}

#[derive(Serialize)]
struct TraceRow {
    lambda: u64,
    a: i64,
    phi: i8,
}

#[derive(Serialize)]
struct AValueRow {
    mu: u64,
    num: i64,
    den: u64,
}

#[derive(Serialize)]
struct CheckRow {
    p: u64,
    index: u32,
    check: &'static str,
    lhs: String,
    rhs: String,
    pass: bool,
}

fn check_csv(r: &CheckRow) -> String {
    format!("{},{},{},{},{},{}", r.p, r.index, r.check, r.lhs, r.rhs, r.pass)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render<R: Serialize>(
    format: Format,
    rows: &[R],
    header: &str,
    line: impl Fn(&R) -> String,
) -> Result<String> {
    Ok(match format {
        Format::Csv => {
            let mut s = String::with_capacity(32 * rows.len());
            s.push_str(header);
            s.push('\n');
            for r in rows {
                s.push_str(&line(r));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows)
                .map_err(|e| Error::Argument(format!("json: {e}")))?;
            s.push('\n');
            s
        }
    })
}

fn emit<R: Serialize>(
    g: &GlobalOpts,
    rows: &[R],
    header: &str,
    line: impl Fn(&R) -> String,
) -> Result<()> {
    write_out(g.out.as_deref(), &render(g.format, rows, header, line)?)
}

fn trace_table(p: u64, g: &GlobalOpts) -> Result<TraceTable> {
    let ctx = FieldContext::new(p)?;
    let Some(dir) = &g.cache_dir else {
        return Ok(build_trace_table(&ctx));
    };
    let path = cache::trace_path(dir, p);
    if path.exists() {
        return cache::load_traces(&path);
    }
    let table = build_trace_table(&ctx);
    fs::create_dir_all(dir)?;
    cache::save_traces(&path, &table)?;
    Ok(table)
}

fn hurwitz_table(d_max: u64, g: &GlobalOpts) -> Result<HurwitzTable> {
    let Some(dir) = &g.cache_dir else {
        return Ok(build_hurwitz_table(d_max));
    };
    let path = cache::hurwitz_path(dir, d_max);
    if path.exists() {
        return cache::load_hurwitz(&path);
    }
    let table = build_hurwitz_table(d_max);
    fs::create_dir_all(dir)?;
    cache::save_hurwitz(&path, &table)?;
    Ok(table)
}

fn verify_moments(spec: &PrimeSpec, nmax: u32, g: &GlobalOpts) -> Result<bool> {
    let primes = spec.primes()?;
    let hurwitz = hurwitz_table(4 * primes.last().copied().unwrap_or(5), g)?;
    let mut rows = Vec::new();
    for &p in &primes {
        let table = trace_table(p, g)?;
        for n in 1..=nmax {
            for twisted in [false, true] {
                let lhs = moment(&table, n, twisted);
                let rhs = moment_rhs(&hurwitz, p, n, twisted)?;
                let pass = rhs.is_integer() && rhs.numer() == &lhs;
                rows.push(CheckRow {
                    p,
                    index: n,
                    check: if twisted { "twisted" } else { "untwisted" },
                    lhs: lhs.to_string(),
                    rhs: Rational(rhs).to_string(),
                    pass,
                });
            }
        }
    }
    emit(g, &rows, "p,n,variant,lhs,rhs,pass", check_csv)?;
    Ok(summarize("moment identities", &rows))
}

fn verify_brackets(spec: &PrimeSpec, mmax: u32, g: &GlobalOpts) -> Result<bool> {
    let primes = spec.primes()?;
    let hurwitz = hurwitz_table(4 * primes.last().copied().unwrap_or(5), g)?;
    let mut rows = Vec::new();
    for &p in &primes {
        for m in 1..=mmax {
            let a = identity_a_side(p, m, &hurwitz)?;
            let b = identity_b_side(p, m, &hurwitz)?;
            for (check, id) in [("identity_a", &a), ("identity_b", &b)] {
                rows.push(CheckRow {
                    p,
                    index: m,
                    check,
                    lhs: Rational(id.lhs.clone()).to_string(),
                    rhs: Rational(id.rhs.clone()).to_string(),
                    pass: id.holds(),
                });
            }
            let audit = deligne_audit(m, p, &hurwitz)?;
            let a_exact = pihol_coeff(m, 1, p, &hurwitz)?;
            let b_exact = pihol_coeff(m, 4, 4 * p, &hurwitz)?;
            rows.push(CheckRow {
                p,
                index: m,
                check: "bound_a",
                lhs: Rational(a_exact).to_string(),
                rhs: audit.a_bound.to_string(),
                pass: audit.a_pass,
            });
            rows.push(CheckRow {
                p,
                index: m,
                check: "bound_b",
                lhs: Rational(b_exact).to_string(),
                rhs: audit.b_bound.to_string(),
                pass: audit.b_pass,
            });
        }
    }
    emit(g, &rows, "p,m,check,lhs,rhs,pass", check_csv)?;
    Ok(summarize("bracket checks", &rows))
}

fn summarize(what: &str, rows: &[CheckRow]) -> bool {
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!("{what}: {} checked, {failed} failed", rows.len());
    failed == 0
}

fn report_csv(report: &DiscrepancyReport) -> String {
    let mut s = String::from("lo,hi,empirical,target,gap,bound,pass\n");
    for r in &report.rows {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", r.lo, r.hi, r.empirical, r.target, r.gap, r.bound, r.pass);
    }
    s
}

fn verify_distribution(p: u64, grid: usize, stat: Option<Statistic>, g: &GlobalOpts) -> Result<bool> {
    if grid == 0 {
        return Err(Error::Argument("grid must be positive".into()));
    }
    let ctx = FieldContext::new(p)?;
    let table = trace_table(p, g)?;
    let values = table.a_values(&ctx);
    let stats: Vec<Statistic> = match stat {
        Some(s) => vec![s],
        None => Statistic::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    for which in stats {
        let intervals: Vec<Interval> = match g.seed {
            Some(seed) => {
                let (lo, hi) = which.domain();
                random_grid(seed, grid, lo, hi, 1000)
            }
            None => default_grid(which, grid),
        };
        let report = discrepancy_report(&table, &values, &intervals, which)?;
        eprintln!(
            "{} p={}: {} rows, max_gap={:.6}, bound={:.6}, {}",
            which.name(),
            p,
            report.rows.len(),
            report.max_gap,
            report.rows.iter().map(|r| r.bound).fold(0.0, f64::max),
            if report.pass() { "pass" } else { "FAIL" }
        );
        reports.push(report);
    }
    match g.format {
        Format::Json => {
            let s = serde_json::to_string_pretty(&reports)
                .map_err(|e| Error::Argument(format!("json: {e}")))?;
            write_out(g.out.as_deref(), &(s + "\n"))?;
        }
        Format::Csv if reports.len() == 1 => write_out(g.out.as_deref(), &report_csv(&reports[0]))?,
        Format::Csv => match &g.out {
            Some(out) => {
                for r in &reports {
                    fs::write(suffixed(out, r.statistic.name()), report_csv(r))?;
                }
            }
            None => {
                for r in &reports {
                    println!("# {} p={} max_gap={}", r.statistic.name(), r.p, r.max_gap);
                    print!("{}", report_csv(r));
                }
            }
        },
    }
    Ok(reports.iter().all(DiscrepancyReport::pass))
}

/// `dir/name.ext` → `dir/name.<tag>.ext`.
fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

#[derive(Serialize)]
struct ChainRow {
    p: u64,
    chain: &'static str,
    degree: u64,
    lhs: f64,
    rhs: f64,
    pass: bool,
}

fn audit_constants(spec: &PrimeSpec, g: &GlobalOpts) -> Result<bool> {
    let mut rows = Vec::new();
    let mut worst: Vec<(&'static str, f64, u64)> = Vec::new();
    for p in spec.primes()? {
        let reports = [
            ("untwisted", proof_bound_audit(p, ChainVariant::Untwisted)),
            ("twisted", proof_bound_audit(p, ChainVariant::Twisted)),
            ("simplified", simplified_chain(p)),
        ];
        for (i, (chain, r)) in reports.into_iter().enumerate() {
            if worst.len() <= i {
                worst.push((chain, 0.0, p));
            }
            if r.ratio() > worst[i].1 {
                worst[i] = (chain, r.ratio(), p);
            }
            rows.push(ChainRow { p, chain, degree: r.degree, lhs: r.lhs, rhs: r.rhs, pass: r.pass });
        }
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    for (chain, ratio, p) in &worst {
        eprintln!("{chain}: worst lhs/rhs = {ratio:.6} at p = {p}");
    }
    eprintln!("constant chains: {} checked, {failed} failed", rows.len());
    if g.out.is_some() {
        emit(g, &rows, "p,chain,degree,lhs,rhs,pass", |r| {
            format!("{},{},{},{},{},{}", r.p, r.chain, r.degree, r.lhs, r.rhs, r.pass)
        })?;
    }
    Ok(failed == 0)
}

#[derive(Serialize)]
struct EarReport {
    t: f64,
    delta: f64,
    x: f64,
    p_min: f64,
    quoted_p_min: f64,
    p_min_matches_quoted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<EmpiricalEar>,
}

#[derive(Serialize)]
struct EmpiricalEar {
    p: u64,
    right: f64,
    left: f64,
}

fn ears(t: f64, delta: Option<f64>, p: Option<u64>, g: &GlobalOpts) -> Result<bool> {
    let e = ear_parameters(t, delta)?;
    let matches = (e.p_min / QUOTED_EAR_THRESHOLD - 1.0).abs() < 0.01;
    let empirical = match p {
        Some(p) => {
            let ctx = FieldContext::new(p)?;
            let values = trace_table(p, g)?.a_values(&ctx);
            // Snap the ear width down to a rational; a narrower window only
            // lowers the guaranteed height by a negligible amount.
            let scale = 1_000_000_000_000i64;
            let w = ((e.x * scale as f64).floor() as i64).max(1);
            let width = w as f64 / scale as f64;
            let right = Interval::from_ratios((scale - w, scale), (1, 1))?;
            let left = Interval::from_ratios((-1, 1), (w - scale, scale))?;
            let height = |iv: &Interval| -> Result<f64> {
                Ok(empirical_a_count(&values, iv)? as f64 / (p as f64 * width))
            };
            Some(EmpiricalEar { p, right: height(&right)?, left: height(&left)? })
        }
        None => None,
    };
    let report = EarReport {
        t: e.t,
        delta: e.delta,
        x: e.x,
        p_min: e.p_min,
        quoted_p_min: if t == 10.0 && delta.is_none() { QUOTED_EAR_THRESHOLD } else { f64::NAN },
        p_min_matches_quoted: matches,
        empirical,
    };
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Argument(format!("json: {e}")))?
            + "\n",
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "T = {}", e.t);
            let _ = writeln!(s, "delta = {:.6}", e.delta);
            let _ = writeln!(s, "x = {:.6e}", e.x);
            let _ = writeln!(s, "p_min = ({SIGN_DEFINITE_CONSTANT}/(x*delta))^4 = {:.6e}", e.p_min);
            if t == 10.0 && delta.is_none() {
                let _ = writeln!(
                    s,
                    "note: reference threshold is p >= {QUOTED_EAR_THRESHOLD:.2e} for T = 10; \
                     the formula gives {:.3e} (mismatch, x reproduces)",
                    e.p_min
                );
            }
            if let Some(emp) = &report.empirical {
                let _ = writeln!(
                    s,
                    "empirical ear heights at p = {}: right {:.4}, left {:.4} (target T = {})",
                    emp.p, emp.right, emp.left, e.t
                );
            }
            s
        }
    };
    write_out(g.out.as_deref(), &text)?;
    Ok(true)
}
