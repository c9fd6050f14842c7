//! Command-line frontend: traces, trace tables, form dumps, congruence
//! sweeps, and series-vs-oracle comparisons.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 usage or precondition error, 3 internal consistency violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use singmod::error::Error;
use singmod::forms::TraceTableLevel1;
use singmod::hecke::{verify_level1, verify_star, CongruenceReport};
use singmod::oracle::{trace_oracle_level1, trace_oracle_star, PrecisionContext};
use singmod::phi::{auto_window, construct_phi_p, min_window, singular_classes, PhiP};
use singmod::{bqf, forms, is_genus_zero_prime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "singmod",
    about = "Exact traces of singular moduli, their Jacobi forms, and Hecke congruences",
    version
)]
struct Cli {
    /// Override the automatically derived q-expansion window.
    #[arg(long, global = true)]
    qprec: Option<i64>,

    /// Mantissa bits for the Heegner-point oracle.
    #[arg(long, global = true, default_value_t = 256)]
    bits: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    /// Directory for expansion caches (advisory; revalidated on load).
    #[arg(long, global = true, env = "SINGMOD_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Ignore caches and reconstruct from scratch.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Worker threads for verification sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print t(d) (level 1) or t^(p)(d).
    Trace {
        /// "1" or a genus-zero prime p.
        #[arg(long)]
        level: String,
        #[arg(long)]
        d: i64,
    },
    /// Print all valid (d, t^(p)(d)) with d <= dmax.
    Table {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        dmax: i64,
    },
    /// Run a congruence sweep and report PASS/SKIP/FAIL per discriminant.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Construct phi_p and write its expansion cache.
    Phi {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        qmax: Option<i64>,
        /// Output path; defaults to phi_p<p>_q<qmax>.json in the cache
        /// directory or the working directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare series traces against the Heegner-point oracle.
    Compare {
        /// "1" for level 1; otherwise use --p.
        #[arg(long)]
        level: Option<String>,
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        dmax: i64,
    },
}

#[derive(Subcommand)]
enum VerifyKind {
    /// Level-1 congruences t(l^2 d) = 0 mod l for split l.
    Ao {
        #[arg(long)]
        l: i64,
        #[arg(long)]
        dmax: i64,
    },
    /// Level-p congruences t^(p)(l^2 d) = 0 mod l for split l distinct
    /// from p.
    Osburn {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        dmax: i64,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnsupportedDiscriminant { .. }
        | Error::UnsupportedLevel { .. }
        | Error::InvalidArgument(_) => 2,
        _ => 3,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // deterministic output does not depend on the pool size; ignore a
        // pool that was already installed
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => code,
        Err(err) => fail(err),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.cmd {
        Cmd::Trace { level, d } => cmd_trace(cli, level, *d),
        Cmd::Table { p, dmax } => cmd_table(cli, *p, *dmax),
        Cmd::Verify { kind } => cmd_verify(cli, kind),
        Cmd::Phi { p, qmax, out } => cmd_phi(cli, *p, *qmax, out.as_deref()),
        Cmd::Compare { level, p, dmax } => cmd_compare(cli, level.as_deref(), *p, *dmax),
    }
}

/// Build (or load from cache) phi_p with a window of at least `window`.
fn get_phi(cli: &Cli, p: i64, window: i64) -> Result<PhiP, Error> {
    let window = cli.qprec.unwrap_or(window).max(min_window(p));
    let cache_path = cli
        .cache_dir
        .as_ref()
        .map(|dir| dir.join(format!("phi_p{p}_q{window}.json")));
    if !cli.no_cache {
        if let Some(path) = &cache_path {
            if let Ok(text) = std::fs::read_to_string(path) {
                match PhiP::from_cache_json(&text) {
                    Ok(phi) if phi.qmax() >= window => return Ok(phi),
                    // stale or invalid caches are rebuilt
                    _ => {}
                }
            }
        }
    }
    let phi = construct_phi_p(p, window)?;
    if !cli.no_cache {
        if let Some(path) = &cache_path {
            if let Some(parent) = path.parent() {
                let _ = std::fs::create_dir_all(parent);
            }
            let _ = std::fs::write(path, phi.to_cache_json());
        }
    }
    Ok(phi)
}

fn parse_level(level: &str) -> Result<Option<i64>, Error> {
    if level == "1" {
        return Ok(None);
    }
    let p: i64 = level
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("level must be 1 or a prime, got {level}")))?;
    if !is_genus_zero_prime(p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "Gamma_0(p)* has positive genus or p is not prime".into(),
        });
    }
    Ok(Some(p))
}

fn cmd_trace(cli: &Cli, level: &str, d: i64) -> Result<ExitCode, Error> {
    let value: BigInt = match parse_level(level)? {
        None => {
            if !forms::is_level1_discriminant(d) {
                return Err(Error::UnsupportedDiscriminant {
                    d,
                    why: "level-1 traces require d = 0, 3 mod 4".into(),
                });
            }
            let table = TraceTableLevel1::new(cli.qprec.unwrap_or(d).max(d))?;
            table.trace(d)?
        }
        Some(p) => {
            if bqf::sqrt_classes(p, d).is_empty() {
                return Err(Error::UnsupportedDiscriminant {
                    d,
                    why: format!("-d must be congruent to a square modulo 4p = {}", 4 * p),
                });
            }
            let phi = get_phi(cli, p, auto_window(p, 1, d))?;
            phi.trace_star(d)?
        }
    };
    match cli.format {
        Format::Plain => println!("{value}"),
        Format::Json => println!(
            "{}",
            serde_json_line(&[("level", level.into()), ("d", d.to_string())], &value)
        ),
        Format::Csv => println!("level,d,trace\n{level},{d},{value}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn serde_json_line(fields: &[(&str, String)], value: &BigInt) -> String {
    let mut parts: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("\"{k}\":\"{v}\""))
        .collect();
    parts.push(format!("\"trace\":\"{value}\""));
    format!("{{{}}}", parts.join(","))
}

fn cmd_table(cli: &Cli, p: i64, dmax: i64) -> Result<ExitCode, Error> {
    if !is_genus_zero_prime(p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "table requires a genus-zero prime".into(),
        });
    }
    let phi = get_phi(cli, p, auto_window(p, 1, dmax))?;
    let rows: Vec<(i64, BigInt)> = bqf::valid_discriminants(p, dmax)
        .into_iter()
        .map(|d| Ok((d, phi.trace_star(d)?)))
        .collect::<Result<_, Error>>()?;
    match cli.format {
        Format::Plain => {
            for (d, t) in &rows {
                println!("{d}\t{t}");
            }
        }
        Format::Json => {
            let entries: Vec<String> = rows
                .iter()
                .map(|(d, t)| format!("{{\"d\":{d},\"trace\":\"{t}\"}}"))
                .collect();
            println!(
                "{{\"p\":{p},\"dmax\":{dmax},\"entries\":[{}]}}",
                entries.join(",")
            );
        }
        Format::Csv => {
            println!("d,trace");
            for (d, t) in &rows {
                println!("{d},{t}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn report_out(cli: &Cli, report: &CongruenceReport) -> ExitCode {
    match cli.format {
        Format::Plain => {
            for e in &report.entries {
                let note = e.note.as_deref().unwrap_or("");
                println!(
                    "d = {:5}  split = {:5}  trace = {}  residue = {}  {} {}",
                    e.d,
                    e.split,
                    e.trace,
                    e.residue,
                    e.verdict.as_str(),
                    note
                );
            }
            println!(
                "{} PASS, {} SKIP, {} FAIL",
                report.passes(),
                report.skips(),
                report.fails()
            );
        }
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
    }
    if report.fails() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_verify(cli: &Cli, kind: &VerifyKind) -> Result<ExitCode, Error> {
    match kind {
        VerifyKind::Ao { l, dmax } => {
            let need = l * l * dmax;
            let table = TraceTableLevel1::new(cli.qprec.unwrap_or(need).max(need))?;
            let report = verify_level1(*l, *dmax, &table)?;
            Ok(report_out(cli, &report))
        }
        VerifyKind::Osburn { p, l, dmax } => {
            if !is_genus_zero_prime(*p) {
                return Err(Error::UnsupportedLevel {
                    p: *p,
                    why: "verification requires a genus-zero prime".into(),
                });
            }
            if l == p {
                return Err(Error::InvalidArgument(
                    "the congruence requires l distinct from p".into(),
                ));
            }
            let phi = get_phi(cli, *p, auto_window(*p, *l, *dmax))?;
            let report = verify_star(*p, *l, *dmax, &phi)?;
            Ok(report_out(cli, &report))
        }
    }
}

fn cmd_phi(cli: &Cli, p: i64, qmax: Option<i64>, out: Option<&std::path::Path>) -> Result<ExitCode, Error> {
    if !is_genus_zero_prime(p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "phi_p exists for the fifteen genus-zero primes only".into(),
        });
    }
    let window = qmax.or(cli.qprec).unwrap_or_else(|| min_window(p).max(10));
    let phi = construct_phi_p(p, window)?;
    let path = out.map(PathBuf::from).unwrap_or_else(|| {
        let name = format!("phi_p{p}_q{window}.json");
        match &cli.cache_dir {
            Some(dir) => dir.join(name),
            None => PathBuf::from(name),
        }
    });
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::InvalidArgument(format!("cannot create {parent:?}: {e}")))?;
        }
    }
    std::fs::write(&path, phi.to_cache_json())
        .map_err(|e| Error::InvalidArgument(format!("cannot write {path:?}: {e}")))?;
    let classes = singular_classes(p);
    println!(
        "phi_{p} at window {window}: wrote {}",
        path.display()
    );
    println!(
        "singular audit: B(-1) = {}, B(0) = {}, {} negative-D classes all clear",
        phi.extract_b(-1)?,
        phi.extract_b(0)?,
        classes.len() - 1
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(cli: &Cli, level: Option<&str>, p: Option<i64>, dmax: i64) -> Result<ExitCode, Error> {
    let ctx = PrecisionContext::new(cli.bits);
    let mut all_equal = true;
    let mut rows: Vec<(i64, BigInt, BigInt)> = Vec::new();
    match (level, p) {
        (Some("1"), None) | (None, None) => {
            let table = TraceTableLevel1::new(cli.qprec.unwrap_or(dmax).max(dmax))?;
            for d in 1..=dmax {
                if !forms::is_level1_discriminant(d) {
                    continue;
                }
                let series = table.trace(d)?;
                let oracle = trace_oracle_level1(d, &ctx)?;
                all_equal &= series == oracle;
                rows.push((d, series, oracle));
            }
        }
        (None, Some(p)) => {
            if !forms::ETA_HAUPTMODUL_PRIMES.contains(&p) {
                return Err(Error::UnsupportedLevel {
                    p,
                    why: "the oracle covers p in {2, 3, 5, 7, 13} only".into(),
                });
            }
            let phi = get_phi(cli, p, auto_window(p, 1, dmax))?;
            for d in bqf::valid_discriminants(p, dmax) {
                if d % (p * p) == 0 {
                    continue;
                }
                let series = phi.trace_star(d)?;
                let oracle = trace_oracle_star(p, d, &ctx)?;
                all_equal &= series == oracle;
                rows.push((d, series, oracle));
            }
        }
        _ => {
            return Err(Error::InvalidArgument(
                "compare takes either --level 1 or --p <prime>".into(),
            ))
        }
    }
    match cli.format {
        Format::Plain => {
            for (d, s, o) in &rows {
                println!(
                    "d = {d:5}  series = {s}  oracle = {o}  {}",
                    if s == o { "ok" } else { "MISMATCH" }
                );
            }
        }
        Format::Json => {
            let entries: Vec<String> = rows
                .iter()
                .map(|(d, s, o)| {
                    format!(
                        "{{\"d\":{d},\"series\":\"{s}\",\"oracle\":\"{o}\",\"equal\":{}}}",
                        s == o
                    )
                })
                .collect();
            println!(
                "{{\"dmax\":{dmax},\"equal\":{all_equal},\"entries\":[{}]}}",
                entries.join(",")
            );
        }
        Format::Csv => {
            println!("d,series,oracle,equal");
            for (d, s, o) in &rows {
                println!("{d},{s},{o},{}", s == o);
            }
        }
    }
    Ok(if all_equal {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
