use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use htl::cohomology::{verify_period_function, Acceptance};
use htl::dynamics::build_system;
use htl::group::{is_prime, verify_group};
use htl::io::{write_atomic, write_json};
use htl::spectral::{candidates_json, confirm, extract_period_function, refine, scan_csv, scan_line, ScanConfig};
use htl::transfer::{alt_residual, build_transfer, build_transfer_alt_p3, from_system, p3_isomorphism};
use htl::{Error, Result};

#[derive(Parser)]
#[command(name = "htl", version, about = "Transfer operators and period functions for Γ₀(p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact group, dynamics and operator checks.
    Verify {
        /// Primes as `a..b` (inclusive; composites skipped) or a comma list.
        #[arg(long, default_value = "2..97")]
        primes: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan σ_min along Re s = re_s and report dips.
    Scan {
        #[arg(short)]
        p: u64,
        #[arg(short = 'N', default_value_t = 48)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        re_s: f64,
        /// `lo:hi:steps`.
        #[arg(long, default_value = "0:10:500")]
        t: String,
        /// Node count for confirming candidates; 0 skips confirmation.
        #[arg(long, default_value_t = 64)]
        confirm_n: usize,
        #[arg(long, default_value = "scan.csv")]
        csv: PathBuf,
        #[arg(long, default_value = "candidates.json")]
        candidates: PathBuf,
    },
    /// Extract the period function at a dip and verify it.
    Period {
        #[arg(short)]
        p: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.5)]
        re_s: f64,
        /// Node count; the default matches the scan's confirmation level.
        #[arg(short = 'N', default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Half-width of the window in which the dip is re-located.
        #[arg(long, default_value_t = 1e-3)]
        window: f64,
        /// Largest σ_min accepted as a kernel.
        #[arg(long, default_value_t = 1e-5)]
        threshold: f64,
        #[arg(long, default_value = "period.json")]
        out: PathBuf,
        #[arg(long, default_value = "report.json")]
        report: PathBuf,
        /// Also map the vector to the second choice of representatives (p = 3).
        #[arg(long)]
        compare_choices: bool,
    },
    /// Write the branch table or the symbolic operator as JSON.
    Dump {
        what: DumpWhat,
        #[arg(short)]
        p: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpWhat {
    System,
    Operator,
    AltOperator,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HTL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn emit(out: Option<&PathBuf>, value: &serde_json::Value) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let text = serde_json::to_string_pretty(value)?;
            match writeln!(std::io::stdout().lock(), "{text}") {
                // a closed pipe (`| head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn parse_primes(spec: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("cannot parse prime list {spec:?}"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        let ps: Vec<u64> = (a..=b).filter(|&n| is_prime(n)).collect();
        if ps.is_empty() {
            return Err(Error::Config(format!("no primes in {spec}")));
        }
        return Ok(ps);
    }
    spec.split(',')
        .map(|x| {
            let n: u64 = x.trim().parse().map_err(|_| bad())?;
            if is_prime(n) {
                Ok(n)
            } else {
                Err(Error::NotPrime(n))
            }
        })
        .collect()
}

fn parse_range(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("expected lo:hi:steps, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
    ))
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Verify { primes, out } => {
            let mut ok = true;
            let mut reports = Vec::new();
            for p in parse_primes(&primes)? {
                let group = verify_group(p)?;
                let sys = build_system(p)?;
                let dynamics = sys.verify();
                let operator = from_system(&sys).same_terms(&build_transfer(p)?);
                ok &= group.passed() && dynamics.is_empty() && operator;
                if let Some(f) = group.failures.first().or(dynamics.first()) {
                    eprintln!("p = {p}: {f}");
                }
                reports.push(json!({
                    "p": p,
                    "involution_relators": group.involution_relators,
                    "triple_relators": group.triple_relators,
                    "group_failures": group.failures,
                    "branches": sys.branches.len(),
                    "dynamics_failures": dynamics,
                    "operator_matches_branches": operator,
                }));
            }
            emit(out.as_ref(), &json!({ "passed": ok, "primes": reports }))?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Scan { p, n, m, re_s, t, confirm_n, csv, candidates } => {
            let (lo, hi, steps) = parse_range(&t)?;
            let cfg = ScanConfig::new(p, n, m, re_s, lo, hi, steps);
            let mut res = scan_line(&cfg)?;
            if confirm_n > 0 {
                let window = 2.0 * (hi - lo) / steps as f64;
                confirm(&cfg, &mut res.candidates, confirm_n, window)?;
            }
            write_atomic(&csv, scan_csv(&res).as_bytes())?;
            write_json(&candidates, &candidates_json(&res))?;
            for c in &res.candidates {
                eprintln!("t = {:.8}  sigma_min = {:.3e}", c.t, c.sigma_min);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Period { p, t, re_s, n, m, window, threshold, out, report, compare_choices } => {
            let t = match refine(p, n, m, re_s, t - window, t + window, 1e-10) {
                Ok((t, _)) => t,
                Err(Error::NoInteriorMinimum { .. }) => t,
                Err(e) => return Err(e),
            };
            let s = Complex64::new(re_s, t);
            let pf = extract_period_function(p, s, n, m, threshold)?;
            let coh = verify_period_function(&pf.vector, Acceptance { m, ..Acceptance::default() })?;
            let mut rep = json!({
                "p": p,
                "s": { "re": s.re, "im": s.im },
                "N": n,
                "m": m,
                "sigma_min": pf.sigma_min,
                "sigma_next": pf.sigma_next,
                "residuals": pf.residuals,
                "cohomology": coh,
            });
            if compare_choices {
                if p != 3 {
                    return Err(Error::Config("--compare-choices needs p = 3".into()));
                }
                let alt = p3_isomorphism(&pf.vector)?;
                rep["choices"] = json!({
                    "original_residual": pf.residuals.eigen,
                    "alternate_residual": alt_residual(&alt)?,
                    "alternate": alt.to_json(),
                });
            }
            write_json(&out, &pf.vector.to_json())?;
            write_json(&report, &rep)?;
            eprintln!("t = {t:.10}: sigma_min = {:.3e}, eigen residual = {:.3e}", pf.sigma_min, pf.residuals.eigen);
            Ok(ExitCode::SUCCESS)
        }
        Command::Dump { what, p, out } => {
            let value = match what {
                DumpWhat::System => build_system(p)?.to_json(),
                DumpWhat::Operator => build_transfer(p)?.to_json(),
                DumpWhat::AltOperator => {
                    if p != 3 {
                        return Err(Error::Config("the alternate operator exists for p = 3 only".into()));
                    }
                    build_transfer_alt_p3().to_json()
                }
            };
            emit(out.as_ref(), &value)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
