use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use supervol::algebra::rat::parse_rat;
use supervol::kdv::{bgw_initial, kdv_residual};
use supervol::specrec::{laplace_bridge, tr_correlator, SpectralCurve};
use supervol::verify::{expect_zero, run_suite, Report, Suite, VerifyConfig};
use supervol::virasoro::{assemble_tau, free_energy, Bracket, Model};
use supervol::volumes::{normalize_super, SuperNorm, VolCache, CACHE_ENV};
use supervol::{Bounds, Error, EvenPoly, PiScalar};

/// Exact super and Mirzakhani volumes, intersection numbers, KdV tau
/// functions and topological recursion over Q[pi^2].
#[derive(Parser)]
#[command(name = "supervol", version)]
struct Cli {
    /// Persistent volume cache (overrides the SUPERVOL_CACHE_DIR variable).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a volume polynomial.
    Volume {
        flavor: Flavor,
        g: u32,
        n: u32,
        /// Values of L_1^2, L_2^2, ... (rationals, or `2pii` for -4 pi^2).
        #[arg(long, value_delimiter = ',')]
        eval: Vec<String>,
    },
    /// Print one intersection number.
    Bracket {
        model: BracketModel,
        /// The indices k_i of the insertions tau_{k_i}.
        ks: Vec<u32>,
    },
    /// Print a truncated tau function or its logarithm.
    Tau {
        model: TauModel,
        /// Print log Z instead of Z.
        #[arg(long)]
        log: bool,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Print a topological-recursion correlator.
    Specrec {
        curve: String,
        g: u32,
        n: u32,
        /// Also compare with the Laplace bridge of the matching volume.
        #[arg(long)]
        check_bridge: bool,
    },
    /// Run verification suites.
    Verify {
        suite: String,
        /// Volumes and correlators with 2g-2+n up to this bound.
        #[arg(long)]
        max_euler: Option<u32>,
        /// Restrict the dilaton suite to one genus (with --n).
        #[arg(long, requires = "n")]
        g: Option<u32>,
        #[arg(long, requires = "g")]
        n: Option<u32>,
        /// Feed exp(t0^2) to the KdV suite as a negative control.
        #[arg(long)]
        bad_input: bool,
        /// Write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Inspect or clear the persistent cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Flavor {
    Theta,
    Wp,
    Vhat,
    Vsw,
    ThetaTop,
    WpTop,
}

#[derive(Clone, Copy, ValueEnum)]
enum BracketModel {
    Theta,
    Kw,
}

#[derive(Clone, Copy, ValueEnum)]
enum TauModel {
    Theta,
    Kw,
    BgwCheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheAction {
    Stats,
    List,
    Clear,
}

#[derive(Args)]
struct BoundsArgs {
    /// Highest power of hbar.
    #[arg(long)]
    max_hbar: Option<i32>,
    /// Highest total t-degree.
    #[arg(long)]
    max_degree: Option<i32>,
    /// Highest t-index.
    #[arg(long)]
    max_index: Option<i32>,
    /// Shorthand for hbar <= W, t-degree <= W+1, t-index <= W.
    #[arg(long)]
    max_weight: Option<i32>,
}

impl BoundsArgs {
    fn resolve(&self) -> Bounds {
        let d = match self.max_weight {
            Some(w) => Bounds::new(w, w + 1, w),
            None => Bounds::new(3, 4, 4),
        };
        Bounds::new(
            self.max_hbar.unwrap_or(d.max_hbar),
            self.max_degree.unwrap_or(d.max_degree),
            self.max_index.unwrap_or(d.max_index),
        )
    }
}

/// Failure kinds mapped onto exit codes.
enum Failure {
    Usage(String),
    Check,
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(
                Error::Unstable { .. }
                | Error::Parse(_)
                | Error::Domain(_)
                | Error::TruncationInsufficient(_),
            ) => Failure::Usage(format!("{e:#}")),
            _ => Failure::Internal(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn open_cache(flag: Option<PathBuf>) -> anyhow::Result<VolCache> {
    let dir = flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    match dir {
        Some(d) => {
            VolCache::with_dir(&d).with_context(|| format!("opening cache at {}", d.display()))
        }
        None => Ok(VolCache::in_memory()),
    }
}

fn parse_l2(s: &str) -> Result<PiScalar, Error> {
    match s.trim() {
        "2pii" => Ok(PiScalar::two_pi_i_squared()),
        t => parse_rat(t).map(PiScalar::from_rat),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Volume { flavor, g, n, eval } => {
            let cache = open_cache(cli.cache_dir)?;
            let mut v = volume(&cache, flavor, g, n)?;
            if eval.len() > n as usize {
                return Err(Failure::Usage(format!(
                    "{} values given for {n} variables",
                    eval.len()
                )));
            }
            // Substitute from the last given slot down so indices stay valid.
            let vals: Vec<PiScalar> = eval.iter().map(|s| parse_l2(s)).collect::<Result<_, _>>()?;
            for (i, x) in vals.iter().enumerate().rev() {
                v = v.substitute_l2(i, x);
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).context("serializing")?
                );
            } else {
                println!("{v}");
            }
        }
        Cmd::Bracket { model, ks } => {
            let model = match model {
                BracketModel::Theta => Model::Theta,
                BracketModel::Kw => Model::KW,
            };
            let b = Bracket::compute(model, &ks);
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&b).context("serializing")?
                );
            } else {
                println!("{}", supervol::algebra::rat::fmt_rat(&b.value));
            }
        }
        Cmd::Tau { model, log, bounds } => {
            let b = bounds.resolve();
            let model = match model {
                TauModel::Theta => Model::Theta,
                TauModel::Kw => Model::KW,
                TauModel::BgwCheck => return bgw_check(b, json),
            };
            let s = if log {
                free_energy(model, b)
            } else {
                assemble_tau(model, b)?
            };
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&s.to_json()).context("serializing")?
                );
            } else if s.is_zero() {
                println!("0");
            } else {
                for line in s.to_lines() {
                    println!("{line}");
                }
            }
        }
        Cmd::Specrec {
            curve,
            g,
            n,
            check_bridge,
        } => {
            let c = SpectralCurve::parse(&curve)?;
            let w = tr_correlator(&c, g, n)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&w.to_json()).context("serializing")?
                );
            } else {
                println!("{w}");
            }
            if check_bridge {
                let cache = open_cache(cli.cache_dir)?;
                let v = match c.name.as_str() {
                    "theta" if g == 0 => EvenPoly::zero(n as usize),
                    "theta" => cache.vol_theta(g, n)?,
                    "sine" => cache.vol_wp(g, n)?,
                    other => {
                        return Err(Failure::Usage(format!("no volume model for curve {other}")))
                    }
                };
                let ok = laplace_bridge(g, &v).terms == w.terms;
                eprintln!("bridge: {}", if ok { "PASS" } else { "FAIL" });
                if !ok {
                    return Err(Failure::Check);
                }
            }
        }
        Cmd::Verify {
            suite,
            max_euler,
            g,
            n,
            bad_input,
            report,
        } => {
            let suite: Suite = suite.parse()?;
            let cache = open_cache(cli.cache_dir)?;
            let mut cfg = VerifyConfig::default();
            if let Some(e) = max_euler {
                cfg = cfg.with_max_euler(e);
            }
            cfg.only_key = g.zip(n);
            cfg.bad_input = bad_input;
            let reports = run_suite(suite, &cfg, &cache);
            emit_reports(&reports, json, report)?;
            if reports.iter().any(|r| !r.pass) {
                return Err(Failure::Check);
            }
        }
        Cmd::Cache { action } => {
            let cache = open_cache(cli.cache_dir)?;
            if cache.dir().is_none() {
                return Err(Failure::Usage(format!(
                    "no cache directory (pass --cache-dir or set {CACHE_ENV})"
                )));
            }
            match action {
                CacheAction::Stats => println!(
                    "{} entries in {}",
                    cache.disk_keys()?.len(),
                    cache.dir().unwrap().display()
                ),
                CacheAction::List => {
                    for k in cache.disk_keys()? {
                        println!("{k}");
                    }
                }
                CacheAction::Clear => println!("removed {} entries", cache.clear()?),
            }
        }
    }
    Ok(())
}

fn volume(cache: &VolCache, flavor: Flavor, g: u32, n: u32) -> Result<EvenPoly, Error> {
    match flavor {
        Flavor::Theta => cache.vol_theta(g, n),
        Flavor::Wp => cache.vol_wp(g, n),
        Flavor::ThetaTop => cache.vol_theta_top(g, n),
        Flavor::WpTop => cache.vol_wp_top(g, n),
        Flavor::Vhat => normalize_super(cache, g, n, SuperNorm::VhatWP),
        Flavor::Vsw => normalize_super(cache, g, n, SuperNorm::VSW),
    }
}

fn bgw_check(out: Bounds, json: bool) -> Result<(), Failure> {
    let src = Bounds::new(out.max_hbar, out.max_degree + 5, out.max_index.max(1));
    let z = assemble_tau(Model::Theta, src)?;
    let mut kdv = Report::new("bgw-check/kdv");
    expect_zero(&mut kdv, "KdV", &kdv_residual(&z)?, &out);
    let mut init = Report::new("bgw-check/initial");
    let init_out = Bounds::new(out.max_hbar, out.max_degree, 0);
    expect_zero(&mut init, "U(t0)", &bgw_initial(&z)?, &init_out);
    let reports = vec![kdv, init];
    emit_reports(&reports, json, None)?;
    if reports.iter().any(|r| !r.pass) {
        return Err(Failure::Check);
    }
    Ok(())
}

fn emit_reports(reports: &[Report], json: bool, file: Option<PathBuf>) -> Result<(), Failure> {
    let doc = serde_json::json!({
        "pass": reports.iter().all(|r| r.pass),
        "reports": reports,
    });
    if let Some(path) = file {
        let text = serde_json::to_string_pretty(&doc).context("serializing report")?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).context("serializing report")?
        );
        return Ok(());
    }
    for r in reports {
        println!("{}", r.status_line());
        for note in &r.notes {
            println!("    {note}");
        }
        for d in &r.diffs {
            println!("    {d}");
        }
    }
    Ok(())
}
