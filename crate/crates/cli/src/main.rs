use std::path::PathBuf;
use std::process::ExitCode;

use charlab::Parity;
use charlab_cli::caps::{caps_path, CapsFile};
use charlab_cli::config::Config;
use charlab_cli::explore::{char_eval, char_info, explore, ExploreArgs, Target};
use charlab_cli::format::emit;
use charlab_cli::scan::{run_scan, ScanConfig, DEFAULT_Q_LIMIT};
use charlab_cli::verify::{run_suite, Reporter, Suite};
use charlab_cli::{cache, families, CliError, CliResult, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use clap::{Args, Parser, Subcommand};

/// Dirichlet character sums: identity checks, calibration, scans and reports.
#[derive(Parser)]
#[command(name = "charlab", version)]
struct Cli {
    /// Caps file (default: charlab_caps.json).
    #[arg(long, global = true)]
    caps: Option<PathBuf>,
    /// INI-style `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exit 1 if any check fails.
    Verify { suite: Suite },
    /// Fit the calibrated constants and write the caps file.
    Calibrate {
        /// Output path (default: the --caps path).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan primitive characters and write a CSV table.
    Scan(ScanArgs),
    /// Write a JSON report for one of the finite-scale observations.
    Explore(ExploreCli),
    /// Evaluate or describe one character.
    Char(CharArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    qmin: Option<u64>,
    #[arg(long)]
    qmax: Option<u64>,
    #[arg(long)]
    order: Option<u64>,
    #[arg(long)]
    parity: Option<Parity>,
    /// Comma-separated ε grid.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Only prime moduli.
    #[arg(long)]
    primes_only: bool,
    /// `T` in the nearest-twist search (default 1).
    #[arg(long)]
    twist_t: Option<f64>,
    #[arg(long)]
    c_gs: Option<f64>,
    /// Largest modulus allowed (default 10^7).
    #[arg(long)]
    q_limit: Option<u64>,
    /// Fill runtime_ms (output then depends on the machine).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ExploreCli {
    target: Target,
    /// Character label `q=<int>;e=<exponents>`.
    #[arg(long = "char")]
    character: Option<String>,
    /// one, minus-one, root:<a>/<m> or nit:<t>.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long)]
    x: Option<u64>,
    #[arg(long)]
    xi: Option<String>,
    /// `T` (hmt default (log x)^2, orders default 1).
    #[arg(long = "T", alias = "t")]
    t: Option<f64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    order: Option<u64>,
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    c_gs: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CharArgs {
    #[arg(long)]
    spec: String,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "info", conflicts_with = "info")]
    eval: Option<i64>,
    #[arg(long)]
    info: bool,
}

fn parse_eps(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|e| e.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad eps value {e:?}"))))
        .collect()
}

fn scan_config(a: ScanArgs, cfg: &Config) -> CliResult<ScanConfig> {
    let c = "scan";
    let qmin = cfg.pick(a.qmin, c, "qmin")?.ok_or_else(|| CliError::Config("--qmin is required".into()))?;
    let qmax = cfg.pick(a.qmax, c, "qmax")?.ok_or_else(|| CliError::Config("--qmax is required".into()))?;
    let eps = cfg.pick(a.eps, c, "eps")?.ok_or_else(|| CliError::Config("--eps is required".into()))?;
    let bool_key = |flag: bool, key: &str| -> CliResult<bool> { Ok(flag || cfg.pick::<bool>(None, c, key)?.unwrap_or(false)) };
    Ok(ScanConfig {
        qmin,
        qmax,
        order: cfg.pick(a.order, c, "order")?,
        parity: cfg.pick(a.parity, c, "parity")?,
        primes_only: bool_key(a.primes_only, "primes_only")?,
        eps: parse_eps(&eps)?,
        twist_t: cfg.pick(a.twist_t, c, "twist_t")?.unwrap_or(1.0),
        c_gs: cfg.pick(a.c_gs, c, "c_gs")?.unwrap_or(charlab::pretentious::DEFAULT_C_GS),
        q_limit: cfg.pick(a.q_limit, c, "q_limit")?.unwrap_or(DEFAULT_Q_LIMIT),
        timing: bool_key(a.timing, "timing")?,
        threads: cfg.pick(a.threads, c, "threads")?,
        out: cfg.pick(a.out, c, "out")?,
    })
}

fn run(cli: Cli) -> CliResult<i32> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let caps_file = caps_path(cfg.pick(cli.caps, "caps", "caps")?);
    match cli.command {
        Command::Verify { suite } => {
            let caps = if suite.needs_caps() { Some(CapsFile::load(&caps_file)?) } else { None };
            let mut r = Reporter::new(std::io::stdout().lock());
            run_suite(suite, caps.as_ref(), &mut r)?;
            r.summary();
            Ok(if r.failed == 0 { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Calibrate { out } => {
            let path = out.unwrap_or(caps_file);
            let caps = families::calibrate()?;
            caps.save(&path)?;
            for e in &caps.caps {
                println!("{} = {} (worst {} at {})", e.constant, e.value, e.worst_case.value, e.worst_case.label);
            }
            println!("wrote {}", path.display());
            Ok(EXIT_PASS)
        }
        Command::Scan(a) => {
            let sc = scan_config(a, &cfg)?;
            let text = run_scan(&sc)?;
            emit(sc.out.as_deref(), &text)?;
            Ok(EXIT_PASS)
        }
        Command::Explore(e) => {
            let c = "explore";
            let args = ExploreArgs {
                character: cfg.pick(e.character, c, "char")?,
                synthetic: cfg.pick(e.synthetic, c, "synthetic")?,
                x: cfg.pick(e.x, c, "x")?.unwrap_or(100_000),
                xi: cfg.pick(e.xi, c, "xi")?.unwrap_or_else(|| "log2-quarter".into()),
                t: cfg.pick(e.t, c, "T")?,
                q: cfg.pick(e.q, c, "q")?,
                order: cfg.pick(e.order, c, "order")?.unwrap_or(2),
                psi: cfg.pick(e.psi, c, "psi")?,
                c_gs: cfg.pick(e.c_gs, c, "c_gs")?.unwrap_or(charlab::pretentious::DEFAULT_C_GS),
            };
            if args.x > 1_000_000 {
                cache::warm_from_env()?;
            }
            let text = explore(e.target, &args)?;
            emit(cfg.pick(e.out, c, "out")?.as_deref(), &text)?;
            Ok(EXIT_PASS)
        }
        Command::Char(a) => {
            let text = match a.eval {
                Some(n) => char_eval(&a.spec, n)?,
                None => char_info(&a.spec)?,
            };
            emit(None, &text)?;
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("charlab: {e}");
            EXIT_CONFIG
        }
    };
    ExitCode::from(code as u8)
}
