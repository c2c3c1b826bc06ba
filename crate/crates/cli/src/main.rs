mod commands;
mod config;
mod selftest;

use clap::{Parser, Subcommand};
use config::{Command, RunConfig};
use invscat::Error;
use std::path::PathBuf;
use std::process::ExitCode;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (build ", env!("INVSCAT_BUILD_ID"), ")");

#[derive(Parser, Debug)]
#[command(name = "invscat", version = VERSION, about = "Multi-frequency inverse potential scattering experiments")]
#[command(after_help = RunConfig::help_text())]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,
    /// Config file of `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved config and exit
    #[arg(long, global = true)]
    dump_config: bool,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override one config key, e.g. `--set n=64`
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Solve the forward problem and write datasets
    Forward,
    /// Invert a far-field dataset
    Reconstruct,
    /// Recover b and V in 3D
    Magnetic,
    /// Error against band top, averaged over noise draws
    Sweep,
    /// Weighted resolvent norms over a 2D grid of λ
    ProbeResolvent,
    /// Tabulate the analytic-continuation bound
    Continuation,
    /// Run the built-in invariant checks
    Selftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Forward => Command::Forward,
            Cmd::Reconstruct => Command::Reconstruct,
            Cmd::Magnetic => Command::Magnetic,
            Cmd::Sweep => Command::Sweep,
            Cmd::ProbeResolvent => Command::ProbeResolvent,
            Cmd::Continuation => Command::Continuation,
            Cmd::Selftest => Command::Selftest,
        }
    }
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::OrderOverflow(_) => "order_overflow",
        Error::Singularity(_) => "singularity",
        Error::Quadrature { .. } => "quadrature",
        Error::Shape(_) => "shape",
        Error::Solver { .. } => "solver",
        Error::Resolution { .. } => "resolution",
        Error::Coverage(_) => "coverage",
        Error::Lookup(_) => "lookup",
        Error::Alignment(_) => "alignment",
        Error::Conditioning(_) => "conditioning",
        Error::Pole { .. } => "pole",
        Error::AtBand { source, .. } => error_code(source),
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Lookup(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(c) = cli.command {
        cfg.command = c.into();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Option<String>, Error> {
    let cfg = load(cli)?;
    if cli.dump_config {
        print!("{}", cfg.dump());
        return Ok(None);
    }
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Domain("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    }
    let msg = match cfg.command {
        Command::Forward => commands::forward(&cfg)?,
        Command::Reconstruct => commands::reconstruct(&cfg)?,
        Command::Magnetic => commands::magnetic(&cfg)?,
        Command::Sweep => commands::sweep(&cfg)?,
        Command::ProbeResolvent => commands::probe_resolvent(&cfg)?,
        Command::Continuation => commands::continuation(&cfg)?,
        Command::Selftest => selftest::run()?,
    };
    Ok(Some(msg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(msg)) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            let text = e.to_string().replace('\n', " ");
            eprintln!("error: code={} message={text}", error_code(&e));
            ExitCode::FAILURE
        }
    }
}
