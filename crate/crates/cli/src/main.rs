use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qwalk_cli::config::{
    ConfigError, EngineChoice, ExperimentConfig, ExperimentKind, HorizonRule, NRange, RoutingMode,
};
use qwalk_cli::RunError;

/// Quantum walks on the hypercube: hitting-probability scans, classical
/// baselines, routing simulations and a self-check.
#[derive(Parser, Debug)]
#[command(name = "qwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One-shot corner-to-corner probability at T.
    Oneshot {
        #[command(flatten)]
        common: Common,
        /// Also scan the sqrt(n)/ln n window around pi*n/2.
        #[arg(long)]
        window: bool,
    },
    /// Hitting probability of the walk measured after every step.
    Concurrent(Common),
    /// Continuous-time walk, one-shot and measured at integer times.
    Continuous(Common),
    /// Classical random-walk hitting times and the quantum comparison.
    Classical(Common),
    /// Starts and targets near the corners.
    Neighborhood(Common),
    /// Packet routing with failed edges or interceptors.
    Routing {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        routing: RoutingArgs,
    },
    /// Cross-checks engines and oracles; exits 1 on any failure.
    Verify(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single cube dimension.
    #[arg(long, conflicts_with = "n_range")]
    n: Option<usize>,
    /// Dimensions: "4..12", "16..512:x2", "6,8,10".
    #[arg(long)]
    n_range: Option<NRange>,
    #[arg(long)]
    engine: Option<EngineChoice>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// "half-period", "scaled:F" or "fixed:T".
    #[arg(long)]
    horizon: Option<HorizonRule>,
    /// Also scan the n^beta window around pi*n/2.
    #[arg(long)]
    window_exponent: Option<f64>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Largest start distance for the neighborhood scan.
    #[arg(long)]
    depth: Option<usize>,
    /// Negate one coin column before verifying (the check must then fail).
    #[arg(long)]
    tamper_coin: bool,
}

#[derive(Args, Debug)]
struct RoutingArgs {
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    destination: Option<String>,
    /// Measure once at T, or at the destination after every step.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<RoutingMode>,
    /// Random edges deleted per instance.
    #[arg(long)]
    random_deleted_edges: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    /// Intercept at each sub-cube weight class in turn.
    #[arg(long)]
    interceptor_scan: bool,
}

fn parse_mode(s: &str) -> Result<RoutingMode, String> {
    match s {
        "one-shot" => Ok(RoutingMode::OneShot),
        "concurrent" => Ok(RoutingMode::Concurrent),
        _ => Err(format!("unknown mode {s:?}: expected one-shot or concurrent")),
    }
}

impl Common {
    fn into_config(self, kind: ExperimentKind) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        // `oneshot` keeps a window scan requested by the config file.
        if !(kind == ExperimentKind::Oneshot && cfg.kind == ExperimentKind::OneshotWindow) {
            cfg.kind = kind;
        }
        if self.format != "csv" {
            return Err(ConfigError::Format(self.format));
        }
        if let Some(n) = self.n {
            cfg.n_range = NRange::from_values(vec![n])?;
        }
        if let Some(r) = self.n_range {
            cfg.n_range = r;
        }
        if self.engine.is_some() {
            cfg.engine = self.engine;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if self.window_exponent.is_some() {
            cfg.window_exponent = self.window_exponent;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(d) = self.depth {
            cfg.depth = d;
        }
        cfg.tamper_coin |= self.tamper_coin;
        Ok(cfg)
    }
}

impl RoutingArgs {
    fn apply(self, cfg: &mut ExperimentConfig) {
        let r = &mut cfg.routing;
        if self.source.is_some() {
            r.source = self.source;
        }
        if self.destination.is_some() {
            r.destination = self.destination;
        }
        if let Some(m) = self.mode {
            r.mode = m;
        }
        if let Some(k) = self.random_deleted_edges {
            r.random_deleted_edges = k;
        }
        if let Some(i) = self.instances {
            r.instances = i;
        }
        r.interceptor_scan |= self.interceptor_scan;
    }
}

fn build_config(command: Command) -> Result<ExperimentConfig, ConfigError> {
    match command {
        Command::Oneshot { common, window } => {
            let kind = if window {
                ExperimentKind::OneshotWindow
            } else {
                ExperimentKind::Oneshot
            };
            common.into_config(kind)
        }
        Command::Concurrent(c) => c.into_config(ExperimentKind::Concurrent),
        Command::Continuous(c) => c.into_config(ExperimentKind::Continuous),
        Command::Classical(c) => c.into_config(ExperimentKind::Classical),
        Command::Neighborhood(c) => c.into_config(ExperimentKind::Neighborhood),
        Command::Routing { common, routing } => {
            let mut cfg = common.into_config(ExperimentKind::Routing)?;
            routing.apply(&mut cfg);
            Ok(cfg)
        }
        Command::Verify(c) => c.into_config(ExperimentKind::Verify),
    }
}

fn run(command: Command) -> Result<bool, RunError> {
    let cfg = build_config(command)?;
    let out = qwalk_cli::run(&cfg)?;
    match &cfg.out {
        Some(path) => out.table.write_csv(BufWriter::new(File::create(path)?))?,
        None => out.table.write_csv(io::stdout().lock())?,
    }
    if let Some(report) = &out.report {
        let mut err = io::stderr().lock();
        for c in &report.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(
                err,
                "{status} {} n={}: observed {:.3e}, tolerance {:.1e}",
                c.name, c.n, c.observed, c.tolerance
            )?;
        }
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    if let Some(workers) = std::env::var("QWALK_WORKERS").ok().and_then(|v| v.parse().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
