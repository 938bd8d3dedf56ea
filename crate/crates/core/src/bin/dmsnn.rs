use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use dmsnn::config::{parse_checkpoints, RunConfig};
use dmsnn::eval::{
    battery_specs, run_battery, success_curve, training_samples, write_curve_csv, write_trials_csv,
    BatterySummary,
};
use dmsnn::izhikevich::{NeuronParams, TuningReport};
use dmsnn::network::summation::{summation_experiment, Layout, SummationConfig, DEFAULT_TRIALS};
use dmsnn::network::{DmsnnNetwork, SpikeRecord};
use dmsnn::robotsim::OracleController;
use dmsnn::{Error, Result};

#[derive(Parser)]
#[command(name = "dmsnn", version, about = "Spiking sensorimotor map for a planar arm")]
struct Cli {
    /// Leave the generation time out of output headers.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Neuron tuning tools.
    #[command(subcommand)]
    Neuron(NeuronCommand),
    /// Train a network and write its weight archive.
    Train(TrainArgs),
    /// Run the servo battery with a trained network.
    Servo(ServoArgs),
    /// Summation benchmark.
    BenchSum(BenchSumArgs),
    /// Success rate against training iterations.
    Curve(CurveArgs),
}

#[derive(Subcommand)]
enum NeuronCommand {
    /// Equilibria, stability and rheobase of one parameter set.
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        d: f64,
        /// Constant input current.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        i: f64,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// Run configuration (`key = value` lines); defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight archive to write.
    #[arg(long)]
    out: PathBuf,
    /// Overrides DMSNN_SEED and the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Spike raster CSV of the whole training run.
    #[arg(long)]
    raster: Option<PathBuf>,
    /// Progress line every this many iterations (0 for none).
    #[arg(long, default_value_t = 250)]
    log_every: usize,
}

#[derive(Args)]
struct ServoArgs {
    /// Weight archive from `train`; not needed with --oracle.
    #[arg(long, required_unless_present = "oracle")]
    weights: Option<PathBuf>,
    /// Run configuration for the arm and servo loop.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    targets: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Per-trial CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Use the analytic inverse-Jacobian controller instead of the network.
    #[arg(long)]
    oracle: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchSumArgs {
    /// `1d` (separate input bundles) or `2d` (joint input layer).
    #[arg(long)]
    layout: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// `a,b,c` or `start:stop:step`; overrides the configured checkpoints.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Comma-separated motor `b` values, one curve each.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sweep_b: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    seed: Option<u64>,
}

fn seed_from(flag: Option<u64>) -> Result<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("DMSNN_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("DMSNN_SEED must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<RunConfig> {
    let cfg = match path {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    Ok(match seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn header(command: &str, cfg: Option<&RunConfig>, timestamp: bool) -> String {
    let mut s = format!("# dmsnn {} {command}\n", env!("CARGO_PKG_VERSION"));
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        s.push_str(&format!("# generated_unix_s={secs}\n"));
    }
    if let Some(c) = cfg {
        s.push_str(&c.header());
    }
    s
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn train(args: TrainArgs, timestamp: bool) -> Result<()> {
    let cfg = load_config(args.config.as_deref(), seed_from(args.seed)?)?;
    let samples = training_samples(&cfg)?;
    let mut net = DmsnnNetwork::build(cfg.network.clone())?;
    let mut raster: Vec<SpikeRecord> = Vec::new();
    let keep_raster = args.raster.is_some();
    let every = args.log_every;
    let total = cfg.iterations;
    eprintln!("training {total} iterations on {} samples", samples.len());
    net.train(&samples, total, |it, out| {
        if keep_raster {
            raster.extend_from_slice(&out.spikes);
        }
        if every > 0 && (it % every == 0 || it == total) {
            eprintln!(
                "iteration {it}/{total}  |dw| = {:.4e}  potentiated {}  depressed {}",
                out.delta.l2, out.delta.potentiated, out.delta.depressed
            );
        }
    })?;
    write_file(&args.out, |w| w.write_all(net.snapshot().as_bytes()))?;
    if let Some(path) = &args.raster {
        let head = header("train raster", Some(&cfg), timestamp);
        write_file(path, |w| {
            w.write_all(head.as_bytes())?;
            writeln!(w, "time_ms,bundle,neuron")?;
            for s in &raster {
                writeln!(w, "{},{},{}", s.time, s.bundle, s.neuron)?;
            }
            Ok(())
        })?;
    }
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

fn servo(args: ServoArgs, timestamp: bool) -> Result<()> {
    let mut cfg = load_config(args.config.as_deref(), seed_from(args.seed)?)?;
    if let Some(t) = args.targets {
        cfg.targets = t;
    }
    if let Some(r) = args.repeats {
        cfg.repeats = r;
    }
    if cfg.targets == 0 || cfg.repeats == 0 {
        return Err(Error::Config("targets and repeats must be at least 1".into()));
    }
    if args.jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    let specs = battery_specs(&cfg);
    let summary: BatterySummary = if args.oracle {
        let oracle = OracleController { arm: cfg.arm };
        run_battery(&oracle, &cfg.arm, &specs, &cfg.servo, args.jobs)?
    } else {
        let path = args.weights.as_deref().expect("required by clap");
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let net = DmsnnNetwork::restore(&text)?;
        cfg.network = net.config().clone();
        run_battery(&net, &cfg.arm, &specs, &cfg.servo, args.jobs)?
    };
    let controller = if args.oracle { "oracle" } else { "network" };
    let head = header(&format!("servo controller={controller}"), Some(&cfg), timestamp);
    write_file(&args.out, |w| {
        w.write_all(head.as_bytes())?;
        write_trials_csv(w, &summary.trials)
    })?;
    println!(
        "success {:.1}% ({}/{})",
        summary.success_pct,
        summary.successes(),
        summary.trials.len()
    );
    match (summary.e_mean, summary.sigma) {
        (Some(m), Some(s)) => println!("e_mean {:.3} mm  sigma {:.3} mm", m * 1e3, s * 1e3),
        (Some(m), None) => println!("e_mean {:.3} mm", m * 1e3),
        _ => println!("e_mean n/a (no successful trials)"),
    }
    Ok(())
}

fn bench_sum(args: BenchSumArgs) -> Result<()> {
    let layout: Layout = args.layout.parse()?;
    let seed = seed_from(args.seed)?.unwrap_or(1);
    let report = summation_experiment(&SummationConfig::new(layout, args.trials, seed))?;
    println!(
        "{layout}: mean error {:.2}% over {} evaluations ({} silent)",
        report.percent(),
        report.evaluations,
        report.silent
    );
    Ok(())
}

fn curve(args: CurveArgs, timestamp: bool) -> Result<()> {
    let mut cfg = load_config(args.config.as_deref(), seed_from(args.seed)?)?;
    if let Some(spec) = &args.checkpoints {
        cfg.checkpoints = parse_checkpoints(spec)
            .ok_or_else(|| Error::Config(format!("bad checkpoint list `{spec}`")))?;
    }
    cfg.validate()?;
    if args.jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    let b_values = if args.sweep_b.is_empty() {
        vec![cfg.network.motor.b]
    } else {
        args.sweep_b.clone()
    };
    let points = success_curve(&cfg, &b_values, args.jobs, |p| {
        eprintln!("b = {}  iteration {}  success {:.1}%", p.b, p.checkpoint, p.success_pct);
    })?;
    let head = header("curve", Some(&cfg), timestamp);
    write_file(&args.out, |w| {
        w.write_all(head.as_bytes())?;
        write_curve_csv(w, &points)
    })
}

fn run(cli: Cli) -> Result<()> {
    let timestamp = !cli.no_timestamp;
    match cli.command {
        Command::Neuron(NeuronCommand::Analyze { a, b, c, d, i }) => {
            let report = TuningReport::analyze(NeuronParams::new(a, b, c, d)?, i)?;
            println!("{report}");
            Ok(())
        }
        Command::Train(args) => train(args, timestamp),
        Command::Servo(args) => servo(args, timestamp),
        Command::BenchSum(args) => bench_sum(args),
        Command::Curve(args) => curve(args, timestamp),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
