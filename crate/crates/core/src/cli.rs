//! `grnpole` command-line interface.
//!
//! Every subcommand accepts `--config FILE`, a flat `key = value` file whose
//! keys are the subcommand's long flag names. Command-line flags override
//! file keys, which override built-in defaults.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::analysis::{
    extract_network, generalization_score_genome, oracle_csv, solvability_table, to_dot, SearchOptions, ThetaDotUnit,
    DEFAULT_EDGE_THRESHOLD, GENERALIZATION_STEPS, GRID_SIZE,
};
use crate::cartpole::{Action, CartParams, CartState, STATE_RANGES};
use crate::controller::{
    evaluate_network, run_episode, trajectory_csv, ControllerConfig, DecodeMode, InputEncoding, Warmup,
};
use crate::evolution::{evolve, pole_fitness, EsConfig, EvalStatePolicy, GenomeInit};
use crate::genome::BitGenome;
use crate::regulation::GrnParams;

#[derive(Debug, Parser)]
#[command(
    name = "grnpole",
    version,
    about = "Evolve gene regulatory networks that balance a pole"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the (mu+lambda) evolution strategy.
    Evolve(EvolveArgs),
    /// Evaluate one genome from one start state.
    Evaluate(EvaluateArgs),
    /// Score a genome on the 625-case generalization grid.
    Generalize(GeneralizeArgs),
    /// Count grid cases that no bang-bang sequence can balance to a depth.
    Oracle(OracleArgs),
    /// Record one controlled episode as CSV.
    Trace(TraceArgs),
    /// Export the regulatory network of a genome as a DOT graph.
    Network(NetworkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InitKind {
    Dm,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ActionArg {
    Left,
    Right,
}

impl From<ActionArg> for Action {
    fn from(a: ActionArg) -> Action {
        match a {
            ActionArg::Left => Action::Left,
            ActionArg::Right => Action::Right,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat `key = value` configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long, env = "GRN_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct CartArgs {
    #[arg(long, default_value_t = 9.8)]
    pub gravity: f64,
    #[arg(long, default_value_t = 0.5)]
    pub pole_half_length: f64,
    #[arg(long, default_value_t = 0.1)]
    pub pole_mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub cart_mass: f64,
    /// Magnitude of the bang-bang force (N)
    #[arg(long, default_value_t = 10.0)]
    pub force: f64,
    /// Cart integration step (s)
    #[arg(long, default_value_t = 0.02)]
    pub dt: f64,
}

impl CartArgs {
    fn params(&self) -> CartParams {
        CartParams {
            gravity: self.gravity,
            half_length: self.pole_half_length,
            pole_mass: self.pole_mass,
            cart_mass: self.cart_mass,
            force_mag: self.force,
            dt: self.dt,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ControllerArgs {
    /// How the P protein is turned into an action
    #[arg(long, value_enum, default_value_t = DecodeMode::Concentration)]
    pub decode: DecodeMode,
    /// GRN ticks per cart step
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    pub grn_interval: u64,
    /// Cart steps for a successful episode
    #[arg(long, default_value_t = 120_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub success_steps: u64,
    /// Maximum warm-up ticks before the first cart step
    #[arg(long, default_value_t = 100_000)]
    pub warmup_steps: usize,
    /// Warm-up stops once no concentration moves more than this in a tick
    #[arg(long, default_value_t = 1e-6)]
    pub warmup_tol: f64,
    /// Warm up with zero inputs, then apply the start state
    #[arg(long, default_value_t = false)]
    pub warmup_zero_input: bool,
    /// Action assumed before the first reading
    #[arg(long, value_enum, default_value_t = ActionArg::Left)]
    pub initial_action: ActionArg,
    /// Sharpness of match weighting
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Time scale of one GRN tick
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[command(flatten)]
    pub cart: CartArgs,
}

impl ControllerArgs {
    fn config(&self) -> Result<ControllerConfig, String> {
        let cfg = ControllerConfig {
            decode_mode: self.decode,
            grn_steps_per_action: self.grn_interval as usize,
            warmup: Warmup {
                max_steps: self.warmup_steps,
                tol: self.warmup_tol,
                zero_input: self.warmup_zero_input,
            },
            initial_action: self.initial_action.into(),
            success_steps: self.success_steps as usize,
            grn_params: GrnParams {
                beta: self.beta,
                delta: self.delta,
            },
            cart: self.cart.params(),
            encoding: InputEncoding::default(),
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Parents per generation
    #[arg(long, default_value_t = 250, value_parser = clap::value_parser!(u64).range(1..))]
    pub mu: u64,
    /// Offspring per generation
    #[arg(long, default_value_t = 250, value_parser = clap::value_parser!(u64).range(1..))]
    pub lambda: u64,
    /// Generations after the initial population
    #[arg(long, default_value_t = 50)]
    pub generations: usize,
    /// Initial per-bit mutation rate
    #[arg(long, default_value_t = 0.01)]
    pub mutation_rate: f64,
    /// Below this many flipped bits per generation the rate doubles
    #[arg(long, default_value_t = 250)]
    pub min_flips: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub rate_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub rate_max: f64,
    /// Genome initialization
    #[arg(long, value_enum, default_value_t = InitKind::Dm)]
    pub init: InitKind,
    /// Duplication events for DM genomes
    #[arg(long, default_value_t = 7)]
    pub dm_events: u32,
    /// Per-bit mutation rate of each duplication
    #[arg(long, default_value_t = 0.02)]
    pub dm_rate: f64,
    /// Length of random genomes in bits
    #[arg(long, default_value_t = 4096)]
    pub genome_length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Which start state each fitness evaluation uses
    #[arg(long, value_enum, default_value_t = EvalStatePolicy::PerIndividual)]
    pub eval_state: EvalStatePolicy,
    /// Output directory for runlog.csv and best_genome.txt
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub controller: ControllerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Cart position (m)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    /// Pole angle (degrees)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Cart velocity (m/s)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xdot: f64,
    /// Pole angular velocity (degrees/s)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub thetadot: f64,
}

impl StateArgs {
    fn state(&self) -> Result<CartState, String> {
        let values = [self.x, self.theta, self.xdot, self.thetadot];
        for ((name, v), r) in ["x", "theta", "xdot", "thetadot"].iter().zip(values).zip(STATE_RANGES) {
            if !r.contains(v) {
                return Err(format!("--{name} {v} is outside [{}, {}]", r.min, r.max));
            }
        }
        Ok(CartState::from_display(values))
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Genome file
    pub genome: PathBuf,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub controller: ControllerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GeneralizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Genome file
    pub genome: PathBuf,
    /// P gene to use [default: the best-scoring P gene]
    #[arg(long)]
    pub p_index: Option<usize>,
    /// Steps a case must be balanced to pass
    #[arg(long, default_value_t = GENERALIZATION_STEPS)]
    pub max_steps: usize,
    #[arg(long, default_value = "generalization.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub controller: ControllerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Length of the bang-bang action sequences searched
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: u64,
    /// Remember failed subtrees on a state grid of this spacing (inexact)
    #[arg(long)]
    pub memo_quantum: Option<f64>,
    /// Unit of the grid's pole angular velocity values
    #[arg(long, value_enum, default_value_t = ThetaDotUnit::Deg)]
    pub thetadot_unit: ThetaDotUnit,
    #[arg(long, default_value = "oracle.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub cart: CartArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Genome file
    pub genome: PathBuf,
    #[command(flatten)]
    pub state: StateArgs,
    /// P gene to use [default: the P gene surviving longest from this state]
    #[arg(long)]
    pub p_index: Option<usize>,
    #[arg(long, default_value_t = GENERALIZATION_STEPS)]
    pub max_steps: usize,
    #[arg(long, default_value = "trace.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub controller: ControllerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Genome file
    pub genome: PathBuf,
    /// Keep connections whose match degree exceeds this
    #[arg(long, default_value_t = DEFAULT_EDGE_THRESHOLD, value_parser = clap::value_parser!(u32).range(0..=32))]
    pub threshold: u32,
    /// P gene drawn as the chosen output
    #[arg(long)]
    pub p_index: Option<usize>,
    #[arg(long, default_value = "network.dot")]
    pub out: PathBuf,
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Evolve(a) => &a.common,
            Command::Evaluate(a) => &a.common,
            Command::Generalize(a) => &a.common,
            Command::Oracle(a) => &a.common,
            Command::Trace(a) => &a.common,
            Command::Network(a) => &a.common,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", n + 1));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Rewrites config-file entries into flags placed before the user's own
/// flags. Keys also given on the command line are dropped so the command
/// line wins without the file value being validated.
fn expand_config(args: &[OsString], config: &Path) -> Result<Vec<OsString>, String> {
    let text = fs::read_to_string(config).map_err(|e| format!("cannot read config {}: {e}", config.display()))?;
    let entries = parse_config(&text).map_err(|e| format!("{}: {e}", config.display()))?;
    let sub_name = args
        .get(1)
        .and_then(|s| s.to_str())
        .ok_or("missing subcommand")?
        .to_string();
    let root = Cli::command();
    let sub = root
        .find_subcommand(&sub_name)
        .ok_or_else(|| format!("unknown subcommand {sub_name}"))?;
    let given = |key: &str| {
        let flag = format!("--{key}");
        args[2..]
            .iter()
            .filter_map(|a| a.to_str())
            .any(|a| a == flag || a.strip_prefix(flag.as_str()).is_some_and(|rest| rest.starts_with('=')))
    };
    let mut injected = Vec::new();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| format!("unknown config key `{key}`"))?;
        if given(&key) {
            continue;
        }
        if arg.get_action().takes_values() {
            injected.push(OsString::from(format!("--{key}={value}")));
        } else {
            match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(format!("config key `{key}` expects true or false, got {value:?}")),
            }
        }
    }
    let mut out = args[..2].to_vec();
    out.extend(injected);
    out.extend(args[2..].iter().cloned());
    Ok(out)
}

fn parse(args: &[OsString]) -> Result<Cli, clap::Error> {
    Cli::command()
        .args_override_self(true)
        .try_get_matches_from(args)
        .and_then(|m| {
            use clap::FromArgMatches;
            Cli::from_arg_matches(&m)
        })
}

pub fn main_with_args(args: Vec<OsString>) -> ExitCode {
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = match cli.command.common().config.clone() {
        None => cli,
        Some(path) => match expand_config(&args, &path).map(|a| parse(&a)) {
            Ok(Ok(cli)) => cli,
            Ok(Err(e)) => {
                let _ = e.print();
                return ExitCode::from(2);
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        },
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn workers(common: &CommonArgs) -> usize {
    common
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn read_genome(path: &Path) -> Result<BitGenome, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    BitGenome::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(command: Command) -> Result<(), String> {
    let n = workers(command.common());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| e.to_string())?;
    pool.install(|| match command {
        Command::Evolve(a) => cmd_evolve(a, n),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Generalize(a) => cmd_generalize(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Network(a) => cmd_network(a),
    })
}

fn cmd_evolve(a: EvolveArgs, workers: usize) -> Result<(), String> {
    let controller = a.controller.config()?;
    let es = EsConfig {
        mu: a.mu as usize,
        lambda: a.lambda as usize,
        max_generations: a.generations,
        initial_mutation_rate: a.mutation_rate,
        min_flip_events: a.min_flips,
        rate_bounds: (a.rate_min, a.rate_max),
        genome_init: match a.init {
            InitKind::Dm => GenomeInit::Dm {
                events: a.dm_events,
                rate: a.dm_rate,
            },
            InitKind::Random => GenomeInit::Random {
                length: a.genome_length,
            },
        },
        seed: a.seed,
        target_fitness: 1.0,
    };
    let log = evolve(&es, workers, pole_fitness(controller, a.eval_state)).map_err(|e| e.to_string())?;
    fs::create_dir_all(&a.out).map_err(|e| format!("cannot create {}: {e}", a.out.display()))?;
    write_file(&a.out.join("runlog.csv"), &log.to_csv())?;
    write_file(&a.out.join("best_genome.txt"), &log.best.genome.to_text())?;
    println!(
        "success: {}, generations: {}, best fitness: {}, p_index: {}",
        if log.success { "yes" } else { "no" },
        log.generations.len() - 1,
        log.best.fitness,
        log.best.p_index.map_or("none".to_string(), |p| p.to_string())
    );
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), String> {
    let cfg = a.controller.config()?;
    let genome = read_genome(&a.genome)?;
    let net = cfg.compile(&genome);
    let e = evaluate_network(&net, &cfg, &a.state.state()?);
    println!(
        "fitness: {}, p_index: {}, tf_genes: {}, p_genes: {}, valid: {}",
        e.fitness,
        e.p_index.map_or("none".to_string(), |p| p.to_string()),
        e.tf_genes,
        e.p_genes,
        e.valid
    );
    Ok(())
}

fn cmd_generalize(a: GeneralizeArgs) -> Result<(), String> {
    let cfg = a.controller.config()?;
    let genome = read_genome(&a.genome)?;
    let report = generalization_score_genome(&genome, a.p_index, &cfg, a.max_steps).map_err(|e| e.to_string())?;
    write_file(&a.out, &report.to_csv())?;
    println!("score: {}/{GRID_SIZE} (p_index {})", report.score, report.p_index);
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<(), String> {
    let params = a.cart.params();
    params.validate().map_err(|e| e.to_string())?;
    if let Some(q) = a.memo_quantum {
        if !(q.is_finite() && q > 0.0) {
            return Err(format!("--memo-quantum must be positive, got {q}"));
        }
    }
    let depth = a.depth as usize;
    let table = solvability_table(
        depth,
        &params,
        SearchOptions {
            memo_quantum: a.memo_quantum,
            thetadot_unit: a.thetadot_unit,
        },
    );
    write_file(&a.out, &oracle_csv(depth, &table))?;
    let unsolvable = table.iter().filter(|s| !**s).count();
    println!("unsolvable: {unsolvable}/{GRID_SIZE} at depth {depth}");
    Ok(())
}

fn cmd_trace(a: TraceArgs) -> Result<(), String> {
    let cfg = a.controller.config()?;
    let start = a.state.state()?;
    let genome = read_genome(&a.genome)?;
    let net = cfg.compile(&genome);
    let p_index = match a.p_index {
        Some(p) => p,
        None => {
            let mut best = (0, 0);
            for p in 0..net.p_count() {
                let r = run_episode(&net, p, &cfg, &start, a.max_steps, false).map_err(|e| e.to_string())?;
                if r.steps_survived > best.1 {
                    best = (p, r.steps_survived);
                }
            }
            best.0
        }
    };
    let r = run_episode(&net, p_index, &cfg, &start, a.max_steps, true).map_err(|e| e.to_string())?;
    write_file(&a.out, &trajectory_csv(r.trajectory.as_deref().unwrap_or(&[])))?;
    println!("steps survived: {}, p_index: {p_index}", r.steps_survived);
    Ok(())
}

fn cmd_network(a: NetworkArgs) -> Result<(), String> {
    let genome = read_genome(&a.genome)?;
    let cfg = ControllerConfig::default();
    let net = cfg.compile(&genome);
    let edges = extract_network(&net, a.threshold);
    write_file(&a.out, &to_dot(&edges, &net, a.p_index))?;
    println!(
        "nodes: {}, edges: {}",
        net.genes().len() + net.extra_count(),
        edges.len()
    );
    Ok(())
}
