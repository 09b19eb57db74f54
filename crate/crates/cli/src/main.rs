use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use randmargins::audit::{
    adversarial_pairs_1d, adversary_game_simulator, concentration_experiment, concentration_pair, exact_pair_audit,
    monte_carlo_privacy_lower_bound, AuditReport, GameConfig, McConfig, Strategy,
};
use randmargins::experiments::{emit_report, generate_synthetic, run_learning_benchmark, ExperimentConfig, LearnerKind};
use randmargins::io::{read_dataset, write_dataset};
use randmargins::ipp::{contract_benchmark, solve_interior_point, ExpMechIpp, IppParams, SolverKind};
use randmargins::learner::{
    baseline_composition_learner, learn_rectangle, variant_learner, PrivacyBudget, RandMarginsParams,
};
use randmargins::seed::rng_from_seed;
use randmargins::Execution;

/// Differentially private rectangle learning, audits, and experiments.
#[derive(Parser)]
#[command(name = "randmargins", version)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "RANDMARGINS_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
    /// Run trials on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a rectangle from a labeled CSV sample.
    Learn(LearnArgs),
    /// Run a privacy or concentration audit and print its JSON report.
    Audit(AuditArgs),
    /// Simulate the three-outcome adversary game.
    Game(GameArgs),
    /// Run a learning benchmark from a TOML config.
    Bench(BenchArgs),
    /// Run an interior point solver on values or check its contract.
    Ipp(IppArgs),
    /// Generate a synthetic sample from a TOML config.
    Gen(GenArgs),
}

#[derive(Args, Clone, Copy)]
struct PrivacyArgs {
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value = "exp-mech")]
    solver: SolverKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct LearnArgs {
    /// CSV with columns x1..xd,label.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    x_max: u32,
    #[arg(long, default_value = "rand-margins")]
    learner: LearnerKind,
    #[command(flatten)]
    privacy: PrivacyArgs,
    /// Write the per-iteration trace as JSON lines to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditMode {
    #[value(name = "exact-1d")]
    Exact1d,
    Mc,
    Concentration,
    Game,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(value_enum)]
    mode: AuditMode,
    #[arg(long, default_value_t = 64)]
    x_max: u32,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Filler points per axis for the mc and concentration pairs.
    #[arg(long, default_value_t = 600)]
    filler: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyKind {
    Constant,
    Boundary,
    Greedy,
    Alternating,
}

#[derive(Args)]
struct GameArgs {
    #[arg(long, value_enum, default_value = "constant")]
    strategy: StrategyKind,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 0.125)]
    q_bar: f64,
    /// Score above which the greedy strategy stops playing.
    #[arg(long, default_value_t = 35)]
    target: u32,
    #[arg(long, default_value_t = 500)]
    rounds: usize,
    #[arg(long, default_value_t = 100_000)]
    episodes: usize,
    #[arg(long, value_delimiter = ',', default_value = "35,50,70")]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct IppArgs {
    /// Comma-separated values; omit to run the contract check.
    #[arg(long, value_delimiter = ',')]
    values: Vec<u32>,
    #[arg(long)]
    domain_max: u32,
    #[command(flatten)]
    privacy: PrivacyArgs,
    /// Print the exact output pmf instead of a draw.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    n: usize,
    /// Dimension; defaults to the config's `d`.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; defaults to `<out-dir>/sample.csv`.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

fn learn(args: &LearnArgs) -> Result<()> {
    let file = File::open(&args.data).with_context(|| format!("opening {}", args.data.display()))?;
    let sample = read_dataset(BufReader::new(file), args.x_max)?;
    let p = args.privacy;
    let ipp = IppParams::new(p.epsilon, p.delta, p.beta, args.x_max)?;
    let solver = p.solver.build();
    match args.learner {
        LearnerKind::RandMargins => {
            let params = RandMarginsParams::new(ipp, solver.as_ref(), p.seed)?;
            let out = learn_rectangle(&sample, &params, solver.as_ref())?;
            if let (Some(path), Some(run)) = (&args.trace, &out.run) {
                std::fs::write(path, run.trace.to_json_lines()?)?;
            }
            let budget = PrivacyBudget::new(p.epsilon, p.delta, sample.dim());
            print_json(&json!({
                "hypothesis": out.hypothesis,
                "fallback": out.fallback,
                "budget": budget,
            }))
        }
        LearnerKind::Baseline => {
            print_json(&baseline_composition_learner(&sample, &ipp, solver.as_ref(), p.seed)?)
        }
        LearnerKind::Failed1 | LearnerKind::Failed2 => {
            let variant = args.learner.variant().expect("variant learner");
            let run = variant_learner(&sample, &ipp, solver.as_ref(), variant, p.seed, None)?;
            print_json(&json!({ "hypothesis": run.hypothesis, "sizes": run.sizes() }))
        }
    }
}

fn game_report(config: &GameConfig, episodes: usize, gammas: &[f64], seed: u64, exec: Execution) -> Result<AuditReport> {
    let report = adversary_game_simulator(config, episodes, gammas, 0.99, seed, exec)?;
    let params = json!({ "strategy": config.strategy, "rounds": config.rounds, "episodes": episodes });
    Ok(report.report(params)?)
}

fn audit(args: &AuditArgs, exec: Execution) -> Result<AuditReport> {
    let solver = ExpMechIpp;
    let params_json = json!({
        "x_max": args.x_max, "d": args.d, "epsilon": args.epsilon, "delta": args.delta,
        "beta": args.beta, "trials": args.trials, "seed": args.seed,
    });
    let ipp = IppParams::new(args.epsilon, args.delta, args.beta, args.x_max)?;
    let params = RandMarginsParams::new(ipp, &solver, args.seed)?;
    Ok(match args.mode {
        AuditMode::Exact1d => {
            let pairs = adversarial_pairs_1d(args.x_max, params.block_size)?;
            exact_pair_audit(&pairs, &params, SolverKind::ExpMech)?.report(params_json)?
        }
        AuditMode::Mc => {
            let group = params.margin.ceil() as usize;
            let pair = concentration_pair(args.d, args.x_max, group, args.filler, args.seed)?;
            let budget = PrivacyBudget::new(args.epsilon, args.delta, args.d);
            let config = McConfig::new(args.trials, args.seed);
            monte_carlo_privacy_lower_bound(&pair, &params, &solver, &config, &budget, exec)?.report(params_json)?
        }
        AuditMode::Concentration => {
            let group = params.margin.ceil() as usize;
            let pair = concentration_pair(args.d, args.x_max, group, args.filler, args.seed)?;
            concentration_experiment(&pair, &params, &solver, args.trials, args.delta, args.seed, exec)?
                .report(params_json)?
        }
        AuditMode::Game => {
            let config = GameConfig {
                rounds: 500,
                strategy: Strategy::Constant { q: 0.5, q_bar: 0.125 },
            };
            game_report(&config, args.trials, &[35.0, 50.0, 70.0], args.seed, exec)?
        }
    })
}

fn write_report(dir: &Path, name: &str, report: &AuditReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_vec_pretty(report)?)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_path(path).with_context(|| format!("reading config {}", path.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match &cli.command {
        Command::Learn(args) => learn(args),
        Command::Audit(args) => {
            let report = audit(args, exec)?;
            let name = format!("audit-{}.json", report.mode);
            write_report(&cli.out_dir, &name, &report)?;
            print_json(&report)?;
            if report.verdict == randmargins::audit::Verdict::Fail {
                bail!("audit failed");
            }
            Ok(())
        }
        Command::Game(args) => {
            let strategy = match args.strategy {
                StrategyKind::Constant => Strategy::Constant {
                    q: args.q,
                    q_bar: args.q_bar,
                },
                StrategyKind::Boundary => Strategy::Boundary { q: args.q },
                StrategyKind::Greedy => Strategy::Greedy { target: args.target },
                StrategyKind::Alternating => Strategy::Alternating,
            };
            let config = GameConfig {
                rounds: args.rounds,
                strategy,
            };
            let report = game_report(&config, args.episodes, &args.gamma, args.seed, exec)?;
            write_report(&cli.out_dir, "game.json", &report)?;
            print_json(&report)
        }
        Command::Bench(args) => {
            let mut config = load_config(&args.config)?;
            if let Some(t) = args.trials {
                config.trials = t;
            }
            if let Some(s) = args.seed {
                config.seed = s;
            }
            let out = run_learning_benchmark(&config, exec)?;
            let dir = config.output.dir.clone().unwrap_or_else(|| cli.out_dir.clone());
            let paths = emit_report(&out, &dir)?;
            for flag in &out.flags {
                eprintln!("flag: {flag}");
            }
            eprintln!("wrote {} and {}", paths.csv.display(), paths.summary.display());
            print_json(&out.points)
        }
        Command::Ipp(args) => {
            let p = args.privacy;
            let params = IppParams::new(p.epsilon, p.delta, p.beta, args.domain_max)?;
            let solver = p.solver.build();
            if args.values.is_empty() {
                return print_json(&contract_benchmark(solver.as_ref(), &params, args.trials, p.seed, exec)?);
            }
            if args.exact {
                if p.solver != SolverKind::ExpMech {
                    bail!("--exact needs the exp-mech solver");
                }
                let pmf = ExpMechIpp.exact_output_distribution(&args.values, p.epsilon, args.domain_max)?;
                return print_json(&pmf);
            }
            let v = solve_interior_point(solver.as_ref(), &args.values, &params, &mut rng_from_seed(p.seed))?;
            print_json(&json!({ "interior_point": v }))
        }
        Command::Gen(args) => {
            let config = load_config(&args.config)?;
            let d = args.d.unwrap_or(config.d);
            let seed = args.seed.unwrap_or(config.seed);
            let sample = generate_synthetic(&config, d, args.n, &mut rng_from_seed(seed))?;
            let path = match &args.output {
                Some(p) => p.clone(),
                None => {
                    std::fs::create_dir_all(&cli.out_dir)?;
                    cli.out_dir.join("sample.csv")
                }
            };
            write_dataset(File::create(&path)?, &sample)?;
            eprintln!("wrote {} examples to {}", sample.len(), path.display());
            Ok(())
        }
    }
}
