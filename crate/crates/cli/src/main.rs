use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use qent_core::bell_analyzer::{max_visibility, write_settings_csv};
use qent_core::measures::{concurrence_mixed, is_ppt, negativity};
use qent_core::phase_povm::joint_phase_distribution;
use qent_core::states::{
    bell_diagonal_state, density_from_pure, haar_random_pure, horodecki_state, random_mixed,
    werner_state,
};
use qent_core::{
    gamma_closed_form, gamma_sup, protocol_gamma_sup, run_validation, DensityMatrix, Error,
    OptimizerConfig, PhaseGrid, RngSeed, StateDescriptor, ValidationLevel, VisibilitySigns,
};

#[derive(Parser)]
#[command(name = "qent", version, about = "Two-qubit entanglement from joint phase measurements")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for optimizer restarts and sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optimizer restarts (default 8, or 2 with --quick).
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Golden-section tolerance on parameter interval width.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tolerance: Option<f64>,
    /// Cross-check against the brute-force oracle (validate: include oracle suites).
    #[arg(long, global = true)]
    oracle: bool,
    /// Reduced sample counts and restarts.
    #[arg(long, global = true)]
    quick: bool,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// State descriptor JSON file.
    #[arg(long, global = true, conflicts_with = "family")]
    state: Option<PathBuf>,
    /// Inline state descriptor JSON, e.g. '{"kind":"werner","p":0.5}'.
    #[arg(long, global = true)]
    family: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute measures on one state and print them as JSON.
    Compute {
        #[arg(long, value_delimiter = ',', default_value = "gamma,gamma_sup,concurrence,negativity,ppt")]
        measures: Vec<Measure>,
    },
    /// Evaluate measures over a grid of a state family and write CSV.
    Sweep(SweepArgs),
    /// Run the property suites.
    Validate,
    /// Simulate the Bell-analyzer estimate of gamma_sup.
    BellSim {
        /// Shots per measurement setting.
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Use exact probabilities instead of sampling.
        #[arg(long)]
        noiseless: bool,
    },
    /// Write a state as a raw density-matrix descriptor.
    Export {
        /// Random mixed state of this rank (seeded by --seed) instead of --state/--family.
        #[arg(long)]
        random_rank: Option<usize>,
        /// Haar-random pure state (seeded by --seed) instead of --state/--family.
        #[arg(long, conflicts_with = "random_rank")]
        haar_pure: bool,
    },
    /// Write the joint phase distribution of a state as CSV.
    PhaseDist {
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Measure {
    Gamma,
    #[value(name = "gamma_sup")]
    GammaSup,
    Concurrence,
    Negativity,
    Ppt,
    Visibility,
}

impl Measure {
    fn column(self) -> &'static str {
        match self {
            Measure::Gamma => "gamma",
            Measure::GammaSup => "gamma_sup",
            Measure::Concurrence => "concurrence",
            Measure::Negativity => "negativity",
            Measure::Ppt => "is_ppt",
            Measure::Visibility => "visibility",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Horodecki,
    Werner,
    #[value(name = "bell_diagonal")]
    BellDiagonal,
}

/// `start:stop:steps`, or a single value.
#[derive(Clone, Copy, Debug)]
struct Range {
    start: f64,
    stop: f64,
    steps: usize,
}

impl Range {
    fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.start + k as f64 * h).collect()
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let r = match parts.as_slice() {
        [v] => Range { start: num(v)?, stop: num(v)?, steps: 1 },
        [a, b, n] => Range {
            start: num(a)?,
            stop: num(b)?,
            steps: n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?,
        },
        _ => return Err("expected start:stop:steps or a single value".into()),
    };
    if r.steps == 0 {
        return Err("steps must be at least 1".into());
    }
    if !(0.0..=1.0).contains(&r.start) || !(0.0..=1.0).contains(&r.stop) {
        return Err("family parameters lie in [0, 1]".into());
    }
    Ok(r)
}

#[derive(Args)]
struct SweepArgs {
    #[arg(id = "sweep_family", value_name = "FAMILY")]
    kind: FamilyName,
    /// Horodecki amplitude a.
    #[arg(long, value_parser = parse_range, default_value = "0.1:0.9:9")]
    a: Range,
    /// Horodecki or Werner mixing p.
    #[arg(long, value_parser = parse_range, default_value = "0:1:11")]
    p: Range,
    /// Bell-diagonal weight on phi+.
    #[arg(long, value_parser = parse_range, default_value = "0:1:11")]
    l1: Range,
    /// Bell-diagonal split of the remaining weight over phi-, psi+, psi-.
    #[arg(long, value_delimiter = ',', num_args = 3, default_value = "1,0,0")]
    rest: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "gamma,gamma_sup,concurrence")]
    measures: Vec<Measure>,
}

enum Failure {
    Input(String),
    Suite,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Suite) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let cfg = OptimizerConfig {
        restarts: g.restarts.unwrap_or(if g.quick { 2 } else { 8 }),
        refine_tolerance: g.tolerance.unwrap_or(1e-9),
        seed: RngSeed(g.seed),
        oracle_resolution: g.oracle.then_some(24),
        ..OptimizerConfig::default()
    };
    cfg.validate()?;

    match &cli.command {
        Command::Compute { measures } => {
            let rho = load_state(g)?;
            let mut obj = evaluate(&rho, measures, &cfg)?;
            if g.oracle && measures.contains(&Measure::GammaSup) {
                obj.insert("gamma_sup_detail".into(), json!(gamma_sup(&rho, &cfg)?));
            }
            emit(g.out.as_deref(), &pretty(&Value::Object(obj)))
        }
        Command::Sweep(args) => emit(g.out.as_deref(), &sweep(args, &cfg)?),
        Command::Validate => {
            let level = if g.oracle {
                ValidationLevel::Oracle
            } else if g.quick {
                ValidationLevel::Quick
            } else {
                ValidationLevel::Default
            };
            let summary = run_validation(level, &cfg);
            println!("{summary}");
            if let Some(path) = &g.out {
                emit(Some(path), &pretty(&json!(summary)))?;
            }
            if summary.all_passed() {
                Ok(())
            } else {
                Err(Failure::Suite)
            }
        }
        Command::BellSim { shots, noiseless } => {
            let rho = load_state(g)?;
            let shots = (!noiseless).then_some(*shots);
            let res = protocol_gamma_sup(&rho, &cfg, shots, RngSeed(g.seed))?;
            if let Some(path) = &g.out {
                let mut buf = Vec::new();
                write_settings_csv(&res.log, &mut buf).map_err(io_failure)?;
                write_file(path, &buf)?;
            }
            println!("{}", pretty(&json!(res)));
            Ok(())
        }
        Command::Export { random_rank, haar_pure } => {
            let rho = match (random_rank, haar_pure) {
                (Some(r), _) => random_mixed(RngSeed(g.seed), *r)?,
                (None, true) => density_from_pure(&haar_random_pure(RngSeed(g.seed))),
                (None, false) => load_state(g)?,
            };
            emit(g.out.as_deref(), &(StateDescriptor::from_density(&rho).to_json() + "\n"))
        }
        Command::PhaseDist { grid, gamma } => {
            let rho = load_state(g)?;
            let dist = joint_phase_distribution(&rho, PhaseGrid::square(*grid)?, *gamma)?;
            let mut buf = Vec::new();
            dist.write_csv(&mut buf).map_err(io_failure)?;
            emit(g.out.as_deref(), &String::from_utf8(buf).expect("CSV is ASCII"))
        }
    }
}

fn load_state(g: &Global) -> Result<DensityMatrix, Failure> {
    let text = match (&g.state, &g.family) {
        (Some(path), _) => fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?,
        (None, Some(inline)) => inline.clone(),
        (None, None) => return Err(Failure::Input("a state is required: pass --state <path> or --family <json>".into())),
    };
    Ok(StateDescriptor::from_json(&text)?.to_density()?)
}

fn evaluate(rho: &DensityMatrix, measures: &[Measure], cfg: &OptimizerConfig) -> Result<Map<String, Value>, Failure> {
    let mut obj = Map::new();
    for m in measures {
        let v = match m {
            Measure::Gamma => json!(gamma_closed_form(rho)),
            Measure::GammaSup => json!(gamma_sup(rho, cfg)?.value),
            Measure::Concurrence => json!(concurrence_mixed(rho)),
            Measure::Negativity => json!(negativity(rho)),
            Measure::Ppt => json!(is_ppt(rho)),
            Measure::Visibility => json!(max_visibility(rho, VisibilitySigns::PlusPlus, cfg)),
        };
        obj.insert(m.column().into(), v);
    }
    Ok(obj)
}

fn sweep(args: &SweepArgs, cfg: &OptimizerConfig) -> Result<String, Failure> {
    let (names, points): (Vec<&str>, Vec<Vec<f64>>) = match args.kind {
        FamilyName::Horodecki => (
            vec!["a", "p"],
            args.a
                .points()
                .into_iter()
                .flat_map(|a| args.p.points().into_iter().map(move |p| vec![a, p]))
                .collect(),
        ),
        FamilyName::Werner => (vec!["p"], args.p.points().into_iter().map(|p| vec![p]).collect()),
        FamilyName::BellDiagonal => {
            let total: f64 = args.rest.iter().sum();
            if args.rest.iter().any(|&w| w < 0.0) || total <= 0.0 {
                return Err(Failure::Input("--rest weights must be nonnegative and not all zero".into()));
            }
            let w: Vec<f64> = args.rest.iter().map(|x| x / total).collect();
            (
                vec!["l1", "l2", "l3", "l4"],
                args.l1
                    .points()
                    .into_iter()
                    .map(|l1| vec![l1, (1.0 - l1) * w[0], (1.0 - l1) * w[1], (1.0 - l1) * w[2]])
                    .collect(),
            )
        }
    };
    let family = args.kind;
    let rows: Vec<Result<String, Failure>> = points
        .par_iter()
        .map(|x| {
            let rho = match family {
                FamilyName::Horodecki => horodecki_state(x[0], x[1])?,
                FamilyName::Werner => werner_state(x[0])?,
                FamilyName::BellDiagonal => bell_diagonal_state([x[0], x[1], x[2], x[3]])?,
            };
            let obj = evaluate(&rho, &args.measures, cfg)?;
            let mut cells: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
            for m in &args.measures {
                cells.push(match &obj[m.column()] {
                    Value::Bool(b) => b.to_string(),
                    v => format!("{:.16e}", v.as_f64().expect("numeric measure")),
                });
            }
            Ok(cells.join(","))
        })
        .collect();

    let mut header: Vec<&str> = names;
    header.extend(args.measures.iter().map(|m| m.column()));
    let mut out = header.join(",") + "\n";
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    Ok(out)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Input(e.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(io_failure),
    }
}
