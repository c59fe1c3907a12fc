use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qnet_core::bench::{self, BenchConfig, Scenario};
use qnet_core::colgen::{solve_with_catalog, SolveOptions};
use qnet_core::error::{Error, ErrorClass};
use qnet_core::gen::{generate_batch, GenSpec};
use qnet_core::io::{validate_schedule, EnumerationListing, LoadedNetwork, NetworkFile, ScheduleFile};
use qnet_core::oracle::enumerate_configurations;
use qnet_core::DEFAULT_PATH_CAP;

#[derive(Parser)]
#[command(name = "qnet", version, about = "Entanglement-distribution scheduling on quantum networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the max-min schedule of a network file.
    Solve(SolveArgs),
    /// Count (and optionally list) the paths and configurations of a small network.
    Enumerate(EnumerateArgs),
    /// Run the scaling benchmark and write per-instance CSV.
    Bench(BenchArgs),
    /// Generate a random network file.
    Gen(GenArgs),
    /// Check a schedule file against its network.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long, default_value_t = qnet_core::colgen::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    path_cap: usize,
    /// Branch-and-bound node budget per pricing call.
    #[arg(long, default_value_t = qnet_core::pricing::DEFAULT_NODE_BUDGET)]
    pricing_budget: u64,
    /// Relative tolerance of the termination test.
    #[arg(long, default_value_t = qnet_core::pricing::DEFAULT_TERMINATION_REL)]
    tolerance: f64,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            max_iterations: self.max_iterations,
            path_cap: self.path_cap,
            pricing_node_budget: self.pricing_budget,
            termination_rel: self.tolerance,
            ..SolveOptions::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Schedule JSON destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include the paths and configurations, not just their counts.
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    path_cap: usize,
}

#[derive(Args)]
struct GenFlags {
    /// Generator spec as a JSON file. Overrides the individual flags below.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    p_ts: f64,
    #[arg(long, default_value_t = 0.3)]
    p_ss: f64,
    #[arg(long, default_value_t = 0.5)]
    p_sr: f64,
    #[arg(long, default_value_t = 1.0)]
    attenuation_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    attenuation_hi: f64,
}

impl GenFlags {
    fn spec(&self) -> Result<Option<GenSpec>, Failure> {
        match &self.spec {
            None => Ok(None),
            Some(path) => {
                let text = read(path)?;
                let spec: GenSpec =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
                Ok(Some(spec))
            }
        }
    }

    fn apply(&self, spec: GenSpec) -> GenSpec {
        GenSpec {
            p_ts: self.p_ts,
            p_ss: self.p_ss,
            p_sr: self.p_sr,
            attenuation_lo_db: self.attenuation_lo,
            attenuation_hi_db: self.attenuation_hi,
            ..spec
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a JSON summary of mean iterations per size.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = bench::DEFAULT_INSTANCES)]
    instances: usize,
    /// Scenarios to run; all three when absent.
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SIZES)]
    sizes: Vec<usize>,
    /// Write 0 for every wall time so that repeated runs are byte-identical.
    #[arg(long)]
    omit_timing: bool,
    #[command(flatten)]
    solver: SolverFlags,
    #[command(flatten)]
    gen: GenFlags,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    transmitters: usize,
    #[arg(long, default_value_t = 3)]
    receivers: usize,
    #[arg(long, default_value_t = 3)]
    switches: usize,
    #[command(flatten)]
    gen: GenFlags,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    path_cap: usize,
}

enum Failure {
    Core(Error),
    Io(String),
    Usage(String),
    Invalid(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    details: Vec<String>,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Invalid(_) => 3,
            Failure::Core(e) => match e.class() {
                ErrorClass::Parse => 2,
                ErrorClass::Validation => 3,
                ErrorClass::Resource | ErrorClass::Solver => 4,
            },
        }
    }

    fn report(&self) -> ErrorReport<'_> {
        match self {
            Failure::Io(m) => ErrorReport {
                error: "io",
                message: m.clone(),
                details: Vec::new(),
            },
            Failure::Usage(m) => ErrorReport {
                error: "usage",
                message: m.clone(),
                details: Vec::new(),
            },
            Failure::Invalid(problems) => ErrorReport {
                error: "invalid_schedule",
                message: format!("{} problem(s) found", problems.len()),
                details: problems.clone(),
            },
            Failure::Core(e) => {
                let mut details = Vec::new();
                if let Error::InvalidGraph(v) = e {
                    details = v.iter().map(|x| x.to_string()).collect();
                }
                ErrorReport {
                    error: match e.class() {
                        ErrorClass::Parse => "parse",
                        ErrorClass::Validation => "validation",
                        ErrorClass::Resource => "resource",
                        ErrorClass::Solver => "solver",
                    },
                    message: e.to_string(),
                    details,
                }
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn load(path: &Path, path_cap: usize) -> Result<LoadedNetwork, Failure> {
    let file = NetworkFile::from_json(&read(path)?)?;
    Ok(LoadedNetwork::load(&file, path_cap)?)
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let options = args.solver.options();
    let network = load(&args.input, options.path_cap)?;
    let report = solve_with_catalog(&network.catalog, &network.links, &options)?;
    log::info!(
        "k = {} after {} iterations, pool {}",
        report.objective(),
        report.iterations,
        report.pool_size()
    );
    let schedule = ScheduleFile::from_report(&network, &report);
    emit(args.output.as_deref(), &schedule.to_json())
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<(), Failure> {
    let network = load(&args.input, args.path_cap)?;
    let universe = enumerate_configurations(&network.catalog)?;
    let listing = EnumerationListing::new(&network, &universe, args.list);
    emit(args.output.as_deref(), &listing.to_json())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.instances == 0 {
        return Err(Failure::Usage("--instances must be at least 1".into()));
    }
    let scenarios = if args.scenario.is_empty() {
        Scenario::ALL.to_vec()
    } else {
        args.scenario
            .iter()
            .map(|s| s.parse::<Scenario>())
            .collect::<Result<Vec<_>, _>>()?
    };
    let base = args.gen.spec()?.unwrap_or_else(|| args.gen.apply(GenSpec::default()));
    let config = BenchConfig {
        scenarios,
        sizes: args.sizes.clone(),
        instances: args.instances,
        seed: args.seed,
        spec: base,
        solve: args.solver.options(),
        omit_timing: args.omit_timing,
    };
    let rows = bench::run_bench(&config)?;
    emit(args.output.as_deref(), &bench::rows_to_csv(&rows))?;
    if let Some(path) = &args.summary {
        emit(Some(path), &bench::summarize(&rows).to_json())?;
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let spec = match args.gen.spec()? {
        Some(spec) => spec,
        None => args.gen.apply(GenSpec {
            transmitters: args.transmitters,
            receivers: args.receivers,
            switches: args.switches,
            seed: args.seed,
            ..GenSpec::default()
        }),
    };
    // The first accepted instance of the batch, so the output always has a
    // realizable link.
    let batch = generate_batch(&spec, 1)?;
    let graph = &batch.instances[0].graph;
    emit(args.output.as_deref(), &NetworkFile::from_graph(graph).to_json())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let network = load(&args.input, args.path_cap)?;
    let schedule = ScheduleFile::from_json(&read(&args.schedule)?)?;
    let problems = validate_schedule(&network, &schedule);
    if problems.is_empty() {
        emit(None, "{\"valid\": true}\n")
    } else {
        Err(Failure::Invalid(problems))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QNET_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let json = serde_json::to_string(&failure.report()).expect("plain data serializes");
            eprintln!("{json}");
            ExitCode::from(failure.exit_code())
        }
    }
}
