use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfass_core::approx::Epsilon;
use mfass_core::bench::{rows_to_csv, run_bench, BenchConfig};
use mfass_core::dispatch::{solve, Algorithm, DispatchConfig};
use mfass_core::generators::{
    gen_3partition, gen_partition, gen_random_single_node, gen_random_sp, gen_unitcap, random_certificate, Generated,
    RandomSpParams,
};
use mfass_core::io::{export_lp, parse_instance, parse_schedule, print_instance, print_schedule};
use mfass_core::model::{evaluate, validate_schedule, Capacity, Instance};
use mfass_core::oracle::DEFAULT_ENUMERATION_CAP;
use mfass_core::spdp::DEFAULT_LIST_CAP;
use mfass_core::Error;

const EXIT_IO: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_PARSE: u8 = 4;

#[derive(Parser)]
#[command(name = "mfass", version, about = "Arc outage scheduling for maximum total s-t flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the schedule.
    Solve(SolveArgs),
    /// Validate a schedule against an instance and report its throughput.
    Check {
        instance: PathBuf,
        schedule: PathBuf,
    },
    /// Generate an instance file plus a `.cert` sidecar.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Write the mixed binary program in LP format.
    ExportLp {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a benchmark config and print CSV.
    Bench {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(short, long, default_value = "auto")]
    algorithm: Algorithm,
    #[arg(short, long)]
    epsilon: Option<Epsilon>,
    /// Schedule file; printed to stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Longest horizon `auto` hands to the vector program.
    #[arg(long, default_value_t = 4)]
    dp_horizon_max: usize,
    /// Largest assignment count the brute-force oracle will enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    oracle_cap: u128,
    #[arg(long, default_value_t = DEFAULT_LIST_CAP)]
    list_cap: usize,
}

#[derive(Args)]
struct GadgetArgs {
    /// Target sum.
    #[arg(short, long)]
    b: Capacity,
    /// Comma-separated values.
    #[arg(short, long, value_delimiter = ',', required = true)]
    values: Vec<Capacity>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum GenCommand {
    #[command(name = "3part")]
    ThreePart(GadgetArgs),
    Part(GadgetArgs),
    Unitcap(GadgetArgs),
    RandomSp {
        #[arg(long, default_value_t = 6)]
        arcs: usize,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long, default_value_t = 2)]
        limit: usize,
        #[arg(long, default_value_t = 1)]
        cap_min: Capacity,
        #[arg(long, default_value_t = 20)]
        cap_max: Capacity,
        #[arg(long, default_value_t = 0.6)]
        job_probability: f64,
        #[arg(long)]
        balanced: bool,
        /// Replaced by `MFASS_SEED` when that is set.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    RandomSingleNode {
        #[arg(long, default_value_t = 3)]
        in_arcs: usize,
        #[arg(long, default_value_t = 3)]
        out_arcs: usize,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        cap_min: Capacity,
        #[arg(long, default_value_t = 20)]
        cap_max: Capacity,
        /// Replaced by `MFASS_SEED` when that is set.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible { .. } | Error::InfeasibleSchedule(_) | Error::InvalidInstance(_) => EXIT_INFEASIBLE,
            _ => EXIT_UNSUPPORTED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", path.display()),
    })
}

fn run_solve(args: SolveArgs) -> Result<(), Failure> {
    let instance = load_instance(&args.instance)?;
    let config = DispatchConfig {
        dp_horizon_max: args.dp_horizon_max,
        oracle_cap: args.oracle_cap,
        list_cap: args.list_cap,
    };
    let solved = solve(&instance, args.algorithm, args.epsilon, &config)?;
    let schedule = print_schedule(&solved.schedule, instance.horizon());
    match &args.output {
        Some(path) => {
            write(path, &schedule)?;
            println!("algorithm {}", solved.algorithm);
        }
        None => {
            print!("{schedule}");
            eprintln!("algorithm {}", solved.algorithm);
        }
    }
    let report = format!("{}\n", solved.report);
    let certificate = solved.certificate.map(|c| format!("{c}\n")).unwrap_or_default();
    if args.output.is_some() {
        print!("{report}{certificate}");
    } else {
        eprint!("{report}{certificate}");
    }
    Ok(())
}

fn run_check(instance: &Path, schedule: &Path) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let sched = parse_schedule(&read(schedule)?).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", schedule.display()),
    })?;
    inst.check_structure()?;
    if let Err(violations) = validate_schedule(&inst, &sched) {
        for v in &violations {
            println!("violation: {v}");
        }
        return Err(Failure {
            code: EXIT_INFEASIBLE,
            message: format!("schedule is infeasible ({} violations)", violations.len()),
        });
    }
    println!("valid\n{}", evaluate(&inst, &sched)?);
    Ok(())
}

fn write_generated(generated: &Generated, output: &Path) -> Result<(), Failure> {
    write(output, &print_instance(&generated.instance))?;
    let mut cert = output.as_os_str().to_owned();
    cert.push(".cert");
    write(Path::new(&cert), &generated.certificate.to_string())?;
    println!("wrote {} and {}", output.display(), Path::new(&cert).display());
    Ok(())
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var("MFASS_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|e| Failure {
            code: EXIT_PARSE,
            message: format!("MFASS_SEED: {e}"),
        }),
        Err(_) => Ok(None),
    }
}

fn run_gen(command: GenCommand) -> Result<(), Failure> {
    let seed_override = env_seed()?;
    let gadget = |f: fn(Capacity, &[Capacity]) -> mfass_core::Result<Generated>, args: GadgetArgs| {
        let generated = f(args.b, &args.values)?;
        write_generated(&generated, &args.output)
    };
    let random = |instance: Instance, output: &Path| {
        let certificate = random_certificate(&instance);
        write_generated(&Generated { instance, certificate }, output)
    };
    match command {
        GenCommand::ThreePart(args) => gadget(gen_3partition, args),
        GenCommand::Part(args) => gadget(gen_partition, args),
        GenCommand::Unitcap(args) => gadget(gen_unitcap, args),
        GenCommand::RandomSp {
            arcs,
            horizon,
            limit,
            cap_min,
            cap_max,
            job_probability,
            balanced,
            seed,
            output,
        } => random(
            gen_random_sp(&RandomSpParams {
                arc_count: arcs,
                capacities: (cap_min, cap_max),
                job_probability,
                horizon,
                limit,
                balanced,
                seed: seed_override.unwrap_or(seed),
            }),
            &output,
        ),
        GenCommand::RandomSingleNode {
            in_arcs,
            out_arcs,
            horizon,
            cap_min,
            cap_max,
            seed,
            output,
        } => random(
            gen_random_single_node(in_arcs, out_arcs, (cap_min, cap_max), horizon, seed_override.unwrap_or(seed)),
            &output,
        ),
    }
}

fn run_bench_command(config: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let parsed = BenchConfig::from_toml(&read(config)?).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", config.display()),
    })?;
    emit(output, &rows_to_csv(&run_bench(&parsed, env_seed()?)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Check { instance, schedule } => run_check(&instance, &schedule),
        Command::Gen(command) => run_gen(command),
        Command::ExportLp { instance, output } => {
            load_instance(&instance).and_then(|inst| emit(output.as_deref(), &export_lp(&inst)))
        }
        Command::Bench { config, output } => run_bench_command(&config, output.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
