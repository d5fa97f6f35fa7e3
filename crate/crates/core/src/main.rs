use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use o2i_los::geometry::{Point2D, SceneGeometry};
use o2i_los::los;
use o2i_los::sweep::{self, emit_csv, parse_config, run_sweep};
use o2i_los::Error;

const EXIT_WRITE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser)]
#[command(name = "o2i-los", version, about = "Outdoor-to-indoor LoS and coverage through a window")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep described by a config file and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config `oracle_n`.
        #[arg(long)]
        oracle_n: Option<usize>,
    },
    /// Print the frequency below which no LoS path exists at broadside.
    CriticalFreq {
        #[arg(long, allow_hyphen_values = true)]
        window_m: f64,
        #[arg(long, allow_hyphen_values = true)]
        bs_distance_m: f64,
        #[arg(long, allow_hyphen_values = true)]
        room_m: f64,
    },
    /// Evaluate the LoS condition for one MS position and print the breakdown.
    LosPoint {
        #[arg(long, allow_hyphen_values = true)]
        ms_x: f64,
        #[arg(long, allow_hyphen_values = true)]
        ms_y: f64,
        #[command(flatten)]
        scene: SceneArgs,
    },
}

#[derive(Args)]
struct SceneArgs {
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    room_m: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    window_m: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    bs_distance_m: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta_deg: f64,
    #[arg(long, default_value_t = 28e9, allow_hyphen_values = true)]
    frequency_hz: f64,
}

enum Failure {
    Model(Error),
    Write(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Write(e)
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("O2I_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| Error::InvalidValue {
        key: "O2I_THREADS".into(),
        reason: format!("cannot parse `{raw}` as a thread count"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run_sweep_command(
    config: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    oracle_n: Option<usize>,
) -> Result<(), Failure> {
    let text = fs::read_to_string(&config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", config.display())))?;
    let mut spec = parse_config(&text)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    if let Some(n) = oracle_n {
        spec.oracle_n = n;
    }
    spec.validate()?;
    let mut record = run_sweep(&spec)?;
    record.timestamp = std::env::var("SOURCE_DATE_EPOCH").ok();
    match out {
        Some(path) => emit_csv(&record, BufWriter::new(File::create(path)?))?,
        None => emit_csv(&record, io::stdout().lock())?,
    }
    Ok(())
}

/// Single-point commands take every input from flags, so any rejection is
/// an argument error.
fn bad_args(e: Error) -> Failure {
    if e.is_config() {
        Failure::Model(e)
    } else {
        Failure::Model(Error::Config(e.to_string()))
    }
}

fn run_los_point(ms_x: f64, ms_y: f64, args: SceneArgs) -> Result<(), Failure> {
    let scene = SceneGeometry::from_degrees(args.room_m, args.window_m, args.bs_distance_m, args.theta_deg)
        .map_err(bad_args)?;
    let d = los::los_diagnostics(&scene, &Point2D::new(ms_x, ms_y), args.frequency_hz).map_err(bad_args)?;
    let mut out = io::stdout().lock();
    writeln!(out, "bs={},{}", d.bs.x + 0.0, d.bs.y + 0.0)?;
    writeln!(out, "ms={},{}", d.ms.x + 0.0, d.ms.y + 0.0)?;
    writeln!(out, "crossing={},{}", d.crossing.x + 0.0, d.crossing.y + 0.0)?;
    writeln!(out, "d1_m={}", d.d1)?;
    writeln!(out, "d2_m={}", d.d2)?;
    writeln!(out, "fresnel_radius_m={}", d.fresnel_radius)?;
    writeln!(out, "delta_lower_m={}", d.edge_clearance[0])?;
    writeln!(out, "delta_upper_m={}", d.edge_clearance[1])?;
    writeln!(out, "required_clearance_m={}", los::CLEARANCE_RATIO * d.fresnel_radius)?;
    writeln!(out, "through_window={}", d.through_window)?;
    writeln!(out, "is_los={}", d.is_los)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Sweep {
            config,
            out,
            seed,
            oracle_n,
        } => run_sweep_command(config, out, seed, oracle_n),
        Command::CriticalFreq {
            window_m,
            bs_distance_m,
            room_m,
        } => {
            SceneGeometry::new(room_m, window_m, bs_distance_m, 0.0).map_err(bad_args)?;
            let fc = los::critical_frequency(window_m, bs_distance_m, room_m).map_err(bad_args)?;
            writeln!(io::stdout().lock(), "{fc}")?;
            Ok(())
        }
        Command::LosPoint { ms_x, ms_y, scene } => run_los_point(ms_x, ms_y, scene),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Model(e)) => {
            eprintln!("{}: error: {e}", sweep::TOOL_NAME);
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_DOMAIN })
        }
        Err(Failure::Write(e)) => {
            eprintln!("{}: write failed: {e}", sweep::TOOL_NAME);
            ExitCode::from(EXIT_WRITE)
        }
    }
}
