//! `ranplan`: RU placement, TDD capacity, FAPI slot simulation and
//! measurement statistics from one scenario file.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or configuration error,
//! 3 internal error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;
use ranplan::raytrace::CombineMode;

#[derive(Debug, Parser)]
#[command(name = "ranplan", version, about = "Private 5G RU placement, capacity and slot simulation")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArg {
    /// Scenario TOML; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ray-trace the scene, sweep RU attenuation and search RU pairs.
    Plan {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Comma-separated uniform attenuation values in dB.
        #[arg(long, value_name = "LIST", value_delimiter = ',')]
        attenuation_sweep: Option<Vec<f64>>,
        /// Path combination: coherent or power.
        #[arg(long, value_name = "MODE", value_parser = parse_combine)]
        combine: Option<CombineMode>,
    },
    /// Print peak cell and per-UE throughput.
    Capacity {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Machine-readable key=value output.
        #[arg(long)]
        kv: bool,
    },
    /// Run the L1/L2 slot simulator and export a pcap trace.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Output directory for trace.pcap and stats.txt.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Traffic RNG seed (overrides the scenario).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Mean and 95 % confidence interval per CSV file.
    Analyze {
        /// Input CSVs (`timestamp,value` or `event,start,duration[,value]`).
        #[arg(required = true, value_name = "CSV")]
        inputs: Vec<PathBuf>,
        /// Output directory for stats.csv; stdout when omitted.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

fn parse_combine(s: &str) -> Result<CombineMode, String> {
    s.parse().map_err(|e: ranplan::Error| e.to_string())
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<ranplan::Error>()) {
        Some(ranplan::Error::Protocol(_)) => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => LevelFilter::Warn,
            1 => LevelFilter::Info,
            _ => LevelFilter::Debug,
        })
        .format_timestamp(None)
        .init();

    match std::panic::catch_unwind(|| commands::dispatch(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
