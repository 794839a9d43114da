use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};

use vtype_cavity::measurement::Normalization;
use vtype_cavity::scenario::{parse_scenario, PRESET_NAMES};
use vtype_cavity::sweep::{emit_csv, run, run_preset};
use vtype_cavity::Result;

/// Negativity sweeps for two V-type atoms in a dissipative cavity.
#[derive(Parser, Debug)]
#[command(version, about)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config", "list_presets"])))]
struct Cli {
    /// Built-in figure scenario (fig2a, fig2b, fig3a..fig8d)
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: Option<String>,

    /// Scenario file in flat key=value format
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output CSV path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Check sampled points against the RK4 memory-kernel oracle
    #[arg(long)]
    oracle_check: bool,

    /// Normalization after the prior weak measurement
    #[arg(long, default_value = "unnormalized", value_parser = ["paper", "unnormalized"])]
    normalization: String,

    /// Print the preset names and exit
    #[arg(long)]
    list_presets: bool,
}

fn execute(cli: &Cli) -> Result<()> {
    let normalization: Normalization = cli
        .normalization
        .parse()
        .expect("clap restricts the normalization values");
    let table = match (&cli.preset, &cli.config) {
        (Some(name), _) => run_preset(name, normalization, cli.oracle_check)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|source| vtype_cavity::Error::Io {
                path: path.clone(),
                source,
            })?;
            let mut cfg = parse_scenario(&text)?;
            cfg.normalization = normalization;
            cfg.oracle_check = cli.oracle_check;
            cfg.output_path = cli.out.clone();
            run(&cfg)?
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    emit_csv(&table, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_presets {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
