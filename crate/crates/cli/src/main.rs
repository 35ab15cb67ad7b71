use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modent_cli::config::{preset_config, Scenario, ScenarioConfig};
use modent_cli::selfcheck::{self, FamilyReport};
use modent_cli::{run, CliError, IssueKind};

/// Entanglement measures of resonantly coupled cavity modes as CSV series.
#[derive(Parser)]
#[command(name = "modent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a preset or a configuration file and write CSV.
    Run {
        /// Preset name, fig1 .. fig10.
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        scenario: Option<String>,
        /// Configuration file.
        #[arg(long)]
        config: Option<String>,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<String>,
    },
    /// List the presets with their parameters.
    Presets,
    /// Run the built-in cross-oracle self-tests.
    Check {
        /// Random states per property family.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = selfcheck::DEFAULT_SEED)]
        seed: u64,
    },
}

fn load(scenario: Option<String>, config: Option<String>) -> Result<ScenarioConfig, CliError> {
    match (scenario, config) {
        (_, Some(path)) => ScenarioConfig::from_file(&path),
        (Some(name), None) => match Scenario::parse(&name) {
            Some(Scenario::Figure(n)) => preset_config(n),
            _ => Err(CliError::Config(vec![modent_cli::ConfigIssue {
                line: None,
                field: "--scenario".into(),
                kind: IssueKind::OutOfRange,
                message: format!("`{name}` is not a preset; use fig1 .. fig10 or --config"),
            }])),
        },
        (None, None) => unreachable!("clap requires one of --scenario and --config"),
    }
}

fn print_reports(reports: &[FamilyReport]) -> bool {
    let mut ok = true;
    for r in reports {
        ok &= r.passed();
        println!(
            "{:<4} {:<48} max residual {:>10.3e}  tolerance {:.0e}  samples {}",
            if r.passed() { "ok" } else { "FAIL" },
            r.name,
            r.max_residual,
            r.tolerance,
            r.samples
        );
    }
    ok
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, config, out } => {
            let cfg = load(scenario, config)?;
            if let Some(csv) = run::run_to_output(&cfg, out.as_deref())? {
                match std::io::stdout().write_all(csv.as_bytes()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                        return Err(CliError::Io { path: "<stdout>".into(), source: e });
                    }
                    _ => {}
                }
            }
            Ok(())
        }
        Command::Presets => {
            print!("{}", modent_cli::presets::listing());
            Ok(())
        }
        Command::Check { samples, seed } => {
            let core = |e| CliError::Model { scenario: "check".into(), source: e };
            let mut ok = print_reports(&selfcheck::property_suite(seed, samples).map_err(core)?);
            ok &= print_reports(&selfcheck::model_suite().map_err(core)?);
            if ok {
                Ok(())
            } else {
                Err(CliError::Check("at least one family exceeds its tolerance".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
