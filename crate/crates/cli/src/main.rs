use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cge_cli::{run, Format, RunError, Scenario, ScenarioConfig, EXIT_PASS, EXIT_VERDICT_FAILURE};
use clap::Parser;

/// Run a coarse-grained entanglement scenario and emit plot-ready data.
#[derive(Debug, Parser)]
#[command(name = "cge", version)]
struct Cli {
    scenario: Scenario,

    /// Config file with one `key = value` per line.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a parameter; takes precedence over the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output path; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Report entropy columns in bits instead of nats.
    #[arg(long)]
    bits: bool,

    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

fn execute(cli: &Cli) -> Result<bool, RunError> {
    let file = match &cli.config {
        Some(path) => Some(fs::read_to_string(path)?),
        None => None,
    };
    let config = ScenarioConfig::resolve(cli.scenario, file.as_deref(), &cli.set, cli.seed)?;
    let mut report = run(&config)?;
    if cli.bits {
        report.convert_to_bits();
    }
    match &cli.out {
        Some(path) => fs::write(path, report.render(cli.format))?,
        None => report.write(cli.format, &mut io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    for v in &report.verdicts {
        let value = v.value.map(|x| format!("{x:e}")).unwrap_or_else(|| "n/a".into());
        let status = if v.pass { "pass" } else { "FAIL" };
        let _ = writeln!(err, "{status} {}: {value} ({})", v.name, v.criterion);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::from(EXIT_PASS as u8),
        Ok(false) => ExitCode::from(EXIT_VERDICT_FAILURE as u8),
        Err(e) => {
            eprintln!("cge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
