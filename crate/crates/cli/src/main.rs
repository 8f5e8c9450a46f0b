use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};

use consolidation_cli::commands::{dispatch, Output};
use consolidation_cli::{exit_code, presets, Config};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Verb {
    Equilibria,
    Coexistence,
    Evolve,
    Steady,
    Mms,
    MollifierCheck,
}

impl Verb {
    fn name(self) -> &'static str {
        match self {
            Verb::Equilibria => "equilibria",
            Verb::Coexistence => "coexistence",
            Verb::Evolve => "evolve",
            Verb::Steady => "steady",
            Verb::Mms => "mms",
            Verb::MollifierCheck => "mollifier-check",
        }
    }
}

/// Double-well consolidation solvers: equilibria, time evolution and
/// stationary profiles.
#[derive(Debug, Parser)]
#[command(name = "consolidate", version)]
struct Cli {
    /// What to compute.
    #[arg(value_enum, required_unless_present = "show_preset")]
    verb: Option<Verb>,
    /// Bundled configuration to start from (fig1, fig2, negativity, coexistence).
    #[arg(long)]
    preset: Option<String>,
    /// `section.key = value` file applied on top of the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for CSV and SVG output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a bundled configuration and exit.
    #[arg(long, value_name = "NAME")]
    show_preset: Option<String>,
}

fn load(cli: &Cli) -> anyhow::Result<Config> {
    let mut config = match &cli.preset {
        Some(name) => presets::preset(name)?,
        None => Config::default(),
    };
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        config.merge_text(&text).with_context(|| format!("in {}", path.display()))?;
    }
    Ok(config)
}

fn execute(cli: &Cli) -> anyhow::Result<String> {
    if let Some(name) = &cli.show_preset {
        return Ok(presets::preset_text(name)?);
    }
    let verb = cli.verb.expect("clap enforces a verb");
    let config = load(cli)?;
    let out = Output::from_config(&config, cli.out.as_deref());
    dispatch(verb.name(), &config, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
