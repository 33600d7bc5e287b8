use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinbridge::dynamics::Method;
use spinbridge_cli::{presets, runner, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "spinbridge", version, about = "Spin chains, their boson encodings and Josephson junction arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a preset.
    Run {
        /// TOML config, or JSON with a `.json` extension.
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path")]
        preset: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// auto, dense_eig or krylov.
        #[arg(long)]
        method: Option<String>,
        /// Local boson dimension.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        quiet: bool,
    },
    /// List the presets, or print one as TOML.
    Presets { name: Option<String> },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Presets { name: None } => {
            presets::NAMES.iter().for_each(|n| println!("{n}"));
            Ok(())
        }
        Command::Presets { name: Some(name) } => {
            print!("{}", presets::source(&name)?);
            Ok(())
        }
        Command::Run { path, preset, out_dir, method, cutoff, quiet } => {
            let mut cfg = match (path, preset) {
                (Some(p), None) => ExperimentConfig::load(&p)?,
                (None, Some(name)) => presets::load(&name)?,
                _ => return Err(CliError::Usage("give a config path or --preset <name>".into())),
            };
            if let Some(dir) = out_dir {
                cfg.output.dir = dir;
            }
            if let Some(m) = method {
                cfg.evolution.method = m.parse::<Method>().map_err(|e| CliError::Usage(format!("--method: {e}")))?;
            }
            if let Some(d) = cutoff {
                cfg.experiment.cutoff = d;
            }
            let summary = runner::execute(&cfg)?;
            if !quiet {
                summary.lines.iter().for_each(|l| println!("{l}"));
                summary.files.iter().for_each(|f| println!("wrote {}", f.display()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let quiet = matches!(cli.command, Command::Run { quiet: true, .. });
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if quiet { "error" } else { "warn" }))
        .init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
