use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mathalign::cli::{self, StatsFormat, StatsMode};

#[derive(Parser)]
#[command(
    name = "mathalign",
    version,
    about = "Translate expressions between prover library dialects"
)]
struct Args {
    /// Workspace config file (default: $MATHALIGN_CONFIG, then ./mathalign.conf).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load every configured file and report diagnostics.
    Validate,
    /// Translate term files into a target library.
    Translate {
        #[arg(long)]
        target: String,
        /// Also list untranslated symbols, paths and issues.
        #[arg(long)]
        report: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Show the translation path of one symbol.
    Paths {
        uri: String,
        #[arg(long)]
        target: String,
    },
    /// Corpus statistics.
    Stats {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
        /// Published sums to compare against.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Copy and validate external alignment files into the workspace.
    Ingest { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Directions,
    Intersections,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                cli::EXIT_CONFIG as u8
            } else {
                0
            });
        }
    };
    let config = cli::config_path(args.config);
    let outcome = match args.command {
        Command::Validate => cli::cmd_validate(&config),
        Command::Translate {
            target,
            report,
            files,
        } => cli::cmd_translate(&config, &files, &target, report),
        Command::Paths { uri, target } => cli::cmd_paths(&config, &uri, &target),
        Command::Stats {
            mode,
            format,
            reference,
        } => {
            let mode = match mode {
                Mode::Directions => StatsMode::Directions,
                Mode::Intersections => StatsMode::Intersections,
            };
            let format = match format {
                Format::Tsv => StatsFormat::Tsv,
                Format::Json => StatsFormat::Json,
            };
            cli::cmd_stats(&config, mode, format, reference.as_deref())
        }
        Command::Ingest { dir } => cli::cmd_ingest(&config, &dir),
    };
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
