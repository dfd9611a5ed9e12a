use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use taperlith_cli::{execute, resolve_out_dir, CliError, Command, RunConfig};

#[derive(Parser)]
#[command(name = "taperlith", version, about = "Tilted-mask lithography and taper loss simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config and TAPERLITH_OUT_DIR.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Print one ridge and classify it.
    Litho,
    /// Propagate through the taper and report the loss budget.
    Bpm,
    /// Wavelength and tilt/gap sweeps.
    Sweep,
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let out = resolve_out_dir(cli.out.as_deref(), &config);
    let command = match cli.command {
        Cmd::Litho => Command::Litho,
        Cmd::Bpm => Command::Bpm,
        Cmd::Sweep => Command::Sweep,
    };
    execute(command, &config, &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let _ = cli.seed;
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("taperlith: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
