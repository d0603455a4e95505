use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use entropy_kit::cli::{self, Command};
use entropy_kit::config::RunConfig;

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Extract,
    Select,
    Eval,
    Neep,
    Synth,
}

/// Entropy features for event streams and physiological signals.
#[derive(Parser)]
#[command(name = "entropy-kit", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let command = match args.command {
        Cmd::Extract => Command::Extract,
        Cmd::Select => Command::Select,
        Cmd::Eval => Command::Eval,
        Cmd::Neep => Command::Neep,
        Cmd::Synth => Command::Synth,
    };
    let result = RunConfig::load(&args.config).and_then(|config| {
        let config = config.with_seed(args.seed);
        let out = args.out.clone().unwrap_or_else(|| config.out_dir());
        cli::run(command, &config, &out)
    });
    match result {
        Ok(output) => {
            let _ = cli::report_outputs(std::io::stderr(), &output.files);
            if let Some(m) = output.message {
                println!("{m}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
