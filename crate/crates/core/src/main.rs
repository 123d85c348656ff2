use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};

use monopose::config::RunConfig;
use monopose::runner::{run_config, write_outputs};

#[derive(Parser)]
#[command(version, about = "Monocular pose tracking from angled bounding boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write their outputs.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Overrides the seed stored in each scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; one subdirectory per scenario when several are given.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check scenarios without running them.
    Validate {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn run_one(path: &Path, seed: Option<u64>, out: &Path) -> Result<(), String> {
    let cfg = RunConfig::load(path).map_err(|e| e.to_string())?;
    let seed = seed.unwrap_or(cfg.seed);
    let ep = run_config(&cfg, base_dir(path), seed).map_err(|e| e.to_string())?;
    write_outputs(&ep, &cfg, seed, out).map_err(|e| e.to_string())?;
    match ep.summary() {
        Some(s) => info!(
            "{}: {} frames scored, median t_err {:.4} m, median r_err {:.2} deg",
            path.display(),
            s.frames,
            s.t_err.median,
            s.r_err.median
        ),
        None => info!("{}: {} frames, no ground truth", path.display(), ep.frames.len()),
    }
    Ok(())
}

fn validate_one(path: &Path) -> Result<(), String> {
    let cfg = RunConfig::load(path).map_err(|e| e.to_string())?;
    let v = cfg.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(format!("invalid configuration:\n  {}", v.join("\n  ")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let mut failed = false;
    match cli.command {
        Command::Run { configs, seed, out } => {
            let many = configs.len() > 1;
            for path in &configs {
                let dir = match path.file_stem() {
                    Some(stem) if many => out.join(stem),
                    _ => out.clone(),
                };
                if let Err(e) = run_one(path, seed, &dir) {
                    error!("{}: {e}", path.display());
                    failed = true;
                }
            }
        }
        Command::Validate { configs } => {
            for path in &configs {
                match validate_one(path) {
                    Ok(()) => println!("{}: ok", path.display()),
                    Err(e) => {
                        println!("{}: {e}", path.display());
                        failed = true;
                    }
                }
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
