use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use calderon_cli::{list_experiments, parse_config_file, run_experiments};

#[derive(Parser)]
#[command(
    name = "calderon",
    version,
    about = "Measure decay, smoothness, and boundedness inequalities for \
             rough-kernel singular integral commutators on 2-D grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiments and write CSV/JSON reports.
    Run {
        /// Path to the key = value configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Override output.dir from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads (default: all cores). Results are identical for
        /// any thread count.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a configuration, reporting the first problem.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available experiments, their inequalities, and parameters.
    List,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            print!("{}", list_experiments());
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match parse_config_file(&config) {
            Ok(_) => {
                println!("ok: {}", config.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
        Command::Run { config, output_dir, threads } => {
            let mut cfg = match parse_config_file(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let pool = {
                let mut builder = rayon::ThreadPoolBuilder::new();
                if let Some(t) = threads {
                    builder = builder.num_threads(t);
                }
                match builder.build() {
                    Ok(pool) => pool,
                    Err(e) => {
                        eprintln!("thread pool: {e}");
                        return ExitCode::from(2);
                    }
                }
            };
            match pool.install(|| run_experiments(&cfg)) {
                Ok((manifest, code)) => {
                    for o in &manifest.experiments {
                        let detail = match (&o.fitted_c, &o.error) {
                            (Some(c), _) => format!("fitted_C = {c}"),
                            (None, Some(e)) => e.clone(),
                            _ => String::new(),
                        };
                        println!("{:<20} {:<6} {detail}", o.name, o.status);
                    }
                    println!(
                        "wrote {} (exit {code})",
                        cfg.output_dir.join("manifest.json").display()
                    );
                    ExitCode::from(code as u8)
                }
                Err(e) => {
                    eprintln!("run failed: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
