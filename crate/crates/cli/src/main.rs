use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sharpkit_cli::{run_job_file, Overrides};

/// Filter sharpening, minimax design and approximate decomposition driven by
/// TOML job files.
#[derive(Debug, Parser)]
#[command(name = "sharpkit", version)]
struct Args {
    /// Job file.
    #[arg(long)]
    job: PathBuf,
    /// Output directory.
    #[arg(long, env = "SHARPKIT_OUT", default_value = "sharpkit-out")]
    out: PathBuf,
    /// Seed for randomized steps; overrides the job file.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of points in the response table; overrides the job file.
    #[arg(long)]
    grid: Option<usize>,
    /// Log progress to stderr.
    #[arg(long, short)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let overrides = Overrides {
        seed: args.seed,
        points: args.grid,
    };
    match run_job_file(&args.job, &args.out, overrides) {
        Ok(summary) => {
            println!(
                "{}",
                serde_json::to_string(&summary).expect("summary serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = serde_json::to_string(&e.record()).expect("record serializes");
            eprintln!("{record}");
            if std::fs::create_dir_all(&args.out).is_ok() {
                let _ = std::fs::write(args.out.join("error.json"), record + "\n");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
