//! Job-file driven front end for the `sharpkit` library.

pub mod coeffs;
pub mod error;
pub mod job;
pub mod plot;
pub mod run;
pub mod table;

use std::path::Path;

use error::Result;
use job::JobSpec;

/// Command-line overrides applied on top of a job file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub points: Option<usize>,
}

/// Loads, validates and runs the job at `job_path`.
pub fn run_job_file(
    job_path: &Path,
    out_dir: &Path,
    overrides: Overrides,
) -> Result<serde_json::Value> {
    let spec = JobSpec::load(job_path)?;
    let base = job_path.parent().unwrap_or(Path::new("."));
    let mut job = spec.validate(base)?;
    if let Some(seed) = overrides.seed {
        job.solver.seed = seed;
    }
    if let Some(points) = overrides.points {
        if points < 2 {
            return Err(error::CliError::validation("`--grid` must be at least 2"));
        }
        job.output.points = points;
    }
    run::execute(&job, out_dir)
}
