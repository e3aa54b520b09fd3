//! Executes a validated job and writes its artifacts.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use log::{debug, info};
use num_complex::Complex64;
use serde_json::{json, Value};
use sharpkit::decompose::{
    decompose_chebyshev, decompose_direct, decompose_symmetric, DecomposeOptions,
    DecompositionResult,
};
use sharpkit::fir::design_type1_with;
use sharpkit::magsharpen::{
    best_run, cascade_phase, sharpen_magnitude, sharpen_magnitude_restarts, working_grid,
    MagSharpenOptions,
};
use sharpkit::poly::{compose_tf, RealPolynomial, TransferFunction};
use sharpkit::remez::RemezOptions;
use sharpkit::sharpen::{
    magnitude_deviation, sharpen, sharpen_via_q, sharpening_deviation, SharpenOptions,
};

use crate::coeffs;
use crate::error::{CliError, Result};
use crate::job::{Command, DecomposeMode, Job, SharpenPath, Solver};
use crate::plot::magnitude_svg;
use crate::table::{self, ResponseTable};

const SVG_FLOOR_DB: f64 = -120.0;

/// Output directory plus the list of files written so far.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    fn list(&mut self, name: &str, values: &[f64]) -> Result<()> {
        let p = self.path(name);
        coeffs::write_list(&p, values)
    }

    fn rational(&mut self, name: &str, tf: &TransferFunction) -> Result<()> {
        let p = self.path(name);
        coeffs::write_rational(&p, tf.num(), tf.den())
    }

    fn rows<T: serde::Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let p = self.path(name);
        table::write_rows(&p, rows)
    }

    fn response(&mut self, job: &Job, table: &ResponseTable, title: &str) -> Result<()> {
        let p = self.path("response.csv");
        table.write_csv(&p)?;
        if job.output.svg {
            let title = job.output.title.as_deref().unwrap_or(title);
            let p = self.path("response.svg");
            std::fs::write(&p, magnitude_svg(table, title, SVG_FLOOR_DB))
                .map_err(|e| CliError::io(&p, e))?;
        }
        Ok(())
    }

    fn summary(&mut self, mut summary: Value) -> Result<Value> {
        self.written.push("summary.json".into());
        summary["files"] = json!(self.written);
        let p = self.dir.join("summary.json");
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        std::fs::write(&p, text + "\n").map_err(|e| CliError::io(&p, e))?;
        Ok(summary)
    }
}

fn remez_options(s: &Solver) -> RemezOptions {
    let d = RemezOptions::default();
    RemezOptions {
        tol: s.tol.unwrap_or(d.tol),
        max_iter: s.max_iter.unwrap_or(d.max_iter),
        facets: s.facets.unwrap_or(d.facets),
    }
}

fn sharpen_options(s: &Solver, remez: RemezOptions) -> SharpenOptions {
    let d = SharpenOptions::default();
    SharpenOptions {
        remez,
        grid_density: s.grid_density.unwrap_or(d.grid_density),
    }
}

fn tf_table(job: &Job, tf: &TransferFunction) -> Result<ResponseTable> {
    Ok(ResponseTable::sample(job.output.points, |w| {
        tf.response(w)
    })?)
}

/// Runs `job`, writing artifacts to `out_dir`. Returns the summary record.
pub fn execute(job: &Job, out_dir: &Path) -> Result<Value> {
    let mut art = Artifacts::new(out_dir)?;
    info!(
        "running `{}` into {}",
        job.command.name(),
        out_dir.display()
    );
    let summary = match job.command {
        Command::Design => design(job, &mut art)?,
        Command::Sharpen => run_sharpen(job, &mut art)?,
        Command::SharpenMag => run_sharpen_mag(job, &mut art)?,
        Command::Decompose => run_decompose(job, &mut art)?,
        Command::Compose => compose(job, &mut art)?,
        Command::Freqz => freqz(job, &mut art)?,
    };
    art.summary(summary)
}

fn spec_of(job: &Job) -> &sharpkit::sharpen::BandSpec {
    job.spec.as_ref().expect("validated job has a spec")
}

fn filter_of(job: &Job) -> &crate::job::Filter {
    job.filter.as_ref().expect("validated job has a filter")
}

fn design(job: &Job, art: &mut Artifacts) -> Result<Value> {
    let d = design_type1_with(job.l, spec_of(job), &remez_options(&job.solver))?;
    info!(
        "design: delta {:.6e} after {} iterations",
        d.achieved_delta,
        d.trace.len()
    );
    art.list("h.txt", &d.h)?;
    art.rows("trace.csv", &table::remez_rows(&d.trace, PI))?;
    let tf = d.transfer_function();
    art.response(
        job,
        &tf_table(job, &tf)?,
        &format!("Type-I design, order {}", 2 * job.l),
    )?;
    Ok(json!({
        "command": "design",
        "half_order": job.l,
        "delta": d.achieved_delta,
        "grid_delta": d.grid_delta(),
        "alternations": d.alternations(1e-6),
        "iterations": d.trace.len(),
        "converged": d.trace.converged,
    }))
}

fn run_sharpen(job: &Job, art: &mut Artifacts) -> Result<Value> {
    let g = filter_of(job).as_subfilter();
    let spec = spec_of(job);
    let opts = sharpen_options(&job.solver, remez_options(&job.solver));
    let r = match job.path {
        SharpenPath::Direct => sharpen(g, spec, job.k, &opts)?,
        SharpenPath::Q => sharpen_via_q(g, spec, job.k, &opts)?,
    };
    info!(
        "sharpen: delta {:.6e} after {} iterations",
        r.delta,
        r.trace.len()
    );
    let identity = RealPolynomial::identity();
    let sub = sharpening_deviation(g, &identity, spec, opts.grid_density)?;
    let twice = sharpening_deviation(
        g,
        &RealPolynomial::new(vec![0.0, 2.0, -1.0]),
        spec,
        opts.grid_density,
    )?;
    art.list("f.txt", r.f.coeffs())?;
    art.rational("composed.txt", &r.composed)?;
    art.rows("trace.csv", &table::remez_rows(&r.trace, PI))?;
    art.response(
        job,
        &tf_table(job, &r.composed)?,
        &format!("Sharpened, K = {}", job.k),
    )?;
    Ok(json!({
        "command": "sharpen",
        "k": job.k,
        "path": match job.path { SharpenPath::Direct => "direct", SharpenPath::Q => "q" },
        "f": r.f.coeffs(),
        "delta": r.delta,
        "subfilter_delta": sub,
        "twicing_delta": twice,
        "iterations": r.trace.len(),
        "converged": r.trace.converged,
    }))
}

fn run_sharpen_mag(job: &Job, art: &mut Artifacts) -> Result<Value> {
    let g = filter_of(job).as_subfilter();
    let spec = spec_of(job);
    let s = &job.solver;
    let defaults = MagSharpenOptions::default();
    let inner = RemezOptions {
        tol: s.inner_tol.unwrap_or(RemezOptions::default().tol),
        max_iter: s.inner_max_iter.unwrap_or(RemezOptions::default().max_iter),
        facets: s.facets.unwrap_or(RemezOptions::default().facets),
    };
    let opts = MagSharpenOptions {
        sharpen: sharpen_options(s, inner),
        tol: s.tol.unwrap_or(defaults.tol),
        max_iter: s.max_iter.unwrap_or(defaults.max_iter),
    };
    let runs = if s.restarts == 0 {
        let grid = working_grid(spec, opts.sharpen.grid_density);
        let theta0 = cascade_phase(g, job.k, &grid)?;
        vec![sharpen_magnitude(g, spec, job.k, &theta0, &opts)?]
    } else {
        sharpen_magnitude_restarts(g, spec, job.k, s.restarts, s.seed, &opts)?
    };
    let best = best_run(&runs).expect("at least one run");
    let cascade = magnitude_deviation(
        g,
        &RealPolynomial::monomial(job.k),
        spec,
        opts.sharpen.grid_density,
    )?;
    let mut records = Vec::new();
    for (i, (res, trace)) in runs.iter().enumerate() {
        debug!("run {}: magnitude error {:.6e}", i + 1, res.delta);
        art.rows(&format!("trace_run{}.csv", i + 1), &table::mag_rows(trace))?;
        records.push(json!({
            "run": i + 1,
            "magnitude_error": res.delta,
            "final_delta": trace.deltas.last(),
            "iterations": trace.deltas.len(),
            "converged": trace.converged,
            "no_descent": trace.no_descent,
            "f": res.f.coeffs(),
        }));
    }
    let (res, _) = &runs[best];
    art.list("f.txt", res.f.coeffs())?;
    art.rational("composed.txt", &res.composed)?;
    art.response(
        job,
        &tf_table(job, &res.composed)?,
        &format!("Magnitude sharpened, K = {}", job.k),
    )?;
    Ok(json!({
        "command": "sharpen-mag",
        "k": job.k,
        "initial_phase": if s.restarts == 0 { "cascade" } else { "random" },
        "seed": s.seed,
        "best_run": best + 1,
        "magnitude_error": res.delta,
        "cascade_magnitude_error": cascade,
        "runs": records,
    }))
}

fn decomposition_record(r: &DecompositionResult) -> Value {
    json!({
        "l2_error": r.l2_error,
        "iterations": r.iterations,
        "converged": r.converged,
        "degenerate": r.degenerate,
        "gradient_norm": r.gradient_norm,
        "f": r.f.coeffs(),
        "g": r.g.coeffs(),
    })
}

fn run_decompose(job: &Job, art: &mut Artifacts) -> Result<Value> {
    let h = filter_of(job).transfer_function().num().to_vec();
    let d = DecomposeOptions::default();
    let s = &job.solver;
    let opts = DecomposeOptions {
        tol: s.tol.unwrap_or(d.tol),
        max_iter: s.max_iter.unwrap_or(d.max_iter),
        starts: s.starts.unwrap_or(d.starts),
        seed: s.seed,
    };
    let (k, m) = (job.k, job.m);
    let (result, mut extra) = match job.mode {
        DecomposeMode::Direct => {
            let r = decompose_direct(&RealPolynomial::new(h), k, m, &opts)?;
            let recon = r.reconstruction.padded(k * m + 1);
            art.list("reconstruction.txt", &recon)?;
            let tf = TransferFunction::fir(recon);
            art.response(job, &tf_table(job, &tf)?, "Direct decomposition")?;
            (r, json!({ "mode": "direct" }))
        }
        DecomposeMode::Symmetric => {
            let r = decompose_symmetric(&h, k, m, &opts)?;
            art.list("c.txt", &r.split.c)?;
            art.list("reconstruction.txt", &r.reconstruction)?;
            let tf = TransferFunction::fir(r.reconstruction.clone());
            art.response(job, &tf_table(job, &tf)?, "Symmetric decomposition")?;
            let extra = json!({ "mode": "symmetric", "response_error": r.response_error });
            (r.result, extra)
        }
        DecomposeMode::Chebyshev => {
            let r = decompose_chebyshev(&h, k, m, &opts)?;
            // coefficients of the reconstruction as a polynomial in cos ω
            art.list(
                "reconstruction.txt",
                &r.result.reconstruction.padded(k * m + 1),
            )?;
            let p = &r.result.reconstruction;
            let table = ResponseTable::sample(job.output.points, |w| {
                Ok(Complex64::new(p.eval_real(w.cos()), 0.0))
            })?;
            art.response(job, &table, "Decomposition in cos ω")?;
            let extra = json!({ "mode": "chebyshev", "response_error": r.response_error });
            (r.result, extra)
        }
    };
    info!("decompose: l2 error {:.6e}", result.l2_error);
    art.list("f.txt", result.f.coeffs())?;
    art.list("g.txt", &result.g.padded(m + 1))?;
    art.rows("trace.csv", &table::history_rows(&result.history))?;
    extra["command"] = json!("decompose");
    extra["k"] = json!(k);
    extra["m"] = json!(m);
    extra["result"] = decomposition_record(&result);
    Ok(extra)
}

fn compose(job: &Job, art: &mut Artifacts) -> Result<Value> {
    let f = RealPolynomial::new(job.outer.clone().expect("validated compose job"));
    let g = filter_of(job).transfer_function();
    let c = compose_tf(&f, &g);
    art.rational("composed.txt", &c)?;
    art.response(job, &tf_table(job, &c)?, "Composed filter")?;
    Ok(json!({
        "command": "compose",
        "degree": f.degree(),
        "num_len": c.num().len(),
        "den_len": c.den().len(),
    }))
}

fn freqz(job: &Job, art: &mut Artifacts) -> Result<Value> {
    let g = filter_of(job).transfer_function();
    let table = tf_table(job, &g)?;
    let peak = table.rows.iter().map(|r| r.magnitude).fold(0.0, f64::max);
    art.response(job, &table, "Frequency response")?;
    Ok(json!({
        "command": "freqz",
        "points": table.rows.len(),
        "peak_magnitude": peak,
    }))
}
