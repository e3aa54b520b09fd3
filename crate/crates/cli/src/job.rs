//! Job files: TOML documents describing one computation.
//!
//! Frequencies are given in units of π. Unknown keys, and known keys that the
//! selected command does not use, are rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sharpkit::fir::design_type1;
use sharpkit::fixtures::elliptic_bandpass;
use sharpkit::poly::TransferFunction;
use sharpkit::sharpen::{Band, BandSpec, ZeroPhase};

use crate::coeffs;
use crate::error::{CliError, Result};

pub const DEFAULT_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Design,
    Sharpen,
    SharpenMag,
    Decompose,
    Compose,
    Freqz,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Design => "design",
            Self::Sharpen => "sharpen",
            Self::SharpenMag => "sharpen-mag",
            Self::Decompose => "decompose",
            Self::Compose => "compose",
            Self::Freqz => "freqz",
        }
    }

    fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            Self::Design => &[
                "spec",
                "l",
                "solver.tol",
                "solver.max_iter",
                "solver.facets",
            ],
            Self::Sharpen => &[
                "filter",
                "spec",
                "k",
                "path",
                "solver.tol",
                "solver.max_iter",
                "solver.facets",
                "solver.grid_density",
            ],
            Self::SharpenMag => &[
                "filter",
                "spec",
                "k",
                "solver.tol",
                "solver.max_iter",
                "solver.facets",
                "solver.grid_density",
                "solver.restarts",
                "solver.seed",
                "solver.inner_tol",
                "solver.inner_max_iter",
            ],
            Self::Decompose => &[
                "filter",
                "k",
                "m",
                "mode",
                "solver.tol",
                "solver.max_iter",
                "solver.starts",
                "solver.seed",
            ],
            Self::Compose => &["filter", "f"],
            Self::Freqz => &["filter"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DecomposeMode {
    #[default]
    Direct,
    Symmetric,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SharpenPath {
    #[default]
    Direct,
    Q,
}

/// Where a filter's coefficients come from. Exactly one source is allowed.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    /// Coefficient file, relative to the job file.
    pub file: Option<PathBuf>,
    pub num: Option<Vec<f64>>,
    pub den: Option<Vec<f64>>,
    /// Built-in filter; currently `elliptic-bandpass`.
    pub fixture: Option<String>,
    /// Design a Type-I lowpass of this half order from the job's bands.
    pub design_half_order: Option<usize>,
    /// Treat an odd-length symmetric FIR filter as zero-phase.
    #[serde(default)]
    pub zero_phase: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandEntry {
    pub lo: f64,
    pub hi: f64,
    /// Desired magnitude on the band.
    pub target: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecSection {
    pub bands: Vec<BandEntry>,
    /// Delay `τ` in samples of the target `M(ω) e^{-jωτ}`.
    #[serde(default)]
    pub group_delay: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub facets: Option<usize>,
    /// Grid points per π of band length.
    pub grid_density: Option<f64>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub inner_tol: Option<f64>,
    pub inner_max_iter: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_true")]
    pub svg: bool,
    pub title: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            svg: true,
            title: None,
        }
    }
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    pub filter: Option<FilterSection>,
    pub spec: Option<SpecSection>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub l: Option<usize>,
    pub mode: Option<DecomposeMode>,
    pub path: Option<SharpenPath>,
    /// Outer polynomial for `compose`, ascending powers.
    pub f: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::validation(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let s = &self.solver;
        [
            ("filter", self.filter.is_some()),
            ("spec", self.spec.is_some()),
            ("k", self.k.is_some()),
            ("m", self.m.is_some()),
            ("l", self.l.is_some()),
            ("mode", self.mode.is_some()),
            ("path", self.path.is_some()),
            ("f", self.f.is_some()),
            ("solver.tol", s.tol.is_some()),
            ("solver.max_iter", s.max_iter.is_some()),
            ("solver.facets", s.facets.is_some()),
            ("solver.grid_density", s.grid_density.is_some()),
            ("solver.restarts", s.restarts.is_some()),
            ("solver.seed", s.seed.is_some()),
            ("solver.starts", s.starts.is_some()),
            ("solver.inner_tol", s.inner_tol.is_some()),
            ("solver.inner_max_iter", s.inner_max_iter.is_some()),
        ]
        .into_iter()
        .filter_map(|(key, set)| set.then_some(key))
        .collect()
    }

    /// Checks the job against the schema of its command and resolves its
    /// inputs. Relative paths are taken relative to `base_dir`.
    pub fn validate(&self, base_dir: &Path) -> Result<Job> {
        let allowed = self.command.allowed_keys();
        for key in self.present_keys() {
            if !allowed.contains(&key) {
                return Err(CliError::validation(format!(
                    "key `{key}` is not used by command `{}`",
                    self.command.name()
                )));
            }
        }
        let need = |v: Option<usize>, key: &str| {
            v.ok_or_else(|| {
                CliError::validation(format!(
                    "command `{}` requires `{key}`",
                    self.command.name()
                ))
            })
        };
        let positive = |v: usize, key: &str| {
            if v == 0 {
                Err(CliError::validation(format!("`{key}` must be at least 1")))
            } else {
                Ok(v)
            }
        };
        let solver = self.solver_settings()?;
        if self.output.points < 2 {
            return Err(CliError::validation("`output.points` must be at least 2"));
        }

        let spec = match &self.spec {
            Some(s) => Some(build_spec(s)?),
            None => None,
        };
        let needs_spec = matches!(
            self.command,
            Command::Design | Command::Sharpen | Command::SharpenMag
        );
        if needs_spec && spec.is_none() {
            return Err(CliError::validation(format!(
                "command `{}` requires `spec`",
                self.command.name()
            )));
        }
        if self.command == Command::Design && spec.as_ref().is_some_and(|s| s.group_delay() != 0.0)
        {
            return Err(CliError::validation("`design` takes no group delay"));
        }

        let filter = if self.command == Command::Design {
            None
        } else {
            let section = self.filter.as_ref().ok_or_else(|| {
                CliError::validation(format!(
                    "command `{}` requires `filter`",
                    self.command.name()
                ))
            })?;
            Some(build_filter(section, spec.as_ref(), base_dir)?)
        };

        let (k, m, l) = match self.command {
            Command::Design => (0, 0, positive(need(self.l, "l")?, "l")?),
            Command::Sharpen | Command::SharpenMag => (positive(need(self.k, "k")?, "k")?, 0, 0),
            Command::Decompose => (
                positive(need(self.k, "k")?, "k")?,
                positive(need(self.m, "m")?, "m")?,
                0,
            ),
            Command::Compose | Command::Freqz => (0, 0, 0),
        };

        let outer = match self.command {
            Command::Compose => {
                let f = self
                    .f
                    .clone()
                    .ok_or_else(|| CliError::validation("command `compose` requires `f`"))?;
                if f.is_empty() || f.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::validation("`f` must be non-empty and finite"));
                }
                Some(f)
            }
            _ => None,
        };

        if matches!(self.command, Command::SharpenMag) {
            if let Some(Filter::ZeroPhase(_)) = filter {
                return Err(CliError::validation(
                    "`sharpen-mag` works on the causal filter; drop `zero_phase`",
                ));
            }
        }
        if self.command == Command::Decompose {
            if let Some(Filter::Rational(tf)) = &filter {
                if tf.den().len() > 1 {
                    return Err(CliError::validation("`decompose` needs an FIR filter"));
                }
            } else {
                return Err(CliError::validation(
                    "`decompose` takes no `zero_phase` flag",
                ));
            }
        }

        Ok(Job {
            command: self.command,
            filter,
            spec,
            k,
            m,
            l,
            mode: self.mode.unwrap_or_default(),
            path: self.path.unwrap_or_default(),
            outer,
            solver,
            output: self.output.clone(),
        })
    }

    fn solver_settings(&self) -> Result<Solver> {
        let s = &self.solver;
        let check_pos = |v: Option<f64>, key: &str| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => Err(CliError::validation(format!(
                "`solver.{key}` must be positive"
            ))),
            _ => Ok(v),
        };
        check_pos(s.tol, "tol")?;
        check_pos(s.grid_density, "grid_density")?;
        check_pos(s.inner_tol, "inner_tol")?;
        if s.facets.is_some_and(|p| p < 8) {
            return Err(CliError::validation("`solver.facets` must be at least 8"));
        }
        if s.max_iter == Some(0) || s.inner_max_iter == Some(0) || s.starts == Some(0) {
            return Err(CliError::validation(
                "iteration and start counts must be at least 1",
            ));
        }
        Ok(Solver {
            tol: s.tol,
            max_iter: s.max_iter,
            facets: s.facets,
            grid_density: s.grid_density.map(|d| d / PI),
            restarts: s.restarts.unwrap_or(0),
            seed: s.seed.unwrap_or(0),
            starts: s.starts,
            inner_tol: s.inner_tol,
            inner_max_iter: s.inner_max_iter,
        })
    }
}

fn build_spec(s: &SpecSection) -> Result<BandSpec> {
    if s.bands.is_empty() {
        return Err(CliError::validation("`spec.bands` is empty"));
    }
    let mut bands = Vec::with_capacity(s.bands.len());
    for (i, b) in s.bands.iter().enumerate() {
        let ok = b.lo.is_finite() && b.hi.is_finite() && b.target.is_finite();
        if !ok || b.lo < 0.0 || b.hi > 1.0 || b.lo > b.hi {
            return Err(CliError::validation(format!(
                "band {i}: need 0 ≤ lo ≤ hi ≤ 1 (units of π) and a finite target"
            )));
        }
        bands.push(Band::new(b.lo * PI, b.hi * PI, b.target));
    }
    if !s.group_delay.is_finite() {
        return Err(CliError::validation("`spec.group_delay` must be finite"));
    }
    let spec = BandSpec::new(bands).map_err(|e| CliError::validation(e.to_string()))?;
    Ok(spec.with_group_delay(s.group_delay))
}

fn build_filter(f: &FilterSection, spec: Option<&BandSpec>, base_dir: &Path) -> Result<Filter> {
    let sources = [
        f.file.is_some(),
        f.num.is_some(),
        f.fixture.is_some(),
        f.design_half_order.is_some(),
    ]
    .iter()
    .filter(|&&s| s)
    .count();
    if sources != 1 {
        return Err(CliError::validation(
            "`filter` needs exactly one of `file`, `num`, `fixture`, `design_half_order`",
        ));
    }
    if f.den.is_some() && f.num.is_none() {
        return Err(CliError::validation("`filter.den` requires `filter.num`"));
    }
    let (num, den) = if let Some(path) = &f.file {
        let c = coeffs::read(&base_dir.join(path))?;
        (c.num, c.den.unwrap_or_else(|| vec![1.0]))
    } else if let Some(num) = &f.num {
        (num.clone(), f.den.clone().unwrap_or_else(|| vec![1.0]))
    } else if let Some(name) = &f.fixture {
        match name.as_str() {
            "elliptic-bandpass" => {
                let g = elliptic_bandpass();
                (g.num().to_vec(), g.den().to_vec())
            }
            other => {
                return Err(CliError::validation(format!("unknown fixture `{other}`")));
            }
        }
    } else {
        let l = f.design_half_order.expect("one source is set");
        let spec =
            spec.ok_or_else(|| CliError::validation("`filter.design_half_order` requires `spec`"))?;
        let real = BandSpec::new(spec.bands().to_vec())
            .map_err(|e| CliError::validation(e.to_string()))?;
        let d = design_type1(l, &real)?;
        (d.h, vec![1.0])
    };
    if num.is_empty() || den.is_empty() || num.iter().chain(&den).any(|v| !v.is_finite()) {
        return Err(CliError::validation(
            "filter coefficients must be non-empty and finite",
        ));
    }
    if f.zero_phase {
        if den.len() != 1 || den[0] != 1.0 {
            return Err(CliError::validation(
                "`zero_phase` needs an FIR filter with den = [1]",
            ));
        }
        let zp = ZeroPhase::new(num).map_err(|e| CliError::validation(e.to_string()))?;
        Ok(Filter::ZeroPhase(zp))
    } else {
        let tf =
            TransferFunction::new(num, den).map_err(|e| CliError::validation(e.to_string()))?;
        Ok(Filter::Rational(tf))
    }
}

#[derive(Debug, Clone)]
pub enum Filter {
    Rational(TransferFunction),
    ZeroPhase(ZeroPhase),
}

impl Filter {
    pub fn as_subfilter(&self) -> &dyn sharpkit::sharpen::Subfilter {
        match self {
            Self::Rational(tf) => tf,
            Self::ZeroPhase(zp) => zp,
        }
    }

    /// The causal realization.
    pub fn transfer_function(&self) -> TransferFunction {
        match self {
            Self::Rational(tf) => tf.clone(),
            Self::ZeroPhase(zp) => zp.transfer_function(),
        }
    }
}

/// Solver settings; `None` keeps the library default.
#[derive(Debug, Clone, Copy)]
pub struct Solver {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub facets: Option<usize>,
    /// Points per radian.
    pub grid_density: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub starts: Option<usize>,
    pub inner_tol: Option<f64>,
    pub inner_max_iter: Option<usize>,
}

/// A validated job.
#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    pub filter: Option<Filter>,
    pub spec: Option<BandSpec>,
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub mode: DecomposeMode,
    pub path: SharpenPath,
    pub outer: Option<Vec<f64>>,
    pub solver: Solver,
    pub output: OutputSection,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn validate(text: &str) -> Result<Job> {
        JobSpec::parse(text)?.validate(Path::new("."))
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = JobSpec::parse("command = \"freqz\"\nbogus = 1\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = validate("command = \"freqz\"\n[filter]\nnum = [1.0]\ncolor = 3\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn keys_foreign_to_command_are_rejected() {
        let e = validate("command = \"freqz\"\nk = 3\n[filter]\nnum = [1.0]\n").unwrap_err();
        assert!(e.to_string().contains("`k`"));
    }

    #[test]
    fn lowpass_sharpen_job_validates() {
        let job = validate(
            r#"
command = "sharpen"
k = 7
[filter]
design_half_order = 5
zero_phase = true
[[spec.bands]]
lo = 0.0
hi = 0.36
target = 1.0
[[spec.bands]]
lo = 0.42
hi = 1.0
target = 0.0
"#,
        )
        .unwrap();
        assert_eq!(job.k, 7);
        match job.filter.unwrap() {
            Filter::ZeroPhase(zp) => assert_eq!(zp.half_order(), 5),
            _ => panic!("expected zero-phase subfilter"),
        }
        assert!((job.spec.unwrap().bands()[1].lo - 0.42 * PI).abs() < 1e-15);
    }

    #[test]
    fn missing_and_invalid_fields() {
        assert!(validate("command = \"sharpen\"\n[filter]\nnum=[1.0]\n").is_err());
        assert!(validate(
            "command = \"design\"\nl = 3\n[[spec.bands]]\nlo=0.5\nhi=0.2\ntarget=1.0\n"
        )
        .is_err());
        assert!(validate(
            "command = \"freqz\"\n[filter]\nnum=[1.0]\nfixture=\"elliptic-bandpass\"\n"
        )
        .is_err());
        assert!(validate("command = \"freqz\"\n[filter]\nfixture=\"nope\"\n").is_err());
        assert!(validate("command = \"compose\"\n[filter]\nnum=[1.0]\n").is_err());
        assert!(validate(
            "command = \"decompose\"\nk=2\nm=2\n[filter]\nnum=[1.0]\nden=[1.0, 0.5]\n"
        )
        .is_err());
    }

    #[test]
    fn grid_density_is_per_pi() {
        let job = validate("command = \"freqz\"\n[filter]\nnum=[1.0]\n").unwrap();
        assert_eq!(job.output.points, DEFAULT_POINTS);
        let job = JobSpec::parse(
            "command = \"sharpen\"\nk=2\n[filter]\nnum=[0.5,0.5]\n[spec]\nbands=[{lo=0.0,hi=0.2,target=1.0}]\n[solver]\ngrid_density=2048.0\n",
        )
        .unwrap()
        .validate(Path::new("."))
        .unwrap();
        assert!((job.solver.grid_density.unwrap() - 2048.0 / PI).abs() < 1e-12);
    }
}
