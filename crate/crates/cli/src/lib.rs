//! Command-line front end: reads an experiment file, runs one verb and
//! writes its tables.
//!
//! Every output is rendered in memory first, then written to temporary
//! files in the output directory and renamed into place, so a failed run
//! leaves no partial output.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use fracspec::config::{ConfigFile, Section};
use fracspec::estimate::{
    default_grid_points, empirical_spectral_function, frac_estimate, periodogram,
};
use fracspec::grid::{fmt_f64, GridFunction};
use fracspec::gsim::{center_sample, CirculantSampler, SamplePath};
use fracspec::report;
use fracspec::specmodel::{
    beta_squared, frac_spectral_derivative_grid, limit_covariance, limit_variance,
    spectral_function,
};
use fracspec::verify::{
    confidence_band, default_holder_delta, default_probes, fejer_bias, run_monte_carlo, McConfig,
};
use fracspec::{Error, SpectralModel};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Simulate,
    Estimate,
    Truth,
    Mc,
    Confidence,
    Fejer,
}

impl Verb {
    pub const ALL: [Verb; 6] = [
        Verb::Simulate,
        Verb::Estimate,
        Verb::Truth,
        Verb::Mc,
        Verb::Confidence,
        Verb::Fejer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::Simulate => "simulate",
            Verb::Estimate => "estimate",
            Verb::Truth => "truth",
            Verb::Mc => "mc",
            Verb::Confidence => "confidence",
            Verb::Fejer => "fejer",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone)]
pub struct Command {
    pub verb: Verb,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub force: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 0 success, 1 domain/config/usage, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => match e {
                Error::Domain(_) | Error::Config { .. } | Error::Parse { .. } => 1,
                Error::Numerical(_) => 2,
                Error::Io { .. } => 3,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Keys accepted in each section, with their defaults as shown by `--help`.
pub const CONFIG_HELP: &str = "\
Config file: `key = value` lines under [section] headers; `#`/`;` comments.
Unknown keys are errors. Lists are comma-separated.

[model]        kind = constant | ar1 | custom_grid
               c (constant level > 0), rho (ar1, |rho| < 1),
               grid_csv_path (custom_grid: `lambda,value` CSV, relative to the config file)
[simulate]     n_list (required), paths = 1, mean = 0, center = false, seed = 1
[estimate]     inputs (required, sample-path CSVs), alpha_list = 0.25,
               grid_points = 4*max(n,1024) capped at 65536
[truth]        alpha = 0.25, grid_points = 4097, probes = pi/2,pi,3pi/2
[mc]           alpha (required), n_list (required), replications (required),
               probe_lambdas = pi/2,pi,3pi/2, seed = 1, tail_u_grid = 0.5,1.0,...,4.0,
               holder_delta = 1/2 - alpha - 0.05, delta_confidence = 0.05 (none to skip),
               calibration_draws = 5000, grid_points = 4*max(n,1024) capped at 65536
[confidence]   alpha = 0.25, n_list (required), delta_list = 0.05,
               calibration_draws = 5000, replications = 400, seed = 1
[fejer]        n_list (required), grid_points = 4*max(n,1024) capped at 65536

Angles in lists accept plain numbers or multiples of pi (`pi`, `0.5pi`, `pi/2`, `3pi/2`).
--seed overrides the section seed. Exit status: 0 ok, 1 domain/config/usage error,
2 numerical error, 3 I/O error.";

/// A real number, or a multiple of π written as `pi`, `0.5pi`, `pi/2`, `3pi/2`.
fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim().trim_end_matches('*');
    let coef = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().ok()?
    };
    Some(coef * std::f64::consts::PI / den)
}

fn parse_angles(section: &Section, key: &str) -> fracspec::Result<Option<Vec<f64>>> {
    section
        .get(key)
        .map(|v| {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    parse_angle(s).ok_or_else(|| section.err(key, format!("cannot parse `{s}`")))
                })
                .collect()
        })
        .transpose()
}

fn fmt_list<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn section_or_empty(cfg: &ConfigFile, name: &str) -> Section {
    cfg.section(name)
        .cloned()
        .unwrap_or_else(|| Section::new(name))
}

fn load_model(cfg: &ConfigFile) -> fracspec::Result<SpectralModel> {
    let section = cfg
        .section("model")
        .ok_or_else(|| Error::config("model", "the [model] section is required"))?;
    SpectralModel::from_section(section, &cfg.base_dir())
}

fn check_sections(cfg: &ConfigFile) -> fracspec::Result<()> {
    let top = cfg.section("").expect("unnamed section exists");
    if let Some((k, _)) = top.entries().first() {
        return Err(Error::config(
            k.clone(),
            "keys must appear under a [section] header",
        ));
    }
    let known = [
        "",
        "model",
        "simulate",
        "estimate",
        "truth",
        "mc",
        "confidence",
        "fejer",
    ];
    for s in &cfg.sections {
        if !known.contains(&s.name.as_str()) {
            return Err(Error::config(s.name.clone(), "unknown section"));
        }
    }
    Ok(())
}

fn mc_from(cfg: &ConfigFile, model: SpectralModel) -> fracspec::Result<McConfig> {
    let s = section_or_empty(cfg, "mc");
    s.check_keys(&[
        "alpha",
        "n_list",
        "replications",
        "probe_lambdas",
        "seed",
        "tail_u_grid",
        "holder_delta",
        "delta_confidence",
        "calibration_draws",
        "grid_points",
    ])?;
    let alpha: f64 = s.parse_required("alpha")?;
    let n_list = s
        .parse_list("n_list")?
        .ok_or_else(|| s.err("n_list", "required key is missing"))?;
    let replications = s.parse_required("replications")?;
    let mut mc = McConfig::new(model, alpha, n_list, replications);
    if let Some(p) = parse_angles(&s, "probe_lambdas")? {
        mc.probe_lambdas = p;
    }
    mc.seed = s.parse_or("seed", mc.seed)?;
    if let Some(u) = s.parse_list("tail_u_grid")? {
        mc.tail_u_grid = u;
    }
    mc.holder_delta = s.parse_or("holder_delta", default_holder_delta(alpha))?;
    mc.delta_confidence = match s.get("delta_confidence") {
        Some("none") => None,
        Some(_) => Some(s.parse_required("delta_confidence")?),
        None => mc.delta_confidence,
    };
    mc.calibration_draws = s.parse_or("calibration_draws", mc.calibration_draws)?;
    mc.grid_points = s.parse("grid_points")?;
    Ok(mc)
}

/// Reads the file and builds a validated experiment from its `[model]` and
/// `[mc]` sections.
pub fn parse_config(path: &Path) -> fracspec::Result<McConfig> {
    let cfg = ConfigFile::read(path)?;
    check_sections(&cfg)?;
    let mc = mc_from(&cfg, load_model(&cfg)?)?;
    mc.validate()?;
    Ok(mc)
}

/// The resolved `[mc]` block, defaults included.
pub fn mc_section(mc: &McConfig) -> Section {
    Section::new("mc")
        .with("alpha", mc.alpha)
        .with("n_list", fmt_list(&mc.n_list))
        .with("replications", mc.replications)
        .with("probe_lambdas", fmt_list(&mc.probe_lambdas))
        .with("seed", mc.seed)
        .with("tail_u_grid", fmt_list(&mc.tail_u_grid))
        .with("holder_delta", mc.holder_delta)
        .with(
            "delta_confidence",
            mc.delta_confidence
                .map_or("none".to_string(), |d| d.to_string()),
        )
        .with("calibration_draws", mc.calibration_draws)
        .with(
            "grid_points",
            mc.grid_points
                .map_or("default".to_string(), |g| g.to_string()),
        )
}

/// Rendered outputs of one command, not yet on disk.
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, name: impl Into<String>, content: impl Into<Vec<u8>>) {
        self.files.push((name.into(), content.into()));
    }
}

fn provenance(
    verb: Verb,
    model: &SpectralModel,
    resolved: &Section,
    extra: &[String],
) -> Vec<String> {
    let mut lines = vec![
        format!("fracspec {VERSION}"),
        format!("command = {}", verb.name()),
    ];
    for l in model
        .to_section()
        .to_string()
        .lines()
        .chain(resolved.to_string().lines())
    {
        lines.push(l.to_string());
    }
    lines.extend(extra.iter().cloned());
    lines
}

fn csv(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn simulate(
    cfg: &ConfigFile,
    model: &SpectralModel,
    seed_override: Option<u64>,
) -> CliResult<Outputs> {
    let s = section_or_empty(cfg, "simulate");
    s.check_keys(&["n_list", "paths", "mean", "center", "seed"])?;
    let n_list: Vec<usize> = s
        .parse_list("n_list")?
        .ok_or_else(|| s.err("n_list", "required key is missing"))?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(s.err("n_list", "needs positive sample sizes").into());
    }
    let paths: usize = s.parse_or("paths", 1)?;
    if paths == 0 {
        return Err(s.err("paths", "must be at least 1").into());
    }
    let mean: f64 = s.parse_or("mean", 0.0)?;
    let center: bool = s.parse_or("center", false)?;
    let seed = seed_override.unwrap_or(s.parse_or("seed", 1)?);
    let resolved = Section::new("simulate")
        .with("n_list", fmt_list(&n_list))
        .with("paths", paths)
        .with("mean", mean)
        .with("center", center)
        .with("seed", seed);
    let mut out = Outputs::new();
    for (i, &n) in n_list.iter().enumerate() {
        let sampler = CirculantSampler::new(model, n)?;
        for k in 0..paths {
            let stream = ((i as u64) << 32) | k as u64;
            let mut path = sampler.sample(seed, stream, mean);
            if center {
                path = center_sample(&path);
            }
            let comments = provenance(
                Verb::Simulate,
                model,
                &resolved,
                &[format!("embedding_size = {}", sampler.embedding_size())],
            );
            out.add(
                format!("path_n{n}_{k:04}.csv"),
                csv(|b| path.write_csv(b, &comments)),
            );
        }
    }
    Ok(out)
}

fn estimate(cfg: &ConfigFile, model: &SpectralModel) -> CliResult<Outputs> {
    let s = section_or_empty(cfg, "estimate");
    s.check_keys(&["inputs", "alpha_list", "grid_points"])?;
    let inputs: Vec<String> = s
        .parse_list("inputs")?
        .ok_or_else(|| s.err("inputs", "required key is missing"))?;
    let alphas: Vec<f64> = s.parse_list("alpha_list")?.unwrap_or_else(|| vec![0.25]);
    if let Some(a) = alphas.iter().find(|a| !(0.0..0.5).contains(*a)) {
        return Err(s
            .err("alpha_list", format!("{a} is outside [0, 1/2)"))
            .into());
    }
    let grid_points: Option<usize> = s.parse("grid_points")?;
    let mut out = Outputs::new();
    let mut stems = Vec::new();
    for input in &inputs {
        let path = {
            let p = PathBuf::from(input);
            if p.is_absolute() {
                p
            } else {
                cfg.base_dir().join(p)
            }
        };
        let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        let sample = SamplePath::read_csv(std::io::BufReader::new(file))
            .map_err(|e| s.err("inputs", format!("{}: {e}", path.display())))?;
        let stem = path
            .file_stem()
            .map(|x| x.to_string_lossy().into_owned())
            .unwrap_or_else(|| "path".into());
        if stems.contains(&stem) {
            return Err(s
                .err("inputs", format!("two inputs share the file name `{stem}`"))
                .into());
        }
        stems.push(stem.clone());
        let points = grid_points.unwrap_or_else(|| default_grid_points(sample.n()));
        let resolved = Section::new("estimate")
            .with("input", input)
            .with("alpha_list", fmt_list(&alphas))
            .with("grid_points", points);
        let extra = [
            format!("n = {}", sample.n()),
            format!("seed = {}", sample.seed),
            format!("stream = {}", sample.stream),
            format!("path_model_id = {}", sample.model_id),
        ];
        let j = periodogram(&sample, points)?;
        let comments = provenance(Verb::Estimate, model, &resolved, &extra);
        out.add(
            format!("periodogram_{stem}.csv"),
            csv(|b| j.grid.write_csv(b, &comments)),
        );
        let fe = empirical_spectral_function(&j)?;
        out.add(
            format!("spectral_{stem}.csv"),
            csv(|b| fe.write_csv(b, &comments)),
        );
        for &alpha in &alphas {
            let est = frac_estimate(&j, alpha)?;
            let mut c = comments.clone();
            c.push(format!("alpha = {alpha}"));
            out.add(
                format!("frac_{stem}_a{alpha}.csv"),
                csv(|b| est.grid.write_csv(b, &c)),
            );
        }
    }
    Ok(out)
}

fn truth(cfg: &ConfigFile, model: &SpectralModel) -> CliResult<Outputs> {
    let s = section_or_empty(cfg, "truth");
    s.check_keys(&["alpha", "grid_points", "probes"])?;
    let alpha: f64 = s.parse_or("alpha", 0.25)?;
    let points: usize = s.parse_or("grid_points", 4097)?;
    if points < 2 {
        return Err(s.err("grid_points", "must be at least 2").into());
    }
    let probes = parse_angles(&s, "probes")?.unwrap_or_else(default_probes);
    let resolved = Section::new("truth")
        .with("alpha", alpha)
        .with("grid_points", points)
        .with("probes", fmt_list(&probes));
    let comments = provenance(Verb::Truth, model, &resolved, &[]);
    let mut out = Outputs::new();

    let density = model.density_grid(points)?;
    out.add("density.csv", csv(|b| density.write_csv(b, &comments)));
    let spectral = GridFunction::new(
        density
            .lambdas()
            .map(|l| spectral_function(model, l))
            .collect::<fracspec::Result<Vec<_>>>()?,
        false,
    )?;
    out.add("spectral.csv", csv(|b| spectral.write_csv(b, &comments)));
    let frac = frac_spectral_derivative_grid(model, alpha, points)
        .map_err(|e| s.err("alpha", e.to_string()))?;
    out.add("frac_derivative.csv", csv(|b| frac.write_csv(b, &comments)));

    let mut table = String::new();
    for c in &comments {
        table += &format!("# {c}\n");
    }
    table += "lambda,spectral,frac_derivative,limit_variance,beta_squared\n";
    for &p in &probes {
        let fa = fracspec::specmodel::frac_spectral_derivative(model, alpha, p)?;
        let var = if alpha > 0.0 {
            limit_variance(model, alpha, p)?
        } else {
            beta_squared(model, p)?
        };
        table += &format!(
            "{},{},{},{},{}\n",
            fmt_f64(p),
            fmt_f64(spectral_function(model, p)?),
            fmt_f64(fa),
            fmt_f64(var),
            fmt_f64(beta_squared(model, p)?)
        );
    }
    out.add("probes.csv", table);
    if alpha > 0.0 {
        let theta = limit_covariance(model, alpha, &probes)?;
        let mut c = comments.clone();
        c.push(format!("psd_clip_applied = {}", theta.clip_applied()));
        out.add("theta.csv", csv(|b| theta.write_csv(b, &c)));
    }
    Ok(out)
}

fn mc(cfg: &ConfigFile, model: &SpectralModel, seed_override: Option<u64>) -> CliResult<Outputs> {
    let mut mc = mc_from(cfg, model.clone())?;
    if let Some(seed) = seed_override {
        mc.seed = seed;
    }
    mc.validate()?;
    let report = run_monte_carlo(&mc)?;
    eprintln!(
        "mc: {} sample size(s) in {:.2} s",
        report.sizes.len(),
        report.runtime_secs
    );
    let resolved = mc_section(&mc);
    let grids: Vec<String> = mc
        .n_list
        .iter()
        .map(|&n| format!("{n}:{}", mc.grid_points_for(n)))
        .collect();
    let comments = provenance(
        Verb::Mc,
        model,
        &resolved,
        &[format!("grid_points_by_n = {}", grids.join(", "))],
    );
    let mut out = Outputs::new();
    for (name, content) in report::render_tables(&report, &comments) {
        out.add(name, content);
    }
    let prov = Provenance {
        tool: format!("fracspec {VERSION}"),
        command: Verb::Mc.name(),
        config: comments[2..].to_vec(),
    };
    out.add("report.json", report::render_json(&report, &prov));
    Ok(out)
}

#[derive(Serialize)]
struct Provenance {
    tool: String,
    command: &'static str,
    config: Vec<String>,
}

fn confidence(
    cfg: &ConfigFile,
    model: &SpectralModel,
    seed_override: Option<u64>,
) -> CliResult<Outputs> {
    let s = section_or_empty(cfg, "confidence");
    s.check_keys(&[
        "alpha",
        "n_list",
        "delta_list",
        "calibration_draws",
        "replications",
        "seed",
    ])?;
    let alpha: f64 = s.parse_or("alpha", 0.25)?;
    let n_list: Vec<usize> = s
        .parse_list("n_list")?
        .ok_or_else(|| s.err("n_list", "required key is missing"))?;
    let deltas: Vec<f64> = s.parse_list("delta_list")?.unwrap_or_else(|| vec![0.05]);
    let draws: usize = s.parse_or("calibration_draws", 5000)?;
    let replications: usize = s.parse_or("replications", 400)?;
    let seed = seed_override.unwrap_or(s.parse_or("seed", 1)?);
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(s
            .err(
                "alpha",
                format!("{alpha} is outside the well-posed range (0, 1/2)"),
            )
            .into());
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(s.err("n_list", "needs positive sample sizes").into());
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
        return Err(s.err("delta_list", format!("{d} is outside (0, 1)")).into());
    }
    if draws < 1000 {
        return Err(s.err("calibration_draws", "must be at least 1000").into());
    }
    if replications == 0 {
        return Err(s.err("replications", "must be at least 1").into());
    }
    let resolved = Section::new("confidence")
        .with("alpha", alpha)
        .with("n_list", fmt_list(&n_list))
        .with("delta_list", fmt_list(&deltas))
        .with("calibration_draws", draws)
        .with("replications", replications)
        .with("seed", seed);
    let mut results = Vec::new();
    for &n in &n_list {
        for &d in &deltas {
            results.push(confidence_band(
                model,
                alpha,
                n,
                d,
                draws,
                seed,
                replications,
            )?);
        }
    }
    let grids: Vec<String> = n_list
        .iter()
        .map(|&n| format!("{n}:{}", default_grid_points(n)))
        .collect();
    let comments = provenance(
        Verb::Confidence,
        model,
        &resolved,
        &[format!("grid_points_by_n = {}", grids.join(", "))],
    );
    let mut out = Outputs::new();
    out.add(
        "confidence.csv",
        report::confidence_table(&results, &comments),
    );
    Ok(out)
}

fn fejer(cfg: &ConfigFile, model: &SpectralModel) -> CliResult<Outputs> {
    let s = section_or_empty(cfg, "fejer");
    s.check_keys(&["n_list", "grid_points"])?;
    let n_list: Vec<usize> = s
        .parse_list("n_list")?
        .ok_or_else(|| s.err("n_list", "required key is missing"))?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(s.err("n_list", "needs positive sample sizes").into());
    }
    let grid_points: Option<usize> = s.parse("grid_points")?;
    let resolved = Section::new("fejer")
        .with("n_list", fmt_list(&n_list))
        .with(
            "grid_points",
            grid_points.map_or("default".to_string(), |g| g.to_string()),
        );
    let comments = provenance(Verb::Fejer, model, &resolved, &[]);
    let mut table = String::new();
    for c in &comments {
        table += &format!("# {c}\n");
    }
    table += "n,grid_points,sup_error,modulus,bound,ratio\n";
    for &n in &n_list {
        let points = grid_points.unwrap_or_else(|| default_grid_points(n));
        let row = fejer_bias(model, n, points)?;
        table += &format!(
            "{n},{points},{},{},{},{}\n",
            fmt_f64(row.sup_error),
            fmt_f64(row.modulus),
            fmt_f64(row.bound),
            row.ratio.map_or("nan".to_string(), fmt_f64)
        );
    }
    let mut out = Outputs::new();
    out.add("fejer.csv", table);
    Ok(out)
}

static PENDING: Mutex<Vec<PathBuf>> = Mutex::new(Vec::new());

/// Removes temporary files of an interrupted write. Safe to call from a
/// signal handler thread.
pub fn cleanup_temp_files() {
    if let Ok(mut pending) = PENDING.lock() {
        for p in pending.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

fn write_outputs(dir: &Path, outputs: &Outputs, force: bool) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let targets: Vec<PathBuf> = outputs.files.iter().map(|(n, _)| dir.join(n)).collect();
    if !force {
        if let Some(t) = targets.iter().find(|t| t.exists()) {
            return Err(CliError::Usage(format!(
                "{} exists; pass --force to overwrite",
                t.display()
            )));
        }
    }
    let temps: Vec<PathBuf> = outputs
        .files
        .iter()
        .map(|(n, _)| dir.join(format!(".{n}.tmp{}", std::process::id())))
        .collect();
    PENDING.lock().expect("lock").extend(temps.iter().cloned());
    let result = (|| -> CliResult<()> {
        for ((_, content), tmp) in outputs.files.iter().zip(&temps) {
            let mut f = fs::File::create(tmp).map_err(|e| Error::io(tmp, e))?;
            f.write_all(content).map_err(|e| Error::io(tmp, e))?;
            f.sync_all().map_err(|e| Error::io(tmp, e))?;
        }
        for (tmp, target) in temps.iter().zip(&targets) {
            fs::rename(tmp, target).map_err(|e| Error::io(target, e))?;
        }
        Ok(())
    })();
    if result.is_err() {
        for tmp in &temps {
            let _ = fs::remove_file(tmp);
        }
    }
    PENDING.lock().expect("lock").retain(|p| !temps.contains(p));
    result.map(|_| targets)
}

/// Runs one command and returns the paths written.
pub fn run(command: &Command) -> CliResult<Vec<PathBuf>> {
    let cfg = ConfigFile::read(&command.config_path)?;
    check_sections(&cfg)?;
    let model = load_model(&cfg)?;
    let outputs = match command.verb {
        Verb::Simulate => simulate(&cfg, &model, command.seed_override)?,
        Verb::Estimate => estimate(&cfg, &model)?,
        Verb::Truth => truth(&cfg, &model)?,
        Verb::Mc => mc(&cfg, &model, command.seed_override)?,
        Verb::Confidence => confidence(&cfg, &model, command.seed_override)?,
        Verb::Fejer => fejer(&cfg, &model)?,
    };
    write_outputs(&command.out_dir, &outputs, command.force)
}
