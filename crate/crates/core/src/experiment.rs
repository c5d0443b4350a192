//! Experiment configuration, orchestration, persistence and the invariant
//! suite behind `fracsource verify`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{observe_flux_discrete_with, solve_discrete, FluxStencil};
use crate::inverse::{
    add_noise_with, build_forward_matrix_cached, build_forward_matrix_with, build_time_convolution, reconstruct_modes,
    reconstruction_csv, tikhonov_solve, ForwardMap, Method, NoiseModel, NuChoice, ReconstructionResult, TikhonovConfig,
};
use crate::problem::{Intensity, ObservationTrace, ProblemSpec, Samples, Source, SpatialMesh, TimeGrid};
use crate::spectral::{find_eigenvalues, EigenSystem, DEFAULT_ZERO_TOL};

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "FRACSOURCE_SEED";

/// Named choice or a two-column CSV file (header row, then `t,lambda` or `x,f`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionChoice {
    Named(String),
    File { samples_file: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub h: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    Fixed(f64),
    Named(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: Option<u32>,
    alpha: Option<f64>,
    beta: Option<f64>,
    #[serde(rename = "T", alias = "t_final")]
    t_final: Option<f64>,
    intensity: Option<FunctionChoice>,
    source_truth: Option<FunctionChoice>,
    fine: Option<GridSpec>,
    coarse: Option<GridSpec>,
    grading_exponent: Option<f64>,
    delta: Option<f64>,
    seed: Option<u64>,
    nu: Option<NuSpec>,
    nu_grid: Option<NuGrid>,
    discrepancy_margin: Option<f64>,
    noise_norm_factor: Option<f64>,
    n_modes: Option<usize>,
    methods: Option<Vec<String>>,
    noise_model: Option<NoiseModel>,
    flux_stencil: Option<String>,
    allow_inverse_crime: Option<bool>,
    cache_dir: Option<String>,
}

/// Validated experiment description with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub intensity: FunctionChoice,
    pub source_truth: FunctionChoice,
    pub fine: GridSpec,
    pub coarse: GridSpec,
    pub grading_exponent: f64,
    pub delta: f64,
    pub seed: u64,
    pub nu: NuSpec,
    pub nu_grid: NuGrid,
    pub discrepancy_margin: f64,
    pub noise_norm_factor: f64,
    pub n_modes: usize,
    pub methods: Vec<Method>,
    pub noise_model: NoiseModel,
    pub flux_stencil: FluxStencil,
    pub allow_inverse_crime: bool,
    pub cache_dir: Option<String>,
    #[serde(skip)]
    intensity_samples: Option<Samples>,
    #[serde(skip)]
    source_samples: Option<Samples>,
}

impl ExperimentConfig {
    /// Defaults with the given orders.
    pub fn with_orders(alpha: f64, beta: f64) -> Result<Self> {
        let raw = RawConfig { alpha: Some(alpha), beta: Some(beta), ..Default::default() };
        validate(raw, Path::new("."))
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::ParseError {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        validate(raw, base_dir)
    }

    pub fn intensity(&self) -> Intensity {
        match (&self.intensity, &self.intensity_samples) {
            (_, Some(s)) => Intensity::Samples(s.clone()),
            (FunctionChoice::Named(n), None) if n == "sin5" => Intensity::Sin5,
            _ => Intensity::Exp2,
        }
    }

    pub fn source(&self) -> Source {
        match (&self.source_truth, &self.source_samples) {
            (_, Some(s)) => Source::Samples(s.clone()),
            (FunctionChoice::Named(n), None) => match n.as_str() {
                "poly2" => Source::Poly2,
                "poly4" => Source::Poly4,
                _ => Source::Poly1,
            },
            _ => Source::Poly1,
        }
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        ProblemSpec::new(self.alpha, self.beta, self.t_final, self.intensity(), self.source())
    }

    pub fn fine_mesh(&self) -> Result<SpatialMesh> {
        SpatialMesh::graded(cells(self.fine.h), self.grading_exponent)
    }

    pub fn coarse_mesh(&self) -> Result<SpatialMesh> {
        SpatialMesh::graded(cells(self.coarse.h), self.grading_exponent)
    }

    pub fn fine_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_final, self.fine.tau)
    }

    pub fn coarse_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_final, self.coarse.tau)
    }

    pub fn tikhonov(&self) -> TikhonovConfig {
        TikhonovConfig {
            nu: match self.nu {
                NuSpec::Fixed(v) => NuChoice::Fixed(v),
                NuSpec::Named(_) => NuChoice::Auto,
            },
            nu_min: self.nu_grid.min,
            nu_max: self.nu_grid.max,
            nu_count: self.nu_grid.count,
            delta_estimate: self.delta,
            margin: self.discrepancy_margin,
            noise_norm_factor: self.noise_norm_factor,
        }
    }

    /// Ratio tau_coarse / tau_fine used to subsample the data.
    pub fn subsample_ratio(&self) -> usize {
        (self.coarse.tau / self.fine.tau).round() as usize
    }
}

fn cells(h: f64) -> usize {
    (1.0 / h).round() as usize
}

fn divides_one(h: f64) -> bool {
    let n = (1.0 / h).round();
    n >= 2.0 && (n * h - 1.0).abs() <= 1e-9
}

fn read_samples(base: &Path, file: &str) -> std::result::Result<Samples, String> {
    let path = base.join(file);
    let mut rdr = csv::Reader::from_path(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        if rec.len() != 2 {
            return Err(format!("{}: expected two columns", path.display()));
        }
        let p = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{}: {e}", path.display()));
        x.push(p(&rec[0])?);
        y.push(p(&rec[1])?);
    }
    Samples::new(x, y).map_err(|e| format!("{}: {e}", path.display()))
}

fn validate(raw: RawConfig, base: &Path) -> Result<ExperimentConfig> {
    let mut bad = Vec::new();
    let schema_version = raw.schema_version.unwrap_or(SCHEMA_VERSION);
    if schema_version != SCHEMA_VERSION {
        bad.push(format!("schema_version: {schema_version} is not supported (expected {SCHEMA_VERSION})"));
    }
    let mut order = |name: &str, v: Option<f64>| match v {
        None => {
            bad.push(format!("{name}: missing (orders are mandatory)"));
            f64::NAN
        }
        Some(v) if !(v > 1.0 && v <= 2.0) => {
            bad.push(format!("{name}: {v} must lie in (1, 2]"));
            v
        }
        Some(v) => v,
    };
    let alpha = order("alpha", raw.alpha);
    let beta = order("beta", raw.beta);
    let t_final = raw.t_final.unwrap_or(1.0);
    if !(t_final > 0.0 && t_final.is_finite()) {
        bad.push(format!("T: {t_final} must be positive"));
    }

    let intensity = raw.intensity.unwrap_or(FunctionChoice::Named("exp2".into()));
    let mut intensity_samples = None;
    match &intensity {
        FunctionChoice::Named(n) if n == "exp2" || n == "sin5" => {}
        FunctionChoice::Named(n) => {
            bad.push(format!("intensity: unknown name {n:?} (exp2, sin5 or {{\"samples_file\": ...}})"))
        }
        FunctionChoice::File { samples_file } => match read_samples(base, samples_file) {
            Ok(s) => intensity_samples = Some(s),
            Err(e) => bad.push(format!("intensity: {e}")),
        },
    }
    let source_truth = raw.source_truth.unwrap_or(FunctionChoice::Named("poly1".into()));
    let mut source_samples = None;
    match &source_truth {
        FunctionChoice::Named(n) if ["poly1", "poly2", "poly4"].contains(&n.as_str()) => {}
        FunctionChoice::Named(n) => {
            bad.push(format!("source_truth: unknown name {n:?} (poly1, poly2, poly4 or a samples file)"))
        }
        FunctionChoice::File { samples_file } => match read_samples(base, samples_file) {
            Ok(s) => source_samples = Some(s),
            Err(e) => bad.push(format!("source_truth: {e}")),
        },
    }

    let fine = raw.fine.unwrap_or(GridSpec { h: 1e-3, tau: 5e-4 });
    let coarse = raw.coarse.unwrap_or(GridSpec { h: 4e-3, tau: 2e-3 });
    for (name, g) in [("fine", fine), ("coarse", coarse)] {
        if !(g.h > 0.0) || !divides_one(g.h) {
            bad.push(format!("{name}.h: {} must divide 1 into an integer number (>= 2) of cells", g.h));
        }
        if !(g.tau > 0.0) || (t_final > 0.0 && TimeGrid::new(t_final, g.tau).is_err()) {
            bad.push(format!("{name}.tau: {} must be positive and divide T = {t_final}", g.tau));
        }
    }
    if coarse.h < fine.h || coarse.tau < fine.tau {
        bad.push("coarse: the inversion grid must not be finer than the data grid".into());
    }
    let ratio = coarse.tau / fine.tau;
    if fine.tau > 0.0 && (ratio - ratio.round()).abs() > 1e-9 {
        bad.push(format!("coarse.tau: ratio {ratio} to fine.tau must be an integer for subsampling"));
    }
    let grading_exponent = raw.grading_exponent.unwrap_or(4.0);
    if !(grading_exponent >= 1.0) {
        bad.push(format!("grading_exponent: {grading_exponent} must be >= 1"));
    }
    let delta = raw.delta.unwrap_or(0.02);
    if !(delta >= 0.0 && delta.is_finite()) {
        bad.push(format!("delta: {delta} must be non-negative"));
    }
    let nu = raw.nu.unwrap_or(NuSpec::Named("auto".into()));
    match nu {
        NuSpec::Fixed(v) if !(v > 0.0) => bad.push(format!("nu: {v} must be positive")),
        NuSpec::Named(ref s) if s != "auto" => bad.push(format!("nu: {s:?} must be a positive number or \"auto\"")),
        _ => {}
    }
    let nu_grid = raw.nu_grid.unwrap_or(NuGrid { min: 1e-12, max: 1e-2, count: 40 });
    if !(nu_grid.min > 0.0 && nu_grid.max > nu_grid.min && nu_grid.count >= 2) {
        bad.push("nu_grid: needs 0 < min < max and count >= 2".into());
    }
    let discrepancy_margin = raw.discrepancy_margin.unwrap_or(1.01);
    if !(discrepancy_margin >= 1.0) {
        bad.push(format!("discrepancy_margin: {discrepancy_margin} must be >= 1"));
    }
    let noise_norm_factor = raw.noise_norm_factor.unwrap_or(1.0);
    if !(noise_norm_factor > 0.0) {
        bad.push(format!("noise_norm_factor: {noise_norm_factor} must be positive"));
    }
    let n_modes = raw.n_modes.unwrap_or(40);
    if n_modes == 0 {
        bad.push("n_modes: must be at least 1".into());
    }
    let mut methods = Vec::new();
    for m in raw.methods.unwrap_or_else(|| vec!["tikhonov".into()]) {
        match m.as_str() {
            "tikhonov" => methods.push(Method::Tikhonov),
            "spectral_modes" | "spectral" => methods.push(Method::SpectralModes),
            other => bad.push(format!("methods: unknown method {other:?}")),
        }
    }
    methods.dedup();
    if methods.is_empty() && !bad.iter().any(|b| b.starts_with("methods")) {
        bad.push("methods: at least one method is required".into());
    }
    let flux_stencil = match raw.flux_stencil.as_deref() {
        None | Some("three_point") => FluxStencil::ThreePoint,
        Some("last_cell") => FluxStencil::LastCell,
        Some(s) => {
            bad.push(format!("flux_stencil: unknown stencil {s:?} (three_point, last_cell)"));
            FluxStencil::ThreePoint
        }
    };
    if !bad.is_empty() {
        return Err(Error::ValidationError(bad));
    }
    Ok(ExperimentConfig {
        schema_version,
        alpha,
        beta,
        t_final,
        intensity,
        source_truth,
        fine,
        coarse,
        grading_exponent,
        delta,
        seed: raw.seed.unwrap_or(0),
        nu,
        nu_grid,
        discrepancy_margin,
        noise_norm_factor,
        n_modes,
        methods,
        noise_model: raw.noise_model.unwrap_or_default(),
        flux_stencil,
        allow_inverse_crime: raw.allow_inverse_crime.unwrap_or(false),
        cache_dir: raw.cache_dir,
        intensity_samples,
        source_samples,
    })
}

/// Reads and validates a JSON config; sample files resolve relative to it.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    ExperimentConfig::from_json(&text, base)
}

/// Seed precedence: explicit value, then FRACSOURCE_SEED, then the config.
pub fn resolve_seed(config_seed: u64, explicit: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match env {
        Some(v) if !v.trim().is_empty() => {
            v.trim().parse().map_err(|_| Error::InvalidInput(format!("{SEED_ENV}={v:?} is not an unsigned integer")))
        }
        _ => Ok(config_seed),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodMetrics {
    pub method: Method,
    pub relative_l2_error: Option<f64>,
    pub nu_used: Option<f64>,
    pub residual_norm: f64,
    pub n_modes_used: Option<usize>,
    pub imag_residue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodFailure {
    pub method: Method,
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub timings: Vec<StageTiming>,
    pub outputs: Vec<String>,
    pub metrics: Vec<MethodMetrics>,
    pub failures: Vec<MethodFailure>,
    pub notes: Vec<String>,
    /// Relative misfit of the coarse-grid model on the clean data.
    pub model_error: f64,
    pub reconstruction_columns: Vec<String>,
}

/// Everything a run produces, before it is written out.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub trace_clean: ObservationTrace,
    pub trace_noisy: ObservationTrace,
    pub x: Vec<f64>,
    pub f_true: Vec<f64>,
    pub results: Vec<ReconstructionResult>,
    pub eigensystem: EigenSystem,
}

impl RunOutcome {
    /// The first method failure as an error (for the process exit code).
    pub fn first_failure(&self) -> Option<&MethodFailure> {
        self.manifest.failures.first()
    }

    pub fn result(&self, method: Method) -> Option<&ReconstructionResult> {
        self.results.iter().find(|r| r.method == method)
    }
}

fn column_name(m: Method) -> &'static str {
    match m {
        Method::Tikhonov => "f_hat_tikhonov",
        Method::SpectralModes => "f_hat_spectral",
    }
}

struct Clock(Vec<StageTiming>, Instant);

impl Clock {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.0.push(StageTiming { stage: stage.into(), seconds: (now - self.1).as_secs_f64() });
        self.1 = now;
    }
}

/// Fine-grid data, noise, coarse-grid operator and each requested
/// reconstruction. Method-level failures are recorded, not raised.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    if config.fine == config.coarse && !config.allow_inverse_crime {
        return Err(Error::InverseCrime);
    }
    let mut clock = Clock(Vec::new(), Instant::now());
    let spec = config.problem()?;
    let mut notes = Vec::new();

    let fine_mesh = config.fine_mesh()?;
    let fine_grid = config.fine_grid()?;
    let fine = solve_discrete(&spec, &fine_mesh, &fine_grid)?;
    let trace_fine = observe_flux_discrete_with(&fine, &fine_mesh, config.flux_stencil)?;
    let trace_clean = trace_fine.subsample(config.subsample_ratio())?;
    clock.lap("forward_fine");

    let trace_noisy = add_noise_with(&trace_clean, config.delta, config.seed, config.noise_model)?;
    clock.lap("noise");

    let mesh = config.coarse_mesh()?;
    let grid = config.coarse_grid()?;
    let map: ForwardMap = match &config.cache_dir {
        Some(dir) => build_forward_matrix_cached(&spec, &mesh, &grid, config.flux_stencil, Path::new(dir))?,
        None => build_forward_matrix_with(&spec, &mesh, &grid, config.flux_stencil)?,
    };
    clock.lap("forward_matrix");

    let f_true = config.source().interior(&mesh);
    let model = map.apply(&f_true)?;
    let model_error = {
        let num: f64 = model.iter().zip(&trace_clean.phi).map(|(a, b)| (a - b).powi(2)).sum();
        (num / trace_clean.phi.iter().map(|b| b * b).sum::<f64>()).sqrt()
    };

    let eigensystem = find_eigenvalues(config.beta, config.n_modes, DEFAULT_ZERO_TOL)?;
    clock.lap("eigensystem");

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for &method in &config.methods {
        let r = match method {
            Method::Tikhonov => tikhonov_solve(&map, &trace_noisy, &config.tikhonov()),
            Method::SpectralModes => build_time_convolution(&spec.intensity, &grid).and_then(|k| {
                reconstruct_modes(&spec, &trace_noisy, &eigensystem, &k, config.n_modes, config.delta, &mesh)
            }),
        };
        match r {
            Ok(mut r) => {
                r.record_error(&mesh, &f_true)?;
                results.push(r);
            }
            Err(e) => {
                if matches!(e, Error::OrderMismatch { .. }) {
                    notes.push(
                        "modal reconstruction needs alpha = beta; only Tikhonov applies to this configuration".into(),
                    );
                }
                failures.push(MethodFailure {
                    method,
                    kind: e.kind().into(),
                    exit_code: e.exit_code(),
                    message: e.to_string(),
                });
            }
        }
        clock.lap(match method {
            Method::Tikhonov => "tikhonov",
            Method::SpectralModes => "spectral_modes",
        });
    }

    let metrics = results
        .iter()
        .map(|r| MethodMetrics {
            method: r.method,
            relative_l2_error: r.error_vs_truth,
            nu_used: r.nu_used,
            residual_norm: r.residual_norm,
            n_modes_used: r.n_modes_used,
            imag_residue: r.imag_residue,
        })
        .collect();
    let manifest = RunManifest {
        toolkit: "fracsource".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        timings: clock.0,
        outputs: Vec::new(),
        metrics,
        failures,
        notes,
        model_error,
        reconstruction_columns: results.iter().map(|r| column_name(r.method).to_string()).collect(),
    };
    Ok(RunOutcome { manifest, trace_clean, trace_noisy, x: mesh.interior().to_vec(), f_true, results, eigensystem })
}

/// Writes to a temporary sibling and renames over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidInput(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn trace_csv(clean: &ObservationTrace, noisy: &ObservationTrace) -> String {
    let mut s = String::from("t,phi_clean,phi_noisy\n");
    for (k, (a, b)) in clean.phi.iter().zip(&noisy.phi).enumerate() {
        s.push_str(&format!("{},{},{}\n", clean.grid.t(k), a, b));
    }
    s
}

/// Writes manifest.json, trace.csv, reconstruction.csv and eigensystem.json.
pub fn persist_results(outcome: &mut RunOutcome, outdir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let files = ["trace.csv", "reconstruction.csv", "eigensystem.json", "manifest.json"];
    outcome.manifest.outputs = files.iter().map(|s| s.to_string()).collect();
    let cols: Vec<(&str, &[f64])> =
        outcome.results.iter().map(|r| (column_name(r.method), r.f_hat.as_slice())).collect();
    let recon = reconstruction_csv(&outcome.x, &outcome.f_true, &cols);
    let manifest = serde_json::to_string_pretty(&outcome.manifest).expect("manifest serializes");
    let contents =
        [trace_csv(&outcome.trace_clean, &outcome.trace_noisy), recon, outcome.eigensystem.to_json(), manifest];
    let mut out = Vec::new();
    for (name, body) in files.iter().zip(contents) {
        let p = outdir.join(name);
        write_atomic(&p, body.as_bytes())?;
        out.push(p);
    }
    Ok(out)
}

/// gnuplot script overlaying f_true and the reconstructions, plus the trace.
pub fn emit_plot_script(manifest: &RunManifest, outdir: &Path) -> Result<PathBuf> {
    for f in ["reconstruction.csv", "trace.csv"] {
        let p = outdir.join(f);
        if !p.is_file() {
            return Err(Error::io(
                &p,
                std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    "run results must be persisted before the plot script",
                ),
            ));
        }
    }
    let c = &manifest.config;
    let mut s = String::new();
    s.push_str("# gnuplot script; run with: gnuplot plot.gp\n");
    s.push_str("set datafile separator ','\nset key top left\nset terminal pngcairo size 1200,480\n");
    s.push_str("set output 'reconstruction.png'\nset multiplot layout 1,2\n");
    s.push_str(&format!("set title 'source, alpha={} beta={} delta={}'\nset xlabel 'x'\n", c.alpha, c.beta, c.delta));
    let mut curves = vec!["'reconstruction.csv' using 1:2 with lines lw 2 title 'f true'".to_string()];
    for (i, name) in manifest.reconstruction_columns.iter().enumerate() {
        curves.push(format!("'' using 1:{} with lines title '{}'", i + 3, name.replace('_', " ")));
    }
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s.push_str("set title 'flux observation'\nset xlabel 't'\n");
    s.push_str("plot 'trace.csv' using 1:2 with lines title 'phi clean', \\\n     '' using 1:3 with points pt 7 ps 0.3 title 'phi noisy'\n");
    s.push_str("unset multiplot\n");
    let path = outdir.join("plot.gp");
    write_atomic(&path, s.as_bytes())?;
    Ok(path)
}

/// One line of the invariant suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Fast invariant checks across the modules.
pub fn verify_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |name: &str, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        out.push(Check { name: name.into(), passed, detail });
    };
    push("mlf identities", checks::mlf_identities());
    push("eigenvalues beta=2", checks::classical_eigenvalues());
    push("eigen certificate and sector beta=1.5", checks::certificate());
    push("bi-orthogonality beta=1.5", checks::biorthogonality());
    push("stiffness beta=2", checks::classical_stiffness());
    push("superposition of the forward map", checks::superposition());
    push("tikhonov normal equations", checks::normal_equations());
    push("noise determinism", checks::noise());
    out
}

mod checks {
    use super::*;
    use crate::forward::{assemble_fractional_stiffness, observe_flux_discrete, time_march_discrete};
    use crate::inverse::{add_noise, build_forward_matrix};
    use crate::mlf::MittagLeffler;
    use crate::spectral::pairing_matrix;
    use num_complex::Complex64 as C64;

    pub fn mlf_identities() -> Result<(bool, String)> {
        let e11 = MittagLeffler::new(1.0, 1.0)?;
        let e21 = MittagLeffler::new(2.0, 1.0)?;
        let mut worst: f64 = 0.0;
        for z in [C64::new(-3.0, 2.0), C64::new(40.0, -7.0), C64::new(-250.0, 10.0), C64::new(0.3, 0.1)] {
            worst = worst.max((e11.eval(z)? - z.exp()).norm() / z.exp().norm());
            let c = z.sqrt().cosh();
            worst = worst.max((e21.eval(z)? - c).norm() / c.norm());
        }
        Ok((worst < 1e-10, format!("max relative error {worst:.2e}")))
    }

    pub fn classical_eigenvalues() -> Result<(bool, String)> {
        let s = find_eigenvalues(2.0, 10, DEFAULT_ZERO_TOL)?;
        let worst = s
            .pairs
            .iter()
            .map(|p| {
                let n = p.index as f64;
                (p.lambda.re + n * n * std::f64::consts::PI.powi(2)).abs() / (n * n)
            })
            .fold(0.0, f64::max);
        Ok((worst < 1e-8, format!("max |lambda_n + n^2 pi^2| / n^2 = {worst:.2e}")))
    }

    pub fn certificate() -> Result<(bool, String)> {
        let s = find_eigenvalues(1.5, 20, DEFAULT_ZERO_TOL)?;
        let v = s.lemma_violations();
        let c = s.certificate.clone().unwrap();
        Ok((v.is_empty() && c.winding == c.expected, format!("winding {} on |z| = {:.1}", c.winding, c.radius)))
    }

    pub fn biorthogonality() -> Result<(bool, String)> {
        let s = find_eigenvalues(1.5, 4, DEFAULT_ZERO_TOL)?;
        let modes = s.modes(4);
        let g = pairing_matrix(&s, &modes)?;
        let m = modes.len();
        let mut off: f64 = 0.0;
        let mut diag: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    let p = s.pair(modes[i])?.pairing;
                    diag = diag.max((g[i * m + j] - p).norm() / p.norm());
                } else {
                    off = off.max(g[i * m + j].norm());
                }
            }
        }
        Ok((off < 1e-8 && diag < 1e-6, format!("max cross pairing {off:.1e}, diagonal mismatch {diag:.1e}")))
    }

    pub fn classical_stiffness() -> Result<(bool, String)> {
        let mesh = SpatialMesh::uniform(8)?;
        let ops = assemble_fractional_stiffness(2.0, &mesh)?;
        let h = 0.125;
        let mut worst: f64 = 0.0;
        for i in 0..7 {
            for j in 0..7 {
                let want = match (i as i64 - j as i64).abs() {
                    0 => -2.0 / h,
                    1 => 1.0 / h,
                    _ => 0.0,
                };
                worst = worst.max((ops.stiffness[(i, j)] - want).abs());
            }
        }
        Ok((worst < 1e-10, format!("max entry error {worst:.1e}")))
    }

    pub fn superposition() -> Result<(bool, String)> {
        let spec = ProblemSpec::new(1.5, 1.5, 1.0, Intensity::Exp2, Source::Poly2)?;
        let mesh = SpatialMesh::graded(40, 4.0)?;
        let grid = TimeGrid::new(1.0, 0.01)?;
        let map = build_forward_matrix(&spec, &mesh, &grid)?;
        let ops = assemble_fractional_stiffness(spec.beta, &mesh)?;
        let f = spec.source.interior(&mesh);
        let sol = time_march_discrete(&spec, &ops, &mesh, &grid, &f)?;
        let tr = observe_flux_discrete(&sol, &mesh)?;
        let af = map.apply(&f)?;
        let d = af.iter().zip(&tr.phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = tr.phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok((d <= 1e-10 * scale.max(1.0), format!("max |A f - phi| = {d:.1e}")))
    }

    pub fn normal_equations() -> Result<(bool, String)> {
        let spec = ProblemSpec::new(1.5, 1.5, 1.0, Intensity::Exp2, Source::Poly1)?;
        let mesh = SpatialMesh::graded(30, 4.0)?;
        let grid = TimeGrid::new(1.0, 0.02)?;
        let map = build_forward_matrix(&spec, &mesh, &grid)?;
        let z = ObservationTrace::clean(grid, map.apply(&spec.source.interior(&mesh))?);
        let r = tikhonov_solve(&map, &z, &TikhonovConfig::fixed(1e-6))?;
        let a = &map.matrix;
        let f = nalgebra::DVector::from_vec(r.f_hat.clone());
        let zv = nalgebra::DVector::from_vec(z.phi.clone());
        let atz = a.transpose() * &zv;
        let res = (a.transpose() * (a * &f) + &f * 1e-6 - &atz).norm() / atz.norm();
        Ok((res <= 1e-8, format!("relative normal-equation residual {res:.1e}")))
    }

    pub fn noise() -> Result<(bool, String)> {
        let grid = TimeGrid::new(1.0, 0.01)?;
        let tr = ObservationTrace::clean(grid, (0..=100).map(|k| (k as f64 * 0.1).sin()).collect());
        let a = add_noise(&tr, 0.05, 11)?;
        let b = add_noise(&tr, 0.05, 11)?;
        let within = a.phi.iter().zip(&tr.phi).all(|(n, c)| *c == 0.0 || (n / c - 1.0).abs() <= 0.05);
        Ok((a == b && within, "seeded noise reproducible and within delta".into()))
    }
}
