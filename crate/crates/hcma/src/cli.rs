//! Batch front-end: flag/config parsing, experiment orchestration, and
//! report emission.
//!
//! Four commands: `tube` (radius scan of a built-in metric), `foliate`
//! (extremal-disk chart at a deformation parameter), `flow` (ξ/η flow
//! trace on an exhaustion model), `verify` (replay a stored chart through
//! the Levi and tangency checks). Configuration is flat `key=value`
//! (file via `--config`, flags override); reports are JSON/CSV written
//! atomically, with wall-clock metadata in a sidecar. Exit status: 0 when
//! every requested verification passes, 1 on verification failure
//! (reports are still written), 2 on configuration errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::disk::foliation::{default_levi_samples, levi_verify, tangency_verify};
use crate::disk::newton::NewtonOptions;
use crate::disk::{assemble_foliation, BoundaryDisk, FoliationChart, HermitianModel};
use crate::flow::{flow, ExhaustionModel, FieldKind};
use crate::geom::SurfaceMetric;
use crate::report::{
    flow_trace_csv, write_bytes_atomic, write_json_atomic, write_meta_sidecar, ChartDoc,
    ChartReportsDoc, LeviDoc, TangencyDoc, TubeReportDoc,
};
use crate::tol;
use crate::tube::{tube_radius, TubeScanConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown command {0:?} (expected tube, foliate, flow, or verify)")]
    UnknownCommand(String),
    #[error("missing command")]
    MissingCommand,
    #[error("flag {0:?} expects a value")]
    MissingValue(String),
    #[error("unknown key {0:?} for command {1}")]
    UnknownKey(String, &'static str),
    #[error("invalid value for {key}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("config file {0}: {1}")]
    ConfigFile(PathBuf, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Tube,
    Foliate,
    Flow,
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tube => "tube",
            Command::Foliate => "foliate",
            Command::Flow => "flow",
            Command::Verify => "verify",
        }
    }

    fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            Command::Tube => &[
                "metric",
                "zoll-eps",
                "geodesics",
                "tau-ceiling",
                "sigma-samples",
                "step",
                "out",
            ],
            Command::Foliate => &[
                "model",
                "lambda",
                "modes",
                "grid",
                "z-extent",
                "z-count",
                "out",
            ],
            Command::Flow => &["model", "dim", "field", "start", "t-end", "step", "out"],
            Command::Verify => &["chart", "levi", "tangency", "out"],
        }
    }
}

/// Parsed run configuration: a command plus validated `key=value` pairs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parse command-line arguments (command first, then `--key value`
    /// flags; `--config FILE` loads `key=value` lines that flags
    /// override).
    pub fn parse(args: &[String]) -> Result<RunConfig, ConfigError> {
        let mut it = args.iter();
        let command = match it.next().map(String::as_str) {
            Some("tube") => Command::Tube,
            Some("foliate") => Command::Foliate,
            Some("flow") => Command::Flow,
            Some("verify") => Command::Verify,
            Some(other) => return Err(ConfigError::UnknownCommand(other.to_string())),
            None => return Err(ConfigError::MissingCommand),
        };

        let boolean_keys = ["levi", "tangency"];
        let mut from_flags = BTreeMap::new();
        let mut config_path: Option<PathBuf> = None;
        let rest: Vec<&String> = it.collect();
        let mut i = 0;
        while i < rest.len() {
            let arg = rest[i];
            let key = arg
                .strip_prefix("--")
                .ok_or_else(|| ConfigError::UnknownKey(arg.clone(), command.name()))?
                .to_string();
            if key == "config" {
                let value = rest.get(i + 1).ok_or_else(|| ConfigError::MissingValue(arg.clone()))?;
                config_path = Some(PathBuf::from(value.as_str()));
                i += 2;
                continue;
            }
            if boolean_keys.contains(&key.as_str())
                && rest.get(i + 1).map(|v| v.starts_with("--")).unwrap_or(true)
            {
                from_flags.insert(key, "true".to_string());
                i += 1;
                continue;
            }
            let value = rest.get(i + 1).ok_or_else(|| ConfigError::MissingValue(arg.clone()))?;
            from_flags.insert(key, value.to_string());
            i += 2;
        }

        let mut params = BTreeMap::new();
        if let Some(path) = config_path {
            let body = std::fs::read_to_string(&path)
                .map_err(|e| ConfigError::ConfigFile(path.clone(), e.to_string()))?;
            for (lineno, line) in body.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    ConfigError::ConfigFile(path.clone(), format!("line {}: expected key=value", lineno + 1))
                })?;
                params.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        params.extend(from_flags);

        for key in params.keys() {
            if !command.allowed_keys().contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(key.clone(), command.name()));
            }
        }
        let config = RunConfig { command, params };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for key in ["tau-ceiling", "step", "t-end", "z-extent"] {
            if let Some(v) = self.params.get(key) {
                let x = self.f64_of(key, v)?;
                if x <= 0.0 && key != "t-end" {
                    return Err(ConfigError::InvalidValue {
                        key: key.into(),
                        reason: format!("{x} must be positive"),
                    });
                }
            }
        }
        if let Some(v) = self.params.get("grid") {
            let n = self.usize_of("grid", v)?;
            if !n.is_power_of_two() || n < 16 {
                return Err(ConfigError::InvalidValue {
                    key: "grid".into(),
                    reason: format!("{n} must be a power of two ≥ 16"),
                });
            }
        }
        Ok(())
    }

    fn f64_of(&self, key: &str, v: &str) -> Result<f64, ConfigError> {
        v.parse::<f64>().map_err(|e| ConfigError::InvalidValue { key: key.into(), reason: e.to_string() })
    }

    fn usize_of(&self, key: &str, v: &str) -> Result<usize, ConfigError> {
        v.parse::<usize>().map_err(|e| ConfigError::InvalidValue { key: key.into(), reason: e.to_string() })
    }

    fn get_f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.params.get(key) {
            Some(v) => self.f64_of(key, v),
            None => Ok(default),
        }
    }

    fn get_usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.params.get(key) {
            Some(v) => self.usize_of(key, v),
            None => Ok(default),
        }
    }

    fn get_str(&self, key: &str, default: &str) -> String {
        self.params.get(key).cloned().unwrap_or_else(|| default.to_string())
    }

    fn get_flag(&self, key: &str) -> bool {
        matches!(self.params.get(key).map(String::as_str), Some("true") | Some("1") | Some("yes"))
    }

    fn get_complex(&self, key: &str, default: Complex64) -> Result<Complex64, ConfigError> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => {
                let parts: Vec<&str> = v.split(',').collect();
                let re = self.f64_of(key, parts[0])?;
                let im = if parts.len() > 1 { self.f64_of(key, parts[1])? } else { 0.0 };
                Ok(Complex64::new(re, im))
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Tube(#[from] crate::tube::TubeError),
    #[error("{0}")]
    Disk(#[from] crate::disk::DiskError),
    #[error("{0}")]
    Flow(#[from] crate::flow::FlowError),
    #[error("{0}")]
    Geom(#[from] crate::geom::GeomError),
    #[error("chart file: {0}")]
    ChartFile(String),
}

/// Execute a parsed configuration. `Ok(true)` means every requested
/// verification passed (exit 0), `Ok(false)` maps to exit 1; reports are
/// written in both cases.
pub fn run(config: &RunConfig) -> Result<bool, RunError> {
    let started = Instant::now();
    let result = match config.command {
        Command::Tube => run_tube(config),
        Command::Foliate => run_foliate(config),
        Command::Flow => run_flow(config),
        Command::Verify => run_verify(config),
    }?;
    let out = default_out(config);
    let _ = write_meta_sidecar(&out, started.elapsed().as_secs_f64());
    Ok(result)
}

fn default_out(config: &RunConfig) -> PathBuf {
    let default = match config.command {
        Command::Tube => "tube.json",
        Command::Foliate => "chart.json",
        Command::Flow => "flow.csv",
        Command::Verify => "verify.json",
    };
    PathBuf::from(config.get_str("out", default))
}

fn run_tube(config: &RunConfig) -> Result<bool, RunError> {
    let metric = match config.get_str("metric", "round").as_str() {
        "round" => SurfaceMetric::round_sphere(),
        "flat" => SurfaceMetric::flat(),
        "zoll" => SurfaceMetric::zoll(config.get_f64("zoll-eps", 0.3)?)?,
        other => {
            return Err(ConfigError::InvalidValue {
                key: "metric".into(),
                reason: format!("unknown metric {other:?}"),
            }
            .into())
        }
    };
    let n = config.get_usize("geodesics", 32)?;
    let ceiling = config.get_f64("tau-ceiling", 6.0)?;
    let scan = TubeScanConfig {
        sigma_samples: config.get_usize("sigma-samples", 16)?,
        step: config.get_f64("step", 2e-3)?,
        ..Default::default()
    };
    let report = tube_radius(&metric, n, ceiling, &scan)?;
    let doc = TubeReportDoc::from_report(&report);
    write_json_atomic(&default_out(config), &doc)?;
    println!(
        "tube: radius_estimate = {:.6}, entire = {}, breaches = {}",
        report.radius_estimate,
        report.entire_flag,
        report.per_geodesic_breach.len()
    );
    Ok(true)
}

fn z_grid(extent: f64, count: usize) -> Vec<Complex64> {
    let mut grid = Vec::new();
    for i in 0..count {
        for j in 0..count {
            let frac = |k: usize| {
                if count == 1 {
                    0.0
                } else {
                    -extent + 2.0 * extent * k as f64 / (count - 1) as f64
                }
            };
            grid.push(Complex64::new(frac(i), frac(j)));
        }
    }
    grid
}

fn run_foliate(config: &RunConfig) -> Result<bool, RunError> {
    let model_name = config.get_str("model", "quadric-like");
    let model = HermitianModel::by_name(&model_name, 2).ok_or_else(|| {
        ConfigError::InvalidValue { key: "model".into(), reason: format!("unknown model {model_name:?}") }
    })?;
    let lambda = config.get_complex("lambda", Complex64::new(0.0, 0.0))?;
    let opts = NewtonOptions {
        n_modes: config.get_usize("modes", 64)?,
        grid_len: config.get_usize("grid", 256)?,
        ..Default::default()
    };
    let grid = z_grid(config.get_f64("z-extent", 0.2)?, config.get_usize("z-count", 3)?);
    let chart = assemble_foliation(&model, lambda, &grid, &opts)?;

    let pass = chart.grid.iter().all(|g| g.grad_norm <= tol::GRAD_NORM)
        && chart
            .grid
            .iter()
            .all(|g| g.disk.boundary_residual(&model, opts.grid_len) <= tol::BOUNDARY_RESIDUAL);
    let reports = ChartReportsDoc {
        boundary_potential_sup: Some(chart.boundary_potential_sup(8)?),
        leaf_exactness_sup: Some(chart.leaf_exactness_sup(&[0.5, 0.9], 8)?),
        ..Default::default()
    };
    let doc = ChartDoc::from_chart(&chart, &model_name, reports);
    write_json_atomic(&default_out(config), &doc)?;
    for g in &chart.grid {
        println!(
            "foliate: z' = {:+.3}{:+.3}i  E = {:.12}  ‖∇E‖ = {:.3e}",
            g.z_prime.re, g.z_prime.im, g.energy, g.grad_norm
        );
    }
    Ok(pass)
}

fn run_flow(config: &RunConfig) -> Result<bool, RunError> {
    let model = match config.get_str("model", "euclidean").as_str() {
        "euclidean" => ExhaustionModel::EuclideanNormSq { dim: config.get_usize("dim", 2)? },
        other => {
            return Err(ConfigError::InvalidValue {
                key: "model".into(),
                reason: format!("unknown model {other:?} (flow runs on \"euclidean\")"),
            }
            .into())
        }
    };
    let field = match config.get_str("field", "xi").as_str() {
        "xi" => FieldKind::Xi,
        "eta" => FieldKind::Eta,
        other => {
            return Err(ConfigError::InvalidValue {
                key: "field".into(),
                reason: format!("unknown field {other:?}"),
            }
            .into())
        }
    };
    let start_str = config.get_str("start", "1,0;0,0");
    let mut start = Vec::new();
    for part in start_str.split(';') {
        let xy: Vec<&str> = part.split(',').collect();
        if xy.len() != 2 {
            return Err(ConfigError::InvalidValue {
                key: "start".into(),
                reason: "expected re,im pairs separated by ';'".into(),
            }
            .into());
        }
        start.push(Complex64::new(
            config.f64_of("start", xy[0])?,
            config.f64_of("start", xy[1])?,
        ));
    }
    let t_end = config.get_f64("t-end", 1.0)?;
    let step = config.get_f64("step", 1e-3)?;
    let trace = flow(&model, &start, field, t_end, step)?;

    // Verify the defining flow identities along the trace.
    let tau0 = trace.samples[0].tau;
    let pass = match field {
        FieldKind::Xi => trace
            .samples
            .iter()
            .all(|s| (s.tau - s.time.exp() * tau0).abs() <= tol::FLOW_EXACTNESS * s.time.exp() * tau0),
        FieldKind::Eta => {
            trace.samples.iter().all(|s| (s.tau - tau0).abs() <= tol::FLOW_EXACTNESS * tau0)
        }
    } && !trace.truncated;
    write_bytes_atomic(&default_out(config), flow_trace_csv(&trace).as_bytes())?;
    println!(
        "flow: {} samples, field {:?}, τ(0) = {:.6}, τ(end) = {:.6}, identities {}",
        trace.samples.len(),
        trace.field,
        tau0,
        trace.samples.last().unwrap().tau,
        if pass { "ok" } else { "VIOLATED" }
    );
    Ok(pass)
}

#[derive(Debug, Deserialize)]
struct ChartDocIn {
    schema: u32,
    model: String,
    n_modes: usize,
    grid_len: usize,
    lambda: [f64; 2],
    grid: Vec<ChartGridEntryIn>,
}

#[derive(Debug, Deserialize)]
struct ChartGridEntryIn {
    z_prime: [f64; 2],
    fourier: FourierIn,
    #[serde(rename = "E")]
    energy: f64,
    grad_norm: f64,
}

#[derive(Debug, Deserialize)]
struct FourierIn {
    components: Vec<Vec<[f64; 2]>>,
}

fn load_chart(path: &Path) -> Result<(FoliationChart, String), RunError> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| RunError::ChartFile(format!("{}: {e}", path.display())))?;
    let doc: ChartDocIn =
        serde_json::from_str(&body).map_err(|e| RunError::ChartFile(e.to_string()))?;
    if doc.schema != crate::report::SCHEMA_VERSION {
        return Err(RunError::ChartFile(format!("unsupported schema {}", doc.schema)));
    }
    let model = HermitianModel::by_name(&doc.model, 2)
        .ok_or_else(|| RunError::ChartFile(format!("unknown model {:?}", doc.model)))?;
    let lambda = Complex64::new(doc.lambda[0], doc.lambda[1]);
    let opts = NewtonOptions { n_modes: doc.n_modes, grid_len: doc.grid_len, ..Default::default() };
    let grid = doc
        .grid
        .into_iter()
        .map(|entry| {
            let fourier: Vec<Vec<Complex64>> = entry
                .fourier
                .components
                .iter()
                .map(|comp| comp.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect();
            let mut disk = BoundaryDisk::from_fourier(fourier, lambda);
            disk.n_modes = doc.n_modes;
            crate::disk::foliation::ChartDisk {
                z_prime: Complex64::new(entry.z_prime[0], entry.z_prime[1]),
                disk,
                energy: entry.energy,
                grad_norm: entry.grad_norm,
            }
        })
        .collect();
    Ok((FoliationChart::from_parts(model, lambda, grid, opts), doc.model))
}

fn run_verify(config: &RunConfig) -> Result<bool, RunError> {
    let chart_path = PathBuf::from(config.get_str("chart", "chart.json"));
    let (chart, model_name) = load_chart(&chart_path)?;
    let mut pass = true;
    let mut reports = ChartReportsDoc::default();

    let boundary = chart.boundary_potential_sup(8)?;
    pass &= boundary <= tol::BOUNDARY_RESIDUAL;
    reports.boundary_potential_sup = Some(boundary);
    let exact = chart.leaf_exactness_sup(&[0.5, 0.9], 8)?;
    pass &= exact <= 1e-10;
    reports.leaf_exactness_sup = Some(exact);

    if config.get_flag("levi") {
        let levi = levi_verify(&chart, &default_levi_samples())?;
        let ok = levi.band_ratio() <= 2.0
            && levi.samples.iter().all(|s| s.restricted > 0.0)
            && levi.samples.iter().all(|s| s.leaf_eigenvalue <= 1e-8);
        pass &= ok;
        println!(
            "verify: levi sign {:+.0}, band [{:.4}, {:.4}], ratio {:.4} — {}",
            levi.sign,
            levi.band.0,
            levi.band.1,
            levi.band_ratio(),
            if ok { "ok" } else { "FAILED" }
        );
        reports.levi = Some(LeviDoc::from_report(&levi));
    }
    if config.get_flag("tangency") {
        let mut docs = Vec::new();
        for entry in &chart.grid {
            let report = tangency_verify(&chart, entry.z_prime)?;
            let ok = report.sup_residual <= tol::TANGENCY_RESIDUAL;
            pass &= ok;
            println!(
                "verify: tangency at z' = {:+.3}{:+.3}i residual {:.3e} — {}",
                entry.z_prime.re,
                entry.z_prime.im,
                report.sup_residual,
                if ok { "ok" } else { "FAILED" }
            );
            docs.push(TangencyDoc::from_report(entry.z_prime, &report));
        }
        reports.tangency = Some(docs);
    }

    let doc = ChartDoc::from_chart(&chart, &model_name, reports);
    write_json_atomic(&default_out(config), &doc)?;
    println!("verify: boundary sup {boundary:.3e}, leaf exactness {exact:.3e}, overall {}", if pass { "ok" } else { "FAILED" });
    Ok(pass)
}
