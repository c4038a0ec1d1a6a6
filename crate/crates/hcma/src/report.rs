//! Machine-readable report documents and atomic file emission.
//!
//! Payloads are deterministic: identical configurations produce
//! byte-identical JSON. Run metadata (wall-clock) goes to a `.meta.json`
//! sidecar, never into the payload.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::disk::foliation::{LeviReport, TangencyReport};
use crate::disk::{BoundaryDisk, FoliationChart};
use crate::tube::TubeReport;

pub const SCHEMA_VERSION: u32 = 1;

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

#[derive(Debug, Serialize)]
pub struct TubeReportDoc {
    pub schema: u32,
    pub radius_estimate: f64,
    pub entire_flag: bool,
    pub limit_value: Option<[f64; 2]>,
    pub per_geodesic_breach: Vec<BreachEntry>,
}

#[derive(Debug, Serialize)]
pub struct BreachEntry {
    pub geodesic: usize,
    pub tau: f64,
}

impl TubeReportDoc {
    pub fn from_report(report: &TubeReport) -> Self {
        TubeReportDoc {
            schema: SCHEMA_VERSION,
            radius_estimate: report.radius_estimate,
            entire_flag: report.entire_flag,
            limit_value: report.limit_value.map(pair),
            per_geodesic_breach: report
                .per_geodesic_breach
                .iter()
                .map(|&(geodesic, tau)| BreachEntry { geodesic, tau })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DiskFourierDoc {
    /// Per-component mode lists, each mode as [re, im]; the last component
    /// is the fiber coordinate.
    pub components: Vec<Vec<[f64; 2]>>,
}

impl DiskFourierDoc {
    pub fn from_disk(disk: &BoundaryDisk) -> Self {
        DiskFourierDoc {
            components: disk
                .fourier
                .iter()
                .map(|c| c.iter().map(|&v| pair(v)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ChartGridEntryDoc {
    pub z_prime: [f64; 2],
    pub fourier: DiskFourierDoc,
    #[serde(rename = "E")]
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Serialize, Default)]
pub struct ChartReportsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levi: Option<LeviDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangency: Option<Vec<TangencyDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_potential_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaf_exactness_sup: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct LeviDoc {
    pub sign: f64,
    pub band: [f64; 2],
    pub samples: Vec<LeviSampleDoc>,
}

#[derive(Debug, Serialize)]
pub struct LeviSampleDoc {
    pub point: [[f64; 2]; 2],
    pub det: f64,
    pub det_scaled: f64,
    pub restricted: f64,
    pub leaf_eigenvalue: f64,
}

impl LeviDoc {
    pub fn from_report(report: &LeviReport) -> Self {
        LeviDoc {
            sign: report.sign,
            band: [report.band.0, report.band.1],
            samples: report
                .samples
                .iter()
                .map(|s| LeviSampleDoc {
                    point: [pair(s.point[0]), pair(s.point[1])],
                    det: s.det,
                    det_scaled: s.det_scaled,
                    restricted: s.restricted,
                    leaf_eigenvalue: s.leaf_eigenvalue,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TangencyDoc {
    pub z_prime: [f64; 2],
    pub sup_residual: f64,
    pub neg_mode_energy_max: f64,
    pub p_rho_oscillation: f64,
    pub scale: f64,
}

impl TangencyDoc {
    pub fn from_report(z_prime: Complex64, report: &TangencyReport) -> Self {
        TangencyDoc {
            z_prime: pair(z_prime),
            sup_residual: report.sup_residual,
            neg_mode_energy_max: report.neg_mode_energy_max,
            p_rho_oscillation: report.p_rho_oscillation,
            scale: report.scale,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ChartDoc {
    pub schema: u32,
    pub model: String,
    pub n_modes: usize,
    pub grid_len: usize,
    pub lambda: [f64; 2],
    pub grid: Vec<ChartGridEntryDoc>,
    pub reports: ChartReportsDoc,
}

impl ChartDoc {
    pub fn from_chart(chart: &FoliationChart, model_name: &str, reports: ChartReportsDoc) -> Self {
        ChartDoc {
            schema: SCHEMA_VERSION,
            model: model_name.to_string(),
            n_modes: chart.opts.n_modes,
            grid_len: chart.opts.grid_len,
            lambda: pair(chart.lambda),
            grid: chart
                .grid
                .iter()
                .map(|g| ChartGridEntryDoc {
                    z_prime: pair(g.z_prime),
                    fourier: DiskFourierDoc::from_disk(&g.disk),
                    energy: g.energy,
                    grad_norm: g.grad_norm,
                })
                .collect(),
            reports,
        }
    }
}

/// Write a JSON document atomically (temp file in the same directory,
/// then rename).
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let body = serde_json::to_vec_pretty(value)?;
    write_bytes_atomic(path, &body)
}

/// Write text atomically.
pub fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Run metadata sidecar (`<out>.meta.json`): wall-clock info lives here so
/// payloads stay byte-reproducible.
pub fn write_meta_sidecar(path: &Path, duration_s: f64) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Meta {
        duration_s: f64,
        tool: &'static str,
        version: &'static str,
    }
    let meta = Meta { duration_s, tool: "hcma", version: env!("CARGO_PKG_VERSION") };
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    write_json_atomic(&path.with_file_name(name), &meta)
}

/// CSV trace of a flow: `t, re/im of each coordinate, tau`.
pub fn flow_trace_csv(trace: &crate::flow::FlowTrace) -> String {
    let dim = trace.samples.first().map(|s| s.point.len()).unwrap_or(0);
    let mut out = String::from("t");
    for i in 1..=dim {
        out.push_str(&format!(",re_z{i},im_z{i}"));
    }
    out.push_str(",tau\n");
    for s in &trace.samples {
        out.push_str(&format!("{:.17e}", s.time));
        for c in &s.point {
            out.push_str(&format!(",{:.17e},{:.17e}", c.re, c.im));
        }
        out.push_str(&format!(",{:.17e}\n", s.tau));
    }
    out
}

/// CSV trace of a boundary loop: `theta, re/im of each component`.
pub fn leaf_trace_csv(disk: &BoundaryDisk, samples: usize) -> String {
    let mut out = String::from("theta");
    for i in 1..=disk.components() {
        out.push_str(&format!(",re_f{i},im_f{i}"));
    }
    out.push('\n');
    for j in 0..samples {
        let theta = std::f64::consts::TAU * j as f64 / samples as f64;
        let values = disk.values_at(Complex64::from_polar(1.0, theta));
        out.push_str(&format!("{theta:.17e}"));
        for c in values {
            out.push_str(&format!(",{:.17e},{:.17e}", c.re, c.im));
        }
        out.push('\n');
    }
    out
}
