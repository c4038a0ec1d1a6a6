//! Adapted complex structure, tube-radius estimation, entirety detection,
//! and Kähler-potential diagnostics.
//!
//! The adapted structure acts on the parallel frame (ξ, η) by
//! `Jξ = e(η − Re a · ξ)` with `e = 1/Im a`; it exists exactly where
//! `Im a > 0`, and the supremum of certified heights is the Grauert tube
//! radius. A breach of positivity along any sampled geodesic bounds the
//! radius; absence of breaches together with decay of the σ-oscillation
//! of `a` at the top of the scan (extension across the puncture of the
//! leaf) is the numerical entirety criterion.

use num_complex::Complex64;
use thiserror::Error;

use crate::geom::{
    closed_trajectory, continue_jacobi, curvature_fourier, frame_on_axis, CurvatureFourier,
    GeodesicState, GeomError, JacobiFrame, MetricKind, SurfaceMetric,
};
use crate::tol;

#[derive(Debug, Error)]
pub enum TubeError {
    #[error("outside the tube at {sigma_tau}: Im a = {im_a:.3e} ≤ 0")]
    OutsideTube { sigma_tau: Complex64, im_a: f64 },
    #[error("grid too coarse: {0} σ-samples (need at least 16)")]
    GridTooCoarse(usize),
    #[error("energy must be nonnegative, got {0}")]
    NegativeEnergy(f64),
    #[error("rejected input: {0}")]
    RejectedInput(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// The adapted complex structure at one strip point, in the parallel
/// frame (ξ, η).
#[derive(Debug, Clone, Copy)]
pub struct AdaptedJ {
    pub at: Complex64,
    pub re_a: f64,
    pub im_a: f64,
    /// `e = 1/Im a`.
    pub e: f64,
    /// Matrix of J on (ξ, η): first column is Jξ, second Jη.
    pub j_matrix: [[f64; 2]; 2],
}

impl AdaptedJ {
    /// `‖J² + I‖` (max entry) — an algebraic identity of the construction.
    pub fn j_squared_defect(&self) -> f64 {
        let m = &self.j_matrix;
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += m[r][k] * m[k][c];
                }
                let expect = if r == c { -1.0 } else { 0.0 };
                worst = worst.max((acc - expect).abs());
            }
        }
        worst
    }
}

/// Build the adapted structure from a Jacobi frame; rejects points outside
/// the tube (`Im a ≤ 0`).
pub fn adapted_structure(frame: &JacobiFrame) -> Result<AdaptedJ, TubeError> {
    let a = frame.a();
    if a.im <= 0.0 {
        return Err(TubeError::OutsideTube { sigma_tau: frame.sigma_tau, im_a: a.im });
    }
    let e = 1.0 / a.im;
    // Jξ = e(η − Re a · ξ); Jη follows from J² = −I.
    let j_matrix = [
        [-e * a.re, -(1.0 / e + e * a.re * a.re)],
        [e, e * a.re],
    ];
    Ok(AdaptedJ { at: frame.sigma_tau, re_a: a.re, im_a: a.im, e, j_matrix })
}

/// Result of a tube-radius scan.
#[derive(Debug, Clone)]
pub struct TubeReport {
    /// Infimum over sampled geodesics of the first positivity breach (or
    /// the scan ceiling when none was found).
    pub radius_estimate: f64,
    /// No breach up to the ceiling and the compactification test accepts.
    pub entire_flag: bool,
    /// Extrapolated value of `a` at the puncture when entire.
    pub limit_value: Option<Complex64>,
    /// (geodesic index, breach τ) pairs.
    pub per_geodesic_breach: Vec<(usize, f64)>,
}

/// Scan configuration.
#[derive(Debug, Clone, Copy)]
pub struct TubeScanConfig {
    /// σ-samples per geodesic.
    pub sigma_samples: usize,
    /// Integration step along the axis and up the strip.
    pub step: f64,
    /// Curvature samples per period.
    pub curvature_samples: usize,
    /// Integrator substeps per curvature sample (keeps the closure defect
    /// near roundoff so the spectrum has no spurious tail).
    pub curvature_substeps: usize,
    pub pole_threshold: f64,
}

impl Default for TubeScanConfig {
    fn default() -> Self {
        TubeScanConfig {
            sigma_samples: 16,
            step: 1e-3,
            curvature_samples: 512,
            curvature_substeps: 16,
            pole_threshold: tol::POLE_THRESHOLD,
        }
    }
}

/// Values of `a` on a (σ, τ) grid along one geodesic.
#[derive(Debug, Clone)]
pub struct AGrid {
    pub sigmas: Vec<f64>,
    pub taus: Vec<f64>,
    /// `values[i][j] = a(σ_i + i·τ_j)`.
    pub values: Vec<Vec<Complex64>>,
}

/// Sample initial states: band geodesics launched at their turning
/// colatitudes for the revolution metrics, straight lines for the flat
/// model.
pub fn sample_geodesics(metric: &SurfaceMetric, n: usize) -> Vec<GeodesicState> {
    match metric.kind {
        // Flat curvature vanishes identically; sample parallel closed lines
        // of the 2π-torus.
        MetricKind::Flat => (0..n)
            .map(|j| {
                let offset = std::f64::consts::TAU * j as f64 / n.max(1) as f64;
                GeodesicState::line([0.0, offset], [1.0, 0.0])
            })
            .collect(),
        _ => (1..=n)
            .map(|j| {
                let theta0 = std::f64::consts::FRAC_PI_2 * j as f64 / n as f64;
                GeodesicState::turning_point(metric, theta0)
            })
            .collect(),
    }
}

/// First `Im a ≤ 0` crossing (or near-zero of Y off the axis) along the
/// vertical line at σ, bisected to [`tol::BREACH_BISECTION`]. `None` when
/// positivity holds up to `tau_top`.
pub fn first_positivity_breach(
    curv: &CurvatureFourier,
    sigma: f64,
    tau_top: f64,
    config: &TubeScanConfig,
) -> Result<Option<f64>, TubeError> {
    let axis = frame_on_axis(curv, sigma, config.step)?;
    let frames = continue_jacobi(curv, &axis, tau_top, config.step)?;
    let mut hit: Option<(f64, f64)> = None;
    for pair in frames.windows(2) {
        let f = &pair[1];
        if f.wronskian_defect_relative() > tol::WRONSKIAN {
            return Err(TubeError::RejectedInput(format!(
                "Wronskian drift {:.3e} at {}",
                f.wronskian_defect_relative(),
                f.sigma_tau
            )));
        }
        if f.pole_flag(config.pole_threshold) || f.a().im <= 0.0 {
            hit = Some((pair[0].sigma_tau.im, f.sigma_tau.im));
            break;
        }
    }
    let Some((mut lo, mut hi)) = hit else { return Ok(None) };
    while hi - lo > tol::BREACH_BISECTION {
        let mid = 0.5 * (lo + hi);
        let probe = continue_jacobi(curv, &axis, mid, config.step)?;
        let f = probe.last().unwrap();
        if f.pole_flag(config.pole_threshold) || f.a().im <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

struct GeodesicScan {
    breach: Option<f64>,
    grid: AGrid,
}

/// Positivity scan plus the a-grid for the compactification check along
/// one geodesic.
fn scan_geodesic(
    curv: &CurvatureFourier,
    period: f64,
    tau_top: f64,
    config: &TubeScanConfig,
) -> Result<GeodesicScan, TubeError> {
    let sigmas: Vec<f64> = (0..config.sigma_samples)
        .map(|i| period * i as f64 / config.sigma_samples as f64)
        .collect();
    let tau_checkpoints = 12usize;
    let taus: Vec<f64> =
        (1..=tau_checkpoints).map(|m| tau_top * m as f64 / tau_checkpoints as f64).collect();

    let mut values = Vec::with_capacity(sigmas.len());
    let mut breach: Option<f64> = None;

    for &sigma in &sigmas {
        if let Some(b) = first_positivity_breach(curv, sigma, tau_top, config)? {
            breach = Some(breach.map_or(b, |prev: f64| prev.min(b)));
        }
        let axis = frame_on_axis(curv, sigma, config.step)?;
        let frames = continue_jacobi(curv, &axis, tau_top, config.step)?;
        let mut row = Vec::with_capacity(taus.len());
        let steps_per = frames.len() - 1;
        for &tau in &taus {
            let idx = ((tau / tau_top) * steps_per as f64).round() as usize;
            row.push(frames[idx.min(steps_per)].a());
        }
        values.push(row);
    }

    Ok(GeodesicScan { breach, grid: AGrid { sigmas, taus, values } })
}

/// Estimate the tube radius of a metric by scanning `n_geodesics` sampled
/// geodesics up to `tau_ceiling`.
///
/// Two mechanisms bound the radius along a geodesic. A positivity breach
/// (`Im a ≤ 0`, bisected) inside the certified evaluation region bounds it
/// directly. Short of that, a finite analyticity width of `K∘γ` bounds it
/// too: across a coefficient singularity at height w the Jacobi frame
/// cannot extend holomorphically with unit Wronskian (the ratio `−Y″/Y`
/// would continue `K` through it), so the adapted structure stops at or
/// below w and the scan records a breach at w. Only when the curvature
/// continues entirely (constant along the geodesic, width ∞) does the scan
/// reach the ceiling, and entirety additionally requires the
/// compactification test to accept on every geodesic.
pub fn tube_radius(
    metric: &SurfaceMetric,
    n_geodesics: usize,
    tau_ceiling: f64,
    config: &TubeScanConfig,
) -> Result<TubeReport, TubeError> {
    if n_geodesics == 0 {
        return Err(TubeError::RejectedInput("need at least one geodesic".into()));
    }
    if tau_ceiling <= 0.0 {
        return Err(TubeError::RejectedInput("tau_ceiling must be positive".into()));
    }
    let inits = sample_geodesics(metric, n_geodesics);
    let mut breaches = Vec::new();
    let mut limits = Vec::new();
    let mut all_extend = true;
    let mut radius = tau_ceiling;

    for (idx, init) in inits.iter().enumerate() {
        // Chart velocities scale like 1/sin θ on near-polar bands; keep the
        // local truncation error uniform by scaling the substep count.
        let vscale = init.velocity[0].abs().max(init.velocity[1].abs()).max(1.0);
        let substeps = (config.curvature_substeps as f64 * vscale).ceil() as usize;
        let traj = closed_trajectory(metric, init, config.curvature_samples, substeps)?;
        let curv = curvature_fourier(metric, &traj)?;
        let width = curv.width();
        let certified = curv.certified_tau(tol::CONTINUATION_TAIL);
        let tau_top = tau_ceiling.min(certified * 0.98);
        let scan = scan_geodesic(&curv, metric.period, tau_top, config)?;
        let bound = match scan.breach {
            Some(b) => Some(b),
            None if width <= tau_ceiling => Some(width),
            None => None,
        };
        match bound {
            Some(b) => {
                breaches.push((idx, b));
                radius = radius.min(b);
            }
            None => {
                if let Ok((extends, limit)) = compactification_check(&scan.grid) {
                    if extends {
                        limits.push(limit);
                    } else {
                        all_extend = false;
                    }
                } else {
                    all_extend = false;
                }
            }
        }
    }

    let entire = breaches.is_empty() && all_extend && !limits.is_empty();
    let limit_value = if entire {
        Some(limits.iter().sum::<Complex64>() / limits.len() as f64)
    } else {
        None
    };
    Ok(TubeReport {
        radius_estimate: radius,
        entire_flag: entire,
        limit_value,
        per_geodesic_breach: breaches,
    })
}

/// Extension across the puncture: the σ-oscillation of `a` must collapse
/// at the top of the scan and the circle means must be Cauchy in τ.
/// Returns `(extends, extrapolated limit)`.
pub fn compactification_check(grid: &AGrid) -> Result<(bool, Complex64), TubeError> {
    if grid.sigmas.len() < 16 {
        return Err(TubeError::GridTooCoarse(grid.sigmas.len()));
    }
    for row in &grid.values {
        for a in row {
            if a.im <= 0.0 {
                return Err(TubeError::OutsideTube {
                    sigma_tau: Complex64::new(f64::NAN, f64::NAN),
                    im_a: a.im,
                });
            }
        }
    }
    let n_tau = grid.taus.len();
    let mean_at = |j: usize| -> Complex64 {
        grid.values.iter().map(|row| row[j]).sum::<Complex64>() / grid.values.len() as f64
    };
    let top_mean = mean_at(n_tau - 1);
    let osc = grid
        .values
        .iter()
        .map(|row| (row[n_tau - 1] - top_mean).norm())
        .fold(0.0, f64::max);
    let cauchy = if n_tau >= 3 {
        let (m2, m1, m0) = (mean_at(n_tau - 3), mean_at(n_tau - 2), mean_at(n_tau - 1));
        let (d1, d0) = ((m1 - m2).norm(), (m0 - m1).norm());
        d0 <= d1 + tol::COMPACTIFICATION_OSC && d0 <= tol::COMPACTIFICATION_OSC
    } else {
        true
    };
    Ok((osc <= tol::COMPACTIFICATION_OSC && cauchy, top_mean))
}

/// Kähler-potential diagnostics at energy E on the tangent bundle.
#[derive(Debug, Clone, Copy)]
pub struct PotentialDiagnostics {
    pub e_energy: f64,
    /// `u = √E`, the HCMA solution away from the zero section.
    pub u: f64,
    /// `ρ = log(1 + cosh 2√(2E))`, the potential that compactifies.
    pub rho_pot: f64,
    /// `ω(ξ_j, η_j) = sinh 2√(2E)/(1 + cosh 2√(2E))` → 1 as E → ∞.
    pub omega_pair: f64,
}

pub fn potential_diagnostics(e_energy: f64) -> Result<PotentialDiagnostics, TubeError> {
    if e_energy < 0.0 {
        return Err(TubeError::NegativeEnergy(e_energy));
    }
    let x = 2.0 * (2.0 * e_energy).sqrt();
    Ok(PotentialDiagnostics {
        e_energy,
        u: e_energy.sqrt(),
        rho_pot: (1.0 + x.cosh()).ln(),
        omega_pair: x.sinh() / (1.0 + x.cosh()),
    })
}

/// Discrete Laplacian residual of the leaf pullback `u∘ψ_γ = |τ|/√2` at
/// height τ ≠ 0 (harmonicity of √E along leaves off the zero section).
pub fn leaf_harmonicity_residual(tau: f64, h: f64) -> f64 {
    let u = |t: f64| t.abs() / std::f64::consts::SQRT_2;
    // The pullback is σ-independent, so the σ-part of the Laplacian drops.
    ((u(tau + h) - 2.0 * u(tau) + u(tau - h)) / (h * h)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom;

    fn round_curv() -> CurvatureFourier {
        let metric = SurfaceMetric::round_sphere();
        let traj = closed_trajectory(&metric, &GeodesicState::equatorial(), 256, 8).unwrap();
        curvature_fourier(&metric, &traj).unwrap()
    }

    #[test]
    fn adapted_structure_on_the_round_sphere_at_i() {
        let curv = round_curv();
        let frames = continue_jacobi(&curv, &JacobiFrame::standard(), 1.0, 1e-3).unwrap();
        let j = adapted_structure(frames.last().unwrap()).unwrap();
        // a(i) = i·tanh 1: Re a = 0, e = coth 1, Jξ = e·η.
        assert!(j.re_a.abs() < 1e-9);
        let coth1 = 1.0 / 1.0f64.tanh();
        assert!((j.e - coth1).abs() < 1e-8, "e = {} (coth 1 = {coth1})", j.e);
        assert!((j.j_matrix[1][0] - coth1).abs() < 1e-8);
        assert!(j.j_matrix[0][0].abs() < 1e-9);
        assert!(j.j_squared_defect() <= tol::J_SQUARED);
    }

    #[test]
    fn adapted_structure_flat_at_i_swaps_the_frame() {
        let metric = SurfaceMetric::flat();
        let traj = closed_trajectory(&metric, &GeodesicState::line([0.0, 0.0], [1.0, 0.0]), 128, 8)
            .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        let frames = continue_jacobi(&curv, &JacobiFrame::standard(), 1.0, 1e-3).unwrap();
        let j = adapted_structure(frames.last().unwrap()).unwrap();
        assert!((j.e - 1.0).abs() < 1e-10 && j.re_a.abs() < 1e-10);
        assert!((j.j_matrix[1][0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn adapted_structure_squares_to_minus_identity_across_the_strip() {
        let metric = SurfaceMetric::zoll(0.25).unwrap();
        let traj = closed_trajectory(&metric, &GeodesicState::turning_point(&metric, 1.0), 512, 4)
            .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        let tau_top = 0.95 * curv.certified_tau(tol::CONTINUATION_TAIL);
        let mut checked = 0usize;
        for i in 0..25 {
            let sigma = metric.period * i as f64 / 25.0;
            let axis = frame_on_axis(&curv, sigma, 1e-3).unwrap();
            let frames = continue_jacobi(&curv, &axis, tau_top, 1e-3).unwrap();
            for f in frames.iter().skip(5).step_by(3) {
                if let Ok(j) = adapted_structure(f) {
                    assert!(j.j_squared_defect() <= tol::J_SQUARED);
                    assert!(j.e > 0.0);
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000, "only {checked} samples checked");
    }

    #[test]
    fn rejects_points_outside_the_tube() {
        let frame = JacobiFrame {
            sigma_tau: Complex64::new(0.0, 0.5),
            y: Complex64::new(1.0, 0.0),
            yp: Complex64::new(0.0, 0.0),
            z: Complex64::new(0.3, -0.2),
            zp: Complex64::new(1.0, 0.0),
        };
        assert!(matches!(adapted_structure(&frame), Err(TubeError::OutsideTube { .. })));
    }

    #[test]
    fn round_sphere_scan_is_entire_with_limit_i() {
        let metric = SurfaceMetric::round_sphere();
        let config = TubeScanConfig { step: 4e-3, ..Default::default() };
        let report = tube_radius(&metric, 4, 6.0, &config).unwrap();
        assert!(report.per_geodesic_breach.is_empty());
        assert!(report.entire_flag);
        assert!((report.radius_estimate - 6.0).abs() < 1e-12);
        let limit = report.limit_value.unwrap();
        assert!((limit - Complex64::i()).norm() < 1e-6, "limit {limit}");
    }

    #[test]
    fn flat_scan_never_breaches_but_fails_the_sphere_criterion() {
        // Im a = τ > 0 everywhere, yet a = σ + iτ keeps full σ-oscillation
        // at the top: no compactified-cylinder extension, so the
        // sphere-type entirety flag stays off.
        let metric = SurfaceMetric::flat();
        let config = TubeScanConfig { step: 4e-3, ..Default::default() };
        let report = tube_radius(&metric, 3, 6.0, &config).unwrap();
        assert!(report.per_geodesic_breach.is_empty());
        assert!(!report.entire_flag);
        assert!(report.limit_value.is_none());
    }

    #[test]
    fn compactification_examples() {
        let sigmas: Vec<f64> = (0..32).map(|i| i as f64 * 0.2).collect();
        let taus = vec![4.0, 5.0, 6.0];
        let constant = AGrid {
            sigmas: sigmas.clone(),
            taus: taus.clone(),
            values: vec![vec![Complex64::i(); 3]; 32],
        };
        let (extends, limit) = compactification_check(&constant).unwrap();
        assert!(extends);
        assert!((limit - Complex64::i()).norm() < 1e-15);

        let coarse = AGrid {
            sigmas: sigmas[..8].to_vec(),
            taus,
            values: vec![vec![Complex64::i(); 3]; 8],
        };
        assert!(matches!(compactification_check(&coarse), Err(TubeError::GridTooCoarse(8))));
    }

    #[test]
    fn potential_diagnostics_values() {
        let d = potential_diagnostics(0.0).unwrap();
        assert!((d.rho_pot - 2.0f64.ln()).abs() < 1e-15);
        assert!(d.omega_pair.abs() < 1e-15);

        let d = potential_diagnostics(50.0).unwrap();
        assert!(d.omega_pair >= 0.999, "ω = {}", d.omega_pair);

        let d = potential_diagnostics(0.125).unwrap();
        assert!((d.u - 0.35355339059327373).abs() < 1e-15);

        assert!(matches!(potential_diagnostics(-1.0), Err(TubeError::NegativeEnergy(_))));
    }

    #[test]
    fn omega_pair_is_monotone_and_bounded() {
        let mut prev = 0.0;
        for i in 1..200 {
            let e = 0.05 * i as f64;
            let d = potential_diagnostics(e).unwrap();
            assert!(d.omega_pair > prev && d.omega_pair < 1.0);
            assert!(d.rho_pot >= 2.0f64.ln());
            prev = d.omega_pair;
        }
    }

    #[test]
    fn leaf_pullback_is_harmonic_off_the_axis() {
        assert!(leaf_harmonicity_residual(0.7, 1e-3) < 1e-9);
        assert!(leaf_harmonicity_residual(-1.2, 1e-3) < 1e-9);
    }

    #[test]
    fn round_ratio_matches_tangent_on_the_acceptance_grid_patch() {
        // Small patch of the σ×τ grid against tan(σ+iτ); the full grid is
        // exercised by the acceptance suite.
        let curv = round_curv();
        for i in [0usize, 40, 96] {
            let sigma = std::f64::consts::TAU * i as f64 / 128.0;
            let axis = frame_on_axis(&curv, sigma, 5e-4).unwrap();
            let frames = continue_jacobi(&curv, &axis, 2.0, 5e-4).unwrap();
            for j in (1..=40).step_by(13) {
                let tau = 0.05 * j as f64;
                let idx = ((tau / 2.0) * (frames.len() - 1) as f64).round() as usize;
                let a = frames[idx].a();
                let expect = Complex64::new(sigma, tau).tan();
                assert!((a - expect).norm() <= 1e-8, "σ={sigma}, τ={tau}: {a} vs {expect}");
            }
        }
    }

    #[test]
    fn zoll_dichotomy_smoke() {
        // A non-round member must report finite radius bounds under the
        // ceiling on its band geodesics.
        let metric = SurfaceMetric::zoll(0.3).unwrap();
        let config = TubeScanConfig { sigma_samples: 8, ..Default::default() };
        let report = tube_radius(&metric, 6, 6.0, &config).unwrap();
        assert!(!report.per_geodesic_breach.is_empty(), "no breach found for eps = 0.3");
        assert!(!report.entire_flag);
        assert!(
            report.radius_estimate < 2.0 && report.radius_estimate > 0.2,
            "radius estimate {}",
            report.radius_estimate
        );
    }

    #[test]
    fn constant_negative_curvature_breaches_at_half_pi() {
        // K ≡ −1 gives Y = cosh z, Z = sinh z, a = tanh z: up the imaginary
        // axis a(iτ) = i·tan τ, so Y has a zero and a a pole at τ = π/2 off
        // the real axis — the pole threshold flags it and bisection pins it.
        let curv = CurvatureFourier::from_modes(vec![(0, Complex64::new(-1.0, 0.0))]);
        assert!(curv.width().is_infinite());
        let config = TubeScanConfig::default();
        let frames =
            continue_jacobi(&curv, &JacobiFrame::standard(), 1.2, 1e-3).unwrap();
        let a = frames.last().unwrap().a();
        let expect = Complex64::new(0.0, 1.2f64.tan());
        assert!((a - expect).norm() < 1e-9, "a(1.2i) = {a}, expected {expect}");

        let b = first_positivity_breach(&curv, 0.0, 6.0, &config)
            .unwrap()
            .expect("expected a pole flag below the ceiling");
        assert!(
            (b - std::f64::consts::FRAC_PI_2).abs() <= 2e-6,
            "breach at {b}, expected π/2"
        );
    }

    #[test]
    fn conjugate_symmetry_of_the_ratio() {
        let curv = round_curv();
        let frame = frame_on_axis(&curv, 1.1, 1e-3).unwrap();
        let up = continue_jacobi(&curv, &frame, 0.8, 1e-3).unwrap().last().unwrap().a();
        let down = continue_jacobi(&curv, &frame, -0.8, 1e-3).unwrap().last().unwrap().a();
        assert!((down - up.conj()).norm() < 1e-8);
    }
}
