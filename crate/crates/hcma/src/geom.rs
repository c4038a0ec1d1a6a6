//! Geodesic flow, curvature spectra, and complexified Jacobi frames for
//! real-analytic surface metrics.
//!
//! The built-in metrics are the round sphere, the flat plane, and a Zoll
//! family of surfaces of revolution
//! `g = (1 + f(cos θ))² dθ² + sin²θ dφ²` with odd profile
//! `f(x) = ε·x·(1 − x²)`; every geodesic of every member closes with
//! length 2π. Curvature along a closed geodesic is expanded in Fourier
//! modes, which continue `K∘γ` holomorphically into the strip
//! `|Im z| < w` certified by the observed coefficient decay. The scalar
//! Jacobi equation `Y'' + K(z)Y = 0` is then integrated along complex
//! rays, carrying the fundamental frame `(Y, Y', Z, Z')` and the ratio
//! `a = Z/Y` whose positive imaginary part cuts out the Grauert tube.

use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("rejected input: {0}")]
    RejectedInput(String),
    #[error("trajectory does not close: defect {defect:.3e} exceeds {tol:.1e}")]
    NotClosed { defect: f64, tol: f64 },
    #[error(
        "analyticity certificate too narrow: continuation to τ = {requested:.4} \
         exceeds certified width {certified:.4}"
    )]
    AnalyticityCertificate { requested: f64, certified: f64 },
}

/// Which built-in surface metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    RoundSphere,
    Flat,
    ZollRevolution,
}

/// A real-analytic metric on S² (or the flat model) with curvature
/// evaluable along geodesics. Immutable and freely shareable.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceMetric {
    pub kind: MetricKind,
    /// Amplitude of the odd Zoll profile; 0 reproduces the round sphere.
    pub zoll_eps: f64,
    /// Common geodesic period (2π for all built-ins).
    pub period: f64,
}

impl SurfaceMetric {
    pub fn round_sphere() -> Self {
        SurfaceMetric { kind: MetricKind::RoundSphere, zoll_eps: 0.0, period: TAU }
    }

    pub fn flat() -> Self {
        SurfaceMetric { kind: MetricKind::Flat, zoll_eps: 0.0, period: TAU }
    }

    /// Zoll surface of revolution with profile `f(x) = eps·x·(1 − x²)`.
    pub fn zoll(eps: f64) -> Result<Self, GeomError> {
        // |f| stays below eps·2/(3√3) < 0.39·eps, so the metric is positive
        // for any |eps| < 1; keep a conservative cap.
        if !(0.0..0.9).contains(&eps.abs()) {
            return Err(GeomError::RejectedInput(format!(
                "zoll_eps = {eps} outside the supported range |eps| < 0.9"
            )));
        }
        Ok(SurfaceMetric { kind: MetricKind::ZollRevolution, zoll_eps: eps, period: TAU })
    }

    fn profile(&self, x: f64) -> f64 {
        self.zoll_eps * x * (1.0 - x * x)
    }

    fn profile_deriv(&self, x: f64) -> f64 {
        self.zoll_eps * (1.0 - 3.0 * x * x)
    }

    /// Metric factors (A, B) in `g = A² dθ² + B² dφ²`; (1, 1) for the flat
    /// model in Cartesian coordinates.
    fn factors(&self, theta: f64) -> (f64, f64) {
        match self.kind {
            MetricKind::Flat => (1.0, 1.0),
            MetricKind::RoundSphere => (1.0, theta.sin()),
            MetricKind::ZollRevolution => (1.0 + self.profile(theta.cos()), theta.sin()),
        }
    }

    /// Gauss curvature at a chart position.
    pub fn gauss_curvature(&self, position: [f64; 2]) -> f64 {
        match self.kind {
            MetricKind::Flat => 0.0,
            MetricKind::RoundSphere => 1.0,
            MetricKind::ZollRevolution => {
                let x = position[0].cos();
                let a = 1.0 + self.profile(x);
                (a - x * self.profile_deriv(x)) / (a * a * a)
            }
        }
    }

    /// `g(v, v)` at a state.
    pub fn squared_speed(&self, state: &GeodesicState) -> f64 {
        let (a, b) = self.factors(state.position[0]);
        let [vt, vp] = state.velocity;
        a * a * vt * vt + b * b * vp * vp
    }

    /// Clairaut first integral `B² φ̇` (constant along geodesics of the
    /// revolution metrics; `v_y` for the flat model).
    pub fn clairaut(&self, state: &GeodesicState) -> f64 {
        let (_, b) = self.factors(state.position[0]);
        b * b * state.velocity[1]
    }

    fn is_revolution(&self) -> bool {
        !matches!(self.kind, MetricKind::Flat)
    }
}

/// A point of the unit tangent bundle along a geodesic: chart position,
/// chart velocity, and the arclength parameter σ.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicState {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub arclength: f64,
}

impl GeodesicState {
    /// Unit-speed start on the equator of a revolution metric.
    pub fn equatorial() -> Self {
        GeodesicState {
            position: [std::f64::consts::FRAC_PI_2, 0.0],
            velocity: [0.0, 1.0],
            arclength: 0.0,
        }
    }

    /// Unit-speed azimuthal start at colatitude θ₀: the launch point is a
    /// turning point of the band geodesic, so `K∘γ` is even in σ.
    pub fn turning_point(metric: &SurfaceMetric, theta0: f64) -> Self {
        let (_, b) = metric.factors(theta0);
        GeodesicState { position: [theta0, 0.0], velocity: [0.0, 1.0 / b], arclength: 0.0 }
    }

    /// Straight line in the flat model.
    pub fn line(position: [f64; 2], direction: [f64; 2]) -> Self {
        GeodesicState { position, velocity: direction, arclength: 0.0 }
    }
}

/// Uniformly sampled trajectory of the geodesic flow.
#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub metric: SurfaceMetric,
    pub states: Vec<GeodesicState>,
    pub step: f64,
}

fn geodesic_rhs(metric: &SurfaceMetric, y: &[f64; 4]) -> [f64; 4] {
    if !metric.is_revolution() {
        return [y[2], y[3], 0.0, 0.0];
    }
    let theta = y[0];
    let (st, ct) = theta.sin_cos();
    let x = ct;
    let a = 1.0 + metric.profile(x);
    // A' = dA/dθ = −sinθ · f'(cosθ); B = sinθ, B' = cosθ.
    let ap = -st * metric.profile_deriv(x);
    let (vt, vp) = (y[2], y[3]);
    let theta_acc = (-a * ap * vt * vt + st * ct * vp * vp) / (a * a);
    let phi_acc = if st.abs() < 1e-14 { 0.0 } else { -2.0 * (ct / st) * vt * vp };
    [vt, vp, theta_acc, phi_acc]
}

fn rk4_geodesic(metric: &SurfaceMetric, y: &[f64; 4], h: f64) -> [f64; 4] {
    let add = |y: &[f64; 4], k: &[f64; 4], s: f64| {
        [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2], y[3] + s * k[3]]
    };
    let k1 = geodesic_rhs(metric, y);
    let k2 = geodesic_rhs(metric, &add(y, &k1, 0.5 * h));
    let k3 = geodesic_rhs(metric, &add(y, &k2, 0.5 * h));
    let k4 = geodesic_rhs(metric, &add(y, &k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        y[3] + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    ]
}

/// Integrate the geodesic flow with a fixed-step 4th-order scheme,
/// sampling at uniform σ. Rejects non-unit initial data and step ≤ 0.
pub fn integrate_geodesic(
    metric: &SurfaceMetric,
    init: &GeodesicState,
    sigma_end: f64,
    step: f64,
) -> Result<GeodesicTrajectory, GeomError> {
    if step <= 0.0 {
        return Err(GeomError::RejectedInput(format!("step = {step} must be positive")));
    }
    let speed_defect = (metric.squared_speed(init) - 1.0).abs();
    if speed_defect > tol::UNIT_SPEED {
        return Err(GeomError::RejectedInput(format!(
            "initial velocity is not unit speed: |g(v,v) − 1| = {speed_defect:.3e}"
        )));
    }
    // Land on sigma_end exactly: round the count, adjust the step.
    let n = (sigma_end / step).round().max(1.0) as usize;
    let h = sigma_end / n as f64;
    let mut y = [init.position[0], init.position[1], init.velocity[0], init.velocity[1]];
    let mut states = Vec::with_capacity(n + 1);
    states.push(*init);
    for i in 0..n {
        y = rk4_geodesic(metric, &y, h);
        states.push(GeodesicState {
            position: [y[0], y[1]],
            velocity: [y[2], y[3]],
            arclength: init.arclength + (i as f64 + 1.0) * h,
        });
    }
    Ok(GeodesicTrajectory { metric: *metric, states, step: h })
}

impl GeodesicTrajectory {
    /// Distance in chart + velocity between the final and initial state,
    /// with the azimuthal coordinate compared modulo 2π.
    pub fn closure_defect(&self) -> f64 {
        let first = &self.states[0];
        let last = self.states.last().unwrap();
        let wrap = |d: f64| {
            let r = d.rem_euclid(TAU);
            r.min(TAU - r)
        };
        let dpos = if self.metric.is_revolution() {
            (first.position[0] - last.position[0]).abs() + wrap(last.position[1] - first.position[1])
        } else {
            // Flat model closes on the 2π-torus.
            wrap(last.position[0] - first.position[0]) + wrap(last.position[1] - first.position[1])
        };
        let dvel = (first.velocity[0] - last.velocity[0]).abs()
            + (first.velocity[1] - last.velocity[1]).abs();
        dpos + dvel
    }

    /// Maximal drift of `g(v,v)` from 1 along the samples.
    pub fn speed_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (self.metric.squared_speed(s) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Maximal drift of the Clairaut integral along the samples.
    pub fn clairaut_drift(&self) -> f64 {
        let c0 = self.metric.clairaut(&self.states[0]);
        self.states
            .iter()
            .map(|s| (self.metric.clairaut(s) - c0).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-geodesic trajectory with exactly `samples` uniform intervals per
/// period, integrated with `substeps` sub-intervals each.
pub fn closed_trajectory(
    metric: &SurfaceMetric,
    init: &GeodesicState,
    samples: usize,
    substeps: usize,
) -> Result<GeodesicTrajectory, GeomError> {
    let step = metric.period / (samples * substeps) as f64;
    let full = integrate_geodesic(metric, init, metric.period, step)?;
    let states: Vec<GeodesicState> =
        full.states.iter().step_by(substeps).copied().collect();
    Ok(GeodesicTrajectory { metric: *metric, states, step: step * substeps as f64 })
}

/// Fitted exponential decay of curvature Fourier magnitudes,
/// `|c_k| ≈ C·e^{−s|k|}`; `log_rate = s` is +∞ for band-limited spectra.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub log_rate: f64,
    pub amplitude: f64,
    pub noise_floor: f64,
}

/// Fourier data of `K∘γ` over one period, the spectral continuation of the
/// curvature into the strip.
#[derive(Debug, Clone)]
pub struct CurvatureFourier {
    /// Modes kept above the noise floor, as (k, c_k), sorted by |k|.
    pub modes: Vec<(i64, Complex64)>,
    pub decay: DecayFit,
    pub sample_count: usize,
}

/// Fourier coefficients of the curvature along a closed geodesic.
/// Rejects trajectories that fail to close within tolerance.
pub fn curvature_fourier(
    metric: &SurfaceMetric,
    trajectory: &GeodesicTrajectory,
) -> Result<CurvatureFourier, GeomError> {
    let defect = trajectory.closure_defect();
    if defect > tol::GEODESIC_CLOSURE {
        return Err(GeomError::NotClosed { defect, tol: tol::GEODESIC_CLOSURE });
    }
    let span = trajectory.step * (trajectory.states.len() - 1) as f64;
    if (span - metric.period).abs() > 1e-9 {
        return Err(GeomError::RejectedInput(format!(
            "trajectory spans σ = {span:.6}, not one period {:.6}",
            metric.period
        )));
    }
    // Drop the duplicated endpoint; the remaining samples are uniform.
    let n = trajectory.states.len() - 1;
    let values: Vec<Complex64> = trajectory.states[..n]
        .iter()
        .map(|s| Complex64::new(metric.gauss_curvature(s.position), 0.0))
        .collect();
    let coeffs = crate::disk::spectral::fft_coeffs(&values);

    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
    // Closure/integration defects leave a slowly decaying carpet in the
    // top octave; keep the floor above it so spurious high modes never
    // enter the continuation, where they would be amplified as e^{kτ}.
    let mut top_octave: Vec<f64> =
        (3 * n / 8..n / 2).map(|k| coeffs[k].norm().max(coeffs[n - k].norm())).collect();
    top_octave.sort_by(f64::total_cmp);
    let carpet = top_octave.get(top_octave.len() / 2).copied().unwrap_or(0.0);
    let floor = (1e-13 * scale).max(4.0 * carpet);
    let mut modes = vec![(0i64, coeffs[0])];
    let mut mags = Vec::new();
    for k in 1..n / 2 {
        let (cp, cm) = (coeffs[k], coeffs[n - k]);
        let m = cp.norm().max(cm.norm());
        mags.push((k as f64, m));
        if m > floor {
            modes.push((k as i64, cp));
            modes.push((-(k as i64), cm));
        }
    }
    modes.sort_by_key(|(k, _)| k.abs());

    // Least-squares fit of ln|c_k| against k over the resolved range.
    let resolved: Vec<(f64, f64)> =
        mags.iter().filter(|(_, m)| *m > floor * 10.0).map(|&(k, m)| (k, m.ln())).collect();
    let decay = if resolved.len() < 3 {
        DecayFit { log_rate: f64::INFINITY, amplitude: scale, noise_floor: floor }
    } else {
        let n = resolved.len() as f64;
        let sx: f64 = resolved.iter().map(|(k, _)| k).sum();
        let sy: f64 = resolved.iter().map(|(_, l)| l).sum();
        let sxx: f64 = resolved.iter().map(|(k, _)| k * k).sum();
        let sxy: f64 = resolved.iter().map(|(k, l)| k * l).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        DecayFit { log_rate: -slope, amplitude: intercept.exp(), noise_floor: floor }
    };

    Ok(CurvatureFourier { modes, decay, sample_count: n })
}

impl CurvatureFourier {
    /// Spectrum assembled directly from signed modes (trig-polynomial
    /// coefficients are entire, so the fitted width is infinite).
    pub fn from_modes(modes: Vec<(i64, Complex64)>) -> Self {
        let scale = modes.iter().map(|(_, c)| c.norm()).fold(1e-300, f64::max);
        CurvatureFourier {
            sample_count: modes.len(),
            modes,
            decay: DecayFit { log_rate: f64::INFINITY, amplitude: scale, noise_floor: 1e-13 * scale },
        }
    }

    /// Analyticity width of the continued curvature: the strip half-height
    /// certified by the fitted coefficient decay. A finite width bounds the
    /// tube radius from above: across a singularity of `K∘γ` the Jacobi
    /// frame cannot stay holomorphic with unit Wronskian, since
    /// `K = −Y″/Y` would extend through it.
    pub fn width(&self) -> f64 {
        self.decay.log_rate
    }

    /// Evaluate the continued curvature `K(z) = Σ c_k e^{ikz}`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, c) in &self.modes {
            acc += c * (Complex64::i() * (k as f64) * z).exp();
        }
        acc
    }

    /// Largest |Im z| to which the truncated series is certified: beyond the
    /// kept modes the fitted decay bounds the tail by
    /// `C e^{(τ−s)(k_max+1)} / (1 − e^{τ−s}) ≤ tail_tol`.
    pub fn certified_tau(&self, tail_tol: f64) -> f64 {
        if self.decay.log_rate.is_infinite() {
            return f64::INFINITY;
        }
        let k_max = self.modes.iter().map(|(k, _)| k.abs()).max().unwrap_or(0) as f64;
        let s = self.decay.log_rate;
        let c = self.decay.amplitude;
        let tail = |tau: f64| -> f64 {
            let x = tau - s;
            if x >= -1e-9 {
                return f64::INFINITY;
            }
            c * (x * (k_max + 1.0)).exp() / (1.0 - x.exp())
        };
        if tail(0.0) > tail_tol {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, s);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if tail(mid) <= tail_tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Fundamental normal Jacobi solutions and their derivatives at a strip
/// point, with `a = Z/Y`.
#[derive(Debug, Clone, Copy)]
pub struct JacobiFrame {
    pub sigma_tau: Complex64,
    pub y: Complex64,
    pub yp: Complex64,
    pub z: Complex64,
    pub zp: Complex64,
}

impl JacobiFrame {
    /// Frame at σ = 0 with the normalized initial data Y(0)=1, Y'(0)=0,
    /// Z(0)=0, Z'(0)=1.
    pub fn standard() -> Self {
        JacobiFrame {
            sigma_tau: Complex64::new(0.0, 0.0),
            y: Complex64::new(1.0, 0.0),
            yp: Complex64::new(0.0, 0.0),
            z: Complex64::new(0.0, 0.0),
            zp: Complex64::new(1.0, 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.z / self.y
    }

    pub fn wronskian_defect(&self) -> f64 {
        (self.y * self.zp - self.yp * self.z - Complex64::new(1.0, 0.0)).norm()
    }

    /// Wronskian defect relative to the size of the products entering it
    /// (the absolute defect saturates at the f64 floor once the solutions
    /// grow large).
    pub fn wronskian_defect_relative(&self) -> f64 {
        let scale = (self.y * self.zp).norm() + (self.yp * self.z).norm();
        self.wronskian_defect() / scale.max(1.0)
    }

    /// A near-zero of Y off the real axis; diagnostic for a radius breach.
    pub fn pole_flag(&self, threshold: f64) -> bool {
        self.y.norm() < threshold
    }
}

fn jacobi_rhs(curv: &CurvatureFourier, dir: Complex64, z: Complex64, v: &[Complex64; 4]) -> [Complex64; 4] {
    let k = curv.eval(z);
    [dir * v[1], -dir * k * v[0], dir * v[3], -dir * k * v[2]]
}

/// Continue a Jacobi frame along the ray `z(s) = z₀ + s·dir`, |dir| = 1,
/// recording every step (the first entry is the input frame).
pub fn continue_along(
    curv: &CurvatureFourier,
    frame: &JacobiFrame,
    dir: Complex64,
    length: f64,
    step: f64,
) -> Result<Vec<JacobiFrame>, GeomError> {
    if step <= 0.0 || length < 0.0 {
        return Err(GeomError::RejectedInput("step and length must be positive".into()));
    }
    let n = (length / step).round().max(1.0) as usize;
    let h = length / n as f64;
    let mut v = [frame.y, frame.yp, frame.z, frame.zp];
    let mut z = frame.sigma_tau;
    let mut out = Vec::with_capacity(n + 1);
    out.push(*frame);
    let add = |v: &[Complex64; 4], k: &[Complex64; 4], s: f64| {
        [v[0] + s * k[0], v[1] + s * k[1], v[2] + s * k[2], v[3] + s * k[3]]
    };
    for i in 0..n {
        let k1 = jacobi_rhs(curv, dir, z, &v);
        let k2 = jacobi_rhs(curv, dir, z + dir * (0.5 * h), &add(&v, &k1, 0.5 * h));
        let k3 = jacobi_rhs(curv, dir, z + dir * (0.5 * h), &add(&v, &k2, 0.5 * h));
        let k4 = jacobi_rhs(curv, dir, z + dir * h, &add(&v, &k3, h));
        for j in 0..4 {
            v[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        z = frame.sigma_tau + dir * (h * (i as f64 + 1.0));
        out.push(JacobiFrame { sigma_tau: z, y: v[0], yp: v[1], z: v[2], zp: v[3] });
    }
    Ok(out)
}

/// Frame on the real axis at σ, integrated from the standard initial data.
pub fn frame_on_axis(
    curv: &CurvatureFourier,
    sigma: f64,
    step: f64,
) -> Result<JacobiFrame, GeomError> {
    if sigma == 0.0 {
        return Ok(JacobiFrame::standard());
    }
    let dir = Complex64::new(sigma.signum(), 0.0);
    let frames = continue_along(curv, &JacobiFrame::standard(), dir, sigma.abs(), step)?;
    Ok(*frames.last().unwrap())
}

/// Continue a frame vertically to `Im z = Im z₀ + tau_end`. The Fourier
/// decay must certify analyticity of the coefficient up to the target
/// height, otherwise the continuation is refused.
pub fn continue_jacobi(
    curv: &CurvatureFourier,
    frame: &JacobiFrame,
    tau_end: f64,
    step: f64,
) -> Result<Vec<JacobiFrame>, GeomError> {
    let target = frame.sigma_tau.im.abs() + tau_end.abs();
    let certified = curv.certified_tau(tol::CONTINUATION_TAIL);
    if target > certified {
        return Err(GeomError::AnalyticityCertificate { requested: target, certified });
    }
    let dir = Complex64::new(0.0, tau_end.signum());
    continue_along(curv, frame, dir, tau_end.abs(), step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_curv() -> CurvatureFourier {
        let metric = SurfaceMetric::round_sphere();
        let traj = closed_trajectory(&metric, &GeodesicState::equatorial(), 256, 8).unwrap();
        curvature_fourier(&metric, &traj).unwrap()
    }

    #[test]
    fn round_sphere_great_circle_closes() {
        let metric = SurfaceMetric::round_sphere();
        let traj =
            integrate_geodesic(&metric, &GeodesicState::equatorial(), TAU, 1e-3).unwrap();
        assert!(traj.closure_defect() < 1e-9, "defect {}", traj.closure_defect());
        assert!(traj.speed_drift() < 1e-9);
    }

    #[test]
    fn flat_model_straight_line() {
        let metric = SurfaceMetric::flat();
        let init = GeodesicState::line([0.3, -0.1], [0.6, 0.8]);
        let traj = integrate_geodesic(&metric, &init, 5.0, 1e-3).unwrap();
        let last = traj.states.last().unwrap();
        assert!((last.position[0] - (0.3 + 5.0 * 0.6)).abs() < 1e-12);
        assert!((last.position[1] - (-0.1 + 5.0 * 0.8)).abs() < 1e-12);
        assert_eq!(last.velocity, init.velocity);
    }

    #[test]
    fn rejects_bad_inputs() {
        let metric = SurfaceMetric::round_sphere();
        let mut bad = GeodesicState::equatorial();
        bad.velocity = [0.0, 1.5];
        assert!(matches!(
            integrate_geodesic(&metric, &bad, 1.0, 1e-3),
            Err(GeomError::RejectedInput(_))
        ));
        assert!(matches!(
            integrate_geodesic(&metric, &GeodesicState::equatorial(), 1.0, -1e-3),
            Err(GeomError::RejectedInput(_))
        ));
    }

    #[test]
    fn zoll_closes_with_integrator_order() {
        // Closure defect must vanish with the integrator order under
        // step halving; the defect at step 1e-4 stays below 1e-7.
        let metric = SurfaceMetric::zoll(0.3).unwrap();
        let init = GeodesicState::turning_point(&metric, 1.1);
        let defect = |step: f64| {
            integrate_geodesic(&metric, &init, TAU, step).unwrap().closure_defect()
        };
        let d4 = defect(1e-4);
        assert!(d4 <= 1e-7, "closure defect {d4:.3e} at step 1e-4");
        // Richardson check at coarse steps where truncation still dominates
        // roundoff: halving the step should cut the defect by roughly 2^4.
        let (c1, c2) = (defect(2e-2), defect(1e-2));
        let order = (c1 / c2).log2();
        assert!(order > 3.0, "observed order {order:.2} (defects {c1:.3e}, {c2:.3e})");
    }

    #[test]
    fn zoll_conserves_clairaut() {
        let metric = SurfaceMetric::zoll(0.3).unwrap();
        let init = GeodesicState::turning_point(&metric, 0.9);
        let traj = integrate_geodesic(&metric, &init, TAU, 1e-3).unwrap();
        assert!(traj.clairaut_drift() < 1e-9, "drift {}", traj.clairaut_drift());
    }

    #[test]
    fn round_sphere_curvature_is_dc() {
        let curv = round_curv();
        assert!((curv.eval(Complex64::new(0.4, 0.0)) - 1.0).norm() < 1e-12);
        for &(k, c) in &curv.modes {
            if k != 0 {
                assert!(c.norm() < 1e-12, "mode {k} has |c| = {}", c.norm());
            }
        }
        assert!((curv.modes[0].1 - 1.0).norm() < 1e-12);
        assert!(curv.certified_tau(tol::CONTINUATION_TAIL).is_infinite());
    }

    #[test]
    fn flat_curvature_vanishes() {
        let metric = SurfaceMetric::flat();
        let traj =
            closed_trajectory(&metric, &GeodesicState::line([0.0, 0.0], [1.0, 0.0]), 128, 8)
                .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        for &(_, c) in &curv.modes {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn zoll_coefficients_real_symmetric_with_exponential_decay() {
        let metric = SurfaceMetric::zoll(0.3).unwrap();
        let traj =
            closed_trajectory(&metric, &GeodesicState::turning_point(&metric, 1.0), 512, 4)
                .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        for &(k, c) in &curv.modes {
            assert!(c.im.abs() < 1e-10, "mode {k} not real: {c}");
            let paired = curv.modes.iter().find(|(kk, _)| *kk == -k).unwrap().1;
            assert!((c - paired).norm() < 1e-10, "asymmetric mode {k}");
        }
        let fit = curv.decay;
        assert!(
            fit.log_rate.is_finite() && fit.log_rate > 0.0,
            "expected exponential decay, got rate {}",
            fit.log_rate
        );
    }

    #[test]
    fn curvature_fourier_rejects_open_arcs() {
        let metric = SurfaceMetric::zoll(0.3).unwrap();
        let init = GeodesicState::turning_point(&metric, 1.0);
        let arc = integrate_geodesic(&metric, &init, 3.0, 3.0 / 256.0).unwrap();
        assert!(curvature_fourier(&metric, &arc).is_err());
    }

    #[test]
    fn round_sphere_ratio_matches_tangent_at_i() {
        // Constant curvature: Y = cos z, Z = sin z, a = tan z.
        let curv = round_curv();
        let frames =
            continue_jacobi(&curv, &JacobiFrame::standard(), 1.0, 1e-3).unwrap();
        let a = frames.last().unwrap().a();
        let expect = Complex64::new(0.0, 1.0_f64.tanh());
        assert!((a - expect).norm() < 1e-9, "a(i) = {a}, expected {expect}");
        for f in &frames {
            assert!(f.wronskian_defect() < tol::WRONSKIAN);
        }
    }

    #[test]
    fn flat_ratio_is_the_coordinate() {
        let metric = SurfaceMetric::flat();
        let traj =
            closed_trajectory(&metric, &GeodesicState::line([0.0, 0.0], [1.0, 0.0]), 128, 8)
                .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        for &sigma in &[0.0, 0.7, 2.5] {
            let frame = frame_on_axis(&curv, sigma, 1e-3).unwrap();
            let frames = continue_jacobi(&curv, &frame, 1.3, 1e-3).unwrap();
            let top = frames.last().unwrap();
            let expect = Complex64::new(sigma, 1.3);
            assert!((top.a() - expect).norm() < 1e-10);
            assert!((top.a().im - 1.3).abs() < 1e-10);
        }
    }

    #[test]
    fn axis_pole_is_finite_nearby() {
        // tan has a pole at σ = π/2 on the axis; just short of it the ratio
        // is large, positive, and finite.
        let curv = round_curv();
        let sigma = std::f64::consts::FRAC_PI_2 - 0.01;
        let frame = frame_on_axis(&curv, sigma, 1e-4).unwrap();
        let a = frame.a();
        assert!(a.im.abs() < 1e-8);
        let expect = sigma.tan();
        assert!((a.re - expect).abs() / expect < 1e-8, "a = {a}, tan = {expect}");
    }

    #[test]
    fn staircase_paths_agree() {
        // Holomorphic coefficients make the continuation path independent:
        // right-then-up equals up-then-right.
        let metric = SurfaceMetric::zoll(0.2).unwrap();
        let traj =
            closed_trajectory(&metric, &GeodesicState::turning_point(&metric, 1.0), 512, 4)
                .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        let (sigma, tau) = (0.8, 0.6);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();

        let right = continue_along(&curv, &JacobiFrame::standard(), one, sigma, 1e-3).unwrap();
        let up = continue_along(&curv, right.last().unwrap(), i, tau, 1e-3).unwrap();
        let path_a = *up.last().unwrap();

        let up2 = continue_along(&curv, &JacobiFrame::standard(), i, tau, 1e-3).unwrap();
        let right2 = continue_along(&curv, up2.last().unwrap(), one, sigma, 1e-3).unwrap();
        let path_b = *right2.last().unwrap();

        assert!((path_a.a() - path_b.a()).norm() < 1e-8);
        assert!(path_a.wronskian_defect() < tol::WRONSKIAN);
        assert!(path_b.wronskian_defect() < tol::WRONSKIAN);
    }

    #[test]
    fn conjugate_symmetry_down_the_strip() {
        // Real coefficients on the axis give a(σ − iτ) = conj(a(σ + iτ)).
        let metric = SurfaceMetric::zoll(0.3).unwrap();
        let traj =
            closed_trajectory(&metric, &GeodesicState::turning_point(&metric, 1.0), 512, 4)
                .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        let tau = 0.9 * curv.certified_tau(tol::CONTINUATION_TAIL);
        assert!(tau > 0.1, "certified region too thin: {tau}");
        let frame = frame_on_axis(&curv, 0.5, 1e-3).unwrap();
        let up = continue_jacobi(&curv, &frame, tau, 1e-3).unwrap();
        let down = continue_jacobi(&curv, &frame, -tau, 1e-3).unwrap();
        let a_up = up.last().unwrap().a();
        let a_down = down.last().unwrap().a();
        assert!((a_down - a_up.conj()).norm() < 1e-8);
    }

    #[test]
    fn zoll_ratio_converges_to_round_linearly() {
        // a-grids for the Zoll family approach the round grid at a rate
        // linear in the profile amplitude.
        let grid_err = |eps: f64| -> f64 {
            let metric = SurfaceMetric::zoll(eps).unwrap();
            let traj =
                closed_trajectory(&metric, &GeodesicState::turning_point(&metric, 1.2), 512, 4)
                    .unwrap();
            let curv = curvature_fourier(&metric, &traj).unwrap();
            let mut worst = 0.0f64;
            for &sigma in &[0.0, 0.9, 1.9] {
                let frame = frame_on_axis(&curv, sigma, 2e-3).unwrap();
                let frames = continue_jacobi(&curv, &frame, 0.35, 2e-3).unwrap();
                // Round reference on the same geodesic grid is tan(σ+iτ).
                for f in frames.iter().step_by(30) {
                    let diff = (f.a() - f.sigma_tau.tan()).norm();
                    worst = worst.max(diff);
                }
            }
            worst
        };
        let (e1, e2) = (grid_err(0.05), grid_err(0.1));
        let ratio = e2 / e1;
        assert!(
            (1.4..2.8).contains(&ratio),
            "expected roughly linear scaling, got {e1:.3e} -> {e2:.3e} (ratio {ratio:.2})"
        );
    }

    #[test]
    fn certificate_refuses_deep_continuation() {
        let metric = SurfaceMetric::zoll(0.3).unwrap();
        let traj =
            closed_trajectory(&metric, &GeodesicState::turning_point(&metric, 1.0), 512, 4)
                .unwrap();
        let curv = curvature_fourier(&metric, &traj).unwrap();
        let certified = curv.certified_tau(tol::CONTINUATION_TAIL);
        assert!(certified.is_finite() && certified > 0.1, "certified width {certified}");
        assert!(curv.width() > certified, "width {} vs certified {certified}", curv.width());
        let too_deep = certified + 1.0;
        assert!(matches!(
            continue_jacobi(&curv, &JacobiFrame::standard(), too_deep, 1e-3),
            Err(GeomError::AnalyticityCertificate { .. })
        ));
    }
}
