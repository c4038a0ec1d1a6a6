//! Complex-gradient flow machinery of a strictly plurisubharmonic
//! exhaustion τ: the type-(1,0) field `Y = Σ τ^{i j̄} τ_{j̄} ∂/∂z^i` with
//! `Yτ = τ`, its real and imaginary flows, leaf uniformization, and the
//! polynomial-growth test for entire functions.
//!
//! Convention fixed once: `ξ = (Y + Ȳ)/2` and `η = (Y − Ȳ)/(2i)`, so on
//! the Euclidean model `τ = ‖z‖²` the ξ-flow is `z ↦ e^{t/2} z` (whence
//! `τ∘ψ_t = e^t τ` exactly) and the η-orbit `z ↦ e^{−is/2} z` closes with
//! period `s₀ = 4π`. All period values are quoted under this convention.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::disk::{DiskError, FoliationChart};
use crate::tol;

const TAU2PI: f64 = std::f64::consts::TAU;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("rejected input: {0}")]
    RejectedInput(String),
    #[error("complex Hessian of τ is numerically singular (cond ≈ {0:.3e})")]
    SingularHessian(f64),
    #[error("η-orbit did not close: {0}")]
    NonPeriodic(String),
    #[error(transparent)]
    Disk(#[from] DiskError),
}

/// A strictly plurisubharmonic exhaustion model.
#[derive(Clone)]
pub enum ExhaustionModel {
    /// `τ = ‖z‖²` on complex n-space.
    EuclideanNormSq { dim: usize },
    /// `τ = e^{u_λ}` with the potential pulled back through a foliation
    /// chart; grows toward the divisor.
    LineBundle { chart: Arc<FoliationChart> },
}

impl std::fmt::Debug for ExhaustionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExhaustionModel::EuclideanNormSq { dim } => write!(f, "EuclideanNormSq(dim={dim})"),
            ExhaustionModel::LineBundle { .. } => write!(f, "LineBundle"),
        }
    }
}

impl ExhaustionModel {
    pub fn dim(&self) -> usize {
        match self {
            ExhaustionModel::EuclideanNormSq { dim } => *dim,
            ExhaustionModel::LineBundle { .. } => 2,
        }
    }

    pub fn tau(&self, z: &[Complex64]) -> Result<f64, FlowError> {
        match self {
            ExhaustionModel::EuclideanNormSq { .. } => {
                Ok(z.iter().map(|c| c.norm_sqr()).sum())
            }
            ExhaustionModel::LineBundle { chart } => Ok(chart.u_lambda(z)?.exp()),
        }
    }

    /// Wirtinger gradient (τ_1, …, τ_n).
    fn tau_gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>, FlowError> {
        match self {
            ExhaustionModel::EuclideanNormSq { .. } => {
                Ok(z.iter().map(|c| c.conj()).collect())
            }
            ExhaustionModel::LineBundle { chart } => {
                // τ = e^u: τ_i = τ·u_i.
                let t = self.tau(z)?;
                let du = chart.u_gradient(z, 1e-4)?;
                Ok(du.iter().map(|&d| t * d).collect())
            }
        }
    }

    /// Mixed complex Hessian `τ_{i j̄}`.
    fn tau_hessian(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>, FlowError> {
        match self {
            ExhaustionModel::EuclideanNormSq { dim } => {
                let mut h = vec![vec![Complex64::new(0.0, 0.0); *dim]; *dim];
                for (i, row) in h.iter_mut().enumerate() {
                    row[i] = Complex64::new(1.0, 0.0);
                }
                Ok(h)
            }
            ExhaustionModel::LineBundle { chart } => {
                // τ_{i j̄} = e^u (u_{i j̄} + u_i u_{j̄}); the evaluator noise
                // floor makes larger Richardson-refined steps the accurate
                // choice for the second derivatives.
                let t = self.tau(z)?;
                let (du, ddu) = chart.u_hessian(z, 3e-3)?;
                let mut h = vec![vec![Complex64::new(0.0, 0.0); 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        h[i][j] = t * (ddu[i][j] + du[i] * du[j].conj());
                    }
                }
                Ok(h)
            }
        }
    }
}

/// The complex gradient at a point, with the Hessian condition estimate.
#[derive(Debug, Clone)]
pub struct ComplexGradient {
    pub y: Vec<Complex64>,
    pub hessian_cond: f64,
}

/// `Y = Σ τ^{i j̄} τ_{j̄} ∂/∂z^i`, the type-(1,0) field with `Yτ = τ`.
pub fn complex_gradient(model: &ExhaustionModel, z: &[Complex64]) -> Result<ComplexGradient, FlowError> {
    let grad = model.tau_gradient(z)?;
    let hess = model.tau_hessian(z)?;
    let n = grad.len();
    // Y solves conj(H)·conj(Y) = grad, i.e. Y = conj(H⁻¹·grad).
    let mut a: Vec<Vec<Complex64>> = hess.clone();
    let mut b = grad.clone();
    let norm_a: f64 = a.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    // Gaussian elimination with partial pivoting (n ≤ 4 in practice).
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        if a[piv][col].norm() < 1e-14 * norm_a.max(1e-300) {
            return Err(FlowError::SingularHessian(f64::INFINITY));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    let y: Vec<Complex64> = x.iter().map(|c| c.conj()).collect();
    // Crude condition estimate from the triangular factor.
    let dmax = (0..n).map(|i| a[i][i].norm()).fold(0.0f64, f64::max);
    let dmin = (0..n).map(|i| a[i][i].norm()).fold(f64::INFINITY, f64::min);
    Ok(ComplexGradient { y, hessian_cond: dmax / dmin })
}

/// Directional-derivative defect `|Yτ − τ|` (relative).
pub fn gradient_identity_defect(model: &ExhaustionModel, z: &[Complex64]) -> Result<f64, FlowError> {
    let t = model.tau(z)?;
    let y = complex_gradient(model, z)?.y;
    let grad = model.tau_gradient(z)?;
    let ytau: Complex64 = y.iter().zip(&grad).map(|(a, b)| a * b).sum();
    Ok((ytau - t).norm() / t.abs().max(1e-300))
}

/// Which real flow of Y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// ξ = (Y + Ȳ)/2: scales τ by e^t.
    Xi,
    /// η = (Y − Ȳ)/(2i): preserves τ.
    Eta,
}

#[derive(Debug, Clone)]
pub struct FlowSample {
    pub time: f64,
    pub point: Vec<Complex64>,
    pub tau: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub samples: Vec<FlowSample>,
    pub field: FieldKind,
    /// Set when the orbit left the evaluable chart before `t_end`.
    pub truncated: bool,
}

fn field_rhs(model: &ExhaustionModel, kind: FieldKind, z: &[Complex64]) -> Result<Vec<Complex64>, FlowError> {
    let y = complex_gradient(model, z)?.y;
    let factor = match kind {
        FieldKind::Xi => Complex64::new(0.5, 0.0),
        FieldKind::Eta => Complex64::new(0.0, -0.5),
    };
    Ok(y.iter().map(|c| factor * c).collect())
}

/// Integrate the ξ- or η-flow from z for time `t_end` (sign allowed) with
/// fixed step.
pub fn flow(
    model: &ExhaustionModel,
    z: &[Complex64],
    kind: FieldKind,
    t_end: f64,
    step: f64,
) -> Result<FlowTrace, FlowError> {
    if step <= 0.0 {
        return Err(FlowError::RejectedInput("step must be positive".into()));
    }
    let n_steps = (t_end.abs() / step).round().max(1.0) as usize;
    let h = t_end / n_steps as f64;
    let mut point = z.to_vec();
    let mut samples = vec![FlowSample { time: 0.0, point: point.clone(), tau: model.tau(&point)? }];
    let mut truncated = false;
    for i in 0..n_steps {
        match rk4_flow_step(model, kind, &point, h) {
            Ok(next) => point = next,
            Err(_) => {
                truncated = true;
                break;
            }
        }
        let tau = match model.tau(&point) {
            Ok(t) => t,
            Err(_) => {
                truncated = true;
                break;
            }
        };
        samples.push(FlowSample { time: h * (i as f64 + 1.0), point: point.clone(), tau });
    }
    Ok(FlowTrace { samples, field: kind, truncated })
}

fn rk4_flow_step(
    model: &ExhaustionModel,
    kind: FieldKind,
    z: &[Complex64],
    h: f64,
) -> Result<Vec<Complex64>, FlowError> {
    let add = |z: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        z.iter().zip(k).map(|(a, b)| a + s * b).collect()
    };
    let k1 = field_rhs(model, kind, z)?;
    let k2 = field_rhs(model, kind, &add(z, &k1, 0.5 * h))?;
    let k3 = field_rhs(model, kind, &add(z, &k2, 0.5 * h))?;
    let k4 = field_rhs(model, kind, &add(z, &k3, h))?;
    Ok(z.iter()
        .enumerate()
        .map(|(i, a)| a + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Detect the η-orbit period through z by the Poincaré return map on the
/// hyperplane through z orthogonal to the initial velocity, refined by
/// bisection.
pub fn detect_period(model: &ExhaustionModel, z: &[Complex64], step: f64) -> Result<f64, FlowError> {
    let v0 = field_rhs(model, FieldKind::Eta, z)?;
    let speed: f64 = v0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if speed < 1e-12 {
        return Err(FlowError::NonPeriodic("fixed point of the η-flow".into()));
    }
    let section = |p: &[Complex64]| -> f64 {
        p.iter().zip(z).zip(&v0).map(|((a, b), v)| ((a - b) * v.conj()).re).sum()
    };
    let mut point = z.to_vec();
    let mut t = 0.0;
    let mut s_prev = 0.0;
    let max_time = 100.0;
    while t < max_time {
        let next = rk4_flow_step(model, FieldKind::Eta, &point, step)?;
        let s_next = section(&next);
        if t > 3.0 * step && s_prev < 0.0 && s_next >= 0.0 {
            // Ascending crossing: bisect inside the step.
            let mut lo = 0.0;
            let mut hi = step;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let probe = rk4_flow_step(model, FieldKind::Eta, &point, mid)?;
                if section(&probe) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < tol::PERIOD_BISECTION {
                    break;
                }
            }
            let crossing = t + 0.5 * (lo + hi);
            // Guard against grazing a far-away section sheet.
            let at = rk4_flow_step(model, FieldKind::Eta, &point, 0.5 * (lo + hi))?;
            let dist: f64 =
                at.iter().zip(z).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if dist < 0.1 * scale.max(1e-6) {
                return Ok(crossing);
            }
        }
        s_prev = s_next;
        point = next;
        t += step;
    }
    Err(FlowError::NonPeriodic(format!("no return within t = {max_time}")))
}

/// Uniformization data of the leaf through a base point: the punctured
/// disk coordinate is `ζ = e^{−(2π/s₀)(t + u₀ − i s)}` and
/// `|ζ| = e^{−2πu/s₀}` along the leaf.
#[derive(Debug, Clone)]
pub struct LeafUniformizer {
    pub base: Vec<Complex64>,
    pub s0: f64,
    pub u0: f64,
    step: f64,
}

/// Build the uniformizer of the leaf through z (requires a periodic
/// η-orbit).
pub fn leaf_uniformize(
    model: &ExhaustionModel,
    z: &[Complex64],
    step: f64,
) -> Result<LeafUniformizer, FlowError> {
    let s0 = detect_period(model, z, step)?;
    let u0 = model.tau(z)?.ln();
    Ok(LeafUniformizer { base: z.to_vec(), s0, u0, step })
}

impl LeafUniformizer {
    /// Map a punctured-disk coordinate to the leaf: flow time
    /// `t = −(s₀/2π)·log|ζ| − u₀` along ξ and `s = (s₀/2π)·arg ζ` along η.
    pub fn to_leaf(&self, model: &ExhaustionModel, zeta: Complex64) -> Result<Vec<Complex64>, FlowError> {
        if zeta.norm() == 0.0 {
            return Err(FlowError::RejectedInput("the puncture has no preimage".into()));
        }
        let t = -(self.s0 / TAU2PI) * zeta.norm().ln() - self.u0;
        let s = (self.s0 / TAU2PI) * zeta.arg();
        let mut point = self.base.clone();
        if t.abs() > 1e-14 {
            point = flow(model, &point, FieldKind::Xi, t, self.step)?.samples.last().unwrap().point.clone();
        }
        if s.abs() > 1e-14 {
            point = flow(model, &point, FieldKind::Eta, s, self.step)?.samples.last().unwrap().point.clone();
        }
        Ok(point)
    }

    /// Cauchy-Riemann residual of the uniformizing map at ζ (finite
    /// differences): `‖∂map/∂ζ̄‖ / ‖∂map/∂ζ‖`.
    pub fn cr_residual(&self, model: &ExhaustionModel, zeta: Complex64, h: f64) -> Result<f64, FlowError> {
        let east = self.to_leaf(model, zeta + h)?;
        let west = self.to_leaf(model, zeta - h)?;
        let north = self.to_leaf(model, zeta + Complex64::new(0.0, h))?;
        let south = self.to_leaf(model, zeta - Complex64::new(0.0, h))?;
        let mut dbar = 0.0f64;
        let mut d = 0.0f64;
        for i in 0..east.len() {
            let fx = (east[i] - west[i]) / (2.0 * h);
            let fy = (north[i] - south[i]) / (2.0 * h);
            dbar += (0.5 * (fx + Complex64::i() * fy)).norm_sqr();
            d += (0.5 * (fx - Complex64::i() * fy)).norm_sqr();
        }
        Ok(dbar.sqrt() / d.sqrt().max(1e-300))
    }

    /// `| |ζ| − e^{−2πu/s₀} |` at the image point.
    pub fn radius_law_defect(&self, model: &ExhaustionModel, zeta: Complex64) -> Result<f64, FlowError> {
        let point = self.to_leaf(model, zeta)?;
        let u = model.tau(&point)?.ln();
        Ok((zeta.norm() - (-TAU2PI * u / self.s0).exp()).abs())
    }
}

/// Report of the polynomial-growth test `|f| ≤ C(1+τ)^N`.
#[derive(Debug, Clone, Copy)]
pub struct GrowthReport {
    pub passes: bool,
    /// Observed sup of `|f|/(1+τ)^N`.
    pub c_estimate: f64,
    /// Log-log slope of the tail envelope (≤ 0.1 to pass).
    pub tail_slope: f64,
}

/// Test polynomial growth of an entire function from samples
/// `(point, f(point))`; the sample τ-range must reach at least 10³.
pub fn growth_test(
    model: &ExhaustionModel,
    samples: &[(Vec<Complex64>, Complex64)],
    degree_bound: i32,
) -> Result<GrowthReport, FlowError> {
    if samples.len() < 16 {
        return Err(FlowError::RejectedInput("need at least 16 samples".into()));
    }
    let mut rows: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
    for (z, f) in samples {
        let t = model.tau(z)?;
        rows.push((t, f.norm() / (1.0 + t).powi(degree_bound)));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let t_max = rows.last().unwrap().0;
    if t_max < 1e3 {
        return Err(FlowError::RejectedInput(format!(
            "samples reach τ = {t_max:.1}; need a ceiling of at least 1e3"
        )));
    }
    let c_estimate = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    // Tail envelope: compare sup ratios on the two halves of the upper
    // τ-half in log-log coordinates.
    let tail = &rows[rows.len() / 2..];
    let mid = tail.len() / 2;
    let sup_lo = tail[..mid].iter().map(|r| r.1).fold(0.0f64, f64::max);
    let sup_hi = tail[mid..].iter().map(|r| r.1).fold(0.0f64, f64::max);
    let x_lo = tail[..mid].iter().map(|r| (1.0 + r.0).ln()).sum::<f64>() / mid as f64;
    let x_hi =
        tail[mid..].iter().map(|r| (1.0 + r.0).ln()).sum::<f64>() / (tail.len() - mid) as f64;
    let tail_slope = (sup_hi.max(1e-300).ln() - sup_lo.max(1e-300).ln()) / (x_hi - x_lo);
    Ok(GrowthReport { passes: tail_slope <= 0.1, c_estimate, tail_slope })
}

/// Defect of the Hessian identity `τ_{i j̄} = e^u (u_{i j̄} + u_i u_{j̄})`
/// with `u = log τ`, via Richardson-refined central differences of u.
pub fn hessian_identity_defect(model: &ExhaustionModel, z: &[Complex64]) -> Result<f64, FlowError> {
    let n = model.dim();
    let u = |p: &[Complex64]| -> Result<f64, FlowError> { Ok(model.tau(p)?.ln()) };
    let real_dim = 2 * n;
    let coords = |x: &[f64]| -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new(x[2 * i], x[2 * i + 1])).collect()
    };
    let mut x0 = vec![0.0; real_dim];
    for (i, c) in z.iter().enumerate() {
        x0[2 * i] = c.re;
        x0[2 * i + 1] = c.im;
    }
    let hessian = |h: f64| -> Result<(Vec<f64>, Vec<Vec<f64>>), FlowError> {
        let center = u(&coords(&x0))?;
        let mut grad = vec![0.0; real_dim];
        let mut hess = vec![vec![0.0; real_dim]; real_dim];
        let at = |a: usize, sa: f64, b: usize, sb: f64| -> Result<f64, FlowError> {
            let mut x = x0.clone();
            x[a] += sa * h;
            x[b] += sb * h;
            u(&coords(&x))
        };
        for a in 0..real_dim {
            let p = at(a, 1.0, a, 0.0)?;
            let m = at(a, -1.0, a, 0.0)?;
            grad[a] = (p - m) / (2.0 * h);
            hess[a][a] = (p - 2.0 * center + m) / (h * h);
        }
        for a in 0..real_dim {
            for b in a + 1..real_dim {
                let v = (at(a, 1.0, b, 1.0)? - at(a, 1.0, b, -1.0)? - at(a, -1.0, b, 1.0)?
                    + at(a, -1.0, b, -1.0)?)
                    / (4.0 * h * h);
                hess[a][b] = v;
                hess[b][a] = v;
            }
        }
        Ok((grad, hess))
    };
    let (g1, h1) = hessian(1e-3)?;
    let (g2, h2) = hessian(5e-4)?;
    let grad: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| (4.0 * b - a) / 3.0).collect();
    let hess: Vec<Vec<f64>> = h1
        .iter()
        .zip(&h2)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
        .collect();

    let tau = model.tau(z)?;
    let tau_hess = model.tau_hessian(z)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let ui = Complex64::new(grad[2 * i], -grad[2 * i + 1]) * 0.5;
        for j in 0..n {
            let uj = Complex64::new(grad[2 * j], -grad[2 * j + 1]) * 0.5;
            let re = hess[2 * i][2 * j] + hess[2 * i + 1][2 * j + 1];
            let im = hess[2 * i][2 * j + 1] - hess[2 * i + 1][2 * j];
            let uij = 0.25 * Complex64::new(re, im);
            let rhs = tau * (uij + ui * uj.conj());
            worst = worst.max((tau_hess[i][j] - rhs).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(dim: usize) -> ExhaustionModel {
        ExhaustionModel::EuclideanNormSq { dim }
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic xorshift for reproducible sample clouds.
    struct Rng(u64);
    impl Rng {
        fn next_f64(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
        fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.next_f64()
        }
    }

    #[test]
    fn euclidean_gradient_is_the_identity_field() {
        let model = euclid(2);
        let z = vec![cx(0.4, -0.3), cx(-0.2, 0.9)];
        let g = complex_gradient(&model, &z).unwrap();
        for (a, b) in g.y.iter().zip(&z) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!((g.hessian_cond - 1.0).abs() < 1e-12);
        assert!(gradient_identity_defect(&model, &z).unwrap() < 1e-12);

        let zero = vec![cx(0.0, 0.0), cx(0.0, 0.0)];
        let g = complex_gradient(&model, &zero).unwrap();
        assert!(g.y.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn xi_flow_scales_tau_exponentially() {
        let model = euclid(2);
        let z = vec![cx(0.6, 0.0), cx(0.0, 0.8)];
        let trace = flow(&model, &z, FieldKind::Xi, 1.0, 1e-3).unwrap();
        let last = trace.samples.last().unwrap();
        assert!((last.tau - std::f64::consts::E).abs() < 1e-9, "τ = {}", last.tau);
        for s in &trace.samples {
            let expect = s.time.exp();
            assert!((s.tau - expect).abs() <= tol::FLOW_EXACTNESS * expect);
        }
    }

    #[test]
    fn flow_exactness_on_random_starts() {
        let model = euclid(2);
        let mut rng = Rng(0x9e3779b97f4a7c15);
        for _ in 0..100 {
            let z = vec![
                cx(rng.in_range(-1.0, 1.0), rng.in_range(-1.0, 1.0)),
                cx(rng.in_range(-1.0, 1.0), rng.in_range(-1.0, 1.0)),
            ];
            if model.tau(&z).unwrap() < 1e-3 {
                continue;
            }
            let t_end = rng.in_range(0.1, 3.0);
            let trace = flow(&model, &z, FieldKind::Xi, t_end, 1e-3).unwrap();
            let last = trace.samples.last().unwrap();
            let expect = t_end.exp() * model.tau(&z).unwrap();
            assert!((last.tau - expect).abs() <= tol::FLOW_EXACTNESS * expect);
        }
    }

    #[test]
    fn eta_flow_preserves_tau_and_closes_at_4pi() {
        let model = euclid(2);
        let z = vec![cx(1.0, 0.0), cx(0.0, 0.0)];
        let trace = flow(&model, &z, FieldKind::Eta, 4.0 * std::f64::consts::PI, 1e-3).unwrap();
        let tau0 = trace.samples[0].tau;
        for s in &trace.samples {
            assert!((s.tau - tau0).abs() <= tol::FLOW_EXACTNESS * tau0);
        }
        let last = &trace.samples.last().unwrap().point;
        assert!((last[0] - z[0]).norm() < 1e-9 && (last[1] - z[1]).norm() < 1e-9);

        let s0 = detect_period(&model, &z, 1e-3).unwrap();
        assert!((s0 - 4.0 * std::f64::consts::PI).abs() < 1e-6, "s₀ = {s0}");
    }

    #[test]
    fn flows_commute_and_the_period_is_flow_invariant() {
        let model = euclid(2);
        let z = vec![cx(0.7, 0.2), cx(-0.1, 0.5)];
        let (t, s) = (0.8, 1.3);
        let a = {
            let mid = flow(&model, &z, FieldKind::Xi, t, 1e-3).unwrap().samples.last().unwrap().point.clone();
            flow(&model, &mid, FieldKind::Eta, s, 1e-3).unwrap().samples.last().unwrap().point.clone()
        };
        let b = {
            let mid = flow(&model, &z, FieldKind::Eta, s, 1e-3).unwrap().samples.last().unwrap().point.clone();
            flow(&model, &mid, FieldKind::Xi, t, 1e-3).unwrap().samples.last().unwrap().point.clone()
        };
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-8);
        }

        let p0 = detect_period(&model, &z, 1e-3).unwrap();
        let moved = flow(&model, &z, FieldKind::Xi, 0.9, 1e-3).unwrap().samples.last().unwrap().point.clone();
        let p1 = detect_period(&model, &moved, 1e-3).unwrap();
        assert!((p0 - p1).abs() < 1e-6, "period drifted {p0} → {p1}");
    }

    #[test]
    fn leaf_uniformizer_on_a_complex_line() {
        let model = euclid(2);
        let z = vec![cx(1.0, 0.0), cx(0.0, 0.0)];
        let uni = leaf_uniformize(&model, &z, 1e-3).unwrap();
        assert!((uni.s0 - 4.0 * std::f64::consts::PI).abs() < 1e-6);
        assert!(uni.u0.abs() < 1e-12);

        // ζ = 1/c on the line c ↦ (c, 0): check against closed form.
        for &zeta in &[cx(0.8, 0.0), cx(0.5, 0.4), cx(-0.3, 0.6)] {
            let p = uni.to_leaf(&model, zeta).unwrap();
            let expect = 1.0 / zeta;
            assert!((p[0] - expect).norm() < 1e-6, "leaf point {} vs {expect}", p[0]);
            assert!(p[1].norm() < 1e-9);
            assert!(uni.radius_law_defect(&model, zeta).unwrap() < 1e-9);
        }
        // The boundary circle τ = τ₀ maps to |ζ| = e^{−2πu₀/s₀} exactly.
        let boundary = uni.to_leaf(&model, cx(0.0, 1.0)).unwrap();
        assert!((model.tau(&boundary).unwrap() - 1.0).abs() < 1e-9);

        for &zeta in &[cx(0.6, 0.1), cx(0.2, -0.5)] {
            let cr = uni.cr_residual(&model, zeta, 1e-4).unwrap();
            assert!(cr <= tol::LEAF_CR, "CR residual {cr:.3e} at {zeta}");
        }
    }

    #[test]
    fn uniformizers_from_two_base_points_differ_by_a_rotation() {
        let model = euclid(2);
        let z = vec![cx(1.0, 0.0), cx(0.0, 0.0)];
        let uni_a = leaf_uniformize(&model, &z, 1e-3).unwrap();
        // Second base point on the same leaf, reached by the flows.
        let moved = flow(&model, &z, FieldKind::Eta, 0.7, 1e-3).unwrap().samples.last().unwrap().point.clone();
        let uni_b = leaf_uniformize(&model, &moved, 1e-3).unwrap();
        // Compare preimages of a common leaf point: same modulus, fixed
        // phase offset.
        let mut phases = Vec::new();
        for &zeta in &[cx(0.5, 0.0), cx(0.3, 0.3), cx(-0.2, 0.4)] {
            let p = uni_a.to_leaf(&model, zeta).unwrap();
            // Invert uni_b on the line: ζ_b = e^{−u₀_b}/c with c = p[0].
            let zeta_b = (-uni_b.u0 / 2.0).exp() / p[0] * cx(1.0, 0.0);
            assert!((zeta_b.norm() - zeta.norm()).abs() > -1.0); // moduli compared below
            let ratio = zeta_b / zeta;
            assert!((ratio.norm() - 1.0).abs() < 1e-6, "modulus ratio {}", ratio.norm());
            phases.push(ratio.arg());
        }
        for w in phases.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-6, "rotation angle not constant: {phases:?}");
        }
    }

    #[test]
    fn growth_test_examples() {
        let model = euclid(2);
        let mut rng = Rng(0xdeadbeefcafef00d);
        let mut cloud: Vec<Vec<Complex64>> = Vec::new();
        for _ in 0..400 {
            let r = rng.in_range(0.0, 40.0);
            let (a, b, c, d) = (
                rng.in_range(-1.0, 1.0),
                rng.in_range(-1.0, 1.0),
                rng.in_range(-1.0, 1.0),
                rng.in_range(-1.0, 1.0),
            );
            let norm = (a * a + b * b + c * c + d * d).sqrt().max(1e-9);
            cloud.push(vec![cx(r * a / norm, r * b / norm), cx(r * c / norm, r * d / norm)]);
        }
        // Real-axis ray where exp(z₁) blows up.
        for i in 0..200 {
            cloud.push(vec![cx(50.0 * i as f64 / 199.0, 0.0), cx(0.0, 0.0)]);
        }

        let sample = |f: &dyn Fn(&[Complex64]) -> Complex64| -> Vec<(Vec<Complex64>, Complex64)> {
            cloud.iter().map(|z| (z.clone(), f(z))).collect()
        };

        let coord = sample(&|z| z[0]);
        let r = growth_test(&model, &coord, 1).unwrap();
        assert!(r.passes && r.c_estimate <= 1.0, "z₁: C = {}", r.c_estimate);

        let product = sample(&|z| z[0] * z[1]);
        assert!(growth_test(&model, &product, 2).unwrap().passes);

        let square = sample(&|z| z[0] * z[0]);
        assert!(growth_test(&model, &square, 2).unwrap().passes);

        let exp = sample(&|z| z[0].exp());
        for n in [1, 3, 8] {
            let r = growth_test(&model, &exp, n).unwrap();
            assert!(!r.passes, "exp(z₁) must fail at N = {n} (slope {})", r.tail_slope);
        }
    }

    #[test]
    fn hessian_identity_holds() {
        let model = euclid(2);
        let z = vec![cx(0.8, -0.1), cx(0.3, 0.4)];
        let defect = hessian_identity_defect(&model, &z).unwrap();
        assert!(defect <= 1e-8, "Hessian identity defect {defect:.3e}");
    }
}
