//! First-order machinery on the space of competitor disks: the linearized
//! boundary condition, the boundary fixed-point solve, the distortion
//! functional and its gradient, and the Robin constant.

use num_complex::Complex64;

use super::rh::{rh_factorize, RHFactorization};
use super::spectral;
use super::{check_theta0, BoundaryDisk, DiskError, HermitianModel};
use crate::tol;

/// Boundary data of a disk needed by every variational formula: component
/// values, the Wirtinger derivatives of r along the loop, and the
/// Riemann-Hilbert factorization of `ζ·r_t(f)`.
#[derive(Debug, Clone)]
pub struct DiskBoundaryData {
    pub grid_len: usize,
    pub zeta: Vec<Complex64>,
    pub f_values: Vec<Vec<Complex64>>,
    pub r_t: Vec<Complex64>,
    pub r_base: Vec<Vec<Complex64>>,
    pub rh: RHFactorization,
}

pub fn boundary_data(
    model: &HermitianModel,
    disk: &BoundaryDisk,
    grid_len: usize,
) -> Result<DiskBoundaryData, DiskError> {
    spectral::check_grid(grid_len)?;
    let zeta = spectral::unit_circle(grid_len);
    let f_values = disk.values_on_grid(grid_len);
    let n = disk.components();
    let mut r_t = Vec::with_capacity(grid_len);
    let mut r_base = vec![Vec::with_capacity(grid_len); n - 1];
    for j in 0..grid_len {
        let z_prime: Vec<Complex64> = (0..n - 1).map(|c| f_values[c][j]).collect();
        let t = f_values[n - 1][j];
        r_t.push(model.r_t(&z_prime, t, disk.lambda));
        for (i, comp) in r_base.iter_mut().enumerate() {
            comp.push(model.r_i(&z_prime, t, disk.lambda, i));
        }
    }
    let rh_input: Vec<Complex64> = zeta.iter().zip(&r_t).map(|(z, rt)| z * rt).collect();
    let rh = rh_factorize(&rh_input)?;
    Ok(DiskBoundaryData { grid_len, zeta, f_values, r_t, r_base, rh })
}

/// Duality pairing on base variations under which [`grad_energy`] is the
/// Riesz gradient of the distortion energy:
/// `⟨a, b⟩ = (1/4π) ∫ Re Σ_ℓ a_ℓ conj(b_ℓ) dθ`.
pub fn pairing(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let n = a[0].len() as f64;
    let mut acc = 0.0;
    for (ca, cb) in a.iter().zip(b) {
        for (x, y) in ca.iter().zip(cb) {
            acc += (x * y.conj()).re;
        }
    }
    0.5 * acc / n
}

/// Complete base variations `δf_1..δf_{n−1}` (grid values, vanishing at
/// the center) to the fiber variation `δf_n = ζ·g⁻¹·q` solving the
/// linearized boundary condition
/// `2Re(r_t·δf_n) + 2Re(Σ r_i·δf_i) = 0` with `Im(ζ⁻¹δf_n)(0) = 0`.
pub fn tangent_delta_fn(
    model: &HermitianModel,
    disk: &BoundaryDisk,
    delta_base: &[Vec<Complex64>],
) -> Result<Vec<Complex64>, DiskError> {
    let grid_len = delta_base.first().map(|v| v.len()).unwrap_or(0);
    let data = boundary_data(model, disk, grid_len)?;
    tangent_delta_fn_with(&data, delta_base)
}

/// Same as [`tangent_delta_fn`] with precomputed boundary data.
pub fn tangent_delta_fn_with(
    data: &DiskBoundaryData,
    delta_base: &[Vec<Complex64>],
) -> Result<Vec<Complex64>, DiskError> {
    check_theta0(data.rh.theta0)?;
    let n = data.grid_len;
    let mut p = vec![0.0; n];
    for (r_i, df_i) in data.r_base.iter().zip(delta_base) {
        for j in 0..n {
            p[j] += (r_i[j] * df_i[j]).re / data.rh.rho[j];
        }
    }
    let tp = spectral::hilbert_transform(&p)?;
    let a = -p.iter().sum::<f64>() / n as f64;
    let b = data.rh.theta0.tan() * a;
    let g = data.rh.g_values();
    let mut delta_n = Vec::with_capacity(n);
    for j in 0..n {
        // q must be a holomorphic boundary value with Re q = −P; the
        // conjugate pair is −P − i·T(P), shifted by the constant ib that
        // pins Im(ζ⁻¹δf_n)(0) = 0.
        let q = Complex64::new(-p[j], -tp[j] + b);
        delta_n.push(data.zeta[j] * q / g[j]);
    }
    Ok(delta_n)
}

/// Result of the boundary fixed-point solve.
#[derive(Debug, Clone)]
pub struct BoundarySolve {
    /// Holomorphic correction w (grid values), `f_n = ζ(1 + w)`,
    /// `Im w(0) = 0`.
    pub w_values: Vec<Complex64>,
    pub iterations: usize,
    /// `max |r(f) − 1|` on the grid after the analytic projection.
    pub residual: f64,
    /// Largest successive-difference ratio seen (contraction monitor).
    pub contraction: f64,
}

/// Solve `r(base_1(ζ), …, base_{n−1}(ζ), ζ·(1 + w(ζ)), λ) ≡ 1` on ∂△ for a
/// holomorphic `w` with `Im w(0) = 0`, by the fixed-point iteration
/// `v ← T(G(v))` where `u = G(v)` is a pointwise root solve in the real
/// part at each grid node.
pub fn solve_boundary(
    model: &HermitianModel,
    lambda: Complex64,
    base_values: &[Vec<Complex64>],
    w_init: Option<&[Complex64]>,
) -> Result<BoundarySolve, DiskError> {
    let n = base_values.first().map(|v| v.len()).ok_or_else(|| {
        DiskError::RejectedInput("at least one base component required".into())
    })?;
    spectral::check_grid(n)?;
    let zeta = spectral::unit_circle(n);
    let base_at = |j: usize| -> Vec<Complex64> {
        base_values.iter().map(|c| c[j]).collect()
    };

    let mut u: Vec<f64> = match w_init {
        Some(w) => w.iter().map(|c| c.re).collect(),
        None => vec![0.0; n],
    };
    let mut v: Vec<f64> = match w_init {
        Some(w) => {
            let m = w.iter().map(|c| c.im).sum::<f64>() / n as f64;
            w.iter().map(|c| c.im - m).collect()
        }
        None => vec![0.0; n],
    };

    // u = G(v): pointwise Newton in the real part of w.
    let solve_u = |u: &mut Vec<f64>, v: &[f64]| -> Result<(), DiskError> {
        for j in 0..n {
            let zp = base_at(j);
            let mut uj = u[j];
            let mut ok = false;
            for _ in 0..60 {
                let t = zeta[j] * Complex64::new(1.0 + uj, v[j]);
                let f = model.r(&zp, t, lambda) - 1.0;
                if f.abs() < tol::POINTWISE_ROOT {
                    ok = true;
                    break;
                }
                let dr = 2.0 * (model.r_t(&zp, t, lambda) * zeta[j]).re;
                if dr.abs() < 1e-14 {
                    break;
                }
                uj -= f / dr;
            }
            if !ok {
                return Err(DiskError::NoConvergence { iters: 60, tail: vec![] });
            }
            u[j] = uj;
        }
        Ok(())
    };

    let mut contraction = 0.0f64;
    let mut prev_delta = f64::INFINITY;
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        solve_u(&mut u, &v)?;
        let v_new = spectral::hilbert_transform(&u)?;
        let delta =
            v_new.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        history.push(delta);
        if prev_delta.is_finite() && prev_delta > 1e-15 {
            let ratio = delta / prev_delta;
            contraction = contraction.max(ratio);
            if ratio >= 1.0 && delta > 1e-12 {
                return Err(DiskError::ContractionLost(ratio));
            }
        }
        prev_delta = delta;
        v = v_new;
        if delta < 1e-14 {
            break;
        }
        if iterations >= tol::MAX_FIXED_POINT_ITERS {
            let tail = history[history.len().saturating_sub(5)..].to_vec();
            return Err(DiskError::NoConvergence { iters: iterations, tail });
        }
    }
    solve_u(&mut u, &v)?;

    let w_raw: Vec<Complex64> =
        u.iter().zip(&v).map(|(&a, &b)| Complex64::new(a, b)).collect();
    let w_values = spectral::analytic_project(&w_raw)?;
    let mut residual = 0.0f64;
    for j in 0..n {
        let t = zeta[j] * (1.0 + w_values[j]);
        residual = residual.max((model.r(&base_at(j), t, lambda) - 1.0).abs());
    }
    Ok(BoundarySolve { w_values, iterations, residual, contraction })
}

/// Distortion `E(f) = ∂f_n/∂ζ(0) = Re` (mode-1 coefficient of the fiber
/// component). Requires the fiber mode 0 to vanish.
pub fn distortion_energy(disk: &BoundaryDisk) -> Result<f64, DiskError> {
    let fiber = &disk.fourier[disk.components() - 1];
    if fiber[0].norm() > 1e-9 {
        return Err(DiskError::RejectedInput(format!(
            "fiber component does not vanish at the center: |f_n(0)| = {:.3e}",
            fiber[0].norm()
        )));
    }
    Ok(disk.fiber_derivative_at_zero().re)
}

/// The two routes to the Robin constant.
#[derive(Debug, Clone, Copy)]
pub struct RobinConstant {
    /// `log 1/|∂f_n/∂ζ(0)|² + c` with the model constant `c = −log h(z', 0)`.
    pub via_formula: f64,
    /// Extrapolation of `f*u₀ − log 1/|ζ|²` to the center.
    pub via_extrapolation: f64,
}

impl RobinConstant {
    pub fn agreement(&self) -> f64 {
        (self.via_formula - self.via_extrapolation).abs()
    }
}

/// Robin constant of a divisor-transverse disk, computed two independent
/// ways.
pub fn robin_constant(
    model: &HermitianModel,
    disk: &BoundaryDisk,
) -> Result<RobinConstant, DiskError> {
    let d1 = disk.fiber_derivative_at_zero();
    if d1.norm() < 1e-10 {
        return Err(DiskError::Transversality(d1.norm()));
    }
    let via_formula = -model.h_base(&disk.z_prime).ln() - 2.0 * d1.norm().ln();

    // Mean of v_f = u₀∘f + log|ζ|² over circles of shrinking radius,
    // Richardson-extrapolated in ε² (odd powers cancel in the angular mean).
    let n_angles = 64;
    let eps0 = 0.1;
    let radii: Vec<f64> = (0..4).map(|k| eps0 / 2f64.powi(k)).collect();
    let mut means = Vec::with_capacity(radii.len());
    for &eps in &radii {
        let mut acc = 0.0;
        for j in 0..n_angles {
            let zeta = Complex64::from_polar(eps, std::f64::consts::TAU * j as f64 / n_angles as f64);
            let f = disk.values_at(zeta);
            let nb = disk.components() - 1;
            let u0 = model.u0(&f[..nb], f[nb], disk.lambda);
            acc += u0 + 2.0 * eps.ln();
        }
        means.push(acc / n_angles as f64);
    }
    // Neville extrapolation to ε² = 0.
    let xs: Vec<f64> = radii.iter().map(|e| e * e).collect();
    let mut tableau = means;
    for level in 1..tableau.len() {
        for i in 0..tableau.len() - level {
            let (x0, x1) = (xs[i], xs[i + level]);
            tableau[i] = (x0 * tableau[i + 1] - x1 * tableau[i]) / (x0 - x1);
        }
    }
    Ok(RobinConstant { via_formula, via_extrapolation: tableau[0] })
}

/// Energy gradient data at a disk.
#[derive(Debug, Clone)]
pub struct GradEnergy {
    /// `∇E = −2 sec θ₀ · (S₀(conj(r_1/ρ)), …, S₀(conj(r_{n−1}/ρ)))`,
    /// grid values per base component.
    pub components: Vec<Vec<Complex64>>,
    pub theta0: f64,
    /// Negative-mode energy of each `r_ℓ/ρ`: all below tolerance exactly
    /// when the disk is critical (holomorphic extension criterion).
    pub neg_mode_energy: Vec<f64>,
    pub sup_norm: f64,
}

/// Gradient of the distortion energy over the base variation space.
pub fn grad_energy(
    model: &HermitianModel,
    disk: &BoundaryDisk,
    grid_len: usize,
) -> Result<GradEnergy, DiskError> {
    let data = boundary_data(model, disk, grid_len)?;
    grad_energy_with(&data)
}

/// Same as [`grad_energy`] with precomputed boundary data.
pub fn grad_energy_with(data: &DiskBoundaryData) -> Result<GradEnergy, DiskError> {
    check_theta0(data.rh.theta0)?;
    let scale = -2.0 / data.rh.theta0.cos();
    let mut components = Vec::with_capacity(data.r_base.len());
    let mut neg = Vec::with_capacity(data.r_base.len());
    let mut sup = 0.0f64;
    for r_i in &data.r_base {
        let ratio: Vec<Complex64> =
            r_i.iter().zip(&data.rh.rho).map(|(r, rho)| r / rho).collect();
        neg.push(spectral::negative_mode_energy(&ratio)?);
        let conj: Vec<Complex64> = ratio.iter().map(|c| c.conj()).collect();
        let proj = spectral::szego_project(&conj)?;
        let comp: Vec<Complex64> = proj.iter().map(|c| scale * c).collect();
        sup = sup.max(spectral::sup_norm(&comp));
        components.push(comp);
    }
    Ok(GradEnergy { components, theta0: data.rh.theta0, neg_mode_energy: neg, sup_norm: sup })
}

/// Move a disk along base variations (grid values, vanishing at the
/// center) and restore the boundary condition by re-solving for the fiber
/// correction. This is the chart parametrizing the competitor manifold.
pub fn advance_disk(
    model: &HermitianModel,
    disk: &BoundaryDisk,
    delta_base: &[Vec<Complex64>],
    grid_len: usize,
) -> Result<BoundaryDisk, DiskError> {
    spectral::check_grid(grid_len)?;
    let n = disk.components();
    let mut base_values = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let mut vals = disk.component_values(i, grid_len);
        if !delta_base.is_empty() {
            for (v, d) in vals.iter_mut().zip(&delta_base[i]) {
                *v += d;
            }
        }
        base_values.push(vals);
    }
    let zeta = spectral::unit_circle(grid_len);
    let fiber = disk.component_values(n - 1, grid_len);
    let w_init: Vec<Complex64> =
        fiber.iter().zip(&zeta).map(|(f, z)| f / z - 1.0).collect();
    let solve = solve_boundary(model, disk.lambda, &base_values, Some(&w_init))?;

    let mut fourier = Vec::with_capacity(n);
    for vals in &base_values {
        let (coeffs, _) = spectral::to_power_series(vals, disk.n_modes)?;
        fourier.push(coeffs);
    }
    let (w_coeffs, _) = spectral::to_power_series(&solve.w_values, disk.n_modes)?;
    let mut fiber_coeffs = vec![Complex64::new(0.0, 0.0); w_coeffs.len().min(disk.n_modes) + 1];
    fiber_coeffs[1] = Complex64::new(1.0, 0.0);
    for (k, &c) in w_coeffs.iter().enumerate() {
        if k + 1 < fiber_coeffs.len() {
            fiber_coeffs[k + 1] += c;
        }
    }
    fourier.push(fiber_coeffs);
    Ok(BoundaryDisk::from_fourier(fourier, disk.lambda))
}

/// The closed-form extremal of the undeformed model: `f = (z', ζ/h^{1/2}(z'))`.
pub fn model_extremal(
    model: &HermitianModel,
    z_prime: &[Complex64],
    n_modes: usize,
) -> BoundaryDisk {
    let scale = 1.0 / model.h_base(z_prime).sqrt();
    let mut fourier: Vec<Vec<Complex64>> =
        z_prime.iter().map(|&z| vec![z]).collect();
    let mut fiber = vec![Complex64::new(0.0, 0.0); n_modes + 1];
    fiber[1] = Complex64::new(scale, 0.0);
    fourier.push(fiber);
    let mut disk = BoundaryDisk::from_fourier(fourier, Complex64::new(0.0, 0.0));
    disk.n_modes = n_modes;
    disk
}
