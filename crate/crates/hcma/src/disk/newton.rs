//! Preconditioned quasi-Newton solve for extremal disks and the
//! finite-difference second-variation check.
//!
//! The second variation of the distortion energy at the centered model
//! disk is twice the identity, so the fixed preconditioner `(2I)⁻¹` makes
//! the gradient iteration locally fast; a backtracking line search on
//! `‖∇E‖` guards the nonlinear regime, and continuation in λ (steps of
//! 0.01, re-using the previous extremal) carries the solve away from the
//! undeformed model.

use num_complex::Complex64;

use super::spectral;
use super::variation::{
    advance_disk, boundary_data, distortion_energy, grad_energy_with, model_extremal,
};
use super::{BoundaryDisk, DiskError, HermitianModel};
use crate::tol;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Fourier modes kept per component.
    pub n_modes: usize,
    /// Boundary grid length (power of two).
    pub grid_len: usize,
    /// Target sup-norm of the gradient.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// λ-continuation step.
    pub lambda_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            n_modes: 64,
            grid_len: 256,
            grad_tol: tol::GRAD_NORM,
            max_iters: 80,
            lambda_step: 0.01,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub disk: BoundaryDisk,
    pub grad_norm: f64,
    pub boundary_residual: f64,
    pub iterations: usize,
    pub energy: f64,
}

/// Solve for the extremal disk through `z'` at deformation `lambda`.
///
/// With no initial guess the solve starts from the closed-form extremal of
/// the undeformed model and continues in λ. The returned disk satisfies
/// the boundary condition and competitor normalizations, has gradient
/// sup-norm below `opts.grad_tol`, and passes the embeddedness scan.
pub fn newton_disk(
    model: &HermitianModel,
    z_prime: &[Complex64],
    lambda: Complex64,
    init: Option<&BoundaryDisk>,
    opts: &NewtonOptions,
) -> Result<NewtonResult, DiskError> {
    let mut current = match init {
        Some(disk) => {
            let mut d = disk.clone();
            d.lambda = lambda;
            d
        }
        None => model_extremal(model, z_prime, opts.n_modes),
    };

    if init.is_none() && lambda.norm() > 0.0 {
        // Continuation path 0 → λ in steps of at most `lambda_step`.
        let steps = (lambda.norm() / opts.lambda_step).ceil() as usize;
        for s in 1..=steps {
            let lam = lambda * (s as f64 / steps as f64);
            current.lambda = lam;
            current = solve_at_lambda(model, current, opts)?.disk;
        }
        finalize(model, current, opts)
    } else {
        current.lambda = lambda;
        let result = solve_at_lambda(model, current, opts)?;
        finalize(model, result.disk, opts)
    }
}

fn solve_at_lambda(
    model: &HermitianModel,
    start: BoundaryDisk,
    opts: &NewtonOptions,
) -> Result<NewtonResult, DiskError> {
    // Restore the boundary condition at the (possibly new) λ first.
    let mut disk = advance_disk(model, &start, &[], opts.grid_len)?;
    let mut iterations = 0;
    loop {
        let data = boundary_data(model, &disk, opts.grid_len)?;
        let grad = grad_energy_with(&data)?;
        if grad.sup_norm <= opts.grad_tol {
            return Ok(NewtonResult {
                boundary_residual: disk.boundary_residual(model, opts.grid_len),
                energy: distortion_energy(&disk)?,
                grad_norm: grad.sup_norm,
                disk,
                iterations,
            });
        }
        if iterations >= opts.max_iters {
            return Err(DiskError::NoConvergence {
                iters: iterations,
                tail: vec![grad.sup_norm],
            });
        }
        iterations += 1;

        // Fixed preconditioner (2I)⁻¹ with backtracking on ‖∇E‖.
        let mut alpha = 1.0f64;
        let mut accepted = None;
        for _ in 0..12 {
            let step: Vec<Vec<Complex64>> = grad
                .components
                .iter()
                .map(|c| c.iter().map(|v| -0.5 * alpha * v).collect())
                .collect();
            match advance_disk(model, &disk, &step, opts.grid_len) {
                Ok(candidate) => {
                    let g_new = grad_energy_with(&boundary_data(model, &candidate, opts.grid_len)?)?;
                    if g_new.sup_norm < grad.sup_norm * (1.0 - 0.25 * alpha) {
                        accepted = Some(candidate);
                        break;
                    }
                }
                Err(_) => {}
            }
            alpha *= 0.5;
        }
        match accepted {
            Some(next) => disk = next,
            None => return Err(DiskError::StepRejection(grad.sup_norm)),
        }
    }
}

fn finalize(
    model: &HermitianModel,
    disk: BoundaryDisk,
    opts: &NewtonOptions,
) -> Result<NewtonResult, DiskError> {
    let disk = disk.normalize_rotation();
    disk.embeddedness_check(opts.grid_len)?;
    let defect = disk.competitor_defect();
    if defect > 1e-8 {
        return Err(DiskError::RejectedInput(format!(
            "competitor normalization defect {defect:.3e} after rotation"
        )));
    }
    let data = boundary_data(model, &disk, opts.grid_len)?;
    let grad = grad_energy_with(&data)?;
    Ok(NewtonResult {
        boundary_residual: disk.boundary_residual(model, opts.grid_len),
        energy: distortion_energy(&disk)?,
        grad_norm: grad.sup_norm,
        disk,
        iterations: 0,
    })
}

/// Finite-difference Jacobian of the energy gradient at the centered model
/// disk, expressed on the low-mode basis {ζ, iζ, ζ², iζ², …} (2 modes per
/// power). For a center-normalized model this is 2·Identity.
#[derive(Debug, Clone)]
pub struct SecondVariation {
    /// `matrix[row][col]`: coefficient of basis element `row` in
    /// `D∇E · (basis element col)`.
    pub matrix: Vec<Vec<f64>>,
    pub basis_len: usize,
}

impl SecondVariation {
    pub fn max_defect_from(&self, scale: f64) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expect = if i == j { scale } else { 0.0 };
                worst = worst.max((v - expect).abs());
            }
        }
        worst
    }
}

/// Estimate `D∇E(f₀)` by central differences along `powers` Fourier modes
/// (basis size `2·powers`).
pub fn second_variation_check(
    model: &HermitianModel,
    powers: usize,
    opts: &NewtonOptions,
) -> Result<SecondVariation, DiskError> {
    let f0 = model_extremal(model, &vec![Complex64::new(0.0, 0.0); model.dim - 1], opts.n_modes);
    let eps = 1e-3;
    let n = opts.grid_len;
    let basis_len = 2 * powers;
    let mut matrix = vec![vec![0.0; basis_len]; basis_len];
    for col in 0..basis_len {
        let k = col / 2 + 1;
        let coeff = if col % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let dir = spectral::monomial(n, k, coeff);
        let moved = |sign: f64| -> Result<Vec<Vec<Complex64>>, DiskError> {
            let delta = vec![dir.iter().map(|v| sign * eps * v).collect::<Vec<_>>()];
            let disk = advance_disk(model, &f0, &delta, n)?;
            let g = grad_energy_with(&boundary_data(model, &disk, n)?)?;
            Ok(g.components)
        };
        let plus = moved(1.0)?;
        let minus = moved(-1.0)?;
        let diff: Vec<Complex64> = plus[0]
            .iter()
            .zip(&minus[0])
            .map(|(p, m)| (p - m) / (2.0 * eps))
            .collect();
        let coeffs = spectral::fft_coeffs(&diff);
        for row in 0..basis_len {
            let kr = row / 2 + 1;
            let c = coeffs[kr];
            matrix[row][col] = if row % 2 == 0 { c.re } else { c.im };
        }
    }
    Ok(SecondVariation { matrix, basis_len })
}
