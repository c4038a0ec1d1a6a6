//! Extremal holomorphic disks attached to the boundary of a model
//! neighborhood of an ample divisor, and their assembly into a
//! Monge-Ampère foliation.
//!
//! The model is the unit-disk bundle `{r < 1}` of a hermitian line bundle
//! over a chart of the divisor, `r(z', t, λ) = h(z', z_n = λt)·|t|²`,
//! deformed by the parameter λ. Competitor disks are truncated Fourier
//! loops `f = (f_1, …, f_{n−1}, f_n)` with `r(f) = 1` on ∂△, `f_n(0) = 0`
//! and `∂f_n/∂ζ(0)` real positive; extremal disks minimize the distortion
//! `E(f) = ∂f_n/∂ζ(0)`. The machinery lives in the submodules:
//!
//! * [`spectral`] — grid FFT, Hilbert transform, Szegő projector;
//! * [`rh`] — Riemann-Hilbert factorization `ζ·r_t(f) = ρ·g`;
//! * [`variation`] — tangent completion, boundary fixed-point solve,
//!   distortion, Robin constant, energy gradient;
//! * [`newton`] — preconditioned quasi-Newton solve and the second
//!   variation check;
//! * [`foliation`] — chart assembly, the pulled-back potential `u_λ`, and
//!   the Levi / tangency verification reports.

pub mod foliation;
pub mod newton;
pub mod rh;
pub mod spectral;
pub mod variation;

use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

pub use foliation::{assemble_foliation, levi_verify, tangency_verify, FoliationChart};
pub use newton::{newton_disk, second_variation_check, NewtonOptions};
pub use rh::{rh_factorize, RHFactorization};
pub use variation::{
    distortion_energy, grad_energy, pairing, robin_constant, solve_boundary, tangent_delta_fn,
};

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("boundary grid length {0} must be a power of two ≥ 16")]
    BadGrid(usize),
    #[error("rejected input: {0}")]
    RejectedInput(String),
    #[error("input vanishes on the boundary circle (min modulus {0:.3e})")]
    VanishingInput(f64),
    #[error("winding number {0} ≠ 0; loop too far from the model disk")]
    Winding(i64),
    #[error("θ₀ = {0:.4} outside the perturbative range (−π/2, π/2) with margin")]
    Theta0OutOfRange(f64),
    #[error("fixed-point contraction lost (ratio {0:.3})")]
    ContractionLost(f64),
    #[error("no convergence in {iters} iterations; residual history tail {tail:?}")]
    NoConvergence { iters: usize, tail: Vec<f64> },
    #[error("step rejection cascade at gradient norm {0:.3e}")]
    StepRejection(f64),
    #[error("disk lost embeddedness: {0}")]
    Embeddedness(String),
    #[error("leaf collision on samples: disks {0} and {1} approach within {2:.3e}")]
    LeafCollision(usize, usize, f64),
    #[error("divisor transversality fails: |∂f_n/∂ζ(0)| = {0:.3e}")]
    Transversality(f64),
    #[error("leaf location failed: {0}")]
    LeafLocate(String),
    #[error("Levi signature flip across samples")]
    SignatureFlip,
}

/// Which hermitian fiber metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HKind {
    /// h ≡ 1 (flat, zero curvature): the model disk itself is extremal at
    /// every z' and all variational quantities vanish.
    Flat,
    /// Fubini-Study type, `h(z) = 1/(1 + ‖z‖²)`: positive curvature, with
    /// `h(0) = 1`, vanishing first and pure second derivatives and mixed
    /// Hessian `−δ_{jk}` at the center, so the centered model disk carries
    /// the normalized second variation `2·Identity`.
    QuadricLike,
}

/// Local model of a neighborhood of the divisor: hermitian metric h on the
/// chart, deformation parameter λ (held per disk), and the defining
/// function `r(z', t, λ) = h(z', λt)·|t|²`.
#[derive(Debug, Clone, Copy)]
pub struct HermitianModel {
    /// Complex dimension n of the total space (base dimension n − 1).
    pub dim: usize,
    pub kind: HKind,
}

impl HermitianModel {
    pub fn flat(dim: usize) -> Self {
        HermitianModel { dim, kind: HKind::Flat }
    }

    pub fn quadric_like(dim: usize) -> Self {
        HermitianModel { dim, kind: HKind::QuadricLike }
    }

    pub fn by_name(name: &str, dim: usize) -> Option<Self> {
        match name {
            "flat" => Some(Self::flat(dim)),
            "quadric-like" => Some(Self::quadric_like(dim)),
            _ => None,
        }
    }

    /// Metric value at full base coordinates w = (z_1, …, z_n).
    pub fn h(&self, w: &[Complex64]) -> f64 {
        match self.kind {
            HKind::Flat => 1.0,
            HKind::QuadricLike => 1.0 / (1.0 + w.iter().map(|z| z.norm_sqr()).sum::<f64>()),
        }
    }

    /// ∂h/∂z_j at w.
    pub fn h_z(&self, w: &[Complex64], j: usize) -> Complex64 {
        match self.kind {
            HKind::Flat => Complex64::new(0.0, 0.0),
            HKind::QuadricLike => {
                let s = 1.0 + w.iter().map(|z| z.norm_sqr()).sum::<f64>();
                -w[j].conj() / (s * s)
            }
        }
    }

    /// Base coordinates with the fiber slice substituted: (z', z_n = λt).
    pub fn base_with_fiber(&self, z_prime: &[Complex64], t: Complex64, lambda: Complex64) -> Vec<Complex64> {
        let mut w = z_prime.to_vec();
        w.push(lambda * t);
        w
    }

    /// Defining function `r = h(z', λt)·|t|²`; the boundary of the model
    /// neighborhood is `{r = 1}`.
    pub fn r(&self, z_prime: &[Complex64], t: Complex64, lambda: Complex64) -> f64 {
        let w = self.base_with_fiber(z_prime, t, lambda);
        self.h(&w) * t.norm_sqr()
    }

    /// Wirtinger derivative ∂r/∂t.
    pub fn r_t(&self, z_prime: &[Complex64], t: Complex64, lambda: Complex64) -> Complex64 {
        let w = self.base_with_fiber(z_prime, t, lambda);
        self.h_z(&w, self.dim - 1) * lambda * t.norm_sqr() + self.h(&w) * t.conj()
    }

    /// Wirtinger derivative ∂r/∂z_i for a base direction i < n − 1.
    pub fn r_i(&self, z_prime: &[Complex64], t: Complex64, lambda: Complex64, i: usize) -> Complex64 {
        let w = self.base_with_fiber(z_prime, t, lambda);
        self.h_z(&w, i) * t.norm_sqr()
    }

    /// Model potential `u₀ = log 1/r`, the HCMA solution of the undeformed
    /// bundle picture.
    pub fn u0(&self, z_prime: &[Complex64], t: Complex64, lambda: Complex64) -> f64 {
        -self.r(z_prime, t, lambda).ln()
    }

    /// Metric restricted to the divisor slice, `h(z', 0)`.
    pub fn h_base(&self, z_prime: &[Complex64]) -> f64 {
        let w = self.base_with_fiber(z_prime, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        self.h(&w)
    }

    /// Worst defect among the center normalizations: h(0) = 1, first
    /// derivatives 0, pure second derivatives 0, mixed Hessian −δ_{jk}
    /// (finite differences; the last one is what makes the centered model
    /// disk carry second variation 2·Identity).
    pub fn center_normalization_defect(&self) -> f64 {
        let n = self.dim;
        let hh = 1e-4;
        let mut worst = (self.h(&vec![Complex64::new(0.0, 0.0); n]) - 1.0).abs();
        let basis = |j: usize, re: bool, s: f64| -> Vec<Complex64> {
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            w[j] = if re { Complex64::new(s, 0.0) } else { Complex64::new(0.0, s) };
            w
        };
        for j in 0..n {
            for re in [true, false] {
                let d = (self.h(&basis(j, re, hh)) - self.h(&basis(j, re, -hh))) / (2.0 * hh);
                worst = worst.max(d.abs());
            }
        }
        for j in 0..n {
            for k in 0..n {
                // Mixed Hessian ∂²h/∂z_j∂z̄_k at 0 via the real 4-point stencil.
                let mut second = Complex64::new(0.0, 0.0);
                for (rj, sj) in [(true, 1.0), (true, -1.0), (false, 1.0), (false, -1.0)] {
                    for (rk, sk) in [(true, 1.0), (true, -1.0), (false, 1.0), (false, -1.0)] {
                        let mut w = vec![Complex64::new(0.0, 0.0); n];
                        let ej = if rj { Complex64::new(sj * hh, 0.0) } else { Complex64::new(0.0, sj * hh) };
                        let ek = if rk { Complex64::new(sk * hh, 0.0) } else { Complex64::new(0.0, sk * hh) };
                        if j == k {
                            w[j] = ej + ek;
                        } else {
                            w[j] = ej;
                            w[k] = ek;
                        }
                        let v = self.h(&w);
                        let wj = 0.25 * sj * if rj { Complex64::new(1.0, 0.0) } else { -Complex64::i() } / hh;
                        let wk = 0.25 * sk * if rk { Complex64::new(1.0, 0.0) } else { Complex64::i() } / hh;
                        second += v * wj * wk;
                    }
                }
                let expect = if j == k { -1.0 } else { 0.0 };
                worst = worst.max((second - expect).norm());
            }
        }
        worst
    }
}

/// Truncated Fourier representation of a boundary loop ∂△ → chart
/// coordinates: components `(f_1, …, f_{n−1}, f_n)`, holomorphic by
/// representation (modes 0..=n_modes only).
#[derive(Debug, Clone)]
pub struct BoundaryDisk {
    /// `fourier[c][k]` is the ζ^k coefficient of component c; the last
    /// component is the fiber coordinate.
    pub fourier: Vec<Vec<Complex64>>,
    /// Base point on the divisor, `f_i(0)` for i < n − 1.
    pub z_prime: Vec<Complex64>,
    pub lambda: Complex64,
    pub n_modes: usize,
}

impl BoundaryDisk {
    /// Assemble from per-component Fourier coefficients.
    pub fn from_fourier(fourier: Vec<Vec<Complex64>>, lambda: Complex64) -> Self {
        let n_modes = fourier.iter().map(|c| c.len()).max().unwrap_or(1) - 1;
        let z_prime = fourier[..fourier.len() - 1].iter().map(|c| c[0]).collect();
        BoundaryDisk { fourier, z_prime, lambda, n_modes }
    }

    pub fn components(&self) -> usize {
        self.fourier.len()
    }

    /// Grid values of one component.
    pub fn component_values(&self, comp: usize, grid_len: usize) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len];
        for (k, &c) in self.fourier[comp].iter().enumerate() {
            if k < grid_len {
                coeffs[k] += c;
            }
        }
        spectral::coeffs_to_values(&coeffs)
    }

    /// All components on the grid.
    pub fn values_on_grid(&self, grid_len: usize) -> Vec<Vec<Complex64>> {
        (0..self.components()).map(|c| self.component_values(c, grid_len)).collect()
    }

    /// f(ζ) anywhere on the closed disk.
    pub fn values_at(&self, zeta: Complex64) -> Vec<Complex64> {
        self.fourier.iter().map(|c| spectral::eval_power_series(c, zeta)).collect()
    }

    /// ∂f/∂ζ(ζ).
    pub fn derivative_at(&self, zeta: Complex64) -> Vec<Complex64> {
        self.fourier.iter().map(|c| spectral::eval_power_series_derivative(c, zeta)).collect()
    }

    /// ∂f_n/∂ζ(0): the mode-1 coefficient of the fiber component.
    pub fn fiber_derivative_at_zero(&self) -> Complex64 {
        self.fourier[self.components() - 1].get(1).copied().unwrap_or_default()
    }

    /// Max |r(f) − 1| over the boundary grid.
    pub fn boundary_residual(&self, model: &HermitianModel, grid_len: usize) -> f64 {
        let values = self.values_on_grid(grid_len);
        let mut worst = 0.0f64;
        for j in 0..grid_len {
            let z_prime: Vec<Complex64> = (0..self.components() - 1).map(|c| values[c][j]).collect();
            let t = values[self.components() - 1][j];
            worst = worst.max((model.r(&z_prime, t, self.lambda) - 1.0).abs());
        }
        worst
    }

    /// Reparametrize by the rotation ζ ↦ e^{iα}ζ chosen so that
    /// ∂f_n/∂ζ(0) lands on the positive real axis.
    pub fn normalize_rotation(&self) -> Self {
        let d = self.fiber_derivative_at_zero();
        if d.norm() == 0.0 {
            return self.clone();
        }
        let alpha = -d.arg();
        let mut fourier = self.fourier.clone();
        for comp in &mut fourier {
            for (k, c) in comp.iter_mut().enumerate() {
                *c *= Complex64::from_polar(1.0, alpha * k as f64);
            }
        }
        BoundaryDisk { fourier, z_prime: self.z_prime.clone(), lambda: self.lambda, n_modes: self.n_modes }
    }

    /// Energy fraction carried by the trailing quarter of the kept modes,
    /// per component (spectral resolution monitor).
    pub fn tail_energy_fraction(&self) -> f64 {
        let mut worst = 0.0f64;
        for comp in &self.fourier {
            let total: f64 = comp.iter().skip(1).map(|c| c.norm_sqr()).sum();
            if total == 0.0 {
                continue;
            }
            let start = comp.len() - comp.len() / 4;
            let tail: f64 = comp[start..].iter().map(|c| c.norm_sqr()).sum();
            worst = worst.max(tail / total);
        }
        worst
    }

    /// Discrete embeddedness scan: the boundary loop must not
    /// self-intersect and the fiber component must wind exactly once.
    pub fn embeddedness_check(&self, grid_len: usize) -> Result<(), DiskError> {
        let values = self.values_on_grid(grid_len);
        let n = self.components();
        let points: Vec<Vec<Complex64>> =
            (0..grid_len).map(|j| (0..n).map(|c| values[c][j]).collect()).collect();
        // Far-apart parameter angles must stay far apart in the chart.
        let min_sep = 3usize;
        for i in 0..grid_len {
            for j in (i + min_sep)..grid_len {
                if grid_len - (j - i) < min_sep {
                    continue;
                }
                let dist: f64 =
                    points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                if dist < 1e-6 {
                    return Err(DiskError::Embeddedness(format!(
                        "boundary points {i} and {j} collide (distance {dist:.3e})"
                    )));
                }
            }
        }
        let fiber = &values[n - 1];
        let mut winding = 0.0;
        for j in 0..grid_len {
            let a = fiber[j];
            let b = fiber[(j + 1) % grid_len];
            winding += (b / a).arg();
        }
        let w = (winding / std::f64::consts::TAU).round() as i64;
        if w != 1 {
            return Err(DiskError::Embeddedness(format!("fiber winding {w} ≠ 1")));
        }
        Ok(())
    }

    /// Competitor normalizations: vanishing fiber mode 0 and real positive
    /// fiber derivative at the center.
    pub fn competitor_defect(&self) -> f64 {
        let fiber = &self.fourier[self.components() - 1];
        let d = self.fiber_derivative_at_zero();
        fiber[0].norm() + d.im.abs() + if d.re <= 0.0 { 1.0 } else { 0.0 }
    }
}

/// Check that |θ₀| stays inside the perturbative window.
pub(crate) fn check_theta0(theta0: f64) -> Result<(), DiskError> {
    if theta0.abs() >= std::f64::consts::FRAC_PI_2 - tol::THETA0_MARGIN {
        return Err(DiskError::Theta0OutOfRange(theta0));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadric_model_is_center_normalized() {
        let model = HermitianModel::quadric_like(2);
        let defect = model.center_normalization_defect();
        assert!(defect < 1e-7, "normalization defect {defect:.3e}");
    }

    #[test]
    fn flat_model_r_is_squared_modulus() {
        let model = HermitianModel::flat(2);
        let z = [Complex64::new(0.3, -0.2)];
        let t = Complex64::new(0.5, 0.1);
        assert!((model.r(&z, t, Complex64::new(0.0, 0.0)) - t.norm_sqr()).abs() < 1e-15);
        assert!((model.r_t(&z, t, Complex64::new(0.0, 0.0)) - t.conj()).norm() < 1e-15);
        assert_eq!(model.r_i(&z, t, Complex64::new(0.0, 0.0), 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn model_disk_winds_once_and_embeds() {
        let model = HermitianModel::quadric_like(2);
        let z_prime = vec![Complex64::new(0.2, 0.1)];
        let scale = 1.0 / model.h_base(&z_prime).sqrt();
        let fourier = vec![
            vec![z_prime[0]],
            vec![Complex64::new(0.0, 0.0), Complex64::new(scale, 0.0)],
        ];
        let disk = BoundaryDisk::from_fourier(fourier, Complex64::new(0.0, 0.0));
        disk.embeddedness_check(128).unwrap();
        assert!(disk.boundary_residual(&model, 128) < 1e-12);
        assert!(disk.competitor_defect() < 1e-12);
    }

    #[test]
    fn rotation_normalization_fixes_phase() {
        let fourier = vec![
            vec![Complex64::new(0.1, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::from_polar(0.8, 0.4)],
        ];
        let disk = BoundaryDisk::from_fourier(fourier, Complex64::new(0.0, 0.0));
        let fixed = disk.normalize_rotation();
        let d = fixed.fiber_derivative_at_zero();
        assert!(d.im.abs() < 1e-15 && d.re > 0.0);
        // Rotation is a reparametrization: values on the rotated circle agree.
        let zeta = Complex64::from_polar(1.0, 1.1);
        let alpha = -disk.fiber_derivative_at_zero().arg();
        let orig = disk.values_at(zeta * Complex64::from_polar(1.0, alpha));
        let rot = fixed.values_at(zeta);
        for (a, b) in orig.iter().zip(&rot) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
