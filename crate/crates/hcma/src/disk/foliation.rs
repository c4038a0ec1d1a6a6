//! Assembly of extremal disks into a foliation chart, the pulled-back
//! potential `u_λ`, and the Levi / tangency verification reports.
//!
//! The chart is the family `H(z', λ)` of extremal disks over a grid of
//! divisor points, with `Ψ_λ(z', t) = H(z', λ)(h^{1/2}(z')·t)` mapping the
//! undeformed model to the deformed neighborhood. The potential
//! `u_λ = Φ_λ^* u₀` is evaluated by locating the leaf through a point
//! (a small Newton solve in `(z', ζ)`) and reading off `log 1/|ζ|²`; on
//! every leaf this is exact by construction, `u_λ(f(ζ)) + log|ζ|² = 0`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;

use super::newton::{newton_disk, NewtonOptions};
use super::spectral;
use super::variation::{boundary_data, grad_energy_with};
use super::{BoundaryDisk, DiskError, HermitianModel};
use crate::tol;

/// One solved grid disk of the chart.
#[derive(Debug, Clone)]
pub struct ChartDisk {
    pub z_prime: Complex64,
    pub disk: BoundaryDisk,
    pub energy: f64,
    pub grad_norm: f64,
}

/// Sampled family of extremal disks through a divisor grid, with the
/// leaf-locating evaluator for `u_λ`. Reentrant; the internal disk cache
/// is behind a mutex.
pub struct FoliationChart {
    pub model: HermitianModel,
    pub lambda: Complex64,
    pub grid: Vec<ChartDisk>,
    pub opts: NewtonOptions,
    cache: Mutex<HashMap<(i64, i64), BoundaryDisk>>,
}

impl std::fmt::Debug for FoliationChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FoliationChart")
            .field("lambda", &self.lambda)
            .field("grid_len", &self.grid.len())
            .finish()
    }
}

/// Solve the extremal family over a divisor grid and verify the foliation
/// property on samples (distinct leaves must stay disjoint off the
/// divisor).
pub fn assemble_foliation(
    model: &HermitianModel,
    lambda: Complex64,
    z_grid: &[Complex64],
    opts: &NewtonOptions,
) -> Result<FoliationChart, DiskError> {
    if model.dim != 2 {
        return Err(DiskError::RejectedInput(
            "foliation charts are built for complex dimension 2".into(),
        ));
    }
    // The evaluator differentiates the family; solve the grid to a tighter
    // gradient tolerance than the public acceptance threshold.
    let opts = NewtonOptions { grad_tol: opts.grad_tol.min(1e-12), ..*opts };
    let mut grid = Vec::with_capacity(z_grid.len());
    let mut prev: Option<BoundaryDisk> = None;
    for &z in z_grid {
        // Continuation in λ from scratch for the first point, then reuse
        // neighbors across the grid at the target λ.
        let res = match &prev {
            None => newton_disk(model, &[z], lambda, None, &opts)?,
            Some(p) => {
                let mut init = p.clone();
                init.fourier[0][0] = z;
                init.z_prime = vec![z];
                match newton_disk(model, &[z], lambda, Some(&init), &opts) {
                    Ok(r) => r,
                    Err(_) => newton_disk(model, &[z], lambda, None, &opts)?,
                }
            }
        };
        prev = Some(res.disk.clone());
        grid.push(ChartDisk { z_prime: z, disk: res.disk, energy: res.energy, grad_norm: res.grad_norm });
    }

    let chart = FoliationChart { model: *model, lambda, grid, opts, cache: Mutex::new(HashMap::new()) };
    chart.check_disjoint_on_samples()?;
    Ok(chart)
}

fn quantize(z: Complex64) -> (i64, i64) {
    ((z.re * 1e10).round() as i64, (z.im * 1e10).round() as i64)
}

impl FoliationChart {
    /// Rebuild a chart from stored parts (deserialized reports).
    pub fn from_parts(
        model: HermitianModel,
        lambda: Complex64,
        grid: Vec<ChartDisk>,
        opts: NewtonOptions,
    ) -> Self {
        let opts = NewtonOptions { grad_tol: opts.grad_tol.min(1e-12), ..opts };
        FoliationChart { model, lambda, grid, opts, cache: Mutex::new(HashMap::new()) }
    }

    fn nearest_grid_disk(&self, z: Complex64) -> &ChartDisk {
        self.grid
            .iter()
            .min_by(|a, b| {
                (a.z_prime - z).norm().total_cmp(&(b.z_prime - z).norm())
            })
            .expect("chart grid is nonempty")
    }

    /// Extremal disk through an arbitrary divisor point (cached).
    pub fn disk_at(&self, z_prime: Complex64) -> Result<BoundaryDisk, DiskError> {
        self.disk_at_with_hint(z_prime, None)
    }

    fn disk_at_with_hint(
        &self,
        z_prime: Complex64,
        hint: Option<&BoundaryDisk>,
    ) -> Result<BoundaryDisk, DiskError> {
        let key = quantize(z_prime);
        if let Some(found) = self.cache.lock().unwrap().get(&key) {
            return Ok(found.clone());
        }
        let base = match hint {
            Some(h) => h.clone(),
            None => self.nearest_grid_disk(z_prime).disk.clone(),
        };
        let mut init = base;
        init.fourier[0][0] = z_prime;
        init.z_prime = vec![z_prime];
        let res = newton_disk(&self.model, &[z_prime], self.lambda, Some(&init), &self.opts)?;
        self.cache.lock().unwrap().insert(key, res.disk.clone());
        Ok(res.disk)
    }

    /// `Ψ_λ(z', t) = H(z', λ)(h^{1/2}(z')·t)`, the chart map from the
    /// undeformed model to the deformed neighborhood.
    pub fn psi(&self, z_prime: Complex64, t: Complex64) -> Result<Vec<Complex64>, DiskError> {
        let disk = self.disk_at(z_prime)?;
        let zeta = self.model.h_base(&[z_prime]).sqrt() * t;
        Ok(disk.values_at(zeta))
    }

    /// Locate the leaf through a point: returns `(z', ζ)` with
    /// `H(z', λ)(ζ) = p`.
    pub fn locate_leaf(&self, p: &[Complex64]) -> Result<(Complex64, Complex64), DiskError> {
        if p.len() != 2 {
            return Err(DiskError::RejectedInput("points live in complex dimension 2".into()));
        }
        // Undeformed-model guess: base point and rescaled fiber.
        let mut z = p[0];
        let mut zeta = self.model.h_base(&[p[0]]).sqrt() * p[1];
        let scale = 1.0 + p.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let fd = 1e-6;
        let mut center = self.disk_at(z)?;
        for _ in 0..40 {
            let val = center.values_at(zeta);
            let res = [val[0] - p[0], val[1] - p[1]];
            let rnorm = (res[0].norm_sqr() + res[1].norm_sqr()).sqrt();
            if rnorm < 1e-13 * scale {
                return Ok((z, zeta));
            }
            // Real 4×4 Jacobian: columns Re z', Im z', Re ζ, Im ζ.
            let dzeta = center.derivative_at(zeta);
            let east = self.disk_at_with_hint(z + fd, Some(&center))?.values_at(zeta);
            let west = self.disk_at_with_hint(z - fd, Some(&center))?.values_at(zeta);
            let north = self.disk_at_with_hint(z + Complex64::i() * fd, Some(&center))?.values_at(zeta);
            let south = self.disk_at_with_hint(z - Complex64::i() * fd, Some(&center))?.values_at(zeta);
            let mut jac = [[0.0f64; 4]; 4];
            let mut rhs = [0.0f64; 4];
            for row_c in 0..2 {
                let d_re = (east[row_c] - west[row_c]) / (2.0 * fd);
                let d_im = (north[row_c] - south[row_c]) / (2.0 * fd);
                let cols = [d_re, d_im, dzeta[row_c], Complex64::i() * dzeta[row_c]];
                for (col, d) in cols.iter().enumerate() {
                    jac[2 * row_c][col] = d.re;
                    jac[2 * row_c + 1][col] = d.im;
                }
                rhs[2 * row_c] = -res[row_c].re;
                rhs[2 * row_c + 1] = -res[row_c].im;
            }
            let step = solve4(&mut jac, &mut rhs).ok_or_else(|| {
                DiskError::LeafLocate("singular leaf-locating Jacobian".into())
            })?;
            z += Complex64::new(step[0], step[1]);
            zeta += Complex64::new(step[2], step[3]);
            if zeta.norm() > 1.5 || z.norm() > 2.0 {
                return Err(DiskError::LeafLocate(format!(
                    "iterate left the chart: z' = {z}, |ζ| = {:.3}",
                    zeta.norm()
                )));
            }
            center = self.disk_at_with_hint(z, Some(&center))?;
        }
        Err(DiskError::LeafLocate("no convergence in 40 iterations".into()))
    }

    /// The pulled-back potential `u_λ(p) = log 1/|ζ|²` on the leaf through p.
    pub fn u_lambda(&self, p: &[Complex64]) -> Result<f64, DiskError> {
        let (_, zeta) = self.locate_leaf(p)?;
        if zeta.norm() < 1e-8 {
            return Err(DiskError::LeafLocate("point sits on the divisor".into()));
        }
        Ok(-2.0 * zeta.norm().ln())
    }

    /// Wirtinger gradient (u_1, u_t) of `u_λ` by central differences.
    pub fn u_gradient(&self, p: &[Complex64], h: f64) -> Result<[Complex64; 2], DiskError> {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (i, slot) in out.iter_mut().enumerate() {
            let shifted = |dz: Complex64| -> Result<f64, DiskError> {
                let mut q = p.to_vec();
                q[i] += dz;
                self.u_lambda(&q)
            };
            let dx = (shifted(Complex64::new(h, 0.0))? - shifted(Complex64::new(-h, 0.0))?) / (2.0 * h);
            let dy = (shifted(Complex64::new(0.0, h))? - shifted(Complex64::new(0.0, -h))?) / (2.0 * h);
            *slot = Complex64::new(dx, -dy) * 0.5;
        }
        Ok(out)
    }

    /// Mixed complex Hessian `u_{i j̄}` and gradient by Richardson-refined
    /// central differences.
    pub fn u_hessian(
        &self,
        p: &[Complex64],
        h: f64,
    ) -> Result<([Complex64; 2], [[Complex64; 2]; 2]), DiskError> {
        let coord = |x: &[f64; 4]| -> Vec<Complex64> {
            vec![Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])]
        };
        let x0 = [p[0].re, p[0].im, p[1].re, p[1].im];
        let eval = |x: &[f64; 4]| -> Result<f64, DiskError> { self.u_lambda(&coord(x)) };

        let real_hessian = |h: f64| -> Result<([f64; 4], [[f64; 4]; 4]), DiskError> {
            let mut grad = [0.0f64; 4];
            let mut hess = [[0.0f64; 4]; 4];
            let center = eval(&x0)?;
            let shift = |da: usize, sa: f64, db: usize, sb: f64| -> Result<f64, DiskError> {
                let mut x = x0;
                x[da] += sa * h;
                x[db] += sb * h;
                eval(&x)
            };
            for a in 0..4 {
                let plus = shift(a, 1.0, a, 0.0)?;
                let minus = shift(a, -1.0, a, 0.0)?;
                grad[a] = (plus - minus) / (2.0 * h);
                hess[a][a] = (plus - 2.0 * center + minus) / (h * h);
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    let pp = shift(a, 1.0, b, 1.0)?;
                    let pm = shift(a, 1.0, b, -1.0)?;
                    let mp = shift(a, -1.0, b, 1.0)?;
                    let mm = shift(a, -1.0, b, -1.0)?;
                    let v = (pp - pm - mp + mm) / (4.0 * h * h);
                    hess[a][b] = v;
                    hess[b][a] = v;
                }
            }
            Ok((grad, hess))
        };

        // One Richardson refinement (h, h/2) removes the leading h² error.
        let (g1, h1) = real_hessian(h)?;
        let (g2, h2) = real_hessian(h / 2.0)?;
        let mut grad = [0.0f64; 4];
        let mut hess = [[0.0f64; 4]; 4];
        for a in 0..4 {
            grad[a] = (4.0 * g2[a] - g1[a]) / 3.0;
            for b in 0..4 {
                hess[a][b] = (4.0 * h2[a][b] - h1[a][b]) / 3.0;
            }
        }

        let mut wirt_grad = [Complex64::new(0.0, 0.0); 2];
        let mut wirt_hess = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            wirt_grad[i] = Complex64::new(grad[2 * i], -grad[2 * i + 1]) * 0.5;
            for j in 0..2 {
                let re = hess[2 * i][2 * j] + hess[2 * i + 1][2 * j + 1];
                let im = hess[2 * i][2 * j + 1] - hess[2 * i + 1][2 * j];
                wirt_hess[i][j] = 0.25 * Complex64::new(re, im);
            }
        }
        Ok((wirt_grad, wirt_hess))
    }

    /// Max over sampled leaf pairs of an approach closer than the
    /// disjointness threshold.
    fn check_disjoint_on_samples(&self) -> Result<(), DiskError> {
        let radii = [0.35, 0.65, 1.0];
        let angles = 12;
        let mut clouds: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(self.grid.len());
        for entry in &self.grid {
            let mut pts = Vec::new();
            for &r in &radii {
                for a in 0..angles {
                    let zeta = Complex64::from_polar(r, std::f64::consts::TAU * a as f64 / angles as f64);
                    pts.push(entry.disk.values_at(zeta));
                }
            }
            clouds.push(pts);
        }
        for i in 0..clouds.len() {
            for j in i + 1..clouds.len() {
                let mut min_d = f64::INFINITY;
                for a in &clouds[i] {
                    for b in &clouds[j] {
                        let d: f64 =
                            a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                        min_d = min_d.min(d);
                    }
                }
                if min_d < 1e-6 {
                    return Err(DiskError::LeafCollision(i, j, min_d));
                }
            }
        }
        Ok(())
    }

    /// Sup over boundary samples of |u_λ| (vanishes on the boundary).
    pub fn boundary_potential_sup(&self, samples: usize) -> Result<f64, DiskError> {
        let mut worst = 0.0f64;
        for entry in &self.grid {
            for a in 0..samples {
                let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / samples as f64);
                let p = entry.disk.values_at(zeta);
                worst = worst.max(self.u_lambda(&p)?.abs());
            }
        }
        Ok(worst)
    }

    /// Sup over samples of the construction identity
    /// `u_λ(f(ζ)) + log|ζ|² = 0` along assembled leaves.
    pub fn leaf_exactness_sup(&self, radii: &[f64], angles: usize) -> Result<f64, DiskError> {
        let mut worst = 0.0f64;
        for entry in &self.grid {
            for &r in radii {
                for a in 0..angles {
                    let zeta = Complex64::from_polar(r, std::f64::consts::TAU * a as f64 / angles as f64);
                    let p = entry.disk.values_at(zeta);
                    let u = self.u_lambda(&p)?;
                    worst = worst.max((u + 2.0 * r.ln()).abs());
                }
            }
        }
        Ok(worst)
    }
}

fn solve4(a: &mut [[f64; 4]; 4], b: &mut [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Levi data at one sample point.
#[derive(Debug, Clone, Copy)]
pub struct LeviSample {
    pub point: [Complex64; 2],
    /// det of the bordered complex Hessian (real up to noise).
    pub det: f64,
    /// `|det|·|t|²` — bounded above and below along the scan.
    pub det_scaled: f64,
    /// Levi form on the complex tangent of the level set (positive for
    /// strict pseudoconvexity).
    pub restricted: f64,
    /// Hessian component along the leaf direction (≈ 0; rank n−1).
    pub leaf_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct LeviReport {
    pub samples: Vec<LeviSample>,
    pub sign: f64,
    pub band: (f64, f64),
}

impl LeviReport {
    pub fn band_ratio(&self) -> f64 {
        self.band.1 / self.band.0
    }
}

/// Evaluate the bordered complex Hessian of `u_λ` across samples, checking
/// sign constancy of the determinant, the `Θ(1/|t|²)` magnitude, strict
/// positivity on the complex tangent directions, and degeneracy along the
/// leaves.
pub fn levi_verify(
    chart: &FoliationChart,
    samples: &[(Complex64, Complex64)],
) -> Result<LeviReport, DiskError> {
    let mut rows = Vec::with_capacity(samples.len());
    for &(z1, t) in samples {
        let p = vec![z1, t];
        let (grad, hess) = chart.u_hessian(&p, 8e-3)?;
        // Bordered 3×3 determinant, expanded along the first row.
        let det3 = |m: &[[Complex64; 3]; 3]| -> Complex64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let zero = Complex64::new(0.0, 0.0);
        let levi = [
            [zero, grad[0].conj(), grad[1].conj()],
            [grad[0], hess[0][0], hess[0][1]],
            [grad[1], hess[1][0], hess[1][1]],
        ];
        let det = det3(&levi);

        // Complex tangent direction of the level set: v ⟂ ∂u.
        let v = [grad[1], -grad[0]];
        let vn = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let mut restricted = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                restricted += hess[i][j] * v[i] * v[j].conj();
            }
        }
        let restricted = restricted.re / (vn * vn);

        // Leaf-direction component via the construction identity: the
        // residual u(f(ζ(1+s))) + log|ζ(1+s)|² vanishes identically, so its
        // discrete Laplacian measures exactly the leaf Hessian component.
        let (zp, zeta) = chart.locate_leaf(&p)?;
        let leaf_disk = chart.disk_at(zp)?;
        let hs = 0.05;
        let residual = |s: Complex64| -> Result<f64, DiskError> {
            let zz = zeta * (1.0 + s);
            let q = leaf_disk.values_at(zz);
            Ok(chart.u_lambda(&q)? + 2.0 * zz.norm().ln())
        };
        let lap = (residual(Complex64::new(hs, 0.0))?
            + residual(Complex64::new(-hs, 0.0))?
            + residual(Complex64::new(0.0, hs))?
            + residual(Complex64::new(0.0, -hs))?
            - 4.0 * residual(zero)?)
            / (hs * hs);
        let tangent = leaf_disk.derivative_at(zeta);
        let tnorm: f64 = tangent.iter().map(|c| c.norm_sqr()).sum::<f64>() * zeta.norm_sqr();
        let leaf_eigenvalue = (lap / 4.0).abs() / tnorm.max(1e-30);

        rows.push(LeviSample {
            point: [z1, t],
            det: det.re,
            det_scaled: det.re.abs() * t.norm_sqr(),
            restricted,
            leaf_eigenvalue,
        });
    }

    let sign = rows[0].det.signum();
    if rows.iter().any(|r| r.det.signum() != sign) {
        return Err(DiskError::SignatureFlip);
    }
    let band = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.det_scaled), hi.max(r.det_scaled))
    });
    Ok(LeviReport { samples: rows, sign, band })
}

/// Tangency data along one leaf.
#[derive(Debug, Clone)]
pub struct TangencyReport {
    /// Sup over interior samples of `‖β + ζ·∂u_λ‖` after the `pρ ≡ 1`
    /// scaling.
    pub sup_residual: f64,
    /// Largest negative-mode energy among the `r_ℓ/ρ` (criticality).
    pub neg_mode_energy_max: f64,
    /// Oscillation of `p·ρ` around its mean on the boundary.
    pub p_rho_oscillation: f64,
    /// The constant `c = mean(p·ρ)` used for the scaling.
    pub scale: f64,
}

/// Verify `β = −ζ ∂u_λ` along the extremal leaf through `z'` (criticality
/// enforced).
pub fn tangency_verify(chart: &FoliationChart, z_prime: Complex64) -> Result<TangencyReport, DiskError> {
    let disk = chart.disk_at(z_prime)?;
    let report = tangency_residual(chart, &disk)?;
    if report.neg_mode_energy_max > tol::NEG_MODE_ENERGY {
        return Err(DiskError::RejectedInput(format!(
            "disk is not critical: negative-mode energy {:.3e}",
            report.neg_mode_energy_max
        )));
    }
    Ok(report)
}

/// Tangency residual of an arbitrary disk (no criticality gate; used for
/// negative controls).
pub fn tangency_residual(chart: &FoliationChart, disk: &BoundaryDisk) -> Result<TangencyReport, DiskError> {
    let model = &chart.model;
    let grid_len = chart.opts.grid_len;
    let data = boundary_data(model, disk, grid_len)?;
    let grad = grad_energy_with(&data)?;
    let neg_max = grad.neg_mode_energy.iter().fold(0.0f64, |a, &b| a.max(b));

    // Holomorphic extension g₁ of r₁/ρ and the factor g from ζ·r_t = ρ·g.
    let ratio: Vec<Complex64> =
        data.r_base[0].iter().zip(&data.rh.rho).map(|(r, rho)| r / rho).collect();
    let (g1_coeffs, _) = spectral::to_power_series(&ratio, grid_len / 2 - 1)?;

    // p = −u_t/r_t on a boundary subsample; p·ρ must be a positive constant.
    let fd = 1e-4;
    let sub = 16usize;
    let mut prho = Vec::with_capacity(sub);
    for a in 0..sub {
        let j = a * grid_len / sub;
        let p: Vec<Complex64> = (0..2).map(|c| data.f_values[c][j]).collect();
        let du = chart.u_gradient(&p, fd)?;
        let ratio = -du[1] / data.r_t[j];
        prho.push(ratio.re * data.rh.rho[j]);
    }
    let c = prho.iter().sum::<f64>() / sub as f64;
    let osc = prho.iter().map(|v| (v - c).abs()).fold(0.0, f64::max);

    // Interior comparison of c·(ζ g₁, g) against −ζ·(u_1, u_t) along the leaf.
    let mut sup = 0.0f64;
    for &r in &[0.4, 0.6, 0.8] {
        for a in 0..12 {
            let zeta = Complex64::from_polar(r, std::f64::consts::TAU * a as f64 / 12.0);
            let p = disk.values_at(zeta);
            let du = chart.u_gradient(&p, fd)?;
            let beta_base = c * zeta * spectral::eval_power_series(&g1_coeffs, zeta);
            let beta_fiber = c * data.rh.g_at(zeta);
            let res_base = (beta_base + zeta * du[0]).norm();
            let res_fiber = (beta_fiber + zeta * du[1]).norm();
            sup = sup.max(res_base).max(res_fiber);
        }
    }
    Ok(TangencyReport { sup_residual: sup, neg_mode_energy_max: neg_max, p_rho_oscillation: osc, scale: c })
}

/// Default interior sample points for the Levi scan.
pub fn default_levi_samples() -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    for &z in &[Complex64::new(0.0, 0.0), Complex64::new(0.1, 0.05), Complex64::new(-0.12, 0.08)] {
        for &(tr, ta) in &[(0.45, 0.3), (0.6, 2.1), (0.75, 4.4)] {
            out.push((z, Complex64::from_polar(tr, ta)));
        }
    }
    out
}
