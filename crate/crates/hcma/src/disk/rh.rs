//! Riemann-Hilbert factorization on the boundary circle.
//!
//! A nonvanishing loop `F` of winding number zero splits uniquely as
//! `F = ρ·g` with `ρ > 0` on ∂△ and `g` holomorphic and nonvanishing on
//! △̄ with `|g(0)| = 1`. Taking logarithms reduces this to a Fourier-mode
//! split: negative modes of `log F` feed `log ρ` (completed by Hermitian
//! symmetry), positive modes feed `log g`, and the mean is divided into
//! its real part (ρ) and imaginary part (θ₀ = arg g(0)).

use num_complex::Complex64;

use super::spectral;
use super::DiskError;

/// The factor pair (ρ, g) together with θ₀ = arg g(0).
#[derive(Debug, Clone)]
pub struct RHFactorization {
    /// ρ on the boundary grid (positive).
    pub rho: Vec<f64>,
    /// Power-series coefficients of g (modes 0..).
    pub g_coeffs: Vec<Complex64>,
    /// arg g(0); the linearized theory needs |θ₀| < π/2.
    pub theta0: f64,
    pub grid_len: usize,
}

impl RHFactorization {
    /// g on the boundary grid.
    pub fn g_values(&self) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.grid_len];
        for (k, &c) in self.g_coeffs.iter().enumerate() {
            if k < self.grid_len {
                coeffs[k] = c;
            }
        }
        spectral::coeffs_to_values(&coeffs)
    }

    /// g anywhere on the closed disk.
    pub fn g_at(&self, zeta: Complex64) -> Complex64 {
        spectral::eval_power_series(&self.g_coeffs, zeta)
    }

    /// Max |ρ·g − F| against a reference loop.
    pub fn reconstruction_defect(&self, input: &[Complex64]) -> f64 {
        let g = self.g_values();
        input
            .iter()
            .zip(self.rho.iter().zip(&g))
            .map(|(f, (r, gv))| (f - r * gv).norm())
            .fold(0.0, f64::max)
    }
}

/// Discrete winding number of a nonvanishing loop.
pub fn winding_number(values: &[Complex64]) -> i64 {
    let n = values.len();
    let mut total = 0.0;
    for j in 0..n {
        total += (values[(j + 1) % n] / values[j]).arg();
    }
    (total / std::f64::consts::TAU).round() as i64
}

/// Factor a nonvanishing, winding-zero boundary loop as `ρ·g`.
pub fn rh_factorize(values: &[Complex64]) -> Result<RHFactorization, DiskError> {
    spectral::check_grid(values.len())?;
    let n = values.len();
    let min_mod = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if min_mod < 1e-12 {
        return Err(DiskError::VanishingInput(min_mod));
    }
    let w = winding_number(values);
    if w != 0 {
        return Err(DiskError::Winding(w));
    }

    // Continuous branch of log F along the grid.
    let mut logs = Vec::with_capacity(n);
    let mut arg_prev = values[0].arg();
    for (j, v) in values.iter().enumerate() {
        let raw = v.arg();
        let arg = if j == 0 {
            raw
        } else {
            let mut a = raw;
            while a - arg_prev > std::f64::consts::PI {
                a -= std::f64::consts::TAU;
            }
            while a - arg_prev < -std::f64::consts::PI {
                a += std::f64::consts::TAU;
            }
            a
        };
        arg_prev = arg;
        logs.push(Complex64::new(v.norm().ln(), arg));
    }

    let coeffs = spectral::fft_coeffs(&logs);
    let mut log_g = vec![Complex64::new(0.0, 0.0); n];
    let mut log_rho = vec![Complex64::new(0.0, 0.0); n];
    for (i, &c) in coeffs.iter().enumerate() {
        let k = spectral::signed_mode(i, n);
        if i == n / 2 {
            // Aliased Nyquist mode: assign its real part to log ρ.
            log_rho[i] = Complex64::new(c.re, 0.0);
        } else if k > 0 {
            log_g[i] = c - coeffs[n - i].conj();
            log_rho[i] = coeffs[n - i].conj();
        } else if k < 0 {
            log_rho[i] = c;
        } else {
            log_rho[0] = Complex64::new(c.re, 0.0);
            log_g[0] = Complex64::new(0.0, c.im);
        }
    }
    let theta0 = coeffs[0].im;

    let rho: Vec<f64> =
        spectral::coeffs_to_values(&log_rho).iter().map(|v| v.re.exp()).collect();
    let g_vals: Vec<Complex64> =
        spectral::coeffs_to_values(&log_g).iter().map(|v| v.exp()).collect();
    let (g_coeffs, _) = spectral::to_power_series(&g_vals, n / 2 - 1)?;

    Ok(RHFactorization { rho, g_coeffs, theta0, grid_len: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> Vec<Complex64> {
        spectral::unit_circle(n)
    }

    #[test]
    fn constant_one_factors_trivially() {
        let input = vec![Complex64::new(1.0, 0.0); 64];
        let rh = rh_factorize(&input).unwrap();
        assert!(rh.rho.iter().all(|r| (r - 1.0).abs() < 1e-13));
        assert!((rh.g_at(Complex64::new(0.0, 0.0)) - 1.0).norm() < 1e-13);
        assert!(rh.theta0.abs() < 1e-14);
    }

    #[test]
    fn positive_constants_go_to_rho() {
        let input = vec![Complex64::new(2.0, 0.0); 64];
        let rh = rh_factorize(&input).unwrap();
        assert!(rh.rho.iter().all(|r| (r - 2.0).abs() < 1e-13));
        assert!((rh.g_at(Complex64::new(0.3, 0.2)) - 1.0).norm() < 1e-13);
    }

    #[test]
    fn exponential_loop_recovers_exp_zeta() {
        // F = exp(ζ) on the boundary: log F = ζ is already holomorphic and
        // mean-free, so ρ ≡ 1 and g = exp(ζ).
        let n = 128;
        let input: Vec<Complex64> = circle(n).iter().map(|z| z.exp()).collect();
        let rh = rh_factorize(&input).unwrap();
        assert!(rh.rho.iter().all(|r| (r - 1.0).abs() < 1e-12));
        for k in 0..8 {
            let expect = 1.0 / (1..=k).map(|j| j as f64).product::<f64>().max(1.0);
            assert!(
                (rh.g_coeffs[k] - expect).norm() < 1e-12,
                "coefficient {k}: {} vs {expect}",
                rh.g_coeffs[k]
            );
        }
        assert!(rh.reconstruction_defect(&input) < 1e-12);
    }

    #[test]
    fn winding_input_is_rejected() {
        let n = 64;
        let input: Vec<Complex64> = circle(n).iter().map(|z| 2.0 * z).collect();
        assert!(matches!(rh_factorize(&input), Err(DiskError::Winding(1))));
    }

    #[test]
    fn vanishing_input_is_rejected() {
        let n = 64;
        let input: Vec<Complex64> = circle(n).iter().map(|z| z + 1.0).collect();
        assert!(matches!(rh_factorize(&input), Err(DiskError::VanishingInput(_))));
    }

    #[test]
    fn factorization_is_stable_under_regridding() {
        let loop_fn = |z: Complex64| (0.3 * z + 0.1 * z * z).exp() * (1.2 + 0.2 * (z + 1.0 / z).re);
        let coarse: Vec<Complex64> = circle(256).iter().map(|&z| loop_fn(z)).collect();
        let fine: Vec<Complex64> = circle(512).iter().map(|&z| loop_fn(z)).collect();
        let rh_c = rh_factorize(&coarse).unwrap();
        let rh_f = rh_factorize(&fine).unwrap();
        assert!((rh_c.theta0 - rh_f.theta0).abs() < 1e-9);
        for k in 0..50 {
            assert!((rh_c.g_coeffs[k] - rh_f.g_coeffs[k]).norm() < 1e-9, "mode {k}");
        }
        // ρ agrees on the shared grid points (every other fine point).
        for j in 0..256 {
            assert!((rh_c.rho[j] - rh_f.rho[2 * j]).abs() < 1e-9);
        }
    }

    #[test]
    fn reconstruction_holds_for_generic_smooth_loops() {
        let n = 256;
        let input: Vec<Complex64> = circle(n)
            .iter()
            .map(|z| {
                (0.4 * z - 0.2 * z * z).exp()
                    * Complex64::new(1.5 + 0.3 * (z + 1.0 / z).re, 0.1 * (z - 1.0 / z).im)
            })
            .collect();
        let rh = rh_factorize(&input).unwrap();
        assert!(rh.rho.iter().all(|&r| r > 0.0));
        assert!((rh.g_at(Complex64::new(0.0, 0.0)).norm() - 1.0).abs() < 1e-12);
        assert!(rh.reconstruction_defect(&input) < 1e-10);
    }
}
