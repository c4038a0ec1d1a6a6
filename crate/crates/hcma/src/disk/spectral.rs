//! Boundary-circle spectral operators.
//!
//! Functions on ∂△ are held as values on the uniform grid θ_j = 2πj/N,
//! N a power of two. Mode index convention: FFT bin `k ≤ N/2` is the
//! signed mode `k`, bin `k > N/2` is `k − N`; the Nyquist bin `N/2` is
//! aliased with `−N/2` and is treated as a negative mode (dropped by the
//! analytic projections, zeroed by the Hilbert multiplier — its harmonic
//! conjugate `sin(Nθ/2)` vanishes identically on the grid).

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::DiskError;

pub const MIN_GRID: usize = 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

/// Fourier coefficients of grid values (normalized so `c_k` multiplies
/// `e^{ikθ}`). Works for any length; spectral operators below insist on
/// powers of two.
pub fn fft_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    plan(n, true).process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Grid values from Fourier coefficients (inverse of [`fft_coeffs`]).
pub fn coeffs_to_values(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    plan(buf.len(), false).process(&mut buf);
    buf
}

/// Signed mode index of FFT bin `i` on a grid of length `n`.
pub fn signed_mode(i: usize, n: usize) -> i64 {
    if i <= n / 2 - 1 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub fn check_grid(n: usize) -> Result<(), DiskError> {
    if n < MIN_GRID || !n.is_power_of_two() {
        return Err(DiskError::BadGrid(n));
    }
    Ok(())
}

/// Grid points `e^{iθ_j}`.
pub fn unit_circle(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
        .collect()
}

pub fn mean(values: &[Complex64]) -> Complex64 {
    values.iter().sum::<Complex64>() / values.len() as f64
}

/// Hilbert transform of a real boundary function: mode k ↦ −i·sign(k),
/// mode 0 ↦ 0. The output is the boundary value of the harmonic conjugate
/// normalized to vanish at the disk center.
pub fn hilbert_transform(values: &[f64]) -> Result<Vec<f64>, DiskError> {
    check_grid(values.len())?;
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(hilbert_complex(&complex)?.iter().map(|c| c.re).collect())
}

/// Complex-linear extension of the Hilbert transform (applied to real and
/// imaginary parts separately, i.e. the same multiplier on each bin).
pub fn hilbert_complex(values: &[Complex64]) -> Result<Vec<Complex64>, DiskError> {
    check_grid(values.len())?;
    let n = values.len();
    let mut coeffs = fft_coeffs(values);
    for (i, c) in coeffs.iter_mut().enumerate() {
        let k = signed_mode(i, n);
        *c = match k.cmp(&0) {
            std::cmp::Ordering::Greater => -Complex64::i() * *c,
            std::cmp::Ordering::Less => Complex64::i() * *c,
            std::cmp::Ordering::Equal => Complex64::new(0.0, 0.0),
        };
        if i == n / 2 {
            // Aliased Nyquist: conjugate of cos(Nθ/2) vanishes on the grid.
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(coeffs_to_values(&coeffs))
}

/// Szegő projection onto boundary values of holomorphic functions
/// vanishing at the center: keeps modes `1 ≤ k < N/2`.
pub fn szego_project(values: &[Complex64]) -> Result<Vec<Complex64>, DiskError> {
    check_grid(values.len())?;
    let n = values.len();
    let mut coeffs = fft_coeffs(values);
    for (i, c) in coeffs.iter_mut().enumerate() {
        if signed_mode(i, n) < 1 || i == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(coeffs_to_values(&coeffs))
}

/// Projection onto modes `0 ≤ k < N/2` (holomorphic part).
pub fn analytic_project(values: &[Complex64]) -> Result<Vec<Complex64>, DiskError> {
    check_grid(values.len())?;
    let n = values.len();
    let mut coeffs = fft_coeffs(values);
    for (i, c) in coeffs.iter_mut().enumerate() {
        if signed_mode(i, n) < 0 || i == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(coeffs_to_values(&coeffs))
}

/// L² energy carried by strictly negative modes (Nyquist included).
pub fn negative_mode_energy(values: &[Complex64]) -> Result<f64, DiskError> {
    check_grid(values.len())?;
    let n = values.len();
    let coeffs = fft_coeffs(values);
    let mut energy = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        if signed_mode(i, n) < 0 || i == n / 2 {
            energy += c.norm_sqr();
        }
    }
    Ok(energy)
}

/// Evaluate `Σ_k coeffs[k] ζ^k` (power series, Horner).
pub fn eval_power_series(coeffs: &[Complex64], zeta: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * zeta + c;
    }
    acc
}

/// Derivative of a power series at ζ.
pub fn eval_power_series_derivative(coeffs: &[Complex64], zeta: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * zeta + c * k as f64;
    }
    acc
}

/// Power-series coefficients (modes `0..n/2`) of grid values that are
/// numerically holomorphic; negative-mode content is reported back.
pub fn to_power_series(values: &[Complex64], n_modes: usize) -> Result<(Vec<Complex64>, f64), DiskError> {
    check_grid(values.len())?;
    let n = values.len();
    let coeffs = fft_coeffs(values);
    let kept = n_modes.min(n / 2 - 1);
    let series = coeffs[..=kept].to_vec();
    let neg = negative_mode_energy(values)?;
    Ok((series, neg))
}

pub fn sup_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Grid values of the monomial variation `c·ζ^k`, k ≥ 1.
pub fn monomial(n: usize, k: usize, c: Complex64) -> Vec<Complex64> {
    unit_circle(n).iter().map(|z| c * z.powu(k as u32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..n).map(|j| f(std::f64::consts::TAU * j as f64 / n as f64)).collect()
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let n = 64;
        let input: Vec<f64> = (0..n).map(|j| (std::f64::consts::TAU * j as f64 / n as f64).cos()).collect();
        let out = hilbert_transform(&input).unwrap();
        for (j, v) in out.iter().enumerate() {
            let expect = (std::f64::consts::TAU * j as f64 / n as f64).sin();
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn hilbert_kills_constants() {
        let out = hilbert_transform(&vec![1.0; 32]).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn hilbert_on_holomorphic_modes_is_minus_i() {
        let n = 128;
        for k in 1..n / 2 {
            let input = grid_fn(n, |t| Complex64::from_polar(1.0, k as f64 * t));
            let out = hilbert_complex(&input).unwrap();
            for (v, w) in out.iter().zip(&input) {
                assert!((v - -Complex64::i() * w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hilbert_squared_removes_mean() {
        let n = 64;
        let input: Vec<f64> = (0..n)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / n as f64;
                0.3 + t.sin() + 0.2 * (3.0 * t).cos() - 0.7 * (11.0 * t).sin()
            })
            .collect();
        let mean: f64 = input.iter().sum::<f64>() / n as f64;
        let twice = hilbert_transform(&hilbert_transform(&input).unwrap()).unwrap();
        for (t, x) in twice.iter().zip(&input) {
            assert!((t + (x - mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn szego_examples() {
        let n = 64;
        let e1 = grid_fn(n, |t| Complex64::from_polar(1.0, t));
        assert!(szego_project(&e1)
            .unwrap()
            .iter()
            .zip(&e1)
            .all(|(a, b)| (a - b).norm() < 1e-13));
        let em1 = grid_fn(n, |t| Complex64::from_polar(1.0, -t));
        assert!(szego_project(&em1).unwrap().iter().all(|c| c.norm() < 1e-13));
        let ones = vec![Complex64::new(1.0, 0.0); n];
        assert!(szego_project(&ones).unwrap().iter().all(|c| c.norm() < 1e-13));
    }

    #[test]
    fn szego_is_idempotent_and_self_adjoint() {
        let n = 64;
        let f = grid_fn(n, |t| Complex64::new(t.cos() + 0.3, (2.0 * t).sin()));
        let g = grid_fn(n, |t| Complex64::new((3.0 * t).cos(), 1.0 - t.sin()));
        let sf = szego_project(&f).unwrap();
        let ssf = szego_project(&sf).unwrap();
        assert!(sf.iter().zip(&ssf).all(|(a, b)| (a - b).norm() < 1e-13));
        // Real L² pairing (1/2π)∫ Re[f ḡ] dθ.
        let pair = |a: &[Complex64], b: &[Complex64]| -> f64 {
            a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>() / n as f64
        };
        let sg = szego_project(&g).unwrap();
        assert!((pair(&sf, &g) - pair(&f, &sg)).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(hilbert_transform(&vec![0.0; 48]).is_err());
        assert!(hilbert_transform(&vec![0.0; 8]).is_err());
        assert!(szego_project(&vec![Complex64::new(0.0, 0.0); 100]).is_err());
    }

    #[test]
    fn power_series_round_trip() {
        let coeffs = vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -0.5),
        ];
        let z = Complex64::new(0.2, 0.4);
        let direct = coeffs[0] + coeffs[1] * z + coeffs[2] * z * z;
        assert!((eval_power_series(&coeffs, z) - direct).norm() < 1e-15);
        let deriv = coeffs[1] + 2.0 * coeffs[2] * z;
        assert!((eval_power_series_derivative(&coeffs, z) - deriv).norm() < 1e-15);
    }
}
