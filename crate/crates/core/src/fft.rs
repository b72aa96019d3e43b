//! Centered discrete Fourier transforms and band-limited resampling.
//!
//! Grid sizes are multiples of four, so the centered kernel
//! `e^{-2πi(n-N/2)(j-N/2)/N}` factors as `(-1)^{n+j}` times the standard one.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, PlanCache)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&(n, inverse)) {
            return Arc::clone(f);
        }
        let f = if inverse {
            p.0.plan_fft_inverse(n)
        } else {
            p.0.plan_fft_forward(n)
        };
        p.1.insert((n, inverse), Arc::clone(&f));
        f
    })
}

/// Unnormalized forward FFT in place.
pub fn fft_in_place(x: &mut [Complex64]) {
    if !x.is_empty() {
        plan(x.len(), false).process(x);
    }
}

/// Unnormalized inverse FFT in place.
pub fn ifft_in_place(x: &mut [Complex64]) {
    if !x.is_empty() {
        plan(x.len(), true).process(x);
    }
}

fn alternate(x: &mut [Complex64]) {
    for v in x.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

/// `X[n] = Σ_j x[j] e^{-2πi(n-N/2)(j-N/2)/N}`, in place.
pub fn centered_dft_in_place(x: &mut [Complex64]) {
    debug_assert!(x.len().is_multiple_of(4));
    alternate(x);
    fft_in_place(x);
    alternate(x);
}

/// `x[j] = (1/N) Σ_n X[n] e^{2πi(n-N/2)(j-N/2)/N}`, in place.
pub fn centered_idft_in_place(x: &mut [Complex64]) {
    debug_assert!(x.len().is_multiple_of(4));
    let inv = 1.0 / x.len() as f64;
    alternate(x);
    ifft_in_place(x);
    alternate(x);
    for v in x.iter_mut() {
        *v *= inv;
    }
}

pub fn centered_dft(x: &[Complex64]) -> Vec<Complex64> {
    let mut y = x.to_vec();
    centered_dft_in_place(&mut y);
    y
}

pub fn centered_idft(x: &[Complex64]) -> Vec<Complex64> {
    let mut y = x.to_vec();
    centered_idft_in_place(&mut y);
    y
}

/// Applies `op` to every row of a row-major `rows x cols` array.
pub fn map_rows(data: &mut [Complex64], cols: usize, op: impl Fn(&mut [Complex64])) {
    for row in data.chunks_mut(cols) {
        op(row);
    }
}

/// Applies `op` to every column of a row-major `rows x cols` array.
pub fn map_cols(data: &mut [Complex64], cols: usize, op: impl Fn(&mut [Complex64])) {
    let rows = data.len() / cols;
    let mut buf = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            buf[r] = data[r * cols + c];
        }
        op(&mut buf);
        for r in 0..rows {
            data[r * cols + c] = buf[r];
        }
    }
}

/// Two-dimensional centered DFT of a square row-major array.
pub fn centered_dft2_in_place(data: &mut [Complex64], n: usize) {
    map_rows(data, n, centered_dft_in_place);
    map_cols(data, n, centered_dft_in_place);
}

/// Band-limited two-fold upsampling `N -> 2N` with `y[2j] = x[j]`.
/// The Nyquist coefficient is split evenly between the two output bins.
pub fn upsample2(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let h = n / 2;
    let mut spec = x.to_vec();
    fft_in_place(&mut spec);
    let mut y = vec![Complex64::new(0.0, 0.0); 2 * n];
    y[..h].copy_from_slice(&spec[..h]);
    y[2 * n - h + 1..].copy_from_slice(&spec[h + 1..]);
    y[h] = spec[h] * 0.5;
    y[2 * n - h] = spec[h] * 0.5;
    ifft_in_place(&mut y);
    let inv = 1.0 / n as f64;
    for v in y.iter_mut() {
        *v *= inv;
    }
    y
}

/// Adjoint of [`upsample2`] as a linear map `C^{2N} -> C^N`.
pub fn upsample2_adjoint(y: &[Complex64]) -> Vec<Complex64> {
    let m = y.len();
    let n = m / 2;
    let h = n / 2;
    let mut spec = y.to_vec();
    fft_in_place(&mut spec);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[..h].copy_from_slice(&spec[..h]);
    x[h + 1..].copy_from_slice(&spec[m - h + 1..]);
    x[h] = (spec[h] + spec[m - h]) * 0.5;
    ifft_in_place(&mut x);
    let inv = 1.0 / n as f64;
    for v in x.iter_mut() {
        *v *= inv;
    }
    x
}

/// Cyclic convolution `c[k] = Σ_j a[j] b[(k-j) mod N]`.
pub fn cyclic_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    fft_in_place(&mut fa);
    fft_in_place(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft_in_place(&mut fa);
    let inv = 1.0 / n as f64;
    fa.iter_mut().for_each(|v| *v *= inv);
    fa
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                c(
                    (j as f64 * 0.37).sin() + 0.1 * j as f64,
                    (j as f64 * 1.3).cos(),
                )
            })
            .collect()
    }

    #[test]
    fn centered_dft_matches_direct_sum() {
        let n = 16;
        let x = sample(n);
        let y = centered_dft(&x);
        for k in 0..n {
            let mut s = c(0.0, 0.0);
            for (j, v) in x.iter().enumerate() {
                let ph = -2.0 * PI * (k as f64 - 8.0) * (j as f64 - 8.0) / n as f64;
                s += v * Complex64::from_polar(1.0, ph);
            }
            assert!((s - y[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn centered_roundtrip() {
        let x = sample(64);
        let y = centered_idft(&centered_dft(&x));
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn upsample_interpolates_and_adjoint_is_adjoint() {
        let x = sample(32);
        let y = upsample2(&x);
        for j in 0..32 {
            assert!((y[2 * j] - x[j]).norm() < 1e-12);
        }
        let z = sample(64)
            .iter()
            .map(|v| v * c(0.3, -1.1))
            .collect::<Vec<_>>();
        let lhs: Complex64 = y.iter().zip(&z).map(|(a, b)| a * b.conj()).sum();
        let uz = upsample2_adjoint(&z);
        let rhs: Complex64 = x.iter().zip(&uz).map(|(a, b)| a * b.conj()).sum();
        assert!((lhs - rhs).norm() < 1e-10);
        // U^H U = 2 I on data without a Nyquist component.
        let smooth: Vec<_> = (0..64)
            .map(|j| c((-(j as f64 - 32.0).powi(2) / 16.0).exp(), 0.0))
            .collect();
        let back = upsample2_adjoint(&upsample2(&smooth));
        for j in 0..64 {
            assert!((back[j] - smooth[j] * 2.0).norm() < 1e-10);
        }
    }

    #[test]
    fn cyclic_convolution_direct() {
        let a = sample(16);
        let b: Vec<_> = sample(16).iter().rev().cloned().collect();
        let cv = cyclic_convolve(&a, &b);
        for k in 0..16 {
            let s: Complex64 = (0..16).map(|j| a[j] * b[(k + 16 - j) % 16]).sum();
            assert!((s - cv[k]).norm() < 1e-11);
        }
    }
}
