//! Localization, Weyl and rank-one operators as dense matrices, singular
//! values and Schatten quasi-norms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_exponent, Error, Result};
use crate::fft;
use crate::grid::GridSpec;
use crate::signal::{same_grid, SampledSignal, SymbolField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense operator on sampled signals, acting as `(Tf)[i] = Δ Σ_j M[i][j] f[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    grid: GridSpec,
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(grid: GridSpec, entries: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        if let Some(i) = entries
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, entries })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            entries: DMatrix::zeros(n, n),
        }
    }

    /// The operator whose `L²` surrogate `ΔM` equals `matrix`.
    pub fn from_scaled(grid: GridSpec, matrix: DMatrix<Complex64>) -> Result<Self> {
        let inv = 1.0 / grid.spacing();
        Self::new(grid, matrix.map(|z| z * inv))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `ΔM`, the matrix of the operator in the Δ-normalized spike basis.
    pub fn scaled(&self) -> DMatrix<Complex64> {
        let dx = self.grid.spacing();
        self.entries.map(|z| z * dx)
    }

    pub fn apply(&self, f: &SampledSignal) -> Result<SampledSignal> {
        same_grid(&self.grid, f.grid())?;
        let dx = self.grid.spacing();
        let v = nalgebra::DVector::from_column_slice(f.samples());
        let out = &self.entries * v * Complex64::new(dx, 0.0);
        SampledSignal::new(self.grid, out.as_slice().to_vec())
    }

    /// `T1 ∘ T2`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        let dx = self.grid.spacing();
        Ok(Self {
            grid: self.grid,
            entries: (&self.entries * &other.entries).map(|z| z * dx),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid,
            entries: self.entries.adjoint(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            entries: self.entries.map(|z| z * c),
        }
    }

    /// `‖T‖_{S_2} = Δ (Σ |M[i][j]|²)^{1/2}`.
    pub fn hilbert_schmidt(&self) -> f64 {
        self.grid.spacing()
            * self
                .entries
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
    }

    /// Weak form `⟨Tf, g⟩ = Δ² gᴴ M f`.
    pub fn bilinear(&self, f: &SampledSignal, g: &SampledSignal) -> Result<Complex64> {
        let tf = self.apply(f)?;
        crate::signal::l2_inner(&tf, g)
    }
}

/// Nonincreasing singular values of an operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "singular values must be finite and nonnegative".into(),
            ));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `1e-12 s₁`.
    pub fn rank(&self) -> usize {
        let cut = 1e-12 * self.largest();
        self.values.iter().filter(|&&v| v > cut).count()
    }

    /// `(Σ s_n^p)^{1/p}`, or `s₁` for `p = ∞`.
    pub fn schatten(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let s1 = self.largest();
        if s1 == 0.0 {
            return Ok(0.0);
        }
        if p.is_infinite() {
            return Ok(s1);
        }
        let sum: f64 = self.values.iter().map(|v| (v / s1).powf(p)).sum();
        Ok(s1 * sum.powf(1.0 / p))
    }
}

/// `ΔxΔω Σ_{m,n} a[m][n] ⟨·, M_{ω_n}T_{x_m}φ1⟩ M_{ω_n}T_{x_m}φ2`.
pub fn localization_matrix(
    a: &SymbolField,
    phi1: &SampledSignal,
    phi2: &SampledSignal,
) -> Result<OperatorMatrix> {
    same_grid(a.grid(), phi1.grid())?;
    same_grid(a.grid(), phi2.grid())?;
    if phi1.is_zero() || phi2.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let grid = *a.grid();
    let n = grid.len();
    let h = n / 2;
    let w1 = phi1.samples();
    let w2 = phi2.samples();
    let scale = grid.spacing() * grid.freq_spacing();
    let mut acc = vec![ZERO; n * n];
    let mut ahat = vec![ZERO; n];
    let mut s2 = vec![ZERO; n];
    let mut s1 = vec![ZERO; n];
    for m in 0..n {
        let row = a.row(m);
        if row.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        // â[d] = Σ_n a[m][n] e^{2πi(n - N/2)d/N}.
        ahat.copy_from_slice(row);
        fft::ifft_in_place(&mut ahat);
        for (d, v) in ahat.iter_mut().enumerate() {
            if d % 2 == 1 {
                *v = -*v;
            }
        }
        for i in 0..n {
            let idx = (i + n + h - m) % n;
            s2[i] = w2[idx];
            s1[i] = w1[idx].conj();
        }
        for i in 0..n {
            let left = s2[i];
            if left.norm_sqr() == 0.0 {
                continue;
            }
            let out = &mut acc[i * n..(i + 1) * n];
            for j in 0..n {
                out[j] += left * s1[j] * ahat[(i + n - j) % n];
            }
        }
    }
    let entries = DMatrix::from_row_slice(n, n, &acc).map(|z| z * scale);
    OperatorMatrix::new(grid, entries)
}

/// Weyl operator `L_σ`, defined by `⟨L_σ f, g⟩ = ⟨σ, W(g, f)⟩` with `W` the
/// full-band cross-Wigner distribution [`crate::tfa::cross_wigner_full`].
/// Entries are the kernel `∫ σ((x_i + x_j)/2, ω) e^{2πi(x_i - x_j)ω} dω`,
/// with `σ` interpolated to half-step `x`, the integral a Riemann sum, and
/// lags `|x_i - x_j| ≤ L/2`.
pub fn weyl_matrix(sigma: &SymbolField) -> Result<OperatorMatrix> {
    let grid = *sigma.grid();
    let n = grid.len();
    let fine = 2 * n;
    // σ_f = U_x σ.
    let mut sf = vec![ZERO; fine * n];
    let mut col = vec![ZERO; n];
    for c in 0..n {
        for m in 0..n {
            col[m] = sigma.get(m, c);
        }
        for (r, v) in fft::upsample2(&col).into_iter().enumerate() {
            sf[r * n + c] = v;
        }
    }
    // S_f[r][k] = (1/L) Σ_n σ_f[r][n] e^{2πi(n - N/2)k/N}.
    let inv_l = grid.freq_spacing();
    for row in sf.chunks_mut(n) {
        fft::ifft_in_place(row);
        for (k, v) in row.iter_mut().enumerate() {
            *v *= if k % 2 == 1 { -inv_l } else { inv_l };
        }
    }
    // Kernel at (x_i, x_j): midpoint row i + j of the half-step grid, lag
    // i - j restricted to |i - j| ≤ N/2 with half weight at the ends.
    let h = (n / 2) as isize;
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = i as isize - j as isize;
        let v = sf[(i + j) * n + d.rem_euclid(n as isize) as usize];
        match d.abs().cmp(&h) {
            std::cmp::Ordering::Less => v,
            std::cmp::Ordering::Equal => v * 0.5,
            std::cmp::Ordering::Greater => ZERO,
        }
    });
    OperatorMatrix::new(grid, m)
}

/// `Tf = ⟨f, h⟩ h`.
pub fn rank_one(h: &SampledSignal) -> Result<OperatorMatrix> {
    if h.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let n = h.len();
    let s = h.samples();
    let m = DMatrix::from_fn(n, n, |i, j| s[i] * s[j].conj());
    OperatorMatrix::new(*h.grid(), m)
}

pub fn singular_values(t: &OperatorMatrix) -> Result<SingularSpectrum> {
    let svd = t
        .scaled()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(Error::Decomposition)?;
    SingularSpectrum::new(svd.singular_values.as_slice().to_vec())
}

pub fn schatten_norm(t: &OperatorMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    singular_values(t)?.schatten(p)
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix, with the phases of `diag(R)` absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Operator with singular values `spectrum` (padded with zeros) and Haar
/// random singular vectors.
pub fn random_operator_with_spectrum<R: Rng + ?Sized>(
    grid: GridSpec,
    spectrum: &[f64],
    rng: &mut R,
) -> Result<OperatorMatrix> {
    let n = grid.len();
    if spectrum.len() > n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: spectrum.len(),
        });
    }
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    for (i, s) in spectrum.iter().enumerate() {
        d[(i, i)] = Complex64::new(*s, 0.0);
    }
    OperatorMatrix::from_scaled(grid, u * d * v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::signal::{gaussian_window, hermite_function, l2_inner, l2_norm};
    use crate::tfa::{cross_wigner_full, stft, tf_shift};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_signal(grid: GridSpec, rng: &mut ChaCha8Rng) -> SampledSignal {
        let v = (0..grid.len())
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        SampledSignal::new(grid, v).unwrap()
    }

    fn random_symbol(grid: GridSpec, rng: &mut ChaCha8Rng) -> SymbolField {
        let n = grid.len();
        let v = (0..n * n)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        SymbolField::new(grid, v).unwrap()
    }

    #[test]
    fn spectrum_norms() {
        let s = SingularSpectrum::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(s.values(), &[4.0, 3.0]);
        assert!((s.schatten(1.0).unwrap() - 7.0).abs() < 1e-12);
        assert!((s.schatten(2.0).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(s.schatten(f64::INFINITY).unwrap(), 4.0);
        assert!((s.schatten(0.5).unwrap() - 13.928203230275509).abs() < 1e-10);
        assert!(s.schatten(0.0).is_err());
        assert!(s.schatten(-1.0).is_err());
    }

    #[test]
    fn diagonal_spectrum() {
        let g = make_grid(16, 4.0).unwrap();
        let mut d = DMatrix::zeros(16, 16);
        d[(0, 0)] = c(4.0, 0.0);
        d[(3, 3)] = c(0.0, 3.0);
        let t = OperatorMatrix::from_scaled(g, d).unwrap();
        let s = singular_values(&t).unwrap();
        assert!((s.values()[0] - 4.0).abs() < 1e-12);
        assert!((s.values()[1] - 3.0).abs() < 1e-12);
        assert!(s.values()[2..].iter().all(|v| *v < 1e-12));
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn rank_one_spectrum_and_projector() {
        let g = make_grid(32, 6.0).unwrap();
        let phi = gaussian_window(&g);
        let t = rank_one(&phi).unwrap();
        let s = singular_values(&t).unwrap();
        assert!((s.largest() - 1.0).abs() < 1e-10);
        assert!(s.values()[1] < 1e-10);
        let tt = t.compose(&t).unwrap();
        let diff = tt.sub(&t.scale(c(l2_norm(&phi).powi(2), 0.0))).unwrap();
        assert!(diff.hilbert_schmidt() < 1e-12);
        let mut e1 = vec![c(0.0, 0.0); 32];
        e1[1] = c(1.0 / g.spacing().sqrt(), 0.0);
        let spike = SampledSignal::new(g, e1).unwrap();
        let s = singular_values(&rank_one(&spike).unwrap()).unwrap();
        assert!((s.largest() - 1.0).abs() < 1e-12);
        assert!(rank_one(&SampledSignal::zeros(g)).is_err());
    }

    #[test]
    fn localization_weak_form() {
        let g = make_grid(32, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_symbol(g, &mut rng);
        let p1 = gaussian_window(&g);
        let p2 = tf_shift(&p1, 3, -2);
        let op = localization_matrix(&a, &p1, &p2).unwrap();
        for _ in 0..3 {
            let f = random_signal(g, &mut rng);
            let h = random_signal(g, &mut rng);
            let lhs = op.bilinear(&f, &h).unwrap();
            let v1 = stft(&f, &p1).unwrap();
            let v2 = stft(&h, &p2).unwrap();
            let w = g.spacing() * g.freq_spacing();
            let rhs: Complex64 = a
                .values()
                .iter()
                .zip(v1.values().iter().zip(v2.values()))
                .map(|(a, (x, y))| a * x * y.conj())
                .sum::<Complex64>()
                * w;
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn localization_unit_symbol_is_identity() {
        let g = make_grid(32, 6.0).unwrap();
        let phi = gaussian_window(&g);
        let one = SymbolField::from_fn(g, |_, _| c(1.0, 0.0));
        let op = localization_matrix(&one, &phi, &phi).unwrap();
        let norm = l2_norm(&phi).powi(2);
        for i in 0..32 {
            for j in 0..32 {
                let target = if i == j { norm / g.spacing() } else { 0.0 };
                assert!((op.entries()[(i, j)] - c(target, 0.0)).norm() < 1e-10);
            }
        }
        let zero = localization_matrix(&SymbolField::zeros(g), &phi, &phi).unwrap();
        assert!(zero.entries().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn weyl_quantization_of_wigner_is_rank_one() {
        let g = make_grid(128, 12.0).unwrap();
        for f in [gaussian_window(&g), hermite_function(&g, 1).unwrap()] {
            let w = crate::tfa::cross_wigner(&f, &f)
                .unwrap()
                .to_symbol_grid()
                .unwrap();
            let r = rank_one(&f).unwrap();
            let d = weyl_matrix(&w).unwrap().sub(&r).unwrap().hilbert_schmidt();
            assert!(d < 1e-10 * r.hilbert_schmidt());
        }
    }

    #[test]
    fn weyl_weak_identity_and_self_adjointness() {
        let g = make_grid(16, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sigma = random_symbol(g, &mut rng);
        let op = weyl_matrix(&sigma).unwrap();
        for _ in 0..5 {
            let f = random_signal(g, &mut rng);
            let h = random_signal(g, &mut rng);
            let lhs = op.bilinear(&f, &h).unwrap();
            let rhs = sigma.inner(&cross_wigner_full(&h, &f).unwrap()).unwrap();
            assert!(
                (lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0),
                "{lhs} {rhs}"
            );
        }
        let real = sigma.map(|z| c(z.re, 0.0));
        let m = weyl_matrix(&real).unwrap();
        let d = m.sub(&m.adjoint()).unwrap().hilbert_schmidt() / m.hilbert_schmidt();
        assert!(d < 1e-10);
        assert!(weyl_matrix(&SymbolField::zeros(g))
            .unwrap()
            .entries()
            .iter()
            .all(|z| z.norm() == 0.0));
    }

    #[test]
    fn prescribed_spectrum_and_unitary_invariance() {
        let g = make_grid(16, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = [5.0, 2.0, 1.0, 0.5];
        let t = random_operator_with_spectrum(g, &spec, &mut rng).unwrap();
        let s = singular_values(&t).unwrap();
        for (a, b) in s.values().iter().zip(&spec) {
            assert!((a - b).abs() < 1e-10);
        }
        let u = OperatorMatrix::from_scaled(g, random_unitary(16, &mut rng)).unwrap();
        let s2 = singular_values(&u.compose(&t).unwrap()).unwrap();
        for (a, b) in s.values().iter().zip(s2.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        let hs = t.hilbert_schmidt();
        assert!((hs - s.schatten(2.0).unwrap()).abs() < 1e-10);
        let f = random_signal(g, &mut rng);
        assert!(l2_inner(&f, &f).unwrap().re > 0.0);
    }
}
