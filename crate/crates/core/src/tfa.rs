//! Time-frequency shifts, short-time Fourier transform, cross-Wigner
//! distributions and phase-space convolution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridSpec;
use crate::signal::{same_grid, SampledSignal, SymbolField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `e^{2πi k/n}` with the exponent reduced exactly in integers.
pub(crate) fn unit_root(k: i64, n: usize) -> Complex64 {
    let r = k.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r / n as f64)
}

/// Short-time Fourier transform on the `N x N` phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StftMatrix {
    field: SymbolField,
    window_id: String,
}

impl StftMatrix {
    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    pub fn window_id(&self) -> &str {
        &self.window_id
    }

    pub fn with_window_id(mut self, id: impl Into<String>) -> Self {
        self.window_id = id.into();
        self
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.field.get(m, n)
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.values()
    }

    pub fn as_field(&self) -> &SymbolField {
        &self.field
    }

    pub fn into_field(self) -> SymbolField {
        self.field
    }
}

/// Cross-Wigner distribution sampled on the half-step frequency grid
/// `(n - N/2) / (2L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMatrix {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl WignerMatrix {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.grid.len() + n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn halffreq_node(&self, n: usize) -> f64 {
        (n as f64 - self.grid.center() as f64) / (2.0 * self.grid.period())
    }

    /// Fraction of the lag-kernel energy at lags `|t| ≥ L/2`, which is lost
    /// when the half-step frequency axis is subsampled to the standard one.
    pub fn resample_loss(&self) -> f64 {
        let n = self.grid.len();
        let mut total = 0.0;
        let mut lost = 0.0;
        for row in self.values.chunks(n) {
            let kernel = fft::centered_idft(row);
            for (i, v) in kernel.iter().enumerate() {
                let k = i as isize - (n / 2) as isize;
                let e = v.norm_sqr();
                total += e;
                if k.unsigned_abs() >= n / 4 {
                    lost += e;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            lost / total
        }
    }

    /// Resamples onto the standard symbol grid by keeping every second
    /// frequency node. Nodes with `|ω| ≥ N/(4L)` have no half-grid partner
    /// and are set to zero.
    pub fn to_symbol_grid(&self) -> Result<SymbolField> {
        let loss = self.resample_loss();
        if loss >= 1e-8 {
            return Err(Error::ResampleEnergy(loss));
        }
        Ok(self.to_symbol_grid_unchecked())
    }

    pub fn to_symbol_grid_unchecked(&self) -> SymbolField {
        let n = self.grid.len();
        let h = n / 2;
        let mut out = vec![ZERO; n * n];
        for m in 0..n {
            for j in n / 4..3 * n / 4 {
                out[m * n + j] = self.values[m * n + 2 * j - h];
            }
        }
        SymbolField::new(self.grid, out).expect("resampled values are finite")
    }
}

/// `M_{n/L} T_{kΔ} f`: translation by `k` nodes followed by modulation.
pub fn tf_shift(f: &SampledSignal, k: i64, n: i64) -> SampledSignal {
    let grid = *f.grid();
    let len = grid.len();
    let h = grid.center() as i64;
    let src = f.samples();
    let out = (0..len)
        .map(|j| {
            let from = (j as i64 - k).rem_euclid(len as i64) as usize;
            unit_root(n * (j as i64 - h), len) * src[from]
        })
        .collect();
    SampledSignal::new(grid, out).expect("shift preserves finiteness")
}

/// `V_g f(x_m, ω_n) = Δ Σ_j f[j] conj(g(t_j - x_m)) e^{-2πi ω_n t_j}`.
pub fn stft(f: &SampledSignal, g: &SampledSignal) -> Result<StftMatrix> {
    same_grid(f.grid(), g.grid())?;
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let grid = *f.grid();
    let n = grid.len();
    let h = grid.center();
    let dx = grid.spacing();
    let fs = f.samples();
    let gs = g.samples();
    let mut values = vec![ZERO; n * n];
    for (m, row) in values.chunks_mut(n).enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let gi = (j + n + h - m) % n;
            *v = fs[j] * gs[gi].conj() * dx;
        }
        fft::centered_dft_in_place(row);
    }
    Ok(StftMatrix {
        field: SymbolField::new(grid, values)?,
        window_id: String::from("custom"),
    })
}

/// Cross-Wigner distribution `W(f1, f2)` with lag substitution `t = 2kΔ`.
/// Samples outside the grid window are taken as zero.
pub fn cross_wigner(f1: &SampledSignal, f2: &SampledSignal) -> Result<WignerMatrix> {
    same_grid(f1.grid(), f2.grid())?;
    let grid = *f1.grid();
    let n = grid.len();
    let scale = 2.0 * grid.spacing();
    let a = f1.samples();
    let b = f2.samples();
    let mut values = vec![ZERO; n * n];
    for (m, row) in values.chunks_mut(n).enumerate() {
        let mi = m as isize;
        for k in -(n as isize / 2)..(n as isize / 2) {
            let p = mi + k;
            let q = mi - k;
            if p < 0 || q < 0 || p >= n as isize || q >= n as isize {
                continue;
            }
            let idx = k.rem_euclid(n as isize) as usize;
            row[idx] = a[p as usize] * b[q as usize].conj() * scale;
        }
        // Σ_k r[k] e^{-2πi k (n - N/2)/N} = FFT((-1)^k r)[n].
        for (i, v) in row.iter_mut().enumerate() {
            if i % 2 == 1 {
                *v = -*v;
            }
        }
        fft::fft_in_place(row);
    }
    Ok(WignerMatrix { grid, values })
}

/// Full-band cross-Wigner distribution on the standard symbol grid. The
/// signals are zero-stuffed onto the half-step grid, so that every pair of
/// nodes `(x_i, x_j)` with `|x_i - x_j| ≤ L/2` contributes at its midpoint
/// with lag `x_i - x_j`; the result is low-passed back to the grid in `x`. This is the distribution
/// paired with [`crate::quantize::weyl_matrix`].
pub fn cross_wigner_full(f1: &SampledSignal, f2: &SampledSignal) -> Result<SymbolField> {
    same_grid(f1.grid(), f2.grid())?;
    let grid = *f1.grid();
    let n = grid.len();
    let fine = 2 * n;
    let stuff = |s: &[Complex64]| {
        let mut v = vec![ZERO; fine];
        for (j, x) in s.iter().enumerate() {
            v[2 * j] = *x;
        }
        v
    };
    let g = stuff(f1.samples());
    let f = stuff(f2.samples());
    let dx = grid.spacing();
    let mut wf = vec![ZERO; fine * n];
    for (r, row) in wf.chunks_mut(n).enumerate() {
        let ri = r as isize;
        let h = (n / 2) as isize;
        for k in -h..=h {
            let p = ri + k;
            let q = ri - k;
            if p < 0 || q < 0 || p >= fine as isize || q >= fine as isize {
                continue;
            }
            let w = if k.abs() == h { 0.5 } else { 1.0 };
            row[k.rem_euclid(n as isize) as usize] += g[p as usize] * f[q as usize].conj() * w;
        }
        for (i, v) in row.iter_mut().enumerate() {
            *v *= if i % 2 == 1 { -dx } else { dx };
        }
        fft::fft_in_place(row);
    }
    let mut out = vec![ZERO; n * n];
    let mut col = vec![ZERO; fine];
    for c in 0..n {
        for r in 0..fine {
            col[r] = wf[r * n + c];
        }
        let low = fft::upsample2_adjoint(&col);
        for m in 0..n {
            out[m * n + c] = low[m];
        }
    }
    SymbolField::new(grid, out)
}

/// `(ζ1, ζ2) ↦ (ζ2, -ζ1)`.
pub fn rotate_zeta(zeta: (f64, f64)) -> (f64, f64) {
    (zeta.1, -zeta.0)
}

/// Window shifted to the phase-space node `z` and conjugated, the common
/// factor of all 2-D STFT evaluations at that node.
fn shifted_window_product(f: &SymbolField, g: &SymbolField, z: (usize, usize)) -> Vec<Complex64> {
    let n = f.size();
    let h = n / 2;
    let mut out = vec![ZERO; n * n];
    for m in 0..n {
        let gm = (m + n + h - z.0 % n) % n;
        for k in 0..n {
            let gk = (k + n + h - z.1 % n) % n;
            out[m * n + k] = f.get(m, k) * g.get(gm, gk).conj();
        }
    }
    out
}

/// 2-D STFT `V_G F(z, ζ)` at phase-space node `z` for every dual node `ζ`.
/// Entry `[j1][j2]` corresponds to `ζ = ((j1 - N/2)/L, (j2 - N/2)Δ)`.
pub fn stft2d_plane(f: &SymbolField, g: &SymbolField, z: (usize, usize)) -> Result<Vec<Complex64>> {
    same_grid(f.grid(), g.grid())?;
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let n = f.size();
    let w = f.grid().spacing() * f.grid().freq_spacing();
    let mut prod = shifted_window_product(f, g, z);
    fft::centered_dft2_in_place(&mut prod, n);
    prod.iter_mut().for_each(|v| *v *= w);
    Ok(prod)
}

/// 2-D STFT `V_G F(z, ζ)` at a single pair of phase-space and dual nodes.
pub fn stft2d_at(
    f: &SymbolField,
    g: &SymbolField,
    z: (usize, usize),
    zeta: (usize, usize),
) -> Result<Complex64> {
    same_grid(f.grid(), g.grid())?;
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let n = f.size();
    let h = (n / 2) as i64;
    let w = f.grid().spacing() * f.grid().freq_spacing();
    let prod = shifted_window_product(f, g, z);
    let j1 = zeta.0 as i64 - h;
    let j2 = zeta.1 as i64 - h;
    let mut s = ZERO;
    for m in 0..n {
        let pm = unit_root(-j1 * (m as i64 - h), n);
        let mut row = ZERO;
        for k in 0..n {
            row += prod[m * n + k] * unit_root(-j2 * (k as i64 - h), n);
        }
        s += pm * row;
    }
    Ok(s * w)
}

/// Centered periodic phase-space convolution
/// `(a ∗ b)(x, ω) = ΔxΔω Σ a(x', ω') b(x - x', ω - ω')`.
pub fn symbol_convolve(a: &SymbolField, b: &SymbolField) -> Result<SymbolField> {
    same_grid(a.grid(), b.grid())?;
    let n = a.size();
    let h = n / 2;
    let w = a.grid().spacing() * a.grid().freq_spacing();
    let mut fa = a.values().to_vec();
    let mut fb = b.values().to_vec();
    for data in [&mut fa, &mut fb] {
        fft::map_rows(data, n, fft::fft_in_place);
        fft::map_cols(data, n, fft::fft_in_place);
    }
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft::map_rows(&mut fa, n, fft::ifft_in_place);
    fft::map_cols(&mut fa, n, fft::ifft_in_place);
    let scale = w / (n * n) as f64;
    let mut out = vec![ZERO; n * n];
    for m in 0..n {
        for k in 0..n {
            out[m * n + k] = fa[((m + h) % n) * n + (k + h) % n] * scale;
        }
    }
    SymbolField::new(*a.grid(), out)
}

/// The 2-D Gaussian `Φ(x, ω) = ½ e^{-π(x² + ω²)}` on the symbol grid.
pub fn gaussian_window_2d(grid: &GridSpec) -> SymbolField {
    SymbolField::from_fn(*grid, |x, w| {
        Complex64::new(0.5 * (-std::f64::consts::PI * (x * x + w * w)).exp(), 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::signal::{gaussian_window, hermite_function, l2_norm};
    use std::f64::consts::PI;

    fn random_signal(grid: GridSpec, seed: u64) -> SampledSignal {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let v = (0..grid.len())
            .map(|_| Complex64::new(next(), next()))
            .collect();
        SampledSignal::new(grid, v).unwrap()
    }

    #[test]
    fn tf_shift_identity_unitarity_composition() {
        let g = make_grid(32, 4.0).unwrap();
        let f = random_signal(g, 3);
        assert_eq!(tf_shift(&f, 0, 0), f);
        let s = tf_shift(&f, 5, -3);
        assert!((l2_norm(&s) - l2_norm(&f)).abs() < 1e-12);
        let two = tf_shift(&tf_shift(&f, 5, 0), 0, -3);
        for (a, b) in two.samples().iter().zip(s.samples()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn stft_gaussian_closed_form_points() {
        let g = make_grid(64, 8.0).unwrap();
        let c = g.center();
        // Unit-profile Gaussian: prefactor 2^{-1/2}.
        let p0 = crate::signal::dilated_gaussian(&g, 1.0).unwrap();
        let v0 = stft(&p0, &p0).unwrap();
        assert!((v0.get(c, c).re - 0.5f64.sqrt()).abs() < 1e-10);
        // x = 1 is node N/2 + 8 at Δ = 1/8.
        let z = v0.get(c + 8, c);
        assert!((z.re - 0.146993).abs() < 1e-6 && z.im.abs() < 1e-12);
        // Normalized window: prefactor ‖φ‖² = 1.
        let phi = gaussian_window(&g);
        let v = stft(&phi, &phi).unwrap();
        assert!((v.get(c, c).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stft_zero_signal_and_zero_window() {
        let g = make_grid(32, 4.0).unwrap();
        let phi = gaussian_window(&g);
        let zero = SampledSignal::zeros(g);
        assert!(stft(&zero, &phi)
            .unwrap()
            .values()
            .iter()
            .all(|z| z.norm() == 0.0));
        assert_eq!(stft(&phi, &zero), Err(Error::ZeroWindow));
    }

    #[test]
    fn wigner_gaussian_origin_and_marginal() {
        let g = make_grid(128, 12.0).unwrap();
        let phi = gaussian_window(&g);
        let w = cross_wigner(&phi, &phi).unwrap();
        let c = g.center();
        assert!((w.get(c, c).re - 2.0).abs() < 1e-6);
        let dw = 1.0 / (2.0 * g.period());
        for m in [c - 10, c, c + 7] {
            let s: Complex64 = (0..128).map(|n| w.get(m, n)).sum::<Complex64>() * dw;
            assert!((s.re - phi.samples()[m].norm_sqr()).abs() < 1e-6);
        }
        assert!(w.values().iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn wigner_resampling_guard() {
        let g = make_grid(128, 12.0).unwrap();
        let phi = gaussian_window(&g);
        assert!(cross_wigner(&phi, &phi).unwrap().to_symbol_grid().is_ok());
        // Two bumps L/2 apart produce cross terms at lag L/2.
        let far = tf_shift(&phi, 32, 0).add(&tf_shift(&phi, -32, 0)).unwrap();
        assert!(matches!(
            cross_wigner(&far, &far).unwrap().to_symbol_grid(),
            Err(Error::ResampleEnergy(_))
        ));
    }

    #[test]
    fn full_wigner_matches_half_step_wigner_on_smooth_input() {
        let g = make_grid(128, 12.0).unwrap();
        let f = hermite_function(&g, 2).unwrap();
        let h = hermite_function(&g, 1).unwrap();
        let a = cross_wigner(&f, &h).unwrap().to_symbol_grid().unwrap();
        let b = cross_wigner_full(&f, &h).unwrap();
        let err = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn rotation_has_order_four() {
        assert_eq!(rotate_zeta((1.0, 0.0)), (0.0, -1.0));
        assert_eq!(rotate_zeta((0.0, 0.0)), (0.0, -0.0));
        let z = (0.3, -1.7);
        assert_eq!(rotate_zeta(rotate_zeta(rotate_zeta(rotate_zeta(z)))), z);
    }

    #[test]
    fn stft2d_brute_force() {
        let g = make_grid(16, 4.0).unwrap();
        let n = 16;
        let f = SymbolField::from_fn(g, |x, w| Complex64::new((x - 0.3 * w).cos(), x * w * 0.1));
        let win = SymbolField::from_fn(g, |x, w| {
            Complex64::new((-PI * (x * x + 0.5 * w * w)).exp(), 0.2 * x)
        });
        let (dx, dw) = (g.spacing(), g.freq_spacing());
        for &(z, zeta) in &[((8, 8), (8, 8)), ((3, 11), (5, 14)), ((15, 0), (0, 9))] {
            let fast = stft2d_at(&f, &win, z, zeta).unwrap();
            let plane = stft2d_plane(&f, &win, z).unwrap()[zeta.0 * n + zeta.1];
            let z1 = g.time_node(z.0);
            let z2 = g.freq_node(z.1);
            let zeta1 = (zeta.0 as f64 - 8.0) / g.period();
            let zeta2 = (zeta.1 as f64 - 8.0) * dx;
            let mut s = Complex64::new(0.0, 0.0);
            for m in 0..n {
                for k in 0..n {
                    let x = g.time_node(m);
                    let w = g.freq_node(k);
                    // periodic window position
                    let gm = ((x - z1) / dx).round() as i64 + 8;
                    let gk = ((w - z2) / dw).round() as i64 + 8;
                    let gv = win.get(gm.rem_euclid(16) as usize, gk.rem_euclid(16) as usize);
                    let ph = Complex64::from_polar(1.0, -2.0 * PI * (zeta1 * x + zeta2 * w));
                    s += f.get(m, k) * gv.conj() * ph;
                }
            }
            s *= dx * dw;
            assert!((fast - s).norm() < 1e-10);
            assert!((plane - s).norm() < 1e-10);
        }
    }

    #[test]
    fn gaussian_autocorrelation_is_positive() {
        let g = make_grid(64, 8.0).unwrap();
        let phi = gaussian_window_2d(&g);
        let v = stft2d_at(&phi, &phi, (32, 32), (32, 32)).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-14);
        let zero = SymbolField::zeros(g);
        assert_eq!(
            stft2d_at(&zero, &phi, (1, 2), (3, 4)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn convolution_identity_and_commutativity() {
        let g = make_grid(16, 4.0).unwrap();
        let a = SymbolField::from_fn(g, |x, w| Complex64::new(x.sin() + w, x * w));
        let b = SymbolField::from_fn(g, |x, w| Complex64::new((x * w).cos(), w - x));
        let mut delta = SymbolField::zeros(g).into_values();
        delta[8 * 16 + 8] = Complex64::new(1.0 / (g.spacing() * g.freq_spacing()), 0.0);
        let delta = SymbolField::new(g, delta).unwrap();
        let id = symbol_convolve(&a, &delta).unwrap();
        for (x, y) in id.values().iter().zip(a.values()) {
            assert!((x - y).norm() < 1e-10);
        }
        let ab = symbol_convolve(&a, &b).unwrap();
        let ba = symbol_convolve(&b, &a).unwrap();
        for (x, y) in ab.values().iter().zip(ba.values()) {
            assert!((x - y).norm() < 1e-10);
        }
    }
}
