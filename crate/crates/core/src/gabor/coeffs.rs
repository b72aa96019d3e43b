//! Gabor coefficient arrays, weighted mixed-norm quasi-norms and modulation
//! quasi-norm estimators.

use num_complex::Complex64;

use super::weight::Weight;
use super::{GaborSystem, SymbolGaborSystem};
use crate::error::{check_exponent, Error, Result};
use crate::fft;
use crate::signal::{same_grid, SampledSignal, SymbolField};
use crate::tfa::stft2d_plane;

/// Coefficients `c[k][n]` grouped into an inner block (translations) and an
/// outer block (modulations), with the physical lattice point of each index.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientArray {
    dims: usize,
    inner_coords: Vec<f64>,
    outer_coords: Vec<f64>,
    values: Vec<Complex64>,
}

impl CoefficientArray {
    /// `values[o * inner + i]`; coordinates are flattened points of
    /// dimension `dims / 2`.
    pub fn new(
        dims: usize,
        inner_coords: Vec<f64>,
        outer_coords: Vec<f64>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if dims != 2 && dims != 4 {
            return Err(Error::InvalidParameter(format!(
                "coefficient arrays have 2 or 4 index dimensions, got {dims}"
            )));
        }
        let d = dims / 2;
        if !inner_coords.len().is_multiple_of(d) || !outer_coords.len().is_multiple_of(d) {
            return Err(Error::InvalidParameter("coordinate length mismatch".into()));
        }
        let expected = inner_coords.len() / d * (outer_coords.len() / d);
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            dims,
            inner_coords,
            outer_coords,
            values,
        })
    }

    /// Unweighted 2-D array from rows `rows[n][k]` (outer index first) with
    /// integer coordinates.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let inner = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != inner) {
            return Err(Error::InvalidParameter("ragged coefficient rows".into()));
        }
        Self::new(
            2,
            (0..inner).map(|k| k as f64).collect(),
            (0..rows.len()).map(|n| n as f64).collect(),
            rows.concat(),
        )
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn inner_len(&self) -> usize {
        self.inner_coords.len() / (self.dims / 2)
    }

    pub fn outer_len(&self) -> usize {
        self.outer_coords.len() / (self.dims / 2)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, inner: usize, outer: usize) -> Complex64 {
        self.values[outer * self.inner_len() + inner]
    }

    pub fn inner_point(&self, i: usize) -> &[f64] {
        let d = self.dims / 2;
        &self.inner_coords[i * d..(i + 1) * d]
    }

    pub fn outer_point(&self, o: usize) -> &[f64] {
        let d = self.dims / 2;
        &self.outer_coords[o * d..(o + 1) * d]
    }

    /// Same layout with new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(
            self.dims,
            self.inner_coords.clone(),
            self.outer_coords.clone(),
            values,
        )
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `(Σ t^p)^{1/p}` or `max t`, evaluated relative to the largest term.
fn lp(terms: &[f64], p: f64) -> f64 {
    let max = terms.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    let s: f64 = terms.iter().map(|t| (t / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// `(Σ_n (Σ_k |c_{k,n}|^p m(k,n)^p)^{q/p})^{1/q}`, with sup for infinite
/// exponents. Nonzero magnitudes are clamped at `1e-300`.
pub fn mixed_norm(c: &CoefficientArray, p: f64, q: f64, m: &Weight) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    let inner = c.inner_len();
    let outer = c.outer_len();
    let mut point = Vec::with_capacity(c.dims);
    let mut terms = vec![0.0; inner];
    let mut outer_terms = vec![0.0; outer];
    for (o, ot) in outer_terms.iter_mut().enumerate() {
        for (i, t) in terms.iter_mut().enumerate() {
            let mag = c.get(i, o).norm();
            *t = if mag == 0.0 {
                0.0
            } else {
                let w = if m.is_unit() {
                    1.0
                } else {
                    point.clear();
                    point.extend_from_slice(c.inner_point(i));
                    point.extend_from_slice(c.outer_point(o));
                    m.eval(&point)?
                };
                (mag * w).max(1e-300)
            };
        }
        *ot = lp(&terms, p);
    }
    Ok(lp(&outer_terms, q))
}

/// `c[k][n] = ⟨f, M_{βn} T_{αk} g⟩` for `k < N/a`, `n < N/b`.
pub fn gabor_coefficients(f: &SampledSignal, sys: &GaborSystem) -> Result<CoefficientArray> {
    same_grid(f.grid(), sys.grid())?;
    let grid = *f.grid();
    let n = grid.len();
    let h = n / 2;
    let lat = sys.lattice();
    let (kc, nc) = (lat.time_count(), lat.freq_count());
    let dx = grid.spacing();
    let fs = f.samples();
    let g = sys.window().samples();
    let mut values = vec![Complex64::new(0.0, 0.0); kc * nc];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..kc {
        let shift = k * lat.a();
        for j in 0..n {
            buf[j] = fs[j] * g[(j + n - shift) % n].conj() * dx;
        }
        fft::centered_dft_in_place(&mut buf);
        for m in 0..nc {
            values[m * kc + k] = buf[(h + m * lat.b()) % n];
        }
    }
    let inner = (0..kc)
        .map(|k| lat.centered_time(k) as f64 * lat.alpha())
        .collect();
    let outer = (0..nc)
        .map(|m| lat.centered_freq(m) as f64 * lat.beta())
        .collect();
    CoefficientArray::new(2, inner, outer, values)
}

/// `⟨a, M_{(β_x n1, β_ω n2)} T_{(α_x k1, α_ω k2)} Φ⟩` with inner block
/// `(k1, k2)` and outer block `(n1, n2)`.
pub fn symbol_coefficients(a: &SymbolField, sys: &SymbolGaborSystem) -> Result<CoefficientArray> {
    same_grid(a.grid(), sys.grid())?;
    let n = a.size();
    let h = n / 2;
    let (lx, lw) = (sys.lattice_x(), sys.lattice_w());
    let (k1c, k2c) = (lx.time_count(), lw.time_count());
    let (n1c, n2c) = (lx.freq_count(), lw.freq_count());
    let inner_len = k1c * k2c;
    let mut values = vec![Complex64::new(0.0, 0.0); inner_len * n1c * n2c];
    if !a.is_zero() {
        for k1 in 0..k1c {
            for k2 in 0..k2c {
                let z = ((h + k1 * lx.a()) % n, (h + k2 * lw.a()) % n);
                let plane = stft2d_plane(a, sys.window(), z)?;
                let i = k1 * k2c + k2;
                for n1 in 0..n1c {
                    let j1 = (h + n1 * lx.b()) % n;
                    for n2 in 0..n2c {
                        let j2 = (h + n2 * lw.b()) % n;
                        values[(n1 * n2c + n2) * inner_len + i] = plane[j1 * n + j2];
                    }
                }
            }
        }
    }
    let mut inner = Vec::with_capacity(2 * inner_len);
    for k1 in 0..k1c {
        for k2 in 0..k2c {
            inner.push(lx.centered_time(k1) as f64 * lx.alpha());
            inner.push(lw.centered_time(k2) as f64 * lw.alpha());
        }
    }
    let mut outer = Vec::with_capacity(2 * n1c * n2c);
    for n1 in 0..n1c {
        for n2 in 0..n2c {
            outer.push(lx.centered_freq(n1) as f64 * lx.beta());
            outer.push(lw.centered_freq(n2) as f64 * lw.beta());
        }
    }
    CoefficientArray::new(4, inner, outer, values)
}

/// Lattice estimate of `‖f‖_{M^{p,q}_m}`.
pub fn mod_norm_signal(
    f: &SampledSignal,
    p: f64,
    q: f64,
    m: &Weight,
    sys: &GaborSystem,
) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    if sys.bounds().is_none() {
        return Err(Error::FrameNotVerified);
    }
    mixed_norm(&gabor_coefficients(f, sys)?, p, q, m)
}

/// Lattice estimate of `‖a‖_{M^{p,q}_m}` on phase space.
pub fn mod_norm_symbol(
    a: &SymbolField,
    p: f64,
    q: f64,
    m: &Weight,
    sys: &SymbolGaborSystem,
) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    if sys.bounds().is_none() {
        return Err(Error::FrameNotVerified);
    }
    mixed_norm(&symbol_coefficients(a, sys)?, p, q, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gabor::Lattice;
    use crate::grid::make_grid;
    use crate::signal::{gaussian_window, l2_inner};
    use crate::tfa::{stft2d_at, tf_shift};

    fn ones() -> CoefficientArray {
        let one = Complex64::new(1.0, 0.0);
        CoefficientArray::from_rows(&[vec![one, one], vec![one, one]]).unwrap()
    }

    #[test]
    fn mixed_norm_examples() {
        let c = ones();
        let u = Weight::unit();
        assert!((mixed_norm(&c, 2.0, 2.0, &u).unwrap() - 2.0).abs() < 1e-12);
        assert!((mixed_norm(&c, 1.0, f64::INFINITY, &u).unwrap() - 2.0).abs() < 1e-12);
        assert!((mixed_norm(&c, 0.5, 0.5, &u).unwrap() - 16.0).abs() < 1e-12);
        assert!(mixed_norm(&c, 0.0, 1.0, &u).is_err());
        assert!(mixed_norm(&c, 1.0, -2.0, &u).is_err());
    }

    #[test]
    fn mixed_norm_groups_inner_then_outer() {
        let z = |x: f64| Complex64::new(x, 0.0);
        // rows are outer index n: n=0 -> (3, 4), n=1 -> (0, 0)
        let c = CoefficientArray::from_rows(&[vec![z(3.0), z(4.0)], vec![z(0.0), z(0.0)]]).unwrap();
        assert!((mixed_norm(&c, 2.0, 1.0, &Weight::unit()).unwrap() - 5.0).abs() < 1e-12);
        assert!((mixed_norm(&c, 1.0, 2.0, &Weight::unit()).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_match_inner_products() {
        let g = make_grid(64, 8.0).unwrap();
        let lat = Lattice::new(g, 4, 4).unwrap();
        let phi = gaussian_window(&g);
        let sys = GaborSystem::new(phi.clone(), lat).unwrap();
        let f = tf_shift(&phi, 5, 3)
            .add(&phi.scale(Complex64::new(0.0, 0.5)))
            .unwrap();
        let c = gabor_coefficients(&f, &sys).unwrap();
        for k in 0..lat.time_count() {
            for n in 0..lat.freq_count() {
                let direct = l2_inner(&f, &sys.atom(k, n)).unwrap();
                assert!((c.get(k, n) - direct).norm() < 1e-12);
            }
        }
        let self_c = gabor_coefficients(&phi, &sys).unwrap().get(0, 0);
        assert!((self_c.re - 1.0).abs() < 1e-10);
        let zero = gabor_coefficients(&SampledSignal::zeros(g), &sys).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        assert_eq!(c.inner_point(lat.time_count() - 1), &[-lat.alpha()]);
    }

    #[test]
    fn symbol_coefficients_match_pointwise_stft() {
        let g = make_grid(32, 6.0).unwrap();
        let lx = Lattice::new(g, 4, 4).unwrap();
        let lw = Lattice::new(g.dual(), 4, 2).unwrap();
        let sys = SymbolGaborSystem::gaussian(lx, lw).unwrap();
        let a = SymbolField::from_fn(g, |x, w| {
            Complex64::new((-(x * x + w * w) / 4.0).exp(), 0.3 * (x - w).sin())
        });
        let c = symbol_coefficients(&a, &sys).unwrap();
        assert_eq!(c.dims(), 4);
        assert_eq!(c.inner_len(), 8 * 8);
        assert_eq!(c.outer_len(), 8 * 16);
        let (k1, k2, n1, n2) = (1usize, 5usize, 3usize, 13usize);
        let z = ((16 + 4 * k1) % 32, (16 + 4 * k2) % 32);
        let zeta = ((16 + 4 * n1) % 32, (16 + 2 * n2) % 32);
        let direct = stft2d_at(&a, sys.window(), z, zeta).unwrap();
        let got = c.get(k1 * 8 + k2, n1 * 16 + n2);
        assert!((got - direct).norm() < 1e-12);
        assert_eq!(c.inner_point(k1 * 8 + k2), &[lx.alpha(), -3.0 * lw.alpha()]);
        assert_eq!(
            c.outer_point(n1 * 16 + n2),
            &[3.0 * lx.beta(), -3.0 * lw.beta()]
        );
    }

    #[test]
    fn mod_norms_need_verified_frames() {
        let g = make_grid(64, 8.0).unwrap();
        let phi = gaussian_window(&g);
        let raw = GaborSystem::new(phi.clone(), Lattice::default_for(g)).unwrap();
        assert_eq!(
            mod_norm_signal(&phi, 2.0, 2.0, &Weight::unit(), &raw),
            Err(Error::FrameNotVerified)
        );
        let sys = GaborSystem::verified(phi.clone(), Lattice::default_for(g)).unwrap();
        let base = mod_norm_signal(&phi, 0.5, 0.7, &Weight::full(1.0), &sys).unwrap();
        let twice = mod_norm_signal(
            &phi.scale(Complex64::new(2.0, 0.0)),
            0.5,
            0.7,
            &Weight::full(1.0),
            &sys,
        )
        .unwrap();
        assert!((twice - 2.0 * base).abs() < 1e-12 * base);
        assert_eq!(
            mod_norm_signal(&SampledSignal::zeros(g), 1.0, 1.0, &Weight::unit(), &sys).unwrap(),
            0.0
        );
    }
}
