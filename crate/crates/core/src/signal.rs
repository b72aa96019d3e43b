//! Sampled signals, phase-space symbols and the canonical window families.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Complex samples of a function on a centered periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        if let Some(i) = samples
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f` at the time nodes.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = grid.time_nodes().map(f).collect();
        Self { grid, samples }
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.norm_sqr() == 0.0)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }
}

/// Complex samples of a symbol `a(x, ω)` on the `N x N` phase-space grid.
/// Row index is the time node, column index the frequency node.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SymbolField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        let n = grid.len();
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        if let Some(i) = values
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len() * grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let n = grid.len();
        let mut values = Vec::with_capacity(n * n);
        for m in 0..n {
            let x = grid.time_node(m);
            for k in 0..n {
                values.push(f(x, grid.freq_node(k)));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.grid.len()
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.grid.len() + n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.norm_sqr() == 0.0)
    }

    /// Phase-space inner product `ΔxΔω Σ a conj(b)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_grid(&self.grid, &other.grid)?;
        let w = self.grid.spacing() * self.grid.freq_spacing();
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * w)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn same_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// The normalized Gaussian window `2^{1/4} e^{-πt²}`.
pub fn gaussian_window(grid: &GridSpec) -> SampledSignal {
    let c = 2f64.powf(0.25);
    SampledSignal::from_real_fn(*grid, |t| c * (-std::f64::consts::PI * t * t).exp())
}

/// The unnormalized dilated Gaussian `e^{-πλt²}`.
///
/// Fails when the profile has not decayed below `1e-12` at the grid boundary,
/// since the periodized samples would then alias.
pub fn dilated_gaussian(grid: &GridSpec, lambda: f64) -> Result<SampledSignal> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dilation must be positive, got {lambda}"
        )));
    }
    let half = grid.period() / 2.0;
    let boundary = (-std::f64::consts::PI * lambda * half * half).exp();
    if boundary >= 1e-12 {
        return Err(Error::Aliasing { lambda, boundary });
    }
    Ok(SampledSignal::from_real_fn(*grid, |t| {
        (-std::f64::consts::PI * lambda * t * t).exp()
    }))
}

/// The `n`-th Hermite function, normalized in `L²` and renormalized on the grid.
pub fn hermite_function(grid: &GridSpec, n: usize) -> Result<SampledSignal> {
    let max = grid.len() / 4;
    if n > max {
        return Err(Error::HermiteResolution { n, max });
    }
    Ok(hermite_family(grid, n + 1)?
        .pop()
        .expect("family is nonempty"))
}

/// Hermite functions `h_0, ..., h_{count-1}` from one pass of the three-term
/// recurrence. `h_0` coincides with [`gaussian_window`].
pub fn hermite_family(grid: &GridSpec, count: usize) -> Result<Vec<SampledSignal>> {
    let max = grid.len() / 4;
    if count == 0 {
        return Ok(Vec::new());
    }
    if count - 1 > max {
        return Err(Error::HermiteResolution { n: count - 1, max });
    }
    // ψ_n(y) orthonormal in dy; h_n(x) = (2π)^{1/4} ψ_n(√(2π) x).
    let scale = (2.0 * std::f64::consts::PI).sqrt();
    let pref = (2.0 * std::f64::consts::PI).powf(0.25) * std::f64::consts::PI.powf(-0.25);
    let ys: Vec<f64> = grid.time_nodes().map(|t| scale * t).collect();
    let mut prev: Vec<f64> = ys.iter().map(|y| pref * (-y * y / 2.0).exp()).collect();
    let mut out = Vec::with_capacity(count);
    out.push(prev.clone());
    if count > 1 {
        let mut cur: Vec<f64> = ys
            .iter()
            .zip(&prev)
            .map(|(y, p)| std::f64::consts::SQRT_2 * y * p)
            .collect();
        out.push(cur.clone());
        for k in 1..count - 1 {
            let a = (2.0 / (k as f64 + 1.0)).sqrt();
            let b = (k as f64 / (k as f64 + 1.0)).sqrt();
            let next: Vec<f64> = ys
                .iter()
                .zip(cur.iter().zip(&prev))
                .map(|(y, (c, p))| a * y * c - b * p)
                .collect();
            prev = std::mem::replace(&mut cur, next);
            out.push(cur.clone());
        }
    }
    let dx = grid.spacing();
    Ok(out
        .into_iter()
        .map(|v| {
            let norm = (dx * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let samples = v.iter().map(|x| Complex64::new(x / norm, 0.0)).collect();
            SampledSignal {
                grid: *grid,
                samples,
            }
        })
        .collect())
}

/// Discrete `L²` inner product `Δ Σ f conj(g)`.
pub fn l2_inner(f: &SampledSignal, g: &SampledSignal) -> Result<Complex64> {
    same_grid(&f.grid, &g.grid)?;
    let s: Complex64 = f
        .samples
        .iter()
        .zip(&g.samples)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(s * f.grid.spacing())
}

pub fn l2_norm(f: &SampledSignal) -> f64 {
    (f.grid.spacing() * f.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// Modified Gram-Schmidt in the discrete `L²` inner product.
pub fn orthonormalize(family: &[SampledSignal]) -> Result<Vec<SampledSignal>> {
    let mut basis: Vec<SampledSignal> = Vec::with_capacity(family.len());
    for f in family {
        let mut v = f.clone();
        for b in &basis {
            let c = l2_inner(&v, b)?;
            v = v.add(&b.scale(-c))?;
        }
        let norm = v.l2_norm();
        if norm == 0.0 {
            return Err(Error::ZeroWindow);
        }
        basis.push(v.scale(Complex64::new(1.0 / norm, 0.0)));
    }
    Ok(basis)
}
