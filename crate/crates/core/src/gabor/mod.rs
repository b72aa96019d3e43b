//! Lattices, Gabor systems and frame bounds.

pub mod coeffs;
pub mod weight;

pub use coeffs::{
    gabor_coefficients, mixed_norm, mod_norm_signal, mod_norm_symbol, symbol_coefficients,
    CoefficientArray,
};
pub use weight::{v_s, weight_eval, Weight, WeightKind};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::signal::{same_grid, SampledSignal, SymbolField};
use crate::tfa::tf_shift;

/// Lattice `αℤ × βℤ` with `α = aΔ`, `β = b/L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    grid: GridSpec,
    a: usize,
    b: usize,
}

impl Lattice {
    /// Requires `a | N`, `b | N` and `ab < N`.
    pub fn new(grid: GridSpec, a: usize, b: usize) -> Result<Self> {
        let lat = Self::with_density_check(grid, a, b, false)?;
        Ok(lat)
    }

    /// Like [`Lattice::new`] but admits the critical density `ab = N`.
    pub fn critical(grid: GridSpec, a: usize, b: usize) -> Result<Self> {
        Self::with_density_check(grid, a, b, true)
    }

    fn with_density_check(
        grid: GridSpec,
        a: usize,
        b: usize,
        allow_critical: bool,
    ) -> Result<Self> {
        let n = grid.len();
        if a == 0 || b == 0 || !n.is_multiple_of(a) || !n.is_multiple_of(b) {
            return Err(Error::InvalidLattice(format!(
                "steps a={a}, b={b} must divide N={n}"
            )));
        }
        let ok = if allow_critical {
            a * b <= n
        } else {
            a * b < n
        };
        if !ok {
            return Err(Error::InvalidLattice(format!(
                "a*b={} must be below N={n}",
                a * b
            )));
        }
        Ok(Self { grid, a, b })
    }

    /// Redundancy-4 lattice with `b = 2a` (or `b = a` when `N/4` is square).
    pub fn default_for(grid: GridSpec) -> Self {
        let n = grid.len();
        let target = n / 4;
        let mut a = 1;
        while a * a * 4 <= target {
            a *= 2;
        }
        let b = target / a;
        Self { grid, a, b }
    }

    /// The lattice with physical spacings `alpha`, `beta` on `grid`.
    pub fn from_spacing(grid: GridSpec, alpha: f64, beta: f64) -> Result<Self> {
        let a = alpha / grid.spacing();
        let b = beta * grid.period();
        let ar = a.round();
        let br = b.round();
        if (a - ar).abs() > 1e-9 || (b - br).abs() > 1e-9 || ar < 1.0 || br < 1.0 {
            return Err(Error::InvalidLattice(format!(
                "spacings alpha={alpha}, beta={beta} are not grid-aligned"
            )));
        }
        Self::new(grid, ar as usize, br as usize)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        self.a as f64 * self.grid.spacing()
    }

    pub fn beta(&self) -> f64 {
        self.b as f64 / self.grid.period()
    }

    pub fn redundancy(&self) -> f64 {
        self.grid.len() as f64 / (self.a * self.b) as f64
    }

    /// Number of translation nodes `N/a`.
    pub fn time_count(&self) -> usize {
        self.grid.len() / self.a
    }

    /// Number of modulation nodes `N/b`.
    pub fn freq_count(&self) -> usize {
        self.grid.len() / self.b
    }

    /// Centered translation index in `[-N/(2a), N/(2a))`.
    pub fn centered_time(&self, k: usize) -> i64 {
        centered(k, self.time_count())
    }

    /// Centered modulation index in `[-N/(2b), N/(2b))`.
    pub fn centered_freq(&self, n: usize) -> i64 {
        centered(n, self.freq_count())
    }
}

pub(crate) fn centered(k: usize, count: usize) -> i64 {
    let k = k as i64;
    let c = count as i64;
    if k < (c + 1) / 2 {
        k
    } else {
        k - c
    }
}

/// Gabor system `(M_{βn} T_{αk} g)` for signals.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborSystem {
    window: SampledSignal,
    lattice: Lattice,
    bounds: Option<(f64, f64)>,
}

impl GaborSystem {
    pub fn new(window: SampledSignal, lattice: Lattice) -> Result<Self> {
        same_grid(window.grid(), lattice.grid())?;
        if window.is_zero() {
            return Err(Error::ZeroWindow);
        }
        Ok(Self {
            window,
            lattice,
            bounds: None,
        })
    }

    /// Builds the system and computes its frame bounds.
    pub fn verified(window: SampledSignal, lattice: Lattice) -> Result<Self> {
        let mut sys = Self::new(window, lattice)?;
        sys.bounds = Some(frame_bounds(&sys)?);
        Ok(sys)
    }

    pub fn window(&self) -> &SampledSignal {
        &self.window
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn grid(&self) -> &GridSpec {
        self.window.grid()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    /// `M_{βn} T_{αk} g` for raw (uncentered) indices.
    pub fn atom(&self, k: usize, n: usize) -> SampledSignal {
        tf_shift(
            &self.window,
            (k * self.lattice.a) as i64,
            (n * self.lattice.b) as i64,
        )
    }
}

/// Frame operator `Σ ⟨·, g_λ⟩ g_λ` in the Δ-normalized spike basis, via the
/// Walnut representation: modulation sums vanish unless `i ≡ j mod N/b`.
pub fn frame_operator(sys: &GaborSystem) -> DMatrix<Complex64> {
    let grid = sys.grid();
    let n = grid.len();
    let a = sys.lattice.a;
    let period = n / sys.lattice.b;
    let g = sys.window.samples();
    let scale = grid.spacing() * sys.lattice.freq_count() as f64;
    let mut s = DMatrix::zeros(n, n);
    for k in 0..sys.lattice.time_count() {
        let shift = k * a;
        for i in 0..n {
            let gi = g[(i + n - shift) % n];
            if gi.norm_sqr() == 0.0 {
                continue;
            }
            let mut j = i % period;
            while j < n {
                s[(i, j)] += gi * g[(j + n - shift) % n].conj() * scale;
                j += period;
            }
        }
    }
    s
}

/// Extreme eigenvalues of the frame operator.
pub fn frame_bounds(sys: &GaborSystem) -> Result<(f64, f64)> {
    let s = frame_operator(sys);
    let eig = s.symmetric_eigen();
    let lo = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if lo <= 1e-12 {
        return Err(Error::NotAFrame(lo));
    }
    Ok((lo, hi))
}

/// Gabor system for symbols on phase space: one lattice per axis, the
/// `x`-axis on the signal grid and the `ω`-axis on its dual grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGaborSystem {
    window: SymbolField,
    lattice_x: Lattice,
    lattice_w: Lattice,
    bounds: Option<(f64, f64)>,
}

impl SymbolGaborSystem {
    pub fn new(window: SymbolField, lattice_x: Lattice, lattice_w: Lattice) -> Result<Self> {
        same_grid(window.grid(), lattice_x.grid())?;
        same_grid(&window.grid().dual(), lattice_w.grid())?;
        if window.is_zero() {
            return Err(Error::ZeroWindow);
        }
        Ok(Self {
            window,
            lattice_x,
            lattice_w,
            bounds: None,
        })
    }

    /// The window `Φ = ½ e^{-π(x²+ω²)}` with frame bounds from its two
    /// factors `2^{-1/2} e^{-πx²}` and `2^{-1/2} e^{-πω²}`.
    pub fn gaussian(lattice_x: Lattice, lattice_w: Lattice) -> Result<Self> {
        let grid = *lattice_x.grid();
        let window = crate::tfa::gaussian_window_2d(&grid);
        let mut sys = Self::new(window, lattice_x, lattice_w)?;
        let factor = |g: &GridSpec| {
            SampledSignal::from_real_fn(*g, |t| {
                std::f64::consts::FRAC_1_SQRT_2 * (-std::f64::consts::PI * t * t).exp()
            })
        };
        let (ax, bx) = frame_bounds(&GaborSystem::new(factor(&grid), lattice_x)?)?;
        let (aw, bw) = frame_bounds(&GaborSystem::new(factor(lattice_w.grid()), lattice_w)?)?;
        sys.bounds = Some((ax * aw, bx * bw));
        Ok(sys)
    }

    /// Default lattices `a = b = 8` on both axes when `N ≥ 128`, otherwise
    /// the per-axis redundancy-2 lattice with `a = b`.
    pub fn default_gaussian(grid: GridSpec) -> Result<Self> {
        let n = grid.len();
        let mut a = 1;
        while a * a * 2 < n {
            a *= 2;
        }
        let step = if n >= 128 { 8 } else { (a / 2).max(1) };
        let lx = Lattice::new(grid, step, step)?;
        let lw = Lattice::new(grid.dual(), step, step)?;
        Self::gaussian(lx, lw)
    }

    pub fn window(&self) -> &SymbolField {
        &self.window
    }

    pub fn lattice_x(&self) -> &Lattice {
        &self.lattice_x
    }

    pub fn lattice_w(&self) -> &Lattice {
        &self.lattice_w
    }

    pub fn grid(&self) -> &GridSpec {
        self.window.grid()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }
}
