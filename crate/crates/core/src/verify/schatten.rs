//! Operator experiments: Weyl versus localization assembly, Schatten class
//! sufficiency, the rank-one counterexample, frame Bessel bounds and the
//! Schatten characterization through orthonormal bases.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::params::Params;
use super::report::{ReportBuilder, ToleranceKind};
use crate::error::{check_exponent, Error, Result};
use crate::gabor::{
    gabor_coefficients, mixed_norm, symbol_coefficients, GaborSystem, Lattice, SymbolGaborSystem,
    Weight,
};
use crate::grid::{make_grid, GridSpec};
use crate::quantize::{
    localization_matrix, random_operator_with_spectrum, random_unitary, rank_one, singular_values,
    weyl_matrix, OperatorMatrix,
};
use crate::random::RandomSymbol;
use crate::signal::{
    gaussian_window, hermite_family, hermite_function, l2_inner, orthonormalize, SampledSignal,
    SymbolField,
};
use crate::tfa::{cross_wigner, symbol_convolve, tf_shift};

/// `(Σ |x|^p)^{1/p}`, or the maximum for `p = ∞`.
fn lp(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().cloned().fold(0.0, f64::max)
    } else {
        values.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn rel_hs_distance(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<f64> {
    let d = a.sub(b)?.hilbert_schmidt();
    let s = a.hilbert_schmidt();
    Ok(if s == 0.0 { d } else { d / s })
}

pub(super) fn weyl_localization_link(
    p: &Params,
    rng: &mut ChaCha8Rng,
    b: &mut ReportBuilder,
) -> Result<()> {
    let l = p.f64("l")?;
    let sizes = p.usize_list("sizes")?;
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("sizes must not be empty".into()));
    }
    let broken = p.bool("force_broken")?;
    let symbols: Vec<RandomSymbol> = (0..p.usize("symbols")?)
        .map(|_| RandomSymbol::draw(rng))
        .collect();
    let mut dist = Vec::with_capacity(sizes.len());
    let mut control = 0.0;
    for (idx, &n) in sizes.iter().enumerate() {
        let g = make_grid(n, l)?;
        let phi = gaussian_window(&g);
        let w = cross_wigner(&phi, &phi)?.to_symbol_grid()?;
        let mut fields: Vec<SymbolField> = symbols.iter().map(|s| s.sample(&g)).collect();
        fields.push(w.clone());
        let mut worst: f64 = 0.0;
        let mut worst_raw: f64 = 0.0;
        for a in &fields {
            let loc = localization_matrix(a, &phi, &phi)?;
            let sigma = symbol_convolve(a, &w)?;
            let weyl = weyl_matrix(&sigma)?;
            worst = worst.max(rel_hs_distance(&loc, &weyl)?);
            if broken || idx + 1 == sizes.len() {
                worst_raw = worst_raw.max(rel_hs_distance(&loc, &weyl_matrix(a)?)?);
            }
        }
        b.measure(format!("distance_n{n}"), worst);
        dist.push(if broken { worst_raw } else { worst });
        control = worst_raw;
        if idx + 1 == sizes.len() {
            let zero = SymbolField::zeros(g);
            let z1 = localization_matrix(&zero, &phi, &phi)?.hilbert_schmidt();
            let z2 = weyl_matrix(&symbol_convolve(&zero, &w)?)?.hilbert_schmidt();
            b.at_most("zero_symbol_operator_norm", z1.max(z2), 0.0);
        }
    }
    let last = *dist.last().expect("nonempty");
    b.at_most("final_distance", last, 1e-2);
    let increases = dist.windows(2).filter(|w| w[1] >= w[0]).count();
    b.at_most("refinement_non_decreases", increases as f64, 0.0);
    b.at_least("negative_control_unsmoothed_distance", control, 0.1);
    Ok(())
}

struct SufficiencyGrid {
    n: usize,
    /// Signal coefficient arrays for φ, h1 and M_1 φ.
    windows: Vec<crate::gabor::CoefficientArray>,
    symbols: Vec<crate::gabor::CoefficientArray>,
    /// Singular spectra of the localization operators, indexed `[pair][symbol]`.
    spectra: Vec<Vec<crate::quantize::SingularSpectrum>>,
}

const PAIRS: [(usize, usize); 3] = [(0, 0), (0, 1), (1, 2)];

fn sufficiency_grid(
    n: usize,
    l: f64,
    symbols: &[RandomSymbol],
    weyl_log: Option<&[f64]>,
    b: &mut ReportBuilder,
) -> Result<SufficiencyGrid> {
    let g = make_grid(n, l)?;
    let phi = gaussian_window(&g);
    let h1 = hermite_function(&g, 1)?;
    let shift = l.round() as i64;
    let mphi = tf_shift(&phi, 0, shift);
    let windows_raw = [phi, h1, mphi];
    let sys1 = GaborSystem::verified(
        windows_raw[0].clone(),
        Lattice::from_spacing(g, 0.375, 2.0 / 3.0)?,
    )?;
    let sys2 = SymbolGaborSystem::gaussian(
        Lattice::from_spacing(g, 0.75, 2.0 / 3.0)?,
        Lattice::from_spacing(g.dual(), 2.0 / 3.0, 0.75)?,
    )?;
    let windows = windows_raw
        .iter()
        .map(|w| gabor_coefficients(w, &sys1))
        .collect::<Result<Vec<_>>>()?;
    let fields: Vec<SymbolField> = symbols.iter().map(|s| s.sample(&g)).collect();
    let coeffs = fields
        .iter()
        .map(|a| symbol_coefficients(a, &sys2))
        .collect::<Result<Vec<_>>>()?;
    let mut spectra = Vec::new();
    for &(i1, i2) in &PAIRS {
        let row = fields
            .iter()
            .map(|a| singular_values(&localization_matrix(a, &windows_raw[i1], &windows_raw[i2])?))
            .collect::<Result<Vec<_>>>()?;
        spectra.push(row);
    }
    if let Some(ps) = weyl_log {
        let w = cross_wigner(&windows_raw[0], &windows_raw[0])?.to_symbol_grid()?;
        for &pe in ps {
            let q = if pe <= 2.0 { pe } else { conjugate(pe) };
            let mut ratios = Vec::new();
            for a in &fields {
                let sigma = symbol_convolve(a, &w)?;
                let sp = singular_values(&weyl_matrix(&sigma)?)?.schatten(pe)?;
                let sn = mixed_norm(&symbol_coefficients(&sigma, &sys2)?, pe, q, &Weight::unit())?;
                ratios.push(sp / sn);
            }
            if let Some(st) = super::report::RatioStatistic::from_ratios(&ratios) {
                b.measure(format!("weyl_p{pe}_n{n}_spread"), st.spread);
            }
        }
    }
    Ok(SufficiencyGrid {
        n,
        windows,
        symbols: coeffs,
        spectra,
    })
}

fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

pub(super) fn schatten_sufficiency(
    p: &Params,
    rng: &mut ChaCha8Rng,
    b: &mut ReportBuilder,
) -> Result<()> {
    let ps = p.f64_list("p")?;
    let ss = p.f64_list("s")?;
    for &pe in &ps {
        check_exponent(pe)?;
    }
    if ss.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidParameter(
            "s must be finite and nonnegative".into(),
        ));
    }
    let l = p.f64("l")?;
    let sizes = p.usize_list("sizes")?;
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("sizes must not be empty".into()));
    }
    let symbols: Vec<RandomSymbol> = (0..p.usize("symbols")?)
        .map(|_| RandomSymbol::draw(rng))
        .collect();
    let grids = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| sufficiency_grid(n, l, &symbols, (i == 0).then_some(&ps[..]), b))
        .collect::<Result<Vec<_>>>()?;
    for &pe in &ps {
        // (φ1 index, φ2 index) exponents per case.
        let (e1, e2) = if pe < 1.0 {
            (pe, pe)
        } else if pe <= 2.0 {
            (1.0, pe)
        } else {
            (1.0, conjugate(pe))
        };
        for &s in &ss {
            let mut maxima = Vec::new();
            for gr in &grids {
                let mut ratios = Vec::new();
                for (pi, &(i1, i2)) in PAIRS.iter().enumerate() {
                    let n1 = mixed_norm(&gr.windows[i1], e1, e1, &Weight::full(s))?;
                    let n2 = mixed_norm(&gr.windows[i2], e2, e2, &Weight::full(s))?;
                    for (si, c) in gr.symbols.iter().enumerate() {
                        let na = mixed_norm(c, pe, f64::INFINITY, &Weight::second(-s))?;
                        let sp = gr.spectra[pi][si].schatten(pe)?;
                        ratios.push(sp / (na * n1 * n2));
                    }
                }
                let prefix = format!("p{pe}_s{s}_n{}_", gr.n);
                if let Some(st) = b.ratio_family(&prefix, &ratios, 50.0) {
                    maxima.push(st.max_ratio);
                }
            }
            if maxima.len() >= 2 {
                let drift = (maxima[maxima.len() - 1] / maxima[0] - 1.0).abs();
                b.at_most(format!("p{pe}_s{s}_max_ratio_drift"), drift, 0.2);
            }
        }
    }
    Ok(())
}

pub(super) fn counterexample(
    p: &Params,
    _rng: &mut ChaCha8Rng,
    b: &mut ReportBuilder,
) -> Result<()> {
    let pe = p.f64("p")?;
    if !(pe > 0.0 && pe <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "p = {pe} outside (0, 2]; the divergence claim needs p < 2 and p = 2 is the equality case"
        )));
    }
    let m_max = p.usize("m_max")?;
    let g = make_grid(p.usize("n")?, p.f64("l")?)?;
    if m_max < 4 || !m_max.is_power_of_two() {
        return Err(Error::InvalidParameter(
            "m_max must be a power of two ≥ 4".into(),
        ));
    }
    let basis = orthonormalize(&hermite_family(&g, m_max)?)?;
    let c: Vec<f64> = (1..=m_max)
        .map(|k| 1.0 / ((k as f64).sqrt() * ((k + 1) as f64).ln()))
        .collect();
    let partial = |m: usize| -> Result<SampledSignal> {
        let mut h = SampledSignal::zeros(g);
        for (ck, phi) in c.iter().zip(&basis).take(m) {
            h = h.add(&phi.scale(Complex64::new(*ck, 0.0)))?;
        }
        Ok(h)
    };
    let oracle = |m: usize| -> (f64, f64) {
        let two: f64 = c[..m].iter().map(|x| x * x).sum();
        let sp: f64 = c[..m].iter().map(|x| x.powf(pe)).sum();
        (two, sp)
    };
    let mut ms = Vec::new();
    let mut m = 2;
    while m <= m_max {
        ms.push(m);
        m *= 2;
    }
    let mut sums = Vec::new();
    let mut norm_err: f64 = 0.0;
    let mut max_rank = 0usize;
    let mut equality_err: f64 = 0.0;
    for &m in &ms {
        let h = partial(m)?;
        let t = rank_one(&h)?;
        let sum: f64 = basis
            .iter()
            .take(m)
            .map(|phi| Ok(t.apply(phi)?.l2_norm().powf(pe)))
            .sum::<Result<f64>>()?;
        let h2 = h.l2_norm().powi(2);
        let spec = singular_values(&t)?;
        norm_err = norm_err.max((spec.largest() - h2).abs() / h2);
        max_rank = max_rank.max(spec.rank());
        if pe == 2.0 {
            equality_err = equality_err.max((sum - h2 * h2).abs() / (h2 * h2));
        }
        if m == 4 {
            b.measure("sum_c_p_m4_direct", oracle(4).1);
            b.check(
                "sum_c_p_m4_from_operator",
                sum / h.l2_norm().powf(pe),
                oracle(4).1,
                1e-10,
                ToleranceKind::Rel,
            );
        }
        b.measure(format!("partial_sum_m{m}"), sum);
        b.measure(format!("norm_sq_m{m}"), h2);
        sums.push(sum);
    }
    for i in 1..ms.len() {
        let (m, half) = (ms[i], ms[i - 1]);
        let ratio = sums[i] / sums[i - 1];
        let (t2, tp) = oracle(m);
        let (h2, hp) = oracle(half);
        let predicted = (t2 / h2).powf(pe / 2.0) * tp / hp;
        b.check(
            format!("growth_ratio_m{m}"),
            ratio,
            predicted,
            0.05,
            ToleranceKind::Rel,
        );
        b.at_least(
            format!("growth_excess_m{m}"),
            ratio / (tp / hp) - 1.0,
            -1e-12,
        );
    }
    let non_increasing = sums.windows(2).filter(|w| w[1] <= w[0]).count();
    b.at_most("partial_sum_non_increases", non_increasing as f64, 0.0);
    let inc = partial(m_max)?.l2_norm().powi(2) - partial(m_max - 1)?.l2_norm().powi(2);
    b.at_most("norm_sq_increment_last", inc, 1e-3);
    b.at_most("schatten_vs_norm_sq_rel_error", norm_err, 1e-10);
    b.at_most("max_rank", max_rank as f64, 1.0);
    if pe == 2.0 {
        b.at_most("equality_rel_error", equality_err, 1e-10);
    }
    Ok(())
}

fn random_spectrum(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let decay = rng.random_range(0.05..1.0);
    let scale = rng.random_range(0.5..2.0);
    (0..n)
        .map(|i| scale * (-decay * i as f64).exp() * rng.random_range(0.5..1.0))
        .collect()
}

fn signals_from_unitary(g: &GridSpec, u: &DMatrix<Complex64>) -> Result<Vec<SampledSignal>> {
    let s = 1.0 / g.spacing().sqrt();
    (0..u.ncols())
        .map(|j| SampledSignal::new(*g, u.column(j).iter().map(|z| z * s).collect()))
        .collect()
}

pub(super) fn frame_bessel(p: &Params, rng: &mut ChaCha8Rng, b: &mut ReportBuilder) -> Result<()> {
    let pe = p.f64("p")?;
    check_exponent(pe)?;
    let broken = p.bool("force_broken")?;
    let g = make_grid(p.usize("n")?, p.f64("l")?)?;
    let sys = GaborSystem::verified(
        gaussian_window(&g),
        Lattice::new(g, p.usize("a")?, p.usize("b")?)?,
    )?;
    let (fa, fb) = sys.bounds().expect("verified system");
    b.measure("lower_frame_bound", fa);
    b.measure("upper_frame_bound", fb);
    let lat = *sys.lattice();
    let atoms: Vec<SampledSignal> = (0..lat.time_count())
        .flat_map(|k| (0..lat.freq_count()).map(move |n| (k, n)))
        .map(|(k, n)| sys.atom(k, n))
        .collect();

    let (mut upper, mut lower): (f64, f64) = (-1.0, -1.0);
    for _ in 0..p.usize("signals")? {
        let f = crate::random::random_signal(&g, rng);
        let e = gabor_coefficients(&f, &sys)?.energy();
        let n2 = f.l2_norm().powi(2);
        upper = upper.max(e / (fb * n2) - 1.0);
        lower = lower.max(1.0 - e / (fa * n2));
    }
    b.at_most("upper_frame_excess", upper, 1e-8);
    b.at_most("lower_frame_excess", lower, 1e-8);
    let atom_max = atoms
        .iter()
        .map(|a| a.l2_norm().powi(2))
        .fold(0.0, f64::max);
    b.at_most("atom_norm_sq_excess", atom_max / fb - 1.0, 1e-8);

    let diag =
        |t: &OperatorMatrix, left: &dyn Fn(&SampledSignal) -> SampledSignal| -> Result<f64> {
            let vals = atoms
                .iter()
                .map(|a| Ok(l2_inner(&t.apply(a)?, &left(a))?.norm()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(lp(&vals, pe))
        };
    let n = g.len();
    let ni = n as i64;
    let (mut lemma, mut corollary, mut onb): (f64, f64, f64) = (-1.0, -1.0, -1.0);
    let mut violations = 0usize;
    for _ in 0..p.usize("operators")? {
        let spectrum = random_spectrum(n, rng);
        let t = random_operator_with_spectrum(g, &spectrum, rng)?;
        let sp = lp(&spectrum, pe);
        let k = rng.random_range(0..ni);
        let m = rng.random_range(0..ni);
        let l1 = diag(&t, &|a| a.clone())? / (fb * sp) - 1.0;
        let l2 = diag(&t, &|a| tf_shift(a, k, m))? / (fb * sp) - 1.0;
        if l1 > 1e-8 || l2 > 1e-8 {
            violations += 1;
        }
        lemma = lemma.max(l1);
        corollary = corollary.max(l2);
        let basis = signals_from_unitary(&g, &random_unitary(n, rng))?;
        let vals = basis
            .iter()
            .map(|v| Ok(l2_inner(&t.apply(v)?, v)?.norm()))
            .collect::<Result<Vec<f64>>>()?;
        onb = onb.max(lp(&vals, pe) / sp - 1.0);
    }
    let t0 = rank_one(&sys.window().clone())?;
    let s0 = singular_values(&t0)?.schatten(pe)?;
    let control = diag(&t0, &|a| a.clone())? / s0 - 1.0;
    let zero = OperatorMatrix::zeros(g);
    b.at_most("zero_operator_diagonal", diag(&zero, &|a| a.clone())?, 0.0);
    if pe >= 1.0 {
        b.at_most("lemma_excess", if broken { control } else { lemma }, 1e-8);
        b.at_most("corollary_excess", corollary, 1e-8);
        b.at_most("orthonormal_basis_excess", onb, 1e-8);
    } else {
        b.measure("lemma_excess", lemma);
        b.measure("corollary_excess", corollary);
        b.measure("orthonormal_basis_excess", onb);
        b.measure("bound_violations", violations as f64);
        b.note("p < 1: bounds are measured only");
    }
    b.at_least("negative_control_frame_free_excess", control, 1e-3);
    Ok(())
}

/// Hermite functions followed by spikes, orthonormalized and truncated to `N`
/// vectors.
fn hermite_spike_basis(g: &GridSpec) -> Result<Vec<SampledSignal>> {
    let n = g.len();
    let mut family = orthonormalize(&hermite_family(g, n / 4 + 1)?)?;
    let s = 1.0 / g.spacing().sqrt();
    for j in 0..n {
        if family.len() == n {
            break;
        }
        let mut v = SampledSignal::from_fn(*g, |_| Complex64::new(0.0, 0.0)).into_samples();
        v[j] = Complex64::new(s, 0.0);
        let mut v = SampledSignal::new(*g, v)?;
        for _ in 0..2 {
            for e in &family {
                let c = l2_inner(&v, e)?;
                v = v.add(&e.scale(-c))?;
            }
        }
        let norm = v.l2_norm();
        if norm > 1e-6 {
            family.push(v.scale(Complex64::new(1.0 / norm, 0.0)));
        }
    }
    Ok(family)
}

pub(super) fn schatten_characterization(
    p: &Params,
    rng: &mut ChaCha8Rng,
    b: &mut ReportBuilder,
) -> Result<()> {
    let pe = p.f64("p")?;
    if !(pe >= 2.0 && pe.is_finite()) {
        return Err(Error::InvalidParameter(
            "p must be finite and at least 2".into(),
        ));
    }
    let g = make_grid(p.usize("n")?, p.f64("l")?)?;
    let n = g.len();
    let basis = hermite_spike_basis(&g)?;
    b.check(
        "basis_size",
        basis.len() as f64,
        n as f64,
        0.0,
        ToleranceKind::Abs,
    );
    let power_sum = |t: &OperatorMatrix, onb: &[SampledSignal]| -> Result<f64> {
        onb.iter().map(|v| Ok(t.apply(v)?.l2_norm().powf(pe))).sum()
    };
    let (mut equality, mut excess, mut singular): (f64, f64, f64) = (0.0, -1.0, 0.0);
    for _ in 0..p.usize("operators")? {
        let spectrum = random_spectrum(n, rng);
        let t = random_operator_with_spectrum(g, &spectrum, rng)?;
        let target: f64 = spectrum.iter().map(|s| s.powf(pe)).sum();
        let fixed = power_sum(&t, &basis)?;
        if pe == 2.0 {
            equality = equality.max((fixed - target).abs() / target);
        }
        excess = excess.max(fixed / target - 1.0);
        let random = signals_from_unitary(&g, &random_unitary(n, rng))?;
        excess = excess.max(power_sum(&t, &random)? / target - 1.0);
        let svd = t.scaled().svd(false, true);
        let vt = svd.v_t.ok_or(Error::Decomposition)?;
        let right = signals_from_unitary(&g, &vt.adjoint())?;
        singular = singular.max((power_sum(&t, &right)? - target).abs() / target);
    }
    if pe == 2.0 {
        b.at_most("hilbert_schmidt_equality_rel_error", equality, 1e-6);
    }
    b.at_most("power_sum_excess", excess, 1e-8);
    b.at_most("singular_basis_rel_error", singular, 1e-8);
    Ok(())
}
