//! Closed forms and exact identities: Gaussian STFT, covariance of STFT
//! products, and the STFT of a cross-Wigner distribution.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::params::Params;
use super::report::{ReportBuilder, ToleranceKind};
use crate::error::Result;
use crate::grid::{make_grid, GridSpec};
use crate::random::random_signal;
use crate::signal::{dilated_gaussian, gaussian_window, hermite_function, SampledSignal};
use crate::tfa::{cross_wigner, stft, stft2d_plane, tf_shift, unit_root, StftMatrix};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn grid(p: &Params) -> Result<GridSpec> {
    make_grid(p.usize("n")?, p.f64("l")?)
}

/// Largest deviation of an STFT from `c e^{±πixω} e^{-π(x²+ω²)/2}`.
fn closed_form_deviation(v: &StftMatrix, prefactor: f64, sign: f64) -> f64 {
    let g = v.grid();
    let n = g.len();
    let mut dev: f64 = 0.0;
    for m in 0..n {
        let x = g.time_node(m);
        for k in 0..n {
            let w = g.freq_node(k);
            let c = Complex64::from_polar(
                prefactor * (-PI * (x * x + w * w) / 2.0).exp(),
                sign * PI * x * w,
            );
            dev = dev.max((v.get(m, k) - c).norm());
        }
    }
    dev
}

fn unit_profile_deviation(g: &GridSpec) -> Result<f64> {
    let p0 = dilated_gaussian(g, 1.0)?;
    Ok(closed_form_deviation(&stft(&p0, &p0)?, FRAC_1_SQRT_2, -1.0))
}

pub(super) fn gaussian_stft(
    p: &Params,
    _rng: &mut ChaCha8Rng,
    b: &mut ReportBuilder,
) -> Result<()> {
    let g = grid(p)?;
    let broken = p.bool("force_broken")?;
    let p0 = dilated_gaussian(&g, 1.0)?;
    let v0 = stft(&p0, &p0)?;
    let phi = gaussian_window(&g);
    let v = stft(&phi, &phi)?;
    let dev_unit = closed_form_deviation(&v0, FRAC_1_SQRT_2, -1.0);
    let dev_conj = closed_form_deviation(&v0, FRAC_1_SQRT_2, 1.0);
    b.at_most(
        "max_deviation_unit_profile",
        if broken { dev_conj } else { dev_unit },
        1e-6,
    );
    b.at_most(
        "max_deviation_normalized_window",
        closed_form_deviation(&v, 1.0, -1.0),
        1e-6,
    );
    let c = g.center();
    b.check(
        "origin_value_unit_profile",
        v0.get(c, c).re,
        FRAC_1_SQRT_2,
        1e-10,
        ToleranceKind::Abs,
    );
    b.measure(
        "deviation_normalized_window_from_unit_prefactor",
        closed_form_deviation(&v, FRAC_1_SQRT_2, -1.0),
    );
    b.at_least("negative_control_conjugate_phase_deviation", dev_conj, 1e-2);
    let coarse = p.usize("coarse_n")?;
    b.measure(
        "coarse_grid_deviation",
        unit_profile_deviation(&make_grid(coarse, g.period())?)?,
    );
    if g.len() >= 32 {
        b.measure(
            "half_grid_deviation",
            unit_profile_deviation(&make_grid(g.len() / 2, g.period())?)?,
        );
    }
    b.note("normalized window 2^{1/4}e^{-πx²} has V_φφ(0,0) = ‖φ‖² = 1; prefactor 2^{-1/2} belongs to e^{-πx²}");
    Ok(())
}

fn product(v1: &StftMatrix, v2: &StftMatrix) -> Vec<Complex64> {
    v1.values()
        .iter()
        .zip(v2.values())
        .map(|(a, b)| a.conj() * b)
        .collect()
}

/// `(T_z P)[m][ν] = P[m - k][ν - n]`.
fn translate(p: &[Complex64], n: usize, k: i64, l: i64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    let ni = n as i64;
    for m in 0..n {
        let sm = (m as i64 - k).rem_euclid(ni) as usize;
        for v in 0..n {
            let sv = (v as i64 - l).rem_euclid(ni) as usize;
            out[m * n + v] = p[sm * n + sv];
        }
    }
    out
}

/// `(M_ζ P)[m][ν] = e^{2πi(j1(m - N/2) + j2(ν - N/2))/N} P[m][ν]`.
fn modulate(p: &[Complex64], n: usize, j1: i64, j2: i64) -> Vec<Complex64> {
    let h = (n / 2) as i64;
    let mut out = p.to_vec();
    for m in 0..n {
        for v in 0..n {
            out[m * n + v] *= unit_root(j1 * (m as i64 - h) + j2 * (v as i64 - h), n);
        }
    }
    out
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub(super) fn covariance(p: &Params, rng: &mut ChaCha8Rng, b: &mut ReportBuilder) -> Result<()> {
    let g = grid(p)?;
    let n = g.len();
    let ni = n as i64;
    let broken = p.bool("force_broken")?;
    let instances = p.usize("instances")?;
    let (mut e4, mut e5, mut ebo, mut neg, mut trivial) =
        (0.0f64, 0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for inst in 0..instances {
        let f = random_signal(&g, rng);
        let h = random_signal(&g, rng);
        let p1 = random_signal(&g, rng);
        let p2 = random_signal(&g, rng);
        // z = (kΔ, l/L) and ζ = (j1/L, j2Δ); the first instance uses z = ζ = 0.
        let (k, l, j1, j2) = if inst == 0 {
            (0, 0, 0, 0)
        } else {
            (
                rng.random_range(0..ni),
                rng.random_range(0..ni),
                rng.random_range(0..ni),
                rng.random_range(0..ni),
            )
        };
        let base = product(&stft(&f, &p1)?, &stft(&h, &p2)?);
        let scale = max_abs(&base).max(f64::MIN_POSITIVE);
        // R = M_{z2} T_{z1}, S = M_{ζ1} T_{-ζ2}.
        let rf = tf_shift(&f, k, l);
        let rh = tf_shift(&h, k, l);
        let s = |x: &SampledSignal| tf_shift(x, -j2, j1);
        let lhs4 = translate(&base, n, k, l);
        let rhs4 = product(&stft(&rf, &p1)?, &stft(&rh, &p2)?);
        let lhs5 = modulate(&base, n, j1, j2);
        let rhs5 = product(&stft(&f, &p1)?, &stft(&s(&h), &s(&p2))?);
        let lhsbo = modulate(&translate(&base, n, k, l), n, j1, j2);
        let rhsbo = product(&stft(&rf, &p1)?, &stft(&s(&rh), &s(&p2))?);
        let d4 = max_diff(&lhs4, &rhs4) / scale;
        let off = translate(&base, n, k + 1, l);
        let dneg = max_diff(&off, &rhs4) / scale;
        if inst == 0 {
            trivial = d4.max(max_diff(&lhs5, &rhs5) / scale);
        }
        e4 = e4.max(if broken { dneg } else { d4 });
        e5 = e5.max(max_diff(&lhs5, &rhs5) / scale);
        ebo = ebo.max(max_diff(&lhsbo, &rhsbo) / scale);
        neg = neg.min(dneg);
    }
    b.at_most("max_rel_error_translation", e4, 1e-10);
    b.at_most("max_rel_error_modulation", e5, 1e-10);
    b.at_most("max_rel_error_combined", ebo, 1e-10);
    b.measure("zero_shift_error", trivial);
    b.at_least("negative_control_off_by_one_error", neg, 1e-3);
    b.note("combined identity uses M_{z2}T_{z1} on both signals");
    Ok(())
}

pub(super) fn wigner_stft_identity(
    p: &Params,
    _rng: &mut ChaCha8Rng,
    b: &mut ReportBuilder,
) -> Result<()> {
    let g = grid(p)?;
    let n = g.len();
    let h = n / 2;
    let a = p.usize("a")?;
    let bs = p.usize("b")?;
    if a == 0 || bs == 0 || n % a != 0 || n % bs != 0 || bs % 2 != 0 {
        return Err(crate::Error::InvalidParameter(
            "lattice steps must divide N and b must be even".into(),
        ));
    }
    let threshold = p.f64("threshold")?;
    let broken = p.bool("force_broken")?;
    let phi = gaussian_window(&g);
    let big_phi = cross_wigner(&phi, &phi)?.to_symbol_grid()?;
    let hermite = |k| hermite_function(&g, k);
    let pairs: Vec<(usize, usize)> = vec![(0, 0), (1, 0), (0, 2), (2, 1), (2, 2), (3, 1)];
    let zc = (n / a) as i64;
    let nc = (n / bs) as i64;
    let mut worst: f64 = 0.0;
    let mut worst_unrotated: f64 = 0.0;
    let mut compared = 0usize;
    let mut origin = f64::NAN;
    for &(i1, i2) in &pairs {
        let f1 = hermite(i1)?;
        let f2 = hermite(i2)?;
        let w = cross_wigner(&f1, &f2)?.to_symbol_grid()?;
        let v1 = stft(&f1, &phi)?;
        let v2 = stft(&f2, &phi)?;
        for k1 in -zc / 2..zc / 2 {
            for k2 in -zc / 2..zc / 2 {
                let z0 = h as i64 + a as i64 * k1;
                let z1 = h as i64 + a as i64 * k2;
                let plane = stft2d_plane(&w, &big_phi, (z0 as usize, z1 as usize))?;
                for n1 in -nc / 2..nc / 2 {
                    for n2 in -nc / 2..nc / 2 {
                        let j1 = (h as i64 + bs as i64 * n1) as usize;
                        let j2 = (h as i64 + bs as i64 * n2) as usize;
                        let lhs = plane[j1 * n + j2].norm();
                        if (i1, i2, k1, k2, n1, n2) == (0, 0, 0, 0, 0, 0) {
                            origin = lhs;
                        }
                        let half1 = bs as i64 * n1 / 2;
                        let half2 = bs as i64 * n2 / 2;
                        // z ± ζ̃/2 with ζ̃ = (ζ2, -ζ1).
                        let eval = |dt: i64, dw: i64| -> Option<f64> {
                            let (tp, fp, tm, fm) = (z0 + dt, z1 + dw, z0 - dt, z1 - dw);
                            let inside = |x: i64| (0..n as i64).contains(&x);
                            if !(inside(tp) && inside(fp) && inside(tm) && inside(fm)) {
                                return None;
                            }
                            Some(
                                v2.get(tp as usize, fp as usize).norm()
                                    * v1.get(tm as usize, fm as usize).norm(),
                            )
                        };
                        if let Some(rhs) = eval(half2, -half1) {
                            if lhs > threshold && rhs > threshold {
                                compared += 1;
                                worst = worst.max((lhs - rhs).abs() / rhs);
                            }
                        }
                        if let Some(rhs) = eval(half1, half2) {
                            if lhs > threshold && rhs > threshold {
                                worst_unrotated = worst_unrotated.max((lhs - rhs).abs() / rhs);
                            }
                        }
                    }
                }
            }
        }
    }
    let zero = SampledSignal::zeros(g);
    let w0 = cross_wigner(&hermite(1)?, &zero)?.to_symbol_grid()?;
    let zero_lhs = max_abs(&stft2d_plane(&w0, &big_phi, (h, h))?);
    b.at_most(
        "max_rel_error",
        if broken { worst_unrotated } else { worst },
        1e-4,
    );
    b.at_least("points_compared", compared as f64, 1.0);
    b.check("origin_value", origin, 1.0, 1e-6, ToleranceKind::Abs);
    b.at_most("zero_input_max", zero_lhs, 0.0);
    b.at_least("negative_control_unrotated_error", worst_unrotated, 1e-2);
    b.note("origin value is ‖φ‖⁴ = 1 for the normalized window");
    Ok(())
}
