//! Romberg integration of `g² λ^{n−1}` (optionally damped) over balls.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, LogScalar};
use crate::profiles::{Interpolation, PowerSegment, RadialProfile, SampledRadial};

const LN2: f64 = core::f64::consts::LN_2;
const ROMBERG_TOL: f64 = 1e-13;
const START_INTERVALS: usize = 16;
const MAX_LEVELS: usize = 14;
const CHUNK: f64 = 0.5;
const MAX_CHUNKS: usize = 20_000;
const TAIL_SHARE: f64 = 1e-17;

pub struct Damping {
    pub alpha: f64,
    /// `2 c_i t` per component.
    pub two_ct: Vec<f64>,
}

/// `x = 2c_i t λ^{2α}` at `λ = 2^u`, or 0 without damping.
fn x_of(d: Option<(f64, f64)>, u: f64) -> f64 {
    match d {
        Some((alpha, k)) if k > 0.0 => (LogScalar::from_f64(k) * LogScalar::exp2(2.0 * alpha * u)).to_f64(),
        _ => 0.0,
    }
}

/// `e^{-x}` carries about `x·ε` relative noise; no estimate can beat that.
fn noise_tol(x: f64) -> f64 {
    ROMBERG_TOL.max(16.0 * f64::EPSILON * x)
}

fn romberg<F: Fn(f64) -> LogScalar>(f: &F, a: f64, b: f64, tol: f64) -> Result<LogScalar> {
    let mut rows: Vec<Vec<LogScalar>> = Vec::new();
    let mut n = START_INTERVALS;
    let h0 = b - a;
    // running trapezoid sum, refined by adding midpoints
    let mut sum = pairwise_sum(&[f(a), f(b)]) * LogScalar::from_f64(0.5);
    let mut inner = pairwise_sum(&(1..n).map(|i| f(a + h0 * i as f64 / n as f64)).collect::<Vec<_>>());
    for level in 0..MAX_LEVELS {
        let trap = (sum + inner) * LogScalar::from_f64(h0 / n as f64);
        let mut row = alloc::vec![trap];
        if let Some(prev) = rows.last() {
            let mut factor = 4.0;
            for k in 0..prev.len() {
                let next = row[k] + (row[k] - prev[k]) / LogScalar::from_f64(factor - 1.0);
                row.push(next);
                factor *= 4.0;
            }
            let best = *row.last().unwrap();
            let last = *prev.last().unwrap();
            if level >= 2 && (best.is_zero() && last.is_zero() || best.rel_diff(last) <= tol) {
                return Ok(best);
            }
        }
        rows.push(row);
        sum = sum + inner;
        let mids: Vec<LogScalar> = (0..n).map(|i| f(a + h0 * (i as f64 + 0.5) / n as f64)).collect();
        inner = pairwise_sum(&mids);
        n *= 2;
    }
    let last = rows.last().unwrap();
    Err(Error::QuadratureDidNotConverge { last: last.last().unwrap().to_f64(), previous: last[0].to_f64() })
}

/// `∫_lo^hi f(u) du` in short chunks; `lo` may be `-inf`. `x` reports the
/// damping argument so the far tails can be truncated safely.
fn chunked<F: Fn(f64) -> LogScalar, X: Fn(f64) -> f64>(
    f: &F,
    x: &X,
    alpha: f64,
    lo: f64,
    hi: f64,
) -> Result<LogScalar> {
    let mut parts: Vec<LogScalar> = Vec::new();
    // start where damping is about to matter; sweep down, then up
    let mut start = hi;
    if x(hi) > 1.0 {
        let (mut a, mut b) = (if lo.is_finite() { lo } else { hi - 4096.0 }, hi);
        if x(a) > 1.0 {
            start = a;
        } else {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if x(m) > 1.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            start = a;
        }
    }
    let mut chunks = 0;
    let mut top = start;
    while top > lo {
        let bottom = if lo.is_finite() { (top - CHUNK).max(lo) } else { top - CHUNK };
        let v = romberg(f, bottom, top, noise_tol(x(top)))?;
        parts.push(v);
        top = bottom;
        chunks += 1;
        if chunks > MAX_CHUNKS {
            return Err(Error::Convergence("oracle lower tail"));
        }
        if !lo.is_finite() {
            let total = pairwise_sum(&parts);
            if total.is_positive() && v <= total * LogScalar::from_f64(TAIL_SHARE) && chunks > 4 {
                break;
            }
            if total.is_zero() && chunks > 64 {
                break;
            }
        }
    }
    let mut bottom = start;
    while bottom < hi {
        // a few e-folds of the damping per chunk
        let width = CHUNK.min(8.0 / (1.0 + x(bottom) * 2.0 * alpha * LN2));
        let top = (bottom + width).min(hi);
        let v = romberg(f, bottom, top, noise_tol(x(top)))?;
        parts.push(v);
        let total = pairwise_sum(&parts);
        if x(top) > 60.0 && v <= total * LogScalar::from_f64(TAIL_SHARE) {
            break;
        }
        bottom = top;
        chunks += 1;
        if chunks > MAX_CHUNKS {
            return Err(Error::Convergence("oracle upper range"));
        }
    }
    Ok(pairwise_sum(&parts))
}

fn segment_integral(s: &PowerSegment, n: u32, upper: f64, d: Option<(f64, f64)>) -> Result<LogScalar> {
    if s.log2_h == f64::NEG_INFINITY {
        return Ok(LogScalar::ZERO);
    }
    let nf = n as f64;
    let m = 2.0 * s.r + nf;
    let h2 = LogScalar::exp2(2.0 * s.log2_h);
    if let Some(ld) = s.log2_thin {
        if upper >= s.log2_b {
            // v = λ^n = b^n (1 − δσ), σ ∈ [0, 1]
            let delta = libm::exp2(ld);
            let xb = x_of(d, s.log2_b);
            let alpha = d.map_or(1.0, |p| p.0);
            let q = 2.0 * alpha / nf;
            // damping relative to the outer radius: e^{xb (1 − w^q)} ≥ 1
            let g = |sv: f64| {
                let w = 1.0 - delta * sv;
                let lift = if xb > 0.0 {
                    LogScalar::exp(-xb * libm::expm1(q * libm::log1p(-delta * sv)))
                } else {
                    LogScalar::ONE
                };
                LogScalar::from_f64(libm::pow(w, m / nf - 1.0)) * lift
            };
            let steep = xb * delta * q;
            let width = 1.0_f64.min(8.0 / (1.0 + steep));
            let mut parts = Vec::new();
            let mut top = 1.0;
            while top > 0.0 {
                let bottom = (top - width).max(0.0);
                let v = romberg(&g, bottom, top, ROMBERG_TOL)?;
                parts.push(v);
                top = bottom;
                if parts.len() > MAX_CHUNKS {
                    return Err(Error::Convergence("oracle thin shell"));
                }
                if v <= pairwise_sum(&parts) * LogScalar::from_f64(TAIL_SHARE) {
                    break;
                }
            }
            let core_part = pairwise_sum(&parts) * if xb > 0.0 { LogScalar::exp(-xb) } else { LogScalar::ONE };
            return Ok(h2 * LogScalar::exp2(m * s.log2_b + ld) * core_part / LogScalar::from_f64(nf));
        }
    }
    let hi = s.log2_b.min(upper);
    if !(s.log2_a < hi) {
        return Ok(LogScalar::ZERO);
    }
    let p2 = 2 * s.log_power as i32;
    let f = |u: f64| {
        let mut v = h2 * LogScalar::exp2(m * u) * LogScalar::from_f64(LN2);
        if p2 > 0 {
            v = v * LogScalar::from_f64(-u * LN2).powi(p2);
        }
        let xv = x_of(d, u);
        if xv > 0.0 {
            v = v * LogScalar::exp(-xv);
        }
        v
    };
    chunked(&f, &|u| x_of(d, u), d.map_or(1.0, |p| p.0), s.log2_a, hi)
}

/// Natural cubic spline second derivatives by the Thomas algorithm.
fn spline_moments(x: &[f64], y: &[f64]) -> Vec<f64> {
    let k = x.len();
    let mut mom = alloc::vec![0.0; k];
    if k < 3 {
        return mom;
    }
    let inner = k - 2;
    let (mut a, mut b, mut c, mut r) =
        (alloc::vec![0.0; inner], alloc::vec![0.0; inner], alloc::vec![0.0; inner], alloc::vec![0.0; inner]);
    for i in 0..inner {
        let (h0, h1) = (x[i + 1] - x[i], x[i + 2] - x[i + 1]);
        a[i] = h0;
        b[i] = 2.0 * (h0 + h1);
        c[i] = h1;
        r[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
    }
    for i in 1..inner {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    let mut sol = alloc::vec![0.0; inner];
    sol[inner - 1] = r[inner - 1] / b[inner - 1];
    for i in (0..inner - 1).rev() {
        sol[i] = (r[i] - c[i] * sol[i + 1]) / b[i];
    }
    mom[1..k - 1].copy_from_slice(&sol);
    mom
}

fn sampled_integral(sr: &SampledRadial, n: u32, upper: f64, d: Option<(f64, f64)>) -> Result<LogScalar> {
    let x = &sr.log2_nodes;
    let nf = n as f64;
    let y: Vec<f64> = sr.magnitudes.iter().map(|m| m.log2_mag()).collect();
    let mom =
        if sr.interpolation == Interpolation::LogLogCubic { spline_moments(x, &y) } else { alloc::vec![0.0; x.len()] };
    let mut parts = Vec::new();
    for i in 0..x.len() - 1 {
        if sr.magnitudes[i].is_zero() || sr.magnitudes[i + 1].is_zero() {
            continue;
        }
        let hi = x[i + 1].min(upper);
        if !(x[i] < hi) {
            continue;
        }
        let (x0, x1, h) = (x[i], x[i + 1], x[i + 1] - x[i]);
        let val = |u: f64| {
            let (p, q) = (x1 - u, u - x0);
            (mom[i] * p * p * p + mom[i + 1] * q * q * q) / (6.0 * h)
                + (y[i] / h - mom[i] * h / 6.0) * p
                + (y[i + 1] / h - mom[i + 1] * h / 6.0) * q
        };
        let f = |u: f64| {
            let xv = x_of(d, u);
            LogScalar::exp2(2.0 * val(u) + nf * u) * LogScalar::from_f64(LN2) * LogScalar::exp(-xv)
        };
        // decreasing deep in the damped tail: bounded by its left value
        if x_of(d, x0) > 60.0 {
            let total = pairwise_sum(&parts);
            if total.is_positive() && f(x0) * LogScalar::from_f64(h) <= total * LogScalar::from_f64(TAIL_SHARE) {
                continue;
            }
        }
        parts.push(romberg(&f, x0, hi, noise_tol(x_of(d, hi)))?);
    }
    Ok(pairwise_sum(&parts))
}

/// `Σ_i ∫_0^{2^upper} [e^{−2c_i t λ^{2α}}] g_i² λ^{n−1} dλ`.
pub fn radial_integral(profile: &RadialProfile, upper: f64, damping: Option<&Damping>) -> Result<LogScalar> {
    let n = profile.dimension();
    let mut parts = Vec::new();
    for (i, comp) in profile.components().iter().enumerate() {
        let d = damping.map(|dm| (dm.alpha, dm.two_ct[i]));
        for s in &comp.segments {
            parts.push(segment_integral(s, n, upper, d)?);
        }
        if let Some(sr) = &comp.sampled {
            parts.push(sampled_integral(sr, n, upper, d)?);
        }
    }
    Ok(pairwise_sum(&parts))
}
