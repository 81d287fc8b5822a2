//! Spectral evolution `‖e^{tℒ}f‖₂` for diagonal dissipative symbols
//! `−c_i |ξ|^{2α}`, decay traces, exponent fits and the time-side Besov norm.
//!
//! Results are computed in the diagonalizing frame: profiles carry the
//! magnitudes `|(P f̂)_i|` directly, and `P(ξ)` never appears.

mod fit;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, ln_gamma_pq, pairwise_sum, quad_log2, LogScalar, QuadratureSpec, TimeGrid};
use crate::profiles::{Piece, RadialProfile};

pub use fit::{fit_decay, DecayFit, FIT_TOL, LOG_GAIN, RATIO_CAP};

const LN2: f64 = core::f64::consts::LN_2;
/// Below this value of `2ct λ^{2α}` the damping factor is 1 to working precision.
const X_NEGLIGIBLE: f64 = 1e-13;
/// Past `x₀ + X_CUT` a piece's remaining integrand is below `e^{−X_CUT}` of its start.
const X_CUT: f64 = 800.0;
/// Pieces whose bound is below this share of the running total are dropped.
const NEGLIGIBLE_SHARE: f64 = 1e-20;
const MONOTONE_SLACK: f64 = 1e-9;
const CANCEL_LIMIT: f64 = 1e-6;
const TRUNCATION_LIMIT: f64 = 0.01;
const EDGE_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub alpha: f64,
    pub dampings: Vec<f64>,
    #[serde(default)]
    pub label: String,
}

impl Symbol {
    pub fn new(alpha: f64, dampings: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain("alpha must be positive"));
        }
        if dampings.is_empty() || dampings.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
            return Err(Error::Domain("dampings must be positive"));
        }
        let label = format!("alpha={alpha} c={dampings:?}");
        Ok(Self { alpha, dampings, label })
    }

    /// `α = 1`, unit dampings: the heat semigroup.
    pub fn heat(components: usize) -> Self {
        Self::new(1.0, alloc::vec![1.0; components.max(1)]).unwrap()
    }

    pub fn fractional(alpha: f64, components: usize) -> Result<Self> {
        Self::new(alpha, alloc::vec![1.0; components.max(1)])
    }

    pub fn min_damping(&self) -> f64 {
        self.dampings.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn check(&self, profile: &RadialProfile) -> Result<()> {
        if self.dampings.len() != profile.component_count() {
            return Err(Error::ComponentMismatch { profile: profile.component_count(), symbol: self.dampings.len() });
        }
        Ok(())
    }
}

/// `‖e^{tℒ}f‖₂ = (ω_n Σ_i ∫ e^{−2c_i t λ^{2α}} g_i² λ^{n−1} dλ)^{1/2}`.
pub fn evolved_l2_norm(profile: &RadialProfile, symbol: &Symbol, t: f64) -> Result<LogScalar> {
    symbol.check(profile)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain("time must be finite and nonnegative"));
    }
    if t == 0.0 {
        return Ok(profile.l2_norm());
    }
    let mut order: Vec<(f64, LogScalar, &Piece)> = profile
        .all_pieces()
        .map(|(i, p)| {
            let kappa = LogScalar::from_f64(2.0 * symbol.dampings[i] * t);
            (x_at(kappa, symbol.alpha, p.log2_a), kappa, p)
        })
        .collect();
    // least damped first, so the running total is known before the far tail
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut parts = Vec::new();
    let mut total = LogScalar::ZERO;
    for (xa, kappa, p) in order {
        let bound = p.mass_bound() * LogScalar::exp(-xa);
        if total.is_positive() && bound < total * LogScalar::from_f64(NEGLIGIBLE_SHARE) {
            continue;
        }
        let v = evolved_piece(p, kappa, symbol.alpha)?;
        total = total + v;
        parts.push(v);
    }
    Ok((profile.omega() * pairwise_sum(&parts)).sqrt())
}

/// `x = κ λ^{2α}` at `λ = 2^u`, as f64 (0 and ∞ at the extremes).
fn x_at(kappa: LogScalar, alpha: f64, u: f64) -> f64 {
    if u == f64::NEG_INFINITY {
        return 0.0;
    }
    (kappa * LogScalar::exp2(2.0 * alpha * u)).to_f64()
}

/// `log2 λ` at which `κ λ^{2α} = x`.
fn u_at(kappa: LogScalar, alpha: f64, x: f64) -> f64 {
    (libm::log2(x) - kappa.log2_mag()) / (2.0 * alpha)
}

fn evolved_piece(p: &Piece, kappa: LogScalar, alpha: f64) -> Result<LogScalar> {
    if p.h2().is_zero() {
        return Ok(LogScalar::ZERO);
    }
    let xb = x_at(kappa, alpha, p.log2_b);
    if xb <= X_NEGLIGIBLE {
        return Ok(p.full_mass());
    }
    if let Some(ld) = p.log2_thin {
        return thin_piece(p, kappa, alpha, xb, ld);
    }
    if p.log_power == 0 && p.cubic.is_none() && p.m > 0.0 {
        if let Some(v) = power_closed_form(p, kappa, alpha, xb)? {
            return Ok(v);
        }
    }
    damped_quadrature(p, kappa, alpha, p.log2_a, p.log2_b)
}

// ∫_a^b λ^{m−1} e^{−κλ^{2α}} dλ = κ^{−s} Γ(s) [P(s, x_b) − P(s, x_a)] / 2α, s = m/2α
fn power_closed_form(p: &Piece, kappa: LogScalar, alpha: f64, xb: f64) -> Result<Option<LogScalar>> {
    let s = p.m / (2.0 * alpha);
    let xa = x_at(kappa, alpha, p.log2_a);
    let (lpa, lqa) = ln_gamma_pq(s, xa)?;
    let (lpb, lqb) = ln_gamma_pq(s, xb)?;
    let (big, small) = if lpb < -LN2 { (lpb, lpa) } else { (lqa, lqb) };
    let (big, small) = (LogScalar::exp(big), LogScalar::exp(small));
    if big <= small {
        return Ok(None);
    }
    let diff = big - small;
    if (diff / big).to_f64() < CANCEL_LIMIT {
        return Ok(None);
    }
    let gamma = LogScalar::exp(ln_gamma(s));
    let v = p.h2() * gamma * kappa.powf(-s) * diff / LogScalar::from_f64(2.0 * alpha);
    Ok(Some(v))
}

fn thin_piece(p: &Piece, kappa: LogScalar, alpha: f64, xb: f64, log2_delta: f64) -> Result<LogScalar> {
    let full = p.full_mass();
    let delta = libm::exp2(log2_delta);
    if delta < 1e-12 {
        // damping at the mass-weighted mean of λ^{2α} over the shell
        let x = xb * (1.0 - alpha * delta / p.n as f64);
        return Ok(full * LogScalar::exp(-x));
    }
    // resolved shell: weighted mean of the damping, insensitive to rounding in log2_a
    let num = damped_quadrature(p, kappa, alpha, p.log2_a, p.log2_b)?;
    let den = p.mass_between(p.log2_a, p.log2_b);
    if den.is_zero() {
        return Ok(LogScalar::ZERO);
    }
    Ok(full * (num / den))
}

fn damped_quadrature(p: &Piece, kappa: LogScalar, alpha: f64, lo: f64, hi: f64) -> Result<LogScalar> {
    let mut parts = Vec::new();
    let mut lo = lo;
    // undamped inner part in closed form
    let u_small = u_at(kappa, alpha, X_NEGLIGIBLE);
    if u_small > lo {
        let split = u_small.min(hi);
        parts.push(p.mass_between(lo, split));
        lo = split;
    }
    if lo < hi {
        let s = (p.m / (2.0 * alpha)).max(0.0);
        let x_lo = x_at(kappa, alpha, lo);
        let u_cut = u_at(kappa, alpha, x_lo.max(s) + X_CUT);
        let hi = hi.min(u_cut);
        if lo < hi {
            let n = p.n as f64;
            let g = |u: f64| {
                let x = x_at(kappa, alpha, u);
                LogScalar::exp2(2.0 * p.log2_value(u) + n * u) * LogScalar::exp(-x)
            };
            let spec = QuadratureSpec::with_tol(1e-12);
            parts.push(quad_log2(g, lo, hi, &spec)? * LogScalar::from_f64(LN2));
        }
    }
    Ok(pairwise_sum(&parts))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub norms: Vec<LogScalar>,
    pub alpha: f64,
    pub symbol: String,
    pub profile: String,
}

impl EvolutionTrace {
    /// Assembles a trace from precomputed norms, enforcing monotone decay.
    pub fn from_norms(
        times: Vec<f64>,
        norms: Vec<LogScalar>,
        symbol: &Symbol,
        profile: &RadialProfile,
    ) -> Result<Self> {
        if times.len() != norms.len() || times.is_empty() {
            return Err(Error::InvalidInput(String::from("trace times and norms differ in length")));
        }
        for w in times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidInput(String::from("trace times must increase")));
            }
        }
        for (i, w) in norms.windows(2).enumerate() {
            if w[1] > w[0] * LogScalar::from_f64(1.0 + MONOTONE_SLACK) {
                return Err(Error::Internal(format!(
                    "norm increases between t = {:e} and t = {:e}",
                    times[i],
                    times[i + 1]
                )));
            }
        }
        Ok(Self {
            times,
            norms,
            alpha: symbol.alpha,
            symbol: symbol.label.clone(),
            profile: String::from(profile.label()),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Geometric part of the trace (`t > 0`).
    pub fn positive(&self) -> impl Iterator<Item = (f64, LogScalar)> + '_ {
        self.times.iter().copied().zip(self.norms.iter().copied()).filter(|(t, _)| *t > 0.0)
    }
}

pub fn evolution_trace(
    profile: &RadialProfile,
    symbol: &Symbol,
    t_decades: (f64, f64),
    samples_per_decade: usize,
) -> Result<EvolutionTrace> {
    let grid = TimeGrid::new(t_decades.0, t_decades.1, samples_per_decade)?.with_zero();
    let times = grid.times();
    let norms = times.iter().map(|t| evolved_l2_norm(profile, symbol, *t)).collect::<Result<Vec<_>>>()?;
    EvolutionTrace::from_norms(times, norms, symbol, profile)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeatQ {
    One,
    Inf,
}

impl HeatQ {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(Self::One),
            "inf" | "∞" => Some(Self::Inf),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatNorm {
    pub sigma: f64,
    pub q: HeatQ,
    pub value: LogScalar,
    pub argmax_t: Option<f64>,
    /// Supremum sits on the first or last grid point and strictly exceeds the interior.
    pub edge_attained: bool,
    /// Estimated share of the `q = 1` integral lying outside the grid.
    pub tail_fraction: f64,
}

/// `‖t^{σ/α} ‖e^{tℒ}f‖₂‖_{L^q(dt/t)}` over the grid times. This is the
/// time-side counterpart of the `Ḃ^{−2σ}_{2,q}` norm.
pub fn heat_characterization_norm(
    profile: &RadialProfile,
    symbol: &Symbol,
    sigma: f64,
    q: HeatQ,
    grid: &TimeGrid,
) -> Result<HeatNorm> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain("sigma must be positive"));
    }
    let times: Vec<f64> = grid.times().into_iter().filter(|t| *t > 0.0).collect();
    let norms = times.iter().map(|t| evolved_l2_norm(profile, symbol, *t)).collect::<Result<Vec<_>>>()?;
    heat_norm_from_samples(&times, &norms, sigma, symbol.alpha, q)
}

/// Same as [`heat_characterization_norm`] on precomputed `(t, ‖u(t)‖₂)` samples.
pub fn heat_norm_from_samples(
    times: &[f64],
    norms: &[LogScalar],
    sigma: f64,
    alpha: f64,
    q: HeatQ,
) -> Result<HeatNorm> {
    if times.len() < 3 || times.len() != norms.len() {
        return Err(Error::InvalidInput(String::from("heat norm needs at least three samples")));
    }
    let k = sigma / alpha;
    let w: Vec<LogScalar> = times.iter().zip(norms).map(|(t, n)| LogScalar::from_f64(*t).powf(k) * *n).collect();
    let (mut best, mut arg) = (LogScalar::ZERO, None);
    for (t, x) in times.iter().zip(&w) {
        if x.is_positive() && (arg.is_none() || *x > best) {
            best = *x;
            arg = Some(*t);
        }
    }
    let interior = w[1..w.len() - 1].iter().fold(LogScalar::ZERO, |m, x| m.max(*x));
    let edge = arg.is_some() && w[0].max(w[w.len() - 1]) > interior * LogScalar::from_f64(1.0 + EDGE_MARGIN);
    let (value, tail_fraction) = match q {
        HeatQ::Inf => (best, 0.0),
        HeatQ::One => {
            let body = trapezoid_log_t(times, &w);
            // near t = 0 the weight is t^{σ/α}‖f‖₂; above the grid, a local power law
            let low = w[0] / LogScalar::from_f64(k);
            let last = w.len() - 1;
            let beta = slope(times[last - 1], times[last], w[last - 1], w[last]);
            let high = if w[last].is_zero() {
                LogScalar::ZERO
            } else if beta < 0.0 {
                w[last] / LogScalar::from_f64(-beta)
            } else {
                return Err(Error::TruncationDominates(String::from(
                    "integrand is not decaying at the upper end of the time grid",
                )));
            };
            let total = body + low + high;
            let frac = if total.is_zero() { 0.0 } else { ((low + high) / total).to_f64() };
            if frac > TRUNCATION_LIMIT {
                return Err(Error::TruncationDominates(format!(
                    "{:.2}% of the time integral lies outside the grid",
                    100.0 * frac
                )));
            }
            (total, frac)
        }
    };
    Ok(HeatNorm { sigma, q, value, argmax_t: arg, edge_attained: edge, tail_fraction })
}

fn slope(t0: f64, t1: f64, w0: LogScalar, w1: LogScalar) -> f64 {
    if w0.is_zero() || w1.is_zero() {
        return f64::NEG_INFINITY;
    }
    (w1.ln_mag() - w0.ln_mag()) / (libm::log(t1) - libm::log(t0))
}

fn trapezoid_log_t(times: &[f64], w: &[LogScalar]) -> LogScalar {
    let terms: Vec<LogScalar> = (1..times.len())
        .map(|i| {
            let h = libm::log(times[i]) - libm::log(times[i - 1]);
            (w[i] + w[i - 1]) * LogScalar::from_f64(0.5 * h)
        })
        .collect();
    pairwise_sum(&terms)
}
