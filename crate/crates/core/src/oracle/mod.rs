//! Brute-force twins of the production integrals.
//!
//! Everything here reads the raw segments and samples of a profile and
//! integrates by Romberg-extrapolated trapezoid sums in `u = log2 λ`. None
//! of the closed forms, pieces or quadrature routines of the other modules
//! are used; only `LogScalar` is shared.

mod integrate;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::besov::dyadic_spectrum;
use crate::error::{Error, Result};
use crate::indicators::phi;
use crate::numerics::{pairwise_sum, LogScalar};
use crate::profiles::RadialProfile;
use crate::semigroup::{evolved_l2_norm, Symbol};

use integrate::{radial_integral, Damping};

pub const PHI_TOL: f64 = 1e-9;
pub const EVOLUTION_TOL: f64 = 1e-8;
/// Corridor half-width for the dyadic identity, calibrated on the corpus.
pub const K2: f64 = 500.0;
/// Both sides below `‖f‖² · 2^{−FLOOR_BITS}` count as collapsed.
const FLOOR_BITS: f64 = 1000.0;
/// Boundary terms of the dyadic sum above this share mean the window is too shallow.
const WINDOW_SHARE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub operation: String,
    pub inputs_digest: String,
    pub closed_form: LogScalar,
    pub brute_force: LogScalar,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

fn digest(profile: &RadialProfile, extra: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("{}|{:?}|{}", profile.dimension(), profile.components(), extra).as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn report(op: &str, dig: String, closed: LogScalar, brute: LogScalar, tol: f64) -> CrossCheckReport {
    let rel = if closed.is_zero() && brute.is_zero() { 0.0 } else { closed.rel_diff(brute) };
    CrossCheckReport {
        operation: String::from(op),
        inputs_digest: dig,
        closed_form: closed,
        brute_force: brute,
        rel_err: rel,
        tolerance: tol,
        pass: rel <= tol,
        note: String::new(),
    }
}

fn omega(n: u32) -> LogScalar {
    // |S^{n−1}| from the recursion |S^{n+1}| = 2π |S^{n−1}| / n
    let pi = core::f64::consts::PI;
    let (mut s, start) = if n % 2 == 1 { (2.0, 1) } else { (2.0 * pi, 2) };
    let mut k = start;
    while k < n {
        s *= 2.0 * pi / k as f64;
        k += 2;
    }
    LogScalar::from_f64(s)
}

/// `Φ_r(ρ)` production value against a brute-force ball integral.
pub fn crosscheck_phi(profile: &RadialProfile, r: f64, log2_rho: f64) -> Result<CrossCheckReport> {
    let closed = phi(profile, r, log2_rho);
    let mass = radial_integral(profile, log2_rho, None)?;
    let n = profile.dimension() as f64;
    let brute = omega(profile.dimension()) * mass * LogScalar::exp2(-(2.0 * r + n) * log2_rho);
    Ok(report("phi", digest(profile, &format!("r={r} log2_rho={log2_rho}")), closed, brute, PHI_TOL))
}

/// `‖e^{tℒ}f‖₂` production value against direct integration of the damped integrand.
pub fn crosscheck_evolution(profile: &RadialProfile, symbol: &Symbol, t: f64) -> Result<CrossCheckReport> {
    let closed = evolved_l2_norm(profile, symbol, t)?;
    let damping = Damping { alpha: symbol.alpha, two_ct: symbol.dampings.iter().map(|c| 2.0 * c * t).collect() };
    let mass = radial_integral(profile, f64::INFINITY, Some(&damping))?;
    let brute = (omega(profile.dimension()) * mass).sqrt();
    Ok(report(
        "evolution",
        digest(profile, &format!("alpha={} c={:?} t={t}", symbol.alpha, symbol.dampings)),
        closed,
        brute,
        EVOLUTION_TOL,
    ))
}

/// `t^{2σ/α}‖e^{tℒ}f‖₂²` against `Σ_k 4^{2kσ} e^{−ĉ 4^{kα}} d_{k−p(t)}`,
/// `d_j = e_j² 2^{−4jσ}`, `4^{pα} ≤ t < 4^{(p+1)α}`, `ĉ` the smallest damping.
pub fn crosscheck_dyadic_identity(
    profile: &RadialProfile,
    symbol: &Symbol,
    sigma: f64,
    t: f64,
    j_window: (i64, i64),
) -> Result<CrossCheckReport> {
    if !(sigma > 0.0) || !(t > 0.0) {
        return Err(Error::Domain("dyadic identity needs sigma > 0 and t > 0"));
    }
    let alpha = symbol.alpha;
    let lhs = LogScalar::from_f64(t).powf(2.0 * sigma / alpha) * evolved_l2_norm(profile, symbol, t)?.powi(2);
    let sp = dyadic_spectrum(profile, j_window.0, j_window.1)?;
    let p = libm::floor(libm::log(t) / (alpha * libm::log(4.0)) + 1e-12) as i64;
    let c_hat = symbol.min_damping();
    let terms: Vec<LogScalar> = sp
        .js()
        .map(|j| {
            let k = (j + p) as f64;
            let d = sp.get(j).powi(2) * LogScalar::exp2(-4.0 * j as f64 * sigma);
            let damp = c_hat * libm::exp2(2.0 * k * alpha);
            LogScalar::exp2(4.0 * k * sigma) * LogScalar::exp(-damp) * d
        })
        .collect();
    let rhs = pairwise_sum(&terms);
    let dig = digest(profile, &format!("alpha={alpha} c={:?} sigma={sigma} t={t} j={j_window:?}", symbol.dampings));
    let floor = profile.l2_norm_sq().log2_mag() - FLOOR_BITS;
    let weight = LogScalar::from_f64(t).powf(2.0 * sigma / alpha);
    if lhs.log2_mag() - weight.log2_mag() < floor && rhs.log2_mag() - weight.log2_mag() < floor {
        let mut r = report("dyadic_identity", dig, lhs, rhs, K2);
        r.rel_err = 0.0;
        r.pass = true;
        r.note = String::from("below floor: both sides collapsed");
        return Ok(r);
    }
    let edge = terms[0].max(terms[terms.len() - 1]);
    if rhs.is_zero() || edge > rhs * LogScalar::from_f64(WINDOW_SHARE) {
        return Err(Error::WindowTooShallow(format!(
            "dyadic sum is not contained in the window [{}, {}] at t = {t:e}",
            j_window.0, j_window.1
        )));
    }
    let ratio = (lhs / rhs).to_f64();
    Ok(CrossCheckReport {
        operation: String::from("dyadic_identity"),
        inputs_digest: dig,
        closed_form: lhs,
        brute_force: rhs,
        rel_err: ratio,
        tolerance: K2,
        pass: (1.0 / K2..=K2).contains(&ratio),
        note: String::from("rel_err holds the ratio lhs/rhs; pass means 1/K2 <= ratio <= K2"),
    })
}

#[cfg(test)]
mod tests;
