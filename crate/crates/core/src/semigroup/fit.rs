//! Power-law fits of decay traces.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::EvolutionTrace;
use crate::error::{Error, Result};
use crate::indicators::ext_f64;
use crate::numerics::LogScalar;

/// Largest admissible `sup/inf` of the compensated norm over the window.
pub const RATIO_CAP: f64 = 10.0;
/// Largest admissible exponent drift between the two halves of the window.
pub const FIT_TOL: f64 = 0.02;
/// A logarithmic compensation counts when it shrinks the drift this much.
pub const LOG_GAIN: f64 = 5.0;

const LOG_POWERS: [i32; 4] = [1, 2, -1, -2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `σ` in `‖u(t)‖₂ ≈ (1+t)^{−σ}` over the window.
    #[serde(with = "ext_f64")]
    pub sigma_fit: f64,
    pub window: (f64, f64),
    pub sup_ratio: LogScalar,
    pub inf_ratio: LogScalar,
    pub two_sided: bool,
    pub log_correction: bool,
    /// `|σ_first half − σ_second half|`.
    #[serde(with = "ext_f64")]
    pub residual: f64,
    /// Exponent `p` of the best `(ln(e+t))^p` compensation, when one was detected.
    pub log_power: Option<i32>,
    pub log_sigma: Option<f64>,
    pub log_residual: Option<f64>,
    /// Decay steepens without bound across the window.
    pub superpolynomial: bool,
}

impl DecayFit {
    pub fn ratio(&self) -> LogScalar {
        if self.inf_ratio.is_zero() {
            return LogScalar::exp2(f64::INFINITY);
        }
        self.sup_ratio / self.inf_ratio
    }
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

// (σ over the whole window, drift between halves)
fn exponent_and_drift(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let mid = x.len() / 2;
    let s = -ls_slope(x, y);
    let s1 = -ls_slope(&x[..=mid], &y[..=mid]);
    let s2 = -ls_slope(&x[mid..], &y[mid..]);
    (s, libm::fabs(s1 - s2), s1, s2)
}

/// Fits `(1+t)^{−σ}` over the last `fit_window_decades` decades of the trace.
pub fn fit_decay(trace: &EvolutionTrace, fit_window_decades: usize) -> Result<DecayFit> {
    let pts: Vec<(f64, LogScalar)> = trace.positive().collect();
    if pts.len() < 2 {
        return Err(Error::WindowTooShort(String::from("trace has fewer than two positive times")));
    }
    let lo10 = libm::log10(pts[0].0);
    let hi10 = libm::log10(pts[pts.len() - 1].0);
    let w = fit_window_decades as f64;
    if fit_window_decades == 0 || hi10 - lo10 < w + 2.0 - 1e-9 {
        return Err(Error::WindowTooShort(alloc::format!(
            "trace spans {:.2} decades, fit needs {} + 2",
            hi10 - lo10,
            fit_window_decades
        )));
    }
    let start = hi10 - w - 1e-9;
    let win: Vec<(f64, LogScalar)> = pts.into_iter().filter(|(t, _)| libm::log10(*t) >= start).collect();
    if win.len() < 4 {
        return Err(Error::WindowTooShort(String::from("fewer than four samples in the fit window")));
    }
    let window = (win[0].0, win[win.len() - 1].0);
    if win.iter().any(|(_, n)| n.is_zero()) {
        return Ok(DecayFit {
            sigma_fit: f64::INFINITY,
            window,
            sup_ratio: LogScalar::ZERO,
            inf_ratio: LogScalar::ZERO,
            two_sided: false,
            log_correction: false,
            residual: f64::INFINITY,
            log_power: None,
            log_sigma: None,
            log_residual: None,
            superpolynomial: true,
        });
    }
    let x: Vec<f64> = win.iter().map(|(t, _)| libm::log1p(*t) / core::f64::consts::LN_2).collect();
    let y: Vec<f64> = win.iter().map(|(_, n)| n.log2_mag()).collect();
    let (sigma, residual, s1, s2) = exponent_and_drift(&x, &y);
    let comp: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b + sigma * a).collect();
    let hi = comp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = comp.iter().copied().fold(f64::INFINITY, f64::min);
    let two_sided = libm::exp2(hi - lo) <= RATIO_CAP && residual <= FIT_TOL;

    let mut best: Option<(i32, f64, f64)> = None;
    for p in LOG_POWERS {
        let yl: Vec<f64> = win
            .iter()
            .zip(&y)
            .map(|((t, _), v)| v - p as f64 * libm::log2(libm::log(core::f64::consts::E + *t)))
            .collect();
        let (sl, rl, _, _) = exponent_and_drift(&x, &yl);
        if best.is_none_or(|b| rl < b.2) {
            best = Some((p, sl, rl));
        }
    }
    let log_hit = best.filter(|b| !two_sided && b.2 * LOG_GAIN <= residual);
    Ok(DecayFit {
        sigma_fit: sigma,
        window,
        sup_ratio: LogScalar::exp2(hi),
        inf_ratio: LogScalar::exp2(lo),
        two_sided,
        log_correction: log_hit.is_some(),
        residual,
        log_power: log_hit.map(|b| b.0),
        log_sigma: log_hit.map(|b| b.1),
        log_residual: best.map(|b| b.2),
        superpolynomial: s2 > 10.0 && s2 > 2.0 * s1,
    })
}
