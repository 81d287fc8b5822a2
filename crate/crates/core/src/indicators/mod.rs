//! Decay indicators `Φ_r(ρ) = ρ^{−(2r+n)} ∫_{|ξ|≤ρ} |f̂|²`, their windowed
//! liminf/limsup estimates and the decay characters `r₊ ≤ r₋`.
//!
//! The limit `ρ → 0` is replaced by a comparison of two tail windows: `D1`
//! (deepest) and `D2` (the one above it). The limsup is finite when
//! `max_{D1} Φ_r ≤ max_{D2} Φ_r` and the liminf positive when
//! `min_{D1} Φ_r ≥ min_{D2} Φ_r > 0`. Raising `r` multiplies the deeper
//! window by a larger factor, so both differences are increasing in `r`
//! and the characters are found by bisection.

mod report;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::LogScalar;
use crate::profiles::{RadialProfile, Side};

pub(crate) use report::ext_f64;
pub use report::{CharValue, Classification, DecayCharacterReport, DecayIndicatorReport};

pub const SLOPE_TOL: f64 = 0.05;
pub const OSC_TOL: f64 = 1.2;
pub const R_TOL: f64 = 0.1;
/// Largest window-to-window drift of a settled indicator.
pub const DRIFT_TOL: f64 = 0.2;
pub const BISECT_TOL: f64 = 1e-6;
const ORDER_SLACK: f64 = 1e-3;
const DEFAULT_FLOOR: f64 = -160.0;

/// One lacunary period: `Φ` is largest at the outer radius of a shell
/// (closed ball) and smallest just below its inner radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub log2_outer: f64,
    pub log2_inner: f64,
}

/// Geometric `ρ`-grid, optionally with structural periods that replace the
/// geometric tail windows when they lie deeper than the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoGrid {
    pub log2_rho_max: f64,
    pub log2_rho_min: f64,
    pub samples_per_octave: u32,
    pub tail_octaves: u32,
    /// Ordered from shallow to deep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub periods: Vec<Period>,
}

impl RhoGrid {
    pub fn new(log2_rho_min: f64, log2_rho_max: f64) -> Result<Self> {
        if !(log2_rho_min < log2_rho_max) || !log2_rho_min.is_finite() || !log2_rho_max.is_finite() {
            return Err(Error::Domain("rho grid needs finite log2_rho_min < log2_rho_max"));
        }
        Ok(Self { log2_rho_max, log2_rho_min, samples_per_octave: 8, tail_octaves: 8, periods: Vec::new() })
    }

    pub fn with_periods(mut self, periods: Vec<Period>) -> Self {
        self.periods = periods;
        self
    }

    /// Grid chosen from the profile's own structure.
    ///
    /// Profiles reaching `|ξ| = 0` get a geometric tail below `2^-160`.
    /// Profiles whose shells reach deeper than that use the shells as
    /// periods, dropping the innermost shell whose lower side has nothing
    /// beneath it. Anything else is supported away from the origin and is
    /// probed just below its support.
    pub fn auto(profile: &RadialProfile) -> Self {
        let radii = profile.structural_log2_radii();
        let deepest = radii.last().copied().unwrap_or(0.0);
        let span = 4.0 * 8.0;
        if profile.reaches_origin() {
            let lo = DEFAULT_FLOOR.min(deepest - 24.0);
            return Self::new(lo, lo + span).unwrap();
        }
        if deepest < DEFAULT_FLOOR {
            let mut shells: Vec<(f64, f64)> =
                profile.all_pieces().filter(|(_, p)| !p.h2().is_zero()).map(|(_, p)| (p.log2_b, p.log2_a)).collect();
            shells.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
            shells.pop();
            let periods = shells.into_iter().map(|(b, a)| Period { log2_outer: b, log2_inner: a }).collect();
            return Self::new(DEFAULT_FLOOR, DEFAULT_FLOOR + span).unwrap().with_periods(periods);
        }
        let lo = deepest - 24.0;
        Self::new(lo, lo + span).unwrap()
    }

    pub fn octaves(&self) -> f64 {
        self.log2_rho_max - self.log2_rho_min
    }

    fn step(&self) -> f64 {
        1.0 / self.samples_per_octave as f64
    }

    /// Geometric sample points, from the top down.
    pub fn log2_points(&self) -> Vec<f64> {
        let k = libm::round(self.octaves() * self.samples_per_octave as f64) as i64;
        (0..=k).map(|i| self.log2_rho_max - i as f64 * self.step()).collect()
    }

    fn structural(&self) -> bool {
        self.periods.len() >= 2 && self.periods.last().unwrap().log2_inner < self.log2_rho_min
    }

    /// `(D1, D2)` probe points.
    fn windows(&self) -> Result<(Vec<(f64, Side)>, Vec<(f64, Side)>)> {
        if self.structural() {
            let p = &self.periods;
            let d = |q: &Period| alloc::vec![(q.log2_outer, Side::At), (q.log2_inner, Side::Below)];
            return Ok((d(&p[p.len() - 1]), d(&p[p.len() - 2])));
        }
        let per = (self.tail_octaves * self.samples_per_octave) as usize;
        let pts = self.log2_points();
        if pts.len() < 2 * per + 1 {
            return Err(Error::WindowTooShort(format!(
                "rho grid spans {} octaves, two tail windows need {}",
                self.octaves(),
                2 * self.tail_octaves
            )));
        }
        let n = pts.len();
        let d1 = pts[n - per..].iter().map(|u| (*u, Side::At)).collect();
        let d2 = pts[n - 2 * per..n - per].iter().map(|u| (*u, Side::At)).collect();
        Ok((d1, d2))
    }
}

/// `Φ_r(2^{log2_rho})` with the closed ball.
pub fn phi(profile: &RadialProfile, r: f64, log2_rho: f64) -> LogScalar {
    phi_side(profile, r, log2_rho, Side::At)
}

/// `Φ_r` on either side of a radius carrying a thin shell.
pub fn phi_side(profile: &RadialProfile, r: f64, log2_rho: f64, side: Side) -> LogScalar {
    let s = 2.0 * r + profile.n();
    profile.ball_mass(log2_rho, side) * LogScalar::exp2(-s * log2_rho)
}

/// `(log2 ρ, Φ_r(ρ))` over the geometric grid.
pub fn phi_sweep(profile: &RadialProfile, r: f64, grid: &RhoGrid) -> Vec<(f64, LogScalar)> {
    grid.log2_points().into_iter().map(|u| (u, phi(profile, r, u))).collect()
}

struct Tail {
    mass1: Vec<(f64, LogScalar)>,
    mass2: Vec<(f64, LogScalar)>,
    center1: f64,
    center2: f64,
}

impl Tail {
    fn new(profile: &RadialProfile, grid: &RhoGrid) -> Result<Self> {
        let (d1, d2) = grid.windows()?;
        let mass = |d: &[(f64, Side)]| -> Vec<(f64, LogScalar)> {
            d.iter().map(|(u, side)| (*u, profile.ball_mass(*u, *side))).collect()
        };
        let center = |d: &[(f64, Side)]| d.iter().map(|x| x.0).sum::<f64>() / d.len() as f64;
        Ok(Self { center1: center(&d1), center2: center(&d2), mass1: mass(&d1), mass2: mass(&d2) })
    }

    fn phis(w: &[(f64, LogScalar)], s: f64, comp: &dyn Fn(f64) -> LogScalar) -> (LogScalar, LogScalar) {
        let vals: Vec<LogScalar> = w.iter().map(|(u, m)| *m * LogScalar::exp2(-s * u) / comp(*u)).collect();
        let mx = vals.iter().copied().fold(LogScalar::ZERO, LogScalar::max);
        let mn = vals.iter().copied().fold(vals[0], LogScalar::min);
        (mn, mx)
    }

    /// `((min, max) over D1, (min, max) over D2)`.
    fn extrema(&self, s: f64, comp: &dyn Fn(f64) -> LogScalar) -> ((LogScalar, LogScalar), (LogScalar, LogScalar)) {
        (Self::phis(&self.mass1, s, comp), Self::phis(&self.mass2, s, comp))
    }

    fn all_zero(&self) -> bool {
        self.mass1.iter().chain(&self.mass2).all(|(_, m)| m.is_zero())
    }
}

fn no_comp(_: f64) -> LogScalar {
    LogScalar::ONE
}

fn log2_gap(deep: LogScalar, shallow: LogScalar) -> f64 {
    match (deep.is_zero(), shallow.is_zero()) {
        (true, true) => 0.0,
        (true, false) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        (false, false) => deep.log2_mag() - shallow.log2_mag(),
    }
}

/// Windowed indicator estimate at a single `r`.
pub fn decay_indicator(profile: &RadialProfile, r: f64, grid: &RhoGrid) -> Result<DecayIndicatorReport> {
    let n = profile.n();
    if r <= -n / 2.0 {
        return Ok(DecayIndicatorReport::zero(r, "r <= -n/2: the indicator vanishes identically"));
    }
    let tail = Tail::new(profile, grid)?;
    let s = 2.0 * r + n;
    if tail.all_zero() {
        return Ok(DecayIndicatorReport::zero(r, "no spectral mass in the tail windows"));
    }
    let dist = tail.center2 - tail.center1;
    let ((mn1, mx1), (mn2, mx2)) = tail.extrema(s, &no_comp);
    // slope of log2 Φ against log2 ρ
    let slope_hi = -log2_gap(mx1, mx2) / dist;
    let slope_lo = -log2_gap(mn1, mn2) / dist;
    let mut diag = String::new();
    if grid.structural() {
        diag.push_str("windows: structural periods; ");
    }

    let p = profile.deep_log_power();
    if p >= 1 {
        let q = 2 * p as i32;
        let comp = |u: f64| LogScalar::from_f64(-u * core::f64::consts::LN_2).powi(q);
        let ((cn1, cx1), (cn2, cx2)) = tail.extrema(s, &comp);
        let c_hi = -log2_gap(cx1, cx2) / dist;
        let c_lo = -log2_gap(cn1, cn2) / dist;
        if c_hi.abs() <= SLOPE_TOL && c_lo.abs() <= SLOPE_TOL && !cn1.is_zero() {
            diag.push_str(&format!("Φ/(ln 1/ρ)^{q} settles (slopes {c_hi:.4}, {c_lo:.4})"));
            return Ok(DecayIndicatorReport {
                r,
                liminf_est: mn1,
                limsup_est: mx1,
                classification: Classification::LogCorrected,
                tail_slope: slope_hi,
                tail_slope_lower: slope_lo,
                ratio: ratio(mx1, mn1),
                diagnostics: diag,
            });
        }
    }

    let flat = |x: f64| x.abs() <= SLOPE_TOL;
    let classification = if slope_lo < -SLOPE_TOL && slope_hi < -SLOPE_TOL {
        Classification::Infinite
    } else if slope_hi > SLOPE_TOL {
        Classification::Zero
    } else if flat(slope_hi) && flat(slope_lo) && !mn1.is_zero() {
        let drift = (slope_hi.abs().max(slope_lo.abs()) * dist).abs();
        if drift > libm::log2(1.0 + DRIFT_TOL) {
            return Err(Error::IndicatorNotResolved(format!(
                "tail extrema drift {:.1}% between windows at r = {r}",
                (libm::exp2(drift) - 1.0) * 100.0
            )));
        }
        if ratio(mx1, mn1) > OSC_TOL {
            Classification::Oscillating
        } else {
            Classification::FinitePositive
        }
    } else {
        // upper envelope bounded or growing while the lower one sinks
        diag.push_str("liminf and limsup separate; ");
        Classification::Oscillating
    };
    diag.push_str(&format!("tail slopes {slope_hi:.4} (max), {slope_lo:.4} (min)"));
    let limsup = if classification == Classification::Infinite || slope_hi < -SLOPE_TOL {
        LogScalar::exp2(f64::INFINITY)
    } else {
        mx1
    };
    let liminf = if slope_lo > SLOPE_TOL || mn1.is_zero() { LogScalar::ZERO } else { mn1 };
    let liminf = liminf.min(limsup);
    Ok(DecayIndicatorReport {
        r,
        liminf_est: liminf,
        limsup_est: limsup,
        classification,
        tail_slope: slope_hi,
        tail_slope_lower: slope_lo,
        ratio: ratio(limsup, liminf),
        diagnostics: diag,
    })
}

fn ratio(hi: LogScalar, lo: LogScalar) -> f64 {
    if lo.is_zero() {
        f64::INFINITY
    } else {
        (hi / lo).to_f64()
    }
}

/// Default `r` search interval for dimension `n`.
pub fn default_r_search(n: u32) -> (f64, f64) {
    (-(n as f64) / 2.0 + 1e-3, 12.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locates `r₊`, `r₋` and, when they meet at a finite positive indicator, `r*`.
pub fn decay_character(profile: &RadialProfile, r_search: (f64, f64), grid: &RhoGrid) -> Result<DecayCharacterReport> {
    let n = profile.n();
    let (lo, hi) = r_search;
    if !(lo < hi) || lo <= -n / 2.0 {
        return Err(Error::Domain("r_search must be an interval inside (-n/2, inf)"));
    }
    let tail = Tail::new(profile, grid)?;
    if tail.all_zero() {
        return Ok(DecayCharacterReport::infinite(n, "no spectral mass near the origin"));
    }
    let f_plus = |r: f64| {
        let ((_, mx1), (_, mx2)) = tail.extrema(2.0 * r + n, &no_comp);
        log2_gap(mx1, mx2)
    };
    let f_minus = |r: f64| {
        let ((mn1, _), (mn2, _)) = tail.extrema(2.0 * r + n, &no_comp);
        if mn1.is_zero() {
            return f64::NEG_INFINITY;
        }
        log2_gap(mn1, mn2)
    };
    let locate = |f: &dyn Fn(f64) -> f64, what: &str| -> Result<CharValue> {
        let (a, b) = (f(lo), f(hi));
        if a > 0.0 {
            if lo <= -n / 2.0 + 1e-2 {
                return Ok(CharValue::MinusHalfN);
            }
            return Err(Error::EnlargeRSearch(format!("{what} lies below r = {lo}")));
        }
        if b <= 0.0 {
            if b == f64::NEG_INFINITY {
                return Ok(CharValue::PlusInf);
            }
            return Err(Error::EnlargeRSearch(format!("{what} lies above r = {hi}")));
        }
        Ok(CharValue::Finite(bisect(f, lo, hi)))
    };
    let r_plus = locate(&f_plus, "r_plus")?;
    let mut r_minus = locate(&f_minus, "r_minus")?;
    if let (CharValue::Finite(p), CharValue::Finite(m)) = (r_plus, r_minus) {
        if m < p {
            if p - m > ORDER_SLACK {
                return Err(Error::IndicatorNotResolved(format!(
                    "ordering violated: r_plus = {p} exceeds r_minus = {m}"
                )));
            }
            r_minus = CharValue::Finite(p);
        }
    }
    let mut report = DecayCharacterReport {
        n: profile.dimension(),
        r_plus,
        r_minus,
        r_star: None,
        sigma: None,
        log_correction: false,
        classification_at_r_plus: None,
        diagnostics: String::new(),
    };
    if let (CharValue::Finite(p), CharValue::Finite(m)) = (r_plus, r_minus) {
        let ind = decay_indicator(profile, p, grid)?;
        report.classification_at_r_plus = Some(ind.classification);
        report.log_correction = ind.classification == Classification::LogCorrected;
        if (m - p).abs() <= R_TOL && ind.is_finite_positive() {
            report.r_star = Some(CharValue::Finite(p));
            report.sigma = Some(p + n / 2.0);
        }
        report.diagnostics = ind.diagnostics;
    } else if r_plus == CharValue::PlusInf && r_minus == CharValue::PlusInf {
        report.r_star = Some(CharValue::PlusInf);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{make_radial_profile, Component, PowerSegment};
    use alloc::vec;
    use core::f64::consts::PI;

    fn power(n: u32, r0: f64) -> RadialProfile {
        make_radial_profile(
            n,
            vec![Component::from_segments(vec![PowerSegment::new(f64::NEG_INFINITY, 0.0, 0.0, r0, 0)])],
        )
        .unwrap()
    }

    fn annulus(n: u32) -> RadialProfile {
        make_radial_profile(n, vec![Component::from_segments(vec![PowerSegment::plateau(-1.0, 0.0, 0.0)])]).unwrap()
    }

    #[test]
    fn plateau_phi_is_ball_volume() {
        let v = phi(&power(3, 0.0), 0.0, -2.0).to_f64();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((v - 4.18879).abs() < 1e-5);
    }

    #[test]
    fn disjoint_support_gives_zero() {
        assert!(phi(&annulus(3), 2.0, -2.0).is_zero());
    }

    #[test]
    fn pure_power_is_finite_positive() {
        let p = power(3, 0.0);
        let rep = decay_indicator(&p, 0.0, &RhoGrid::auto(&p)).unwrap();
        assert_eq!(rep.classification, Classification::FinitePositive);
        assert!((rep.limsup_est.to_f64() - 4.0 * PI / 3.0).abs() < 1e-9);
        assert!((rep.liminf_est.to_f64() - 4.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn indicator_classes_off_the_character() {
        let p = power(3, 0.0);
        let g = RhoGrid::auto(&p);
        assert_eq!(decay_indicator(&p, -0.5, &g).unwrap().classification, Classification::Zero);
        assert_eq!(decay_indicator(&p, 0.5, &g).unwrap().classification, Classification::Infinite);
        assert_eq!(decay_indicator(&p, -2.0, &g).unwrap().classification, Classification::Zero);
        let a = annulus(3);
        assert_eq!(decay_indicator(&a, 1.0, &RhoGrid::auto(&a)).unwrap().classification, Classification::Zero);
    }

    #[test]
    fn pure_power_character() {
        let p = power(3, 1.0);
        let rep = decay_character(&p, default_r_search(3), &RhoGrid::auto(&p)).unwrap();
        assert!((rep.r_plus.finite().unwrap() - 1.0).abs() < 1e-4);
        assert!((rep.r_minus.finite().unwrap() - 1.0).abs() < 1e-4);
        assert!((rep.sigma.unwrap() - 2.5).abs() < 1e-4);
    }

    #[test]
    fn annulus_character_is_infinite() {
        let a = annulus(3);
        let rep = decay_character(&a, default_r_search(3), &RhoGrid::auto(&a)).unwrap();
        assert_eq!(rep.r_plus, CharValue::PlusInf);
        assert_eq!(rep.r_star, Some(CharValue::PlusInf));
        assert!(rep.sigma.is_none());
    }

    #[test]
    fn short_grid_rejected() {
        let p = power(3, 0.0);
        let g = RhoGrid::new(-20.0, -10.0).unwrap();
        assert!(matches!(decay_indicator(&p, 0.0, &g), Err(Error::WindowTooShort(_))));
    }
}
