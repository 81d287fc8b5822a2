//! Runs the indicator, set-membership and decay-rate criteria side by side
//! and checks that they agree.
//!
//! Normalization used throughout: `σ` indexes `Ḃ^{−σ}_{2,∞}`, the indicator
//! is probed at `r = σ − n/2`, and the expected `L²` decay exponent under a
//! symbol of order `2α` is `σ/(2α)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::besov::{besov_norm, classify_sets, dyadic_spectrum, tail_slope, BesovQ, SetVerdict};
use crate::error::{Error, Result};
use crate::indicators::{decay_character, decay_indicator, default_r_search, CharValue, DecayIndicatorReport, RhoGrid};
use crate::numerics::TimeGrid;
use crate::profiles::RadialProfile;
use crate::semigroup::{evolution_trace, fit_decay, heat_characterization_norm, DecayFit, HeatQ, Symbol};

/// Largest admissible `|σ_fit − σ/(2α)|`.
pub const EXPONENT_TOL: f64 = 0.05;
/// Default deepest block of the spectrum window.
pub const DEFAULT_J_MIN: i64 = -64;
const SLOPE_BLOCKS: usize = 20;
/// Both `‖f‖_{Ḃ^{−2σ}_{2,∞}} / ‖t^{σ/α} e^{tℒ}f‖_{L^∞}` and its inverse stay below this.
pub const NORM_K: f64 = 10.0;

const NS_NOTE: &str = "energy decay of Navier-Stokes solutions is not reproduced: \
    desk-scale periodic grids cannot resolve the low-frequency behaviour that criterion needs";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    True,
    False,
    Unresolved(String),
}

impl Verdict {
    fn of(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unresolved(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSource {
    Given,
    /// `r* + n/2`.
    DecayCharacter,
    /// `r₊ + n/2`, no decay character.
    UpperCharacter,
    /// `n/2`, both characters infinite.
    HalfDimension,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Consistent,
    Inconsistent,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorCriterion {
    pub r: f64,
    pub verdict: Verdict,
    pub report: Option<DecayIndicatorReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetCriterion {
    pub j_window: (i64, i64),
    pub verdict: Verdict,
    pub sets: Option<SetVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCriterion {
    pub alpha: f64,
    pub expected_sigma: f64,
    pub verdict: Verdict,
    pub fit: Option<DecayFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub sigma_besov: f64,
    pub sigma_source: SigmaSource,
    pub criterion_indicator: IndicatorCriterion,
    pub criterion_set: SetCriterion,
    pub criterion_decay: Vec<DecayCriterion>,
    /// Nonlinear energy criterion; never evaluated.
    pub criterion_navier_stokes: Verdict,
    pub consistent: bool,
    pub status: Status,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// ρ-grid for the indicator; `RhoGrid::auto` when absent.
    pub rho_grid: Option<RhoGrid>,
    /// Spectrum blocks; `[DEFAULT_J_MIN, top + 2]` when absent.
    pub j_window: Option<(i64, i64)>,
    pub t_decades: (f64, f64),
    pub samples_per_decade: usize,
    pub fit_window_decades: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { rho_grid: None, j_window: None, t_decades: (-2.0, 12.0), samples_per_decade: 8, fit_window_decades: 10 }
    }
}

impl VerifyOptions {
    pub fn with_rho_grid(mut self, grid: RhoGrid) -> Self {
        self.rho_grid = Some(grid);
        self
    }

    fn grid(&self, profile: &RadialProfile) -> RhoGrid {
        self.rho_grid.clone().unwrap_or_else(|| RhoGrid::auto(profile))
    }

    fn window(&self, profile: &RadialProfile) -> (i64, i64) {
        self.j_window.unwrap_or_else(|| default_j_window(profile))
    }
}

/// `[DEFAULT_J_MIN, ⌈outer radius⌉ + 2]`.
pub fn default_j_window(profile: &RadialProfile) -> (i64, i64) {
    let top = profile.all_pieces().map(|(_, p)| p.log2_b).fold(f64::NEG_INFINITY, f64::max);
    let top = if top.is_finite() { libm::ceil(top) as i64 } else { 0 };
    (DEFAULT_J_MIN, top.max(DEFAULT_J_MIN + 30) + 2)
}

fn unresolved(e: &Error) -> Verdict {
    Verdict::Unresolved(format!("{e}"))
}

pub fn verify_characterization(
    profile: &RadialProfile,
    sigma_besov: Option<f64>,
    symbols: &[Symbol],
    opts: &VerifyOptions,
) -> Result<EquivalenceReport> {
    if symbols.is_empty() {
        return Err(Error::InvalidInput(String::from("at least one symbol is required")));
    }
    let n = profile.n();
    let grid = opts.grid(profile);
    let mut notes = alloc::vec![String::from("results are in the diagonalizing frame")];

    let (sigma, source) = match sigma_besov {
        Some(s) if s > 0.0 && s.is_finite() => (s, SigmaSource::Given),
        Some(_) => return Err(Error::Domain("sigma must be positive")),
        None => {
            let ch = decay_character(profile, default_r_search(profile.dimension()), &grid)?;
            match (ch.r_star_finite(), ch.r_plus) {
                (Some(r), _) => (r + n / 2.0, SigmaSource::DecayCharacter),
                (None, CharValue::Finite(rp)) => {
                    notes.push(format!("no decay character; sigma taken from r_plus = {rp}"));
                    (rp + n / 2.0, SigmaSource::UpperCharacter)
                }
                _ => {
                    notes.push(String::from("characters are infinite; sigma taken as n/2"));
                    (n / 2.0, SigmaSource::HalfDimension)
                }
            }
        }
    };
    if !(sigma > 0.0) {
        return Err(Error::Domain("estimated sigma is not positive; pass sigma explicitly"));
    }

    let r = sigma - n / 2.0;
    let criterion_indicator = match decay_indicator(profile, r, &grid) {
        Ok(rep) => IndicatorCriterion { r, verdict: Verdict::of(rep.is_finite_positive()), report: Some(rep) },
        Err(e) => IndicatorCriterion { r, verdict: unresolved(&e), report: None },
    };

    let j_window = opts.window(profile);
    let criterion_set = match dyadic_spectrum(profile, j_window.0, j_window.1).and_then(|sp| classify_sets(&sp, sigma))
    {
        Ok(v) => SetCriterion { j_window, verdict: Verdict::of(v.in_a_cal), sets: Some(v) },
        Err(e) => SetCriterion { j_window, verdict: unresolved(&e), sets: None },
    };

    let mut criterion_decay = Vec::new();
    for sym in symbols {
        let expected = sigma / (2.0 * sym.alpha);
        let fitted = evolution_trace(profile, sym, opts.t_decades, opts.samples_per_decade)
            .and_then(|tr| fit_decay(&tr, opts.fit_window_decades));
        let c = match fitted {
            Ok(fit) => {
                let ok = fit.two_sided && libm::fabs(fit.sigma_fit - expected) <= EXPONENT_TOL;
                if fit.log_correction {
                    notes.push(format!(
                        "alpha = {}: decay carries a logarithmic factor (ln t)^{}",
                        sym.alpha,
                        fit.log_power.unwrap_or(0)
                    ));
                }
                if fit.superpolynomial {
                    notes.push(format!("alpha = {}: decay is faster than any power", sym.alpha));
                }
                DecayCriterion { alpha: sym.alpha, expected_sigma: expected, verdict: Verdict::of(ok), fit: Some(fit) }
            }
            Err(e) => DecayCriterion { alpha: sym.alpha, expected_sigma: expected, verdict: unresolved(&e), fit: None },
        };
        criterion_decay.push(c);
    }

    let verdicts: Vec<&Verdict> = core::iter::once(&criterion_indicator.verdict)
        .chain(core::iter::once(&criterion_set.verdict))
        .chain(criterion_decay.iter().map(|c| &c.verdict))
        .collect();
    let bools: Vec<Option<bool>> = verdicts.iter().map(|v| v.as_bool()).collect();
    let status = if bools.iter().any(Option::is_none) {
        Status::Unresolved
    } else if bools.iter().all(|b| *b == bools[0]) {
        Status::Consistent
    } else {
        Status::Inconsistent
    };
    notes.push(String::from(NS_NOTE));
    Ok(EquivalenceReport {
        sigma_besov: sigma,
        sigma_source: source,
        criterion_indicator,
        criterion_set,
        criterion_decay,
        criterion_navier_stokes: Verdict::Unresolved(String::from(NS_NOTE)),
        consistent: status == Status::Consistent,
        status,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub r_star: Option<f64>,
    pub r_plus: Option<CharValue>,
    pub r_minus: Option<CharValue>,
    /// Slope of `log2 e_j` against `j` over the deepest nonzero blocks.
    pub sigma_from_besov: Option<f64>,
    /// `|r* + n/2 − σ̂|`, when both are available.
    pub delta: Option<f64>,
    pub notes: Vec<String>,
}

pub fn relation_check(profile: &RadialProfile, grid: Option<&RhoGrid>, j_window: Option<(i64, i64)>) -> RelationReport {
    let mut notes = Vec::new();
    let grid = grid.cloned().unwrap_or_else(|| RhoGrid::auto(profile));
    let (r_star, r_plus, r_minus) = match decay_character(profile, default_r_search(profile.dimension()), &grid) {
        Ok(ch) => (ch.r_star_finite(), Some(ch.r_plus), Some(ch.r_minus)),
        Err(e) => {
            notes.push(format!("decay character: {e}"));
            (None, None, None)
        }
    };
    let (lo, hi) = j_window.unwrap_or_else(|| default_j_window(profile));
    let sigma_from_besov = match dyadic_spectrum(profile, lo, hi) {
        Ok(sp) => {
            let s = tail_slope(&sp, SLOPE_BLOCKS);
            if s.is_none() {
                notes.push(String::from("spectrum has fewer than two nonzero blocks"));
            }
            s
        }
        Err(e) => {
            notes.push(format!("spectrum: {e}"));
            None
        }
    };
    let delta = match (r_star, sigma_from_besov) {
        (Some(r), Some(s)) => Some(libm::fabs(r + profile.n() / 2.0 - s)),
        _ => None,
    };
    RelationReport { r_star, r_plus, r_minus, sigma_from_besov, delta, notes }
}

#[cfg(test)]
mod tests;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRatio {
    pub sigma: f64,
    pub alpha: f64,
    pub besov: crate::numerics::LogScalar,
    pub heat: crate::numerics::LogScalar,
    pub ratio: f64,
    /// Either supremum sits on its window edge, so the datum may lie outside the space.
    pub edge: bool,
    pub within: bool,
}

/// Littlewood-Paley norm of `Ḃ^{−2σ}_{2,∞}` against the semigroup norm.
pub fn norm_ratio(
    profile: &RadialProfile,
    symbol: &Symbol,
    sigma: f64,
    j_window: (i64, i64),
    grid: &TimeGrid,
) -> Result<NormRatio> {
    let sp = dyadic_spectrum(profile, j_window.0, j_window.1)?;
    let b = besov_norm(&sp, -2.0 * sigma, BesovQ::Inf)?;
    let h = heat_characterization_norm(profile, symbol, sigma, HeatQ::Inf, grid)?;
    if h.value.is_zero() {
        return Err(Error::Domain("semigroup norm vanishes"));
    }
    let ratio = (b.value / h.value).to_f64();
    Ok(NormRatio {
        sigma,
        alpha: symbol.alpha,
        besov: b.value,
        heat: h.value,
        ratio,
        edge: b.edge_attained || h.edge_attained,
        within: (1.0 / NORM_K..=NORM_K).contains(&ratio),
    })
}
