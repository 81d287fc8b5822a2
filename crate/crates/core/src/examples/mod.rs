//! Reference data: the lacunary counterexamples `v₀`, `u₀`-log and `w₀`,
//! a pure power, an annulus and a Gaussian.
//!
//! Every constructor returns the profile together with an [`ExampleMeta`]
//! carrying its structural radii, the expected decay characters and the
//! `ρ`-grid on which the finite profile stands in for its infinite model.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{CharValue, Period, RhoGrid};
use crate::numerics::LogScalar;
use crate::profiles::{make_radial_profile, Component, Interpolation, PowerSegment, RadialProfile, SampledRadial};

const LN2: f64 = core::f64::consts::LN_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    V0,
    U0log,
    W0,
    PurePower,
    Annulus,
    Gaussian,
}

impl Family {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "v0" => Family::V0,
            "u0log" | "u0-log" | "u0_log" => Family::U0log,
            "w0" => Family::W0,
            "pure_power" | "pure-power" | "pp" => Family::PurePower,
            "annulus" => Family::Annulus,
            "gaussian" => Family::Gaussian,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub r_plus: Option<CharValue>,
    pub r_minus: Option<CharValue>,
    pub r_star: Option<CharValue>,
    /// Tolerance on the characters above.
    pub tol: f64,
    pub log_correction: bool,
    /// `limsup Φ / liminf Φ` at `r = r*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicator_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleMeta {
    pub family: Family,
    pub parameters: BTreeMap<String, f64>,
    /// `log2` radii, decreasing.
    pub structural_radii: Vec<f64>,
    pub expected: Expected,
    pub rho_grid: RhoGrid,
}

fn params(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
    items.iter().map(|(k, v)| (String::from(*k), *v)).collect()
}

fn check_r(n: u32, r: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1"));
    }
    if !(r > -(n as f64) / 2.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("r = {r} must exceed -n/2 = {}", -(n as f64) / 2.0)));
    }
    Ok(())
}

fn single(n: u32, segments: Vec<PowerSegment>, label: String) -> Result<RadialProfile> {
    Ok(make_radial_profile(n, alloc::vec![Component::from_segments(segments)])?.with_label(label))
}

/// `|ξ|^r` on the even annuli `Γ₀, Γ₋₂, …, Γ₋₂depth`, `Γ_j = [2^{j−1}, 2^j]`.
pub fn example_v0(n: u32, r: f64, depth: u32) -> Result<(RadialProfile, ExampleMeta)> {
    check_r(n, r)?;
    if depth < 8 {
        return Err(Error::InvalidInput(format!("depth = {depth} must be at least 8")));
    }
    let segs: Vec<PowerSegment> = (0..=depth as i64)
        .rev()
        .map(|k| {
            let j = -2.0 * k as f64;
            PowerSegment::new(j - 1.0, j, 0.0, r, 0)
        })
        .collect();
    let profile = single(n, segs, format!("v0 n={n} r={r} depth={depth}"))?;
    let mut radii: Vec<f64> = (0..=2 * depth as i64 + 1).map(|i| -(i as f64)).collect();
    radii.dedup();
    // each period inward loses a factor 2^{-2m}; keep the missing shells below 2^-12
    let m = 2.0 * r + n as f64;
    let periods = libm::ceil(6.0 / m).max(2.0);
    let lo = -2.0 * depth as f64 - 1.0 + 2.0 * periods;
    if lo + 24.0 > 0.0 {
        return Err(Error::InvalidInput(format!(
            "depth = {depth} too shallow for r = {r}: need at least {}",
            periods + 12.0
        )));
    }
    let grid = RhoGrid::new(lo, lo + 24.0)?;
    let meta = ExampleMeta {
        family: Family::V0,
        parameters: params(&[("n", n as f64), ("r", r), ("depth", depth as f64)]),
        structural_radii: radii,
        expected: Expected {
            r_plus: Some(CharValue::Finite(r)),
            r_minus: Some(CharValue::Finite(r)),
            r_star: Some(CharValue::Finite(r)),
            tol: 0.02,
            log_correction: false,
            indicator_ratio: Some(libm::exp2(2.0 * r + n as f64)),
        },
        rho_grid: grid,
    };
    Ok((profile, meta))
}

/// `|ξ|^{r₀} ln(1/|ξ|)` on `(0, 2^{inner_cut}]`, zero outside.
pub fn example_u0_log(n: u32, r0: f64, inner_cut: f64) -> Result<(RadialProfile, ExampleMeta)> {
    check_r(n, r0)?;
    if !(inner_cut <= -4.0) || !inner_cut.is_finite() {
        return Err(Error::InvalidInput(format!("inner_cut = {inner_cut} must be at most -4")));
    }
    let profile = single(
        n,
        alloc::vec![PowerSegment::new(f64::NEG_INFINITY, inner_cut, 0.0, r0, 1)],
        format!("u0-log n={n} r0={r0} cut=2^{inner_cut}"),
    )?;
    let grid = RhoGrid::auto(&profile);
    let meta = ExampleMeta {
        family: Family::U0log,
        parameters: params(&[("n", n as f64), ("r0", r0), ("inner_cut", inner_cut)]),
        structural_radii: alloc::vec![inner_cut],
        expected: Expected {
            r_plus: Some(CharValue::Finite(r0)),
            r_minus: Some(CharValue::Finite(r0)),
            r_star: None,
            tol: 0.02,
            log_correction: true,
            indicator_ratio: None,
        },
        rho_grid: grid,
    };
    Ok((profile, meta))
}

/// Lacunary shells `a_k ≤ |ξ| ≤ b_k`, `k = 0..K`, with `b_k = 2^{−2^k}`,
/// `a_k^n = b_k^n − b_k^{2n}` and mass `η_k = b_k^{2r+n} − b_{k+1}^{2r+n}`.
///
/// All radii and amplitudes are built from their `log2` exponents; the shell
/// volume `b_k^n − a_k^n = b_k^{2n}` is taken from the definition rather than
/// by subtraction.
pub fn example_w0(n: u32, r: f64, k_count: u32) -> Result<(RadialProfile, ExampleMeta)> {
    check_r(n, r)?;
    if k_count < 3 {
        return Err(Error::InvalidInput(format!("K = {k_count} must be at least 3")));
    }
    let s = 2.0 * r + n as f64;
    let nf = n as f64;
    // every exponent must stay an exact-enough f64 and fit LogScalar
    let worst = libm::exp2(k_count as f64) * (2.0 * s + 2.0 * nf);
    if !(worst < libm::exp2(52.0)) {
        return Err(Error::Capacity(format!(
            "K = {k_count} needs log2 exponents near {worst:e}, beyond the representable range"
        )));
    }
    let mut segs = Vec::with_capacity(k_count as usize);
    let mut radii = Vec::with_capacity(2 * k_count as usize);
    let mut periods = Vec::with_capacity(k_count as usize);
    for k in 0..k_count {
        let lb = -libm::exp2(k as f64);
        // log2 η_k = s·lb + log2(1 − b_k^s), since b_{k+1}^s = (b_k^s)^2
        let log2_eta = s * lb + libm::log1p(-libm::exp2(s * lb)) / LN2;
        let log2_h = 0.5 * (log2_eta - 2.0 * nf * lb);
        let seg = PowerSegment::thin(lb, nf * lb, n, log2_h, 0.0);
        radii.push(lb);
        radii.push(seg.log2_a);
        periods.push(Period { log2_outer: lb, log2_inner: seg.log2_a });
        segs.push(seg);
    }
    periods.pop();
    segs.reverse();
    let profile = single(n, segs, format!("w0 n={n} r={r} K={k_count}"))?;
    let grid = RhoGrid::new(-160.0, -128.0)?.with_periods(periods);
    let meta = ExampleMeta {
        family: Family::W0,
        parameters: params(&[("n", nf), ("r", r), ("K", k_count as f64)]),
        structural_radii: radii,
        expected: Expected {
            r_plus: Some(CharValue::Finite(r)),
            r_minus: Some(CharValue::Finite(2.0 * r + nf / 2.0)),
            r_star: None,
            tol: 0.05,
            log_correction: false,
            indicator_ratio: None,
        },
        rho_grid: grid,
    };
    Ok((profile, meta))
}

/// `|ξ|^{r₀}` on `(0, 1]`.
pub fn pure_power(n: u32, r0: f64) -> Result<(RadialProfile, ExampleMeta)> {
    check_r(n, r0)?;
    let profile = single(
        n,
        alloc::vec![PowerSegment::new(f64::NEG_INFINITY, 0.0, 0.0, r0, 0)],
        format!("pure power n={n} r0={r0}"),
    )?;
    let grid = RhoGrid::auto(&profile);
    let meta = ExampleMeta {
        family: Family::PurePower,
        parameters: params(&[("n", n as f64), ("r0", r0)]),
        structural_radii: alloc::vec![0.0],
        expected: Expected {
            r_plus: Some(CharValue::Finite(r0)),
            r_minus: Some(CharValue::Finite(r0)),
            r_star: Some(CharValue::Finite(r0)),
            tol: 0.02,
            log_correction: false,
            indicator_ratio: Some(1.0),
        },
        rho_grid: grid,
    };
    Ok((profile, meta))
}

/// Plateau `1` on `[1/2, 1]`.
pub fn annulus_datum(n: u32) -> Result<(RadialProfile, ExampleMeta)> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1"));
    }
    let profile = single(n, alloc::vec![PowerSegment::plateau(-1.0, 0.0, 0.0)], format!("annulus n={n}"))?;
    let grid = RhoGrid::auto(&profile);
    let meta = ExampleMeta {
        family: Family::Annulus,
        parameters: params(&[("n", n as f64)]),
        structural_radii: alloc::vec![0.0, -1.0],
        expected: Expected {
            r_plus: Some(CharValue::PlusInf),
            r_minus: Some(CharValue::PlusInf),
            r_star: Some(CharValue::PlusInf),
            tol: 0.0,
            log_correction: false,
            indicator_ratio: None,
        },
        rho_grid: grid,
    };
    Ok((profile, meta))
}

pub const GAUSSIAN_NODES: usize = 512;
pub const GAUSSIAN_LOG2_LO: f64 = -30.0;
pub const GAUSSIAN_LOG2_HI: f64 = 5.0;

/// `e^{−λ²/2}`: the constant `1` below `2^-30`, then 512 spline samples up to `2^5`.
pub fn gaussian_datum(n: u32) -> Result<(RadialProfile, ExampleMeta)> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1"));
    }
    let k = GAUSSIAN_NODES;
    let step = (GAUSSIAN_LOG2_HI - GAUSSIAN_LOG2_LO) / (k - 1) as f64;
    let nodes: Vec<f64> = (0..k).map(|i| GAUSSIAN_LOG2_LO + i as f64 * step).collect();
    // log2 e^{-λ²/2} = -λ² / (2 ln 2)
    let mags = nodes.iter().map(|u| LogScalar::exp2(-libm::exp2(2.0 * u) / (2.0 * LN2))).collect();
    let sampled = SampledRadial::new(nodes, mags)?.with_interpolation(Interpolation::LogLogCubic)?;
    let comp = Component {
        segments: alloc::vec![PowerSegment::plateau(f64::NEG_INFINITY, GAUSSIAN_LOG2_LO, 0.0)],
        sampled: Some(sampled),
    };
    let profile = make_radial_profile(n, alloc::vec![comp])?.with_label(format!("gaussian n={n}"));
    let grid = RhoGrid::auto(&profile);
    let meta = ExampleMeta {
        family: Family::Gaussian,
        parameters: params(&[("n", n as f64)]),
        structural_radii: alloc::vec![GAUSSIAN_LOG2_HI, GAUSSIAN_LOG2_LO],
        expected: Expected {
            r_plus: Some(CharValue::Finite(0.0)),
            r_minus: Some(CharValue::Finite(0.0)),
            r_star: Some(CharValue::Finite(0.0)),
            tol: 0.02,
            log_correction: false,
            indicator_ratio: Some(1.0),
        },
        rho_grid: grid,
    };
    Ok((profile, meta))
}

/// Pure powers `r₀ ∈ {−1, 0, 1}`, v₀ for `(n, r) ∈ {(1,0), (3,0), (3,1)}`,
/// u₀-log, w₀, the annulus and the Gaussian, all with default parameters.
pub fn frozen_corpus() -> Result<Vec<(RadialProfile, ExampleMeta)>> {
    Ok(alloc::vec![
        pure_power(3, -1.0)?,
        pure_power(3, 0.0)?,
        pure_power(3, 1.0)?,
        example_v0(1, 0.0, 32)?,
        example_v0(3, 0.0, 32)?,
        example_v0(3, 1.0, 32)?,
        example_u0_log(3, 0.0, -4.0)?,
        example_w0(3, 0.5, 40)?,
        annulus_datum(3)?,
        gaussian_datum(3)?,
    ])
}

/// Builds a family member from named parameters, with the usual defaults.
pub fn build(family: Family, p: &BTreeMap<String, f64>) -> Result<(RadialProfile, ExampleMeta)> {
    let get = |k: &str, d: Option<f64>| -> Result<f64> {
        p.get(k).copied().or(d).ok_or_else(|| Error::InvalidInput(format!("missing parameter {k}")))
    };
    let n = get("n", None)?;
    if !(n >= 1.0 && libm::trunc(n) == n && n <= 64.0) {
        return Err(Error::InvalidInput(format!("n = {n} must be a positive integer")));
    }
    let n = n as u32;
    let int = |k: &str, d: f64| -> Result<u32> {
        let v = get(k, Some(d))?;
        if v < 0.0 || libm::trunc(v) != v || v > 1e6 {
            return Err(Error::InvalidInput(format!("{k} = {v} must be a nonnegative integer")));
        }
        Ok(v as u32)
    };
    match family {
        Family::V0 => example_v0(n, get("r", Some(0.0))?, int("depth", 32.0)?),
        Family::U0log => example_u0_log(n, get("r0", Some(0.0))?, get("inner_cut", Some(-4.0))?),
        Family::W0 => example_w0(n, get("r", Some(0.5))?, int("k", 40.0)?),
        Family::PurePower => pure_power(n, get("r0", Some(0.0))?),
        Family::Annulus => annulus_datum(n),
        Family::Gaussian => gaussian_datum(n),
    }
}
