//! Littlewood–Paley blocks `e_j = ‖Δ_j f‖₂`, homogeneous Besov norms
//! `Ḃ^s_{2,q}` and the membership tests for `Ȧ^{−σ}_{2,∞} ⊂ 𝒜̇^{−σ}_{2,∞} ⊂ Ḃ^{−σ}_{2,∞}`.

mod bump;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, quad_log2, LogScalar, QuadratureSpec};
use crate::profiles::{Piece, RadialProfile};

pub use bump::{chi, phi_bump, BUMP_HI, BUMP_LO};

/// A window "contains a good block" when `q_j ≥ C_FLOOR · sup q`.
pub const C_FLOOR: f64 = 0.1;
pub const M_MAX: i64 = 16;
/// Blocks in the deepest decade compared against the rest of the window.
pub const DECADE: i64 = 10;
/// Allowed growth of `sup q` into the deepest decade.
pub const B_TOL: f64 = 1.02;
/// Relative excess of a boundary block over the interior that flags it.
pub const EDGE_MARGIN: f64 = 1e-6;
/// Shells thinner than this relative width are treated as a single radius.
const POINT_SHELL: f64 = 1e-9;

const LN2: f64 = core::f64::consts::LN_2;
/// Pieces bounded below this share of the running block total are dropped.
const NEGLIGIBLE_SHARE: f64 = 1e-20;

fn block_spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-12)
}

/// Integration fragment of a piece inside block `j`, with an upper bound on
/// its contribution.
struct Fragment<'a> {
    piece: &'a Piece,
    lo: f64,
    hi: f64,
    bound: LogScalar,
}

fn fragments<'a>(p: &'a Piece, j: i64, out: &mut Vec<Fragment<'a>>) -> Option<LogScalar> {
    if p.h2().is_zero() {
        return None;
    }
    let jf = j as f64;
    if let Some(ld) = p.log2_thin {
        if libm::exp2(ld) < POINT_SHELL {
            let w = phi_bump(libm::exp2(p.log2_b - jf));
            return Some(p.full_mass() * LogScalar::from_f64(w * w));
        }
    }
    let cuts = [BUMP_LO, 4.0 / 3.0, 1.5, BUMP_HI].map(|c| jf + libm::log2(c));
    let lo = p.log2_a.max(cuts[0]);
    let hi = p.log2_b.min(cuts[3]);
    if !(lo < hi) {
        return None;
    }
    let bound = p.mass_bound();
    for w in cuts.windows(2) {
        let (a, b) = (lo.max(w[0]), hi.min(w[1]));
        if a < b {
            // φ is monotone between consecutive cuts
            let top = phi_bump(libm::exp2(a - jf)).max(phi_bump(libm::exp2(b - jf)));
            out.push(Fragment { piece: p, lo: a, hi: b, bound: bound * LogScalar::from_f64(top * top) });
        }
    }
    None
}

fn fragment_sq(fr: &Fragment<'_>, j: i64, n: f64) -> Result<LogScalar> {
    let jf = j as f64;
    let p = fr.piece;
    let f = |u: f64| {
        let w = phi_bump(libm::exp2(u - jf));
        if w == 0.0 {
            return LogScalar::ZERO;
        }
        LogScalar::from_f64(w * w * LN2) * LogScalar::exp2(2.0 * p.log2_value(u) + n * u)
    };
    quad_log2(f, fr.lo, fr.hi, &block_spec())
}

/// `‖Δ_j f‖₂`.
pub fn lp_block_norm(profile: &RadialProfile, j: i64) -> Result<LogScalar> {
    let n = profile.n();
    let mut parts = Vec::new();
    let mut frags = Vec::new();
    for (_, p) in profile.all_pieces() {
        if let Some(point) = fragments(p, j, &mut frags) {
            parts.push(point);
        }
    }
    frags.sort_by(|a, b| b.bound.partial_cmp(&a.bound).unwrap_or(core::cmp::Ordering::Equal));
    let mut total = pairwise_sum(&parts);
    for fr in &frags {
        if total.is_positive() && fr.bound < total * LogScalar::from_f64(NEGLIGIBLE_SHARE) {
            continue;
        }
        let v = fragment_sq(fr, j, n)?;
        total = total + v;
        parts.push(v);
    }
    Ok((profile.omega() * pairwise_sum(&parts)).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicSpectrum {
    pub n: u32,
    pub j_min: i64,
    pub j_max: i64,
    pub e: Vec<LogScalar>,
    pub l2_norm: LogScalar,
    pub bump: String,
    /// `Σ e_j² / ‖f‖²` over the window.
    pub orthogonality_ratio: f64,
}

impl DyadicSpectrum {
    pub fn js(&self) -> impl Iterator<Item = i64> + '_ {
        self.j_min..=self.j_max
    }

    pub fn get(&self, j: i64) -> LogScalar {
        if j < self.j_min || j > self.j_max {
            return LogScalar::ZERO;
        }
        self.e[(j - self.j_min) as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    /// Spectrum restricted to `[j_min, j_max]`.
    pub fn restrict(&self, j_min: i64, j_max: i64) -> Result<Self> {
        if j_min < self.j_min || j_max > self.j_max || j_min >= j_max {
            return Err(Error::Domain("restriction must lie inside the spectrum window"));
        }
        let e = self.e[(j_min - self.j_min) as usize..=(j_max - self.j_min) as usize].to_vec();
        let ratio = energy_ratio(&e, self.l2_norm);
        Ok(Self { j_min, j_max, e, orthogonality_ratio: ratio, ..self.clone() })
    }
}

fn energy_ratio(e: &[LogScalar], norm: LogScalar) -> f64 {
    if norm.is_zero() {
        return 0.0;
    }
    let sq: Vec<LogScalar> = e.iter().map(|x| *x * *x).collect();
    (pairwise_sum(&sq) / (norm * norm)).to_f64()
}

/// Block norms over `j_min..=j_max`.
///
/// Checks `Σ e_j² ≤ ‖f‖²`, and `Σ e_j² ≥ ½ ∫ |f̂|²` over the radii where
/// two window blocks overlap.
pub fn dyadic_spectrum(profile: &RadialProfile, j_min: i64, j_max: i64) -> Result<DyadicSpectrum> {
    if j_min >= j_max {
        return Err(Error::Domain("dyadic window needs j_min < j_max"));
    }
    let e = (j_min..=j_max).map(|j| lp_block_norm(profile, j)).collect::<Result<Vec<_>>>()?;
    let norm = profile.l2_norm();
    let ratio = energy_ratio(&e, norm);
    if ratio > 1.0 + 1e-9 {
        return Err(Error::Internal(format!("block energies exceed the L2 norm (ratio {ratio})")));
    }
    if !norm.is_zero() {
        use crate::profiles::Side;
        let lo = j_min as f64 + libm::log2(4.0 / 3.0);
        let hi = j_max as f64 + libm::log2(1.5);
        let inner = profile.ball_mass(hi, Side::At);
        let outer = profile.ball_mass(lo, Side::At);
        let covered = if inner > outer { inner - outer } else { LogScalar::ZERO };
        let sq: Vec<LogScalar> = e.iter().map(|x| *x * *x).collect();
        let total = pairwise_sum(&sq);
        if total < covered * LogScalar::from_f64(0.5 - 1e-9) {
            return Err(Error::Internal("block energies fall below half the covered mass".into()));
        }
    }
    Ok(DyadicSpectrum {
        n: profile.dimension(),
        j_min,
        j_max,
        e,
        l2_norm: norm,
        bump: "smooth step, support [3/4, 8/3]".into(),
        orthogonality_ratio: ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesovQ {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl BesovQ {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(BesovQ::One),
            "2" => Some(BesovQ::Two),
            "inf" | "∞" => Some(BesovQ::Inf),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovNorm {
    pub s: f64,
    pub q: BesovQ,
    pub value: LogScalar,
    /// Index of the largest weighted block.
    pub argmax_j: Option<i64>,
    /// The largest weighted block sits on the window boundary.
    pub edge_attained: bool,
}

/// `ℓ^q` norm of `2^{js} e_j` over the spectrum window.
pub fn besov_norm(spectrum: &DyadicSpectrum, s: f64, q: BesovQ) -> Result<BesovNorm> {
    if !(s < 0.0) {
        return Err(Error::Domain("besov_norm expects s < 0"));
    }
    let w: Vec<LogScalar> = spectrum.js().map(|j| spectrum.get(j) * LogScalar::exp2(j as f64 * s)).collect();
    let (mut best, mut arg) = (LogScalar::ZERO, None);
    for (i, x) in w.iter().enumerate() {
        if x.is_positive() && (arg.is_none() || *x > best) {
            best = *x;
            arg = Some(spectrum.j_min + i as i64);
        }
    }
    let value = match q {
        BesovQ::Inf => best,
        BesovQ::One => pairwise_sum(&w),
        BesovQ::Two => pairwise_sum(&w.iter().map(|x| *x * *x).collect::<Vec<_>>()).sqrt(),
    };
    // a flat tail ties with its boundary; only a strict excess counts
    let interior = w[1..w.len() - 1].iter().fold(LogScalar::ZERO, |m, x| m.max(*x));
    let edge = arg.is_some() && w[0].max(w[w.len() - 1]) > interior * LogScalar::from_f64(1.0 + EDGE_MARGIN);
    Ok(BesovNorm { s, q, value, argmax_j: arg, edge_attained: edge })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingEstimate {
    pub c: LogScalar,
    pub big_c: LogScalar,
    pub m: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalEstimate {
    pub c: LogScalar,
    pub big_c: LogScalar,
    pub max_gap: i64,
    pub witnesses: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetVerdict {
    pub sigma: f64,
    pub in_b: bool,
    pub besov_norm: LogScalar,
    pub in_a_ring: bool,
    pub ring: Option<RingEstimate>,
    pub in_a_cal: bool,
    pub cal: CalEstimate,
    pub diagnostics: String,
}

impl SetVerdict {
    /// `in_A_ring ⟹ in_A_cal ⟹ in_B`.
    pub fn chain_holds(&self) -> bool {
        (!self.in_a_ring || self.in_a_cal) && (!self.in_a_cal || self.in_b)
    }

    fn same_verdicts(&self, other: &Self) -> bool {
        self.in_b == other.in_b && self.in_a_cal == other.in_a_cal && self.in_a_ring == other.in_a_ring
    }
}

fn max_gap(witnesses: &[i64], lo: i64, hi: i64) -> i64 {
    // distance to the window ends counts as a gap too
    let mut prev = lo - 1;
    let mut worst = 0;
    for &w in witnesses {
        worst = worst.max(w - prev);
        prev = w;
    }
    worst.max(hi + 1 - prev)
}

fn classify_window(spec: &DyadicSpectrum, sigma: f64) -> SetVerdict {
    let q: Vec<(i64, LogScalar)> = spec.js().map(|j| (j, spec.get(j) * LogScalar::exp2(-sigma * j as f64))).collect();
    let sup = q.iter().fold(LogScalar::ZERO, |m, (_, x)| m.max(*x));
    let mut diag = String::new();

    let split = spec.j_min + DECADE;
    let deep = q.iter().filter(|(j, _)| *j < split).fold(LogScalar::ZERO, |m, (_, x)| m.max(*x));
    let rest = q.iter().filter(|(j, _)| *j >= split).fold(LogScalar::ZERO, |m, (_, x)| m.max(*x));
    let in_b = deep <= rest * LogScalar::from_f64(B_TOL);
    if !in_b {
        diag.push_str("weighted blocks grow into the deepest decade; ");
    }

    // negative tail
    let tail_hi = spec.j_max.min(-1);
    let tail: Vec<(i64, LogScalar)> = q.iter().copied().filter(|(j, _)| *j <= tail_hi).collect();
    let tail_sup = tail.iter().fold(LogScalar::ZERO, |m, (_, x)| m.max(*x));
    let floor = tail_sup * LogScalar::from_f64(C_FLOOR);
    let witnesses: Vec<i64> = if tail_sup.is_zero() {
        Vec::new()
    } else {
        tail.iter().filter(|(_, x)| *x >= floor).map(|(j, _)| *j).collect()
    };
    let gap = if witnesses.is_empty() { i64::MAX } else { max_gap(&witnesses, spec.j_min, tail_hi) };
    let c_est = witnesses
        .iter()
        .map(|j| q[(j - spec.j_min) as usize].1)
        .fold(None, |m: Option<LogScalar>, x| Some(m.map_or(x, |m| m.min(x))))
        .unwrap_or(LogScalar::ZERO);
    let in_a_cal = in_b && !witnesses.is_empty() && gap <= M_MAX;
    if witnesses.is_empty() {
        diag.push_str("no nonzero block in the negative tail; ");
    } else if gap > M_MAX {
        diag.push_str(&format!("witness gap {gap} exceeds M_max = {M_MAX}; "));
    }

    // every window of length M, including those past j_max where e_j ≤ ‖f‖
    let mut in_a_ring = false;
    let mut ring = None;
    if in_a_cal {
        let all: Vec<i64> =
            q.iter().filter(|(_, x)| *x >= sup * LogScalar::from_f64(C_FLOOR)).map(|(j, _)| *j).collect();
        let g = max_gap(&all, spec.j_min, spec.j_max);
        let bound_fails = !spec.l2_norm.is_zero() && sigma > 0.0;
        if bound_fails {
            diag.push_str("L2 data: e_j ≤ ‖f‖ forces q_j → 0 as j → +∞, so Ȧ fails; ");
        } else if g <= M_MAX {
            in_a_ring = true;
            ring = Some(RingEstimate { c: c_est, big_c: sup, m: g });
        }
    }
    SetVerdict {
        sigma,
        in_b,
        besov_norm: sup,
        in_a_ring,
        ring,
        in_a_cal,
        cal: CalEstimate { c: c_est, big_c: sup, max_gap: if gap == i64::MAX { -1 } else { gap }, witnesses },
        diagnostics: diag,
    }
}

/// Membership verdicts at `σ`, stable when the deepest decade is dropped.
pub fn classify_sets(spectrum: &DyadicSpectrum, sigma: f64) -> Result<SetVerdict> {
    if !(sigma > 0.0) {
        return Err(Error::Domain("sigma must be positive"));
    }
    let full = classify_window(spectrum, sigma);
    if spectrum.j_max - spectrum.j_min < 2 * DECADE + 2 {
        return Err(Error::WindowTooShallow(format!(
            "window [{}, {}] is shorter than two decades of blocks",
            spectrum.j_min, spectrum.j_max
        )));
    }
    let shallow = classify_window(&spectrum.restrict(spectrum.j_min + DECADE, spectrum.j_max)?, sigma);
    if !full.same_verdicts(&shallow) {
        return Err(Error::WindowTooShallow(format!(
            "verdicts change when the deepest decade below j = {} is dropped",
            spectrum.j_min + DECADE
        )));
    }
    Ok(full)
}

/// Least-squares slope of `log2 e_j` against `j` over the deepest `count`
/// nonzero blocks.
pub fn tail_slope(spectrum: &DyadicSpectrum, count: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = spectrum
        .js()
        .filter(|j| spectrum.get(*j).is_positive())
        .take(count)
        .map(|j| (j as f64, spectrum.get(j).log2_mag()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}
