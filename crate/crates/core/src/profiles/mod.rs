//! Radial Fourier-magnitude profiles of L² data.
//!
//! A profile stores `|f̂(ξ)| = g_i(|ξ|)` for each component `i` as a list of
//! power segments `h λ^r (ln 1/λ)^p` and/or a log-log sampled curve. Vector
//! data are given in the frame that diagonalizes the dissipative symbol, so
//! the component magnitudes are exactly what every norm below needs.
//!
//! Sampled curves are log-log linear between nodes, so each sampled
//! interval is itself a power piece and is integrated in closed form. The
//! curve is zero outside `[first node, last node]`, and an interval with a
//! zero endpoint contributes nothing.

mod grid;
mod piece;
mod wire;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, sphere_surface, LogScalar};

pub use grid::{bin_cartesian_grid, CartesianGrid, SHELLS_PER_OCTAVE};
pub use piece::{log_power_integral, power_integral, thin_shell, Piece, Side};

/// `|f̂(ξ)| = h |ξ|^r (ln 1/|ξ|)^p` on `a ≤ |ξ| ≤ b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSegment {
    /// `-inf` encodes `a = 0`.
    #[serde(with = "wire::extended")]
    pub log2_a: f64,
    pub log2_b: f64,
    #[serde(with = "wire::extended")]
    pub log2_h: f64,
    pub r: f64,
    #[serde(default)]
    pub log_power: u32,
    /// Relative shell thickness `δ = 1 − (a/b)^n` as `log2 δ`, for shells
    /// thinner than `f64` can separate through `log2_a`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "wire::opt_extended")]
    pub log2_thin: Option<f64>,
}

impl PowerSegment {
    pub fn new(log2_a: f64, log2_b: f64, log2_h: f64, r: f64, log_power: u32) -> Self {
        Self { log2_a, log2_b, log2_h, r, log_power, log2_thin: None }
    }

    /// Plateau `h` on `[a, b]`.
    pub fn plateau(log2_a: f64, log2_b: f64, log2_h: f64) -> Self {
        Self::new(log2_a, log2_b, log2_h, 0.0, 0)
    }

    /// Thin shell `[a, b]` with `a^n = b^n (1 − 2^{log2_thin})`.
    pub fn thin(log2_b: f64, log2_thin: f64, n: u32, log2_h: f64, r: f64) -> Self {
        let delta = libm::exp2(log2_thin);
        let log2_a = if delta > 1e-300 {
            log2_b + libm::log1p(-delta.min(1.0)) / (n as f64 * core::f64::consts::LN_2)
        } else {
            log2_b
        };
        Self { log2_a, log2_b, log2_h, r, log_power: 0, log2_thin: Some(log2_thin) }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    #[default]
    LogLogLinear,
    /// Natural cubic spline of `log2 |f̂|` in `log2 λ`; needs positive samples.
    LogLogCubic,
}

/// Samples of `|f̂|` interpolated in log-log coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledRadial {
    pub log2_nodes: Vec<f64>,
    pub magnitudes: Vec<LogScalar>,
    pub interpolation: Interpolation,
}

impl SampledRadial {
    pub fn new(log2_nodes: Vec<f64>, magnitudes: Vec<LogScalar>) -> Result<Self> {
        if log2_nodes.len() != magnitudes.len() {
            return Err(Error::InvalidInput("sampled nodes and magnitudes differ in length".into()));
        }
        if log2_nodes.len() < 2 {
            return Err(Error::InvalidInput("sampled profile needs at least 2 nodes".into()));
        }
        if log2_nodes.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidInput("sampled nodes must be finite".into()));
        }
        if let Some(i) = log2_nodes.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput(alloc::format!("sampled nodes not strictly increasing at node {}", i + 1)));
        }
        if let Some(i) = magnitudes.iter().position(|m| m.sign() < 0) {
            return Err(Error::InvalidInput(alloc::format!("negative sampled magnitude at node {i}")));
        }
        Ok(Self { log2_nodes, magnitudes, interpolation: Interpolation::LogLogLinear })
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Result<Self> {
        if interpolation == Interpolation::LogLogCubic && self.magnitudes.iter().any(|m| m.is_zero()) {
            return Err(Error::InvalidInput("cubic log-log interpolation needs positive samples".into()));
        }
        self.interpolation = interpolation;
        Ok(self)
    }

    fn range(&self) -> (f64, f64) {
        (self.log2_nodes[0], *self.log2_nodes.last().unwrap())
    }

    fn pieces(&self, n: u32) -> Vec<Piece> {
        if self.interpolation == Interpolation::LogLogCubic {
            return self.spline_pieces(n);
        }
        self.log2_nodes
            .windows(2)
            .zip(self.magnitudes.windows(2))
            .filter(|(_, m)| !m[0].is_zero() && !m[1].is_zero())
            .map(|(u, m)| {
                let (l0, l1) = (m[0].log2_mag(), m[1].log2_mag());
                let slope = (l1 - l0) / (u[1] - u[0]);
                Piece {
                    log2_a: u[0],
                    log2_b: u[1],
                    log2_h: l0 - slope * u[0],
                    r: slope,
                    log_power: 0,
                    log2_thin: None,
                    m: 2.0 * slope + n as f64,
                    n,
                    cubic: None,
                }
            })
            .collect()
    }

    fn spline_pieces(&self, n: u32) -> Vec<Piece> {
        let x = &self.log2_nodes;
        let y: Vec<f64> = self.magnitudes.iter().map(|m| m.log2_mag()).collect();
        let k = x.len();
        // natural spline: second derivatives by the tridiagonal sweep
        let mut m2 = alloc::vec![0.0; k];
        if k > 2 {
            let mut diag = alloc::vec![0.0; k];
            let mut rhs = alloc::vec![0.0; k];
            for i in 1..k - 1 {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                diag[i] = 2.0 * (h0 + h1);
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                if i > 1 {
                    let w = h0 / diag[i - 1];
                    diag[i] -= w * h0;
                    rhs[i] -= w * rhs[i - 1];
                }
            }
            for i in (1..k - 1).rev() {
                let h1 = x[i + 1] - x[i];
                m2[i] = (rhs[i] - if i + 1 < k - 1 { h1 * m2[i + 1] } else { 0.0 }) / diag[i];
            }
        }
        (0..k - 1)
            .map(|i| {
                let h = x[i + 1] - x[i];
                let c1 = (y[i + 1] - y[i]) / h - h * (2.0 * m2[i] + m2[i + 1]) / 6.0;
                Piece {
                    log2_a: x[i],
                    log2_b: x[i + 1],
                    log2_h: y[i],
                    r: c1,
                    log_power: 0,
                    log2_thin: None,
                    m: 2.0 * c1 + n as f64,
                    n,
                    cubic: Some([y[i], c1, m2[i] / 2.0, (m2[i + 1] - m2[i]) / (6.0 * h)]),
                }
            })
            .collect()
    }
}

/// One component `g_i` of the profile.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Component {
    pub segments: Vec<PowerSegment>,
    pub sampled: Option<SampledRadial>,
}

impl Component {
    pub fn from_segments(segments: Vec<PowerSegment>) -> Self {
        Self { segments, sampled: None }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty() && self.sampled.is_none()
    }
}

/// Validated radial profile with its squared L² norm cached.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    dimension: u32,
    components: Vec<Component>,
    label: String,
    pieces: Vec<Vec<Piece>>,
    l2_sq: LogScalar,
}

/// Validates the data and builds the profile.
pub fn make_radial_profile(dimension: u32, components: Vec<Component>) -> Result<RadialProfile> {
    RadialProfile::new(dimension, components, String::new())
}

/// `‖f‖₂` by Plancherel.
pub fn l2_norm(profile: &RadialProfile) -> LogScalar {
    profile.l2_norm()
}

impl RadialProfile {
    pub fn new(dimension: u32, components: Vec<Component>, label: impl Into<String>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Domain("dimension must be at least 1"));
        }
        if components.is_empty() || components.iter().all(Component::is_empty) {
            return Err(Error::EmptyProfile);
        }
        let n = dimension;
        let mut pieces = Vec::with_capacity(components.len());
        for (ci, comp) in components.iter().enumerate() {
            let mut ps = Vec::new();
            for (si, s) in comp.segments.iter().enumerate() {
                validate_segment(s, ci, si)?;
                let m = 2.0 * s.r + n as f64;
                let touches_zero = s.log2_a == f64::NEG_INFINITY;
                if touches_zero && m <= 0.0 && s.log2_h != f64::NEG_INFINITY {
                    return Err(Error::NotSquareIntegrable { component: ci, segment: si });
                }
                ps.push(Piece {
                    log2_a: s.log2_a,
                    log2_b: s.log2_b,
                    log2_h: s.log2_h,
                    r: s.r,
                    log_power: s.log_power,
                    log2_thin: s.log2_thin,
                    m,
                    n,
                    cubic: None,
                });
            }
            let mut spans: Vec<(f64, f64)> = comp.segments.iter().map(|s| (s.log2_a, s.log2_b)).collect();
            if let Some(sr) = &comp.sampled {
                spans.push(sr.range());
                ps.extend(sr.pieces(n));
            }
            spans.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.partial_cmp(&y.1).unwrap()));
            if spans.windows(2).any(|w| w[0].1 > w[1].0 || (w[0].0 == w[1].0 && w[0].1 == w[1].1)) {
                return Err(Error::SegmentsOverlap { component: ci });
            }
            ps.sort_by(|x, y| x.log2_b.partial_cmp(&y.log2_b).unwrap().then(x.log2_a.partial_cmp(&y.log2_a).unwrap()));
            pieces.push(ps);
        }
        let omega = LogScalar::from_f64(sphere_surface(n));
        let masses: Vec<LogScalar> = pieces.iter().flatten().map(Piece::full_mass).collect();
        let l2_sq = omega * pairwise_sum(&masses);
        if !(l2_sq.log2_mag() < crate::numerics::MAX_EXPONENT as f64 / 2.0) {
            return Err(Error::Capacity("profile mass exceeds the representable range".into()));
        }
        Ok(Self { dimension, components, label: label.into(), pieces, l2_sq })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn n(&self) -> f64 {
        self.dimension as f64
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Power pieces of component `i`, sorted by outer radius.
    pub fn pieces(&self, i: usize) -> &[Piece] {
        &self.pieces[i]
    }

    pub fn all_pieces(&self) -> impl Iterator<Item = (usize, &Piece)> {
        self.pieces.iter().enumerate().flat_map(|(i, ps)| ps.iter().map(move |p| (i, p)))
    }

    pub fn omega(&self) -> LogScalar {
        LogScalar::from_f64(sphere_surface(self.dimension))
    }

    pub fn l2_norm_sq(&self) -> LogScalar {
        self.l2_sq
    }

    pub fn l2_norm(&self) -> LogScalar {
        self.l2_sq.sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.l2_sq.is_zero()
    }

    /// `∫_{|ξ| ≤ 2^u} |f̂|² dξ` summed over components.
    pub fn ball_mass(&self, log2_rho: f64, side: Side) -> LogScalar {
        let parts: Vec<LogScalar> = self
            .pieces
            .iter()
            .flatten()
            .filter(|p| p.log2_a < log2_rho || (p.log2_a == log2_rho && side == Side::At && p.log2_thin.is_some()))
            .map(|p| p.mass_below(log2_rho, side))
            .collect();
        self.omega() * pairwise_sum(&parts)
    }

    /// Profile with all amplitudes multiplied by `c > 0`.
    pub fn scaled(&self, c: LogScalar) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Domain("amplitude scale must be positive"));
        }
        let dl = c.log2_mag();
        let components = self
            .components
            .iter()
            .map(|comp| Component {
                segments: comp.segments.iter().map(|s| PowerSegment { log2_h: s.log2_h + dl, ..s.clone() }).collect(),
                sampled: comp.sampled.as_ref().map(|sr| SampledRadial {
                    log2_nodes: sr.log2_nodes.clone(),
                    magnitudes: sr.magnitudes.iter().map(|m| *m * c).collect(),
                    interpolation: sr.interpolation,
                }),
            })
            .collect();
        Self::new(self.dimension, components, self.label.clone())
    }

    /// Single-component profile holding component `i`.
    pub fn component_profile(&self, i: usize) -> Result<Self> {
        Self::new(self.dimension, alloc::vec![self.components[i].clone()], self.label.clone())
    }

    /// Log-power of the innermost piece when it reaches down to zero.
    pub fn deep_log_power(&self) -> u32 {
        self.all_pieces().filter(|(_, p)| p.log2_a == f64::NEG_INFINITY).map(|(_, p)| p.log_power).max().unwrap_or(0)
    }

    /// Finite segment and node radii (`log2`), sorted decreasing and deduplicated.
    pub fn structural_log2_radii(&self) -> Vec<f64> {
        let mut out: Vec<f64> =
            self.all_pieces().flat_map(|(_, p)| [p.log2_a, p.log2_b]).filter(|u| u.is_finite()).collect();
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out.dedup();
        out
    }

    /// Whether some piece extends all the way to `|ξ| = 0`.
    pub fn reaches_origin(&self) -> bool {
        self.all_pieces().any(|(_, p)| p.log2_a == f64::NEG_INFINITY && p.log2_h != f64::NEG_INFINITY)
    }
}

fn validate_segment(s: &PowerSegment, component: usize, segment: usize) -> Result<()> {
    let bad = |msg: &str| Err(Error::InvalidInput(alloc::format!("component {component}, segment {segment}: {msg}")));
    if !s.log2_b.is_finite() || s.log2_a.is_nan() || s.log2_a == f64::INFINITY {
        return bad("radii must be finite (log2_a may be -inf)");
    }
    if s.r.is_nan() || !s.r.is_finite() || s.log2_h.is_nan() || s.log2_h == f64::INFINITY {
        return bad("amplitude and exponent must be finite");
    }
    match s.log2_thin {
        Some(ld) => {
            if !(ld <= 0.0) || s.log_power != 0 || !(s.log2_a <= s.log2_b) || !s.log2_a.is_finite() {
                return bad("thin shells need log2_thin <= 0, log_power = 0 and finite a <= b");
            }
        }
        None => {
            if !(s.log2_a < s.log2_b) {
                return bad("log2_a must be below log2_b");
            }
        }
    }
    if s.log_power > 0 && s.log2_b > 0.0 {
        return bad("log-corrected segments need b <= 1");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn single(n: u32, seg: PowerSegment) -> Result<RadialProfile> {
        make_radial_profile(n, vec![Component::from_segments(vec![seg])])
    }

    #[test]
    fn unit_ball_plateau() {
        let p = single(3, PowerSegment::plateau(f64::NEG_INFINITY, 0.0, 0.0)).unwrap();
        assert!((l2_norm(&p).to_f64() - (4.0 * PI / 3.0).sqrt()).abs() < 1e-14);
        assert!((l2_norm(&p).to_f64() - 2.0466).abs() < 1e-4);
    }

    #[test]
    fn boundary_exponent_is_not_square_integrable() {
        let e = single(3, PowerSegment::new(f64::NEG_INFINITY, 0.0, 0.0, -1.5, 0)).unwrap_err();
        assert_eq!(e, Error::NotSquareIntegrable { component: 0, segment: 0 });
    }

    #[test]
    fn overlapping_segments_rejected() {
        let comp = Component::from_segments(vec![
            PowerSegment::plateau(-2.0, 0.0, 0.0),
            PowerSegment::plateau(-1.0, 1.0, 0.0),
        ]);
        assert_eq!(make_radial_profile(3, vec![comp]).unwrap_err(), Error::SegmentsOverlap { component: 0 });
    }

    #[test]
    fn empty_profile_rejected() {
        assert_eq!(make_radial_profile(3, vec![]).unwrap_err(), Error::EmptyProfile);
        assert_eq!(make_radial_profile(3, vec![Component::default()]).unwrap_err(), Error::EmptyProfile);
    }

    #[test]
    fn annulus_in_one_dimension() {
        let p = single(1, PowerSegment::plateau(-1.0, 0.0, 0.0)).unwrap();
        assert!((l2_norm(&p).to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn homogeneity() {
        let p = single(3, PowerSegment::new(-3.0, 0.5, 0.3, 0.7, 0)).unwrap();
        let q = p.scaled(LogScalar::from_f64(2.0)).unwrap();
        assert!((q.l2_norm().to_f64() / p.l2_norm().to_f64() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_segment_requires_small_radius() {
        assert!(single(3, PowerSegment::new(f64::NEG_INFINITY, 1.0, 0.0, 0.0, 1)).is_err());
        assert!(single(3, PowerSegment::new(f64::NEG_INFINITY, -4.0, 0.0, 0.0, 1)).is_ok());
    }

    #[test]
    fn sampled_plateau_matches_segment() {
        let sr = SampledRadial::new(vec![-1.0, 0.0], vec![LogScalar::ONE, LogScalar::ONE]).unwrap();
        let p = make_radial_profile(1, vec![Component { segments: vec![], sampled: Some(sr) }]).unwrap();
        assert!((p.l2_norm().to_f64() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cubic_samples_of_a_power_law_are_exact() {
        // λ^2 on [1/4, 2] sampled at 6 nodes, n = 1: ∫ λ^4 dλ
        let nodes: Vec<f64> = (0..6).map(|i| -2.0 + 0.6 * i as f64).collect();
        let mags = nodes.iter().map(|u| LogScalar::exp2(2.0 * u)).collect();
        let sr = SampledRadial::new(nodes, mags).unwrap().with_interpolation(Interpolation::LogLogCubic).unwrap();
        let p = make_radial_profile(1, vec![Component { segments: vec![], sampled: Some(sr) }]).unwrap();
        let exact = 2.0 * (32.0 - 1.0 / 1024.0) / 5.0;
        assert!((p.l2_norm_sq().to_f64() - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn sampled_range_overlapping_segment_rejected() {
        let sr = SampledRadial::new(vec![-1.0, 0.0], vec![LogScalar::ONE, LogScalar::ONE]).unwrap();
        let comp = Component { segments: vec![PowerSegment::plateau(-2.0, -0.5, 0.0)], sampled: Some(sr) };
        assert!(make_radial_profile(1, vec![comp]).is_err());
    }

    #[test]
    fn ball_mass_partial_and_thin_sides() {
        let p = single(3, PowerSegment::plateau(f64::NEG_INFINITY, 0.0, 0.0)).unwrap();
        let m = p.ball_mass(-2.0, Side::At).to_f64();
        assert!((m - 4.0 * PI / 3.0 / 64.0).abs() < 1e-15);

        let big = -(2f64.powi(20));
        let thin = single(3, PowerSegment::thin(big, 3.0 * big, 3, 0.0, 0.0)).unwrap();
        assert!(thin.ball_mass(big, Side::At).is_positive());
        assert!(thin.ball_mass(big, Side::Below).is_zero());
    }
}
