//! Deterministic quadrature in the log-radius variable `u = log2 λ`.
//!
//! Every radial integral `∫ f(λ) dλ` is evaluated as
//! `ln 2 · ∫ f(2^u) 2^u du`. Panels are doubled until two successive
//! estimates agree to the requested relative tolerance; all partial sums
//! are reduced pairwise in a fixed order.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::log_scalar::{pairwise_sum, LogScalar};
use crate::error::{Error, Result};

const MAX_DOUBLINGS: u32 = 14;
const MAX_TAIL_CHUNKS: usize = 36;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    GaussLegendreComposite,
    TrapezoidLog,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rule: QuadRule::GaussLegendreComposite, panels: 4, nodes_per_panel: 16, rel_tol: 1e-12 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.nodes_per_panel == 0 || !(self.rel_tol > 0.0) {
            return Err(Error::Domain("quadrature spec needs positive panels, nodes and tolerance"));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let pi = core::f64::consts::PI;
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(pi * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if libm::fabs(dx) < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `∫_{u0}^{u1} g(u) du` for an integrand already expressed in `u`.
pub fn quad_log2<F>(g: F, u0: f64, u1: f64, spec: &QuadratureSpec) -> Result<LogScalar>
where
    F: Fn(f64) -> LogScalar,
{
    spec.validate()?;
    if !(u0 < u1) {
        if u0 == u1 {
            return Ok(LogScalar::ZERO);
        }
        return Err(Error::Domain("quadrature interval must be nonempty"));
    }
    if u0 == f64::NEG_INFINITY {
        return quad_lower_tail(&g, u1, spec);
    }
    if !u0.is_finite() || !u1.is_finite() {
        return Err(Error::Domain("quadrature interval must be finite above"));
    }
    refine(&g, u0, u1, spec)
}

/// Radial integral `∫_lo^hi f(λ) dλ` with `f` evaluated at `λ = 2^u`.
pub fn quad_radial<F>(f: F, lo: LogScalar, hi: LogScalar, spec: &QuadratureSpec) -> Result<LogScalar>
where
    F: Fn(f64) -> LogScalar,
{
    if lo.sign() < 0 || hi.sign() <= 0 || !(lo < hi) {
        return Err(Error::Domain("radial interval must satisfy 0 <= lo < hi"));
    }
    let ln2 = LogScalar::from_f64(core::f64::consts::LN_2);
    let g = |u: f64| f(u) * LogScalar::exp2(u) * ln2;
    quad_log2(g, lo.log2_mag(), hi.log2_mag(), spec)
}

fn refine<F: Fn(f64) -> LogScalar>(g: &F, u0: f64, u1: f64, spec: &QuadratureSpec) -> Result<LogScalar> {
    let (nodes, weights) = match spec.rule {
        QuadRule::GaussLegendreComposite => gauss_legendre(spec.nodes_per_panel),
        QuadRule::TrapezoidLog => (Vec::new(), Vec::new()),
    };
    let mut panels = spec.panels;
    let mut prev = composite(g, u0, u1, panels, spec.rule, &nodes, &weights);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = composite(g, u0, u1, panels, spec.rule, &nodes, &weights);
        if converged(prev, next, spec.rel_tol) {
            return Ok(next);
        }
        prev = next;
    }
    let last = composite(g, u0, u1, panels * 2, spec.rule, &nodes, &weights);
    if converged(prev, last, spec.rel_tol) {
        return Ok(last);
    }
    Err(Error::QuadratureDidNotConverge { last: last.to_f64(), previous: prev.to_f64() })
}

fn converged(a: LogScalar, b: LogScalar, tol: f64) -> bool {
    a.rel_diff(b) <= tol
}

fn composite<F: Fn(f64) -> LogScalar>(
    g: &F,
    u0: f64,
    u1: f64,
    panels: usize,
    rule: QuadRule,
    nodes: &[f64],
    weights: &[f64],
) -> LogScalar {
    let h = (u1 - u0) / panels as f64;
    match rule {
        QuadRule::GaussLegendreComposite => {
            let half = LogScalar::from_f64(0.5 * h);
            let sums: Vec<LogScalar> = (0..panels)
                .map(|p| {
                    let a = u0 + p as f64 * h;
                    let mid = a + 0.5 * h;
                    let terms: Vec<LogScalar> = nodes
                        .iter()
                        .zip(weights)
                        .map(|(x, w)| g(mid + 0.5 * h * x) * LogScalar::from_f64(*w))
                        .collect();
                    pairwise_sum(&terms) * half
                })
                .collect();
            pairwise_sum(&sums)
        }
        QuadRule::TrapezoidLog => {
            let terms: Vec<LogScalar> = (0..=panels)
                .map(|i| {
                    let u = if i == panels { u1 } else { u0 + i as f64 * h };
                    let v = g(u);
                    if i == 0 || i == panels {
                        v * LogScalar::from_f64(0.5)
                    } else {
                        v
                    }
                })
                .collect();
            pairwise_sum(&terms) * LogScalar::from_f64(h)
        }
    }
}

// Integrates (-inf, u1] in chunks of doubling width until the newest chunk
// is negligible against the running total.
fn quad_lower_tail<F: Fn(f64) -> LogScalar>(g: &F, u1: f64, spec: &QuadratureSpec) -> Result<LogScalar> {
    let mut chunks = Vec::new();
    let mut hi = u1;
    let mut width = 32.0;
    for _ in 0..MAX_TAIL_CHUNKS {
        let lo = hi - width;
        let part = refine(g, lo, hi, spec)?;
        chunks.push(part);
        let total = pairwise_sum(&chunks);
        let negligible = if total.is_zero() {
            part.is_zero() && chunks.len() > 2
        } else {
            (part.abs() / total.abs()).to_f64() <= spec.rel_tol * 1e-2
        };
        if negligible {
            return Ok(total);
        }
        hi = lo;
        width *= 2.0;
    }
    let total = pairwise_sum(&chunks);
    Err(Error::QuadratureDidNotConverge { last: total.to_f64(), previous: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f64_fn(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> LogScalar {
        move |u| LogScalar::from_f64(f(libm::exp2(u)))
    }

    #[test]
    fn polynomial_shell_weight() {
        let v = quad_radial(f64_fn(|l| l * l), LogScalar::ZERO, LogScalar::ONE, &QuadratureSpec::default())
            .unwrap()
            .to_f64();
        assert!((v - 1.0 / 3.0).abs() < 1e-12 / 3.0);
    }

    #[test]
    fn reciprocal_gives_logarithm() {
        let v = quad_radial(f64_fn(|l| 1.0 / l), LogScalar::exp2(-40.0), LogScalar::ONE, &QuadratureSpec::default())
            .unwrap()
            .to_f64();
        let exact = 40.0 * core::f64::consts::LN_2;
        assert!((v - exact).abs() < 1e-12 * exact);
        assert!((v - 27.7259).abs() < 1e-4);
    }

    #[test]
    fn zero_integrand() {
        let v = quad_radial(
            |_| LogScalar::ZERO,
            LogScalar::exp2(-3.0),
            LogScalar::from_f64(5.0),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn divergent_tail_reports_non_convergence() {
        let r = quad_radial(|u| LogScalar::exp2(-u), LogScalar::ZERO, LogScalar::ONE, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::QuadratureDidNotConverge { .. })));
    }

    #[test]
    fn trapezoid_rule_agrees() {
        let spec = QuadratureSpec { rule: QuadRule::TrapezoidLog, panels: 64, nodes_per_panel: 1, rel_tol: 1e-9 };
        let v = quad_radial(f64_fn(|l| l * l), LogScalar::exp2(-30.0), LogScalar::ONE, &spec).unwrap().to_f64();
        assert!((v - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn gauss_nodes_integrate_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
