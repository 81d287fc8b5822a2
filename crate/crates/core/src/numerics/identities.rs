//! Numerical checks of the two scalar identities behind the semigroup
//! norm equivalence: the Gamma time-integral and the uniform dyadic sum.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::log_scalar::{pairwise_sum, LogScalar};
use super::quadrature::{quad_radial, QuadratureSpec};
use super::special::ln_gamma;
use crate::error::{Error, Result};

/// Geometric time grid `t = 10^(lo + i/per_decade)`, optionally with `t = 0`
/// adjoined in front.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub log10_lo: f64,
    pub log10_hi: f64,
    pub per_decade: usize,
    pub include_zero: bool,
}

impl TimeGrid {
    pub fn new(log10_lo: f64, log10_hi: f64, per_decade: usize) -> Result<Self> {
        if !(log10_lo < log10_hi) || per_decade == 0 {
            return Err(Error::Domain("time grid needs lo < hi and per_decade > 0"));
        }
        Ok(Self { log10_lo, log10_hi, per_decade, include_zero: false })
    }

    pub fn with_zero(mut self) -> Self {
        self.include_zero = true;
        self
    }

    pub fn decades(&self) -> f64 {
        self.log10_hi - self.log10_lo
    }

    /// Number of geometric samples (excluding any adjoined zero).
    pub fn len_geometric(&self) -> usize {
        libm::round(self.decades() * self.per_decade as f64) as usize + 1
    }

    pub fn log10_times(&self) -> Vec<f64> {
        let n = self.len_geometric();
        (0..n)
            .map(|i| if i + 1 == n { self.log10_hi } else { self.log10_lo + i as f64 / self.per_decade as f64 })
            .collect()
    }

    pub fn times(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len_geometric() + 1);
        if self.include_zero {
            out.push(0.0);
        }
        out.extend(self.log10_times().into_iter().map(|l| libm::pow(10.0, l)));
        out
    }

    /// Same range with twice the sampling density.
    pub fn refined(&self) -> Self {
        Self { per_decade: self.per_decade * 2, ..self.clone() }
    }
}

/// Relative deviation of the time integral
/// `∫₀^∞ t^{σ/α} (cλ^{2α})^{1+σ/α} e^{−cλ^{2α} t} dt` from `Γ(1 + σ/α)`.
pub fn gamma_identity_residual(alpha: f64, sigma: f64, c: f64, lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(alpha > 0.0 && sigma > 0.0 && c > 0.0 && lambda > 0.0) {
        return Err(Error::Domain("gamma identity parameters must be positive"));
    }
    let k = sigma / alpha;
    let kappa = LogScalar::from_f64(c) * LogScalar::from_f64(lambda).powf(2.0 * alpha);
    let weight = kappa.powf(1.0 + k);
    let integrand = |u: f64| {
        let t = LogScalar::exp2(u);
        t.powf(k) * weight * LogScalar::exp(-(kappa * t).to_f64())
    };
    // e^{-κt} has killed the integrand long before κt = 2000
    let upper = LogScalar::from_f64(2000.0) / kappa;
    let q = quad_radial(integrand, LogScalar::ZERO, upper, spec)?;
    let gamma = LogScalar::exp(ln_gamma(1.0 + k));
    Ok(((q - gamma).abs() / gamma).to_f64())
}

/// `sup_t Σ_j t^{σ/α} 4^{jσ} e^{−c t 4^{jα}}` over the sampled times, with
/// `j` running over `j_lo..=j_hi`.
pub fn uniform_dyadic_sum_bound(
    alpha: f64,
    sigma: f64,
    c: f64,
    t_grid: &TimeGrid,
    j_lo: i64,
    j_hi: i64,
) -> Result<f64> {
    if !(alpha > 0.0 && sigma > 0.0 && c > 0.0) {
        return Err(Error::Domain("dyadic sum parameters must be positive"));
    }
    if j_lo >= j_hi {
        return Err(Error::Domain("empty j window"));
    }
    let ln4 = 2.0 * core::f64::consts::LN_2;
    let mut sup = 0.0f64;
    for t in t_grid.times().into_iter().filter(|t| *t > 0.0) {
        let lt = libm::log(t);
        let terms: Vec<LogScalar> = (j_lo..=j_hi)
            .map(|j| {
                let j = j as f64;
                LogScalar::exp((sigma / alpha) * lt + j * sigma * ln4 - c * t * libm::exp(j * alpha * ln4))
            })
            .collect();
        let sum = pairwise_sum(&terms);
        let edge = terms[0].max(terms[terms.len() - 1]);
        if sum.is_zero() || (edge / sum).to_f64() > 1e-15 {
            return Err(Error::TruncationDominates(format!(
                "boundary term of j window [{j_lo}, {j_hi}] is not negligible at t = {t:e}"
            )));
        }
        sup = sup.max(sum.to_f64());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_identity_examples() {
        let spec = QuadratureSpec::default();
        for &(a, s, c, l) in &[(1.0, 1.0, 1.0, 1.0), (0.5, 1.0, 2.0, 0.5), (1.0, 2.0, 1.0, 10.0)] {
            let r = gamma_identity_residual(a, s, c, l, &spec).unwrap();
            assert!(r <= 1e-8, "{a} {s} {c} {l}: {r}");
        }
    }

    #[test]
    fn gamma_identity_rejects_nonpositive() {
        assert!(gamma_identity_residual(0.0, 1.0, 1.0, 1.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn dyadic_sum_is_finite_and_stable() {
        let grid = TimeGrid::new(-4.0, 8.0, 8).unwrap();
        let s1 = uniform_dyadic_sum_bound(1.0, 1.0, 1.0, &grid, -80, 40).unwrap();
        let s2 = uniform_dyadic_sum_bound(1.0, 1.0, 1.0, &grid.refined(), -80, 40).unwrap();
        assert!(s1.is_finite() && s1 > 0.0);
        assert!((s1 - s2).abs() <= 0.01 * s2);
    }

    #[test]
    fn dyadic_sum_narrow_window_is_rejected() {
        let grid = TimeGrid::new(-4.0, 8.0, 4).unwrap();
        let r = uniform_dyadic_sum_bound(1.0, 1.0, 1.0, &grid, -5, 5);
        assert!(matches!(r, Err(Error::TruncationDominates(_))));
    }

    #[test]
    fn dyadic_sum_matches_direct_summation() {
        // direct f64 summation over a much wider window
        let (alpha, sigma, c) = (1.0, 0.25, 2.0);
        let grid = TimeGrid::new(-4.0, 8.0, 8).unwrap();
        let got = uniform_dyadic_sum_bound(alpha, sigma, c, &grid, -400, 40).unwrap();
        let mut best = 0.0f64;
        for t in grid.times() {
            let mut s = 0.0;
            for j in -2000..60 {
                let j = j as f64;
                s += t.powf(sigma / alpha) * 4f64.powf(j * sigma) * (-c * t * 4f64.powf(j * alpha)).exp();
            }
            best = best.max(s);
        }
        assert!((got - best).abs() < 1e-12 * best);
    }

    #[test]
    fn larger_damping_lowers_the_bound() {
        let grid = TimeGrid::new(-4.0, 8.0, 8).unwrap();
        let s1 = uniform_dyadic_sum_bound(1.0, 1.0, 1.0, &grid, -80, 40).unwrap();
        let s100 = uniform_dyadic_sum_bound(1.0, 1.0, 100.0, &grid, -80, 40).unwrap();
        assert!(s100 < s1);
    }

    #[test]
    fn time_grid_counts() {
        let g = TimeGrid::new(-2.0, 8.0, 8).unwrap().with_zero();
        assert_eq!(g.times().len(), 82);
        assert_eq!(g.times()[0], 0.0);
        assert!((g.times()[81] - 1e8).abs() < 1e-6);
    }
}
