//! Closed-form radial integrals over a single power piece
//! `g(λ) = h λ^r (ln 1/λ)^p` on `[a, b]`.

use crate::numerics::{pairwise_sum, LogScalar};

const LN2: f64 = core::f64::consts::LN_2;

/// Below this relative thickness a thin shell is integrated to first order.
const THIN_LINEAR: f64 = 1e-30;

/// Which side of a probe radius a thin shell sitting exactly on it falls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Ball `|ξ| ≤ ρ` taken closed: shells ending at `ρ` are inside.
    At,
    /// Ball approached from below: shells starting at `ρ` are outside.
    Below,
}

/// A power piece in a component, with the derived squared-weight exponent
/// `m = 2r + n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub log2_a: f64,
    pub log2_b: f64,
    pub log2_h: f64,
    pub r: f64,
    pub log_power: u32,
    /// `log2 δ` with `a^n = b^n (1 − δ)`, for shells too thin to resolve
    /// through `log2_a`.
    pub log2_thin: Option<f64>,
    pub m: f64,
    pub n: u32,
    /// `log2 g(2^u) = c0 + c1 t + c2 t² + c3 t³`, `t = u − log2_a`, for
    /// spline-interpolated samples. Such pieces are integrated numerically.
    pub cubic: Option<[f64; 4]>,
}

impl Piece {
    pub fn h2(&self) -> LogScalar {
        LogScalar::exp2(2.0 * self.log2_h)
    }

    /// `log2 g(2^u)` on the piece (no support check).
    pub fn log2_value(&self, u: f64) -> f64 {
        if let Some(c) = self.cubic {
            let t = u - self.log2_a;
            return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
        }
        let mut l = self.log2_h + self.r * u;
        if self.log_power > 0 {
            l += self.log_power as f64 * libm::log2(-u * LN2);
        }
        l
    }

    /// `∫ g² λ^{n−1} dλ` over the whole piece.
    pub fn full_mass(&self) -> LogScalar {
        if self.h2().is_zero() {
            return LogScalar::ZERO;
        }
        match self.log2_thin {
            Some(ld) => self.h2() * thin_shell(self.m, self.n, self.log2_b, ld),
            None => self.mass_between(self.log2_a, self.log2_b),
        }
    }

    /// Mass of the piece inside the ball of radius `2^u`.
    pub fn mass_below(&self, u: f64, side: Side) -> LogScalar {
        let inside_all = match side {
            Side::At => u >= self.log2_b,
            Side::Below => u > self.log2_b || (u == self.log2_b && self.log2_a < self.log2_b),
        };
        if inside_all {
            return self.full_mass();
        }
        if u <= self.log2_a {
            return LogScalar::ZERO;
        }
        if self.log2_thin.is_some() {
            // a < u < b: full shell minus the outer part [u, b]
            let outer = self.mass_between(u, self.log2_b);
            let full = self.full_mass();
            return if outer >= full { LogScalar::ZERO } else { full - outer };
        }
        self.mass_between(self.log2_a, u)
    }

    /// `∫_{2^lo}^{2^hi} g² λ^{n−1} dλ` for `lo < hi` inside the piece.
    pub fn mass_between(&self, lo: f64, hi: f64) -> LogScalar {
        if !(lo < hi) {
            return LogScalar::ZERO;
        }
        let h2 = self.h2();
        if h2.is_zero() {
            return h2;
        }
        if self.cubic.is_some() {
            return self.spline_mass(lo, hi);
        }
        if self.log_power == 0 {
            h2 * power_integral(self.m, lo, hi)
        } else {
            h2 * log_power_integral(self.m, 2 * self.log_power, lo, hi)
        }
    }
}

impl Piece {
    /// Upper bound for `full_mass`, cheap for spline pieces.
    pub fn mass_bound(&self) -> LogScalar {
        if self.cubic.is_none() {
            return self.full_mass();
        }
        let mid = 0.5 * (self.log2_a + self.log2_b);
        let top = [self.log2_a, mid, self.log2_b].iter().map(|u| self.log2_value(*u)).fold(f64::NEG_INFINITY, f64::max);
        // the cubic's bulge between the sampled points stays well under 2^{1/2}
        LogScalar::exp2(2.0 * (top + 0.5)) * power_integral(self.n as f64, self.log2_a, self.log2_b)
    }

    fn spline_mass(&self, lo: f64, hi: f64) -> LogScalar {
        let n = self.n as f64;
        let g = |u: f64| LogScalar::exp2(2.0 * self.log2_value(u) + n * u);
        let spec = crate::numerics::QuadratureSpec::with_tol(1e-13);
        let ln2 = LogScalar::from_f64(LN2);
        crate::numerics::quad_log2(g, lo, hi, &spec).map(|v| v * ln2).unwrap_or(LogScalar::ZERO)
    }
}

/// `∫_{2^lo}^{2^hi} λ^{m−1} dλ`, `lo` may be `-inf` when `m > 0`.
pub fn power_integral(m: f64, lo: f64, hi: f64) -> LogScalar {
    if m == 0.0 {
        return LogScalar::from_f64(LN2 * (hi - lo));
    }
    if lo == f64::NEG_INFINITY {
        return LogScalar::exp2(m * hi) / LogScalar::from_f64(m);
    }
    // factor out the larger endpoint power to keep 1 − ratio accurate
    if m > 0.0 {
        let frac = -libm::expm1(m * LN2 * (lo - hi));
        LogScalar::exp2(m * hi) * LogScalar::from_f64(frac / m)
    } else {
        let frac = -libm::expm1(m * LN2 * (hi - lo));
        LogScalar::exp2(m * lo) * LogScalar::from_f64(frac / -m)
    }
}

/// `∫_{2^lo}^{2^hi} λ^{m−1} (ln 1/λ)^q dλ` for `hi ≤ 0` and even `q ≥ 2`.
///
/// With `v = ln(1/λ)` this is `∫ e^{−mv} v^q dv`, an upper incomplete gamma
/// of integer order when `m > 0`, expanded as a finite sum.
pub fn log_power_integral(m: f64, q: u32, lo: f64, hi: f64) -> LogScalar {
    let v_hi = -lo * LN2; // larger v at the inner radius
    let v_lo = -hi * LN2;
    if m > 0.0 {
        let upper = |v: f64| -> LogScalar {
            if v == f64::INFINITY {
                return LogScalar::ZERO;
            }
            // Γ(q+1, mv)/m^{q+1} = e^{−mv} Σ_k q!/k! v^k / m^{q+1−k}
            let x = m * v;
            let mut terms = alloc::vec::Vec::with_capacity(q as usize + 1);
            let mut coeff = LogScalar::ONE; // q!/k! built from k = q downward
            for k in (0..=q).rev() {
                let term =
                    coeff * LogScalar::from_f64(v).powi(k as i32) / LogScalar::from_f64(m).powi((q + 1 - k) as i32);
                terms.push(term);
                coeff = coeff * LogScalar::from_f64(k as f64);
            }
            LogScalar::exp(-x) * pairwise_sum(&terms)
        };
        let a = upper(v_lo);
        let b = upper(v_hi);
        if b >= a {
            LogScalar::ZERO
        } else {
            a - b
        }
    } else {
        // rare: no closed form used; integrate in v with Gauss–Legendre
        let spec = crate::numerics::QuadratureSpec::with_tol(1e-13);
        let g = |u: f64| {
            let v = -u * LN2;
            LogScalar::exp2(m * u) * LogScalar::from_f64(v).powi(q as i32) * LogScalar::from_f64(LN2)
        };
        crate::numerics::quad_log2(g, lo, hi, &spec).unwrap_or(LogScalar::ZERO)
    }
}

/// `∫_a^b λ^{m−1} dλ` for a shell with `a^n = b^n (1 − δ)`, `δ = 2^{log2_delta}`.
pub fn thin_shell(m: f64, n: u32, log2_b: f64, log2_delta: f64) -> LogScalar {
    let delta = LogScalar::exp2(log2_delta);
    let c = m / n as f64;
    let bm = LogScalar::exp2(m * log2_b);
    if delta.to_f64() < THIN_LINEAR {
        // (1 − (1−δ)^c)/m ≈ cδ/m = δ/n, also for m = 0
        return bm * delta / LogScalar::from_f64(n as f64);
    }
    let d = delta.to_f64();
    if m == 0.0 {
        return LogScalar::from_f64(-libm::log1p(-d) / n as f64);
    }
    let frac = -libm::expm1(c * libm::log1p(-d));
    bm * LogScalar::from_f64(frac / m)
}
