//! Extended-range scalars, log-radius quadrature, special functions and
//! the scalar identities used by the semigroup checks.

mod identities;
mod log_scalar;
mod quadrature;
mod special;

pub use identities::{gamma_identity_residual, uniform_dyadic_sum_bound, TimeGrid};
pub use log_scalar::{pairwise_sum, pairwise_sum_f64, LogScalar, MAX_EXPONENT};
pub use quadrature::{gauss_legendre, quad_log2, quad_radial, QuadRule, QuadratureSpec};
pub use special::{gamma, ln_gamma, ln_gamma_pq, lower_incomplete_gamma_reg, upper_incomplete_gamma_reg};

/// Surface measure of the unit sphere in ℝⁿ, `2π^{n/2} / Γ(n/2)`.
pub fn sphere_surface(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * libm::pow(core::f64::consts::PI, h) / gamma(h)
}
