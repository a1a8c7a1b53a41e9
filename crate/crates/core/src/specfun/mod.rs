//! Special functions and quadrature used by the closed-form evaluators.
//!
//! Every function here is pure and thread-safe.

mod approx;
mod bessel;
mod expint;
mod gamma;
mod product;
mod quad;

pub use approx::{approx_e1, approx_en, approx_lower_gamma, DEFAULT_EN_TERMS};
pub use bessel::{bessel_k0, bessel_k0_scaled};
pub use expint::{expint_en, expint_en_scaled};
pub use gamma::{
    digamma_int, gamma, gamma_p, gamma_q, ln_gamma, ln_upper_inc_gamma, lower_inc_gamma,
    upper_inc_gamma, EULER_GAMMA,
};
pub use product::{cdf_product_gamma, pdf_product_gamma, sf_product_gamma};
pub use quad::{integrate, integrate_to_infinity, Integral, QuadratureSpec};
