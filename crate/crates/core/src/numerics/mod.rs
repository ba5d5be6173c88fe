//! Special functions: truncated Jacobi theta, quadratic Gauss sums,
//! Fresnel integrals and the complex error function.

pub mod erf;
pub mod fresnel;
pub mod gauss;
pub mod theta;

pub use erf::{erf_complex, erf_complex_capped, DEFAULT_MAGNITUDE_CAP};
pub use fresnel::{fresnel, fresnel_c, fresnel_leading_asymptotic, fresnel_s, Fresnel};
pub use gauss::{gauss_sum_general, gauss_sum_unit, quadratic_gauss_sum};
pub use theta::{theta, ThetaArgs, ThetaValue, DEFAULT_TERM_CAP};
