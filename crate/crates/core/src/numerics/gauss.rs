//! Quadratic Gauss sums evaluated by direct summation with exact
//! integer reduction of every phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};

/// Largest denominator accepted; keeps `M^2` and the reduced phase
/// numerators inside `i128`.
pub const MAX_DENOMINATOR: i64 = 1 << 31;

/// `exp(i 2 pi num / den)` with `num` already reduced modulo `den`.
pub(crate) fn unit_phase(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    // map into (-den/2, den/2] so the angle stays in (-pi, pi]
    let r = if 2 * r > den { r - den } else { r };
    Complex64::from_polar(1.0, 2.0 * PI * (r as f64) / (den as f64))
}

/// `(1/sqrt(q)) sum_{M=0}^{q-1} exp(-i 2 pi M^2 / (2q))` for any `q >= 1`.
///
/// For even `q` this equals `exp(-i pi/4)`; odd `q` values are reported
/// as computed.
pub fn quadratic_gauss_sum(q: i64) -> Result<Complex64> {
    if q < 1 || q > MAX_DENOMINATOR {
        return Err(Error::Domain(format!("q must lie in [1, 2^31], got {q}")));
    }
    let two_q = 2 * q as i128;
    let sum: Complex64 = (0..q as i128)
        .map(|m| unit_phase(-(m * m), two_q))
        .sum();
    Ok(sum / (q as f64).sqrt())
}

/// The unit Gauss sum for even `q`, which equals `exp(-i pi/4)`.
pub fn gauss_sum_unit(q: i64) -> Result<Complex64> {
    if q < 2 || q % 2 != 0 {
        return Err(Error::Domain(format!(
            "gauss_sum_unit is defined for even q >= 2, got {q}"
        )));
    }
    quadratic_gauss_sum(q)
}

/// `(1/2)(1/sqrt(q)) sum_{M=-q}^{q-1} exp(-i 2 pi p M^2/(2q) + i 2 pi M dxi)`.
pub fn gauss_sum_general(p: i64, q: i64, delta_xi: Rational64) -> Result<Complex64> {
    if q < 1 || q > MAX_DENOMINATOR {
        return Err(Error::Domain(format!("q must lie in [1, 2^31], got {q}")));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    let (a, b) = (*delta_xi.numer() as i128, *delta_xi.denom() as i128);
    let (p, q) = (p as i128, q as i128);
    // phase / 2pi = (-p M^2 b + 2 q M a) / (2 q b)
    let den = 2 * q * b;
    let sum: Complex64 = (-q..q)
        .map(|m| {
            let num = (-p * (m * m) * b).rem_euclid(den) + (2 * q * m * a).rem_euclid(den);
            unit_phase(num, den)
        })
        .sum();
    Ok(sum / (2.0 * (q as f64).sqrt()))
}
