//! Truncated Jacobi theta function in the convention
//! `theta(xi; tau) = sum_M exp(-i 2 pi M^2 tau / 2 + i 2 pi M xi)`,
//! convergent for `Im tau < 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default hard cap on the truncation index `M*`.
pub const DEFAULT_TERM_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArgs {
    pub xi: f64,
    pub tau: Complex64,
    pub tol: f64,
    pub term_cap: u64,
}

impl ThetaArgs {
    pub fn new(xi: f64, tau: Complex64, tol: f64) -> Self {
        Self {
            xi,
            tau,
            tol,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Symmetric cutoff: terms with `|M| <= cutoff` were summed.
    pub cutoff: u64,
    /// Upper bound on the modulus of the discarded tail.
    pub truncation_error: f64,
}

/// Symmetric truncation at the smallest `M*` whose first omitted term
/// (`|M| = M* + 1`) has modulus below `tol`.
pub fn theta(args: &ThetaArgs) -> Result<ThetaValue> {
    let ThetaArgs {
        xi,
        tau,
        tol,
        term_cap,
    } = *args;
    if !(tau.im < 0.0) || !tau.re.is_finite() || !xi.is_finite() {
        return Err(Error::Domain(format!(
            "theta requires finite arguments and Im tau < 0, got tau = {tau}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }

    // |term(M)| = exp(-a M^2), a = pi |Im tau|
    let a = PI * (-tau.im);
    // smallest integer m with exp(-a m^2) < tol, then M* = m - 1
    let estimate = ((-tol.ln()).max(0.0) / a).sqrt().ceil();
    if estimate > term_cap as f64 + 1.0 {
        return Err(Error::TermCap {
            needed: estimate.min(u64::MAX as f64) as u64 - 1,
            cap: term_cap,
        });
    }
    let omitted = |m: u64| (-a * (m as f64).powi(2)).exp();
    let mut m_first = (estimate as u64).max(1);
    while omitted(m_first) >= tol {
        m_first += 1;
    }
    while m_first > 1 && omitted(m_first - 1) < tol {
        m_first -= 1;
    }
    let cutoff = m_first - 1;
    if cutoff > term_cap {
        return Err(Error::TermCap {
            needed: cutoff,
            cap: term_cap,
        });
    }

    let xi = xi - xi.floor();
    let term = |m: i64| {
        let m_f = m as f64;
        // reduce the real part of the phase to keep the argument small
        let re_phase = (-(m_f * m_f) * tau.re / 2.0 + m_f * xi).rem_euclid(1.0);
        let modulus = (-a * m_f * m_f).exp();
        Complex64::from_polar(modulus, 2.0 * PI * re_phase)
    };

    // sum from the smallest terms inward
    let mut value = Complex64::new(0.0, 0.0);
    for m in (1..=cutoff as i64).rev() {
        value += term(m) + term(-m);
    }
    value += term(0);

    let first_omitted = omitted(m_first);
    let ratio = (-a * (2.0 * m_first as f64 + 1.0)).exp();
    let truncation_error = 2.0 * first_omitted / (1.0 - ratio);

    Ok(ThetaValue {
        value,
        cutoff,
        truncation_error,
    })
}
