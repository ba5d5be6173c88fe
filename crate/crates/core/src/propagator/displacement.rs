//! Allowed and physical displacements at rational times.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::numerics::gauss::{gauss_sum_general, unit_phase};

use super::time::RationalTime;

/// Interference magnitudes at or below `q * PHYSICAL_THRESHOLD` count as
/// exact cancellations.
pub const PHYSICAL_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementSet {
    pub time: RationalTime,
    pub allowed: Vec<Rational64>,
    pub physical: Vec<Rational64>,
    /// Common modulus `1/sqrt(q)` of the lattice propagator at each
    /// physical displacement.
    pub amplitude: f64,
    /// Modulus per physical displacement (all equal to `amplitude` for the
    /// closed form; measured for the oracle).
    pub magnitudes: Vec<f64>,
    /// Propagator phase per physical displacement, in `(-pi, pi]`.
    pub phases: Vec<f64>,
}

impl DisplacementSet {
    pub fn len(&self) -> usize {
        self.physical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.physical.is_empty()
    }

    pub fn contains(&self, dxi: Rational64) -> bool {
        self.physical.contains(&wrap_displacement(dxi))
    }

    /// Phase at a physical displacement.
    pub fn phase_of(&self, dxi: Rational64) -> Option<f64> {
        let dxi = wrap_displacement(dxi);
        self.physical
            .iter()
            .position(|&d| d == dxi)
            .map(|i| self.phases[i])
    }
}

/// Maps `dxi` into `[-1/2, 1/2)`.
pub fn wrap_displacement(dxi: Rational64) -> Rational64 {
    let half = Rational64::new(1, 2);
    let shifted = dxi + half;
    shifted - shifted.floor() - half
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn require_reduced(t: &RationalTime) -> Result<()> {
    if !t.is_reduced() {
        return Err(Error::Precondition(format!(
            "time {t} must be reduced (coprime, in [-1, 1))"
        )));
    }
    Ok(())
}

/// `{-q, ..., q-1} / (2q)`.
pub fn allowed_displacements(t: &RationalTime) -> Result<Vec<Rational64>> {
    require_reduced(t)?;
    let q = t.q();
    Ok((-q..q).map(|k| Rational64::new(k, 2 * q)).collect())
}

/// Closed-form physical set, `q` elements:
/// even `q` gives `{-q/2, ..., q/2-1}/q`; odd `q` gives the odd (for odd
/// `p`) or even (for even `p`) numerators over `2q` inside `[-1/2, 1/2)`.
pub fn physical_displacements(t: &RationalTime) -> Result<DisplacementSet> {
    let (p, q) = t.lowest_terms();
    if (p, q) != (t.p(), t.q()) {
        return Err(Error::NotCoprime { p: t.p(), q: t.q() });
    }
    require_reduced(t)?;
    let physical: Vec<Rational64> = if q % 2 == 0 {
        (-q / 2..q / 2).map(|k| Rational64::new(k, q)).collect()
    } else {
        let first = if p % 2 != 0 { -q } else { -q + 1 };
        (0..q).map(|i| Rational64::new(first + 2 * i, 2 * q)).collect()
    };
    let phases = physical
        .iter()
        .map(|&d| {
            if p.abs() == 1 {
                conjectured_phase(d, t)
            } else {
                Ok(gauss_sum_general(p, q, d)?.arg())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let amplitude = 1.0 / (q as f64).sqrt();
    Ok(DisplacementSet {
        time: *t,
        allowed: allowed_displacements(t)?,
        magnitudes: vec![amplitude; physical.len()],
        physical,
        amplitude,
        phases,
    })
}

/// Interference oracle: a displacement is physical when
/// `|sum_{M=-q}^{q-1} exp(i phi_M)| > q * 1e-9`, with
/// `phi_M = -2 pi M (dxi - M t / 2)`.
///
/// The recorded phase is that of the propagator, `arg sum exp(-i phi_M)`,
/// and the recorded magnitude is `|sum| / (2q)`.
pub fn classify_displacements(t: &RationalTime) -> Result<DisplacementSet> {
    require_reduced(t)?;
    let (p, q) = (t.p() as i128, t.q() as i128);
    let allowed = allowed_displacements(t)?;
    let mut physical = Vec::new();
    let mut magnitudes = Vec::new();
    let mut phases = Vec::new();
    for &d in &allowed {
        let (a, b) = (*d.numer() as i128, *d.denom() as i128);
        // phi_M / 2pi = (-2 q a M + p b M^2) / (2 q b)
        let den = 2 * q * b;
        let sum: Complex64 = (-q..q)
            .map(|m| unit_phase(-2 * q * a * m + p * b * m * m, den))
            .sum();
        if sum.norm() > q as f64 * PHYSICAL_THRESHOLD {
            physical.push(d);
            magnitudes.push(sum.norm() / (2 * q) as f64);
            phases.push(sum.conj().arg());
        }
    }
    let q = t.q();
    Ok(DisplacementSet {
        time: *t,
        allowed,
        amplitude: 1.0 / (q as f64).sqrt(),
        physical,
        magnitudes,
        phases,
    })
}

/// `sign(t) (pi dxi^2 q - pi/4)` for `t = +-1/q`, `dxi` taken in
/// `[-1/2, 1/2)`; returned in `(-pi, pi]`.
pub fn conjectured_phase(dxi: Rational64, t: &RationalTime) -> Result<f64> {
    let reduced = t.reduce();
    let (p, q) = (reduced.p(), reduced.q());
    if p.abs() != 1 {
        return Err(Error::Precondition(format!(
            "conjectured phase needs t = +-1/q, got {t}"
        )));
    }
    let d = wrap_displacement(dxi);
    let (a, b) = (*d.numer() as i128, *d.denom() as i128);
    // dxi^2 q = a^2 q / b^2, reduced modulo 2 exactly
    let num = (a * a * q as i128).rem_euclid(2 * b * b);
    let action = PI * num as f64 / (b * b) as f64;
    Ok(wrap_phase(p as f64 * (action - PI / 4.0)))
}
