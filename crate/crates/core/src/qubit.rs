//! Propagator of the free qubit Hamiltonian: the kinetic operator with
//! adimensional momenta `k = 2 pi M / N`, `M` in `[-N/2, N/2)`.
//!
//! [`qubit_direct`] sums the finite-`N` spectrum. [`qubit_closed`] is the
//! large-`N` integral in closed form through the complex error function and
//! is the reference for everything else here.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{erf_complex_capped, fresnel};

/// Beyond this time the small-time expansion visibly departs from the
/// closed form.
pub const SMALL_TIME_WINDOW: f64 = 0.2;

/// Erf cap used by [`qubit_closed`]. Both erf arguments sit on the
/// `arg z = pi/4` diagonal where erf stays bounded, so the overflow guard
/// of the general cap is not needed and only runtime (about `|z|` terms)
/// limits the magnitude.
pub const QUBIT_ERF_CAP: f64 = 1.0e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPropagatorPoint {
    pub delta_j: i64,
    pub tau: f64,
    pub value: Complex64,
}

/// `(1/N) sum_M exp(-i k^2 tau / 2 + i k dj)`, `k = 2 pi M / N`.
pub fn qubit_direct(n_sites: usize, delta_j: i64, tau: f64) -> Result<Complex64> {
    if n_sites < 2 || n_sites % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "site count must be even and >= 2, got {n_sites}"
        )));
    }
    let n = n_sites as i64;
    // dj enters only mod N; reduce so k * dj stays small
    let dj = delta_j.rem_euclid(n);
    let sum: Complex64 = (-n / 2..n / 2)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / n_sites as f64;
            let lin = 2.0 * PI * ((m * dj).rem_euclid(n)) as f64 / n_sites as f64;
            Complex64::from_polar(1.0, lin - 0.5 * k * k * tau)
        })
        .sum();
    Ok(sum / n_sites as f64)
}

/// Large-`N` propagator at real `delta_j` and `tau > 0`:
/// `e^{i S} / (4 sqrt(pi) s) [erf(pi s + w) + erf(pi s - w)]` with
/// `s = sqrt(i tau / 2)`, `w = i dj / (2 s)` and `S = dj^2 / (2 tau)`.
pub fn qubit_closed(delta_j: f64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if !delta_j.is_finite() {
        return Err(Error::Domain(format!("non-finite displacement {delta_j}")));
    }
    let s = Complex64::new(0.0, 0.5 * tau).sqrt();
    let w = Complex64::new(0.0, delta_j) / (2.0 * s);
    let a = erf_complex_capped(PI * s + w, QUBIT_ERF_CAP)?;
    let b = erf_complex_capped(PI * s - w, QUBIT_ERF_CAP)?;
    let action = delta_j * delta_j / (2.0 * tau);
    let prefactor = Complex64::from_polar(1.0, action) / (4.0 * PI.sqrt() * s);
    Ok(prefactor * (a + b))
}

/// `qubit_direct` over `dj` in `[-dj_max, dj_max]`.
pub fn direct_profile(n_sites: usize, tau: f64, dj_max: i64) -> Result<Vec<QubitPropagatorPoint>> {
    (-dj_max..=dj_max)
        .into_par_iter()
        .map(|dj| {
            Ok(QubitPropagatorPoint {
                delta_j: dj,
                tau,
                value: qubit_direct(n_sites, dj, tau)?,
            })
        })
        .collect()
}

/// `qubit_closed` over integer `dj` in `[-dj_max, dj_max]`.
pub fn closed_profile(tau: f64, dj_max: i64) -> Result<Vec<QubitPropagatorPoint>> {
    (-dj_max..=dj_max)
        .into_par_iter()
        .map(|dj| {
            Ok(QubitPropagatorPoint {
                delta_j: dj,
                tau,
                value: qubit_closed(dj as f64, tau)?,
            })
        })
        .collect()
}

/// `I_m(x) = int_0^1 t^m cos(x t) dt` for even `m`.
///
/// Power series for `|x| < max(1, m)`, upward recursion from
/// `I_0 = sin x / x` elsewhere, and the exact cosine form when `x` is a
/// nonzero multiple of pi.
pub fn i_function(m: u32, x: f64) -> Result<f64> {
    if m % 2 != 0 {
        return Err(Error::Domain(format!("I_m needs even m, got {m}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {x}")));
    }
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(1.0 / (m + 1) as f64);
    }
    if ax < (m as f64).max(1.0) {
        return Ok(i_series(m, ax));
    }
    let x2 = ax * ax;
    let half_turns = ax / PI;
    let n = half_turns.round();
    if n >= 1.0 && (half_turns - n).abs() <= 1e-14 * n {
        // sin x = 0: I_2k = 2k cos(x)/x^2 - 2k(2k-1)/x^2 I_2(k-1)
        let cos = if n as i64 % 2 == 0 { 1.0 } else { -1.0 };
        let mut value = 0.0;
        for k in 1..=m / 2 {
            let two_k = (2 * k) as f64;
            value = two_k * cos / x2 - two_k * (two_k - 1.0) / x2 * value;
        }
        return Ok(value);
    }
    let i0 = ax.sin() / ax;
    let j0 = j0(ax);
    let mut value = i0;
    for k in 1..=m / 2 {
        let two_k = (2 * k) as f64;
        value = i0 - two_k * j0 - two_k * (two_k - 1.0) / x2 * (value - 1.0 / (two_k - 1.0));
    }
    Ok(value)
}

/// `J_0(x) = (1 - cos x) / x^2`, written as `2 sin^2(x/2) / x^2`.
fn j0(x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let s = (0.5 * x).sin();
    2.0 * s * s / (x * x)
}

fn i_series(m: u32, x: f64) -> f64 {
    // sum_n (-1)^n x^{2n} / ((2n + 1 + m) (2n)!)
    let x2 = x * x;
    let mut power = 1.0;
    let mut sum = 0.0;
    for n in 0..200u32 {
        let contrib = power / (2 * n + 1 + m) as f64;
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs() && (2 * n) as f64 > x {
            break;
        }
        power *= -x2 / (((2 * n + 1) * (2 * n + 2)) as f64);
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallTimeValue {
    pub value: Complex64,
    /// Set when `|tau|` exceeds [`SMALL_TIME_WINDOW`].
    pub beyond_window: bool,
}

/// Second-order expansion `(I_0 - pi^4 I_4 tau^2 / 8) - i (pi^2/2) I_2 tau`
/// with every `I` taken at `x = pi dj`.
pub fn qubit_small_time(delta_j: i64, tau: f64) -> SmallTimeValue {
    let x = PI * delta_j as f64;
    let [i0, i2, i4] = [0, 2, 4].map(|m| i_function(m, x).expect("even order, finite x"));
    let pi2 = PI * PI;
    SmallTimeValue {
        value: Complex64::new(i0 - pi2 * pi2 / 8.0 * i4 * tau * tau, -0.5 * pi2 * i2 * tau),
        beyond_window: tau.abs() > SMALL_TIME_WINDOW,
    }
}

/// `|D|^2` of the quadratic model, `I_0^2 - tau^2 (pi^4/4)(I_0 I_4 - I_2^2)`.
pub fn small_time_probability(delta_j: i64, tau: f64) -> f64 {
    let x = PI * delta_j as f64;
    let [i0, i2, i4] = [0, 2, 4].map(|m| i_function(m, x).expect("even order, finite x"));
    let pi4 = PI.powi(4);
    i0 * i0 - tau * tau * pi4 / 4.0 * (i0 * i4 - i2 * i2)
}

/// Largest time at which the quadratic return probability
/// `1 - pi^4 tau^2 / 45` is still nonnegative.
pub fn return_probability_bound() -> f64 {
    45f64.sqrt() / (PI * PI)
}

/// The Fresnel-integral form of the propagator, branch chosen by
/// `|dj| < pi tau`. Kept only as a cross-check of [`qubit_closed`].
///
/// Arguments are `sqrt(pi tau + 2S/pi +- 2 sqrt(2 tau S))`.
pub fn fresnel_branch(delta_j: f64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let action = delta_j * delta_j / (2.0 * tau);
    let base = PI * tau + 2.0 * action / PI;
    let cross = 2.0 * (2.0 * tau * action).sqrt();
    let plus = fresnel((base + cross).sqrt());
    let minus = fresnel((base - cross).max(0.0).sqrt());
    let sign = if delta_j.abs() < PI * tau { 1.0 } else { -1.0 };
    let bracket = Complex64::new(plus.c + sign * minus.c, -(plus.s + sign * minus.s));
    Ok(Complex64::from_polar(1.0, action) * bracket / (2.0 * (PI * tau).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightconeRow {
    pub delta_j: i64,
    pub value: Complex64,
    pub modulus: f64,
    /// Line-limit plateau `1/sqrt(2 pi tau)`.
    pub uniform: f64,
    /// `|dj| <= pi tau`.
    pub inside: bool,
    /// `arg D - dj^2/(2 tau)`, wrapped to `(-pi, pi]`.
    pub phase_minus_action: f64,
}

pub fn lightcone_profile(tau: f64, dj_max: i64) -> Result<Vec<LightconeRow>> {
    if !(tau >= 1.0 && tau.is_finite()) {
        return Err(Error::Precondition(format!(
            "light-cone profile needs tau >= 1, got {tau}"
        )));
    }
    let uniform = 1.0 / (2.0 * PI * tau).sqrt();
    (-dj_max..=dj_max)
        .into_par_iter()
        .map(|dj| {
            let value = qubit_closed(dj as f64, tau)?;
            let dj_f = dj as f64;
            let unwound = value * Complex64::from_polar(1.0, -dj_f * dj_f / (2.0 * tau));
            Ok(LightconeRow {
                delta_j: dj,
                value,
                modulus: value.norm(),
                uniform,
                inside: dj_f.abs() <= PI * tau,
                phase_minus_action: unwound.arg(),
            })
        })
        .collect()
}
