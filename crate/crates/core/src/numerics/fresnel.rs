//! Fresnel integrals `C(x) = int_0^x cos(pi t^2/2) dt` and
//! `S(x) = int_0^x sin(pi t^2/2) dt`.
//!
//! Power series below [`SERIES_LIMIT`], continued fraction of the
//! asymptotic expansion (modified Lentz) above it.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

pub const SERIES_LIMIT: f64 = 1.5;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fresnel {
    pub c: f64,
    pub s: f64,
}

pub fn fresnel(x: f64) -> Fresnel {
    let ax = x.abs();
    let Fresnel { c, s } = if ax <= SERIES_LIMIT {
        fresnel_series(ax)
    } else {
        fresnel_continued_fraction(ax)
    };
    if x < 0.0 {
        Fresnel { c: -c, s: -s }
    } else {
        Fresnel { c, s }
    }
}

pub fn fresnel_c(x: f64) -> f64 {
    fresnel(x).c
}

pub fn fresnel_s(x: f64) -> f64 {
    fresnel(x).s
}

/// Leading-order large-argument form, `1/2 +- trig(pi x^2/2)/(pi x)`.
pub fn fresnel_leading_asymptotic(x: f64) -> Fresnel {
    let arg = FRAC_PI_2 * x * x;
    let scale = 1.0 / (PI * x);
    Fresnel {
        c: 0.5 + arg.sin() * scale,
        s: 0.5 - arg.cos() * scale,
    }
}

pub(crate) fn fresnel_series(x: f64) -> Fresnel {
    // term_k = x (pi x^2 / 2)^k / k!; even k feed C, odd k feed S
    let fact = FRAC_PI_2 * x * x;
    let mut term = x;
    let (mut c, mut s) = (x, 0.0);
    for k in 1..MAX_ITER {
        term *= fact / k as f64;
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        let contrib = signed / (2 * k + 1) as f64;
        if k % 2 == 0 {
            c += contrib;
        } else {
            s += contrib;
        }
        if term / ((2 * k + 1) as f64) < f64::EPSILON * c.abs().max(s.abs()) * 0.5 {
            break;
        }
    }
    Fresnel { c, s }
}

pub(crate) fn fresnel_continued_fraction(x: f64) -> Fresnel {
    let tiny = f64::MIN_POSITIVE;
    let big = f64::MAX * f64::EPSILON;
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(big, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        cc = b + a / cc;
        if cc.norm() < tiny {
            cc = Complex64::new(tiny, 0.0);
        }
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() <= f64::EPSILON {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let cs = Complex64::new(0.5, 0.5)
        * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 0.5 * pix2) * h);
    Fresnel { c: cs.re, s: cs.im }
}
