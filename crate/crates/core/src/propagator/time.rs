use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::numerics::gauss::MAX_DENOMINATOR;

/// Simulation time `p/q` held as exact integers.
///
/// `reduced` is set once `gcd(p, q) = 1` and `p/q` has been mapped into the
/// fundamental period `[-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalTime {
    p: i64,
    q: i64,
    reduced: bool,
}

impl RationalTime {
    /// Stores `p/q` as given.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 || q > MAX_DENOMINATOR {
            return Err(Error::Domain(format!("denominator must lie in [1, 2^31], got {q}")));
        }
        if p.unsigned_abs() > (MAX_DENOMINATOR as u64) * 4 {
            return Err(Error::Domain(format!("numerator {p} too large")));
        }
        let mut t = Self { p, q, reduced: false };
        t.reduced = t.is_canonical();
        Ok(t)
    }

    /// `p/q` brought to lowest terms and into `[-1, 1)`.
    pub fn reduced(p: i64, q: i64) -> Result<Self> {
        Ok(Self::new(p, q)?.reduce())
    }

    pub fn from_ratio(r: Rational64) -> Result<Self> {
        Self::reduced(*r.numer(), *r.denom())
    }

    pub fn zero() -> Self {
        Self { p: 0, q: 1, reduced: true }
    }

    pub fn reduce(self) -> Self {
        let (p, q) = self.lowest_terms();
        // period 2: p/q -> p/q - 2k with the result in [-1, 1)
        let p = (p + q).rem_euclid(2 * q) - q;
        Self { p, q, reduced: true }
    }

    /// `gcd`-reduced `(p, q)` without the period shift.
    pub fn lowest_terms(&self) -> (i64, i64) {
        let g = self.p.gcd(&self.q);
        (self.p / g, self.q / g)
    }

    fn is_canonical(&self) -> bool {
        self.p.gcd(&self.q) == 1 && -self.q <= self.p && self.p < self.q
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn as_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn as_ratio(&self) -> Rational64 {
        Rational64::new(self.p, self.q)
    }

    /// Sum reduced into the fundamental period; errors if the common
    /// denominator leaves the supported range.
    pub fn checked_add(self, other: Self) -> Result<Self> {
        Self::from_ratio(self.as_ratio() + other.as_ratio())
    }

    /// Sign of `p/q` after period reduction (0 for `t = 0`).
    pub fn signum(&self) -> i64 {
        self.reduce().p.signum()
    }
}

impl std::ops::Neg for RationalTime {
    type Output = Self;

    fn neg(self) -> Self {
        Self::reduced(-self.p, self.q).expect("negation keeps the denominator")
    }
}

impl fmt::Display for RationalTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Maps a real time into the fundamental period `[-1, 1)`.
pub fn reduce_period(tau: f64) -> f64 {
    let r = (tau + 1.0).rem_euclid(2.0) - 1.0;
    if r >= 1.0 {
        r - 2.0
    } else {
        r
    }
}
