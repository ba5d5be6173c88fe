//! Lattice propagator `D(J', J) = <J'| exp(-i K t) |J>` stored as its
//! circulant kernel `D(dJ)`, `dJ = (J' - J) mod N`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Basis, Grid, Wavefunction};
use crate::numerics::gauss::unit_phase;

use super::displacement::{conjectured_phase, physical_displacements};
use super::time::{reduce_period, RationalTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorKind {
    /// Summed over all `N` lattice momenta.
    Direct,
    /// Built from the physical displacements and the conjectured phase.
    ExactRational,
    /// Product of other propagators.
    Composed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    grid: Grid,
    time: f64,
    rational: Option<RationalTime>,
    kernel: Vec<Complex64>,
    kind: PropagatorKind,
}

impl PropagatorMatrix {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn rational_time(&self) -> Option<RationalTime> {
        self.rational
    }

    pub fn kind(&self) -> PropagatorKind {
        self.kind
    }

    /// Kernel indexed by `dJ mod N`.
    pub fn kernel(&self) -> &[Complex64] {
        &self.kernel
    }

    pub fn kernel_at(&self, dj: i64) -> Complex64 {
        self.kernel[dj.rem_euclid(self.kernel.len() as i64) as usize]
    }

    /// Entry at arrival site `j_to`, departure site `j_from`.
    pub fn entry(&self, j_to: i64, j_from: i64) -> Complex64 {
        self.kernel_at(j_to - j_from)
    }

    /// Dense matrix, rows = arrival site, columns = departure site, both in
    /// centered order.
    pub fn dense(&self) -> Vec<Vec<Complex64>> {
        let g = self.grid;
        g.labels()
            .map(|jp| g.labels().map(|j| self.entry(jp, j)).collect())
            .collect()
    }

    /// `self * other`, i.e. evolve by `other` first.
    pub fn compose(&self, other: &PropagatorMatrix) -> Result<PropagatorMatrix> {
        if self.grid.n_sites() != other.grid.n_sites() {
            return Err(Error::LengthMismatch {
                expected: self.grid.n_sites(),
                got: other.grid.n_sites(),
            });
        }
        let n = self.kernel.len();
        let (a, b) = (&self.kernel, &other.kernel);
        let kernel = (0..n)
            .into_par_iter()
            .map(|d| (0..n).map(|e| a[e] * b[(d + n - e) % n]).sum())
            .collect();
        let rational = match (self.rational, other.rational) {
            (Some(x), Some(y)) => Some(x.checked_add(y)?),
            _ => None,
        };
        Ok(PropagatorMatrix {
            grid: self.grid,
            time: rational.map_or(reduce_period(self.time + other.time), |r| r.as_f64()),
            rational,
            kernel,
            kind: PropagatorKind::Composed,
        })
    }

    /// `self^k` by repeated squaring; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> Result<PropagatorMatrix> {
        let mut acc = identity(self.grid);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// `psi'(J') = sum_J D(J' - J) psi(J)`.
    pub fn apply(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        if psi.basis() != Basis::Position {
            return Err(Error::Precondition("propagator acts on position amplitudes".into()));
        }
        let g = *psi.grid();
        if g.n_sites() != self.grid.n_sites() {
            return Err(Error::LengthMismatch {
                expected: self.grid.n_sites(),
                got: g.n_sites(),
            });
        }
        let n = g.n_sites();
        let amps = psi.amps();
        let out = (0..n)
            .into_par_iter()
            .map(|row| {
                (0..n)
                    .map(|col| self.kernel[(row + n - col) % n] * amps[col])
                    .sum()
            })
            .collect();
        Wavefunction::from_amplitudes(g, out, Basis::Position)
    }

    /// Largest deviation of the row Gram matrix from the identity.
    ///
    /// For a circulant matrix the Gram entries depend only on the row
    /// offset, so this is `max_d |sum_e D(e) conj D(e + d) - delta_d0|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.kernel.len();
        let k = &self.kernel;
        (0..n)
            .into_par_iter()
            .map(|d| {
                let s: Complex64 = (0..n).map(|e| k[e] * k[(e + d) % n].conj()).sum();
                let want = if d == 0 { 1.0 } else { 0.0 };
                (s - want).norm()
            })
            .reduce(|| 0.0, f64::max)
    }
}

fn identity(grid: Grid) -> PropagatorMatrix {
    let mut kernel = vec![Complex64::new(0.0, 0.0); grid.n_sites()];
    kernel[0] = Complex64::new(1.0, 0.0);
    PropagatorMatrix {
        grid,
        time: 0.0,
        rational: Some(RationalTime::zero()),
        kernel,
        kind: PropagatorKind::Composed,
    }
}

/// `exp(-i pi M^2 t)` for `M = -N/2 .. N/2-1`, with `M^2 t` reduced
/// modulo 2 before the trig call.
fn kinetic_phases_real(grid: &Grid, tau: f64) -> Vec<Complex64> {
    grid.labels()
        .map(|m| {
            let m2 = (m * m) as f64;
            // exact split of m2 * tau into hi + lo
            let hi = m2 * tau;
            let lo = m2.mul_add(tau, -hi);
            let frac = hi.rem_euclid(2.0) + lo;
            Complex64::from_polar(1.0, -PI * frac)
        })
        .collect()
}

fn kinetic_phases_rational(grid: &Grid, t: &RationalTime) -> Vec<Complex64> {
    let (p, q) = (t.p() as i128, t.q() as i128);
    grid.labels()
        .map(|m| {
            let m = m as i128;
            // -pi M^2 p / q = 2 pi (-M^2 p) / (2q)
            unit_phase(-m * m * p, 2 * q)
        })
        .collect()
}

/// `(1/N) sum_M a_M exp(i 2 pi M dJ / N)` for every `dJ mod N`.
fn kernel_from_momentum_phases(grid: &Grid, a: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n_sites() as i64;
    let table: Vec<Complex64> = (0..n)
        .map(|r| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64))
        .collect();
    let labels: Vec<i64> = grid.labels().collect();
    (0..n)
        .into_par_iter()
        .map(|d| {
            let s: Complex64 = labels
                .iter()
                .zip(a)
                .map(|(&m, am)| am * table[(m * d).rem_euclid(n) as usize])
                .sum();
            s / n as f64
        })
        .collect()
}

/// Direct summation over the `N` lattice momenta at a real time.
pub fn direct_propagator(grid: &Grid, tau: f64) -> PropagatorMatrix {
    let tau = reduce_period(tau);
    let a = kinetic_phases_real(grid, tau);
    PropagatorMatrix {
        grid: *grid,
        time: tau,
        rational: None,
        kernel: kernel_from_momentum_phases(grid, &a),
        kind: PropagatorKind::Direct,
    }
}

/// Direct summation with the kinetic phases reduced exactly in integers.
pub fn direct_propagator_rational(grid: &Grid, t: &RationalTime) -> PropagatorMatrix {
    let t = t.reduce();
    let a = kinetic_phases_rational(grid, &t);
    PropagatorMatrix {
        grid: *grid,
        time: t.as_f64(),
        rational: Some(t),
        kernel: kernel_from_momentum_phases(grid, &a),
        kind: PropagatorKind::Direct,
    }
}

/// Closed form at `t = 1/q`, `q | N`: modulus `1/sqrt(q)` on the `q`
/// physical displacements, conjectured phase there, zero elsewhere.
pub fn exact_propagator(grid: &Grid, t: &RationalTime) -> Result<PropagatorMatrix> {
    let (p, q) = t.lowest_terms();
    // t = 1 and t = -1 are the same point of the period
    if p != 1 && (p, q) != (-1, 1) {
        return Err(Error::Precondition(format!(
            "closed form needs t = 1/q, got {t}"
        )));
    }
    let n = grid.n_sites();
    if n as i64 % q != 0 {
        return Err(Error::NotDivisor { q, n });
    }
    let reduced = t.reduce();
    let set = physical_displacements(&reduced)?;
    let mut kernel = vec![Complex64::new(0.0, 0.0); n];
    for &d in &set.physical {
        // q | N and N even, so every physical displacement lands on a site
        let dj = d * Rational64::from_integer(n as i64);
        debug_assert!(dj.is_integer());
        let phase = conjectured_phase(d, &reduced)?;
        kernel[dj.to_integer().rem_euclid(n as i64) as usize] =
            Complex64::from_polar(set.amplitude, phase);
    }
    Ok(PropagatorMatrix {
        grid: *grid,
        time: reduced.as_f64(),
        rational: Some(reduced),
        kernel,
        kind: PropagatorKind::ExactRational,
    })
}

/// Mixed propagator `<J'| exp(-i K t) |x>` for every arrival site, with
/// `x` in units of `L`; carries the dimension of `1/sqrt(length)`.
pub fn mixed_propagator(grid: &Grid, t: &RationalTime, x_over_l: f64) -> Vec<Complex64> {
    let a = kinetic_phases_rational(grid, &t.reduce());
    let n = grid.n_sites() as f64;
    let scale = 1.0 / (grid.length() * n).sqrt();
    grid.labels()
        .map(|jp| {
            let s: Complex64 = grid
                .labels()
                .zip(&a)
                .map(|(m, am)| {
                    let arg = (m as f64 * (jp as f64 / n - x_over_l)).rem_euclid(1.0);
                    am * Complex64::from_polar(1.0, 2.0 * PI * arg)
                })
                .sum();
            s * scale
        })
        .collect()
}

/// Peak of the mixed propagator from `x = 0` at `t = 1/q`, divided by
/// `sqrt(N / (L q))`, for each `N`.
pub fn peak_scaling_check(q: i64, n_list: &[usize], length: f64) -> Result<Vec<(usize, f64)>> {
    let t = RationalTime::reduced(1, q)?;
    n_list
        .iter()
        .map(|&n| {
            if n as i64 % q != 0 {
                return Err(Error::NotDivisor { q, n });
            }
            let grid = Grid::with_length(n, length)?;
            let peak = mixed_propagator(&grid, &t, 0.0)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            Ok((n, peak / (n as f64 / (length * q as f64)).sqrt()))
        })
        .collect()
}
