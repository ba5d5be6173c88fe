//! Centered position and momentum lattices and the unitary DFT between them.
//!
//! Sites carry labels `J` in `{-N/2, ..., N/2-1}` and are stored at array
//! index `J + N/2`; momenta `M` use the same centering. The transform is
//!
//! ```text
//! F_M = (1/sqrt N) sum_J f_J exp(-i 2 pi M J / N)
//! ```
//!
//! and its inverse carries the opposite sign with the same normalization.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count accepted by [`Grid::from_qubits`].
pub const MAX_QUBITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_sites: usize,
    length: f64,
}

impl Grid {
    pub fn new(n_sites: usize) -> Result<Self> {
        Self::with_length(n_sites, 1.0)
    }

    pub fn with_length(n_sites: usize, length: f64) -> Result<Self> {
        if n_sites < 2 || n_sites % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "number of sites must be even and >= 2, got {n_sites}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { n_sites, length })
    }

    /// `N = 2^n` sites.
    pub fn from_qubits(n_qubits: u32) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidGrid(format!(
                "qubit count must lie in [1, {MAX_QUBITS}], got {n_qubits}"
            )));
        }
        Self::new(1usize << n_qubits)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_sites as f64
    }

    pub fn half(&self) -> i64 {
        (self.n_sites / 2) as i64
    }

    pub fn j_min(&self) -> i64 {
        -self.half()
    }

    pub fn j_max(&self) -> i64 {
        self.half() - 1
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> {
        self.j_min()..=self.j_max()
    }

    pub fn index_of(&self, j: i64) -> usize {
        (j.rem_euclid(self.n_sites as i64) + self.half()).rem_euclid(self.n_sites as i64) as usize
    }

    pub fn label_of(&self, index: usize) -> i64 {
        index as i64 - self.half()
    }

    /// Dimensionless position `xi = x/L = J/N`.
    pub fn xi(&self, j: i64) -> f64 {
        j as f64 / self.n_sites as f64
    }

    pub fn x(&self, j: i64) -> f64 {
        self.length * self.xi(j)
    }

    pub fn is_power_of_two(&self) -> bool {
        self.n_sites.is_power_of_two()
    }
}

/// Bijection between FFT bins `k in {0, ..., N-1}` and centered momenta `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumIndexMap {
    grid: Grid,
}

impl MomentumIndexMap {
    pub fn new(grid: Grid) -> Self {
        Self { grid }
    }

    pub fn momentum(&self, k: usize) -> i64 {
        let n = self.grid.n_sites as i64;
        let k = k as i64 % n;
        if k >= n / 2 {
            k - n
        } else {
            k
        }
    }

    pub fn bin(&self, m: i64) -> usize {
        m.rem_euclid(self.grid.n_sites as i64) as usize
    }

    /// Adimensional momentum `kappa L = 2 pi M`.
    pub fn wavenumber(&self, m: i64) -> f64 {
        2.0 * PI * m as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Position,
    Momentum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    amps: Vec<Complex64>,
    basis: Basis,
    normalized: bool,
}

impl Wavefunction {
    /// Raw constructor; the data is kept as given and flagged as normalized
    /// only if its norm is already 1 to 1e-12.
    pub fn from_amplitudes(grid: Grid, amps: Vec<Complex64>, basis: Basis) -> Result<Self> {
        check_len(&grid, amps.len())?;
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Domain("non-finite amplitude".into()));
        }
        let normalized = (norm_sqr(&amps) - 1.0).abs() <= 1e-12;
        Ok(Self {
            grid,
            amps,
            basis,
            normalized,
        })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(grid: Grid, amps: Vec<Complex64>, basis: Basis) -> Result<Self> {
        let mut psi = Self::from_amplitudes(grid, amps, basis)?;
        let n = norm_sqr(&psi.amps).sqrt();
        if !(n > 0.0) {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        psi.amps.iter_mut().for_each(|a| *a /= n);
        psi.normalized = true;
        Ok(psi)
    }

    /// Site delta at label `j`.
    pub fn delta(grid: Grid, j: i64) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); grid.n_sites()];
        amps[grid.index_of(j)] = Complex64::new(1.0, 0.0);
        Self {
            grid,
            amps,
            basis: Basis::Position,
            normalized: true,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    /// Amplitude at centered label `j`.
    pub fn at(&self, j: i64) -> Complex64 {
        self.amps[self.grid.index_of(j)]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn replace_amps(&self, amps: Vec<Complex64>, basis: Basis) -> Self {
        debug_assert_eq!(amps.len(), self.amps.len());
        Self {
            grid: self.grid,
            amps,
            basis,
            normalized: self.normalized,
        }
    }

    /// Writes `J, x_over_L, re, im, prob` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "J,x_over_L,re,im,prob")?;
        for (i, a) in self.amps.iter().enumerate() {
            let j = self.grid.label_of(i);
            writeln!(
                out,
                "{},{},{},{},{}",
                j,
                self.grid.xi(j),
                a.re,
                a.im,
                a.norm_sqr()
            )?;
        }
        Ok(())
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn check_len(grid: &Grid, got: usize) -> Result<()> {
    if got != grid.n_sites() {
        return Err(Error::LengthMismatch {
            expected: grid.n_sites(),
            got,
        });
    }
    Ok(())
}

pub fn dft_forward(psi: &Wavefunction) -> Result<Wavefunction> {
    let out = dft_centered(psi.grid(), psi.amps(), Direction::Forward)?;
    Ok(psi.replace_amps(out, Basis::Momentum))
}

pub fn dft_inverse(psi: &Wavefunction) -> Result<Wavefunction> {
    let out = dft_centered(psi.grid(), psi.amps(), Direction::Inverse)?;
    Ok(psi.replace_amps(out, Basis::Position))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `exp(-i 2 pi M J / N)`
    Forward,
    /// `exp(+i 2 pi M J / N)`
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Unitary centered transform of a raw slice; radix-2 for power-of-two
/// lengths, direct summation otherwise.
pub fn dft_centered(grid: &Grid, input: &[Complex64], dir: Direction) -> Result<Vec<Complex64>> {
    check_len(grid, input.len())?;
    if !grid.is_power_of_two() {
        return dft_direct(grid, input, dir);
    }
    // shifting both labels by N/2 turns the centered sum into a plain DFT
    // times (-1)^label on the output side
    let n = input.len();
    let mut buf = input.to_vec();
    fft_in_place(&mut buf, dir);
    let scale = 1.0 / (n as f64).sqrt();
    let half = n / 2;
    let out = (0..n)
        .map(|b| {
            let label = b as i64 - half as i64;
            let v = buf[label.rem_euclid(n as i64) as usize] * scale;
            if label % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    Ok(out)
}

/// O(N^2) summation with every phase reduced exactly modulo N.
pub fn dft_direct(grid: &Grid, input: &[Complex64], dir: Direction) -> Result<Vec<Complex64>> {
    check_len(grid, input.len())?;
    let n = grid.n_sites() as i64;
    let table: Vec<Complex64> = (0..n)
        .map(|r| Complex64::from_polar(1.0, dir.sign() * 2.0 * PI * r as f64 / n as f64))
        .collect();
    let scale = 1.0 / (n as f64).sqrt();
    let out = grid
        .labels()
        .map(|m| {
            let s: Complex64 = grid
                .labels()
                .zip(input)
                .map(|(j, f)| f * table[(m * j).rem_euclid(n) as usize])
                .sum();
            s * scale
        })
        .collect();
    Ok(out)
}

/// Unnormalized iterative radix-2 transform, natural order in and out.
fn fft_in_place(buf: &mut [Complex64], dir: Direction) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let r = i.reverse_bits() >> (usize::BITS - bits);
        if i < r {
            buf.swap(i, r);
        }
    }
    // twiddles taken directly from the angle, no recurrence drift
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, dir.sign() * 2.0 * PI * k as f64 / n as f64))
        .collect();
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let stride = n / size;
        for start in (0..n).step_by(size) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        size *= 2;
    }
}
