//! Wave packets, potentials and split-step evolution on the circle.
//!
//! One step of length `eps` multiplies by `exp(-i u_J eps)` in position
//! space and by `exp(-i pi M^2 eps)` in momentum space. With `eps` a
//! multiple of `1/N` the kinetic phase is reduced exactly in integers, so a
//! potential-free run reproduces free propagation with no splitting error.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{dft_centered, Basis, Direction, Grid, Wavefunction};
use crate::numerics::gauss::unit_phase;
use crate::propagator::{reduce_period, RationalTime};

/// Residual `|1 - ||psi||^2|` above which a run is aborted.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams {
    /// Center `x0 / L` in `[-1/2, 1/2)`.
    pub x0_over_l: f64,
    /// Peak momentum index, `kappa0 = 2 pi M0 / L`.
    pub m0: i64,
    /// Width parameter `sigma L`.
    pub sigma_l: f64,
}

impl PacketParams {
    pub fn new(x0_over_l: f64, m0: i64, sigma_l: f64) -> Result<Self> {
        if !(sigma_l > 0.0 && sigma_l.is_finite()) {
            return Err(Error::Domain(format!("sigma_L must be positive, got {sigma_l}")));
        }
        if !(-0.5..0.5).contains(&x0_over_l) {
            return Err(Error::Domain(format!(
                "x0/L must lie in [-1/2, 1/2), got {x0_over_l}"
            )));
        }
        Ok(Self {
            x0_over_l,
            m0,
            sigma_l,
        })
    }
}

/// Unnormalized Gaussian weights `exp(-2 pi^2 (M - M0)^2 / (sigma L)^2)`
/// with the translation phase `exp(-i 2 pi M x0/L)`, in centered order.
pub fn packet_momentum_weights(grid: &Grid, params: &PacketParams) -> Result<Vec<Complex64>> {
    if params.m0 < grid.j_min() || params.m0 > grid.j_max() {
        return Err(Error::Domain(format!(
            "M0 = {} outside the lattice momenta [{}, {}]",
            params.m0,
            grid.j_min(),
            grid.j_max()
        )));
    }
    let s2 = params.sigma_l * params.sigma_l;
    Ok(grid
        .labels()
        .map(|m| {
            let dm = (m - params.m0) as f64;
            let weight = (-2.0 * PI * PI * dm * dm / s2).exp();
            let arg = (m as f64 * params.x0_over_l).rem_euclid(1.0);
            Complex64::from_polar(weight, -2.0 * PI * arg)
        })
        .collect())
}

/// Normalized packet in momentum space.
pub fn packet_momentum(grid: &Grid, params: &PacketParams) -> Result<Wavefunction> {
    Wavefunction::normalized(*grid, packet_momentum_weights(grid, params)?, Basis::Momentum)
}

/// Normalized packet in position space.
pub fn build_packet(grid: &Grid, params: &PacketParams) -> Result<Wavefunction> {
    let mom = packet_momentum(grid, params)?;
    let amps = dft_centered(grid, mom.amps(), Direction::Inverse)?;
    Wavefunction::normalized(*grid, amps, Basis::Position)
}

/// Free packet at time `tau`: momentum weights times `exp(-i pi M^2 tau)`,
/// summed directly onto the sites (no FFT involved).
pub fn analytic_free_evolution(grid: &Grid, params: &PacketParams, tau: f64) -> Result<Wavefunction> {
    let mom = packet_momentum(grid, params)?;
    let tau = reduce_period(tau);
    let evolved: Vec<Complex64> = grid
        .labels()
        .zip(mom.amps())
        .map(|(m, a)| {
            let m2 = (m * m) as f64;
            let hi = m2 * tau;
            let lo = m2.mul_add(tau, -hi);
            a * Complex64::from_polar(1.0, -PI * (hi.rem_euclid(2.0) + lo))
        })
        .collect();
    let n = grid.n_sites() as i64;
    let table: Vec<Complex64> = (0..n)
        .map(|r| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64))
        .collect();
    let scale = 1.0 / (n as f64).sqrt();
    let amps = grid
        .labels()
        .map(|j| {
            let s: Complex64 = grid
                .labels()
                .zip(&evolved)
                .map(|(m, a)| a * table[(m * j).rem_euclid(n) as usize])
                .sum();
            s * scale
        })
        .collect();
    Wavefunction::from_amplitudes(*grid, amps, Basis::Position)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    None,
    Cosine,
    Random,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::None => "none",
            PotentialKind::Cosine => "cosine",
            PotentialKind::Random => "random",
        }
    }
}

/// Dimensionless potential `u_J` on the sites, in centered order.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub kind: PotentialKind,
    /// `max_J u_J * tau_step`.
    pub eta: f64,
    pub tau_step: f64,
    pub seed: Option<u64>,
}

impl PotentialGrid {
    pub fn at(&self, j: i64) -> f64 {
        self.u[self.grid.index_of(j)]
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }
}

fn check_scale(eta: f64, tau_step: f64) -> Result<()> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::Domain(format!("eta must be nonnegative, got {eta}")));
    }
    if !(tau_step > 0.0 && tau_step.is_finite()) {
        return Err(Error::Domain(format!("time step must be positive, got {tau_step}")));
    }
    Ok(())
}

pub fn zero_potential(grid: &Grid) -> PotentialGrid {
    PotentialGrid {
        grid: *grid,
        u: vec![0.0; grid.n_sites()],
        kind: PotentialKind::None,
        eta: 0.0,
        tau_step: 0.0,
        seed: None,
    }
}

/// `u_J = A (1 - cos(2 pi J / N))`, maximal at `J = -N/2`, with
/// `A = eta / (2 tau_step)` so that `max u * tau_step = eta`.
pub fn cosine_potential(grid: &Grid, eta: f64, tau_step: f64) -> Result<PotentialGrid> {
    check_scale(eta, tau_step)?;
    let amp = eta / (2.0 * tau_step);
    let n = grid.n_sites() as f64;
    let u = grid
        .labels()
        .map(|j| amp * (1.0 - (2.0 * PI * j as f64 / n).cos()))
        .collect();
    Ok(PotentialGrid {
        grid: *grid,
        u,
        kind: PotentialKind::Cosine,
        eta,
        tau_step,
        seed: None,
    })
}

/// Uniform values on `[0, eta/tau_step]`, rescaled so the largest equals
/// `eta/tau_step`. Draws come from ChaCha8 seeded with `seed_from_u64`,
/// one `u64` per site in centered order, mapped to `[0, 1)` by
/// `(x >> 11) * 2^-53`.
pub fn random_potential(grid: &Grid, eta: f64, tau_step: f64, seed: u64) -> Result<PotentialGrid> {
    check_scale(eta, tau_step)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..grid.n_sites())
        .map(|_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
        .collect();
    let top = raw.iter().copied().fold(0.0, f64::max);
    let u_max = eta / tau_step;
    let u = if top > 0.0 && u_max > 0.0 {
        raw.iter()
            .map(|&r| if r == top { u_max } else { u_max * (r / top) })
            .collect()
    } else {
        vec![0.0; grid.n_sites()]
    };
    Ok(PotentialGrid {
        grid: *grid,
        u,
        kind: PotentialKind::Random,
        eta,
        tau_step,
        seed: Some(seed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrotterOrder {
    /// `exp(-i K eps) exp(-i U eps)`: potential applied first.
    PotentialFirst,
    KineticFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitStepConfig {
    /// Step `eps`; its denominator must divide `N`.
    pub tau_step: RationalTime,
    pub n_steps: u64,
    /// Snapshot every `stride` steps (the final step is always kept).
    pub stride: u64,
    pub order: TrotterOrder,
}

impl SplitStepConfig {
    pub fn new(tau_step: RationalTime, n_steps: u64) -> Self {
        Self {
            tau_step,
            n_steps,
            stride: 1,
            order: TrotterOrder::PotentialFirst,
        }
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_order(mut self, order: TrotterOrder) -> Self {
        self.order = order;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRecord {
    pub tau_step: RationalTime,
    pub steps: Vec<u64>,
    pub times: Vec<f64>,
    pub states: Vec<Wavefunction>,
    pub conservation_residuals: Vec<f64>,
}

impl EvolutionRecord {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.states.first().map(|s| s.grid())
    }

    /// Rows `t, J, xi, re, im, prob` with a header line.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,J,xi,re,im,prob")?;
        for (t, psi) in self.times.iter().zip(&self.states) {
            let g = psi.grid();
            for (i, a) in psi.amps().iter().enumerate() {
                let j = g.label_of(i);
                writeln!(out, "{},{},{},{},{},{}", t, j, g.xi(j), a.re, a.im, a.norm_sqr())?;
            }
        }
        Ok(())
    }
}

/// Multiples of the step of `tau_step = p/q` (lowest terms) are exact on
/// the lattice only when `q | N`.
fn step_multiple(grid: &Grid, tau_step: &RationalTime) -> Result<i64> {
    let (p, q) = tau_step.lowest_terms();
    let n = grid.n_sites() as i64;
    if p <= 0 || n % q != 0 {
        return Err(Error::Precondition(format!(
            "time step {tau_step} must be a positive multiple of 1/{n}"
        )));
    }
    Ok(p * (n / q))
}

pub fn split_step(
    psi: &Wavefunction,
    pot: &PotentialGrid,
    config: &SplitStepConfig,
) -> Result<EvolutionRecord> {
    let grid = *psi.grid();
    if psi.basis() != Basis::Position {
        return Err(Error::Precondition("split_step starts from position amplitudes".into()));
    }
    if pot.grid.n_sites() != grid.n_sites() {
        return Err(Error::LengthMismatch {
            expected: grid.n_sites(),
            got: pot.grid.n_sites(),
        });
    }
    if config.stride == 0 {
        return Err(Error::Precondition("stride must be at least 1".into()));
    }
    let k = step_multiple(&grid, &config.tau_step)?;
    let eps = config.tau_step.as_f64();
    if pot.kind != PotentialKind::None && (pot.tau_step - eps).abs() > 1e-15 * eps {
        return Err(Error::Precondition(format!(
            "potential was scaled for step {} but the run uses {eps}",
            pot.tau_step
        )));
    }

    let n = grid.n_sites() as i128;
    // exp(-i pi M^2 k / N) = exp(i 2 pi (-M^2 k) / (2N))
    let kinetic: Vec<Complex64> = grid
        .labels()
        .map(|m| unit_phase(-(m as i128) * (m as i128) * k as i128, 2 * n))
        .collect();
    let potential: Vec<Complex64> = pot
        .u
        .iter()
        .map(|&u| {
            let phi = (u * eps).rem_euclid(2.0 * PI);
            Complex64::from_polar(1.0, -phi)
        })
        .collect();

    let mut state = psi.amps().to_vec();
    let mut record = EvolutionRecord {
        tau_step: config.tau_step,
        steps: Vec::new(),
        times: Vec::new(),
        states: Vec::new(),
        conservation_residuals: Vec::new(),
    };
    let initial_norm = psi.norm_sqr();
    let time_of = |step: u64| step as f64 * eps;
    let push = |record: &mut EvolutionRecord, step: u64, amps: &[Complex64]| -> Result<()> {
        let w = Wavefunction::from_amplitudes(grid, amps.to_vec(), Basis::Position)?;
        record.steps.push(step);
        record.times.push(time_of(step));
        record.conservation_residuals.push((initial_norm - w.norm_sqr()).abs());
        record.states.push(w);
        Ok(())
    };
    push(&mut record, 0, &state)?;

    let apply_potential = |s: &mut [Complex64]| {
        s.iter_mut().zip(&potential).for_each(|(a, v)| *a *= v);
    };
    let apply_kinetic = |s: &mut Vec<Complex64>| -> Result<()> {
        let mut mom = dft_centered(&grid, s, Direction::Forward)?;
        mom.iter_mut().zip(&kinetic).for_each(|(a, v)| *a *= v);
        *s = dft_centered(&grid, &mom, Direction::Inverse)?;
        Ok(())
    };

    for step in 1..=config.n_steps {
        match config.order {
            TrotterOrder::PotentialFirst => {
                apply_potential(&mut state);
                apply_kinetic(&mut state)?;
            }
            TrotterOrder::KineticFirst => {
                apply_kinetic(&mut state)?;
                apply_potential(&mut state);
            }
        }
        let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        let residual = (initial_norm - norm).abs();
        if residual > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                step: step as usize,
                residual,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        if step % config.stride == 0 || step == config.n_steps {
            push(&mut record, step, &state)?;
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::dft_forward;
    use crate::numerics::theta::{theta, ThetaArgs};

    fn grid128() -> Grid {
        Grid::from_qubits(7).unwrap()
    }

    fn step(n: i64) -> RationalTime {
        RationalTime::reduced(1, n).unwrap()
    }

    fn max_density_diff(a: &Wavefunction, b: &Wavefunction) -> f64 {
        a.probabilities()
            .iter()
            .zip(b.probabilities())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn packet_shape() {
        let g = grid128();
        let p = PacketParams::new(0.0, 0, 10.0).unwrap();
        let psi = build_packet(&g, &p).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let prob = psi.probabilities();
        let peak = (0..128).max_by(|&a, &b| prob[a].total_cmp(&prob[b])).unwrap();
        assert_eq!(g.label_of(peak), 0);
        for j in 1..64 {
            assert!((psi.at(j).norm_sqr() - psi.at(-j).norm_sqr()).abs() < 1e-15);
        }
        // shifted center
        let shifted = build_packet(&g, &PacketParams::new(-0.125, 0, 10.0).unwrap()).unwrap();
        let prob = shifted.probabilities();
        let peak = (0..128).max_by(|&a, &b| prob[a].total_cmp(&prob[b])).unwrap();
        assert_eq!(g.label_of(peak), -16);
    }

    #[test]
    fn narrow_momentum_limit_is_flat() {
        let g = Grid::new(16).unwrap();
        let psi = build_packet(&g, &PacketParams::new(0.0, 0, 1e-3).unwrap()).unwrap();
        for a in psi.amps() {
            assert!((a.norm_sqr() - 1.0 / 16.0).abs() < 1e-15);
        }
        assert!(build_packet(&g, &PacketParams::new(0.0, 8, 1.0).unwrap()).is_err());
        assert!(PacketParams::new(0.5, 0, 1.0).is_err());
        assert!(PacketParams::new(0.0, 0, 0.0).is_err());
    }

    #[test]
    fn theta_normalization_cross_check() {
        let g = grid128();
        for (m0, sl) in [(0, 5.0), (1, 10.0), (-3, 7.5), (2, 20.0)] {
            let p = PacketParams::new(0.1, m0, sl).unwrap();
            let w = packet_momentum_weights(&g, &p).unwrap();
            let total: f64 = w.iter().map(|a| a.norm_sqr()).sum();
            let tau = Complex64::new(0.0, -4.0 * PI / (sl * sl));
            let th = theta(&ThetaArgs::new(0.0, tau, 1e-16)).unwrap().value;
            assert!((total - th.re).abs() < 1e-12 * th.re, "M0={m0} sL={sl}");
        }
    }

    #[test]
    fn potentials() {
        let g = grid128();
        let eps = 1.0 / 128.0;
        let cos = cosine_potential(&g, 0.75, eps).unwrap();
        assert_eq!(cos.at(0), 0.0);
        assert!((cos.max() * eps - 0.75).abs() < 1e-15);
        for j in 1..64 {
            assert!((cos.at(j) - cos.at(-j)).abs() < 1e-12);
        }
        let a = random_potential(&g, 0.75, eps, 42).unwrap();
        let b = random_potential(&g, 0.75, eps, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.max() * eps, 0.75);
        assert!(a.u.iter().all(|&u| (0.0..=0.75 / eps).contains(&u)));
        let c = random_potential(&g, 0.75, eps, 43).unwrap();
        assert_ne!(a.u, c.u);
        let zero = random_potential(&g, 0.0, eps, 42).unwrap();
        assert!(zero.u.iter().all(|&u| u == 0.0));
        assert!(cosine_potential(&g, -1.0, eps).is_err());
        assert!(cosine_potential(&g, 1.0, 0.0).is_err());
    }

    #[test]
    fn free_split_step_is_exact() {
        let g = grid128();
        let p = PacketParams::new(0.0, 0, 10.0).unwrap();
        let psi = build_packet(&g, &p).unwrap();
        let rec = split_step(&psi, &zero_potential(&g), &SplitStepConfig::new(step(128), 64)).unwrap();
        for (t, s) in rec.times.iter().zip(&rec.states) {
            let exact = analytic_free_evolution(&g, &p, *t).unwrap();
            let d = s
                .amps()
                .iter()
                .zip(exact.amps())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(d < 1e-10, "t={t}: {d:e}");
        }
        assert!(rec.conservation_residuals.iter().all(|&r| r < 1e-10));
    }

    #[test]
    fn period_two_returns_initial_state() {
        let g = grid128();
        let p = PacketParams::new(0.2, 1, 10.0).unwrap();
        let psi = build_packet(&g, &p).unwrap();
        let cfg = SplitStepConfig::new(step(128), 256).with_stride(256);
        let rec = split_step(&psi, &zero_potential(&g), &cfg).unwrap();
        let last = rec.states.last().unwrap();
        let d = last
            .amps()
            .iter()
            .zip(psi.amps())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-10, "{d:e}");
        assert_eq!(rec.steps, vec![0, 256]);
        let back = analytic_free_evolution(&g, &p, 2.0).unwrap();
        assert!(max_density_diff(&back, &psi) < 1e-12);
    }

    #[test]
    fn zero_steps_is_identity_and_bad_steps_rejected() {
        let g = Grid::new(8).unwrap();
        let psi = build_packet(&g, &PacketParams::new(0.0, 1, 2.0).unwrap()).unwrap();
        let pot = cosine_potential(&g, 0.75, 0.125).unwrap();
        let rec = split_step(&psi, &pot, &SplitStepConfig::new(step(8), 0)).unwrap();
        assert_eq!(rec.states, vec![psi.clone()]);
        let bad = SplitStepConfig::new(RationalTime::reduced(1, 3).unwrap(), 1);
        assert!(split_step(&psi, &zero_potential(&g), &bad).is_err());
        let mismatched = SplitStepConfig::new(RationalTime::reduced(1, 4).unwrap(), 1);
        assert!(split_step(&psi, &pot, &mismatched).is_err());
        let ok_multiple = SplitStepConfig::new(RationalTime::reduced(3, 8).unwrap(), 2);
        assert!(split_step(&psi, &zero_potential(&g), &ok_multiple).is_ok());
    }

    #[test]
    fn ordering_flag_matters_only_with_potential() {
        let g = Grid::new(64).unwrap();
        let psi = build_packet(&g, &PacketParams::new(-0.125, 0, 8.0).unwrap()).unwrap();
        let pot = cosine_potential(&g, 0.75, 1.0 / 64.0).unwrap();
        let a = SplitStepConfig::new(step(64), 10);
        let b = a.with_order(TrotterOrder::KineticFirst);
        let ra = split_step(&psi, &pot, &a).unwrap();
        let rb = split_step(&psi, &pot, &b).unwrap();
        assert!(max_density_diff(ra.states.last().unwrap(), rb.states.last().unwrap()) > 1e-6);
        let fa = split_step(&psi, &zero_potential(&g), &a).unwrap();
        let fb = split_step(&psi, &zero_potential(&g), &b).unwrap();
        assert!(max_density_diff(fa.states.last().unwrap(), fb.states.last().unwrap()) < 1e-14);
        assert!(ra.conservation_residuals.iter().all(|&r| r < 1e-10));
    }

    #[test]
    fn momentum_density_is_conserved_by_free_motion() {
        let g = grid128();
        let p = PacketParams::new(0.0, 2, 10.0).unwrap();
        let m0 = dft_forward(&build_packet(&g, &p).unwrap()).unwrap();
        let mt = dft_forward(&analytic_free_evolution(&g, &p, 0.37).unwrap()).unwrap();
        assert!(max_density_diff(&m0, &mt) < 1e-14);
    }

    #[test]
    fn early_spreading_follows_line_variance() {
        // density variance (1 + beta^2) / (2 (sigma L)^2), beta = t (sigma L)^2 / (2 pi)
        let g = grid128();
        let sl = 10.0;
        let p = PacketParams::new(0.0, 0, sl).unwrap();
        for k in 0..=6 {
            let t = k as f64 / 128.0;
            let psi = analytic_free_evolution(&g, &p, t).unwrap();
            let var: f64 = g
                .labels()
                .map(|j| g.xi(j).powi(2) * psi.at(j).norm_sqr())
                .sum();
            let beta = t * sl * sl / (2.0 * PI);
            let line = (1.0 + beta * beta) / (2.0 * sl * sl);
            assert!((var / line - 1.0).abs() < 0.05, "t={t}: {var} vs {line}");
        }
    }
}
