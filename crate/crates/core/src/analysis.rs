//! Observables derived from evolution records and propagator sweeps:
//! probability-maximum trajectories, phase maps and semi-classical
//! comparisons.

use crate::error::{Error, Result};
use crate::evolution::EvolutionRecord;
use crate::lattice::{Grid, Wavefunction};
use crate::propagator::{direct_propagator_rational, RationalTime};

/// Densities within this relative distance of the maximum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Amplitudes at or below this modulus have no defined phase.
pub const ZERO_AMPLITUDE: f64 = 1e-12;

/// Upper end of the early-time window for semi-classical checks.
pub const SEMICLASSICAL_WINDOW: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub taus: Vec<f64>,
    pub j_max: Vec<i64>,
    pub xi_max: Vec<f64>,
    pub prob_max: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,xi_max,prob_max")?;
        for i in 0..self.len() {
            writeln!(out, "{},{},{}", self.taus[i], self.xi_max[i], self.prob_max[i])?;
        }
        Ok(())
    }
}

/// Site of maximal density. Near-ties go to the smallest `|J|`, then to the
/// negative side.
pub fn argmax_site(psi: &Wavefunction) -> (i64, f64) {
    let g = psi.grid();
    let prob = psi.probabilities();
    let top = prob.iter().copied().fold(0.0, f64::max);
    let mut best: Option<(i64, f64)> = None;
    for (i, &p) in prob.iter().enumerate() {
        if p < top * (1.0 - TIE_TOLERANCE) {
            continue;
        }
        let j = g.label_of(i);
        best = match best {
            Some((bj, bp)) if (bj.abs(), bj) <= (j.abs(), j) => Some((bj, bp)),
            _ => Some((j, p)),
        };
    }
    best.expect("grids have at least two sites")
}

pub fn probability_max(record: &EvolutionRecord) -> Result<Trajectory> {
    if record.is_empty() {
        return Err(Error::Precondition("evolution record has no snapshots".into()));
    }
    let mut traj = Trajectory {
        taus: Vec::with_capacity(record.len()),
        j_max: Vec::with_capacity(record.len()),
        xi_max: Vec::with_capacity(record.len()),
        prob_max: Vec::with_capacity(record.len()),
    };
    for (&t, psi) in record.times.iter().zip(&record.states) {
        let (j, p) = argmax_site(psi);
        traj.taus.push(t);
        traj.j_max.push(j);
        traj.xi_max.push(psi.grid().xi(j));
        traj.prob_max.push(p);
    }
    Ok(traj)
}

/// Distance on the unit circle, in `[0, 1/2]`.
pub fn wrapped_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `max |xi_max(t) - slope * t|` (wrapped) over `0 <= t <= window`.
pub fn trajectory_deviation(traj: &Trajectory, slope: f64, window: f64) -> Result<f64> {
    let mut worst: Option<f64> = None;
    for (&t, &xi) in traj.taus.iter().zip(&traj.xi_max) {
        if (0.0..=window).contains(&t) {
            let d = wrapped_distance(xi, slope * t);
            worst = Some(worst.map_or(d, |w: f64| w.max(d)));
        }
    }
    worst.ok_or_else(|| Error::EmptyWindow(format!("no snapshot with 0 <= t <= {window}")))
}

/// Deviation of the density maximum from the line `xi = M0 t / 2` over the
/// early window `t <= 0.05`.
pub fn semiclassical_deviation(traj: &Trajectory, m0: i64) -> Result<f64> {
    if m0 == 0 {
        return Err(Error::Precondition(
            "no semi-classical trajectory for M0 = 0".into(),
        ));
    }
    trajectory_deviation(traj, m0 as f64 / 2.0, SEMICLASSICAL_WINDOW)
}

/// Number of sign changes of the discrete velocity of `xi_max`, with
/// steps measured on the circle and zero steps skipped.
pub fn count_reversals(traj: &Trajectory) -> usize {
    let mut last_sign = 0.0;
    let mut count = 0;
    for w in traj.xi_max.windows(2) {
        let step = (w[1] - w[0] + 0.5).rem_euclid(1.0) - 0.5;
        if step == 0.0 {
            continue;
        }
        let s = step.signum();
        if last_sign != 0.0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}

/// `|arg|` per (time, position) cell; `None` where the amplitude vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub taus: Vec<f64>,
    pub xis: Vec<f64>,
    /// Signed principal phase in `(-pi, pi]`.
    pub arg: Vec<Vec<Option<f64>>>,
    /// `|arg|` in `[0, pi]`.
    pub phase: Vec<Vec<Option<f64>>>,
    pub prob: Vec<Vec<f64>>,
}

impl PhaseMap {
    fn from_rows(grid: &Grid, rows: Vec<(f64, Vec<num_complex::Complex64>)>) -> Self {
        let xis = grid.labels().map(|j| grid.xi(j)).collect();
        let mut map = PhaseMap {
            taus: Vec::with_capacity(rows.len()),
            xis,
            arg: Vec::with_capacity(rows.len()),
            phase: Vec::with_capacity(rows.len()),
            prob: Vec::with_capacity(rows.len()),
        };
        for (t, amps) in rows {
            let arg: Vec<Option<f64>> = amps
                .iter()
                .map(|a| (a.norm() > ZERO_AMPLITUDE).then(|| a.arg()))
                .collect();
            map.phase.push(arg.iter().map(|p| p.map(f64::abs)).collect());
            map.arg.push(arg);
            map.prob.push(amps.iter().map(|a| a.norm_sqr()).collect());
            map.taus.push(t);
        }
        map
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,xi,abs_phase,prob")?;
        for (r, t) in self.taus.iter().enumerate() {
            for (c, xi) in self.xis.iter().enumerate() {
                match self.phase[r][c] {
                    Some(p) => writeln!(out, "{},{},{},{}", t, xi, p, self.prob[r][c])?,
                    None => writeln!(out, "{},{},,{}", t, xi, self.prob[r][c])?,
                }
            }
        }
        Ok(())
    }
}

pub fn phase_map_from_record(record: &EvolutionRecord) -> Result<PhaseMap> {
    let grid = *record
        .grid()
        .ok_or_else(|| Error::Precondition("evolution record has no snapshots".into()))?;
    if record.states.iter().any(|s| s.grid().n_sites() != grid.n_sites()) {
        return Err(Error::Precondition("snapshots live on different grids".into()));
    }
    let rows = record
        .times
        .iter()
        .zip(&record.states)
        .map(|(&t, s)| (t, s.amps().to_vec()))
        .collect();
    Ok(PhaseMap::from_rows(&grid, rows))
}

/// Free-propagator phase from site 0 at each time `t`, indexed by the
/// displacement `xi = dJ / N`.
pub fn phase_map_from_propagator(grid: &Grid, times: &[RationalTime]) -> PhaseMap {
    let rows = times
        .iter()
        .map(|t| {
            let d = direct_propagator_rational(grid, t);
            let row = grid.labels().map(|dj| d.kernel_at(dj)).collect();
            (t.as_f64(), row)
        })
        .collect();
    PhaseMap::from_rows(grid, rows)
}
