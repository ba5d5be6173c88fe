use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;

use circprop::analysis::{
    count_reversals, phase_map_from_propagator, phase_map_from_record, probability_max, PhaseMap,
    ZERO_AMPLITUDE,
};
use circprop::evolution::{
    build_packet, cosine_potential, random_potential, split_step, zero_potential, EvolutionRecord,
    PacketParams, SplitStepConfig,
};
use circprop::lattice::{Grid, MAX_QUBITS};
use circprop::numerics::{gauss_sum_general, theta, ThetaArgs as ThetaInput};
use circprop::propagator::{direct_propagator_rational, exact_propagator, RationalTime};
use circprop::qubit::{
    direct_profile, lightcone_profile, qubit_closed, qubit_small_time,
};

use crate::table::{Cell, Table};
use crate::{
    Cli, CliError, Command, EvolveArgs, GaussSumArgs, PhaseMapArgs, PhaseSource, PotentialChoice,
    PropagatorArgs, PropagatorMode, QubitArgs, QubitMode, ThetaArgs,
};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn phase_of(z: Complex64) -> Cell {
    (z.norm() > ZERO_AMPLITUDE).then(|| z.arg()).into()
}

/// Flag checks that need no computation.
pub fn validate(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Propagator(a) => {
            if a.n_sites < 2 || a.n_sites % 2 != 0 {
                return Err(usage(format!("--n-sites must be even and >= 2, got {}", a.n_sites)));
            }
            if a.q < 1 {
                return Err(usage(format!("--q must be >= 1, got {}", a.q)));
            }
        }
        Command::Evolve(a) | Command::Trajectory(a) => validate_evolve(a, cli.seed)?,
        Command::PhaseMap(a) => validate_evolve(&a.evolve, cli.seed)?,
        Command::GaussSum(a) => {
            if a.q < 1 {
                return Err(usage(format!("--q must be >= 1, got {}", a.q)));
            }
            if matches!(a.q_max, Some(m) if m < a.q) {
                return Err(usage("--q-max must not be below --q"));
            }
            parse_fraction(&a.delta_xi)?;
        }
        Command::Theta(a) => {
            if !(a.tau_im < 0.0) {
                return Err(usage(format!("--tau-im must be negative, got {}", a.tau_im)));
            }
            if !(a.tol > 0.0) {
                return Err(usage(format!("--tol must be positive, got {}", a.tol)));
            }
        }
        Command::Qubit(a) => {
            if a.mode == QubitMode::Direct && (a.n_sites < 2 || a.n_sites % 2 != 0) {
                return Err(usage(format!("--n-sites must be even and >= 2, got {}", a.n_sites)));
            }
            if !a.tau.is_finite() {
                return Err(usage("--tau must be finite"));
            }
        }
    }
    Ok(())
}

fn validate_evolve(a: &EvolveArgs, seed: Option<u64>) -> Result<(), CliError> {
    if a.n_qubits < 1 || a.n_qubits > MAX_QUBITS {
        return Err(usage(format!("--n-qubits must lie in [1, {MAX_QUBITS}], got {}", a.n_qubits)));
    }
    if !(a.sigma_l > 0.0 && a.sigma_l.is_finite()) {
        return Err(usage(format!("--sigma-l must be positive, got {}", a.sigma_l)));
    }
    if !(-0.5..0.5).contains(&a.x0) {
        return Err(usage(format!("--x0 must lie in [-0.5, 0.5), got {}", a.x0)));
    }
    if a.potential != PotentialChoice::None && !(a.eta > 0.0 && a.eta.is_finite()) {
        return Err(usage(format!("--eta must be positive, got {}", a.eta)));
    }
    if a.potential == PotentialChoice::Random && seed.is_none() {
        return Err(usage("--potential random needs --seed"));
    }
    Ok(())
}

fn parse_fraction(s: &str) -> Result<Rational64, CliError> {
    s.trim()
        .parse::<Rational64>()
        .map_err(|_| usage(format!("cannot read '{s}' as a fraction such as 1/4")))
}

pub fn execute(cli: &Cli) -> Result<Table, CliError> {
    match &cli.command {
        Command::Propagator(a) => propagator(a),
        Command::Evolve(a) => {
            let record = evolve(a, cli.seed, cli.verbose)?;
            Ok(record_table(&record))
        }
        Command::PhaseMap(a) => phase_map(a, cli.seed, cli.verbose),
        Command::Trajectory(a) => trajectory(a, cli.seed, cli.verbose),
        Command::GaussSum(a) => gauss_sum(a),
        Command::Theta(a) => theta_table(a),
        Command::Qubit(a) => qubit(a),
    }
}

fn propagator(a: &PropagatorArgs) -> Result<Table, CliError> {
    let grid = Grid::new(a.n_sites)?;
    let t = RationalTime::reduced(a.p, a.q)?;
    let main = match a.mode {
        PropagatorMode::Direct => direct_propagator_rational(&grid, &t),
        PropagatorMode::Exact | PropagatorMode::Both => exact_propagator(&grid, &t)?,
    };
    let reference = (a.mode == PropagatorMode::Both).then(|| direct_propagator_rational(&grid, &t));
    let mut columns = vec!["dJ", "delta_xi", "abs", "phase"];
    if reference.is_some() {
        columns.extend(["abs_direct", "phase_direct"]);
    }
    let mut table = Table::new(&columns);
    for dj in grid.labels() {
        let z = main.kernel_at(dj);
        let mut row = vec![Cell::from(dj), grid.xi(dj).into(), z.norm().into(), phase_of(z)];
        if let Some(d) = &reference {
            let w = d.kernel_at(dj);
            row.extend([w.norm().into(), phase_of(w)]);
        }
        table.push(row);
    }
    Ok(table)
}

fn evolve(a: &EvolveArgs, seed: Option<u64>, verbose: bool) -> Result<EvolutionRecord, CliError> {
    let grid = Grid::from_qubits(a.n_qubits)?;
    let n = grid.n_sites() as i64;
    let step = RationalTime::reduced(1, n)?;
    let eps = step.as_f64();
    let pot = match a.potential {
        PotentialChoice::None => zero_potential(&grid),
        PotentialChoice::Cosine => cosine_potential(&grid, a.eta, eps)?,
        PotentialChoice::Random => {
            random_potential(&grid, a.eta, eps, seed.expect("checked by validate"))?
        }
    };
    let params = PacketParams::new(a.x0, a.m0, a.sigma_l)?;
    let psi = build_packet(&grid, &params)?;
    let config = SplitStepConfig::new(step, a.steps).with_stride(a.stride);
    let record = split_step(&psi, &pot, &config)?;
    if verbose {
        let worst = record.conservation_residuals.iter().copied().fold(0.0, f64::max);
        eprintln!(
            "evolved N={} for {} steps, {} snapshots, max norm residual {worst:e}",
            n,
            a.steps,
            record.len()
        );
    }
    Ok(record)
}

fn record_table(record: &EvolutionRecord) -> Table {
    let mut table = Table::new(&["t", "J", "xi", "re", "im", "prob"]);
    for (t, psi) in record.times.iter().zip(&record.states) {
        let g = psi.grid();
        for (i, z) in psi.amps().iter().enumerate() {
            let j = g.label_of(i);
            table.push(vec![
                (*t).into(),
                j.into(),
                g.xi(j).into(),
                z.re.into(),
                z.im.into(),
                z.norm_sqr().into(),
            ]);
        }
    }
    table
}

fn phase_map_table(map: &PhaseMap) -> Table {
    let mut table = Table::new(&["t", "xi", "abs_phase", "prob"]);
    for (r, t) in map.taus.iter().enumerate() {
        for (c, xi) in map.xis.iter().enumerate() {
            table.push(vec![
                (*t).into(),
                (*xi).into(),
                map.phase[r][c].into(),
                map.prob[r][c].into(),
            ]);
        }
    }
    table
}

fn phase_map(a: &PhaseMapArgs, seed: Option<u64>, verbose: bool) -> Result<Table, CliError> {
    let map = match a.source {
        PhaseSource::Packet => phase_map_from_record(&evolve(&a.evolve, seed, verbose)?)?,
        PhaseSource::Propagator => {
            let grid = Grid::from_qubits(a.evolve.n_qubits)?;
            let n = grid.n_sites() as i64;
            let stride = a.evolve.stride;
            let mut ks: Vec<u64> = (0..=a.evolve.steps).step_by(stride as usize).collect();
            if ks.last() != Some(&a.evolve.steps) {
                ks.push(a.evolve.steps);
            }
            let times = ks
                .iter()
                .map(|&k| RationalTime::new(k as i64, n))
                .collect::<circprop::Result<Vec<_>>>()?;
            phase_map_from_propagator(&grid, &times)
        }
    };
    Ok(phase_map_table(&map))
}

fn trajectory(a: &EvolveArgs, seed: Option<u64>, verbose: bool) -> Result<Table, CliError> {
    let traj = probability_max(&evolve(a, seed, verbose)?)?;
    if verbose {
        eprintln!("direction reversals of the maximum: {}", count_reversals(&traj));
    }
    let mut table = Table::new(&["t", "xi_max", "prob_max"]);
    for i in 0..traj.len() {
        table.push(vec![traj.taus[i].into(), traj.xi_max[i].into(), traj.prob_max[i].into()]);
    }
    Ok(table)
}

fn gauss_sum(a: &GaussSumArgs) -> Result<Table, CliError> {
    use num_integer::Integer;
    let dxi = parse_fraction(&a.delta_xi)?;
    let mut table = Table::new(&["p", "q", "delta_xi", "re", "im", "abs", "phase"]);
    let last = a.q_max.unwrap_or(a.q);
    for q in a.q..=last {
        if a.q_max.is_some() && a.p.gcd(&q) != 1 {
            continue;
        }
        let g = gauss_sum_general(a.p, q, dxi)?;
        table.push(vec![
            a.p.into(),
            q.into(),
            Cell::Text(dxi.to_string()),
            g.re.into(),
            g.im.into(),
            g.norm().into(),
            phase_of(g),
        ]);
    }
    Ok(table)
}

fn theta_table(a: &ThetaArgs) -> Result<Table, CliError> {
    let tau = Complex64::new(a.tau_re, a.tau_im);
    let v = theta(&ThetaInput::new(a.xi, tau, a.tol))?;
    let mut table = Table::new(&["xi", "tau_re", "tau_im", "re", "im", "cutoff", "truncation_error"]);
    table.push(vec![
        a.xi.into(),
        a.tau_re.into(),
        a.tau_im.into(),
        v.value.re.into(),
        v.value.im.into(),
        (v.cutoff as i64).into(),
        v.truncation_error.into(),
    ]);
    Ok(table)
}

fn qubit(a: &QubitArgs) -> Result<Table, CliError> {
    let tau = a.tau;
    let base = ["dj", "tau", "re", "im", "abs", "phase"];
    let row = |dj: i64, z: Complex64| -> Vec<Cell> {
        vec![dj.into(), tau.into(), z.re.into(), z.im.into(), z.norm().into(), phase_of(z)]
    };
    let table = match a.mode {
        QubitMode::Direct => {
            let mut t = Table::new(&[&base[..], &["abs_closed", "phase_closed"]].concat());
            for p in direct_profile(a.n_sites, tau, a.dj_max)? {
                let mut r = row(p.delta_j, p.value);
                if tau > 0.0 {
                    let c = qubit_closed(p.delta_j as f64, tau)?;
                    r.extend([c.norm().into(), phase_of(c)]);
                } else {
                    r.extend([Cell::Missing, Cell::Missing]);
                }
                t.push(r);
            }
            t
        }
        QubitMode::Closed => {
            let mut t = Table::new(&[&base[..], &["uniform"]].concat());
            let uniform = 1.0 / (2.0 * PI * tau).sqrt();
            for dj in -a.dj_max..=a.dj_max {
                let mut r = row(dj, qubit_closed(dj as f64, tau)?);
                r.push(uniform.into());
                t.push(r);
            }
            t
        }
        QubitMode::SmallTime => {
            let mut t = Table::new(&[&base[..], &["abs_closed", "beyond_window"]].concat());
            for dj in -a.dj_max..=a.dj_max {
                let approx = qubit_small_time(dj, tau);
                let mut r = row(dj, approx.value);
                let closed = if tau > 0.0 {
                    Cell::Float(qubit_closed(dj as f64, tau)?.norm())
                } else {
                    Cell::Missing
                };
                r.extend([closed, approx.beyond_window.into()]);
                t.push(r);
            }
            t
        }
        QubitMode::Lightcone => {
            let mut t = Table::new(&[&base[..], &["uniform", "inside", "phase_minus_action"]].concat());
            for p in lightcone_profile(tau, a.dj_max)? {
                let mut r = row(p.delta_j, p.value);
                r.extend([p.uniform.into(), p.inside.into(), p.phase_minus_action.into()]);
                t.push(r);
            }
            t
        }
    };
    Ok(table)
}
