//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails. Each criterion also has a wall-clock budget that counts
//! toward its verdict.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Rational64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circprop::analysis::{count_reversals, probability_max, semiclassical_deviation, trajectory_deviation};
use circprop::evolution::{
    analytic_free_evolution, build_packet, cosine_potential, random_potential, split_step,
    zero_potential, EvolutionRecord, PacketParams, PotentialGrid, SplitStepConfig,
};
use circprop::lattice::{dft_centered, dft_direct, Direction, Grid};
use circprop::numerics::gauss_sum_unit;
use circprop::propagator::{
    classify_displacements, direct_propagator, direct_propagator_rational, exact_propagator,
    peak_scaling_check, physical_displacements, wrap_phase, PropagatorMatrix, RationalTime,
};
use circprop::qubit::{lightcone_profile, qubit_closed, qubit_direct};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn t(p: i64, q: i64) -> RationalTime {
    RationalTime::reduced(p, q).unwrap()
}

fn kernel_distance(a: &PropagatorMatrix, b: &PropagatorMatrix) -> f64 {
    a.kernel()
        .iter()
        .zip(b.kernel())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn free_run(n_qubits: u32, params: PacketParams, steps: u64, stride: u64) -> EvolutionRecord {
    let grid = Grid::from_qubits(n_qubits).unwrap();
    let psi = build_packet(&grid, &params).unwrap();
    let step = t(1, grid.n_sites() as i64);
    let config = SplitStepConfig::new(step, steps).with_stride(stride);
    split_step(&psi, &zero_potential(&grid), &config).unwrap()
}

fn potential_run(grid: &Grid, pot: &PotentialGrid, params: PacketParams, steps: u64) -> EvolutionRecord {
    let psi = build_packet(grid, &params).unwrap();
    let config = SplitStepConfig::new(t(1, grid.n_sites() as i64), steps);
    split_step(&psi, pot, &config).unwrap()
}

fn gauss_identity() -> Outcome {
    let target = Complex64::from_polar(1.0, -PI / 4.0);
    let worst = (1..=5000)
        .map(|h| (gauss_sum_unit(2 * h).unwrap() - target).norm())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("max |G(q) - e^(-i pi/4)| = {worst:.2e} over even q <= 10^4"))
}

fn closed_form_propagator() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in [4usize, 8, 16, 64, 128, 256] {
        let grid = Grid::new(n).unwrap();
        for q in (1..=n as i64).filter(|q| n as i64 % q == 0) {
            let exact = exact_propagator(&grid, &t(1, q)).unwrap();
            let direct = direct_propagator(&grid, 1.0 / q as f64);
            worst = worst.max(kernel_distance(&exact, &direct));
            cases += 1;
        }
    }
    outcome(worst <= 1e-10, format!("max entry error {worst:.2e} over {cases} (N, q) pairs"))
}

fn phase_conjecture() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    for q in 1..=128i64 {
        let time = t(1, q);
        let n = 2 * q as usize;
        let grid = Grid::new(n).unwrap();
        let direct = direct_propagator_rational(&grid, &time);
        let sign = time.signum() as f64;
        let abs_t = time.as_f64().abs();
        for d in physical_displacements(&time).unwrap().physical {
            let dj = (d * Rational64::from_integer(n as i64)).to_integer();
            let dxi = *d.numer() as f64 / *d.denom() as f64;
            let expected = sign * (PI * dxi * dxi / abs_t - PI / 4.0);
            let got = direct.kernel_at(dj).arg();
            worst = worst.max(wrap_phase(got - expected).abs());
            points += 1;
        }
    }
    outcome(worst <= 1e-9, format!("max phase error {worst:.2e} rad at {points} physical points, q <= 128"))
}

fn oracle_equivalence() -> Outcome {
    let mut mismatches = Vec::new();
    let mut times = 0;
    for q in 1..=64i64 {
        for p in -q..q {
            let time = RationalTime::new(p, q).unwrap();
            if !time.is_reduced() {
                continue;
            }
            times += 1;
            let closed = physical_displacements(&time).unwrap();
            let oracle = classify_displacements(&time).unwrap();
            let phases_agree = closed
                .phases
                .iter()
                .zip(&oracle.phases)
                .all(|(a, b)| wrap_phase(a - b).abs() < 1e-9);
            if closed.physical != oracle.physical || !phases_agree {
                mismatches.push(time.to_string());
            }
        }
    }
    let r = Rational64::new;
    let figure = [
        (t(1, 4), vec![r(-1, 2), r(-1, 4), r(0, 1), r(1, 4)]),
        (t(1, 3), vec![r(-1, 2), r(-1, 6), r(1, 6)]),
        (t(2, 3), vec![r(-1, 3), r(0, 1), r(1, 3)]),
    ];
    let figure_ok = figure
        .iter()
        .all(|(time, want)| &physical_displacements(time).unwrap().physical == want);
    outcome(
        mismatches.is_empty() && figure_ok,
        format!(
            "{times} reduced times, {} mismatches{}; sets at 1/4, 1/3, 2/3 {}",
            mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!(" ({})", mismatches.join(" ")) },
            if figure_ok { "reproduced" } else { "differ" }
        ),
    )
}

fn free_packet_reproduction() -> Outcome {
    let params = PacketParams::new(0.0, 0, 10.0).unwrap();
    let record = free_run(7, params, 64, 32);
    let grid = Grid::from_qubits(7).unwrap();
    let mut worst = 0.0f64;
    for (tau, psi) in record.times.iter().zip(&record.states) {
        let reference = analytic_free_evolution(&grid, &params, *tau).unwrap();
        let d = psi
            .probabilities()
            .iter()
            .zip(reference.probabilities())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(d);
    }
    let times = record.times.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    outcome(worst <= 1e-8, format!("max density error {worst:.2e} at t = {times}"))
}

fn periodicity() -> Outcome {
    let params = PacketParams::new(0.1, 2, 10.0).unwrap();
    let record = free_run(7, params, 256, 256);
    let first = record.states.first().unwrap().amps();
    let last = record.states.last().unwrap().amps();
    let relocal = max_abs_diff(first, last);

    let grid = Grid::new(128).unwrap();
    let mut period = 0.0f64;
    for &tau in &[0.1, 1.0 / 3.0, 0.77, -0.4, 1.5, 0.015625] {
        let a = direct_propagator(&grid, tau);
        let b = direct_propagator(&grid, tau + 2.0);
        period = period.max(kernel_distance(&a, &b));
    }
    for &(p, q) in &[(1, 8), (3, 16), (-5, 64)] {
        let a = direct_propagator_rational(&grid, &RationalTime::new(p, q).unwrap());
        let b = direct_propagator_rational(&grid, &RationalTime::new(p + 2 * q, q).unwrap());
        period = period.max(kernel_distance(&a, &b));
    }
    outcome(
        relocal <= 1e-10 && period <= 1e-12,
        format!("state at t=2 differs by {relocal:.2e}; max |D(t+2) - D(t)| = {period:.2e}"),
    )
}

fn semiclassical_slope() -> Outcome {
    let n = 128.0;
    let mut parts = Vec::new();
    let mut pass = true;
    for m0 in [1, 2] {
        let record = free_run(7, PacketParams::new(0.0, m0, 2.5).unwrap(), 6, 1);
        let traj = probability_max(&record).unwrap();
        let dev = semiclassical_deviation(&traj, m0).unwrap();
        let full_slope = trajectory_deviation(&traj, m0 as f64, 0.05).unwrap();
        pass &= dev <= 2.0 / n;
        parts.push(format!(
            "M0={m0}: |xi_max - M0 t/2| = {:.0}/N (slope M0: {:.0}/N)",
            dev * n,
            full_slope * n
        ));
    }
    outcome(pass, format!("{}; limit 2/N", parts.join("; ")))
}

fn potential_runs() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut worst_residual = 0.0f64;
    let params = PacketParams::new(-0.125, 0, 10.0).unwrap();
    for n_qubits in [6u32, 7] {
        let grid = Grid::from_qubits(n_qubits).unwrap();
        let n = grid.n_sites();
        let pot = cosine_potential(&grid, 0.75, 1.0 / n as f64).unwrap();
        let record = potential_run(&grid, &pot, params, 2 * n as u64);
        let reversals = count_reversals(&probability_max(&record).unwrap());
        pass &= reversals >= 2;
        worst_residual = record.conservation_residuals.iter().copied().fold(worst_residual, f64::max);
        parts.push(format!("n={n_qubits}: {reversals} reversals"));
    }
    let grid = Grid::from_qubits(6).unwrap();
    let dump = || {
        let pot = random_potential(&grid, 0.75, 1.0 / 64.0, 2024).unwrap();
        let record = potential_run(&grid, &pot, params, 128);
        let mut bytes = Vec::new();
        record.write_csv(&mut bytes).unwrap();
        (bytes, record.conservation_residuals.iter().copied().fold(0.0, f64::max))
    };
    let (first, r1) = dump();
    let (second, r2) = dump();
    let reproducible = first == second;
    worst_residual = worst_residual.max(r1).max(r2);
    pass &= reproducible && worst_residual < 1e-10;
    parts.push(format!(
        "random potential {}; max norm residual {worst_residual:.2e}",
        if reproducible { "byte-identical" } else { "NOT reproducible" }
    ));
    outcome(pass, parts.join("; "))
}

fn qubit_small_time_limits() -> Outcome {
    let mut ret = 0.0f64;
    for &tau in &[0.001, 0.005, 0.01, 0.015, 0.02] {
        let p = qubit_closed(0.0, tau).unwrap().norm_sqr();
        ret = ret.max((p - (1.0 - PI.powi(4) * tau * tau / 45.0)).abs());
    }
    let tau = 0.01;
    let mut ratio = 0.0f64;
    for dj in 1..=5i64 {
        let p = qubit_closed(dj as f64, tau).unwrap().norm_sqr();
        ratio = ratio.max((p / (tau * tau / (dj as f64).powi(4)) - 1.0).abs());
    }
    let total: f64 = (-50..=50).map(|dj| qubit_closed(dj as f64, tau).unwrap().norm_sqr()).sum();
    let sum_err = total - 1.0;
    outcome(
        ret <= 1e-6 && ratio <= 0.05 && sum_err.abs() <= 1e-6,
        format!(
            "return prob error {ret:.1e}; |D|^2 vs tau^2/dJ^4 within {:.2}%; sum - 1 = {sum_err:.1e}",
            ratio * 100.0
        ),
    )
}

fn qubit_light_cone() -> Outcome {
    let tau = 10.0;
    let mut modulus = 0.0f64;
    for dj in -60..=60i64 {
        let d = qubit_direct(120, dj, tau).unwrap().norm();
        let c = qubit_closed(dj as f64, tau).unwrap().norm();
        modulus = modulus.max((d - c).abs());
    }
    let rows = lightcone_profile(tau, 60).unwrap();
    let uniform = rows[0].uniform;
    let inside: Vec<f64> = rows.iter().filter(|r| r.inside).map(|r| r.modulus).collect();
    let mean = inside.iter().sum::<f64>() / inside.len() as f64;
    let mean_dev = (mean / uniform - 1.0).abs();
    let phase = rows
        .iter()
        .filter(|r| (r.delta_j as f64).abs() <= PI * tau / 2.0)
        .map(|r| wrap_phase(r.phase_minus_action + PI / 4.0).abs())
        .fold(0.0, f64::max);
    let clauses = [modulus <= 1e-3, mean_dev <= 0.1, phase <= 0.1];
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    outcome(
        clauses.iter().all(|&c| c),
        format!(
            "N=120 direct vs closed |D| diff {modulus:.2e} [{}]; inside-cone mean {mean:.5} vs {uniform:.5} ({:.1}%) [{}]; max |phase - S + pi/4| {phase:.4} rad [{}]",
            mark(clauses[0]),
            mean_dev * 100.0,
            mark(clauses[1]),
            mark(clauses[2])
        ),
    )
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut uniform = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;

    // DFT unitarity and fast path
    let mut dft = 0.0f64;
    for n in [2usize, 6, 10, 64, 100, 1000, 1024, 4096, 16384] {
        let grid = Grid::new(n).unwrap();
        let psi: Vec<Complex64> = (0..n).map(|_| Complex64::new(uniform(), uniform())).collect();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let out = dft_centered(&grid, &psi, Direction::Forward).unwrap();
        let norm_out: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        dft = dft.max((norm_out.sqrt() - norm.sqrt()).abs() / norm.sqrt());
    }
    let mut fast = 0.0f64;
    for k in 1..=12 {
        let n = 1usize << k;
        let grid = Grid::new(n).unwrap();
        let psi: Vec<Complex64> = (0..n).map(|_| Complex64::new(uniform(), uniform())).collect();
        let a = dft_centered(&grid, &psi, Direction::Forward).unwrap();
        let b = dft_direct(&grid, &psi, Direction::Forward).unwrap();
        fast = fast.max(max_abs_diff(&a, &b));
    }

    // propagator unitarity, N <= 2^12
    let mut unitary = 0.0f64;
    for k in 1..=12 {
        let grid = Grid::new(1 << k).unwrap();
        unitary = unitary.max(direct_propagator(&grid, 0.318_309_886).unitarity_defect());
        unitary = unitary.max(direct_propagator_rational(&grid, &t(3, 1 << k.min(6))).unitarity_defect());
    }

    // composition with denominators dividing N
    let grid = Grid::new(64).unwrap();
    let mut compose = 0.0f64;
    for &((p1, q1), (p2, q2)) in &[((1, 8), (3, 16)), ((1, 64), (5, 32)), ((-1, 4), (7, 64)), ((31, 32), (3, 4))] {
        let (a, b) = (t(p1, q1), t(p2, q2));
        let product = direct_propagator_rational(&grid, &a)
            .compose(&direct_propagator_rational(&grid, &b))
            .unwrap();
        let sum = direct_propagator_rational(&grid, &a.checked_add(b).unwrap());
        compose = compose.max(kernel_distance(&product, &sum));
    }

    // time reversal
    let mut conj = 0.0f64;
    for n in [64usize, 128] {
        let grid = Grid::new(n).unwrap();
        for &tau in &[0.1, 0.37, 1.0 / 3.0, 0.9] {
            let fwd = direct_propagator(&grid, tau);
            let back = direct_propagator(&grid, -tau);
            let d = fwd
                .kernel()
                .iter()
                .zip(back.kernel())
                .map(|(x, y)| (x.conj() - y).norm())
                .fold(0.0, f64::max);
            conj = conj.max(d);
        }
    }

    // sigma scaling of the mixed propagator peak
    let mut peak = 0.0f64;
    for &(q, ref ns) in &[(2i64, vec![4usize, 8, 16, 64]), (3, vec![6, 12, 48]), (4, vec![8, 32, 128]), (8, vec![16, 64, 256])] {
        for (_, ratio) in peak_scaling_check(q, ns, 1.0).unwrap() {
            peak = peak.max((ratio - 1.0).abs());
        }
    }

    let pass = dft <= 1e-12 && fast <= 1e-11 && unitary <= 1e-10 && compose <= 1e-10 && conj <= 1e-12 && peak <= 1e-10;
    outcome(
        pass,
        format!(
            "dft norm {dft:.1e}, fast-vs-direct {fast:.1e}, unitarity {unitary:.1e}, composition {compose:.1e}, conjugation {conj:.1e}, peak ratio {peak:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 11] = [
        (1, "Gauss-sum identity", 5, gauss_identity),
        (2, "closed-form propagator", 10, closed_form_propagator),
        (3, "phase conjecture", 5, phase_conjecture),
        (4, "displacement-set oracle", 5, oracle_equivalence),
        (5, "free packet vs analytic", 1, free_packet_reproduction),
        (6, "periodicity and relocalization", 1, periodicity),
        (7, "semi-classical slope", 2, semiclassical_slope),
        (8, "potential runs", 10, potential_runs),
        (9, "qubit small time", 2, qubit_small_time_limits),
        (10, "qubit light cone", 2, qubit_light_cone),
        (11, "property suite", 30, property_suite),
    ];
    let mut failures = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = result.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "{} {id:>2} {name}: {} [{:.3} s of {budget} s{}]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
