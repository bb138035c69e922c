//! Acceptance suite: one test per headline guarantee, each printing a single
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture` to
//! see the lines; every check also asserts, so a plain `cargo test` still
//! catches regressions.

use std::time::Instant;

use nalgebra::DMatrix;

use jellywalk::generate::{corpus, tree_corpus};
use jellywalk::graph::{build_jellyfish, JellyfishGraph};
use jellywalk::observables::{analyze, grover_deviation, scattering_matrix, verify_theorem4};
use jellywalk::solver::{solve_electric, solve_fixed_point, StationaryState};
use jellywalk::walk::{
    detect_convergence, evolve, grover_coin, AmplitudeState, BoundaryInput, C64,
};

const CORPUS_SIZE: usize = 500;
const CORPUS_SEED: u64 = 0x5EED;

fn report(name: &str, ok: bool, detail: &str) {
    println!("{}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}

fn two_vertex() -> (JellyfishGraph, BoundaryInput) {
    let g = build_jellyfish(2, &[(1, 2)], &[1, 2]).unwrap();
    (g, BoundaryInput::real(&[1.0, 0.0]))
}

fn triangle() -> (JellyfishGraph, BoundaryInput) {
    let g = build_jellyfish(3, &[(1, 2), (2, 3), (1, 3)], &[1, 2]).unwrap();
    (g, BoundaryInput::real(&[1.0, 0.0]))
}

fn state_dist(a: &StationaryState, b: &StationaryState) -> f64 {
    a.core
        .iter()
        .chain(a.betas.iter())
        .zip(b.core.iter().chain(b.betas.iter()))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Best available limit object for a trajectory: the final state, or the
/// mean of the last two states when the tail of the trajectory is period-2.
fn limit_estimate(states: &[AmplitudeState], oscillating: bool) -> AmplitudeState {
    let last = states.last().expect("nonempty trajectory").clone();
    if !oscillating || states.len() < 2 {
        return last;
    }
    let prev = &states[states.len() - 2];
    AmplitudeState {
        core: last
            .core
            .iter()
            .zip(&prev.core)
            .map(|(a, b)| (a + b) / 2.0)
            .collect(),
        tail_out: last
            .tail_out
            .iter()
            .zip(&prev.tail_out)
            .map(|(a, b)| (a + b) / 2.0)
            .collect(),
    }
}

fn as_stationary(state: &AmplitudeState, b: &BoundaryInput) -> StationaryState {
    StationaryState {
        core: state.core.clone(),
        betas: state.tail_out.clone(),
        ave: b.average(),
    }
}

#[test]
fn a1_two_vertex_worked_example() {
    let start = Instant::now();
    let (g, b) = two_vertex();
    let fp = solve_fixed_point(&g, &b).unwrap();
    let el = solve_electric(&g, &b).unwrap();

    // Known closed form: psi(1->2) = 1, psi(2->1) = 0, beta = (0, 1).
    let expect = StationaryState {
        core: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        betas: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ave: C64::new(0.5, 0.0),
    };
    let mut worst = state_dist(&fp, &expect).max(state_dist(&el, &expect));

    let traj = evolve(&g, &b, 20, None).unwrap();
    let conv = detect_convergence(&traj, 1e-12).unwrap();
    let evolved = as_stationary(traj.states.last().unwrap(), &b);
    worst = worst.max(state_dist(&evolved, &expect));

    let elapsed = start.elapsed();
    let ok = worst < 1e-12 && conv.converged_at == Some(2) && elapsed.as_secs_f64() < 0.1;
    report(
        "two-vertex example: both solvers and 20-step evolution hit the closed form",
        ok,
        &format!("max deviation {worst:.2e}, converged_at {:?}, {elapsed:.2?}", conv.converged_at),
    );
}

#[test]
fn a2_triangle_worked_example() {
    let start = Instant::now();
    let (g, b) = triangle();
    let s = solve_electric(&g, &b).unwrap();

    // Arrow order: 0: 1->2, 1: 2->1, 2: 2->3, 3: 3->2, 4: 1->3, 5: 3->1.
    let expect = [5.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0];
    let state_err = s
        .core
        .iter()
        .zip(expect)
        .map(|(z, e)| (z - C64::new(e, 0.0)).norm())
        .fold(0.0, f64::max);

    let thm4 = verify_theorem4(&g, &s, &b).residual;
    let fp_residual = s.fixed_point_residual(&g, &b).unwrap();

    let elapsed = start.elapsed();
    let ok = state_err < 1e-12 && thm4 < 1e-12 && fp_residual < 1e-12
        && elapsed.as_secs_f64() < 0.1;
    report(
        "triangle example: exact fixed point with accumulation identity",
        ok,
        &format!("state {state_err:.2e}, identity {thm4:.2e}, fixed-point {fp_residual:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn a3_scattering_is_the_grover_coin() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (g, _) in corpus(CORPUS_SIZE, CORPUS_SEED) {
        let s = scattering_matrix(&g).unwrap();
        worst = worst.max(grover_deviation(&s));
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-10 && elapsed.as_secs_f64() < 30.0;
    report(
        &format!("scattering matrix equals the m x m Grover coin on {CORPUS_SIZE} random graphs"),
        ok,
        &format!("worst deviation {worst:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn a4_current_law() {
    let mut worst = 0.0f64;
    for (g, b) in corpus(CORPUS_SIZE, CORPUS_SEED) {
        let s = solve_electric(&g, &b).unwrap();
        let rep = analyze(&g, &s, &b).unwrap();
        worst = worst.max(rep.kirchhoff_residual);
    }
    let ok = worst < 1e-12;
    report(
        &format!("current antisymmetry and per-vertex conservation on {CORPUS_SIZE} random graphs"),
        ok,
        &format!("worst residual {worst:.2e}"),
    );
}

#[test]
fn a5_accumulation_identity() {
    // From solver states on the mixed-density corpus, and independently from
    // evolved trajectories on the tree corpus, where the transient actually
    // clears within the step budget (dense cores and single-tail instances
    // hold trapped modes for far longer than 10^4 steps).
    let mut worst_solver = 0.0f64;
    let mut worst_evolved = 0.0f64;
    for (g, b) in corpus(CORPUS_SIZE, CORPUS_SEED) {
        let s = solve_electric(&g, &b).unwrap();
        worst_solver = worst_solver.max(verify_theorem4(&g, &s, &b).residual);
    }
    for (g, b) in tree_corpus(CORPUS_SIZE, CORPUS_SEED) {
        // At least 50 * diameter steps, then run on until the step-to-step
        // delta stays quiet, so the evolved state is a genuine limit.
        let floor = 50 * g.core().diameter().max(1);
        let mut state = AmplitudeState::zeros(&g);
        let mut t = 0;
        loop {
            let chunk = if t < floor { floor - t } else { 250 };
            let traj = evolve(&g, &b, chunk, Some(state)).unwrap();
            t += chunk;
            state = traj.states.last().unwrap().clone();
            let quiet = traj.deltas.iter().rev().take(10).all(|&d| d < 1e-10);
            if (t >= floor && quiet) || t >= 10_000 {
                break;
            }
        }
        let s = as_stationary(&state, &b);
        worst_evolved = worst_evolved.max(verify_theorem4(&g, &s, &b).residual);
    }
    let ok = worst_solver < 1e-10 && worst_evolved < 1e-6;
    report(
        "accumulation identity P0 = 4 ave J_out from solver states and evolved states",
        ok,
        &format!("solver {worst_solver:.2e}, evolved {worst_evolved:.2e}"),
    );
}

#[test]
fn a6_evolution_converges_to_the_stationary_state() {
    const T_CAP: usize = 10_000;
    const CHUNK: usize = 250;
    let mut worst = 0.0f64;
    let mut worst_t = 0;
    let mut oscillators = Vec::new();
    for (idx, (g, b)) in tree_corpus(CORPUS_SIZE, CORPUS_SEED).into_iter().enumerate() {
        let target = solve_electric(&g, &b).unwrap().as_amplitude_state();
        let mut t = 0;
        let mut state = None;
        let mut dist = f64::INFINITY;
        let mut oscillating = false;
        while t < T_CAP {
            let traj = evolve(&g, &b, CHUNK, state).unwrap();
            t += CHUNK;
            oscillating = detect_convergence(&traj, 1e-9).unwrap().oscillating;
            dist = limit_estimate(&traj.states, oscillating).sup_dist(&target);
            if dist < 1e-6 {
                break;
            }
            state = Some(traj.states.last().unwrap().clone());
        }
        if oscillating {
            oscillators.push(idx);
        }
        if dist > worst {
            worst = dist;
            worst_t = t;
        }
        assert!(
            dist < 1e-6,
            "instance {idx} still {dist:.2e} away after {t} steps"
        );
    }
    if !oscillators.is_empty() {
        println!(
            "  note: {} instances showed period-2 tails; used two-state averages: {:?}",
            oscillators.len(),
            oscillators
        );
    }
    report(
        &format!("evolution reaches the stationary state on {CORPUS_SIZE} random tree-core graphs"),
        worst < 1e-6,
        &format!("worst remaining distance {worst:.2e} (at {worst_t} steps)"),
    );
}

#[test]
fn a7_no_accumulation_without_a_tail() {
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for (g, b) in corpus(CORPUS_SIZE, CORPUS_SEED) {
        let s = solve_electric(&g, &b).unwrap();
        for v in g.core().vertices() {
            if g.tails_at(v).is_empty() {
                worst = worst.max(jellywalk::observables::p0(&g, &s, v).abs());
                checked += 1;
            }
        }
    }
    let ok = worst < 1e-12 && checked > 0;
    report(
        "P0 vanishes at every tail-free vertex",
        ok,
        &format!("worst |P0| {worst:.2e} over {checked} vertices"),
    );
}

#[test]
fn a8_argmax_agreement_via_the_analyze_command() {
    use std::process::Command;
    let dir = tempfile::tempdir().unwrap();
    let mut checked = 0usize;
    let mut ok = true;
    for (idx, (g, b)) in corpus(CORPUS_SIZE, CORPUS_SEED).into_iter().enumerate() {
        let ave = b.average();
        // The monotone link between P0 and J_out needs a positive average.
        if ave.re < 1e-3 {
            continue;
        }
        checked += 1;
        if checked > 60 {
            break;
        }
        let path = dir.path().join(format!("g{idx}.json"));
        std::fs::write(&path, jellywalk::io::graph_to_string(&g)).unwrap();
        let alphas = format!(
            "[{}]",
            b.0.iter()
                .map(|z| format!("[{},{}]", z.re, z.im))
                .collect::<Vec<_>>()
                .join(",")
        );
        let out = Command::new(env!("CARGO_BIN_EXE_jellywalk"))
            .args(["analyze", "--graph", path.to_str().unwrap(), "--alphas", &alphas])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let p0_set = doc["argmax_p0"].as_array().unwrap();
        let jo_set = doc["argmax_j_out"].as_array().unwrap();
        let baseline = doc["baseline_per_arrow"].as_f64().unwrap();
        let uniform = if g.num_core_arrows() == 0 {
            0.0
        } else {
            1.0 / g.num_core_arrows() as f64
        };
        ok &= p0_set == jo_set;
        ok &= (baseline - uniform).abs() < 1e-15;
    }
    ok &= checked > 0;
    report(
        "argmax of P0 matches argmax of J_out, against a flat random-walk baseline",
        ok,
        &format!("{} positive-average instances via the analyze command", checked.min(60)),
    );
}

#[test]
fn a9_coin_algebra() {
    let mut worst = 0.0f64;
    for r in 1..=32usize {
        let c = grover_coin(r).unwrap();
        let id = DMatrix::<f64>::identity(r, r);
        worst = worst.max((&c * &c - &id).abs().max());
        worst = worst.max((&c - c.transpose()).abs().max());
        for i in 0..r {
            worst = worst.max((c.row(i).sum() - 1.0).abs());
            for j in 0..r {
                let expect = if i == j { 2.0 / r as f64 - 1.0 } else { 2.0 / r as f64 };
                worst = worst.max((c[(i, j)] - expect).abs());
            }
        }
    }
    let ok = worst < 1e-14;
    report(
        "Grover coin entries, symmetry, involution, and row sums for r = 1..=32",
        ok,
        &format!("worst deviation {worst:.2e}"),
    );
}
