//! The ten acceptance criteria, one test each. Every test prints a single PASS/FAIL line.

use std::sync::Arc;
use std::time::Instant;

use dualwalk::c64;
use dualwalk::chain::{self, AcceptanceChoice, MixingBounds};
use dualwalk::dual::{self, DeltaStarMode};
use dualwalk::gates::{self, RegisterLayout};
use dualwalk::lab::{self, figure, ExperimentConfig, Instance, Mode, SweepSpec};
use dualwalk::linalg;
use dualwalk::mala;
use dualwalk::walk::{self, MhWalk, Operator};
use dualwalk::{Execution, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

/// Fifty seeded proposals and targets with 3 to 16 states.
fn instance_set(choice: AcceptanceChoice) -> Vec<Instance> {
    (0..50u64).map(|seed| lab::random_instance(3 + (seed % 14) as usize, 1000 + seed, choice).unwrap()).collect()
}

#[test]
fn criterion_01_spectrum_inclusion() {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut failures = 0;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for choice in [AcceptanceChoice::Metropolis, AcceptanceChoice::Glauber] {
        for inst in instance_set(choice) {
            let p_spec = chain::analyze(&inst.p, &tol).unwrap().eigenvalues;
            let space = dual::edge_space(&inst.t);
            let nu = dual::nu(&inst.pi, &inst.t, &space).unwrap();
            let dk = dual::dual_kernels(&inst.t, &inst.a, &space).unwrap();
            let tat = linalg::real_to_complex(&linalg::symmetric_eigenvalues(dk.tat.nu_symmetrized(&nu).as_ref()).unwrap());
            let m = linalg::match_spectra(&p_spec, &tat, 1e-8);
            if !(m.left_included() && m.right_leftovers_near(c64::new(0.0, 0.0), 1e-8)) {
                failures += 1;
            }
            worst = worst.max(m.max_mismatch);
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        "spectrum inclusion",
        failures == 0 && secs < 30.0,
        format!("{checked} instances, {failures} failures, max mismatch {worst:.1e}, {secs:.1} s"),
    );
}

#[test]
fn criterion_02_glauber_gap_identity() {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for inst in instance_set(AcceptanceChoice::Glauber) {
        let ds = dual::delta_star(&inst.t, &inst.a, DeltaStarMode::Direct, &tol).unwrap();
        worst = worst.max((ds.delta_star - ds.delta).abs());
    }
    verdict(2, "glauber gap identity", worst <= 1e-9, format!("max |delta_star - delta| = {worst:.1e}"));
}

#[test]
fn criterion_03_lazy_general_bound() {
    let tol = Tolerances::default();
    let mut worst = f64::INFINITY;
    for inst in instance_set(AcceptanceChoice::Metropolis) {
        let ds = dual::delta_star(&inst.t, &inst.a, DeltaStarMode::Direct, &tol).unwrap();
        let lazy = dual::delta_star(&inst.t, &inst.a.halved(), DeltaStarMode::Direct, &tol).unwrap();
        worst = worst.min(lazy.delta_star - ds.delta / 2.0);
    }
    verdict(3, "lazy general bound", worst >= -1e-9, format!("min delta_star - delta/2 = {worst:.3e}"));
}

#[test]
fn criterion_04_qubitized_spectrum_map() {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let (mut worst_mismatch, mut worst_residual) = (0.0f64, 0.0f64);
    for n in 2..=6 {
        for choice in [AcceptanceChoice::Metropolis, AcceptanceChoice::Glauber] {
            let inst = if n == 2 { lab::k2(choice) } else { lab::random_instance(n, 40 + n as u64, choice).unwrap() };
            let w = MhWalk::new(&inst.t, &inst.a, &tol).unwrap();
            let encoded = linalg::symmetric_eigenvalues(w.encoded().as_ref()).unwrap();
            let predicted = walk::walk_spectrum_from_encoded(&encoded, 1e-8);
            let observed = walk::walk_spectrum_full(&w.walk, 1e-8).unwrap();
            let m = linalg::match_spectra(&observed.nontrivial, &predicted.nontrivial, 1e-8);

            // the pair-space encoding is the edge-space dilation padded with zeros
            let space = dual::edge_space(&inst.t);
            let nu = dual::nu(&inst.pi, &inst.t, &space).unwrap();
            let dk = dual::dual_kernels(&inst.t, &inst.a, &space).unwrap();
            let d_bar = dual::dilation(&dk.p, &dk.p_star, &nu).spectrum().unwrap();
            let e = linalg::match_spectra(&linalg::real_to_complex(&d_bar), &linalg::real_to_complex(&encoded), 1e-8);

            let (residual, norm) = walk::eigvec_residual(&w.spue, &w.walk, 1e-8).unwrap();
            worst_mismatch = worst_mismatch.max(m.max_mismatch).max(e.max_mismatch);
            worst_residual = worst_residual.max(residual);
            let ok = m.is_equal()
                && e.left_included()
                && e.right_leftovers_near(c64::new(0.0, 0.0), 1e-8)
                && residual <= 1e-8
                && norm <= 1e-8;
            if !ok {
                failures.push((n, choice));
            }
        }
    }
    verdict(
        4,
        "qubitized spectrum map",
        failures.is_empty(),
        format!("n = 2..6, failures {failures:?}, max mismatch {worst_mismatch:.1e}, max residual {worst_residual:.1e}"),
    );
}

#[test]
fn criterion_05_unique_stationary_vector_and_extraction() {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for n in 2..=8 {
        for choice in [AcceptanceChoice::Metropolis, AcceptanceChoice::Glauber] {
            let inst = if n == 2 { lab::k2(choice) } else { lab::random_instance(n, 70 + n as u64, choice).unwrap() };
            let w = MhWalk::new(&inst.t, &inst.a, &tol).unwrap();
            let basis = w.stationary_basis(1e-8).unwrap();
            let generator: Vec<c64> = if basis.ncols() == 1 {
                w.spue.iso.apply(&(0..basis.nrows()).map(|i| basis[(i, 0)]).collect::<Vec<_>>())
            } else {
                Vec::new()
            };
            let fid = if generator.is_empty() {
                0.0
            } else {
                linalg::fidelity(&w.extract(&generator).unwrap(), &w.extraction_target())
            };
            worst = worst.max(1.0 - fid);
            if basis.ncols() != 1 || fid < 1.0 - 1e-10 {
                failures.push((n, choice, basis.ncols()));
            }
        }
    }
    verdict(
        5,
        "unique stationary vector and extraction",
        failures.is_empty(),
        format!("n = 2..8, failures {failures:?}, max infidelity {worst:.1e}"),
    );
}

#[test]
fn criterion_06_controlled_swap_encoding() {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut audit_ok = true;
    for seed in 0..20u64 {
        let n = 2 + (seed % 15) as usize;
        let choice = if seed % 2 == 0 { AcceptanceChoice::Metropolis } else { AcceptanceChoice::Glauber };
        let inst = lab::random_instance(n, 500 + seed, choice).unwrap();
        let c = walk::cswap_spue(&walk::build_o_t(&inst.t), &walk::build_o_a(&inst.a), n);
        let d = chain::discriminant(&inst.p, &inst.pi, &tol).unwrap();
        worst = worst.max(linalg::max_abs_diff(c.block.as_ref(), d.as_ref()));
        let m = lab::report::register_bits(n);
        audit_ok &= gates::qubit_audit(m).cswap_qubits() == 2 * m + 1;
    }
    verdict(
        6,
        "controlled-swap encoding",
        worst <= 1e-10 && audit_ok && gates::qubit_audit(6).cswap_qubits() == 13,
        format!("20 instances, n <= 16, max |block - D| = {worst:.1e}, 2m+1 qubits = {audit_ok}"),
    );
}

#[test]
fn criterion_07_gate_matrix_equivalence() {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut calls_ok = true;
    for m in 1..=3usize {
        let n = 1usize << m;
        let inst = lab::random_instance(n, 90 + m as u64, AcceptanceChoice::Metropolis).unwrap();
        let w = MhWalk::new(&inst.t, &inst.a, &tol).unwrap();

        let o_cal_a = gates::assemble_o_cal_a(m, &w.o_a).unwrap().to_operator(Execution::Parallel);
        worst = worst.max(o_cal_a.distance(&w.o_cal_a));

        let seq = gates::assemble_w(m, &w).unwrap();
        let inputs = gates::walk_block_inputs(m);
        let cols = seq.columns(&inputs, Execution::Parallel);
        let got = Operator::from_columns(seq.dim(), inputs.len(), |j| cols[j].clone());
        let want = Operator::from_columns(seq.dim(), inputs.len(), |j| {
            w.walk.column(j).iter().map(|&(i, v)| (i << 2, v)).collect()
        });
        worst = worst.max(got.distance(&want));

        let calls = seq.oracle_calls();
        calls_ok &= ["O_T", "O_T†", "O_A", "O_A†"].iter().all(|k| calls.get(*k) == Some(&2)) && calls.len() == 4;
    }
    // the full register, ancillas included, at m = 1
    let inst = lab::random_instance(2, 3, AcceptanceChoice::Glauber).unwrap();
    let w = MhWalk::new(&inst.t, &inst.a, &tol).unwrap();
    let full = gates::assemble_w(1, &w).unwrap().to_operator(Execution::Sequential);
    worst = worst.max(full.distance(&gates::matrix_level_w_full(&w)));

    let o_t = Arc::new(Operator::identity(1 << 12));
    let o_a = Arc::new(Operator::identity(1 << 13));
    let at_six = gates::assemble_w_with(RegisterLayout::new(6), &o_t, &o_a).unwrap();
    let qubits_ok = gates::qubit_audit(6).walk_qubits() == 27
        && gates::audit_sequence(&at_six, 6).unwrap() == 27
        && (1..=3).all(|m| gates::qubit_audit(m).walk_qubits() == 4 * m + 3);
    verdict(
        7,
        "gate/matrix equivalence",
        worst <= 1e-10 && calls_ok && qubits_ok,
        format!("m <= 3, max entry deviation {worst:.1e}, two calls per oracle = {calls_ok}, 27 qubits at m = 6 = {qubits_ok}"),
    );
}

#[test]
fn criterion_08_gap_amplification_sweep() {
    let tol = Tolerances::default();
    let spec = SweepSpec::default();
    let start = Instant::now();
    let fig = lab::reproduce_fig1(&spec, &tol, Execution::Parallel).unwrap();
    let dir = std::env::temp_dir().join(format!("dualwalk-fig1-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig1.csv");
    fig.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let csv_ok = text.lines().next().is_some_and(|h| h.starts_with("parameter,value")) && text.lines().count() == spec.values.len() + 1;

    // one point against a dense SVD of the 4032-dimensional edge kernel
    let (compressed, dense) = figure::dense_cross_check(&spec.config_at(spec.values[3]), spec.acceptance, &tol).unwrap();
    let cross_ok = (compressed - dense).abs() < 1e-9;

    let n_ok = fig.points.iter().all(|p| p.n == 64 && 2 * p.edges <= 8064);
    let margin = fig.points.iter().map(|p| p.angular_gap - p.bound).fold(f64::INFINITY, f64::min);
    verdict(
        8,
        "gap amplification sweep",
        fig.all_hold() && csv_ok && cross_ok && n_ok && secs < 300.0,
        format!(
            "{} points, min(Δ - bound) = {margin:.2e}, dense check |Δλ| = {:.1e}, {secs:.1} s",
            fig.points.len(),
            (compressed - dense).abs()
        ),
    );
}

#[test]
fn criterion_09_end_to_end_sampling() {
    let tol = Tolerances::default();
    let mut worst_tv = 0.0f64;
    let mut worst_infidelity = 0.0f64;
    for n in 2..=8 {
        let choice = if n % 2 == 0 { AcceptanceChoice::Glauber } else { AcceptanceChoice::Metropolis };
        let inst = if n == 2 { lab::k2(choice) } else { lab::random_instance(n, 300 + n as u64, choice).unwrap() };
        let w = MhWalk::new(&inst.t, &inst.a, &tol).unwrap();
        let cfg = ExperimentConfig { shots: 100_000, seed: 42, ..Default::default() };
        let exact = lab::algorithm1_exact(&w, &cfg).unwrap();
        let qpe = lab::algorithm1_qpe(&w, &ExperimentConfig { mode: Mode::Qpe, ancilla_bits: 6, ..cfg }).unwrap();
        worst_tv = worst_tv.max(exact.tv);
        worst_infidelity = worst_infidelity.max(1.0 - linalg::fidelity(&exact.prepared, &qpe.prepared));
    }
    let per_w = gates::walk_oracle_calls();
    let calls_ok = per_w.len() == 4 && per_w.values().all(|&c| c == 2);
    verdict(
        9,
        "end-to-end sampling",
        worst_tv <= 0.02 && worst_infidelity <= 1e-4 && calls_ok,
        format!("n = 2..8, max TV {worst_tv:.4}, max QPE infidelity at t = 6 {worst_infidelity:.1e}, per-W calls {per_w:?}"),
    );
}

#[test]
fn criterion_10_operator_checks_and_mixing_bounds() {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let mut shift_err = 0.0f64;
    for bits in 1..=4u32 {
        let n = 1usize << bits;
        for _ in 0..5 {
            let f: Vec<f64> = (0..n).map(|_| rng.random_range(-(n as i64)..=n as i64) as f64).collect();
            let qpe = mala::phase_estimation_shift(&f).unwrap();
            let u = mala::shift_operator(&f).unwrap().to_dense();
            shift_err = shift_err.max(linalg::max_abs_diff_c(qpe.as_ref(), u.as_ref()));
        }
    }

    let mut diag_err = 0.0f64;
    for m in 1..=3usize {
        let n = 1usize << m;
        for choice in [AcceptanceChoice::Metropolis, AcceptanceChoice::Glauber] {
            let inst = lab::random_instance(n, 20 + m as u64, choice).unwrap();
            let seq = gates::diagonalize_o_a(m, &inst.a).unwrap();
            diag_err = diag_err.max(seq.to_operator(Execution::Sequential).distance(&walk::build_o_a(&inst.a)));
        }
    }

    let mut checked = 0;
    let (mut below_lower, mut above_upper, mut below_standard_lower) = (0, 0, 0);
    let mut worst_ratio = f64::INFINITY;
    let mut kernels: Vec<chain::MarkovKernel> = Vec::new();
    for choice in [AcceptanceChoice::Metropolis, AcceptanceChoice::Glauber, AcceptanceChoice::MetropolisLazy] {
        kernels.push(lab::k2(choice).p);
        kernels.extend(instance_set(choice).into_iter().map(|i| i.p));
    }
    for p in &kernels {
        let analysis = chain::analyze(p, &Tolerances::default()).unwrap();
        for eps in [0.05, 0.1, 0.25] {
            let tau = chain::mixing_time_with(p, &analysis.pi, eps, 1_000_000).unwrap() as f64;
            let bounds = MixingBounds::new(analysis.gap, analysis.pi.min(), eps);
            if tau < bounds.lower - 1e-9 {
                below_lower += 1;
                worst_ratio = worst_ratio.min(tau / bounds.lower);
            }
            if tau > bounds.upper + 1e-9 {
                above_upper += 1;
            }
            // the textbook form carries ln(1/(2 eps)); reported for diagnosis only
            if tau < (1.0 / analysis.gap - 1.0) * (1.0 / (2.0 * eps)).ln() - 1e-9 {
                below_standard_lower += 1;
            }
            checked += 1;
        }
    }
    verdict(
        10,
        "operator checks and mixing bounds",
        shift_err <= 1e-9 && diag_err <= 1e-10 && below_lower == 0 && above_upper == 0,
        format!(
            "shift vs phase estimation {shift_err:.1e}, diagonalized O_A {diag_err:.1e}, {checked} mixing cases: \
             {below_lower} below the lower bound (worst tau/lower {worst_ratio:.3}), {above_upper} above the upper bound, \
             {below_standard_lower} below the ln(1/(2 eps)) lower bound"
        ),
    );
}
