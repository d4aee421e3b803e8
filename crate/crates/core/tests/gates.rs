use std::sync::Arc;

use dualwalk::c64;
use dualwalk::chain::AcceptanceChoice;
use dualwalk::gates::{self, Gate, GateSequence, RegisterLayout};
use dualwalk::lab::{k2, random_instance};
use dualwalk::walk::{self, MhWalk, Operator};
use dualwalk::{Execution, Tolerances};

fn walk_for(m: usize, seed: u64, choice: AcceptanceChoice) -> MhWalk {
    let inst = random_instance(1 << m, seed, choice).unwrap();
    MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap()
}

fn column_distance(got: &[(usize, c64)], want: &[(usize, c64)]) -> f64 {
    let mut diff = std::collections::BTreeMap::new();
    for &(i, v) in got {
        *diff.entry(i).or_insert(c64::new(0.0, 0.0)) += v;
    }
    for &(i, v) in want {
        *diff.entry(i).or_insert(c64::new(0.0, 0.0)) -= v;
    }
    diff.values().map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn o_cal_a_single_qubit_registers_match_matrix_level() {
    for choice in [AcceptanceChoice::Glauber, AcceptanceChoice::Metropolis] {
        let inst = k2(choice);
        let o_a = walk::build_o_a(&inst.a);
        let seq = gates::assemble_o_cal_a(1, &o_a).unwrap();
        let op = seq.to_operator(Execution::Sequential);
        assert_eq!((op.nrows(), op.ncols()), (16, 16));
        assert!(op.distance(&walk::build_o_cal_a(&o_a, 2)) < 1e-12);
    }
}

#[test]
fn o_cal_a_two_qubit_registers_match_matrix_level() {
    let w = walk_for(2, 5, AcceptanceChoice::Metropolis);
    let seq = gates::assemble_o_cal_a(2, &w.o_a).unwrap();
    assert!(seq.to_operator(Execution::Parallel).distance(&w.o_cal_a) < 1e-12);
}

#[test]
fn gate_level_o_and_o_star_match_matrix_level() {
    for m in [1, 2] {
        let w = walk_for(m, 9, AcceptanceChoice::Glauber);
        let layout = RegisterLayout::new(m);
        let (o_t, o_a) = (Arc::new(w.o_t.clone()), Arc::new(w.o_a.clone()));
        let n = w.n;
        // matrix index [r1, r2, r3, r4, flag] sits at bits 1.. of the layout, below herm
        let inputs: Vec<usize> = (0..2 * n.pow(4)).map(|k| k << 1).collect();
        for (seq, mat) in [
            (gates::assemble_o(layout, &o_t, &o_a).unwrap(), &w.o),
            (gates::assemble_o_star(layout, &o_t, &o_a).unwrap(), &w.o_star),
        ] {
            let cols = seq.columns(&inputs, Execution::Parallel);
            for (j, col) in cols.iter().enumerate() {
                let want: Vec<(usize, c64)> = mat.column(j).iter().map(|&(i, v)| (i << 1, v)).collect();
                assert!(column_distance(col, &want) < 1e-12, "m={m} column {j}");
            }
        }
    }
}

#[test]
fn gate_level_walk_matches_matrix_level_on_the_walk_block() {
    for m in 1..=3 {
        let w = walk_for(m, 3 + m as u64, AcceptanceChoice::Metropolis);
        let seq = gates::assemble_w(m, &w).unwrap();
        assert_eq!(seq.qubits, 4 * m + 3);
        let inputs = gates::walk_block_inputs(m);
        // every column for small m, a spread of columns at m = 3
        let picked: Vec<usize> = if m < 3 { (0..inputs.len()).collect() } else { (0..inputs.len()).step_by(97).collect() };
        let cols = seq.columns(&picked.iter().map(|&j| inputs[j]).collect::<Vec<_>>(), Execution::Parallel);
        let mut worst = 0.0f64;
        for (&j, col) in picked.iter().zip(&cols) {
            let want: Vec<(usize, c64)> = w.walk.column(j).iter().map(|&(i, v)| (i << 2, v)).collect();
            worst = worst.max(column_distance(col, &want));
        }
        assert!(worst < 1e-12, "m={m}: {worst}");
    }
}

#[test]
fn gate_level_walk_matches_full_register_composition() {
    let w = walk_for(1, 2, AcceptanceChoice::Glauber);
    let seq = gates::assemble_w(1, &w).unwrap();
    let full = gates::matrix_level_w_full(&w);
    assert!(seq.to_operator(Execution::Sequential).distance(&full) < 1e-12);
    assert!(full.isometry_defect() < 1e-12);
}

#[test]
fn dense_and_sparse_simulation_agree() {
    let w = walk_for(1, 4, AcceptanceChoice::Metropolis);
    let seq = gates::assemble_w(1, &w).unwrap();
    let dim = seq.dim();
    let psi: Vec<c64> = (0..dim).map(|k| c64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
    let dense = seq.apply(&psi).unwrap();
    let sparse_in: Vec<(usize, c64)> = psi.iter().copied().enumerate().collect();
    let mut sparse = vec![c64::new(0.0, 0.0); dim];
    for (i, v) in seq.apply_sparse(&sparse_in) {
        sparse[i] = v;
    }
    let d = dense.iter().zip(&sparse).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(d < 1e-12);
}

#[test]
fn walk_oracle_calls() {
    let w = walk_for(2, 1, AcceptanceChoice::Glauber);
    let calls = gates::assemble_w(2, &w).unwrap().oracle_calls();
    let expect: Vec<(&str, usize)> = vec![("O_A", 2), ("O_A†", 2), ("O_T", 2), ("O_T†", 2)];
    assert_eq!(calls.iter().map(|(k, v)| (k.as_str(), *v)).collect::<Vec<_>>(), expect);
}

#[test]
fn adjoint_sequence_inverts() {
    let w = walk_for(1, 8, AcceptanceChoice::Metropolis);
    let seq = gates::assemble_w(1, &w).unwrap();
    let mut round = seq.clone();
    round.append(&seq.adjoint()).unwrap();
    let id = Operator::identity(seq.dim());
    assert!(round.to_operator(Execution::Sequential).distance(&id) < 1e-12);
}

#[test]
fn diagonalized_acceptance_oracle_matches() {
    for m in [1, 2] {
        let inst = random_instance(1 << m, 12, AcceptanceChoice::Metropolis).unwrap();
        let seq = gates::diagonalize_o_a(m, &inst.a).unwrap();
        let o_a = walk::build_o_a(&inst.a);
        assert!(seq.to_operator(Execution::Sequential).distance(&o_a) < 1e-12);
    }
}

#[test]
fn mismatched_register_width_is_rejected() {
    let w = walk_for(1, 0, AcceptanceChoice::Glauber);
    assert!(gates::assemble_w(2, &w).is_err());
    let mut seq = GateSequence::new(3);
    assert!(seq.push(Gate::H(5)).is_err());
}

#[test]
fn qubit_counts() {
    let audit = gates::qubit_audit(6);
    assert_eq!(audit.walk_qubits(), 27);
    assert_eq!(audit.cswap_qubits(), 13);
    for m in 1..=3 {
        let w = walk_for(m, 0, AcceptanceChoice::Glauber);
        let seq = gates::assemble_w(m, &w).unwrap();
        assert_eq!(gates::audit_sequence(&seq, m).unwrap(), gates::qubit_audit(m).walk_qubits());
    }
}
