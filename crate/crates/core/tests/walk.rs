use dualwalk::c64;
use dualwalk::chain::{self, AcceptanceChoice};
use dualwalk::dual;
use dualwalk::lab::{k2, random_instance};
use dualwalk::linalg;
use dualwalk::walk::{self, oracles, MhWalk, Operator, Registers};
use dualwalk::Tolerances;
use faer::Mat;

fn amp(op: &Operator, space: &Registers, input: &[usize], output: &[usize]) -> c64 {
    let target = space.encode(output);
    op.column(space.encode(input)).iter().filter(|e| e.0 == target).map(|e| e.1).sum()
}

fn close(a: c64, b: f64) -> bool {
    (a - c64::new(b, 0.0)).norm() < 1e-12
}

#[test]
fn k2_glauber_oracles() {
    let inst = k2(AcceptanceChoice::Glauber);
    let w = MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap();
    let (s13, s23) = ((1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt());

    let two = Registers::new(&[2, 2]);
    assert!(close(amp(&w.o_t, &two, &[0, 0], &[0, 1]), 1.0));

    let coin = Registers::new(&[2, 2, 2]);
    assert!(close(amp(&w.o_a, &coin, &[0, 1, 0], &[0, 1, 0]), s23));
    assert!(close(amp(&w.o_a, &coin, &[0, 1, 1], &[0, 1, 0]), -s13));
    assert!(close(amp(&w.o_a, &coin, &[0, 1, 0], &[0, 1, 1]), s13));

    let three = Registers::new(&[2, 2, 2, 2]);
    assert!(close(amp(&w.o_cal_a, &three, &[0, 1, 0, 0], &[0, 0, 1, 0]), s23));
    assert!(close(amp(&w.o_cal_a, &three, &[0, 1, 0, 0], &[0, 1, 0, 0]), s13));
    assert!(close(amp(&w.o_cal_a_star, &three, &[0, 1, 0, 0], &[0, 1, 0, 0]), s23));
    assert!(close(amp(&w.o_cal_a_star, &three, &[0, 1, 0, 0], &[0, 1, 1, 0]), s13));

    let four = oracles::step_space(2);
    assert!(close(amp(&w.o, &four, &[0, 1, 0, 0, 0], &[0, 1, 0, 1, 0]), s23));
    assert!(close(amp(&w.o, &four, &[0, 1, 0, 0, 0], &[0, 1, 1, 0, 0]), s13));
    assert!(close(amp(&w.o_star, &four, &[0, 1, 0, 0, 0], &[0, 1, 1, 0, 0]), s13));
    assert!(close(amp(&w.o_star, &four, &[0, 1, 0, 0, 0], &[0, 1, 0, 1, 0]), s23));
}

#[test]
fn o_a_extreme_blocks() {
    for (acc, expect) in [(0.0, [[1.0, 0.0], [0.0, 1.0]]), (1.0, [[0.0, -1.0], [1.0, 0.0]])] {
        assert_eq!(oracles::coin(acc), expect);
    }
}

#[test]
fn o_cal_a_on_distinct_registers_swaps_the_last_two() {
    let inst = random_instance(3, 1, AcceptanceChoice::Metropolis).unwrap();
    let o_a = walk::build_o_a(&inst.a);
    let o = walk::build_o_cal_a(&o_a, 3);
    let space = Registers::new(&[3, 3, 3, 2]);
    assert!(close(amp(&o, &space, &[0, 1, 2, 0], &[0, 2, 1, 0]), 1.0));
    assert!(close(amp(&o, &space, &[2, 2, 2, 0], &[2, 2, 2, 0]), 1.0));
}

#[test]
fn ancilla_returns_to_zero_on_every_basis_input() {
    for n in [2, 3, 4] {
        let inst = random_instance(n, 7, AcceptanceChoice::Glauber).unwrap();
        let o = walk::build_o_cal_a(&walk::build_o_a(&inst.a), n);
        let space = Registers::new(&[n, n, n, 2]);
        for j in 0..space.size() / 2 {
            let leak: f64 = o.column(2 * j).iter().filter(|e| e.0 % 2 == 1).map(|e| e.1.norm_sqr()).sum();
            assert!(leak < 1e-24, "n={n} input {:?}", space.decode(2 * j));
        }
    }
}

#[test]
fn every_operator_is_unitary() {
    for (n, choice) in [(3, AcceptanceChoice::Glauber), (4, AcceptanceChoice::Metropolis), (5, AcceptanceChoice::MetropolisLazy)] {
        let inst = random_instance(n, 11, choice).unwrap();
        let w = MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap();
        for op in [&w.o_t, &w.o_a, &w.o_cal_a, &w.o_cal_a_star, &w.o, &w.o_star, &w.spue.u, &w.walk] {
            assert!(op.isometry_defect() < 1e-12);
        }
        assert!(w.spue.iso.isometry_defect() < 1e-12);
        assert!(w.spue.u.distance(&w.spue.u.adjoint()) < 1e-15);
    }
}

#[test]
fn o_t_projected_block_is_square_root_of_t() {
    let inst = random_instance(5, 3, AcceptanceChoice::Metropolis).unwrap();
    let o_t = walk::build_o_t(&inst.t);
    for x in 0..5 {
        for &(i, v) in o_t.column(x * 5) {
            assert!((v.re - inst.t.get(x, i % 5).sqrt()).abs() < 1e-15);
        }
    }
}

#[test]
fn oracle_blocks_reproduce_pair_kernels() {
    for (n, seed) in [(3, 2), (4, 5), (5, 8)] {
        for choice in [AcceptanceChoice::Glauber, AcceptanceChoice::Metropolis] {
            let inst = random_instance(n, seed, choice).unwrap();
            let w = MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap();
            let bp = walk::step_isometry(w.pairs.p.as_ref()).dense();
            let bs = walk::step_isometry(w.pairs.p_star.as_ref()).dense();
            assert!(linalg::max_abs_diff_c(w.o_block().as_ref(), bp.as_ref()) < 1e-12);
            assert!(linalg::max_abs_diff_c(w.o_star_block().as_ref(), bs.as_ref()) < 1e-12);

            // amplitude² of O on edge inputs equals the rows of the edge-space dual kernels
            let dk = dual::dual_kernels(&inst.t, &inst.a, &w.space).unwrap();
            let ob = w.o_block();
            for (e, &(x, y)) in w.space.edges().iter().enumerate() {
                for (f, &(z, t)) in w.space.edges().iter().enumerate() {
                    let a = ob[((x * n + y) * n * n + z * n + t, x * n + y)];
                    assert!((a.norm_sqr() - dk.p.get(e, f)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn step_isometry_of_reversible_kernel_encodes_the_discriminant() {
    let inst = random_instance(6, 4, AcceptanceChoice::Metropolis).unwrap();
    let b = walk::step_isometry(inst.p.matrix());
    assert!(b.operator().isometry_defect() < 1e-12);
    let swap = walk::qubitize::swap_halves(6);
    let enc = b.operator().then(&swap).then(&b.operator().adjoint()).to_dense();
    let d = chain::discriminant(&inst.p, &inst.pi, &Tolerances::default()).unwrap();
    assert!(linalg::max_abs_diff_c(enc.as_ref(), linalg::to_complex(d.as_ref()).as_ref()) < 1e-12);
}

#[test]
fn k2_step_isometry_column() {
    let inst = k2(AcceptanceChoice::Glauber);
    let space = dual::edge_space(&inst.t);
    let dk = dual::dual_kernels(&inst.t, &inst.a, &space).unwrap();
    let b = walk::step_isometry(dk.p.matrix()).dense();
    assert!((b[(0, 0)].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!((b[(1, 0)].re - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn hermitianization_of_a_random_block() {
    let a = Mat::from_fn(2, 2, |i, j| c64::new([[0.3, -0.2], [0.5, 0.1]][i][j], [[0.1, 0.0], [-0.2, 0.4]][i][j]));
    let u = Operator::from_dense(a.as_ref());
    let id = Operator::identity(2);
    let spue = walk::hermitianize(&u, &id, &id);
    let (ev, _) = linalg::hermitian_eigen(spue.encoded().as_ref()).unwrap();
    let mut s = a.singular_values().unwrap();
    s.extend(s.clone().iter().map(|v| -v));
    s.sort_by(f64::total_cmp);
    for (x, y) in ev.iter().zip(&s) {
        assert!((x - y).abs() < 1e-10);
    }

    let one = Operator::identity(1);
    let spue = walk::hermitianize(&one, &one, &one);
    let (ev, _) = linalg::hermitian_eigen(spue.encoded().as_ref()).unwrap();
    assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
}

#[test]
fn k2_glauber_walk_fixes_the_generator_and_extracts_pi() {
    let inst = k2(AcceptanceChoice::Glauber);
    let w = MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap();
    let g = w.stationary_generator();
    let wg = w.walk.apply(&g);
    let diff: Vec<c64> = wg.iter().zip(&g).map(|(a, b)| a - b).collect();
    assert!(linalg::norm(&diff) < 1e-10);
    let out = w.extract(&g).unwrap();
    assert!(linalg::fidelity(&out, &w.extraction_target()) > 1.0 - 1e-12);
    let space = Registers::new(&[2, 2, 2, 2, 2, 2]);
    let h = 0.5f64.sqrt();
    assert!((out[space.encode(&[0, 0, 0, 0, 0, 0])].re - h * (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!((out[space.encode(&[1, 1, 0, 0, 0, 0])].re - h * (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!(w.check_stationary_input(&g, 1e-10).is_ok());
    assert!(w.check_stationary_input(&w.default_initial_state(), 1e-10).is_err());
}

#[test]
fn cswap_block_is_the_discriminant() {
    let inst = k2(AcceptanceChoice::Metropolis);
    let c = walk::cswap_spue(&walk::build_o_t(&inst.t), &walk::build_o_a(&inst.a), 2);
    assert!((c.block[(0, 1)] - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((c.block[(0, 0)] - 0.5).abs() < 1e-15);
    assert!(c.unitary.distance(&c.unitary.adjoint()) < 1e-15);
}

#[test]
fn small_walk_spectrum_paths_agree() {
    let inst = random_instance(3, 9, AcceptanceChoice::Metropolis).unwrap();
    let w = MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap();
    let full = walk::walk_spectrum_full(&w.walk, 1e-8).unwrap();
    let enc = linalg::symmetric_eigenvalues(w.encoded().as_ref()).unwrap();
    let from_enc = walk::walk_spectrum_from_encoded(&enc, 1e-8);
    let m = linalg::match_spectra(&full.nontrivial, &from_enc.nontrivial, 1e-8);
    assert!(m.is_equal(), "{m:?}");
    assert!((full.angular_gap - from_enc.angular_gap).abs() < 1e-8);
    let (res, norm) = walk::eigvec_residual(&w.spue, &w.walk, 1e-8).unwrap();
    assert!(res < 1e-9 && norm < 1e-9);
    let (dim, fid) = w.stationary_intersection(1e-8).unwrap();
    assert_eq!(dim, 1);
    assert!(fid > 1.0 - 1e-10);
}

#[test]
fn walk_rejects_state_spaces_beyond_the_dense_limit() {
    let inst = random_instance(17, 1, AcceptanceChoice::Metropolis).unwrap();
    let err = MhWalk::new(&inst.t, &inst.a, &Tolerances::default()).unwrap_err();
    assert!(matches!(err, dualwalk::Error::TooManyStates { n: 17, max: 16 }));
}
