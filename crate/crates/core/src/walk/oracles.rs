//! Oracles for the proposal and the acceptance, and the circuits built from them.

use faer::{c64, Mat};

use super::{Arith, Operator, Registers};
use crate::chain::{AcceptanceMatrix, ValidatedProposal};

fn re(v: f64) -> c64 {
    c64::new(v, 0.0)
}

/// `O_T` on `[source, target]`: `|x, 0⟩ ↦ |x⟩ ⊗ Σ_y sqrt(T(x,y)) |y⟩`.
///
/// Only the `target = 0` column is prescribed. The rest of each block is completed by modified
/// Gram-Schmidt over the standard basis in increasing order, so the result is real orthogonal
/// and deterministic.
pub fn build_o_t(t: &ValidatedProposal) -> Operator {
    let n = t.n();
    let blocks: Vec<Mat<f64>> = (0..n).map(|x| complete_first_column(&(0..n).map(|y| t.get(x, y).sqrt()).collect::<Vec<_>>())).collect();
    Operator::from_columns(n * n, n * n, |j| {
        let (x, k) = (j / n, j % n);
        (0..n).filter(|&y| blocks[x][(y, k)] != 0.0).map(|y| (x * n + y, re(blocks[x][(y, k)]))).collect()
    })
}

/// Orthogonal matrix whose first column is the unit vector `v`.
pub fn complete_first_column(v: &[f64]) -> Mat<f64> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = vec![v.to_vec()];
    for seed in 0..n {
        if basis.len() == n {
            break;
        }
        let mut w: Vec<f64> = (0..n).map(|i| if i == seed { 1.0 } else { 0.0 }).collect();
        for b in &basis {
            let c: f64 = b.iter().zip(&w).map(|(p, q)| p * q).sum();
            w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            // A second pass keeps the completion orthogonal to machine precision.
            for b in &basis {
                let c: f64 = b.iter().zip(&w).map(|(p, q)| p * q).sum();
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            basis.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    Mat::from_fn(n, n, |i, j| basis[j][i])
}

/// The coin rotation `[[sqrt(1-A), -sqrt(A)], [sqrt(A), sqrt(1-A)]]`.
pub fn coin(acceptance: f64) -> [[f64; 2]; 2] {
    let (c, s) = ((1.0 - acceptance).sqrt(), acceptance.sqrt());
    [[c, -s], [s, c]]
}

/// `O_A` on `[x, y, coin]`, block diagonal over `|x, y⟩`.
pub fn build_o_a(a: &AcceptanceMatrix) -> Operator {
    let n = a.n();
    Operator::from_columns(2 * n * n, 2 * n * n, |j| {
        let (pair, b) = (j / 2, j % 2);
        let m = coin(a.get(pair / n, pair % n));
        [(2 * pair, re(m[0][b])), (2 * pair + 1, re(m[1][b]))].into_iter().filter(|e| e.1 != re(0.0)).collect()
    })
}

/// `O_𝒜` on `[r1, r2, r3, flag]`, following the phases of its construction:
/// flip the flag when `r1 = r2`; swap `r2, r3` when the flag is set; apply `O_A` to
/// `(r1, r2)` with the flag as coin when `r3 = r1`; swap `r2, r3` when the flag is clear;
/// flip the flag when `r1 = r3`.
pub fn build_o_cal_a(o_a: &Operator, n: usize) -> Operator {
    let space = Registers::new(&[n, n, n, 2]);
    let flip_12 = Operator::basis_map(&space, |d| {
        if d[0] == d[1] {
            d[3] ^= 1
        }
    });
    let swap_on_1 = Operator::basis_map(&space, |d| {
        if d[3] == 1 {
            d.swap(1, 2)
        }
    });
    let controlled = Operator::embed_controlled(&space, o_a, &Registers::new(&[n, n, 2]), &[0, 1, 3], |d| d[2] == d[0]);
    let swap_on_0 = Operator::basis_map(&space, |d| {
        if d[3] == 0 {
            d.swap(1, 2)
        }
    });
    let flip_13 = Operator::basis_map(&space, |d| {
        if d[0] == d[2] {
            d[3] ^= 1
        }
    });
    flip_12.then(&swap_on_1).then(&controlled).then(&swap_on_0).then(&flip_13)
}

/// `|x, y, z⟩ ↦ |x, z, y⟩ ↦ |x, x ⊕ z ⊕ y, y⟩` on `[r1, r2, r3, flag]`.
pub fn star_permutation(n: usize) -> Operator {
    let arith = Arith::for_dim(n);
    Operator::basis_map(&Registers::new(&[n, n, n, 2]), |d| {
        let (x, y, z) = (d[0], d[1], d[2]);
        d[1] = arith.mix(x, z, y);
        d[2] = y;
    })
}

/// `O_𝒜⋆`: `O_𝒜` followed by [`star_permutation`].
pub fn build_o_cal_a_star(o_cal_a: &Operator, n: usize) -> Operator {
    o_cal_a.then(&star_permutation(n))
}

/// Space `[r1, r2, r3, r4, flag]` of `O` and `O⋆`.
pub fn step_space(n: usize) -> Registers {
    Registers::new(&[n, n, n, n, 2])
}

/// `r_dst += r_src`.
pub fn copy(space: &Registers, n: usize, src: usize, dst: usize) -> Operator {
    let arith = Arith::for_dim(n);
    Operator::basis_map(space, |d| d[dst] = arith.add(d[dst], d[src]))
}

/// `O`: `O_T` from r1 into r3, copy r1 into r4, `O_𝒜` on `(r1, r3, r4, flag)`.
/// `O|x, y, 0, 0, 0⟩ = |x, y⟩ ⊗ Σ sqrt(𝒫((x,y),(z,t))) |z, t⟩ ⊗ |0⟩`.
pub fn build_o(o_t: &Operator, o_cal_a: &Operator, n: usize) -> Operator {
    let space = step_space(n);
    let ot = Operator::embed(&space, o_t, &Registers::new(&[n, n]), &[0, 2]);
    let oa = Operator::embed(&space, o_cal_a, &Registers::new(&[n, n, n, 2]), &[0, 2, 3, 4]);
    ot.then(&copy(&space, n, 0, 3)).then(&oa)
}

/// `O⋆`: copy r1 into r3, `O_𝒜⋆` on `(r1, r2, r3, flag)`, `O_T` from r3 into r4.
pub fn build_o_star(o_t: &Operator, o_cal_a_star: &Operator, n: usize) -> Operator {
    let space = step_space(n);
    let oa = Operator::embed(&space, o_cal_a_star, &Registers::new(&[n, n, n, 2]), &[0, 1, 2, 4]);
    let ot = Operator::embed(&space, o_t, &Registers::new(&[n, n]), &[2, 3]);
    copy(&space, n, 0, 2).then(&oa).then(&ot)
}

/// Columns of `op` on inputs `|a, 0⟩` (ancilla block of dimension `ancilla` all zero), read
/// back on outputs whose trailing `flag` register is zero: the projected block `⟨0|op|0⟩`
/// as a `(pair · rest) × pair` matrix.
pub fn projected_block(op: &Operator, inputs: usize, ancilla: usize, flag: usize) -> Mat<c64> {
    let rows = op.nrows() / flag;
    let mut m = Mat::zeros(rows, inputs);
    for a in 0..inputs {
        for &(i, v) in op.column(a * ancilla * flag) {
            if i % flag == 0 {
                m[(i / flag, a)] += v;
            }
        }
    }
    m
}

/// Unitary `V = O_T† O_A† S^c O_A O_T` on `[r1, r2, coin]` and its projected block.
#[derive(Clone, Debug)]
pub struct CswapSpue {
    pub unitary: Operator,
    /// `⟨0,0| V |0,0⟩`, equal to the discriminant of the MH kernel.
    pub block: Mat<f64>,
}

pub fn cswap_spue(o_t: &Operator, o_a: &Operator, n: usize) -> CswapSpue {
    let space = Registers::new(&[n, n, 2]);
    let ot = Operator::embed(&space, o_t, &Registers::new(&[n, n]), &[0, 1]);
    let swap = Operator::basis_map(&space, |d| {
        if d[2] == 1 {
            d.swap(0, 1)
        }
    });
    let half = ot.then(o_a);
    let unitary = half.then(&swap).then(&half.adjoint());
    let mut block = Mat::zeros(n, n);
    for x in 0..n {
        for &(i, v) in unitary.column(space.encode(&[x, 0, 0])) {
            let d = space.decode(i);
            if d[1] == 0 && d[2] == 0 {
                block[(d[0], x)] += v.re;
            }
        }
    }
    CswapSpue { unitary, block }
}

/// `θ(x,y) = -asin(sqrt(A(x,y)))`, so that `exp(iθY)` is the coin of [`build_o_a`].
pub fn acceptance_angle(acceptance: f64) -> f64 {
    -acceptance.sqrt().asin()
}
