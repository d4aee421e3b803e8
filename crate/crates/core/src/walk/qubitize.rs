//! Step isometries, Hermitianization and the qubitized walk of an MH chain.

use faer::{c64, Mat, MatRef};

use super::oracles::{self, step_space};
use super::{Operator, Registers};
use crate::chain::{self, AcceptanceMatrix, ProbabilityVector, ValidatedProposal};
use crate::dual::{self, EdgeMeasure, EdgeSpace, PairKernels};
use crate::linalg;
use crate::{Error, Result, Tolerances};

fn re(v: f64) -> c64 {
    c64::new(v, 0.0)
}

/// `□ = Σ_x |x⟩|K(x,·)⟩⟨x|` from `C^N` to `C^N ⊗ C^N`.
#[derive(Clone, Debug)]
pub struct StepIsometry(Operator);

impl StepIsometry {
    pub fn new(k: MatRef<'_, f64>) -> Self {
        let n = k.nrows();
        Self(Operator::from_columns(n * n, n, |x| {
            (0..n).filter(|&y| k[(x, y)] > 0.0).map(|y| (x * n + y, re(k[(x, y)].sqrt()))).collect()
        }))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn dense(&self) -> Mat<c64> {
        self.0.to_dense()
    }

    pub fn source_dim(&self) -> usize {
        self.0.ncols()
    }
}

pub fn step_isometry(k: MatRef<'_, f64>) -> StepIsometry {
    StepIsometry::new(k)
}

/// `SWAP` of the two halves of `C^N ⊗ C^N`.
pub fn swap_halves(n: usize) -> Operator {
    Operator::permutation(n * n, |j| (j % n) * n + j / n)
}

/// Symmetric projected unitary encoding `(𝒰, ⊠)`.
#[derive(Clone, Debug)]
pub struct Spue {
    pub u: Operator,
    pub iso: Operator,
}

/// `𝒰 = (|0⟩⟨0| ⊗ U + |1⟩⟨1| ⊗ U†)(X ⊗ 1)`, `⊠ = |0⟩⟨0| ⊗ □_L + |1⟩⟨1| ⊗ □_R`.
pub fn hermitianize(u: &Operator, left: &Operator, right: &Operator) -> Spue {
    let d = u.nrows();
    let s = left.ncols();
    assert_eq!((left.nrows(), right.nrows(), right.ncols()), (d, d, s));
    let u_dag = u.adjoint();
    let herm = Operator::from_columns(2 * d, 2 * d, |j| {
        if j < d {
            u_dag.column(j).iter().map(|&(i, v)| (d + i, v)).collect()
        } else {
            u.column(j - d).to_vec()
        }
    });
    let iso = Operator::from_columns(2 * d, 2 * s, |j| {
        if j < s {
            left.column(j).to_vec()
        } else {
            right.column(j - s).iter().map(|&(i, v)| (d + i, v)).collect()
        }
    });
    Spue { u: herm, iso }
}

impl Spue {
    /// `⊠† 𝒰 ⊠`.
    pub fn encoded(&self) -> Mat<c64> {
        self.iso.then(&self.u).then(&self.iso.adjoint()).to_dense()
    }

    /// `W = (2⊠⊠† - 1) 𝒰`.
    pub fn walk(&self) -> Operator {
        self.u.then(&Operator::reflection_through(&self.iso))
    }
}

pub fn qubitized_walk(spue: &Spue) -> Operator {
    spue.walk()
}

/// Largest state space [`MhWalk`] accepts: the walk acts on `2n⁴` amplitudes and the
/// stationary checks diagonalize dense `2n²`-dimensional blocks.
pub const MAX_WALK_STATES: usize = 16;

/// Everything needed to run the walk of one MH chain at the matrix level.
///
/// Register layout: `[herm, r1, r2, r3, r4]` for `W`, with an extra trailing `flag` qubit
/// whenever the oracles `O`, `O⋆` are involved.
#[derive(Clone, Debug)]
pub struct MhWalk {
    pub n: usize,
    pub t: ValidatedProposal,
    pub a: AcceptanceMatrix,
    pub pi: ProbabilityVector,
    pub space: EdgeSpace,
    pub nu: EdgeMeasure,
    pub pairs: PairKernels,
    pub o_t: Operator,
    pub o_a: Operator,
    pub o_cal_a: Operator,
    pub o_cal_a_star: Operator,
    pub o: Operator,
    pub o_star: Operator,
    pub spue: Spue,
    pub walk: Operator,
}

impl MhWalk {
    pub fn new(t: &ValidatedProposal, a: &AcceptanceMatrix, tol: &Tolerances) -> Result<Self> {
        let n = t.n();
        if n > MAX_WALK_STATES {
            return Err(Error::TooManyStates { n, max: MAX_WALK_STATES });
        }
        let p = chain::mh_kernel(t, a)?;
        let pi = chain::analyze(&p, tol)?.pi;
        let space = dual::edge_space(t);
        let nu = dual::nu(&pi, t, &space)?;
        let pairs = dual::pair_kernels(t, a);

        let o_t = oracles::build_o_t(t);
        let o_a = oracles::build_o_a(a);
        let o_cal_a = oracles::build_o_cal_a(&o_a, n);
        let o_cal_a_star = oracles::build_o_cal_a_star(&o_cal_a, n);
        let o = oracles::build_o(&o_t, &o_cal_a, n);
        let o_star = oracles::build_o_star(&o_t, &o_cal_a_star, n);

        let box_p = StepIsometry::new(pairs.p.as_ref());
        let box_star = StepIsometry::new(pairs.p_star.as_ref());
        let spue = hermitianize(&swap_halves(n * n), box_star.operator(), box_p.operator());
        let walk = spue.walk();
        Ok(Self {
            n,
            t: t.clone(),
            a: a.clone(),
            pi,
            space,
            nu,
            pairs,
            o_t,
            o_a,
            o_cal_a,
            o_cal_a_star,
            o,
            o_star,
            spue,
            walk,
        })
    }

    /// Dimension of the walk space, `2 n⁴`.
    pub fn dim(&self) -> usize {
        2 * self.n.pow(4)
    }

    /// `|ν⟩` on all ordered pairs.
    pub fn nu_state(&self) -> Vec<c64> {
        let mut v = vec![re(0.0); self.n * self.n];
        for (k, &(x, y)) in self.space.edges().iter().enumerate() {
            v[x * self.n + y] = re(self.nu.as_slice()[k].sqrt());
        }
        v
    }

    /// `|+, ν⟩` in the source space of `⊠`.
    pub fn plus_nu(&self) -> Vec<c64> {
        let nu = self.nu_state();
        let h = 0.5f64.sqrt();
        nu.iter().chain(&nu).map(|&v| v * h).collect()
    }

    /// `⊠|+, ν⟩`.
    pub fn stationary_generator(&self) -> Vec<c64> {
        self.spue.iso.apply(&self.plus_nu())
    }

    /// `⊠(|+⟩ ⊗ uniform superposition over 𝒮)`, the default initial state.
    pub fn default_initial_state(&self) -> Vec<c64> {
        let amp = re((1.0 / (2.0 * self.space.len() as f64)).sqrt());
        let mut src = vec![re(0.0); 2 * self.n * self.n];
        for &(x, y) in self.space.edges() {
            src[x * self.n + y] = amp;
            src[self.n * self.n + x * self.n + y] = amp;
        }
        self.spue.iso.apply(&src)
    }

    /// Encoded operator `⊠†𝒰⊠`, the discriminant of the dilation on all pairs.
    pub fn encoded(&self) -> Mat<f64> {
        let e = self.spue.encoded();
        Mat::from_fn(e.nrows(), e.ncols(), |i, j| e[(i, j)].re)
    }

    /// `□` of `𝒫` read from the oracle `O` on ancilla-zero inputs.
    pub fn o_block(&self) -> Mat<c64> {
        oracles::projected_block(&self.o, self.n * self.n, self.n * self.n, 2)
    }

    pub fn o_star_block(&self) -> Mat<c64> {
        oracles::projected_block(&self.o_star, self.n * self.n, self.n * self.n, 2)
    }

    /// `|+⟩|π⟩|0⟩|0,0⟩` on `[herm, r1, r2, r3, r4, flag]`.
    pub fn extraction_target(&self) -> Vec<c64> {
        let n = self.n;
        let space = Registers::new(&[2, n, n, n, n, 2]);
        let mut v = vec![re(0.0); space.size()];
        let h = 0.5f64.sqrt();
        for b in 0..2 {
            for x in 0..n {
                v[space.encode(&[b, x, 0, 0, 0, 0])] = re(h * self.pi[x].sqrt());
            }
        }
        v
    }

    /// Inverse of the state preparation: `O_T† O† (|0⟩⟨0| ⊗ S + |1⟩⟨1| ⊗ 1)`, taking a state on
    /// `[herm, r1..r4]` to `[herm, r1..r4, flag]`.
    pub fn extract(&self, state: &[c64]) -> Result<Vec<c64>> {
        let n = self.n;
        let n4 = n.pow(4);
        if state.len() != 2 * n4 {
            return Err(Error::DimensionMismatch { expected: 2 * n4, found: state.len() });
        }
        let swap = swap_halves(n * n);
        let mut lifted = vec![re(0.0); 4 * n4];
        let first = swap.apply(&state[..n4]);
        for (i, v) in first.into_iter().chain(state[n4..].iter().copied()).enumerate() {
            lifted[2 * i] = v;
        }
        let steps = step_space(n);
        let o_dag = self.o.adjoint();
        let o_t_dag = Operator::embed(&steps, &self.o_t.adjoint(), &Registers::new(&[n, n]), &[0, 1]);
        let undo = o_dag.then(&o_t_dag);
        let half = steps.size();
        let mut out = undo.apply(&lifted[..half]);
        out.extend(undo.apply(&lifted[half..]));
        Ok(out)
    }

    /// Rejects inputs that are not `⊠|+, ν⟩` up to a global phase.
    pub fn check_stationary_input(&self, state: &[c64], tol: f64) -> Result<()> {
        let g = self.stationary_generator();
        let deviation = 1.0 - linalg::fidelity(&g, state);
        if deviation > tol {
            return Err(Error::NotStationaryInput { deviation });
        }
        Ok(())
    }

    /// Orthonormal basis, in the source space of `⊠`, of the `c` with `W⊠c = ⊠c`. Since `⊠` is an
    /// isometry, `⊠` of these columns is an orthonormal basis of `ker(W - 1) ∩ range(⊠)`.
    pub fn stationary_basis(&self, tol: f64) -> Result<Mat<c64>> {
        let w_iso = self.spue.iso.then(&self.walk);
        let minus = Operator::from_columns(self.dim(), self.spue.iso.ncols(), |j| {
            let mut col = w_iso.column(j).to_vec();
            for &(i, v) in self.spue.iso.column(j) {
                match col.iter_mut().find(|e| e.0 == i) {
                    Some(e) => e.1 -= v,
                    None => col.push((i, -v)),
                }
            }
            col
        });
        linalg::null_space(minus.to_dense().as_ref(), tol)
    }

    /// Dimension of `ker(W - 1) ∩ range(⊠)` and the fidelity of its first basis vector with
    /// `|+, ν⟩`.
    pub fn stationary_intersection(&self, tol: f64) -> Result<(usize, f64)> {
        let ns = self.stationary_basis(tol)?;
        let fid = if ns.ncols() > 0 {
            let u: Vec<c64> = (0..ns.nrows()).map(|i| ns[(i, 0)]).collect();
            linalg::fidelity(&u, &self.plus_nu())
        } else {
            0.0
        };
        Ok((ns.ncols(), fid))
    }
}

/// Eigenphases of the walk: either from the full operator or from the encoded spectrum.
#[derive(Clone, Debug)]
pub struct WalkSpectrum {
    /// Eigenvalues of `W` with the `±1` eigenvalues removed.
    pub nontrivial: Vec<c64>,
    /// Smallest nonzero eigenphase `Δ`.
    pub angular_gap: f64,
}

/// From a dense diagonalization of `W` (small `n` only).
pub fn walk_spectrum_full(walk: &Operator, tol: f64) -> Result<WalkSpectrum> {
    let values = if walk.is_real() {
        linalg::eigenvalues(walk.to_dense_real().as_ref())?
    } else {
        linalg::complex_eigenvalues(walk.to_dense().as_ref())?
    };
    let nontrivial: Vec<c64> =
        values.iter().copied().filter(|z| (z - 1.0).norm() > tol && (z + 1.0).norm() > tol).collect();
    let angular_gap = values
        .iter()
        .map(|z| z.arg().abs())
        .filter(|&th| th > tol)
        .fold(std::f64::consts::PI, f64::min);
    Ok(WalkSpectrum { nontrivial, angular_gap })
}

/// `{e^{±i acos λ}}` for the eigenvalues `λ ∈ (-1, 1)` of the encoded operator.
pub fn walk_spectrum_from_encoded(encoded_eigenvalues: &[f64], tol: f64) -> WalkSpectrum {
    let mut nontrivial = Vec::new();
    let mut angular_gap = std::f64::consts::PI;
    for &l in encoded_eigenvalues {
        if (l - 1.0).abs() <= tol || (l + 1.0).abs() <= tol {
            continue;
        }
        let th = l.clamp(-1.0, 1.0).acos();
        nontrivial.push(c64::from_polar(1.0, th));
        nontrivial.push(c64::from_polar(1.0, -th));
        angular_gap = angular_gap.min(th);
    }
    WalkSpectrum { nontrivial, angular_gap }
}

/// Largest `‖W μ - e^{±iθ} μ‖` and `|‖μ‖ - 1|` over the vectors
/// `μ± = (e^{±iθ} - 𝒰)⊠v / (sqrt(2) sin θ)` for interior eigenpairs `(cos θ, v)` of the
/// encoded operator.
pub fn eigvec_residual(spue: &Spue, walk: &Operator, tol: f64) -> Result<(f64, f64)> {
    let enc = spue.encoded();
    let (values, vectors) = linalg::hermitian_eigen(enc.as_ref())?;
    let mut worst_residual = 0.0f64;
    let mut worst_norm = 0.0f64;
    for (k, &l) in values.iter().enumerate() {
        if (l - 1.0).abs() <= tol || (l + 1.0).abs() <= tol {
            continue;
        }
        let th = l.clamp(-1.0, 1.0).acos();
        let v: Vec<c64> = (0..vectors.nrows()).map(|i| vectors[(i, k)]).collect();
        let bv = spue.iso.apply(&v);
        let ubv = spue.u.apply(&bv);
        for sign in [1.0, -1.0] {
            let phase = c64::from_polar(1.0, sign * th);
            let scale = 1.0 / (2f64.sqrt() * th.sin());
            let mu: Vec<c64> = bv.iter().zip(&ubv).map(|(&b, &ub)| (phase * b - ub) * scale).collect();
            let wmu = walk.apply(&mu);
            let r: Vec<c64> = wmu.iter().zip(&mu).map(|(&a, &b)| a - phase * b).collect();
            worst_residual = worst_residual.max(linalg::norm(&r));
            worst_norm = worst_norm.max((linalg::norm(&mu) - 1.0).abs());
        }
    }
    Ok((worst_residual, worst_norm))
}
