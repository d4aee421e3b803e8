//! The lift of a Metropolis-Hastings chain to the directed edges of its proposal.
//!
//! A state of the dual chain is an edge `(x, y)` with `T(x, y) > 0`: the current point and the
//! last proposal. `𝒯` redraws the proposal, `𝒜` either accepts it (reversing the edge) or keeps
//! it, and `𝒫 = 𝒯𝒜` has `P` as its tail marginal.

use std::io::Write;

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::chain::{self, AcceptanceMatrix, MarkovKernel, ProbabilityVector, ValidatedProposal};
use crate::linalg;
use crate::{Error, Result, Tolerances};

/// Edges of a proposal in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpace {
    n: usize,
    edges: Vec<(usize, usize)>,
    index: Vec<Option<usize>>,
}

impl EdgeSpace {
    pub fn new(t: &ValidatedProposal) -> Self {
        let n = t.n();
        let mut edges = Vec::new();
        let mut index = vec![None; n * n];
        for x in 0..n {
            for y in 0..n {
                if t.get(x, y) > 0.0 {
                    index[x * n + y] = Some(edges.len());
                    edges.push((x, y));
                }
            }
        }
        Self { n, edges, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        if x < self.n && y < self.n {
            self.index[x * self.n + y]
        } else {
            None
        }
    }

    /// Index of `(y, x)` for edge `k = (x, y)`.
    pub fn reverse(&self, k: usize) -> usize {
        let (x, y) = self.edges[k];
        self.index_of(y, x).expect("edge support is symmetric")
    }
}

pub fn edge_space(t: &ValidatedProposal) -> EdgeSpace {
    EdgeSpace::new(t)
}

/// `ν(x, y) = π(x) T(x, y)` on the edges.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMeasure(Vec<f64>);

impl EdgeMeasure {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Tail marginal `Σ_y ν(x, y)`.
    pub fn first_marginal(&self, space: &EdgeSpace) -> Vec<f64> {
        let mut out = vec![0.0; space.n()];
        for (k, &(x, _)) in space.edges().iter().enumerate() {
            out[x] += self.0[k];
        }
        out
    }
}

pub fn nu(pi: &ProbabilityVector, t: &ValidatedProposal, space: &EdgeSpace) -> Result<EdgeMeasure> {
    if pi.len() != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), found: pi.len() });
    }
    let values: Vec<f64> = space.edges().iter().map(|&(x, y)| pi[x] * t.get(x, y)).collect();
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { sum });
    }
    let measure = EdgeMeasure(values);
    let marginal = measure.first_marginal(space);
    for x in 0..t.n() {
        if (marginal[x] - pi[x]).abs() > 1e-12 {
            return Err(Error::NotNormalized { sum: marginal[x] / pi[x] });
        }
    }
    Ok(measure)
}

/// Row-stochastic kernel indexed by the edges of an [`EdgeSpace`].
#[derive(Clone, Debug)]
pub struct EdgeKernel(MarkovKernel);

impl EdgeKernel {
    fn new(m: Mat<f64>) -> Result<Self> {
        Ok(Self(MarkovKernel::with_tolerance(m, 1e-12)?))
    }

    fn product(a: &EdgeKernel, b: &EdgeKernel) -> Result<Self> {
        Ok(Self(a.0.then(&b.0)?))
    }

    pub fn kernel(&self) -> &MarkovKernel {
        &self.0
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.0.matrix()
    }

    pub fn get(&self, e: usize, f: usize) -> f64 {
        self.0.get(e, f)
    }

    pub fn dim(&self) -> usize {
        self.0.n()
    }

    pub fn is_reversible(&self, nu: &EdgeMeasure, tol: f64) -> bool {
        self.0.is_reversible(nu.as_slice(), tol)
    }

    /// `√ν`-conjugated matrix `N^{1/2} K N^{-1/2}`.
    pub fn nu_symmetrized(&self, nu: &EdgeMeasure) -> Mat<f64> {
        let w = nu.as_slice();
        Mat::from_fn(self.dim(), self.dim(), |e, f| (w[e] / w[f]).sqrt() * self.get(e, f))
    }
}

/// `𝒯((x,y),(z,t)) = [x = z] T(x,t)`.
pub fn dual_proposal(t: &ValidatedProposal, space: &EdgeSpace) -> Result<EdgeKernel> {
    let edges = space.edges();
    EdgeKernel::new(Mat::from_fn(edges.len(), edges.len(), |e, f| {
        let ((x, _), (z, w)) = (edges[e], edges[f]);
        if x == z {
            t.get(x, w)
        } else {
            0.0
        }
    }))
}

/// `𝒜((x,y),(y,x)) = A(x,y)`, `𝒜((x,y),(x,y)) = 1 - A(x,y)`.
pub fn dual_acceptance(a: &AcceptanceMatrix, space: &EdgeSpace) -> Result<EdgeKernel> {
    let s = space.len();
    let mut m = Mat::zeros(s, s);
    for (e, &(x, y)) in space.edges().iter().enumerate() {
        m[(e, space.reverse(e))] += a.get(x, y);
        m[(e, e)] += 1.0 - a.get(x, y);
    }
    EdgeKernel::new(m)
}

#[derive(Clone, Debug)]
pub struct DualKernels {
    pub proposal: EdgeKernel,
    pub acceptance: EdgeKernel,
    /// `𝒫 = 𝒯𝒜`.
    pub p: EdgeKernel,
    /// `𝒫⋆ = 𝒜𝒯`.
    pub p_star: EdgeKernel,
    /// `𝒯𝒜𝒯`.
    pub tat: EdgeKernel,
}

pub fn dual_kernels(t: &ValidatedProposal, a: &AcceptanceMatrix, space: &EdgeSpace) -> Result<DualKernels> {
    let proposal = dual_proposal(t, space)?;
    let acceptance = dual_acceptance(a, space)?;
    let p = EdgeKernel::product(&proposal, &acceptance)?;
    let p_star = EdgeKernel::product(&acceptance, &proposal)?;
    let tat = EdgeKernel::product(&p, &proposal)?;
    Ok(DualKernels { proposal, acceptance, p, p_star, tat })
}

/// First marginal of a measure `F` on edges.
pub fn first_marginal(f: &[f64], space: &EdgeSpace) -> Vec<f64> {
    let mut out = vec![0.0; space.n()];
    for (k, &(x, _)) in space.edges().iter().enumerate() {
        out[x] += f[k];
    }
    out
}

/// How `δ⋆` relates to the gap of `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaStarMode {
    /// Glauber acceptance: `δ⋆ = δ`.
    Glauber,
    /// Halve `A` first (lazy `(1+P)/2`); then `δ⋆ >= δ/2` with `δ` the gap of `P`.
    LazyGeneral,
    /// Use `A` as given, with no relation asserted.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaStar {
    /// Gap of the MH kernel built from the acceptance as passed in.
    pub delta: f64,
    /// Gap of `𝒫𝒫⋆` for the acceptance actually used (halved in lazy mode).
    pub delta_star: f64,
    /// `sqrt(1 - δ⋆)`, the second eigenvalue of the dilation.
    pub lambda: f64,
}

/// Eigenvalues of `𝒫𝒫⋆` through its ν-symmetrization, descending.
pub fn product_spectrum(dk: &DualKernels, nu: &EdgeMeasure) -> Result<Vec<f64>> {
    let pps = dk.p.kernel().then(dk.p_star.kernel())?;
    let w = nu.as_slice();
    let s = w.len();
    let sym = Mat::from_fn(s, s, |e, f| {
        0.5 * ((w[e] / w[f]).sqrt() * pps.get(e, f) + (w[f] / w[e]).sqrt() * pps.get(f, e))
    });
    let mut ev = linalg::symmetric_eigenvalues(sym.as_ref())?;
    ev.reverse();
    Ok(ev)
}

pub fn delta_star(
    t: &ValidatedProposal,
    a: &AcceptanceMatrix,
    mode: DeltaStarMode,
    tol: &Tolerances,
) -> Result<DeltaStar> {
    let p = chain::mh_kernel(t, a)?;
    let analysis = chain::analyze(&p, tol)?;
    let delta = analysis.gap;
    if mode == DeltaStarMode::Glauber {
        for x in 0..t.n() {
            for y in 0..t.n() {
                if x != y && t.get(x, y) > 0.0 && (a.get(x, y) + a.get(y, x) - 1.0).abs() > tol.structural {
                    return Err(Error::InvalidConfig(format!("A({x},{y}) + A({y},{x}) != 1, not a Glauber choice")));
                }
            }
        }
    }
    let used = match mode {
        DeltaStarMode::LazyGeneral => a.halved(),
        _ => a.clone(),
    };
    let space = edge_space(t);
    let measure = nu(&analysis.pi, t, &space)?;
    let dk = dual_kernels(t, &used, &space)?;
    let ev = product_spectrum(&dk, &measure)?;
    let second = ev.get(1).copied().unwrap_or(0.0);
    if 1.0 - second < tol.spectral {
        return Err(Error::NotErgodicProduct { second });
    }
    let delta_star = 1.0 - second;
    match mode {
        DeltaStarMode::Glauber if (delta_star - delta).abs() > tol.spectral => {
            return Err(Error::GapCheckFailed { what: "glauber delta_star == delta", lhs: delta_star, rhs: delta });
        }
        DeltaStarMode::LazyGeneral if delta_star < delta / 2.0 - tol.spectral => {
            return Err(Error::GapCheckFailed { what: "lazy delta_star >= delta / 2", lhs: delta_star, rhs: delta / 2.0 });
        }
        _ => {}
    }
    Ok(DeltaStar { delta, delta_star, lambda: second.max(0.0).sqrt() })
}

/// `𝒫̄ = |0⟩⟨1| ⊗ 𝒫 + |1⟩⟨0| ⊗ 𝒫⋆` and its discriminant `𝒟̄` with respect to `½(ν, ν)`.
#[derive(Clone, Debug)]
pub struct Dilation {
    pub p_bar: Mat<f64>,
    pub d_bar: Mat<f64>,
}

pub fn dilation(p: &EdgeKernel, p_star: &EdgeKernel, nu: &EdgeMeasure) -> Dilation {
    let s = p.dim();
    let p_bar = Mat::from_fn(2 * s, 2 * s, |i, j| match (i < s, j < s) {
        (true, false) => p.get(i, j - s),
        (false, true) => p_star.get(i - s, j),
        _ => 0.0,
    });
    let w = nu.as_slice();
    let d_bar = Mat::from_fn(2 * s, 2 * s, |i, j| (w[i % s] / w[j % s]).sqrt() * p_bar[(i, j)]);
    Dilation { p_bar, d_bar }
}

impl Dilation {
    /// Eigenvalues of `𝒟̄`, descending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let mut ev = linalg::symmetric_eigenvalues(self.d_bar.as_ref())?;
        ev.reverse();
        Ok(ev)
    }
}

/// Spectrum of the dilation, held as the ν-weighted singular values `s_0 = 1 >= s_1 >= ...` of
/// `𝒫`; the eigenvalues of `𝒟̄` are `±s_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationSpectrum {
    pub singular_values: Vec<f64>,
}

impl DilationSpectrum {
    /// Plain SVD of `N^{1/2} 𝒫 N^{-1/2}`.
    pub fn dense(p: &EdgeKernel, nu: &EdgeMeasure) -> Result<Self> {
        let sym = p.nu_symmetrized(nu);
        Ok(Self { singular_values: linalg::singular_values(sym.as_ref())? })
    }

    /// Rank-`n` reduction. `N^{1/2} 𝒯 N^{-1/2} = V Vᵀ` with `V[(x,y), x] = sqrt(T(x,y))`, so the
    /// nonzero squared singular values of `𝒫` are the eigenvalues of the `n × n` matrix
    /// `Bᵀ B`, `B = N^{1/2} 𝒜 N^{-1/2} V`. The remaining `|𝒮| - n` values are zero.
    pub fn compressed(
        t: &ValidatedProposal,
        a: &AcceptanceMatrix,
        pi: &ProbabilityVector,
        space: &EdgeSpace,
    ) -> Result<Self> {
        let n = t.n();
        let measure = nu(pi, t, space)?;
        let w = measure.as_slice();
        let mut b: Mat<f64> = Mat::zeros(space.len(), n);
        for (e, &(x, y)) in space.edges().iter().enumerate() {
            let r = space.reverse(e);
            b[(e, x)] += (1.0 - a.get(x, y)) * t.get(x, y).sqrt();
            b[(e, y)] += (w[e] / w[r]).sqrt() * a.get(x, y) * t.get(y, x).sqrt();
        }
        let g = b.transpose() * &b;
        let mut ev = linalg::symmetric_eigenvalues(g.as_ref())?;
        ev.reverse();
        let mut singular_values: Vec<f64> = ev.into_iter().map(|v| v.max(0.0).sqrt()).collect();
        singular_values.resize(space.len(), 0.0);
        Ok(Self { singular_values })
    }

    /// Eigenvalues of `𝒟̄`, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.singular_values.iter().flat_map(|&s| [s, -s]).collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Second largest eigenvalue `λ` of `𝒟̄`.
    pub fn lambda(&self) -> f64 {
        self.singular_values.get(1).copied().unwrap_or(0.0)
    }

    /// `1 - λ`.
    pub fn gap(&self) -> f64 {
        1.0 - self.lambda()
    }

    /// Smallest nonzero eigenphase of the qubitized walk, `acos λ`.
    pub fn angular_gap(&self) -> f64 {
        self.lambda().clamp(-1.0, 1.0).acos()
    }
}

/// Dual kernels on every ordered pair of states, index `x·n + y`. Rows of non-edges are still
/// stochastic, which is what the register-level circuits act on.
#[derive(Clone, Debug)]
pub struct PairKernels {
    pub n: usize,
    pub p: Mat<f64>,
    pub p_star: Mat<f64>,
}

pub fn pair_kernels(t: &ValidatedProposal, a: &AcceptanceMatrix) -> PairKernels {
    let n = t.n();
    let n2 = n * n;
    let mut p = Mat::zeros(n2, n2);
    let mut p_star = Mat::zeros(n2, n2);
    for x in 0..n {
        for y in 0..n {
            let row = x * n + y;
            for z in 0..n {
                let tz = t.get(x, z);
                if tz > 0.0 {
                    p[(row, x * n + z)] += tz * (1.0 - a.get(x, z));
                    p[(row, z * n + x)] += tz * a.get(x, z);
                }
                let acc = a.get(x, y);
                p_star[(row, y * n + z)] += acc * t.get(y, z);
                p_star[(row, x * n + z)] += (1.0 - acc) * t.get(x, z);
            }
        }
    }
    PairKernels { n, p, p_star }
}

/// `𝒯` and `𝒜` on all pairs, for comparison with the edge-restricted versions.
pub fn pair_proposal_acceptance(t: &ValidatedProposal, a: &AcceptanceMatrix) -> (Mat<f64>, Mat<f64>) {
    let n = t.n();
    let n2 = n * n;
    let tm = Mat::from_fn(n2, n2, |e, f| if e / n == f / n { t.get(e / n, f % n) } else { 0.0 });
    let mut am = Mat::zeros(n2, n2);
    for x in 0..n {
        for y in 0..n {
            am[(x * n + y, y * n + x)] += a.get(x, y);
            am[(x * n + y, x * n + y)] += 1.0 - a.get(x, y);
        }
    }
    (tm, am)
}

#[derive(Serialize)]
struct EdgeSpaceJson<'a> {
    edges: Vec<[usize; 2]>,
    nu: &'a [f64],
}

/// `{edges: [[x, y], ...], nu: [...]}`.
pub fn write_edge_space_json<W: Write>(space: &EdgeSpace, nu: &EdgeMeasure, w: W) -> Result<()> {
    let doc = EdgeSpaceJson { edges: space.edges().iter().map(|&(x, y)| [x, y]).collect(), nu: nu.as_slice() };
    serde_json::to_writer(w, &doc)?;
    Ok(())
}
