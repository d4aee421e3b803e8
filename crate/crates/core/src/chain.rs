//! Finite-state Markov kernels, the Metropolis-Hastings construction and the spectral quantities
//! that control mixing.

use std::io::Write;

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result, Tolerances};

/// Power iterations used to cross-check the eigenvector route are capped here so that nearly
/// reducible chains stay tractable.
const POWER_ITERATION_CAP: usize = 200_000;
/// Total variation allowed between the eigenvector and power-iteration stationary laws.
const POWER_CHECK_TV: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        for (i, &v) in entries.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidEntry { row: 0, col: i, value: v });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self(entries))
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::NotNormalized { sum });
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `π_* = min_x π(x)`.
    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Row-stochastic matrix on `{0, .., n-1}`, `n >= 2`.
#[derive(Clone, Debug)]
pub struct MarkovKernel {
    m: Mat<f64>,
}

impl MarkovKernel {
    pub fn new(m: Mat<f64>) -> Result<Self> {
        Self::with_tolerance(m, 1e-12)
    }

    pub fn with_tolerance(m: Mat<f64>, tol: f64) -> Result<Self> {
        let (rows, cols) = (m.nrows(), m.ncols());
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::StateSpaceTooSmall(rows));
        }
        for i in 0..rows {
            let mut sum = 0.0;
            for j in 0..cols {
                let v = m[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidEntry { row: i, col: j, value: v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotStochastic { row: i, sum });
            }
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: bad.len() });
        }
        Self::new(Mat::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(Mat::identity(n, n))
    }

    /// Kernel whose rows all equal `pi`.
    pub fn perfectly_mixed(pi: &ProbabilityVector) -> Result<Self> {
        let n = pi.len();
        Self::new(Mat::from_fn(n, n, |_, j| pi[j]))
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.m.as_ref()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.m[(x, y)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| (0..self.n()).map(|j| self.m[(i, j)]).collect()).collect()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &MarkovKernel) -> Result<MarkovKernel> {
        if self.n() != next.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: next.n() });
        }
        Self::with_tolerance(&self.m * &next.m, 1e-10)
    }

    /// `μ ↦ μK` on a row vector.
    pub fn push_forward(&self, mu: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for (x, &w) in mu.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (y, o) in out.iter_mut().enumerate() {
                *o += w * self.m[(x, y)];
            }
        }
        out
    }

    /// Largest `|π(x)K(x,y) - π(y)K(y,x)|` and where it occurs.
    pub fn detailed_balance_violation(&self, pi: &[f64]) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for x in 0..self.n() {
            for y in x + 1..self.n() {
                let v = (pi[x] * self.m[(x, y)] - pi[y] * self.m[(y, x)]).abs();
                if v > worst.2 {
                    worst = (x, y, v);
                }
            }
        }
        worst
    }

    pub fn is_reversible(&self, pi: &[f64], tol: f64) -> bool {
        self.detailed_balance_violation(pi).2 <= tol
    }
}

/// Proposal kernel with zero diagonal and symmetric support.
#[derive(Clone, Debug)]
pub struct ValidatedProposal(MarkovKernel);

impl ValidatedProposal {
    pub fn kernel(&self) -> &MarkovKernel {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.0.get(x, y)
    }
}

pub fn validate_proposal(t: MarkovKernel) -> Result<ValidatedProposal> {
    let n = t.n();
    for x in 0..n {
        if t.get(x, x) != 0.0 {
            return Err(Error::NonzeroDiagonal { state: x, value: t.get(x, x) });
        }
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && t.get(x, y) > 0.0 && t.get(y, x) <= 0.0 {
                return Err(Error::AsymmetricSupport { x, y });
            }
        }
    }
    Ok(ValidatedProposal(t))
}

/// Acceptance probabilities in `[0, 1]` with a zero diagonal.
#[derive(Clone, Debug)]
pub struct AcceptanceMatrix {
    m: Mat<f64>,
}

impl AcceptanceMatrix {
    pub fn new(m: Mat<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        for x in 0..m.nrows() {
            for y in 0..m.ncols() {
                let v = m[(x, y)];
                if !(0.0..=1.0).contains(&v) || (x == y && v != 0.0) {
                    return Err(Error::InvalidAcceptance { x, y, value: v });
                }
            }
        }
        Ok(Self { m })
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.m[(x, y)]
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.m.as_ref()
    }

    /// `A/2`, whose MH kernel is the lazy `(1+P)/2`.
    pub fn halved(&self) -> Self {
        Self { m: Mat::from_fn(self.n(), self.n(), |x, y| 0.5 * self.m[(x, y)]) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcceptanceChoice {
    Glauber,
    Metropolis,
    /// Metropolis acceptance halved, giving the lazy kernel `(1+P)/2`.
    MetropolisLazy,
}

impl AcceptanceChoice {
    pub fn build(self, t: &ValidatedProposal, pi: &ProbabilityVector) -> Result<AcceptanceMatrix> {
        match self {
            Self::Glauber => glauber_acceptance(t, pi),
            Self::Metropolis => metropolis_acceptance(t, pi),
            Self::MetropolisLazy => Ok(metropolis_acceptance(t, pi)?.halved()),
        }
    }
}

fn check_target(t: &ValidatedProposal, pi: &ProbabilityVector) -> Result<()> {
    if pi.len() != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), found: pi.len() });
    }
    match pi.as_slice().iter().position(|&p| p <= 0.0) {
        Some(x) => Err(Error::ZeroTargetMass(x)),
        None => Ok(()),
    }
}

fn acceptance_from(
    t: &ValidatedProposal,
    pi: &ProbabilityVector,
    rule: impl Fn(f64, f64) -> f64,
) -> Result<AcceptanceMatrix> {
    check_target(t, pi)?;
    let n = t.n();
    let m = Mat::from_fn(n, n, |x, y| {
        if x == y || t.get(x, y) <= 0.0 {
            0.0
        } else {
            rule(pi[x] * t.get(x, y), pi[y] * t.get(y, x))
        }
    });
    AcceptanceMatrix::new(m)
}

/// `A(x,y) = min(1, π(y)T(y,x) / (π(x)T(x,y)))`.
pub fn metropolis_acceptance(t: &ValidatedProposal, pi: &ProbabilityVector) -> Result<AcceptanceMatrix> {
    acceptance_from(t, pi, |fwd, bwd| (bwd / fwd).min(1.0))
}

/// `A(x,y) = π(y)T(y,x) / (π(x)T(x,y) + π(y)T(y,x))`.
pub fn glauber_acceptance(t: &ValidatedProposal, pi: &ProbabilityVector) -> Result<AcceptanceMatrix> {
    acceptance_from(t, pi, |fwd, bwd| bwd / (fwd + bwd))
}

pub fn mh_kernel(t: &ValidatedProposal, a: &AcceptanceMatrix) -> Result<MarkovKernel> {
    let n = t.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.n() });
    }
    let mut m = Mat::from_fn(n, n, |x, y| if x == y { 0.0 } else { t.get(x, y) * a.get(x, y) });
    for x in 0..n {
        let moved: f64 = (0..n).map(|y| m[(x, y)]).sum();
        let stay = 1.0 - moved;
        if stay < -1e-12 {
            return Err(Error::NegativeDiagonal { state: x, value: stay });
        }
        m[(x, x)] = stay.max(0.0);
    }
    MarkovKernel::new(m)
}

/// `(1 + P)/2`.
pub fn lazy(p: &MarkovKernel) -> MarkovKernel {
    let n = p.n();
    let m = Mat::from_fn(n, n, |x, y| 0.5 * (p.get(x, y) + if x == y { 1.0 } else { 0.0 }));
    MarkovKernel { m }
}

/// Spectral data of an ergodic kernel.
#[derive(Clone, Debug)]
pub struct ChainAnalysis {
    pub pi: ProbabilityVector,
    /// Eigenvalues, taken from the discriminant when the kernel is reversible.
    pub eigenvalues: Vec<c64>,
    pub gap: f64,
    pub reversible: bool,
}

impl ChainAnalysis {
    pub fn second_largest_modulus(&self) -> f64 {
        1.0 - self.gap
    }
}

/// Stationary law, spectrum and gap, with the ergodicity test and the power-iteration cross-check.
pub fn analyze(p: &MarkovKernel, tol: &Tolerances) -> Result<ChainAnalysis> {
    let n = p.n();
    let (values, vectors) = linalg::eigen(p.matrix().transpose())?;
    let unit = values.iter().filter(|z| (z.norm() - 1.0).abs() <= tol.spectral).count();
    if unit != 1 {
        return Err(Error::NotErgodic { unit_modulus: unit });
    }
    let top = (0..n)
        .min_by(|&a, &b| (values[a] - 1.0).norm().total_cmp(&(values[b] - 1.0).norm()))
        .expect("non-empty spectrum");

    let col = vectors.col(top);
    let pivot = (0..n).max_by(|&a, &b| col[a].norm().total_cmp(&col[b].norm())).expect("n >= 2");
    let phase = col[pivot].conj() / col[pivot].norm();
    let mut pi: Vec<f64> = (0..n).map(|i| (col[i] * phase).re).collect();
    let sum: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v = (*v / sum).max(0.0));
    let sum: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= sum);
    for _ in 0..4 {
        let next = p.push_forward(&pi);
        let residual: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        if residual <= 1e-13 {
            break;
        }
        let s: f64 = next.iter().sum();
        pi = next.into_iter().map(|v| v / s).collect();
    }

    let reversible = p.is_reversible(&pi, tol.reversibility);
    let eigenvalues = if reversible {
        let d = discriminant_unchecked(p, &pi);
        linalg::real_to_complex(&linalg::symmetric_eigenvalues(d.as_ref())?)
    } else {
        values.clone()
    };
    let gap = gap_from_spectrum(&eigenvalues);

    // Skipped for chains too slow to converge within the cap.
    let needed = 10.0 * (1.0 / gap).ceil();
    if needed <= POWER_ITERATION_CAP as f64 {
        let mut mu = vec![1.0 / n as f64; n];
        for _ in 0..needed as usize {
            mu = p.push_forward(&mu);
        }
        let tv = tv(&mu, &pi);
        if tv > POWER_CHECK_TV {
            return Err(Error::StationaryMismatch { tv });
        }
    }

    Ok(ChainAnalysis { pi: ProbabilityVector(pi), eigenvalues, gap, reversible })
}

/// `1 - max |λ|` over the spectrum with the eigenvalue closest to 1 removed.
pub fn gap_from_spectrum(values: &[c64]) -> f64 {
    let top = (0..values.len())
        .min_by(|&a, &b| (values[a] - 1.0).norm().total_cmp(&(values[b] - 1.0).norm()));
    let second = values
        .iter()
        .enumerate()
        .filter(|(k, _)| Some(*k) != top)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    1.0 - second
}

pub fn stationary_distribution(p: &MarkovKernel) -> Result<ProbabilityVector> {
    Ok(analyze(p, &Tolerances::default())?.pi)
}

pub fn spectral_gap(p: &MarkovKernel) -> Result<f64> {
    Ok(analyze(p, &Tolerances::default())?.gap)
}

fn discriminant_unchecked(p: &MarkovKernel, pi: &[f64]) -> Mat<f64> {
    let n = p.n();
    Mat::from_fn(n, n, |x, y| (pi[x] / pi[y]).sqrt() * p.get(x, y))
}

/// `D(x,y) = sqrt(π(x)/π(y)) P(x,y)`, symmetric when `P` is reversible with respect to `π`.
pub fn discriminant(p: &MarkovKernel, pi: &ProbabilityVector, tol: &Tolerances) -> Result<Mat<f64>> {
    if pi.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: pi.len() });
    }
    let (x, y, violation) = p.detailed_balance_violation(pi.as_slice());
    if violation > tol.reversibility {
        return Err(Error::NotReversible { x, y, violation });
    }
    Ok(discriminant_unchecked(p, pi.as_slice()))
}

fn tv(mu: &[f64], nu: &[f64]) -> f64 {
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `½ Σ |μ(x) - ν(x)|`.
pub fn tv_distance(mu: &ProbabilityVector, nu: &ProbabilityVector) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::DimensionMismatch { expected: mu.len(), found: nu.len() });
    }
    Ok(tv(mu.as_slice(), nu.as_slice()))
}

/// `max_x d_TV(P^t(x,·), π)` for `t = 0..=t_max`.
pub fn tv_curve(p: &MarkovKernel, pi: &ProbabilityVector, t_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(t_max + 1);
    let mut pt: Mat<f64> = Mat::identity(p.n(), p.n());
    for t in 0..=t_max {
        out.push(worst_row_tv(pt.as_ref(), pi.as_slice()));
        if t < t_max {
            pt = &pt * p.matrix();
        }
    }
    out
}

fn worst_row_tv(pt: MatRef<'_, f64>, pi: &[f64]) -> f64 {
    (0..pt.nrows())
        .map(|x| 0.5 * (0..pt.ncols()).map(|y| (pt[(x, y)] - pi[y]).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest `t >= 0` with `max_x d_TV(P^t(x,·), π) <= ε`, searched up to `cap` steps.
pub fn mixing_time(p: &MarkovKernel, epsilon: f64, cap: usize) -> Result<usize> {
    let pi = stationary_distribution(p)?;
    mixing_time_with(p, &pi, epsilon, cap)
}

pub fn mixing_time_with(p: &MarkovKernel, pi: &ProbabilityVector, epsilon: f64, cap: usize) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let mut pt: Mat<f64> = Mat::identity(p.n(), p.n());
    for t in 0..=cap {
        if worst_row_tv(pt.as_ref(), pi.as_slice()) <= epsilon {
            return Ok(t);
        }
        pt = &pt * p.matrix();
    }
    Err(Error::CapExceeded { cap })
}

/// Closed-form sandwich on the mixing time of a reversible chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingBounds {
    /// `(1/δ - 1) ln(1/ε)`.
    pub lower: f64,
    /// `(1/δ) ln(1/(2ε sqrt(π_*)))`.
    pub upper: f64,
}

impl MixingBounds {
    pub fn new(gap: f64, pi_min: f64, epsilon: f64) -> Self {
        Self {
            lower: (1.0 / gap - 1.0) * (1.0 / epsilon).ln(),
            upper: (1.0 / gap) * (1.0 / (2.0 * epsilon * pi_min.sqrt())).ln(),
        }
    }

    pub fn contains(&self, t: usize, slack: f64) -> bool {
        let t = t as f64;
        t >= self.lower - slack && t <= self.upper + slack
    }
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub eigenvalues: Vec<c64>,
    pub gap: f64,
    pub second_largest_modulus: f64,
    pub epsilon: f64,
    pub mixing_bounds: MixingBounds,
    /// Brute-force mixing time, when found within the curve length.
    pub mixing_time: Option<usize>,
    pub tv_curve: Vec<(usize, f64)>,
}

impl SpectralReport {
    pub fn new(p: &MarkovKernel, epsilon: f64, curve_len: usize, tol: &Tolerances) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let analysis = analyze(p, tol)?;
        let curve = tv_curve(p, &analysis.pi, curve_len);
        let mixing_time = curve.iter().position(|&d| d <= epsilon);
        Ok(Self {
            second_largest_modulus: 1.0 - analysis.gap,
            gap: analysis.gap,
            mixing_bounds: MixingBounds::new(analysis.gap, analysis.pi.min(), epsilon),
            epsilon,
            mixing_time,
            tv_curve: curve.into_iter().enumerate().collect(),
            eigenvalues: analysis.eigenvalues,
        })
    }

    /// Eigenvalues as CSV with columns `index, re, im`.
    pub fn write_eigenvalues_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["index", "re", "im"])?;
        for (k, z) in self.eigenvalues.iter().enumerate() {
            out.write_record([k.to_string(), z.re.to_string(), z.im.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}
