//! Discretized Langevin proposals on a periodic grid and the matrix-level pieces of their
//! quantum proposal and acceptance oracles.
//!
//! Shifts are expressed in grid steps. A diagonal phase `f` is in turns, `e^{2πi f}`.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::chain::{self, AcceptanceMatrix, MarkovKernel, ProbabilityVector, ValidatedProposal};
use crate::walk::{oracles, Operator};
use crate::{Error, Result};

/// `(x⁴ - x²) / 32`.
pub fn two_well(x: f64) -> f64 {
    (x.powi(4) - x * x) / 32.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    #[default]
    TwoWell,
    /// Values supplied on the grid.
    Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MalaConfig {
    pub bits: u32,
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
    pub tau: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub potential: Potential,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn default_lo() -> f64 {
    -1.0
}

fn default_hi() -> f64 {
    1.0
}

fn default_beta() -> f64 {
    1.0
}

impl MalaConfig {
    pub fn two_well(bits: u32, tau: f64, beta: f64) -> Self {
        Self { bits, lo: -1.0, hi: 1.0, tau, beta, potential: Potential::TwoWell, values: None }
    }

    pub fn n(&self) -> usize {
        1 << self.bits
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n() as f64
    }

    /// Grid points `lo + k h`; `hi` is identified with `lo`.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.lo + k as f64 * self.spacing()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(1..=12).contains(&self.bits) {
            return bad(format!("bits = {} outside 1..=12", self.bits));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return bad(format!("interval [{}, {}]", self.lo, self.hi));
        }
        if !(self.tau > 0.0 && self.beta > 0.0 && (self.tau * self.beta).is_finite()) {
            return bad(format!("tau = {}, beta = {}", self.tau, self.beta));
        }
        match (self.potential, &self.values) {
            (Potential::Table, None) => bad("a table potential needs values".into()),
            (Potential::Table, Some(v)) if v.len() != self.n() => {
                Err(Error::DimensionMismatch { expected: self.n(), found: v.len() })
            }
            (Potential::Table, Some(v)) => check_finite(v),
            (Potential::TwoWell, Some(_)) => bad("values are only read for a table potential".into()),
            (Potential::TwoWell, None) => Ok(()),
        }
    }

    pub fn potential_values(&self) -> Vec<f64> {
        match (&self.potential, &self.values) {
            (Potential::Table, Some(v)) => v.clone(),
            _ => self.grid().into_iter().map(two_well).collect(),
        }
    }

    /// Central differences on the periodic grid.
    pub fn gradient(&self) -> Vec<f64> {
        let u = self.potential_values();
        let n = u.len();
        let h = self.spacing();
        (0..n).map(|k| (u[(k + 1) % n] - u[(k + n - 1) % n]) / (2.0 * h)).collect()
    }

    /// `-τβ∇U` in grid steps, unrounded.
    pub fn drift(&self) -> Vec<f64> {
        let scale = self.tau * self.beta / self.spacing();
        self.gradient().into_iter().map(|g| -scale * g).collect()
    }

    /// Standard deviation `sqrt(2τ)` in grid steps.
    pub fn sigma(&self) -> f64 {
        (2.0 * self.tau).sqrt() / self.spacing()
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(Error::InvalidEntry { row: k, col: 0, value: values[k] }),
        None => Ok(()),
    }
}

/// `π ∝ exp(-βU)` on the grid.
pub fn boltzmann_target(u: &[f64], beta: f64) -> Result<ProbabilityVector> {
    check_finite(u)?;
    let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
    ProbabilityVector::from_weights(u.iter().map(|v| (-beta * (v - lo)).exp()).collect())
}

/// Unnormalized weights `Σ_j exp(-(y - center + jn)² / (2σ²))` of a wrapped Gaussian, in grid steps.
pub fn wrapped_gaussian_weights(sigma: f64, center: f64, n: usize) -> Vec<f64> {
    let center = center.rem_euclid(n as f64);
    let images = (10.0 * sigma / n as f64).ceil() as i64 + 1;
    (0..n)
        .map(|y| {
            (-images..=images)
                .map(|j| {
                    let d = y as f64 - center + (j * n as i64) as f64;
                    (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .sum()
        })
        .collect()
}

/// Amplitudes `∝ exp(-(y - center)² / (4σ²))`, wrapped and unit-normalized: their squares are
/// the wrapped Gaussian of variance `σ²`.
pub fn gaussian_state(sigma: f64, center: f64, n: usize) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite() && center.is_finite()) {
        return Err(Error::InvalidConfig(format!("gaussian with sigma {sigma}, center {center}")));
    }
    let w = wrapped_gaussian_weights(sigma, center, n);
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|p| (p / total).sqrt()).collect())
}

/// Row `x` of the proposal before the diagonal is removed, normalized.
pub fn raw_proposal_row(config: &MalaConfig, x: usize) -> Vec<f64> {
    let center = x as f64 + config.drift()[x];
    let w = wrapped_gaussian_weights(config.sigma(), center, config.n());
    let total: f64 = w.iter().sum();
    w.into_iter().map(|p| p / total).collect()
}

/// Wrapped Gaussian rows centered on the unrounded gradient step, with the diagonal removed.
/// An entry that underflows in one direction is dropped in the other as well, so that the
/// support stays symmetric.
pub fn mala_proposal(config: &MalaConfig) -> Result<ValidatedProposal> {
    config.validate()?;
    let n = config.n();
    let raw: Vec<Vec<f64>> = (0..n).map(|x| raw_proposal_row(config, x)).collect();
    let mut rows = vec![vec![0.0; n]; n];
    for x in 0..n {
        for y in 0..n {
            if x != y && raw[x][y] > 0.0 && raw[y][x] > 0.0 {
                rows[x][y] = raw[x][y];
            }
        }
        let off: f64 = rows[x].iter().sum();
        if off.is_nan() || off <= 0.0 {
            return Err(Error::DegenerateRow(x));
        }
        rows[x].iter_mut().for_each(|v| *v /= off);
    }
    chain::validate_proposal(MarkovKernel::from_rows(&rows)?)
}

/// Target, proposal, Metropolis acceptance and the resulting kernel.
pub struct MalaChain {
    pub pi: ProbabilityVector,
    pub t: ValidatedProposal,
    pub a: AcceptanceMatrix,
    pub p: MarkovKernel,
}

pub fn mala_chain(config: &MalaConfig, choice: chain::AcceptanceChoice) -> Result<MalaChain> {
    let t = mala_proposal(config)?;
    let pi = boltzmann_target(&config.potential_values(), config.beta)?;
    let a = choice.build(&t, &pi)?;
    let p = chain::mh_kernel(&t, &a)?;
    Ok(MalaChain { pi, t, a, p })
}

/// `V_f = Σ e^{2πi f(x)} |x⟩⟨x|`.
pub fn diagonal_phase(f: &[f64]) -> Result<Operator> {
    check_finite(f)?;
    Ok(Operator::from_columns(f.len(), f.len(), |x| vec![(x, c64::from_polar(1.0, std::f64::consts::TAU * f[x]))]))
}

const SHIFT_TOL: f64 = 1e-9;

fn integer_shifts(f: &[f64]) -> Result<Vec<i64>> {
    check_finite(f)?;
    f.iter()
        .enumerate()
        .map(|(index, &value)| {
            let r = value.round();
            if (value - r).abs() > SHIFT_TOL {
                Err(Error::NonIntegerShift { index, value })
            } else {
                Ok(r as i64)
            }
        })
        .collect()
}

/// Nearest grid step, halves rounded away from zero.
pub fn round_to_grid(f: &[f64]) -> Vec<f64> {
    f.iter().map(|v| v.round()).collect()
}

/// `U_f|x, y⟩ = |x, y + f(x) mod n⟩` on `[x, y]`, `f` in grid steps.
pub fn shift_operator(f: &[f64]) -> Result<Operator> {
    let shifts = integer_shifts(f)?;
    let n = f.len() as i64;
    Ok(Operator::permutation((n * n) as usize, |j| {
        let (x, y) = (j as i64 / n, j as i64 % n);
        (x * n + (y + shifts[x as usize]).rem_euclid(n)) as usize
    }))
}

/// Phase estimation of `V_{f/n}` with `y` as the phase register: `F† Λ F`, where `F` is the
/// Fourier transform on `y` and `Λ = Π_j controlled-V^{2^j}` on bit `j` of `y`.
pub fn phase_estimation_shift(f: &[f64]) -> Result<Mat<c64>> {
    let n = f.len();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidConfig(format!("phase register of size {n}")));
    }
    integer_shifts(f)?;
    let bits = n.trailing_zeros();
    let v = diagonal_phase(&f.iter().map(|&s| s / n as f64).collect::<Vec<_>>())?;
    let v_diag: Vec<c64> = (0..n).map(|x| v.column(x)[0].1).collect();

    // Λ as a product of controlled powers V^{2^j}
    let mut lambda = vec![c64::new(1.0, 0.0); n * n];
    for j in 0..bits {
        for x in 0..n {
            let power = v_diag[x].powu(1 << j);
            for k in 0..n {
                if (k >> j) & 1 == 1 {
                    lambda[x * n + k] *= power;
                }
            }
        }
    }

    let scale = 1.0 / (n as f64).sqrt();
    let dft = Mat::<c64>::from_fn(n, n, |k, y| c64::from_polar(scale, std::f64::consts::TAU * (k * y) as f64 / n as f64));
    let dft_inv = dft.adjoint().to_owned();
    let mut out = Mat::<c64>::zeros(n * n, n * n);
    for x in 0..n {
        let block = &dft_inv * Mat::<c64>::from_fn(n, n, |k, y| lambda[x * n + k] * dft[(k, y)]);
        for r in 0..n {
            for c in 0..n {
                out[(x * n + r, x * n + c)] = block[(r, c)];
            }
        }
    }
    Ok(out)
}

/// `U_∇|x, y⟩ = |x, y + x + round(-τβ∇U(x))⟩`.
pub fn grad_shift(config: &MalaConfig) -> Result<Operator> {
    config.validate()?;
    let f: Vec<f64> = round_to_grid(&config.drift()).iter().enumerate().map(|(x, d)| x as f64 + d).collect();
    shift_operator(&f)
}

/// Proposal oracle `O_T = U_∇ (1 ⊗ G)` with `G|0⟩` the Gaussian state of the proposal width.
pub struct MalaProposalOracle {
    pub o_t: Operator,
    /// `T_q(x, y) = |⟨x, y|O_T|x, 0⟩|²`, diagonal included.
    pub t_q: Vec<Vec<f64>>,
    /// Largest row TV distance between `T_q` (diagonal removed, renormalized) and the classical proposal.
    pub max_row_tv: f64,
}

impl MalaProposalOracle {
    pub fn within(&self, tol: f64) -> bool {
        self.max_row_tv <= tol
    }
}

pub fn mala_o_t(config: &MalaConfig) -> Result<MalaProposalOracle> {
    let n = config.n();
    let t = mala_proposal(config)?;
    let g = oracles::complete_first_column(&gaussian_state(config.sigma(), 0.0, n)?);
    let o_g = Operator::from_columns(n * n, n * n, |j| {
        let (x, k) = (j / n, j % n);
        (0..n).filter(|&y| g[(y, k)] != 0.0).map(|y| (x * n + y, c64::new(g[(y, k)], 0.0))).collect()
    });
    let o_t = o_g.then(&grad_shift(config)?);

    let t_q: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            let mut row = vec![0.0; n];
            for &(i, a) in o_t.column(x * n) {
                row[i % n] += a.norm_sqr();
            }
            row
        })
        .collect();
    let mut max_row_tv = 0.0f64;
    for (x, row) in t_q.iter().enumerate() {
        let off: f64 = row.iter().enumerate().filter(|&(y, _)| y != x).map(|(_, v)| v).sum();
        let tv: f64 = (0..n)
            .filter(|&y| y != x)
            .map(|y| (row[y] / off - t.get(x, y)).abs())
            .sum::<f64>()
            / 2.0;
        max_row_tv = max_row_tv.max(tv);
    }
    Ok(MalaProposalOracle { o_t, t_q, max_row_tv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_well_values() {
        assert_eq!(two_well(0.0), 0.0);
        assert_eq!(two_well(1.0), 0.0);
        assert_eq!(two_well(-1.0), 0.0);
        let m = 0.5f64.sqrt();
        assert!((two_well(m) + 1.0 / 128.0).abs() < 1e-16);
        assert!((two_well(m + 1e-4) - two_well(m) > 0.0) && (two_well(m - 1e-4) - two_well(m) > 0.0));
    }

    #[test]
    fn config_json_round_trip() {
        let c: MalaConfig = serde_json::from_str(r#"{"bits": 6, "tau": 0.1, "potential": "two_well"}"#).unwrap();
        assert_eq!(c, MalaConfig::two_well(6, 0.1, 1.0));
        let table: MalaConfig =
            serde_json::from_str(r#"{"bits": 1, "lo": 0, "hi": 1, "tau": 0.5, "beta": 2, "potential": "table", "values": [0, 1]}"#)
                .unwrap();
        assert!(table.validate().is_ok());
        assert_eq!(table.potential_values(), vec![0.0, 1.0]);
        let mut short = table.clone();
        short.values = Some(vec![0.0]);
        assert!(short.validate().is_err());
    }

    #[test]
    fn gradient_of_two_well() {
        let c = MalaConfig::two_well(6, 0.1, 1.0);
        let g = c.gradient();
        // x = 0 sits at index 32
        assert!(g[32].abs() < 1e-15);
        let h = c.spacing();
        let exact = |x: f64| (4.0 * x.powi(3) - 2.0 * x) / 32.0;
        assert!((g[40] - exact(c.grid()[40])).abs() < h * h);
    }
}
