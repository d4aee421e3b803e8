//! Sampling by walk: prepare the stationary state of the walk, undo the state preparation and
//! measure the state register.

use std::collections::BTreeMap;

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::chain::{self, ProbabilityVector};
use crate::gates;
use crate::lab::config::{ExperimentConfig, Mode};
use crate::linalg;
use crate::walk::{MhWalk, Registers};
use crate::{Error, Execution, Result};

/// Shots drawn from one generator stream.
pub const CHUNK: u64 = 1 << 14;

/// Oracle applications of the extraction `O_T† O†`.
const EXTRACTION_CALLS: [(&str, u64); 2] = [("O_T†", 2), ("O_A†", 1)];

#[derive(Clone, Debug, Serialize)]
pub struct SampleRun {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla_bits: Option<u32>,
    pub shots: u64,
    pub seed: u64,
    pub histogram: Vec<u64>,
    pub target: Vec<f64>,
    pub tv: f64,
    /// `|⟨⊠(+, ν)|ψ₀⟩|`.
    pub overlap: f64,
    /// Probability that one attempt prepares the stationary state.
    pub success_probability: f64,
    /// Attempts over all shots, repeating each until success.
    pub attempts: u64,
    /// Fidelity of the prepared state with `⊠|+, ν⟩`.
    pub state_fidelity: f64,
    /// Probability that the registers other than `herm` and `r1` read zero after extraction.
    pub ancilla_zero_probability: f64,
    pub w_applications: u64,
    pub oracle_calls: BTreeMap<String, u64>,
    /// The normalized prepared state, kept for comparisons between modes.
    #[serde(skip)]
    pub prepared: Vec<c64>,
}

/// `ψ₀ = ⊠ c / ‖c‖`.
pub fn initial_state(walk: &MhWalk, weights: Option<&[f64]>) -> Result<Vec<c64>> {
    let Some(w) = weights else {
        return Ok(walk.default_initial_state());
    };
    let src = walk.spue.iso.ncols();
    if w.len() != src {
        return Err(Error::DimensionMismatch { expected: src, found: w.len() });
    }
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidConfig("initial weights must be finite and not all zero".into()));
    }
    let c: Vec<c64> = w.iter().map(|&v| c64::new(v / norm, 0.0)).collect();
    Ok(walk.spue.iso.apply(&c))
}

fn overlap_with_generator(walk: &MhWalk, psi0: &[c64]) -> Result<(Vec<c64>, f64)> {
    let g = walk.stationary_generator();
    let overlap = linalg::inner(&g, psi0).norm();
    if overlap < 1e-12 {
        return Err(Error::ZeroOverlap { overlap });
    }
    Ok((g, overlap))
}

/// Projection of `ψ₀` onto `ker(W - 1) ∩ range(⊠)`, unnormalized.
pub fn project_stationary(walk: &MhWalk, psi0: &[c64], tol: f64) -> Result<Vec<c64>> {
    let basis = walk.stationary_basis(tol)?;
    let coeffs = walk.spue.iso.adjoint().apply(psi0);
    let mut src = vec![c64::new(0.0, 0.0); basis.nrows()];
    for k in 0..basis.ncols() {
        let col: Vec<c64> = (0..basis.nrows()).map(|i| basis[(i, k)]).collect();
        let a = linalg::inner(&col, &coeffs);
        src.iter_mut().zip(&col).for_each(|(s, &b)| *s += a * b);
    }
    Ok(walk.spue.iso.apply(&src))
}

/// Phase estimation of `W` with `bits` phase qubits, post-selected on the zero outcome:
/// `(1/T) Σ_{k<T} W^k ψ₀` with `T = 2^bits`, unnormalized.
pub fn qpe_zero_branch(walk: &MhWalk, psi0: &[c64], bits: u32) -> Vec<c64> {
    let t = 1u64 << bits;
    let mut acc = psi0.to_vec();
    let mut cur = psi0.to_vec();
    for _ in 1..t {
        cur = walk.walk.apply(&cur);
        acc.iter_mut().zip(&cur).for_each(|(a, &c)| *a += c);
    }
    let scale = 1.0 / t as f64;
    acc.iter_mut().for_each(|a| *a *= scale);
    acc
}

/// Marginal of `r1` and the probability that `r2, r3, r4, flag` are all zero.
pub fn measure_extracted(walk: &MhWalk, extracted: &[c64]) -> (Vec<f64>, f64) {
    let n = walk.n;
    let space = Registers::new(&[2, n, n, n, n, 2]);
    let mut marginal = vec![0.0; n];
    let mut zero = 0.0;
    let mut d = vec![0; 6];
    for (i, a) in extracted.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        space.decode_into(i, &mut d);
        marginal[d[1]] += p;
        if d[2..].iter().all(|&v| v == 0) {
            zero += p;
        }
    }
    (marginal, zero)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Histogram of `shots` draws from `probs` (normalized here), each shot repeated until an
/// attempt of success probability `p_success` succeeds. Returns the counts and the total
/// number of attempts. Chunk `k` of [`CHUNK`] shots uses stream `k` of the generator seeded
/// with `seed`, so the result does not depend on `exec`.
pub fn sample_with_retries(probs: &[f64], p_success: f64, shots: u64, seed: u64, exec: Execution) -> (Vec<u64>, u64) {
    let total: f64 = probs.iter().sum();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut run = 0.0;
    for p in probs {
        run += p / total;
        cdf.push(run);
    }
    let chunks = shots.div_ceil(CHUNK) as usize;
    let log_fail = (1.0 - p_success.clamp(0.0, 1.0)).ln();
    let parts = exec.map_range(chunks, |k| {
        let mut rng = chunk_rng(seed, k as u64);
        let len = CHUNK.min(shots - k as u64 * CHUNK);
        let mut counts = vec![0u64; probs.len()];
        let mut attempts = 0u64;
        for _ in 0..len {
            attempts += if p_success >= 1.0 {
                1
            } else {
                let u: f64 = 1.0 - rng.random::<f64>();
                1 + (u.ln() / log_fail).floor() as u64
            };
            counts[draw(&cdf, rng.random::<f64>())] += 1;
        }
        (counts, attempts)
    });
    let mut counts = vec![0u64; probs.len()];
    let mut attempts = 0;
    for (c, a) in parts {
        counts.iter_mut().zip(c).for_each(|(x, y)| *x += y);
        attempts += a;
    }
    (counts, attempts)
}

pub fn empirical_tv(counts: &[u64], target: &ProbabilityVector) -> Result<f64> {
    let shots: u64 = counts.iter().sum();
    let emp = ProbabilityVector::new(counts.iter().map(|&c| c as f64 / shots as f64).collect())?;
    chain::tv_distance(&emp, target)
}

fn finish(
    walk: &MhWalk,
    cfg: &ExperimentConfig,
    prepared: Vec<c64>,
    g: &[c64],
    overlap: f64,
    success_probability: f64,
    w_per_attempt: u64,
) -> Result<SampleRun> {
    let extracted = walk.extract(&prepared)?;
    let (marginal, ancilla_zero_probability) = measure_extracted(walk, &extracted);
    let (histogram, attempts) =
        sample_with_retries(&marginal, success_probability, cfg.shots, cfg.seed, cfg.execution);
    let tv = empirical_tv(&histogram, &walk.pi)?;

    let w_applications = w_per_attempt * attempts;
    let mut oracle_calls: BTreeMap<String, u64> = BTreeMap::new();
    for (k, v) in gates::walk_oracle_calls() {
        *oracle_calls.entry(k).or_default() += v as u64 * w_applications;
    }
    for (k, v) in EXTRACTION_CALLS {
        *oracle_calls.entry(k.to_string()).or_default() += v * attempts;
    }
    Ok(SampleRun {
        mode: cfg.mode,
        ancilla_bits: (cfg.mode == Mode::Qpe).then_some(cfg.ancilla_bits),
        shots: cfg.shots,
        seed: cfg.seed,
        histogram,
        target: walk.pi.as_slice().to_vec(),
        tv,
        overlap,
        success_probability,
        attempts,
        state_fidelity: linalg::fidelity(g, &prepared),
        ancilla_zero_probability,
        w_applications,
        oracle_calls,
        prepared,
    })
}

fn normalized(v: Vec<c64>) -> (Vec<c64>, f64) {
    let norm = linalg::norm(&v);
    (v.into_iter().map(|a| a / norm).collect(), norm * norm)
}

pub fn algorithm1_exact(walk: &MhWalk, cfg: &ExperimentConfig) -> Result<SampleRun> {
    cfg.validate()?;
    let psi0 = initial_state(walk, cfg.initial.as_deref())?;
    let (g, overlap) = overlap_with_generator(walk, &psi0)?;
    let (prepared, success) = normalized(project_stationary(walk, &psi0, cfg.tolerances.spectral)?);
    finish(walk, cfg, prepared, &g, overlap, success, 0)
}

pub fn algorithm1_qpe(walk: &MhWalk, cfg: &ExperimentConfig) -> Result<SampleRun> {
    cfg.validate()?;
    let psi0 = initial_state(walk, cfg.initial.as_deref())?;
    let (g, overlap) = overlap_with_generator(walk, &psi0)?;
    let (prepared, success) = normalized(qpe_zero_branch(walk, &psi0, cfg.ancilla_bits));
    finish(walk, cfg, prepared, &g, overlap, success, (1u64 << cfg.ancilla_bits) - 1)
}

pub fn algorithm1(walk: &MhWalk, cfg: &ExperimentConfig) -> Result<SampleRun> {
    match cfg.mode {
        Mode::Exact => algorithm1_exact(walk, cfg),
        Mode::Qpe => algorithm1_qpe(walk, cfg),
    }
}

impl SampleRun {
    /// CSV with columns `state, count, empirical, target`.
    pub fn write_histogram_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["state", "count", "empirical", "target"])?;
        for (x, &c) in self.histogram.iter().enumerate() {
            let emp = c as f64 / self.shots as f64;
            out.write_record([x.to_string(), c.to_string(), emp.to_string(), self.target[x].to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}
