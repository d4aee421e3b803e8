//! Spectral summaries of one instance: classical gaps, edge-space gaps, the walk's angular gap,
//! mixing-time bounds and the qubit audit.

use faer::c64;
use serde::Serialize;

use crate::chain::{self, AcceptanceChoice, MixingBounds, SpectralReport};
use crate::dual::{self, DeltaStarMode, DilationSpectrum};
use crate::gates::{self, QubitAudit};
use crate::lab::config::KernelSource;
use crate::lab::instances::Instance;
use crate::linalg;
use crate::walk::{self, MhWalk};
use crate::{Result, Tolerances};

/// Walks up to this many states are diagonalized directly.
pub const FULL_WALK_MAX_N: usize = 6;

/// Longest TV curve computed for a brute-force mixing time.
pub const MIXING_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    fn at_least(name: &'static str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { name, lhs, rhs, pass: lhs >= rhs - slack }
    }

    fn equal(name: &'static str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { name, lhs, rhs, pass: (lhs - rhs).abs() <= slack }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingSummary {
    pub epsilon: f64,
    pub gap: f64,
    pub bounds: MixingBounds,
    pub mixing_time: Option<usize>,
    pub within_bounds: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub acceptance: AcceptanceChoice,
    /// Gap of the MH kernel, before halving for the lazy choice.
    pub delta: f64,
    /// Gap of `𝒫𝒫⋆` for the acceptance the walk uses.
    pub delta_star: f64,
    pub lambda: f64,
    pub angular_gap: f64,
    pub checks: Vec<Check>,
    pub mixing: MixingSummary,
    pub qubits: QubitAudit,
}

impl GapReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Register width for `n` states.
pub fn register_bits(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros().max(1) as usize
}

pub fn gap_report(source: &KernelSource, choice: AcceptanceChoice, epsilon: f64, tol: &Tolerances) -> Result<GapReport> {
    let (t, pi) = source.proposal_and_target()?;
    let walked = Instance::new(t.clone(), pi.clone(), choice)?;
    let (delta, a_walk) = match choice {
        AcceptanceChoice::MetropolisLazy => {
            let plain = Instance::new(t.clone(), pi.clone(), AcceptanceChoice::Metropolis)?;
            (chain::analyze(&plain.p, tol)?.gap, plain.a.halved())
        }
        _ => (chain::analyze(&walked.p, tol)?.gap, walked.a.clone()),
    };
    let ds = dual::delta_star(&t, &a_walk, DeltaStarMode::Direct, tol)?;
    let space = dual::edge_space(&t);
    let spectrum = DilationSpectrum::compressed(&t, &a_walk, &pi, &space)?;
    let lambda = spectrum.lambda();
    let angular_gap = spectrum.angular_gap();

    let slack = tol.spectral;
    let mut checks = vec![
        Check::equal("lambda == sqrt(1 - delta_star)", lambda, (1.0 - ds.delta_star).max(0.0).sqrt(), slack),
        Check::at_least("1 - lambda >= delta_star / 2", 1.0 - lambda, ds.delta_star / 2.0, slack),
        Check::at_least("angular_gap >= acos(sqrt(1 - delta / 2))", angular_gap, (1.0 - delta / 2.0).sqrt().acos(), slack),
    ];
    match choice {
        AcceptanceChoice::Glauber => checks.push(Check::equal("delta_star == delta", ds.delta_star, delta, slack)),
        AcceptanceChoice::MetropolisLazy => {
            checks.push(Check::at_least("delta_star >= delta / 2", ds.delta_star, delta / 2.0, slack))
        }
        AcceptanceChoice::Metropolis => {}
    }

    let sr = SpectralReport::new(&walked.p, epsilon, MIXING_CAP, tol)?;
    let mixing = MixingSummary {
        epsilon,
        gap: sr.gap,
        bounds: sr.mixing_bounds,
        mixing_time: sr.mixing_time,
        within_bounds: sr.mixing_time.map(|m| sr.mixing_bounds.contains(m, 0.0)),
    };

    Ok(GapReport {
        n: t.n(),
        acceptance: choice,
        delta,
        delta_star: ds.delta_star,
        lambda,
        angular_gap,
        checks,
        mixing,
        qubits: gates::qubit_audit(register_bits(t.n())),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkSpectrumReport {
    pub n: usize,
    /// `e^{±i acos λ}` for the interior eigenvalues of the encoded operator.
    #[serde(serialize_with = "pairs")]
    pub from_encoding: Vec<c64>,
    /// Eigenvalues of `W` other than `±1`, when `W` was diagonalized.
    #[serde(serialize_with = "optional_pairs")]
    pub from_walk: Option<Vec<c64>>,
    pub angular_gap: f64,
    pub max_mismatch: Option<f64>,
    pub spectra_equal: Option<bool>,
    /// Largest eigen-residual of the vectors built from the encoded eigenvectors.
    pub eigvec_residual: Option<f64>,
}

fn pairs<S: serde::Serializer>(v: &[c64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

fn optional_pairs<S: serde::Serializer>(v: &Option<Vec<c64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => pairs(v, s),
        None => s.serialize_none(),
    }
}

/// Small instances go through the full walk on all pairs; larger ones through the rank-`n`
/// dilation spectrum on the edge space.
pub fn walk_spectrum_report(inst: &Instance, tol: &Tolerances, match_tol: f64) -> Result<WalkSpectrumReport> {
    let n = inst.n();
    if n > FULL_WALK_MAX_N {
        let space = dual::edge_space(&inst.t);
        let spectrum = DilationSpectrum::compressed(&inst.t, &inst.a, &inst.pi, &space)?;
        let enc = walk::walk_spectrum_from_encoded(&spectrum.eigenvalues(), match_tol);
        return Ok(WalkSpectrumReport {
            n,
            angular_gap: enc.angular_gap,
            from_encoding: enc.nontrivial,
            from_walk: None,
            max_mismatch: None,
            spectra_equal: None,
            eigvec_residual: None,
        });
    }
    let w = MhWalk::new(&inst.t, &inst.a, tol)?;
    let encoded = linalg::symmetric_eigenvalues(w.encoded().as_ref())?;
    let enc = walk::walk_spectrum_from_encoded(&encoded, match_tol);
    let full = walk::walk_spectrum_full(&w.walk, match_tol)?;
    let m = linalg::match_spectra(&full.nontrivial, &enc.nontrivial, match_tol);
    let (residual, _) = walk::eigvec_residual(&w.spue, &w.walk, match_tol)?;
    Ok(WalkSpectrumReport {
        n,
        angular_gap: full.angular_gap,
        from_encoding: enc.nontrivial,
        from_walk: Some(full.nontrivial),
        max_mismatch: Some(m.max_mismatch),
        spectra_equal: Some(m.is_equal()),
        eigvec_residual: Some(residual),
    })
}

impl WalkSpectrumReport {
    /// CSV with columns `source, index, re, im, phase`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["source", "index", "re", "im", "phase"])?;
        let sources = [("encoding", Some(&self.from_encoding)), ("walk", self.from_walk.as_ref())];
        for (name, values) in sources {
            for (k, z) in values.into_iter().flatten().enumerate() {
                out.write_record([name.to_string(), k.to_string(), z.re.to_string(), z.im.to_string(), z.arg().to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

impl GapReport {
    /// CSV with columns `quantity, value`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["quantity", "value"])?;
        let mut row = |k: &str, v: String| out.write_record([k.to_string(), v]);
        row("n", self.n.to_string())?;
        row("delta", self.delta.to_string())?;
        row("delta_star", self.delta_star.to_string())?;
        row("lambda", self.lambda.to_string())?;
        row("angular_gap", self.angular_gap.to_string())?;
        row("mixing_lower", self.mixing.bounds.lower.to_string())?;
        row("mixing_upper", self.mixing.bounds.upper.to_string())?;
        row("mixing_time", self.mixing.mixing_time.map_or("none".into(), |m| m.to_string()))?;
        row("walk_qubits", self.qubits.walk_qubits().to_string())?;
        row("cswap_qubits", self.qubits.cswap_qubits().to_string())?;
        out.flush()?;
        Ok(())
    }
}
