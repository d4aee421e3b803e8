//! Experiment configuration, read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::{self, AcceptanceChoice, ProbabilityVector, ValidatedProposal};
use crate::io::{KernelJson, VectorJson};
use crate::lab::figure::SweepSpec;
use crate::lab::instances::{Builtin, Instance};
use crate::mala::{self, MalaConfig};
use crate::{Error, Execution, Result, Tolerances};

/// Proposal and target stored together.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposalTargetJson {
    pub proposal: KernelJson,
    pub target: VectorJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelSource {
    Builtin(Builtin),
    /// Path to a [`ProposalTargetJson`] file, relative to the config file.
    File(PathBuf),
    Mala(MalaConfig),
}

impl Default for KernelSource {
    fn default() -> Self {
        KernelSource::Builtin(Builtin::K2)
    }
}

impl KernelSource {
    /// Proposal and target, before an acceptance choice is made.
    pub fn proposal_and_target(&self) -> Result<(ValidatedProposal, ProbabilityVector)> {
        match self {
            KernelSource::Builtin(b) => {
                let inst = b.build(AcceptanceChoice::Metropolis)?;
                Ok((inst.t, inst.pi))
            }
            KernelSource::File(path) => {
                let file: ProposalTargetJson = serde_json::from_reader(std::fs::File::open(path)?)?;
                let t = chain::validate_proposal(file.proposal.into_kernel()?)?;
                let pi = file.target.into_probability()?;
                if pi.len() != t.n() {
                    return Err(Error::DimensionMismatch { expected: t.n(), found: pi.len() });
                }
                Ok((t, pi))
            }
            KernelSource::Mala(c) => {
                let t = mala::mala_proposal(c)?;
                Ok((t, mala::boltzmann_target(&c.potential_values(), c.beta)?))
            }
        }
    }

    pub fn instance(&self, choice: AcceptanceChoice) -> Result<Instance> {
        let (t, pi) = self.proposal_and_target()?;
        Instance::new(t, pi, choice)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exact projection onto the stationary eigenspace.
    #[default]
    Exact,
    /// Phase estimation with `ancilla_bits` phase qubits, post-selected on phase zero.
    Qpe,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-projection" => Ok(Mode::Exact),
            "qpe" => Ok(Mode::Qpe),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kernel: KernelSource,
    pub acceptance: AcceptanceChoice,
    pub mode: Mode,
    pub ancilla_bits: u32,
    pub shots: u64,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Target accuracy for mixing times.
    pub epsilon: f64,
    /// Weights on `{+, -} × pairs` (length `2n²`) for the initial state `⊠ c`; uniform on
    /// `{+} × 𝒮` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kernel: KernelSource::default(),
            acceptance: AcceptanceChoice::Metropolis,
            mode: Mode::Exact,
            ancilla_bits: 6,
            shots: 100_000,
            seed: 0,
            tolerances: Tolerances::default(),
            epsilon: 0.25,
            initial: None,
            sweep: None,
            execution: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads a config and resolves kernel file paths against the config's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg: Self = serde_json::from_reader(std::fs::File::open(path)?)?;
        if let KernelSource::File(p) = &mut cfg.kernel {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if self.mode == Mode::Qpe && !(1..=16).contains(&self.ancilla_bits) {
            return Err(Error::InvalidConfig(format!("ancilla bits {} outside 1..=16", self.ancilla_bits)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if let KernelSource::Mala(c) = &self.kernel {
            c.validate()?;
        }
        Ok(())
    }
}
