//! Gap amplification on the two-well Langevin family: the classical gap `δ` against the
//! angular gap `Δ` of the walk, one point per parameter value.

use serde::{Deserialize, Serialize};

use crate::chain::{self, AcceptanceChoice};
use crate::dual::{self, DilationSpectrum};
use crate::mala::{self, MalaConfig, Potential};
use crate::{Error, Execution, Result, Tolerances};

/// Slack on `Δ >= acos(sqrt(1 - δ/2))`.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    /// Inverse temperature.
    Beta,
    /// Time step.
    Tau,
    /// Multiplier on the potential values.
    Scale,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Beta => "beta",
            SweepParameter::Tau => "tau",
            SweepParameter::Scale => "scale",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(SweepParameter::Beta),
            "tau" => Ok(SweepParameter::Tau),
            "scale" => Ok(SweepParameter::Scale),
            other => Err(Error::InvalidConfig(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    #[serde(default = "default_base")]
    pub base: MalaConfig,
    #[serde(default = "default_choice")]
    pub acceptance: AcceptanceChoice,
}

fn default_base() -> MalaConfig {
    MalaConfig::two_well(6, 0.01, 1.0)
}

/// The bound on `Δ` is only guaranteed for the lazy chain: without it, acceptances close to one
/// make `𝒜² ≈ 1` and `𝒫𝒫⋆ ≈ 𝒯`, which has no gap.
fn default_choice() -> AcceptanceChoice {
    AcceptanceChoice::MetropolisLazy
}

impl Default for SweepSpec {
    /// Inverse temperatures from a nearly flat target to a well-separated double well.
    fn default() -> Self {
        Self {
            parameter: SweepParameter::Beta,
            values: vec![1.0, 10.0, 100.0, 300.0, 1000.0, 2000.0, 3000.0, 5000.0],
            base: default_base(),
            acceptance: default_choice(),
        }
    }
}

impl SweepSpec {
    pub fn config_at(&self, value: f64) -> MalaConfig {
        let mut c = self.base.clone();
        match self.parameter {
            SweepParameter::Beta => c.beta = value,
            SweepParameter::Tau => c.tau = value,
            SweepParameter::Scale => {
                c.values = Some(c.potential_values().into_iter().map(|u| value * u).collect());
                c.potential = Potential::Table;
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Point {
    pub parameter: &'static str,
    pub value: f64,
    pub n: usize,
    pub edges: usize,
    /// Gap of the classical kernel (before halving, for the lazy choice).
    pub delta: f64,
    pub delta_star: f64,
    /// Second eigenvalue of the dilation.
    pub lambda: f64,
    /// `acos λ`.
    pub angular_gap: f64,
    /// `acos(sqrt(1 - δ/2))`.
    pub bound: f64,
    pub holds: bool,
}

/// The chain of a sweep point: proposal, target, the acceptance used by the walk, and `δ`.
pub struct SweepChain {
    pub chain: mala::MalaChain,
    pub walk_acceptance: chain::AcceptanceMatrix,
    pub delta: f64,
}

pub fn sweep_chain(config: &MalaConfig, choice: AcceptanceChoice, tol: &Tolerances) -> Result<SweepChain> {
    let classical = match choice {
        AcceptanceChoice::MetropolisLazy => AcceptanceChoice::Metropolis,
        c => c,
    };
    let chain = mala::mala_chain(config, classical)?;
    let delta = chain::analyze(&chain.p, tol)?.gap;
    let walk_acceptance = match choice {
        AcceptanceChoice::MetropolisLazy => chain.a.halved(),
        _ => chain.a.clone(),
    };
    Ok(SweepChain { chain, walk_acceptance, delta })
}

pub fn fig1_point(spec: &SweepSpec, value: f64, tol: &Tolerances) -> Result<Fig1Point> {
    let config = spec.config_at(value);
    let sc = sweep_chain(&config, spec.acceptance, tol)?;
    let space = dual::edge_space(&sc.chain.t);
    let spectrum = DilationSpectrum::compressed(&sc.chain.t, &sc.walk_acceptance, &sc.chain.pi, &space)?;
    let lambda = spectrum.lambda();
    let angular_gap = spectrum.angular_gap();
    let bound = (1.0 - sc.delta / 2.0).sqrt().acos();
    Ok(Fig1Point {
        parameter: spec.parameter.name(),
        value,
        n: config.n(),
        edges: space.len(),
        delta: sc.delta,
        delta_star: 1.0 - lambda * lambda,
        lambda,
        angular_gap,
        bound,
        holds: angular_gap >= bound - BOUND_SLACK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig1 {
    pub spec: SweepSpec,
    pub points: Vec<Fig1Point>,
}

impl Fig1 {
    pub fn all_hold(&self) -> bool {
        self.points.iter().all(|p| p.holds)
    }

    /// One header line, then one row per sweep point.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.points {
            out.serialize(p)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Sweep points are independent and run through `exec`.
pub fn reproduce_fig1(spec: &SweepSpec, tol: &Tolerances, exec: Execution) -> Result<Fig1> {
    if spec.values.is_empty() {
        return Err(Error::InvalidConfig("empty sweep".into()));
    }
    let points = exec.map(&spec.values, |&v| fig1_point(spec, v, tol)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Fig1 { spec: spec.clone(), points })
}

/// `λ` from the rank-`n` route and from a dense SVD of the ν-symmetrized edge kernel.
pub fn dense_cross_check(config: &MalaConfig, choice: AcceptanceChoice, tol: &Tolerances) -> Result<(f64, f64)> {
    let sc = sweep_chain(config, choice, tol)?;
    let space = dual::edge_space(&sc.chain.t);
    let compressed = DilationSpectrum::compressed(&sc.chain.t, &sc.walk_acceptance, &sc.chain.pi, &space)?;
    let measure = dual::nu(&sc.chain.pi, &sc.chain.t, &space)?;
    let dk = dual::dual_kernels(&sc.chain.t, &sc.walk_acceptance, &space)?;
    let dense = DilationSpectrum::dense(&dk.p, &measure)?;
    Ok((compressed.lambda(), dense.lambda()))
}
