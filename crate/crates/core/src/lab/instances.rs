//! Built-in and seeded random Metropolis-Hastings instances.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{
    self, AcceptanceChoice, AcceptanceMatrix, MarkovKernel, ProbabilityVector, ValidatedProposal,
};
use crate::Result;

/// Proposal, target, acceptance and the resulting kernel.
#[derive(Clone, Debug)]
pub struct Instance {
    pub t: ValidatedProposal,
    pub pi: ProbabilityVector,
    pub a: AcceptanceMatrix,
    pub p: MarkovKernel,
}

impl Instance {
    pub fn new(t: ValidatedProposal, pi: ProbabilityVector, choice: AcceptanceChoice) -> Result<Self> {
        let a = choice.build(&t, &pi)?;
        let p = chain::mh_kernel(&t, &a)?;
        Ok(Self { t, pi, a, p })
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }
}

/// Two states, swap proposal, `π = (2/3, 1/3)`.
pub fn k2(choice: AcceptanceChoice) -> Instance {
    let t = MarkovKernel::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("swap is stochastic");
    let t = chain::validate_proposal(t).expect("swap is a valid proposal");
    let pi = ProbabilityVector::new(vec![2.0 / 3.0, 1.0 / 3.0]).expect("normalized");
    Instance::new(t, pi, choice).expect("k2 is well formed")
}

/// Random proposal on `n` states whose support contains the ring `x ~ x+1` plus each other
/// pair with probability one half, with a random strictly positive target.
pub fn random_instance(n: usize, seed: u64, choice: AcceptanceChoice) -> Result<Instance> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut support = vec![vec![false; n]; n];
    for x in 0..n {
        let y = (x + 1) % n;
        if x != y {
            support[x][y] = true;
            support[y][x] = true;
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if rng.random::<f64>() < 0.5 {
                support[x][y] = true;
                support[y][x] = true;
            }
        }
    }
    let mut m = Mat::zeros(n, n);
    for x in 0..n {
        let weights: Vec<f64> = (0..n).map(|y| if support[x][y] { rng.random_range(0.1..1.0) } else { 0.0 }).collect();
        let total: f64 = weights.iter().sum();
        for y in 0..n {
            m[(x, y)] = weights[y] / total;
        }
    }
    let t = chain::validate_proposal(MarkovKernel::new(m)?)?;
    let pi = ProbabilityVector::from_weights((0..n).map(|_| rng.random_range(0.2..1.0)).collect())?;
    Instance::new(t, pi, choice)
}

/// Family and size of a built-in kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Builtin {
    K2,
    Random { n: usize, seed: u64 },
}

impl Builtin {
    pub fn build(&self, choice: AcceptanceChoice) -> Result<Instance> {
        match *self {
            Builtin::K2 => Ok(k2(choice)),
            Builtin::Random { n, seed } => random_instance(n, seed, choice),
        }
    }
}
