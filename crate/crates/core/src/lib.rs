//! Edge-space ("dual") Metropolis-Hastings kernels, the quantum step operators that encode them,
//! and the qubitized walks built on top, all simulated with dense or column-sparse linear algebra.
//!
//! The layers build on each other:
//!
//! * [`chain`]: finite Markov kernels, MH construction, stationary laws, gaps, mixing times.
//! * [`dual`]: the lift to directed edges and the dilation whose gap the walk amplifies.
//! * [`walk`]: oracles, step isometries, Hermitianization and the walk operator `W`.
//! * [`gates`]: the same operators assembled from primitive gates on a qubit register.
//! * [`mala`]: discretized Langevin proposals on a periodic grid.
//! * [`lab`]: sampling experiments, sweeps and reports.

#![allow(clippy::needless_range_loop)]

pub mod chain;
pub mod dual;
pub mod error;
pub mod exec;
pub mod gates;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod mala;
mod tol;
pub mod walk;

pub use error::{Error, Result};
pub use exec::Execution;
pub use faer::c64;
pub use tol::Tolerances;
