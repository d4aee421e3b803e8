//! Matrix-level quantum operators: oracles, step isometries, Hermitianization and the
//! qubitized walk.
//!
//! State registers have dimension `n` (never padded); when `n` is a power of two register
//! arithmetic is bitwise XOR, matching the gate-level circuits, otherwise it is modular addition.

mod operator;
pub mod oracles;
pub mod qubitize;
mod registers;

pub use operator::Operator;
pub use oracles::{
    build_o, build_o_a, build_o_cal_a, build_o_cal_a_star, build_o_star, build_o_t, cswap_spue, CswapSpue,
};
pub use qubitize::{
    eigvec_residual, hermitianize, qubitized_walk, step_isometry, walk_spectrum_from_encoded, walk_spectrum_full,
    MhWalk, Spue, MAX_WALK_STATES, StepIsometry, WalkSpectrum,
};
pub use registers::{Arith, Registers};
