//! Metastates of disordered mean-field models over finite alphabets.
//!
//! Given an interaction functional `F`, a-priori kernels `alpha[b]` and a
//! disorder law `pi`, the crate finds the minimizers of the quenched free
//! energy, classifies them as visible or invisible, computes their metastate
//! weights, and checks the picture against exact finite-volume Gibbs
//! computations.

pub mod cli;
pub mod error;
pub mod free_energy;
pub mod metastate;
pub mod model;
pub mod scan;
pub mod simulator;

pub use error::{Error, Result};
pub use free_energy::{find_minimizers, phi, Minimizer, Profile, Solution, SolverOptions};
pub use model::{ModelSpec, ProbabilityVector, TangentVector};
