//! Numerical laboratory for area-preserving maps of simple surfaces.
//!
//! The crate models three surfaces (flat annulus, round sphere, Euclidean
//! plane), builds composable symplectic maps on them (rotations, twists,
//! implicit-midpoint Hamiltonian flows), and computes certified estimates of
//! the norms that relate to each other through the Hölder-type inequality
//! `d_C0(φ, Id) ≤ C √γ(φ) ‖Dφ‖`: the C0 distance, the sup derivative norm,
//! Hofer-norm upper bounds and the exact oscillation value in the C2-small
//! regime.  On top of that sit exact continued-fraction arithmetic for
//! rotation numbers, exponentially-Liouville certificates, an Anosov-Katok
//! style conjugation forge, and the experiment harnesses wired to the
//! `symplab` CLI.
//!
//! Grid sweeps run in parallel when the default `parallel` feature is on;
//! results are bit-identical regardless of worker count because every sweep
//! collects per-index values in order before reducing.

pub mod ak;
pub mod cli;
pub mod config;
pub mod diophantine;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod hamiltonian;
pub mod integrator;
pub mod linalg;
pub mod maps;
pub mod norms;
pub mod parallel;
pub mod phase_space;
pub mod report;

pub use error::{Error, Result};
