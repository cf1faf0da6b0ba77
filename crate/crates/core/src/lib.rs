//! Enumeration and verification of even elliptic finite-gap potentials.
//!
//! The crate is organized around five subsystems:
//!
//! * [`elliptic`] — Weierstrass function evaluation over a complex lattice;
//! * [`types`] — exact integer arithmetic on cover type vectors: parity
//!   classes, coefficient correspondences, involution combinatorics and the
//!   stratified spectral enumeration;
//! * [`pic`] — intersection theory on the rank-10 Picard lattice of the
//!   quotient surface and its weak del Pezzo contractions;
//! * [`dg`] — the reduced pole-system polynomials, their depth-1 and depth-2
//!   solvers, and residual verification against the transcendental system;
//! * [`plane`] — projective plane-curve computations: intersection
//!   multiplicities along parameterized branches, explicit tangency
//!   certificates, dual-curve singularity budgets.

pub mod config;
pub mod dg;
pub mod elliptic;
pub mod error;
pub mod pic;
pub mod plane;
pub mod poly;
pub mod types;

pub use config::ToleranceConfig;
pub use elliptic::{AdditionResiduals, Lattice, WpValues};
pub use error::{Error, Result};
pub use types::{AlphaVector, SpectralDatum, TypeVector};
