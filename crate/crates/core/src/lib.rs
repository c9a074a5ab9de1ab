//! Invariants of chain-type invertible polynomials and exact/high-precision
//! checks of their Gamma integral structure.
//!
//! The crate is organised bottom-up:
//!
//! * [`chain`]: degrees, index sets, exponents, the map `ψ`, monomial bases;
//! * [`forms`]: exact matrices `η`, `Q̃`, `χ`, `S`, `X_l`, intersection form;
//! * [`numerics`]: Gamma values, `ch_Γ`, orthant integrals, central charges;
//! * [`lattice`]: braid/parity actions and Picard–Lefschetz reflections;
//! * [`verify`]: the identity checks and their report.

pub mod chain;
pub mod error;
pub mod forms;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod numerics;
pub mod verify;

pub use chain::{new_chain, ChainDescriptor, ExponentTuple, Monomial, SectorIndex, SymmetryElement};
pub use error::{Error, Result};
pub use matrix::{IntMatrix, RationalMatrix};
pub use numerics::PrecContext;
