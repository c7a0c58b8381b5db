//! Classical workbench for decoded quantum interferometry applied to
//! optimal polynomial intersection (OPI).
//!
//! The crate covers the classical machinery behind the quantum algorithm
//! and behind the attacks it is compared against:
//!
//! - [`gf`]: GF(2^b) arithmetic, imported gate-cost constants, PCTOF rank minimization.
//! - [`poly`]: dense polynomials and the reference extended Euclidean algorithm.
//! - [`eea_sync`]: cycle-accurate synchronized EEA with explicit Bezout cofactors.
//! - [`eea_dialog`]: division-free EEA recorded as a Dialog and its playbacks.
//! - [`rs_decode`]: Reed-Solomon syndrome decoding with Chien search and Forney.
//! - [`dicke`]: ranking and unranking of k-combinations.
//! - [`attacks`]: Prange and Extended Prange trial estimators and analytic bounds.
//! - [`bent`]: Maiorana-McFarland target sets and exhaustive affine intersections.
//! - [`report`]: end-to-end estimate reports used by the CLI.

pub mod attacks;
pub mod bent;
pub mod dicke;
pub mod eea_dialog;
pub mod eea_sync;
pub mod error;
pub mod gf;
pub mod ledger;
pub mod poly;
pub mod report;
pub mod rng;
pub mod rs_decode;

pub use error::{Error, Result};
pub use gf::{Felt, FieldSpec};
pub use ledger::CostLedger;
pub use poly::Poly;
