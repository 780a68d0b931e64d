//! Geometry of qubit Pauli maps.
//!
//! A Pauli map `ρ ↦ Σ pα σα ρ σα` is diagonal in the Pauli basis, so it is
//! fully described by its three nontrivial eigenvalues `(λ1, λ2, λ3)`. This
//! crate works in those coordinates throughout:
//!
//! - [`channel`]: eigenvalue / probability coordinates, Choi matrix, action on
//!   Bloch vectors.
//! - [`regions`]: membership predicates for the positive (PT), completely
//!   positive (CPT), entanglement breaking (EBC), time-local-generator reachable
//!   (TLG), P-divisible (PDIV) and CP-divisible (CPDIV) regions, plus exact
//!   half-space descriptions of the polytopal ones.
//! - [`exact`]: rational vertex enumeration and polytope volumes under the
//!   Hilbert–Schmidt volume element `dV = dλ1 dλ2 dλ3 / 8`.
//! - [`mc`]: seeded, chunked Monte Carlo volume estimates (Hilbert–Schmidt and
//!   Fisher–Rao) and region samplers.
//! - [`dynamics`]: piecewise-constant rate schedules for time-local generators.

#![forbid(unsafe_code)]

pub mod channel;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod mc;
pub mod regions;

pub use channel::{
    apply_map, choi_matrix, lambda_to_p, p_to_lambda, ChoiMatrix, EigenvalueTriple, ProbabilityVector, QubitState,
};
pub use error::{Error, Result};
pub use regions::{Membership, RegionExpr, RegionId};
