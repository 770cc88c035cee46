//! Closed subgroups of phase space, truncated Fock-space operators and the Gelfand
//! transforms of the commutative invariant Toeplitz algebras.
//!
//! Geometry (`symplectic`, `subgroup`, `normal_form`, `area`) is generic over [`Real`];
//! the operator numerics (`fock`, `gelfand`) run in `f64`.

pub mod area;
pub mod error;
pub mod fock;
pub mod gelfand;
pub mod io;
mod linalg;
pub mod normal_form;
pub mod properties;
pub mod sampling;
pub mod scalar;
pub mod subgroup;
pub mod symplectic;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PhasePoint = symplectic::PhasePoint<f64>;
pub type PhasePoint32 = symplectic::PhasePoint<f32>;
pub type SymplecticMap = symplectic::SymplecticMap<f64>;
pub type SymplecticMap32 = symplectic::SymplecticMap<f32>;
pub type ClosedSubgroup = subgroup::ClosedSubgroup<f64>;
pub type ClosedSubgroup32 = subgroup::ClosedSubgroup<f32>;
pub type Tolerances = symplectic::Tolerances<f64>;
