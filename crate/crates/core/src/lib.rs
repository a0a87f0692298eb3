//! Constructive comonotone trigonometric approximation.
//!
//! Given a 2pi-periodic piecewise monotone function whose monotonicity
//! pattern is fixed by an even set of breakpoints, this crate builds a
//! trigonometric polynomial that shares the pattern exactly while matching
//! the function at the Jackson rate `c / n^r`, and verifies both properties
//! numerically.

pub mod corpus;
pub mod decompose;
pub mod error;
pub mod kernels;
pub mod operators;
pub mod partition;
pub mod quad;
pub mod scalar;
pub mod step;
pub mod trigpoly;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;
pub use trigpoly::{BreakpointSet, LinearPlusTrig, PiPoly, TrigPoly};

/// Concrete double-precision aliases for the generic core types.
pub type TrigPoly64 = TrigPoly<f64>;
pub type LinearPlusTrig64 = LinearPlusTrig<f64>;
pub type BreakpointSet64 = BreakpointSet<f64>;
pub type KernelSpec64 = kernels::KernelSpec<f64>;
pub type StepApproximant64 = step::StepApproximant<f64>;
pub type PartitionState64 = partition::PartitionState<f64>;
pub type ConstantsLedger64 = operators::ConstantsLedger<f64>;
pub type ApproximationResult64 = operators::ApproximationResult<f64>;
