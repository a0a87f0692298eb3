//! The three operator stages and their shared constants ledger: the
//! piecewise-step interpolant for the monotone part, the high-power
//! smoothing operator for the flat remainder, and the breakpoint
//! corrections that pin the derivative to zero where the sign pattern
//! flips. [`assemble_tau`] chains them into the final comonotone
//! approximant.

pub mod assemble;
pub mod constants;
pub mod theta;

pub use assemble::{assemble_tau, ApproximationResult, StageTimings};
pub use constants::{
    resolve_constants, ConstantsLedger, LedgerRow, Mode, Provenance, DEFAULT_KERNEL_RANGE,
};
pub use theta::build_theta;
