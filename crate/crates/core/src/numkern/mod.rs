//! Truncated Taylor jets with a separate log-scale.
//!
//! Everything downstream evaluates operators pointwise by pushing jets
//! through first-order factors, so overflow-free seeds and exact
//! derivative bookkeeping live here.

mod jet;
mod scalar;
mod seeds;

pub use jet::{Jet, ScaledValue};
pub use scalar::Scalar;
pub use seeds::{default_order, exp_ikx, gaussian_packet, seed_jet, RealSeed, POLE_GUARD};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("evaluation at x = {point} is within the pole guard of x = {pole}")]
    PoleProximity { pole: f64, point: f64 },
    #[error("jets expanded at different points ({left} vs {right})")]
    PointMismatch { left: f64, right: f64 },
    #[error("jet order exhausted: need {needed}, have {available}")]
    OrderExhausted { needed: usize, available: usize },
    #[error("division by a jet whose value vanishes at x = {point}")]
    ZeroBase { point: f64 },
}
