//! Reflectionless n-soliton systems from Darboux-Crum chains of
//! `cosh`/`sinh` seeds: potentials, eigenstates, transmission.

mod chain;
pub mod closed_form;
mod spec;
mod states;
mod wronskian;

pub use chain::{build_chain, potential, Chain, ChainNode, ChainPoint};
pub use spec::{partner_kind, seed_kind, validate_spec, SolitonSpec, ValidatedSpec};
pub use states::{
    asymptotic_shift, bound_state, far_field, scatter_state, transmission, transmission_closed_form,
    well_center, Direction, Receding, Transmission,
};
pub use wronskian::{wronskian_log, wronskian_sign, WronskianLog};

use crate::numkern::NumError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolitonError {
    #[error("kappas must increase strictly (violated at index {index})")]
    OrderingViolation { index: usize },
    #[error("kappa must be positive and finite, got {0}")]
    NonPositiveKappa(f64),
    #[error("taus must be finite")]
    NonFiniteTau,
    #[error("{kappas} kappas but {taus} taus")]
    LengthMismatch { kappas: usize, taus: usize },
    #[error("seed order {0:?} is not a permutation")]
    InvalidPermutation(Vec<usize>),
    #[error("chain function phi_{level} vanishes near x = {x}")]
    SingularChain { level: usize, x: f64 },
    #[error("plane-wave asymptotics not reached by x = {x_far}")]
    AsymptoticNotReached { x_far: f64 },
    #[error(transparent)]
    Numeric(#[from] NumError),
}
