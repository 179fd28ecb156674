//! Differential operators as expression trees over first-order factors,
//! applied pointwise to complex jets.

mod build;
mod coeff;
mod expr;

pub use build::{
    a_c, breve_for_pair, breve_reduced, breve_x1, breve_y, breve_y_for_pair, compose_a, crum_tail, darboux_factor,
    g2, hamiltonian, hat_x1, intertwiner_x, intertwiner_y, isospectral_generators_n2, kappas_coincide, lax_z,
    reduced_x1, reduced_x3, reduced_x5_r, shift_constant, special_family_taus, special_tau1_prime, IsoGenerators,
    Reduced, Seed, Variant, KAPPA_TOL,
};
pub use coeff::Coeff;
pub use expr::{effective_order, Node, Op};

use crate::numkern::NumError;
use crate::soliton::SolitonError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("equal shifts make the reduced intertwiner constant diverge")]
    DegenerateShift,
    #[error("parameters do not fit this construction: {0}")]
    CaseMismatch(String),
    #[error("systems are not exactly isospectral")]
    NotExactIso,
    #[error(transparent)]
    Soliton(#[from] SolitonError),
}

impl From<NumError> for DiffError {
    fn from(e: NumError) -> Self {
        DiffError::Soliton(SolitonError::Numeric(e))
    }
}
