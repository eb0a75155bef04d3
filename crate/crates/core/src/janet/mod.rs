//! Involutive completion of linear systems and the data read off an involutive basis.

mod basis;
mod cc;
mod charideal;
mod coords;
mod echelon;
mod oracle;

pub use basis::{
    change_coordinates, complete_to_involution, complete_with, jet_dimension, CompleteOptions, JanetBasis, JetSystem,
};
pub use cc::{
    basis_compatibility_conditions, compatibility_conditions, free_resolution, in_module, minimize_generators,
    operator_cc, resolve_from, same_module, CcOptions, FreeResolution, Membership, OperatorCc,
};
pub use charideal::{characteristic_ideal, CharIdeal};
pub use coords::CoordChange;
pub use echelon::{Echelon, TRow};
pub use oracle::{rank_oracle, symbol_oracle};

use crate::coefficients::CoeffError;
use crate::ore::OreError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JanetError {
    #[error("not-delta-regular")]
    NotDeltaRegular,
    #[error("order-bound")]
    OrderBound,
    #[error("{0}")]
    Coeff(#[from] CoeffError),
    #[error("{0}")]
    Ore(#[from] OreError),
    #[error("untracked basis")]
    Untracked,
}
