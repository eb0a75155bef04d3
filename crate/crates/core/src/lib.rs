//! Formal analysis of linear systems of partial differential equations with
//! rational coefficients: involutive completion, compatibility conditions,
//! duality, torsion and purity.

pub mod coefficients;
pub mod ore;
pub mod janet;
pub mod linalg;
pub mod dsl;
pub mod spencer;
pub mod duality;
pub mod purity;
pub mod report;
