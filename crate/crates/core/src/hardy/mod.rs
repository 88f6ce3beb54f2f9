//! Exact realization of the degree-`k` section spaces as spans of
//! weighted-homogeneous monomials: enumeration, normalization, invariant
//! sub-bases and dimension asymptotics.

pub mod asymptotics;
pub mod basis;
pub mod lattice;
pub mod norms;

pub use asymptotics::{dim_asymptotics, AsymptoticsReport};
pub use basis::{build_basis, gram_check, MonomialBasis, SymmetryConstraint};
pub use lattice::{dim_fourier, dim_table, enumerate_monomials, MultiIndex};
pub use norms::{ln_round_norm_sq, monomial_norm};
