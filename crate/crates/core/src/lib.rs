//! Exact equivariant descendant invariants of `[ℂʳ/G]` for finite `G`.
//!
//! ```
//! use std::sync::Arc;
//! use orbigw::{character_table, correlator_x, r_matrix, Basis, FiniteGroup, Insertion, RepSpec, Target};
//!
//! # fn main() -> Result<(), orbigw::Error> {
//! let table = character_table(Arc::new(FiniteGroup::builtin("binary_dihedral", 2)?))?;
//! let target = Target::new(Arc::new(table), RepSpec::new(vec![4, 0]))?;
//! let r = r_matrix(&target, 4)?;
//! let ins = [Insertion { basis: Basis::Phibar, label: 4, a: 0 }; 3];
//! let value = correlator_x(&target, &r, 1, &ins, None)?;
//! assert!(value.has_rational_coeffs());
//! # Ok(())
//! # }
//! ```

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod chars;
pub mod chen_ruan;
pub mod error;
pub mod example;
pub mod graphs;
pub mod group;
pub mod oracle;
pub mod psi;
pub mod rmatrix;

pub use algebra::{Cyclotomic, EqScalar, Exponent, Rational, Series, Series2};
pub use chars::{character_table, CharacterTable};
pub use chen_ruan::{Basis, RepSpec, Target};
pub use error::{Error, Result};
pub use graphs::{correlator_tw, correlator_x, GraphOptions, GraphSum, Insertion, Normalization};
pub use group::{FiniteGroup, GroupDescriptor};
pub use psi::psi_integral;
pub use rmatrix::{r_matrix, BernoulliIndex, RMatrix};
