//! Exact cut-and-project approximate lattices and finite-scale checks of
//! Szemerédi-type recurrence statements on them.
//!
//! The crate builds the model sets `{ m + n√D : |m − n√D| ≤ w }` in `R` and
//! `{ γ ∈ Z[1/p] : |γ|_∞ ≤ w }` in `Q_p`, verifies their approximate-lattice
//! axioms on finite regions, and searches them for dilated patterns,
//! arithmetic progressions and multiple-recurrence witnesses, with all
//! membership decisions made in exact integer arithmetic.

pub mod cli;
pub mod density;
pub mod error;
pub mod exactnum;
pub mod ipsystems;
pub mod patterns;
pub mod scheme;
pub mod transversal;

pub use error::{ArithError, Error, Result};
