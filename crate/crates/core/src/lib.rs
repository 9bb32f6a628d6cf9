//! Exact matrix-factorization calculus for isolated hypersurface singularities.
//!
//! The crate builds matrix factorizations over `Q(zeta_m)[x_1, ..., x_n]`, computes
//! cohomology of their morphism complexes with Gröbner bases, and checks trace formulas
//! (boundary-bulk maps, residue pairings, Lefschetz-type identities and the divisibility
//! consequences) by exact arithmetic.

pub mod cli;
pub mod document;
pub mod error;
pub mod expr;
pub mod groebner;
pub mod hilbert;
pub mod homcoh;
pub mod lefschetz;
pub mod linalg;
pub mod mf;
pub mod milnor;
pub mod poly;
pub mod scalars;

pub use error::{Error, Result};
pub use scalars::{RootOfUnity, Scalar};
