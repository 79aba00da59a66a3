//! Miura canonical curves for telescopic sequences.
//!
//! The crate follows one pipeline: a telescopic sequence `(a_1, ..., a_t)`
//! ([`semigroup`]) determines the shape of the defining equations
//! ([`curve`]), whose Jacobian minors give the holomorphic differentials and
//! the divided-difference form ([`differentials`]). Symmetrizing that form
//! yields the second-kind differentials ([`fundform`]). For hyperelliptic
//! members the [`riemann`] layer integrates everything numerically and
//! evaluates the sigma function.

pub mod curve;
pub mod groebner;
pub mod numeric;
pub mod poly;
pub mod semigroup;
pub mod differentials;
pub mod fundform;
pub mod riemann;
pub mod cli;
