//! Numerics for measurements whose effects need not be positive.
//!
//! A family of Hermitian effects summing to the identity, with at least one
//! effect that is not positive semi-definite, is an *N-POVM*. It yields valid
//! probabilities only on a restricted set of states. This crate builds, for an
//! N-POVM written as `N_i = Σ_k f_i^(k)(S_i^(k))` with positive `S` and
//! linear maps `f`, an ordinary POVM with one extra *reject* outcome whose
//! post-selected statistics reproduce the N-POVM on the common fixed space of
//! the adjoint maps. It also runs the converse direction, turning a
//! post-selected POVM back into an N-POVM, and treats ambiguous state
//! discrimination as an instance of that converse.
//!
//! Module map:
//!
//! * [`hermitian`]: Hermitian matrices, density matrices, canonical real
//!   coordinates.
//! * [`supermap`]: linear maps on Hermitian matrices, adjoints, fixed spaces.
//! * [`measurement`]: effect families, quantum domains, domain sampling and
//!   Monte Carlo simulation.
//! * [`bridge`]: the forward and inverse constructions and their verifiers.
//! * [`asd`]: dual bases, inconclusive measurements, group-covariant families.
//! * [`pt_example`]: the two-qubit partial-transpose instance used throughout
//!   the tests and examples.
//! * [`random`]: seeded instance generators.
//! * [`cli`]: the `npovm` command-line front end.

pub mod asd;
pub mod bridge;
pub mod cli;
pub mod error;
pub mod hermitian;
pub mod json;
mod linalg;
pub mod measurement;
pub mod pt_example;
pub mod random;
pub mod supermap;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
pub use hermitian::{CanonicalBasis, DensityMatrix, HermitianMatrix};
pub use measurement::{Measurement, MeasurementClass, Outcome};
pub use supermap::{common_fixed_subspace, Subspace, SuperMap};
