//! Quantum thermal expectation values of a single paramagnetic spin computed
//! from classical stochastic Landau-Lifshitz-Gilbert dynamics.
//!
//! The spin Hamiltonian `H = -A0 - A1 Sz - A2 Sz^2` is mapped onto a classical
//! energy on the unit sphere through its spin-coherent-state symbol. Three
//! effective fields are available (classical limit, high-temperature expansion
//! to order N, exact logarithm) and the resulting ensemble averages are compared
//! against the exact quantum cumulants computed in the standard basis.
//!
//! Module map:
//!
//! * [`series`]: truncated power series in the inverse temperature.
//! * [`model`]: couplings, coherent-state polynomial, effective Hamiltonians and fields.
//! * [`oracle`]: exact quantum cumulants of `Sz`.
//! * [`dynamics`]: stochastic LLG integration of one unit moment.
//! * [`harness`]: sweep configuration, ensemble averaging and persistence.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
mod error;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod parallel;
pub mod series;
pub mod validate;
pub mod vec3;

pub use error::{Error, Result};
pub use model::{FieldModel, FieldModelKind, ModelParams, SpinNumber};
pub use series::TruncatedSeries;
