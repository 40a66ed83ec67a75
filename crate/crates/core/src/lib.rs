//! Tensor diagonals of symmetric projective tensor products of `l_p` and
//! orthogonally additive homogeneous polynomials, at finite dimension.
//!
//! * [`rademacher`]: generalized k-Rademacher functions with exact integrals.
//! * [`diagonal`]: diagonal tensors, their Rademacher-average decomposition
//!   and two-sided bounds on the projective norm.
//! * [`oapoly`]: orthogonally additive polynomials, their norms and witnesses,
//!   dense k-linear forms, polarization and additivity tests.

pub mod cyclo;
pub mod diagonal;
pub mod error;
pub mod numerics;
pub mod oapoly;
pub mod rademacher;
pub mod sampling;

pub use error::{Error, Result};
pub use numerics::{Field, LpParams, Regime, Scalar};
