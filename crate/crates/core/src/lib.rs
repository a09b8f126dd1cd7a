//! Numerical laboratory for Nevanlinna value-distribution functionals and
//! explicit-constant audits of bounds on the Riemann zeta function.

pub mod audit;
pub mod dd;
pub mod error;
pub mod functions;
pub mod nevanlinna;
pub mod types;
pub mod verdict;
pub mod zeros;
pub mod zeta;

pub use error::{Error, Result};
pub use functions::{FunctionHandle, ZetaShift};
pub use types::{ComplexValue, DiskSpec, DivisorPoint, EvalProvenance, EvalResult, PointList};
pub use verdict::{Bound, LemmaVerdict};
