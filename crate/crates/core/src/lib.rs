//! Saddle-point approximations for first passage of subordinators.
// `!(x > 0.0)` is how NaN gets rejected along with nonpositive input
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod model;
pub mod modelstr;
pub mod montecarlo;
pub mod oracles;
pub mod passage;
pub mod quad;
pub mod saddle;
pub mod scaled;
pub mod special;

pub use error::{Error, Result};
pub use model::{ExponentValues, Kind, SubordinatorSpec, TailRatios};
pub use scaled::Scaled;
