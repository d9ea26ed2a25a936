//! Solutions of `f'' + A f = 0` in the unit disc: power-series continuation,
//! zero and critical-point location, numerical checks of separation and
//! normality inequalities, and explicit witness constructions.

pub mod constructions;
pub mod error;
pub mod hyperbolic;
pub mod kernel;
pub mod locator;
pub mod ode;
pub mod parallel;
pub mod verify;

pub use error::{DiscError, Result};
pub use hyperbolic::{DiscPoint, C64};
