//! Analytic-function machinery: jets, oracles, Blaschke products, gauges and grid norms.

pub mod blaschke;
pub mod gauge;
pub mod grid;
pub mod norms;
pub mod oracle;
pub mod taylor;

pub use blaschke::{blaschke_jet, separation_constant, BlaschkeProduct, SeparationConstant};
pub use gauge::{smoothness_constant, GaugePsi};
pub use oracle::{constant, AnalyticOracle, Closed, ClosedForm, Derivative, FnOracle, Polynomial, SharedOracle, Shifted};
pub use taylor::{re, Frame, Jet, Series, Taylor, MAX_JET_ORDER};
pub use grid::{circle_sup, grid_sup, GridLevel, GridSpec, Ray, SupEstimate};
pub use norms::{
    bmoa_seminorm_estimate, carleson_measure_estimate, hardy_norm_estimate, quotient_spherical, schwarzian,
    spherical_derivative, weighted_sup_estimate, CarlesonBox, Schwarzian, SupKind,
};
