//! Explicit equations with known solutions, and finite truncations of the
//! interpolation-based constructions.

pub mod examples;
pub mod pick;
pub mod witness;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

pub use examples::{
    example_blaschke_quotient, example_gamma, example_q, lappan_function, relative_residual_at, GammaCoefficient, GammaExample, GammaSolution,
    Lappan, QCoefficient, QExample, QSolution, QuotientCoefficient, QuotientSolution,
};
pub use pick::{pick_solve, InterpolationProblem, PickSolution, SchurInterpolant};
pub use witness::{
    build_bmoa_interpolant, build_nonnormal_witness, build_prescribed_values_witness, corona_grid, dyadic_zeros, BmoaInterpolant,
    NonnormalCoefficient, NonnormalWitness, PrescribedValuesWitness,
};

use crate::error::Result;
use crate::hyperbolic::{DiscPoint, C64};
use crate::kernel::{GaugePsi, SharedOracle, Taylor};
use crate::parallel;

/// A coefficient together with a solution and what was prescribed.
#[derive(Clone)]
pub struct WitnessBundle {
    pub name: String,
    pub a: SharedOracle,
    pub f: SharedOracle,
    /// Jets of `c(z) f` for a pointwise constant `c(z) > 0`; equal to `f` unless
    /// `f` itself overflows somewhere. Scale-invariant checks use this.
    pub normalized: SharedOracle,
    /// `(f(0), f'(0))` when finite.
    pub initial: Option<(C64, C64)>,
    pub metadata: BTreeMap<String, f64>,
    pub gauge: Option<GaugePsi>,
    pub prescribed: Vec<DiscPoint>,
}

impl fmt::Debug for WitnessBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WitnessBundle")
            .field("name", &self.name)
            .field("initial", &self.initial)
            .field("metadata", &self.metadata)
            .finish_non_exhaustive()
    }
}

impl WitnessBundle {
    pub fn new(name: impl Into<String>, a: SharedOracle, f: SharedOracle) -> Result<Self> {
        let initial = f.jet(DiscPoint::origin(), 1).ok().map(|j| (j.value(), j.derivative_at(1)));
        Ok(Self {
            name: name.into(),
            a,
            normalized: f.clone(),
            f,
            initial,
            metadata: BTreeMap::new(),
            gauge: None,
            prescribed: Vec::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: f64) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    pub fn with_normalized(mut self, g: SharedOracle) -> Self {
        self.normalized = g;
        self
    }

    pub fn with_gauge(mut self, psi: GaugePsi) -> Self {
        self.gauge = Some(psi);
        self
    }

    pub fn with_prescribed(mut self, zeros: Vec<DiscPoint>) -> Self {
        self.prescribed = zeros;
        self
    }

    /// Largest relative residual `|f'' + Af| / (|f''| + |A||f|)` over `samples`.
    pub fn residual(&self, samples: &[DiscPoint]) -> Result<f64> {
        let r = parallel::try_map(samples, |z| relative_residual_at(&self.a, &self.normalized, *z))?;
        Ok(r.into_iter().fold(0.0, f64::max))
    }
}

/// Origin plus 12 radii up to 0.99 times 24 angles.
pub fn standard_residual_grid() -> Vec<DiscPoint> {
    let mut out = vec![DiscPoint::origin()];
    for i in 1..=12 {
        let r = 0.99 * i as f64 / 12.0;
        for j in 0..24 {
            out.push(DiscPoint::from_polar_gap(1.0 - r, TAU * (j as f64 + 0.5) / 24.0).expect("inside"));
        }
    }
    out
}
