//! Bounded interpolation: minimal norm from the Pick matrix, realisation by the Schur algorithm.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{DiscError, Result};
use crate::hyperbolic::{difference, one_minus_conj_product, pseudo_distance, DiscPoint, C64};
use crate::kernel::{re, ClosedForm, Frame, Taylor};

/// `[[Re, -Im], [Im, Re]]`: real symmetric exactly when `m` is Hermitian, and
/// positive definite exactly when `m` is. (Cholesky on the complex matrix itself
/// takes complex square roots of the pivots and so never reports failure.)
fn real_embedding(m: &DMatrix<C64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let v = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

/// Eigenvalues of a Hermitian matrix, via the real embedding (where each appears twice).
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(real_embedding(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

/// Find `h` analytic and bounded in the disc with `h(nodes[j]) = targets[j]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationProblem {
    pub nodes: Vec<DiscPoint>,
    pub targets: Vec<C64>,
    pub norm_cap: Option<f64>,
}

/// Nodes closer than this pseudo-hyperbolically are rejected.
pub const NODE_SEPARATION: f64 = 1e-10;
/// Headroom over the minimal norm used for the realisation.
pub const HEADROOM: f64 = 1.05;
const MAX_CONDITION: f64 = 1e12;

impl InterpolationProblem {
    pub fn new(nodes: Vec<DiscPoint>, targets: Vec<C64>) -> Result<Self> {
        if nodes.len() != targets.len() {
            return Err(DiscError::InvalidArgument(format!(
                "{} nodes but {} targets",
                nodes.len(),
                targets.len()
            )));
        }
        for i in 0..nodes.len() {
            for j in 0..i {
                if pseudo_distance(&nodes[i], &nodes[j]) <= NODE_SEPARATION {
                    return Err(DiscError::CoincidentNodes(j, i));
                }
            }
        }
        Ok(Self {
            nodes,
            targets,
            norm_cap: None,
        })
    }

    pub fn with_norm_cap(mut self, cap: f64) -> Self {
        self.norm_cap = Some(cap);
        self
    }

    /// `[(c² - ν_j ν̄_k) / (1 - ζ_j ζ̄_k)]`.
    pub fn pick_matrix(&self, c: f64) -> DMatrix<C64> {
        let n = self.nodes.len();
        DMatrix::from_fn(n, n, |j, k| {
            (re(c * c) - self.targets[j] * self.targets[k].conj()) / one_minus_conj_product(&self.nodes[k], &self.nodes[j])
        })
    }

    /// Pick matrix with unit diagonal, or `None` when some diagonal entry is not positive.
    fn scaled_pick(&self, c: f64) -> Option<DMatrix<C64>> {
        let p = self.pick_matrix(c);
        let d: Vec<f64> = (0..p.nrows()).map(|j| p[(j, j)].re).collect();
        if d.iter().any(|x| !(*x > 0.0)) {
            return None;
        }
        let s: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
        Some(DMatrix::from_fn(p.nrows(), p.ncols(), |j, k| p[(j, k)] * (s[j] * s[k])))
    }

    /// Whether the Pick matrix at norm `c` is positive definite.
    pub fn is_feasible(&self, c: f64) -> bool {
        self.scaled_pick(c).and_then(|m| Cholesky::new(real_embedding(&m))).is_some()
    }

    /// Condition number of the scaled Pick matrix at norm `c`.
    pub fn condition(&self, c: f64) -> f64 {
        match self.scaled_pick(c) {
            None => f64::INFINITY,
            Some(m) => {
                let ev = hermitian_eigenvalues(&m);
                let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = ev.iter().cloned().fold(0.0, f64::max);
                if lo <= 0.0 {
                    f64::INFINITY
                } else {
                    hi / lo
                }
            }
        }
    }

    /// Smallest norm any interpolant can have, by bisection on feasibility.
    pub fn minimal_norm(&self) -> Result<f64> {
        let lo0 = self.targets.iter().map(|t| t.norm()).fold(0.0, f64::max);
        if lo0 == 0.0 {
            return Ok(0.0);
        }
        let mut lo = lo0;
        let mut hi = 2.0 * lo0;
        let mut doublings = 0;
        while !self.is_feasible(hi) {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                return Err(DiscError::PickConditioning(f64::INFINITY));
            }
        }
        while hi - lo > 1e-14 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.is_feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// `C · s` where `s` is the Schur function produced by the Schur algorithm with
/// free parameter zero: `s_k = (γ_k + b_k s_{k+1}) / (1 + γ̄_k b_k s_{k+1})`,
/// `b_k(z) = (z - ζ_k)/(1 - ζ̄_k z)`, `s_n = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchurInterpolant {
    pub nodes: Vec<DiscPoint>,
    pub parameters: Vec<C64>,
    pub norm: f64,
}

impl SchurInterpolant {
    pub fn zero() -> Self {
        Self {
            nodes: Vec::new(),
            parameters: Vec::new(),
            norm: 0.0,
        }
    }

    /// Runs the Schur reduction on data normalised by `norm`.
    pub fn build(nodes: &[DiscPoint], targets: &[C64], norm: f64) -> Result<Self> {
        if norm == 0.0 {
            return Ok(Self::zero());
        }
        let mut w: Vec<C64> = targets.iter().map(|t| t / norm).collect();
        let mut parameters = Vec::with_capacity(nodes.len());
        for k in 0..nodes.len() {
            let g = w[k];
            if g.norm() >= 1.0 {
                return Err(DiscError::PickConditioning(1.0 / (1.0 - g.norm()).max(f64::MIN_POSITIVE)));
            }
            for j in k + 1..nodes.len() {
                let bk = difference(&nodes[j], &nodes[k]) / one_minus_conj_product(&nodes[k], &nodes[j]);
                w[j] = (w[j] - g) / (re(1.0) - g.conj() * w[j]) / bk;
            }
            parameters.push(g);
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            parameters,
            norm,
        })
    }
}

impl ClosedForm for SchurInterpolant {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let mut s = T::zeros(at, order);
        for (zk, g) in self.nodes.iter().zip(&self.parameters).rev() {
            let num = T::linear(at, order, difference(&at.center, zk), re(1.0));
            let den = T::linear(at, order, one_minus_conj_product(zk, &at.center), -zk.value().conj());
            let bs = num / den * s;
            s = (bs.clone() + *g) / (bs * g.conj() + re(1.0));
        }
        s * re(self.norm)
    }
}

/// Output of [`pick_solve`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PickSolution {
    /// Minimal norm `c*`.
    pub minimal_norm: f64,
    /// The interpolant, of norm at most `1.05 c*`.
    pub interpolant: SchurInterpolant,
    /// Largest `|h(ζ_j) - ν_j|`.
    pub residual: f64,
    pub condition: f64,
}

/// Interpolation residuals above this abort the construction.
pub const RESIDUAL_TOL: f64 = 1e-8;

pub fn pick_solve(problem: &InterpolationProblem) -> Result<PickSolution> {
    let c_star = problem.minimal_norm()?;
    if let Some(cap) = problem.norm_cap {
        if c_star > cap {
            return Err(DiscError::InvalidArgument(format!("minimal norm {c_star} exceeds cap {cap}")));
        }
    }
    let norm = HEADROOM * c_star;
    let condition = if c_star == 0.0 { 1.0 } else { problem.condition(norm) };
    if condition > MAX_CONDITION {
        return Err(DiscError::PickConditioning(condition));
    }
    let interpolant = SchurInterpolant::build(&problem.nodes, &problem.targets, norm)?;
    let mut residual: f64 = 0.0;
    for (z, t) in problem.nodes.iter().zip(&problem.targets) {
        let v: crate::kernel::Jet = interpolant.eval((*z).into(), 0);
        residual = residual.max((v.value() - t).norm() / t.norm().max(1.0));
    }
    if residual > RESIDUAL_TOL {
        return Err(DiscError::InterpolationResidual(residual));
    }
    Ok(PickSolution {
        minimal_norm: c_star,
        interpolant,
        residual,
        condition,
    })
}
