//! Sampling grids for sup-norm estimates.
//!
//! A grid is a family of rays from the origin; each ray carries its points in
//! order of increasing radius, so path-continued oracles can walk it once.
//! Refinement level `L + 1` contains every point of level `L`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{DiscError, Result};
use crate::hyperbolic::DiscPoint;
use crate::parallel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// Radii `1 - 2^{-k}`, `k = 0..=k_max`, with about `base_angles / (1 - r)`
    /// angles (rounded up to a power of two, capped at `angle_cap`).
    Dyadic { k_max: u32, base_angles: usize, angle_cap: usize },
    /// `n_radii` equispaced radii in `(0, r_max]` times `n_angles` equispaced angles, plus the origin.
    Polar { r_max: f64, n_radii: usize, n_angles: usize },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Dyadic {
            k_max: 14,
            base_angles: 64,
            angle_cap: 1 << 16,
        }
    }
}

/// Points of one ray, innermost first.
#[derive(Clone, Debug, PartialEq)]
pub struct Ray {
    pub points: Vec<DiscPoint>,
    /// Whether each point also belongs to the next coarser level.
    pub coarse: Vec<bool>,
}

/// A [`GridSpec`] at a refinement level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridLevel {
    pub spec: GridSpec,
    pub level: u32,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GridSpec::Dyadic {
                k_max,
                base_angles,
                angle_cap,
            } => k_max <= 60 && base_angles > 0 && angle_cap > 0,
            GridSpec::Polar {
                r_max,
                n_radii,
                n_angles,
            } => r_max > 0.0 && r_max < 1.0 && n_radii > 0 && n_angles > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(DiscError::InvalidArgument(format!("bad grid {self:?}")))
        }
    }

    pub fn at(&self, level: u32) -> GridLevel {
        GridLevel { spec: *self, level }
    }

    /// Largest radius the grid reaches.
    pub fn outer_gap(&self) -> f64 {
        match *self {
            GridSpec::Dyadic { k_max, .. } => 0.5f64.powi(k_max as i32),
            GridSpec::Polar { r_max, .. } => 1.0 - r_max,
        }
    }
}

fn dyadic_gap(j: usize, sub: usize) -> f64 {
    (-(j as f64) / sub as f64 * std::f64::consts::LN_2).exp()
}

fn dyadic_angles(gap: f64, base: usize, cap: usize) -> usize {
    ((base as f64 / gap).ceil() as usize).next_power_of_two().min(cap.next_power_of_two())
}

impl GridLevel {
    fn sub(&self) -> usize {
        1 << self.level
    }

    pub fn n_rays(&self) -> usize {
        match self.spec {
            GridSpec::Dyadic {
                k_max,
                base_angles,
                angle_cap,
            } => dyadic_angles(dyadic_gap(k_max as usize * self.sub(), self.sub()), base_angles, angle_cap) * self.sub(),
            GridSpec::Polar { n_angles, .. } => n_angles * self.sub(),
        }
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        match self.spec {
            GridSpec::Dyadic {
                k_max,
                base_angles,
                angle_cap,
            } => {
                let sub = self.sub();
                1 + (1..=k_max as usize * sub)
                    .map(|j| dyadic_angles(dyadic_gap(j, sub), base_angles, angle_cap) * sub)
                    .sum::<usize>()
            }
            GridSpec::Polar { n_radii, .. } => 1 + n_radii * self.sub() * self.n_rays(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ray(&self, i: usize) -> Result<Ray> {
        let sub = self.sub();
        let n_rays = self.n_rays();
        let theta = TAU * i as f64 / n_rays as f64;
        let mut points = Vec::new();
        let mut coarse = Vec::new();
        if i == 0 {
            points.push(DiscPoint::origin());
            coarse.push(true);
        }
        match self.spec {
            GridSpec::Dyadic {
                k_max,
                base_angles,
                angle_cap,
            } => {
                for j in 1..=k_max as usize * sub {
                    let gap = dyadic_gap(j, sub);
                    let n = dyadic_angles(gap, base_angles, angle_cap) * sub;
                    if i % (n_rays / n) != 0 {
                        continue;
                    }
                    let in_coarse = self.level > 0 && j % 2 == 0 && i % (2 * n_rays / n) == 0;
                    points.push(DiscPoint::from_polar_gap(gap, theta)?);
                    coarse.push(in_coarse);
                }
            }
            GridSpec::Polar { r_max, n_radii, .. } => {
                let n_r = n_radii * sub;
                for m in 1..=n_r {
                    let r = r_max * m as f64 / n_r as f64;
                    points.push(DiscPoint::from_polar_gap(1.0 - r, theta)?);
                    coarse.push(self.level > 0 && m % 2 == 0 && i % 2 == 0);
                }
            }
        }
        Ok(Ray { points, coarse })
    }

    /// Every grid point, ray by ray.
    pub fn points(&self) -> Result<Vec<DiscPoint>> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_rays() {
            out.extend(self.ray(i)?.points);
        }
        Ok(out)
    }
}

/// A grid supremum reported as a lower bound with a refinement check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupEstimate {
    /// Max over the refined grid.
    pub estimate: f64,
    /// Max over the base grid.
    pub coarse: f64,
    pub argmax: DiscPoint,
    pub relative_change: f64,
    /// `relative_change < 1%`.
    pub stable: bool,
    pub points: usize,
}

/// Relative change below which a refined estimate counts as stable.
pub const STABILITY: f64 = 0.01;

/// Grid sup of a quantity evaluated ray by ray (`eval` returns one value per point).
///
/// Evaluates level `level + 1`; the coarse value is the max over the level-`level`
/// subset. Ties keep the first point in ray order, so the result does not depend
/// on scheduling.
pub fn grid_sup<F>(spec: &GridSpec, level: u32, eval: F) -> Result<SupEstimate>
where
    F: Fn(&[DiscPoint]) -> Result<Vec<f64>> + Sync + Send,
{
    spec.validate()?;
    let fine = spec.at(level + 1);
    let per_ray = parallel::try_map_range(fine.n_rays(), |i| {
        let ray = fine.ray(i)?;
        let vals = eval(&ray.points)?;
        let mut best = (f64::NEG_INFINITY, ray.points[0]);
        let mut best_coarse = f64::NEG_INFINITY;
        for ((p, c), v) in ray.points.iter().zip(&ray.coarse).zip(&vals) {
            if v.is_nan() {
                return Err(DiscError::Oracle {
                    point: p.value(),
                    reason: "NaN in grid evaluation".into(),
                });
            }
            if *v > best.0 {
                best = (*v, *p);
            }
            if *c {
                best_coarse = best_coarse.max(*v);
            }
        }
        Ok((best, best_coarse, ray.points.len()))
    })?;
    let mut estimate = f64::NEG_INFINITY;
    let mut argmax = DiscPoint::origin();
    let mut coarse = f64::NEG_INFINITY;
    let mut points = 0;
    for ((v, p), c, n) in per_ray {
        if v > estimate {
            estimate = v;
            argmax = p;
        }
        coarse = coarse.max(c);
        points += n;
    }
    let relative_change = if estimate == coarse {
        0.0
    } else {
        (estimate - coarse).abs() / estimate.abs().max(f64::MIN_POSITIVE)
    };
    Ok(SupEstimate {
        estimate,
        coarse,
        argmax,
        relative_change,
        stable: relative_change < STABILITY,
        points,
    })
}

/// Max of `eval` over `n` equispaced points of the circle `|z| = 1 - gap`,
/// with the maximiser.
pub fn circle_sup<F>(gap: f64, n: usize, eval: F) -> Result<(f64, DiscPoint)>
where
    F: Fn(DiscPoint) -> Result<f64> + Sync + Send,
{
    let vals = parallel::try_map_range(n, |j| {
        let p = DiscPoint::from_polar_gap(gap, TAU * j as f64 / n as f64)?;
        Ok((eval(p)?, p))
    })?;
    Ok(vals
        .into_iter()
        .fold((f64::NEG_INFINITY, DiscPoint::origin()), |a, b| if b.0 > a.0 { b } else { a }))
}
