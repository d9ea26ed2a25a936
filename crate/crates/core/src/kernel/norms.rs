//! Schwarzian and spherical derivatives, weighted sup norms and the
//! Hardy / BMOA / Carleson grid diagnostics.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::grid::{grid_sup, GridSpec, SupEstimate};
use super::oracle::AnalyticOracle;
use super::taylor::{Frame, Jet, Series, Taylor, MAX_JET_ORDER};
use crate::error::{DiscError, Result};
use crate::hyperbolic::{automorphism, DiscPoint, C64};
use crate::parallel;

/// `|w'|` below this makes the Schwarzian undefined.
pub const CRITICAL_FLOOR: f64 = 1e-14;

fn schwarzian_of<T: Taylor>(w: &T) -> Result<T> {
    let d = w.derivative();
    let d0 = d.value().norm();
    if d0 < CRITICAL_FLOOR {
        return Err(DiscError::CriticalPoint(w.center().value(), d0));
    }
    let q = d.derivative() / d;
    Ok(q.derivative() - q.square() * C64::new(0.5, 0.0))
}

/// `S_w(z) = (w''/w')' - (w''/w')^2 / 2`.
pub fn schwarzian<O: AnalyticOracle + ?Sized>(w: &O, z: DiscPoint) -> Result<C64> {
    Ok(schwarzian_of(&w.jet(z, 3)?)?.value())
}

/// The Schwarzian of an oracle, itself an oracle.
#[derive(Clone, Debug)]
pub struct Schwarzian<O>(pub O);

impl<O: AnalyticOracle> AnalyticOracle for Schwarzian<O> {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        if order + 3 <= MAX_JET_ORDER {
            schwarzian_of(&self.0.jet(z, order + 3)?)
        } else {
            Ok(Jet::from_series(&self.series(z.into(), order)?, order.min(MAX_JET_ORDER)))
        }
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        self.0.validity_radius(z)
    }

    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        schwarzian_of(&self.0.series(frame, order + 3)?)
    }

    fn jets_along(&self, points: &[DiscPoint], order: usize) -> Result<Vec<Jet>> {
        if order + 3 > MAX_JET_ORDER {
            return points.iter().map(|p| self.jet(*p, order)).collect();
        }
        self.0
            .jets_along(points, order + 3)?
            .iter()
            .map(schwarzian_of)
            .collect()
    }
}

/// `|w'| / (1 + |w|^2)` from a jet of order at least 1, switching to `1/w` when `|w| > 1`.
pub fn spherical_from_jet(j: &Jet) -> f64 {
    let v = j.value();
    let d = j.derivative_at(1);
    if v.norm() > 1.0 {
        let u = v.inv();
        let du = -d * u * u;
        du.norm() / (1.0 + u.norm_sqr())
    } else {
        d.norm() / (1.0 + v.norm_sqr())
    }
}

/// Spherical derivative `w^#(z)`.
pub fn spherical_derivative<O: AnalyticOracle + ?Sized>(w: &O, z: DiscPoint) -> Result<f64> {
    Ok(spherical_from_jet(&w.jet(z, 1)?))
}

/// `(n/d)^# = |n' d - n d'| / (|n|^2 + |d|^2)`, finite at poles of the quotient.
pub fn quotient_spherical(num: &Jet, den: &Jet) -> f64 {
    let (n, n1) = (num.value(), num.derivative_at(1));
    let (d, d1) = (den.value(), den.derivative_at(1));
    (n1 * d - n * d1).norm() / (n.norm_sqr() + d.norm_sqr())
}

/// What [`weighted_sup_estimate`] weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SupKind {
    /// `|g(z)|`
    #[default]
    Modulus,
    /// `g^#(z)`
    Spherical,
}

/// Grid estimate of `sup (1 - |z|^2)^β |g(z)|` (or of `g^#`), as a lower bound
/// with a refinement-stability flag.
pub fn weighted_sup_estimate<O: AnalyticOracle + ?Sized>(
    g: &O,
    beta: f64,
    grid: &GridSpec,
    kind: SupKind,
) -> Result<SupEstimate> {
    if !(beta >= 0.0) {
        return Err(DiscError::InvalidArgument(format!("weight exponent {beta} must be non-negative")));
    }
    let order = match kind {
        SupKind::Modulus => 0,
        SupKind::Spherical => 1,
    };
    grid_sup(grid, 0, |pts| {
        let jets = g.jets_along(pts, order)?;
        Ok(pts
            .iter()
            .zip(&jets)
            .map(|(p, j)| {
                let v = match kind {
                    SupKind::Modulus => j.value().norm(),
                    SupKind::Spherical => spherical_from_jet(j),
                };
                weight(p, beta) * v
            })
            .collect())
    })
}

/// `(1 - |z|^2)^β`.
pub fn weight(p: &DiscPoint, beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        p.one_minus_norm_sqr().powf(beta)
    }
}

/// Trapezoid node count for a circle at gap `1 - r`.
pub fn circle_nodes(gap: f64, base: usize, cap: usize) -> usize {
    ((base as f64 / gap).ceil() as usize).next_power_of_two().clamp(256, cap)
}

/// Mean of `values` in index order (fixed summation order).
fn ordered_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `((2π)^{-1} ∫ |f(r e^{iθ})|^p dθ)^{1/p}` for each radius, by the trapezoid rule.
pub fn hardy_norm_estimate<O: AnalyticOracle + ?Sized>(f: &O, p: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(DiscError::InvalidArgument(format!("Hardy exponent {p} must be positive and finite")));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(DiscError::InvalidArgument("radii must increase within (0,1)".into()));
    }
    radii
        .iter()
        .map(|&r| {
            let n = circle_nodes(1.0 - r, 64, 1 << 16);
            let vals = parallel::try_map_range(n, |j| {
                let z = DiscPoint::from_polar_gap(1.0 - r, TAU * j as f64 / n as f64)?;
                Ok(f.value(z)?.norm().powf(p))
            })?;
            Ok((r, ordered_mean(&vals).powf(1.0 / p)))
        })
        .collect()
}

/// Radius of the circle used by [`bmoa_seminorm_estimate`].
pub const BMOA_RADIUS: f64 = 0.99;

/// `max_a ‖g∘φ_a - g(a)‖` in the `H^2` mean at radius 0.99 over the sample points `a`.
pub fn bmoa_seminorm_estimate<O: AnalyticOracle + ?Sized>(g: &O, samples: &[DiscPoint]) -> Result<f64> {
    if samples.is_empty() {
        return Err(DiscError::InvalidArgument("no BMOA sample points".into()));
    }
    let mut best = 0.0f64;
    for a in samples {
        let ga = g.value(*a)?;
        let n = circle_nodes(a.boundary_gap() * (1.0 - BMOA_RADIUS), 4, 1 << 15);
        let vals = parallel::try_map_range(n, |j| {
            let z = DiscPoint::from_polar_gap(1.0 - BMOA_RADIUS, TAU * j as f64 / n as f64)?;
            Ok((g.value(automorphism(a, &z))? - ga).norm_sqr())
        })?;
        best = best.max(ordered_mean(&vals).sqrt());
    }
    Ok(best)
}

/// `{r e^{iθ} : |θ - center| ≤ arc/2, 1 - r ≤ arc/(2π)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    pub center: f64,
    /// Arc length in radians, at most `2π`.
    pub arc: f64,
}

impl CarlesonBox {
    /// Boxes over the dyadic arcs of length `2π 2^{-k}`, `k = 0..=levels`.
    pub fn dyadic_family(levels: u32) -> Vec<CarlesonBox> {
        (0..=levels)
            .flat_map(|k| {
                let m = 1usize << k;
                (0..m).map(move |j| CarlesonBox {
                    center: TAU * (j as f64 + 0.5) / m as f64,
                    arc: TAU / m as f64,
                })
            })
            .collect()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

const GL_NODES: usize = 8;
const RADIAL_PANELS: i32 = 48;
const ANGULAR_PANELS: usize = 16;

/// `∫∫_box |A|^2 (1 - |z|^2)^3 dm(z)` divided by the arc length, for one box.
pub fn carleson_box_ratio<O: AnalyticOracle + ?Sized>(a: &O, b: &CarlesonBox) -> Result<f64> {
    let gl = gauss_legendre(GL_NODES);
    let arc = b.arc.min(TAU);
    let depth = (arc / TAU).min(1.0);
    let angles: Vec<(f64, f64)> = (0..ANGULAR_PANELS)
        .flat_map(|k| {
            let lo = b.center - 0.5 * arc + arc * k as f64 / ANGULAR_PANELS as f64;
            let h = arc / ANGULAR_PANELS as f64;
            gl.iter().map(move |(x, w)| (lo + 0.5 * h * (x + 1.0), 0.5 * h * w))
        })
        .collect();
    // radial panels in the gap 1 - r, geometrically graded toward the circle
    let gaps: Vec<(f64, f64)> = (0..RADIAL_PANELS)
        .flat_map(|k| {
            let hi = depth * 0.5f64.powi(k);
            let lo = if k + 1 == RADIAL_PANELS { 0.0 } else { 0.5 * hi };
            let h = hi - lo;
            gl.iter().map(move |(x, w)| (lo + 0.5 * h * (x + 1.0), 0.5 * h * w))
        })
        .collect();
    let rows = parallel::try_map(&gaps, |&(gap, wg)| {
        let r = 1.0 - gap;
        let weight = (gap * (2.0 - gap)).powi(3) * r * wg;
        let mut s = 0.0;
        for &(theta, wt) in &angles {
            s += a.value(DiscPoint::from_polar_gap(gap, theta)?)?.norm_sqr() * weight * wt;
        }
        Ok(s)
    })?;
    Ok(rows.iter().sum::<f64>() / arc)
}

/// Max over boxes of the Carleson ratio.
pub fn carleson_measure_estimate<O: AnalyticOracle + ?Sized>(a: &O, boxes: &[CarlesonBox]) -> Result<f64> {
    boxes.iter().try_fold(0.0f64, |m, b| Ok(m.max(carleson_box_ratio(a, b)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::oracle::{constant, Closed, ClosedForm, Polynomial};
    use crate::kernel::taylor::re;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, y: f64) -> DiscPoint {
        DiscPoint::new(C64::new(x, y)).unwrap()
    }

    struct Mobius(C64, C64, C64, C64);
    impl ClosedForm for Mobius {
        fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
            let z = T::variable(at, order);
            (z.clone() * self.0 + self.1) / (z * self.2 + self.3)
        }
    }

    struct Exp;
    impl ClosedForm for Exp {
        fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
            T::variable(at, order).exp()
        }
    }

    struct Log1m;
    impl ClosedForm for Log1m {
        fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
            -T::one_minus_variable(at, order).ln()
        }
    }

    struct Pole;
    impl ClosedForm for Pole {
        fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
            T::one_minus_variable(at, order).recip()
        }
    }

    #[test]
    fn schwarzian_examples() {
        let m = Closed(Mobius(re(2.0), C64::new(0.0, 1.0), re(0.3), re(1.0)));
        assert!(schwarzian(&m, pt(0.2, -0.4)).unwrap().norm() < 1e-12);
        let s = schwarzian(&Closed(Exp), pt(0.5, 0.1)).unwrap();
        assert_abs_diff_eq!((s - re(-0.5)).norm(), 0.0, epsilon = 1e-13);
        let sq = Closed(Polynomial(vec![re(0.0), re(0.0), re(1.0)]));
        assert!(matches!(schwarzian(&sq, DiscPoint::origin()), Err(DiscError::CriticalPoint(..))));
    }

    #[test]
    fn schwarzian_oracle_jets_match_pointwise() {
        let s = Schwarzian(Closed(Exp));
        let j = s.jet(pt(0.1, 0.1), 5).unwrap();
        assert_abs_diff_eq!((j.value() - re(-0.5)).norm(), 0.0, epsilon = 1e-13);
        assert!(j.coeffs()[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn spherical_examples() {
        let id = Closed(Polynomial(vec![re(0.0), re(1.0)]));
        assert_abs_diff_eq!(spherical_derivative(&id, DiscPoint::origin()).unwrap(), 1.0, epsilon = 1e-16);
        assert_eq!(spherical_derivative(&constant(re(3.0)), pt(0.3, 0.3)).unwrap(), 0.0);
        // w = z / (z - 0.5): pole at 0.5, evaluated through numerator/denominator jets
        let z0 = pt(0.5, 0.0);
        let num = Jet::linear(z0, 1, re(0.5), re(1.0));
        let den = Jet::linear(z0, 1, re(0.0), re(1.0));
        let at_pole = quotient_spherical(&num, &den);
        // (1/w) = (z - 0.5)/z has derivative 0.5/z^2 = 2 at the pole, value 0
        assert_abs_diff_eq!(at_pole, 2.0, epsilon = 1e-15);
        // w^# = (1/w)^# brute force nearby
        let near = pt(0.5 + 1e-3, 2e-3);
        let w = Closed(Mobius(re(1.0), re(0.0), re(1.0), re(-0.5)));
        let inv = Closed(Mobius(re(1.0), re(-0.5), re(1.0), re(0.0)));
        let a = spherical_derivative(&w, near).unwrap();
        let b = spherical_derivative(&inv, near).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12 * a);
        let (n, d) = (Jet::linear(near, 1, near.value(), re(1.0)), Jet::linear(near, 1, near.value() - 0.5, re(1.0)));
        assert_abs_diff_eq!(quotient_spherical(&n, &d), a, epsilon = 1e-12 * a);
    }

    #[test]
    fn weighted_sup_examples() {
        let spec = GridSpec::Dyadic {
            k_max: 8,
            base_angles: 16,
            angle_cap: 1024,
        };
        let c = weighted_sup_estimate(&constant(C64::new(0.0, -2.5)), 2.0, &spec, SupKind::Modulus).unwrap();
        assert_eq!(c.estimate, 2.5);
        assert_eq!(c.argmax, DiscPoint::origin());
        // unweighted sup of z is attained at the outermost radius
        let z = weighted_sup_estimate(&Closed(Polynomial(vec![re(0.0), re(1.0)])), 0.0, &spec, SupKind::Modulus).unwrap();
        assert_abs_diff_eq!(z.estimate, 1.0 - 2f64.powi(-8), epsilon = 1e-15);
        assert!(z.estimate >= z.coarse);
    }

    #[test]
    fn hardy_means() {
        let c = hardy_norm_estimate(&constant(re(-3.0)), 0.5, &[0.1, 0.5, 0.99]).unwrap();
        assert!(c.iter().all(|(_, m)| (m - 3.0).abs() < 1e-12));
        // ‖z‖ at radius r is r for every p
        let z = hardy_norm_estimate(&Closed(Polynomial(vec![re(0.0), re(1.0)])), 3.0, &[0.3, 0.9]).unwrap();
        assert_abs_diff_eq!(z[1].1, 0.9, epsilon = 1e-13);
        assert!(hardy_norm_estimate(&constant(re(1.0)), 1.0, &[0.5, 0.4]).is_err());
    }

    #[test]
    fn bmoa_diagnostics() {
        let samples = |n: i32| -> Vec<DiscPoint> {
            (1..=n).map(|k| DiscPoint::from_one_minus(re(0.5f64.powi(k))).unwrap()).collect()
        };
        assert!(bmoa_seminorm_estimate(&constant(re(1.0)), &samples(4)).unwrap() < 1e-15);
        // log 1/(1-z), a real: g∘φ_a - g(a) = log(1 - az) - log(1 + z) has
        // coefficients ((-1)^k - a^k)/k, so the H^2 mean is at most 2π/√6
        let l6 = bmoa_seminorm_estimate(&Closed(Log1m), &samples(6)).unwrap();
        let l10 = bmoa_seminorm_estimate(&Closed(Log1m), &samples(10)).unwrap();
        assert!(l10 < 2.0 * PI / 6f64.sqrt());
        assert!((l10 - l6).abs() < 0.05 * l6);
        let p6 = bmoa_seminorm_estimate(&Closed(Pole), &samples(6)).unwrap();
        let p10 = bmoa_seminorm_estimate(&Closed(Pole), &samples(10)).unwrap();
        assert!(p10 > 10.0 * p6);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = gauss_legendre(GL_NODES);
        let s: f64 = gl.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert_abs_diff_eq!(s, 2.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn carleson_examples() {
        let boxes = CarlesonBox::dyadic_family(3);
        assert_eq!(carleson_measure_estimate(&constant(re(0.0)), &boxes).unwrap(), 0.0);
        let whole = CarlesonBox { center: 0.0, arc: TAU };
        // ∫_D (1 - |z|^2)^3 dm = π/4, divided by 2π
        assert_abs_diff_eq!(carleson_box_ratio(&constant(re(1.0)), &whole).unwrap(), 0.125, epsilon = 1e-12);
        // a box of arc ℓ and depth ℓ/2π has ratio ≈ ∫_0^{ℓ/2π} (2s)^3 ds = 2 (ℓ/2π)^4 → 0
        let small = carleson_box_ratio(&constant(re(1.0)), &CarlesonBox { center: 1.0, arc: 0.1 }).unwrap();
        assert!(small < 1e-6);
    }
}
