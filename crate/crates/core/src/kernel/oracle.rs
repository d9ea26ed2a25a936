//! Evaluatable analytic functions.

use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::FftPlanner;

use super::taylor::{Frame, Jet, Series, Taylor, MAX_JET_ORDER};
use crate::error::{DiscError, Result};
use crate::hyperbolic::{DiscPoint, C64};

/// An analytic function that can be expanded at any point of the disc.
///
/// Implementations must be immutable after construction so they can be
/// shared freely between threads. Jets of different orders at the same
/// point agree on their shared coefficients.
pub trait AnalyticOracle: Send + Sync {
    /// Taylor jet of order `order` (at most [`MAX_JET_ORDER`]) at `z`.
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet>;

    /// Radius of a disc around `z` on which the function is known to be analytic.
    fn validity_radius(&self, z: DiscPoint) -> f64 {
        z.boundary_gap()
    }

    /// Taylor coefficients of arbitrary order in the given frame.
    ///
    /// The default samples the function on a circle inside the validity disc
    /// and recovers the coefficients with an FFT (Cauchy's formula).
    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        cauchy_series(self, frame, order)
    }

    /// Jets at a batch of points, typically ordered along a ray.
    fn jets_along(&self, points: &[DiscPoint], order: usize) -> Result<Vec<Jet>> {
        points.iter().map(|p| self.jet(*p, order)).collect()
    }

    fn value(&self, z: DiscPoint) -> Result<C64> {
        Ok(self.jet(z, 0)?.value())
    }
}

impl<T: AnalyticOracle + ?Sized> AnalyticOracle for Arc<T> {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        (**self).jet(z, order)
    }
    fn validity_radius(&self, z: DiscPoint) -> f64 {
        (**self).validity_radius(z)
    }
    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        (**self).series(frame, order)
    }
    fn jets_along(&self, points: &[DiscPoint], order: usize) -> Result<Vec<Jet>> {
        (**self).jets_along(points, order)
    }
}

impl<T: AnalyticOracle + ?Sized> AnalyticOracle for &T {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        (**self).jet(z, order)
    }
    fn validity_radius(&self, z: DiscPoint) -> f64 {
        (**self).validity_radius(z)
    }
    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        (**self).series(frame, order)
    }
    fn jets_along(&self, points: &[DiscPoint], order: usize) -> Result<Vec<Jet>> {
        (**self).jets_along(points, order)
    }
}

pub type SharedOracle = Arc<dyn AnalyticOracle>;

fn check_finite<T: Taylor>(t: T, z: DiscPoint) -> Result<T> {
    if t.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(t)
    } else {
        Err(DiscError::Oracle {
            point: z.value(),
            reason: "non-finite Taylor coefficient".into(),
        })
    }
}

fn cauchy_series<O: AnalyticOracle + ?Sized>(f: &O, frame: Frame, order: usize) -> Result<Series> {
    let z = frame.center;
    let r = 0.75 * f.validity_radius(z).min(z.boundary_gap());
    let m = (4 * (order + 1)).next_power_of_two().max(256);
    let mut buf: Vec<C64> = (0..m)
        .map(|j| {
            let h = C64::from_polar(r, TAU * j as f64 / m as f64);
            f.value(z.offset(h)?)
        })
        .collect::<Result<_>>()?;
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mut out = Series::zeros(frame, order);
    let ratio = frame.scale / r;
    let mut scale = 1.0 / m as f64;
    for (k, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c = buf[k] * scale;
        scale *= ratio;
    }
    check_finite(out, z)
}

/// A function given by a closed-form expression, evaluated in any Taylor arithmetic.
pub trait ClosedForm: Send + Sync {
    /// Expansion of order `order` in the frame `at`.
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T;

    /// Orders the expression consumes internally by differentiating.
    fn extra_order(&self) -> usize {
        0
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        z.boundary_gap()
    }
}

/// Adapter turning a [`ClosedForm`] into an [`AnalyticOracle`].
#[derive(Clone, Debug)]
pub struct Closed<E>(pub E);

impl<E: ClosedForm> AnalyticOracle for Closed<E> {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        if order + self.0.extra_order() <= MAX_JET_ORDER {
            check_finite(self.0.eval::<Jet>(z.into(), order), z)
        } else {
            let s: Series = self.0.eval(z.into(), order);
            check_finite(Jet::from_series(&s, order.min(MAX_JET_ORDER)), z)
        }
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        self.0.validity_radius(z)
    }

    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        check_finite(self.0.eval(frame, order), frame.center)
    }
}

/// A polynomial `Σ a_k z^k` (entire).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial(pub Vec<C64>);

impl ClosedForm for Polynomial {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let z = T::variable(at, order);
        let zero = z.like(C64::new(0.0, 0.0));
        self.0.iter().rev().fold(zero, |acc, &a| acc * z.clone() + a)
    }

    fn validity_radius(&self, _z: DiscPoint) -> f64 {
        f64::INFINITY
    }
}

/// The constant function.
pub fn constant(c: C64) -> Closed<Polynomial> {
    Closed(Polynomial(vec![c]))
}

/// `f'` for an oracle `f`.
#[derive(Clone, Debug)]
pub struct Derivative<O>(pub O);

impl<O: AnalyticOracle> AnalyticOracle for Derivative<O> {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        if order < MAX_JET_ORDER {
            Ok(self.0.jet(z, order + 1)?.derivative())
        } else {
            Ok(Jet::from_series(&self.0.series(z.into(), order + 1)?.derivative(), order))
        }
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        self.0.validity_radius(z)
    }

    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        Ok(self.0.series(frame, order + 1)?.derivative())
    }

    fn jets_along(&self, points: &[DiscPoint], order: usize) -> Result<Vec<Jet>> {
        let inner = self.0.jets_along(points, (order + 1).min(MAX_JET_ORDER))?;
        Ok(inner.iter().map(|j| j.derivative().truncated(order)).collect())
    }
}

/// `f - c`.
#[derive(Clone, Debug)]
pub struct Shifted<O>(pub O, pub C64);

impl<O: AnalyticOracle> AnalyticOracle for Shifted<O> {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        Ok(self.0.jet(z, order)? - self.1)
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        self.0.validity_radius(z)
    }

    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        Ok(self.0.series(frame, order)? - self.1)
    }
}

/// Oracle built from a closure returning jets; handy for ad-hoc functions.
pub struct FnOracle<F>(pub F);

impl<F> AnalyticOracle for FnOracle<F>
where
    F: Fn(DiscPoint, usize) -> Result<Jet> + Send + Sync,
{
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        (self.0)(z, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::taylor::re;

    struct Geometric;
    impl ClosedForm for Geometric {
        fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
            T::one_minus_variable(at, order).recip()
        }
    }

    #[test]
    fn cauchy_series_matches_closed_form() {
        let f = Closed(Geometric);
        let z = DiscPoint::new(C64::new(0.3, 0.4)).unwrap();
        let exact = f.series(z.into(), 40).unwrap();
        let sampled = cauchy_series(&f, z.into(), 40).unwrap();
        let r = 0.75 * z.boundary_gap();
        for k in 0..=40 {
            let scale = r.powi(k as i32);
            let err = (exact.coeffs()[k] - sampled.coeffs()[k]).norm() * scale;
            assert!(err < 1e-13, "k = {k}: {err:e}");
        }
    }

    #[test]
    fn jets_of_different_orders_agree() {
        let f = Closed(Polynomial(vec![re(1.0), re(-2.0), C64::new(0.5, 1.0)]));
        let z = DiscPoint::real(0.2).unwrap();
        let a = f.jet(z, 2).unwrap();
        let b = f.jet(z, 8).unwrap();
        for k in 0..=2 {
            assert_eq!(a.coeffs()[k], b.coeffs()[k]);
        }
        assert_eq!(b.coeffs()[5], re(0.0));
    }

    #[test]
    fn derivative_oracle() {
        let f = Closed(Polynomial(vec![re(0.0), re(0.0), re(0.0), re(1.0)]));
        let d = Derivative(&f);
        let z = DiscPoint::real(0.5).unwrap();
        assert!((d.value(z).unwrap() - re(0.75)).norm() < 1e-15);
        let big = d.jet(z, 8).unwrap();
        assert!((big.coeffs()[1] - re(3.0)).norm() < 1e-15);
    }

    #[test]
    fn scaled_cauchy_series() {
        let f = Closed(Geometric);
        let fr = Frame::new(DiscPoint::real(0.9).unwrap(), 0.01);
        let exact = f.series(fr, 30).unwrap();
        let sampled = cauchy_series(&f, fr, 30).unwrap();
        for k in 0..=30 {
            assert!((exact.coeffs()[k] - sampled.coeffs()[k]).norm() < 1e-12 * exact.coeffs()[0].norm());
        }
    }
}
