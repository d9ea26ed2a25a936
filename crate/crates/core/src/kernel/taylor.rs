//! Truncated Taylor arithmetic.
//!
//! [`Jet`] is a fixed-capacity expansion (order at most [`MAX_JET_ORDER`]) used
//! for derivatives, Schwarzians and spherical derivatives; [`Series`] is the
//! heap-backed variant the ODE recurrences need at orders in the hundreds.
//! Both expand in a scaled local variable `t`, with `z = center + scale * t`,
//! so the stored coefficients are `f^{(k)}(center) scale^k / k!`. Near the
//! circle the natural step is tiny and raw coefficients overflow; scaling by
//! the step keeps them of moderate size. Every operation is exact truncation
//! of formal power series in `t`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::hyperbolic::{DiscPoint, C64};

pub const MAX_JET_ORDER: usize = 8;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Expansion point and variable scale: `z = center + scale * t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub center: DiscPoint,
    pub scale: f64,
}

impl Frame {
    pub fn new(center: DiscPoint, scale: f64) -> Self {
        Self { center, scale }
    }
}

impl From<DiscPoint> for Frame {
    fn from(center: DiscPoint) -> Self {
        Self { center, scale: 1.0 }
    }
}

fn mul_into(a: &[C64], b: &[C64], out: &mut [C64]) {
    for k in 0..out.len() {
        let mut s = ZERO;
        for j in 0..=k {
            s += a[j] * b[k - j];
        }
        out[k] = s;
    }
}

fn div_into(a: &[C64], b: &[C64], out: &mut [C64]) {
    let inv = b[0].inv();
    for k in 0..out.len() {
        let mut s = a[k];
        for j in 1..=k {
            s -= b[j] * out[k - j];
        }
        out[k] = s * inv;
    }
}

fn exp_into(a: &[C64], out: &mut [C64]) {
    out[0] = a[0].exp();
    for k in 1..out.len() {
        let mut s = ZERO;
        for j in 1..=k {
            s += a[j] * out[k - j] * j as f64;
        }
        out[k] = s / k as f64;
    }
}

fn ln_into(a: &[C64], out: &mut [C64]) {
    out[0] = a[0].ln();
    let inv = a[0].inv();
    for k in 1..out.len() {
        let mut s = ZERO;
        for j in 1..k {
            s += out[j] * a[k - j] * j as f64;
        }
        out[k] = (a[k] - s / k as f64) * inv;
    }
}

fn sqrt_into(a: &[C64], out: &mut [C64]) {
    out[0] = a[0].sqrt();
    let inv = (out[0] * 2.0).inv();
    for k in 1..out.len() {
        let mut s = ZERO;
        for j in 1..k {
            s += out[j] * out[k - j];
        }
        out[k] = (a[k] - s) * inv;
    }
}

fn sin_cos_into(a: &[C64], s: &mut [C64], c: &mut [C64]) {
    s[0] = a[0].sin();
    c[0] = a[0].cos();
    for k in 1..s.len() {
        let mut ss = ZERO;
        let mut cc = ZERO;
        for j in 1..=k {
            let t = a[j] * j as f64;
            ss += t * c[k - j];
            cc += t * s[k - j];
        }
        s[k] = ss / k as f64;
        c[k] = -cc / k as f64;
    }
}

/// Truncated power series arithmetic shared by [`Jet`] and [`Series`].
pub trait Taylor:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<C64, Output = Self>
    + Sub<C64, Output = Self>
    + Mul<C64, Output = Self>
    + Div<C64, Output = Self>
{
    /// Largest order the representation can hold.
    const CAPACITY: usize;

    fn zeros(frame: impl Into<Frame>, order: usize) -> Self;
    fn frame(&self) -> Frame;
    fn coeffs(&self) -> &[C64];
    fn coeffs_mut(&mut self) -> &mut [C64];

    fn center(&self) -> DiscPoint {
        self.frame().center
    }

    fn scale(&self) -> f64 {
        self.frame().scale
    }

    fn order(&self) -> usize {
        self.coeffs().len() - 1
    }

    fn from_coeffs(frame: impl Into<Frame>, coeffs: &[C64]) -> Self {
        let mut out = Self::zeros(frame, coeffs.len() - 1);
        out.coeffs_mut().copy_from_slice(coeffs);
        out
    }

    fn constant(frame: impl Into<Frame>, order: usize, c: C64) -> Self {
        let mut out = Self::zeros(frame, order);
        out.coeffs_mut()[0] = c;
        out
    }

    /// `c0 + c1 (z - center)`.
    fn linear(frame: impl Into<Frame>, order: usize, c0: C64, c1: C64) -> Self {
        let frame = frame.into();
        let mut out = Self::zeros(frame, order);
        let c = out.coeffs_mut();
        c[0] = c0;
        if c.len() > 1 {
            c[1] = c1 * frame.scale;
        }
        out
    }

    /// The identity `z` expanded at the frame centre.
    fn variable(frame: impl Into<Frame>, order: usize) -> Self {
        let frame = frame.into();
        Self::linear(frame, order, frame.center.value(), C64::new(1.0, 0.0))
    }

    /// `1 - z`, with the accurate complement as constant term.
    fn one_minus_variable(frame: impl Into<Frame>, order: usize) -> Self {
        let frame = frame.into();
        Self::linear(frame, order, frame.center.one_minus(), C64::new(-1.0, 0.0))
    }

    /// A constant with this series' frame and order.
    fn like(&self, c: C64) -> Self {
        Self::constant(self.frame(), self.order(), c)
    }

    fn value(&self) -> C64 {
        self.coeffs()[0]
    }

    /// `f^{(k)}(center)`.
    fn derivative_at(&self, k: usize) -> C64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs().get(k).copied().unwrap_or(ZERO) * fact / self.scale().powi(k as i32)
    }

    /// The same function expanded with a different variable scale.
    fn rescaled(&self, scale: f64) -> Self {
        let inv = self.scale() / scale;
        let mut out = Self::zeros(Frame::new(self.center(), scale), self.order());
        let mut p = 1.0;
        for (o, c) in out.coeffs_mut().iter_mut().zip(self.coeffs()) {
            *o = c / p;
            p *= inv;
        }
        out
    }

    fn map_kernel(&self, kernel: impl Fn(&[C64], &mut [C64])) -> Self {
        let mut out = Self::zeros(self.frame(), self.order());
        kernel(self.coeffs(), out.coeffs_mut());
        out
    }

    fn exp(&self) -> Self {
        self.map_kernel(exp_into)
    }

    /// Principal logarithm.
    fn ln(&self) -> Self {
        self.map_kernel(ln_into)
    }

    /// Principal square root.
    fn sqrt(&self) -> Self {
        self.map_kernel(sqrt_into)
    }

    /// Principal power `exp(p Log f)`.
    fn powc(&self, p: C64) -> Self {
        (self.ln() * p).exp()
    }

    fn recip(&self) -> Self {
        self.like(C64::new(1.0, 0.0)) / self.clone()
    }

    fn sin_cos(&self) -> (Self, Self) {
        let mut s = Self::zeros(self.frame(), self.order());
        let mut c = Self::zeros(self.frame(), self.order());
        sin_cos_into(self.coeffs(), s.coeffs_mut(), c.coeffs_mut());
        (s, c)
    }

    fn sin(&self) -> Self {
        self.sin_cos().0
    }

    fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// `self * (c0 + c1 (z - center))` in linear time.
    fn mul_linear(&self, c0: C64, c1: C64) -> Self {
        let mut out = self.clone() * c0;
        let c1 = c1 * self.scale();
        let src = self.coeffs();
        for (k, c) in out.coeffs_mut().iter_mut().enumerate().skip(1) {
            *c += src[k - 1] * c1;
        }
        out
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// Termwise derivative; the order drops by one (order 0 stays a zero constant).
    fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return self.like(ZERO);
        }
        let inv = 1.0 / self.scale();
        let mut out = Self::zeros(self.frame(), n - 1);
        for (k, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c = self.coeffs()[k + 1] * ((k + 1) as f64 * inv);
        }
        out
    }

    fn truncated(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::from_coeffs(self.frame(), &self.coeffs()[..=n])
    }

    /// Drops the constant term and shifts down: the series of `(f - f(c)) / (z - c)`.
    fn shifted(&self) -> Self {
        let n = self.order();
        let inv = 1.0 / self.scale();
        let mut out = Self::zeros(self.frame(), n.saturating_sub(1));
        for (k, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c = self.coeffs().get(k + 1).copied().unwrap_or(ZERO) * inv;
        }
        out
    }

    /// Evaluates the truncated polynomial at `center + h`.
    fn eval_offset(&self, h: C64) -> C64 {
        let t = h / self.scale();
        self.coeffs().iter().rev().fold(ZERO, |acc, &c| acc * t + c)
    }
}

/// Fixed-capacity Taylor jet, order at most [`MAX_JET_ORDER`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    frame: Frame,
    order: usize,
    coeffs: [C64; MAX_JET_ORDER + 1],
}

impl Taylor for Jet {
    const CAPACITY: usize = MAX_JET_ORDER;

    fn zeros(frame: impl Into<Frame>, order: usize) -> Self {
        assert!(order <= MAX_JET_ORDER, "jet order {order} exceeds {MAX_JET_ORDER}");
        Self {
            frame: frame.into(),
            order,
            coeffs: [ZERO; MAX_JET_ORDER + 1],
        }
    }

    fn frame(&self) -> Frame {
        self.frame
    }

    fn coeffs(&self) -> &[C64] {
        &self.coeffs[..=self.order]
    }

    fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs[..=self.order]
    }
}

/// Heap-backed Taylor series of arbitrary order.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    frame: Frame,
    coeffs: Vec<C64>,
}

impl Taylor for Series {
    const CAPACITY: usize = usize::MAX;

    fn zeros(frame: impl Into<Frame>, order: usize) -> Self {
        Self {
            frame: frame.into(),
            coeffs: vec![ZERO; order + 1],
        }
    }

    fn frame(&self) -> Frame {
        self.frame
    }

    fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }
}

impl Series {
    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Re-expansion of the truncated polynomial about `at = center + h`, same scale.
    pub fn recentered(&self, at: DiscPoint, h: C64, order: usize) -> Series {
        let t0 = h / self.scale();
        let mut poly = self.coeffs.clone();
        let mut out = Series::zeros(Frame::new(at, self.scale()), order);
        // repeated synthetic division gives the shifted coefficients
        for slot in out.coeffs_mut().iter_mut() {
            if poly.is_empty() {
                break;
            }
            let mut acc = ZERO;
            for c in poly.iter_mut().rev() {
                acc = acc * t0 + *c;
                *c = acc;
            }
            *slot = poly.remove(0);
        }
        out
    }
}

impl Jet {
    /// Leading coefficients of a series as a unit-scale jet.
    pub fn from_series(s: &Series, order: usize) -> Jet {
        let j = Jet::from_coeffs(s.frame(), &s.coeffs()[..=order.min(s.order())]);
        if s.scale() == 1.0 {
            j
        } else {
            j.rescaled(1.0)
        }
    }
}

macro_rules! impl_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                let n = self.order().min(rhs.order());
                let mut out = self.truncated(n);
                for (a, b) in out.coeffs_mut().iter_mut().zip(rhs.coeffs()) {
                    *a += *b;
                }
                out
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                self + (-rhs)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(mut self) -> $t {
                for c in self.coeffs_mut() {
                    *c = -*c;
                }
                self
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                let n = self.order().min(rhs.order());
                let mut out = <$t>::zeros(self.frame(), n);
                mul_into(self.coeffs(), rhs.coeffs(), out.coeffs_mut());
                out
            }
        }
        impl Div for $t {
            type Output = $t;
            fn div(self, rhs: $t) -> $t {
                let n = self.order().min(rhs.order());
                let mut out = <$t>::zeros(self.frame(), n);
                div_into(self.coeffs(), rhs.coeffs(), out.coeffs_mut());
                out
            }
        }
        impl Add<C64> for $t {
            type Output = $t;
            fn add(mut self, rhs: C64) -> $t {
                self.coeffs_mut()[0] += rhs;
                self
            }
        }
        impl Sub<C64> for $t {
            type Output = $t;
            fn sub(mut self, rhs: C64) -> $t {
                self.coeffs_mut()[0] -= rhs;
                self
            }
        }
        impl Mul<C64> for $t {
            type Output = $t;
            fn mul(mut self, rhs: C64) -> $t {
                for c in self.coeffs_mut() {
                    *c *= rhs;
                }
                self
            }
        }
        impl Div<C64> for $t {
            type Output = $t;
            fn div(self, rhs: C64) -> $t {
                self * rhs.inv()
            }
        }
    };
}

impl_ops!(Jet);
impl_ops!(Series);

/// Shorthand for a real constant as a complex number.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
