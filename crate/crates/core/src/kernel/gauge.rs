//! Growth gauges `ψ : [0,1) → (0,1)` and their smoothness constant.

use std::fmt;
use std::sync::Arc;

use crate::error::{DiscError, Result};
use crate::hyperbolic::DiscPoint;

/// Ratio estimates above this are treated as an infinite supremum.
const SMOOTHNESS_CAP: f64 = 1e6;
/// Sampling range for `t` in `1 - r = 2^{-t}`.
const T_MAX: f64 = 200.0;
const T_STEP: f64 = 0.01;

type GapFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A non-increasing gauge, stored as a function of the boundary gap `1 - r`
/// so it stays accurate near the circle.
#[derive(Clone)]
pub struct GaugePsi {
    label: String,
    of_gap: GapFn,
    k: f64,
}

impl fmt::Debug for GaugePsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugePsi").field("label", &self.label).field("k", &self.k).finish()
    }
}

fn gap_at(t: f64) -> f64 {
    (-t * std::f64::consts::LN_2).exp()
}

impl GaugePsi {
    /// Validates the gauge on a dense grid and caches its smoothness constant.
    pub fn from_gap_fn(label: impl Into<String>, of_gap: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let mut g = Self {
            label: label.into(),
            of_gap: Arc::new(of_gap),
            k: f64::NAN,
        };
        g.validate()?;
        g.k = smoothness_ratio_sup(&g)?;
        Ok(g)
    }

    /// `ψ ≡ c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::from_gap_fn(format!("constant({c})"), move |_| c)
    }

    /// `ψ(r) = (1/2) (log(e/(1-r)))^{1-q}`.
    pub fn log_power(q: f64) -> Result<Self> {
        Self::from_gap_fn(format!("log_power({q})"), move |gap: f64| 0.5 * (1.0 - gap.ln()).powf(1.0 - q))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Cached smoothness constant `K`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn at_gap(&self, gap: f64) -> f64 {
        (self.of_gap)(gap)
    }

    pub fn at_radius(&self, r: f64) -> f64 {
        self.at_gap(1.0 - r)
    }

    /// `ψ(|z|)`.
    pub fn at_point(&self, z: &DiscPoint) -> f64 {
        self.at_gap(z.boundary_gap())
    }

    fn validate(&self) -> Result<()> {
        let mut prev = f64::INFINITY;
        let n = (T_MAX / T_STEP) as usize;
        for i in 0..=n {
            let v = self.at_gap(gap_at(i as f64 * T_STEP));
            if !(v > 0.0 && v < 1.0) {
                return Err(DiscError::InvalidGauge(format!("value {v} outside (0,1)")));
            }
            if v > prev * (1.0 + 1e-14) {
                return Err(DiscError::InvalidGauge("gauge increases with r".into()));
            }
            prev = v;
        }
        Ok(())
    }

    /// `ψ(r) / ψ((r + ψ(r)) / (1 + r ψ(r)))` at gap `1 - r`.
    pub fn smoothness_ratio(&self, gap: f64) -> f64 {
        let psi = self.at_gap(gap);
        let r = 1.0 - gap;
        let next_gap = gap * (1.0 - psi) / (1.0 + r * psi);
        psi / self.at_gap(next_gap)
    }
}

fn smoothness_ratio_sup(psi: &GaugePsi) -> Result<f64> {
    let ratio_at = |t: f64| psi.smoothness_ratio(gap_at(t));
    let n = (T_MAX / T_STEP) as usize;
    let (mut best_t, mut best) = (0.0, ratio_at(0.0));
    for i in 1..=n {
        let t = i as f64 * T_STEP;
        let v = ratio_at(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    // golden-section refinement around the sampled maximiser
    let (mut a, mut b) = ((best_t - T_STEP).max(0.0), (best_t + T_STEP).min(T_MAX));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..80 {
        if ratio_at(c) > ratio_at(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    let refined = ratio_at(0.5 * (a + b));
    let k = best.max(refined);
    if !k.is_finite() || k > SMOOTHNESS_CAP {
        return Err(DiscError::SmoothnessViolated(k));
    }
    Ok(k)
}

/// `K = sup_r ψ(r) / ψ((r + ψ(r)) / (1 + r ψ(r)))`.
pub fn smoothness_constant(psi: &GaugePsi) -> f64 {
    psi.k()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_gauge_has_unit_constant() {
        assert_abs_diff_eq!(smoothness_constant(&GaugePsi::constant(0.3).unwrap()), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn log_power_gauges() {
        let two_e = (2.0 * std::f64::consts::E).ln();
        let k2 = smoothness_constant(&GaugePsi::log_power(2.0).unwrap());
        assert_abs_diff_eq!(k2, two_e, epsilon = 1e-12);
        assert_abs_diff_eq!(k2, 1.693_147_180_559_945, epsilon = 1e-12);
        let k3 = smoothness_constant(&GaugePsi::log_power(3.0).unwrap());
        assert_abs_diff_eq!(k3, two_e * two_e, epsilon = 1e-12);
        assert_abs_diff_eq!(k3, 2.866_747_, epsilon = 1e-5);
    }

    #[test]
    fn rejects_increasing_or_out_of_range_gauges() {
        assert!(GaugePsi::from_gap_fn("inc", |g: f64| 0.5 - 0.25 * g).is_err());
        assert!(GaugePsi::constant(1.0).is_err());
        assert!(GaugePsi::constant(0.0).is_err());
    }

    #[test]
    fn jump_violates_smoothness() {
        let err = GaugePsi::from_gap_fn("jump", |g: f64| if g > 0.5 { 0.5 } else { 1e-10 }).unwrap_err();
        assert!(matches!(err, DiscError::SmoothnessViolated(_) | DiscError::InvalidGauge(_)));
    }
}
