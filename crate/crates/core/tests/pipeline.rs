//! End-to-end properties through the public API: build an oracle, solve, locate.

use std::sync::Arc;

use disc_osc::hyperbolic::pseudo_distance;
use disc_osc::kernel::{BlaschkeProduct, Closed, Polynomial, SharedOracle};
use disc_osc::locator::locate_zeros;
use disc_osc::ode::{solution_basis, wronskian_drift};
use disc_osc::{DiscPoint, C64};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = DiscPoint> {
    (0.05f64..0.7, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| DiscPoint::new(C64::from_polar(r, t)).unwrap())
}

fn separated(points: &[DiscPoint], min: f64) -> bool {
    points.iter().enumerate().all(|(i, p)| points[..i].iter().all(|q| pseudo_distance(p, q) > min))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn locator_recovers_blaschke_zeros(zs in prop::collection::vec(point(), 1..5)) {
        prop_assume!(separated(&zs, 0.2));
        let b = Closed(BlaschkeProduct::new(zs.clone()).unwrap());
        let found = locate_zeros(&b, DiscPoint::origin(), 0.85, 1e-12).unwrap();
        prop_assert_eq!(found.points.len(), zs.len());
        for z in &zs {
            let nearest = found.points.iter().map(|p| (p.value() - z.value()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-9, "{:?} missed by {}", z, nearest);
        }
    }

    #[test]
    fn basis_wronskian_is_conserved(c0 in -4.0f64..4.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let a: SharedOracle = Arc::new(Closed(Polynomial(vec![C64::new(c0, 0.0), C64::new(0.0, c1), C64::new(c2, c2)])));
        let basis = solution_basis(a, DiscPoint::origin()).unwrap();
        let checkpoints: Vec<DiscPoint> = (0..6).map(|k| DiscPoint::new(C64::from_polar(0.9, k as f64)).unwrap()).collect();
        prop_assert!(wronskian_drift(&basis, &checkpoints).unwrap() < 1e-10);
    }
}
