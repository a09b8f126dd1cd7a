use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;

use nevlab_core::audit::ConstantsLedger;
use nevlab_core::nevanlinna::{characteristic_t, jensen_residual, proximity_m};
use nevlab_core::zeros::{winding_count, winding_count_sector, Sector};
use nevlab_core::{DiskSpec, FunctionHandle, PointList};

fn point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.9, 0.0f64..TAU).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

fn roots(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(point(), 1..=max)
}

fn clear_of(points: &[Complex64], radius: f64, gap: f64) -> bool {
    points.iter().all(|p| (p.norm() - radius).abs() > gap)
}

fn point_list(points: &[Complex64]) -> PointList {
    PointList::from_entries(points.iter().map(|&p| (p, 1))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn winding_counts_roots_inside(rs in roots(6), radius in 0.2f64..0.95) {
        prop_assume!(clear_of(&rs, radius, 0.02));
        let f = FunctionHandle::polynomial_from_roots(Complex64::new(1.0, 0.0), point_list(&rs));
        let disk = DiskSpec::centered(radius).unwrap();
        let inside = rs.iter().filter(|p| p.norm() < radius).count() as u32;
        prop_assert_eq!(winding_count(&f, Complex64::new(0.0, 0.0), &disk).unwrap().count, inside);
    }

    #[test]
    fn sectors_add_up_to_the_disk(rs in roots(5), split in 0.3f64..6.0) {
        let on_seam = |th: f64| rs.iter().any(|p| {
            let d = (p.arg() - th).rem_euclid(TAU);
            d.min(TAU - d) * p.norm() < 0.02
        });
        prop_assume!(clear_of(&rs, 1.0, 0.02) && !on_seam(0.0) && !on_seam(split));
        let f = FunctionHandle::polynomial_from_roots(Complex64::new(1.0, 0.0), point_list(&rs));
        let zero = Complex64::new(0.0, 0.0);
        let a = Sector::new(zero, 0.0, 1.0, 0.0, split).unwrap();
        let b = Sector::new(zero, 0.0, 1.0, split, TAU).unwrap();
        let total = winding_count_sector(&f, zero, &a).unwrap() + winding_count_sector(&f, zero, &b).unwrap();
        prop_assert_eq!(total as usize, rs.len());
    }

    #[test]
    fn characteristic_grows_with_radius(zs in roots(3), ps in roots(3), r in 0.3f64..1.5, dr in 0.05f64..1.0) {
        let all: Vec<Complex64> = zs.iter().chain(&ps).copied().collect();
        prop_assume!(clear_of(&all, r, 0.02) && clear_of(&all, r + dr, 0.02));
        prop_assume!(zs.iter().all(|z| ps.iter().all(|p| (z - p).norm() > 0.05)));
        let f = FunctionHandle::rational(Complex64::new(1.0, 0.0), point_list(&zs), point_list(&ps));
        let inner = characteristic_t(&f, r, 1e-9).unwrap();
        let outer = characteristic_t(&f, r + dr, 1e-9).unwrap();
        prop_assert!(outer.t >= inner.t - 1e-7, "T({}) = {} > T({}) = {}", r, inner.t, r + dr, outer.t);
    }

    #[test]
    fn jensen_holds_for_a_linear_factor(a in point(), rho in 0.2f64..1.5) {
        prop_assume!(a.norm() > 0.05 && (a.norm() - rho).abs() > 0.02);
        let f = FunctionHandle::polynomial_from_roots(Complex64::new(1.0, 0.0), point_list(&[a]));
        let zeros = if a.norm() < rho { point_list(&[a]) } else { PointList::new() };
        let report = jensen_residual(&f, rho, &zeros, &PointList::new(), -a, 1e-10).unwrap();
        prop_assert!(report.residual.abs() < 1e-8, "residual {}", report.residual);
    }

    #[test]
    fn proximity_to_infinity_of_exponential(rate in 0.1f64..3.0, r in 0.1f64..4.0) {
        let f = FunctionHandle::exp_scaled(Complex64::new(1.0, 0.0), Complex64::new(rate, 0.0));
        let m = proximity_m(&f, r, 1e-10).unwrap();
        prop_assert!((m.value - rate * r / std::f64::consts::PI).abs() < 1e-8, "m = {}", m.value);
    }

    #[test]
    fn ledger_is_self_consistent(c1 in 0.5f64..50.0) {
        let ledger = ConstantsLedger::derive(c1).unwrap();
        prop_assert!(ledger.recompute_discrepancy().unwrap() < 1e-12);
        prop_assert_eq!(ledger.get("c1"), Some(c1));
    }
}
