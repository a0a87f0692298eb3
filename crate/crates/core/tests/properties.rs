//! Property-based tests: structural invariants that must hold for random
//! coefficient vectors, node sets, and evaluation points.

use proptest::prelude::*;

use comonotone::trigpoly::{BreakpointSet, TrigPoly};
use comonotone::verify::divided_difference;

use std::f64::consts::PI;

fn coeffs(degree: usize) -> impl Strategy<Value = (f64, Vec<f64>, Vec<f64>)> {
    (
        -2.0f64..2.0,
        prop::collection::vec(-2.0f64..2.0, degree),
        prop::collection::vec(-2.0f64..2.0, degree),
    )
}

proptest! {
    #[test]
    fn from_samples_round_trips((a0, a, b) in coeffs(5), oversample in 0usize..3) {
        let p = TrigPoly::new(a0, a, b);
        let points = (2 * p.degree() + 1) << oversample;
        let values: Vec<f64> = (0..points)
            .map(|m| p.eval(-PI + 2.0 * PI * m as f64 / points as f64))
            .collect();
        let q = TrigPoly::from_samples(&values, p.degree()).unwrap();
        prop_assert!((p.a0 - q.a0).abs() < 1e-10);
        for k in 0..p.degree() {
            prop_assert!((p.a[k] - q.a[k]).abs() < 1e-10);
            prop_assert!((p.b[k] - q.b[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn evaluation_is_periodic((a0, a, b) in coeffs(4), x in -10.0f64..10.0) {
        let p = TrigPoly::new(a0, a, b);
        prop_assert!((p.eval(x) - p.eval(x + 2.0 * PI)).abs() < 1e-9);
        prop_assert!((p.eval(x) - p.eval(x - 2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn derivative_then_antiderivative_round_trips((a0, a, b) in coeffs(4)) {
        let p = TrigPoly::new(a0, a, b);
        let anti = p.derivative().antiderivative_split();
        // the derivative kills the mean, so the round trip recovers p up to
        // a constant and has no linear part
        prop_assert!(anti.slope.abs() < 1e-12);
        let shift = p.eval(0.0) - anti.value(0.0);
        for i in 0..32 {
            let x = -PI + 2.0 * PI * i as f64 / 32.0;
            prop_assert!((anti.value(x) + shift - p.eval(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn multiply_degree_and_values((a0, a, b) in coeffs(3), (c0, c, d) in coeffs(2)) {
        let p = TrigPoly::new(a0, a, b);
        let q = TrigPoly::new(c0, c, d);
        let prod = p.multiply(&q);
        prop_assert!(prod.degree() <= p.degree() + q.degree());
        for i in 0..16 {
            let x = -PI + 2.0 * PI * (i as f64 + 0.3) / 16.0;
            prop_assert!((prod.eval(x) - p.eval(x) * q.eval(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn divided_difference_is_permutation_symmetric(
        mut nodes in prop::collection::vec(-3.0f64..3.0, 4),
        seed in 0u64..1000,
    ) {
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        prop_assume!(nodes.len() == 4);
        let f = |x: f64| (1.5 * x).sin() + 0.2 * x;
        let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let base = divided_difference(&nodes, &values).unwrap();

        // a deterministic pseudo-random permutation derived from the seed
        let mut perm: Vec<usize> = (0..4).collect();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        for i in (1..4usize).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let pn: Vec<f64> = perm.iter().map(|&i| nodes[i]).collect();
        let pv: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        let permuted = divided_difference(&pn, &pv).unwrap();
        prop_assert!((base - permuted).abs() < 1e-6 * base.abs().max(1.0));
    }

    #[test]
    fn sign_poly_degree_equals_pair_count(
        raw in prop::collection::vec(-3.1f64..3.1, 2..=6),
    ) {
        let mut pts = raw.clone();
        if pts.len() % 2 != 0 {
            pts.pop();
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-2);
        prop_assume!(pts.len() >= 2 && pts.len() % 2 == 0);
        let y = BreakpointSet::new(&pts).unwrap();
        let p = y.sign_poly();
        prop_assert_eq!(p.degree(), y.pairs());
        // the top harmonic never vanishes: the product of s sine factors
        // always carries frequency s with amplitude 2^{-s+...} bounded below
        let top = f64::hypot(p.a[y.pairs() - 1], p.b[y.pairs() - 1]);
        prop_assert!(top > 1e-6);
        // zeros exactly at the breakpoints
        for &pt in y.points() {
            prop_assert!(p.eval(pt).abs() < 1e-10);
        }
    }

    #[test]
    fn breakpoint_distance_is_periodic_and_zero_on_points(
        x in -20.0f64..20.0,
    ) {
        let y = BreakpointSet::new(&[2.0, 0.5, -1.0, -2.0]).unwrap();
        let d = y.distance_to_nearest(x);
        prop_assert!(d >= 0.0);
        prop_assert!((d - y.distance_to_nearest(x + 2.0 * PI)).abs() < 1e-9);
        for &pt in y.points() {
            prop_assert!(d <= (x - pt).abs() + 1e-12);
        }
    }
}
