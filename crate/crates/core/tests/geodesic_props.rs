use proptest::prelude::*;
use twomedian::builders::{flat_grid, grid_point, tripod_interval, tripod_tripod, GraphPoint, ProductComplex};
use twomedian::geodesic::{geodesic, is_local_geodesic};

/// Distance in a tripod with unit legs, points given as (leg, distance from centre).
fn tripod_dist(a: GraphPoint, b: GraphPoint) -> f64 {
    if a.edge == b.edge {
        (a.s - b.s).abs()
    } else {
        a.s + b.s
    }
}

fn interval_dist(a: GraphPoint, b: GraphPoint) -> f64 {
    (a.s - b.s).abs()
}

fn leg() -> impl Strategy<Value = GraphPoint> {
    (0usize..3, 0.0f64..=1.0).prop_map(|(edge, s)| GraphPoint { edge, s })
}

fn unit() -> impl Strategy<Value = GraphPoint> {
    (0.0f64..=1.0).prop_map(|s| GraphPoint { edge: 0, s })
}

fn check_product(pc: &ProductComplex, p: (GraphPoint, GraphPoint), q: (GraphPoint, GraphPoint), want: f64) {
    let x = &pc.complex;
    let a = pc.point(p.0, p.1);
    let b = pc.point(q.0, q.1);
    let g = geodesic(x, &a, &b).unwrap();
    assert!((g.length - want).abs() <= 1e-8 * (1.0 + want), "{} vs {want}", g.length);
    assert!(is_local_geodesic(x, &g.path).ok);
    let back = geodesic(x, &b, &a).unwrap();
    assert!((back.length - g.length).abs() <= 1e-9 * (1.0 + want));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flat_grid_matches_plane(ax in 0.0f64..10.0, ay in 0.0f64..10.0, bx in 0.0f64..10.0, by in 0.0f64..10.0) {
        let g = flat_grid(10);
        let x = &g.complex;
        let geo = geodesic(x, &grid_point(&g, ax, ay), &grid_point(&g, bx, by)).unwrap();
        let want = (ax - bx).hypot(ay - by);
        prop_assert!((geo.length - want).abs() <= 1e-8 * (1.0 + want), "{} vs {}", geo.length, want);
        prop_assert!(is_local_geodesic(x, &geo.path).ok);
    }

    #[test]
    fn tripod_interval_is_l2_product(p0 in leg(), p1 in unit(), q0 in leg(), q1 in unit()) {
        let ti = tripod_interval();
        let want = tripod_dist(p0, q0).hypot(interval_dist(p1, q1));
        check_product(&ti, (p0, p1), (q0, q1), want);
    }

    #[test]
    fn tripod_tripod_is_l2_product(p0 in leg(), p1 in leg(), q0 in leg(), q1 in leg()) {
        let tt = tripod_tripod();
        let want = tripod_dist(p0, q0).hypot(tripod_dist(p1, q1));
        check_product(&tt, (p0, p1), (q0, q1), want);
    }

    #[test]
    fn triangle_inequality_and_midpoint_comparison(p in (leg(), leg()), q in (leg(), leg()), r in (leg(), leg())) {
        let tt = tripod_tripod();
        let x = &tt.complex;
        let [a, b, c] = [p, q, r].map(|(u, v)| tt.point(u, v));
        let ab = geodesic(x, &a, &b).unwrap();
        let bc = geodesic(x, &b, &c).unwrap();
        let ac = geodesic(x, &a, &c).unwrap();
        prop_assert!(ac.length <= ab.length + bc.length + 1e-9);
        // distance from a to the midpoint of bc is at most the Euclidean comparison value
        let m = bc.point_at(x, bc.length / 2.0);
        let am = geodesic(x, &a, &m).unwrap().length;
        let cmp = (0.5 * ab.length.powi(2) + 0.5 * ac.length.powi(2) - 0.25 * bc.length.powi(2)).max(0.0).sqrt();
        prop_assert!(am <= cmp + 1e-8, "{am} > {cmp}");
    }
}
