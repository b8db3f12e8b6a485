//! Acceptance run: one pass/fail line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use twomedian::builders::{
    cone_three_quarters, flat_grid, grid_point, random_point, tripod_interval, tripod_tripod, GraphPoint, ProductComplex,
};
use twomedian::disc::fixtures::adversarial;
use twomedian::disc::fill::find_overlaps;
use twomedian::disc::fold::{fold, is_near_immersion};
use twomedian::disc::gauss_bonnet::gauss_bonnet;
use twomedian::disc::{full_triangle_disc, Diagram};
use twomedian::full_triangle::{classify_quadruple, FullTriangleQuery, GeodesicTable};
use twomedian::geodesic::geodesic;
use twomedian::link::check_cat0;
use twomedian::median::audit::{audit_pair, image_cells};
use twomedian::median::sperner::{sperner_rainbow, SpernerDisc};
use twomedian::median::{median2, point_dist, FourTriangles, Location};
use twomedian::tetra::verify_quadruple;
use twomedian::{PointRef, TriangleComplex, EPS_GEO};

struct Line {
    ok: bool,
    detail: String,
}

fn line(ok: bool, detail: String) -> Line {
    Line { ok, detail }
}

/// Plane coordinates of a point of a flat grid, read off the `i_j` vertex labels.
fn plane_xy(x: &TriangleComplex, p: &PointRef) -> (f64, f64) {
    let vertex = |v: usize| {
        let l = x.vertex_labels[v].to_string();
        let (i, j) = l.split_once('_').unwrap();
        (i.parse::<f64>().unwrap(), j.parse::<f64>().unwrap())
    };
    match *p {
        PointRef::Vertex(v) => vertex(v),
        PointRef::Edge { edge, t } => {
            let (a, b) = (vertex(x.edges[edge].v[0]), vertex(x.edges[edge].v[1]));
            (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
        }
        PointRef::Tri { tri, bary } => {
            let v = x.tris[tri].verts.map(vertex);
            (0..3).fold((0.0, 0.0), |acc, k| (acc.0 + bary[k] * v[k].0, acc.1 + bary[k] * v[k].1))
        }
    }
}

type Q = BigRational;

fn q(v: f64) -> Q {
    Q::from_float(v).unwrap()
}

fn cross(o: &(Q, Q), a: &(Q, Q), b: &(Q, Q)) -> Q {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Exact intersection of the planar triangles on each triple of the four points, as distinct vertices.
fn planar_four_triangle_oracle(pts: &[(f64, f64); 4]) -> Vec<(Q, Q)> {
    let p: Vec<(Q, Q)> = pts.iter().map(|&(a, b)| (q(a), q(b))).collect();
    let tri = |j: usize| -> Vec<(Q, Q)> {
        let mut t: Vec<(Q, Q)> = (0..4).filter(|&i| i != j).map(|i| p[i].clone()).collect();
        if cross(&t[0], &t[1], &t[2]).is_negative() {
            t.swap(1, 2);
        }
        t
    };
    let mut poly = tri(0);
    for j in 1..4 {
        let t = tri(j);
        for k in 0..3 {
            let (a, b) = (&t[k], &t[(k + 1) % 3]);
            let mut out = Vec::new();
            for m in 0..poly.len() {
                let (s, e) = (&poly[m], &poly[(m + 1) % poly.len()]);
                let (cs, ce) = (cross(a, b, s), cross(a, b, e));
                if !cs.is_negative() {
                    out.push(s.clone());
                }
                if (cs.is_negative() && ce.is_positive()) || (cs.is_positive() && ce.is_negative()) {
                    let r = &cs / (&cs - &ce);
                    out.push((&s.0 + &r * (&e.0 - &s.0), &s.1 + &r * (&e.1 - &s.1)));
                }
            }
            poly = out;
        }
    }
    let mut distinct: Vec<(Q, Q)> = Vec::new();
    for v in poly {
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    distinct
}

fn dyadic(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let k = rng.gen_range((lo * 256.0) as i64..=(hi * 256.0) as i64);
    k as f64 / 256.0
}

fn tripod_dist(a: GraphPoint, b: GraphPoint) -> f64 {
    if a.edge == b.edge {
        (a.s - b.s).abs()
    } else {
        a.s + b.s
    }
}

fn tripod_point(rng: &mut ChaCha8Rng) -> GraphPoint {
    GraphPoint { edge: rng.gen_range(0..3), s: rng.gen_range(0.0..=1.0) }
}

fn criterion_1() -> Line {
    let budget = Duration::from_secs(1);
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, x) in [("grid 10x10", flat_grid(10).complex), ("tripod x interval", tripod_interval().complex)] {
        let t = Instant::now();
        let r = check_cat0(&x);
        let dt = t.elapsed();
        ok &= r.passed && dt < budget;
        detail.push(format!("{name} passed={} in {:.3}s", r.passed, dt.as_secs_f64()));
    }
    let cone = TriangleComplex::validate(&cone_three_quarters()).unwrap();
    let t = Instant::now();
    let r = check_cat0(&cone);
    let dt = t.elapsed();
    let apex = r.link_failures.iter().find(|f| f.vertex == "apex");
    let girth_ok = apex.is_some_and(|f| (f.girth - 1.5 * PI).abs() < 1e-7);
    ok &= !r.passed && girth_ok && dt < budget;
    detail.push(format!("cone fails={} apex girth {:?} in {:.3}s", !r.passed, apex.map(|f| f.girth), dt.as_secs_f64()));
    line(ok, detail.join("; "))
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Line {
    let t = Instant::now();
    let g = flat_grid(10);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let [a, b]: [(f64, f64); 2] = [0; 2].map(|_| (rng.gen_range(0.0..=10.0), rng.gen_range(0.0..=10.0)));
        let want = ((a.0 - b.0) * (a.0 - b.0) + (a.1 - b.1) * (a.1 - b.1)).sqrt();
        let got = geodesic(&g.complex, &grid_point(&g, a.0, a.1), &grid_point(&g, b.0, b.1)).unwrap().length;
        worst = worst.max((got - want).abs() / want.max(1e-300));
    }
    let ti = tripod_interval();
    let mut worst_t: f64 = 0.0;
    for _ in 0..100 {
        let (p, s) = (tripod_point(rng), rng.gen_range(0.0..=1.0));
        let (r, u) = (tripod_point(rng), rng.gen_range(0.0..=1.0));
        let unit = |s: f64| GraphPoint { edge: 0, s };
        let want = (tripod_dist(p, r).powi(2) + (s - u) * (s - u)).sqrt();
        let got = geodesic(&ti.complex, &ti.point(p, unit(s)), &ti.point(r, unit(u))).unwrap().length;
        worst_t = worst_t.max((got - want).abs() / want.max(1e-300));
    }
    let dt = t.elapsed();
    let ok = worst <= 1e-8 && worst_t <= 1e-8 && dt < Duration::from_secs(10);
    line(ok, format!("worst relative error grid {worst:.2e}, tripod x interval {worst_t:.2e}, {:.2}s", dt.as_secs_f64()))
}

/// Uniform point in one of the given triangles.
fn point_in(x: &TriangleComplex, tris: &[usize], rng: &mut ChaCha8Rng) -> PointRef {
    let tri = *tris.choose(rng).unwrap();
    let (mut a, mut b) = (rng.gen::<f64>(), rng.gen::<f64>());
    if a + b > 1.0 {
        (a, b) = (1.0 - a, 1.0 - b);
    }
    x.canonicalize(&PointRef::Tri { tri, bary: [1.0 - a - b, a, b] }).unwrap()
}

fn criterion_3(rng: &mut ChaCha8Rng, complexes: &[(&str, &ProductComplex)], diagrams: &mut Vec<Diagram>, overlaps: &mut usize) -> Line {
    let t = Instant::now();
    let mut detail = Vec::new();
    let mut total_bad = 0;
    for (name, pc) in complexes {
        let x = &pc.complex;
        let (mut bad, mut skipped, mut inside) = (0, 0, 0);
        for _ in 0..20 {
            let c = [0; 3].map(|_| random_point(x, rng));
            let disc = full_triangle_disc(x, &c[0], &c[1], &c[2]).unwrap();
            let image = disc.image(x);
            let query = FullTriangleQuery::new(x, c).unwrap();
            let cells: Vec<usize> = image_cells(x, &image).into_iter().collect();
            let samples: Vec<PointRef> = (0..1000).map(|_| point_in(x, &cells, rng)).collect();
            let verdicts: Vec<Option<(bool, bool)>> = samples
                .par_iter()
                .map(|p| {
                    if image.boundary_distance(x, p) <= EPS_GEO {
                        None
                    } else {
                        Some((query.contains(p).unwrap(), image.contains(x, p, 0.0)))
                    }
                })
                .collect();
            for v in verdicts {
                match v {
                    None => skipped += 1,
                    Some((a, b)) => {
                        bad += usize::from(a != b);
                        inside += usize::from(a);
                    }
                }
            }
            *overlaps += disc.filled.overlaps.len();
            diagrams.push(disc.filled.diagram);
        }
        total_bad += bad;
        detail.push(format!("{name}: {bad} disagreements ({inside} inside, {skipped} boundary samples skipped)"));
    }
    let dt = t.elapsed();
    line(total_bad == 0 && dt < Duration::from_secs(60), format!("{}; {:.1}s", detail.join("; "), dt.as_secs_f64()))
}

fn is_lanky(x: &TriangleComplex, pts: &[PointRef; 4]) -> bool {
    let table = GeodesicTable::new(x, pts).unwrap();
    classify_quadruple(x, &table).unwrap().lanky.is_some()
}

fn criterion_4(rng: &mut ChaCha8Rng, diagrams: &mut Vec<Diagram>) -> Line {
    let t = Instant::now();
    let tol = 1e-7;
    let g = flat_grid(10);
    let x = &g.complex;
    let (mut planar_worst, mut planar_n, mut resampled): (f64, usize, usize) = (0.0, 0, 0);
    let mut planar_fail = Vec::new();
    while planar_n < 50 {
        let xy = [0; 4].map(|_| (dyadic(rng, 0.5, 9.5), dyadic(rng, 0.5, 9.5)));
        let oracle = planar_four_triangle_oracle(&xy);
        let pts = xy.map(|(a, b)| grid_point(&g, a, b));
        if oracle.len() != 1 || is_lanky(x, &pts) {
            resampled += 1;
            continue;
        }
        planar_n += 1;
        let want = (oracle[0].0.to_f64().unwrap(), oracle[0].1.to_f64().unwrap());
        match median2(x, &pts, tol) {
            Ok(m) => match m.point() {
                Some(p) => {
                    let got = plane_xy(x, &p);
                    let err = ((got.0 - want.0).powi(2) + (got.1 - want.1).powi(2)).sqrt();
                    planar_worst = planar_worst.max(err);
                    if err > 1e-6 {
                        planar_fail.push(format!("{xy:?}: {err:.2e}"));
                    }
                }
                None => planar_fail.push(format!("{xy:?}: segment")),
            },
            Err(e) => planar_fail.push(format!("{xy:?}: {e}")),
        }
        if planar_n <= 10 {
            diagrams.extend(FourTriangles::new(x, pts).unwrap().discs.into_iter().map(|d| d.filled.diagram));
        }
    }
    let mut ok = planar_fail.is_empty();
    let mut detail = vec![format!(
        "plane: 50 quadruples ({resampled} degenerate resampled), worst error {planar_worst:.2e}{}",
        if planar_fail.is_empty() { String::new() } else { format!(", failures {planar_fail:?}") }
    )];
    for (name, pc) in [("tripod x interval", tripod_interval()), ("tripod x tripod", tripod_tripod())] {
        let x = &pc.complex;
        let (mut n, mut lanky, mut worst_perm, mut bad): (usize, usize, f64, Vec<String>) = (0, 0, 0.0, Vec::new());
        while n < 20 {
            let pts = [0; 4].map(|_| x.canonicalize(&random_point(x, rng)).unwrap());
            if is_lanky(x, &pts) {
                lanky += 1;
                continue;
            }
            n += 1;
            let Some(o) = median2(x, &pts, tol).ok().and_then(|m| m.point()) else {
                bad.push(format!("quadruple {n}: no single point"));
                continue;
            };
            for perm in [[1, 0, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1], [0, 2, 3, 1]] {
                match median2(x, &perm.map(|i| pts[i]), tol).ok().and_then(|m| m.point()) {
                    Some(p) => worst_perm = worst_perm.max(point_dist(x, &o, &p)),
                    None => bad.push(format!("quadruple {n}: permutation {perm:?} lost the point")),
                }
            }
            match verify_quadruple(x, &pts, 1e-6) {
                Ok((r, _)) if r.intersection_ok() => {}
                Ok((r, _)) => bad.push(format!("quadruple {n}: check (c) o_in_all={} extra={}", r.o_in_all, r.extra_points)),
                Err(e) => bad.push(format!("quadruple {n}: {e}")),
            }
        }
        ok &= bad.is_empty() && worst_perm <= 2e-6;
        detail.push(format!(
            "{name}: 20 quadruples ({lanky} lanky resampled), permutation spread {worst_perm:.2e}{}",
            if bad.is_empty() { String::new() } else { format!(", failures {bad:?}") }
        ));
    }
    let dt = t.elapsed();
    ok &= dt < Duration::from_secs(300);
    detail.push(format!("{:.1}s", dt.as_secs_f64()));
    line(ok, detail.join("; "))
}

fn criterion_5(diagrams: &mut Vec<Diagram>) -> Line {
    let g = flat_grid(4);
    let x = &g.complex;
    let pts = [(0.0, 0.0), (3.0, 0.0), (1.0, 0.0), (2.0, 0.0)].map(|(a, b)| grid_point(&g, a, b));
    let m = median2(x, &pts, 1e-7).unwrap();
    diagrams.extend(FourTriangles::new(x, pts).unwrap().discs.into_iter().map(|d| d.filled.diagram));
    match m.location {
        Location::Segment { ends, length, .. } => {
            let (a, b) = (plane_xy(x, &ends[0]), plane_xy(x, &ends[1]));
            let ok = (length - 1.0).abs() <= 1e-6 && m.diagnostics.opposite_agree;
            line(ok, format!("segment {a:?}-{b:?} of length {length}, opposite intersections agree={}", m.diagnostics.opposite_agree))
        }
        Location::Point { point } => line(false, format!("expected a segment, got the point {:?}", plane_xy(x, &point))),
    }
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Line {
    let t = Instant::now();
    let (g, ti) = (flat_grid(3), tripod_interval());
    let mut isolated = 0;
    let mut samples = 0;
    for k in 0..20 {
        let pc = if k % 2 == 0 { &g } else { &ti };
        let x = &pc.complex;
        let p = [0; 4].map(|_| random_point(x, rng));
        let a = full_triangle_disc(x, &p[0], &p[1], &p[2]).unwrap().image(x);
        let b = full_triangle_disc(x, &p[0], &p[1], &p[3]).unwrap().image(x);
        let r = audit_pair(x, &a, &b, 0.01);
        isolated += r.isolated.len();
        samples += r.samples;
    }
    line(isolated == 0, format!("20 pairs, {samples} intersection samples, {isolated} isolated, {:.1}s", t.elapsed().as_secs_f64()))
}

fn criterion_7(diagrams: &[Diagram], x_of: &[&TriangleComplex]) -> Line {
    let (mut worst, mut sign_bad, mut worst_sign): (f64, usize, f64) = (0.0, 0, 0.0);
    for (d, x) in diagrams.iter().zip(x_of) {
        let c = gauss_bonnet(x, d);
        worst = worst.max(c.residual);
        worst_sign = worst_sign.max(c.worst_interior).max(c.worst_boundary);
        sign_bad += usize::from(!c.sign_ok);
    }
    line(
        worst < 1e-9 && sign_bad == 0,
        format!("{} diagrams, worst residual {worst:.2e}, worst sign excess {worst_sign:.2e}, {sign_bad} sign failures", diagrams.len()),
    )
}

fn criterion_8(overlaps_on_valid: usize) -> Line {
    let grids = [flat_grid(2), flat_grid(3), flat_grid(4)];
    let mut bad = Vec::new();
    for (name, gi, d) in adversarial(&grids, 30) {
        let x = &grids[gi].complex;
        let (f, r) = fold(x, d);
        if r.moves.is_empty() || !r.strictly_decreasing() || !is_near_immersion(x, &f) || !find_overlaps(x, &f).is_empty() {
            bad.push(name);
        }
    }
    line(
        bad.is_empty() && overlaps_on_valid == 0,
        format!("30 fixtures, failures {bad:?}; overlaps in discs filled on valid inputs: {overlaps_on_valid}"),
    )
}

fn criterion_9(rng: &mut ChaCha8Rng) -> Line {
    let mut even = 0;
    let mut sizes = (usize::MAX, 0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=14);
        let mut d = SpernerDisc::subdivided(n);
        d.color_with(|_, allowed| *allowed.choose(rng).unwrap());
        sizes = (sizes.0.min(d.tris.len()), sizes.1.max(d.tris.len()));
        match sperner_rainbow(&d) {
            Ok((_, count)) if count % 2 == 1 => {}
            _ => even += 1,
        }
    }
    line(even == 0, format!("100 discs of {}..{} triangles, {even} with an even count", sizes.0, sizes.1))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (grid, ti, tt) = (flat_grid(10), tripod_interval(), tripod_tripod());
    let complexes = [("grid 10x10", &grid), ("tripod x interval", &ti), ("tripod x tripod", &tt)];

    let mut lines = Vec::new();
    lines.push(criterion_1());
    lines.push(criterion_2(&mut rng));
    let mut d3 = Vec::new();
    let mut overlaps = 0;
    lines.push(criterion_3(&mut rng, &complexes, &mut d3, &mut overlaps));
    let mut d4 = Vec::new();
    lines.push(criterion_4(&mut rng, &mut d4));
    let mut d5 = Vec::new();
    lines.push(criterion_5(&mut d5));
    lines.push(criterion_6(&mut rng));

    // criterion 3 made 20 discs per complex, in order
    let grid4 = flat_grid(4);
    let mut owners: Vec<&TriangleComplex> = Vec::new();
    for (_, pc) in &complexes {
        owners.extend(std::iter::repeat(&pc.complex).take(20));
    }
    owners.extend(std::iter::repeat(&grid.complex).take(d4.len()));
    owners.extend(std::iter::repeat(&grid4.complex).take(d5.len()));
    let all: Vec<Diagram> = d3.into_iter().chain(d4).chain(d5).collect();
    lines.push(criterion_7(&all, &owners));
    lines.push(criterion_8(overlaps));
    lines.push(criterion_9(&mut rng));

    let mut failed = 0;
    for (i, l) in lines.iter().enumerate() {
        println!("criterion {}: {} ({})", i + 1, if l.ok { "PASS" } else { "FAIL" }, l.detail);
        failed += usize::from(!l.ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
