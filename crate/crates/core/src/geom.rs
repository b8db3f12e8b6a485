//! Small planar vector toolkit used for per-cell layouts.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct P2 {
    pub x: f64,
    pub y: f64,
}

impl P2 {
    pub const fn new(x: f64, y: f64) -> Self {
        P2 { x, y }
    }

    pub fn dot(self, o: P2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: P2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: P2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: P2, t: f64) -> P2 {
        self + (o - self) * t
    }

    pub fn normalized(self) -> P2 {
        let n = self.norm();
        P2::new(self.x / n, self.y / n)
    }

    pub fn perp(self) -> P2 {
        P2::new(-self.y, self.x)
    }
}

impl Add for P2 {
    type Output = P2;
    fn add(self, o: P2) -> P2 {
        P2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for P2 {
    type Output = P2;
    fn sub(self, o: P2) -> P2 {
        P2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for P2 {
    type Output = P2;
    fn mul(self, s: f64) -> P2 {
        P2::new(self.x * s, self.y * s)
    }
}

impl Neg for P2 {
    type Output = P2;
    fn neg(self) -> P2 {
        P2::new(-self.x, -self.y)
    }
}

/// Twice the signed area of `abc` (positive when counter-clockwise).
pub fn orient(a: P2, b: P2, c: P2) -> f64 {
    (b - a).cross(c - a)
}

/// Unsigned angle between two nonzero vectors, in `[0, π]`.
pub fn angle_between(u: P2, v: P2) -> f64 {
    u.cross(v).abs().atan2(u.dot(v))
}

/// Counter-clockwise angle from `u` to `v`, in `[0, 2π)`.
pub fn ccw_angle(u: P2, v: P2) -> f64 {
    let a = u.cross(v).atan2(u.dot(v));
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Closest-point parameter of `p` on segment `ab`, clamped to `[0, 1]`.
pub fn project_param(a: P2, b: P2, p: P2) -> f64 {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return 0.0;
    }
    ((p - a).dot(d) / l2).clamp(0.0, 1.0)
}

pub fn dist_point_segment(a: P2, b: P2, p: P2) -> f64 {
    p.dist(a.lerp(b, project_param(a, b, p)))
}

/// Barycentric coordinates of `p` with respect to triangle `abc`.
pub fn barycentric(a: P2, b: P2, c: P2, p: P2) -> [f64; 3] {
    let area = orient(a, b, c);
    let wa = orient(p, b, c) / area;
    let wb = orient(a, p, c) / area;
    [wa, wb, 1.0 - wa - wb]
}

/// Intersection of two closed segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegHit {
    None,
    /// Parameters on the first and second segment.
    Point(f64, f64),
    /// Collinear overlap, given as a parameter interval on the first segment
    /// and the matching interval on the second.
    Overlap([f64; 2], [f64; 2]),
}

pub fn segment_intersection(a: P2, b: P2, c: P2, d: P2, eps: f64) -> SegHit {
    let r = b - a;
    let s = d - c;
    let rl = r.norm();
    let sl = s.norm();
    if rl <= eps && sl <= eps {
        return if a.dist(c) <= eps { SegHit::Point(0.0, 0.0) } else { SegHit::None };
    }
    if rl <= eps {
        return if dist_point_segment(c, d, a) <= eps {
            SegHit::Point(0.0, project_param(c, d, a))
        } else {
            SegHit::None
        };
    }
    if sl <= eps {
        return if dist_point_segment(a, b, c) <= eps {
            SegHit::Point(project_param(a, b, c), 0.0)
        } else {
            SegHit::None
        };
    }
    let denom = r.cross(s);
    let cdist_c = r.cross(c - a).abs() / rl;
    let cdist_d = r.cross(d - a).abs() / rl;
    if denom.abs() <= eps * rl * sl || (cdist_c <= eps && cdist_d <= eps) {
        // parallel
        if cdist_c > eps || cdist_d > eps {
            return SegHit::None;
        }
        let t0 = (c - a).dot(r) / (rl * rl);
        let t1 = (d - a).dot(r) / (rl * rl);
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let tol = eps / rl;
        let lo = lo.max(0.0);
        let hi = hi.min(1.0);
        if lo > hi + tol {
            return SegHit::None;
        }
        let u_of = |t: f64| {
            let p = a + r * t;
            ((p - c).dot(s) / (sl * sl)).clamp(0.0, 1.0)
        };
        if (hi - lo) * rl <= eps {
            let t = ((lo + hi) / 2.0).clamp(0.0, 1.0);
            return SegHit::Point(t, u_of(t));
        }
        return SegHit::Overlap([lo, hi], [u_of(lo), u_of(hi)]);
    }
    let t = (c - a).cross(s) / denom;
    let u = (c - a).cross(r) / denom;
    let tt = eps / rl;
    let tu = eps / sl;
    if t < -tt || t > 1.0 + tt || u < -tu || u > 1.0 + tu {
        return SegHit::None;
    }
    SegHit::Point(t.clamp(0.0, 1.0), u.clamp(0.0, 1.0))
}

/// Clip a convex polygon (counter-clockwise) to the half-plane left of the
/// directed line `a -> b`.
pub fn clip_halfplane(poly: &[P2], a: P2, b: P2) -> Vec<P2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    let side = |p: P2| orient(a, b, p);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = side(p);
        let sq = side(q);
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p.lerp(q, t));
        }
    }
    out
}

/// Twice the area over the diameter: how thin a polygon is.
pub fn polygon_width(poly: &[P2]) -> f64 {
    let mut diam = 0.0f64;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            diam = diam.max(poly[i].dist(poly[j]));
        }
    }
    if diam == 0.0 {
        0.0
    } else {
        2.0 * polygon_area(poly).abs() / diam
    }
}

/// Signed area of a polygon (positive for counter-clockwise order).
pub fn polygon_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        s += poly[i].cross(poly[(i + 1) % n]);
    }
    s / 2.0
}

pub fn centroid(poly: &[P2]) -> P2 {
    let n = poly.len() as f64;
    let s = poly.iter().fold(P2::default(), |acc, &p| acc + p);
    s * (1.0 / n)
}

/// Point-in-convex-polygon test with a distance tolerance.
pub fn in_convex(poly: &[P2], p: P2, eps: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let l = a.dist(b);
        if l < 1e-12 {
            continue;
        }
        if orient(a, b, p) / l < -eps {
            return false;
        }
    }
    true
}

/// Whether two convex polygons share interior points (separating axis test
/// with a margin: touching polygons do not overlap).
pub fn convex_overlap(p: &[P2], q: &[P2], eps: f64) -> bool {
    for poly in [p, q] {
        let n = poly.len();
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let axis = (b - a).perp();
            let l = axis.norm();
            if l == 0.0 {
                continue;
            }
            let axis = axis * (1.0 / l);
            let (pmin, pmax) = extent(p, axis);
            let (qmin, qmax) = extent(q, axis);
            if pmax <= qmin + eps || qmax <= pmin + eps {
                return false;
            }
        }
    }
    true
}

fn extent(poly: &[P2], axis: P2) -> (f64, f64) {
    poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_diagonals() {
        let hit = segment_intersection(
            P2::new(0.0, 0.0),
            P2::new(1.0, 1.0),
            P2::new(1.0, 0.0),
            P2::new(0.0, 1.0),
            1e-12,
        );
        assert_eq!(hit, SegHit::Point(0.5, 0.5));
    }

    #[test]
    fn collinear_overlap() {
        let hit = segment_intersection(
            P2::new(0.0, 0.0),
            P2::new(3.0, 0.0),
            P2::new(1.0, 0.0),
            P2::new(4.0, 0.0),
            1e-12,
        );
        match hit {
            SegHit::Overlap(t, u) => {
                assert!((t[0] - 1.0 / 3.0).abs() < 1e-12 && (t[1] - 1.0).abs() < 1e-12);
                assert!(u[0].abs() < 1e-12 && (u[1] - 2.0 / 3.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clip_square() {
        let sq = [P2::new(0.0, 0.0), P2::new(1.0, 0.0), P2::new(1.0, 1.0), P2::new(0.0, 1.0)];
        let half = clip_halfplane(&sq, P2::new(0.5, 0.0), P2::new(0.5, 1.0));
        assert!((polygon_area(&half) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn touching_triangles_do_not_overlap() {
        let a = [P2::new(0.0, 0.0), P2::new(1.0, 0.0), P2::new(0.0, 1.0)];
        let b = [P2::new(1.0, 0.0), P2::new(1.0, 1.0), P2::new(0.0, 1.0)];
        assert!(!convex_overlap(&a, &b, 1e-12));
        let c = [P2::new(0.1, 0.1), P2::new(0.5, 0.1), P2::new(0.1, 0.5)];
        assert!(convex_overlap(&a, &c, 1e-12));
    }
}
