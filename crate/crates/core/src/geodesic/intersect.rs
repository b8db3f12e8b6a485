//! Intersections of geodesics and the spike/core split of a geodesic triangle.

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::error::Result;
use crate::geom::{dist_point_segment, project_param, segment_intersection, SegHit, P2};
use crate::EPS_GEO;

use super::{geodesic, Geodesic};

/// Intersection of two geodesics, as arclength ranges on each.
#[derive(Debug, Clone, PartialEq)]
pub enum Intersection {
    Empty,
    Point { on_first: f64, on_second: f64, point: PointRef },
    Segment { on_first: [f64; 2], on_second: [f64; 2], ends: [PointRef; 2] },
}

impl Intersection {
    pub fn is_empty(&self) -> bool {
        matches!(self, Intersection::Empty)
    }

    /// Arclength range on the first geodesic.
    pub fn range_on_first(&self) -> Option<[f64; 2]> {
        match *self {
            Intersection::Empty => None,
            Intersection::Point { on_first, .. } => Some([on_first, on_first]),
            Intersection::Segment { on_first, .. } => Some(on_first),
        }
    }

    pub fn points(&self) -> Vec<PointRef> {
        match self {
            Intersection::Empty => vec![],
            Intersection::Point { point, .. } => vec![*point],
            Intersection::Segment { ends, .. } => ends.to_vec(),
        }
    }
}

/// Position of `p` in the local planar embedding of `cell`.
fn embed(x: &TriangleComplex, cell: Cell, p: &PointRef) -> Option<P2> {
    match cell {
        Cell::Vertex(_) => Some(P2::default()),
        Cell::Edge(e) => x.edge_param(e, p).map(|t| P2::new(t * x.edges[e].len, 0.0)),
        Cell::Tri(t) => x.tri_pos(t, p),
    }
}

/// Parameter interval of the piece `p -> q` in `cell` lying on face `face`,
/// with the matching face coordinates (edge parameter, or 0 for a vertex).
fn clip_to_face(
    x: &TriangleComplex,
    cell: Cell,
    p: &PointRef,
    q: &PointRef,
    face: Cell,
) -> Option<([f64; 2], [f64; 2])> {
    let (a, b) = (embed(x, cell, p)?, embed(x, cell, q)?);
    match face {
        Cell::Vertex(v) => {
            let pv = embed(x, cell, &PointRef::Vertex(v))?;
            if dist_point_segment(a, b, pv) <= EPS_GEO {
                let t = if a.dist(b) > 0.0 { project_param(a, b, pv) } else { 0.0 };
                Some(([t, t], [0.0, 0.0]))
            } else {
                None
            }
        }
        Cell::Edge(e) => {
            if cell == face {
                let len = x.edges[e].len;
                return Some(([0.0, 1.0], [a.x / len, b.x / len]));
            }
            let [v0, v1] = x.edges[e].v;
            let (c, d) = (embed(x, cell, &PointRef::Vertex(v0))?, embed(x, cell, &PointRef::Vertex(v1))?);
            match segment_intersection(a, b, c, d, EPS_GEO) {
                SegHit::None => None,
                SegHit::Point(t, u) => Some(([t, t], [u, u])),
                SegHit::Overlap(t, u) => Some((t, u)),
            }
        }
        Cell::Tri(_) => Some(([0.0, 1.0], [0.0, 1.0])),
    }
}

/// Lowest cell having both cells as faces.
fn common_superset(x: &TriangleComplex, a: Cell, b: Cell) -> Option<Cell> {
    x.star(a).into_iter().filter(|&c| x.is_face(b, c)).min_by_key(|&c| (c.dim(), c))
}

/// Closed faces shared by two cells.
fn shared_faces(x: &TriangleComplex, a: Cell, b: Cell) -> Vec<Cell> {
    let faces = |c: Cell| -> Vec<Cell> {
        match c {
            Cell::Vertex(_) => vec![c],
            Cell::Edge(e) => vec![c, Cell::Vertex(x.edges[e].v[0]), Cell::Vertex(x.edges[e].v[1])],
            Cell::Tri(t) => {
                let tr = &x.tris[t];
                let mut v = vec![c];
                v.extend(tr.sides.iter().map(|&e| Cell::Edge(e)));
                v.extend(tr.verts.iter().map(|&w| Cell::Vertex(w)));
                v
            }
        }
    };
    let fb = faces(b);
    faces(a).into_iter().filter(|c| fb.contains(c)).collect()
}

/// Matching parameter ranges `(on piece 1, on piece 2)` where two pieces meet.
fn piece_overlap(
    x: &TriangleComplex,
    c1: Cell,
    p: &PointRef,
    q: &PointRef,
    c2: Cell,
    r: &PointRef,
    s: &PointRef,
) -> Vec<([f64; 2], [f64; 2])> {
    if let Some(sup) = common_superset(x, c1, c2) {
        let emb = |pt: &PointRef| embed(x, sup, pt);
        let (Some(a), Some(b), Some(c), Some(d)) = (emb(p), emb(q), emb(r), emb(s)) else {
            return vec![];
        };
        return match segment_intersection(a, b, c, d, EPS_GEO) {
            SegHit::None => vec![],
            SegHit::Point(t, u) => vec![([t, t], [u, u])],
            SegHit::Overlap(t, u) => vec![(t, u)],
        };
    }
    let mut out = Vec::new();
    for face in shared_faces(x, c1, c2) {
        let (Some((t1, f1)), Some((t2, f2))) = (clip_to_face(x, c1, p, q, face), clip_to_face(x, c2, r, s, face))
        else {
            continue;
        };
        match face {
            Cell::Vertex(_) => out.push((t1, t2)),
            Cell::Edge(e) => {
                let tol = EPS_GEO / x.edges[e].len;
                let lo = f1[0].min(f1[1]).max(f2[0].min(f2[1]));
                let hi = f1[0].max(f1[1]).min(f2[0].max(f2[1]));
                if lo > hi + tol {
                    continue;
                }
                let (lo, hi) = if lo > hi { ((lo + hi) / 2.0, (lo + hi) / 2.0) } else { (lo, hi) };
                let back = |t: [f64; 2], f: [f64; 2], u: f64| {
                    if (f[1] - f[0]).abs() <= 1e-15 {
                        t[0]
                    } else {
                        t[0] + (t[1] - t[0]) * ((u - f[0]) / (f[1] - f[0])).clamp(0.0, 1.0)
                    }
                };
                out.push(([back(t1, f1, lo), back(t1, f1, hi)], [back(t2, f2, lo), back(t2, f2, hi)]));
            }
            Cell::Tri(_) => {}
        }
    }
    out
}

/// The set `g1 ∩ g2`, computed piece by piece.
///
/// Geodesics in a CAT(0) space meet in a connected set, so the result is
/// reported as the hull of all meeting parameters on the first geodesic.
pub fn geodesic_intersection(x: &TriangleComplex, g1: &Geodesic, g2: &Geodesic) -> Intersection {
    let arc1 = g1.path.arclengths(x);
    let arc2 = g2.path.arclengths(x);
    let mut hits: Vec<(f64, f64)> = Vec::new();
    let p1 = &g1.path;
    let p2 = &g2.path;
    if p1.cells.is_empty() || p2.cells.is_empty() {
        // a degenerate geodesic is a single point
        let (single, other, swap) = if p1.cells.is_empty() { (p1, p2, false) } else { (p2, p1, true) };
        let pt = single.points[0];
        let oarc = if swap { &arc1 } else { &arc2 };
        for (i, &c) in other.cells.iter().enumerate() {
            if let Some(sup) = common_superset(x, c, pt.carrier()) {
                if let (Some(a), Some(b), Some(v)) = (
                    embed(x, sup, &other.points[i]),
                    embed(x, sup, &other.points[i + 1]),
                    embed(x, sup, &pt),
                ) {
                    if dist_point_segment(a, b, v) <= EPS_GEO {
                        let t = if a.dist(b) > 0.0 { project_param(a, b, v) } else { 0.0 };
                        let s = oarc[i] + t * (oarc[i + 1] - oarc[i]);
                        hits.push(if swap { (s, 0.0) } else { (0.0, s) });
                    }
                }
            }
        }
        if other.cells.is_empty() && x.same_point(&pt, &other.points[0], EPS_GEO) {
            hits.push((0.0, 0.0));
        }
    } else {
        for i in 0..p1.cells.len() {
            for j in 0..p2.cells.len() {
                for (t, u) in piece_overlap(
                    x,
                    p1.cells[i],
                    &p1.points[i],
                    &p1.points[i + 1],
                    p2.cells[j],
                    &p2.points[j],
                    &p2.points[j + 1],
                ) {
                    for k in 0..2 {
                        let s1 = arc1[i] + t[k] * (arc1[i + 1] - arc1[i]);
                        let s2 = arc2[j] + u[k] * (arc2[j + 1] - arc2[j]);
                        hits.push((s1, s2));
                    }
                }
            }
        }
    }
    if hits.is_empty() {
        return Intersection::Empty;
    }
    let lo = hits.iter().copied().min_by(|a, b| a.0.total_cmp(&b.0)).unwrap();
    let hi = hits.iter().copied().max_by(|a, b| a.0.total_cmp(&b.0)).unwrap();
    let a = g1.path.point_at_length_with(x, &arc1, lo.0);
    if hi.0 - lo.0 <= EPS_GEO {
        let s = (lo.0 + hi.0) / 2.0;
        return Intersection::Point { on_first: s, on_second: (lo.1 + hi.1) / 2.0, point: g1.path.point_at_length_with(x, &arc1, s) };
    }
    let b = g1.path.point_at_length_with(x, &arc1, hi.0);
    Intersection::Segment { on_first: [lo.0, hi.0], on_second: [lo.1, hi.1], ends: [a, b] }
}

/// A geodesic triangle split into three spikes and a core.
#[derive(Debug, Clone)]
pub struct SpikyTriangle {
    pub corners: [PointRef; 3],
    /// `sides[k]` runs from corner `k` to corner `k + 1`.
    pub sides: [Geodesic; 3],
    /// End of the spike at each corner.
    pub spike_ends: [PointRef; 3],
    pub spike_lengths: [f64; 3],
}

impl SpikyTriangle {
    /// Whether the core is a single point or a segment, so the triangle is a tripod.
    pub fn is_degenerate(&self, x: &TriangleComplex) -> bool {
        let [a, b, c] = &self.spike_ends;
        x.same_point(a, b, EPS_GEO) || x.same_point(b, c, EPS_GEO) || x.same_point(a, c, EPS_GEO)
    }

    /// Length of the common prefix of the two sides leaving corner `k`.
    fn prefix(x: &TriangleComplex, out: &Geodesic, back: &Geodesic) -> f64 {
        match geodesic_intersection(x, out, back) {
            Intersection::Segment { on_first, .. } if on_first[0] <= EPS_GEO => on_first[1],
            _ => 0.0,
        }
    }
}

/// Split the triangle with the given corners into spikes and core.
pub fn spiky_decomposition(x: &TriangleComplex, corners: [PointRef; 3]) -> Result<SpikyTriangle> {
    let sides = [
        geodesic(x, &corners[0], &corners[1])?,
        geodesic(x, &corners[1], &corners[2])?,
        geodesic(x, &corners[2], &corners[0])?,
    ];
    spiky_from_sides(x, corners, sides)
}

pub fn spiky_from_sides(x: &TriangleComplex, corners: [PointRef; 3], sides: [Geodesic; 3]) -> Result<SpikyTriangle> {
    let mut spike_ends = corners;
    let mut spike_lengths = [0.0; 3];
    for k in 0..3 {
        let out = &sides[k];
        let back = sides[(k + 2) % 3].reversed();
        let l = SpikyTriangle::prefix(x, out, &back);
        spike_lengths[k] = l;
        spike_ends[k] = if l > 0.0 { out.point_at(x, l) } else { corners[k] };
    }
    Ok(SpikyTriangle { corners, sides, spike_ends, spike_lengths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point, tripod_interval, GraphPoint};

    #[test]
    fn crossing_diagonals_meet_once() {
        let g = flat_grid(4);
        let x = &g.complex;
        let a = geodesic(x, &grid_point(&g, 0.2, 0.3), &grid_point(&g, 3.7, 3.1)).unwrap();
        let b = geodesic(x, &grid_point(&g, 0.1, 3.5), &grid_point(&g, 3.9, 0.4)).unwrap();
        match geodesic_intersection(x, &a, &b) {
            Intersection::Point { on_first, point, .. } => {
                let q = a.point_at(x, on_first);
                assert!(x.same_point(&q, &point, 1e-9));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parallel_lines_miss() {
        let g = flat_grid(4);
        let x = &g.complex;
        let a = geodesic(x, &grid_point(&g, 0.2, 0.3), &grid_point(&g, 3.7, 0.3)).unwrap();
        let b = geodesic(x, &grid_point(&g, 0.2, 0.4), &grid_point(&g, 3.7, 0.4)).unwrap();
        assert!(geodesic_intersection(x, &a, &b).is_empty());
    }

    #[test]
    fn overlapping_segments() {
        let g = flat_grid(4);
        let x = &g.complex;
        let a = geodesic(x, &grid_point(&g, 0.0, 0.0), &grid_point(&g, 3.0, 3.0)).unwrap();
        let b = geodesic(x, &grid_point(&g, 1.0, 1.0), &grid_point(&g, 4.0, 4.0)).unwrap();
        match geodesic_intersection(x, &a, &b) {
            Intersection::Segment { on_first, on_second, .. } => {
                let r2 = 2f64.sqrt();
                assert!((on_first[0] - r2).abs() < 1e-9 && (on_first[1] - 3.0 * r2).abs() < 1e-9);
                assert!(on_second[0].abs() < 1e-9 && (on_second[1] - 2.0 * r2).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tripod_spike() {
        let ti = tripod_interval();
        let x = &ti.complex;
        let p = ti.point(GraphPoint { edge: 0, s: 1.0 }, GraphPoint { edge: 0, s: 1.0 });
        let q = ti.point(GraphPoint { edge: 1, s: 1.0 }, GraphPoint { edge: 0, s: 0.0 });
        let r = ti.point(GraphPoint { edge: 2, s: 1.0 }, GraphPoint { edge: 0, s: 0.0 });
        let sp = spiky_decomposition(x, [p, q, r]).unwrap();
        let want = ti.point(GraphPoint { edge: 0, s: 0.0 }, GraphPoint { edge: 0, s: 0.5 });
        assert!(x.same_point(&sp.spike_ends[0], &want, 1e-9), "{:?}", sp.spike_ends[0]);
        assert!((sp.spike_lengths[0] - 1.25f64.sqrt()).abs() < 1e-9);
        assert_eq!(sp.spike_lengths[1], 0.0);
        assert_eq!(sp.spike_lengths[2], 0.0);
    }
}
