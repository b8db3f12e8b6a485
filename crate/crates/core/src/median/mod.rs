//! Two-medians of four points.
//!
//! The full triangles `W_j`, each spanned by the three points other than
//! `x_j`, meet in a single point unless two opposite sides of the
//! quadrilateral overlap in a segment, in which case that overlap is the
//! answer. In the point case the common point is a corner of one of the
//! image boundaries or a crossing of two of them: anywhere else some image
//! would cover a half-disc around it and the intersection would not be
//! discrete. So the solver enumerates corners and crossings of the four
//! exact disc images and keeps those lying in all four.

pub mod audit;
pub mod search;
pub mod sperner;

use std::collections::HashMap;

use serde::Serialize;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::disc::{full_triangle_disc, DiscImage, FullTriangleDisc};
use crate::error::{Error, Result};
use crate::full_triangle::{classify_quadruple, FullTriangleQuery, GeodesicTable, OPPOSITE_PAIRS};
use crate::geodesic::{geodesic, Intersection};
use crate::geom::{project_param, segment_intersection, SegHit, P2};
use crate::disc::UnionFind;

/// Slack for testing candidates against the disc images.
pub const MEMBERSHIP_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Point { point: PointRef },
    Segment {
        ends: [PointRef; 2],
        length: f64,
        /// The opposite pairs whose geodesics overlap.
        split: [(usize, usize); 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lanky,
    BoundaryCandidates,
    Subdivision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub method: Method,
    /// Candidates lying in all four images.
    pub candidates: usize,
    /// One representative per candidate cluster.
    pub clusters: Vec<PointRef>,
    /// Largest distance between two candidates of the returned cluster.
    pub cluster_diameter: f64,
    /// Halvings performed by the subdivision search (0 when it did not run).
    pub refinement_depth: usize,
    /// Lanky case: all nonempty opposite intersections coincide.
    pub opposite_agree: bool,
    /// Point case: the link-based membership test of each `W_j` accepts the point.
    pub oracles_accept: [bool; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Median2Result {
    pub location: Location,
    pub diagnostics: Diagnostics,
}

impl Median2Result {
    pub fn point(&self) -> Option<PointRef> {
        match self.location {
            Location::Point { point } => Some(point),
            Location::Segment { .. } => None,
        }
    }
}

/// Indices of the corners of `W_j`.
pub fn omitting(j: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for i in (0..4).filter(|&i| i != j) {
        out[k] = i;
        k += 1;
    }
    out
}

/// The four full triangles of a quadruple as embedded discs.
#[derive(Debug, Clone)]
pub struct FourTriangles {
    pub points: [PointRef; 4],
    /// `discs[j]` spans the points other than `j`, in increasing order.
    pub discs: Vec<FullTriangleDisc>,
    pub images: Vec<DiscImage>,
}

impl FourTriangles {
    pub fn new(x: &TriangleComplex, points: [PointRef; 4]) -> Result<Self> {
        let mut discs = Vec::with_capacity(4);
        for j in 0..4 {
            let [a, b, c] = omitting(j).map(|i| points[i]);
            discs.push(full_triangle_disc(x, &a, &b, &c)?);
        }
        let images = discs.iter().map(|d| d.image(x)).collect();
        Ok(FourTriangles { points, discs, images })
    }

    pub fn contains_all(&self, x: &TriangleComplex, p: &PointRef, eps: f64) -> bool {
        self.images.iter().all(|w| w.contains(x, p, eps))
    }

    /// Corners of the image boundaries and crossings between boundaries of different images.
    pub fn boundary_candidates(&self, x: &TriangleComplex) -> Vec<PointRef> {
        let mut out = Vec::new();
        let mut by_tri: HashMap<usize, Vec<(usize, P2, P2)>> = HashMap::new();
        for (j, img) in self.images.iter().enumerate() {
            for (cell, a, b) in img.boundary_segments() {
                out.push(*a);
                out.push(*b);
                for c in x.star(*cell) {
                    if let Cell::Tri(t) = c {
                        if let (Some(p), Some(q)) = (x.tri_pos(t, a), x.tri_pos(t, b)) {
                            by_tri.entry(t).or_default().push((j, p, q));
                        }
                    }
                }
            }
        }
        let mut tris: Vec<_> = by_tri.into_iter().collect();
        tris.sort_by_key(|e| e.0);
        for (t, segs) in tris {
            for i in 0..segs.len() {
                for k in i + 1..segs.len() {
                    let ((ji, p, q), (jk, r, s)) = (segs[i], segs[k]);
                    if ji == jk {
                        continue;
                    }
                    match segment_intersection(p, q, r, s, 1e-12) {
                        SegHit::None => {}
                        SegHit::Point(u, _) => out.push(x.point_at(t, p.lerp(q, u))),
                        SegHit::Overlap([u0, u1], _) => {
                            out.push(x.point_at(t, p.lerp(q, u0)));
                            out.push(x.point_at(t, p.lerp(q, u1)));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Distance between two points: straight when they share a cell, else along the geodesic.
pub fn point_dist(x: &TriangleComplex, a: &PointRef, b: &PointRef) -> f64 {
    x.local_dist(a, b)
        .unwrap_or_else(|| geodesic(x, a, b).map(|g| g.length).unwrap_or(f64::INFINITY))
}

/// Group points closer than `sep` (single linkage), largest groups first.
pub fn cluster(x: &TriangleComplex, pts: &[PointRef], sep: f64) -> Vec<Vec<PointRef>> {
    let mut uf = UnionFind::new(pts.len());
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            // cheap rejection before the geodesic fallback
            if let Some(d) = x.local_dist(&pts[i], &pts[j]) {
                if d < sep {
                    uf.union(i, j);
                }
            } else if uf.find(i) != uf.find(j) && point_dist(x, &pts[i], &pts[j]) < sep {
                uf.union(i, j);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<PointRef>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(*p);
    }
    let mut out: Vec<(usize, Vec<PointRef>)> = groups.into_iter().collect();
    out.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    out.into_iter().map(|g| g.1).collect()
}

/// Largest distance between two of the points.
pub fn spread(x: &TriangleComplex, pts: &[PointRef]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(point_dist(x, &pts[i], &pts[j]));
        }
    }
    d
}

/// The member minimizing the largest distance to the others.
fn centre(x: &TriangleComplex, pts: &[PointRef]) -> PointRef {
    let mut best = (f64::INFINITY, pts[0]);
    for p in pts {
        let r = pts.iter().map(|q| point_dist(x, p, q)).fold(0.0, f64::max);
        if r < best.0 {
            best = (r, *p);
        }
    }
    best.1
}

fn same_intersection(x: &TriangleComplex, a: &Intersection, b: &Intersection, eps: f64) -> bool {
    let (pa, pb) = (a.points(), b.points());
    let close = |p: &PointRef, q: &PointRef| point_dist(x, p, q) <= eps;
    pa.iter().all(|p| pb.iter().any(|q| close(p, q))) && pb.iter().all(|q| pa.iter().any(|p| close(p, q)))
}

/// Vertices, then closest edge points, of the carrier of `p` within `r` of it.
fn snap_targets(x: &TriangleComplex, p: &PointRef, r: f64) -> Vec<PointRef> {
    let mut out = Vec::new();
    match *p {
        PointRef::Vertex(_) => {}
        PointRef::Edge { edge, .. } => out.extend(x.edges[edge].v.map(PointRef::Vertex)),
        PointRef::Tri { tri, .. } => {
            out.extend(x.tris[tri].verts.map(PointRef::Vertex));
            if let Some(q) = x.tri_pos(tri, p) {
                let l = x.tris[tri].layout;
                for k in 0..3 {
                    let (a, b) = (l[k], l[(k + 1) % 3]);
                    let e = x.point_at(tri, a.lerp(b, project_param(a, b, q)));
                    out.push(x.canonicalize(&e).unwrap_or(e));
                }
            }
        }
    }
    out.retain(|c| point_dist(x, p, c) <= r);
    out
}

/// The 2-median of four points: a point, or a segment for a lanky quadruple.
pub fn median2(x: &TriangleComplex, points: &[PointRef; 4], tol: f64) -> Result<Median2Result> {
    let mut pts = *points;
    for p in pts.iter_mut() {
        *p = x.canonicalize(p)?;
    }
    let table = GeodesicTable::new(x, &pts)?;
    let class = classify_quadruple(x, &table)?;
    if let Some(k) = class.lanky {
        let Intersection::Segment { on_first, ends, .. } = &class.opposite[k] else {
            unreachable!("lanky split without a segment")
        };
        let eps = 1e-8 * (1.0 + on_first[1]);
        let opposite_agree = class
            .opposite
            .iter()
            .filter(|i| !i.is_empty())
            .all(|i| same_intersection(x, i, &class.opposite[k], eps));
        return Ok(Median2Result {
            location: Location::Segment { ends: *ends, length: on_first[1] - on_first[0], split: OPPOSITE_PAIRS[k] },
            diagnostics: Diagnostics {
                method: Method::Lanky,
                candidates: 0,
                clusters: vec![],
                cluster_diameter: 0.0,
                refinement_depth: 0,
                opposite_agree,
                oracles_accept: [true; 4],
            },
        });
    }

    let four = FourTriangles::new(x, pts)?;
    let mut method = Method::BoundaryCandidates;
    let mut depth = 0;
    let mut found: Vec<PointRef> = four
        .boundary_candidates(x)
        .into_iter()
        .filter(|p| four.contains_all(x, p, MEMBERSHIP_EPS))
        .collect();
    if found.is_empty() {
        let s = search::subdivision_search(x, &four, 3, tol)?;
        method = Method::Subdivision;
        depth = s.depth;
        found = s.points;
    }
    let groups = cluster(x, &found, 8.0 * tol);
    let clusters: Vec<PointRef> = groups.iter().map(|g| centre(x, g)).collect();
    match groups.len() {
        0 => return Err(Error::EmptySeed),
        1 => {}
        _ => return Err(Error::MultipleCandidates(clusters)),
    }
    let mut point = clusters[0];
    if method == Method::Subdivision {
        // the search stops short of vertices and edges where sheets branch
        let near = snap_targets(x, &point, 8.0 * tol);
        if let Some(s) = near.into_iter().find(|c| four.contains_all(x, c, MEMBERSHIP_EPS)) {
            point = s;
        }
    }
    let mut oracles_accept = [false; 4];
    for (j, ok) in oracles_accept.iter_mut().enumerate() {
        let q = FullTriangleQuery::new(x, omitting(j).map(|i| pts[i]))?;
        *ok = q.contains(&point)?;
    }
    Ok(Median2Result {
        location: Location::Point { point },
        diagnostics: Diagnostics {
            method,
            candidates: found.len(),
            cluster_diameter: spread(x, &groups[0]),
            clusters,
            refinement_depth: depth,
            opposite_agree: true,
            oracles_accept,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point, tripod_interval, GraphPoint};

    #[test]
    fn square_corners_meet_in_the_centre() {
        let g = flat_grid(3);
        let x = &g.complex;
        let pts = [(0.5, 0.5), (2.5, 0.5), (2.5, 2.5), (0.5, 2.5)].map(|(a, b)| grid_point(&g, a, b));
        let r = median2(x, &pts, 1e-6).unwrap();
        let p = r.point().unwrap();
        assert!(point_dist(x, &p, &grid_point(&g, 1.5, 1.5)) < 1e-9, "{r:?}");
        assert_eq!(r.diagnostics.oracles_accept, [true; 4]);
        assert_eq!(r.diagnostics.method, Method::BoundaryCandidates);
    }

    #[test]
    fn median_at_a_branch_vertex_is_snapped() {
        let pc = crate::builders::tripod_tripod();
        let x = &pc.complex;
        let pts = [
            PointRef::Tri { tri: 15, bary: [0.18117372862636916, 0.09203418908069483, 0.726792082292936] },
            PointRef::Tri { tri: 17, bary: [0.17321306130354652, 0.012447899400129692, 0.8143390392963238] },
            PointRef::Tri { tri: 7, bary: [0.35931409310976126, 0.2630418586811619, 0.3776440482090768] },
            PointRef::Tri { tri: 3, bary: [0.5447167708784764, 0.29192557827207655, 0.1633576508494471] },
        ];
        let r = median2(x, &pts, 1e-6).unwrap();
        let centre = x.vertex_by_label(&crate::Label::Str("o_o".into())).unwrap();
        assert_eq!(r.point(), Some(PointRef::Vertex(centre)));
        assert_eq!(r.diagnostics.oracles_accept, [true; 4]);
    }

    #[test]
    fn collinear_points_give_the_middle_segment() {
        let g = flat_grid(4);
        let x = &g.complex;
        let pts = [(0.0, 0.0), (3.0, 0.0), (1.0, 0.0), (2.0, 0.0)].map(|(a, b)| grid_point(&g, a, b));
        let r = median2(x, &pts, 1e-6).unwrap();
        match r.location {
            Location::Segment { ends, length, .. } => {
                assert!((length - 1.0).abs() < 1e-9);
                let want = [grid_point(&g, 1.0, 0.0), grid_point(&g, 2.0, 0.0)];
                assert!(ends.iter().all(|e| want.iter().any(|w| point_dist(x, e, w) < 1e-9)));
            }
            other => panic!("{other:?}"),
        }
        assert!(r.diagnostics.opposite_agree);
    }

    #[test]
    fn subdivision_search_agrees_with_candidates() {
        let g = flat_grid(4);
        let x = &g.complex;
        let pts = [(0.3, 0.2), (3.7, 0.6), (3.1, 3.4), (0.4, 2.9)].map(|(a, b)| grid_point(&g, a, b));
        let exact = median2(x, &pts, 1e-6).unwrap().point().unwrap();
        let four = FourTriangles::new(x, pts).unwrap();
        for base in 0..4 {
            let s = search::subdivision_search(x, &four, base, 1e-6).unwrap();
            assert!(s.rainbow.iter().all(|&n| n > 0));
            for p in &s.points {
                assert!(point_dist(x, p, &exact) < 1e-5, "base {base}");
            }
        }
    }

    #[test]
    fn tripod_median_is_permutation_invariant() {
        let ti = tripod_interval();
        let x = &ti.complex;
        let p = |leg, s, y| ti.point(GraphPoint { edge: leg, s }, GraphPoint { edge: 0, s: y });
        let pts = [p(0, 0.8, 0.2), p(1, 0.7, 0.5), p(2, 0.6, 0.9), p(0, 0.3, 0.7)];
        let first = median2(x, &pts, 1e-6).unwrap().point().unwrap();
        for perm in [[1, 0, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1]] {
            let q = perm.map(|i| pts[i]);
            let r = median2(x, &q, 1e-6).unwrap();
            assert!(point_dist(x, &r.point().unwrap(), &first) < 2e-6);
            assert_eq!(r.diagnostics.oracles_accept, [true; 4], "{r:?}");
        }
    }
}
