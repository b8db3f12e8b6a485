//! Geodesics between points of a CAT(0) triangle complex.
//!
//! A Steiner-graph shortest path gives the initial route. The route is kept
//! as a chain of legs joined at vertices; each leg is a strip of triangles
//! (or a run along a free edge) and is straightened by the funnel algorithm.
//! At every joining vertex the incoming and outgoing directions must be at
//! link distance at least π; otherwise the two legs are merged through the
//! triangles of the short side of the link and straightened again. In a
//! CAT(0) space a local geodesic is the geodesic, so the final link check is
//! a certificate.

pub mod funnel;
pub mod intersect;
pub mod steiner;

use std::f64::consts::PI;

use crate::complex::{Cell, PiecewisePath, PointRef, TriangleComplex};
use crate::error::{Error, Result};
use crate::link::{build_link, LinkGraph, LinkPoint};
use crate::{EPS_ANG, EPS_GEO, MAX_STRAIGHTEN_PASSES};
use funnel::{funnel, path_pieces, simplify_strip, Unfolded};
use steiner::SourceTree;

pub use intersect::{geodesic_intersection, spiky_decomposition, spiky_from_sides, Intersection, SpikyTriangle};

/// A geodesic with its local-geodesic certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub path: PiecewisePath,
    pub length: f64,
    /// Largest amount by which a breakpoint falls short of link distance π (0 when none).
    pub worst_violation: f64,
}

impl Geodesic {
    pub fn start(&self) -> &PointRef {
        self.path.start()
    }

    pub fn end(&self) -> &PointRef {
        self.path.end()
    }

    pub fn reversed(&self) -> Self {
        Geodesic { path: self.path.reversed(), length: self.length, worst_violation: self.worst_violation }
    }

    /// Initial direction of the geodesic in the link of its start point.
    pub fn start_direction(&self, x: &TriangleComplex, link: &LinkGraph) -> Option<LinkPoint> {
        let pts = &self.path.points;
        if self.path.cells.is_empty() {
            return None;
        }
        let first = x.dist_in_cell(self.path.cells[0], &pts[0], &pts[1]).unwrap_or(0.0);
        if first < EPS_GEO && pts.len() > 2 {
            if let Some(c) = x.common_cell(&pts[0], &pts[2]) {
                if let Some(d) = link.direction(x, &pts[2], c) {
                    return Some(d);
                }
            }
        }
        link.direction(x, &pts[1], self.path.cells[0])
    }

    pub fn point_at(&self, x: &TriangleComplex, s: f64) -> PointRef {
        self.path.point_at_length(x, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCheck {
    pub ok: bool,
    pub worst_violation: f64,
    pub at: Option<usize>,
}

/// Link distance between the incoming and outgoing directions at breakpoint `i`.
pub fn turning_distance(x: &TriangleComplex, path: &PiecewisePath, i: usize) -> f64 {
    let p = &path.points[i];
    let link = build_link(x, p);
    let din = link.direction(x, &path.points[i - 1], path.cells[i - 1]);
    let dout = link.direction(x, &path.points[i + 1], path.cells[i]);
    match (din, dout) {
        (Some(a), Some(b)) => link.distance(a, b),
        _ => PI,
    }
}

/// Whether every interior breakpoint has link distance at least π − ε between its two sides.
pub fn is_local_geodesic(x: &TriangleComplex, path: &PiecewisePath) -> LocalCheck {
    let mut worst = 0.0f64;
    let mut at = None;
    for i in 1..path.points.len().saturating_sub(1) {
        let v = PI - turning_distance(x, path, i);
        if v > worst {
            worst = v;
            at = Some(i);
        }
    }
    LocalCheck { ok: worst < EPS_ANG, worst_violation: worst, at }
}

#[derive(Debug, Clone)]
enum LegKind {
    Strip(Vec<usize>),
    Along(usize),
}

#[derive(Debug, Clone)]
struct Leg {
    kind: LegKind,
    pts: Vec<PointRef>,
    cells: Vec<Cell>,
    /// Strip triangle of each piece (strip legs only).
    piece_tris: Vec<usize>,
    fresh: bool,
}

impl Leg {
    fn new(kind: LegKind) -> Self {
        Leg { kind, pts: Vec::new(), cells: Vec::new(), piece_tris: Vec::new(), fresh: false }
    }
}

/// Turn a seed point sequence into vertex-joined legs.
fn seed_route(x: &TriangleComplex, pts: &[PointRef]) -> Result<(Vec<PointRef>, Vec<Leg>)> {
    let mut way = vec![pts[0]];
    let mut legs = Vec::new();
    let mut strip: Vec<usize> = Vec::new();
    let n = pts.len();
    for i in 0..n - 1 {
        let (p, q) = (pts[i], pts[i + 1]);
        if x.same_point(&p, &q, 0.0) {
            continue;
        }
        let c = x
            .common_cell(&p, &q)
            .ok_or_else(|| Error::Input("seed path leaves its cells".into()))?;
        match c {
            Cell::Tri(t) => strip.push(t),
            Cell::Edge(e) if !x.edge_tris[e].is_empty() => {
                let t = match strip.last() {
                    Some(&t) if x.tris[t].sides.contains(&e) => t,
                    _ => x.edge_tris[e][0],
                };
                strip.push(t);
            }
            Cell::Edge(e) => {
                if !strip.is_empty() {
                    legs.push(Leg::new(LegKind::Strip(std::mem::take(&mut strip))));
                    way.push(p);
                }
                match legs.last() {
                    Some(Leg { kind: LegKind::Along(f), .. }) if *f == e && !matches!(p, PointRef::Vertex(_)) => {
                        *way.last_mut().unwrap() = q;
                    }
                    _ => {
                        legs.push(Leg::new(LegKind::Along(e)));
                        way.push(q);
                    }
                }
                continue;
            }
            Cell::Vertex(_) => continue,
        }
        if matches!(q, PointRef::Vertex(_)) && i + 1 < n - 1 {
            legs.push(Leg::new(LegKind::Strip(std::mem::take(&mut strip))));
            way.push(q);
        }
    }
    if !strip.is_empty() {
        legs.push(Leg::new(LegKind::Strip(strip)));
        way.push(pts[n - 1]);
    } else if way.len() == legs.len() {
        way.push(pts[n - 1]);
    }
    // drop empty strips produced by consecutive vertices on a free edge
    let mut w2 = vec![way[0]];
    let mut l2 = Vec::new();
    for (k, leg) in legs.into_iter().enumerate() {
        if let LegKind::Strip(ref s) = leg.kind {
            if s.is_empty() {
                continue;
            }
        }
        l2.push(leg);
        w2.push(way[k + 1]);
    }
    *w2.last_mut().unwrap() = pts[n - 1];
    Ok((w2, l2))
}

/// Bends closer to straight than this are rounding noise.
const NEAR_STRAIGHT: f64 = 1e-12;

fn vertex_of(p: &PointRef) -> Option<usize> {
    match p {
        PointRef::Vertex(v) => Some(*v),
        _ => None,
    }
}

/// Straighten every stale strip leg and split it at funnel bends.
fn straighten_legs(x: &TriangleComplex, way: &mut Vec<PointRef>, legs: &mut Vec<Leg>) -> Result<()> {
    let mut nw = vec![way[0]];
    let mut nl = Vec::with_capacity(legs.len());
    for (k, leg) in legs.drain(..).enumerate() {
        let (a, b) = (way[k], way[k + 1]);
        if leg.fresh {
            nl.push(leg);
            nw.push(b);
            continue;
        }
        match leg.kind {
            LegKind::Along(e) => {
                let mut l = Leg::new(LegKind::Along(e));
                l.pts = vec![a, b];
                l.cells = vec![Cell::Edge(e)];
                l.fresh = true;
                nl.push(l);
                nw.push(b);
            }
            LegKind::Strip(tris) => {
                let mut tris = simplify_strip(&tris);
                // an end lying on the first or last portal needs no triangle before it
                while tris.len() > 1 && x.contains(Cell::Tri(tris[1]), &a) {
                    tris.remove(0);
                }
                while tris.len() > 1 && x.contains(Cell::Tri(tris[tris.len() - 2]), &b) {
                    tris.pop();
                }
                let u = Unfolded::new(x, &tris).ok_or_else(|| Error::Input("strip is not connected".into()))?;
                let pa = u.place(x, 0, &a).ok_or(Error::PointNotInCell(Cell::Tri(tris[0])))?;
                let pb = u
                    .place(x, tris.len() - 1, &b)
                    .ok_or(Error::PointNotInCell(Cell::Tri(*tris.last().unwrap())))?;
                let apexes: Vec<_> = funnel(x, &u, pa, vertex_of(&a), pb, vertex_of(&b))
                    .into_iter()
                    .filter(|ap| Some(ap.vertex) != vertex_of(&a) && Some(ap.vertex) != vertex_of(&b))
                    .collect();
                let (pts, cells) = path_pieces(x, &u, a, b, &apexes);
                // strip index of each piece
                let mut piece_idx = Vec::with_capacity(cells.len());
                let mut k0 = 0usize;
                for (i, c) in cells.iter().enumerate() {
                    let t_of = |k: usize| x.is_face(*c, Cell::Tri(tris[k]));
                    let mut k = k0;
                    while k < tris.len() && !(t_of(k) && x.contains(Cell::Tri(tris[k]), &pts[i + 1])) {
                        k += 1;
                    }
                    if k == tris.len() {
                        k = (k0..tris.len()).find(|&k| t_of(k)).unwrap_or(k0);
                    }
                    piece_idx.push(k);
                    k0 = k;
                }
                // split at apex vertices
                let mut start_pt = 0usize;
                let mut start_tri = 0usize;
                let mut ap_iter = apexes.iter().peekable();
                for i in 1..pts.len() {
                    let split = i + 1 < pts.len()
                        && ap_iter.peek().is_some_and(|ap| pts[i] == PointRef::Vertex(ap.vertex));
                    if split || i + 1 == pts.len() {
                        let end_tri = piece_idx[i - 1];
                        let mut l = Leg::new(LegKind::Strip(tris[start_tri..=end_tri.max(start_tri)].to_vec()));
                        l.pts = pts[start_pt..=i].to_vec();
                        l.cells = cells[start_pt..i].to_vec();
                        l.piece_tris = piece_idx[start_pt..i].iter().map(|&k| tris[k]).collect();
                        l.fresh = true;
                        nl.push(l);
                        nw.push(pts[i]);
                        if split {
                            ap_iter.next();
                            start_pt = i;
                            start_tri = piece_idx[i];
                        }
                    }
                }
                if pts.len() == 1 {
                    let mut l = Leg::new(LegKind::Strip(tris));
                    l.pts = vec![a, b];
                    l.cells = vec![x.common_cell(&a, &b).unwrap_or(Cell::Tri(u.tris[0]))];
                    l.piece_tris = vec![u.tris[0]];
                    l.fresh = true;
                    nl.push(l);
                    nw.push(b);
                }
            }
        }
    }
    *way = nw;
    *legs = nl;
    Ok(())
}

fn assemble(x: &TriangleComplex, legs: &[Leg]) -> Result<PiecewisePath> {
    let mut pts = vec![legs[0].pts[0]];
    let mut cells = Vec::new();
    for l in legs {
        pts.extend_from_slice(&l.pts[1..]);
        cells.extend_from_slice(&l.cells);
    }
    PiecewisePath::new(x, pts, cells)
}

/// Straighten a seed route into the geodesic.
fn straighten(x: &TriangleComplex, seed: &[PointRef]) -> Result<Geodesic> {
    let (mut way, mut legs) = seed_route(x, seed)?;
    if legs.is_empty() {
        return Ok(Geodesic { path: PiecewisePath::single(seed[0]), length: 0.0, worst_violation: 0.0 });
    }
    let mut passes = 0;
    let mut settled = Vec::new();
    loop {
        passes += 1;
        straighten_legs(x, &mut way, &mut legs)?;
        // find the worst joining vertex
        let mut worst: Option<(f64, usize, LinkGraph, LinkPoint, LinkPoint)> = None;
        for k in 1..legs.len() {
            let (li, lo) = (&legs[k - 1], &legs[k]);
            if !matches!(li.kind, LegKind::Strip(_)) || !matches!(lo.kind, LegKind::Strip(_)) {
                continue;
            }
            let v = way[k];
            let link = build_link(x, &v);
            let din = link.direction(x, &li.pts[li.pts.len() - 2], *li.cells.last().unwrap());
            let dout = link.direction(x, &lo.pts[1], lo.cells[0]);
            let (Some(a), Some(b)) = (din, dout) else { continue };
            let d = link.distance(a, b);
            // small violations are worth one merge each; after that the bend is taken as rounding
            let bent = d < PI - EPS_ANG || (d < PI - NEAR_STRAIGHT && !settled.contains(&vertex_of(&v)));
            if bent && worst.as_ref().is_none_or(|w| d < w.0) {
                worst = Some((d, k, link, a, b));
            }
        }
        let Some((d, k, link, a, b)) = worst else {
            let path = assemble(x, &legs)?;
            let check = is_local_geodesic(x, &path);
            return Ok(Geodesic { length: path.length, path, worst_violation: check.worst_violation });
        };
        if passes >= MAX_STRAIGHTEN_PASSES {
            let path = assemble(x, &legs)?;
            return Err(Error::NotConverged { iterations: passes, length: path.length });
        }
        if d >= PI - EPS_ANG {
            settled.push(vertex_of(&way[k]));
        }
        let lp = link.geodesic(a, b)?;
        let li = &legs[k - 1];
        let lo = &legs[k];
        let (LegKind::Strip(si), LegKind::Strip(so)) = (&li.kind, &lo.kind) else { unreachable!() };
        let last_in = *li.piece_tris.last().unwrap();
        let first_out = lo.piece_tris[0];
        let cut_in = si.iter().rposition(|&t| t == last_in).unwrap_or(si.len() - 1);
        let cut_out = so.iter().position(|&t| t == first_out).unwrap_or(0);
        let mut merged: Vec<usize> = si[..=cut_in].to_vec();
        merged.extend(lp.segs.iter().map(|s| link.arcs[s.arc].tri));
        merged.extend_from_slice(&so[cut_out..]);
        let merged = simplify_strip(&merged);
        let mut leg = Leg::new(LegKind::Strip(merged));
        leg.fresh = false;
        legs.splice(k - 1..=k, [leg]);
        way.remove(k);
    }
}

/// The geodesic between two points.
pub fn geodesic(x: &TriangleComplex, a: &PointRef, b: &PointRef) -> Result<Geodesic> {
    let a = x.canonicalize(a)?;
    let b = x.canonicalize(b)?;
    if let Some(g) = trivial(x, &a, &b) {
        return Ok(g);
    }
    let tree = SourceTree::new(x, a);
    geodesic_with_tree(x, &tree, &b)
}

/// Geodesic from the source of a precomputed tree.
pub fn geodesic_with_tree(x: &TriangleComplex, tree: &SourceTree, b: &PointRef) -> Result<Geodesic> {
    let a = tree.source;
    let b = x.canonicalize(b)?;
    if let Some(g) = trivial(x, &a, &b) {
        return Ok(g);
    }
    let seed = tree
        .seed_path(x, &b)
        .ok_or_else(|| Error::Input("points lie in different components".into()))?;
    straighten(x, &seed)
}

fn trivial(x: &TriangleComplex, a: &PointRef, b: &PointRef) -> Option<Geodesic> {
    if x.same_point(a, b, 0.0) {
        return Some(Geodesic { path: PiecewisePath::single(*a), length: 0.0, worst_violation: 0.0 });
    }
    let c = x.common_cell(a, b)?;
    let path = PiecewisePath::new(x, vec![*a, *b], vec![c]).ok()?;
    Some(Geodesic { length: path.length, path, worst_violation: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point, tripod_interval, GraphPoint};

    #[test]
    fn flat_distance() {
        let g = flat_grid(10);
        let a = grid_point(&g, 0.0, 0.0);
        let b = grid_point(&g, 3.0, 4.0);
        let geo = geodesic(&g.complex, &a, &b).unwrap();
        assert!((geo.length - 5.0).abs() < 1e-9, "{}", geo.length);
        assert!(is_local_geodesic(&g.complex, &geo.path).ok);
    }

    #[test]
    fn flat_generic() {
        let g = flat_grid(10);
        let a = grid_point(&g, 0.31, 7.2);
        let b = grid_point(&g, 9.7, 1.13);
        let geo = geodesic(&g.complex, &a, &b).unwrap();
        let want = (9.7f64 - 0.31).hypot(7.2 - 1.13);
        assert!((geo.length - want).abs() < 1e-9, "{} vs {want}", geo.length);
    }

    #[test]
    fn tripod_interval_root5() {
        let ti = tripod_interval();
        let p = ti.point(GraphPoint { edge: 0, s: 1.0 }, GraphPoint { edge: 0, s: 1.0 });
        let q = ti.point(GraphPoint { edge: 1, s: 1.0 }, GraphPoint { edge: 0, s: 0.0 });
        let geo = geodesic(&ti.complex, &p, &q).unwrap();
        assert!((geo.length - 5f64.sqrt()).abs() < 1e-9, "{}", geo.length);
        assert!(is_local_geodesic(&ti.complex, &geo.path).ok);
    }

    #[test]
    fn identical_points() {
        let g = flat_grid(2);
        let a = grid_point(&g, 0.5, 0.7);
        let geo = geodesic(&g.complex, &a, &a).unwrap();
        assert_eq!(geo.length, 0.0);
        assert_eq!(geo.path.points.len(), 1);
    }

    #[test]
    fn bent_path_is_flagged() {
        let g = flat_grid(2);
        let x = &g.complex;
        // from (0.5, 0.2) to the edge point (1, 0.5) and on, bent by 0.1 rad
        let a = grid_point(&g, 0.5, 0.5 - 0.5 * 0.3f64.tan());
        let m = grid_point(&g, 1.0, 0.5);
        let ang = 0.3f64 + 0.1;
        let b = grid_point(&g, 1.5, 0.5 + 0.5 * ang.tan());
        let c1 = x.common_cell(&a, &m).unwrap();
        let c2 = x.common_cell(&m, &b).unwrap();
        let path = PiecewisePath::new(x, vec![a, m, b], vec![c1, c2]).unwrap();
        let chk = is_local_geodesic(x, &path);
        assert!(!chk.ok);
        assert!((chk.worst_violation - 0.1).abs() < 1e-9, "{}", chk.worst_violation);
        let straight = PiecewisePath::new(x, vec![a, m], vec![c1]).unwrap();
        assert!(is_local_geodesic(x, &straight).ok);
    }

    #[test]
    fn flat_vertex_straight_through() {
        let g = flat_grid(2);
        let x = &g.complex;
        let a = grid_point(&g, 0.5, 0.5);
        let v = grid_point(&g, 1.0, 1.0);
        let b = grid_point(&g, 1.5, 1.5);
        let path = PiecewisePath::new(
            x,
            vec![a, v, b],
            vec![x.common_cell(&a, &v).unwrap(), x.common_cell(&v, &b).unwrap()],
        )
        .unwrap();
        assert!(is_local_geodesic(x, &path).ok);
    }
}
