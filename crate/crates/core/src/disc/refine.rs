//! Assemble a diagram from image pieces: convex polygons inside triangles of
//! `X` and straight segments. Vertices are shared by image point, so pieces
//! meeting along a common boundary are glued; vertices lying on another
//! piece's edge are inserted there before triangulating.

use std::collections::HashMap;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::geom::{
    centroid, clip_halfplane, dist_point_segment, in_convex, orient, polygon_area, polygon_width, project_param, P2,
};

use super::Diagram;

/// Points closer than this are the same diagram vertex.
pub const SNAP: f64 = 1e-9;
/// Polygons of smaller area are dropped.
const MIN_AREA: f64 = 1e-18;

pub struct Builder<'a> {
    x: &'a TriangleComplex,
    pub diagram: Diagram,
    by_carrier: HashMap<Cell, Vec<usize>>,
    edge_index: HashMap<(usize, usize), Vec<usize>>,
    polys: Vec<(usize, Vec<usize>)>,
    pending: HashMap<usize, Vec<(Vec<P2>, i32)>>,
    segs: Vec<[usize; 2]>,
}

impl<'a> Builder<'a> {
    pub fn new(x: &'a TriangleComplex) -> Self {
        Builder {
            x,
            diagram: Diagram::default(),
            by_carrier: HashMap::new(),
            edge_index: HashMap::new(),
            polys: Vec::new(),
            pending: HashMap::new(),
            segs: Vec::new(),
        }
    }

    fn faces(&self, c: Cell) -> Vec<Cell> {
        let x = self.x;
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
    }

    /// Diagram vertex for image point `p`, reusing any vertex within [`SNAP`].
    pub fn vertex(&mut self, p: PointRef) -> usize {
        let c = p.carrier();
        for f in self.faces(c) {
            if let Some(list) = self.by_carrier.get(&f) {
                for &v in list {
                    if self.x.same_point(&self.diagram.verts[v], &p, SNAP) {
                        return v;
                    }
                }
            }
        }
        let id = self.diagram.add_vertex(p);
        self.by_carrier.entry(c).or_default().push(id);
        id
    }

    /// Add a convex polygon given by layout positions in triangle `tri`.
    ///
    /// The vertex order gives the orientation of the sheet. When the diagram
    /// is finished, each triangle is cut along the sides of all its polygons
    /// and a face is kept when the sheets over it do not cancel.
    pub fn polygon(&mut self, tri: usize, pts: &[P2]) {
        let area = if pts.len() < 3 { 0.0 } else { polygon_area(pts) };
        if area.abs() < MIN_AREA {
            return;
        }
        let mut p: Vec<P2> = Vec::with_capacity(pts.len());
        for &q in pts {
            if p.last().is_none_or(|l: &P2| l.dist(q) > 1e-12) {
                p.push(q);
            }
        }
        while p.len() > 1 && p[0].dist(p[p.len() - 1]) <= 1e-12 {
            p.pop();
        }
        if p.len() < 3 {
            return;
        }
        if area < 0.0 {
            p.reverse();
        }
        self.pending.entry(tri).or_default().push((p, if area > 0.0 { 1 } else { -1 }));
    }

    /// Signed covering degree of each face of the arrangement of pending polygon sides.
    fn refine_pending(&mut self) {
        let mut pending: Vec<_> = std::mem::take(&mut self.pending).into_iter().collect();
        pending.sort_by_key(|p| p.0);
        for (tri, polys) in pending {
            let mut lines: Vec<(P2, P2)> = Vec::new();
            for (p, _) in &polys {
                for k in 0..p.len() {
                    let (a, b) = (p[k], p[(k + 1) % p.len()]);
                    if a.dist(b) > SNAP && !lines.iter().any(|&(c, d)| same_line(a, b, c, d)) {
                        lines.push((a, b));
                    }
                }
            }
            let mut faces = vec![hull(polys.iter().flat_map(|p| p.0.iter().copied()).collect())];
            for &(a, b) in &lines {
                let mut next = Vec::with_capacity(faces.len() + 1);
                for q in faces {
                    if crosses(&q, a, b) {
                        for half in [clip_halfplane(&q, a, b), clip_halfplane(&q, b, a)] {
                            if half.len() >= 3 && polygon_width(&half) > SNAP {
                                next.push(half);
                            }
                        }
                    } else {
                        next.push(q);
                    }
                }
                faces = next;
            }
            for f in faces {
                let c = centroid(&f);
                let degree: i32 = polys.iter().filter(|(p, _)| in_convex(p, c, 0.0)).map(|(_, s)| s).sum();
                if degree != 0 {
                    self.convex(tri, &f);
                }
            }
        }
    }

    fn convex(&mut self, tri: usize, pts: &[P2]) {
        let mut ids: Vec<usize> = Vec::with_capacity(pts.len());
        for &q in pts {
            let v = self.vertex(self.x.point_at(tri, q));
            if ids.last() != Some(&v) {
                ids.push(v);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        if ids.len() >= 3 {
            self.polys.push((tri, ids));
        }
    }

    /// Add a straight segment between two image points sharing a cell.
    pub fn segment(&mut self, a: PointRef, b: PointRef) {
        let (va, vb) = (self.vertex(a), self.vertex(b));
        if va != vb {
            self.segs.push([va, vb]);
        }
    }

    /// Mark a vertex (added if new).
    pub fn mark(&mut self, p: PointRef) -> usize {
        let v = self.vertex(p);
        self.diagram.marked.push(v);
        v
    }

    fn edge(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        let x = self.x;
        let cell = x.common_cell(&self.diagram.verts[a], &self.diagram.verts[b]);
        if let Some(list) = self.edge_index.get(&key) {
            for &e in list {
                if Some(self.diagram.edges[e].cell) == cell {
                    return e;
                }
            }
        }
        let e = self.diagram.add_edge(x, a, b);
        self.edge_index.entry(key).or_default().push(e);
        e
    }

    /// Vertices strictly inside the segment `a b`, ordered from `a`.
    fn between(&self, cell: Cell, a: usize, b: usize) -> Vec<usize> {
        let x = self.x;
        let d = &self.diagram;
        let emb = |p: &PointRef| -> Option<P2> {
            match cell {
                Cell::Tri(t) => x.tri_pos(t, p),
                Cell::Edge(e) => x.edge_param(e, p).map(|s| P2::new(s * x.edges[e].len, 0.0)),
                Cell::Vertex(_) => None,
            }
        };
        let (Some(pa), Some(pb)) = (emb(&d.verts[a]), emb(&d.verts[b])) else {
            return vec![];
        };
        let mut hits = Vec::new();
        for f in self.faces(cell) {
            let Some(list) = self.by_carrier.get(&f) else { continue };
            for &v in list {
                if v == a || v == b {
                    continue;
                }
                let Some(pv) = emb(&d.verts[v]) else { continue };
                if dist_point_segment(pa, pb, pv) <= SNAP {
                    let s = project_param(pa, pb, pv);
                    let l = pa.dist(pb);
                    if s * l > SNAP && (1.0 - s) * l > SNAP {
                        hits.push((s, v));
                    }
                }
            }
        }
        hits.sort_by(|p, q| p.0.total_cmp(&q.0));
        hits.dedup_by_key(|h| h.1);
        hits.into_iter().map(|h| h.1).collect()
    }

    /// Triangulate all pieces and return the diagram.
    pub fn finish(mut self) -> Diagram {
        self.refine_pending();
        let x = self.x;
        let polys = std::mem::take(&mut self.polys);
        for (tri, ids) in polys {
            // insert vertices sitting on the polygon's sides
            let mut ring = Vec::with_capacity(ids.len());
            for k in 0..ids.len() {
                let (a, b) = (ids[k], ids[(k + 1) % ids.len()]);
                ring.push(a);
                ring.extend(self.between(Cell::Tri(tri), a, b));
            }
            if ring.len() == 3 {
                self.add_tri(tri, [ring[0], ring[1], ring[2]]);
                continue;
            }
            let pos: Vec<P2> = ring.iter().map(|&v| x.tri_pos(tri, &self.diagram.verts[v]).unwrap()).collect();
            let c = self.vertex(x.point_at(tri, centroid(&pos)));
            if ring.contains(&c) {
                // tiny polygon: fan from its first vertex instead
                for k in 1..ring.len() - 1 {
                    self.add_tri(tri, [ring[0], ring[k], ring[k + 1]]);
                }
                continue;
            }
            for k in 0..ring.len() {
                self.add_tri(tri, [c, ring[k], ring[(k + 1) % ring.len()]]);
            }
        }
        let segs = std::mem::take(&mut self.segs);
        for [a, b] in segs {
            let Some(cell) = x.common_cell(&self.diagram.verts[a], &self.diagram.verts[b]) else { continue };
            let mut chain = vec![a];
            chain.extend(self.between(cell, a, b));
            chain.push(b);
            for w in chain.windows(2) {
                self.edge(w[0], w[1]);
            }
        }
        self.diagram
    }

    fn add_tri(&mut self, tri: usize, v: [usize; 3]) {
        if v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
            return;
        }
        let e = [self.edge(v[0], v[1]), self.edge(v[1], v[2]), self.edge(v[2], v[0])];
        self.diagram.add_tri(v, e, tri);
    }
}

/// Convex hull, counter-clockwise.
fn hull(mut pts: Vec<P2>) -> Vec<P2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut h: Vec<P2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = h.len();
        for &p in &pts {
            while h.len() >= start + 2 && orient(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
        if pass == 0 {
            pts.reverse();
        }
    }
    h
}

/// Whether segment `c d` lies on the line through `a b`, within [`SNAP`].
fn same_line(a: P2, b: P2, c: P2, d: P2) -> bool {
    let l = a.dist(b);
    (orient(a, b, c) / l).abs() <= SNAP && (orient(a, b, d) / l).abs() <= SNAP
}

/// Whether the line through `a b` separates vertices of `poly` by more than [`SNAP`].
fn crosses(poly: &[P2], a: P2, b: P2) -> bool {
    let l = a.dist(b);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for &p in poly {
        let s = orient(a, b, p) / l;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    lo < -SNAP && hi > SNAP
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::flat_grid;

    #[test]
    fn two_polygons_sharing_an_edge_glue() {
        let g = flat_grid(1);
        let x = &g.complex;
        // lower triangle has corners (0,0) (1,0) (1,1); split it along a median
        let t = (0..2)
            .find(|&t| x.tris[t].verts.contains(&g.vertex(1, 0)))
            .unwrap();
        let l = x.tris[t].layout;
        let m = l[0].lerp(l[1], 0.5);
        let mut b = Builder::new(x);
        b.polygon(t, &[l[0], m, l[2]]);
        b.polygon(t, &[m, l[1], l[2]]);
        let d = b.finish();
        assert_eq!(d.tris.len(), 2);
        assert!(d.is_disc());
        assert_eq!(d.edges.len(), 5);
    }

    #[test]
    fn t_junction_is_split() {
        let g = flat_grid(1);
        let x = &g.complex;
        let t = 0;
        let l = x.tris[t].layout;
        let m = l[0].lerp(l[1], 0.5);
        let c = l[2];
        let q = m.lerp(c, 0.5);
        let mut b = Builder::new(x);
        // a triangle whose side m-c carries the corner q of two smaller ones
        b.polygon(t, &[l[0], m, c]);
        b.polygon(t, &[m, l[1], q]);
        b.polygon(t, &[q, l[1], c]);
        let d = b.finish();
        assert!(d.is_disc(), "chi {}", d.euler_characteristic());
        assert_eq!(d.boundary_components(), 1);
    }
}
