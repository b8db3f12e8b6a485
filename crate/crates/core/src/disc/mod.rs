//! Planar diagrams mapped into a triangle complex.
//!
//! A [`Diagram`] is a finite Δ-complex given by explicit vertices, edges and
//! triangles, together with a cellular map into `X`: every vertex carries
//! its image point, every edge the closed cell containing its straight image,
//! and every triangle the triangle of `X` it is mapped into affinely. The
//! planar structure is kept combinatorially; coordinates are only computed
//! for rendering.

pub mod annulus;
pub mod cone;
pub mod fill;
pub mod fixtures;
pub mod fold;
pub mod gauss_bonnet;
pub mod refine;

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use serde::Serialize;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::geom::{angle_between, P2};

pub use annulus::{glue_annulus, GeneralizedAnnulus};
pub use fill::{
    fill_disc, full_triangle_disc, initial_filling, total_curvature, DiscImage, FilledDisc, FullTriangleDisc,
};
pub use fold::{fold, fold_step, FoldMove, FoldReport};
pub use gauss_bonnet::{gauss_bonnet, Curvature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DEdge {
    pub v: [usize; 2],
    /// Lowest closed cell of `X` containing the image segment.
    #[serde(skip)]
    pub cell: Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DTri {
    pub v: [usize; 3],
    /// `e[k]` joins `v[k]` and `v[k + 1]`.
    pub e: [usize; 3],
    /// Triangle of `X` receiving this cell.
    pub cell: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagram {
    pub verts: Vec<PointRef>,
    pub edges: Vec<DEdge>,
    pub tris: Vec<DTri>,
    /// Marked boundary vertices (the corners of a generalized triangle).
    pub marked: Vec<usize>,
}

impl Diagram {
    pub fn num_cells(&self) -> usize {
        self.verts.len() + self.edges.len() + self.tris.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.verts.len() as i64 - self.edges.len() as i64 + self.tris.len() as i64
    }

    pub fn add_vertex(&mut self, p: PointRef) -> usize {
        self.verts.push(p);
        self.verts.len() - 1
    }

    /// Add an edge; the image cell is the lowest cell holding both endpoint images.
    pub fn add_edge(&mut self, x: &TriangleComplex, a: usize, b: usize) -> usize {
        let cell = x
            .common_cell(&self.verts[a], &self.verts[b])
            .unwrap_or_else(|| self.verts[a].carrier());
        self.edges.push(DEdge { v: [a, b], cell });
        self.edges.len() - 1
    }

    /// Existing edge between `a` and `b` with the given image cell, or a new one.
    pub fn edge_between(&mut self, x: &TriangleComplex, a: usize, b: usize) -> usize {
        let cell = x.common_cell(&self.verts[a], &self.verts[b]);
        if let Some(i) = self
            .edges
            .iter()
            .position(|e| (e.v == [a, b] || e.v == [b, a]) && Some(e.cell) == cell)
        {
            return i;
        }
        self.add_edge(x, a, b)
    }

    /// Add a triangle over existing edges.
    pub fn add_tri(&mut self, v: [usize; 3], e: [usize; 3], cell: usize) -> usize {
        self.tris.push(DTri { v, e, cell });
        self.tris.len() - 1
    }

    /// Insert a vertex with image `p` on edge `e`, splitting the triangles on it.
    ///
    /// Edge `e` keeps its first end and now stops at the new vertex.
    pub fn split_edge(&mut self, x: &TriangleComplex, e: usize, p: PointRef) -> usize {
        let [a, b] = self.edges[e].v;
        let m = self.add_vertex(p);
        self.edges[e].v = [a, m];
        self.edges[e].cell = x.common_cell(&self.verts[a], &p).unwrap_or(self.edges[e].cell);
        let f = self.add_edge(x, m, b);
        for t in 0..self.tris.len() {
            let tri = self.tris[t];
            let Some(k) = (0..3).find(|&k| tri.e[k] == e) else { continue };
            let (p0, p1, c) = (tri.v[k], tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
            let (to_m, from_m) = if p0 == a { (e, f) } else { (f, e) };
            let mc = self.add_edge(x, m, c);
            self.tris[t] = DTri { v: [p0, m, c], e: [to_m, mc, tri.e[(k + 2) % 3]], cell: tri.cell };
            self.add_tri([m, p1, c], [from_m, tri.e[(k + 1) % 3], mc], tri.cell);
        }
        m
    }

    /// Number of triangles on each edge.
    pub fn edge_incidence(&self) -> Vec<usize> {
        let mut n = vec![0; self.edges.len()];
        for t in &self.tris {
            for &e in &t.e {
                n[e] += 1;
            }
        }
        n
    }

    /// Edges on one triangle (boundary) or none (free edges, traversed twice by the boundary).
    pub fn boundary_edges(&self) -> Vec<usize> {
        self.edge_incidence().iter().enumerate().filter(|(_, &c)| c <= 1).map(|(i, _)| i).collect()
    }

    /// Number of connected components of the boundary graph.
    pub fn boundary_components(&self) -> usize {
        let be = self.boundary_edges();
        let mut uf = UnionFind::new(self.verts.len());
        let mut used = BTreeSet::new();
        for &e in &be {
            let [a, b] = self.edges[e].v;
            uf.union(a, b);
            used.insert(a);
            used.insert(b);
        }
        used.iter().map(|&v| uf.find(v)).collect::<BTreeSet<_>>().len()
    }

    pub fn is_connected(&self) -> bool {
        if self.verts.is_empty() {
            return false;
        }
        let mut uf = UnionFind::new(self.verts.len());
        for e in &self.edges {
            uf.union(e.v[0], e.v[1]);
        }
        let r = uf.find(0);
        (0..self.verts.len()).all(|v| uf.find(v) == r)
    }

    /// Whether the diagram is a generalized disc: connected, χ = 1, every edge on at most two cells.
    pub fn is_disc(&self) -> bool {
        self.is_connected()
            && self.euler_characteristic() == 1
            && self.edge_incidence().iter().all(|&c| c <= 2)
    }

    /// Layout position of each corner of triangle `t` in its image triangle.
    pub fn corner_positions(&self, x: &TriangleComplex, t: usize) -> [P2; 3] {
        let d = &self.tris[t];
        d.v.map(|v| x.tri_pos(d.cell, &self.verts[v]).unwrap_or_default())
    }

    /// Pulled-back corner angles of triangle `t`.
    pub fn corner_angles(&self, x: &TriangleComplex, t: usize) -> [f64; 3] {
        let p = self.corner_positions(x, t);
        let mut out = [0.0; 3];
        for k in 0..3 {
            let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
            out[k] = if (b - a).norm() == 0.0 || (c - a).norm() == 0.0 {
                0.0
            } else {
                angle_between(b - a, c - a)
            };
        }
        // degenerate images: make the angles sum to π
        let s: f64 = out.iter().sum();
        if (s - PI).abs() > 1e-9 && s > 0.0 {
            for a in out.iter_mut() {
                *a *= PI / s;
            }
        }
        out
    }

    /// Components of the link of each vertex and its total angle.
    ///
    /// The link of `v` has a node per edge end at `v` and an arc per triangle corner at `v`.
    pub fn vertex_links(&self, x: &TriangleComplex) -> Vec<VertexLink> {
        let n = self.verts.len();
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            ends[e.v[0]].push(2 * i);
            ends[e.v[1]].push(2 * i + 1);
        }
        let mut arcs: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
        for (t, d) in self.tris.iter().enumerate() {
            let ang = self.corner_angles(x, t);
            for k in 0..3 {
                let v = d.v[k];
                // corner k lies between edges e[k] (to v[k+1]) and e[k+2] (from v[k+2])
                let a = end_from(&self.edges, d.e[k], v, d.v[(k + 1) % 3]);
                let b = end_from(&self.edges, d.e[(k + 2) % 3], v, d.v[(k + 2) % 3]) ^ loop_flip(&self.edges, d.e[(k + 2) % 3]);
                arcs[v].push((a, b, ang[k]));
            }
        }
        (0..n)
            .map(|v| {
                let nodes = &ends[v];
                let idx: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &e)| (e, i)).collect();
                let mut uf = UnionFind::new(nodes.len());
                let mut deg = vec![0usize; nodes.len()];
                for &(a, b, _) in &arcs[v] {
                    let (ia, ib) = (idx[&a], idx[&b]);
                    uf.union(ia, ib);
                    deg[ia] += 1;
                    deg[ib] += 1;
                }
                let comps = (0..nodes.len()).map(|i| uf.find(i)).collect::<BTreeSet<_>>().len();
                let angle = arcs[v].iter().map(|a| a.2).sum();
                let is_circle = comps == 1 && !nodes.is_empty() && deg.iter().all(|&d| d == 2);
                VertexLink { components: comps, angle, is_circle }
            })
            .collect()
    }

    /// Interior vertices have a circle as link.
    pub fn interior_vertices(&self, x: &TriangleComplex) -> Vec<bool> {
        self.vertex_links(x).iter().map(|l| l.is_circle).collect()
    }

    /// Image segment of edge `i` as two layout points in `cell` (a triangle holding it).
    pub fn edge_image(&self, x: &TriangleComplex, i: usize, tri: usize) -> Option<(P2, P2)> {
        let e = &self.edges[i];
        Some((x.tri_pos(tri, &self.verts[e.v[0]])?, x.tri_pos(tri, &self.verts[e.v[1]])?))
    }

    /// Drop edges flagged dead (first end `usize::MAX`) and vertices no longer used, then renumber; returns the old-to-new vertex map.
    pub fn compact(&mut self) -> Vec<usize> {
        let used_e: Vec<bool> = self.edges.iter().map(|e| e.v[0] != usize::MAX).collect();
        let mut emap = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if used_e[i] {
                emap[i] = edges.len();
                edges.push(*e);
            }
        }
        let mut used_v = vec![false; self.verts.len()];
        for e in &edges {
            used_v[e.v[0]] = true;
            used_v[e.v[1]] = true;
        }
        for &m in &self.marked {
            used_v[m] = true;
        }
        let mut vmap = vec![usize::MAX; self.verts.len()];
        let mut verts = Vec::new();
        for (i, p) in self.verts.iter().enumerate() {
            if used_v[i] {
                vmap[i] = verts.len();
                verts.push(*p);
            }
        }
        for e in edges.iter_mut() {
            e.v = e.v.map(|v| vmap[v]);
        }
        for t in self.tris.iter_mut() {
            t.v = t.v.map(|v| vmap[v]);
            t.e = t.e.map(|e| emap[e]);
        }
        self.marked = self.marked.iter().map(|&m| vmap[m]).collect();
        self.verts = verts;
        self.edges = edges;
        vmap
    }
}

/// For a loop edge the corner closing a triangle uses the opposite end.
fn loop_flip(edges: &[DEdge], e: usize) -> usize {
    usize::from(edges[e].v[0] == edges[e].v[1])
}

/// End (as `2·edge + side`) of edge `e`, running from `from` to `to`, that sits at `from`.
fn end_from(edges: &[DEdge], e: usize, from: usize, to: usize) -> usize {
    let d = &edges[e];
    if d.v == [from, to] || d.v[0] == from && d.v[1] != from {
        2 * e
    } else {
        2 * e + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexLink {
    pub components: usize,
    pub angle: f64,
    pub is_circle: bool,
}

/// Disjoint-set forest with path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Merge the classes of `a` and `b`; the smaller root survives.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}
