//! Sperner subdivision search for a point common to the four full triangles.
//!
//! The 2-cells of one disc `W_b` are coloured by the other three images. A
//! point on a side of the core gets the index of the image containing that
//! side, and any other point the smallest index of an image containing it.
//! The boundary then follows Sperner's rule, so some small triangle carries
//! all three colours. The vertices of a rainbow triangle lie in three
//! different images and in `W_b`, so as the triangles shrink they close in
//! on the common intersection.

use std::collections::{HashMap, HashSet};

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::disc::fill::seg_dist;
use crate::error::{Error, Result};
use crate::full_triangle::near_geodesic;
use crate::geom::{centroid, P2};

use super::{omitting, FourTriangles};

/// Slack when deciding that a sample lies on the core boundary.
const ON_BOUNDARY: f64 = 1e-10;
/// Triangles kept per level; more than this signals a degenerate input.
const MAX_ACTIVE: usize = 50_000;
const MAX_DEPTH: usize = 64;
const INITIAL_SPLIT: usize = 8;
/// Rings of neighbours kept around the rainbow triangles.
const RINGS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Barycenters of the final rainbow triangles.
    pub points: Vec<PointRef>,
    /// Number of halvings after the initial subdivision.
    pub depth: usize,
    /// Rainbow triangles at each level.
    pub rainbow: Vec<usize>,
}

/// A point quantized so that the same point reached from two cells gets one key.
type Key = (u8, usize, i64, i64);

fn key(p: &PointRef) -> Key {
    let q = |v: f64| (v * 1e12).round() as i64;
    match *p {
        PointRef::Vertex(v) => (0, v, 0, 0),
        PointRef::Edge { edge, t } => (1, edge, q(t), 0),
        PointRef::Tri { tri, bary } => (2, tri, q(bary[0]), q(bary[1])),
    }
}

struct Coloring<'a> {
    x: &'a TriangleComplex,
    four: &'a FourTriangles,
    /// Image indices in corner order of the base disc.
    order: [usize; 3],
    /// Colour of core side `k`, which runs from core corner `k` to `k + 1`.
    side_color: [usize; 3],
    core_corners: [PointRef; 3],
    sides: Vec<((Cell, PointRef, PointRef), usize)>,
    cache: HashMap<Key, usize>,
}

impl<'a> Coloring<'a> {
    fn new(x: &'a TriangleComplex, four: &'a FourTriangles, base: usize) -> Self {
        let order = omitting(base);
        // side k joins corners k and k + 1 and lies in the image omitting corner k + 2
        let side_color = [0, 1, 2].map(|k| order[(k + 2) % 3]);
        let disc = &four.discs[base];
        let d = disc.diagram();
        let inc = d.edge_incidence();
        let mut sides = Vec::new();
        for (e, edge) in d.edges.iter().enumerate() {
            if inc[e] != 1 {
                continue;
            }
            let (a, b) = (d.verts[edge.v[0]], d.verts[edge.v[1]]);
            let mid = x.lerp_in_cell(edge.cell, &a, &b, 0.5);
            if let Some(k) = (0..3).find(|&k| near_geodesic(x, &disc.spiky.sides[k], &mid)) {
                sides.push(((edge.cell, a, b), side_color[k]));
            }
        }
        Coloring {
            x,
            four,
            order,
            side_color,
            core_corners: disc.spiky.spike_ends,
            sides,
            cache: HashMap::new(),
        }
    }

    fn color(&mut self, t: usize, q: P2) -> (Key, usize) {
        let p = self.x.point_at(t, q);
        let key = key(&p);
        if let Some(&c) = self.cache.get(&key) {
            return (key, c);
        }
        let c = self.compute(&p);
        self.cache.insert(key, c);
        (key, c)
    }

    fn compute(&self, p: &PointRef) -> usize {
        let x = self.x;
        for k in 0..3 {
            if x.same_point(p, &self.core_corners[k], ON_BOUNDARY) {
                return self.side_color[k];
            }
        }
        for (seg, c) in &self.sides {
            if seg_dist(x, seg, p).is_some_and(|d| d <= ON_BOUNDARY) {
                return *c;
            }
        }
        for eps in [1e-12, 1e-9, 1e-6] {
            if let Some(&j) = self.order.iter().find(|&&j| self.four.images[j].contains(x, p, eps)) {
                return j;
            }
        }
        self.order[0]
    }
}

#[derive(Debug, Clone, Copy)]
struct Tri {
    cell: usize,
    v: [P2; 3],
}

impl Tri {
    fn diameter(&self) -> f64 {
        let v = &self.v;
        v[0].dist(v[1]).max(v[1].dist(v[2])).max(v[2].dist(v[0]))
    }

    fn split(&self) -> [Tri; 4] {
        let [a, b, c] = self.v;
        let mid = |p: P2, q: P2| (p + q) * 0.5;
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        let t = |v| Tri { cell: self.cell, v };
        [t([a, ab, ca]), t([ab, b, bc]), t([ca, bc, c]), t([ab, bc, ca])]
    }

    /// Regular `n`-fold subdivision.
    fn subdivide(&self, n: usize) -> Vec<Tri> {
        let [a, b, c] = self.v;
        let at = |i: usize, j: usize| a + (b - a) * (i as f64 / n as f64) + (c - a) * (j as f64 / n as f64);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n - i {
                out.push(Tri { cell: self.cell, v: [at(i, j), at(i + 1, j), at(i, j + 1)] });
                if i + j + 1 < n {
                    out.push(Tri { cell: self.cell, v: [at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)] });
                }
            }
        }
        out
    }
}

fn colors(col: &mut Coloring, t: &Tri) -> [(Key, usize); 3] {
    t.v.map(|q| col.color(t.cell, q))
}

fn is_rainbow(c: &[(Key, usize); 3]) -> bool {
    c[0].1 != c[1].1 && c[1].1 != c[2].1 && c[0].1 != c[2].1
}

/// Refine around rainbow triangles of the coloured disc `W_base` until they are smaller than `tol`.
///
/// A coarse rainbow triangle need not contain a finer one: the fine rainbow
/// can sit just across an edge. Each level therefore keeps the rainbow
/// triangles together with every triangle sharing a vertex with them, and
/// splits all of those.
pub fn subdivision_search(x: &TriangleComplex, four: &FourTriangles, base: usize, tol: f64) -> Result<SearchOutcome> {
    let d = four.discs[base].diagram();
    let seeds: Vec<Tri> = (0..d.tris.len()).map(|t| Tri { cell: d.tris[t].cell, v: d.corner_positions(x, t) }).collect();
    if seeds.iter().all(|s| s.diameter() == 0.0) {
        return Err(Error::EmptySeed);
    }
    let mut col = Coloring::new(x, four, base);
    // the same subdivision of every seed keeps the triangulation conforming
    let mut tris: Vec<Tri> = seeds.iter().flat_map(|s| s.subdivide(INITIAL_SPLIT)).collect();
    let mut rainbow = Vec::new();
    let mut depth = 0;
    loop {
        let cs: Vec<[(Key, usize); 3]> = tris.iter().map(|t| colors(&mut col, t)).collect();
        let hits: Vec<usize> = (0..tris.len()).filter(|&i| is_rainbow(&cs[i])).collect();
        rainbow.push(hits.len());
        if hits.is_empty() {
            return Err(Error::EmptySeed);
        }
        if hits.iter().all(|&i| tris[i].diameter() < tol) {
            let points = hits.iter().map(|&i| x.point_at(tris[i].cell, centroid(&tris[i].v))).collect();
            return Ok(SearchOutcome { points, depth, rainbow });
        }
        let mut keep = hits.clone();
        for _ in 0..RINGS {
            let near: HashSet<Key> = keep.iter().flat_map(|&i| cs[i].map(|c| c.0)).collect();
            keep = (0..tris.len()).filter(|&i| cs[i].iter().any(|c| near.contains(&c.0))).collect();
        }
        if keep.len() > MAX_ACTIVE || depth >= MAX_DEPTH {
            return Err(Error::EmptySeed);
        }
        tris = keep.iter().flat_map(|&i| tris[i].split()).collect();
        depth += 1;
    }
}
