//! Rasterized audit of how the four full triangles intersect.
//!
//! Every triangle of `X` met by one of the images is sampled on a regular
//! grid of pitch at most `h`. Membership uses the exact disc images widened
//! by `h / 2`, so a true intersection point always shows up as a small blob
//! of samples. The audit reports the blobs of the four-fold intersection,
//! and for each pair of full triangles any intersection sample with no other
//! intersection sample within `1.5 h`.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::disc::{DiscImage, UnionFind};
use crate::error::Result;
use crate::geom::P2;

use super::{spread, FourTriangles};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleCluster {
    pub size: usize,
    pub diameter: f64,
    pub representative: PointRef,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAudit {
    /// Indices of the two full triangles (each omitting one point).
    pub pair: (usize, usize),
    pub samples: usize,
    pub isolated: Vec<PointRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionAudit {
    pub h: f64,
    pub samples: usize,
    pub clusters: Vec<SampleCluster>,
    pub pairs: Vec<PairAudit>,
}

impl IntersectionAudit {
    pub fn no_isolated(&self) -> bool {
        self.pairs.iter().all(|p| p.isolated.is_empty())
    }
}

struct Sample {
    tri: usize,
    ij: (usize, usize),
    pos: P2,
    point: PointRef,
}

/// Grid samples over a set of triangles, with the neighbour structure.
pub struct Raster {
    h: f64,
    samples: Vec<Sample>,
    index: HashMap<(usize, usize, usize), usize>,
    /// Samples on the 1-skeleton, grouped by edge of `X`.
    on_edges: HashMap<usize, Vec<usize>>,
}

impl Raster {
    pub fn new(x: &TriangleComplex, tris: &BTreeSet<usize>, h: f64) -> Self {
        let mut samples = Vec::new();
        let mut index = HashMap::new();
        let mut on_edges: HashMap<usize, Vec<usize>> = HashMap::new();
        for &t in tris {
            let l = x.tris[t].layout;
            let longest = x.tris[t].lens.iter().copied().fold(0.0, f64::max);
            let n = ((longest / h).ceil() as usize).max(1);
            for i in 0..=n {
                for j in 0..=n - i {
                    let pos = l[0] + (l[1] - l[0]) * (i as f64 / n as f64) + (l[2] - l[0]) * (j as f64 / n as f64);
                    let point = x.point_at(t, pos);
                    let k = samples.len();
                    match point.carrier() {
                        Cell::Edge(e) => on_edges.entry(e).or_default().push(k),
                        Cell::Vertex(v) => {
                            for &e in &x.vertex_edges[v] {
                                on_edges.entry(e).or_default().push(k);
                            }
                        }
                        Cell::Tri(_) => {}
                    }
                    index.insert((t, i, j), k);
                    samples.push(Sample { tri: t, ij: (i, j), pos, point });
                }
            }
        }
        Raster { h, samples, index, on_edges }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn point(&self, k: usize) -> PointRef {
        self.samples[k].point
    }

    /// Membership of every sample in every image, widened by `eps`.
    pub fn membership(&self, x: &TriangleComplex, images: &[DiscImage], eps: f64) -> Vec<Vec<bool>> {
        self.samples
            .par_iter()
            .map(|s| images.iter().map(|w| w.contains(x, &s.point, eps)).collect())
            .collect()
    }

    /// Masked samples within `1.5 h` of sample `k`.
    fn neighbours(&self, x: &TriangleComplex, k: usize, mask: &[bool]) -> Vec<usize> {
        let r = 1.5 * self.h;
        let s = &self.samples[k];
        let mut out = Vec::new();
        let (i, j) = (s.ij.0 as i64, s.ij.1 as i64);
        for di in -2..=2i64 {
            for dj in -2..=2i64 {
                if (di, dj) == (0, 0) || i + di < 0 || j + dj < 0 {
                    continue;
                }
                if let Some(&m) = self.index.get(&(s.tri, (i + di) as usize, (j + dj) as usize)) {
                    if mask[m] && self.samples[m].pos.dist(s.pos) <= r {
                        out.push(m);
                    }
                }
            }
        }
        let edges: Vec<usize> = match s.point.carrier() {
            Cell::Edge(e) => vec![e],
            Cell::Vertex(v) => x.vertex_edges[v].clone(),
            Cell::Tri(_) => vec![],
        };
        for e in edges {
            for &m in &self.on_edges[&e] {
                if m != k && mask[m] && self.samples[m].tri != s.tri {
                    if x.local_dist(&s.point, &self.samples[m].point).is_some_and(|d| d <= r) {
                        out.push(m);
                    }
                }
            }
        }
        out
    }

    /// Connected components of the masked samples.
    pub fn components(&self, x: &TriangleComplex, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.samples.len());
        for k in (0..self.samples.len()).filter(|&k| mask[k]) {
            for m in self.neighbours(x, k, mask) {
                uf.union(k, m);
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for k in (0..self.samples.len()).filter(|&k| mask[k]) {
            groups.entry(uf.find(k)).or_default().push(k);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        out
    }

    /// Masked samples with no masked neighbour.
    pub fn isolated(&self, x: &TriangleComplex, mask: &[bool]) -> Vec<usize> {
        (0..self.samples.len())
            .into_par_iter()
            .filter(|&k| mask[k] && self.neighbours(x, k, mask).is_empty())
            .collect()
    }
}

/// Triangles of `X` that an image touches.
pub fn image_cells(x: &TriangleComplex, w: &DiscImage) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = w.cells().collect();
    for (cell, _, _) in w.boundary_segments() {
        for c in x.star(*cell) {
            if let Cell::Tri(t) = c {
                out.insert(t);
            }
        }
    }
    out
}

fn summarize(x: &TriangleComplex, raster: &Raster, group: &[usize]) -> SampleCluster {
    let pts: Vec<PointRef> = group.iter().map(|&k| raster.point(k)).collect();
    // the extreme samples along the group are enough for its diameter
    let diameter = if pts.len() <= 64 { spread(x, &pts) } else { spread(x, &extremes(raster, group)) };
    SampleCluster { size: pts.len(), diameter, representative: pts[pts.len() / 2] }
}

/// Samples extremal in a few directions within each triangle.
fn extremes(raster: &Raster, group: &[usize]) -> Vec<PointRef> {
    let mut best: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
    let dirs = [P2::new(1.0, 0.0), P2::new(0.0, 1.0), P2::new(1.0, 1.0), P2::new(1.0, -1.0)];
    for &k in group {
        let s = &raster.samples[k];
        for (d, dir) in dirs.iter().enumerate() {
            for (sgn, v) in [(0, s.pos.dot(*dir)), (1, -s.pos.dot(*dir))] {
                let e = best.entry((s.tri, 2 * d + sgn)).or_insert((f64::NEG_INFINITY, k));
                if v > e.0 {
                    *e = (v, k);
                }
            }
        }
    }
    let ks: BTreeSet<usize> = best.values().map(|v| v.1).collect();
    ks.into_iter().map(|k| raster.point(k)).collect()
}

/// Isolated samples in the intersection of two images, widened by `h / 2`.
pub fn audit_pair(x: &TriangleComplex, a: &DiscImage, b: &DiscImage, h: f64) -> PairAudit {
    let cells: BTreeSet<usize> = image_cells(x, a).intersection(&image_cells(x, b)).copied().collect();
    let raster = Raster::new(x, &cells, h);
    let member = raster.membership(x, &[a.clone(), b.clone()], h / 2.0);
    let mask: Vec<bool> = member.iter().map(|m| m[0] && m[1]).collect();
    let isolated = raster.isolated(x, &mask).into_iter().map(|k| raster.point(k)).collect();
    PairAudit { pair: (0, 1), samples: mask.iter().filter(|&&m| m).count(), isolated }
}

/// Rasterize the four full triangles of a quadruple at pitch `h`.
pub fn audit_intersections(x: &TriangleComplex, points: &[PointRef; 4], h: f64) -> Result<IntersectionAudit> {
    let mut pts = *points;
    for p in pts.iter_mut() {
        *p = x.canonicalize(p)?;
    }
    let four = FourTriangles::new(x, pts)?;
    let mut cells = BTreeSet::new();
    for w in &four.images {
        cells.extend(image_cells(x, w));
    }
    let raster = Raster::new(x, &cells, h);
    let member = raster.membership(x, &four.images, h / 2.0);
    let all: Vec<bool> = member.iter().map(|m| m.iter().all(|&b| b)).collect();
    let clusters = raster.components(x, &all).iter().map(|g| summarize(x, &raster, g)).collect();
    let mut pairs = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let mask: Vec<bool> = member.iter().map(|m| m[i] && m[j]).collect();
            let isolated = raster.isolated(x, &mask).into_iter().map(|k| raster.point(k)).collect();
            pairs.push(PairAudit { pair: (i, j), samples: mask.iter().filter(|&&m| m).count(), isolated });
        }
    }
    Ok(IntersectionAudit { h, samples: raster.len(), clusters, pairs })
}
