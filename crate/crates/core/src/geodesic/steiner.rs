//! Steiner-point graph used to seed geodesic straightening.
//!
//! Every edge gets evenly spaced interior points; the points on the boundary
//! of a triangle are pairwise joined by their in-cell distances, and points
//! on free edges are chained along the edge.

use std::collections::BinaryHeap;

use crate::complex::{PointRef, TriangleComplex};

pub const STEINER_POINTS: usize = 8;

#[derive(Debug, Clone)]
pub struct SteinerGraph {
    pub points: Vec<PointRef>,
    pub adj: Vec<Vec<(usize, f64)>>,
    /// Node ids lying on each closed edge, in order from `v[0]` to `v[1]`.
    pub edge_nodes: Vec<Vec<usize>>,
}

impl SteinerGraph {
    pub fn build(x: &TriangleComplex, m: usize) -> Self {
        let mut points: Vec<PointRef> = (0..x.num_vertices()).map(PointRef::Vertex).collect();
        let mut edge_nodes = Vec::with_capacity(x.edges.len());
        for (e, edge) in x.edges.iter().enumerate() {
            let mut ids = vec![edge.v[0]];
            for k in 1..=m {
                ids.push(points.len());
                points.push(PointRef::Edge { edge: e, t: k as f64 / (m + 1) as f64 });
            }
            ids.push(edge.v[1]);
            edge_nodes.push(ids);
        }
        let mut adj = vec![Vec::new(); points.len()];
        for (t, tri) in x.tris.iter().enumerate() {
            let mut ids: Vec<usize> = tri.verts.to_vec();
            for &e in &tri.sides {
                ids.extend_from_slice(&edge_nodes[e][1..=m]);
            }
            let pos: Vec<_> = ids.iter().map(|&i| x.tri_pos(t, &points[i]).unwrap()).collect();
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    let d = pos[i].dist(pos[j]);
                    adj[ids[i]].push((ids[j], d));
                    adj[ids[j]].push((ids[i], d));
                }
            }
        }
        for (e, edge) in x.edges.iter().enumerate() {
            if !x.edge_tris[e].is_empty() {
                continue;
            }
            let step = edge.len / (m + 1) as f64;
            for w in edge_nodes[e].windows(2) {
                adj[w[0]].push((w[1], step));
                adj[w[1]].push((w[0], step));
            }
        }
        SteinerGraph { points, adj, edge_nodes }
    }

    /// Graph nodes sharing a closed cell with `p`, with their in-cell distances.
    pub fn attachments(&self, x: &TriangleComplex, p: &PointRef) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let push_edge = |e: usize, out: &mut Vec<(usize, f64)>| {
            for &n in &self.edge_nodes[e] {
                if let Some(d) = x.local_dist(p, &self.points[n]) {
                    out.push((n, d));
                }
            }
        };
        match *p {
            PointRef::Vertex(v) => out.push((v, 0.0)),
            PointRef::Edge { edge, .. } => {
                push_edge(edge, &mut out);
                for &t in &x.edge_tris[edge] {
                    for &e in &x.tris[t].sides {
                        if e != edge {
                            push_edge(e, &mut out);
                        }
                    }
                }
            }
            PointRef::Tri { tri, .. } => {
                for &e in &x.tris[tri].sides {
                    push_edge(e, &mut out);
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out.dedup_by_key(|a| a.0);
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Single-source shortest paths over the Steiner graph from a point.
#[derive(Debug, Clone)]
pub struct SourceTree {
    pub source: PointRef,
    pub dist: Vec<f64>,
    /// Predecessor node, or `None` for nodes attached directly to the source.
    pub pred: Vec<Option<usize>>,
}

impl SourceTree {
    pub fn new(x: &TriangleComplex, source: PointRef) -> Self {
        let g = x.steiner();
        let n = g.points.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut heap = BinaryHeap::new();
        for (node, d) in g.attachments(x, &source) {
            if d < dist[node] {
                dist[node] = d;
                heap.push(Item(d, node));
            }
        }
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &g.adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = Some(u);
                    heap.push(Item(nd, v));
                }
            }
        }
        SourceTree { source, dist, pred }
    }

    /// Approximate shortest point sequence from the source to `target`.
    pub fn seed_path(&self, x: &TriangleComplex, target: &PointRef) -> Option<Vec<PointRef>> {
        let g = x.steiner();
        let (best, _) = g
            .attachments(x, target)
            .into_iter()
            .map(|(n, d)| (n, self.dist[n] + d))
            .filter(|(_, d)| d.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))?;
        let mut nodes = vec![best];
        let mut cur = best;
        while let Some(p) = self.pred[cur] {
            nodes.push(p);
            cur = p;
        }
        nodes.reverse();
        let mut pts = vec![self.source];
        pts.extend(nodes.iter().map(|&n| g.points[n]));
        pts.push(*target);
        Some(pts)
    }
}
