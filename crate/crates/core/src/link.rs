//! Link graphs of points: the metric graph of directions at a point, with
//! arcs measured by angles.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::error::{Error, Result};
use crate::geom::{angle_between, ccw_angle};
use crate::EPS_ANG;

/// Snapping tolerance for directions that land on a node.
const NODE_SNAP: f64 = 1e-12;

/// A direction at the centre point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkNode {
    /// Along an edge incident to the centre vertex.
    EdgeDir(usize),
    /// Straight toward a vertex (poles of edge links, corners of triangle links).
    Toward(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkArc {
    pub ends: [usize; 2],
    pub len: f64,
    /// Triangle whose corner produced the arc.
    pub tri: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkGraph {
    pub center: PointRef,
    pub nodes: Vec<LinkNode>,
    pub arcs: Vec<LinkArc>,
    pub adj: Vec<Vec<usize>>,
}

/// A point of a link graph; `pos` is measured from `ends[0]` of the arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkPoint {
    Node(usize),
    OnArc { arc: usize, pos: f64 },
}

/// Traversal of part of an arc, from position `from` to position `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkSeg {
    pub arc: usize,
    pub from: f64,
    pub to: f64,
}

impl LinkSeg {
    pub fn len(&self) -> f64 {
        (self.to - self.from).abs()
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= NODE_SNAP
    }

    pub fn reversed(&self) -> Self {
        LinkSeg { arc: self.arc, from: self.to, to: self.from }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkPath {
    pub segs: Vec<LinkSeg>,
    pub length: f64,
    /// False when another path ties for shortest.
    pub unique: bool,
}

impl LinkPath {
    pub fn reversed(&self) -> Self {
        LinkPath {
            segs: self.segs.iter().rev().map(LinkSeg::reversed).collect(),
            length: self.length,
            unique: self.unique,
        }
    }
}

/// Build the link of a canonical point.
pub fn build_link(x: &TriangleComplex, p: &PointRef) -> LinkGraph {
    let mut nodes = Vec::new();
    let mut arcs = Vec::new();
    match *p {
        PointRef::Vertex(v) => {
            nodes.extend(x.vertex_edges[v].iter().map(|&e| LinkNode::EdgeDir(e)));
            let node_of = |e: usize| x.vertex_edges[v].iter().position(|&f| f == e).unwrap();
            for &t in &x.vertex_tris[v] {
                let tri = &x.tris[t];
                let i = tri.vertex_index(v).unwrap();
                arcs.push(LinkArc {
                    ends: [node_of(tri.sides[i]), node_of(tri.sides[(i + 2) % 3])],
                    len: tri.corner_angle(i),
                    tri: t,
                });
            }
        }
        PointRef::Edge { edge, .. } => {
            nodes.push(LinkNode::Toward(x.edges[edge].v[0]));
            nodes.push(LinkNode::Toward(x.edges[edge].v[1]));
            for &t in &x.edge_tris[edge] {
                arcs.push(LinkArc { ends: [0, 1], len: PI, tri: t });
            }
        }
        PointRef::Tri { tri: t, .. } => {
            let tri = &x.tris[t];
            let c = x.tri_pos(t, p).unwrap();
            nodes.extend(tri.verts.iter().map(|&v| LinkNode::Toward(v)));
            let mut total = 0.0;
            for k in 0..3 {
                let len = if k < 2 {
                    angle_between(tri.layout[k] - c, tri.layout[k + 1] - c)
                } else {
                    TAU - total
                };
                total += len;
                arcs.push(LinkArc { ends: [k, (k + 1) % 3], len, tri: t });
            }
        }
    }
    let mut adj = vec![Vec::new(); nodes.len()];
    for (k, a) in arcs.iter().enumerate() {
        adj[a.ends[0]].push(k);
        adj[a.ends[1]].push(k);
    }
    LinkGraph { center: *p, nodes, arcs, adj }
}

impl LinkGraph {
    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.len).sum()
    }

    fn arc_of_tri(&self, t: usize) -> Option<usize> {
        self.arcs.iter().position(|a| a.tri == t)
    }

    fn snap(&self, arc: usize, pos: f64) -> LinkPoint {
        let a = &self.arcs[arc];
        let pos = pos.clamp(0.0, a.len);
        if pos <= NODE_SNAP {
            LinkPoint::Node(a.ends[0])
        } else if pos >= a.len - NODE_SNAP {
            LinkPoint::Node(a.ends[1])
        } else {
            LinkPoint::OnArc { arc, pos }
        }
    }

    /// Direction at the centre toward `q`, where the straight segment from the
    /// centre to `q` lies in closed cell `witness`. `None` when `q` is the centre.
    pub fn direction(&self, x: &TriangleComplex, q: &PointRef, witness: Cell) -> Option<LinkPoint> {
        let p = &self.center;
        match (*p, witness) {
            (_, Cell::Vertex(_)) => None,
            (PointRef::Vertex(v), Cell::Edge(e)) => {
                x.edges[e].v.contains(&v).then_some(())?;
                let n = self.nodes.iter().position(|&n| n == LinkNode::EdgeDir(e))?;
                Some(LinkPoint::Node(n))
            }
            (PointRef::Vertex(v), Cell::Tri(t)) => {
                let tri = &x.tris[t];
                let i = tri.vertex_index(v)?;
                let o = tri.layout[i];
                let w = x.tri_pos(t, q)? - o;
                if w.norm() == 0.0 {
                    return None;
                }
                let arc = self.arc_of_tri(t)?;
                Some(self.snap(arc, angle_between(tri.layout[(i + 1) % 3] - o, w)))
            }
            (PointRef::Edge { edge, t: tp }, Cell::Edge(e)) => {
                if e != edge {
                    return None;
                }
                let tq = x.edge_param(e, q)?;
                if tq == tp {
                    return None;
                }
                Some(LinkPoint::Node(if tq < tp { 0 } else { 1 }))
            }
            (PointRef::Edge { edge, .. }, Cell::Tri(t)) => {
                let c = x.tri_pos(t, p)?;
                let w = x.tri_pos(t, q)? - c;
                if w.norm() == 0.0 {
                    return None;
                }
                let v0 = x.tri_pos(t, &PointRef::Vertex(x.edges[edge].v[0]))?;
                let arc = self.arc_of_tri(t)?;
                Some(self.snap(arc, angle_between(v0 - c, w)))
            }
            (PointRef::Tri { tri: t, .. }, Cell::Tri(u)) => {
                if t != u {
                    return None;
                }
                let tri = &x.tris[t];
                let c = x.tri_pos(t, p)?;
                let w = x.tri_pos(t, q)? - c;
                if w.norm() == 0.0 {
                    return None;
                }
                let theta = ccw_angle(tri.layout[0] - c, w);
                let mut start = 0.0;
                for (k, a) in self.arcs.iter().enumerate() {
                    if theta <= start + a.len || k == 2 {
                        return Some(self.snap(k, theta - start));
                    }
                    start += a.len;
                }
                None
            }
            _ => None,
        }
    }

    /// Express `lp` as a position on the arc of `tri`, if it lies there.
    pub fn locate_in_tri(&self, tri: usize, lp: LinkPoint) -> Option<(usize, f64)> {
        let arc = self.arc_of_tri(tri)?;
        match lp {
            LinkPoint::OnArc { arc: k, pos } => (k == arc).then_some((arc, pos)),
            LinkPoint::Node(n) => {
                let a = &self.arcs[arc];
                if a.ends[0] == n {
                    Some((arc, 0.0))
                } else if a.ends[1] == n {
                    Some((arc, a.len))
                } else {
                    None
                }
            }
        }
    }

    pub fn point_of_seg_end(&self, seg: &LinkSeg) -> LinkPoint {
        self.snap(seg.arc, seg.to)
    }
}

#[derive(Clone, Copy)]
struct HeapItem(f64, usize);

impl PartialEq for HeapItem {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0 && self.1 == o.1
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

struct SearchGraph {
    out: Vec<Vec<(usize, f64, LinkSeg)>>,
}

impl SearchGraph {
    /// Shortest path from `s` to `t`, counting ties; `skip_arc` is ignored.
    fn run(&self, s: usize, t: usize, skip_arc: Option<usize>) -> Option<(f64, Vec<LinkSeg>, u32)> {
        let n = self.out.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut count = vec![0u32; n];
        let mut pred: Vec<Option<(usize, LinkSeg)>> = vec![None; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        count[s] = 1;
        let mut heap = BinaryHeap::from([HeapItem(0.0, s)]);
        while let Some(HeapItem(d, u)) = heap.pop() {
            if done[u] || d > dist[u] {
                continue;
            }
            done[u] = true;
            for &(v, w, seg) in &self.out[u] {
                if Some(seg.arc) == skip_arc || v == s {
                    continue;
                }
                let nd = d + w;
                let tol = 1e-9 * (1.0 + nd);
                if nd < dist[v] - tol {
                    dist[v] = nd;
                    count[v] = count[u];
                    pred[v] = Some((u, seg));
                    heap.push(HeapItem(nd, v));
                } else if (nd - dist[v]).abs() <= tol && !done[v] {
                    count[v] = count[v].saturating_add(count[u]);
                }
            }
        }
        if !dist[t].is_finite() {
            return None;
        }
        let mut segs = Vec::new();
        let mut cur = t;
        while let Some((u, seg)) = pred[cur] {
            segs.push(seg);
            cur = u;
        }
        segs.reverse();
        Some((dist[t], segs, count[t]))
    }
}

impl LinkGraph {
    fn search_graph(&self) -> SearchGraph {
        let mut out = vec![Vec::new(); self.nodes.len() + 2];
        for (k, a) in self.arcs.iter().enumerate() {
            out[a.ends[0]].push((a.ends[1], a.len, LinkSeg { arc: k, from: 0.0, to: a.len }));
            out[a.ends[1]].push((a.ends[0], a.len, LinkSeg { arc: k, from: a.len, to: 0.0 }));
        }
        SearchGraph { out }
    }

    /// Shortest path between two link points.
    pub fn geodesic(&self, a: LinkPoint, b: LinkPoint) -> Result<LinkPath> {
        if same_link_point(self, a, b) {
            return Ok(LinkPath { segs: Vec::new(), length: 0.0, unique: true });
        }
        let mut g = self.search_graph();
        let n = self.nodes.len();
        let (s, t) = (n, n + 1);
        let src = match a {
            LinkPoint::Node(i) => i,
            LinkPoint::OnArc { arc, pos } => {
                let ar = &self.arcs[arc];
                g.out[s].push((ar.ends[0], pos, LinkSeg { arc, from: pos, to: 0.0 }));
                g.out[s].push((ar.ends[1], ar.len - pos, LinkSeg { arc, from: pos, to: ar.len }));
                s
            }
        };
        let dst = match b {
            LinkPoint::Node(j) => j,
            LinkPoint::OnArc { arc, pos } => {
                let ar = &self.arcs[arc];
                g.out[ar.ends[0]].push((t, pos, LinkSeg { arc, from: 0.0, to: pos }));
                g.out[ar.ends[1]].push((t, ar.len - pos, LinkSeg { arc, from: ar.len, to: pos }));
                t
            }
        };
        if let (LinkPoint::OnArc { arc: k1, pos: p1 }, LinkPoint::OnArc { arc: k2, pos: p2 }) = (a, b) {
            if k1 == k2 {
                g.out[s].push((t, (p1 - p2).abs(), LinkSeg { arc: k1, from: p1, to: p2 }));
            }
        }
        let (length, segs, count) = g.run(src, dst, None).ok_or(Error::Disconnected)?;
        Ok(LinkPath { segs: merge_adjacent(segs), length, unique: count == 1 })
    }

    /// Link distance, infinite across components.
    pub fn distance(&self, a: LinkPoint, b: LinkPoint) -> f64 {
        self.geodesic(a, b).map(|p| p.length).unwrap_or(f64::INFINITY)
    }

    /// The angle metric: link distance capped at π.
    pub fn angle_between(&self, a: LinkPoint, b: LinkPoint) -> Result<f64> {
        self.geodesic(a, b).map(|p| p.length.min(PI))
    }

    /// Length of the shortest injective cycle; infinite for forests.
    pub fn girth(&self) -> f64 {
        let g = self.search_graph();
        let mut best = f64::INFINITY;
        for (k, a) in self.arcs.iter().enumerate() {
            if let Some((d, _, _)) = g.run(a.ends[0], a.ends[1], Some(k)) {
                best = best.min(d + a.len);
            }
        }
        best
    }

    pub fn is_circle(&self) -> bool {
        !self.nodes.is_empty() && self.adj.iter().all(|a| a.len() == 2) && self.components() == 1
    }

    pub fn components(&self) -> usize {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut c = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            c += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &k in &self.adj[u] {
                    for &w in &self.arcs[k].ends {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        c
    }
}

fn same_link_point(l: &LinkGraph, a: LinkPoint, b: LinkPoint) -> bool {
    match (a, b) {
        (LinkPoint::Node(i), LinkPoint::Node(j)) => i == j,
        (LinkPoint::OnArc { arc: k1, pos: p1 }, LinkPoint::OnArc { arc: k2, pos: p2 }) => {
            k1 == k2 && (p1 - p2).abs() <= NODE_SNAP * (1.0 + l.arcs[k1].len)
        }
        _ => false,
    }
}

fn merge_adjacent(segs: Vec<LinkSeg>) -> Vec<LinkSeg> {
    let mut out: Vec<LinkSeg> = Vec::with_capacity(segs.len());
    for s in segs {
        if let Some(last) = out.last_mut() {
            if last.arc == s.arc && (last.to - s.from).abs() <= 1e-9 {
                last.to = s.to;
                continue;
            }
        }
        out.push(s);
    }
    out.retain(|s| !s.is_empty());
    out
}

/// Cancel backtracks in a path until none remain.
pub fn free_reduce(segs: &[LinkSeg]) -> Vec<LinkSeg> {
    let mut cur: Vec<LinkSeg> = segs.iter().copied().filter(|s| !s.is_empty()).collect();
    loop {
        let next = merge_adjacent(cur.clone());
        if next.len() == cur.len() {
            return next;
        }
        cur = next;
    }
}

/// Cancel backtracks in a closed cycle, including across the seam.
pub fn free_reduce_cycle(segs: &[LinkSeg]) -> Vec<LinkSeg> {
    let mut cur = free_reduce(segs);
    loop {
        if cur.len() >= 2 {
            let first = cur[0];
            let last = *cur.last().unwrap();
            if first.arc == last.arc && (last.to - first.from).abs() <= 1e-9 {
                let merged = LinkSeg { arc: first.arc, from: last.from, to: first.to };
                cur.pop();
                cur[0] = merged;
                cur = free_reduce(&cur);
                continue;
            }
        } else if cur.len() == 1 && cur[0].is_empty() {
            cur.clear();
        }
        // a single remaining segment of a closed cycle must be degenerate
        if cur.len() == 1 && (cur[0].from - cur[0].to).abs() <= 1e-9 {
            cur.clear();
        }
        return cur;
    }
}

pub fn path_length(segs: &[LinkSeg]) -> f64 {
    segs.iter().map(LinkSeg::len).sum()
}

/// One failing vertex in a CAT(0) check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkFailure {
    pub vertex: String,
    pub girth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cat0Report {
    pub passed: bool,
    pub link_failures: Vec<LinkFailure>,
    pub euler_characteristic: i64,
    pub h1_rank: usize,
    pub multi_edges: Vec<(String, String)>,
    pub simple_connectivity: &'static str,
}

const RANK_PRIME: u64 = 2_147_483_647;

fn rank_mod_p(mut rows: Vec<Vec<(usize, i64)>>, ncols: usize) -> usize {
    // dense elimination; complexes here are small
    let p = RANK_PRIME as i64;
    let mut m: Vec<Vec<i64>> = rows
        .drain(..)
        .map(|r| {
            let mut d = vec![0i64; ncols];
            for (c, v) in r {
                d[c] = (d[c] + v).rem_euclid(p);
            }
            d
        })
        .collect();
    let mut rank = 0;
    let nrows = m.len();
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = mod_pow(m[rank][col] as u64, RANK_PRIME - 2) as i64;
        for c in col..ncols {
            m[rank][c] = (m[rank][c] as i128 * inv as i128 % p as i128) as i64;
        }
        for r in 0..nrows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in col..ncols {
                    let v = (m[r][c] as i128 - f as i128 * m[rank][c] as i128).rem_euclid(p as i128);
                    m[r][c] = v as i64;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_pow(mut b: u64, mut e: u64) -> u64 {
    let m = RANK_PRIME;
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// First Betti number of the complex (ranks taken modulo a large prime).
pub fn h1_rank(x: &TriangleComplex) -> usize {
    let nv = x.num_vertices();
    let ne = x.edges.len();
    // the 1-skeleton is connected after validation
    let rank_d1 = nv.saturating_sub(1);
    let rows: Vec<Vec<(usize, i64)>> = x
        .tris
        .iter()
        .map(|t| {
            (0..3)
                .map(|i| {
                    let e = t.sides[i];
                    let sign = if x.edges[e].v[0] == t.verts[i] { 1 } else { -1 };
                    (e, sign)
                })
                .collect()
        })
        .collect();
    let rank_d2 = rank_mod_p(rows, ne);
    ne - rank_d1 - rank_d2
}

/// Link condition at every vertex plus the homological simple-connectivity proxy.
pub fn check_cat0(x: &TriangleComplex) -> Cat0Report {
    let mut link_failures = Vec::new();
    for v in 0..x.num_vertices() {
        let g = build_link(x, &PointRef::Vertex(v)).girth();
        if g < TAU - EPS_ANG {
            link_failures.push(LinkFailure { vertex: x.vertex_label(v).to_string(), girth: g });
        }
    }
    let euler_characteristic = x.euler_characteristic();
    let h1_rank = h1_rank(x);
    let multi_edges = x
        .multi_edges
        .iter()
        .map(|&(a, b)| (x.edge_labels[a].to_string(), x.edge_labels[b].to_string()))
        .collect();
    LinkFailure::sort(&mut link_failures);
    Cat0Report {
        passed: link_failures.is_empty() && euler_characteristic == 1 && h1_rank == 0,
        link_failures,
        euler_characteristic,
        h1_rank,
        multi_edges,
        simple_connectivity: "homological check only",
    }
}

impl LinkFailure {
    fn sort(v: &mut [LinkFailure]) {
        v.sort_by(|a, b| a.vertex.cmp(&b.vertex));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{cone_three_quarters, flat_grid, tripod_interval};
    use crate::complex::RawComplex;

    fn circle(lens: &[f64]) -> LinkGraph {
        let n = lens.len();
        let arcs: Vec<LinkArc> =
            lens.iter().enumerate().map(|(k, &len)| LinkArc { ends: [k, (k + 1) % n], len, tri: k }).collect();
        let mut adj = vec![Vec::new(); n];
        for (k, a) in arcs.iter().enumerate() {
            adj[a.ends[0]].push(k);
            adj[a.ends[1]].push(k);
        }
        LinkGraph { center: PointRef::Vertex(0), nodes: (0..n).map(LinkNode::Toward).collect(), arcs, adj }
    }

    fn poles(k: usize) -> LinkGraph {
        let arcs: Vec<LinkArc> = (0..k).map(|i| LinkArc { ends: [0, 1], len: PI, tri: i }).collect();
        let adj = vec![(0..k).collect(), (0..k).collect()];
        LinkGraph { center: PointRef::Vertex(0), nodes: vec![LinkNode::Toward(0), LinkNode::Toward(1)], arcs, adj }
    }

    #[test]
    fn girths() {
        assert!((circle(&[PI / 2.0; 4]).girth() - TAU).abs() < 1e-12);
        assert!((poles(3).girth() - TAU).abs() < 1e-12);
        assert!((circle(&[PI / 2.0; 3]).girth() - 1.5 * PI).abs() < 1e-12);
        let forest = LinkGraph { center: PointRef::Vertex(0), nodes: vec![LinkNode::EdgeDir(0); 3], arcs: vec![], adj: vec![vec![]; 3] };
        assert_eq!(forest.girth(), f64::INFINITY);
    }

    #[test]
    fn link_geodesics() {
        let c = circle(&[PI / 2.0; 4]);
        let a = LinkPoint::OnArc { arc: 0, pos: 0.2 };
        let b = LinkPoint::OnArc { arc: 0, pos: 1.2 };
        let p = c.geodesic(a, b).unwrap();
        assert!((p.length - 1.0).abs() < 1e-12 && p.unique);
        let q = c.geodesic(a, a).unwrap();
        assert!(q.segs.is_empty() && q.length == 0.0);
        let pl = poles(3);
        let r = pl.geodesic(LinkPoint::Node(0), LinkPoint::Node(1)).unwrap();
        assert!((r.length - PI).abs() < 1e-12);
        assert!(!r.unique);
    }

    #[test]
    fn capped_angles() {
        let c = circle(&[1.75; 4]);
        let a = LinkPoint::Node(0);
        let b = LinkPoint::OnArc { arc: 1, pos: 0.75 };
        assert!((c.angle_between(a, b).unwrap() - 2.5).abs() < 1e-12);
        let far = LinkPoint::Node(2);
        assert!((c.angle_between(a, far).unwrap() - PI).abs() < 1e-12);
        assert_eq!(c.angle_between(a, a).unwrap(), 0.0);
    }

    #[test]
    fn reductions() {
        let e = LinkSeg { arc: 0, from: 0.0, to: 1.0 };
        let f = LinkSeg { arc: 1, from: 0.0, to: 1.0 };
        assert_eq!(free_reduce(&[e, e.reversed(), f]), vec![f]);
        let c = circle(&[PI / 2.0; 4]);
        let cyc: Vec<LinkSeg> = (0..4).map(|k| LinkSeg { arc: k, from: 0.0, to: c.arcs[k].len }).collect();
        assert_eq!(free_reduce_cycle(&cyc), cyc);
        let back = vec![e, f, f.reversed(), e.reversed()];
        assert!(free_reduce_cycle(&back).is_empty());
    }

    #[test]
    fn link_shapes() {
        let ti = tripod_interval();
        let x = &ti.complex;
        let o = ti.vertex(0, 0);
        let mid_edge = x.edges_between(o, ti.vertex(0, 1))[0];
        let l = build_link(x, &PointRef::Edge { edge: mid_edge, t: 0.5 });
        assert_eq!(l.nodes.len(), 2);
        assert_eq!(l.arcs.len(), 3);
        assert!(l.arcs.iter().all(|a| (a.len - PI).abs() < 1e-15));
        let t = PointRef::Tri { tri: 0, bary: [0.2, 0.3, 0.5] };
        let lt = build_link(x, &t);
        assert!((lt.total_length() - TAU).abs() < 1e-12);
        assert!((lt.girth() - TAU).abs() < 1e-12);
    }

    #[test]
    fn free_edge_star_has_no_arcs() {
        let raw = RawComplex {
            vertices: vec!["o".into(), "a".into(), "b".into(), "c".into()],
            edges: ["a", "b", "c"]
                .iter()
                .map(|l| crate::complex::RawEdge { id: format!("o{l}").into(), v: ["o".into(), (*l).into()], len: 1.0 })
                .collect(),
            triangles: vec![],
        };
        let x = TriangleComplex::validate(&raw).unwrap();
        let l = build_link(&x, &PointRef::Vertex(0));
        assert_eq!((l.nodes.len(), l.arcs.len()), (3, 0));
        assert_eq!(l.girth(), f64::INFINITY);
    }

    #[test]
    fn cat0_checks() {
        let g = flat_grid(10);
        assert!(check_cat0(&g.complex).passed);
        assert!(check_cat0(&tripod_interval().complex).passed);
        let cone = TriangleComplex::validate(&cone_three_quarters()).unwrap();
        let r = check_cat0(&cone);
        assert!(!r.passed);
        assert_eq!(r.link_failures.len(), 1);
        assert_eq!(r.link_failures[0].vertex, "apex");
        assert!((r.link_failures[0].girth - 1.5 * PI).abs() < 1e-7);
    }
}
