//! The ambient triangle complex, points in it, and cell-respecting paths.
//!
//! Cells are stored by side lengths only. Every triangle gets a fixed planar
//! layout (first vertex at the origin, second on the positive x-axis, third
//! above it) and all metric work happens in those layouts.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::geodesic::steiner::SteinerGraph;
use crate::geom::{barycentric, P2};
use crate::EPS_BARY;

/// External identifier of a vertex, edge or triangle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Str(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label::Str(s)
    }
}

impl From<i64> for Label {
    fn from(i: i64) -> Self {
        Label::Int(i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEdge {
    pub id: Label,
    pub v: [Label; 2],
    pub len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTriangle {
    pub id: Label,
    pub edges: [Label; 3],
}

/// Unvalidated complex description, as read from a complex file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RawComplex {
    pub vertices: Vec<Label>,
    pub edges: Vec<RawEdge>,
    pub triangles: Vec<RawTriangle>,
}

/// A closed cell of the complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Cell {
    Vertex(usize),
    Edge(usize),
    Tri(usize),
}

impl Cell {
    pub fn dim(self) -> usize {
        match self {
            Cell::Vertex(_) => 0,
            Cell::Edge(_) => 1,
            Cell::Tri(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub v: [usize; 2],
    pub len: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub verts: [usize; 3],
    /// `sides[i]` joins `verts[i]` and `verts[(i + 1) % 3]`.
    pub sides: [usize; 3],
    pub lens: [f64; 3],
    pub layout: [P2; 3],
}

impl Triangle {
    pub fn vertex_index(&self, v: usize) -> Option<usize> {
        self.verts.iter().position(|&w| w == v)
    }

    pub fn side_index(&self, e: usize) -> Option<usize> {
        self.sides.iter().position(|&f| f == e)
    }

    /// Interior angle at corner `i`.
    pub fn corner_angle(&self, i: usize) -> f64 {
        let a = self.lens[i];
        let b = self.lens[(i + 2) % 3];
        let c = self.lens[(i + 1) % 3];
        ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0).acos()
    }

    pub fn area(&self) -> f64 {
        crate::geom::orient(self.layout[0], self.layout[1], self.layout[2]) / 2.0
    }
}

/// A point of the complex given by its carrier cell and local coordinates.
///
/// Edge coordinates run from `v[0]` (t = 0) to `v[1]` (t = 1); triangle
/// coordinates are barycentric with respect to `verts`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PointRef {
    Vertex(usize),
    Edge { edge: usize, t: f64 },
    Tri { tri: usize, bary: [f64; 3] },
}

impl PointRef {
    pub fn carrier(&self) -> Cell {
        match *self {
            PointRef::Vertex(v) => Cell::Vertex(v),
            PointRef::Edge { edge, .. } => Cell::Edge(edge),
            PointRef::Tri { tri, .. } => Cell::Tri(tri),
        }
    }
}

/// A validated triangle complex. Immutable after construction.
pub struct TriangleComplex {
    pub vertex_labels: Vec<Label>,
    pub edge_labels: Vec<Label>,
    pub tri_labels: Vec<Label>,
    pub edges: Vec<Edge>,
    pub tris: Vec<Triangle>,
    pub edge_tris: Vec<Vec<usize>>,
    pub vertex_edges: Vec<Vec<usize>>,
    pub vertex_tris: Vec<Vec<usize>>,
    /// Pairs of distinct edges with the same endpoints.
    pub multi_edges: Vec<(usize, usize)>,
    steiner: OnceLock<SteinerGraph>,
}

impl fmt::Debug for TriangleComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TriangleComplex")
            .field("vertices", &self.vertex_labels.len())
            .field("edges", &self.edges.len())
            .field("triangles", &self.tris.len())
            .finish()
    }
}

impl Clone for TriangleComplex {
    fn clone(&self) -> Self {
        TriangleComplex {
            vertex_labels: self.vertex_labels.clone(),
            edge_labels: self.edge_labels.clone(),
            tri_labels: self.tri_labels.clone(),
            edges: self.edges.clone(),
            tris: self.tris.clone(),
            edge_tris: self.edge_tris.clone(),
            vertex_edges: self.vertex_edges.clone(),
            vertex_tris: self.vertex_tris.clone(),
            multi_edges: self.multi_edges.clone(),
            steiner: OnceLock::new(),
        }
    }
}

/// Planar layout of a triangle with sides `l01`, `l12`, `l20`.
pub fn layout_triangle(l01: f64, l12: f64, l20: f64) -> [P2; 3] {
    let x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
    let y = (l20 * l20 - x * x).max(0.0).sqrt();
    [P2::new(0.0, 0.0), P2::new(l01, 0.0), P2::new(x, y)]
}

fn index_labels(labels: &[Label], what: &str, out: &mut Vec<Violation>) -> HashMap<Label, usize> {
    let mut map = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        if map.insert(l.clone(), i).is_some() {
            out.push(Violation::DuplicateId(format!("{what} {l}")));
        }
    }
    map
}

impl TriangleComplex {
    /// Validate a raw description and build adjacency indices.
    pub fn validate(raw: &RawComplex) -> Result<Self> {
        let mut bad = Vec::new();
        if raw.vertices.is_empty() {
            return Err(Error::Invalid(vec![Violation::Empty]));
        }
        let vidx = index_labels(&raw.vertices, "vertex", &mut bad);
        let edge_labels: Vec<Label> = raw.edges.iter().map(|e| e.id.clone()).collect();
        let eidx = index_labels(&edge_labels, "edge", &mut bad);
        let tri_labels: Vec<Label> = raw.triangles.iter().map(|t| t.id.clone()).collect();
        index_labels(&tri_labels, "triangle", &mut bad);

        let mut edges = Vec::with_capacity(raw.edges.len());
        for e in &raw.edges {
            let a = vidx.get(&e.v[0]);
            let b = vidx.get(&e.v[1]);
            let (a, b) = match (a, b) {
                (Some(&a), Some(&b)) => (a, b),
                _ => {
                    bad.push(Violation::DanglingReference(format!(
                        "edge {} references unknown vertex",
                        e.id
                    )));
                    (0, 0)
                }
            };
            if a == b && vidx.contains_key(&e.v[0]) {
                bad.push(Violation::LoopEdge(e.id.to_string()));
            }
            if !(e.len.is_finite() && e.len > 0.0) {
                bad.push(Violation::BadLength { edge: e.id.to_string(), len: e.len });
            }
            edges.push(Edge { v: [a, b], len: e.len });
        }
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }

        let mut tris = Vec::with_capacity(raw.triangles.len());
        for t in &raw.triangles {
            let mut ids = [0usize; 3];
            let mut ok = true;
            for (k, l) in t.edges.iter().enumerate() {
                match eidx.get(l) {
                    Some(&e) => ids[k] = e,
                    None => {
                        bad.push(Violation::DanglingReference(format!(
                            "triangle {} references unknown edge {l}",
                            t.id
                        )));
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            match Self::assemble_triangle(&edges, ids) {
                Some(tri) => {
                    let [a, b, c] = tri.lens;
                    if a + b <= c || b + c <= a || c + a <= b {
                        bad.push(Violation::DegenerateTriangle { tri: t.id.to_string(), sides: tri.lens });
                    }
                    tris.push(tri);
                }
                None => bad.push(Violation::NotACycle(t.id.to_string())),
            }
        }
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }

        let nv = raw.vertices.len();
        let mut vertex_edges = vec![Vec::new(); nv];
        for (i, e) in edges.iter().enumerate() {
            vertex_edges[e.v[0]].push(i);
            vertex_edges[e.v[1]].push(i);
        }
        let mut edge_tris = vec![Vec::new(); edges.len()];
        let mut vertex_tris = vec![Vec::new(); nv];
        for (i, t) in tris.iter().enumerate() {
            for &e in &t.sides {
                edge_tris[e].push(i);
            }
            for &v in &t.verts {
                vertex_tris[v].push(i);
            }
        }

        // connectivity of the 1-skeleton
        let mut comp = vec![usize::MAX; nv];
        let mut ncomp = 0;
        for s in 0..nv {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = ncomp;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &e in &vertex_edges[v] {
                    let w = edges[e].v[0] + edges[e].v[1] - v;
                    if comp[w] == usize::MAX {
                        comp[w] = ncomp;
                        q.push_back(w);
                    }
                }
            }
            ncomp += 1;
        }
        if ncomp > 1 {
            return Err(Error::Invalid(vec![Violation::DisconnectedComplex { components: ncomp }]));
        }

        let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            let key = (e.v[0].min(e.v[1]), e.v[0].max(e.v[1]));
            by_pair.entry(key).or_default().push(i);
        }
        let mut multi_edges = Vec::new();
        for list in by_pair.values() {
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    multi_edges.push((list[i], list[j]));
                }
            }
        }
        multi_edges.sort_unstable();

        Ok(TriangleComplex {
            vertex_labels: raw.vertices.clone(),
            edge_labels,
            tri_labels,
            edges,
            tris,
            edge_tris,
            vertex_edges,
            vertex_tris,
            multi_edges,
            steiner: OnceLock::new(),
        })
    }

    fn assemble_triangle(edges: &[Edge], ids: [usize; 3]) -> Option<Triangle> {
        if ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2] {
            return None;
        }
        let [v0, v1] = edges[ids[0]].v;
        let others = [ids[1], ids[2]];
        let joins = |e: usize, a: usize| edges[e].v.contains(&a);
        let s1 = *others.iter().find(|&&e| joins(e, v1))?;
        let s2 = if s1 == ids[1] { ids[2] } else { ids[1] };
        let v2 = edges[s1].v[0] + edges[s1].v[1] - v1;
        if v2 == v0 || v2 == v1 {
            return None;
        }
        let mut e2 = edges[s2].v;
        e2.sort_unstable();
        let mut want = [v2, v0];
        want.sort_unstable();
        if e2 != want {
            return None;
        }
        let lens = [edges[ids[0]].len, edges[s1].len, edges[s2].len];
        Some(Triangle {
            verts: [v0, v1, v2],
            sides: [ids[0], s1, s2],
            lens,
            layout: layout_triangle(lens[0], lens[1], lens[2]),
        })
    }

    /// The raw description this complex was built from.
    pub fn to_raw(&self) -> RawComplex {
        RawComplex {
            vertices: self.vertex_labels.clone(),
            edges: self
                .edges
                .iter()
                .zip(&self.edge_labels)
                .map(|(e, id)| RawEdge {
                    id: id.clone(),
                    v: [self.vertex_labels[e.v[0]].clone(), self.vertex_labels[e.v[1]].clone()],
                    len: e.len,
                })
                .collect(),
            triangles: self
                .tri_labels
                .iter()
                .enumerate()
                .map(|(i, id)| RawTriangle {
                    id: id.clone(),
                    edges: self.tris[i].sides.map(|e| self.edge_labels[e].clone()),
                })
                .collect(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn steiner(&self) -> &SteinerGraph {
        self.steiner.get_or_init(|| SteinerGraph::build(self, crate::geodesic::steiner::STEINER_POINTS))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.edges.len() as i64 + self.tris.len() as i64
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edges[e].v;
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn vertex_label(&self, v: usize) -> &Label {
        &self.vertex_labels[v]
    }

    pub fn vertex_by_label(&self, l: &Label) -> Option<usize> {
        self.vertex_labels.iter().position(|x| x == l)
    }

    pub fn edge_by_label(&self, l: &Label) -> Option<usize> {
        self.edge_labels.iter().position(|x| x == l)
    }

    pub fn tri_by_label(&self, l: &Label) -> Option<usize> {
        self.tri_labels.iter().position(|x| x == l)
    }

    /// Edges joining `a` and `b`.
    pub fn edges_between(&self, a: usize, b: usize) -> Vec<usize> {
        self.vertex_edges[a]
            .iter()
            .copied()
            .filter(|&e| self.other_end(e, a) == b)
            .collect()
    }

    /// Whether closed cell `small` is a face of (or equal to) closed cell `big`.
    pub fn is_face(&self, small: Cell, big: Cell) -> bool {
        match (small, big) {
            (a, b) if a == b => true,
            (Cell::Vertex(v), Cell::Edge(e)) => self.edges[e].v.contains(&v),
            (Cell::Vertex(v), Cell::Tri(t)) => self.tris[t].verts.contains(&v),
            (Cell::Edge(e), Cell::Tri(t)) => self.tris[t].sides.contains(&e),
            _ => false,
        }
    }

    /// All closed cells containing the given cell, including itself.
    pub fn star(&self, c: Cell) -> Vec<Cell> {
        let mut out = vec![c];
        match c {
            Cell::Vertex(v) => {
                out.extend(self.vertex_edges[v].iter().map(|&e| Cell::Edge(e)));
                out.extend(self.vertex_tris[v].iter().map(|&t| Cell::Tri(t)));
            }
            Cell::Edge(e) => out.extend(self.edge_tris[e].iter().map(|&t| Cell::Tri(t))),
            Cell::Tri(_) => {}
        }
        out
    }

    /// Lowest-dimensional closed cell containing both points, ties broken by cell id.
    pub fn common_cell(&self, a: &PointRef, b: &PointRef) -> Option<Cell> {
        let ca = a.carrier();
        let cb = b.carrier();
        self.star(ca)
            .into_iter()
            .filter(|&c| self.is_face(cb, c))
            .min_by_key(|&c| (c.dim(), c))
    }

    pub fn contains(&self, cell: Cell, p: &PointRef) -> bool {
        self.is_face(p.carrier(), cell)
    }

    /// Position of `p` in the planar layout of triangle `t`, if `p` lies in the closed triangle.
    pub fn tri_pos(&self, t: usize, p: &PointRef) -> Option<P2> {
        let tri = &self.tris[t];
        match *p {
            PointRef::Vertex(v) => tri.vertex_index(v).map(|i| tri.layout[i]),
            PointRef::Edge { edge, t: s } => {
                let i = tri.side_index(edge)?;
                let (a, b) = (tri.layout[i], tri.layout[(i + 1) % 3]);
                if self.edges[edge].v[0] == tri.verts[i] {
                    Some(a.lerp(b, s))
                } else {
                    Some(b.lerp(a, s))
                }
            }
            PointRef::Tri { tri: u, bary } => {
                if u != t {
                    return None;
                }
                let l = &tri.layout;
                Some(l[0] * bary[0] + l[1] * bary[1] + l[2] * bary[2])
            }
        }
    }

    /// Parameter of `p` along edge `e`, if `p` lies on the closed edge.
    pub fn edge_param(&self, e: usize, p: &PointRef) -> Option<f64> {
        match *p {
            PointRef::Vertex(v) => {
                let [a, b] = self.edges[e].v;
                if v == a {
                    Some(0.0)
                } else if v == b {
                    Some(1.0)
                } else {
                    None
                }
            }
            PointRef::Edge { edge, t } if edge == e => Some(t),
            _ => None,
        }
    }

    /// Canonical point of triangle `t` at layout position `q` (clamped into the triangle).
    pub fn point_at(&self, t: usize, q: P2) -> PointRef {
        let l = &self.tris[t].layout;
        let mut b = barycentric(l[0], l[1], l[2], q);
        for x in b.iter_mut() {
            *x = x.max(0.0);
        }
        let s: f64 = b.iter().sum();
        for x in b.iter_mut() {
            *x /= s;
        }
        self.canonical_tri(t, b)
    }

    /// Canonical point at parameter `t` along edge `e`.
    pub fn point_on_edge(&self, e: usize, t: f64) -> PointRef {
        let t = t.clamp(0.0, 1.0);
        if t < EPS_BARY {
            PointRef::Vertex(self.edges[e].v[0])
        } else if t > 1.0 - EPS_BARY {
            PointRef::Vertex(self.edges[e].v[1])
        } else {
            PointRef::Edge { edge: e, t }
        }
    }

    fn canonical_tri(&self, t: usize, mut b: [f64; 3]) -> PointRef {
        for x in b.iter_mut() {
            if *x < EPS_BARY {
                *x = 0.0;
            }
        }
        let s: f64 = b.iter().sum();
        for x in b.iter_mut() {
            *x /= s;
        }
        let tri = &self.tris[t];
        let nz: Vec<usize> = (0..3).filter(|&i| b[i] > 0.0).collect();
        match nz.len() {
            3 => PointRef::Tri { tri: t, bary: b },
            2 => {
                let (i, j) = (nz[0], nz[1]);
                // side joining corners i and j
                let side = if (i + 1) % 3 == j { i } else { j };
                let e = tri.sides[side];
                let start = tri.verts[side];
                let w_end = if start == tri.verts[i] { b[j] } else { b[i] };
                let t = if self.edges[e].v[0] == start { w_end } else { 1.0 - w_end };
                PointRef::Edge { edge: e, t }
            }
            _ => PointRef::Vertex(tri.verts[nz[0]]),
        }
    }

    /// Snap near-face coordinates and return the lowest-dimensional carrier.
    pub fn canonicalize(&self, p: &PointRef) -> Result<PointRef> {
        match *p {
            PointRef::Vertex(v) => {
                if v >= self.num_vertices() {
                    return Err(Error::CoordsOutOfRange(format!("unknown vertex {v}")));
                }
                Ok(*p)
            }
            PointRef::Edge { edge, t } => {
                if edge >= self.edges.len() {
                    return Err(Error::CoordsOutOfRange(format!("unknown edge {edge}")));
                }
                if !t.is_finite() || t < -EPS_BARY || t > 1.0 + EPS_BARY {
                    return Err(Error::CoordsOutOfRange(format!("edge parameter {t}")));
                }
                Ok(self.point_on_edge(edge, t))
            }
            PointRef::Tri { tri, bary } => {
                if tri >= self.tris.len() {
                    return Err(Error::CoordsOutOfRange(format!("unknown triangle {tri}")));
                }
                let s: f64 = bary.iter().sum();
                if bary.iter().any(|x| !x.is_finite() || *x < -EPS_BARY || *x > 1.0 + EPS_BARY)
                    || (s - 1.0).abs() > 1e-6
                {
                    return Err(Error::CoordsOutOfRange(format!("barycentric {bary:?}")));
                }
                Ok(self.canonical_tri(tri, bary))
            }
        }
    }

    /// Euclidean distance between two points of a closed cell.
    pub fn dist_in_cell(&self, cell: Cell, a: &PointRef, b: &PointRef) -> Result<f64> {
        match cell {
            Cell::Vertex(_) => {
                if self.contains(cell, a) && self.contains(cell, b) {
                    Ok(0.0)
                } else {
                    Err(Error::PointNotInCell(cell))
                }
            }
            Cell::Edge(e) => match (self.edge_param(e, a), self.edge_param(e, b)) {
                (Some(s), Some(t)) => Ok((s - t).abs() * self.edges[e].len),
                _ => Err(Error::PointNotInCell(cell)),
            },
            Cell::Tri(t) => match (self.tri_pos(t, a), self.tri_pos(t, b)) {
                (Some(p), Some(q)) => Ok(p.dist(q)),
                _ => Err(Error::PointNotInCell(cell)),
            },
        }
    }

    /// Distance between two points sharing a closed cell, or `None`.
    pub fn local_dist(&self, a: &PointRef, b: &PointRef) -> Option<f64> {
        let c = self.common_cell(a, b)?;
        self.dist_in_cell(c, a, b).ok()
    }

    /// Whether two points coincide up to `eps`.
    pub fn same_point(&self, a: &PointRef, b: &PointRef, eps: f64) -> bool {
        self.local_dist(a, b).is_some_and(|d| d <= eps)
    }

    /// Point at fraction `s` of the straight segment from `a` to `b` inside `cell`.
    pub fn lerp_in_cell(&self, cell: Cell, a: &PointRef, b: &PointRef, s: f64) -> PointRef {
        match cell {
            Cell::Vertex(_) => *a,
            Cell::Edge(e) => {
                let ta = self.edge_param(e, a).unwrap_or(0.0);
                let tb = self.edge_param(e, b).unwrap_or(0.0);
                self.point_on_edge(e, ta + (tb - ta) * s)
            }
            Cell::Tri(t) => {
                let pa = self.tri_pos(t, a).unwrap_or_default();
                let pb = self.tri_pos(t, b).unwrap_or_default();
                self.point_at(t, pa.lerp(pb, s))
            }
        }
    }
}

/// A path made of straight pieces, each inside a witness cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePath {
    pub points: Vec<PointRef>,
    pub cells: Vec<Cell>,
    pub length: f64,
}

impl PiecewisePath {
    pub fn new(x: &TriangleComplex, points: Vec<PointRef>, cells: Vec<Cell>) -> Result<Self> {
        assert_eq!(points.len(), cells.len() + 1, "one witness cell per piece");
        let mut length = 0.0;
        for (i, &c) in cells.iter().enumerate() {
            length += x.dist_in_cell(c, &points[i], &points[i + 1])?;
        }
        Ok(PiecewisePath { points, cells, length })
    }

    pub fn single(p: PointRef) -> Self {
        PiecewisePath { points: vec![p], cells: Vec::new(), length: 0.0 }
    }

    pub fn start(&self) -> &PointRef {
        &self.points[0]
    }

    pub fn end(&self) -> &PointRef {
        self.points.last().unwrap()
    }

    /// Cumulative arclength at each breakpoint.
    pub fn arclengths(&self, x: &TriangleComplex) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut s = 0.0;
        out.push(0.0);
        for (i, &c) in self.cells.iter().enumerate() {
            s += x.dist_in_cell(c, &self.points[i], &self.points[i + 1]).unwrap_or(0.0);
            out.push(s);
        }
        out
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        let mut cells = self.cells.clone();
        cells.reverse();
        PiecewisePath { points, cells, length: self.length }
    }

    /// Point at arclength `s` from the start (clamped).
    pub fn point_at_length(&self, x: &TriangleComplex, s: f64) -> PointRef {
        let arc = self.arclengths(x);
        self.point_at_length_with(x, &arc, s)
    }

    pub fn point_at_length_with(&self, x: &TriangleComplex, arc: &[f64], s: f64) -> PointRef {
        if self.cells.is_empty() || s <= 0.0 {
            return self.points[0];
        }
        for i in 0..self.cells.len() {
            if s <= arc[i + 1] {
                let seg = arc[i + 1] - arc[i];
                let f = if seg > 0.0 { (s - arc[i]) / seg } else { 0.0 };
                return x.lerp_in_cell(self.cells[i], &self.points[i], &self.points[i + 1], f);
            }
        }
        *self.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle_345() -> RawComplex {
        RawComplex {
            vertices: vec!["a".into(), "b".into(), "c".into()],
            edges: vec![
                RawEdge { id: "ab".into(), v: ["a".into(), "b".into()], len: 3.0 },
                RawEdge { id: "bc".into(), v: ["b".into(), "c".into()], len: 5.0 },
                RawEdge { id: "ca".into(), v: ["c".into(), "a".into()], len: 4.0 },
            ],
            triangles: vec![RawTriangle { id: "t".into(), edges: ["ab".into(), "bc".into(), "ca".into()] }],
        }
    }

    #[test]
    fn valid_345() {
        let x = TriangleComplex::validate(&triangle_345()).unwrap();
        assert_eq!((x.num_vertices(), x.edges.len(), x.tris.len()), (3, 3, 1));
        assert!((x.tris[0].corner_angle(0) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let mut raw = triangle_345();
        raw.edges[0].len = 1.0;
        raw.edges[1].len = 3.0;
        raw.edges[2].len = 1.0;
        match TriangleComplex::validate(&raw) {
            Err(Error::Invalid(v)) => assert!(matches!(v[0], Violation::DegenerateTriangle { .. })),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_and_disconnected() {
        let mut raw = triangle_345();
        raw.triangles[0].edges[2] = "zz".into();
        assert!(matches!(TriangleComplex::validate(&raw), Err(Error::Invalid(v)) if matches!(v[0], Violation::DanglingReference(_))));
        let mut raw = triangle_345();
        raw.vertices.push("lonely".into());
        assert!(matches!(
            TriangleComplex::validate(&raw),
            Err(Error::Invalid(v)) if v[0] == Violation::DisconnectedComplex { components: 2 }
        ));
    }

    #[test]
    fn shared_edge() {
        let mut raw = triangle_345();
        raw.vertices.push("d".into());
        raw.edges.push(RawEdge { id: "bd".into(), v: ["b".into(), "d".into()], len: 4.0 });
        raw.edges.push(RawEdge { id: "dc".into(), v: ["d".into(), "c".into()], len: 3.0 });
        raw.triangles.push(RawTriangle { id: "u".into(), edges: ["bc".into(), "dc".into(), "bd".into()] });
        let x = TriangleComplex::validate(&raw).unwrap();
        let e = x.edge_by_label(&"bc".into()).unwrap();
        assert_eq!(x.edge_tris[e].len(), 2);
    }

    #[test]
    fn leg_midpoints() {
        let x = TriangleComplex::validate(&triangle_345()).unwrap();
        let ab = x.edge_by_label(&"ab".into()).unwrap();
        let ca = x.edge_by_label(&"ca".into()).unwrap();
        let m1 = PointRef::Edge { edge: ab, t: 0.5 };
        let m2 = PointRef::Edge { edge: ca, t: 0.5 };
        let d = x.dist_in_cell(Cell::Tri(0), &m1, &m2).unwrap();
        assert!((d - 2.5).abs() < 1e-12);
        let a = PointRef::Vertex(0);
        let b = PointRef::Vertex(1);
        assert!((x.dist_in_cell(Cell::Tri(0), &a, &b).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(x.dist_in_cell(Cell::Tri(0), &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn canonical_forms() {
        let x = TriangleComplex::validate(&triangle_345()).unwrap();
        let p = x.canonicalize(&PointRef::Tri { tri: 0, bary: [0.5, 0.5, 0.0] }).unwrap();
        let ab = x.edge_by_label(&"ab".into()).unwrap();
        assert_eq!(p, PointRef::Edge { edge: ab, t: 0.5 });
        let q = x.canonicalize(&PointRef::Edge { edge: ab, t: 1.0 }).unwrap();
        assert_eq!(q, PointRef::Vertex(1));
        let c = PointRef::Tri { tri: 0, bary: [1.0 / 3.0; 3] };
        assert_eq!(x.canonicalize(&c).unwrap(), c);
        assert!(matches!(
            x.canonicalize(&PointRef::Tri { tri: 0, bary: [1.5, -0.5, 0.0] }),
            Err(Error::CoordsOutOfRange(_))
        ));
    }

    #[test]
    fn revalidation_is_identity() {
        let x = TriangleComplex::validate(&triangle_345()).unwrap();
        let y = TriangleComplex::validate(&x.to_raw()).unwrap();
        assert_eq!(x.to_raw(), y.to_raw());
        assert_eq!(x.tris, y.tris);
    }
}
