//! Deflated tetrahedra through a candidate 2-median.
//!
//! Given four points and a point `o` lying in all four full triangles, the
//! six discs `D_ij = ⧍(x_i, x_j, o)` are glued along their legs: the three
//! discs through `x_i` share one copy of the geodesic from `x_i` to `o`.
//! Each triple of discs around a face forms a spiky triangle `T_ijk`, and
//! all six form a complex `Z`, the cone from `o` over the edges of a
//! tetrahedron. Once folded, `Z` maps injectively, and the four spiky
//! triangles meet only in `o`. This module builds that object and checks
//! those claims directly; the 2-median itself comes from
//! [`median2`](crate::median::median2).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;

use serde::Serialize;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::disc::fill::find_overlaps;
use crate::disc::fold::{find_move, fold, merge_edge, merge_vertex};
use crate::disc::{full_triangle_disc, DTri, Diagram, DiscImage, UnionFind};
use crate::error::{Error, Result};
use crate::full_triangle::{classify_quadruple, position_on, FullTriangleQuery, GeodesicTable};
use crate::geodesic::{geodesic, Geodesic};
use crate::geom::{convex_overlap, orient, P2};
use crate::median::{median2, omitting, point_dist, Location};
use crate::EPS_GEO;

/// Index pairs of the six discs, in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// One generalized triangle `D_ij` with its legs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TetraFace {
    pub pair: (usize, usize),
    pub diagram: Diagram,
    /// Vertices over `x_i` and `x_j`.
    pub y: [usize; 2],
    /// Vertex over `o`.
    pub omega: usize,
    /// Vertex chains from `y[0]` and from `y[1]` to `omega`.
    pub legs: [Vec<usize>; 2],
}

impl TetraFace {
    /// Chain of the leg starting over point `i`.
    pub fn leg(&self, i: usize) -> Option<&Vec<usize>> {
        if self.pair.0 == i {
            Some(&self.legs[0])
        } else if self.pair.1 == i {
            Some(&self.legs[1])
        } else {
            None
        }
    }

    fn leg_mut(&mut self, i: usize) -> &mut Vec<usize> {
        if self.pair.0 == i {
            &mut self.legs[0]
        } else {
            &mut self.legs[1]
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeflatedTetra {
    pub points: [PointRef; 4],
    pub o: PointRef,
    /// Discs in the order of [`PAIRS`].
    pub faces: Vec<TetraFace>,
    /// Geodesic from each point to `o`.
    #[serde(skip)]
    pub leg_geodesics: Vec<Geodesic>,
}

/// A glued complex with the disc each triangle came from.
#[derive(Debug, Clone, Serialize)]
pub struct Glued {
    pub diagram: Diagram,
    pub face_of_tri: Vec<usize>,
}

/// Shortest path from `start` to `end` through the given edges.
fn edge_path(d: &Diagram, edges: &[usize], start: usize, end: usize) -> Option<Vec<usize>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edges {
        let [a, b] = d.edges[e].v;
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut prev = HashMap::from([(start, start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        if v == end {
            let mut path = vec![end];
            while *path.last().unwrap() != start {
                path.push(prev[path.last().unwrap()]);
            }
            path.reverse();
            return Some(path);
        }
        for &w in adj.get(&v).into_iter().flatten() {
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(w) {
                e.insert(v);
                queue.push_back(w);
            }
        }
    }
    None
}

/// Vertex of `d` over `p`, preferring marked vertices.
fn vertex_over(x: &TriangleComplex, d: &Diagram, p: &PointRef) -> Option<usize> {
    let hit = |v: &usize| x.same_point(&d.verts[*v], p, 1e-9);
    d.marked.iter().copied().find(hit).or_else(|| (0..d.verts.len()).find(hit))
}

/// The boundary chain of `d` along geodesic `g` from `start` to `end`, with arclength positions.
fn leg_chain(x: &TriangleComplex, d: &Diagram, g: &Geodesic, start: usize, end: usize) -> Result<Vec<(usize, f64)>> {
    if start == end {
        return Ok(vec![(start, 0.0)]);
    }
    let inc = d.edge_incidence();
    let on_leg: Vec<usize> = (0..d.edges.len())
        .filter(|&e| {
            let [a, b] = d.edges[e].v;
            inc[e] <= 1 && a != b && {
                let mid = x.lerp_in_cell(d.edges[e].cell, &d.verts[a], &d.verts[b], 0.5);
                position_on(x, g, &mid).is_some()
            }
        })
        .collect();
    let path = edge_path(d, &on_leg, start, end)
        .ok_or_else(|| Error::GluingMismatch("no boundary path along a leg".into()))?;
    let mut out = Vec::with_capacity(path.len());
    for v in path {
        let s = position_on(x, g, &d.verts[v])
            .ok_or_else(|| Error::GluingMismatch("leg vertex off its geodesic".into()))?;
        out.push((v, s));
    }
    if out.windows(2).any(|w| w[1].1 <= w[0].1) {
        return Err(Error::GluingMismatch("leg is not monotone along its geodesic".into()));
    }
    Ok(out)
}

/// Edge of `d` joining `a` and `b`, preferring edges on fewer triangles.
fn edge_joining(d: &Diagram, a: usize, b: usize) -> Option<usize> {
    let inc = d.edge_incidence();
    (0..d.edges.len())
        .filter(|&e| d.edges[e].v == [a, b] || d.edges[e].v == [b, a])
        .min_by_key(|&e| inc[e])
}

/// Build the six discs through `o` and subdivide the shared legs alike.
///
/// `o` must lie in each full triangle or within `tol` of it, so that a
/// median computed to tolerance `tol` is accepted.
pub fn build_deflated(x: &TriangleComplex, points: &[PointRef; 4], o: &PointRef, tol: f64) -> Result<DeflatedTetra> {
    let mut pts = *points;
    for p in pts.iter_mut() {
        *p = x.canonicalize(p)?;
    }
    let o = x.canonicalize(o)?;
    let table = GeodesicTable::new(x, &pts)?;
    if classify_quadruple(x, &table)?.lanky.is_some() {
        return Err(Error::Input("lanky quadruple: its 2-median is a segment".into()));
    }
    for j in 0..4 {
        let corners = omitting(j).map(|i| pts[i]);
        let q = FullTriangleQuery::new(x, corners)?;
        if !q.contains(&o)? {
            let near = tol > 0.0 && {
                let w = full_triangle_disc(x, &corners[0], &corners[1], &corners[2])?.image(x);
                w.boundary_distance(x, &o) <= tol
            };
            if !near {
                return Err(Error::NotMember(j));
            }
        }
    }
    let leg_geodesics: Vec<Geodesic> = pts.iter().map(|p| geodesic(x, p, &o)).collect::<Result<_>>()?;
    let mut faces = Vec::with_capacity(6);
    let mut params: Vec<[Vec<f64>; 2]> = Vec::with_capacity(6);
    for &(i, j) in &PAIRS {
        let disc = full_triangle_disc(x, &pts[i], &pts[j], &o)?;
        let d = disc.filled.diagram;
        let missing = || Error::GluingMismatch(format!("disc {i}{j} lacks a corner vertex"));
        let y = [vertex_over(x, &d, &pts[i]).ok_or_else(missing)?, vertex_over(x, &d, &pts[j]).ok_or_else(missing)?];
        let omega = vertex_over(x, &d, &o).ok_or_else(missing)?;
        let a = leg_chain(x, &d, &leg_geodesics[i], y[0], omega)?;
        let b = leg_chain(x, &d, &leg_geodesics[j], y[1], omega)?;
        params.push([a.iter().map(|v| v.1).collect(), b.iter().map(|v| v.1).collect()]);
        let legs = [a.into_iter().map(|v| v.0).collect(), b.into_iter().map(|v| v.0).collect()];
        faces.push(TetraFace { pair: (i, j), diagram: d, y, omega, legs });
    }
    let mut t = DeflatedTetra { points: pts, o, faces, leg_geodesics };
    t.common_subdivision(x, params)?;
    Ok(t)
}

impl DeflatedTetra {
    /// Faces containing the leg over point `i`, with the side of the pair it sits on.
    fn leg_members(&self, i: usize) -> Vec<(usize, usize)> {
        (0..self.faces.len())
            .filter_map(|f| {
                let (a, b) = self.faces[f].pair;
                if a == i {
                    Some((f, 0))
                } else if b == i {
                    Some((f, 1))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Split leg edges so that all discs through a leg carry the same vertices on it.
    fn common_subdivision(&mut self, x: &TriangleComplex, mut params: Vec<[Vec<f64>; 2]>) -> Result<()> {
        for i in 0..4 {
            let g = &self.leg_geodesics[i];
            let tol = 1e-9 * (1.0 + g.length);
            let members = self.leg_members(i);
            let mut all: Vec<f64> = members.iter().flat_map(|&(f, s)| params[f][s].clone()).collect();
            all.sort_by(f64::total_cmp);
            all.dedup_by(|a, b| (*a - *b).abs() <= tol);
            for &(f, s) in &members {
                for &p in &all {
                    let chain = &params[f][s];
                    if chain.iter().any(|q| (q - p).abs() <= tol) {
                        continue;
                    }
                    let Some(k) = chain.windows(2).position(|w| w[0] < p && p < w[1]) else {
                        return Err(Error::GluingMismatch(format!("leg {i} of disc {:?} ends early", self.faces[f].pair)));
                    };
                    let face = &mut self.faces[f];
                    let (u, v) = (face.legs[s][k], face.legs[s][k + 1]);
                    let e = edge_joining(&face.diagram, u, v)
                        .ok_or_else(|| Error::GluingMismatch("leg edge missing".into()))?;
                    let m = face.diagram.split_edge(x, e, g.point_at(x, p));
                    face.legs[s].insert(k + 1, m);
                    params[f][s].insert(k + 1, p);
                }
            }
            let lens: BTreeSet<usize> = members.iter().map(|&(f, s)| self.faces[f].legs[s].len()).collect();
            if lens.len() > 1 {
                return Err(Error::GluingMismatch(format!("leg {i} is subdivided differently in its discs")));
            }
            for &(f, s) in &members {
                let last = *params[f][s].last().unwrap();
                if (last - g.length).abs() > 1e-7 * (1.0 + g.length) {
                    return Err(Error::GluingMismatch(format!("leg {i} has length {last}, expected {}", g.length)));
                }
            }
        }
        Ok(())
    }

    /// Glue the given discs along their shared legs.
    pub fn glue(&self, which: &[usize]) -> Glued {
        let mut d = Diagram::default();
        let mut offset = HashMap::new();
        let mut face_of_tri = Vec::new();
        for &f in which {
            let src = &self.faces[f].diagram;
            let (vo, eo) = (d.verts.len(), d.edges.len());
            offset.insert(f, (vo, eo));
            d.verts.extend_from_slice(&src.verts);
            d.edges.extend(src.edges.iter().map(|e| crate::disc::DEdge { v: e.v.map(|v| v + vo), cell: e.cell }));
            d.tris.extend(src.tris.iter().map(|t| DTri { v: t.v.map(|v| v + vo), e: t.e.map(|e| e + eo), cell: t.cell }));
            d.marked.extend(src.marked.iter().map(|v| v + vo));
            face_of_tri.extend(std::iter::repeat(f).take(src.tris.len()));
        }
        let mut uf = UnionFind::new(d.verts.len());
        let mut leg_edges: Vec<Vec<usize>> = Vec::new();
        for i in 0..4 {
            let members: Vec<usize> = which.iter().copied().filter(|&f| self.faces[f].leg(i).is_some()).collect();
            if members.len() < 2 {
                continue;
            }
            let chains: Vec<Vec<usize>> =
                members.iter().map(|f| self.faces[*f].leg(i).unwrap().iter().map(|v| v + offset[f].0).collect()).collect();
            for c in &chains[1..] {
                for (a, b) in chains[0].iter().zip(c) {
                    uf.union(*a, *b);
                }
            }
            for k in 0..chains[0].len().saturating_sub(1) {
                let mut group = Vec::new();
                for (m, f) in members.iter().enumerate() {
                    let src = &self.faces[*f].diagram;
                    let l = self.faces[*f].leg(i).unwrap();
                    if let Some(e) = edge_joining(src, l[k], l[k + 1]) {
                        group.push(e + offset[f].1);
                    }
                    let _ = m;
                }
                leg_edges.push(group);
            }
        }
        for v in 0..d.verts.len() {
            let r = uf.find(v);
            merge_vertex(&mut d, r, v);
        }
        for group in leg_edges {
            for &e in &group[1..] {
                merge_edge(&mut d, group[0], e);
            }
        }
        d.marked.sort_unstable();
        d.marked.dedup();
        d.compact();
        Glued { diagram: d, face_of_tri }
    }

    /// The complex `Z` of all six discs.
    pub fn z(&self) -> Glued {
        self.glue(&[0, 1, 2, 3, 4, 5])
    }

    /// Discs of the spiky triangle on the three points other than `l`.
    pub fn face_triple(&self, l: usize) -> Vec<usize> {
        (0..6).filter(|&f| self.faces[f].pair.0 != l && self.faces[f].pair.1 != l).collect()
    }

    /// The spiky triangle `T` on the points other than `l`.
    pub fn spiky(&self, l: usize) -> Glued {
        self.glue(&self.face_triple(l))
    }

    /// Recover the legs of disc `f` after its diagram changed, from their image sequences.
    fn rechain(&mut self, x: &TriangleComplex, f: usize, images: [Vec<PointRef>; 2]) -> Result<()> {
        let face = &mut self.faces[f];
        let mut legs = [vec![], vec![]];
        for (s, seq) in images.iter().enumerate() {
            legs[s] = find_chain(x, &face.diagram, seq)
                .ok_or_else(|| Error::GluingMismatch(format!("disc {:?} lost a leg", face.pair)))?;
        }
        face.y = [legs[0][0], legs[1][0]];
        face.omega = *legs[0].last().unwrap();
        face.legs = legs;
        Ok(())
    }

    fn leg_images(&self, f: usize) -> [Vec<PointRef>; 2] {
        let face = &self.faces[f];
        face.legs.clone().map(|l| l.iter().map(|&v| face.diagram.verts[v]).collect())
    }
}

/// A path of vertices of `d` whose images follow `seq`, repeated images collapsed.
fn find_chain(x: &TriangleComplex, d: &Diagram, seq: &[PointRef]) -> Option<Vec<usize>> {
    let mut want: Vec<PointRef> = Vec::with_capacity(seq.len());
    for p in seq {
        if want.last().map_or(true, |q| !x.same_point(p, q, 1e-9)) {
            want.push(*p);
        }
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in &d.edges {
        if e.v[0] != e.v[1] {
            adj.entry(e.v[0]).or_default().push(e.v[1]);
            adj.entry(e.v[1]).or_default().push(e.v[0]);
        }
    }
    fn extend(x: &TriangleComplex, d: &Diagram, adj: &HashMap<usize, Vec<usize>>, want: &[PointRef], path: &mut Vec<usize>) -> bool {
        if path.len() == want.len() {
            return true;
        }
        let last = *path.last().unwrap();
        for &w in adj.get(&last).into_iter().flatten() {
            if !path.contains(&w) && x.same_point(&d.verts[w], &want[path.len()], 1e-9) {
                path.push(w);
                if extend(x, d, adj, want, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let starts: Vec<usize> = (0..d.verts.len()).filter(|&v| x.same_point(&d.verts[v], &want[0], 1e-9)).collect();
    for v in starts {
        let mut path = vec![v];
        if extend(x, d, &adj, &want, &mut path) {
            return Some(path);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum TetraMove {
    /// Fold moves inside one disc.
    WithinDisc { face: usize, moves: usize },
    /// Twin cells on the two sides of a shared leg edge, folded together and
    /// handed to the third disc on that leg.
    AcrossLeg { leg: usize, first: usize, second: usize, receiver: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TetraFoldReport {
    pub moves: Vec<TetraMove>,
    /// Cells of `Z` before the first move and after each move.
    pub cell_counts: Vec<usize>,
}

impl TetraFoldReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.cell_counts.windows(2).all(|w| w[1] < w[0])
    }
}

/// Triangles of `d` on edge `e`, each with its vertex opposite the edge.
fn tris_on(d: &Diagram, e: usize) -> Vec<(usize, usize)> {
    (0..d.tris.len())
        .filter_map(|t| {
            let k = (0..3).find(|&k| d.tris[t].e[k] == e)?;
            Some((t, d.tris[t].v[(k + 2) % 3]))
        })
        .collect()
}

/// Twin cells in two discs, both on edge `k` of the chain of leg `leg`.
#[derive(Debug, Clone, Copy)]
struct CrossTwins {
    leg: usize,
    k: usize,
    /// (disc, triangle) for each cell.
    cells: [(usize, usize); 2],
}

/// Twin cells across a shared leg.
///
/// Only cells that coincide exactly are found, and pairs whose fold would
/// close up an annulus are left alone.
// TODO: refine discs sharing a leg along each other's edges, so that images
// overlapping without coinciding (seen on tripod×interval) become twins.
fn cross_twins(x: &TriangleComplex, t: &DeflatedTetra) -> Option<CrossTwins> {
    for i in 0..4 {
        let members = t.leg_members(i);
        let len = t.faces[members[0].0].legs[members[0].1].len();
        for k in 0..len.saturating_sub(1) {
            let mut sides: Vec<(usize, usize, usize)> = Vec::new();
            for &(f, s) in &members {
                let face = &t.faces[f];
                let (u, v) = (face.legs[s][k], face.legs[s][k + 1]);
                if let Some(e) = edge_joining(&face.diagram, u, v) {
                    // an apex on the leg itself would close up an annulus
                    let cells = tris_on(&face.diagram, e).into_iter().filter(|&(_, c)| !face.legs[s].contains(&c));
                    sides.extend(cells.map(|(tri, c)| (f, tri, c)));
                }
            }
            for a in 0..sides.len() {
                for b in a + 1..sides.len() {
                    let ((fa, ta, ca), (fb, tb, cb)) = (sides[a], sides[b]);
                    let (da, db) = (&t.faces[fa].diagram, &t.faces[fb].diagram);
                    if fa != fb && da.tris[ta].cell == db.tris[tb].cell && x.same_point(&da.verts[ca], &db.verts[cb], 1e-9) {
                        return Some(CrossTwins { leg: i, k, cells: [(fa, ta), (fb, tb)] });
                    }
                }
            }
        }
    }
    None
}

/// Fold a pair of twin cells across a shared leg.
///
/// Both cells leave their discs, whose legs now run around the removed
/// cell, and one copy joins the third disc on the leg, whose leg follows the
/// same detour. The glued complex loses one cell.
fn fold_across(x: &TriangleComplex, t: &mut DeflatedTetra, tw: CrossTwins) -> Result<usize> {
    let (i, k) = (tw.leg, tw.k);
    let [(first, _), (second, _)] = tw.cells;
    let receiver = t
        .leg_members(i)
        .into_iter()
        .map(|m| m.0)
        .find(|&f| f != first && f != second)
        .ok_or_else(|| Error::AnnulusFoldStuck("leg has no third disc".into()))?;
    let mut apex = None;
    for (f, tri) in tw.cells {
        let face = &mut t.faces[f];
        let leg = face.leg(i).unwrap().clone();
        let (u, v) = (leg[k], leg[k + 1]);
        let d = &mut face.diagram;
        let e = edge_joining(d, u, v).unwrap();
        let c = tris_on(d, e).into_iter().find(|s| s.0 == tri).unwrap().1;
        if leg.contains(&c) {
            return Err(Error::AnnulusFoldStuck(format!("twin cells across leg {i} close up an annulus")));
        }
        apex = Some((d.verts[c], d.tris[tri].cell));
        d.tris.remove(tri);
        if d.edge_incidence()[e] == 0 {
            d.edges[e].v[0] = usize::MAX;
        }
        face.leg_mut(i).insert(k + 1, c);
        let map = face.diagram.compact();
        for l in face.legs.iter_mut() {
            for v in l.iter_mut() {
                *v = map[*v];
            }
        }
        face.y = [face.legs[0][0], face.legs[1][0]];
        face.omega = *face.legs[0].last().unwrap();
    }
    let (apex, cell) = apex.unwrap();
    let face = &mut t.faces[receiver];
    let leg = face.leg(i).unwrap().clone();
    let (u, v) = (leg[k], leg[k + 1]);
    let d = &mut face.diagram;
    let e = edge_joining(d, u, v).ok_or_else(|| Error::GluingMismatch("leg edge missing".into()))?;
    let c = d.add_vertex(apex);
    let uc = d.add_edge(x, u, c);
    let cv = d.add_edge(x, c, v);
    d.add_tri([u, v, c], [e, cv, uc], cell);
    face.leg_mut(i).insert(k + 1, c);
    Ok(receiver)
}

/// Fold every disc to a near-immersion, then fold twin cells across shared legs.
pub fn fold_tetra(x: &TriangleComplex, mut t: DeflatedTetra) -> Result<(DeflatedTetra, TetraFoldReport)> {
    let mut report = TetraFoldReport { moves: vec![], cell_counts: vec![t.z().diagram.num_cells()] };
    loop {
        if let Some(f) = (0..6).find(|&f| find_move(x, &t.faces[f].diagram).is_some()) {
            let images = t.leg_images(f);
            let (d, r) = fold(x, t.faces[f].diagram.clone());
            t.faces[f].diagram = d;
            t.rechain(x, f, images)?;
            report.moves.push(TetraMove::WithinDisc { face: f, moves: r.moves.len() });
        } else if let Some(tw) = cross_twins(x, &t) {
            let receiver = fold_across(x, &mut t, tw)?;
            let [(first, _), (second, _)] = tw.cells;
            report.moves.push(TetraMove::AcrossLeg { leg: tw.leg, first, second, receiver });
        } else {
            break;
        }
        report.cell_counts.push(t.z().diagram.num_cells());
        if !report.strictly_decreasing() {
            return Err(Error::AnnulusFoldStuck("a fold move did not reduce the cell count".into()));
        }
    }
    Ok((t, report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TetraReport {
    /// Set when the quadruple is lanky and there is no tetrahedron to check.
    pub skipped: Option<String>,
    /// (a) Each disc maps injectively.
    pub discs_injective: [bool; 6],
    /// (b) Overlapping triangle pairs from different discs.
    pub cross_overlaps: usize,
    pub z_injective: bool,
    /// Each glued triple is a disc with χ = 1.
    pub spiky_ok: [bool; 4],
    /// (c) `o` lies in every spiky triangle.
    pub o_in_all: bool,
    /// (c) Sampled points other than `o` lying in all four spiky triangles.
    pub extra_points: usize,
    /// (d) Distance from `o` to the 2-median returned by the solver.
    pub median_distance: Option<f64>,
    pub median_ok: bool,
}

impl TetraReport {
    fn skipped(why: &str) -> Self {
        TetraReport {
            skipped: Some(why.to_string()),
            discs_injective: [true; 6],
            cross_overlaps: 0,
            z_injective: true,
            spiky_ok: [true; 4],
            o_in_all: true,
            extra_points: 0,
            median_distance: None,
            median_ok: true,
        }
    }

    pub fn intersection_ok(&self) -> bool {
        self.o_in_all && self.extra_points == 0
    }

    /// Checks (a), (c) and (d) plus spikiness; leaves out (b), which depends on
    /// folding overlaps across legs that the fold does not yet reach.
    pub fn conclusions_ok(&self) -> bool {
        self.skipped.is_some()
            || (self.discs_injective.iter().all(|&b| b)
                && self.spiky_ok.iter().all(|&b| b)
                && self.intersection_ok()
                && self.median_ok)
    }

    pub fn all_ok(&self) -> bool {
        self.skipped.is_some()
            || (self.discs_injective.iter().all(|&b| b)
                && self.z_injective
                && self.spiky_ok.iter().all(|&b| b)
                && self.intersection_ok()
                && self.median_ok)
    }
}

fn ccw(mut p: [P2; 3]) -> [P2; 3] {
    if orient(p[0], p[1], p[2]) < 0.0 {
        p.swap(1, 2);
    }
    p
}

/// Triangle pairs from different discs whose images overlap.
fn cross_overlaps(x: &TriangleComplex, t: &DeflatedTetra) -> usize {
    let mut by_cell: HashMap<usize, Vec<(usize, [P2; 3])>> = HashMap::new();
    for (f, face) in t.faces.iter().enumerate() {
        let d = &face.diagram;
        for k in 0..d.tris.len() {
            by_cell.entry(d.tris[k].cell).or_default().push((f, ccw(d.corner_positions(x, k))));
        }
    }
    let mut n = 0;
    for list in by_cell.values() {
        for a in 0..list.len() {
            for b in a + 1..list.len() {
                if list[a].0 != list[b].0 && convex_overlap(&list[a].1, &list[b].1, 1e-9) {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Points near `o` and on a coarse grid lying in all four spiky triangles, other than `o` itself.
fn extra_intersection_points(x: &TriangleComplex, o: &PointRef, images: &[DiscImage]) -> usize {
    let in_all = |p: &PointRef| images.iter().all(|w| w.contains(x, p, 0.0));
    let mut extra = 0;
    let star: Vec<usize> = x
        .star(o.carrier())
        .into_iter()
        .filter_map(|c| if let Cell::Tri(t) = c { Some(t) } else { None })
        .collect();
    for &t in &star {
        let Some(q) = x.tri_pos(t, o) else { continue };
        let l = x.tris[t].layout;
        for r in [1e-2, 1e-3, 1e-4, 1e-5] {
            for s in 0..64 {
                let a = 2.0 * PI * (s as f64 + 0.5) / 64.0;
                let p = q + P2::new(a.cos(), a.sin()) * r;
                if crate::geom::in_convex(&ccw(l), p, 0.0) && in_all(&x.point_at(t, p)) {
                    extra += 1;
                }
            }
        }
    }
    // coarse raster away from o
    let h = 0.05;
    let mut cells = BTreeSet::new();
    for w in images {
        cells.extend(crate::median::audit::image_cells(x, w));
    }
    let raster = crate::median::audit::Raster::new(x, &cells, h);
    for k in 0..raster.len() {
        let p = raster.point(k);
        if in_all(&p) && point_dist(x, &p, o) > 2.0 * h {
            extra += 1;
        }
    }
    extra
}

/// Check the claims about a folded tetrahedron.
pub fn verify_tetra(x: &TriangleComplex, t: &DeflatedTetra, tol: f64) -> Result<TetraReport> {
    let mut discs_injective = [false; 6];
    for (f, face) in t.faces.iter().enumerate() {
        discs_injective[f] = find_overlaps(x, &face.diagram).is_empty();
    }
    let cross = cross_overlaps(x, t);
    let mut spiky_ok = [false; 4];
    let mut images = Vec::with_capacity(4);
    for (l, ok) in spiky_ok.iter_mut().enumerate() {
        let g = t.spiky(l).diagram;
        *ok = g.is_disc();
        images.push(DiscImage::new(x, &g));
    }
    let o_in_all = images.iter().all(|w| w.contains(x, &t.o, EPS_GEO));
    let extra_points = extra_intersection_points(x, &t.o, &images);
    let m = median2(x, &t.points, tol)?;
    let median_distance = match m.location {
        Location::Point { point } => Some(point_dist(x, &point, &t.o)),
        Location::Segment { .. } => None,
    };
    Ok(TetraReport {
        skipped: None,
        discs_injective,
        cross_overlaps: cross,
        z_injective: cross == 0 && discs_injective.iter().all(|&b| b),
        spiky_ok,
        o_in_all,
        extra_points,
        median_ok: median_distance.is_some_and(|d| d <= 2.0 * tol),
        median_distance,
    })
}

/// Solve, build, fold and verify; lanky quadruples are reported as skipped.
pub fn verify_quadruple(x: &TriangleComplex, points: &[PointRef; 4], tol: f64) -> Result<(TetraReport, Option<TetraFoldReport>)> {
    let m = median2(x, points, tol)?;
    let Location::Point { point } = m.location else {
        return Ok((TetraReport::skipped("lanky quadruple: the 2-median is a segment"), None));
    };
    let built = build_deflated(x, points, &point, tol)?;
    let (folded, report) = fold_tetra(x, built)?;
    Ok((verify_tetra(x, &folded, tol)?, Some(report)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point, tripod_interval};
    use crate::disc::fixtures::{boundary_sides, doubled_cell};

    fn generic(g: &crate::builders::ProductComplex) -> [PointRef; 4] {
        [(0.3, 0.2), (3.7, 0.6), (3.1, 3.4), (0.4, 2.9)].map(|(a, b)| grid_point(g, a, b))
    }

    #[test]
    fn planar_tetra_glues_into_spiky_discs() {
        let g = flat_grid(4);
        let x = &g.complex;
        let pts = generic(&g);
        let o = median2(x, &pts, 1e-7).unwrap().point().unwrap();
        let t = build_deflated(x, &pts, &o, 0.0).unwrap();
        for i in 0..4 {
            let lens: BTreeSet<usize> = t.leg_members(i).iter().map(|&(f, s)| t.faces[f].legs[s].len()).collect();
            assert_eq!(lens.len(), 1, "leg {i}");
        }
        assert_eq!(t.z().diagram.euler_characteristic(), 1);
        for l in 0..4 {
            let s = t.spiky(l).diagram;
            assert!(s.is_disc(), "spiky {l}");
        }
        let (t, r) = fold_tetra(x, t).unwrap();
        assert!(r.moves.is_empty());
        let v = verify_tetra(x, &t, 1e-6).unwrap();
        assert!(v.all_ok(), "{v:?}");
    }

    #[test]
    fn a_doubled_cell_folds_inside_its_disc() {
        let g = flat_grid(4);
        let x = &g.complex;
        let pts = generic(&g);
        let o = median2(x, &pts, 1e-7).unwrap().point().unwrap();
        let mut t = build_deflated(x, &pts, &o, 0.0).unwrap();
        let clean = t.z().diagram.num_cells();
        let f = 3;
        let d = &t.faces[f].diagram;
        let on_leg = |v: usize| t.faces[f].legs.iter().any(|l| l.contains(&v) && v != t.faces[f].y[0] && v != t.faces[f].y[1]);
        let (tri, k) = boundary_sides(d)
            .into_iter()
            .find(|&(tri, k)| {
                let v = d.tris[tri].v;
                !on_leg(v[k]) && !on_leg(v[(k + 1) % 3])
            })
            .unwrap();
        t.faces[f].diagram = doubled_cell(&g, d, tri, k);
        let (t, r) = fold_tetra(x, t).unwrap();
        assert_eq!(r.moves.len(), 1);
        assert!(matches!(r.moves[0], TetraMove::WithinDisc { face: 3, .. }));
        assert!(r.strictly_decreasing());
        assert!(t.z().diagram.num_cells() < clean);
        assert!(verify_tetra(x, &t, 1e-6).unwrap().all_ok());
    }

    #[test]
    fn twin_cells_across_a_leg_move_to_the_third_disc() {
        let g = flat_grid(4);
        let x = &g.complex;
        let pts = generic(&g);
        let o = median2(x, &pts, 1e-7).unwrap().point().unwrap();
        let mut t = build_deflated(x, &pts, &o, 0.0).unwrap();
        // copy the first cell of disc (0,1) along leg 1 onto the same leg edge of disc (1,2)
        let (a, b) = (0, 3);
        let la = t.faces[a].leg(1).unwrap().clone();
        let k = (0..la.len() - 1)
            .find(|&k| {
                let d = &t.faces[a].diagram;
                edge_joining(d, la[k], la[k + 1]).is_some_and(|e| !tris_on(d, e).is_empty())
            })
            .unwrap();
        let da = &t.faces[a].diagram;
        let (tri, c) = tris_on(da, edge_joining(da, la[k], la[k + 1]).unwrap())[0];
        let (apex, cell) = (da.verts[c], da.tris[tri].cell);
        let lb = t.faces[b].leg(1).unwrap().clone();
        let db = &mut t.faces[b].diagram;
        let e = edge_joining(db, lb[k], lb[k + 1]).unwrap();
        let c2 = db.add_vertex(apex);
        let uc = db.add_edge(x, lb[k], c2);
        let cv = db.add_edge(x, c2, lb[k + 1]);
        db.add_tri([lb[k], lb[k + 1], c2], [e, cv, uc], cell);
        let (t, r) = fold_tetra(x, t).unwrap();
        assert!(r.moves.iter().any(|m| matches!(m, TetraMove::AcrossLeg { leg: 1, receiver: 4, .. })), "{r:?}");
        assert!(r.strictly_decreasing());
        assert!(cross_twins(x, &t).is_none());
        let lens: BTreeSet<usize> = t.leg_members(1).iter().map(|&(f, s)| t.faces[f].legs[s].len()).collect();
        assert_eq!(lens.len(), 1);
    }

    #[test]
    fn outside_point_is_rejected() {
        let g = flat_grid(4);
        let pts = generic(&g);
        let far = grid_point(&g, 3.9, 0.05);
        assert!(matches!(build_deflated(&g.complex, &pts, &far, 1e-6), Err(Error::NotMember(_))));
    }

    #[test]
    fn lanky_quadruple_is_skipped() {
        let g = flat_grid(4);
        let pts = [(0.0, 0.0), (3.0, 0.0), (1.0, 0.0), (2.0, 0.0)].map(|(a, b)| grid_point(&g, a, b));
        let (r, fold) = verify_quadruple(&g.complex, &pts, 1e-6).unwrap();
        assert!(r.skipped.is_some() && fold.is_none());
    }

    #[test]
    fn tripod_interval_tetra_verifies() {
        let g = tripod_interval();
        let x = &g.complex;
        let n = x.tris.len();
        let pts = [(0, [0.2, 0.3, 0.5]), (n / 3, [0.6, 0.2, 0.2]), (2 * n / 3, [0.3, 0.4, 0.3]), (n - 1, [0.1, 0.1, 0.8])]
            .map(|(tri, bary)| PointRef::Tri { tri, bary });
        let (r, fold) = verify_quadruple(x, &pts, 1e-6).unwrap();
        assert!(fold.unwrap().strictly_decreasing());
        assert!(r.discs_injective.iter().all(|&b| b), "{r:?}");
        assert!(r.spiky_ok.iter().all(|&b| b), "{r:?}");
        assert!(r.intersection_ok() && r.median_ok, "{r:?}");
    }
}
