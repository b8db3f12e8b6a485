//! Folding a diagram to a near-immersion.
//!
//! Every move removes cells, so folding terminates; the moves are tried in a
//! fixed priority order: loop edges, double edges, collapsed edges, twin
//! cells, and flat cells on the boundary.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::complex::TriangleComplex;

use super::refine::SNAP;
use super::{Diagram, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum FoldMove {
    /// A loop edge (mapped to a point) removed with its triangles.
    LoopEdge { edge: usize },
    /// Two edges with the same ends and image identified; enclosed cells dropped.
    DoubleEdge { kept: usize, removed: usize },
    /// An edge with distinct ends but a point image contracted.
    CollapsedEdge { edge: usize },
    /// Two triangles across an edge with the same image folded together.
    TwinCells { first: usize, second: usize },
    /// A triangle with a segment image removed from the boundary.
    FlatCell { tri: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FoldReport {
    pub moves: Vec<FoldMove>,
    /// Cell count before the first move and after each move.
    pub cell_counts: Vec<usize>,
    pub euler: Vec<i64>,
}

impl FoldReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.cell_counts.windows(2).all(|w| w[1] < w[0])
    }
}

pub(crate) fn same_vertex_image(x: &TriangleComplex, d: &Diagram, a: usize, b: usize) -> bool {
    a == b || x.same_point(&d.verts[a], &d.verts[b], SNAP)
}


fn same_tri_image(x: &TriangleComplex, d: &Diagram, s: usize, t: usize) -> bool {
    let (p, q) = (&d.tris[s], &d.tris[t]);
    p.cell == q.cell && p.v.iter().all(|&a| q.v.iter().any(|&b| same_vertex_image(x, d, a, b)))
}

fn is_flat(x: &TriangleComplex, d: &Diagram, t: usize) -> bool {
    let p = d.corner_positions(x, t);
    let area = crate::geom::orient(p[0], p[1], p[2]).abs() / 2.0;
    let diam = p[0].dist(p[1]).max(p[1].dist(p[2])).max(p[0].dist(p[2]));
    area <= SNAP * diam.max(SNAP)
}

/// Replace vertex `gone` by `keep` everywhere.
pub(crate) fn merge_vertex(d: &mut Diagram, keep: usize, gone: usize) {
    if keep == gone {
        return;
    }
    for e in d.edges.iter_mut() {
        for v in e.v.iter_mut() {
            if *v == gone {
                *v = keep;
            }
        }
    }
    for t in d.tris.iter_mut() {
        for v in t.v.iter_mut() {
            if *v == gone {
                *v = keep;
            }
        }
    }
    for m in d.marked.iter_mut() {
        if *m == gone {
            *m = keep;
        }
    }
}

/// Replace edge `gone` by `keep` in every triangle and drop it.
pub(crate) fn merge_edge(d: &mut Diagram, keep: usize, gone: usize) {
    if keep == gone {
        return;
    }
    for t in d.tris.iter_mut() {
        for e in t.e.iter_mut() {
            if *e == gone {
                *e = keep;
            }
        }
    }
    d.edges[gone].v[0] = usize::MAX;
}

fn remove_tris(d: &mut Diagram, gone: &BTreeSet<usize>) {
    let mut k = 0;
    d.tris.retain(|_| {
        let keep = !gone.contains(&k);
        k += 1;
        keep
    });
}

/// Edge of triangle `t` joining `a` and `b` (other than `not`).
fn tri_edge(d: &Diagram, t: usize, a: usize, b: usize, not: usize) -> Option<usize> {
    let tri = &d.tris[t];
    (0..3)
        .find(|&k| {
            let (p, q) = (tri.v[k], tri.v[(k + 1) % 3]);
            tri.e[k] != not && ((p == a && q == b) || (p == b && q == a))
        })
        .map(|k| tri.e[k])
}

fn third_vertex(d: &Diagram, t: usize, a: usize, b: usize) -> usize {
    let tri = &d.tris[t];
    *tri.v.iter().find(|&&v| v != a && v != b).unwrap_or(&tri.v[0])
}

/// Drop triangles in closed components (separated from the boundary).
fn drop_closed_components(d: &mut Diagram) {
    let inc = d.edge_incidence();
    let n = d.tris.len();
    let mut uf = UnionFind::new(n);
    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (t, tri) in d.tris.iter().enumerate() {
        for &e in &tri.e {
            by_edge.entry(e).or_default().push(t);
        }
    }
    for (e, ts) in &by_edge {
        if inc[*e] == 2 && ts.len() == 2 {
            uf.union(ts[0], ts[1]);
        }
    }
    let mut open = BTreeSet::new();
    for (t, tri) in d.tris.iter().enumerate() {
        if tri.e.iter().any(|&e| inc[e] == 1) {
            open.insert(uf.find(t));
        }
    }
    let gone: BTreeSet<usize> = (0..n).filter(|&t| !open.contains(&uf.find(t))).collect();
    if gone.len() < n {
        remove_tris(d, &gone);
        // edges used only by removed triangles go too
        let mut used = vec![false; d.edges.len()];
        for t in &d.tris {
            for &e in &t.e {
                used[e] = true;
            }
        }
        for (e, ts) in by_edge {
            if !used[e] && !ts.is_empty() {
                d.edges[e].v[0] = usize::MAX;
            }
        }
    }
}

/// Detect the first applicable move without changing the diagram.
pub fn find_move(x: &TriangleComplex, d: &Diagram) -> Option<FoldMove> {
    if let Some(e) = d.edges.iter().position(|e| e.v[0] == e.v[1]) {
        return Some(FoldMove::LoopEdge { edge: e });
    }
    let inc = d.edge_incidence();
    // two boundary edges may only be zipped up while there is a hole to close
    let open = d.euler_characteristic() < 1;
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, e) in d.edges.iter().enumerate() {
        by_pair.entry((e.v[0].min(e.v[1]), e.v[0].max(e.v[1]))).or_default().push(i);
    }
    let mut pairs: Vec<_> = by_pair.into_iter().collect();
    pairs.sort();
    for (_, list) in &pairs {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let (e, f) = (list[i], list[j]);
                let zip = inc[e] == 2 || inc[f] == 2 || (open && inc[e] == 1 && inc[f] == 1);
                if d.edges[e].cell == d.edges[f].cell && zip {
                    return Some(FoldMove::DoubleEdge { kept: e, removed: f });
                }
            }
        }
    }
    for (i, e) in d.edges.iter().enumerate() {
        if same_vertex_image(x, d, e.v[0], e.v[1]) {
            return Some(FoldMove::CollapsedEdge { edge: i });
        }
    }
    let mut on_edge: Vec<Vec<usize>> = vec![Vec::new(); d.edges.len()];
    for (t, tri) in d.tris.iter().enumerate() {
        for &e in &tri.e {
            on_edge[e].push(t);
        }
    }
    for ts in &on_edge {
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                if ts[i] != ts[j] && same_tri_image(x, d, ts[i], ts[j]) {
                    return Some(FoldMove::TwinCells { first: ts[i], second: ts[j] });
                }
            }
        }
    }
    for t in 0..d.tris.len() {
        if is_flat(x, d, t) {
            // the longest side must be on the boundary
            let p = d.corner_positions(x, t);
            let k = (0..3).max_by(|&a, &b| p[a].dist(p[(a + 1) % 3]).total_cmp(&p[b].dist(p[(b + 1) % 3]))).unwrap();
            if inc[d.tris[t].e[k]] == 1 {
                return Some(FoldMove::FlatCell { tri: t });
            }
        }
    }
    None
}

/// Apply one fold move, if any applies.
pub fn fold_step(x: &TriangleComplex, d: &mut Diagram) -> Option<FoldMove> {
    let mv = find_move(x, d)?;
    match mv {
        FoldMove::LoopEdge { edge } => {
            let ts: Vec<usize> = (0..d.tris.len()).filter(|&t| d.tris[t].e.contains(&edge)).collect();
            for &t in &ts {
                let tri = d.tris[t];
                let others: Vec<usize> = tri.e.iter().copied().filter(|&e| e != edge).collect();
                if others.len() == 2 {
                    merge_edge(d, others[0], others[1]);
                }
            }
            remove_tris(d, &ts.into_iter().collect());
            d.edges[edge].v[0] = usize::MAX;
        }
        FoldMove::DoubleEdge { kept, removed } => {
            // the ends already agree and triangles record their own vertices
            merge_edge(d, kept, removed);
            drop_closed_components(d);
        }
        FoldMove::CollapsedEdge { edge } => {
            let [u, v] = d.edges[edge].v;
            let ts: Vec<usize> = (0..d.tris.len()).filter(|&t| d.tris[t].e.contains(&edge)).collect();
            for &t in &ts {
                let w = third_vertex(d, t, u, v);
                let e1 = tri_edge(d, t, u, w, edge);
                let e2 = tri_edge(d, t, v, w, edge);
                if let (Some(e1), Some(e2)) = (e1, e2) {
                    merge_edge(d, e1, e2);
                }
            }
            remove_tris(d, &ts.into_iter().collect());
            d.edges[edge].v[0] = usize::MAX;
            merge_vertex(d, u, v);
        }
        FoldMove::TwinCells { first, second } => {
            let (s, t) = (d.tris[first], d.tris[second]);
            let shared = *s.e.iter().find(|e| t.e.contains(e)).unwrap();
            let [a, b] = d.edges[shared].v;
            let c = third_vertex(d, first, a, b);
            let c2 = third_vertex(d, second, a, b);
            let ac = tri_edge(d, first, a, c, shared);
            let bc = tri_edge(d, first, b, c, shared);
            let ac2 = tri_edge(d, second, a, c2, shared);
            let bc2 = tri_edge(d, second, b, c2, shared);
            remove_tris(d, &[first, second].into_iter().collect());
            merge_vertex(d, c, c2);
            if let (Some(p), Some(q)) = (ac, ac2) {
                merge_edge(d, p, q);
            }
            if let (Some(p), Some(q)) = (bc, bc2) {
                merge_edge(d, p, q);
            }
            if d.edge_incidence()[shared] == 0 {
                d.edges[shared].v[0] = usize::MAX;
            }
        }
        FoldMove::FlatCell { tri } => {
            let p = d.corner_positions(x, tri);
            let k = (0..3).max_by(|&a, &b| p[a].dist(p[(a + 1) % 3]).total_cmp(&p[b].dist(p[(b + 1) % 3]))).unwrap();
            let long = d.tris[tri].e[k];
            remove_tris(d, &[tri].into_iter().collect());
            d.edges[long].v[0] = usize::MAX;
        }
    }
    d.compact();
    Some(mv)
}

/// Fold to a fixpoint.
pub fn fold(x: &TriangleComplex, mut d: Diagram) -> (Diagram, FoldReport) {
    let mut report = FoldReport { moves: Vec::new(), cell_counts: vec![d.num_cells()], euler: vec![d.euler_characteristic()] };
    while let Some(mv) = fold_step(x, &mut d) {
        report.moves.push(mv);
        report.cell_counts.push(d.num_cells());
        report.euler.push(d.euler_characteristic());
    }
    (d, report)
}

/// Whether no fold move applies.
pub fn is_near_immersion(x: &TriangleComplex, d: &Diagram) -> bool {
    find_move(x, d).is_none()
}
