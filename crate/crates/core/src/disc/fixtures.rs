//! Small diagrams over flat grids for exercising the fold moves.
//!
//! Each modifier takes an embedded disc and adds a defect that one or two
//! fold moves remove again: a doubled cell folded over a boundary edge, an
//! edge collapsed to a point, a loop edge, or a slit whose two sides are a
//! double edge.

use std::collections::HashMap;

use crate::builders::ProductComplex;
use crate::complex::PointRef;

use super::{DTri, Diagram};

/// The `n × n` corner block of a product of paths, mapped by the identity.
pub fn grid_block(g: &ProductComplex, n: usize) -> Diagram {
    let x = &g.complex;
    let mut d = Diagram::default();
    let mut vid = HashMap::new();
    for i in 0..=n {
        for j in 0..=n {
            vid.insert((i, j), d.add_vertex(PointRef::Vertex(g.vertex(i, j))));
        }
    }
    for (t, tri) in x.tris.iter().enumerate() {
        let vs: Vec<(usize, usize)> =
            tri.verts.iter().map(|&v| (v / g.h.vertices.len(), v % g.h.vertices.len())).collect();
        if vs.iter().all(|&(i, j)| i <= n && j <= n) {
            let v = [vid[&vs[0]], vid[&vs[1]], vid[&vs[2]]];
            let e = [d.edge_between(x, v[0], v[1]), d.edge_between(x, v[1], v[2]), d.edge_between(x, v[2], v[0])];
            d.add_tri(v, e, t);
        }
    }
    d
}

/// Triangles with an edge on the boundary, as (triangle, side index).
pub fn boundary_sides(d: &Diagram) -> Vec<(usize, usize)> {
    let inc = d.edge_incidence();
    let mut out = Vec::new();
    for (t, tri) in d.tris.iter().enumerate() {
        for k in 0..3 {
            if inc[tri.e[k]] == 1 {
                out.push((t, k));
            }
        }
    }
    out
}

/// Interior edges of a diagram.
pub fn interior_edges(d: &Diagram) -> Vec<usize> {
    let inc = d.edge_incidence();
    (0..d.edges.len()).filter(|&e| inc[e] == 2).collect()
}

/// Glue a copy of triangle `t` onto its boundary side `k`.
pub fn doubled_cell(g: &ProductComplex, d: &Diagram, t: usize, k: usize) -> Diagram {
    let x = &g.complex;
    let mut d = d.clone();
    let tri: DTri = d.tris[t];
    let (a, b, c) = (tri.v[k], tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
    let c2 = d.add_vertex(d.verts[c]);
    let bc = d.add_edge(x, b, c2);
    let ca = d.add_edge(x, c2, a);
    // opposite orientation, glued along a b
    d.add_tri([b, a, c2], [tri.e[k], ca, bc], tri.cell);
    d
}

/// Split corner `k` of triangle `t` (whose side `k` is on the boundary) by an edge mapped to a point.
pub fn collapsed_edge(g: &ProductComplex, d: &Diagram, t: usize, k: usize) -> Diagram {
    let x = &g.complex;
    let mut d = d.clone();
    let tri = d.tris[t];
    let (a, b, c) = (tri.v[k], tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
    let a2 = d.add_vertex(d.verts[a]);
    let short = d.add_edge(x, a, a2);
    let a2b = d.add_edge(x, a2, b);
    let a2c = d.add_edge(x, a2, c);
    let ca = tri.e[(k + 2) % 3];
    let bc = tri.e[(k + 1) % 3];
    // (a, a2, c) has a segment image; (a2, b, c) replaces the old triangle
    d.tris[t] = DTri { v: [a2, b, c], e: [a2b, bc, a2c], cell: tri.cell };
    d.add_tri([a, a2, c], [short, a2c, ca], tri.cell);
    // the old boundary side a b is gone
    d.edges[tri.e[k]].v[0] = usize::MAX;
    d.compact();
    d
}

/// Attach a triangle with a loop edge along boundary side `k` of triangle `t`.
pub fn loop_edge(g: &ProductComplex, d: &Diagram, t: usize, k: usize) -> Diagram {
    let x = &g.complex;
    let mut d = d.clone();
    let tri = d.tris[t];
    let (a, b) = (tri.v[k], tri.v[(k + 1) % 3]);
    let lp = d.add_edge(x, a, a);
    let ab2 = d.add_edge(x, a, b);
    d.add_tri([a, a, b], [lp, ab2, tri.e[k]], tri.cell);
    d
}

/// Cut interior edge `e` open into two edges with the same ends and image.
pub fn slit(g: &ProductComplex, d: &Diagram, e: usize) -> Diagram {
    let x = &g.complex;
    let mut d = d.clone();
    let [a, b] = d.edges[e].v;
    let copy = d.add_edge(x, a, b);
    if let Some(t) = d.tris.iter().rposition(|t| t.e.contains(&e)) {
        for s in d.tris[t].e.iter_mut() {
            if *s == e {
                *s = copy;
            }
        }
    }
    d
}

/// `count` defective discs over flat grids, cycling through the defect kinds
/// and combining two defects from the twentieth on.
pub fn adversarial(grids: &[ProductComplex], count: usize) -> Vec<(String, usize, Diagram)> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let gi = i % grids.len();
        let g = &grids[gi];
        let n = g.g.edges.len();
        let base = grid_block(g, n);
        let (first, d) = apply(g, &base, i);
        let (name, d) = if i >= 20 {
            let (second, d) = apply(g, &d, i / 4 + 1);
            (format!("{first}+{second}"), d)
        } else {
            (first.to_string(), d)
        };
        out.push((name, gi, d));
    }
    out
}

fn apply(g: &ProductComplex, d: &Diagram, i: usize) -> (&'static str, Diagram) {
    let sides = boundary_sides(d);
    let (t, k) = sides[(7 * i + 3) % sides.len()];
    match i % 4 {
        0 => ("doubled_cell", doubled_cell(g, d, t, k)),
        1 => ("collapsed_edge", collapsed_edge(g, d, t, k)),
        2 => ("loop_edge", loop_edge(g, d, t, k)),
        _ => {
            let inner = interior_edges(d);
            ("double_edge", slit(g, d, inner[(5 * i + 1) % inner.len()]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::flat_grid;
    use crate::disc::fill::find_overlaps;
    use crate::disc::fold::{fold, is_near_immersion};

    #[test]
    fn single_defects_fold_back() {
        let g = flat_grid(3);
        let base = grid_block(&g, 3);
        let (t, k) = boundary_sides(&base)[4];
        let e = interior_edges(&base)[5];
        for (name, d) in [
            ("collapsed", collapsed_edge(&g, &base, t, k)),
            ("loop", loop_edge(&g, &base, t, k)),
            ("slit", slit(&g, &base, e)),
        ] {
            assert!(!is_near_immersion(&g.complex, &d), "{name}");
            let (f, r) = fold(&g.complex, d);
            assert!(r.strictly_decreasing(), "{name}");
            assert!(f.is_disc(), "{name}");
            assert_eq!(f.tris.len(), base.tris.len(), "{name}");
            assert_eq!(f.num_cells(), base.num_cells(), "{name}");
        }
    }

    #[test]
    fn doubled_cell_cancels_with_its_twin() {
        let g = flat_grid(3);
        let base = grid_block(&g, 3);
        let (t, k) = boundary_sides(&base)[4];
        let (f, r) = fold(&g.complex, doubled_cell(&g, &base, t, k));
        assert_eq!(r.moves.len(), 1);
        assert_eq!(f.tris.len(), base.tris.len() - 1);
        assert!(is_near_immersion(&g.complex, &f));
    }

    #[test]
    fn adversarial_fixtures_reach_injective_near_immersions() {
        let grids = [flat_grid(2), flat_grid(3), flat_grid(4)];
        let all = adversarial(&grids, 30);
        assert_eq!(all.len(), 30);
        for (name, gi, d) in all {
            let x = &grids[gi].complex;
            let (f, r) = fold(x, d);
            assert!(!r.moves.is_empty(), "{name}");
            assert!(r.strictly_decreasing(), "{name}");
            assert!(is_near_immersion(x, &f), "{name}");
            assert!(find_overlaps(x, &f).is_empty(), "{name}");
        }
    }
}
