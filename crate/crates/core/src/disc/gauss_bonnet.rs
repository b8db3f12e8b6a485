//! Combinatorial Gauss–Bonnet for diagrams.
//!
//! The curvature at a vertex is `(2 − χ(link)) π − Σ corner angles`, where the
//! link has a node per edge end and an arc per triangle corner. For a circle
//! link this is the usual interior curvature `2π − Σα`, for an arc it is the
//! boundary turning `π − Σα`. Summed over all vertices it equals `2π χ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::complex::TriangleComplex;
use crate::EPS_ANG;

use super::Diagram;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curvature {
    /// Curvature at vertices whose link is a circle.
    pub interior: Vec<(usize, f64)>,
    /// Curvature at the remaining vertices.
    pub boundary: Vec<(usize, f64)>,
    pub chi: i64,
    /// `|Σ curvature − 2π χ|`.
    pub residual: f64,
    /// Interior curvature is non-positive and so is the boundary curvature away from marked vertices.
    pub sign_ok: bool,
    pub worst_interior: f64,
    pub worst_boundary: f64,
}

pub fn gauss_bonnet(x: &TriangleComplex, d: &Diagram) -> Curvature {
    let n = d.verts.len();
    let mut ends = vec![0i64; n];
    for e in &d.edges {
        ends[e.v[0]] += 1;
        ends[e.v[1]] += 1;
    }
    let mut corners = vec![0i64; n];
    let mut angle = vec![0.0f64; n];
    for t in 0..d.tris.len() {
        let a = d.corner_angles(x, t);
        for k in 0..3 {
            let v = d.tris[t].v[k];
            corners[v] += 1;
            angle[v] += a[k];
        }
    }
    let links = d.vertex_links(x);
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut total = 0.0;
    let (mut worst_interior, mut worst_boundary) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in 0..n {
        let chi_link = ends[v] - corners[v];
        let k = (2 - chi_link) as f64 * PI - angle[v];
        total += k;
        if links[v].is_circle {
            interior.push((v, k));
            worst_interior = worst_interior.max(k);
        } else {
            boundary.push((v, k));
            if !d.marked.contains(&v) {
                worst_boundary = worst_boundary.max(k);
            }
        }
    }
    let chi = d.euler_characteristic();
    let residual = (total - 2.0 * PI * chi as f64).abs();
    let sign_ok = worst_interior <= EPS_ANG && worst_boundary <= EPS_ANG;
    Curvature { interior, boundary, chi, residual, sign_ok, worst_interior, worst_boundary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::flat_grid;
    use crate::disc::fixtures::grid_block;

    #[test]
    fn flat_block_has_zero_interior_curvature() {
        let g = flat_grid(4);
        let d = grid_block(&g, 3);
        let c = gauss_bonnet(&g.complex, &d);
        assert_eq!(c.chi, 1);
        assert!(c.residual < 1e-12, "{}", c.residual);
        assert_eq!(c.interior.len(), 4);
        assert!(c.interior.iter().all(|&(_, k)| k.abs() < 1e-12));
    }

    #[test]
    fn single_triangle_turns_by_two_pi() {
        let g = flat_grid(1);
        let x = &g.complex;
        let mut d = Diagram::default();
        let v = x.tris[0].verts.map(|w| d.add_vertex(crate::complex::PointRef::Vertex(w)));
        let e = [d.edge_between(x, v[0], v[1]), d.edge_between(x, v[1], v[2]), d.edge_between(x, v[2], v[0])];
        d.add_tri(v, e, 0);
        let c = gauss_bonnet(x, &d);
        assert!(c.residual < 1e-12);
        let turning: f64 = c.boundary.iter().map(|b| b.1).sum();
        assert!((turning - 2.0 * PI).abs() < 1e-12);
        assert!(!c.sign_ok);
        d.marked = v.to_vec();
        assert!(gauss_bonnet(x, &d).sign_ok);
    }
}
