//! Gluing a generalized annulus into a disc.
//!
//! The inner boundary reads `e_1 … e_k j_k⁻¹ … j_1⁻¹` where `e_i` and `j_i`
//! have the same image. Identifying each `e_i` with `j_i` closes the inner
//! hole and raises the Euler characteristic by one. The gluing is good when
//! at most one edge of every pair also lies on the outer boundary.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::complex::TriangleComplex;
use crate::error::{Error, Result};

use super::fold::{merge_edge, merge_vertex, same_vertex_image};
use super::{Diagram, UnionFind};

#[derive(Debug, Clone, Serialize)]
pub struct GeneralizedAnnulus {
    pub diagram: Diagram,
    /// Inner boundary cycle as (edge, traversed from `v[0]` to `v[1]`).
    pub inner: Vec<(usize, bool)>,
    pub outer: Vec<(usize, bool)>,
}

impl GeneralizedAnnulus {
    fn cycle_vertices(&self) -> Result<Vec<usize>> {
        let d = &self.diagram;
        let mut out = Vec::with_capacity(self.inner.len());
        for (i, &(e, fwd)) in self.inner.iter().enumerate() {
            let [a, b] = d.edges[e].v;
            let (s, t) = if fwd { (a, b) } else { (b, a) };
            let (next, nfwd) = self.inner[(i + 1) % self.inner.len()];
            let ns = if nfwd { d.edges[next].v[0] } else { d.edges[next].v[1] };
            if t != ns {
                return Err(Error::NotGoodGluing(format!("inner boundary breaks after edge {e}")));
            }
            out.push(s);
        }
        Ok(out)
    }
}

/// Identify the paired inner edges and return the resulting disc.
pub fn glue_annulus(x: &TriangleComplex, a: &GeneralizedAnnulus) -> Result<Diagram> {
    let n = a.inner.len();
    if n == 0 || n % 2 == 1 {
        return Err(Error::NotGoodGluing(format!("inner boundary has odd length {n}")));
    }
    let k = n / 2;
    let s = a.cycle_vertices()?;
    let outer: BTreeSet<usize> = a.outer.iter().map(|o| o.0).collect();
    let d0 = &a.diagram;
    let mut uf = UnionFind::new(d0.verts.len());
    let mut pairs = Vec::with_capacity(k);
    for i in 0..k {
        let m = n - 1 - i;
        let (e, f) = (a.inner[i].0, a.inner[m].0);
        if d0.edges[e].cell != d0.edges[f].cell {
            return Err(Error::NotGoodGluing(format!("edges {e} and {f} lie in different cells")));
        }
        let (p, q) = ((s[i], s[(m + 1) % n]), (s[(i + 1) % n], s[m]));
        if !same_vertex_image(x, d0, p.0, p.1) || !same_vertex_image(x, d0, q.0, q.1) {
            return Err(Error::NotGoodGluing(format!("edges {e} and {f} have different images")));
        }
        if outer.contains(&e) && outer.contains(&f) {
            return Err(Error::NotGoodGluing(format!("edges {e} and {f} both lie on the outer boundary")));
        }
        uf.union(p.0, p.1);
        uf.union(q.0, q.1);
        pairs.push((e, f));
    }
    let mut d = d0.clone();
    for v in 0..d.verts.len() {
        let r = uf.find(v);
        merge_vertex(&mut d, r, v);
    }
    for (e, f) in pairs {
        if e != f {
            merge_edge(&mut d, e, f);
        }
    }
    d.compact();
    if d.euler_characteristic() != d0.euler_characteristic() + 1 {
        return Err(Error::NotGoodGluing(format!(
            "Euler characteristic went from {} to {}",
            d0.euler_characteristic(),
            d.euler_characteristic()
        )));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::flat_grid;
    use crate::disc::fixtures::grid_block;

    /// A 3×3 block slit open along one interior edge.
    fn slit_block() -> (crate::builders::ProductComplex, GeneralizedAnnulus) {
        let g = flat_grid(4);
        let mut d = grid_block(&g, 3);
        let links = d.vertex_links(&g.complex);
        let e = (0..d.edges.len())
            .find(|&e| d.edges[e].v.iter().all(|&v| links[v].is_circle))
            .unwrap();
        let copy = d.edges.len();
        d.edges.push(d.edges[e]);
        let t = (0..d.tris.len()).find(|&t| d.tris[t].e.contains(&e)).unwrap();
        for s in d.tris[t].e.iter_mut() {
            if *s == e {
                *s = copy;
            }
        }
        let outer = d.boundary_edges().into_iter().filter(|&b| b != e && b != copy).map(|b| (b, true)).collect();
        let ann = GeneralizedAnnulus { diagram: d, inner: vec![(e, true), (copy, false)], outer };
        (g, ann)
    }

    #[test]
    fn slit_closes_to_disc() {
        let (g, ann) = slit_block();
        assert_eq!(ann.diagram.euler_characteristic(), 0);
        let d = glue_annulus(&g.complex, &ann).unwrap();
        assert!(d.is_disc());
        assert_eq!(d.tris.len(), 18);
    }

    #[test]
    fn both_edges_on_outer_boundary_is_rejected() {
        let (g, mut ann) = slit_block();
        ann.outer.push((ann.inner[0].0, true));
        ann.outer.push((ann.inner[1].0, true));
        assert!(matches!(glue_annulus(&g.complex, &ann), Err(Error::NotGoodGluing(_))));
    }
}
