//! Unfolding of triangle strips into the plane and the funnel algorithm for
//! the shortest path through a strip.

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::geom::{barycentric, orient, project_param, P2};

/// A strip of triangles laid out in one plane.
#[derive(Debug, Clone)]
pub struct Unfolded {
    pub tris: Vec<usize>,
    /// Unfolded positions of each triangle's `verts`.
    pub pos: Vec<[P2; 3]>,
}

/// A side shared by two triangles, if any (lowest edge id on ties).
pub fn shared_side(x: &TriangleComplex, a: usize, b: usize) -> Option<usize> {
    let sa = x.tris[a].sides;
    x.tris[b].sides.iter().copied().filter(|e| sa.contains(e)).min()
}

/// Drop repeats and immediate back-and-forth visits (`A B A` becomes `A`).
pub fn simplify_strip(tris: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(tris.len());
    for &t in tris {
        if out.last() == Some(&t) {
            continue;
        }
        if out.len() >= 2 && out[out.len() - 2] == t {
            out.pop();
            continue;
        }
        out.push(t);
    }
    out
}

impl Unfolded {
    pub fn new(x: &TriangleComplex, tris: &[usize]) -> Option<Self> {
        let mut pos = Vec::with_capacity(tris.len());
        pos.push(x.tris[tris[0]].layout);
        for i in 1..tris.len() {
            let (prev, cur) = (&x.tris[tris[i - 1]], &x.tris[tris[i]]);
            let e = shared_side(x, tris[i - 1], tris[i])?;
            let [u, w] = x.edges[e].v;
            let pp = pos[i - 1];
            let pu = pp[prev.vertex_index(u)?];
            let pw = pp[prev.vertex_index(w)?];
            let c_prev = pp[(0..3).find(|&k| prev.verts[k] != u && prev.verts[k] != w)?];
            let ci = (0..3).find(|&k| cur.verts[k] != u && cur.verts[k] != w)?;
            let (iu, iw) = (cur.vertex_index(u)?, cur.vertex_index(w)?);
            let du = side_len(cur, iu, ci);
            let dw = side_len(cur, iw, ci);
            let l = pu.dist(pw);
            let dir = (pw - pu) * (1.0 / l);
            let along = (du * du - dw * dw + l * l) / (2.0 * l);
            let h = (du * du - along * along).max(0.0).sqrt();
            let mut n = dir.perp();
            if n.dot(c_prev - pu) > 0.0 {
                n = -n;
            }
            let mut p = [P2::default(); 3];
            p[iu] = pu;
            p[iw] = pw;
            p[ci] = pu + dir * along + n * h;
            pos.push(p);
        }
        Some(Unfolded { tris: tris.to_vec(), pos })
    }

    /// Unfolded position of a point of the `i`-th strip triangle.
    pub fn place(&self, x: &TriangleComplex, i: usize, p: &PointRef) -> Option<P2> {
        let t = self.tris[i];
        let l = x.tris[t].layout;
        let q = x.tri_pos(t, p)?;
        let b = barycentric(l[0], l[1], l[2], q);
        let u = self.pos[i];
        Some(u[0] * b[0] + u[1] * b[1] + u[2] * b[2])
    }

    /// Canonical complex point at unfolded position `q` of the `i`-th triangle.
    pub fn unplace(&self, x: &TriangleComplex, i: usize, q: P2) -> PointRef {
        let u = self.pos[i];
        let b = barycentric(u[0], u[1], u[2], q);
        let l = x.tris[self.tris[i]].layout;
        x.point_at(self.tris[i], l[0] * b[0] + l[1] * b[1] + l[2] * b[2])
    }

    /// Portal between triangle `i - 1` and `i`, as (left, right) positions and vertex ids.
    fn portal(&self, x: &TriangleComplex, i: usize) -> ((P2, usize), (P2, usize)) {
        let prev = &x.tris[self.tris[i - 1]];
        let e = shared_side(x, self.tris[i - 1], self.tris[i]).unwrap();
        let [u, w] = x.edges[e].v;
        let pp = self.pos[i - 1];
        let pu = pp[prev.vertex_index(u).unwrap()];
        let pw = pp[prev.vertex_index(w).unwrap()];
        let c = pp[(0..3).find(|&k| prev.verts[k] != u && prev.verts[k] != w).unwrap()];
        // travelling away from c, the left endpoint has positive orientation
        if orient(c, pw, pu) > 0.0 {
            ((pu, u), (pw, w))
        } else {
            ((pw, w), (pu, u))
        }
    }
}

fn side_len(t: &crate::complex::Triangle, i: usize, j: usize) -> f64 {
    for k in 0..3 {
        let (a, b) = (k, (k + 1) % 3);
        if (a == i && b == j) || (a == j && b == i) {
            return t.lens[k];
        }
    }
    unreachable!("distinct corners share a side")
}

/// A bend of the funnel path at a strip vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Apex {
    pub vertex: usize,
    pub pos: P2,
    /// Index of the portal at which the bend was recorded.
    pub portal: usize,
}

/// Shortest path from `a` (in the first triangle) to `b` (in the last) through the strip.
pub fn funnel(x: &TriangleComplex, u: &Unfolded, a: P2, a_vertex: Option<usize>, b: P2, b_vertex: Option<usize>) -> Vec<Apex> {
    let n = u.tris.len();
    // portal 0 is the start point, portal n the end point
    let mut portals: Vec<((P2, Option<usize>), (P2, Option<usize>))> = Vec::with_capacity(n + 1);
    portals.push(((a, a_vertex), (a, a_vertex)));
    for i in 1..n {
        let (l, r) = u.portal(x, i);
        portals.push(((l.0, Some(l.1)), (r.0, Some(r.1))));
    }
    portals.push(((b, b_vertex), (b, b_vertex)));

    let mut out = Vec::new();
    let mut apex = (a, a_vertex);
    let mut left = apex;
    let mut right = apex;
    let (mut left_i, mut right_i) = (0usize, 0usize);
    let same = |p: (P2, Option<usize>), q: (P2, Option<usize>)| match (p.1, q.1) {
        (Some(i), Some(j)) => i == j,
        _ => p.0 == q.0,
    };
    let mut i = 1;
    while i <= n {
        let (l, r) = portals[i];
        // tighten the right side
        if orient(apex.0, right.0, r.0) >= 0.0 {
            if same(apex, right) || orient(apex.0, left.0, r.0) < 0.0 {
                right = r;
                right_i = i;
            } else {
                if let Some(v) = left.1 {
                    if !same(left, (b, b_vertex)) {
                        out.push(Apex { vertex: v, pos: left.0, portal: left_i });
                    }
                }
                apex = left;
                let apex_i = left_i;
                left = apex;
                right = apex;
                right_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }
        // tighten the left side
        if orient(apex.0, left.0, l.0) <= 0.0 {
            if same(apex, left) || orient(apex.0, right.0, l.0) > 0.0 {
                left = l;
                left_i = i;
            } else {
                if let Some(v) = right.1 {
                    if !same(right, (b, b_vertex)) {
                        out.push(Apex { vertex: v, pos: right.0, portal: right_i });
                    }
                }
                apex = right;
                let apex_i = right_i;
                left = apex;
                right = apex;
                left_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Clip segment `p -> q` to a triangle; returns the parameter interval inside it.
pub fn clip_segment(tri: [P2; 3], p: P2, q: P2) -> Option<(f64, f64)> {
    let sign = if orient(tri[0], tri[1], tri[2]) >= 0.0 { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let scale = tri[0].dist(tri[1]).max(tri[1].dist(tri[2])).max(tri[2].dist(tri[0]));
    let tol = 1e-12 * scale;
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let len = a.dist(b);
        // signed distance to the edge line, positive inside
        let fp = sign * orient(a, b, p) / len + tol;
        let fq = sign * orient(a, b, q) / len + tol;
        if fp < 0.0 && fq < 0.0 {
            return None;
        }
        if fp < 0.0 {
            lo = lo.max(fp / (fp - fq));
        } else if fq < 0.0 {
            hi = hi.min(fp / (fp - fq));
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// The straight pieces of the funnel path as breakpoints and witness cells.
pub fn path_pieces(
    x: &TriangleComplex,
    u: &Unfolded,
    start: PointRef,
    end: PointRef,
    apexes: &[Apex],
) -> (Vec<PointRef>, Vec<Cell>) {
    let n = u.tris.len();
    let a = u.place(x, 0, &start).unwrap();
    let b = u.place(x, n - 1, &end).unwrap();
    let mut corners = vec![(a, 0usize, Some(start))];
    for ap in apexes {
        corners.push((ap.pos, ap.portal, Some(PointRef::Vertex(ap.vertex))));
    }
    corners.push((b, n, Some(end)));

    let mut pts = vec![start];
    let mut cells: Vec<Cell> = Vec::new();
    let mut last_tri: Option<usize> = None;
    for w in corners.windows(2) {
        let (p, ip, _) = w[0];
        let (q, iq, qpt) = w[1];
        let lo = ip.min(n - 1);
        let hi = iq.max(lo + 1).min(n);
        let seg_len = p.dist(q);
        let mut pieces: Vec<(f64, f64, usize)> = Vec::new();
        for k in lo..hi {
            if let Some((t0, t1)) = clip_segment(u.pos[k], p, q) {
                if (t1 - t0) * seg_len > 1e-13 {
                    pieces.push((t0, t1, k));
                }
            }
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        // keep a monotone chain of pieces
        let mut chain: Vec<(f64, f64, usize)> = Vec::new();
        for pc in pieces {
            if let Some(last) = chain.last() {
                if pc.1 <= last.1 + 1e-15 {
                    continue;
                }
            }
            chain.push(pc);
        }
        if chain.is_empty() {
            // degenerate: segment of zero length or lost; connect directly
            if seg_len > 0.0 {
                let k = lo.min(n - 1);
                if let Some(q) = qpt {
                    pts.push(q);
                    cells.push(Cell::Tri(u.tris[k]));
                    last_tri = Some(k);
                }
            }
            continue;
        }
        for (j, &(_, t1, k)) in chain.iter().enumerate() {
            let is_last = j + 1 == chain.len();
            let pt = if is_last {
                qpt.unwrap()
            } else {
                let next_k = chain[j + 1].2;
                boundary_point(x, u, k, next_k, p.lerp(q, t1))
            };
            if let (Some(prev), Some(&last_pt)) = (last_tri, pts.last()) {
                let _ = prev;
                if x.same_point(&last_pt, &pt, 0.0) && !is_last {
                    continue;
                }
            }
            pts.push(pt);
            cells.push(Cell::Tri(u.tris[k]));
            last_tri = Some(k);
        }
    }
    cleanup(x, pts, cells)
}

/// Point on the common face of strip triangles `i` and `j` at unfolded position `q`.
fn boundary_point(x: &TriangleComplex, u: &Unfolded, i: usize, j: usize, q: P2) -> PointRef {
    let (ti, tj) = (u.tris[i], u.tris[j]);
    if let Some(e) = shared_side(x, ti, tj) {
        let [a, b] = x.edges[e].v;
        let t = &x.tris[ti];
        let pa = u.pos[i][t.vertex_index(a).unwrap()];
        let pb = u.pos[i][t.vertex_index(b).unwrap()];
        return x.point_on_edge(e, project_param(pa, pb, q));
    }
    let common: Vec<usize> = x.tris[ti].verts.iter().copied().filter(|v| x.tris[tj].verts.contains(v)).collect();
    if let Some(&v) = common.first() {
        return PointRef::Vertex(v);
    }
    u.unplace(x, i, q)
}

/// Remove zero-length pieces and make every breakpoint lie in both adjacent witness cells.
fn cleanup(x: &TriangleComplex, pts: Vec<PointRef>, cells: Vec<Cell>) -> (Vec<PointRef>, Vec<Cell>) {
    let mut p2 = vec![pts[0]];
    let mut c2: Vec<Cell> = Vec::new();
    for (i, &c) in cells.iter().enumerate() {
        let q = pts[i + 1];
        let prev = *p2.last().unwrap();
        let d = x.dist_in_cell(c, &prev, &q).unwrap_or(f64::INFINITY);
        if d <= 1e-14 && i + 1 < cells.len() {
            continue;
        }
        if d <= 1e-14 && !c2.is_empty() {
            // final zero-length piece: move the endpoint onto it
            p2.pop();
            p2.push(q);
            continue;
        }
        p2.push(q);
        c2.push(x.common_cell(&prev, &q).filter(|&cc| x.is_face(cc, c)).unwrap_or(c));
    }
    (p2, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point};

    #[test]
    fn straight_through_grid_strip() {
        let g = flat_grid(3);
        let x = &g.complex;
        let a = grid_point(&g, 0.2, 0.5);
        let b = grid_point(&g, 2.8, 0.5);
        // triangles of the bottom row, left to right
        let mut tris = Vec::new();
        for i in 0..3 {
            let p = grid_point(&g, i as f64 + 0.6, 0.3);
            let q = grid_point(&g, i as f64 + 0.3, 0.6);
            for pt in [q, p] {
                if let PointRef::Tri { tri, .. } = pt {
                    tris.push(tri);
                }
            }
        }
        let u = Unfolded::new(x, &tris).unwrap();
        let pa = u.place(x, 0, &a).unwrap();
        let pb = u.place(x, tris.len() - 1, &b).unwrap();
        assert!((pa.dist(pb) - 2.6).abs() < 1e-12);
        let ap = funnel(x, &u, pa, None, pb, None);
        assert!(ap.is_empty());
        let (pts, cells) = path_pieces(x, &u, a, b, &ap);
        let path = crate::complex::PiecewisePath::new(x, pts, cells).unwrap();
        assert!((path.length - 2.6).abs() < 1e-12);
    }

    #[test]
    fn clip() {
        let t = [P2::new(0.0, 0.0), P2::new(1.0, 0.0), P2::new(0.0, 1.0)];
        let (a, b) = clip_segment(t, P2::new(-1.0, 0.25), P2::new(1.0, 0.25)).unwrap();
        assert!((a - 0.5).abs() < 1e-9 && (b - 0.875).abs() < 1e-9);
        assert!(clip_segment(t, P2::new(2.0, 2.0), P2::new(3.0, 2.0)).is_none());
    }
}
