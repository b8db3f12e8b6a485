//! Geodesic coning: the region swept by geodesics from an apex to the points
//! of a side, cut into pieces on which the swept geodesics cross the same
//! cells. Each piece is a planar triangle in the unfolding of one strip.

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::error::{Error, Result};
use crate::geodesic::funnel::{simplify_strip, Unfolded};
use crate::geodesic::steiner::SourceTree;
use crate::geodesic::{geodesic_with_tree, Geodesic};
use crate::geom::{barycentric, clip_halfplane, dist_point_segment, orient, polygon_area, project_param, P2};

/// Combinatorial type of a geodesic: the cells of its pieces and the carriers of its breakpoints.
pub type Signature = Vec<Cell>;

pub fn signature(g: &Geodesic) -> Signature {
    let p = &g.path;
    let mut s = Vec::with_capacity(2 * p.cells.len());
    for (i, &c) in p.cells.iter().enumerate() {
        if i > 0 {
            s.push(p.points[i].carrier());
        }
        s.push(c);
    }
    s
}

/// Part of the cone on which the swept geodesics share a combinatorial type.
#[derive(Debug, Clone)]
pub struct ConePiece {
    /// Last breakpoint shared by the swept geodesics (their common prefix ends here).
    pub apex: PointRef,
    /// Arclength range on the side.
    pub range: [f64; 2],
    pub strip: Unfolded,
    /// The swept planar triangle: apex, then the side points in order along the side.
    pub triangle: [P2; 3],
}

impl ConePiece {
    /// The swept triangle cut by the strip, as polygons in the layouts of the strip's triangles.
    ///
    /// Vertex order follows the sweep, so the sign of a polygon's area tells its sheet orientation.
    pub fn polygons(&self, x: &TriangleComplex) -> Vec<(usize, Vec<P2>)> {
        let mut out = Vec::new();
        for (i, &t) in self.strip.tris.iter().enumerate() {
            let mut u = self.strip.pos[i];
            let flip = orient(u[0], u[1], u[2]) < 0.0;
            if flip {
                u.swap(1, 2);
            }
            let reversed = orient(self.triangle[0], self.triangle[1], self.triangle[2]) < 0.0;
            let mut poly = self.triangle.to_vec();
            if reversed {
                poly.reverse();
            }
            for k in 0..3 {
                poly = clip_halfplane(&poly, u[k], u[(k + 1) % 3]);
                if poly.is_empty() {
                    break;
                }
            }
            if poly.len() < 3 || polygon_area(&poly) < 1e-18 {
                continue;
            }
            let src = self.strip.pos[i];
            let l = x.tris[t].layout;
            if reversed {
                poly.reverse();
            }
            let mapped: Vec<P2> = poly
                .iter()
                .map(|&q| {
                    let b = barycentric(src[0], src[1], src[2], q);
                    l[0] * b[0] + l[1] * b[1] + l[2] * b[2]
                })
                .collect();
            out.push((t, mapped));
        }
        out
    }
}

/// Samples per unit of side length when looking for changes of combinatorial type.
const SAMPLES_PER_UNIT: f64 = 16.0;
const MIN_SAMPLES: usize = 4;

struct Sample {
    s: f64,
    geo: Geodesic,
    sig: Signature,
}

/// Cut the cone from the tree's source over `side` into pieces.
pub fn cone_pieces(x: &TriangleComplex, tree: &SourceTree, side: &Geodesic) -> Result<Vec<ConePiece>> {
    let arc = side.path.arclengths(x);
    let mut pieces = Vec::new();
    let apex0 = tree.source;
    for i in 0..side.path.cells.len() {
        let (a, b) = (arc[i], arc[i + 1]);
        if b - a <= 0.0 {
            continue;
        }
        let at = |s: f64| -> Result<Sample> {
            let q = side.path.point_at_length_with(x, &arc, s);
            let geo = geodesic_with_tree(x, tree, &q)?;
            let sig = signature(&geo);
            Ok(Sample { s, geo, sig })
        };
        let n = MIN_SAMPLES.max(((b - a) * SAMPLES_PER_UNIT).ceil() as usize);
        // the end samples sit just inside the piece so their end point keeps its cell
        let inset = 1e-11 * (1.0 + b);
        let mut samples = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let s = a + (b - a) * k as f64 / n as f64;
            samples.push(at(s.clamp(a + inset.min(0.25 * (b - a)), b - inset.min(0.25 * (b - a))))?);
        }
        // locate every change of signature between neighbouring samples
        let mut cuts = vec![a];
        let mut mids: Vec<Sample> = Vec::new();
        let mut cur = samples.remove(0);
        for next in samples {
            let mut lo = cur;
            loop {
                if lo.sig == next.sig {
                    cur = next;
                    break;
                }
                // bisect between lo and next for the first change
                let (mut l, mut r) = (lo.s, next.s);
                let mut right: Option<Sample> = None;
                while r - l > 1e-13 * (1.0 + b) {
                    let m = at(0.5 * (l + r))?;
                    if m.sig == lo.sig {
                        l = m.s;
                    } else {
                        r = m.s;
                        right = Some(m);
                    }
                }
                let cut = 0.5 * (l + r);
                cuts.push(cut);
                mids.push(lo);
                lo = match right {
                    Some(m) if m.sig != next.sig => m,
                    _ => {
                        cur = next;
                        break;
                    }
                };
            }
        }
        mids.push(cur);
        cuts.push(b);
        let (qa_side, qb_side) = (side.path.points[i], side.path.points[i + 1]);
        // intervals below the resolution of point snapping are merged into a neighbour
        let min_width = 1e-7 * (1.0 + b);
        let mut runs: Vec<(f64, f64, Sample)> = Vec::new();
        for (k, m) in mids.into_iter().enumerate() {
            let (sa, sb) = (cuts[k], cuts[k + 1]);
            match runs.last_mut() {
                Some(last) if sb - sa < min_width => last.1 = sb,
                Some(last) if last.1 - last.0 < min_width => {
                    last.1 = sb;
                    last.2 = m;
                }
                _ => runs.push((sa, sb, m)),
            }
        }
        // every interior cut is a vertex passage: put it exactly on the ray through that vertex
        for k in 1..runs.len() {
            let cut = runs[k].0;
            let exact = exact_cut(x, &runs[k - 1].2.geo, apex0, qa_side, qb_side, [a, b], cut)
                .or_else(|| exact_cut(x, &runs[k].2.geo, apex0, qa_side, qb_side, [a, b], cut));
            if let Some(c) = exact.filter(|&c| c > runs[k - 1].0 && c < runs[k].1) {
                runs[k - 1].1 = c;
                runs[k].0 = c;
            }
        }
        for (sa, sb, m) in runs {
            if sb - sa <= 0.0 {
                continue;
            }
            let qa = side.path.point_at_length_with(x, &arc, sa);
            let qb = side.path.point_at_length_with(x, &arc, sb);
            if let Some(p) = piece_from(x, &m.geo, apex0, qa, qb, [sa, sb])? {
                pieces.push(p);
            }
        }
    }
    Ok(pieces)
}

/// The last vertex breakpoint of `g` (or the source) and the unfolded strip after it.
fn strip_after_apex(
    x: &TriangleComplex,
    g: &Geodesic,
    apex0: PointRef,
    qa: PointRef,
    qb: PointRef,
) -> Result<Option<(PointRef, Unfolded)>> {
    let p = &g.path;
    let mut start = 0;
    for i in 1..p.points.len() - 1 {
        if matches!(p.points[i], PointRef::Vertex(_)) {
            start = i;
        }
    }
    let apex = if start == 0 { apex0 } else { p.points[start] };
    let mut tris = Vec::new();
    for &c in p.cells.iter().skip(start) {
        match c {
            Cell::Tri(t) => tris.push(t),
            Cell::Edge(e) => {
                // a geodesic running along an edge: take a triangle holding the side points
                let t = x.edge_tris[e]
                    .iter()
                    .copied()
                    .find(|&t| x.contains(Cell::Tri(t), &qa) && x.contains(Cell::Tri(t), &qb))
                    .or_else(|| x.edge_tris[e].first().copied());
                match t {
                    Some(t) => tris.push(t),
                    // free edge: the cone is flat here
                    None => return Ok(None),
                }
            }
            Cell::Vertex(_) => {}
        }
    }
    let tris = simplify_strip(&tris);
    if tris.is_empty() {
        return Ok(None);
    }
    let strip = Unfolded::new(x, &tris).ok_or_else(|| Error::Input("cone strip is not connected".into()))?;
    Ok(Some((apex, strip)))
}

/// Side arclength at which the ray from the apex through a strip vertex near the cut meets the side.
fn exact_cut(
    x: &TriangleComplex,
    g: &Geodesic,
    apex0: PointRef,
    qa: PointRef,
    qb: PointRef,
    range: [f64; 2],
    cut: f64,
) -> Option<f64> {
    let (apex, strip) = strip_after_apex(x, g, apex0, qa, qb).ok()??;
    let last = strip.tris.len() - 1;
    let (w, a, b) = (strip.place(x, 0, &apex)?, strip.place(x, last, &qa)?, strip.place(x, last, &qb)?);
    let t = (cut - range[0]) / (range[1] - range[0]);
    let q = a.lerp(b, t);
    let tol = 1e-6 * (1.0 + w.dist(q));
    let mut best: Option<(f64, P2)> = None;
    for (i, &tri) in strip.tris.iter().enumerate() {
        for k in 0..3 {
            if apex == PointRef::Vertex(x.tris[tri].verts[k]) {
                continue;
            }
            let p = strip.pos[i][k];
            let along = project_param(w, q, p);
            let d = dist_point_segment(w, q, p);
            if along > 0.0 && along < 1.0 && d < tol && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
    }
    let (_, p) = best?;
    // intersect the line w p with the line a b
    let (dir, side) = (p - w, b - a);
    let den = side.cross(dir);
    if den.abs() < 1e-15 {
        return None;
    }
    let u = (w - a).cross(dir) / den;
    Some(range[0] + u * (range[1] - range[0]))
}

fn piece_from(
    x: &TriangleComplex,
    g: &Geodesic,
    apex0: PointRef,
    qa: PointRef,
    qb: PointRef,
    range: [f64; 2],
) -> Result<Option<ConePiece>> {
    let Some((apex, strip)) = strip_after_apex(x, g, apex0, qa, qb)? else {
        return Ok(None);
    };
    let last = strip.tris.len() - 1;
    let (Some(w), Some(a), Some(b)) = (strip.place(x, 0, &apex), strip.place(x, last, &qa), strip.place(x, last, &qb))
    else {
        return Ok(None);
    };
    let triangle = [w, a, b];
    if polygon_area(&triangle).abs() < 1e-18 {
        return Ok(None);
    }
    Ok(Some(ConePiece { apex, range, strip, triangle }))
}
