//! SVG pictures of link graphs, disc diagrams and point configurations.
//!
//! Output is deterministic: layouts use no randomness and coordinates are
//! printed with three decimals.
//!
//! A disc diagram is drawn abstractly with a Tutte layout: the boundary walk
//! (spikes traversed twice) is pinned to a circle by arclength and every
//! other vertex sits at the average of its neighbours. A configuration is
//! drawn on a development of the complex, where triangles are unfolded
//! across shared edges in breadth-first order; where several sheets meet
//! along an edge they are drawn on top of each other.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::fmt::Write;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::disc::Diagram;
use crate::geom::P2;
use crate::link::LinkGraph;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;
/// Fill colours for overlaid discs.
pub const PALETTE: [&str; 6] = ["#f2c12e", "#4c9be8", "#e8604c", "#5cbf6a", "#a070d0", "#888888"];

struct Canvas {
    lo: P2,
    hi: P2,
}

impl Canvas {
    fn new() -> Self {
        Canvas { lo: P2::new(f64::INFINITY, f64::INFINITY), hi: P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY) }
    }

    fn see(&mut self, p: P2) {
        self.lo = P2::new(self.lo.x.min(p.x), self.lo.y.min(p.y));
        self.hi = P2::new(self.hi.x.max(p.x), self.hi.y.max(p.y));
    }

    fn finish(mut self, shapes: &[Shape], title: &str) -> String {
        for s in shapes {
            for p in s.points() {
                self.see(p);
            }
        }
        let span = (self.hi.x - self.lo.x).max(self.hi.y - self.lo.y).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let (lo, hi) = (self.lo, self.hi);
        // y grows downward in SVG
        let map = |p: P2| P2::new(MARGIN + (p.x - lo.x) * scale, MARGIN + (hi.y - p.y) * scale);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for s in shapes {
            s.write(&mut out, &map);
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Shapes are recorded in model coordinates and mapped when finishing.
enum Shape {
    Polygon { pts: Vec<P2>, fill: String, stroke: String, opacity: f64 },
    Line { a: P2, b: P2, stroke: String, width: f64 },
    Dot { at: P2, fill: String, r: f64 },
    Label { at: P2, text: String },
}

impl Shape {
    fn points(&self) -> Vec<P2> {
        match self {
            Shape::Polygon { pts, .. } => pts.clone(),
            Shape::Line { a, b, .. } => vec![*a, *b],
            Shape::Dot { at, .. } | Shape::Label { at, .. } => vec![*at],
        }
    }

    fn write(&self, out: &mut String, map: &impl Fn(P2) -> P2) {
        let f = |p: P2| {
            let q = map(p);
            format!("{:.3},{:.3}", q.x, q.y)
        };
        match self {
            Shape::Polygon { pts, fill, stroke, opacity } => {
                let pts: Vec<String> = pts.iter().map(|&p| f(p)).collect();
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{fill}" fill-opacity="{opacity}" stroke="{stroke}" stroke-width="0.5"/>"#,
                    pts.join(" ")
                );
            }
            Shape::Line { a, b, stroke, width } => {
                let (a, b) = (map(*a), map(*b));
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{stroke}" stroke-width="{width}"/>"#,
                    a.x, a.y, b.x, b.y
                );
            }
            Shape::Dot { at, fill, r } => {
                let a = map(*at);
                let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="{r}" fill="{fill}"/>"#, a.x, a.y);
            }
            Shape::Label { at, text } => {
                let a = map(*at);
                let _ = writeln!(
                    out,
                    r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">{}</text>"#,
                    a.x + 4.0,
                    a.y - 4.0,
                    escape(text)
                );
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn edge_length(x: &TriangleComplex, d: &Diagram, e: usize) -> f64 {
    let [a, b] = d.edges[e].v;
    x.dist_in_cell(d.edges[e].cell, &d.verts[a], &d.verts[b]).unwrap_or(0.0)
}

/// Closed walk around the boundary of a disc, traversing each spike twice.
fn boundary_walk(d: &Diagram) -> Vec<(usize, usize)> {
    let inc = d.edge_incidence();
    let mut uses: Vec<usize> = inc.iter().map(|&n| if n == 0 { 2 } else if n == 1 { 1 } else { 0 }).collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (e, edge) in d.edges.iter().enumerate() {
        if uses[e] > 0 {
            adj.entry(edge.v[0]).or_default().push(e);
            if edge.v[1] != edge.v[0] {
                adj.entry(edge.v[1]).or_default().push(e);
            }
        }
    }
    let Some(&start) = d.marked.first().or(adj.keys().next()) else { return vec![] };
    // Hierholzer, preferring spikes so they are walked out and back
    let mut stack = vec![(start, usize::MAX)];
    let mut walk = Vec::new();
    while let Some(&(v, via)) = stack.last() {
        let next = adj.get(&v).and_then(|es| {
            es.iter().copied().filter(|&e| uses[e] > 0).min_by_key(|&e| (inc[e], e))
        });
        match next {
            Some(e) => {
                uses[e] -= 1;
                let w = if d.edges[e].v[0] == v { d.edges[e].v[1] } else { d.edges[e].v[0] };
                stack.push((w, e));
            }
            None => {
                stack.pop();
                if via != usize::MAX {
                    walk.push((v, via));
                }
            }
        }
    }
    walk.reverse();
    walk
}

/// Tutte layout of a disc diagram, boundary on the unit circle.
pub fn tutte_layout(x: &TriangleComplex, d: &Diagram) -> Vec<P2> {
    let n = d.verts.len();
    let mut pos = vec![P2::new(0.0, 0.0); n];
    let mut pinned = vec![false; n];
    let walk = boundary_walk(d);
    let total: f64 = walk.iter().map(|&(_, e)| edge_length(x, d, e).max(1e-9)).sum();
    let mut s = 0.0;
    for &(v, e) in &walk {
        s += edge_length(x, d, e).max(1e-9);
        if !pinned[v] {
            let a = 2.0 * PI * s / total;
            pos[v] = P2::new(a.cos(), a.sin());
            pinned[v] = true;
        }
    }
    let mut nbrs = vec![Vec::new(); n];
    for e in &d.edges {
        if e.v[0] != e.v[1] {
            nbrs[e.v[0]].push(e.v[1]);
            nbrs[e.v[1]].push(e.v[0]);
        }
    }
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for v in 0..n {
            if pinned[v] || nbrs[v].is_empty() {
                continue;
            }
            let sum = nbrs[v].iter().fold(P2::new(0.0, 0.0), |acc, &w| acc + pos[w]);
            let p = sum * (1.0 / nbrs[v].len() as f64);
            moved = moved.max(p.dist(pos[v]));
            pos[v] = p;
        }
        if moved < 1e-10 {
            break;
        }
    }
    pos
}

/// A disc diagram drawn abstractly, boundary highlighted and marked vertices labelled.
pub fn render_diagram(x: &TriangleComplex, d: &Diagram, title: &str) -> String {
    let pos = tutte_layout(x, d);
    let c = Canvas::new();
    let mut shapes = Vec::new();
    for t in &d.tris {
        shapes.push(Shape::Polygon {
            pts: t.v.iter().map(|&v| pos[v]).collect(),
            fill: PALETTE[0].into(),
            stroke: "#555555".into(),
            opacity: 0.8,
        });
    }
    let inc = d.edge_incidence();
    for (e, edge) in d.edges.iter().enumerate() {
        if inc[e] <= 1 {
            let stroke = if inc[e] == 0 { "#b03030" } else { "#202020" };
            shapes.push(Shape::Line { a: pos[edge.v[0]], b: pos[edge.v[1]], stroke: stroke.into(), width: 2.0 });
        }
    }
    for (k, &m) in d.marked.iter().enumerate() {
        shapes.push(Shape::Dot { at: pos[m], fill: "#202020".into(), r: 3.0 });
        shapes.push(Shape::Label { at: pos[m], text: format!("y{k}") });
    }
    c.finish(&shapes, title)
}

/// A link graph with nodes on a circle; a circle link is spaced by arclength.
pub fn render_link(g: &LinkGraph, title: &str) -> String {
    let n = g.nodes.len();
    let mut pos = vec![P2::new(0.0, 0.0); n];
    if g.is_circle() && n > 0 {
        // walk the cycle from node 0
        let total = g.total_length();
        let (mut v, mut prev_arc, mut s) = (0, usize::MAX, 0.0);
        for _ in 0..n {
            let a = 2.0 * PI * s / total;
            pos[v] = P2::new(a.cos(), a.sin());
            let Some(&arc) = g.adj[v].iter().find(|&&a| a != prev_arc) else { break };
            s += g.arcs[arc].len;
            v = if g.arcs[arc].ends[0] == v { g.arcs[arc].ends[1] } else { g.arcs[arc].ends[0] };
            prev_arc = arc;
        }
    } else {
        for (v, p) in pos.iter_mut().enumerate() {
            let a = 2.0 * PI * v as f64 / n.max(1) as f64;
            *p = P2::new(a.cos(), a.sin());
        }
    }
    let c = Canvas::new();
    let mut shapes = Vec::new();
    shapes.push(Shape::Polygon {
        pts: (0..64).map(|k| {
            let a = 2.0 * PI * k as f64 / 64.0;
            P2::new(1.15 * a.cos(), 1.15 * a.sin())
        }).collect(),
        fill: "none".into(),
        stroke: "none".into(),
        opacity: 0.0,
    });
    for arc in &g.arcs {
        let (a, b) = (pos[arc.ends[0]], pos[arc.ends[1]]);
        shapes.push(Shape::Line { a, b, stroke: "#202020".into(), width: 1.5 });
        // direction mark a third of the way along
        let m = a.lerp(b, 1.0 / 3.0);
        shapes.push(Shape::Dot { at: m, fill: "#4c9be8".into(), r: 2.0 });
        shapes.push(Shape::Label { at: a.lerp(b, 0.5), text: format!("{:.4}", arc.len) });
    }
    for (v, &p) in pos.iter().enumerate() {
        shapes.push(Shape::Dot { at: p, fill: "#202020".into(), r: 3.0 });
        shapes.push(Shape::Label { at: p * 1.08, text: format!("{v}") });
    }
    let title = format!("{title} (length {:.6}, girth {:.6})", g.total_length(), g.girth());
    c.finish(&shapes, &title)
}

/// Rigid placement of every triangle of `X` in one plane.
pub struct Development {
    /// Per triangle: canvas positions of its layout corners.
    pub corners: Vec<Option<[P2; 3]>>,
}

impl Development {
    /// Unfold the triangles of `X` reachable from `root` across shared edges.
    pub fn new(x: &TriangleComplex, root: usize) -> Self {
        let mut corners: Vec<Option<[P2; 3]>> = vec![None; x.tris.len()];
        corners[root] = Some(x.tris[root].layout);
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            let placed = corners[t].unwrap();
            for (k, &e) in x.tris[t].sides.iter().enumerate() {
                let (a, b) = (placed[k], placed[(k + 1) % 3]);
                let (va, vb) = (x.tris[t].verts[k], x.tris[t].verts[(k + 1) % 3]);
                let apex_side = (b - a).cross(placed[(k + 2) % 3] - a);
                for &u in &x.edge_tris[e] {
                    if corners[u].is_some() {
                        continue;
                    }
                    let tu = &x.tris[u];
                    let (ia, ib) = (tu.vertex_index(va).unwrap(), tu.vertex_index(vb).unwrap());
                    let ic = 3 - ia - ib;
                    let l = tu.layout;
                    // put the third corner on the far side of the shared edge
                    let (len_ac, len_bc) = (l[ia].dist(l[ic]), l[ib].dist(l[ic]));
                    let base = a.dist(b);
                    let s = (len_ac * len_ac - len_bc * len_bc + base * base) / (2.0 * base);
                    let h = (len_ac * len_ac - s * s).max(0.0).sqrt();
                    let dir = (b - a) * (1.0 / base);
                    let mut normal = dir.perp();
                    if normal.dot(placed[(k + 2) % 3] - a).signum() == apex_side.signum() && apex_side != 0.0 {
                        normal = -normal;
                    }
                    let mut out = [P2::new(0.0, 0.0); 3];
                    out[ia] = a;
                    out[ib] = b;
                    out[ic] = a + dir * s + normal * h;
                    corners[u] = Some(out);
                    queue.push_back(u);
                }
            }
        }
        Development { corners }
    }

    /// Canvas position of a layout point of triangle `t`.
    pub fn map(&self, x: &TriangleComplex, t: usize, q: P2) -> Option<P2> {
        let c = self.corners[t]?;
        let l = x.tris[t].layout;
        let w = crate::geom::barycentric(l[0], l[1], l[2], q);
        Some(c[0] * w[0] + c[1] * w[1] + c[2] * w[2])
    }

    /// Canvas position of a point, through the first placed triangle containing it.
    pub fn point(&self, x: &TriangleComplex, p: &PointRef) -> Option<P2> {
        let tris: Vec<usize> = match p.carrier() {
            Cell::Tri(t) => vec![t],
            c => x.star(c).into_iter().filter_map(|c| if let Cell::Tri(t) = c { Some(t) } else { None }).collect(),
        };
        tris.into_iter().find_map(|t| self.map(x, t, x.tri_pos(t, p)?))
    }
}

/// Discs overlaid on a development of the complex, with labelled points and an optional highlighted segment.
pub fn render_configuration(
    x: &TriangleComplex,
    discs: &[&Diagram],
    points: &[(PointRef, String)],
    segment: Option<[PointRef; 2]>,
    title: &str,
) -> String {
    let root = points.first().and_then(|(p, _)| match x.star(p.carrier()).into_iter().find(|c| matches!(c, Cell::Tri(_))) {
        Some(Cell::Tri(t)) => Some(t),
        _ => None,
    });
    let dev = Development::new(x, root.unwrap_or(0));
    let c = Canvas::new();
    let mut shapes = Vec::new();
    for corners in &dev.corners {
        if let Some(cs) = corners {
            shapes.push(Shape::Polygon { pts: cs.to_vec(), fill: "none".into(), stroke: "#bbbbbb".into(), opacity: 0.0 });
        }
    }
    for (k, d) in discs.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        for (i, t) in d.tris.iter().enumerate() {
            let q = d.corner_positions(x, i);
            if let Some(pts) = q.iter().map(|&q| dev.map(x, t.cell, q)).collect::<Option<Vec<P2>>>() {
                shapes.push(Shape::Polygon { pts, fill: colour.into(), stroke: "none".into(), opacity: 0.45 });
            }
        }
        let inc = d.edge_incidence();
        for (e, edge) in d.edges.iter().enumerate() {
            if inc[e] == 0 {
                let (a, b) = (dev.point(x, &d.verts[edge.v[0]]), dev.point(x, &d.verts[edge.v[1]]));
                if let (Some(a), Some(b)) = (a, b) {
                    shapes.push(Shape::Line { a, b, stroke: colour.into(), width: 2.0 });
                }
            }
        }
    }
    if let Some([a, b]) = segment {
        if let (Some(a), Some(b)) = (dev.point(x, &a), dev.point(x, &b)) {
            shapes.push(Shape::Line { a, b, stroke: "#d01010".into(), width: 3.0 });
        }
    }
    for (p, label) in points {
        if let Some(q) = dev.point(x, p) {
            shapes.push(Shape::Dot { at: q, fill: "#202020".into(), r: 3.0 });
            shapes.push(Shape::Label { at: q, text: label.clone() });
        }
    }
    c.finish(&shapes, title)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point};
    use crate::disc::full_triangle_disc;
    use crate::disc::DTri;
    use crate::link::build_link;

    #[test]
    fn single_triangle_disc_is_one_polygon() {
        let g = flat_grid(1);
        let x = &g.complex;
        let mut d = Diagram::default();
        let v = x.tris[0].verts.map(|v| d.add_vertex(PointRef::Vertex(v)));
        let e = [d.edge_between(x, v[0], v[1]), d.edge_between(x, v[1], v[2]), d.edge_between(x, v[2], v[0])];
        d.tris.push(DTri { v, e, cell: 0 });
        let svg = render_diagram(x, &d, "one");
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn circle_link_is_labelled() {
        let g = flat_grid(2);
        let link = build_link(&g.complex, &PointRef::Vertex(g.vertex(1, 1)));
        let svg = render_link(&link, "link");
        assert!(svg.contains("length 6.283185"));
        assert_eq!(svg.matches("<line").count(), link.arcs.len());
    }

    #[test]
    fn development_of_a_flat_grid_is_isometric() {
        let g = flat_grid(3);
        let x = &g.complex;
        let dev = Development::new(x, 0);
        let (p, q) = (grid_point(&g, 0.2, 0.3), grid_point(&g, 2.7, 2.9));
        let (a, b) = (dev.point(x, &p).unwrap(), dev.point(x, &q).unwrap());
        assert!((a.dist(b) - (2.5f64.powi(2) + 2.6f64.powi(2)).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rendering_is_deterministic() {
        let g = flat_grid(3);
        let x = &g.complex;
        let pts = [(0.3, 0.2), (2.6, 0.9), (1.1, 2.8)].map(|(a, b)| grid_point(&g, a, b));
        let disc = full_triangle_disc(x, &pts[0], &pts[1], &pts[2]).unwrap();
        let labelled: Vec<(PointRef, String)> = pts.iter().enumerate().map(|(i, p)| (*p, format!("x{i}"))).collect();
        let a = render_configuration(x, &[disc.diagram()], &labelled, None, "t");
        let b = render_configuration(x, &[disc.diagram()], &labelled, None, "t");
        assert_eq!(a, b);
        assert_eq!(render_diagram(x, disc.diagram(), "d"), render_diagram(x, disc.diagram(), "d"));
    }
}
