//! Filling discs: geodesic coning, folding, and the embedded full triangle.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::complex::{Cell, PointRef, TriangleComplex};
use crate::error::{Error, Result};
use crate::geodesic::steiner::SourceTree;
use crate::geodesic::{geodesic, spiky_decomposition, Geodesic, SpikyTriangle};
use crate::geom::{convex_overlap, dist_point_segment, in_convex, P2};
use crate::link::build_link;
use crate::{EPS_ANG, EPS_GEO};

use super::cone::cone_pieces;
use super::fold::{fold, FoldReport};
use super::refine::Builder;
use super::Diagram;

/// Total curvature `Σ (π − ∠)` of the closed geodesic polygon through `corners`.
pub fn total_curvature(x: &TriangleComplex, corners: &[PointRef]) -> Result<f64> {
    let n = corners.len();
    let mut k = 0.0;
    for i in 0..n {
        let p = &corners[i];
        let prev = &corners[(i + n - 1) % n];
        let next = &corners[(i + 1) % n];
        let link = build_link(x, p);
        let a = geodesic(x, p, prev)?;
        let b = geodesic(x, p, next)?;
        let ang = match (a.start_direction(x, &link), b.start_direction(x, &link)) {
            (Some(da), Some(db)) => link.angle_between(da, db)?,
            // a corner repeated by its neighbour turns back fully
            _ => 0.0,
        };
        k += PI - ang;
    }
    Ok(k)
}

fn add_path(b: &mut Builder, g: &Geodesic, upto: f64, x: &TriangleComplex) {
    let arc = g.path.arclengths(x);
    for i in 0..g.path.cells.len() {
        if arc[i] >= upto {
            break;
        }
        let end = if arc[i + 1] <= upto { g.path.points[i + 1] } else { g.path.point_at_length_with(x, &arc, upto) };
        b.segment(g.path.points[i], end);
    }
}

/// Add the cone from `apex` over the geodesic `side` to the builder.
fn add_cone(x: &TriangleComplex, b: &mut Builder, tree: &SourceTree, side: &Geodesic) -> Result<()> {
    for piece in cone_pieces(x, tree, side)? {
        for (t, poly) in piece.polygons(x) {
            b.polygon(t, &poly);
        }
    }
    Ok(())
}

/// Cone the closed geodesic polygon through `corners` from its first corner.
pub fn initial_filling(x: &TriangleComplex, corners: &[PointRef]) -> Result<Diagram> {
    let c: Vec<PointRef> = corners.iter().map(|p| x.canonicalize(p)).collect::<Result<_>>()?;
    let mut b = Builder::new(x);
    for p in &c {
        b.mark(*p);
    }
    let tree = SourceTree::new(x, c[0]);
    for i in 1..c.len().saturating_sub(1) {
        let side = geodesic(x, &c[i], &c[i + 1])?;
        add_cone(x, &mut b, &tree, &side)?;
    }
    // the sides themselves, which matter where the filling is flat
    for i in 0..c.len() {
        let g = geodesic(x, &c[i], &c[(i + 1) % c.len()])?;
        add_path(&mut b, &g, f64::INFINITY, x);
    }
    Ok(b.finish())
}

/// A disc diagram with its folding record.
#[derive(Debug, Clone)]
pub struct FilledDisc {
    pub diagram: Diagram,
    pub fold: FoldReport,
    /// Pairs of diagram triangles whose images share interior points.
    pub overlaps: Vec<(usize, usize)>,
}

/// Pairs of triangles with overlapping images.
pub fn find_overlaps(x: &TriangleComplex, d: &Diagram) -> Vec<(usize, usize)> {
    let mut by_cell: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, t) in d.tris.iter().enumerate() {
        by_cell.entry(t.cell).or_default().push(i);
    }
    let mut out = Vec::new();
    let mut cells: Vec<_> = by_cell.into_iter().collect();
    cells.sort();
    for (_, list) in cells {
        let polys: Vec<[P2; 3]> = list.iter().map(|&t| d.corner_positions(x, t)).collect();
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                if convex_overlap(&ccw(polys[i]), &ccw(polys[j]), 1e-9) {
                    out.push((list[i], list[j]));
                }
            }
        }
    }
    out
}

fn ccw(mut p: [P2; 3]) -> [P2; 3] {
    if crate::geom::orient(p[0], p[1], p[2]) < 0.0 {
        p.swap(1, 2);
    }
    p
}

/// Embedded filling of a closed geodesic polygon of total curvature below 4π.
pub fn fill_disc(x: &TriangleComplex, corners: &[PointRef]) -> Result<FilledDisc> {
    let kappa = total_curvature(x, corners)?;
    if kappa >= 4.0 * PI - EPS_ANG {
        return Err(Error::CurvatureTooLarge(kappa));
    }
    let d = initial_filling(x, corners)?;
    let (diagram, report) = fold(x, d);
    let overlaps = find_overlaps(x, &diagram);
    if !overlaps.is_empty() {
        return Err(Error::InjectivityFailure(format!("{} overlapping triangle pairs", overlaps.len())));
    }
    Ok(FilledDisc { diagram, fold: report, overlaps })
}

/// The full triangle as an embedded spiky-triangle diagram.
#[derive(Debug, Clone)]
pub struct FullTriangleDisc {
    pub corners: [PointRef; 3],
    pub spiky: SpikyTriangle,
    pub filled: FilledDisc,
}

impl FullTriangleDisc {
    pub fn diagram(&self) -> &Diagram {
        &self.filled.diagram
    }

    pub fn image(&self, x: &TriangleComplex) -> DiscImage {
        DiscImage::new(x, &self.filled.diagram)
    }
}

/// Spiky decomposition, a coned and folded core, and the spikes attached.
pub fn full_triangle_disc(x: &TriangleComplex, a: &PointRef, b: &PointRef, c: &PointRef) -> Result<FullTriangleDisc> {
    let corners = [x.canonicalize(a)?, x.canonicalize(b)?, x.canonicalize(c)?];
    let spiky = spiky_decomposition(x, corners)?;
    full_triangle_disc_from(x, spiky)
}

pub fn full_triangle_disc_from(x: &TriangleComplex, spiky: SpikyTriangle) -> Result<FullTriangleDisc> {
    let corners = spiky.corners;
    let mut b = Builder::new(x);
    for p in &corners {
        b.mark(*p);
    }
    let [p0, p1, p2] = spiky.spike_ends;
    let degenerate = spiky.is_degenerate(x);
    if degenerate {
        for g in &spiky.sides {
            add_path(&mut b, g, f64::INFINITY, x);
        }
    } else {
        let tree = SourceTree::new(x, p0);
        let core_side = geodesic(x, &p1, &p2)?;
        add_cone(x, &mut b, &tree, &core_side)?;
        for k in 0..3 {
            if spiky.spike_lengths[k] > 0.0 {
                add_path(&mut b, &spiky.sides[k], spiky.spike_lengths[k], x);
            }
        }
    }
    let d = b.finish();
    let (diagram, report) = fold(x, d);
    let overlaps = find_overlaps(x, &diagram);
    if !overlaps.is_empty() {
        return Err(Error::InjectivityFailure(format!("{} overlapping triangle pairs", overlaps.len())));
    }
    Ok(FullTriangleDisc { corners, spiky, filled: FilledDisc { diagram, fold: report, overlaps } })
}

/// The image of a diagram, for point membership tests.
#[derive(Debug, Clone)]
pub struct DiscImage {
    by_cell: HashMap<usize, Vec<[P2; 3]>>,
    /// Free edges and boundary edges as (cell, end images).
    free: Vec<(Cell, PointRef, PointRef)>,
    boundary: Vec<(Cell, PointRef, PointRef)>,
}

impl DiscImage {
    pub fn new(x: &TriangleComplex, d: &Diagram) -> Self {
        let mut by_cell: HashMap<usize, Vec<[P2; 3]>> = HashMap::new();
        for t in 0..d.tris.len() {
            by_cell.entry(d.tris[t].cell).or_default().push(ccw(d.corner_positions(x, t)));
        }
        let inc = d.edge_incidence();
        let mut free = Vec::new();
        let mut boundary = Vec::new();
        for (i, e) in d.edges.iter().enumerate() {
            let item = (e.cell, d.verts[e.v[0]], d.verts[e.v[1]]);
            match inc[i] {
                0 => {
                    free.push(item);
                    boundary.push(item);
                }
                1 => boundary.push(item),
                _ => {}
            }
        }
        DiscImage { by_cell, free, boundary }
    }

    /// Whether `p` lies in the image, up to distance `eps`.
    pub fn contains(&self, x: &TriangleComplex, p: &PointRef, eps: f64) -> bool {
        for c in x.star(p.carrier()) {
            if let Cell::Tri(t) = c {
                if let (Some(list), Some(q)) = (self.by_cell.get(&t), x.tri_pos(t, p)) {
                    if list.iter().any(|tri| near_triangle(tri, q, eps)) {
                        return true;
                    }
                }
            }
        }
        self.free.iter().any(|s| seg_dist(x, s, p).is_some_and(|d| d <= eps))
    }

    /// Distance from `p` to the image boundary among segments sharing a cell with `p`.
    pub fn boundary_distance(&self, x: &TriangleComplex, p: &PointRef) -> f64 {
        self.boundary.iter().filter_map(|s| seg_dist(x, s, p)).fold(f64::INFINITY, f64::min)
    }

    /// Triangles of `X` receiving a triangle of the diagram.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_cell.keys().copied()
    }

    /// Boundary segments (free edges included) as (cell, end, end).
    pub fn boundary_segments(&self) -> &[(Cell, PointRef, PointRef)] {
        &self.boundary
    }

    /// Total area of the image triangles.
    pub fn area(&self) -> f64 {
        self.by_cell
            .values()
            .flatten()
            .map(|t| crate::geom::polygon_area(t).abs())
            .sum()
    }
}

/// Whether `q` is within `eps` of the triangle. Half-plane slack alone would
/// reach far beyond the apex of a thin triangle.
fn near_triangle(tri: &[P2; 3], q: P2, eps: f64) -> bool {
    in_convex(tri, q, 0.0) || (0..3).any(|k| dist_point_segment(tri[k], tri[(k + 1) % 3], q) <= eps)
}

/// Distance from `p` to a segment in a cell, when both lie in a common closed cell.
pub(crate) fn seg_dist(x: &TriangleComplex, s: &(Cell, PointRef, PointRef), p: &PointRef) -> Option<f64> {
    let (cell, a, b) = s;
    let sup = x.star(*cell).into_iter().filter(|&c| x.is_face(p.carrier(), c)).min_by_key(|c| c.dim())?;
    let emb = |q: &PointRef| -> Option<P2> {
        match sup {
            Cell::Tri(t) => x.tri_pos(t, q),
            Cell::Edge(e) => x.edge_param(e, q).map(|s| P2::new(s * x.edges[e].len, 0.0)),
            Cell::Vertex(_) => Some(P2::default()),
        }
    };
    Some(dist_point_segment(emb(a)?, emb(b)?, emb(p)?))
}

/// Check that a point lies in the diagram image within `EPS_GEO`.
pub fn image_contains(x: &TriangleComplex, d: &Diagram, p: &PointRef) -> bool {
    DiscImage::new(x, d).contains(x, p, EPS_GEO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point, tripod_interval, GraphPoint};
    use crate::disc::gauss_bonnet;

    #[test]
    fn planar_triangle_disc_has_euclidean_area() {
        let g = flat_grid(4);
        let x = &g.complex;
        let (a, b, c) = ((0.3, 0.4), (3.6, 1.1), (1.2, 3.3));
        let disc = full_triangle_disc(x, &grid_point(&g, a.0, a.1), &grid_point(&g, b.0, b.1), &grid_point(&g, c.0, c.1))
            .unwrap();
        let d = disc.diagram();
        assert!(d.is_disc(), "chi {}", d.euler_characteristic());
        let want = ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).abs() / 2.0;
        let area = disc.image(x).area();
        assert!((area - want).abs() < 1e-9, "{area} vs {want}");
        let gb = gauss_bonnet(x, d);
        assert!(gb.residual < 1e-9);
        assert!(gb.sign_ok, "{gb:?}");
    }

    #[test]
    fn tripod_triangle_has_spikes_and_signs() {
        let g = tripod_interval();
        let x = &g.complex;
        let p = |leg, s, y| g.point(GraphPoint { edge: leg, s }, GraphPoint { edge: 0, s: y });
        let disc = full_triangle_disc(x, &p(0, 0.8, 0.2), &p(1, 0.7, 0.5), &p(2, 0.6, 0.9)).unwrap();
        let d = disc.diagram();
        assert!(d.is_disc());
        // one flat triangle per leg, each with a side on the spine
        let spine = |s0: f64, y0: f64, s1: f64, y1: f64| y0 + (y1 - y0) * s0 / (s0 + s1);
        let (ab, ac, bc) = (spine(0.8, 0.2, 0.7, 0.5), spine(0.8, 0.2, 0.6, 0.9), spine(0.7, 0.5, 0.6, 0.9));
        let want = 0.5 * (0.8 * (ac - ab) + 0.7 * (bc - ab) + 0.6 * (bc - ac));
        assert!((disc.image(x).area() - want).abs() < 1e-9);
        let gb = gauss_bonnet(x, d);
        assert!(gb.residual < 1e-9);
        assert!(gb.sign_ok, "{gb:?}");
        // each corner lies in the image
        let img = disc.image(x);
        for c in &disc.corners {
            assert!(img.contains(x, c, 1e-9));
        }
    }

    #[test]
    fn tripod_spike_is_a_free_edge() {
        let g = tripod_interval();
        let x = &g.complex;
        let p = |leg, s, y| g.point(GraphPoint { edge: leg, s }, GraphPoint { edge: 0, s: y });
        // both sides from the first corner climb to the spine point at height 0.7 together
        let disc = full_triangle_disc(x, &p(0, 0.5, 0.5), &p(1, 0.5, 0.9), &p(2, 0.5, 0.9)).unwrap();
        let want = 0.5 * 1.16f64.sqrt();
        assert!((disc.spiky.spike_lengths[0] - want).abs() < 1e-9, "{:?}", disc.spiky.spike_lengths);
        let d = disc.diagram();
        assert_eq!(d.euler_characteristic(), 1);
        assert!(d.edge_incidence().contains(&0));
        let gb = gauss_bonnet(x, d);
        assert!(gb.residual < 1e-9);
        assert!(gb.sign_ok, "{gb:?}");
        // the core is two flat triangles of base 0.2 and height 0.5 on the spine
        assert!((disc.image(x).area() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn square_is_filled_injectively() {
        let g = flat_grid(3);
        let x = &g.complex;
        let corners = [(0.5, 0.5), (2.5, 0.5), (2.5, 2.5), (0.5, 2.5)].map(|(a, b)| grid_point(&g, a, b));
        let f = fill_disc(x, &corners).unwrap();
        assert!(f.overlaps.is_empty());
        assert!(f.diagram.is_disc());
        assert!((DiscImage::new(x, &f.diagram).area() - 4.0).abs() < 1e-9);
        assert!((total_curvature(x, &corners).unwrap() - 2.0 * PI).abs() < 1e-9);
    }
}
