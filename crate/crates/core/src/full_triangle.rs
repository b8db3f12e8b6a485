//! Membership in full triangles, and classification of quadruples.
//!
//! A point `p` off the geodesic triangle belongs to the full triangle when
//! the triangle is essential in `X − p`. Locally this is read off the link
//! of `p`: the directions toward the three corners, joined by link
//! geodesics, form a cycle that is nontrivial after free reduction.

use crate::complex::{PointRef, TriangleComplex};
use crate::error::Result;
use crate::geodesic::steiner::SourceTree;
use crate::geodesic::{
    geodesic, geodesic_intersection, geodesic_with_tree, spiky_from_sides, Geodesic, Intersection, SpikyTriangle,
};
use crate::link::{build_link, free_reduce_cycle, LinkSeg};
use crate::EPS_GEO;

/// A triangle prepared for repeated membership queries.
pub struct FullTriangleQuery<'a> {
    pub x: &'a TriangleComplex,
    pub corners: [PointRef; 3],
    trees: [SourceTree; 3],
    pub spiky: SpikyTriangle,
}

/// Whether `p` lies within `EPS_GEO` of geodesic `g`.
pub fn near_geodesic(x: &TriangleComplex, g: &Geodesic, p: &PointRef) -> bool {
    position_on(x, g, p).is_some()
}

/// Arclength position of `p` on `g`, if `p` lies within `EPS_GEO` of it.
pub fn position_on(x: &TriangleComplex, g: &Geodesic, p: &PointRef) -> Option<f64> {
    let pt = Geodesic { path: crate::PiecewisePath::single(*p), length: 0.0, worst_violation: 0.0 };
    geodesic_intersection(x, g, &pt).range_on_first().map(|r| (r[0] + r[1]) / 2.0)
}

impl<'a> FullTriangleQuery<'a> {
    pub fn new(x: &'a TriangleComplex, corners: [PointRef; 3]) -> Result<Self> {
        let mut c = corners;
        for p in c.iter_mut() {
            *p = x.canonicalize(p)?;
        }
        let trees = [SourceTree::new(x, c[0]), SourceTree::new(x, c[1]), SourceTree::new(x, c[2])];
        let sides = [
            geodesic_with_tree(x, &trees[0], &c[1])?,
            geodesic_with_tree(x, &trees[1], &c[2])?,
            geodesic_with_tree(x, &trees[2], &c[0])?,
        ];
        let spiky = spiky_from_sides(x, c, sides)?;
        Ok(FullTriangleQuery { x, corners: c, trees, spiky })
    }

    pub fn sides(&self) -> &[Geodesic; 3] {
        &self.spiky.sides
    }

    /// Whether `p` lies on one of the three sides.
    pub fn on_boundary(&self, p: &PointRef) -> bool {
        self.spiky.sides.iter().any(|g| near_geodesic(self.x, g, p))
    }

    /// Geodesic from `p` to corner `k`.
    pub fn to_corner(&self, p: &PointRef, k: usize) -> Result<Geodesic> {
        Ok(geodesic_with_tree(self.x, &self.trees[k], p)?.reversed())
    }

    /// The reduced link cycle at `p`; empty when `p` is outside the full triangle.
    pub fn link_cycle(&self, p: &PointRef) -> Result<Vec<LinkSeg>> {
        let x = self.x;
        let p = x.canonicalize(p)?;
        let link = build_link(x, &p);
        let mut dirs = Vec::with_capacity(3);
        for k in 0..3 {
            let g = self.to_corner(&p, k)?;
            match g.start_direction(x, &link) {
                Some(d) => dirs.push(d),
                None => return Ok(vec![]),
            }
        }
        let mut segs = Vec::new();
        for k in 0..3 {
            let lp = link.geodesic(dirs[k], dirs[(k + 1) % 3])?;
            segs.extend(lp.segs);
        }
        Ok(free_reduce_cycle(&segs))
    }

    pub fn contains(&self, p: &PointRef) -> Result<bool> {
        if self.on_boundary(p) {
            return Ok(true);
        }
        Ok(!self.link_cycle(p)?.is_empty())
    }
}

/// Pairwise geodesics among a handful of points.
#[derive(Debug, Clone)]
pub struct GeodesicTable {
    pub points: Vec<PointRef>,
    geos: Vec<Vec<Option<Geodesic>>>,
}

impl GeodesicTable {
    pub fn new(x: &TriangleComplex, points: &[PointRef]) -> Result<Self> {
        let n = points.len();
        let mut geos = vec![vec![None; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                geos[i][j] = Some(geodesic(x, &points[i], &points[j])?);
            }
        }
        Ok(GeodesicTable { points: points.to_vec(), geos })
    }

    /// Geodesic from point `i` to point `j`.
    pub fn get(&self, i: usize, j: usize) -> Geodesic {
        if i < j {
            self.geos[i][j].clone().unwrap()
        } else if i > j {
            self.geos[j][i].as_ref().unwrap().reversed()
        } else {
            Geodesic { path: crate::PiecewisePath::single(self.points[i]), length: 0.0, worst_violation: 0.0 }
        }
    }
}

/// The three ways of splitting four indices into two pairs.
pub const OPPOSITE_PAIRS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

#[derive(Debug, Clone)]
pub struct QuadrupleClass {
    /// Intersection of the two geodesics of each split in [`OPPOSITE_PAIRS`].
    pub opposite: [Intersection; 3],
    /// First split whose geodesics overlap in a segment.
    pub lanky: Option<usize>,
    /// For the triple omitting index `i`: whether each pair of sides meets only at their corner.
    pub strongly_non_collinear: [bool; 4],
}

impl QuadrupleClass {
    /// Length of the overlap of the lanky split.
    pub fn lanky_segment(&self) -> Option<[f64; 2]> {
        match &self.opposite[self.lanky?] {
            Intersection::Segment { on_first, .. } => Some(*on_first),
            _ => None,
        }
    }
}

pub fn classify_quadruple(x: &TriangleComplex, table: &GeodesicTable) -> Result<QuadrupleClass> {
    let opposite = OPPOSITE_PAIRS.map(|[(a, b), (c, d)]| geodesic_intersection(x, &table.get(a, b), &table.get(c, d)));
    let lanky = opposite.iter().position(|i| match i {
        Intersection::Segment { on_first, .. } => on_first[1] - on_first[0] > EPS_GEO,
        _ => false,
    });
    let mut snc = [true; 4];
    for (omit, flag) in snc.iter_mut().enumerate() {
        let idx: Vec<usize> = (0..4).filter(|&i| i != omit).collect();
        let corners = [table.points[idx[0]], table.points[idx[1]], table.points[idx[2]]];
        let sides = [table.get(idx[0], idx[1]), table.get(idx[1], idx[2]), table.get(idx[2], idx[0])];
        let sp = spiky_from_sides(x, corners, sides)?;
        *flag = sp.spike_lengths.iter().all(|&l| l <= EPS_GEO);
    }
    Ok(QuadrupleClass { opposite, lanky, strongly_non_collinear: snc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{flat_grid, grid_point, tripod_interval, GraphPoint};
    use crate::geom::{orient, P2};

    #[test]
    fn planar_inside_outside() {
        let g = flat_grid(6);
        let x = &g.complex;
        let c = [(0.5, 0.7), (5.2, 1.1), (2.3, 5.6)];
        let q = FullTriangleQuery::new(x, c.map(|(a, b)| grid_point(&g, a, b))).unwrap();
        let pts = [(2.0, 2.0), (2.6, 2.6), (4.0, 4.0), (0.1, 0.1), (5.5, 5.5), (3.0, 1.0), (1.0, 3.0), (0.7, 2.5)];
        let tri = c.map(|(a, b)| P2::new(a, b));
        for (a, b) in pts {
            let p = P2::new(a, b);
            let want = (0..3).all(|i| orient(tri[i], tri[(i + 1) % 3], p) > 0.0);
            assert_eq!(q.contains(&grid_point(&g, a, b)).unwrap(), want, "{a},{b}");
        }
    }

    #[test]
    fn tripod_centre_on_side() {
        let ti = tripod_interval();
        let x = &ti.complex;
        let p = ti.point(GraphPoint { edge: 0, s: 1.0 }, GraphPoint { edge: 0, s: 1.0 });
        let q = ti.point(GraphPoint { edge: 1, s: 1.0 }, GraphPoint { edge: 0, s: 0.0 });
        let r = ti.point(GraphPoint { edge: 2, s: 1.0 }, GraphPoint { edge: 0, s: 0.0 });
        let f = FullTriangleQuery::new(x, [p, q, r]).unwrap();
        let s = ti.point(GraphPoint { edge: 0, s: 0.0 }, GraphPoint { edge: 0, s: 0.0 });
        assert!(f.contains(&s).unwrap());
        // interior of the core triangle in the b-c sheet
        let inside = ti.point(GraphPoint { edge: 1, s: 0.1 }, GraphPoint { edge: 0, s: 0.2 });
        assert!(f.contains(&inside).unwrap());
        // off the spike in the a-sheet
        let off = ti.point(GraphPoint { edge: 0, s: 0.5 }, GraphPoint { edge: 0, s: 0.2 });
        assert!(!f.contains(&off).unwrap());
        // above the core in the b-c sheet
        let above = ti.point(GraphPoint { edge: 1, s: 0.1 }, GraphPoint { edge: 0, s: 0.9 });
        assert!(!f.contains(&above).unwrap());
    }

    #[test]
    fn quadruple_classes() {
        let g = flat_grid(4);
        let x = &g.complex;
        let line = [(0.0, 0.0), (3.0, 0.0), (1.0, 0.0), (2.0, 0.0)].map(|(a, b)| grid_point(&g, a, b));
        let c = classify_quadruple(x, &GeodesicTable::new(x, &line).unwrap()).unwrap();
        assert_eq!(c.lanky, Some(0));
        let seg = c.lanky_segment().unwrap();
        assert!((seg[1] - seg[0] - 1.0).abs() < 1e-9);

        let sq = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)].map(|(a, b)| grid_point(&g, a, b));
        let c = classify_quadruple(x, &GeodesicTable::new(x, &sq).unwrap()).unwrap();
        assert_eq!(c.lanky, None);
        assert!(c.strongly_non_collinear.iter().all(|&b| b));
    }
}
