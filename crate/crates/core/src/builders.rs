//! Ready-made complexes: products of metric graphs (flat grids, tripod
//! products) and a positively curved cone.

use std::collections::HashMap;

use crate::complex::{Label, PointRef, RawComplex, RawEdge, RawTriangle, TriangleComplex};

/// A finite metric graph with labelled vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    pub vertices: Vec<String>,
    /// `(a, b, length)`; points on an edge are parametrised from `a`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl MetricGraph {
    /// Path with `n` edges of length `step`.
    pub fn path(n: usize, step: f64) -> Self {
        MetricGraph {
            vertices: (0..=n).map(|i| i.to_string()).collect(),
            edges: (0..n).map(|i| (i, i + 1, step)).collect(),
        }
    }

    /// Star with centre `o` and leaves `a`, `b`, `c`, legs of length `leg`.
    pub fn tripod(leg: f64) -> Self {
        MetricGraph {
            vertices: vec!["o".into(), "a".into(), "b".into(), "c".into()],
            edges: vec![(0, 1, leg), (0, 2, leg), (0, 3, leg)],
        }
    }
}

/// A point of a metric graph: parameter `s` in `[0, 1]` along edge `edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub s: f64,
}

/// A product of two metric graphs with every rectangle split along a diagonal.
#[derive(Debug, Clone)]
pub struct ProductComplex {
    pub complex: TriangleComplex,
    pub g: MetricGraph,
    pub h: MetricGraph,
    vid: Vec<Vec<usize>>,
    /// Rectangle `(g-edge, h-edge)` to its lower and upper triangle.
    squares: HashMap<(usize, usize), [usize; 2]>,
}

impl ProductComplex {
    pub fn new(g: MetricGraph, h: MetricGraph) -> Self {
        let mut raw = RawComplex::default();
        let vname = |u: usize, w: usize| Label::from(format!("{}_{}", g.vertices[u], h.vertices[w]));
        for u in 0..g.vertices.len() {
            for w in 0..h.vertices.len() {
                raw.vertices.push(vname(u, w));
            }
        }
        let edge = |raw: &mut RawComplex, a: Label, b: Label, len: f64| -> Label {
            let id = Label::from(format!("e{}", raw.edges.len()));
            raw.edges.push(RawEdge { id: id.clone(), v: [a, b], len });
            id
        };
        let mut gedge = HashMap::new();
        for (i, &(a, b, len)) in g.edges.iter().enumerate() {
            for w in 0..h.vertices.len() {
                gedge.insert((i, w), edge(&mut raw, vname(a, w), vname(b, w), len));
            }
        }
        let mut hedge = HashMap::new();
        for (j, &(c, d, len)) in h.edges.iter().enumerate() {
            for u in 0..g.vertices.len() {
                hedge.insert((u, j), edge(&mut raw, vname(u, c), vname(u, d), len));
            }
        }
        let mut square_tris = Vec::new();
        for (i, &(a, b, lg)) in g.edges.iter().enumerate() {
            for (j, &(c, d, lh)) in h.edges.iter().enumerate() {
                let diag = edge(&mut raw, vname(a, c), vname(b, d), lg.hypot(lh));
                let lower = Label::from(format!("t{}", raw.triangles.len()));
                raw.triangles.push(RawTriangle {
                    id: lower,
                    edges: [gedge[&(i, c)].clone(), hedge[&(b, j)].clone(), diag.clone()],
                });
                let upper = Label::from(format!("t{}", raw.triangles.len()));
                raw.triangles.push(RawTriangle {
                    id: upper,
                    edges: [diag, gedge[&(i, d)].clone(), hedge[&(a, j)].clone()],
                });
                square_tris.push((i, j, raw.triangles.len() - 2));
            }
        }
        let complex = TriangleComplex::validate(&raw).expect("product complexes are valid");
        let vid = (0..g.vertices.len())
            .map(|u| (0..h.vertices.len()).map(|w| u * h.vertices.len() + w).collect())
            .collect();
        let squares = square_tris.into_iter().map(|(i, j, t)| ((i, j), [t, t + 1])).collect();
        ProductComplex { complex, g, h, vid, squares }
    }

    /// Vertex of the product over graph vertices `u` and `w`.
    pub fn vertex(&self, u: usize, w: usize) -> usize {
        self.vid[u][w]
    }

    /// The product point over `p` in the first factor and `q` in the second.
    pub fn point(&self, p: GraphPoint, q: GraphPoint) -> PointRef {
        let (a, b, _) = self.g.edges[p.edge];
        let (c, d, _) = self.h.edges[q.edge];
        let [lower, upper] = self.squares[&(p.edge, q.edge)];
        let (x, y) = (p.s.clamp(0.0, 1.0), q.s.clamp(0.0, 1.0));
        // corners of the rectangle in units of the factor parameters
        let (tri, corners, bary) = if x >= y {
            // lower triangle: (a,c) (b,c) (b,d)
            (lower, [self.vertex(a, c), self.vertex(b, c), self.vertex(b, d)], [1.0 - x, x - y, y])
        } else {
            // upper triangle: (a,c) (b,d) (a,d)
            (upper, [self.vertex(a, c), self.vertex(b, d), self.vertex(a, d)], [1.0 - y, x, y - x])
        };
        let t = &self.complex.tris[tri];
        let mut ordered = [0.0; 3];
        for k in 0..3 {
            ordered[t.vertex_index(corners[k]).expect("corner of its triangle")] = bary[k];
        }
        self.complex
            .canonicalize(&PointRef::Tri { tri, bary: ordered })
            .expect("product coordinates are in range")
    }
}

/// Flat `n × n` grid of unit squares, each split along a diagonal.
pub fn flat_grid(n: usize) -> ProductComplex {
    ProductComplex::new(MetricGraph::path(n, 1.0), MetricGraph::path(n, 1.0))
}

/// Point `(x, y)` of a flat grid built by [`flat_grid`], with `0 ≤ x, y ≤ n`.
pub fn grid_point(grid: &ProductComplex, x: f64, y: f64) -> PointRef {
    let n = grid.g.edges.len();
    let split = |v: f64| {
        let i = (v.floor() as usize).min(n - 1);
        GraphPoint { edge: i, s: v - i as f64 }
    };
    grid.point(split(x), split(y))
}

/// A uniformly random point in a triangle chosen with probability proportional to area.
pub fn random_point<R: rand::Rng>(x: &TriangleComplex, rng: &mut R) -> PointRef {
    let total: f64 = x.tris.iter().map(|t| t.area()).sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut tri = x.tris.len() - 1;
    for (t, cell) in x.tris.iter().enumerate() {
        if pick < cell.area() {
            tri = t;
            break;
        }
        pick -= cell.area();
    }
    let (mut a, mut b) = (rng.gen::<f64>(), rng.gen::<f64>());
    if a + b > 1.0 {
        (a, b) = (1.0 - a, 1.0 - b);
    }
    PointRef::Tri { tri, bary: [1.0 - a - b, a, b] }
}

/// Tripod with unit legs times the unit interval.
pub fn tripod_interval() -> ProductComplex {
    ProductComplex::new(MetricGraph::tripod(1.0), MetricGraph::path(1, 1.0))
}

/// Product of two tripods with unit legs.
pub fn tripod_tripod() -> ProductComplex {
    ProductComplex::new(MetricGraph::tripod(1.0), MetricGraph::tripod(1.0))
}

/// Three right isosceles triangles around an apex: total apex angle 3π/2.
pub fn cone_three_quarters() -> RawComplex {
    let mut raw = RawComplex { vertices: vec!["apex".into(), "b0".into(), "b1".into(), "b2".into()], ..Default::default() };
    for i in 0..3 {
        raw.edges.push(RawEdge { id: format!("leg{i}").into(), v: ["apex".into(), format!("b{i}").into()], len: 1.0 });
    }
    for i in 0..3 {
        let j = (i + 1) % 3;
        raw.edges.push(RawEdge {
            id: format!("rim{i}").into(),
            v: [format!("b{i}").into(), format!("b{j}").into()],
            len: std::f64::consts::SQRT_2,
        });
        raw.triangles.push(RawTriangle {
            id: format!("t{i}").into(),
            edges: [format!("leg{i}").into(), format!("rim{i}").into(), format!("leg{j}").into()],
        });
    }
    raw
}

/// Planar triangulation from vertex coordinates and index triples.
pub fn planar(points: &[(f64, f64)], tris: &[[usize; 3]]) -> RawComplex {
    let mut raw = RawComplex {
        vertices: (0..points.len()).map(|i| Label::from(format!("v{i}"))).collect(),
        ..Default::default()
    };
    let mut ids: HashMap<(usize, usize), Label> = HashMap::new();
    let mut edge = |raw: &mut RawComplex, a: usize, b: usize| -> Label {
        let key = (a.min(b), a.max(b));
        ids.entry(key)
            .or_insert_with(|| {
                let id = Label::from(format!("e{}_{}", key.0, key.1));
                let (p, q) = (points[key.0], points[key.1]);
                raw.edges.push(RawEdge {
                    id: id.clone(),
                    v: [raw.vertices[key.0].clone(), raw.vertices[key.1].clone()],
                    len: (p.0 - q.0).hypot(p.1 - q.1),
                });
                id
            })
            .clone()
    };
    for (k, t) in tris.iter().enumerate() {
        let e = [edge(&mut raw, t[0], t[1]), edge(&mut raw, t[1], t[2]), edge(&mut raw, t[2], t[0])];
        raw.triangles.push(RawTriangle { id: format!("t{k}").into(), edges: e });
    }
    raw
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let g = flat_grid(10);
        assert_eq!(g.complex.num_vertices(), 121);
        assert_eq!(g.complex.tris.len(), 200);
        assert_eq!(g.complex.euler_characteristic(), 1);
    }

    #[test]
    fn product_points_land_in_the_right_place() {
        let g = flat_grid(3);
        let p = grid_point(&g, 1.5, 2.25);
        let q = grid_point(&g, 1.75, 2.25);
        let d = g.complex.local_dist(&p, &q).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert_eq!(grid_point(&g, 2.0, 3.0), PointRef::Vertex(g.vertex(2, 3)));
    }

    #[test]
    fn tripod_products() {
        let ti = tripod_interval();
        assert_eq!(ti.complex.tris.len(), 6);
        assert_eq!(ti.complex.euler_characteristic(), 1);
        let tt = tripod_tripod();
        assert_eq!(tt.complex.tris.len(), 18);
        assert_eq!(tt.complex.euler_characteristic(), 1);
    }
}
