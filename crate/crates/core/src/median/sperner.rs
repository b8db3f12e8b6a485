//! Sperner colourings of triangulated discs with three marked corners.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A triangulated disc whose boundary is split into three sides.
#[derive(Debug, Clone, PartialEq)]
pub struct SpernerDisc {
    pub num_vertices: usize,
    pub tris: Vec<[usize; 3]>,
    /// `sides[k]` runs from corner `k` to corner `k + 1`, both included.
    pub sides: [Vec<usize>; 3],
    /// Colours in `{1, 2, 3}`; corner `k` must carry colour `k + 1`.
    pub colors: Vec<u8>,
}

/// Vertex `(i, j)` of the `n`-fold subdivided triangle, `i + j <= n`.
pub fn grid_index(n: usize, i: usize, j: usize) -> usize {
    // rows of decreasing length n+1, n, ..., 1
    i * (n + 1) - i * (i.saturating_sub(1)) / 2 + j
}

impl SpernerDisc {
    /// Regular `n`-fold subdivision of a triangle into `n²` triangles, coloured 1.
    ///
    /// Vertex `(i, j)` sits at `corner0 + i·(corner2 − corner0)/n + j·(corner1 − corner0)/n`.
    pub fn subdivided(n: usize) -> Self {
        let n = n.max(1);
        let id = |i: usize, j: usize| grid_index(n, i, j);
        let num_vertices = (n + 1) * (n + 2) / 2;
        let mut tris = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n - i {
                tris.push([id(i, j), id(i, j + 1), id(i + 1, j)]);
                if j + 1 < n - i {
                    tris.push([id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)]);
                }
            }
        }
        let side0 = (0..=n).map(|j| id(0, j)).collect();
        let side1 = (0..=n).map(|i| id(i, n - i)).collect();
        let side2 = (0..=n).rev().map(|i| id(i, 0)).collect();
        SpernerDisc { num_vertices, tris, sides: [side0, side1, side2], colors: vec![1; num_vertices] }
    }

    /// Corners `0`, `1`, `2` of the disc.
    pub fn corners(&self) -> [usize; 3] {
        [self.sides[0][0], self.sides[1][0], self.sides[2][0]]
    }

    /// Colour the corners and let `pick` choose the remaining boundary and interior colours.
    pub fn color_with(&mut self, mut pick: impl FnMut(usize, &[u8]) -> u8) {
        let mut allowed: Vec<Vec<u8>> = vec![vec![1, 2, 3]; self.num_vertices];
        for (k, side) in self.sides.iter().enumerate() {
            let a = k as u8 + 1;
            let b = (k as u8 + 1) % 3 + 1;
            for &v in &side[1..side.len() - 1] {
                allowed[v] = vec![a, b];
            }
        }
        for (k, c) in self.corners().into_iter().enumerate() {
            allowed[c] = vec![k as u8 + 1];
        }
        for v in 0..self.num_vertices {
            self.colors[v] = pick(v, &allowed[v]);
        }
    }

    /// Check the disc structure and the boundary rule.
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Error::InvalidColoring(why.to_string());
        if self.colors.len() != self.num_vertices || self.colors.iter().any(|c| !(1..=3).contains(c)) {
            return Err(bad("colors must be 1, 2 or 3 for every vertex"));
        }
        for (k, side) in self.sides.iter().enumerate() {
            let next = &self.sides[(k + 1) % 3];
            if side.len() < 2 || side.last() != next.first() {
                return Err(bad("sides must be chained paths"));
            }
            let (a, b) = (k as u8 + 1, (k as u8 + 1) % 3 + 1);
            if self.colors[side[0]] != a {
                return Err(bad("side does not start with its corner color"));
            }
            if side.iter().any(|&v| self.colors[v] != a && self.colors[v] != b) {
                return Err(bad("side vertex uses a color outside its side"));
            }
        }
        // boundary edges must be exactly the side edges
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut boundary: Vec<(usize, usize)> =
            count.iter().filter(|(_, &c)| c == 1).map(|(&e, _)| e).collect();
        if count.values().any(|&c| c > 2) {
            return Err(bad("an edge lies on more than two triangles"));
        }
        let mut sides: Vec<(usize, usize)> = self
            .sides
            .iter()
            .flat_map(|s| s.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
            .collect();
        boundary.sort();
        sides.sort();
        if boundary != sides {
            return Err(bad("boundary edges differ from the side edges"));
        }
        let e = count.len() as i64;
        let chi = self.num_vertices as i64 - e + self.tris.len() as i64;
        if chi != 1 {
            return Err(bad("the triangles do not form a disc"));
        }
        Ok(())
    }

    pub fn is_rainbow(&self, t: usize) -> bool {
        let mut c: Vec<u8> = self.tris[t].iter().map(|&v| self.colors[v]).collect();
        c.sort_unstable();
        c == [1, 2, 3]
    }
}

/// First rainbow triangle and the total number of rainbow triangles.
pub fn sperner_rainbow(d: &SpernerDisc) -> Result<(usize, usize)> {
    d.validate()?;
    let rainbow: Vec<usize> = (0..d.tris.len()).filter(|&t| d.is_rainbow(t)).collect();
    match rainbow.first() {
        Some(&t) => Ok((t, rainbow.len())),
        None => Err(Error::InvalidColoring("no rainbow triangle".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let mut d = SpernerDisc::subdivided(1);
        d.color_with(|_, a| a[0]);
        assert_eq!(sperner_rainbow(&d).unwrap(), (0, 1));
    }

    #[test]
    fn barycentric_subdivision_with_centre_one() {
        let d = SpernerDisc {
            num_vertices: 4,
            tris: vec![[0, 1, 3], [1, 2, 3], [2, 0, 3]],
            sides: [vec![0, 1], vec![1, 2], vec![2, 0]],
            colors: vec![1, 2, 3, 1],
        };
        let (_, count) = sperner_rainbow(&d).unwrap();
        assert_eq!(count % 2, 1);
    }

    #[test]
    fn boundary_rule_enforced() {
        let mut d = SpernerDisc::subdivided(3);
        d.color_with(|_, a| a[0]);
        let mid = d.sides[0][1];
        d.colors[mid] = 3;
        assert!(matches!(sperner_rainbow(&d), Err(Error::InvalidColoring(_))));
    }

    #[test]
    fn subdivision_shape() {
        let d = SpernerDisc::subdivided(5);
        assert_eq!(d.tris.len(), 25);
        assert_eq!(d.num_vertices, 21);
        let mut c = d.clone();
        c.color_with(|v, a| a[v % a.len()]);
        c.validate().unwrap();
    }
}
