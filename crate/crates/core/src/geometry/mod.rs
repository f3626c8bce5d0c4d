//! Compact convex bodies in ℝ¹, ℝ², ℝ³ stored as canonical hull vertex lists.
//!
//! Support, projection and Hausdorff distance are exact on polytopes. Curved
//! sets enter only through boundary samplings.

mod ball;
mod hull;
mod nearest;
mod quadrature;
mod steiner;
pub mod vector;

pub use ball::{ball_intersect_p, BallOptions, DEFAULT_BALL_NODES, SINGLETON_EPS};
pub use quadrature::{gauss_legendre, SphereQuadrature};
pub use steiner::{steiner, steiner_point, steiner_point_exact, SteinerRule};

use crate::error::{input_err, Error, Result};
use hull::Facet;
use vector::dist;

/// Nonempty compact convex set `conv(vertices)` with canonical vertex order.
///
/// In ℝ² vertices run counterclockwise from the lexicographically smallest;
/// in ℝ¹ and ℝ³ they are sorted lexicographically.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    dim: usize,
    coords: Vec<f64>,
    facets: Vec<Facet>,
    edges: Vec<[[f64; 3]; 2]>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coords == other.coords
    }
}

impl ConvexBody {
    /// Hull of a flat point list; drops non-extreme points.
    pub fn from_points(dim: usize, coords: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return input_err(format!("dimension {dim} not supported"));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return input_err("point list is empty or ragged");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return input_err("non-finite coordinate");
        }
        Ok(match dim {
            1 => Self { dim, coords: hull::hull1(coords), facets: vec![], edges: vec![] },
            2 => Self { dim, coords: hull::hull2(coords), facets: vec![], edges: vec![] },
            _ => {
                let h = hull::hull3(coords);
                Self { dim, coords: h.vertices, facets: h.facets, edges: h.edges }
            }
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != dim) {
            return input_err("rows of unequal length");
        }
        Self::from_points(dim, &rows.concat())
    }

    pub fn singleton(p: &[f64]) -> Result<Self> {
        Self::from_points(p.len(), p)
    }

    /// Hull of `n` equally spaced boundary points of the disc `B(c, r)`.
    pub fn disc(c: [f64; 2], r: f64, n: usize) -> Result<Self> {
        let pts: Vec<f64> = (0..n)
            .flat_map(|j| {
                let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                [c[0] + r * th.cos(), c[1] + r * th.sin()]
            })
            .collect();
        Self::from_points(2, &pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat canonical vertex list.
    pub fn vertices(&self) -> &[f64] {
        &self.coords
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn is_singleton(&self) -> bool {
        self.num_vertices() == 1
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::Dimension { expected: self.dim, got });
        }
        Ok(())
    }

    /// `σ(K,p) = max_{x∈K} ⟨p,x⟩`.
    pub fn support(&self, p: &[f64]) -> Result<f64> {
        Ok(self.support_argmax(p)?.0)
    }

    /// Support value and the lexicographically smallest maximizing vertex index.
    pub fn support_argmax(&self, p: &[f64]) -> Result<(f64, usize)> {
        self.check_dim(p.len())?;
        Ok(self.support_unchecked(p))
    }

    pub(crate) fn support_unchecked(&self, p: &[f64]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, v) in self.iter().enumerate() {
            let s = vector::dot(p, v);
            if s > best.0 || (s == best.0 && vector::lex_cmp(v, self.vertex(best.1)).is_lt()) {
                best = (s, i);
            }
        }
        best
    }

    /// Nearest point of the body to `y` and the distance `d(y,K)`.
    pub fn project(&self, y: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_dim(y.len())?;
        Ok(self.project_unchecked(y))
    }

    pub(crate) fn project_unchecked(&self, y: &[f64]) -> (Vec<f64>, f64) {
        match self.dim {
            1 => {
                let lo = self.coords[0];
                let hi = *self.coords.last().unwrap();
                let p = y[0].clamp(lo, hi);
                (vec![p], (y[0] - p).abs())
            }
            2 => {
                let verts: Vec<[f64; 2]> = self.iter().map(|v| [v[0], v[1]]).collect();
                let (p, d) = nearest::nearest_polygon(&verts, [y[0], y[1]]);
                (p.to_vec(), d)
            }
            _ => {
                if self.num_vertices() == 1 {
                    return (self.coords.clone(), dist(&self.coords, y));
                }
                if self.num_vertices() == 2 {
                    return nearest::nearest_on_segment(self.vertex(0), self.vertex(1), y);
                }
                if !self.facets.is_empty() && self.contains_facets(y, 0.0) {
                    return (y.to_vec(), 0.0);
                }
                nearest::wolfe_nearest(3, &self.coords, y)
            }
        }
    }

    /// `d(y, K)`.
    pub fn distance(&self, y: &[f64]) -> Result<f64> {
        Ok(self.project(y)?.1)
    }

    /// Membership with absolute tolerance `tol` on the distance.
    pub fn contains(&self, y: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(y.len())?;
        if self.dim == 3 && !self.facets.is_empty() {
            return Ok(self.contains_facets(y, tol));
        }
        Ok(self.project_unchecked(y).1 <= tol)
    }

    fn contains_facets(&self, y: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| f.normal[0] * y[0] + f.normal[1] * y[1] + f.normal[2] * y[2] - f.offset <= tol)
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.iter().enumerate() {
            for b in self.iter().skip(i + 1) {
                d = d.max(dist(a, b));
            }
        }
        d
    }

    /// Serializes vertices as CSV rows `x1,...,xm`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for v in self.iter() {
            let row: Vec<String> = v.iter().map(|c| crate::io::fmt_num(*c)).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv<R: std::io::Read>(rdr: R) -> Result<Self> {
        let rows = crate::io::read_float_rows(rdr)?;
        if rows.is_empty() {
            return input_err("empty body file");
        }
        Self::from_rows(&rows)
    }
}

/// Directed distance `sup_{x∈K} d(x,D)`; attained at a vertex of `K`.
pub fn excess(k: &ConvexBody, d: &ConvexBody) -> Result<f64> {
    k.check_dim(d.dim)?;
    Ok(k.iter().map(|v| d.project_unchecked(v).1).fold(0.0, f64::max))
}

/// Hausdorff distance `max{sup_K d(·,D), sup_D d(·,K)}`.
pub fn hausdorff(k: &ConvexBody, d: &ConvexBody) -> Result<f64> {
    Ok(excess(k, d)?.max(excess(d, k)?))
}
