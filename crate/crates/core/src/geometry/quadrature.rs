//! Quadrature rules for the normalized surface measure on `S^{m−1}`.

use std::f64::consts::PI;

use crate::error::{input_err, Result};

/// Default node count on the circle.
pub const DEFAULT_CIRCLE_NODES: usize = 512;
/// Default Gauss–Legendre order in `z` for the sphere rule.
pub const DEFAULT_SPHERE_Z: usize = 17;
/// Default trapezoid node count in azimuth for the sphere rule.
pub const DEFAULT_SPHERE_PHI: usize = 34;

/// Nodes `p_j` on the unit sphere with weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereQuadrature {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    /// Builds a rule from raw nodes and weights.
    ///
    /// Nodes are normalized to unit length and weights rescaled to sum to one.
    pub fn new(dim: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return input_err(format!("sphere dimension {dim} not supported"));
        }
        if nodes.is_empty() || nodes.len() % dim != 0 || nodes.len() / dim != weights.len() {
            return input_err("quadrature needs matching nonempty nodes and weights");
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return input_err("quadrature weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return input_err("quadrature weights sum to zero");
        }
        let mut unit = nodes;
        for p in unit.chunks_exact_mut(dim) {
            let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            if r == 0.0 || !r.is_finite() {
                return input_err("quadrature node at the origin");
            }
            p.iter_mut().for_each(|c| *c /= r);
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { dim, nodes: unit, weights })
    }

    /// `{−1, +1}` with weights `½`; exact for every interval.
    pub fn interval() -> Self {
        Self { dim: 1, nodes: vec![-1.0, 1.0], weights: vec![0.5, 0.5] }
    }

    /// Trapezoid rule on `n` equally spaced angles starting at angle 0.
    pub fn circle(n: usize) -> Result<Self> {
        if n < 3 {
            return input_err("circle rule needs at least 3 nodes");
        }
        let mut nodes = Vec::with_capacity(2 * n);
        for j in 0..n {
            let th = 2.0 * PI * j as f64 / n as f64;
            nodes.push(th.cos());
            nodes.push(th.sin());
        }
        Ok(Self { dim: 2, nodes, weights: vec![1.0 / n as f64; n] })
    }

    /// Product rule: Gauss–Legendre in `z = cos θ` times trapezoid in azimuth.
    pub fn sphere(nz: usize, nphi: usize) -> Result<Self> {
        if nz < 2 || nphi < 3 {
            return input_err("sphere rule needs nz ≥ 2 and nphi ≥ 3");
        }
        let (zs, wz) = gauss_legendre(nz);
        let mut nodes = Vec::with_capacity(3 * nz * nphi);
        let mut weights = Vec::with_capacity(nz * nphi);
        for (z, w) in zs.iter().zip(&wz) {
            let s = (1.0 - z * z).max(0.0).sqrt();
            for k in 0..nphi {
                let ph = 2.0 * PI * (k as f64 + 0.5) / nphi as f64;
                nodes.extend_from_slice(&[s * ph.cos(), s * ph.sin(), *z]);
                weights.push(w / (2.0 * nphi as f64));
            }
        }
        Ok(Self { dim: 3, nodes, weights })
    }

    /// Default rule for dimension `m`.
    pub fn default_for(m: usize) -> Result<Self> {
        match m {
            1 => Ok(Self::interval()),
            2 => Self::circle(DEFAULT_CIRCLE_NODES),
            3 => Self::sphere(DEFAULT_SPHERE_Z, DEFAULT_SPHERE_PHI),
            _ => input_err(format!("sphere dimension {m} not supported")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.nodes[j * self.dim..(j + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    /// CSV rows `x1,...,xm` (equal weights) or `x1,...,xm,w`.
    pub fn from_csv<R: std::io::Read>(dim: usize, rdr: R) -> Result<Self> {
        let rows = crate::io::read_float_rows(rdr)?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for row in rows {
            if row.len() == dim {
                nodes.extend_from_slice(&row);
                weights.push(1.0);
            } else if row.len() == dim + 1 {
                nodes.extend_from_slice(&row[..dim]);
                weights.push(row[dim]);
            } else {
                return input_err(format!("quadrature row has {} columns, expected {dim}", row.len()));
            }
        }
        Self::new(dim, nodes, weights)
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_normalized_and_nodes_unit() {
        for q in [
            SphereQuadrature::interval(),
            SphereQuadrature::circle(512).unwrap(),
            SphereQuadrature::sphere(17, 34).unwrap(),
        ] {
            let s: f64 = q.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            for (p, _) in q.nodes() {
                let r: f64 = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn second_moments_are_isotropic() {
        // m·∫ p pᵀ dμ = I is what makes the Steiner point of {z} equal z.
        for q in [SphereQuadrature::circle(64).unwrap(), SphereQuadrature::sphere(6, 12).unwrap()] {
            let m = q.dim();
            for a in 0..m {
                for b in 0..m {
                    let v: f64 = q.nodes().map(|(p, w)| m as f64 * w * p[a] * p[b]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-13, "{a}{b}: {v}");
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(9);
        for k in 0..=17 {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn csv_roundtrip_with_and_without_weights() {
        let q = SphereQuadrature::from_csv(2, "1,0\n0,1\n-1,0\n0,-1\n".as_bytes()).unwrap();
        assert_eq!(q.len(), 4);
        assert!(q.weights().iter().all(|w| *w == 0.25));
        let q = SphereQuadrature::from_csv(2, "2,0,3\n0,1,1\n".as_bytes()).unwrap();
        assert_eq!(q.node(0), &[1.0, 0.0]);
        assert_eq!(q.weights(), &[0.75, 0.25]);
        assert!(SphereQuadrature::from_csv(2, "1,0,0,0\n".as_bytes()).is_err());
    }
}
