//! Steiner point `s_m(K) = m ∫ p σ(K,p) μ(dp)`.
//!
//! For a polytope the integral collapses to `Σ_i v_i · μ(N_K(v_i))`, where
//! `N_K(v_i)` is the normal cone at vertex `v_i`. That form is evaluated in
//! closed form here; the quadrature form is kept as the literal definition.

use std::f64::consts::PI;

use super::quadrature::SphereQuadrature;
use super::vector::{cross3, dot3};
use super::ConvexBody;
use crate::error::{input_err, Error, Result};

/// How the sphere integral is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SteinerRule {
    /// Normal-cone measures of the vertices (exact on polytopes).
    #[default]
    Exact,
    /// `m·Σ_j w_j p_j σ(K,p_j)` on a quadrature rule.
    Quadrature,
}

impl std::str::FromStr for SteinerRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "quadrature" => Ok(Self::Quadrature),
            _ => input_err(format!("unknown Steiner rule `{s}`")),
        }
    }
}

/// `m·Σ_j w_j p_j σ(K,p_j)`.
pub fn steiner_point(k: &ConvexBody, q: &SphereQuadrature) -> Result<Vec<f64>> {
    if q.is_empty() {
        return input_err("empty quadrature");
    }
    if q.dim() != k.dim() {
        return Err(Error::Dimension { expected: k.dim(), got: q.dim() });
    }
    let m = k.dim();
    if k.is_singleton() {
        return Ok(k.vertex(0).to_vec());
    }
    let mut s = vec![0.0; m];
    for (p, w) in q.nodes() {
        let sig = k.support_unchecked(p).0;
        for (si, pi) in s.iter_mut().zip(p) {
            *si += w * pi * sig;
        }
    }
    s.iter_mut().for_each(|c| *c *= m as f64);
    Ok(s)
}

/// Closed-form Steiner point of a polytope.
///
/// Returns `None` only when the normal-cone measures of a 3-D body fail to sum
/// to one within `1e−9` (numerically degenerate facet data).
pub fn steiner_point_exact(k: &ConvexBody) -> Option<Vec<f64>> {
    let nv = k.num_vertices();
    if nv == 1 {
        return Some(k.vertex(0).to_vec());
    }
    if nv == 2 {
        return Some(k.vertex(0).iter().zip(k.vertex(1)).map(|(a, b)| 0.5 * (a + b)).collect());
    }
    match k.dim() {
        2 => {
            let v: Vec<[f64; 2]> = k.iter().map(|p| [p[0], p[1]]).collect();
            Some(polygon_steiner(&v).to_vec())
        }
        3 if k.facets.is_empty() => planar_steiner(k),
        3 => polytope3_steiner(k),
        _ => None,
    }
}

/// Dispatch on the rule; exact falls back to quadrature when unavailable.
pub fn steiner(k: &ConvexBody, rule: SteinerRule, q: &SphereQuadrature) -> Result<Vec<f64>> {
    if rule == SteinerRule::Exact {
        if let Some(s) = steiner_point_exact(k) {
            return Ok(s);
        }
    }
    steiner_point(k, q)
}

/// Counterclockwise polygon: weights are exterior angles over `2π`.
fn polygon_steiner(v: &[[f64; 2]]) -> [f64; 2] {
    let k = v.len();
    let normal_angle = |i: usize| {
        let a = v[i];
        let b = v[(i + 1) % k];
        (-(b[0] - a[0])).atan2(b[1] - a[1])
    };
    let mut s = [0.0; 2];
    for i in 0..k {
        let mut ext = normal_angle(i) - normal_angle((i + k - 1) % k);
        while ext < 0.0 {
            ext += 2.0 * PI;
        }
        while ext >= 2.0 * PI {
            ext -= 2.0 * PI;
        }
        let w = ext / (2.0 * PI);
        s[0] += w * v[i][0];
        s[1] += w * v[i][1];
    }
    s
}

/// A flat polygon in ℝ³: the Steiner point does not depend on the ambient
/// dimension, so compute it in the plane.
fn planar_steiner(k: &ConvexBody) -> Option<Vec<f64>> {
    let p0 = [k.vertex(0)[0], k.vertex(0)[1], k.vertex(0)[2]];
    let pts: Vec<[f64; 3]> = k.iter().map(|p| [p[0], p[1], p[2]]).collect();
    let far = pts
        .iter()
        .map(|p| [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]])
        .max_by(|a, b| dot3(*a, *a).total_cmp(&dot3(*b, *b)))?;
    let lu = dot3(far, far).sqrt();
    let u = [far[0] / lu, far[1] / lu, far[2] / lu];
    let nrm = pts
        .iter()
        .map(|p| cross3(u, [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]]))
        .max_by(|a, b| dot3(*a, *a).total_cmp(&dot3(*b, *b)))?;
    let ln = dot3(nrm, nrm).sqrt();
    let nrm = [nrm[0] / ln, nrm[1] / ln, nrm[2] / ln];
    let w = cross3(nrm, u);
    let flat: Vec<f64> = pts
        .iter()
        .flat_map(|p| {
            let d = [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]];
            [dot3(d, u), dot3(d, w)]
        })
        .collect();
    let poly = ConvexBody::from_points(2, &flat).ok()?;
    let s2 = steiner_point_exact(&poly)?;
    Some((0..3).map(|c| p0[c] + s2[0] * u[c] + s2[1] * w[c]).collect())
}

/// Full-dimensional polytope: weights are solid angles of normal cones over `4π`.
fn polytope3_steiner(k: &ConvexBody) -> Option<Vec<f64>> {
    let scale = k.vertices().iter().fold(1.0_f64, |m, c| m.max(c.abs()));
    let tol = 1e-9 * scale;
    let mut s = [0.0; 3];
    let mut total = 0.0;
    for v in k.iter() {
        let mut normals: Vec<[f64; 3]> = Vec::new();
        for f in &k.facets {
            if (dot3(f.normal, [v[0], v[1], v[2]]) - f.offset).abs() <= tol
                && !normals.iter().any(|n| dot3(*n, f.normal) > 1.0 - 1e-12)
            {
                normals.push(f.normal);
            }
        }
        let omega = cone_solid_angle(&normals)?;
        total += omega;
        for c in 0..3 {
            s[c] += omega * v[c];
        }
    }
    if (total - 4.0 * PI).abs() > 1e-9 * 4.0 * PI {
        return None;
    }
    Some(s.iter().map(|c| c / total).collect())
}

/// Solid angle of the pointed cone spanned by unit vectors.
fn cone_solid_angle(normals: &[[f64; 3]]) -> Option<f64> {
    if normals.len() < 3 {
        return None;
    }
    let mut axis = [0.0; 3];
    for n in normals {
        for c in 0..3 {
            axis[c] += n[c];
        }
    }
    let la = dot3(axis, axis).sqrt();
    if la < 1e-12 {
        return None;
    }
    let axis = [axis[0] / la, axis[1] / la, axis[2] / la];
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let c = cross3(axis, helper);
        let l = dot3(c, c).sqrt();
        [c[0] / l, c[1] / l, c[2] / l]
    };
    let e2 = cross3(axis, e1);
    let mut ordered: Vec<(f64, [f64; 3])> = normals.iter().map(|n| (dot3(*n, e2).atan2(dot3(*n, e1)), *n)).collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let a = ordered[0].1;
    let mut omega = 0.0;
    for j in 1..ordered.len() - 1 {
        let b = ordered[j].1;
        let c = ordered[j + 1].1;
        let num = dot3(a, cross3(b, c)).abs();
        let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
        omega += 2.0 * num.atan2(den);
    }
    Some(omega)
}
