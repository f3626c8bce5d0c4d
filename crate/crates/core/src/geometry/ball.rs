//! The localization operator `P(y,K) = K ∩ B(y, 2 d(y,K))`.
//!
//! Intersections are returned as hulls of points of `K ∩ B`: the vertices of
//! `K` inside the ball, the crossings of the boundary of `K` with the sphere,
//! and sphere nodes at fixed angles that lie inside `K`. The result is always
//! a subset of `K ∩ B` and contains the projection of `y` onto `K`.

use std::f64::consts::PI;

use super::vector::{cross3, dist, dot3};
use super::ConvexBody;
use crate::error::{Error, Result};

/// Default number of circle nodes (m = 2) and sphere nodes (m = 3).
pub const DEFAULT_BALL_NODES: usize = 1024;

/// Distances at or below this are treated as membership (singleton rule).
pub const SINGLETON_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallOptions {
    /// Angular resolution of the spherical part of the boundary.
    pub nodes: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        Self { nodes: DEFAULT_BALL_NODES }
    }
}

/// `P(y, K)` as a convex body; `{y}` when `d(y,K) ≤ 1e−12`.
pub fn ball_intersect_p(y: &[f64], k: &ConvexBody, opts: BallOptions) -> Result<ConvexBody> {
    let (proj, d) = k.project(y)?;
    if d <= SINGLETON_EPS {
        return ConvexBody::singleton(y);
    }
    let r = 2.0 * d;
    intersect_ball(k, y, r, &proj, opts)
}

/// Hull discretization of `K ∩ B(c, r)`; `anchor` must lie in both sets.
pub(crate) fn intersect_ball(
    k: &ConvexBody,
    c: &[f64],
    r: f64,
    anchor: &[f64],
    opts: BallOptions,
) -> Result<ConvexBody> {
    let m = k.dim();
    let mut pts: Vec<f64> = Vec::new();
    match (m, k.num_vertices()) {
        (_, 1) => pts.extend_from_slice(k.vertex(0)),
        (_, 2) => {
            let (a, b) = segment_ball(k.vertex(0), k.vertex(1), c, r)
                .ok_or_else(|| Error::Invariant("segment misses the localization ball".into()))?;
            pts.extend(a);
            pts.extend(b);
        }
        (1, _) => unreachable!("1-D bodies have at most two vertices"),
        (2, _) => {
            let v: Vec<[f64; 2]> = k.iter().map(|p| [p[0], p[1]]).collect();
            polygon_disc(&v, [c[0], c[1]], r, opts.nodes.max(8), &mut pts);
        }
        _ if k.facets.is_empty() => planar_ball(k, c, r, opts, &mut pts)?,
        _ => polytope_ball(k, c, r, opts.nodes.max(32), &mut pts),
    }
    pts.extend_from_slice(anchor);
    ConvexBody::from_points(m, &pts)
}

/// Clips the segment `[a, b]` to the ball; `None` if disjoint.
fn segment_ball(a: &[f64], b: &[f64], c: &[f64], r: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let dvec: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let w: Vec<f64> = a.iter().zip(c).map(|(x, y)| x - y).collect();
    let aa: f64 = dvec.iter().map(|x| x * x).sum();
    let bb: f64 = 2.0 * dvec.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>();
    let cc: f64 = w.iter().map(|x| x * x).sum::<f64>() - r * r;
    let disc = bb * bb - 4.0 * aa * cc;
    if aa == 0.0 || disc < 0.0 {
        return if cc <= 0.0 { Some((a.to_vec(), a.to_vec())) } else { None };
    }
    let sq = disc.sqrt();
    let s0 = ((-bb - sq) / (2.0 * aa)).max(0.0);
    let s1 = ((-bb + sq) / (2.0 * aa)).min(1.0);
    if s0 > s1 {
        return None;
    }
    let at = |s: f64| a.iter().zip(&dvec).map(|(x, e)| x + s * e).collect::<Vec<f64>>();
    Some((at(s0), at(s1)))
}

/// Counterclockwise polygon ∩ disc.
fn polygon_disc(v: &[[f64; 2]], c: [f64; 2], r: f64, nodes: usize, out: &mut Vec<f64>) {
    let k = v.len();
    let inside = |p: [f64; 2]| (p[0] - c[0]).hypot(p[1] - c[1]) <= r;
    // Angles where the polygon boundary crosses the circle.
    let mut cross_angles: Vec<f64> = Vec::new();
    for i in 0..k {
        let a = v[i];
        let b = v[(i + 1) % k];
        if inside(a) {
            out.extend_from_slice(&a);
        }
        let d = [b[0] - a[0], b[1] - a[1]];
        let w = [a[0] - c[0], a[1] - c[1]];
        let aa = d[0] * d[0] + d[1] * d[1];
        let bb = 2.0 * (d[0] * w[0] + d[1] * w[1]);
        let cc = w[0] * w[0] + w[1] * w[1] - r * r;
        let disc = bb * bb - 4.0 * aa * cc;
        if aa == 0.0 || disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        for s in [(-bb - sq) / (2.0 * aa), (-bb + sq) / (2.0 * aa)] {
            if (0.0..=1.0).contains(&s) {
                let p = [a[0] + s * d[0], a[1] + s * d[1]];
                out.extend_from_slice(&p);
                cross_angles.push((p[1] - c[1]).atan2(p[0] - c[0]).rem_euclid(2.0 * PI));
            }
        }
    }
    if cross_angles.is_empty() {
        // Either K lies inside the disc, or the disc lies inside K.
        if out.is_empty() {
            push_arc(c, r, 0.0, 2.0 * PI, nodes, out);
        }
        return;
    }
    cross_angles.sort_by(f64::total_cmp);
    cross_angles.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let n = cross_angles.len();
    for j in 0..n {
        let lo = cross_angles[j];
        let mut hi = cross_angles[(j + 1) % n];
        if hi <= lo {
            hi += 2.0 * PI;
        }
        let mid = 0.5 * (lo + hi);
        let probe = [c[0] + r * mid.cos(), c[1] + r * mid.sin()];
        if super::nearest::polygon_contains(v, probe, 0.0) {
            push_arc(c, r, lo, hi, nodes, out);
        }
    }
}

/// Circle nodes at angles `2πj/nodes` strictly inside `(lo, hi)`.
fn push_arc(c: [f64; 2], r: f64, lo: f64, hi: f64, nodes: usize, out: &mut Vec<f64>) {
    let step = 2.0 * PI / nodes as f64;
    let mut j = (lo / step).floor() as i64 + 1;
    loop {
        let th = j as f64 * step;
        if th >= hi {
            break;
        }
        if th > lo {
            out.push(c[0] + r * th.cos());
            out.push(c[1] + r * th.sin());
        }
        j += 1;
    }
}

/// Flat polygon in ℝ³: intersect in its plane with the disc cut by the plane.
fn planar_ball(k: &ConvexBody, c: &[f64], r: f64, opts: BallOptions, out: &mut Vec<f64>) -> Result<()> {
    let p0 = [k.vertex(0)[0], k.vertex(0)[1], k.vertex(0)[2]];
    let rel = |p: &[f64]| [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]];
    let far = k.iter().map(rel).max_by(|a, b| dot3(*a, *a).total_cmp(&dot3(*b, *b))).unwrap();
    let lu = dot3(far, far).sqrt();
    let u = [far[0] / lu, far[1] / lu, far[2] / lu];
    let nrm = k.iter().map(|p| cross3(u, rel(p))).max_by(|a, b| dot3(*a, *a).total_cmp(&dot3(*b, *b))).unwrap();
    let ln = dot3(nrm, nrm).sqrt();
    let nrm = [nrm[0] / ln, nrm[1] / ln, nrm[2] / ln];
    let w = cross3(nrm, u);
    let flat: Vec<f64> = k.iter().flat_map(|p| [dot3(rel(p), u), dot3(rel(p), w)]).collect();
    let poly = ConvexBody::from_points(2, &flat)?;
    let cr = rel(c);
    let h = dot3(cr, nrm);
    let r2 = (r * r - h * h).max(0.0).sqrt();
    let c2 = [dot3(cr, u), dot3(cr, w)];
    let mut pts2 = Vec::new();
    match poly.num_vertices() {
        1 | 2 => {
            let b = if poly.num_vertices() == 1 { poly.vertex(0) } else { poly.vertex(1) };
            if let Some((a, b)) = segment_ball(poly.vertex(0), b, &c2, r2) {
                pts2.extend(a);
                pts2.extend(b);
            }
        }
        _ => {
            let v: Vec<[f64; 2]> = poly.iter().map(|p| [p[0], p[1]]).collect();
            polygon_disc(&v, c2, r2, opts.nodes.max(8), &mut pts2);
        }
    }
    for q in pts2.chunks_exact(2) {
        for i in 0..3 {
            out.push(p0[i] + q[0] * u[i] + q[1] * w[i]);
        }
    }
    Ok(())
}

/// Full-dimensional polytope ∩ ball: vertices inside, edge crossings, and
/// Fibonacci sphere nodes inside the polytope.
fn polytope_ball(k: &ConvexBody, c: &[f64], r: f64, nodes: usize, out: &mut Vec<f64>) {
    for v in k.iter() {
        if dist(v, c) <= r {
            out.extend_from_slice(v);
        }
    }
    for e in &k.edges {
        if dist(&e[0], c) <= r && dist(&e[1], c) <= r {
            continue;
        }
        if let Some((a, b)) = segment_ball(&e[0], &e[1], c, r) {
            out.extend(a);
            out.extend(b);
        }
    }
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    for j in 0..nodes {
        let z = 1.0 - (2.0 * j as f64 + 1.0) / nodes as f64;
        let s = (1.0 - z * z).max(0.0).sqrt();
        let ph = golden * j as f64;
        let p = [c[0] + r * s * ph.cos(), c[1] + r * s * ph.sin(), c[2] + r * z];
        if k.contains_facets(&p, 0.0) {
            out.extend_from_slice(&p);
        }
    }
}
