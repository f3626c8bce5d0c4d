//! Convex hull canonicalization for point clouds in ℝ¹, ℝ² and ℝ³.
//!
//! All routines return indices into the (deduplicated) input so callers keep
//! the original coordinates bit-for-bit.

use super::nearest::wolfe_nearest;
use super::vector::{cross2, cross3, dot3, lex_cmp, sub3};

/// Relative tolerance for duplicate and collinearity decisions.
const REL_EPS: f64 = 1e-12;

pub(crate) fn scale_of(coords: &[f64]) -> f64 {
    coords.iter().fold(1.0_f64, |m, c| m.max(c.abs()))
}

/// Sorts points lexicographically and drops near-duplicates.
pub(crate) fn sorted_unique(dim: usize, coords: &[f64]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = coords.chunks_exact(dim).map(|c| c.to_vec()).collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    let tol = REL_EPS * scale_of(coords);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        let dup = out.last().is_some_and(|q: &Vec<f64>| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol));
        if !dup {
            out.push(p);
        }
    }
    out
}

/// Andrew's monotone chain on lexicographically sorted, deduplicated points.
///
/// Returns hull vertex indices counterclockwise starting at index 0 (the
/// lexicographically smallest point). Collinear inputs give the two endpoints.
pub(crate) fn hull2_sorted(pts: &[[f64; 2]]) -> Vec<usize> {
    let n = pts.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let turns_left = |o: usize, a: usize, b: usize| {
        let c = cross2(pts[o], pts[a], pts[b]);
        let la = ((pts[a][0] - pts[o][0]).hypot(pts[a][1] - pts[o][1])).max(f64::MIN_POSITIVE);
        let lb = ((pts[b][0] - pts[o][0]).hypot(pts[b][1] - pts[o][1])).max(f64::MIN_POSITIVE);
        c > REL_EPS * la * lb
    };
    let mut lower: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while lower.len() >= 2 && !turns_left(lower[lower.len() - 2], lower[lower.len() - 1], i) {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        while upper.len() >= 2 && !turns_left(upper[upper.len() - 2], upper[upper.len() - 1], i) {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Canonical 2-D hull: counterclockwise from the lexicographically smallest vertex.
pub(crate) fn hull2(coords: &[f64]) -> Vec<f64> {
    let uniq = sorted_unique(2, coords);
    let pts: Vec<[f64; 2]> = uniq.iter().map(|p| [p[0], p[1]]).collect();
    let idx = hull2_sorted(&pts);
    idx.into_iter().flat_map(|i| pts[i]).collect()
}

/// Canonical 1-D hull: `[min, max]` or a single point.
pub(crate) fn hull1(coords: &[f64]) -> Vec<f64> {
    let lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= REL_EPS * scale_of(coords) {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}

/// Outward facet plane `normal · z <= offset` with a unit normal.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Facet {
    pub normal: [f64; 3],
    pub offset: f64,
}

/// Result of a 3-D hull computation.
pub(crate) struct Hull3 {
    /// Extreme points, lexicographically sorted, flat.
    pub vertices: Vec<f64>,
    /// Facet planes when the hull is full-dimensional, empty otherwise.
    pub facets: Vec<Facet>,
    /// Edges of the triangulated boundary (full-dimensional case only).
    pub edges: Vec<[[f64; 3]; 2]>,
}

pub(crate) fn hull3(coords: &[f64]) -> Hull3 {
    let uniq = sorted_unique(3, coords);
    let pts: Vec<[f64; 3]> = uniq.iter().map(|p| [p[0], p[1], p[2]]).collect();
    let scale = scale_of(coords);
    let tol = 1e-10 * scale;
    if pts.len() == 1 {
        return Hull3 { vertices: pts[0].to_vec(), facets: vec![], edges: vec![] };
    }
    let p0 = pts[0];
    let far = |f: &dyn Fn(&[f64; 3]) -> f64| -> (usize, f64) {
        pts.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, bv), (i, p)| {
            let v = f(p);
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        })
    };
    let (i1, d1) = far(&|p| {
        let d = sub3(*p, p0);
        dot3(d, d).sqrt()
    });
    if d1 <= tol {
        return Hull3 { vertices: p0.to_vec(), facets: vec![], edges: vec![] };
    }
    let u = {
        let d = sub3(pts[i1], p0);
        let l = dot3(d, d).sqrt();
        [d[0] / l, d[1] / l, d[2] / l]
    };
    let (i2, d2) = far(&|p| {
        let c = cross3(sub3(*p, p0), u);
        dot3(c, c).sqrt()
    });
    if d2 <= tol {
        // Collinear: extreme points along u.
        let (imin, _) = far(&|p| -dot3(sub3(*p, p0), u));
        let (imax, _) = far(&|p| dot3(sub3(*p, p0), u));
        let mut v = vec![pts[imin], pts[imax]];
        v.sort_by(|a, b| lex_cmp(a, b));
        return Hull3 { vertices: v.concat(), facets: vec![], edges: vec![] };
    }
    let nrm = {
        let c = cross3(sub3(pts[i1], p0), sub3(pts[i2], p0));
        let l = dot3(c, c).sqrt();
        [c[0] / l, c[1] / l, c[2] / l]
    };
    let (i3, d3) = far(&|p| dot3(sub3(*p, p0), nrm).abs());
    if d3 <= tol {
        return planar_hull(&pts, p0, u, nrm);
    }
    let (vertices, facets, edges) = incremental_hull(&pts, [0, i1, i2, i3], 1e-12 * scale);
    Hull3 { vertices: prune_non_extreme(vertices, scale), facets, edges }
}

fn planar_hull(pts: &[[f64; 3]], p0: [f64; 3], u: [f64; 3], nrm: [f64; 3]) -> Hull3 {
    let w = cross3(nrm, u);
    let mut planar: Vec<([f64; 2], usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let d = sub3(*p, p0);
            ([dot3(d, u), dot3(d, w)], i)
        })
        .collect();
    planar.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    let coords2: Vec<[f64; 2]> = planar.iter().map(|x| x.0).collect();
    let idx = hull2_sorted(&coords2);
    let mut v: Vec<[f64; 3]> = idx.into_iter().map(|k| pts[planar[k].1]).collect();
    v.sort_by(|a, b| lex_cmp(a, b));
    Hull3 { vertices: v.concat(), facets: vec![], edges: vec![] }
}

struct Face {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
    alive: bool,
}

fn make_face(pts: &[[f64; 3]], a: usize, b: usize, c: usize) -> Face {
    let n = cross3(sub3(pts[b], pts[a]), sub3(pts[c], pts[a]));
    let l = dot3(n, n).sqrt().max(f64::MIN_POSITIVE);
    let normal = [n[0] / l, n[1] / l, n[2] / l];
    Face { v: [a, b, c], normal, offset: dot3(normal, pts[a]), alive: true }
}

type Edge3 = [[f64; 3]; 2];

fn incremental_hull(pts: &[[f64; 3]], seed: [usize; 4], eps: f64) -> (Vec<[f64; 3]>, Vec<Facet>, Vec<Edge3>) {
    let [a, b, c, d] = seed;
    let mut faces: Vec<Face> = Vec::new();
    for (x, y, z, opp) in [(a, b, c, d), (a, d, b, c), (b, d, c, a), (a, c, d, b)] {
        let mut f = make_face(pts, x, y, z);
        if dot3(f.normal, pts[opp]) - f.offset > 0.0 {
            f = make_face(pts, x, z, y);
        }
        faces.push(f);
    }
    let mut used = vec![false; pts.len()];
    for &s in &seed {
        used[s] = true;
    }
    for (i, p) in pts.iter().enumerate() {
        if used[i] {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && dot3(f.normal, *p) - f.offset > eps)
            .map(|(k, _)| k)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges = std::collections::HashSet::new();
        for &k in &visible {
            let v = faces[k].v;
            for e in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                edges.insert(e);
            }
        }
        let mut horizon: Vec<(usize, usize)> =
            edges.iter().copied().filter(|(x, y)| !edges.contains(&(*y, *x))).collect();
        horizon.sort_unstable();
        for &k in &visible {
            faces[k].alive = false;
        }
        for (x, y) in horizon {
            faces.push(make_face(pts, x, y, i));
        }
    }
    let mut on_hull = vec![false; pts.len()];
    let mut facets = Vec::new();
    let mut edge_set = std::collections::BTreeSet::new();
    for f in faces.iter().filter(|f| f.alive) {
        for &k in &f.v {
            on_hull[k] = true;
        }
        for (x, y) in [(f.v[0], f.v[1]), (f.v[1], f.v[2]), (f.v[2], f.v[0])] {
            edge_set.insert((x.min(y), x.max(y)));
        }
        facets.push(Facet { normal: f.normal, offset: f.offset });
    }
    let edges = edge_set.into_iter().map(|(x, y)| [pts[x], pts[y]]).collect();
    let verts = pts.iter().zip(on_hull).filter(|(_, keep)| *keep).map(|(p, _)| *p).collect();
    (verts, facets, edges)
}

/// Drops candidates that lie in the hull of the remaining candidates
/// (points interior to coplanar facet regions).
fn prune_non_extreme(mut verts: Vec<[f64; 3]>, scale: f64) -> Vec<f64> {
    verts.sort_by(|a, b| lex_cmp(a, b));
    let tol = 1e-10 * scale;
    let mut keep = vec![true; verts.len()];
    for i in 0..verts.len() {
        let others: Vec<f64> =
            verts.iter().enumerate().filter(|(j, _)| *j != i && keep[*j]).flat_map(|(_, p)| *p).collect();
        let (_, d) = wolfe_nearest(3, &others, &verts[i]);
        if d <= tol {
            keep[i] = false;
        }
    }
    verts.into_iter().zip(keep).filter(|(_, k)| *k).flat_map(|(p, _)| p).collect()
}
