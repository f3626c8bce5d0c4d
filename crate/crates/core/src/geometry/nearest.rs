//! Nearest-point queries on polytopes given by vertex lists.

use super::vector::{dot, norm};

/// Nearest point of `conv(points)` to `y` by Wolfe's minimum-norm-point method.
///
/// `points` is a flat list of `dim`-vectors. Returns the nearest point and the
/// distance. Works in any dimension; used for ℝ³ and as a general fallback.
pub(crate) fn wolfe_nearest(dim: usize, points: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let q: Vec<Vec<f64>> = points.chunks_exact(dim).map(|p| p.iter().zip(y).map(|(a, b)| a - b).collect()).collect();
    if q.is_empty() {
        return (y.to_vec(), f64::INFINITY);
    }
    let max_sq = q.iter().map(|v| dot(v, v)).fold(0.0_f64, f64::max).max(1e-300);
    let tol = 1e-13 * max_sq;

    let start = (0..q.len()).min_by(|&i, &j| dot(&q[i], &q[i]).total_cmp(&dot(&q[j], &q[j]))).unwrap_or(0);
    let mut corral: Vec<usize> = vec![start];
    let mut lam: Vec<f64> = vec![1.0];
    let mut x = q[start].clone();

    for _ in 0..(50 * q.len() + 100) {
        let xx = dot(&x, &x);
        if xx <= 1e-30 * max_sq {
            break;
        }
        let (j, val) = q.iter().enumerate().map(|(i, v)| (i, dot(&x, v))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        if xx - val <= tol || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lam.push(0.0);
        loop {
            let Some(alpha) = affine_minimizer(&q, &corral) else {
                // Affinely dependent corral: drop the newest point.
                corral.pop();
                lam.pop();
                break;
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                lam = alpha;
                break;
            }
            let mut theta = 1.0_f64;
            for (l, a) in lam.iter().zip(&alpha) {
                if *a <= 1e-14 {
                    let denom = l - a;
                    if denom > 0.0 {
                        theta = theta.min(l / denom);
                    }
                }
            }
            for (l, a) in lam.iter_mut().zip(&alpha) {
                *l += theta * (a - *l);
            }
            let mut k = 0;
            while k < corral.len() {
                if lam[k] <= 1e-14 {
                    corral.remove(k);
                    lam.remove(k);
                } else {
                    k += 1;
                }
            }
            if corral.is_empty() {
                corral.push(j);
                lam.push(1.0);
                break;
            }
            let s: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= s);
            if corral.len() == 1 {
                break;
            }
        }
        x = vec![0.0; dim];
        for (&i, &l) in corral.iter().zip(&lam) {
            for (xk, qk) in x.iter_mut().zip(&q[i]) {
                *xk += l * qk;
            }
        }
    }
    let d = norm(&x);
    let p = x.iter().zip(y).map(|(a, b)| a + b).collect();
    (p, d)
}

/// Weights of the minimum-norm point in the affine hull of `q[corral]`.
fn affine_minimizer(q: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    let n = k + 1;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for r in 0..k {
        for c in 0..k {
            a[r * n + c] = dot(&q[corral[r]], &q[corral[c]]);
        }
        a[r * n + k] = 1.0;
        a[k * n + r] = 1.0;
    }
    b[k] = 1.0;
    let scale = (0..k).map(|r| a[r * n + r]).fold(1.0_f64, f64::max);
    let sol = solve_dense(&mut a, &mut b, n, 1e-14 * scale)?;
    Some(sol[..k].to_vec())
}

/// Gaussian elimination with partial pivoting on a row-major `n×n` system.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize, pivot_tol: f64) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() <= pivot_tol {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        for r in (col + 1)..n {
            let f = a[r * n + col] / a[col * n + col];
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in (r + 1)..n {
            s -= a[r * n + c] * x[c];
        }
        x[r] = s / a[r * n + r];
    }
    Some(x)
}

/// Nearest point of the segment `[a, b]` to `y` (any dimension).
pub(crate) fn nearest_on_segment(a: &[f64], b: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let d: Vec<f64> = b.iter().zip(a).map(|(x, z)| x - z).collect();
    let dd = dot(&d, &d);
    let s = if dd > 0.0 {
        let w: Vec<f64> = y.iter().zip(a).map(|(x, z)| x - z).collect();
        (dot(&w, &d) / dd).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let p: Vec<f64> = a.iter().zip(&d).map(|(x, e)| x + s * e).collect();
    let dist = p.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    (p, dist)
}

/// Whether `y` lies in the counterclockwise polygon `verts` (≥ 3 vertices).
pub(crate) fn polygon_contains(verts: &[[f64; 2]], y: [f64; 2], tol: f64) -> bool {
    let k = verts.len();
    (0..k).all(|i| {
        let a = verts[i];
        let b = verts[(i + 1) % k];
        let e = [b[0] - a[0], b[1] - a[1]];
        let len = e[0].hypot(e[1]);
        let c = e[0] * (y[1] - a[1]) - e[1] * (y[0] - a[0]);
        c >= -tol * len
    })
}

/// Exact nearest point of a counterclockwise polygon, segment or point.
pub(crate) fn nearest_polygon(verts: &[[f64; 2]], y: [f64; 2]) -> ([f64; 2], f64) {
    match verts.len() {
        0 => (y, f64::INFINITY),
        1 => {
            let v = verts[0];
            (v, (v[0] - y[0]).hypot(v[1] - y[1]))
        }
        _ => {
            if verts.len() >= 3 && polygon_contains(verts, y, 0.0) {
                return (y, 0.0);
            }
            let k = verts.len();
            let edges = if k == 2 { 1 } else { k };
            let mut best = (verts[0], f64::INFINITY);
            for i in 0..edges {
                let (p, d) = nearest_on_segment(&verts[i], &verts[(i + 1) % k], &y);
                if d < best.1 {
                    best = ([p[0], p[1]], d);
                }
            }
            best
        }
    }
}
