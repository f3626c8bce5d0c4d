use rayon::prelude::*;

use super::{ExtReal, Grid, Grid1, GridFunction};
use crate::error::{input_err, Error, Result};
use crate::geometry::vector::dot;

/// Discrete conjugate `g*(p) = max_v {⟨p,v⟩ − g(v)}` over the finite nodes of `g`.
pub fn conjugate_grid(g: &GridFunction, dual: &Grid) -> Result<GridFunction> {
    if dual.dim() != g.grid().dim() {
        return Err(Error::Dimension { expected: g.grid().dim(), got: dual.dim() });
    }
    let prim: Vec<(Vec<f64>, f64)> = g.finite_nodes().collect();
    if prim.is_empty() {
        return Err(Error::Improper("conjugate of +∞".into()));
    }
    let values: Vec<ExtReal> =
        (0..dual.len()).into_par_iter().map(|i| ExtReal::Finite(sup_affine(&prim, &dual.node(i)))).collect();
    GridFunction::new(*dual, values)
}

/// `g*` at arbitrary dual points.
pub fn conjugate_at(g: &GridFunction, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let prim: Vec<(Vec<f64>, f64)> = g.finite_nodes().collect();
    if prim.is_empty() {
        return Err(Error::Improper("conjugate of +∞".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != g.grid().dim()) {
        return Err(Error::Dimension { expected: g.grid().dim(), got: p.len() });
    }
    Ok(points.par_iter().map(|p| sup_affine(&prim, p)).collect())
}

fn sup_affine(prim: &[(Vec<f64>, f64)], p: &[f64]) -> f64 {
    prim.iter().map(|(v, gv)| dot(p, v) - gv).fold(f64::NEG_INFINITY, f64::max)
}

/// Symmetric slope window `[−1.2 c (1+|x|), 1.2 c (1+|x|)]`.
pub fn slope_window(c: f64, x_norm: f64) -> (f64, f64) {
    let r = 1.2 * c * (1.0 + x_norm);
    (-r, r)
}

/// Discrete inf-convolution `(φ ⧆ ψ)(w) = min_{u+v=w} φ(u) + ψ(v)` on grids of
/// equal spacing; the result lives on the Minkowski-sum grid.
pub fn episum(phi: &GridFunction, psi: &GridFunction) -> Result<GridFunction> {
    let same = |a: &Grid1, b: &Grid1| (a.step - b.step).abs() <= 1e-12 * a.step.abs().max(b.step.abs());
    match (phi.grid(), psi.grid()) {
        (Grid::D1(a), Grid::D1(b)) => {
            if !same(a, b) {
                return input_err("episum needs grids of equal spacing");
            }
            let out = Grid1 { lo: a.lo + b.lo, step: a.step, len: a.len + b.len - 1 };
            let vals: Vec<ExtReal> = (0..out.len)
                .into_par_iter()
                .map(|k| {
                    let lo = k.saturating_sub(b.len - 1);
                    let hi = k.min(a.len - 1);
                    (lo..=hi).fold(ExtReal::PosInf, |acc, i| acc.min(phi.value(i).add(psi.value(k - i))))
                })
                .collect();
            GridFunction::new(Grid::D1(out), vals)
        }
        (Grid::D2(a0, a1), Grid::D2(b0, b1)) => {
            if !same(a0, b0) || !same(a1, b1) {
                return input_err("episum needs grids of equal spacing");
            }
            let o0 = Grid1 { lo: a0.lo + b0.lo, step: a0.step, len: a0.len + b0.len - 1 };
            let o1 = Grid1 { lo: a1.lo + b1.lo, step: a1.step, len: a1.len + b1.len - 1 };
            let vals: Vec<ExtReal> = (0..o0.len * o1.len)
                .into_par_iter()
                .map(|idx| {
                    let (k0, k1) = (idx / o1.len, idx % o1.len);
                    let mut best = ExtReal::PosInf;
                    for i0 in k0.saturating_sub(b0.len - 1)..=k0.min(a0.len - 1) {
                        for i1 in k1.saturating_sub(b1.len - 1)..=k1.min(a1.len - 1) {
                            let u = phi.value(i0 * a1.len + i1);
                            let v = psi.value((k0 - i0) * b1.len + (k1 - i1));
                            best = best.min(u.add(v));
                        }
                    }
                    best
                })
                .collect();
            GridFunction::new(Grid::D2(o0, o1), vals)
        }
        _ => input_err("episum of grid functions of different dimension"),
    }
}

/// Closed form of the conjugate of `ψ(p) = k(1+|p|)δ`:
/// `ψ*(v) = −kδ` for `|v| ≤ kδ`, `+∞` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeConjugate {
    pub k: f64,
    pub delta: f64,
}

impl ConeConjugate {
    /// Half-width `kδ` of the effective domain.
    pub fn radius(&self) -> f64 {
        self.k * self.delta
    }

    /// Constant value `−kδ` on the domain.
    pub fn level(&self) -> f64 {
        -self.k * self.delta
    }

    pub fn psi(&self, p: &[f64]) -> f64 {
        self.k * (1.0 + dot(p, p).sqrt()) * self.delta
    }

    pub fn eval(&self, v: &[f64]) -> ExtReal {
        if dot(v, v).sqrt() <= self.radius() {
            ExtReal::Finite(self.level())
        } else {
            ExtReal::PosInf
        }
    }
}

pub fn conjugate_of_cone_term(k: f64, delta: f64) -> Result<ConeConjugate> {
    if !(k >= 0.0 && delta >= 0.0 && k.is_finite() && delta.is_finite()) {
        return input_err("cone term needs finite k ≥ 0 and δ ≥ 0");
    }
    Ok(ConeConjugate { k, delta })
}

fn grid1(g: &GridFunction) -> Result<Grid1> {
    match g.grid() {
        Grid::D1(a) => Ok(*a),
        Grid::D2(..) => input_err("only 1-D grid functions are supported here"),
    }
}

/// Indices of the lower convex hull of the finite points, left to right.
fn lower_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while h.len() >= 2 {
            let (a, b) = (pts[h[h.len() - 2]], pts[h[h.len() - 1]]);
            let c = pts[i];
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Lower convex envelope `conv g` on the nodes of `g` (1-D).
pub fn lower_convex_envelope(g: &GridFunction) -> Result<GridFunction> {
    let grid = grid1(g)?;
    let pts: Vec<(f64, f64)> = g.finite_nodes().map(|(v, y)| (v[0], y)).collect();
    if pts.is_empty() {
        return Err(Error::Improper("envelope of +∞".into()));
    }
    let hull = lower_hull(&pts);
    let mut vals = vec![ExtReal::PosInf; grid.len];
    let mut seg = 0;
    for (i, val) in vals.iter_mut().enumerate() {
        let v = grid.node(i);
        if v < pts[hull[0]].0 || v > pts[*hull.last().unwrap()].0 {
            continue;
        }
        if hull.len() == 1 {
            *val = ExtReal::Finite(pts[hull[0]].1);
            continue;
        }
        while seg + 2 < hull.len() && v > pts[hull[seg + 1]].0 {
            seg += 1;
        }
        let (a, b) = (pts[hull[seg]], pts[hull[seg + 1]]);
        let y = if v == a.0 {
            a.1
        } else if v == b.0 {
            b.1
        } else {
            a.1 + (b.1 - a.1) * (v - a.0) / (b.0 - a.0)
        };
        *val = ExtReal::Finite(y);
    }
    GridFunction::new(Grid::D1(grid), vals)
}

/// `g**` on the nodes of `g` (1-D), with the dual evaluated at the slopes of
/// the lower hull; this is exact for grid functions.
pub fn biconjugate(g: &GridFunction) -> Result<GridFunction> {
    let grid = grid1(g)?;
    let pts: Vec<(f64, f64)> = g.finite_nodes().map(|(v, y)| (v[0], y)).collect();
    if pts.is_empty() {
        return Err(Error::Improper("biconjugate of +∞".into()));
    }
    let hull = lower_hull(&pts);
    let (vmin, vmax) = (pts[0].0, pts[pts.len() - 1].0);
    if hull.len() == 1 {
        let vals = (0..grid.len)
            .map(|i| if grid.node(i) == vmin { ExtReal::Finite(pts[0].1) } else { ExtReal::PosInf })
            .collect();
        return GridFunction::new(Grid::D1(grid), vals);
    }
    let slopes: Vec<Vec<f64>> = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (pts[w[0]], pts[w[1]]);
            vec![(b.1 - a.1) / (b.0 - a.0)]
        })
        .collect();
    let gstar = conjugate_at(g, &slopes)?;
    let vals = (0..grid.len)
        .map(|i| {
            let v = grid.node(i);
            if v < vmin || v > vmax {
                return ExtReal::PosInf;
            }
            let y = slopes.iter().zip(&gstar).map(|(s, gs)| s[0] * v - gs).fold(f64::NEG_INFINITY, f64::max);
            ExtReal::Finite(y)
        })
        .collect();
    GridFunction::new(Grid::D1(grid), vals)
}

fn max_finite_gap(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .filter_map(|(x, y)| match (x, y) {
            (ExtReal::Finite(x), ExtReal::Finite(y)) => Some((x - y).abs()),
            (ExtReal::PosInf, ExtReal::PosInf) => None,
            _ => Some(f64::INFINITY),
        })
        .fold(0.0, f64::max)
}

/// `max |g** − conv g|` over the nodes, with the exact hull-slope dual.
pub fn biconjugate_check(g: &GridFunction) -> Result<f64> {
    Ok(max_finite_gap(&biconjugate(g)?, &lower_convex_envelope(g)?))
}

/// As [`biconjugate_check`], but with both transforms taken on grids
/// (`dual` for `g*`, the grid of `g` for `g**`).
///
/// Nodes of `g**` outside the finite range of `g` are ignored.
pub fn biconjugate_check_on(g: &GridFunction, dual: Grid1) -> Result<f64> {
    let gs = conjugate_grid(g, &Grid::D1(dual))?;
    let gss = conjugate_grid(&gs, g.grid())?;
    let env = lower_convex_envelope(g)?;
    Ok(gss
        .values()
        .iter()
        .zip(env.values())
        .filter_map(|(x, y)| match y {
            ExtReal::Finite(y) => Some((x.to_f64() - y).abs()),
            ExtReal::PosInf => None,
        })
        .fold(0.0, f64::max))
}
