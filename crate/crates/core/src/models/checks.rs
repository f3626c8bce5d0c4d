use rayon::prelude::*;

use super::{Domain, HamiltonianModel, LagrangianModel, SamplePlan};
use crate::conjugate::{conjugate_at, slope_window, Grid1, GridFunction};
use crate::error::{input_err, Result};
use crate::geometry::vector::{dist, norm};
use crate::report::CheckRecord;

/// Default unboundedness threshold for the (BLC) filtration.
pub const BLC_THRESHOLD: f64 = 1e6;
/// Number of filtration steps toward the domain boundary.
pub const BLC_FILTRATION_STEPS: u32 = 8;
/// Slack allowed in the (LLC) search radius and in the slack test.
pub const LLC_TOL: f64 = 1e-7;

const REL: f64 = 1e-9;

fn cat(parts: &[&[f64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

fn tx_pairs(plan: &SamplePlan) -> Vec<(f64, Vec<f64>)> {
    plan.ts.iter().flat_map(|t| plan.xs.iter().map(move |x| (*t, x.clone()))).collect()
}

fn merge_all(recs: Vec<Vec<CheckRecord>>, names: &[(&str, f64)]) -> Vec<CheckRecord> {
    let init: Vec<CheckRecord> = names.iter().map(|(n, tol)| CheckRecord::new(*n, *tol)).collect();
    recs.into_iter().fold(init, |acc, r| acc.into_iter().zip(r).map(|(a, b)| a.merge(b)).collect())
}

/// (H1)–(H4) on the plan: finiteness, a continuity surrogate in `(x,p)`,
/// midpoint convexity in `p`, and the growth bound
/// `|H(t,x,p) − H(t,x,q)| ≤ c(t)(1+|x|)|p−q|` over all pairs of dual points.
pub fn check_h1_h4(h: &HamiltonianModel, plan: &SamplePlan) -> Result<Vec<CheckRecord>> {
    plan.validate(h.n)?;
    let names = [("H1", 0.0), ("H2", 0.0), ("H3", 0.0), ("H4", 0.0)];
    let per: Vec<Vec<CheckRecord>> = tx_pairs(plan)
        .par_iter()
        .map(|(t, x)| {
            let t = *t;
            let mut r: Vec<CheckRecord> = names.iter().map(|(n, tol)| CheckRecord::new(*n, *tol)).collect();
            let hv: Vec<f64> = plan.ps.iter().map(|p| h.eval(t, x, p)).collect();
            for (p, v) in plan.ps.iter().zip(&hv) {
                let bad = if v.is_finite() { 0.0 } else { f64::INFINITY };
                r[0].observe(bad, || cat(&[&[t], x, p]));
                // continuity surrogate: tiny moves in x and p
                let d = 1e-9;
                let allowed = 1e-6 * (1.0 + v.abs() + norm(p) + norm(x));
                let mut worst: f64 = 0.0;
                for i in 0..x.len() {
                    let mut y = x.clone();
                    y[i] += d;
                    worst = worst.max((h.eval(t, &y, p) - v).abs());
                }
                for i in 0..p.len() {
                    let mut q = p.clone();
                    q[i] += d;
                    worst = worst.max((h.eval(t, x, &q) - v).abs());
                }
                r[1].observe(worst - allowed, || cat(&[&[t], x, p]));
            }
            let c = h.growth(t);
            let scale = c * (1.0 + norm(x));
            let mut chat: f64 = 0.0;
            for i in 0..plan.ps.len() {
                for j in i + 1..plan.ps.len() {
                    let (p, q) = (&plan.ps[i], &plan.ps[j]);
                    let mid: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
                    let avg = 0.5 * (hv[i] + hv[j]);
                    let gap = h.eval(t, x, &mid) - avg - REL * (1.0 + hv[i].abs().max(hv[j].abs()));
                    r[2].observe(gap, || cat(&[&[t], x, p, q]));
                    let dpq = dist(p, q);
                    if dpq > 0.0 {
                        let ratio = (hv[i] - hv[j]).abs() / ((1.0 + norm(x)) * dpq);
                        chat = chat.max(ratio);
                        let excess = (hv[i] - hv[j]).abs() - scale * (1.0 + REL) * dpq;
                        r[3].observe(excess / ((1.0 + norm(x)) * dpq), || cat(&[&[t], x, p, q]));
                    }
                }
            }
            r[3].empirical_constant = Some(chat);
            r.into_iter().map(CheckRecord::finish).collect()
        })
        .collect();
    let mut out = merge_all(per, &names);
    for r in &mut out {
        r.pass = !r.worst_violation.is_nan() && r.worst_violation <= r.tolerance;
    }
    out[3].note = "empirical constant: max |H(p)-H(q)| / ((1+|x|)|p-q|)".into();
    Ok(out)
}

/// (HLC) on `B_R`: worst ratio `|H(t,x,p)−H(t,y,p)| / ((1+|p|)|x−y|)` against
/// `k_R(t)` (or `k` when given). Passes iff every ratio is `≤ k(1+1e−9)`.
pub fn check_hlc(h: &HamiltonianModel, r: f64, plan: &SamplePlan, k: Option<f64>) -> Result<CheckRecord> {
    plan.validate(h.n)?;
    let xs = plan.states_in_ball(r);
    let per: Vec<CheckRecord> = plan
        .ts
        .par_iter()
        .map(|&t| {
            let kr = k.unwrap_or_else(|| h.modulus(r, t));
            let mut rec = CheckRecord::new("HLC", 0.0);
            let mut khat: f64 = 0.0;
            let vals: Vec<Vec<f64>> = xs.iter().map(|x| plan.ps.iter().map(|p| h.eval(t, x, p)).collect()).collect();
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    let dx = dist(&xs[i], &xs[j]);
                    if dx == 0.0 {
                        continue;
                    }
                    for (q, p) in plan.ps.iter().enumerate() {
                        let ratio = (vals[i][q] - vals[j][q]).abs() / ((1.0 + norm(p)) * dx);
                        khat = khat.max(ratio);
                        rec.observe(ratio - kr * (1.0 + REL), || cat(&[&[t], &xs[i], &xs[j], p]));
                    }
                }
            }
            rec.with_constant(khat).finish()
        })
        .collect();
    let rec = per.into_iter().fold(CheckRecord::new("HLC", 0.0), CheckRecord::merge).finish();
    let kdesc = k.map_or("model k_R(t)".to_string(), |k| format!("k = {k}"));
    Ok(rec.with_note(format!("R = {r}, {kdesc}")))
}

/// `min L(t,y,u)` over `|u − v| ≤ rad`, with the minimizer.
pub(crate) fn min_near(l: &LagrangianModel, t: f64, y: &[f64], v: &[f64], rad: f64) -> (f64, Vec<f64>) {
    let d = l.domain(t, y);
    let eval = |u: &[f64]| l.eval_in(&d, t, y, u).to_f64();
    if v.len() == 1 {
        let (mut lo, mut hi) = match &d {
            Domain::Box { lo, hi, .. } => (lo[0], hi[0]),
            Domain::Ball { center, radius, .. } => (center[0] - radius, center[0] + radius),
        };
        if d.is_open() {
            let off = (hi - lo) * 2f64.powi(-40);
            lo += off;
            hi -= off;
        }
        let a = lo.max(v[0] - rad);
        let b = hi.min(v[0] + rad);
        if a > b {
            return (f64::INFINITY, v.to_vec());
        }
        let m = 41;
        let node = |i: usize| if m == 1 || a == b { a } else { a + (b - a) * i as f64 / (m - 1) as f64 };
        let (mut bi, mut bv) = (0, f64::INFINITY);
        for i in 0..m {
            let y = eval(&[node(i)]);
            if y < bv {
                bv = y;
                bi = i;
            }
        }
        let mut best = (bv, node(bi));
        if a < b {
            // golden section on the neighbouring cells; L is convex
            let (mut x0, mut x1) = (node(bi.saturating_sub(1)), node((bi + 1).min(m - 1)));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut c = x1 - g * (x1 - x0);
            let mut e = x0 + g * (x1 - x0);
            let (mut fc, mut fe) = (eval(&[c]), eval(&[e]));
            for _ in 0..80 {
                if fc <= fe {
                    x1 = e;
                    e = c;
                    fe = fc;
                    c = x1 - g * (x1 - x0);
                    fc = eval(&[c]);
                } else {
                    x0 = c;
                    c = e;
                    fc = fe;
                    e = x0 + g * (x1 - x0);
                    fe = eval(&[e]);
                }
            }
            for (u, f) in [(c, fc), (e, fe)] {
                if f < best.0 {
                    best = (f, u);
                }
            }
        }
        return (best.0, vec![best.1]);
    }
    let mut cands = vec![d.clamp(v)];
    let m = 21;
    for i in 0..m {
        for j in 0..m {
            let u = vec![
                v[0] - rad + 2.0 * rad * i as f64 / (m - 1) as f64,
                v[1] - rad + 2.0 * rad * j as f64 / (m - 1) as f64,
            ];
            if dist(&u, v) <= rad {
                cands.push(u);
            }
        }
    }
    cands
        .into_iter()
        .filter(|u| dist(u, v) <= rad * (1.0 + 1e-12) + 1e-15)
        .map(|u| (eval(&u), u))
        .fold((f64::INFINITY, v.to_vec()), |a, b| if b.0 < a.0 { b } else { a })
}

/// (LLC) and (ELC) on `B_R` with modulus `k`.
///
/// For each `x ≠ y` and each dom node `v` of `L(t,x,·)`, searches `u` with
/// `|u − v| ≤ kδ + τ` (`δ = |x−y|`, `τ = LLC_TOL`) minimizing `L(t,y,u)`, and
/// records the slack `L(t,y,u) − L(t,x,v) − kδ`. The (ELC) record tests the
/// truncated-epigraph points `(v, L(v) + s)` for `s ∈ {0, 1, 10}`.
pub fn check_llc_elc(l: &LagrangianModel, r: f64, k: f64, plan: &SamplePlan) -> Result<Vec<CheckRecord>> {
    plan.validate(l.n)?;
    let xs = plan.states_in_ball(r);
    let names = [("LLC", 1e-8), ("ELC", 1e-8)];
    let per: Vec<Vec<CheckRecord>> = plan
        .ts
        .par_iter()
        .map(|&t| {
            let mut llc = CheckRecord::new("LLC", 1e-8);
            let mut elc = CheckRecord::new("ELC", 1e-8);
            for x in &xs {
                let dx = l.domain(t, x);
                let vs = dx.nodes(plan.v_nodes, false);
                let lv: Vec<f64> = vs.iter().map(|v| l.eval_in(&dx, t, x, v).to_f64()).collect();
                for y in &xs {
                    let delta = dist(x, y);
                    if delta == 0.0 {
                        continue;
                    }
                    for (v, lxv) in vs.iter().zip(&lv) {
                        if !lxv.is_finite() {
                            continue;
                        }
                        let (m, u) = min_near(l, t, y, v, k * delta + LLC_TOL);
                        let slack = m - lxv - k * delta;
                        llc.observe(slack, || cat(&[&[t], x, y, v, &u]));
                        for s in [0.0, 1.0, 10.0] {
                            let eta = lxv + s;
                            elc.observe(m - eta - k * delta, || cat(&[&[t], x, y, v, &[eta]]));
                        }
                    }
                }
            }
            vec![llc.finish(), elc.finish()]
        })
        .collect();
    let out = merge_all(per, &names);
    Ok(out
        .into_iter()
        .map(|r0| {
            let r1 = r0.finish();
            let note = format!("R = {r}, k = {k}");
            r1.with_note(note)
        })
        .collect())
}

/// Options of [`check_blc`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlcOptions {
    /// Estimates above this value, reached by a strictly increasing
    /// filtration, declare `L` unbounded.
    pub threshold: f64,
    pub steps: u32,
    /// Filtration `v_k = c + (1 − base^{−k})(b − c)` from the center `c`
    /// toward a boundary point `b`.
    pub base: f64,
    /// Dom nodes per axis when `λ` is given.
    pub dom_nodes: usize,
}

impl Default for BlcOptions {
    fn default() -> Self {
        Self { threshold: BLC_THRESHOLD, steps: BLC_FILTRATION_STEPS, base: 10.0, dom_nodes: 101 }
    }
}

/// (BLC) on the plan's `(t,x)` samples.
///
/// With `λ`: checks `L ≤ λ` on dom nodes and reports the empirical Lipschitz
/// constant of `λ` in `x`. Without `λ`: runs the boundary filtration and fails
/// with note `UNBOUNDED` when some filtration grows strictly past the
/// threshold; the empirical constant is then the largest estimate.
pub fn check_blc(l: &LagrangianModel, plan: &SamplePlan, opts: BlcOptions) -> Result<CheckRecord> {
    plan.validate(l.n)?;
    let pairs = tx_pairs(plan);
    if l.has_lambda() {
        let mut rec = pairs
            .par_iter()
            .map(|(t, x)| {
                let lam = l.lambda(*t, x).unwrap_or(f64::NAN);
                let d = l.domain(*t, x);
                let mut rec = CheckRecord::new("BLC", 0.0);
                for v in d.nodes(opts.dom_nodes, true) {
                    let lv = l.eval_in(&d, *t, x, &v).to_f64();
                    rec.observe(lv - lam - REL * (1.0 + lam.abs()), || cat(&[&[*t], x, &v]));
                }
                rec.finish()
            })
            .reduce(|| CheckRecord::new("BLC", 0.0), CheckRecord::merge)
            .finish();
        let mut lip: f64 = 0.0;
        for t in &plan.ts {
            for (i, x) in plan.xs.iter().enumerate() {
                for y in &plan.xs[i + 1..] {
                    let d = dist(x, y);
                    if d > 0.0 {
                        let (a, b) = (l.lambda(*t, x).unwrap(), l.lambda(*t, y).unwrap());
                        lip = lip.max((a - b).abs() / d);
                    }
                }
            }
        }
        rec.empirical_constant = Some(lip);
        rec.note = "L <= lambda on dom nodes; empirical constant is the Lipschitz constant of lambda".into();
        return Ok(rec);
    }
    let mut sup_est: f64 = f64::NEG_INFINITY;
    let mut rec = CheckRecord::new("BLC", 0.0);
    for (t, x) in &pairs {
        let d = l.domain(*t, x);
        if d.is_point() {
            let v = d.clamp(&vec![0.0; l.n]);
            let lv = l.eval_in(&d, *t, x, &v).to_f64();
            sup_est = sup_est.max(lv);
            rec.observe(lv - opts.threshold, || cat(&[&[*t], x, &v]));
            continue;
        }
        for (c, b) in d.boundary_rays() {
            let mut prev = f64::NEG_INFINITY;
            let mut increasing = true;
            let mut last = f64::NEG_INFINITY;
            let mut last_v = c.clone();
            for k in 1..=opts.steps {
                let s = 1.0 - opts.base.powi(-(k as i32));
                let v: Vec<f64> = c.iter().zip(&b).map(|(ci, bi)| ci + s * (bi - ci)).collect();
                let lv = l.eval_in(&d, *t, x, &v).to_f64();
                increasing &= lv > prev;
                prev = lv;
                last = lv;
                last_v = v;
            }
            sup_est = sup_est.max(last);
            // bounded filtrations never count as violations
            let viol = if increasing { last - opts.threshold } else { last.min(opts.threshold) - opts.threshold };
            rec.observe(viol, || cat(&[&[*t], x, &last_v]));
        }
    }
    let rec = rec.finish().with_constant(sup_est);
    let note =
        if rec.pass { "no lambda supplied; filtration stays bounded".to_string() } else { "UNBOUNDED".to_string() };
    Ok(rec.with_note(note))
}

/// `H(t,x,·)` sampled on a 1-D dual grid.
pub fn hamiltonian_slice(h: &HamiltonianModel, t: f64, x: &[f64], grid: Grid1) -> Result<GridFunction> {
    if h.n != 1 {
        return input_err("hamiltonian_slice needs n = 1");
    }
    GridFunction::sample1(grid, |p| h.eval(t, x, &[p]))
}

/// Result of [`cross_conjugacy`].
#[derive(Clone, Debug, PartialEq)]
pub struct CrossConjugacy {
    /// `max |H* − L|` over interior dom nodes, with the worst node.
    pub l_err: f64,
    pub l_arg: f64,
    pub l_nodes: usize,
    /// `max |L* − H|` over the dual window, with the worst node.
    pub h_err: f64,
    pub h_arg: f64,
    pub h_nodes: usize,
}

/// Grids of [`cross_conjugacy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossConjugacyOptions {
    pub p_step: f64,
    pub p_max: f64,
    pub v_step: f64,
    /// Fraction of the domain half-width counted as interior.
    pub interior: f64,
    pub dual_max: f64,
}

impl Default for CrossConjugacyOptions {
    fn default() -> Self {
        Self { p_step: 1e-3, p_max: 100.0, v_step: 1e-2, interior: 0.99, dual_max: 10.0 }
    }
}

/// Cross-conjugacy at `(t,x)` for `n = 1`.
///
/// `H*` is taken over `p ∈ [−p_max, p_max]` with spacing `p_step` and compared
/// with `L` at nodes of spacing `v_step` in the slope window
/// `[−1.2c(1+|x|), 1.2c(1+|x|)]` lying in the inner `interior` fraction of the
/// domain. `L*` is taken over 20001 dom nodes and compared with `H` on
/// `p ∈ [−dual_max, dual_max]`, spacing `0.05`.
pub fn cross_conjugacy(
    h: &HamiltonianModel,
    l: &LagrangianModel,
    t: f64,
    x: &[f64],
    o: CrossConjugacyOptions,
) -> Result<CrossConjugacy> {
    let CrossConjugacyOptions { p_step, p_max, v_step, interior, dual_max } = o;
    if h.n != 1 || l.n != 1 {
        return input_err("cross_conjugacy needs n = 1");
    }
    let hs = hamiltonian_slice(h, t, x, Grid1::with_step(-p_max, p_max, p_step)?)?;
    let (wlo, whi) = slope_window(h.growth(t), norm(x));
    let d = l.domain(t, x);
    let (dlo, dhi) = match &d {
        Domain::Box { lo, hi, .. } => (lo[0], hi[0]),
        Domain::Ball { center, radius, .. } => (center[0] - radius, center[0] + radius),
    };
    let (mid, half) = (0.5 * (dlo + dhi), 0.5 * (dhi - dlo));
    let vs: Vec<Vec<f64>> = if half == 0.0 {
        vec![vec![mid]]
    } else {
        Grid1::with_step(wlo, whi, v_step)?
            .nodes()
            .into_iter()
            .filter(|v| (v - mid).abs() <= interior * half && d.contains(&[*v], 0.0))
            .map(|v| vec![v])
            .collect()
    };
    let hstar = conjugate_at(&hs, &vs)?;
    let (mut l_err, mut l_arg) = (0.0f64, f64::NAN);
    for (v, hv) in vs.iter().zip(&hstar) {
        let e = (hv - l.eval_in(&d, t, x, v).to_f64()).abs();
        if !(e <= l_err) {
            l_err = e;
            l_arg = v[0];
        }
    }
    let dom_nodes = d.nodes(20001, false);
    let lvals: Vec<(f64, f64)> =
        dom_nodes.iter().map(|v| (v[0], l.eval_in(&d, t, x, v).to_f64())).filter(|(_, y)| y.is_finite()).collect();
    let ps = Grid1::with_step(-dual_max, dual_max, 0.05)?.nodes();
    let (mut h_err, mut h_arg) = (0.0f64, f64::NAN);
    for p in &ps {
        let ls = lvals.iter().map(|(v, y)| p * v - y).fold(f64::NEG_INFINITY, f64::max);
        let e = (ls - h.eval(t, x, &[*p])).abs();
        if !(e <= h_err) {
            h_err = e;
            h_arg = *p;
        }
    }
    Ok(CrossConjugacy { l_err, l_arg, l_nodes: vs.len(), h_err, h_arg, h_nodes: ps.len() })
}
