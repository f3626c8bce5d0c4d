//! Numerical audits of the constructed triple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::controls::random_ball_point;
use super::Representation;
use crate::epigraph::truncated_hausdorff;
use crate::error::Result;
use crate::geometry::vector::{dist, dot, norm};
use crate::models::{ControlTriple, LagrangianModel};
use crate::report::CheckRecord;

/// Sampled sup `max_a ⟨p,f⟩ − l` against `H(t,x,p)`.
#[derive(Clone, Debug)]
pub struct SupAudit {
    pub t: f64,
    pub x: Vec<f64>,
    pub ps: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    /// Sup over the whole cloud.
    pub cloud_sup: Vec<f64>,
    /// Sup over the first half of the cloud.
    pub half_cloud_sup: Vec<f64>,
    /// Sup over the graph controls.
    pub graph_sup: Vec<f64>,
}

impl SupAudit {
    /// `H − sampled sup` with all controls.
    pub fn residual(&self, i: usize) -> f64 {
        self.h[i] - self.cloud_sup[i].max(self.graph_sup[i])
    }

    pub fn cloud_residual(&self, i: usize) -> f64 {
        self.h[i] - self.cloud_sup[i]
    }

    pub fn half_cloud_residual(&self, i: usize) -> f64 {
        self.h[i] - self.half_cloud_sup[i]
    }

    pub fn graph_residual(&self, i: usize) -> f64 {
        self.h[i] - self.graph_sup[i]
    }

    /// `SUP_UPPER` (sampled sup never above `H`) and `SUP_GAP` (residual at
    /// most `gap_tol`).
    pub fn records(&self, gap_tol: f64) -> Vec<CheckRecord> {
        let mut up = CheckRecord::new("SUP_UPPER", 1e-9);
        let mut gap = CheckRecord::new("SUP_GAP", gap_tol);
        for (i, p) in self.ps.iter().enumerate() {
            let r = self.residual(i);
            let arg = || [&[self.t][..], &self.x, p].concat();
            up.observe(-r / (1.0 + self.h[i].abs()), arg);
            gap.observe(r, arg);
        }
        vec![up.finish(), gap.finish()]
    }
}

fn evaluate(rep: &Representation, t: f64, x: &[f64], controls: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    controls.par_iter().map(|a| rep.e(t, x, a)).collect()
}

fn sup(es: &[Vec<f64>], p: &[f64]) -> f64 {
    let n = p.len();
    es.iter().map(|e| dot(p, &e[..n]) - e[n]).fold(f64::NEG_INFINITY, f64::max)
}

/// `e` at one state over a control cloud and the graph controls.
#[derive(Clone, Debug)]
pub struct StateSamples {
    pub t: f64,
    pub x: Vec<f64>,
    pub cloud: Vec<Vec<f64>>,
    pub graph: Vec<Vec<f64>>,
    pub cloud_e: Vec<Vec<f64>>,
    pub graph_e: Vec<Vec<f64>>,
}

/// Evaluates `e(t,x,·)` on `cloud` and on the graph controls at `(t,x)`.
pub fn sample_state(rep: &Representation, t: f64, x: &[f64], cloud: &[Vec<f64>]) -> Result<StateSamples> {
    let graph = rep.graph_controls(t, x)?;
    Ok(StateSamples {
        t,
        x: x.to_vec(),
        cloud_e: evaluate(rep, t, x, cloud)?,
        graph_e: evaluate(rep, t, x, &graph)?,
        cloud: cloud.to_vec(),
        graph,
    })
}

impl StateSamples {
    /// Sampled sup at each `p`; the half-cloud sup uses the leading half.
    pub fn sup_audit(&self, rep: &Representation, ps: &[Vec<f64>]) -> SupAudit {
        let half = &self.cloud_e[..self.cloud_e.len() / 2];
        SupAudit {
            t: self.t,
            x: self.x.clone(),
            ps: ps.to_vec(),
            h: ps.iter().map(|p| rep.hamiltonian().eval(self.t, &self.x, p)).collect(),
            cloud_sup: ps.iter().map(|p| sup(&self.cloud_e, p)).collect(),
            half_cloud_sup: ps.iter().map(|p| sup(half, p)).collect(),
            graph_sup: ps.iter().map(|p| sup(&self.graph_e, p)).collect(),
        }
    }

    /// `SANDWICH_UPPER` (sampled `e` in `epi L`), `SANDWICH_LOWER` (graph
    /// points recovered by their scaled controls), `RANGE` (`f(𝔹) = dom L`
    /// on the samples) and `A2` (`|f| ≤ c(t)(1+|x|)`).
    pub fn sandwich_records(&self, rep: &Representation) -> Result<Vec<CheckRecord>> {
        let (t, x) = (self.t, self.x.as_slice());
        let s = rep.section(t, x)?;
        let n = rep.n();
        let w = s.omega().unwrap_or(1.0);
        let arg = |a: &[f64]| [&[t][..], x, a].concat();

        let mut upper = CheckRecord::new("SANDWICH_UPPER", 1e-9);
        let mut growth = CheckRecord::new("A2", 1e-9);
        let mut range = CheckRecord::new("RANGE", 1e-9);
        let gmax = rep.hamiltonian().growth(t) * (1.0 + norm(x));
        for (a, e) in self.cloud.iter().chain(&self.graph).zip(self.cloud_e.iter().chain(&self.graph_e)) {
            let lv = s.lagrangian(&e[..n]);
            upper.observe(lv - e[n], || arg(a));
            growth.observe(norm(&e[..n]) - gmax, || arg(a));
            let out = if s.domain().contains(&e[..n], 1e-12) { 0.0 } else { f64::INFINITY };
            range.observe(out, || arg(a));
        }
        // every dom node is hit by some sampled f
        let fs: Vec<&[f64]> = self.cloud_e.iter().chain(&self.graph_e).map(|e| &e[..n]).collect();
        for (v, _) in s.samples() {
            let gap = fs.iter().map(|f| dist(f, v)).fold(f64::INFINITY, f64::min);
            range.observe(gap, || v.to_vec());
        }

        let mut lower = CheckRecord::new("SANDWICH_LOWER", 1e-6);
        for (a, e) in self.graph.iter().zip(&self.graph_e) {
            let target: Vec<f64> = a.iter().map(|c| c * w).collect();
            lower.observe(dist(e, &target), || arg(a));
        }
        Ok(vec![upper.finish(), lower.finish(), range.finish(), growth.finish()])
    }
}

/// Sampled sup over `cloud` and the graph controls at each `p`.
pub fn verify_sup_formula(
    rep: &Representation,
    t: f64,
    x: &[f64],
    ps: &[Vec<f64>],
    cloud: &[Vec<f64>],
) -> Result<SupAudit> {
    Ok(sample_state(rep, t, x, cloud)?.sup_audit(rep, ps))
}

/// See [`StateSamples::sandwich_records`].
pub fn verify_sandwich(rep: &Representation, t: f64, x: &[f64], cloud: &[Vec<f64>]) -> Result<Vec<CheckRecord>> {
    sample_state(rep, t, x, cloud)?.sandwich_records(rep)
}

/// Parameters of [`audit_lipschitz_a1`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct A1Options {
    pub r: f64,
    pub pairs: usize,
    /// Leading pairs also checked against `5m[ℋ + |ωa − ωb|]`.
    pub intermediate_pairs: usize,
    pub seed: u64,
}

impl Default for A1Options {
    fn default() -> Self {
        Self { r: 1.0, pairs: 10_000, intermediate_pairs: 200, seed: 0 }
    }
}

fn point_in_ball<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    if n == 1 {
        return vec![rng.gen_range(-r..=r)];
    }
    let mut p = random_ball_point(rng, n);
    p.iter_mut().for_each(|c| *c *= r);
    p
}

fn into_ball(mut p: Vec<f64>, r: f64) -> Vec<f64> {
    let q = norm(&p);
    if q > r {
        p.iter_mut().for_each(|c| *c *= r / q);
    }
    p
}

/// The (A1) constant `10(n+1)(ω_R + 3(1+R)k_R + 1)` with
/// `ω_R = |λ(t,0)| + |H(t,0,0)| + c(t)(2+R)`.
pub fn a1_bound(rep: &Representation, t: f64, r: f64) -> f64 {
    let n = rep.n();
    let h = rep.hamiltonian();
    let zero = vec![0.0; n];
    let lam = rep.lagrangian().lambda(t, &zero).unwrap_or(f64::INFINITY);
    let omega_r = lam.abs() + h.eval(t, &zero, &zero).abs() + h.growth(t) * (2.0 + r);
    10.0 * (n + 1) as f64 * (omega_r + 3.0 * (1.0 + r) * h.modulus(r, t) + 1.0)
}

/// Empirical difference quotients of `e` over `B_R × 𝔹` against (A1), plus
/// `A2` on every evaluated point and the intermediate bound on the leading
/// pairs. Half the pairs are independent draws, half are local perturbations
/// of size `10^{−1}, 10^{−2}, 10^{−3}`.
pub fn audit_lipschitz_a1(rep: &Representation, opts: A1Options) -> Result<Vec<CheckRecord>> {
    let n = rep.n();
    let m = (n + 1) as f64;
    let horizon = rep.hamiltonian().horizon;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs: Vec<_> = (0..opts.pairs)
        .map(|i| {
            let t = rng.gen_range(0.0..=horizon);
            let x = point_in_ball(&mut rng, n, opts.r);
            let a = random_ball_point(&mut rng, n + 1);
            let (y, b) = if i % 2 == 0 {
                (point_in_ball(&mut rng, n, opts.r), random_ball_point(&mut rng, n + 1))
            } else {
                let d = [1e-1, 1e-2, 1e-3][(i / 2) % 3];
                let dy = point_in_ball(&mut rng, n, d);
                let db = random_ball_point(&mut rng, n + 1);
                let y = into_ball(x.iter().zip(&dy).map(|(p, q)| p + q).collect(), opts.r);
                let b = into_ball(a.iter().zip(&db).map(|(p, q)| p + d * q).collect(), 1.0);
                (y, b)
            };
            (t, x, a, y, b)
        })
        .collect();

    let nodes = rep.options().ball.nodes as f64;
    let theta = if n == 1 { std::f64::consts::PI / nodes } else { (4.0 * std::f64::consts::PI / nodes).sqrt() };
    // distance from the exact construction: hull sag plus the inner ball hull
    let err = |tr: &super::ConstructionTrace, sag: f64| 5.0 * m * (sag + tr.radius * (1.0 - theta.cos()));

    struct Row {
        q: f64,
        allowance: f64,
        bound: f64,
        growth: [f64; 2],
        inter: Option<f64>,
    }
    let rows: Vec<Row> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (t, x, a, y, b))| -> Result<Row> {
            let t1 = rep.construct(*t, x, a)?;
            let t2 = rep.construct(*t, y, b)?;
            let s1 = rep.section(*t, x)?;
            let s2 = rep.section(*t, y)?;
            let den = dist(x, y) + dist(a, b);
            let de = dist(&t1.e, &t2.e);
            let disc = err(&t1, s1.hull_sag()) + err(&t2, s2.hull_sag()) + 1e-9;
            let (q, allowance) = if den > 0.0 { (de / den, disc / den) } else { (0.0, f64::INFINITY) };
            let c = rep.hamiltonian().growth(*t);
            let growth = [norm(t1.f()) - c * (1.0 + norm(x)), norm(t2.f()) - c * (1.0 + norm(y))];
            let inter = if i < opts.intermediate_pairs {
                let hd = truncated_hausdorff(rep.hamiltonian(), &s1, &s2)?;
                let zz = dist(&t1.center, &t2.center);
                Some(de - 5.0 * m * (hd + zz) - disc)
            } else {
                None
            };
            Ok(Row { q, allowance, bound: a1_bound(rep, *t, opts.r), growth, inter })
        })
        .collect::<Result<_>>()?;

    let mut a1 = CheckRecord::new("A1", 0.0);
    let mut a2 = CheckRecord::new("A2", 1e-9);
    let mut mid = CheckRecord::new("A1_INTERMEDIATE", 0.0);
    let mut khat: f64 = 0.0;
    let mut bound: f64 = 0.0;
    for (row, (t, x, a, y, b)) in rows.iter().zip(&pairs) {
        let arg = || [&[*t][..], x, a, y, b].concat();
        khat = khat.max(row.q);
        bound = bound.max(row.bound);
        a1.observe(row.q - row.bound * (1.0 + 1e-6) - row.allowance, arg);
        for g in row.growth {
            a2.observe(g, arg);
        }
        if let Some(v) = row.inter {
            mid.observe(v, arg);
        }
    }
    Ok(vec![a1.finish().with_constant(khat).with_note(format!("bound {bound}")), a2.finish(), mid.finish()])
}

/// Evaluator `(t,x,a) ↦ (f, l)` of a hand-written triple.
pub fn triple_eval(triple: &dyn ControlTriple) -> impl Fn(f64, &[f64], &[f64]) -> Result<Vec<f64>> + Sync + '_ {
    move |t, x, a| {
        let mut e = triple.f(t, x, a);
        e.push(triple.l(t, x, a));
        Ok(e)
    }
}

/// Modulus of `(t,x,a) ↦ e` on nested perturbations `h = 2^{−k}`, `k` in
/// `levels`, of each base point: `x + h·𝟙` and `(1 − h)a`. Passes when every
/// change is at most `bound·(|Δx| + |Δa|) + allowance`.
pub fn continuity_audit<F>(
    eval: F,
    points: &[(f64, Vec<f64>, Vec<f64>)],
    bound: f64,
    levels: std::ops::RangeInclusive<u32>,
    allowance: f64,
) -> Result<CheckRecord>
where
    F: Fn(f64, &[f64], &[f64]) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Vec<(f64, f64, Vec<f64>)>> = points
        .par_iter()
        .map(|(t, x, a)| -> Result<_> {
            let e0 = eval(*t, x, a)?;
            let mut out = Vec::new();
            for k in levels.clone() {
                let h = 0.5f64.powi(k as i32);
                let y: Vec<f64> = x.iter().map(|c| c + h).collect();
                let b: Vec<f64> = a.iter().map(|c| c * (1.0 - h)).collect();
                let de = dist(&eval(*t, &y, &b)?, &e0);
                let din = dist(x, &y) + dist(a, &b);
                out.push((de, din, [&[*t][..], x, a, &[h]].concat()));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut rec = CheckRecord::new("A4", 0.0);
    let mut khat: f64 = 0.0;
    for (de, din, arg) in rows.into_iter().flatten() {
        khat = khat.max(de / din);
        rec.observe(de - bound * din - allowance, || arg);
    }
    Ok(rec.finish().with_constant(khat))
}

/// `l(t,x,a) − L(t,x,f(t,x,a))`; `−∞` when `f` leaves `dom L`.
pub fn check_epi_membership(l: &LagrangianModel, triple: &dyn ControlTriple, t: f64, x: &[f64], a: &[f64]) -> f64 {
    let f = triple.f(t, x, a);
    match l.eval(t, x, &f).finite() {
        Some(v) => triple.l(t, x, a) - v,
        None => f64::NEG_INFINITY,
    }
}
