//! Perturbation families `H_i → H` and convergence audits.

use std::str::FromStr;

use rayon::prelude::*;

use crate::conjugate::{Grid, GridFunction};
use crate::error::{input_err, Error, Result};
use crate::geometry::vector::dist;
use crate::geometry::{hausdorff, ConvexBody};
use crate::io::fmt_num;
use crate::models::{HamiltonianModel, LagrangianModel};
use crate::report::CheckRecord;
use crate::representation::{RepOptions, Representation};

/// How the `i`-th member differs from the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationRule {
    /// `H_i = H + 1/i`, `L_i = L − 1/i`, `λ_i = λ`.
    Shift,
    /// `H_i = H + max(0, 1 − |x|)/i`, `k_i = k + 1/i`, `λ_i = λ`.
    Bump,
    /// `H` fixed; the evaluation point moves, `(t + 1/i, x + 1/i, (1 − 1/i)a)`.
    Drift,
}

impl FromStr for PerturbationRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shift" => Ok(Self::Shift),
            "bump" => Ok(Self::Bump),
            "drift" => Ok(Self::Drift),
            _ => input_err(format!("unknown perturbation rule `{s}`")),
        }
    }
}

impl std::fmt::Display for PerturbationRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Shift => "shift",
            Self::Bump => "bump",
            Self::Drift => "drift",
        })
    }
}

/// A base model, a rule, and the indices to audit.
#[derive(Clone, Debug)]
pub struct PerturbationFamily {
    pub h: HamiltonianModel,
    pub l: LagrangianModel,
    pub rule: PerturbationRule,
    pub schedule: Vec<usize>,
}

fn bump(x: &[f64]) -> f64 {
    (1.0 - crate::geometry::vector::norm(x)).max(0.0)
}

impl PerturbationFamily {
    /// Schedule `1, …, imax`.
    pub fn new(h: &HamiltonianModel, l: &LagrangianModel, rule: PerturbationRule, imax: usize) -> Result<Self> {
        if imax < 3 {
            return input_err("need at least 3 indices");
        }
        if !l.has_lambda() {
            return Err(Error::BlcRequired(format!("{} carries no upper bound λ", l.name)));
        }
        Ok(Self { h: h.clone(), l: l.clone(), rule, schedule: (1..=imax).collect() })
    }

    /// Member `i`; `i = 0` is the base.
    pub fn member(&self, i: usize) -> (HamiltonianModel, LagrangianModel) {
        if i == 0 || self.rule == PerturbationRule::Drift {
            return (self.h.clone(), self.l.clone());
        }
        let s = 1.0 / i as f64;
        let name = format!("{}[{}:{i}]", self.h.name, self.rule);
        match self.rule {
            PerturbationRule::Shift => {
                let k = self.h.clone();
                (
                    self.h.shifted(&name, move |_, _| s, move |r, t| k.modulus(r, t)),
                    self.l.shifted(&name, move |_, _| s, false),
                )
            }
            _ => {
                let k = self.h.clone();
                (
                    self.h.shifted(&name, move |_, x| s * bump(x), move |r, t| k.modulus(r, t) + s),
                    self.l.shifted(&name, move |_, x: &[f64]| s * bump(x), false),
                )
            }
        }
    }

    /// Evaluation point of member `i` for the base point `(t,x,a)`.
    pub fn point(&self, i: usize, t: f64, x: &[f64], a: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        if i == 0 || self.rule != PerturbationRule::Drift {
            return (t, x.to_vec(), a.to_vec());
        }
        let s = 1.0 / i as f64;
        let tt = (t + s).min(self.h.horizon);
        (tt, x.iter().map(|c| c + s).collect(), a.iter().map(|c| c * (1.0 - s)).collect())
    }

    /// Sup over `points` and `ps` of `|H_i − H|`, `|λ_i − λ|` (and `c_i − c`,
    /// which no shipped rule changes).
    pub fn sup_gap(&self, i: usize, points: &[(f64, Vec<f64>)], ps: &[Vec<f64>]) -> f64 {
        let (hi, li) = self.member(i);
        let mut g: f64 = 0.0;
        for (t, x) in points {
            for p in ps {
                g = g.max((hi.eval(*t, x, p) - self.h.eval(*t, x, p)).abs());
            }
            g = g.max((li.lambda(*t, x).unwrap() - self.l.lambda(*t, x).unwrap()).abs());
            g = g.max((hi.growth(*t) - self.h.growth(*t)).abs());
        }
        g
    }
}

/// `d_i ≈ C/i` by least squares on the regressor `1/i`, with `R²`.
pub fn fit_rate(indices: &[usize], dev: &[f64]) -> (f64, f64) {
    let u: Vec<f64> = indices.iter().map(|i| 1.0 / *i as f64).collect();
    let c = u.iter().zip(dev).map(|(a, b)| a * b).sum::<f64>() / u.iter().map(|a| a * a).sum::<f64>();
    let mean = dev.iter().sum::<f64>() / dev.len() as f64;
    let ss_tot: f64 = dev.iter().map(|d| (d - mean).powi(2)).sum();
    let ss_res: f64 = u.iter().zip(dev).map(|(a, d)| (d - c * a).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    (c, r2)
}

/// Per-index deviations of `e_i` from `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityAudit {
    pub indices: Vec<usize>,
    /// `max_points |e_i − e|`.
    pub deviation: Vec<f64>,
    /// `max_points (|e_i − e| − (n+1)ℋ(Φ_i, Φ))`.
    pub coherence: Vec<f64>,
    pub rate: f64,
    pub r2: f64,
}

impl StabilityAudit {
    /// CSV `i,deviation,fit,coherence`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,deviation,fit,coherence\n");
        for ((i, d), c) in self.indices.iter().zip(&self.deviation).zip(&self.coherence) {
            s.push_str(&format!("{i},{},{},{}\n", fmt_num(*d), fmt_num(self.rate / *i as f64), fmt_num(*c)));
        }
        s
    }

    /// `STAB_E` (last deviation ≤ `tol`, nonincreasing up to 10%),
    /// `STAB_RATE` (`R² ≥ 0.9`), `STAB_COHERENCE` (Steiner–Hausdorff chain).
    pub fn records(&self, tol: f64) -> Vec<CheckRecord> {
        let mut e = CheckRecord::new("STAB_E", 0.0);
        let last = *self.deviation.last().unwrap_or(&0.0);
        e.observe(last - tol, || vec![*self.indices.last().unwrap_or(&0) as f64]);
        for (w, i) in self.deviation.windows(2).zip(&self.indices[1..]) {
            e.observe(w[1] - 1.1 * w[0] - 1e-12, || vec![*i as f64]);
        }
        let mut rate = CheckRecord::new("STAB_RATE", 0.0);
        rate.observe(0.9 - self.r2, Vec::new);
        let mut coh = CheckRecord::new("STAB_COHERENCE", 1e-9);
        for (c, i) in self.coherence.iter().zip(&self.indices) {
            coh.observe(*c, || vec![*i as f64]);
        }
        vec![
            e.finish().with_note(format!("last deviation {last}")),
            rate.finish().with_constant(self.rate).with_note(format!("R2 {}", self.r2)),
            coh.finish(),
        ]
    }
}

/// `max |e_i(t_i,x_i,a_i) − e(t,x,a)|` over `points` for each scheduled index.
pub fn stability_audit_e(
    fam: &PerturbationFamily,
    points: &[(f64, Vec<f64>, Vec<f64>)],
    opts: RepOptions,
) -> Result<StabilityAudit> {
    let base = Representation::new(&fam.h, &fam.l, opts)?;
    let base_tr = points.iter().map(|(t, x, a)| base.construct(*t, x, a)).collect::<Result<Vec<_>>>()?;
    let m = (fam.h.n + 1) as f64;
    let rows: Vec<(f64, f64)> = fam
        .schedule
        .par_iter()
        .map(|&i| -> Result<(f64, f64)> {
            let (hi, li) = fam.member(i);
            let rep = Representation::with_frame(&hi, &li, opts, (&fam.h, &fam.l))?;
            let mut dev: f64 = 0.0;
            let mut coh = f64::NEG_INFINITY;
            for ((t, x, a), b) in points.iter().zip(&base_tr) {
                let (ti, xi, ai) = fam.point(i, *t, x, a);
                let tr = rep.construct(ti, &xi, &ai)?;
                let d = dist(&tr.e, &b.e);
                dev = dev.max(d);
                coh = coh.max(d - m * hausdorff(&tr.phi, &b.phi)?);
            }
            Ok((dev, coh))
        })
        .collect::<Result<_>>()?;
    let deviation: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let (rate, r2) = fit_rate(&fam.schedule, &deviation);
    Ok(StabilityAudit {
        indices: fam.schedule.clone(),
        deviation,
        coherence: rows.iter().map(|r| r.1).collect(),
        rate,
        r2,
    })
}

/// Bodies `K_i`, a target `K`, and probe points.
#[derive(Clone, Debug)]
pub struct SetSequenceProbe {
    pub bodies: Vec<ConvexBody>,
    pub target: ConvexBody,
    pub probes: Vec<Vec<f64>>,
}

/// `|d(x,K_i) − d(x,K)|` per index (rows) and probe (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct SetLimitAudit {
    pub table: Vec<Vec<f64>>,
    pub record: CheckRecord,
}

/// Passes when the worst deviation at the last index is at most `tol` and
/// does not exceed the worst deviation at the first index.
pub fn set_limit_check(probe: &SetSequenceProbe, tol: f64) -> Result<SetLimitAudit> {
    if probe.bodies.len() < 3 {
        return input_err("set limits need at least 3 indices");
    }
    let d0 = probe.probes.iter().map(|p| probe.target.distance(p)).collect::<Result<Vec<_>>>()?;
    let table = probe
        .bodies
        .iter()
        .map(|k| {
            probe.probes.iter().zip(&d0).map(|(p, d)| Ok((k.distance(p)? - d).abs())).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = |row: &[f64]| row.iter().copied().fold(0.0, f64::max);
    let first = worst(&table[0]);
    let last = worst(table.last().unwrap());
    let mut rec = CheckRecord::new("SET_LIMIT", tol);
    rec.observe(last, || vec![(table.len() - 1) as f64]);
    if last > first {
        rec.observe(f64::INFINITY, || vec![first, last]);
    }
    Ok(SetLimitAudit { table, record: rec.finish() })
}

fn neighbours(grid: &Grid, idx: usize) -> Vec<usize> {
    match grid {
        Grid::D1(g) => (idx.saturating_sub(1)..=(idx + 1).min(g.len - 1)).collect(),
        Grid::D2(a, b) => {
            let (i, j) = (idx / b.len, idx % b.len);
            let mut out = Vec::new();
            for ii in i.saturating_sub(1)..=(i + 1).min(a.len - 1) {
                for jj in j.saturating_sub(1)..=(j + 1).min(b.len - 1) {
                    out.push(ii * b.len + jj);
                }
            }
            out
        }
    }
}

/// Epi-convergence of `fs` to `f` on a common grid. `EPI_LIMINF`: no node has
/// `min_{tail} F_i(x) < F(x) − tol`. `EPI_LIMSUP`: every node with finite `F`
/// has a neighbour within one cell where the last `F_i` is at most `F(x) + tol`.
/// The tail is the second half of the sequence.
pub fn epi_convergence_check(fs: &[GridFunction], f: &GridFunction, tol: f64) -> Result<Vec<CheckRecord>> {
    if fs.is_empty() {
        return input_err("empty sequence");
    }
    if fs.iter().any(|g| g.grid() != f.grid()) {
        return input_err("epi-convergence needs a common grid");
    }
    let tail = &fs[fs.len() / 2..];
    let last = fs.last().unwrap();
    let mut inf = CheckRecord::new("EPI_LIMINF", tol);
    let mut sup = CheckRecord::new("EPI_LIMSUP", tol);
    for idx in 0..f.len() {
        let fx = f.value(idx).to_f64();
        let low = tail.iter().map(|g| g.value(idx).to_f64()).fold(f64::INFINITY, f64::min);
        let v = if fx == f64::INFINITY {
            if low == f64::INFINITY {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            fx - low
        };
        inf.observe(v, || f.grid().node(idx));
        if fx.is_finite() {
            let rec =
                neighbours(f.grid(), idx).into_iter().map(|j| last.value(j).to_f64()).fold(f64::INFINITY, f64::min);
            sup.observe(rec - fx, || f.grid().node(idx));
        }
    }
    Ok(vec![inf.finish(), sup.finish()])
}
