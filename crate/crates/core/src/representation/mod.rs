//! The representation `e = (f, l) = s_m(P(ω a, E_L(t,x)))` on `𝔹 ⊂ ℝ^{n+1}`.
//!
//! For each `(t,x)` the epigraph section is discretized once (see
//! [`crate::epigraph`]) and cached. A control `a` is scaled by `ω(t,x)`; when
//! `ω a` lies in the epigraph it is returned unchanged, otherwise the ball
//! `B(ωa, 2d)` cuts a piece `Φ` out of the hull body and its Steiner point is
//! the output.

mod audit;
mod controls;
mod convexify;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub use audit::{
    a1_bound, audit_lipschitz_a1, check_epi_membership, continuity_audit, sample_state, triple_eval, verify_sandwich,
    verify_sup_formula, A1Options, StateSamples, SupAudit,
};
pub use controls::{control_cloud, random_ball_point};
pub use convexify::{convexify, convexify_triple, ConvexifiedTriple};

use crate::epigraph::{default_window, omega_value, EpigraphSection, SectionOptions};
use crate::error::{Error, Result};
use crate::geometry::vector::{dist, norm};
use crate::geometry::{
    ball_intersect_p, steiner, BallOptions, ConvexBody, SphereQuadrature, SteinerRule, SINGLETON_EPS,
};
use crate::io::fmt_num;
use crate::models::{HamiltonianModel, LagrangianModel};

const CACHE_LIMIT: usize = 4096;

/// `ω(t,x) = |λ(t,x)| + |H(t,x,0)| + c(t)(1+|x|) + 1`.
pub fn omega(h: &HamiltonianModel, l: &LagrangianModel, t: f64, x: &[f64]) -> Result<f64> {
    omega_value(h, l, t, x)
}

/// Construction parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RepOptions {
    /// Dom nodes per axis of each epigraph section.
    pub dom_nodes: Option<usize>,
    pub steiner: SteinerRule,
    pub ball: BallOptions,
}

/// One evaluation of the construction.
#[derive(Clone, Debug)]
pub struct ConstructionTrace {
    pub t: f64,
    pub x: Vec<f64>,
    pub a: Vec<f64>,
    pub omega: f64,
    /// `ω a`, the center of the ball `G`.
    pub center: Vec<f64>,
    /// `d(ωa, E_L)` against the section body; `0` for members.
    pub d: f64,
    /// `2d`.
    pub radius: f64,
    pub phi: ConvexBody,
    pub e: Vec<f64>,
}

impl ConstructionTrace {
    pub fn f(&self) -> &[f64] {
        &self.e[..self.e.len() - 1]
    }

    pub fn l(&self) -> f64 {
        self.e[self.e.len() - 1]
    }
}

/// Traces as CSV `a1,…,omega,d,e_f,e_l` (`e_f1,e_f2` when `n = 2`).
pub fn trace_csv(traces: &[ConstructionTrace]) -> String {
    let Some(first) = traces.first() else {
        return String::new();
    };
    let m = first.a.len();
    let mut cols: Vec<String> = (1..=m).map(|i| format!("a{i}")).collect();
    cols.extend(["omega".into(), "d".into()]);
    if m == 2 {
        cols.push("e_f".into());
    } else {
        cols.extend((1..m).map(|i| format!("e_f{i}")));
    }
    cols.push("e_l".into());
    let mut s = cols.join(",");
    s.push('\n');
    for tr in traces {
        let row: Vec<String> = tr.a.iter().chain([&tr.omega, &tr.d]).chain(tr.e.iter()).map(|v| fmt_num(*v)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

type CacheKey = (u64, Vec<u64>);

/// The constructed triple `(𝔹, f, l)` of a Hamiltonian satisfying (BLC).
pub struct Representation {
    h: HamiltonianModel,
    l: LagrangianModel,
    opts: RepOptions,
    quad: SphereQuadrature,
    // model supplying ω and the section windows, when shared with another
    frame: Option<(HamiltonianModel, LagrangianModel)>,
    cache: Mutex<HashMap<CacheKey, Arc<EpigraphSection>>>,
}

impl std::fmt::Debug for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Representation").field("h", &self.h.name).field("opts", &self.opts).finish()
    }
}

impl Representation {
    pub fn new(h: &HamiltonianModel, l: &LagrangianModel, opts: RepOptions) -> Result<Self> {
        if h.n != l.n {
            return Err(Error::Dimension { expected: h.n, got: l.n });
        }
        if !l.has_lambda() {
            return Err(Error::BlcRequired(format!("{} carries no upper bound λ", l.name)));
        }
        Ok(Self {
            h: h.clone(),
            l: l.clone(),
            opts,
            quad: SphereQuadrature::default_for(h.n + 1)?,
            frame: None,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Like [`new`](Self::new) but with `ω` and the section windows taken
    /// from `frame`, so that members of a family are built on common
    /// parameters.
    pub fn with_frame(
        h: &HamiltonianModel,
        l: &LagrangianModel,
        opts: RepOptions,
        frame: (&HamiltonianModel, &LagrangianModel),
    ) -> Result<Self> {
        if frame.0.n != h.n || frame.1.n != h.n {
            return Err(Error::Dimension { expected: h.n, got: frame.0.n });
        }
        let mut r = Self::new(h, l, opts)?;
        r.frame = Some((frame.0.clone(), frame.1.clone()));
        Ok(r)
    }

    pub fn hamiltonian(&self) -> &HamiltonianModel {
        &self.h
    }

    pub fn lagrangian(&self) -> &LagrangianModel {
        &self.l
    }

    pub fn options(&self) -> RepOptions {
        self.opts
    }

    /// State dimension `n`; controls live in `ℝ^{n+1}`.
    pub fn n(&self) -> usize {
        self.h.n
    }

    pub fn omega(&self, t: f64, x: &[f64]) -> Result<f64> {
        match &self.frame {
            Some((fh, fl)) => omega_value(fh, fl, t, x),
            None => omega_value(&self.h, &self.l, t, x),
        }
    }

    /// Cached epigraph section at `(t,x)`.
    pub fn section(&self, t: f64, x: &[f64]) -> Result<Arc<EpigraphSection>> {
        let t = if self.h.autonomous { 0.0 } else { t };
        let key = (t.to_bits(), x.iter().map(|c| (c + 0.0).to_bits()).collect());
        if let Some(s) = self.cache.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(match &self.frame {
            None => EpigraphSection::new(
                &self.h,
                &self.l,
                t,
                x,
                SectionOptions { dom_nodes: self.opts.dom_nodes, window: None },
            )?,
            Some((fh, fl)) => {
                let (w, o) = default_window(fh, fl, t, x)?;
                EpigraphSection::new(
                    &self.h,
                    &self.l,
                    t,
                    x,
                    SectionOptions { dom_nodes: self.opts.dom_nodes, window: Some(w) },
                )?
                .with_omega(o)
            }
        });
        let mut c = self.cache.lock().unwrap();
        if c.len() >= CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, s.clone());
        Ok(s)
    }

    /// Full trace of `e(t,x,a)`.
    pub fn construct(&self, t: f64, x: &[f64], a: &[f64]) -> Result<ConstructionTrace> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::Dimension { expected: n, got: x.len() });
        }
        if a.len() != n + 1 {
            return Err(Error::Dimension { expected: n + 1, got: a.len() });
        }
        if !(norm(a) <= 1.0 + 1e-12) {
            return Err(Error::Input(format!("control {a:?} outside the unit ball")));
        }
        let s = self.section(t, x)?;
        let w = s.omega().expect("sections of a representation carry ω");
        let z: Vec<f64> = a.iter().map(|c| w * c).collect();
        let trace = |d: f64, phi: ConvexBody, e: Vec<f64>| ConstructionTrace {
            t,
            x: x.to_vec(),
            a: a.to_vec(),
            omega: w,
            center: z.clone(),
            d,
            radius: 2.0 * d,
            phi,
            e,
        };
        if s.member(&z)? {
            return Ok(trace(0.0, ConvexBody::singleton(&z)?, z.clone()));
        }
        let body = s.to_body();
        let (_, d) = body.project(&z)?;
        if d <= SINGLETON_EPS {
            return Ok(trace(d, ConvexBody::singleton(&z)?, z.clone()));
        }
        let cap = s.window().eta_cap;
        if z[n] + 2.0 * d > cap {
            return Err(Error::Invariant(format!(
                "localization ball around {z:?} (radius {}) reaches the cap {cap}",
                2.0 * d
            )));
        }
        let phi = ball_intersect_p(&z, body, self.opts.ball)?;
        let e = steiner(&phi, self.opts.steiner, &self.quad)?;
        Ok(trace(d, phi, e))
    }

    /// `e(t,x,a) = (f(t,x,a), l(t,x,a))`.
    pub fn e(&self, t: f64, x: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        Ok(self.construct(t, x, a)?.e)
    }

    pub fn f(&self, t: f64, x: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        let mut e = self.e(t, x, a)?;
        e.pop();
        Ok(e)
    }

    pub fn l(&self, t: f64, x: &[f64], a: &[f64]) -> Result<f64> {
        Ok(*self.e(t, x, a)?.last().unwrap())
    }

    /// Controls `a = (v, L(v))/ω` over the dom nodes with `|(v, L(v))| ≤ ω`.
    pub fn graph_controls(&self, t: f64, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let s = self.section(t, x)?;
        let w = s.omega().expect("sections of a representation carry ω");
        Ok(s.samples()
            .filter_map(|(v, y)| {
                let mut a: Vec<f64> = v.iter().map(|c| c / w).collect();
                a.push(y / w);
                (norm(&a) <= 1.0).then_some(a)
            })
            .collect())
    }
}

/// Coherence of one trace: `e ∈ Φ`, `Φ ⊆ G` and `radius = 2d`. Returns the
/// worst geometric defect.
pub fn trace_defect(tr: &ConstructionTrace) -> Result<f64> {
    let mut worst = tr.phi.distance(&tr.e)?;
    for v in tr.phi.iter() {
        worst = worst.max(dist(v, &tr.center) - tr.radius);
    }
    if tr.radius != 2.0 * tr.d {
        worst = f64::INFINITY;
    }
    Ok(worst.max(0.0))
}

#[cfg(test)]
mod tests;
