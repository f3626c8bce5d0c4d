//! Hamiltonian and Lagrangian models, the example catalog, and checkers for
//! the structural conditions on `H`, `L` and the epigraph map.

mod catalog;
mod checks;
mod plan;
mod sampled;
mod triples;

pub use catalog::{catalog, find_example, ExampleCatalogEntry};
pub use checks::{
    check_blc, check_h1_h4, check_hlc, check_llc_elc, cross_conjugacy, hamiltonian_slice, BlcOptions, CrossConjugacy,
    CrossConjugacyOptions, BLC_FILTRATION_STEPS, BLC_THRESHOLD, LLC_TOL,
};
pub use plan::SamplePlan;
pub use sampled::SampledHamiltonian;
pub use triples::{
    AbsFamilyTriple, ControlSet, ControlTriple, Ex1GraphicalTriple, Ex1Triple, Ex2GraphicalTriple, Ex2Triple,
};

use std::fmt;
use std::sync::Arc;

use crate::conjugate::ExtReal;
use crate::geometry::vector::{dist, norm};

/// Slack used for closed-domain membership.
pub const DOM_SLACK: f64 = 1e-12;

pub type HEval = dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync;
pub type TEval = dyn Fn(f64) -> f64 + Send + Sync;
pub type KEval = dyn Fn(f64, f64) -> f64 + Send + Sync;
pub type TxEval = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;
pub type DomEval = dyn Fn(f64, &[f64]) -> Domain + Send + Sync;

/// `H(t,x,p)` with the data of the growth and local Lipschitz conditions.
#[derive(Clone)]
pub struct HamiltonianModel {
    pub name: String,
    /// State dimension `n`.
    pub n: usize,
    h: Arc<HEval>,
    c: Arc<TEval>,
    k: Arc<KEval>,
    /// Horizon `T`; time samples live in `[0, T]`.
    pub horizon: f64,
    /// `H`, `λ` and `c` are jointly continuous.
    pub continuous: bool,
    /// No dependence on `t`.
    pub autonomous: bool,
}

impl fmt::Debug for HamiltonianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianModel").field("name", &self.name).field("n", &self.n).finish()
    }
}

impl HamiltonianModel {
    /// `c` is the growth coefficient `c(t)`; `k(R, t)` the local Lipschitz modulus.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        h: impl Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync + 'static,
        c: impl Fn(f64) -> f64 + Send + Sync + 'static,
        k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            n,
            h: Arc::new(h),
            c: Arc::new(c),
            k: Arc::new(k),
            horizon: 1.0,
            continuous: true,
            autonomous: true,
        }
    }

    pub fn with_flags(mut self, continuous: bool, autonomous: bool) -> Self {
        self.continuous = continuous;
        self.autonomous = autonomous;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    #[inline]
    pub fn eval(&self, t: f64, x: &[f64], p: &[f64]) -> f64 {
        (self.h)(t, x, p)
    }

    /// `c(t)`.
    #[inline]
    pub fn growth(&self, t: f64) -> f64 {
        (self.c)(t)
    }

    /// `k_R(t)`.
    #[inline]
    pub fn modulus(&self, r: f64, t: f64) -> f64 {
        (self.k)(r, t)
    }

    /// Adds `rho(t,x)` to `H`, with a new modulus.
    pub fn shifted(
        &self,
        name: impl Into<String>,
        rho: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let base = self.h.clone();
        Self {
            name: name.into(),
            h: Arc::new(move |t, x, p| base(t, x, p) + rho(t, x)),
            k: Arc::new(k),
            ..self.clone()
        }
    }
}

/// Effective domain of `L(t,x,·)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Product of intervals `[lo_i, hi_i]` (open when `open`).
    Box { lo: Vec<f64>, hi: Vec<f64>, open: bool },
    /// Euclidean ball (open when `open`).
    Ball { center: Vec<f64>, radius: f64, open: bool },
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::Box { lo: vec![lo], hi: vec![hi], open: false }
    }

    pub fn open_interval(lo: f64, hi: f64) -> Self {
        Self::Box { lo: vec![lo], hi: vec![hi], open: true }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box { lo, .. } => lo.len(),
            Self::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_open(&self) -> bool {
        match self {
            Self::Box { open, .. } | Self::Ball { open, .. } => *open,
        }
    }

    /// A single point (closed and degenerate).
    pub fn is_point(&self) -> bool {
        match self {
            Self::Box { lo, hi, .. } => lo.iter().zip(hi).all(|(a, b)| a == b),
            Self::Ball { radius, .. } => *radius == 0.0,
        }
    }

    /// Membership; closed domains accept points within `slack`.
    pub fn contains(&self, v: &[f64], slack: f64) -> bool {
        match self {
            Self::Box { lo, hi, open } => v.iter().zip(lo.iter().zip(hi)).all(|(x, (a, b))| {
                if *open {
                    x > a && x < b
                } else {
                    *x >= a - slack && *x <= b + slack
                }
            }),
            Self::Ball { center, radius, open } => {
                let d = dist(v, center);
                if *open {
                    d < *radius
                } else {
                    d <= radius + slack
                }
            }
        }
    }

    /// Nearest point of the closed domain.
    pub fn clamp(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Self::Box { lo, hi, .. } => v.iter().zip(lo.iter().zip(hi)).map(|(x, (a, b))| x.clamp(*a, *b)).collect(),
            Self::Ball { center, radius, .. } => {
                let d = dist(v, center);
                if d <= *radius {
                    v.to_vec()
                } else {
                    center.iter().zip(v).map(|(c, x)| c + (x - c) * radius / d).collect()
                }
            }
        }
    }

    /// `‖dom‖ = sup |v|`.
    pub fn norm_bound(&self) -> f64 {
        match self {
            Self::Box { lo, hi, .. } => {
                lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt()
            }
            Self::Ball { center, radius, .. } => norm(center) + radius,
        }
    }

    /// Largest extent along a coordinate axis (the diameter for balls).
    pub fn width(&self) -> f64 {
        match self {
            Self::Box { lo, hi, .. } => lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0, f64::max),
            Self::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Sample nodes with `per_axis` nodes per axis: tensor nodes for boxes,
    /// rings for balls. `chebyshev` clusters nodes near the boundary. Open
    /// domains are sampled strictly inside, `2^−40·width` from the boundary.
    pub fn nodes(&self, per_axis: usize, chebyshev: bool) -> Vec<Vec<f64>> {
        let m = per_axis.max(2);
        let s = |i: usize| {
            let u = i as f64 / (m - 1) as f64;
            if chebyshev {
                -(std::f64::consts::PI * u).cos()
            } else {
                2.0 * u - 1.0
            }
        };
        let off = if self.is_open() { self.width() * 2f64.powi(-40) } else { 0.0 };
        match self {
            Self::Box { lo, hi, .. } => {
                let axes: Vec<Vec<f64>> = lo
                    .iter()
                    .zip(hi)
                    .map(|(a, b)| {
                        if a == b {
                            return vec![*a];
                        }
                        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a) - off);
                        let mut v: Vec<f64> = (0..m).map(|i| mid + half * s(i)).collect();
                        v[0] = mid - half;
                        v[m - 1] = mid + half;
                        v
                    })
                    .collect();
                let mut out = vec![Vec::new()];
                for ax in &axes {
                    out = out
                        .into_iter()
                        .flat_map(|p: Vec<f64>| {
                            ax.iter().map(move |c| {
                                let mut q = p.clone();
                                q.push(*c);
                                q
                            })
                        })
                        .collect();
                }
                out
            }
            Self::Ball { center, radius, .. } => {
                let r = radius - off;
                if r <= 0.0 {
                    return vec![center.clone()];
                }
                if center.len() == 1 {
                    return (0..m).map(|i| vec![center[0] + r * s(i)]).collect();
                }
                let rings = m.div_ceil(2);
                let mut out = vec![center.clone()];
                for k in 1..rings {
                    let u = k as f64 / (rings - 1) as f64;
                    let rho = if chebyshev { r * (0.5 * std::f64::consts::PI * u).sin() } else { r * u };
                    let na = 4 * m;
                    for j in 0..na {
                        let th = std::f64::consts::TAU * j as f64 / na as f64;
                        out.push(vec![center[0] + rho * th.cos(), center[1] + rho * th.sin()]);
                    }
                }
                out
            }
        }
    }

    /// Boundary points along a fixed fan of directions from the center,
    /// paired with the center: `(center, boundary)`.
    pub fn boundary_rays(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let dirs: Vec<Vec<f64>> = match self.dim() {
            1 => vec![vec![-1.0], vec![1.0]],
            _ => (0..8)
                .map(|j| {
                    let th = std::f64::consts::PI * j as f64 / 4.0;
                    vec![th.cos(), th.sin()]
                })
                .collect(),
        };
        match self {
            Self::Box { lo, hi, .. } => {
                let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                dirs.into_iter()
                    .map(|d| {
                        // largest s with c + s d in the box
                        let s = d
                            .iter()
                            .zip(lo.iter().zip(hi))
                            .zip(&c)
                            .filter(|((di, _), _)| **di != 0.0)
                            .map(|((di, (a, b)), ci)| if *di > 0.0 { (b - ci) / di } else { (a - ci) / di })
                            .fold(f64::INFINITY, f64::min);
                        let s = if s.is_finite() { s } else { 0.0 };
                        let b = c.iter().zip(&d).map(|(ci, di)| ci + s * di).collect();
                        (c.clone(), b)
                    })
                    .collect()
            }
            Self::Ball { center, radius, .. } => dirs
                .into_iter()
                .map(|d| (center.clone(), center.iter().zip(&d).map(|(c, di)| c + radius * di).collect()))
                .collect(),
        }
    }
}

/// Where a Lagrangian comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    GridConjugate,
}

/// `L(t,x,v)` with its domain descriptor and optional upper bound `λ(t,x)`.
#[derive(Clone)]
pub struct LagrangianModel {
    pub name: String,
    pub n: usize,
    l: Arc<HEval>,
    dom: Arc<DomEval>,
    lambda: Option<Arc<TxEval>>,
    pub provenance: Provenance,
}

impl fmt::Debug for LagrangianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagrangianModel")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("has_lambda", &self.lambda.is_some())
            .finish()
    }
}

impl LagrangianModel {
    /// `l` is only called at points of the closed domain.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        l: impl Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync + 'static,
        dom: impl Fn(f64, &[f64]) -> Domain + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            n,
            l: Arc::new(l),
            dom: Arc::new(dom),
            lambda: None,
            provenance: Provenance::ClosedForm,
        }
    }

    pub fn with_lambda(mut self, lambda: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.lambda = Some(Arc::new(lambda));
        self
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    pub fn domain(&self, t: f64, x: &[f64]) -> Domain {
        (self.dom)(t, x)
    }

    /// `L(t,x,v)`; `+∞` off the domain. Points within `1e−12` of a closed
    /// domain are evaluated at their projection.
    pub fn eval(&self, t: f64, x: &[f64], v: &[f64]) -> ExtReal {
        let d = self.domain(t, x);
        self.eval_in(&d, t, x, v)
    }

    /// As [`eval`](Self::eval) with a precomputed domain.
    pub fn eval_in(&self, d: &Domain, t: f64, x: &[f64], v: &[f64]) -> ExtReal {
        if !d.contains(v, DOM_SLACK) {
            return ExtReal::PosInf;
        }
        let y = if d.is_open() { (self.l)(t, x, v) } else { (self.l)(t, x, &d.clamp(v)) };
        if y.is_nan() || y == f64::NEG_INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::from_f64(y).unwrap_or(ExtReal::PosInf)
        }
    }

    pub fn has_lambda(&self) -> bool {
        self.lambda.is_some()
    }

    /// `λ(t,x)` when (BLC) data is attached.
    pub fn lambda(&self, t: f64, x: &[f64]) -> Option<f64> {
        self.lambda.as_ref().map(|f| f(t, x))
    }

    /// Subtracts `rho(t,x)` from `L` (the Lagrangian of `H + ρ`).
    pub fn shifted(
        &self,
        name: impl Into<String>,
        rho: impl Fn(f64, &[f64]) -> f64 + Send + Sync + Clone + 'static,
        lambda_shift: bool,
    ) -> Self {
        let base = self.l.clone();
        let r2 = rho.clone();
        let lambda = self.lambda.clone().map(|lam| {
            let f: Arc<TxEval> =
                if lambda_shift { Arc::new(move |t: f64, x: &[f64]| lam(t, x) - r2(t, x)) } else { lam };
            f
        });
        Self { name: name.into(), l: Arc::new(move |t, x, v| base(t, x, v) - rho(t, x)), lambda, ..self.clone() }
    }
}
