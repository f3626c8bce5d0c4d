//! Windowed epigraph sections `E_L(t,x) = {(v,η) : L(t,x,v) ≤ η}`.
//!
//! A section samples `L(t,x,·)` on dom nodes (Chebyshev–Lobatto in each
//! direction, so nodes cluster where graphs like `−√(1−v²)` are steep) and
//! truncates the epigraph at a cap `η_cap`. Membership is exact; distance is
//! computed slice-wise against vertical rays with a local refinement.

use crate::conjugate::slope_window;
use crate::error::{Error, Result};
use crate::geometry::vector::{dist, norm};
use crate::geometry::{hausdorff, ConvexBody};
use crate::io::fmt_num;
use crate::models::{Domain, HamiltonianModel, LagrangianModel};

/// Membership slack on `η`.
pub const MEMBER_SLACK: f64 = 1e-12;

/// Default dom nodes per axis: 401 for `n = 1`, 13 for `n = 2`.
pub fn default_dom_nodes(n: usize) -> usize {
    if n == 1 {
        401
    } else {
        13
    }
}

/// `ω(t,x) = |λ(t,x)| + |H(t,x,0)| + c(t)(1+|x|) + 1`.
pub(crate) fn omega_value(h: &HamiltonianModel, l: &LagrangianModel, t: f64, x: &[f64]) -> Result<f64> {
    let lam = l.lambda(t, x).ok_or_else(|| Error::BlcRequired(format!("{} carries no upper bound λ", l.name)))?;
    let h0 = h.eval(t, x, &vec![0.0; h.n]);
    Ok(lam.abs() + h0.abs() + h.growth(t) * (1.0 + norm(x)) + 1.0)
}

/// Box `[−V,V]^n × [η_lo, η_cap]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub v: f64,
    pub eta_lo: f64,
    pub eta_cap: f64,
}

impl Window {
    /// Smallest window containing both.
    pub fn join(&self, o: &Window) -> Window {
        Window { v: self.v.max(o.v), eta_lo: self.eta_lo.min(o.eta_lo), eta_cap: self.eta_cap.max(o.eta_cap) }
    }

    /// Query points may sit above the cap: epigraphs are closed upward, so
    /// membership and distance there do not depend on the truncation.
    pub fn contains(&self, z: &[f64]) -> bool {
        let (v, eta) = z.split_at(z.len() - 1);
        let vt = self.v * (1.0 + 1e-12) + 1e-12;
        v.iter().all(|c| c.abs() <= vt) && eta[0] >= self.eta_lo
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SectionOptions {
    /// Dom nodes per axis; `None` uses [`default_dom_nodes`].
    pub dom_nodes: Option<usize>,
    /// Explicit window. Required when `L` carries no `λ`, since the default
    /// cap is built from `ω`.
    pub window: Option<Window>,
}

/// The default window at `(t,x)` and `ω(t,x)`.
pub fn default_window(h: &HamiltonianModel, l: &LagrangianModel, t: f64, x: &[f64]) -> Result<(Window, f64)> {
    let w = omega_value(h, l, t, x)?;
    let (_, v5) = slope_window(h.growth(t), norm(x));
    Ok((Window { v: v5.max(w), eta_lo: -(w + 1.0), eta_cap: w + 4.0 * (1.0 + w) }, w))
}

/// `E_L(t,x)` inside a window.
#[derive(Clone, Debug)]
pub struct EpigraphSection {
    l: LagrangianModel,
    t: f64,
    x: Vec<f64>,
    dom: Domain,
    window: Window,
    omega: Option<f64>,
    nodes: Vec<Vec<f64>>,
    values: Vec<f64>,
    body: ConvexBody,
    sag: f64,
    per: usize,
}

impl EpigraphSection {
    /// Section with the default window
    /// `V = max(1.2c(1+|x|), ω)`, `η_lo = −(ω+1)`, `η_cap = ω + 4(1+ω)`.
    pub fn new(h: &HamiltonianModel, l: &LagrangianModel, t: f64, x: &[f64], opts: SectionOptions) -> Result<Self> {
        if h.n != l.n || x.len() != l.n {
            return Err(Error::Dimension { expected: l.n, got: x.len() });
        }
        let (window, omega) = match opts.window {
            Some(w) => (w, omega_value(h, l, t, x).ok()),
            None => {
                let (w, o) = default_window(h, l, t, x)?;
                (w, Some(o))
            }
        };
        let dom = l.domain(t, x);
        let per = opts.dom_nodes.unwrap_or_else(|| default_dom_nodes(l.n));
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for v in dom.nodes(per, true) {
            if v.iter().any(|c| c.abs() > window.v) {
                continue;
            }
            let y = l.eval_in(&dom, t, x, &v).to_f64();
            if y.is_finite() && y <= window.eta_cap {
                nodes.push(v);
                values.push(y);
            }
        }
        if nodes.is_empty() {
            return Err(Error::Improper(format!("empty domain of {} in the window at t={t}, x={x:?}", l.name)));
        }
        let n = l.n;
        let mut pts = Vec::with_capacity(nodes.len() * 2 * (n + 1));
        for (v, y) in nodes.iter().zip(&values) {
            pts.extend_from_slice(v);
            pts.push(y.max(window.eta_lo));
            pts.extend_from_slice(v);
            pts.push(window.eta_cap);
        }
        let body = ConvexBody::from_points(n + 1, &pts)?;
        let mut sag: f64 = 0.0;
        for i in 1..nodes.len() {
            let mid: Vec<f64> = nodes[i - 1].iter().zip(&nodes[i]).map(|(a, b)| 0.5 * (a + b)).collect();
            if let Some(lm) = l.eval_in(&dom, t, x, &mid).finite() {
                // gap measured perpendicular to the chord
                let run = dist(&nodes[i - 1], &nodes[i]);
                let rise = values[i] - values[i - 1];
                let gap = 0.5 * (values[i - 1] + values[i]) - lm;
                sag = sag.max(gap * run / run.hypot(rise).max(f64::MIN_POSITIVE));
            }
        }
        Ok(Self { l: l.clone(), t, x: x.to_vec(), dom, window, omega, nodes, values, body, sag, per })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.l.n
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn domain(&self) -> &Domain {
        &self.dom
    }

    /// Replaces the scaling radius.
    pub fn with_omega(mut self, w: f64) -> Self {
        self.omega = Some(w);
        self
    }

    /// `ω(t,x)` when `λ` is available.
    pub fn omega(&self) -> Option<f64> {
        self.omega
    }

    /// Dom nodes and the values of `L` there.
    pub fn samples(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.iter().map(|v| v.as_slice()).zip(self.values.iter().copied())
    }

    pub fn lagrangian(&self, v: &[f64]) -> f64 {
        self.l.eval_in(&self.dom, self.t, &self.x, v).to_f64()
    }

    /// Largest distance from the graph at a chord midpoint to the chord of
    /// adjacent nodes; the hull error scale of [`to_body`](Self::to_body).
    pub fn hull_sag(&self) -> f64 {
        self.sag
    }

    /// Largest spacing between consecutive dom nodes.
    pub fn node_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| dist(&w[0], &w[1])).fold(0.0, f64::max)
    }

    fn check_window(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.n() + 1 {
            return Err(Error::Dimension { expected: self.n() + 1, got: z.len() });
        }
        if !self.window.contains(z) {
            return Err(Error::Window(format!("{z:?} outside {:?}", self.window)));
        }
        Ok(())
    }

    /// `L(t,x,v) ≤ η + 1e−12` with `v ∈ dom`.
    pub fn member(&self, z: &[f64]) -> Result<bool> {
        self.check_window(z)?;
        let (v, eta) = z.split_at(self.n());
        Ok(self.lagrangian(v) <= eta[0] + MEMBER_SLACK)
    }

    fn ray_dist(&self, z: &[f64], v: &[f64]) -> f64 {
        let (zv, eta) = z.split_at(self.n());
        let lv = self.lagrangian(v);
        if !lv.is_finite() {
            return f64::INFINITY;
        }
        let up = (lv.max(self.window.eta_lo) - eta[0]).max(0.0);
        let dv = dist(zv, v);
        dv.hypot(up)
    }

    /// `d(z, E_L(t,x))` and a nearest point `(v*, max(L(v*), η_z))`.
    pub fn nearest(&self, z: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_window(z)?;
        if self.member(z)? {
            return Ok((z.to_vec(), 0.0));
        }
        let (bi, bd) = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, v)| (i, self.ray_dist(z, v)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let mut best = (self.nodes[bi].clone(), bd);
        if self.n() == 1 && self.nodes.len() > 1 {
            // the ray distance is convex in v: golden section on the cells around the best node
            let lo = self.nodes[bi.saturating_sub(1)][0];
            let hi = self.nodes[(bi + 1).min(self.nodes.len() - 1)][0];
            let (mut a, mut b) = (lo, hi);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let f = |v: f64| self.ray_dist(z, &[v]);
            let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
            let (mut fc, mut fd) = (f(c), f(d));
            for _ in 0..100 {
                if fc <= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = f(d);
                }
            }
            for (v, fv) in [(c, fc), (d, fd)] {
                if fv < best.1 {
                    best = (vec![v], fv);
                }
            }
        } else if self.n() == 2 {
            // compass search around the best node
            let mut step = self.node_spacing().max(1e-6);
            while step > 1e-12 {
                let mut moved = false;
                for dir in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
                    let cand = vec![best.0[0] + step * dir[0], best.0[1] + step * dir[1]];
                    let fv = self.ray_dist(z, &cand);
                    if fv < best.1 {
                        best = (cand, fv);
                        moved = true;
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
        }
        let eta = self.lagrangian(&best.0).max(self.window.eta_lo).max(z[self.n()]);
        let mut p = best.0;
        p.push(eta);
        Ok((p, best.1))
    }

    /// `d(z, E_L(t,x))`.
    pub fn distance(&self, z: &[f64]) -> Result<f64> {
        Ok(self.nearest(z)?.1)
    }

    /// Hull of `(v, L(v))` and `(v, η_cap)` over the dom nodes.
    pub fn to_body(&self) -> &ConvexBody {
        &self.body
    }

    /// Boundary samples as CSV `v,eta` (`v1,v2,eta` for `n = 2`).
    pub fn boundary_csv(&self) -> String {
        let mut s = String::from(if self.n() == 1 { "v,eta\n" } else { "v1,v2,eta\n" });
        for (v, y) in self.samples() {
            for c in v {
                s.push_str(&fmt_num(*c));
                s.push(',');
            }
            s.push_str(&fmt_num(y));
            s.push('\n');
        }
        s
    }
}

/// Hausdorff distance between the truncated bodies of two sections, rebuilt
/// on their joint window when the windows differ.
pub fn truncated_hausdorff(h: &HamiltonianModel, s1: &EpigraphSection, s2: &EpigraphSection) -> Result<f64> {
    if s1.window == s2.window {
        return hausdorff(s1.to_body(), s2.to_body());
    }
    let w = s1.window.join(&s2.window);
    let rebuild = |s: &EpigraphSection| {
        EpigraphSection::new(h, &s.l, s.t, &s.x, SectionOptions { dom_nodes: Some(s.per), window: Some(w) })
    };
    hausdorff(rebuild(s1)?.to_body(), rebuild(s2)?.to_body())
}
