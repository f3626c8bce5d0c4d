//! Bolza problems in one state dimension on a time × state grid.
//!
//! The variational problem minimizes `φ₀(x(t₀)) + g(x(T)) + ∫ L(t,x,ẋ)` and the
//! control problem `φ₀(x(t₀)) + g(x(T)) + ∫ l(t,x,a)` under `ẋ = f(t,x,a)`.
//! Both are solved by backward dynamic programming with explicit Euler steps,
//! left-endpoint running costs and linear interpolation in the state, where
//! any `+∞` neighbour makes the interpolant `+∞`.

use std::str::FromStr;

use rayon::prelude::*;

use crate::conjugate::{Grid, Grid1, GridFunction};
use crate::error::{input_err, Error, Result};
use crate::io::fmt_num;
use crate::models::{HamiltonianModel, LagrangianModel};
use crate::report::CheckRecord;
use crate::representation::Representation;

/// A one-sided endpoint cost: `φ₀` on the initial state or `g` on the final.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndCost {
    /// Identically zero.
    Free,
    /// `ψ_{{x₀}}`: `0` at `x₀`, `+∞` elsewhere.
    Fixed(f64),
    /// `|x − c|`.
    Abs(f64),
}

impl EndCost {
    /// Value at a grid node; `Fixed` matches within `1e−9·step`.
    pub fn at_node(&self, x: f64, step: f64) -> f64 {
        match self {
            Self::Free => 0.0,
            Self::Fixed(x0) => {
                if (x - x0).abs() <= 1e-9 * step {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::Abs(c) => (x - c).abs(),
        }
    }
}

impl FromStr for EndCost {
    type Err = Error;
    /// `free`, `fixed:<x0>`, `abs` or `abs:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad number `{v}`")));
        match s.split_once(':') {
            None if s == "free" => Ok(Self::Free),
            None if s == "abs" => Ok(Self::Abs(0.0)),
            Some(("fixed", v)) => Ok(Self::Fixed(num(v)?)),
            Some(("abs", v)) => Ok(Self::Abs(num(v)?)),
            _ => input_err(format!("unknown endpoint cost `{s}`")),
        }
    }
}

impl std::fmt::Display for EndCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Free => write!(f, "free"),
            Self::Fixed(x) => write!(f, "fixed:{x}"),
            Self::Abs(c) if *c == 0.0 => write!(f, "abs"),
            Self::Abs(c) => write!(f, "abs:{c}"),
        }
    }
}

/// `(M + ∫c)·exp(∫c)` with the trapezoid rule on samples `c` at spacing `dt`.
pub fn gronwall_radius(m: f64, c: &[f64], dt: f64) -> Result<f64> {
    if c.iter().any(|v| !(*v >= 0.0)) {
        return input_err("growth samples must be nonnegative");
    }
    if !(m >= 0.0) {
        return input_err("M must be nonnegative");
    }
    let int = if c.len() < 2 { 0.0 } else { dt * (c.iter().sum::<f64>() - 0.5 * (c[0] + c[c.len() - 1])) };
    Ok((m + int) * int.exp())
}

/// Problem data: horizon `[t0, t1]` with `nt` steps, state grid of `nx` nodes
/// on `[−x_radius, x_radius]`, endpoint costs `φ₀` and `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BolzaSpec {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
    pub x_radius: f64,
    pub nx: usize,
    pub start: EndCost,
    pub terminal: EndCost,
}

impl BolzaSpec {
    /// `nt + 1` nodes on `[t0, t1]`; a single node when `t0 = t1`.
    pub fn time_grid(&self) -> Result<Grid1> {
        if self.t0 == self.t1 {
            return Ok(Grid1 { lo: self.t0, step: 0.0, len: 1 });
        }
        if self.nt == 0 {
            return input_err("nt must be positive");
        }
        Grid1::linspace(self.t0, self.t1, self.nt + 1)
    }

    pub fn state_grid(&self) -> Result<Grid1> {
        Grid1::linspace(-self.x_radius, self.x_radius, self.nx)
    }

    pub fn ht(&self) -> f64 {
        if self.t0 == self.t1 {
            return 0.0;
        }
        (self.t1 - self.t0) / self.nt as f64
    }

    pub fn hx(&self) -> f64 {
        2.0 * self.x_radius / (self.nx - 1) as f64
    }

    /// Largest `min{|z|,|x|}` over grid nodes of `dom φ`.
    pub fn m_bound(&self) -> Result<f64> {
        let xs = self.state_grid()?;
        let dom_max = |c: &EndCost| {
            xs.nodes()
                .into_iter()
                .filter(|x| c.at_node(*x, xs.step).is_finite())
                .map(f64::abs)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let (a, b) = (dom_max(&self.start), dom_max(&self.terminal));
        if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
            return Err(Error::Infeasible("endpoint cost has no finite grid node".into()));
        }
        Ok(a.min(b))
    }

    /// Gronwall radius for `h`; fails when the state grid is smaller.
    pub fn validate(&self, h: &HamiltonianModel) -> Result<f64> {
        if self.nx < 3 || !(self.x_radius > 0.0) || !(self.t1 > self.t0) {
            return input_err("need nx ≥ 3, x_radius > 0 and t1 > t0");
        }
        let ts = self.time_grid()?;
        let c: Vec<f64> = ts.nodes().iter().map(|t| h.growth(*t)).collect();
        let r = gronwall_radius(self.m_bound()?, &c, ts.step)?;
        if self.x_radius < r {
            return input_err(format!("state grid radius {} below the Gronwall radius {r}", self.x_radius));
        }
        Ok(r)
    }

    /// `−D − R∫k_R − ∫|H(t,0,0)|`, with `D = max(0, −min φ)` over grid nodes in `B_R`.
    pub fn lower_bound(&self, h: &HamiltonianModel) -> Result<f64> {
        let r = self.validate(h)?;
        let xs = self.state_grid()?;
        let ts = self.time_grid()?;
        let inside: Vec<f64> = xs.nodes().into_iter().filter(|x| x.abs() <= r).collect();
        let low = |c: &EndCost| inside.iter().map(|x| c.at_node(*x, xs.step)).fold(f64::INFINITY, f64::min);
        let d = (-(low(&self.start) + low(&self.terminal))).max(0.0);
        let trap = |f: &dyn Fn(f64) -> f64| {
            let v: Vec<f64> = ts.nodes().iter().map(|t| f(*t)).collect();
            ts.step * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
        };
        let zero = [0.0];
        Ok(-d - r * trap(&|t| h.modulus(r, t)) - trap(&|t| h.eval(t, &zero, &zero).abs()))
    }
}

/// `V(t_k, x_j)` on the time × state grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTable {
    pub ts: Grid1,
    pub xs: Grid1,
    /// Row-major in time.
    values: Vec<f64>,
}

impl ValueTable {
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.xs.len + j]
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        &self.values[k * self.xs.len..(k + 1) * self.xs.len]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// CSV `t,x,V` with `inf` for `+∞`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,V\n");
        for k in 0..self.ts.len {
            for j in 0..self.xs.len {
                s.push_str(&format!(
                    "{},{},{}\n",
                    fmt_num(self.ts.node(k)),
                    fmt_num(self.xs.node(j)),
                    fmt_num(self.get(k, j))
                ));
            }
        }
        s
    }

    /// The table as a grid function on `(t, x)`; `None` if it is identically `+∞`.
    pub fn to_grid_function(&self) -> Option<GridFunction> {
        let vals =
            self.values.iter().map(|v| crate::conjugate::ExtReal::from_f64(*v).ok()).collect::<Option<Vec<_>>>()?;
        GridFunction::new(Grid::D2(self.ts, self.xs), vals).ok()
    }

    /// Largest `|ΔV|/h_x` between adjacent finite entries of slice `k`.
    pub fn lipschitz_x(&self, k: usize) -> f64 {
        self.slice(k)
            .windows(2)
            .filter(|w| w[0].is_finite() && w[1].is_finite())
            .map(|w| (w[1] - w[0]).abs() / self.xs.step)
            .fold(0.0, f64::max)
    }
}

/// Linear interpolation of a slice; `+∞` outside the grid or next to `+∞`.
fn interp(xs: &Grid1, slice: &[f64], x: f64) -> f64 {
    let u = (x - xs.lo) / xs.step;
    if !(u >= -1e-9 && u <= (xs.len - 1) as f64 + 1e-9) {
        return f64::INFINITY;
    }
    let u = u.clamp(0.0, (xs.len - 1) as f64);
    let i = (u.floor() as usize).min(xs.len - 2);
    let w = u - i as f64;
    let (a, b) = (slice[i], slice[i + 1]);
    if w == 0.0 {
        return a;
    }
    if w == 1.0 {
        return b;
    }
    if a.is_infinite() || b.is_infinite() {
        return f64::INFINITY;
    }
    a + w * (b - a)
}

/// Candidate moves `(velocity, running cost rate)` at `(t, x)`.
type Moves = Vec<(f64, f64)>;

fn backward(spec: &BolzaSpec, moves: &(dyn Fn(usize, f64) -> Result<Moves> + Sync)) -> Result<ValueTable> {
    let ts = spec.time_grid()?;
    let xs = spec.state_grid()?;
    let ht = spec.ht();
    let mut values = vec![f64::INFINITY; ts.len * xs.len];
    let nk = ts.len - 1;
    for j in 0..xs.len {
        values[nk * xs.len + j] = spec.terminal.at_node(xs.node(j), xs.step);
    }
    for k in (0..nk).rev() {
        let (head, tail) = values.split_at_mut((k + 1) * xs.len);
        let next = &tail[..xs.len];
        let row = &mut head[k * xs.len..];
        row.par_iter_mut().enumerate().try_for_each(|(j, out)| -> Result<()> {
            let x = xs.node(j);
            let mut best = f64::INFINITY;
            for (v, c) in moves(k, x)? {
                let val = ht * c + interp(&xs, next, x + ht * v);
                if val < best {
                    best = val;
                }
            }
            *out = best;
            Ok(())
        })?;
    }
    Ok(ValueTable { ts, xs, values })
}

/// Minimum, optimal grid arc and its moves.
#[derive(Clone, Debug, PartialEq)]
pub struct BolzaSolution {
    pub min: f64,
    /// `(t_k, x_k)`, forward Euler from the best start node.
    pub arc: Vec<(f64, f64)>,
    /// Velocity used on each step (`f(t,x,a)` for the control problem).
    pub velocities: Vec<f64>,
    /// Control used on each step (empty for the variational problem).
    pub controls: Vec<Vec<f64>>,
    pub table: ValueTable,
}

impl BolzaSolution {
    pub fn feasible(&self) -> bool {
        self.min.is_finite()
    }

    /// CSV `t,x` or `t,x,a1,…`.
    pub fn arc_csv(&self) -> String {
        let m = self.controls.first().map_or(0, |a| a.len());
        let mut s = String::from("t,x");
        for i in 1..=m {
            s.push_str(&format!(",a{i}"));
        }
        s.push('\n');
        for (k, (t, x)) in self.arc.iter().enumerate() {
            s.push_str(&format!("{},{}", fmt_num(*t), fmt_num(*x)));
            for i in 0..m {
                let a = self.controls.get(k).map_or(String::new(), |a| fmt_num(a[i]));
                s.push(',');
                s.push_str(&a);
            }
            s.push('\n');
        }
        s
    }
}

fn solve(
    spec: &BolzaSpec,
    table: ValueTable,
    labelled: &dyn Fn(usize, f64) -> Result<Vec<(f64, f64, Vec<f64>)>>,
) -> Result<BolzaSolution> {
    let xs = table.xs;
    let ts = table.ts;
    let (mut best, mut start) = (f64::INFINITY, 0);
    for j in 0..xs.len {
        let v = spec.start.at_node(xs.node(j), xs.step) + table.get(0, j);
        if v < best {
            best = v;
            start = j;
        }
    }
    let mut sol = BolzaSolution { min: best, arc: vec![], velocities: vec![], controls: vec![], table };
    if !best.is_finite() {
        return Ok(sol);
    }
    let ht = spec.ht();
    let mut x = xs.node(start);
    sol.arc.push((ts.node(0), x));
    for k in 0..ts.len - 1 {
        let next = sol.table.slice(k + 1);
        let mut pick: Option<(f64, f64, Vec<f64>)> = None;
        for (v, c, a) in labelled(k, x)? {
            let val = ht * c + interp(&xs, next, x + ht * v);
            if pick.as_ref().map_or(true, |p| val < p.0) {
                pick = Some((val, v, a));
            }
        }
        let Some((_, v, a)) = pick else { break };
        x += ht * v;
        sol.velocities.push(v);
        if !a.is_empty() {
            sol.controls.push(a);
        }
        sol.arc.push((ts.node(k + 1), x));
    }
    Ok(sol)
}

/// Dom nodes per axis used for velocities.
pub const VELOCITY_NODES: usize = 401;

fn velocity_moves(h: &HamiltonianModel, l: &LagrangianModel, t: f64, x: f64) -> Moves {
    let xv = [x];
    let dom = l.domain(t, &xv);
    let vmax = h.growth(t) * (1.0 + x.abs());
    dom.nodes(VELOCITY_NODES, true)
        .into_iter()
        .filter(|v| v[0].abs() <= vmax * (1.0 + 1e-12))
        .filter_map(|v| l.eval_in(&dom, t, &xv, &v).finite().map(|c| (v[0], c)))
        .collect()
}

/// `V` for the variational problem with terminal cost `spec.terminal`.
pub fn value_function_variational(spec: &BolzaSpec, h: &HamiltonianModel, l: &LagrangianModel) -> Result<ValueTable> {
    check_scalar(h)?;
    let ts = spec.time_grid()?;
    backward(spec, &|k, x| Ok(velocity_moves(h, l, ts.node(k), x)))
}

/// Minimum and arc of the variational problem.
pub fn solve_variational(spec: &BolzaSpec, h: &HamiltonianModel, l: &LagrangianModel) -> Result<BolzaSolution> {
    spec.validate(h)?;
    let table = value_function_variational(spec, h, l)?;
    let ts = table.ts;
    let lab = |k: usize, x: f64| -> Result<_> {
        Ok(velocity_moves(h, l, ts.node(k), x).into_iter().map(|(v, c)| (v, c, vec![])).collect())
    };
    solve(spec, table, &lab)
}

fn check_scalar(h: &HamiltonianModel) -> Result<()> {
    if h.n != 1 {
        return input_err("Bolza problems are solved for n = 1 only");
    }
    Ok(())
}

/// Control moves at `(t,x)`: graph controls plus the cloud, `(f, l, a)`.
fn control_moves(rep: &Representation, t: f64, x: f64, cloud: &[Vec<f64>]) -> Result<Vec<(f64, f64, Vec<f64>)>> {
    let xv = [x];
    let mut ctrls = rep.graph_controls(t, &xv)?;
    ctrls.extend_from_slice(cloud);
    ctrls
        .into_iter()
        .map(|a| {
            let e = rep.e(t, &xv, &a)?;
            Ok((e[0], e[1], a))
        })
        .collect()
}

/// Moves precomputed on the grid nodes; `t` is dropped for autonomous models.
struct MoveTable {
    per_node: Vec<Moves>,
    autonomous: bool,
    nx: usize,
    xs: Grid1,
}

impl MoveTable {
    fn build(spec: &BolzaSpec, rep: &Representation, cloud: &[Vec<f64>]) -> Result<Self> {
        let ts = spec.time_grid()?;
        let xs = spec.state_grid()?;
        let autonomous = rep.hamiltonian().autonomous;
        let nk = if autonomous { 1 } else { ts.len - 1 };
        let per_node = (0..nk * xs.len)
            .into_par_iter()
            .map(|i| {
                let (k, j) = (i / xs.len, i % xs.len);
                Ok(control_moves(rep, ts.node(k), xs.node(j), cloud)?.into_iter().map(|(f, l, _)| (f, l)).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { per_node, autonomous, nx: xs.len, xs })
    }

    fn at(&self, k: usize, x: f64) -> Moves {
        let j = ((x - self.xs.lo) / self.xs.step).round() as usize;
        let k = if self.autonomous { 0 } else { k };
        self.per_node[k * self.nx + j].clone()
    }
}

/// `V` for the control problem, minimizing over graph controls and `cloud`
/// at every node.
pub fn value_function_control(spec: &BolzaSpec, rep: &Representation, cloud: &[Vec<f64>]) -> Result<ValueTable> {
    check_scalar(rep.hamiltonian())?;
    let mt = MoveTable::build(spec, rep, cloud)?;
    backward(spec, &|k, x| Ok(mt.at(k, x)))
}

/// Minimum and arc of the control problem.
pub fn solve_control(spec: &BolzaSpec, rep: &Representation, cloud: &[Vec<f64>]) -> Result<BolzaSolution> {
    spec.validate(rep.hamiltonian())?;
    let table = value_function_control(spec, rep, cloud)?;
    let ts = table.ts;
    let lab = |k: usize, x: f64| control_moves(rep, ts.node(k), x, cloud);
    solve(spec, table, &lab)
}

/// Comparison of the two minima at one resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub min_variational: f64,
    pub min_control: f64,
    pub lower_bound: f64,
    pub ht: f64,
    pub hx: f64,
}

impl Reduction {
    pub fn gap(&self) -> f64 {
        if self.min_variational == self.min_control {
            return 0.0;
        }
        (self.min_variational - self.min_control).abs()
    }
}

/// Solves both problems at `spec`.
pub fn reduction(
    spec: &BolzaSpec,
    h: &HamiltonianModel,
    l: &LagrangianModel,
    rep: &Representation,
    cloud: &[Vec<f64>],
) -> Result<Reduction> {
    let v = solve_variational(spec, h, l)?;
    let c = solve_control(spec, rep, cloud)?;
    Ok(Reduction {
        min_variational: v.min,
        min_control: c.min,
        lower_bound: spec.lower_bound(h)?,
        ht: spec.ht(),
        hx: spec.hx(),
    })
}

/// `REDUCTION` (gap within `3(h_t + h_x) + sample_gap`), `LOWER_BOUND` on
/// both minima, and `REFINEMENT` (gap shrinks by `1.5×` from `coarse` to
/// `fine`, or both gaps are at round-off level `1e−12`).
pub fn reduction_records(coarse: &Reduction, fine: &Reduction, sample_gap: f64) -> Vec<CheckRecord> {
    let mut red = CheckRecord::new("REDUCTION", 0.0);
    let mut low = CheckRecord::new("LOWER_BOUND", 0.0);
    for r in [coarse, fine] {
        let arg = || vec![r.ht, r.hx];
        red.observe(r.gap() - 3.0 * (r.ht + r.hx) - sample_gap, arg);
        low.observe(r.lower_bound - r.min_variational.min(r.min_control), arg);
    }
    let mut refine = CheckRecord::new("REFINEMENT", 0.0);
    let floor = 1e-12;
    let v = if coarse.gap() <= floor && fine.gap() <= floor { 0.0 } else { fine.gap() - coarse.gap() / 1.5 };
    refine.observe(v, || vec![coarse.gap(), fine.gap()]);
    vec![red.finish(), low.finish(), refine.finish().with_note(format!("gaps {} -> {}", coarse.gap(), fine.gap()))]
}

/// `VALUE_AGREEMENT` (tables within `3(h_t + h_x)`) and `TERMINAL` (slice
/// `T` equals `g` bit for bit in both tables).
pub fn value_records(spec: &BolzaSpec, var: &ValueTable, ctl: &ValueTable) -> Vec<CheckRecord> {
    let tol = 3.0 * (spec.ht() + spec.hx());
    let mut agree = CheckRecord::new("VALUE_AGREEMENT", tol);
    for k in 0..var.ts.len {
        for j in 0..var.xs.len {
            let (a, b) = (var.get(k, j), ctl.get(k, j));
            let d = if a == b { 0.0 } else { (a - b).abs() };
            let d = if d.is_nan() { f64::INFINITY } else { d };
            agree.observe(d, || vec![var.ts.node(k), var.xs.node(j)]);
        }
    }
    let mut term = CheckRecord::new("TERMINAL", 0.0);
    let nk = var.ts.len - 1;
    for j in 0..var.xs.len {
        let g = spec.terminal.at_node(var.xs.node(j), var.xs.step);
        let bad = var.get(nk, j).to_bits() != g.to_bits() || ctl.get(nk, j).to_bits() != g.to_bits();
        term.observe(if bad { 1.0 } else { 0.0 }, || vec![var.xs.node(j)]);
    }
    vec![agree.finish(), term.finish()]
}
