use std::sync::Arc;

use super::{Domain, ExampleCatalogEntry, HamiltonianModel, LagrangianModel, Provenance};
use crate::error::{input_err, Result};
use crate::io::read_float_rows;

/// Autonomous `n = 1` Hamiltonian given by samples `H(x_i, p_j)` on a tensor
/// grid. `H` is bilinear between nodes, constant in `x` beyond the state
/// range, and extended linearly in `p` with the end slopes; the Lagrangian is
/// the exact conjugate of that interpolant.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledHamiltonian {
    xs: Vec<f64>,
    ps: Vec<f64>,
    /// Row-major: `values[i * ps.len() + j] = H(x_i, p_j)`.
    values: Vec<f64>,
}

fn locate(nodes: &[f64], v: f64) -> (usize, f64) {
    let n = nodes.len();
    if n == 1 {
        return (0, 0.0);
    }
    let i = match nodes.partition_point(|a| *a <= v) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    };
    (i, (v - nodes[i]) / (nodes[i + 1] - nodes[i]))
}

impl SampledHamiltonian {
    pub fn new(xs: Vec<f64>, ps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || ps.len() < 2 || values.len() != xs.len() * ps.len() {
            return input_err("sampled Hamiltonian needs ≥ 1 state node, ≥ 2 dual nodes and a full grid");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || ps.windows(2).any(|w| !(w[1] > w[0])) {
            return input_err("grid nodes must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return input_err("sampled H must be finite");
        }
        let me = Self { xs, ps, values };
        for i in 0..me.xs.len() {
            let s = me.slopes(i);
            if s.windows(2).any(|w| w[1] < w[0] - 1e-9 * (1.0 + w[0].abs())) {
                return input_err(format!("H(x, .) is not convex at x = {}", me.xs[i]));
            }
        }
        Ok(me)
    }

    /// Reads rows `x,p,H` covering a tensor grid, in any order.
    pub fn from_csv<R: std::io::Read>(rdr: R) -> Result<Self> {
        let rows = read_float_rows(rdr)?;
        if rows.iter().any(|r| r.len() != 3) {
            return input_err("model file rows must be `x,p,H`");
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut ps: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        for v in [&mut xs, &mut ps] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let mut values = vec![f64::NAN; xs.len() * ps.len()];
        for r in &rows {
            let i = xs.partition_point(|a| *a < r[0]);
            let j = ps.partition_point(|a| *a < r[1]);
            let slot = &mut values[i * ps.len() + j];
            if !slot.is_nan() {
                return input_err(format!("duplicate node ({}, {})", r[0], r[1]));
            }
            *slot = r[2];
        }
        if values.iter().any(|v| v.is_nan()) {
            return input_err("model file does not cover a full tensor grid");
        }
        Self::new(xs, ps, values)
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.ps.len()..(i + 1) * self.ps.len()]
    }

    fn slopes(&self, i: usize) -> Vec<f64> {
        let r = self.row(i);
        self.ps.windows(2).zip(r.windows(2)).map(|(p, h)| (h[1] - h[0]) / (p[1] - p[0])).collect()
    }

    /// Values at the dual nodes of the row interpolated at `x`.
    fn row_at(&self, x: f64) -> Vec<f64> {
        let xc = x.clamp(self.xs[0], *self.xs.last().unwrap());
        let (i, w) = locate(&self.xs, xc);
        if self.xs.len() == 1 || w == 0.0 {
            return self.row(i).to_vec();
        }
        self.row(i).iter().zip(self.row(i + 1)).map(|(a, b)| a + w * (b - a)).collect()
    }

    fn eval_row(ps: &[f64], row: &[f64], p: f64) -> f64 {
        let (j, w) = locate(ps, p);
        row[j] + w * (row[j + 1] - row[j])
    }

    pub fn eval(&self, x: f64, p: f64) -> f64 {
        Self::eval_row(&self.ps, &self.row_at(x), p)
    }

    /// Growth constant `max |slope| / (1+|x|)` over the state nodes.
    pub fn growth(&self) -> f64 {
        (0..self.xs.len())
            .map(|i| {
                let s = self.slopes(i);
                s[0].abs().max(s[s.len() - 1].abs()) / (1.0 + self.xs[i].abs())
            })
            .fold(0.0, f64::max)
    }

    /// Lipschitz modulus in `x`, `max |ΔH| / ((1+|p|)Δx)`, including the
    /// linear tails in `p`.
    pub fn modulus(&self) -> f64 {
        let mut k: f64 = 0.0;
        for i in 0..self.xs.len().saturating_sub(1) {
            let dx = self.xs[i + 1] - self.xs[i];
            for (j, p) in self.ps.iter().enumerate() {
                let dh = (self.row(i + 1)[j] - self.row(i)[j]).abs();
                k = k.max(dh / ((1.0 + p.abs()) * dx));
            }
            let (a, b) = (self.slopes(i), self.slopes(i + 1));
            k = k.max((a[0] - b[0]).abs() / dx).max((a[a.len() - 1] - b[b.len() - 1]).abs() / dx);
        }
        k
    }

    pub fn hamiltonian(&self, name: &str) -> HamiltonianModel {
        let me = Arc::new(self.clone());
        let (c, k) = (self.growth(), self.modulus());
        HamiltonianModel::new(name, 1, move |_, x, p| me.eval(x[0], p[0]), move |_| c, move |_, _| k)
    }

    /// Exact conjugate of the interpolant: `L(x,v) = max_j p_j v − H(x,p_j)`
    /// on `[first slope, last slope]`, with `λ(x)` its value at the ends.
    pub fn lagrangian(&self, name: &str) -> LagrangianModel {
        let me = Arc::new(self.clone());
        let (m1, m2, m3) = (me.clone(), me.clone(), me);
        let conj = |s: &SampledHamiltonian, x: f64, v: f64| {
            s.ps.iter().zip(s.row_at(x)).map(|(p, h)| p * v - h).fold(f64::NEG_INFINITY, f64::max)
        };
        let ends = |s: &SampledHamiltonian, x: f64| {
            let row = s.row_at(x);
            let n = s.ps.len();
            let lo = (row[1] - row[0]) / (s.ps[1] - s.ps[0]);
            let hi = (row[n - 1] - row[n - 2]) / (s.ps[n - 1] - s.ps[n - 2]);
            (lo, hi)
        };
        LagrangianModel::new(
            name,
            1,
            move |_, x, v| conj(&m1, x[0], v[0]),
            move |_, x| {
                let (lo, hi) = ends(&m2, x[0]);
                Domain::interval(lo, hi.max(lo))
            },
        )
        .with_lambda(move |_, x| {
            let (lo, hi) = ends(&m3, x[0]);
            conj(&m3, x[0], lo).max(conj(&m3, x[0], hi))
        })
        .with_provenance(Provenance::GridConjugate)
    }

    pub fn entry(&self, name: &'static str) -> ExampleCatalogEntry {
        ExampleCatalogEntry {
            name,
            hamiltonian: self.hamiltonian(name),
            lagrangian: self.lagrangian(name),
            blc: true,
            description: "sampled Hamiltonian from a model file",
        }
    }
}
