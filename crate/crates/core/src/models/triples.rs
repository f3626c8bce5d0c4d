//! Hand-written control triples `(A, f, l)`.

use std::sync::Arc;

/// Control set of a triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ControlSet {
    /// `[−1, 1]^dim`.
    Cube(usize),
    /// Closed unit ball of `ℝ^dim`.
    Ball(usize),
}

impl ControlSet {
    pub fn dim(&self) -> usize {
        match self {
            Self::Cube(d) | Self::Ball(d) => *d,
        }
    }

    /// Tensor grid with `per_axis` nodes per axis on `[−1,1]^dim`, restricted
    /// to the set. Balls also get `4·per_axis` boundary points in dimension 2.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let per_axis = per_axis.max(2);
        let node = |i: usize| -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64;
        let mut out = Vec::new();
        let total = per_axis.pow(d as u32);
        for mut idx in 0..total {
            let mut a = Vec::with_capacity(d);
            for _ in 0..d {
                a.push(node(idx % per_axis));
                idx /= per_axis;
            }
            if let Self::Ball(_) = self {
                if a.iter().map(|x| x * x).sum::<f64>() > 1.0 + 1e-15 {
                    continue;
                }
            }
            out.push(a);
        }
        if let Self::Ball(2) = self {
            let m = 4 * per_axis;
            for j in 0..m {
                let th = std::f64::consts::TAU * j as f64 / m as f64;
                out.push(vec![th.cos(), th.sin()]);
            }
        }
        out
    }
}

/// A triple `(A, f, l)` claimed to represent some Hamiltonian.
pub trait ControlTriple: Send + Sync {
    fn name(&self) -> &str;
    fn controls(&self) -> ControlSet;
    fn f(&self, t: f64, x: &[f64], a: &[f64]) -> Vec<f64>;
    fn l(&self, t: f64, x: &[f64], a: &[f64]) -> f64;
}

/// `f = a₁|x|`, `l = |a₁| + |a₂|(1 − |a₁|)` on `[−1,1]²`; represents `EX1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ex1Triple;

impl ControlTriple for Ex1Triple {
    fn name(&self) -> &str {
        "EX1-continuous"
    }
    fn controls(&self) -> ControlSet {
        ControlSet::Cube(2)
    }
    fn f(&self, _: f64, x: &[f64], a: &[f64]) -> Vec<f64> {
        vec![a[0] * x[0].abs()]
    }
    fn l(&self, _: f64, _: &[f64], a: &[f64]) -> f64 {
        a[0].abs() + a[1].abs() * (1.0 - a[0].abs())
    }
}

/// Graphical triple of `EX1`: `f = a|x|`, `l = |a|` for `x ≠ 0` and `0` at
/// `x = 0`. `l` jumps at `x = 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ex1GraphicalTriple;

impl ControlTriple for Ex1GraphicalTriple {
    fn name(&self) -> &str {
        "EX1-graphical"
    }
    fn controls(&self) -> ControlSet {
        ControlSet::Cube(1)
    }
    fn f(&self, _: f64, x: &[f64], a: &[f64]) -> Vec<f64> {
        vec![a[0] * x[0].abs()]
    }
    fn l(&self, _: f64, x: &[f64], a: &[f64]) -> f64 {
        if x[0] == 0.0 {
            0.0
        } else {
            a[0].abs()
        }
    }
}

/// `f = a₁`, `l = a₂ + |x|` on the unit disc; represents `EX2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ex2Triple;

impl ControlTriple for Ex2Triple {
    fn name(&self) -> &str {
        "EX2-disc"
    }
    fn controls(&self) -> ControlSet {
        ControlSet::Ball(2)
    }
    fn f(&self, _: f64, _: &[f64], a: &[f64]) -> Vec<f64> {
        vec![a[0]]
    }
    fn l(&self, _: f64, x: &[f64], a: &[f64]) -> f64 {
        a[1] + x[0].abs()
    }
}

/// Graphical triple of `EX2`: `f = a`, `l = |x| − √(1 − a²)` on `[−1,1]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ex2GraphicalTriple;

impl ControlTriple for Ex2GraphicalTriple {
    fn name(&self) -> &str {
        "EX2-graphical"
    }
    fn controls(&self) -> ControlSet {
        ControlSet::Cube(1)
    }
    fn f(&self, _: f64, _: &[f64], a: &[f64]) -> Vec<f64> {
        vec![a[0]]
    }
    fn l(&self, _: f64, x: &[f64], a: &[f64]) -> f64 {
        x[0].abs() - (1.0 - a[0] * a[0]).max(0.0).sqrt()
    }
}

type Weight = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Family for `H = |p|` on `A = [−1,1]`:
/// `f = a(1 + |a| i(x))/(1 + i(x))`, `l = (1 − |a|) j(x)` with `i, j ≥ 0`.
/// Every member represents `|p|`, whatever the regularity of `i` and `j`.
#[derive(Clone)]
pub struct AbsFamilyTriple {
    i: Arc<Weight>,
    j: Arc<Weight>,
}

impl AbsFamilyTriple {
    pub fn new(
        i: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        j: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { i: Arc::new(i), j: Arc::new(j) }
    }
}

impl ControlTriple for AbsFamilyTriple {
    fn name(&self) -> &str {
        "ABS-family"
    }
    fn controls(&self) -> ControlSet {
        ControlSet::Cube(1)
    }
    fn f(&self, _: f64, x: &[f64], a: &[f64]) -> Vec<f64> {
        let i = (self.i)(x);
        vec![a[0] * (1.0 + a[0].abs() * i) / (1.0 + i)]
    }
    fn l(&self, _: f64, x: &[f64], a: &[f64]) -> f64 {
        (1.0 - a[0].abs()) * (self.j)(x)
    }
}
