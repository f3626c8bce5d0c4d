//! Extended reals, grid functions, Legendre–Fenchel transforms and epi-sums.

mod transform;

pub use transform::{
    biconjugate, biconjugate_check, biconjugate_check_on, conjugate_at, conjugate_grid, conjugate_of_cone_term, episum,
    lower_convex_envelope, slope_window, ConeConjugate,
};

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{input_err, Error, Result};
use crate::io::{fmt_num, read_float_rows};

/// A value in `ℝ ∪ {+∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// `+∞` maps to [`ExtReal::PosInf`]; NaN and `−∞` are rejected.
    pub fn from_f64(v: f64) -> Result<Self> {
        if v == f64::INFINITY {
            Ok(Self::PosInf)
        } else if v.is_finite() {
            Ok(Self::Finite(v))
        } else {
            input_err(format!("{v} is not in ℝ ∪ {{+∞}}"))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// The value as an `f64`, with `+∞` as `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(v) => v,
            Self::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::PosInf => None,
        }
    }

    /// `∞ + a = ∞`.
    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::PosInf,
        }
    }

    pub fn add_f64(self, b: f64) -> Self {
        match self {
            Self::Finite(a) => Self::Finite(a + b),
            Self::PosInf => Self::PosInf,
        }
    }

    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a.min(b)),
            (Self::PosInf, o) | (o, Self::PosInf) => o,
        }
    }

    pub fn le(self, other: Self) -> bool {
        self.to_f64() <= other.to_f64()
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_num(self.to_f64()))
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::PosInf => s.serialize_str("inf"),
        }
    }
}

/// Uniform 1-D grid `lo + i·step`, `i = 0..len`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1 {
    pub lo: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid1 {
    /// `n` nodes from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return input_err(format!("bad grid [{lo}, {hi}] with {n} nodes"));
        }
        Ok(Self { lo, step: (hi - lo) / (n - 1) as f64, len: n })
    }

    /// Nodes of spacing `step` covering `[lo, hi]` (the last node may overshoot by < step).
    pub fn with_step(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(hi >= lo) {
            return input_err("bad grid step");
        }
        let len = ((hi - lo) / step - 1e-9).ceil().max(0.0) as usize + 1;
        Ok(Self { lo, step, len })
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn hi(&self) -> f64 {
        self.node(self.len - 1)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.node(i)).collect()
    }
}

/// Uniform grid in ℝ¹ or a tensor grid in ℝ².
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Grid {
    D1(Grid1),
    D2(Grid1, Grid1),
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Self::D1(_) => 1,
            Self::D2(..) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::D1(g) => g.len,
            Self::D2(a, b) => a.len * b.len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `idx`; 2-D grids are row-major with the first axis slowest.
    pub fn node(&self, idx: usize) -> Vec<f64> {
        match self {
            Self::D1(g) => vec![g.node(idx)],
            Self::D2(a, b) => vec![a.node(idx / b.len), b.node(idx % b.len)],
        }
    }

    pub fn max_step(&self) -> f64 {
        match self {
            Self::D1(g) => g.step,
            Self::D2(a, b) => a.step.max(b.step),
        }
    }
}

/// Extended-real values on the nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<ExtReal>,
}

impl GridFunction {
    /// Requires one value per node and at least one finite value.
    pub fn new(grid: Grid, values: Vec<ExtReal>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension { expected: grid.len(), got: values.len() });
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper("grid function is identically +∞".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> ExtReal) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.node(i))).collect();
        Self::new(grid, values)
    }

    /// 1-D convenience constructor from an `f64` closure (`+∞` allowed).
    pub fn sample1(grid: Grid1, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len).map(|i| ExtReal::from_f64(f(grid.node(i)))).collect::<Result<Vec<_>>>()?;
        Self::new(Grid::D1(grid), values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, i: usize) -> ExtReal {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(node, value)` pairs with finite value.
    pub fn finite_nodes(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.values.iter().enumerate().filter_map(|(i, v)| v.finite().map(|x| (self.grid.node(i), x)))
    }

    /// CSV `v,value` (1-D) or `v1,v2,value` (2-D), `inf` for `+∞`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(if self.grid.dim() == 1 { "v,value\n" } else { "v1,v2,value\n" });
        for (i, v) in self.values.iter().enumerate() {
            for c in self.grid.node(i) {
                s.push_str(&fmt_num(c));
                s.push(',');
            }
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }

    /// Reads the 1-D CSV format; nodes must be uniformly spaced and increasing.
    pub fn from_csv<R: std::io::Read>(rdr: R) -> Result<Self> {
        let rows = read_float_rows(rdr)?;
        if rows.len() < 2 || rows.iter().any(|r| r.len() != 2) {
            return input_err("grid function CSV needs ≥ 2 rows of `v,value`");
        }
        let lo = rows[0][0];
        let step = rows[1][0] - lo;
        if !(step > 0.0) {
            return input_err("grid must be strictly increasing");
        }
        for (i, r) in rows.iter().enumerate() {
            if (r[0] - (lo + i as f64 * step)).abs() > 1e-9 * (1.0 + r[0].abs()) {
                return input_err("grid is not uniform");
            }
        }
        let values = rows.iter().map(|r| ExtReal::from_f64(r[1])).collect::<Result<Vec<_>>>()?;
        Self::new(Grid::D1(Grid1 { lo, step, len: rows.len() }), values)
    }
}
