//! Convexification over `𝔸 = A^{n+1} × Δ`: `𝕗 = Σ αᵢ f(aᵢ)`, `𝕝 = Σ αᵢ l(aᵢ)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input_err, Error, Result};
use crate::geometry::vector::dist;
use crate::geometry::ConvexBody;
use crate::models::ControlTriple;
use crate::report::CheckRecord;

type FEval = dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync;
type LEval = dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync;

/// Simplex-weighted triple over a finite base control list.
#[derive(Clone)]
pub struct ConvexifiedTriple {
    base: Vec<Vec<f64>>,
    n: usize,
    f: Arc<FEval>,
    l: Arc<LEval>,
}

impl std::fmt::Debug for ConvexifiedTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvexifiedTriple").field("base", &self.base).field("n", &self.n).finish()
    }
}

pub fn convexify(
    base: Vec<Vec<f64>>,
    n: usize,
    f: impl Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    l: impl Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync + 'static,
) -> Result<ConvexifiedTriple> {
    if base.is_empty() {
        return input_err("convexification needs a nonempty control list");
    }
    if n == 0 || n > 3 {
        return input_err(format!("state dimension {n} not supported"));
    }
    Ok(ConvexifiedTriple { base, n, f: Arc::new(f), l: Arc::new(l) })
}

/// Convexification of a hand-written triple over the listed controls.
pub fn convexify_triple(triple: Arc<dyn ControlTriple>, base: Vec<Vec<f64>>, n: usize) -> Result<ConvexifiedTriple> {
    let t2 = triple.clone();
    convexify(base, n, move |t, x, a| triple.f(t, x, a), move |t, x, a| t2.l(t, x, a))
}

impl ConvexifiedTriple {
    pub fn base(&self) -> &[Vec<f64>] {
        &self.base
    }

    /// Number of simplex weights, `n + 1`.
    pub fn simplex_dim(&self) -> usize {
        self.n + 1
    }

    /// `(𝕗, 𝕝)` at the control `((a_{idx_0}, …, a_{idx_n}), w)`.
    pub fn eval(&self, t: f64, x: &[f64], idx: &[usize], w: &[f64]) -> Result<(Vec<f64>, f64)> {
        let k = self.simplex_dim();
        if idx.len() != k || w.len() != k {
            return Err(Error::Dimension { expected: k, got: idx.len().min(w.len()) });
        }
        if w.iter().any(|c| !(*c >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return input_err("simplex weights must be nonnegative and sum to 1");
        }
        if idx.iter().any(|i| *i >= self.base.len()) {
            return input_err("control index out of range");
        }
        let mut fv = vec![0.0; self.n];
        let mut lv = 0.0;
        for (i, wi) in idx.iter().zip(w) {
            let a = &self.base[*i];
            for (acc, c) in fv.iter_mut().zip((self.f)(t, x, a)) {
                *acc += wi * c;
            }
            lv += wi * (self.l)(t, x, a);
        }
        Ok((fv, lv))
    }

    /// `λ(t,x) = max over 𝔸 of 𝕝`, attained at a base control.
    pub fn lambda(&self, t: f64, x: &[f64]) -> f64 {
        self.base.iter().map(|a| (self.l)(t, x, a)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn random_control<R: Rng>(&self, rng: &mut R) -> (Vec<usize>, Vec<f64>) {
        let k = self.simplex_dim();
        let idx = (0..k).map(|_| rng.gen_range(0..self.base.len())).collect();
        let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        (idx, e.iter().map(|c| c / s).collect())
    }

    /// `𝕗(t,x,𝔸) = conv f(t,x,A)` on samples: random controls land in the hull,
    /// and each hull vertex is reached.
    pub fn hull_check(&self, t: f64, x: &[f64], samples: usize, seed: u64) -> Result<CheckRecord> {
        let pts: Vec<Vec<f64>> = self.base.iter().map(|a| (self.f)(t, x, a)).collect();
        let hull = ConvexBody::from_rows(&pts)?;
        let mut rec = CheckRecord::new("CONV_HULL", 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut reached = Vec::new();
        for s in 0..samples + self.base.len() {
            let (idx, w) = if s < self.base.len() {
                let mut w = vec![0.0; self.simplex_dim()];
                w[0] = 1.0;
                (vec![s; self.simplex_dim()], w)
            } else {
                self.random_control(&mut rng)
            };
            let (fv, _) = self.eval(t, x, &idx, &w)?;
            rec.observe(hull.distance(&fv)?, || [&fv[..], &w].concat());
            reached.push(fv);
        }
        for v in hull.iter() {
            let gap = reached.iter().map(|r| dist(r, v)).fold(f64::INFINITY, f64::min);
            rec.observe(gap, || v.to_vec());
        }
        Ok(rec.finish())
    }

    /// The `x`-modulus of `𝕝` over pairs of `xs` and random controls stays
    /// within that of `l` over the base list.
    pub fn modulus_check(&self, t: f64, xs: &[Vec<f64>], samples: usize, seed: u64) -> Result<CheckRecord> {
        let mut base_k: f64 = 0.0;
        for (i, x) in xs.iter().enumerate() {
            for y in &xs[i + 1..] {
                let d = dist(x, y);
                for a in &self.base {
                    base_k = base_k.max(((self.l)(t, x, a) - (self.l)(t, y, a)).abs() / d);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rec = CheckRecord::new("CONV_LIP", 1e-12);
        let mut k: f64 = 0.0;
        for _ in 0..samples {
            let (idx, w) = self.random_control(&mut rng);
            for (i, x) in xs.iter().enumerate() {
                for y in &xs[i + 1..] {
                    let d = dist(x, y);
                    let q = (self.eval(t, x, &idx, &w)?.1 - self.eval(t, y, &idx, &w)?.1).abs() / d;
                    k = k.max(q);
                    rec.observe(q - base_k * (1.0 + 1e-12), || [&x[..], y].concat());
                }
            }
        }
        Ok(rec.finish().with_constant(k).with_note(format!("base modulus {base_k}")))
    }
}
