use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};

/// Sample points for the condition checkers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    pub ts: Vec<f64>,
    pub xs: Vec<Vec<f64>>,
    pub ps: Vec<Vec<f64>>,
    /// Dom nodes per axis for the Lagrangian checks.
    #[serde(default = "default_v_nodes")]
    pub v_nodes: usize,
}

fn default_v_nodes() -> usize {
    21
}

fn radii() -> Vec<f64> {
    let mut r: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    r.extend((0..15).map(|i| 10f64.powf(1.0 + 7.0 * i as f64 / 14.0)));
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

impl SamplePlan {
    /// Default plan on `[0,T] × B_R`: 11 times; 17 states per axis in 1-D
    /// (9 per axis in 2-D, clipped to the ball); `|p|` linear up to 10 and
    /// log-spaced up to `1e8`.
    pub fn default_for(n: usize, r: f64, horizon: f64) -> Self {
        let ts = (0..11).map(|i| horizon * i as f64 / 10.0).collect();
        let (xs, ps) = match n {
            1 => {
                let xs = (0..17).map(|i| vec![-r + 2.0 * r * i as f64 / 16.0]).collect();
                let rs = radii();
                let mut ps: Vec<Vec<f64>> = rs.iter().map(|v| vec![*v]).collect();
                ps.extend(rs.iter().filter(|v| **v > 0.0).map(|v| vec![-v]));
                (xs, ps)
            }
            _ => {
                let mut xs = Vec::new();
                for i in 0..9 {
                    for j in 0..9 {
                        let x = vec![-r + r * i as f64 / 4.0, -r + r * j as f64 / 4.0];
                        if x[0].hypot(x[1]) <= r * (1.0 + 1e-12) {
                            xs.push(x);
                        }
                    }
                }
                let mut ps = vec![vec![0.0, 0.0]];
                for rad in radii().into_iter().filter(|v| *v > 0.0).step_by(2) {
                    for k in 0..8 {
                        let th = std::f64::consts::PI * k as f64 / 4.0 + 0.1;
                        ps.push(vec![rad * th.cos(), rad * th.sin()]);
                    }
                }
                (xs, ps)
            }
        };
        Self { ts, xs, ps, v_nodes: default_v_nodes() }
    }

    /// States with `|x| ≤ r`.
    pub fn states_in_ball(&self, r: f64) -> Vec<Vec<f64>> {
        self.xs.iter().filter(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt() <= r * (1.0 + 1e-12)).cloned().collect()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.ts.is_empty() || self.xs.is_empty() || self.ps.is_empty() {
            return input_err("sample plan needs times, states and dual points");
        }
        if self.xs.iter().chain(&self.ps).any(|v| v.len() != n) {
            return input_err(format!("sample plan points must have dimension {n}"));
        }
        if self.ts.iter().chain(self.xs.iter().flatten()).chain(self.ps.iter().flatten()).any(|v| !v.is_finite()) {
            return input_err("sample plan entries must be finite");
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
