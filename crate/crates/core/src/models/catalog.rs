use super::{Domain, HamiltonianModel, LagrangianModel};
use crate::geometry::vector::norm;

/// A catalog Hamiltonian with its closed-form Lagrangian.
#[derive(Clone, Debug)]
pub struct ExampleCatalogEntry {
    pub name: &'static str,
    pub hamiltonian: HamiltonianModel,
    pub lagrangian: LagrangianModel,
    /// (BLC) is expected to hold.
    pub blc: bool,
    pub description: &'static str,
}

fn ex1() -> ExampleCatalogEntry {
    let h = HamiltonianModel::new("EX1", 1, |_, x, p| (p[0].abs() * x[0].abs() - 1.0).max(0.0), |_| 1.0, |_, _| 1.0);
    let l = LagrangianModel::new(
        "EX1",
        1,
        |_, x, v| if x[0] == 0.0 { 0.0 } else { (v[0] / x[0]).abs() },
        |_, x| Domain::interval(0.0 - x[0].abs(), x[0].abs()),
    )
    .with_lambda(|_, _| 1.0);
    ExampleCatalogEntry {
        name: "EX1",
        hamiltonian: h,
        lagrangian: l,
        blc: true,
        description: "H = max(|p||x| - 1, 0), L = |v/x| on [-|x|, |x|]",
    }
}

fn ex2_l(x: f64, v: &[f64]) -> f64 {
    x - (1.0 - v.iter().map(|a| a * a).sum::<f64>()).max(0.0).sqrt()
}

fn ex2() -> ExampleCatalogEntry {
    let h = HamiltonianModel::new("EX2", 1, |_, x, p| (1.0 + p[0] * p[0]).sqrt() - x[0].abs(), |_| 1.0, |_, _| 1.0);
    let l = LagrangianModel::new("EX2", 1, |_, x, v| ex2_l(x[0].abs(), v), |_, _| Domain::interval(-1.0, 1.0))
        .with_lambda(|_, x| x[0].abs());
    ExampleCatalogEntry {
        name: "EX2",
        hamiltonian: h,
        lagrangian: l,
        blc: true,
        description: "H = sqrt(1 + p^2) - |x|, L = |x| - sqrt(1 - v^2) on [-1, 1]",
    }
}

fn ex4() -> ExampleCatalogEntry {
    let h = HamiltonianModel::new(
        "EX4",
        1,
        |_, x, p| {
            let s = (x[0] * p[0]).abs();
            if s > 1.0 {
                (s.sqrt() - 1.0).powi(2)
            } else {
                0.0
            }
        },
        |_| 1.0,
        |_, _| 1.0,
    );
    let l = LagrangianModel::new(
        "EX4",
        1,
        |_, x, v| {
            if x[0] == 0.0 {
                0.0
            } else {
                v[0].abs() / (x[0].abs() - v[0].abs())
            }
        },
        |_, x| {
            if x[0] == 0.0 {
                Domain::interval(0.0, 0.0)
            } else {
                Domain::open_interval(-x[0].abs(), x[0].abs())
            }
        },
    );
    ExampleCatalogEntry {
        name: "EX4",
        hamiltonian: h,
        lagrangian: l,
        blc: false,
        description: "H = (sqrt|xp| - 1)^2 for |xp| > 1 and 0 otherwise, L = |v|/(|x| - |v|) on (-|x|, |x|)",
    }
}

fn abs() -> ExampleCatalogEntry {
    let h = HamiltonianModel::new("ABS", 1, |_, _, p| p[0].abs(), |_| 1.0, |_, _| 0.0);
    let l = LagrangianModel::new("ABS", 1, |_, _, _| 0.0, |_, _| Domain::interval(-1.0, 1.0)).with_lambda(|_, _| 0.0);
    ExampleCatalogEntry {
        name: "ABS",
        hamiltonian: h,
        lagrangian: l,
        blc: true,
        description: "H = |p|, L = indicator of [-1, 1]",
    }
}

fn ex2t() -> ExampleCatalogEntry {
    let h = HamiltonianModel::new(
        "EX2T",
        1,
        |t, x, p| (1.0 + t) * ((1.0 + p[0] * p[0]).sqrt() - x[0].abs()),
        |t| 1.0 + t,
        |_, t| 1.0 + t,
    )
    .with_flags(true, false);
    let l = LagrangianModel::new(
        "EX2T",
        1,
        |t, x, v| (1.0 + t) * ex2_l(x[0].abs(), &[v[0] / (1.0 + t)]),
        |t, _| Domain::interval(-(1.0 + t), 1.0 + t),
    )
    .with_lambda(|t, x| (1.0 + t) * x[0].abs());
    ExampleCatalogEntry {
        name: "EX2T",
        hamiltonian: h,
        lagrangian: l,
        blc: true,
        description: "H = (1 + t)(sqrt(1 + p^2) - |x|), the time-scaled EX2",
    }
}

fn ex2d() -> ExampleCatalogEntry {
    let h = HamiltonianModel::new(
        "EX2D",
        2,
        |_, x, p| (1.0 + p[0] * p[0] + p[1] * p[1]).sqrt() - norm(x),
        |_| 1.0,
        |_, _| 1.0,
    );
    let l = LagrangianModel::new(
        "EX2D",
        2,
        |_, x, v| ex2_l(norm(x), v),
        |_, _| Domain::Ball { center: vec![0.0, 0.0], radius: 1.0, open: false },
    )
    .with_lambda(|_, x| norm(x));
    ExampleCatalogEntry {
        name: "EX2D",
        hamiltonian: h,
        lagrangian: l,
        blc: true,
        description: "H = sqrt(1 + |p|^2) - |x| in two dimensions, L = |x| - sqrt(1 - |v|^2) on the unit disc",
    }
}

/// All catalog entries.
pub fn catalog() -> Vec<ExampleCatalogEntry> {
    vec![ex1(), ex2(), ex4(), abs(), ex2t(), ex2d()]
}

/// Case-insensitive lookup by name.
pub fn find_example(name: &str) -> Option<ExampleCatalogEntry> {
    catalog().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}
