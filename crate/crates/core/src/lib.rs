//! Compact-control representations of convex Hamiltonians.
//!
//! Given a Hamiltonian `H(t,x,p)`, convex in `p` and of linear growth, the crate
//! builds a triple `(B, f, l)` on the closed unit ball `B ⊂ ℝ^{n+1}` with
//!
//! ```text
//! H(t,x,p) = sup_{a ∈ B} { ⟨p, f(t,x,a)⟩ − l(t,x,a) }
//! ```
//!
//! by parametrizing the epigraph of the Lagrangian `L = H*` in the velocity
//! variable: the scaled control `ω(t,x)·a` is localized against the epigraph
//! with the ball-intersection operator `P(y,K) = K ∩ B(y, 2 d(y,K))`, and the
//! Steiner point of the result is taken as `(f, l)`.
//!
//! Every property of the construction is audited numerically: the sup formula,
//! the graph/epigraph sandwich, Lipschitz and growth bounds, the equivalence
//! of the Lipschitz conditions on `H`, `L` and the epigraph map, stability
//! under perturbation, and the reduction of a Bolza problem to a control
//! problem on a dynamic-programming grid.
//!
//! Module map:
//! - [`geometry`]: compact convex bodies, support functions, Steiner points,
//!   Hausdorff distance, projection and the operator `P`.
//! - [`conjugate`]: extended reals, grid Legendre–Fenchel transforms, epi-sums.
//! - [`models`]: Hamiltonian/Lagrangian models, the example catalog, and the
//!   condition checkers.
//! - [`epigraph`]: windowed epigraph sections `E_L(t,x)`.
//! - [`representation`]: the construction of `e = (f, l)` and its audits.
//! - [`stability`]: perturbation families and convergence audits.
//! - [`bolza`]: variational and control Bolza problems on grids.
//! - [`cli`]: the `hamrep` command-line front end.

pub mod bolza;
pub mod cli;
pub mod conjugate;
pub mod epigraph;
mod error;
pub mod geometry;
pub mod io;
pub mod models;
pub mod report;
pub mod representation;
pub mod stability;

pub use error::{Error, Result};
