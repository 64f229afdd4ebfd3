//! Exact penalty functions with cone-dual-valued penalty parameters.
//!
//! A constrained problem is posed as minimizing `f` over a simple set `Q`
//! subject to `phi(x) = 0`, where `phi` maps into a closed convex cone `K`.
//! For a dual-cone parameter `tau` the penalized objective is
//! `Phi_tau(x) = f(x) + <tau, phi(x)>`, which sits between two classical
//! scalar penalty functions: `Psi_c = f + c ||phi||` at `c = p_K(tau)` from
//! below and at `c = ||tau||_*` from above.
//!
//! The crate provides the cone algebra ([`cones`]), problem data and
//! penalized evaluation ([`penalty`]), a deterministic global subproblem
//! solver ([`subsolver`]), the penalty-parameter update loops
//! ([`strategies`]), bundled instances ([`instances`]), and empirical checks
//! of the exactness theory ([`diagnostics`]).

pub mod cones;
pub mod diagnostics;
pub mod error;
pub mod instances;
pub mod penalty;
pub mod strategies;
pub mod subsolver;

pub use cones::{ConeElement, ConeSpace, DualElement, PenaltyParameter};
pub use error::{Error, Result};
pub use penalty::{eval_penalized, eval_scalar_penalty, infeasibility, ProblemInstance};
pub use strategies::{run_method, MethodConfig, Outcome, RunTrace, Scaling, Strategy};
pub use subsolver::{global_minimize, SubsolverConfig, SubsolverResult};
