//! Energy-consistent time integration of mechanical systems in mixed
//! position, velocity and momentum variables.
//!
//! The equations of motion are kept in the form `q' = v`, `p' = D₁L − Dgᵀλ`,
//! `p = D₂L`, `g(q) = 0`, which never inverts the mass matrix. Discretizing
//! them with Gonzalez discrete gradients yields a scheme that conserves the
//! generalized energy `p·v − L(q, v)` up to the Newton tolerance, also for
//! singular and configuration-dependent mass matrices.
//!
//! ```
//! use livens::{integrate, models::SpringPendulum, SolverSettings};
//!
//! let model = SpringPendulum::default();
//! let (q0, v0) = model.default_initial_conditions();
//! let traj = integrate(&model, &q0, &v0, &SolverSettings::new(0.01, 1.0)).unwrap();
//! assert!(traj.max_energy_deviation() < 1e-10);
//! ```

// NaN must fail every range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod convergence;
pub mod discrete_gradient;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod midpoint;
pub mod model;
pub mod models;
pub mod output;
pub mod parallel;

pub use error::{Error, Result};
pub use integrator::{integrate, newton_solve_step, NewtonCriterion, SolverSettings, StepResult};
pub use midpoint::integrate_midpoint_canonical;
pub use model::{State, StepDiagnostics, SystemModel, Trajectory};
