//! Mechanical-system abstraction and the continuous-time scalar quantities
//! built on it.
//!
//! A system is described by its mass matrix `M(q)`, a potential `V(q)` and
//! holonomic constraints `g(q) = 0`. The Lagrangian is
//! `L(q, v) = ½ v·M(q)v − V(q)`. Derivatives of `M` are never requested: the
//! integrator only differentiates kinetic energy through discrete gradients.
//!
//! The free functions in this module validate dimensions before calling into
//! the model, so they are the entry points the rest of the crate uses.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::linalg;

/// A scleronomic mechanical system with `dim` coordinates and
/// `num_constraints` holonomic constraints.
///
/// Implementations must be pure: every method is a function of its arguments
/// only, so a model can be shared between concurrent simulations.
pub trait SystemModel: Send + Sync {
    fn name(&self) -> &str;

    /// Number of coordinates `d`.
    fn dim(&self) -> usize;

    /// Number of holonomic constraints `m`.
    fn num_constraints(&self) -> usize {
        0
    }

    /// Symmetric positive semidefinite mass matrix `M(q)`.
    fn mass(&self, q: &DVector<f64>) -> DMatrix<f64>;

    /// Optional analytic `∂/∂q (½ v·M(q)v)`. Returning `None` makes callers
    /// fall back to central differences of the kinetic energy.
    fn kinetic_gradient_q(&self, _q: &DVector<f64>, _v: &DVector<f64>) -> Option<DVector<f64>> {
        None
    }

    fn potential(&self, q: &DVector<f64>) -> f64;

    fn potential_gradient(&self, q: &DVector<f64>) -> DVector<f64>;

    /// Constraint values `g(q)`; empty for unconstrained systems.
    fn constraints(&self, _q: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(0)
    }

    /// Constraint Jacobian `Dg(q)`, one row per constraint.
    fn constraint_jacobian(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(0, self.dim())
    }
}

/// One point of the time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub q: DVector<f64>,
    pub v: DVector<f64>,
    pub p: DVector<f64>,
    pub lambda: DVector<f64>,
}

impl State {
    pub fn validate(&self, model: &dyn SystemModel) -> Result<()> {
        let d = model.dim();
        check_len("q", d, self.q.len())?;
        check_len("v", d, self.v.len())?;
        check_len("p", d, self.p.len())?;
        check_len("lambda", model.num_constraints(), self.lambda.len())
    }
}

/// Per-grid-point diagnostics recorded alongside each state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// Discrete generalized energy `p·v − L(q, v)`.
    pub energy: f64,
    /// Total energy `T + V`.
    pub total_energy: f64,
    /// `‖g(q)‖∞`
    pub constraint_norm: f64,
    /// `‖Dg(q)v‖∞`
    pub constraint_velocity_norm: f64,
    /// Newton iterations spent producing this state (0 for the initial state).
    pub newton_iterations: usize,
}

impl StepDiagnostics {
    pub fn evaluate(model: &dyn SystemModel, state: &State, newton_iterations: usize) -> Result<Self> {
        Ok(Self {
            energy: generalized_energy(model, &state.q, &state.v, &state.p)?,
            total_energy: total_energy(model, &state.q, &state.v)?,
            constraint_norm: inf_norm(&constraints(model, &state.q)?),
            constraint_velocity_norm: inf_norm(&constraint_velocity(model, &state.q, &state.v)?),
            newton_iterations,
        })
    }
}

/// A uniformly spaced sequence of states with their diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model_name: String,
    pub step_size: f64,
    pub states: Vec<State>,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&State> {
        self.states.last()
    }

    /// `max_n |E^n − E^0|` for the generalized energy.
    pub fn max_energy_deviation(&self) -> f64 {
        max_deviation(self.diagnostics.iter().map(|d| d.energy))
    }

    /// `max_n |E^{n+1} − E^n|` for the generalized energy.
    pub fn max_energy_increment(&self) -> f64 {
        max_increment(self.diagnostics.iter().map(|d| d.energy))
    }

    /// `max_n |E_tot^{n+1} − E_tot^n|`.
    pub fn max_total_energy_increment(&self) -> f64 {
        max_increment(self.diagnostics.iter().map(|d| d.total_energy))
    }

    pub fn max_constraint_norm(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.constraint_norm).fold(0.0, f64::max)
    }

    pub fn total_newton_iterations(&self) -> usize {
        self.diagnostics.iter().map(|d| d.newton_iterations).sum()
    }

    /// Largest deviation of one momentum component from its initial value.
    /// Cyclic coordinates have conserved conjugate momenta in the continuous
    /// flow; this is reported, not enforced.
    pub fn max_momentum_drift(&self, component: usize) -> f64 {
        max_deviation(self.states.iter().map(|s| s.p[component]))
    }

    /// Largest `‖p^n − M(q^n)v^n‖∞` along the trajectory.
    pub fn max_fiber_defect(&self, model: &dyn SystemModel) -> f64 {
        self.states
            .iter()
            .map(|s| inf_norm(&(&s.p - model.mass(&s.q) * &s.v)))
            .fold(0.0, f64::max)
    }
}

fn max_deviation(values: impl Iterator<Item = f64>) -> f64 {
    let mut first = None;
    let mut worst: f64 = 0.0;
    for x in values {
        let x0 = *first.get_or_insert(x);
        worst = worst.max((x - x0).abs());
    }
    worst
}

fn max_increment(values: impl Iterator<Item = f64>) -> f64 {
    let mut prev: Option<f64> = None;
    let mut worst: f64 = 0.0;
    for x in values {
        if let Some(p) = prev {
            worst = worst.max((x - p).abs());
        }
        prev = Some(x);
    }
    worst
}

pub fn inf_norm(x: &DVector<f64>) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn mass_matrix(model: &dyn SystemModel, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_len("q", model.dim(), q.len())?;
    Ok(model.mass(q))
}

/// `½ v·M(q)v`
pub fn kinetic_energy(model: &dyn SystemModel, q: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    check_len("q", model.dim(), q.len())?;
    check_len("v", model.dim(), v.len())?;
    Ok(0.5 * v.dot(&(model.mass(q) * v)))
}

pub fn potential_energy(model: &dyn SystemModel, q: &DVector<f64>) -> Result<f64> {
    check_len("q", model.dim(), q.len())?;
    Ok(model.potential(q))
}

pub fn total_energy(model: &dyn SystemModel, q: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    Ok(kinetic_energy(model, q, v)? + model.potential(q))
}

/// Lagrangian `T(q, v) − V(q)`.
pub fn lagrangian(model: &dyn SystemModel, q: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    Ok(kinetic_energy(model, q, v)? - model.potential(q))
}

/// `p·v − L(q, v)`. Coincides with the total energy when `p = M(q)v`.
pub fn generalized_energy(
    model: &dyn SystemModel,
    q: &DVector<f64>,
    v: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<f64> {
    check_len("p", model.dim(), p.len())?;
    Ok(p.dot(v) - lagrangian(model, q, v)?)
}

/// `½ p·M(q)⁻¹p + V(q)`. Fails with [`Error::SingularMass`] when `M(q)` has
/// no inverse.
pub fn hamiltonian(model: &dyn SystemModel, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
    let v = inverse_mass_times(model, q, p)?;
    Ok(0.5 * p.dot(&v) + model.potential(q))
}

/// Solves `M(q) v = p`.
pub fn inverse_mass_times(model: &dyn SystemModel, q: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
    let m = mass_matrix(model, q)?;
    check_len("p", model.dim(), p.len())?;
    linalg::solve_linear(&m, p).map_err(|e| match e {
        Error::SingularMatrix { pivot, .. } => Error::SingularMass { pivot },
        other => other,
    })
}

pub fn constraints(model: &dyn SystemModel, q: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("q", model.dim(), q.len())?;
    Ok(model.constraints(q))
}

pub fn constraint_jacobian(model: &dyn SystemModel, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_len("q", model.dim(), q.len())?;
    Ok(model.constraint_jacobian(q))
}

/// Hidden velocity constraints `Dg(q)v`.
pub fn constraint_velocity(model: &dyn SystemModel, q: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("v", model.dim(), v.len())?;
    Ok(constraint_jacobian(model, q)? * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{HarmonicOscillator, MassSpring, SpringPendulum};
    use approx::assert_relative_eq;
    use nalgebra::dvector;
    use std::f64::consts::FRAC_PI_2;

    fn pendulum_ic() -> (DVector<f64>, DVector<f64>) {
        (dvector![1.05, FRAC_PI_2, 0.0], dvector![0.0, 1.0, 1.0])
    }

    #[test]
    fn mass_matrix_examples() {
        let ms = MassSpring::default();
        let m = mass_matrix(&ms, &dvector![0.3, 1.4, -0.2]).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(3, 3, &[1., 0., 0., 0., 1., 1., 0., 1., 1.]));

        let sp = SpringPendulum::default();
        let m = mass_matrix(&sp, &pendulum_ic().0).unwrap();
        assert_relative_eq!(
            m,
            DMatrix::from_diagonal(&dvector![1.0, 1.1025, 1.1025]),
            epsilon = 1e-14
        );

        let m = mass_matrix(&sp, &dvector![1.3, 0.0, 0.4]).unwrap();
        assert_eq!(m.rank(1e-12), 2);

        assert!(matches!(
            mass_matrix(&sp, &dvector![1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2,
                ..
            })
        ));
    }

    #[test]
    fn kinetic_energy_examples() {
        let ms = MassSpring::default();
        let q = dvector![0.0, 1.1, 0.0];
        assert_eq!(kinetic_energy(&ms, &q, &dvector![1.0, 0.0, 0.0]).unwrap(), 0.5);
        assert_eq!(kinetic_energy(&ms, &q, &DVector::zeros(3)).unwrap(), 0.0);

        let sp = SpringPendulum::default();
        let (q0, v0) = pendulum_ic();
        assert_relative_eq!(kinetic_energy(&sp, &q0, &v0).unwrap(), 1.1025, epsilon = 1e-14);
        assert!(kinetic_energy(&sp, &q0, &dvector![1.0]).is_err());
    }

    #[test]
    fn potential_energy_examples() {
        let ms = MassSpring::default();
        assert_relative_eq!(
            potential_energy(&ms, &dvector![1.0, 7.0, 1.0]).unwrap(),
            2.0,
            epsilon = 1e-15
        );

        let sp = SpringPendulum::default();
        assert_relative_eq!(
            potential_energy(&sp, &pendulum_ic().0).unwrap(),
            0.393984375,
            epsilon = 1e-14
        );
        assert_eq!(potential_energy(&sp, &dvector![1.0, 0.3, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn total_and_generalized_energy_examples() {
        let sp = SpringPendulum::default();
        let (q0, v0) = pendulum_ic();
        assert_relative_eq!(total_energy(&sp, &q0, &v0).unwrap(), 1.496484375, epsilon = 1e-13);

        let p0 = dvector![0.0, 1.1025, 1.1025];
        assert_relative_eq!(
            generalized_energy(&sp, &q0, &v0, &p0).unwrap(),
            1.496484375,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            generalized_energy(&sp, &q0, &v0, &DVector::zeros(3)).unwrap(),
            -0.708515625,
            epsilon = 1e-13
        );
        assert_relative_eq!(
            generalized_energy(&sp, &q0, &DVector::zeros(3), &dvector![3.0, -1.0, 2.0]).unwrap(),
            0.393984375,
            epsilon = 1e-14
        );

        let ho = HarmonicOscillator::new(1.0, 1.0, 1).unwrap();
        assert_eq!(total_energy(&ho, &dvector![1.0], &dvector![0.0]).unwrap(), 0.5);
        assert_eq!(
            total_energy(&sp, &dvector![1.0, 0.2, 0.0], &DVector::zeros(3)).unwrap(),
            0.0
        );
    }

    #[test]
    fn hamiltonian_examples() {
        let ho = HarmonicOscillator::new(1.0, 1.0, 1).unwrap();
        assert_relative_eq!(hamiltonian(&ho, &dvector![0.0], &dvector![1.0]).unwrap(), 0.5);

        let sp = SpringPendulum::default();
        let (q0, _) = pendulum_ic();
        assert_relative_eq!(
            hamiltonian(&sp, &q0, &dvector![0.0, 1.1025, 1.1025]).unwrap(),
            1.496484375,
            epsilon = 1e-13
        );

        let ms = MassSpring::default();
        assert!(matches!(
            hamiltonian(&ms, &dvector![0.0, 1.1, 0.0], &dvector![1.0, 0.0, 0.0]),
            Err(Error::SingularMass { .. })
        ));
    }

    #[test]
    fn constraint_examples() {
        let ms = MassSpring::default();
        assert_eq!(constraints(&ms, &dvector![0.0, 1.1, 0.0]).unwrap()[0].abs(), 0.0);
        assert_relative_eq!(
            constraints(&ms, &dvector![0.0, 1.2, 0.0]).unwrap()[0],
            0.115,
            epsilon = 1e-14
        );

        let jac = constraint_jacobian(&ms, &dvector![0.0, 1.1, 0.0]).unwrap();
        assert_relative_eq!(jac, DMatrix::from_row_slice(1, 3, &[-1.1, 1.1, 0.0]), epsilon = 1e-14);
        let jac = constraint_jacobian(&ms, &dvector![1.0, 2.1, 5.0]).unwrap();
        assert_relative_eq!(jac, DMatrix::from_row_slice(1, 3, &[-1.1, 1.1, 0.0]), epsilon = 1e-14);

        let q = dvector![0.0, 1.1, 0.0];
        assert_eq!(constraint_velocity(&ms, &q, &dvector![1.0, 1.0, 0.0]).unwrap()[0], 0.0);
        assert_relative_eq!(constraint_velocity(&ms, &q, &dvector![0.0, 1.0, 0.0]).unwrap()[0], 1.1);
        assert_eq!(constraint_velocity(&ms, &q, &DVector::zeros(3)).unwrap()[0], 0.0);

        let sp = SpringPendulum::default();
        assert_eq!(constraints(&sp, &pendulum_ic().0).unwrap().len(), 0);
        let jac = constraint_jacobian(&sp, &pendulum_ic().0).unwrap();
        assert_eq!((jac.nrows(), jac.ncols()), (0, 3));
    }

    #[test]
    fn trajectory_reductions() {
        let diag = |e: f64, et: f64| StepDiagnostics {
            energy: e,
            total_energy: et,
            constraint_norm: 0.0,
            constraint_velocity_norm: 0.0,
            newton_iterations: 2,
        };
        let traj = Trajectory {
            model_name: "x".into(),
            step_size: 0.1,
            states: vec![],
            diagnostics: vec![diag(1.0, 1.0), diag(1.5, 0.5), diag(0.75, 1.0)],
        };
        assert_eq!(traj.max_energy_deviation(), 0.5);
        assert_eq!(traj.max_energy_increment(), 0.75);
        assert_eq!(traj.max_total_energy_increment(), 0.5);
        assert_eq!(traj.total_newton_iterations(), 6);
    }
}
