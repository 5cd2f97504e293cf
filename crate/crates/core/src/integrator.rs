//! Energy-consistent time stepping.
//!
//! Each step solves for `u = (q^{n+1}, v^{n+1}, p^{n+1}, λ)` such that
//!
//! ```text
//! q^{n+1} − q^n         = h v^{n+1/2}
//! p^{n+1} − p^n         = h D̄₁L − h Σ_k λ_k D̄g_k
//! p^{n+1/2}             = D̄₂L
//! g(q^{n+1})            = 0
//! ```
//!
//! with full Newton iterations on a forward-difference Jacobian. The mass
//! matrix is never inverted, so singular mass matrices are admissible as long
//! as the constrained system is well posed.

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::discrete_gradient::{
    discrete_constraint_gradients, partitioned_discrete_gradient_lagrangian, DEFAULT_EPS_DD,
};
use crate::error::{check_len, Error, Result};
use crate::linalg::{fd_jacobian_at, solve_linear};
use crate::model::{inf_norm, State, StepDiagnostics, SystemModel, Trajectory};

/// Tolerance on `‖g(q⁰)‖∞` and `‖Dg(q⁰)v⁰‖∞` for an admissible start.
pub const INITIAL_CONSISTENCY_TOL: f64 = 1e-9;

/// When a Newton iteration counts as converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NewtonCriterion {
    /// `‖R‖∞ ≤ eps_newton`.
    Residual,
    /// `‖R‖∞ ≤ eps_newton` and the last correction satisfies
    /// `‖Δu‖∞ ≤ eps_newton`. The extra condition drives the residual to
    /// round-off level once the quadratic phase is reached.
    #[default]
    ResidualAndIncrement,
}

impl NewtonCriterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            NewtonCriterion::Residual => "residual",
            NewtonCriterion::ResidualAndIncrement => "residual_and_increment",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "residual" => Some(NewtonCriterion::Residual),
            "residual_and_increment" => Some(NewtonCriterion::ResidualAndIncrement),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Step size.
    pub h: f64,
    /// Final time.
    pub t_end: f64,
    /// Newton tolerance, see [`NewtonCriterion`].
    pub eps_newton: f64,
    pub max_iter: usize,
    /// Relative degeneracy threshold of the discrete gradient.
    pub eps_dd: f64,
    /// Relative forward-difference step of the Newton Jacobian.
    pub fd_step_scale: f64,
    pub criterion: NewtonCriterion,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            h: 0.01,
            t_end: 1.0,
            eps_newton: 1e-9,
            max_iter: 50,
            eps_dd: DEFAULT_EPS_DD,
            fd_step_scale: 1e-7,
            criterion: NewtonCriterion::default(),
        }
    }
}

impl SolverSettings {
    pub fn new(h: f64, t_end: f64) -> Self {
        Self {
            h,
            t_end,
            ..Self::default()
        }
    }

    pub fn with_eps_newton(mut self, eps_newton: f64) -> Self {
        self.eps_newton = eps_newton;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("h", self.h),
            ("eps_newton", self.eps_newton),
            ("eps_dd", self.eps_dd),
            ("fd_step_scale", self.fd_step_scale),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Validation(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.t_end >= self.h) || !self.t_end.is_finite() {
            return Err(Error::Validation(format!(
                "T must be at least h, got T = {} and h = {}",
                self.t_end, self.h
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::Validation("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of uniform steps, `round(T / h)`.
    pub fn num_steps(&self) -> usize {
        (self.t_end / self.h).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub next: State,
    pub iterations: usize,
    pub final_residual_norm: f64,
}

/// Conjugate momenta at the initial time, `p⁰ = M(q⁰)v⁰`.
pub fn initialize_momentum(model: &dyn SystemModel, q0: &DVector<f64>, v0: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("q0", model.dim(), q0.len())?;
    check_len("v0", model.dim(), v0.len())?;
    Ok(model.mass(q0) * v0)
}

/// Residual of one step with unknowns packed as `(q^{n+1}, v^{n+1}, p^{n+1}, λ)`.
pub fn step_residual(
    model: &dyn SystemModel,
    prev: &State,
    u: &DVector<f64>,
    settings: &SolverSettings,
) -> Result<DVector<f64>> {
    let (d, m) = (model.dim(), model.num_constraints());
    check_len("step unknowns", 3 * d + m, u.len())?;
    let h = settings.h;

    let q1 = u.rows(0, d).into_owned();
    let v1 = u.rows(d, d).into_owned();
    let p1 = u.rows(2 * d, d).into_owned();
    let lambda = u.rows(3 * d, m).into_owned();

    let (d1l, d2l) = partitioned_discrete_gradient_lagrangian(model, &prev.q, &prev.v, &q1, &v1, settings.eps_dd)?;
    let dg = discrete_constraint_gradients(model, &prev.q, &q1, settings.eps_dd)?;

    let mut r = DVector::zeros(3 * d + m);
    r.rows_mut(0, d)
        .copy_from(&(&q1 - &prev.q - (&prev.v + &v1) * (0.5 * h)));
    r.rows_mut(d, d)
        .copy_from(&(&p1 - &prev.p - d1l * h + dg.transpose() * lambda * h));
    r.rows_mut(2 * d, d).copy_from(&((&prev.p + &p1) * 0.5 - d2l));
    r.rows_mut(3 * d, m).copy_from(&model.constraints(&q1));

    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue("step residual"));
    }
    Ok(r)
}

/// Plain Newton iteration on `residual` from `u0`. Returns the root, the
/// number of iterations and the final residual norm.
pub(crate) fn newton<F>(
    mut residual: F,
    u0: DVector<f64>,
    settings: &SolverSettings,
) -> Result<(DVector<f64>, usize, f64)>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let no_convergence = |iterations, residual| Error::NoConvergence {
        step: None,
        iterations,
        residual,
    };
    let mut u = u0;
    let mut iterations = 0;
    let mut last_increment: Option<f64> = None;
    loop {
        let r = match residual(&u) {
            Ok(r) => r,
            Err(Error::NonFiniteValue(_)) => return Err(no_convergence(iterations, f64::NAN)),
            Err(e) => return Err(e),
        };
        let norm = inf_norm(&r);
        let converged = norm <= settings.eps_newton
            && match settings.criterion {
                NewtonCriterion::Residual => true,
                NewtonCriterion::ResidualAndIncrement => {
                    last_increment.map_or(norm == 0.0, |du| du <= settings.eps_newton)
                }
            };
        if converged {
            return Ok((u, iterations, norm));
        }
        if iterations >= settings.max_iter {
            return Err(no_convergence(iterations, norm));
        }
        let jac: DMatrix<f64> = match fd_jacobian_at(&mut residual, &u, &r, settings.fd_step_scale) {
            Ok(j) => j,
            Err(Error::NonFiniteValue(_)) => return Err(no_convergence(iterations, norm)),
            Err(e) => return Err(e),
        };
        let du = solve_linear(&jac, &(-r))?;
        last_increment = Some(inf_norm(&du));
        u += du;
        iterations += 1;
    }
}

/// Advances `prev` by one step of size `settings.h`.
pub fn newton_solve_step(model: &dyn SystemModel, prev: &State, settings: &SolverSettings) -> Result<StepResult> {
    prev.validate(model)?;
    let (d, m) = (model.dim(), model.num_constraints());

    let mut u0 = DVector::zeros(3 * d + m);
    u0.rows_mut(0, d).copy_from(&prev.q);
    u0.rows_mut(d, d).copy_from(&prev.v);
    u0.rows_mut(2 * d, d).copy_from(&prev.p);

    let (u, iterations, final_residual_norm) = newton(|u| step_residual(model, prev, u, settings), u0, settings)?;

    Ok(StepResult {
        next: State {
            t: prev.t + settings.h,
            q: u.rows(0, d).into_owned(),
            v: u.rows(d, d).into_owned(),
            p: u.rows(2 * d, d).into_owned(),
            lambda: u.rows(3 * d, m).into_owned(),
        },
        iterations,
        final_residual_norm,
    })
}

/// Checks that `(q0, v0)` satisfies position and hidden velocity constraints
/// and that the constraint Jacobian has full row rank.
pub fn check_initial_state(model: &dyn SystemModel, q0: &DVector<f64>, v0: &DVector<f64>) -> Result<()> {
    check_len("q0", model.dim(), q0.len())?;
    check_len("v0", model.dim(), v0.len())?;
    let g = model.constraints(q0);
    for (k, gk) in g.iter().enumerate() {
        if !(gk.abs() <= INITIAL_CONSISTENCY_TOL) {
            return Err(Error::InconsistentInitialState(format!(
                "position constraint g_{} violated: |g_{}(q0)| = {:e}",
                k + 1,
                k + 1,
                gk.abs()
            )));
        }
    }
    let jac = model.constraint_jacobian(q0);
    let gdot = &jac * v0;
    for (k, gk) in gdot.iter().enumerate() {
        if !(gk.abs() <= INITIAL_CONSISTENCY_TOL) {
            return Err(Error::InconsistentInitialState(format!(
                "hidden velocity constraint {} violated: |(Dg(q0) v0)_{}| = {:e}",
                k + 1,
                k + 1,
                gk.abs()
            )));
        }
    }
    let m = model.num_constraints();
    if m > 0 && jac.rank(1e-12 * jac.amax().max(1.0)) < m {
        return Err(Error::InconsistentInitialState(
            "constraint Jacobian does not have full row rank at q0".into(),
        ));
    }
    Ok(())
}

/// Integrates from `(q0, v0)` over `round(T/h)` uniform steps.
pub fn integrate(
    model: &dyn SystemModel,
    q0: &DVector<f64>,
    v0: &DVector<f64>,
    settings: &SolverSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    check_initial_state(model, q0, v0)?;

    let initial = State {
        t: 0.0,
        q: q0.clone(),
        v: v0.clone(),
        p: initialize_momentum(model, q0, v0)?,
        lambda: DVector::zeros(model.num_constraints()),
    };
    let steps = settings.num_steps();
    let mut states = Vec::with_capacity(steps + 1);
    let mut diagnostics = Vec::with_capacity(steps + 1);
    diagnostics.push(StepDiagnostics::evaluate(model, &initial, 0)?);
    states.push(initial);

    for n in 1..=steps {
        let prev = states.last().expect("trajectory starts non-empty");
        let mut step = newton_solve_step(model, prev, settings).map_err(|e| e.at_step(n))?;
        // grid times from the index, so spacing does not accumulate round-off
        step.next.t = n as f64 * settings.h;
        diagnostics.push(StepDiagnostics::evaluate(model, &step.next, step.iterations)?);
        states.push(step.next);
    }
    debug!(
        "{}: {} steps, {} Newton iterations",
        model.name(),
        steps,
        diagnostics.iter().map(|d| d.newton_iterations).sum::<usize>()
    );

    Ok(Trajectory {
        model_name: model.name().to_string(),
        step_size: settings.h,
        states,
        diagnostics,
    })
}
