//! Implicit midpoint rule on the canonical equations
//! `q' = M(q)⁻¹p`, `p' = −∂_q(½ p·M(q)⁻¹p) − DV(q)`.
//!
//! Only usable for unconstrained systems with an invertible mass matrix. It
//! serves as an independent baseline: for constant `M` and quadratic `V` the
//! energy-consistent scheme must reproduce it.

use nalgebra::DVector;

use crate::discrete_gradient::kinetic_gradient_q;
use crate::error::{check_len, Error, Result};
use crate::integrator::{newton, SolverSettings};
use crate::model::{inverse_mass_times, State, StepDiagnostics, SystemModel, Trajectory};

fn canonical_residual(model: &dyn SystemModel, prev: &State, u: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
    let d = model.dim();
    let q1 = u.rows(0, d).into_owned();
    let p1 = u.rows(d, d).into_owned();
    let q_mid = (&prev.q + &q1) * 0.5;
    let p_mid = (&prev.p + &p1) * 0.5;

    let velocity = inverse_mass_times(model, &q_mid, &p_mid)?;
    // ∂_q(½ p·M⁻¹p) = −∂_q(½ v·M v) at v = M⁻¹p
    let force = kinetic_gradient_q(model, &q_mid, &velocity) - model.potential_gradient(&q_mid);

    let mut r = DVector::zeros(2 * d);
    r.rows_mut(0, d).copy_from(&(&q1 - &prev.q - &velocity * h));
    r.rows_mut(d, d).copy_from(&(&p1 - &prev.p - force * h));
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue("canonical midpoint residual"));
    }
    Ok(r)
}

/// Integrates the canonical equations with the implicit midpoint rule.
///
/// Velocities in the returned states are recovered as `M(q)⁻¹p`.
pub fn integrate_midpoint_canonical(
    model: &dyn SystemModel,
    q0: &DVector<f64>,
    v0: &DVector<f64>,
    settings: &SolverSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    check_len("q0", model.dim(), q0.len())?;
    check_len("v0", model.dim(), v0.len())?;
    if model.num_constraints() != 0 {
        return Err(Error::InvalidParameter(
            "the canonical midpoint baseline supports unconstrained systems only".into(),
        ));
    }
    let d = model.dim();
    let p0 = model.mass(q0) * v0;
    // fails early with SingularMass for degenerate mass matrices
    inverse_mass_times(model, q0, &p0)?;

    let initial = State {
        t: 0.0,
        q: q0.clone(),
        v: v0.clone(),
        p: p0,
        lambda: DVector::zeros(0),
    };
    let steps = settings.num_steps();
    let mut states = vec![initial];
    let mut diagnostics = vec![StepDiagnostics::evaluate(model, &states[0], 0)?];

    for n in 1..=steps {
        let prev = states.last().expect("non-empty");
        let mut u0 = DVector::zeros(2 * d);
        u0.rows_mut(0, d).copy_from(&prev.q);
        u0.rows_mut(d, d).copy_from(&prev.p);
        let (u, iterations, _) =
            newton(|u| canonical_residual(model, prev, u, settings.h), u0, settings).map_err(|e| e.at_step(n))?;

        let q = u.rows(0, d).into_owned();
        let p = u.rows(d, d).into_owned();
        let v = inverse_mass_times(model, &q, &p)?;
        let next = State {
            t: n as f64 * settings.h,
            q,
            v,
            p,
            lambda: DVector::zeros(0),
        };
        diagnostics.push(StepDiagnostics::evaluate(model, &next, iterations)?);
        states.push(next);
    }

    Ok(Trajectory {
        model_name: model.name().to_string(),
        step_size: settings.h,
        states,
        diagnostics,
    })
}
