//! Gonzalez discrete gradients.
//!
//! For a scalar field `f` and two points `x`, `y` the discrete gradient is
//!
//! ```text
//! D̄f(x, y) = Df(z) + (f(y) − f(x) − Df(z)·w) / ‖w‖² · w,   z = ½(x + y), w = y − x
//! ```
//!
//! It satisfies the directionality identity `D̄f(x, y)·(y − x) = f(y) − f(x)`
//! for any choice of the midpoint gradient `Df(z)`, which is what makes the
//! time-stepping scheme energy-consistent. Below a relative increment of
//! `eps_dd` the correction term is dropped and `Df(z)` is returned.
//!
//! The Lagrangian is split as `L = T − V`: kinetic energy is differentiated
//! as one field of the stacked variable `(q, v)` and the potential as a field
//! of `q` alone. For a constant mass matrix `T` is quadratic, so its discrete
//! gradient reduces to the midpoint gradient and `D̄₂L = M v^{n+1/2}` exactly.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::model::SystemModel;

/// Default relative threshold below which an increment is treated as zero.
pub const DEFAULT_EPS_DD: f64 = 1e-10;

/// A differentiable scalar function on `R^k`.
pub trait ScalarField {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// A [`ScalarField`] assembled from two closures.
pub struct FnField<F, G> {
    dim: usize,
    value: F,
    gradient: G,
}

impl<F, G> FnField<F, G>
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    pub fn new(dim: usize, value: F, gradient: G) -> Self {
        Self { dim, value, gradient }
    }
}

impl<F, G> ScalarField for FnField<F, G>
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(x)
    }
}

/// Gonzalez discrete gradient of `field` between `x` and `y`.
pub fn discrete_gradient(
    field: &dyn ScalarField,
    x: &DVector<f64>,
    y: &DVector<f64>,
    eps_dd: f64,
) -> Result<DVector<f64>> {
    check_len("discrete gradient point x", field.dim(), x.len())?;
    check_len("discrete gradient point y", field.dim(), y.len())?;
    if !(eps_dd > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps_dd must be positive, got {eps_dd}"
        )));
    }

    let z = (x + y) * 0.5;
    let grad_mid = field.gradient(&z);
    if grad_mid.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteValue("field gradient"));
    }

    let w = y - x;
    let w_norm = w.norm();
    let scale = 1f64.max(x.norm()).max(y.norm());
    if w_norm < eps_dd * scale {
        return Ok(grad_mid);
    }

    let fx = field.value(x);
    let fy = field.value(y);
    if !fx.is_finite() || !fy.is_finite() {
        return Err(Error::NonFiniteValue("field value"));
    }
    let correction = (fy - fx - grad_mid.dot(&w)) / (w_norm * w_norm);
    Ok(grad_mid + w * correction)
}

/// Kinetic energy `½ v·M(q)v` as a field of the stacked variable `(q, v)`.
pub struct KineticField<'a> {
    model: &'a dyn SystemModel,
}

impl<'a> KineticField<'a> {
    pub fn new(model: &'a dyn SystemModel) -> Self {
        Self { model }
    }

    fn split(&self, w: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let d = self.model.dim();
        (w.rows(0, d).into_owned(), w.rows(d, d).into_owned())
    }
}

impl ScalarField for KineticField<'_> {
    fn dim(&self) -> usize {
        2 * self.model.dim()
    }

    fn value(&self, w: &DVector<f64>) -> f64 {
        let (q, v) = self.split(w);
        0.5 * v.dot(&(self.model.mass(&q) * &v))
    }

    fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        let d = self.model.dim();
        let (q, v) = self.split(w);
        let dq = kinetic_gradient_q(self.model, &q, &v);
        let dv = self.model.mass(&q) * &v;
        let mut g = DVector::zeros(2 * d);
        g.rows_mut(0, d).copy_from(&dq);
        g.rows_mut(d, d).copy_from(&dv);
        g
    }
}

/// `∂/∂q (½ v·M(q)v)`, analytic when the model provides it and by central
/// differences otherwise.
pub fn kinetic_gradient_q(model: &dyn SystemModel, q: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    if let Some(g) = model.kinetic_gradient_q(q, v) {
        return g;
    }
    let kinetic = |q: &DVector<f64>| 0.5 * v.dot(&(model.mass(q) * v));
    let mut shifted = q.clone();
    DVector::from_iterator(
        q.len(),
        (0..q.len()).map(|j| {
            let delta = 6e-6 * q[j].abs().max(1.0);
            shifted[j] = q[j] + delta;
            let up = kinetic(&shifted);
            shifted[j] = q[j] - delta;
            let down = kinetic(&shifted);
            shifted[j] = q[j];
            (up - down) / (2.0 * delta)
        }),
    )
}

/// The potential `V(q)` as a scalar field.
pub struct PotentialField<'a> {
    model: &'a dyn SystemModel,
}

impl<'a> PotentialField<'a> {
    pub fn new(model: &'a dyn SystemModel) -> Self {
        Self { model }
    }
}

impl ScalarField for PotentialField<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn value(&self, q: &DVector<f64>) -> f64 {
        self.model.potential(q)
    }

    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.model.potential_gradient(q)
    }
}

/// A single constraint function `g_k(q)`.
pub struct ConstraintField<'a> {
    model: &'a dyn SystemModel,
    index: usize,
}

impl<'a> ConstraintField<'a> {
    pub fn new(model: &'a dyn SystemModel, index: usize) -> Self {
        Self { model, index }
    }
}

impl ScalarField for ConstraintField<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn value(&self, q: &DVector<f64>) -> f64 {
        self.model.constraints(q)[self.index]
    }

    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.model.constraint_jacobian(q).row(self.index).transpose()
    }
}

/// Partitioned discrete derivatives `(D̄₁L, D̄₂L)` of the Lagrangian between
/// `(q^n, v^n)` and `(q^{n+1}, v^{n+1})`.
///
/// Satisfies `D̄₁L·Δq + D̄₂L·Δv = L(q^{n+1}, v^{n+1}) − L(q^n, v^n)`.
pub fn partitioned_discrete_gradient_lagrangian(
    model: &dyn SystemModel,
    qn: &DVector<f64>,
    vn: &DVector<f64>,
    qn1: &DVector<f64>,
    vn1: &DVector<f64>,
    eps_dd: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let d = model.dim();
    for (what, x) in [("q^n", qn), ("v^n", vn), ("q^{n+1}", qn1), ("v^{n+1}", vn1)] {
        check_len(what, d, x.len())?;
    }

    let stack = |q: &DVector<f64>, v: &DVector<f64>| {
        let mut w = DVector::zeros(2 * d);
        w.rows_mut(0, d).copy_from(q);
        w.rows_mut(d, d).copy_from(v);
        w
    };
    let dt = discrete_gradient(&KineticField::new(model), &stack(qn, vn), &stack(qn1, vn1), eps_dd)?;
    let dv = discrete_gradient(&PotentialField::new(model), qn, qn1, eps_dd)?;

    let d1 = dt.rows(0, d) - dv;
    let d2 = dt.rows(d, d).into_owned();
    Ok((d1, d2))
}

/// Discrete gradients of each constraint between `q^n` and `q^{n+1}`, one row
/// per constraint.
pub fn discrete_constraint_gradients(
    model: &dyn SystemModel,
    qn: &DVector<f64>,
    qn1: &DVector<f64>,
    eps_dd: f64,
) -> Result<DMatrix<f64>> {
    let (d, m) = (model.dim(), model.num_constraints());
    check_len("q^n", d, qn.len())?;
    check_len("q^{n+1}", d, qn1.len())?;
    let mut out = DMatrix::zeros(m, d);
    for k in 0..m {
        let row = discrete_gradient(&ConstraintField::new(model, k), qn, qn1, eps_dd)?;
        out.set_row(k, &row.transpose());
    }
    Ok(out)
}
