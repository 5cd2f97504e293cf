use nalgebra::{dvector, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Parameters of the two-subsystem mass-spring chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassSpringParams {
    pub m1: f64,
    pub m2: f64,
    pub k1: f64,
    pub k2: f64,
    pub l10: f64,
    /// Carried for completeness; the potential does not depend on it.
    pub l20: f64,
    pub w: f64,
}

impl Default for MassSpringParams {
    fn default() -> Self {
        Self {
            m1: 1.0,
            m2: 1.0,
            k1: 1.0,
            k2: 3.0,
            l10: 1.0,
            l20: 1.0,
            w: 0.1,
        }
    }
}

impl MassSpringParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("m1", self.m1), ("m2", self.m2), ("k1", self.k1), ("k2", self.k2)];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.l10 + self.w > 0.0) || !self.l20.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "l10 + w must be positive, got {}",
                self.l10 + self.w
            )));
        }
        Ok(())
    }
}

/// Mass-spring system in redundant coordinates `(x₁, q₂, x₂)` with the
/// interconnection constraint `q₂ = x₁ + l₁₀ + w`.
///
/// The mass matrix is constant and singular:
///
/// ```text
///     | m1  0   0  |
/// M = | 0   m2  m2 |
///     | 0   m2  m2 |
/// ```
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MassSpring {
    params: MassSpringParams,
}

impl MassSpring {
    pub fn new(params: MassSpringParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &MassSpringParams {
        &self.params
    }

    /// Admissible initial state: on the constraint manifold with the hidden
    /// velocity constraint satisfied.
    pub fn default_initial_conditions(&self) -> (DVector<f64>, DVector<f64>) {
        (
            dvector![0.0, self.params.l10 + self.params.w, 0.0],
            dvector![1.0, 1.0, 0.0],
        )
    }
}

impl SystemModel for MassSpring {
    fn name(&self) -> &str {
        "mass_spring"
    }

    fn dim(&self) -> usize {
        3
    }

    fn num_constraints(&self) -> usize {
        1
    }

    fn mass(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        let MassSpringParams { m1, m2, .. } = self.params;
        DMatrix::from_row_slice(3, 3, &[m1, 0.0, 0.0, 0.0, m2, m2, 0.0, m2, m2])
    }

    fn kinetic_gradient_q(&self, _q: &DVector<f64>, _v: &DVector<f64>) -> Option<DVector<f64>> {
        Some(DVector::zeros(3))
    }

    fn potential(&self, q: &DVector<f64>) -> f64 {
        let (x1, x2) = (q[0], q[2]);
        0.25 * self.params.k1 * (x1.powi(2) + x1.powi(4)) + 0.25 * self.params.k2 * (x2.powi(2) + x2.powi(4))
    }

    fn potential_gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        let (x1, x2) = (q[0], q[2]);
        dvector![
            0.25 * self.params.k1 * (2.0 * x1 + 4.0 * x1.powi(3)),
            0.0,
            0.25 * self.params.k2 * (2.0 * x2 + 4.0 * x2.powi(3))
        ]
    }

    fn constraints(&self, q: &DVector<f64>) -> DVector<f64> {
        let length = self.params.l10 + self.params.w;
        dvector![0.5 * ((q[1] - q[0]).powi(2) - length * length)]
    }

    fn constraint_jacobian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let s = q[1] - q[0];
        DMatrix::from_row_slice(1, 3, &[-s, s, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_mass_matrix_is_singular() {
        let model = MassSpring::default();
        let m = model.mass(&dvector![0.0, 1.1, 0.0]);
        assert_eq!(m.rank(1e-12), 2);
        assert_eq!(m.determinant(), 0.0);
    }

    #[test]
    fn potential_and_gradient() {
        let model = MassSpring::default();
        assert_eq!(model.potential(&dvector![0.0, 42.0, 0.0]), 0.0);
        assert_relative_eq!(
            model.potential_gradient(&dvector![1.0, 0.0, 1.0]),
            dvector![1.5, 0.0, 4.5]
        );
    }

    #[test]
    fn default_initial_conditions_are_admissible() {
        let model = MassSpring::default();
        let (q0, v0) = model.default_initial_conditions();
        assert_eq!(model.constraints(&q0)[0], 0.0);
        assert_eq!((model.constraint_jacobian(&q0) * v0)[0], 0.0);
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = MassSpringParams {
            m1: 0.0,
            ..Default::default()
        };
        assert!(MassSpring::new(bad).is_err());
        let bad = MassSpringParams {
            l10: -1.0,
            w: 0.5,
            ..Default::default()
        };
        assert!(MassSpring::new(bad).is_err());
    }
}
