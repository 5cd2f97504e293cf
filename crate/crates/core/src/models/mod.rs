//! Built-in mechanical systems.

mod harmonic;
mod mass_spring;
mod spring_pendulum;

use std::collections::BTreeMap;

use nalgebra::DVector;

pub use harmonic::HarmonicOscillator;
pub use mass_spring::{MassSpring, MassSpringParams};
pub use spring_pendulum::{PendulumParams, SpringPendulum};

use crate::error::{Error, Result};
use crate::model::SystemModel;

pub fn build_mass_spring(params: MassSpringParams) -> Result<MassSpring> {
    MassSpring::new(params)
}

pub fn build_spring_pendulum(params: PendulumParams) -> Result<SpringPendulum> {
    SpringPendulum::new(params)
}

pub fn build_harmonic_oscillator(mass: f64, stiffness: f64, dim: usize) -> Result<HarmonicOscillator> {
    HarmonicOscillator::new(mass, stiffness, dim)
}

/// Names accepted by [`BuiltinModel::from_name`].
pub const MODEL_NAMES: [&str; 3] = ["mass_spring", "spring_pendulum", "harmonic_oscillator"];

/// Parameter keys each built-in model accepts, in emission order.
pub fn parameter_keys(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "mass_spring" => Some(&["m1", "m2", "k1", "k2", "l10", "l20", "w"]),
        "spring_pendulum" => Some(&["m", "EA", "l0"]),
        "harmonic_oscillator" => Some(&["mass", "stiffness", "dim"]),
        _ => None,
    }
}

/// A built-in model selected by name, e.g. from a run configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinModel {
    MassSpring(MassSpring),
    SpringPendulum(SpringPendulum),
    HarmonicOscillator(HarmonicOscillator),
}

impl BuiltinModel {
    /// Builds the named model, overriding defaults with `params`.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let keys = parameter_keys(name).ok_or_else(|| {
            Error::Validation(format!(
                "unknown model `{name}`, expected one of {}",
                MODEL_NAMES.join(", ")
            ))
        })?;
        if let Some(bad) = params.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(Error::Validation(format!("model `{name}` has no parameter `{bad}`")));
        }
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);

        let model = match name {
            "mass_spring" => {
                let d = MassSpringParams::default();
                BuiltinModel::MassSpring(build_mass_spring(MassSpringParams {
                    m1: get("m1", d.m1),
                    m2: get("m2", d.m2),
                    k1: get("k1", d.k1),
                    k2: get("k2", d.k2),
                    l10: get("l10", d.l10),
                    l20: get("l20", d.l20),
                    w: get("w", d.w),
                })?)
            }
            "spring_pendulum" => {
                let d = PendulumParams::default();
                BuiltinModel::SpringPendulum(build_spring_pendulum(PendulumParams {
                    mass: get("m", d.mass),
                    ea: get("EA", d.ea),
                    l0: get("l0", d.l0),
                })?)
            }
            _ => {
                let dim = get("dim", 1.0);
                if dim.fract() != 0.0 || dim < 1.0 {
                    return Err(Error::Validation(format!("dim must be a positive integer, got {dim}")));
                }
                BuiltinModel::HarmonicOscillator(build_harmonic_oscillator(
                    get("mass", 1.0),
                    get("stiffness", 1.0),
                    dim as usize,
                )?)
            }
        };
        Ok(model)
    }

    pub fn as_model(&self) -> &dyn SystemModel {
        match self {
            BuiltinModel::MassSpring(m) => m,
            BuiltinModel::SpringPendulum(m) => m,
            BuiltinModel::HarmonicOscillator(m) => m,
        }
    }

    pub fn default_initial_conditions(&self) -> (DVector<f64>, DVector<f64>) {
        match self {
            BuiltinModel::MassSpring(m) => m.default_initial_conditions(),
            BuiltinModel::SpringPendulum(m) => m.default_initial_conditions(),
            BuiltinModel::HarmonicOscillator(m) => {
                let mut q0 = DVector::zeros(m.dim());
                q0[0] = 1.0;
                (q0, DVector::zeros(m.dim()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_every_named_model_with_defaults() {
        for name in MODEL_NAMES {
            let m = BuiltinModel::from_name(name, &BTreeMap::new()).unwrap();
            assert_eq!(m.as_model().name(), name);
            let (q0, v0) = m.default_initial_conditions();
            assert_eq!(q0.len(), m.as_model().dim());
            assert_eq!(v0.len(), m.as_model().dim());
        }
    }

    #[test]
    fn overrides_and_unknowns() {
        let params = BTreeMap::from([("EA".to_string(), 100.0)]);
        match BuiltinModel::from_name("spring_pendulum", &params).unwrap() {
            BuiltinModel::SpringPendulum(p) => assert_eq!(p.params().ea, 100.0),
            _ => unreachable!(),
        }
        assert!(matches!(
            BuiltinModel::from_name("double_pendulum", &BTreeMap::new()),
            Err(Error::Validation(_))
        ));
        let params = BTreeMap::from([("EA".to_string(), 100.0)]);
        assert!(BuiltinModel::from_name("mass_spring", &params).is_err());
        let params = BTreeMap::from([("dim".to_string(), 2.5)]);
        assert!(BuiltinModel::from_name("harmonic_oscillator", &params).is_err());
    }
}
