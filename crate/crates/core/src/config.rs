//! Run configuration files.
//!
//! A configuration is a flat list of `key = value` lines. Keys are dotted
//! paths (`solver.h`, `params.EA`), so the document maps directly onto a
//! nested JSON object. Blank lines and `#` comments are ignored.
//!
//! ```text
//! model = spring_pendulum
//! params.EA = 300
//! initial.q0 = 1.05, 1.5707963267948966, 0
//! initial.v0 = 0, 1, 1
//! solver.h = 0.01
//! solver.T = 1
//! output.dir = out/pendulum
//! ```
//!
//! | key                    | required | default                         |
//! |------------------------|----------|---------------------------------|
//! | `model`                | yes      |                                 |
//! | `params.<name>`        | no       | model defaults                  |
//! | `initial.q0`           | no       | model default initial state     |
//! | `initial.v0`           | no       | model default initial state     |
//! | `solver.h`             | yes      |                                 |
//! | `solver.T`             | yes      |                                 |
//! | `solver.eps_newton`    | no       | `1e-9`                          |
//! | `solver.max_iter`      | no       | `50`                            |
//! | `solver.eps_dd`        | no       | `1e-10`                         |
//! | `solver.fd_step_scale` | no       | `1e-7`                          |
//! | `solver.criterion`     | no       | `residual_and_increment`        |
//! | `output.dir`           | no       | `out`                           |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::integrator::{NewtonCriterion, SolverSettings};
use crate::models::{parameter_keys, BuiltinModel};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub q0: DVector<f64>,
    pub v0: DVector<f64>,
    pub settings: SolverSettings,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn build_model(&self) -> Result<BuiltinModel> {
        BuiltinModel::from_name(&self.model, &self.params)
    }

    /// Re-checks every invariant; used after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        let model = self.build_model()?;
        let d = model.as_model().dim();
        for (key, x) in [("initial.q0", &self.q0), ("initial.v0", &self.v0)] {
            if x.len() != d {
                return Err(Error::Validation(format!(
                    "{key} has {} entries but model `{}` has {d} coordinates",
                    x.len(),
                    self.model
                )));
            }
        }
        self.settings.validate()
    }

    /// Serializes to the configuration format; `parse_config` inverts it.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let list = |x: &DVector<f64>| x.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(", ");
        let s = &self.settings;
        writeln!(out, "model = {}", self.model).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "params.{k} = {v:?}").unwrap();
        }
        writeln!(out, "initial.q0 = {}", list(&self.q0)).unwrap();
        writeln!(out, "initial.v0 = {}", list(&self.v0)).unwrap();
        writeln!(out, "solver.h = {:?}", s.h).unwrap();
        writeln!(out, "solver.T = {:?}", s.t_end).unwrap();
        writeln!(out, "solver.eps_newton = {:?}", s.eps_newton).unwrap();
        writeln!(out, "solver.max_iter = {}", s.max_iter).unwrap();
        writeln!(out, "solver.eps_dd = {:?}", s.eps_dd).unwrap();
        writeln!(out, "solver.fd_step_scale = {:?}", s.fd_step_scale).unwrap();
        writeln!(out, "solver.criterion = {}", s.criterion.as_str()).unwrap();
        writeln!(out, "output.dir = {}", self.output_dir.display()).unwrap();
        out
    }
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_number(entry: &Entry, key: &str) -> Result<f64> {
    entry.value.parse::<f64>().map_err(|_| Error::Parse {
        line: entry.line,
        message: format!("`{key}` expects a number, got `{}`", entry.value),
    })
}

fn parse_vector(entry: &Entry, key: &str) -> Result<DVector<f64>> {
    let body = entry.value.trim();
    let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).unwrap_or(body);
    let values = body
        .split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| Error::Parse {
                line: entry.line,
                message: format!("`{key}` expects comma-separated numbers, got `{}`", t.trim()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(values))
}

fn unquote(s: &str) -> &str {
    s.strip_prefix('"').and_then(|x| x.strip_suffix('"')).unwrap_or(s)
}

/// Parses and validates a run configuration, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), unquote(value.trim()));
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty key or value".into(),
            });
        }
        if let Some(prev) = entries.get(key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}` (first set on line {})", prev.line),
            });
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }

    let model = entries
        .remove("model")
        .ok_or_else(|| Error::Validation("missing required key `model`".into()))?
        .value;
    let known = parameter_keys(&model).ok_or_else(|| Error::Validation(format!("unknown model `{model}`")))?;

    let mut params = BTreeMap::new();
    let mut settings = SolverSettings::default();
    let mut q0 = None;
    let mut v0 = None;
    let mut output_dir = PathBuf::from("out");
    let (mut have_h, mut have_t) = (false, false);

    for (key, entry) in &entries {
        match key.as_str() {
            "initial.q0" => q0 = Some(parse_vector(entry, key)?),
            "initial.v0" => v0 = Some(parse_vector(entry, key)?),
            "solver.h" => {
                settings.h = parse_number(entry, key)?;
                have_h = true;
            }
            "solver.T" => {
                settings.t_end = parse_number(entry, key)?;
                have_t = true;
            }
            "solver.eps_newton" => settings.eps_newton = parse_number(entry, key)?,
            "solver.eps_dd" => settings.eps_dd = parse_number(entry, key)?,
            "solver.fd_step_scale" => settings.fd_step_scale = parse_number(entry, key)?,
            "solver.max_iter" => {
                settings.max_iter = entry.value.parse().map_err(|_| Error::Parse {
                    line: entry.line,
                    message: format!("`{key}` expects a non-negative integer, got `{}`", entry.value),
                })?
            }
            "solver.criterion" => {
                settings.criterion = NewtonCriterion::parse(&entry.value).ok_or_else(|| Error::Parse {
                    line: entry.line,
                    message: format!(
                        "`{key}` expects `residual` or `residual_and_increment`, got `{}`",
                        entry.value
                    ),
                })?
            }
            "output.dir" => output_dir = PathBuf::from(&entry.value),
            other => match other.strip_prefix("params.") {
                Some(name) if known.contains(&name) => {
                    params.insert(name.to_string(), parse_number(entry, key)?);
                }
                Some(name) => {
                    return Err(Error::Validation(format!(
                        "line {}: model `{model}` has no parameter `{name}`",
                        entry.line
                    )))
                }
                None => {
                    return Err(Error::Parse {
                        line: entry.line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            },
        }
    }
    if !have_h {
        return Err(Error::Validation("missing required key `solver.h`".into()));
    }
    if !have_t {
        return Err(Error::Validation("missing required key `solver.T`".into()));
    }

    let built = BuiltinModel::from_name(&model, &params)?;
    let (dq, dv) = built.default_initial_conditions();
    let config = RunConfig {
        model,
        params,
        q0: q0.unwrap_or(dq),
        v0: v0.unwrap_or(dv),
        settings,
        output_dir,
    };
    config.validate()?;
    Ok(config)
}
