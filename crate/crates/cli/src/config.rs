//! Scenario files: one `key = value` per line, lists in brackets.
//!
//! ```text
//! n_x = 6
//! n_y = 6
//! diffusivity = 0.002
//! t_final = 3.0
//! steps = 6
//! splitting = "strang"
//! profile = "couette"        # or coefficients: [0.0, 2.0, -1.0]
//! bc_y = "neumann"
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use qscalar::reference::ScalarField;
use qscalar::splitting::pulse_field;
use qscalar::{BoundaryKind, Profile64, ProfileLabel, Scenario64, Splitting, State64};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Name(String),
    Coefficients(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    /// `exp(-100 (x - L/2)²)`, uniform in y.
    Pulse,
    Constant,
    Basis(usize),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n_x: usize,
    #[serde(default)]
    n_y: usize,
    length: Option<f64>,
    velocity: Option<f64>,
    #[serde(default)]
    diffusivity: f64,
    #[serde(default)]
    t_final: f64,
    steps: Option<usize>,
    splitting: Option<String>,
    profile: ProfileSpec,
    bc_x: Option<String>,
    bc_y: Option<String>,
    checkpoints: Option<usize>,
    #[serde(default)]
    merge_half_steps: bool,
    initial: Option<String>,
    basis_index: Option<usize>,
    reference_steps: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: Scenario64,
    pub initial: Initial,
    /// Step count of the fine self-reference in step sweeps.
    pub reference_steps: Option<usize>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: FileConfig = toml::from_str(text)?;
        let profile = match &raw.profile {
            ProfileSpec::Name(name) => {
                let label: ProfileLabel = name.parse()?;
                Profile64::named(label)?
            }
            ProfileSpec::Coefficients(c) => Profile64::custom(c.clone())?,
        };
        let mut config = Scenario64::new(raw.n_x, raw.n_y, profile);
        if let Some(v) = raw.length {
            config.length = v;
        }
        if let Some(v) = raw.velocity {
            config.velocity = v;
        }
        config.diffusivity = raw.diffusivity;
        config.t_final = raw.t_final;
        if let Some(v) = raw.steps {
            config.steps = v;
        }
        if let Some(s) = &raw.splitting {
            config.splitting = s.parse()?;
        }
        if let Some(s) = &raw.bc_x {
            config.bc_x = s.parse()?;
        }
        if let Some(s) = &raw.bc_y {
            config.bc_y = s.parse()?;
        }
        if let Some(v) = raw.checkpoints {
            config.checkpoints = v;
        }
        config.merge_half_steps = raw.merge_half_steps;
        config.validate()?;

        let initial = match raw.initial.as_deref().unwrap_or("pulse") {
            "pulse" => Initial::Pulse,
            "constant" => Initial::Constant,
            "basis" => {
                let index = raw.basis_index.context("initial = \"basis\" needs basis_index")?;
                if index >= 1usize << (raw.n_x + raw.n_y) {
                    bail!("basis_index {index} outside the register");
                }
                Initial::Basis(index)
            }
            other => bail!("unknown initial condition '{other}' (pulse, constant, basis)"),
        };
        Ok(Self {
            config,
            initial,
            reference_steps: raw.reference_steps,
        })
    }

    pub fn with_splitting(mut self, splitting: Option<Splitting>) -> Self {
        if let Some(s) = splitting {
            self.config.splitting = s;
        }
        self
    }

    pub fn initial_state(&self) -> Result<State64> {
        let c = &self.config;
        Ok(match self.initial {
            Initial::Pulse => pulse_field(c.points_x(), c.points_y(), c.length)?.to_state()?,
            Initial::Constant => {
                ScalarField::from_fn(c.points_x(), c.points_y(), c.length, |_, _| 1.0)?.to_state()?
            }
            Initial::Basis(i) => State64::basis(c.main_qubits(), i)?,
        })
    }

    /// The analytic pulse applies to uniform 1D flow on a periodic line.
    pub fn has_analytic_solution(&self) -> bool {
        self.initial == Initial::Pulse
            && self.config.n_y == 0
            && self.config.profile.is_uniform()
            && self.config.bc_x == BoundaryKind::Periodic
    }
}
