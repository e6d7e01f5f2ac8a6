//! Run configuration, read from a TOML document.
//!
//! ```toml
//! seed = 0                 # master seed for trajectories and random checks
//! output_dir = "out"
//! tol = 1e-10              # step-doubling tolerance of the propagator
//!
//! [params]
//! n_particles = 2
//! coupling = 0.1           # three-body coupling g
//! dims = { a = 2, b = 3, c = 3 }
//!
//! [recipe]                 # vacuum | fock_product | exchange | pairing
//! kind = "exchange"
//! theta = 0.7853981633974483
//! phi = 0.0
//!
//! [grid]
//! t_max = 2.0              # same time unit as 1/coupling
//! n_samples = 201
//!
//! [decay]                  # optional, used by the `decay` command
//! kappa = 0.1
//! n_traj = 200
//!
//! [closure]                # optional, used by `run-rates` and `compare`
//! sign_mode = "as_printed" # or "opposite"
//! k2 = { source = "initial" }   # initial | exact | constant (value) | csv (path)
//! ```

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DecayParams, TimeGrid, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::model::{ModeDims, ModelParams};
use crate::moments::SignMode;
use crate::states::StateRecipe;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    pub kappa: f64,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
}

fn default_n_traj() -> usize {
    100
}

/// Where the moment equations take `k2` from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum K2Source {
    /// Frozen at `k2(0)` of the initial state.
    Initial,
    /// Replayed from the exact simulation of the same configuration.
    Exact,
    Constant { value: f64 },
    /// A CSV with `time` (or `t`) and `k2` columns.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureSection {
    #[serde(default = "default_k2_source")]
    pub k2: K2Source,
    #[serde(default)]
    pub sign_mode: SignMode,
}

fn default_k2_source() -> K2Source {
    K2Source::Initial
}

impl Default for ClosureSection {
    fn default() -> Self {
        Self {
            k2: K2Source::Initial,
            sign_mode: SignMode::AsPrinted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    pub recipe: StateRecipe,
    pub grid: TimeGrid,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecaySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureSection>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    /// Two particles in the Exchange state at `θ = π/4`, `g = 0.1`,
    /// dims `(a:2, b:3, c:3)` and `g t_max = 0.2` over 201 samples.
    fn default() -> Self {
        Self {
            params: ModelParams::new(2, 0.1, ModeDims::default()),
            recipe: StateRecipe::exchange(FRAC_PI_4),
            grid: TimeGrid {
                t_max: 2.0,
                n_samples: 201,
            },
            tol: DEFAULT_TOL,
            decay: None,
            closure: None,
            output_dir: default_output_dir(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configuration is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.recipe.validate()?;
        self.grid.validate()?;
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if let Some(decay) = &self.decay {
            self.decay_params_from(decay).validate()?;
        }
        if let Some(ClosureSection {
            k2: K2Source::Constant { value },
            ..
        }) = &self.closure
        {
            if !value.is_finite() {
                return Err(Error::Config("closure constant must be finite".into()));
            }
        }
        Ok(())
    }

    fn decay_params_from(&self, d: &DecaySection) -> DecayParams {
        DecayParams {
            kappa: d.kappa,
            n_traj: d.n_traj,
            seed: self.seed,
        }
    }

    /// Decay parameters, seeded with the run seed; errors when the config
    /// has no `[decay]` section.
    pub fn decay_params(&self) -> Result<DecayParams> {
        self.decay
            .as_ref()
            .map(|d| self.decay_params_from(d))
            .ok_or_else(|| Error::Config("missing [decay] section".into()))
    }

    pub fn closure_section(&self) -> ClosureSection {
        self.closure.clone().unwrap_or_default()
    }

    pub fn with_output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self
    }
}
