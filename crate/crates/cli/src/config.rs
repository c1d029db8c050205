//! JSON model files.
//!
//! ```json
//! { "model": "three_oscillator",
//!   "parameters": { "k": 1.0, "k12": 1.0, "k13": 0.0 },
//!   "actions": 0.5,
//!   "hbar": 1.0 }
//! ```
//!
//! `parameters` takes `k, k12, k13` for `three_oscillator`, `A, B, C` for
//! `two_oscillator`, and `frequencies` plus `matrix` (rows of `S`) for
//! `custom_normal_mode`. `actions` is a number or one value per mode.

use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use torus_entropy::models::{
    three_oscillator_system, two_oscillator_system, ThreeOscillatorParams, TwoOscillatorParams,
};
use torus_entropy::{HBar, NormalModeSystem, TorusSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    ThreeOscillator,
    TwoOscillator,
    CustomNormalMode,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Actions {
    Uniform(f64),
    PerMode(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: ModelKind,
    parameters: serde_json::Value,
    #[serde(default)]
    actions: Option<Actions>,
    #[serde(default)]
    hbar: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThreeRaw {
    k: f64,
    k12: f64,
    k13: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoRaw {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "C")]
    c: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomRaw {
    frequencies: Vec<f64>,
    matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub system: NormalModeSystem,
    pub actions: Option<Actions>,
    pub hbar: HBar,
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::config(e.to_string())
}

impl ModelConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(invalid)?;
        let system = match raw.model {
            ModelKind::ThreeOscillator => {
                let p: ThreeRaw = serde_json::from_value(raw.parameters).map_err(invalid)?;
                three_oscillator_system(&ThreeOscillatorParams {
                    k: p.k,
                    k12: p.k12,
                    k13: p.k13,
                })
                .map_err(invalid)?
            }
            ModelKind::TwoOscillator => {
                let p: TwoRaw = serde_json::from_value(raw.parameters).map_err(invalid)?;
                two_oscillator_system(&TwoOscillatorParams {
                    a: p.a,
                    b: p.b,
                    c: p.c,
                })
                .map_err(invalid)?
            }
            ModelKind::CustomNormalMode => {
                let p: CustomRaw = serde_json::from_value(raw.parameters).map_err(invalid)?;
                let n = p.frequencies.len();
                if p.matrix.len() != n || p.matrix.iter().any(|row| row.len() != n) {
                    return Err(CliError::config(format!(
                        "matrix must be {n}x{n} to match the frequencies"
                    )));
                }
                let s = DMatrix::from_fn(n, n, |r, c| p.matrix[r][c]);
                NormalModeSystem::new(p.frequencies, s, "custom_normal_mode").map_err(invalid)?
            }
        };
        if let Some(Actions::PerMode(v)) = &raw.actions {
            if v.len() != system.n_dof() {
                return Err(CliError::config(format!(
                    "{} actions given for {} modes",
                    v.len(),
                    system.n_dof()
                )));
            }
        }
        let hbar = HBar::new(raw.hbar.unwrap_or(1.0)).map_err(invalid)?;
        let cfg = Self {
            system,
            actions: raw.actions,
            hbar,
        };
        // surface bad action values at load time
        cfg.torus(None)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The uniform action constant: `--beta`, else a uniform config value,
    /// else 1.
    pub fn beta(&self, flag: Option<f64>) -> CliResult<f64> {
        let beta = match (flag, &self.actions) {
            (Some(b), _) => b,
            (None, Some(Actions::Uniform(b))) => *b,
            (None, Some(Actions::PerMode(v))) => TorusSpec::new(v.clone())
                .ok()
                .and_then(|t| t.uniform_value())
                .unwrap_or(1.0),
            (None, None) => 1.0,
        };
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(CliError::config(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(beta)
    }

    /// Actions for covariance output. `--beta` overrides the file.
    pub fn torus(&self, beta_flag: Option<f64>) -> CliResult<TorusSpec> {
        let n = self.system.n_dof();
        let torus = match (beta_flag, &self.actions) {
            (Some(b), _) | (None, &Some(Actions::Uniform(b))) => TorusSpec::uniform(n, b),
            (None, Some(Actions::PerMode(v))) => TorusSpec::new(v.clone()),
            (None, None) => TorusSpec::uniform(n, 1.0),
        };
        torus.map_err(invalid)
    }

    /// Per-mode actions from the file when they are not uniform.
    pub fn non_uniform_actions(&self) -> Option<TorusSpec> {
        match &self.actions {
            Some(Actions::PerMode(v)) => {
                let t = TorusSpec::new(v.clone()).ok()?;
                t.uniform_value().is_none().then_some(t)
            }
            _ => None,
        }
    }
}
