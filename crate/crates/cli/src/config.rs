//! Config documents for each subcommand.
//!
//! Every document is TOML with unknown keys rejected. Command-line flags override
//! the corresponding keys, and the merged value is what gets echoed into result
//! headers.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::Rotation3;
use qframe_core::herm_space::{density_from_bloch, pure_state, HermitianOp};
use qframe_core::povm::{rotation_from_quaternion, Solid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A qubit state given either as a Bloch vector or as pure-state angles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
}

impl StateSpec {
    pub fn angles(theta: f64, phi: f64) -> Self {
        Self {
            theta: Some(theta),
            phi: Some(phi),
            bloch: None,
        }
    }

    pub fn bloch(r: [f64; 3]) -> Self {
        Self {
            theta: None,
            phi: None,
            bloch: Some(r),
        }
    }

    pub fn to_density(&self, what: &str) -> Result<HermitianOp, CliError> {
        match (self.theta, self.phi, self.bloch) {
            (Some(t), phi, None) => Ok(pure_state(t, phi.unwrap_or(0.0))),
            (None, None, Some(r)) => {
                density_from_bloch(r).map_err(|e| CliError::Validation(format!("{what}: {e}")))
            }
            _ => Err(CliError::Validation(format!(
                "{what}: give either theta (and optionally phi) or bloch"
            ))),
        }
    }
}

/// Orientation from a quaternion `[w, x, y, z]` or Euler angles `[roll, pitch, yaw]`.
pub fn resolve_rotation(
    rotation: Option<[f64; 4]>,
    euler: Option<[f64; 3]>,
) -> Result<Rotation3<f64>, CliError> {
    match (rotation, euler) {
        (None, None) => Ok(Rotation3::identity()),
        (Some(q), None) => {
            rotation_from_quaternion(q).map_err(|e| CliError::Validation(e.to_string()))
        }
        (None, Some([r, p, y])) => {
            if [r, p, y].iter().all(|x| x.is_finite()) {
                Ok(Rotation3::from_euler_angles(r, p, y))
            } else {
                Err(CliError::Validation("euler angles must be finite".into()))
            }
        }
        (Some(_), Some(_)) => Err(CliError::Validation(
            "rotation and euler are mutually exclusive".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solid: Option<Solid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// A POVM document with explicit element matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export: Option<PathBuf>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default = "default_estimate_solids")]
    pub solids: Vec<Solid>,
    #[serde(default = "default_estimate_shots")]
    pub shots: Vec<u64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_estimate_state")]
    pub state: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<[f64; 3]>,
    #[serde(default)]
    pub force_exact_frequencies: bool,
    #[serde(default)]
    pub self_check: bool,
    /// Self-check threshold in standard errors.
    #[serde(default = "default_self_check_sigma")]
    pub self_check_sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QdocConfig {
    #[serde(default = "default_qdoc_solids")]
    pub solids: Vec<Solid>,
    #[serde(default = "default_qdoc_shots")]
    pub shots: Vec<u64>,
    #[serde(default = "default_rho0")]
    pub rho0: StateSpec,
    #[serde(default = "default_rho1")]
    pub rho1: StateSpec,
    #[serde(default = "default_q0")]
    pub q0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<[f64; 3]>,
    #[serde(default = "default_enumeration_cap")]
    pub enumeration_cap: u64,
    /// Use Monte Carlo for cells whose enumeration exceeds the cap.
    #[serde(default)]
    pub monte_carlo_fallback: bool,
    /// Also emit Monte Carlo rows and exact rows on the same threshold grid.
    #[serde(default)]
    pub compare_monte_carlo: bool,
    #[serde(default = "default_mc_samples")]
    pub monte_carlo_samples: usize,
    #[serde(default)]
    pub envelope: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientSweepConfig {
    #[serde(default = "default_sweep_solids")]
    pub solids: Vec<Solid>,
    #[serde(default = "default_sweep_shots")]
    pub shots: u64,
    #[serde(default = "default_rho0")]
    pub rho0: StateSpec,
    #[serde(default = "default_rho1")]
    pub rho1: StateSpec,
    #[serde(default = "default_q0")]
    pub q0: f64,
    #[serde(default = "default_axes")]
    pub axes: usize,
    #[serde(default = "default_angles")]
    pub angles: usize,
    /// Explicit rotation set; replaces the Fibonacci grid when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    #[serde(default = "default_moments_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_moments_shots")]
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<f64>>,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_tolerance() -> f64 {
    1e-10
}
fn default_estimate_solids() -> Vec<Solid> {
    vec![
        Solid::Tetrahedron,
        Solid::Octahedron,
        Solid::Cube,
        Solid::Icosahedron,
    ]
}
fn default_estimate_shots() -> Vec<u64> {
    vec![5, 10, 50]
}
fn default_trials() -> usize {
    qframe_core::estimation::DEFAULT_TRIALS
}
fn default_estimate_state() -> StateSpec {
    StateSpec::angles(2.0 * PI / 3.0, 0.0)
}
fn default_self_check_sigma() -> f64 {
    5.0
}
fn default_qdoc_solids() -> Vec<Solid> {
    vec![Solid::Tetrahedron, Solid::Octahedron]
}
fn default_qdoc_shots() -> Vec<u64> {
    vec![5, 10, 20]
}
fn default_rho0() -> StateSpec {
    StateSpec::angles(0.0, 0.0)
}
fn default_rho1() -> StateSpec {
    StateSpec::angles(2.0 * PI / 3.0, PI / 3.0)
}
fn default_q0() -> f64 {
    0.5
}
fn default_enumeration_cap() -> u64 {
    qframe_core::detection::DEFAULT_ENUM_CAP as u64
}
fn default_mc_samples() -> usize {
    100_000
}
fn default_sweep_solids() -> Vec<Solid> {
    vec![
        Solid::AntipodalPair,
        Solid::Tetrahedron,
        Solid::Octahedron,
        Solid::Cube,
    ]
}
fn default_sweep_shots() -> u64 {
    10
}
fn default_axes() -> usize {
    qframe_core::detection::DEFAULT_SWEEP_AXES
}
fn default_angles() -> usize {
    qframe_core::detection::DEFAULT_SWEEP_ANGLES
}
fn default_moments_p() -> Vec<f64> {
    vec![0.5, 0.5]
}
fn default_moments_shots() -> u64 {
    4
}
fn default_draws() -> usize {
    100_000
}

macro_rules! empty_default {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                toml::from_str("").expect("defaults deserialize")
            }
        }
    )*};
}
empty_default!(
    VerifyConfig,
    EstimateConfig,
    QdocConfig,
    OrientSweepConfig,
    MomentsConfig
);

/// Reads a config document, or the defaults when no path is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
            parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))
        }
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, toml::de::Error> {
    toml::from_str(text)
}

/// Canonical TOML for a resolved config.
pub fn render<T: Serialize>(cfg: &T) -> String {
    toml::to_string(cfg).expect("config serializes")
}
