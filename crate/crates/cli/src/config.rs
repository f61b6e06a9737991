//! Study configuration: a single JSON document with unknown keys rejected.

use pedge_core::lattice::Domain;
use pedge_core::vorticity::{ChargedPoint, VorticityMeasure};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Gamma,
    Renorm,
    LineTension,
    Verify,
    DumpField,
    FlatDistance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaModeConfig {
    Screw,
    Pedge,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_tolerance() -> f64 {
    1e-10
}
fn default_max_sweeps() -> usize {
    20_000
}
fn default_restarts() -> usize {
    8
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: default_tolerance(),
            max_sweeps: default_max_sweeps(),
            restarts: default_restarts(),
        }
    }
}

/// Which generated field `dump-field` writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Vortex { center: [f64; 2], degree: i8 },
    HalfVortex { center: [f64; 2], opposite_cuts: bool },
    Recovery { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub experiment: Experiment,
    pub domain: Domain,
    /// Dislocation configuration (points with ±1 charges).
    #[serde(default)]
    pub mu: Vec<ChargedPoint>,
    /// Second measure for flat-distance runs.
    #[serde(default)]
    pub nu: Vec<ChargedPoint>,
    /// Core radius for gamma studies; hole radius for renorm recovery.
    pub sigma: Option<f64>,
    /// `sigma / eps` ladder for gamma studies (geometric).
    #[serde(default)]
    pub ratios: Vec<f64>,
    /// Explicit eps ladder for renormalization studies.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Lattice spacing for dump-field.
    pub epsilon: Option<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub mode: Option<GammaModeConfig>,
    /// Core center for gamma studies; defaults to a point in general
    /// position so ladders avoid lattice commensuration accidents.
    pub x0: Option<[f64; 2]>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
    /// Lattice sizes for the property suite.
    #[serde(default)]
    pub sizes: Vec<usize>,
    pub field: Option<FieldSpec>,
}

fn default_alpha() -> f64 {
    1.0
}

/// A point in general position (irrational coordinates) used as the
/// default core center.
pub fn general_position_center() -> [f64; 2] {
    [0.5f64.sqrt() * 0.01, (1.0f64 / 3.0).sqrt() * 0.01]
}

pub fn measure_from(points: &[ChargedPoint]) -> VorticityMeasure {
    VorticityMeasure::new(points.to_vec())
}

/// Parse a config document; parse errors carry line and column numbers.
pub fn parse_config(text: &str) -> Result<(StudyConfig, String), String> {
    let cfg: StudyConfig = serde_json::from_str(text)
        .map_err(|e| format!("config error at line {}, column {}: {e}", e.line(), e.column()))?;
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let hash = hex_string(&hasher.finalize());
    Ok((cfg, hash))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_gamma_config() {
        let text = r#"{
            "experiment": "gamma",
            "domain": {"kind": "disc", "center": [0.0, 0.0], "radius": 1.0},
            "sigma": 0.5,
            "ratios": [8, 16, 32],
            "mode": "screw"
        }"#;
        let (cfg, hash) = parse_config(text).unwrap();
        assert_eq!(cfg.experiment, Experiment::Gamma);
        assert_eq!(cfg.ratios, vec![8.0, 16.0, 32.0]);
        assert_eq!(hash.len(), 64);
    }

    #[test]
    fn rejects_unknown_keys_with_position() {
        let text = r#"{
            "experiment": "gamma",
            "domain": {"kind": "disc", "center": [0.0, 0.0], "radius": 1.0},
            "sigmas": 0.5
        }"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.contains("line"), "{err}");
        assert!(err.contains("sigmas"), "{err}");
    }
}
