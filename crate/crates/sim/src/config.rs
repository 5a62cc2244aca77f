//! Device configuration files.
//!
//! ```toml
//! [qubit.A]
//! role = "target"
//! anharmonicity_MHz = 375.0
//! detuning_MHz = 245.0
//!
//! [qubit.B]
//! role = "auxiliary"
//! anharmonicity_MHz = 350.0
//!
//! [[coupling]]
//! a = "A"
//! b = "B"
//! g_MHz = 11.41
//! ```
//!
//! Frequencies are ordinary frequencies in MHz; they are converted to rad/s
//! on load. Qubit order in the file is the register order.

use std::path::Path;

use indexmap::IndexMap;
use nhqc_core::{mhz, Coupling, DeviceError, LatticeModel, Role, TransmonSpec, TAU};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid device: {0}")]
    Device(#[from] DeviceError),
    #[error("unknown role `{role}` for qubit `{label}` (expected target or auxiliary)")]
    Role { label: String, role: String },
    #[error("{0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QubitEntry {
    role: String,
    #[serde(rename = "anharmonicity_MHz")]
    anharmonicity_mhz: f64,
    #[serde(rename = "detuning_MHz", default)]
    detuning_mhz: f64,
    #[serde(default = "default_levels")]
    levels: usize,
}

fn default_levels() -> usize {
    TransmonSpec::DEFAULT_LEVELS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingEntry {
    a: String,
    b: String,
    #[serde(rename = "g_MHz")]
    g_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DeviceFile {
    qubit: IndexMap<String, QubitEntry>,
    #[serde(default)]
    coupling: Vec<CouplingEntry>,
}

fn to_mhz(angular: f64) -> f64 {
    angular / (TAU * 1e6)
}

fn parse_role(label: &str, role: &str) -> Result<Role, ConfigError> {
    match role {
        "target" => Ok(Role::Target),
        "auxiliary" => Ok(Role::Auxiliary),
        other => Err(ConfigError::Role { label: label.into(), role: other.into() }),
    }
}

/// Parses and validates a device description.
pub fn parse_lattice(text: &str) -> Result<LatticeModel, ConfigError> {
    let file: DeviceFile = toml::from_str(text)?;
    lattice_from_file(&file)
}

fn lattice_from_file(file: &DeviceFile) -> Result<LatticeModel, ConfigError> {
    let mut qubits = Vec::with_capacity(file.qubit.len());
    for (label, q) in &file.qubit {
        qubits.push(TransmonSpec {
            label: label.clone(),
            role: parse_role(label, &q.role)?,
            anharmonicity: mhz(q.anharmonicity_mhz),
            detuning: mhz(q.detuning_mhz),
            levels: q.levels,
        });
    }
    let couplings = file.coupling.iter().map(|c| Coupling::new(&c.a, &c.b, mhz(c.g_mhz))).collect();
    Ok(LatticeModel::new(qubits, couplings)?)
}

/// Reads a device description from disk.
pub fn load_lattice(path: &Path) -> Result<LatticeModel, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_lattice(&text)
}

/// Writes `model` in the config format; `parse_lattice` reads it back.
pub fn serialize_lattice(model: &LatticeModel) -> String {
    let file = DeviceFile {
        qubit: model
            .qubits()
            .iter()
            .map(|q| {
                (
                    q.label.clone(),
                    QubitEntry {
                        role: q.role.as_str().into(),
                        anharmonicity_mhz: to_mhz(q.anharmonicity),
                        detuning_mhz: to_mhz(q.detuning),
                        levels: q.levels,
                    },
                )
            })
            .collect(),
        coupling: model
            .couplings()
            .iter()
            .map(|c| CouplingEntry { a: c.a.clone(), b: c.b.clone(), g_mhz: to_mhz(c.g) })
            .collect(),
    };
    toml::to_string(&file).expect("device description always serializes")
}

/// Checks that every qubit and coupling of `pinned` appears in `given` with
/// the same parameters (relative tolerance 1e-9).
pub fn check_matches(given: &LatticeModel, pinned: &LatticeModel) -> Result<(), ConfigError> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
    for q in pinned.qubits() {
        let g = given
            .qubit(&q.label)
            .map_err(|_| ConfigError::Mismatch(format!("qubit `{}` missing from config", q.label)))?;
        if g.role != q.role
            || g.levels != q.levels
            || !close(g.anharmonicity, q.anharmonicity)
            || !close(g.detuning, q.detuning)
        {
            return Err(ConfigError::Mismatch(format!(
                "qubit `{}` differs from the scenario's pinned parameters",
                q.label
            )));
        }
    }
    for c in pinned.couplings() {
        match given.coupling(&c.a, &c.b) {
            Some(g) if close(g.g, c.g) => {}
            _ => {
                return Err(ConfigError::Mismatch(format!(
                    "coupling {}-{} differs from the scenario's pinned parameters",
                    c.a, c.b
                )))
            }
        }
    }
    Ok(())
}
