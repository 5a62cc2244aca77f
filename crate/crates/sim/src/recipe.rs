//! Text form of gate recipes, for inspection and replay.
//!
//! One recipe is written as a `[gate]` table, several as `[[gate]]`. Times
//! are in ns and frequencies in MHz (ordinary, not angular); angles are in
//! radians.

use nhqc_core::holonomy::{Branch, GateKind, GateRecipe, SegmentSchedule, Synthesis};
use nhqc_core::{mhz, DriveSpec, ModulationSpec, TAU};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum RecipeError {
    #[error("malformed recipe: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown gate kind `{0}`")]
    Kind(String),
    #[error("unknown branch `{0}`")]
    Branch(String),
    #[error("recipe `{0}` lacks its synthesis parameters")]
    Synthesis(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriveEntry {
    qubit: String,
    #[serde(rename = "amplitude_MHz")]
    amplitude_mhz: f64,
    #[serde(rename = "detuning_MHz")]
    detuning_mhz: f64,
    phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModulationEntry {
    target: String,
    #[serde(rename = "amplitude_MHz")]
    amplitude_mhz: f64,
    #[serde(rename = "frequency_MHz")]
    frequency_mhz: f64,
    phase: f64,
    /// Informational: β = ε/ν.
    index: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentEntry {
    duration_ns: f64,
    auxiliary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    drive: Option<DriveEntry>,
    #[serde(default)]
    modulation: Vec<ModulationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthesisEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mixing_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phases: Option<[f64; 2]>,
    #[serde(rename = "omega_MHz", default, skip_serializing_if = "Option::is_none")]
    omega_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    area: Option<f64>,
    #[serde(rename = "g_MHz", default, skip_serializing_if = "Option::is_none")]
    g_mhz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateEntry {
    kind: String,
    angle: f64,
    #[serde(default)]
    phase: f64,
    targets: Vec<String>,
    auxiliary: String,
    total_duration_ns: f64,
    synthesis: SynthesisEntry,
    segment: Vec<SegmentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(GateEntry),
    Many(Vec<GateEntry>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RecipeFile {
    gate: OneOrMany,
}

fn to_mhz(angular: f64) -> f64 {
    angular / (TAU * 1e6)
}

fn entry(recipe: &GateRecipe) -> GateEntry {
    let (angle, phase) = match recipe.kind {
        GateKind::RotY { theta } => (theta, 0.0),
        GateKind::RotZ { gamma } => (gamma, 0.0),
        GateKind::TwoQubit { vartheta, varphi } => (vartheta, varphi),
    };
    let synthesis = match recipe.synthesis {
        Synthesis::SingleQubit { mixing_angle, branch, phases, omega, a } => SynthesisEntry {
            mixing_angle: Some(mixing_angle),
            branch: Some(branch.as_str().into()),
            phases: Some(phases),
            omega_mhz: Some(to_mhz(omega)),
            area: Some(a),
            g_mhz: None,
        },
        Synthesis::TwoQubit { g, .. } => SynthesisEntry {
            mixing_angle: None,
            branch: None,
            phases: None,
            omega_mhz: None,
            area: None,
            g_mhz: Some(to_mhz(g)),
        },
    };
    GateEntry {
        kind: recipe.kind.name().into(),
        angle,
        phase,
        targets: recipe.targets.clone(),
        auxiliary: recipe.auxiliary.clone(),
        total_duration_ns: recipe.duration() * 1e9,
        synthesis,
        segment: recipe
            .segments
            .iter()
            .map(|s| SegmentEntry {
                duration_ns: s.duration * 1e9,
                auxiliary: s.auxiliary.clone(),
                drive: s.drive.as_ref().map(|d| DriveEntry {
                    qubit: d.qubit.clone(),
                    amplitude_mhz: to_mhz(d.amplitude),
                    detuning_mhz: to_mhz(d.detuning),
                    phase: d.phase,
                }),
                modulation: s
                    .modulations
                    .iter()
                    .map(|m| ModulationEntry {
                        target: m.target.clone(),
                        amplitude_mhz: to_mhz(m.amplitude),
                        frequency_mhz: to_mhz(m.frequency),
                        phase: m.phase,
                        index: m.index(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn recipe_from_entry(e: GateEntry) -> Result<GateRecipe, RecipeError> {
    let kind = match e.kind.as_str() {
        "rot_y" => GateKind::RotY { theta: e.angle },
        "rot_z" => GateKind::RotZ { gamma: e.angle },
        "two_qubit" => GateKind::TwoQubit { vartheta: e.angle, varphi: e.phase },
        other => return Err(RecipeError::Kind(other.into())),
    };
    let s = &e.synthesis;
    let synthesis = match kind {
        GateKind::TwoQubit { vartheta, varphi } => Synthesis::TwoQubit {
            vartheta,
            varphi,
            g: mhz(s.g_mhz.ok_or_else(|| RecipeError::Synthesis(e.kind.clone()))?),
        },
        _ => {
            let missing = || RecipeError::Synthesis(e.kind.clone());
            let branch = match s.branch.as_deref().ok_or_else(missing)? {
                "G_I" => Branch::Identity,
                "G_z" => Branch::PauliZ,
                other => return Err(RecipeError::Branch(other.into())),
            };
            Synthesis::SingleQubit {
                mixing_angle: s.mixing_angle.ok_or_else(missing)?,
                branch,
                phases: s.phases.ok_or_else(missing)?,
                omega: mhz(s.omega_mhz.ok_or_else(missing)?),
                a: s.area.ok_or_else(missing)?,
            }
        }
    };
    let segments = e
        .segment
        .into_iter()
        .map(|s| SegmentSchedule {
            duration: s.duration_ns * 1e-9,
            auxiliary: s.auxiliary,
            drive: s.drive.map(|d| DriveSpec {
                qubit: d.qubit,
                amplitude: mhz(d.amplitude_mhz),
                detuning: mhz(d.detuning_mhz),
                phase: d.phase,
            }),
            modulations: s
                .modulation
                .into_iter()
                .map(|m| ModulationSpec::new(&m.target, mhz(m.amplitude_mhz), mhz(m.frequency_mhz), m.phase))
                .collect(),
        })
        .collect();
    Ok(GateRecipe {
        kind,
        segments,
        ideal_unitary: kind.ideal_unitary(),
        targets: e.targets,
        auxiliary: e.auxiliary,
        synthesis,
    })
}

/// Serializes recipes: a `[gate]` table for one, `[[gate]]` for several.
pub fn dump_recipes(recipes: &[GateRecipe]) -> String {
    let gate = match recipes {
        [one] => OneOrMany::One(entry(one)),
        many => OneOrMany::Many(many.iter().map(entry).collect()),
    };
    toml::to_string(&RecipeFile { gate }).expect("recipes always serialize")
}

/// Reads recipes written by [`dump_recipes`].
pub fn load_recipes(text: &str) -> Result<Vec<GateRecipe>, RecipeError> {
    let file: RecipeFile = toml::from_str(text)?;
    let entries = match file.gate {
        OneOrMany::One(e) => vec![e],
        OneOrMany::Many(v) => v,
    };
    entries.into_iter().map(recipe_from_entry).collect()
}
