//! Named and custom simulation scenarios.
//!
//! A scenario fixes a register, a gate sequence, an input subspace with its
//! ideal images, and the input family used for gate-fidelity averages. A run
//! sweeps the decoherence rate κ, building one process matrix per κ.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use nhqc_core::holonomy::{
    auxiliary_excitation, check_cyclic, check_parallel_transport, make_rot_y, make_rot_z, make_two_qubit,
    EdgeCalibration, GateKind, SingleQubitDevice, SynthesisError, TwoQubitDevice, DEFAULT_MAX_WINDINGS,
};
use nhqc_core::lindblad::{
    collapse_operators, propagate_batch, propagator, Dissipator, EngineError, RelaxationWeight, StepControl,
};
use nhqc_core::metrics::{
    computational_projector, gate_fidelity, leakage, single_qubit_inputs, two_qubit_inputs, CurvePoint, IdealMap,
    MetricsError,
};
use nhqc_core::frame::ModulationTreatment;
use nhqc_core::operator::{compose_index, embed, kron, StateVector};
use nhqc_core::{
    bessel, mhz, ComplexMatrix, Coupling, DensityMatrix, FidelityCurve, GateRecipe, Hamiltonian, LatticeModel,
    NoiseSpec, ProcessMatrix, Role, TransmonSpec, C64, TAU,
};
use rayon::prelude::*;
use serde::Deserialize;

use crate::config::{check_matches, ConfigError};

/// Modulation index used for every edge of the reference device.
pub const REFERENCE_BETA: f64 = 1.6;

/// Drive amplitude of the reference single-qubit gate, MHz.
pub const REFERENCE_DRIVE_MHZ: f64 = 11.26;

/// Phase-gate angle: `diag{e^{−iπ/8}, e^{iπ/8}} ∝ diag{1, e^{iπ/4}}`.
pub const PHASE_GATE_GAMMA: f64 = PI / 8.0;

/// Reference lattice: targets A, C, E around auxiliary B.
pub fn reference_lattice() -> LatticeModel {
    LatticeModel::new(
        vec![
            TransmonSpec::target("A", mhz(375.0), mhz(245.0)),
            TransmonSpec::auxiliary("B", mhz(350.0)),
            TransmonSpec::target("C", mhz(310.0), mhz(230.0)),
            TransmonSpec::target("E", mhz(325.0), mhz(235.0)),
        ],
        vec![
            Coupling::new("A", "B", mhz(11.41)),
            Coupling::new("B", "C", mhz(11.41)),
            Coupling::new("B", "E", mhz(11.41)),
        ],
    )
    .expect("reference lattice is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Interaction-picture Hamiltonian without rotating-wave truncation.
    Full,
    /// Resonant effective Hamiltonian.
    Effective,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Effective => "effective",
        }
    }
}

/// How a κ axis value `v` (quoted as "2π × v kHz") becomes a rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaUnits {
    /// `κ = v·10³ s⁻¹`.
    Hertz,
    /// `κ = 2π·v·10³ rad/s`.
    Angular,
}

impl KappaUnits {
    pub fn rate(self, khz: f64) -> f64 {
        match self {
            KappaUnits::Hertz => khz * 1e3,
            KappaUnits::Angular => TAU * khz * 1e3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KappaUnits::Hertz => "hertz",
            KappaUnits::Angular => "angular",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub mode: Mode,
    /// κ axis values (the `v` of "2π × v kHz"), ascending.
    pub kappa_khz: Vec<f64>,
    pub kappa_units: KappaUnits,
    pub grid_1q: usize,
    pub grid_2q: usize,
    pub max_windings: u32,
    pub relaxation_weight: RelaxationWeight,
    /// Keep every coupling of the register on during every gate.
    pub static_spectators: bool,
    pub step: StepControl,
    /// Retune custom single-qubit gates to the nearest solvable angle.
    pub retune: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            kappa_khz: (0..=10).map(f64::from).collect(),
            kappa_units: KappaUnits::Hertz,
            grid_1q: 1001,
            grid_2q: 100,
            max_windings: DEFAULT_MAX_WINDINGS,
            relaxation_weight: RelaxationWeight::Printed,
            static_spectators: false,
            step: StepControl::default(),
            retune: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("gate synthesis failed: {0}")]
    Synthesis(#[from] SynthesisError),
    #[error("propagation failed: {0}")]
    Engine(#[from] EngineError),
    #[error("metrics failed: {0}")]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Invalid(String),
}

impl ScenarioError {
    /// Process exit code: 2 config, 3 invariant breach, 4 unsolvable duration.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::Invalid(_) => 2,
            ScenarioError::Engine(EngineError::InvariantBreach { .. }) => 3,
            ScenarioError::Synthesis(
                SynthesisError::NoExactSolution { .. } | SynthesisError::DegenerateAngle { .. },
            ) => 4,
            ScenarioError::Synthesis(SynthesisError::Device(_)) => 2,
            _ => 1,
        }
    }
}

/// Input states over which gate fidelities are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFamily {
    /// `cos θ|0⟩ + sin θ|1⟩`, θ on the closed grid over [0, 2π].
    SingleQubit,
    /// Product of two such states, periodic grid.
    TwoQubit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// Register, in simulation order.
    pub model: LatticeModel,
    pub gates: Vec<GateRecipe>,
    /// Register indices spanned by the inputs.
    pub input_indices: Vec<usize>,
    /// Amplitudes of the state-fidelity input on `input_indices`.
    pub state_input: Vec<C64>,
    pub ideal: IdealMap,
    pub family: InputFamily,
    /// `key=value` pairs for the output header.
    pub notes: Vec<(String, String)>,
}

fn note(notes: &mut Vec<(String, String)>, key: &str, value: impl ToString) {
    notes.push((key.to_string(), value.to_string()));
}

fn fmt_mhz(angular: f64) -> String {
    format!("{:.6}MHz", angular / (TAU * 1e6))
}

fn fmt_ns(seconds: f64) -> String {
    format!("{:.4}ns", seconds * 1e9)
}

/// Register indices with `targets` free in {|0⟩, |1⟩} (row-major in the
/// given order) and every other transmon in |0⟩.
pub fn target_subspace(model: &LatticeModel, targets: &[&str]) -> Result<Vec<usize>, ScenarioError> {
    let dims = model.dims();
    let sites: Vec<usize> = targets
        .iter()
        .map(|t| model.index_of(t))
        .collect::<Result<_, _>>()
        .map_err(ConfigError::from)?;
    let k = sites.len();
    Ok((0..1usize << k)
        .map(|bits| {
            let mut levels = vec![0; dims.len()];
            for (j, &s) in sites.iter().enumerate() {
                levels[s] = (bits >> (k - 1 - j)) & 1;
            }
            compose_index(&levels, &dims)
        })
        .collect())
}

/// Computational subspace of the register: targets in {|0⟩, |1⟩},
/// auxiliaries in |0⟩.
pub fn computational_indices(model: &LatticeModel) -> Vec<usize> {
    let targets: Vec<&str> =
        model.qubits().iter().filter(|q| q.role == Role::Target).map(|q| q.label.as_str()).collect();
    target_subspace(model, &targets).expect("labels come from the model")
}

fn auxiliary_sites(model: &LatticeModel) -> Vec<usize> {
    model.qubits().iter().enumerate().filter(|(_, q)| q.role == Role::Auxiliary).map(|(i, _)| i).collect()
}

/// Single-qubit phase gate on `target` via `auxiliary`, retuning the drive to
/// the nearest solvable mixing angle when needed.
fn phase_gate(
    model: &LatticeModel,
    target: &str,
    auxiliary: &str,
    drive_mhz: f64,
    max_windings: u32,
    notes: &mut Vec<(String, String)>,
) -> Result<GateRecipe, ScenarioError> {
    let edge = EdgeCalibration::from_model(model, target, auxiliary, REFERENCE_BETA)?;
    let device = SingleQubitDevice { edge, drive_amplitude: mhz(drive_mhz) };
    let prefix = format!("rot_z_{target}{auxiliary}");
    note(notes, &format!("{prefix}.requested_theta_over_pi"), format!("{:.6}", device.theta()? / PI));
    let recipe = match make_rot_z(PHASE_GATE_GAMMA, &device, max_windings) {
        Ok(r) => r,
        Err(SynthesisError::NoExactSolution { nearest_theta, .. }) => {
            let tuned = device.retuned(nearest_theta)?;
            note(notes, &format!("{prefix}.retuned_drive"), fmt_mhz(tuned.drive_amplitude));
            make_rot_z(PHASE_GATE_GAMMA, &tuned, max_windings)?
        }
        Err(e) => return Err(e.into()),
    };
    describe_recipe(&recipe, &prefix, notes);
    Ok(recipe)
}

fn describe_recipe(recipe: &GateRecipe, prefix: &str, notes: &mut Vec<(String, String)>) {
    use nhqc_core::holonomy::Synthesis;
    match recipe.synthesis {
        Synthesis::SingleQubit { mixing_angle, branch, omega, a, .. } => {
            note(notes, &format!("{prefix}.theta_over_pi"), format!("{:.6}", mixing_angle / PI));
            note(notes, &format!("{prefix}.branch"), branch.as_str());
            note(notes, &format!("{prefix}.omega"), fmt_mhz(omega));
            note(notes, &format!("{prefix}.area_over_pi"), format!("{:.6}", a / PI));
        }
        Synthesis::TwoQubit { vartheta, varphi, g } => {
            note(notes, &format!("{prefix}.vartheta_over_pi"), format!("{:.6}", vartheta / PI));
            note(notes, &format!("{prefix}.varphi_over_pi"), format!("{:.6}", varphi / PI));
            note(notes, &format!("{prefix}.g"), fmt_mhz(g));
        }
    }
    for (k, s) in recipe.segments.iter().enumerate() {
        note(notes, &format!("{prefix}.segment{k}.duration"), fmt_ns(s.duration));
        if let Some(d) = &s.drive {
            note(notes, &format!("{prefix}.segment{k}.drive"), format!("{}:{}@{:.6}rad", d.qubit, fmt_mhz(d.amplitude), d.phase));
        }
        for m in &s.modulations {
            note(
                notes,
                &format!("{prefix}.segment{k}.modulation_{}", m.target),
                format!("beta={:.6},nu={},phase={:.6}rad", m.index(), fmt_mhz(m.frequency), m.phase),
            );
        }
    }
}

fn pinned_register(config: Option<&LatticeModel>, labels: &[&str]) -> Result<LatticeModel, ScenarioError> {
    let model = reference_lattice().subsystem(labels).map_err(ConfigError::from)?;
    if let Some(given) = config {
        check_matches(given, &model)?;
    }
    Ok(model)
}

fn swap_like_device(model: &LatticeModel, first: &str, second: &str) -> Result<TwoQubitDevice, ScenarioError> {
    Ok(TwoQubitDevice {
        first: EdgeCalibration::from_model(model, first, "B", REFERENCE_BETA)?,
        second: EdgeCalibration::from_model(model, second, "B", REFERENCE_BETA)?,
    })
}

/// Phase gate on A through B, input (|00⟩ + |10⟩)/√2.
pub fn fig2(options: &RunOptions, config: Option<&LatticeModel>) -> Result<Scenario, ScenarioError> {
    let model = pinned_register(config, &["A", "B"])?;
    let mut notes = Vec::new();
    note(&mut notes, "scenario", "fig2_up");
    let gate = phase_gate(&model, "A", "B", REFERENCE_DRIVE_MHZ, options.max_windings, &mut notes)?;
    let indices = target_subspace(&model, &["A"])?;
    let ideal = IdealMap::from_subspace_unitary(model.hilbert_dim(), &indices, &gate.ideal_unitary);
    Ok(Scenario {
        name: "fig2_up".into(),
        model,
        gates: vec![gate],
        input_indices: indices,
        state_input: vec![C64::new(FRAC_1_SQRT_2, 0.0); 2],
        ideal,
        family: InputFamily::SingleQubit,
        notes,
    })
}

/// SWAP-like gate on A, C through B, input (|000⟩ + |001⟩)/√2.
pub fn fig3(_options: &RunOptions, config: Option<&LatticeModel>) -> Result<Scenario, ScenarioError> {
    let model = pinned_register(config, &["A", "B", "C"])?;
    let mut notes = Vec::new();
    note(&mut notes, "scenario", "fig3_swaplike");
    let gate = make_two_qubit(FRAC_PI_2, PI, &swap_like_device(&model, "A", "C")?)?;
    describe_recipe(&gate, "swap_AC", &mut notes);
    let indices = target_subspace(&model, &["A", "C"])?;
    let ideal = IdealMap::from_subspace_unitary(model.hilbert_dim(), &indices, &gate.ideal_unitary);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    Ok(Scenario {
        name: "fig3_swaplike".into(),
        model,
        gates: vec![gate],
        input_indices: indices,
        state_input: vec![h, h, C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ideal,
        family: InputFamily::TwoQubit,
        notes,
    })
}

/// Phase gate on A, SWAP-like gate A↔E, phase gate on E; input
/// (cos θ′|0⟩ + sin θ′|1⟩)_A|00⟩_BE with θ′ = π/4.
pub fn fig4(options: &RunOptions, config: Option<&LatticeModel>) -> Result<Scenario, ScenarioError> {
    let model = pinned_register(config, &["A", "B", "E"])?;
    let mut notes = Vec::new();
    note(&mut notes, "scenario", "fig4_sequence");
    let first = phase_gate(&model, "A", "B", REFERENCE_DRIVE_MHZ, options.max_windings, &mut notes)?;
    let swap = make_two_qubit(FRAC_PI_2, PI, &swap_like_device(&model, "A", "E")?)?;
    describe_recipe(&swap, "swap_AE", &mut notes);
    let last = phase_gate(&model, "E", "B", REFERENCE_DRIVE_MHZ, options.max_windings, &mut notes)?;
    note(&mut notes, "rot_z_EB.policy", "drive retuned so that omega matches the AB phase gate's mixing angle");

    let id2 = ComplexMatrix::identity(2);
    let on_a = kron(&first.ideal_unitary, &id2);
    let on_e = kron(&id2, &last.ideal_unitary);
    let composed = &(&on_e * &swap.ideal_unitary) * &on_a;
    let ae = target_subspace(&model, &["A", "E"])?;
    let dim = model.hilbert_dim();
    let outputs = [0usize, 2]
        .iter()
        .map(|&col| {
            let mut v = StateVector::zeros(dim);
            for (row, &i) in ae.iter().enumerate() {
                v[i] = composed[(row, col)];
            }
            v
        })
        .collect();
    let indices = target_subspace(&model, &["A"])?;
    Ok(Scenario {
        name: "fig4_sequence".into(),
        model,
        gates: vec![first, swap, last],
        input_indices: indices,
        state_input: vec![C64::new(FRAC_PI_4.cos(), 0.0), C64::new(FRAC_PI_4.sin(), 0.0)],
        ideal: IdealMap::from_outputs(outputs),
        family: InputFamily::SingleQubit,
        notes,
    })
}

/// One gate request of a custom scenario file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRequest {
    /// `rot_y`, `rot_z` or `two_qubit`.
    pub kind: String,
    /// θ, γ or ϑ in rad.
    pub angle: f64,
    /// φ for two-qubit gates, rad.
    #[serde(default)]
    pub phase: f64,
    pub targets: Vec<String>,
    pub auxiliary: String,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Auxiliary drive amplitude; defaults to `√3·J₁(β)·g`.
    #[serde(rename = "drive_MHz", default)]
    pub drive_mhz: Option<f64>,
}

fn default_beta() -> f64 {
    REFERENCE_BETA
}

#[derive(Debug, Deserialize)]
struct CustomFile {
    #[serde(default)]
    gate: Vec<GateRequest>,
}

/// Gate requests listed as `[[gate]]` tables next to the device description.
pub fn parse_requests(text: &str) -> Result<Vec<GateRequest>, ConfigError> {
    Ok(toml::from_str::<CustomFile>(text)?.gate)
}

/// User-defined sequence on `model`. The register is every transmon a gate
/// touches, in model order; inputs span the targets (one or two).
pub fn custom(model: &LatticeModel, requests: &[GateRequest], options: &RunOptions) -> Result<Scenario, ScenarioError> {
    let mut used: Vec<&str> = Vec::new();
    for r in requests {
        for l in r.targets.iter().chain([&r.auxiliary]) {
            model.index_of(l).map_err(ConfigError::from)?;
            if !used.contains(&l.as_str()) {
                used.push(l);
            }
        }
    }
    if used.is_empty() {
        let first = model
            .qubits()
            .iter()
            .find(|q| q.role == Role::Target)
            .ok_or_else(|| ScenarioError::Invalid("config has no target qubit".into()))?;
        used.push(&first.label);
    }
    let order: Vec<&str> =
        model.qubits().iter().map(|q| q.label.as_str()).filter(|l| used.contains(l)).collect();
    let register = model.subsystem(&order).map_err(ConfigError::from)?;
    let targets: Vec<&str> =
        order.iter().copied().filter(|l| register.qubit(l).map(|q| q.role == Role::Target).unwrap_or(false)).collect();
    if targets.is_empty() || targets.len() > 2 {
        return Err(ScenarioError::Invalid(format!(
            "custom scenarios act on one or two target qubits, found {}",
            targets.len()
        )));
    }

    let mut notes = Vec::new();
    note(&mut notes, "scenario", "custom");
    let k = targets.len();
    let mut ideal_total = ComplexMatrix::identity(1 << k);
    let mut gates = Vec::with_capacity(requests.len());
    for (n, r) in requests.iter().enumerate() {
        let recipe = build_request(&register, r, options, &mut notes, n)?;
        let sites: Vec<usize> = recipe
            .targets
            .iter()
            .map(|t| targets.iter().position(|x| x == t).expect("targets collected above"))
            .collect();
        let lifted = embed(&recipe.ideal_unitary, &vec![2; k], &sites)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        ideal_total = &lifted * &ideal_total;
        gates.push(recipe);
    }
    let indices = target_subspace(&register, &targets)?;
    let ideal = IdealMap::from_subspace_unitary(register.hilbert_dim(), &indices, &ideal_total);
    let amp = C64::new((0.5f64).powf(k as f64 / 2.0), 0.0);
    Ok(Scenario {
        name: "custom".into(),
        model: register,
        gates,
        state_input: vec![amp; indices.len()],
        input_indices: indices,
        ideal,
        family: if k == 1 { InputFamily::SingleQubit } else { InputFamily::TwoQubit },
        notes,
    })
}

fn build_request(
    model: &LatticeModel,
    r: &GateRequest,
    options: &RunOptions,
    notes: &mut Vec<(String, String)>,
    n: usize,
) -> Result<GateRecipe, ScenarioError> {
    let prefix = format!("gate{n}_{}", r.kind);
    let recipe = match (r.kind.as_str(), r.targets.as_slice()) {
        ("rot_y" | "rot_z", [t]) => {
            let edge = EdgeCalibration::from_model(model, t, &r.auxiliary, r.beta)?;
            let gp = edge.effective_coupling()?;
            let drive = r.drive_mhz.map(mhz).unwrap_or(3f64.sqrt() * gp);
            let mut device = SingleQubitDevice { edge, drive_amplitude: drive };
            if r.kind == "rot_y" {
                make_rot_y(r.angle, &device, options.max_windings)?
            } else {
                match make_rot_z(r.angle, &device, options.max_windings) {
                    Err(SynthesisError::NoExactSolution { nearest_theta, .. }) if options.retune => {
                        device = device.retuned(nearest_theta)?;
                        note(notes, &format!("{prefix}.retuned_drive"), fmt_mhz(device.drive_amplitude));
                        make_rot_z(r.angle, &device, options.max_windings)?
                    }
                    other => other?,
                }
            }
        }
        ("two_qubit", [a, c]) => {
            let device = TwoQubitDevice {
                first: EdgeCalibration::from_model(model, a, &r.auxiliary, r.beta)?,
                second: EdgeCalibration::from_model(model, c, &r.auxiliary, r.beta)?,
            };
            make_two_qubit(r.angle, r.phase, &device)?
        }
        (kind, targets) => {
            return Err(ScenarioError::Invalid(format!(
                "gate {n}: kind `{kind}` with {} target(s) is not supported",
                targets.len()
            )))
        }
    };
    describe_recipe(&recipe, &prefix, notes);
    Ok(recipe)
}

/// Hamiltonian and time window of every segment, in sequence order; time
/// runs continuously through the sequence.
pub struct Timeline {
    pub segments: Vec<(Box<dyn Hamiltonian>, f64, f64)>,
    /// `(first segment, end segment)` of each gate.
    pub gates: Vec<(usize, usize)>,
}

impl std::fmt::Debug for Timeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Timeline").field("segments", &self.segments.len()).field("gates", &self.gates).finish()
    }
}

impl Timeline {
    pub fn new(scenario: &Scenario, mode: Mode, static_spectators: bool) -> Result<Self, ScenarioError> {
        let mut segments: Vec<(Box<dyn Hamiltonian>, f64, f64)> = Vec::new();
        let mut gates = Vec::new();
        let mut t = 0.0;
        for gate in &scenario.gates {
            let start = segments.len();
            for s in &gate.segments {
                let h: Box<dyn Hamiltonian> = match mode {
                    Mode::Full => {
                        Box::new(s.interaction(&scenario.model, static_spectators, ModulationTreatment::PhaseFactor)?)
                    }
                    Mode::Effective => Box::new(s.effective(&scenario.model)?),
                };
                segments.push((h, t, t + s.duration));
                t += s.duration;
            }
            gates.push((start, segments.len()));
        }
        Ok(Self { segments, gates })
    }

    pub fn duration(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.2)
    }

    /// Propagates Hermitian operators through the whole timeline.
    pub fn evolve(&self, diss: &Dissipator, batch: &mut [ComplexMatrix], step: &StepControl) -> Result<(), EngineError> {
        for (h, t0, t1) in &self.segments {
            propagate_batch(h.as_ref(), diss, batch, *t0, *t1, step)?;
        }
        Ok(())
    }

    /// Unitary of segments `range`, noiseless.
    pub fn unitary(&self, range: std::ops::Range<usize>, dim: usize, step: &StepControl) -> Result<ComplexMatrix, EngineError> {
        let mut u = ComplexMatrix::identity(dim);
        for (h, t0, t1) in &self.segments[range] {
            u = &propagator(h.as_ref(), *t0, *t1, step)? * &u;
        }
        Ok(u)
    }
}

/// Result at one κ, with the invariants of the state-fidelity output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub kappa_khz: f64,
    pub point: CurvePoint,
    pub trace_drift: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

/// Channel of the scenario at decoherence rate `rate` (rad/s or s⁻¹ as
/// chosen by the caller).
pub fn channel(
    scenario: &Scenario,
    timeline: &Timeline,
    rate: f64,
    weight: RelaxationWeight,
    step: &StepControl,
) -> Result<ProcessMatrix, ScenarioError> {
    let noise = NoiseSpec::uniform(rate).with_weight(weight);
    let dim = scenario.model.hilbert_dim();
    let diss = Dissipator::new(dim, &collapse_operators(&scenario.model, &noise)?)?;
    Ok(ProcessMatrix::build(dim, &scenario.input_indices, |batch| timeline.evolve(&diss, batch, step))?)
}

fn family_inputs(scenario: &Scenario, options: &RunOptions) -> Vec<Vec<C64>> {
    match scenario.family {
        InputFamily::SingleQubit => single_qubit_inputs(options.grid_1q),
        InputFamily::TwoQubit => two_qubit_inputs(options.grid_2q),
    }
}

/// Evaluates one κ point.
pub fn evaluate_point(
    scenario: &Scenario,
    timeline: &Timeline,
    kappa_khz: f64,
    options: &RunOptions,
    step: &StepControl,
    inputs: &[Vec<C64>],
) -> Result<PointResult, ScenarioError> {
    let rate = options.kappa_units.rate(kappa_khz);
    let pm = channel(scenario, timeline, rate, options.relaxation_weight, step)?;
    let c = &scenario.state_input;
    let coefficients = ComplexMatrix::from_fn(c.len(), c.len(), |a, b| c[a] * c[b].conj());
    let rho = DensityMatrix { matrix: pm.apply(&coefficients), time: timeline.duration() };
    let target = scenario.ideal.final_state(c);
    let state_fidelity = rho.matrix.expectation(&target, &target).re;
    let gate = gate_fidelity(&pm, &scenario.ideal, inputs)?;
    let projector = computational_projector(&scenario.model.dims(), &auxiliary_sites(&scenario.model));
    let result = PointResult {
        kappa_khz,
        point: CurvePoint { kappa: rate, state_fidelity, gate_fidelity: gate, leakage: leakage(&rho.matrix, &projector) },
        trace_drift: (rho.trace() - 1.0).abs(),
        hermiticity: rho.matrix.hermiticity_deviation(),
        min_eigenvalue: rho.min_eigenvalue(),
    };
    rho.validate()?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub curve: FidelityCurve,
    pub points: Vec<PointResult>,
}

/// Sweeps κ; points are computed in parallel and reported in input order.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<ScenarioOutput, ScenarioError> {
    if options.kappa_khz.windows(2).any(|w| !(w[1] > w[0])) || options.kappa_khz.iter().any(|k| !(*k >= 0.0)) {
        return Err(ScenarioError::Invalid("κ values must be non-negative and strictly ascending".into()));
    }
    let timeline = Timeline::new(scenario, options.mode, options.static_spectators)?;
    let inputs = family_inputs(scenario, options);
    let points: Vec<PointResult> = options
        .kappa_khz
        .par_iter()
        .map(|&k| evaluate_point(scenario, &timeline, k, options, &options.step, &inputs))
        .collect::<Result<_, _>>()?;
    let mut curve = FidelityCurve::new("kappa");
    curve.points = points.iter().map(|p| p.point).collect();
    curve.validate()?;
    Ok(ScenarioOutput { curve, points })
}

/// Holonomy diagnostics of one gate of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCheck {
    pub gate: String,
    /// `max_t ‖P H(t) P‖` in rad/s.
    pub transport_residual: f64,
    /// Minimal squared overlap of the evolved computational basis with the
    /// computational subspace.
    pub cyclic_overlap: f64,
    /// Largest auxiliary excitation left by the gate over the basis inputs.
    pub auxiliary_population: f64,
}

/// Parallel-transport and cyclicity checks for every gate, noiseless.
pub fn check_holonomy(scenario: &Scenario, options: &RunOptions) -> Result<Vec<GateCheck>, ScenarioError> {
    let timeline = Timeline::new(scenario, options.mode, options.static_spectators)?;
    let dim = scenario.model.hilbert_dim();
    let indices = computational_indices(&scenario.model);
    let projector = nhqc_core::holonomy::subspace_projector(dim, &indices);
    let basis: Vec<StateVector> = indices.iter().map(|&i| StateVector::basis(dim, i)).collect();
    let dims = scenario.model.dims();
    let aux = auxiliary_sites(&scenario.model);
    let mut out = Vec::new();
    for (gate, &(first, end)) in scenario.gates.iter().zip(&timeline.gates) {
        let mut residual: f64 = 0.0;
        for (h, t0, t1) in &timeline.segments[first..end] {
            let times: Vec<f64> = (0..=256).map(|k| t0 + (t1 - t0) * k as f64 / 256.0).collect();
            residual = residual.max(check_parallel_transport(h.as_ref(), &projector, &times));
        }
        let u = timeline.unitary(first..end, dim, &options.step)?;
        let population = basis
            .iter()
            .map(|b| {
                let out = u.mul_vec(b);
                aux.iter().map(|&s| auxiliary_excitation(&out, &dims, s)).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        out.push(GateCheck {
            gate: format!("{}({})", gate.kind.name(), gate.targets.join(",")),
            transport_residual: residual,
            cyclic_overlap: check_cyclic(&u, &basis),
            auxiliary_population: population,
        });
    }
    Ok(out)
}

/// Noiseless propagator of the whole scenario on the full register.
pub fn scenario_unitary(scenario: &Scenario, mode: Mode, options: &RunOptions) -> Result<ComplexMatrix, ScenarioError> {
    let timeline = Timeline::new(scenario, mode, options.static_spectators)?;
    Ok(timeline.unitary(0..timeline.segments.len(), scenario.model.hilbert_dim(), &options.step)?)
}

/// Parameter dump for the CSV header.
pub fn header_params(scenario: &Scenario, options: &RunOptions) -> Vec<(String, String)> {
    let mut params = scenario.notes.clone();
    note(&mut params, "mode", options.mode.as_str());
    note(&mut params, "kappa_units", options.kappa_units.as_str());
    note(&mut params, "relaxation_weight", match options.relaxation_weight {
        RelaxationWeight::Printed => "printed",
        RelaxationWeight::Bosonic => "sqrt2",
    });
    note(&mut params, "static_spectators", options.static_spectators);
    note(&mut params, "grid", match scenario.family {
        InputFamily::SingleQubit => format!("{}", options.grid_1q),
        InputFamily::TwoQubit => format!("{}x{}", options.grid_2q, options.grid_2q),
    });
    note(&mut params, "step", format!(
        "min({:.1}ps,2pi/({}*omega_max))",
        options.step.max_step * 1e12,
        options.step.samples_per_period
    ));
    note(&mut params, "max_windings", options.max_windings);
    for q in scenario.model.qubits() {
        note(
            &mut params,
            &format!("qubit.{}", q.label),
            format!("{},alpha={},delta={},levels={}", q.role.as_str(), fmt_mhz(q.anharmonicity), fmt_mhz(q.detuning), q.levels),
        );
    }
    for c in scenario.model.couplings() {
        note(&mut params, &format!("coupling.{}{}", c.a, c.b), fmt_mhz(c.g));
    }
    params
}

/// CSV text: a `# params:` header line, the column names, one row per κ.
pub fn to_csv(scenario: &Scenario, options: &RunOptions, output: &ScenarioOutput) -> String {
    let params: Vec<String> =
        header_params(scenario, options).into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut text = format!("# params: {}\n", params.join("; "));
    text.push_str("kappa_over_2pi_kHz,state_fidelity,gate_fidelity,leakage\n");
    for p in &output.points {
        text.push_str(&format!(
            "{},{:.12},{:.12},{:.6e}\n",
            p.kappa_khz, p.point.state_fidelity, p.point.gate_fidelity, p.point.leakage
        ));
    }
    text
}

/// `J₁(β)·g` for the reference edges, rad/s.
pub fn reference_effective_coupling() -> f64 {
    bessel::bessel_j(1, REFERENCE_BETA).expect("in range") * mhz(11.41)
}

/// Name of a gate kind with its parameters, for reports.
pub fn describe_kind(kind: &GateKind) -> String {
    match *kind {
        GateKind::RotY { theta } => format!("rot_y(theta={theta:.6})"),
        GateKind::RotZ { gamma } => format!("rot_z(gamma={gamma:.6})"),
        GateKind::TwoQubit { vartheta, varphi } => format!("two_qubit(vartheta={vartheta:.6}, varphi={varphi:.6})"),
    }
}
