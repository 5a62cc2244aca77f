//! Interaction-picture and effective Hamiltonians for modulated, driven
//! transmon registers.
//!
//! The interaction frame rotates every transmon at its bare level energies
//! `E(k) = k·ω − α·k(k−1)/2`. In that frame each exchange term
//! `|m+1⟩_x⟨m| ⊗ |n−1⟩_y⟨n|` of `g(x†y + x y†)` oscillates at
//! `(Δ_y − Δ_x) − α_x·m + α_y·(n−1)` and picks up the modulation phase
//! `e^{iΘ_x(t) − iΘ_y(t)}`, where `Θ(t) = −β cos(νt + π/2 + φ)` for a
//! modulated transmon and zero otherwise. The phase factor is evaluated
//! exactly; no Bessel truncation is involved.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::device::{DeviceError, LatticeModel, Role};
use crate::operator::{cis, compose_index, digits, re, ComplexMatrix, C64};

/// Sinusoidal modulation `ε sin(νt + π/2 + phase)` of one transition frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSpec {
    pub target: String,
    /// ε in rad/s.
    pub amplitude: f64,
    /// ν in rad/s.
    pub frequency: f64,
    /// Offset added to the π/2 baseline, rad.
    pub phase: f64,
}

impl ModulationSpec {
    pub fn new(target: &str, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self { target: target.into(), amplitude, frequency, phase }
    }

    /// Modulation with a given index β = ε/ν.
    pub fn with_index(target: &str, beta: f64, frequency: f64, phase: f64) -> Self {
        Self::new(target, beta * frequency, frequency, phase)
    }

    /// β = ε/ν.
    pub fn index(&self) -> f64 {
        self.amplitude / self.frequency
    }

    /// Θ(t) = −β cos(νt + π/2 + phase).
    pub fn frame_phase(&self, t: f64) -> f64 {
        -self.index() * (self.frequency * t + FRAC_PI_2 + self.phase).cos()
    }

    fn validate(&self) -> Result<(), FrameError> {
        if !(self.frequency > 0.0) || !self.amplitude.is_finite() || !self.phase.is_finite() || !self.index().is_finite() {
            return Err(FrameError::InvalidModulation(self.target.clone()));
        }
        Ok(())
    }
}

/// Constant-amplitude microwave drive, in the rotating-wave form.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    pub qubit: String,
    /// ε in rad/s.
    pub amplitude: f64,
    /// δ = ω_qubit − ω_drive in rad/s.
    pub detuning: f64,
    /// φ in rad.
    pub phase: f64,
}

impl DriveSpec {
    /// Resonant drive (δ = 0).
    pub fn resonant(qubit: &str, amplitude: f64, phase: f64) -> Self {
        Self { qubit: qubit.into(), amplitude, detuning: 0.0, phase }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameError {
    Device(DeviceError),
    Arity { expected: usize, found: usize },
    /// Wrong role for the requested builder (e.g. a drive on a target).
    Role { label: String, expected: Role },
    InvalidModulation(String),
    /// An active edge that is not a coupling of the model.
    MissingEdge { a: String, b: String },
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Device(e) => write!(f, "{e}"),
            Self::Arity { expected, found } => {
                write!(f, "expected a {expected}-transmon subsystem, got {found}")
            }
            Self::Role { label, expected } => {
                write!(f, "qubit `{label}` must be a {} transmon here", expected.as_str())
            }
            Self::InvalidModulation(l) => {
                write!(f, "modulation on `{l}` needs ν > 0 and finite amplitude and phase")
            }
            Self::MissingEdge { a, b } => write!(f, "no coupling between `{a}` and `{b}`"),
        }
    }
}

impl core::error::Error for FrameError {}

impl From<DeviceError> for FrameError {
    fn from(e: DeviceError) -> Self {
        Self::Device(e)
    }
}

/// Anything that can be sampled as a Hermitian matrix at time `t`.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;

    /// Writes `H(t)` into `out`, which has shape `dim × dim`.
    fn eval_into(&self, t: f64, out: &mut ComplexMatrix);

    /// Upper bound on the fastest angular frequency in the dynamics; used to
    /// choose integration steps.
    fn frequency_bound(&self) -> f64;

    /// True when `H(t)` does not depend on `t`.
    fn is_constant(&self) -> bool {
        false
    }

    fn eval(&self, t: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        self.eval_into(t, &mut out);
        out
    }
}

impl Hamiltonian for ComplexMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn eval_into(&self, _t: f64, out: &mut ComplexMatrix) {
        out.as_mut_slice().copy_from_slice(self.as_slice());
    }

    fn frequency_bound(&self) -> f64 {
        self.inf_norm()
    }

    fn is_constant(&self) -> bool {
        true
    }
}

/// How the frequency modulation enters the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModulationTreatment {
    /// Modulation absorbed into the frame: phase factors `e^{±iΘ(t)}`.
    #[default]
    PhaseFactor,
    /// Modulation kept as the diagonal term `ε sin(νt + π/2 + φ)·n`.
    ExplicitDiagonal,
}

#[derive(Debug, Clone, PartialEq)]
struct PhaseTerm {
    row: usize,
    col: usize,
    amplitude: C64,
    frequency: f64,
    /// (modulation index, ±1).
    modulations: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
struct Modulation {
    site: usize,
    spec: ModulationSpec,
}

/// `H(t) = H_static + Σ_k (c_k(t)|r_k⟩⟨s_k| + h.c.) + Σ_j f_j(t) n_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentHamiltonian {
    dims: Vec<usize>,
    static_part: ComplexMatrix,
    terms: Vec<PhaseTerm>,
    modulations: Vec<Modulation>,
    treatment: ModulationTreatment,
}

impl TimeDependentHamiltonian {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn treatment(&self) -> ModulationTreatment {
        self.treatment
    }

    /// Number of oscillating off-diagonal terms (each with its conjugate).
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `|row⟩⟨col|` at time `t`, summed over all terms.
    pub fn coefficient(&self, row: usize, col: usize, t: f64) -> C64 {
        let phases = self.frame_phases(t);
        let mut total = C64::new(0.0, 0.0);
        for term in &self.terms {
            let c = self.term_value(term, t, &phases);
            if term.row == row && term.col == col {
                total += c;
            }
            if term.row == col && term.col == row {
                total += c.conj();
            }
        }
        total
    }

    /// Diagonal of the unitary `e^{iΣ_k Θ_k(t) n_k}` taking states from the
    /// explicit-diagonal frame to the phase-factor frame.
    pub fn modulation_frame(&self, t: f64) -> Vec<C64> {
        let total = self.dims.iter().product();
        let phases: Vec<f64> = self.modulations.iter().map(|m| m.spec.frame_phase(t)).collect();
        (0..total)
            .map(|i| {
                let levels = digits(i, &self.dims);
                let angle: f64 = self
                    .modulations
                    .iter()
                    .zip(&phases)
                    .map(|(m, p)| levels[m.site] as f64 * p)
                    .sum();
                cis(angle)
            })
            .collect()
    }

    fn frame_phases(&self, t: f64) -> Vec<f64> {
        match self.treatment {
            ModulationTreatment::PhaseFactor => {
                self.modulations.iter().map(|m| m.spec.frame_phase(t)).collect()
            }
            ModulationTreatment::ExplicitDiagonal => vec![0.0; self.modulations.len()],
        }
    }

    fn term_value(&self, term: &PhaseTerm, t: f64, phases: &[f64]) -> C64 {
        let mut angle = term.frequency * t;
        for &(k, sign) in &term.modulations {
            angle += sign * phases[k];
        }
        term.amplitude * cis(angle)
    }
}

impl Hamiltonian for TimeDependentHamiltonian {
    fn dim(&self) -> usize {
        self.static_part.rows()
    }

    fn eval_into(&self, t: f64, out: &mut ComplexMatrix) {
        out.as_mut_slice().copy_from_slice(self.static_part.as_slice());
        let phases = self.frame_phases(t);
        for term in &self.terms {
            let c = self.term_value(term, t, &phases);
            out[(term.row, term.col)] += c;
            out[(term.col, term.row)] += c.conj();
        }
        if self.treatment == ModulationTreatment::ExplicitDiagonal && !self.modulations.is_empty() {
            let n = self.dim();
            for i in 0..n {
                let levels = digits(i, &self.dims);
                let mut shift = 0.0;
                for m in &self.modulations {
                    let s = &m.spec;
                    shift += levels[m.site] as f64
                        * s.amplitude
                        * (s.frequency * t + FRAC_PI_2 + s.phase).sin();
                }
                out[(i, i)] += re(shift);
            }
        }
    }

    fn frequency_bound(&self) -> f64 {
        let mut fastest: f64 = 0.0;
        let mut row_sums = vec![0.0f64; self.dim()];
        for term in &self.terms {
            let sweep: f64 = term
                .modulations
                .iter()
                .map(|&(k, _)| self.modulations[k].spec.amplitude.abs())
                .sum();
            let sweep = if self.treatment == ModulationTreatment::PhaseFactor { sweep } else { 0.0 };
            fastest = fastest.max(term.frequency.abs() + sweep);
            row_sums[term.row] += term.amplitude.norm();
            row_sums[term.col] += term.amplitude.norm();
        }
        if self.treatment == ModulationTreatment::ExplicitDiagonal {
            for m in &self.modulations {
                let levels = (self.dims[m.site] - 1) as f64;
                fastest = fastest.max(m.spec.frequency).max(levels * m.spec.amplitude.abs());
            }
        }
        let norm = row_sums.into_iter().fold(self.static_part.inf_norm(), f64::max);
        fastest.max(norm)
    }
}

/// Builder for the interaction-picture Hamiltonian of an arbitrary register.
///
/// Only edges listed in `active_edges` couple; `None` activates every
/// coupling of `model`. Register order is the qubit order of `model`.
pub fn build_interaction(
    model: &LatticeModel,
    active_edges: Option<&[(&str, &str)]>,
    modulations: &[ModulationSpec],
    drives: &[DriveSpec],
    treatment: ModulationTreatment,
) -> Result<TimeDependentHamiltonian, FrameError> {
    let dims = model.dims();
    let dim = model.hilbert_dim();
    let qubits = model.qubits();

    let mut mods = Vec::with_capacity(modulations.len());
    for spec in modulations {
        spec.validate()?;
        mods.push(Modulation { site: model.index_of(&spec.target)?, spec: spec.clone() });
    }
    let signs_for = |x: usize, y: usize| -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (k, m) in mods.iter().enumerate() {
            if m.site == x {
                out.push((k, 1.0));
            } else if m.site == y {
                out.push((k, -1.0));
            }
        }
        out
    };

    let edges: Vec<(usize, usize, f64)> = match active_edges {
        None => model
            .couplings()
            .iter()
            .map(|c| Ok((model.index_of(&c.a)?, model.index_of(&c.b)?, c.g)))
            .collect::<Result<_, DeviceError>>()?,
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for &(a, b) in list {
                let c = model
                    .coupling(a, b)
                    .ok_or_else(|| FrameError::MissingEdge { a: a.into(), b: b.into() })?;
                out.push((model.index_of(a)?, model.index_of(b)?, c.g));
            }
            out
        }
    };

    let mut terms = Vec::new();
    for &(x, y, g) in &edges {
        let (qx, qy) = (&qubits[x], &qubits[y]);
        let base = qy.detuning - qx.detuning;
        let modulation_refs = signs_for(x, y);
        // x†y: raise x from m, lower y from n; the conjugate covers x y†.
        for i in 0..dim {
            let levels = digits(i, &dims);
            let (m, n) = (levels[x], levels[y]);
            if m + 1 >= dims[x] || n == 0 {
                continue;
            }
            let mut target = levels.clone();
            target[x] += 1;
            target[y] -= 1;
            let amp = g * ((m + 1) as f64).sqrt() * (n as f64).sqrt();
            terms.push(PhaseTerm {
                row: compose_index(&target, &dims),
                col: i,
                amplitude: re(amp),
                frequency: base - qx.anharmonicity * m as f64 + qy.anharmonicity * (n - 1) as f64,
                modulations: modulation_refs.clone(),
            });
        }
    }

    for drive in drives {
        let site = model.index_of(&drive.qubit)?;
        let q = &qubits[site];
        let refs: Vec<(usize, f64)> =
            mods.iter().enumerate().filter(|(_, m)| m.site == site).map(|(k, _)| (k, 1.0)).collect();
        for i in 0..dim {
            let levels = digits(i, &dims);
            let j = levels[site];
            if j + 1 >= dims[site] {
                continue;
            }
            let mut target = levels.clone();
            target[site] += 1;
            terms.push(PhaseTerm {
                row: compose_index(&target, &dims),
                col: i,
                amplitude: cis(drive.phase) * (0.5 * drive.amplitude * ((j + 1) as f64).sqrt()),
                frequency: drive.detuning - j as f64 * q.anharmonicity,
                modulations: refs.clone(),
            });
        }
    }

    Ok(TimeDependentHamiltonian {
        dims,
        static_part: ComplexMatrix::zeros(dim, dim),
        terms,
        modulations: mods,
        treatment,
    })
}

fn require_role(model: &LatticeModel, index: usize, role: Role) -> Result<(), FrameError> {
    let q = &model.qubits()[index];
    if q.role != role {
        return Err(FrameError::Role { label: q.label.clone(), expected: role });
    }
    Ok(())
}

/// Two-transmon (target, auxiliary) Hamiltonian with a modulated target and a
/// driven auxiliary.
pub fn build_h_interaction_2t(
    model: &LatticeModel,
    modulation: &ModulationSpec,
    drive: &DriveSpec,
) -> Result<TimeDependentHamiltonian, FrameError> {
    if model.qubits().len() != 2 {
        return Err(FrameError::Arity { expected: 2, found: model.qubits().len() });
    }
    require_role(model, model.index_of(&modulation.target)?, Role::Target)?;
    require_role(model, model.index_of(&drive.qubit)?, Role::Auxiliary)?;
    build_interaction(
        model,
        None,
        core::slice::from_ref(modulation),
        core::slice::from_ref(drive),
        ModulationTreatment::PhaseFactor,
    )
}

/// Target–auxiliary–target chain with both targets modulated.
pub fn build_h_interaction_3t(
    model: &LatticeModel,
    modulations: &[ModulationSpec; 2],
) -> Result<TimeDependentHamiltonian, FrameError> {
    if model.qubits().len() != 3 {
        return Err(FrameError::Arity { expected: 3, found: model.qubits().len() });
    }
    for m in modulations {
        require_role(model, model.index_of(&m.target)?, Role::Target)?;
    }
    build_interaction(model, None, modulations, &[], ModulationTreatment::PhaseFactor)
}

/// Resonant exchange `strength·|1_T 0_X⟩⟨0_T 1_X| + h.c.` between a target
/// and an auxiliary.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveCoupling {
    pub target: String,
    pub auxiliary: String,
    pub strength: C64,
}

/// Resonant drive `strength·|1⟩⟨0| + h.c.` on one transmon.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveDrive {
    pub qubit: String,
    pub strength: C64,
}

/// Effective resonant Hamiltonian on any register, built from qubit-level
/// operators (levels above |1⟩ are untouched).
pub fn build_effective(
    model: &LatticeModel,
    couplings: &[EffectiveCoupling],
    drives: &[EffectiveDrive],
) -> Result<ComplexMatrix, FrameError> {
    let dims = model.dims();
    let mut specs = Vec::new();
    for c in couplings {
        let t = model.index_of(&c.target)?;
        let x = model.index_of(&c.auxiliary)?;
        specs.push((vec![(t, 0usize, 1usize), (x, 1, 0)], c.strength));
    }
    for d in drives {
        specs.push((vec![(model.index_of(&d.qubit)?, 0, 1)], d.strength));
    }
    Ok(qubit_level_operator(&dims, &specs))
}

/// Σ strength·(Π_site |to⟩⟨from|) + h.c., embedded in `dims`.
fn qubit_level_operator(dims: &[usize], specs: &[(Vec<(usize, usize, usize)>, C64)]) -> ComplexMatrix {
    let dim: usize = dims.iter().product();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let levels = digits(i, dims);
        for (flips, strength) in specs {
            if flips.iter().all(|&(site, from, _)| levels[site] == from) {
                let mut target = levels.clone();
                for &(site, _, to) in flips {
                    target[site] = to;
                }
                let r = compose_index(&target, dims);
                h[(r, i)] += *strength;
                h[(i, r)] += strength.conj();
            }
        }
    }
    h
}

/// `g′|10⟩⟨01| + (ε/2)e^{iφ}|1⟩_B⟨0| + h.c.` on two three-level transmons
/// ordered (target, auxiliary).
pub fn build_h_effective_1q(gp_ab: f64, eps: f64, phi: f64) -> ComplexMatrix {
    qubit_level_operator(
        &[3, 3],
        &[
            (vec![(0, 0, 1), (1, 1, 0)], re(gp_ab)),
            (vec![(1, 0, 1)], cis(phi) * (0.5 * eps)),
        ],
    )
}

/// `g′_AB|01⟩_AB⟨10| + g′_BC e^{iφ}|01⟩_BC⟨10| + h.c.` on three three-level
/// transmons ordered (A, B, C).
pub fn build_h_effective_2q(gp_ab: f64, gp_bc: f64, varphi: f64) -> ComplexMatrix {
    qubit_level_operator(
        &[3, 3, 3],
        &[
            (vec![(0, 1, 0), (1, 0, 1)], re(gp_ab)),
            (vec![(1, 1, 0), (2, 0, 1)], cis(varphi) * gp_bc),
        ],
    )
}
