//! Gate synthesis: segment timing, control schedules, ideal holonomic
//! unitaries and checks of the holonomy conditions.
//!
//! Single-qubit gates use the two-segment "orange slice" loop: the register
//! (target, auxiliary) evolves under `Ω[[0, F], [F†, 0]]` for `a/Ω`, the drive
//! phase jumps, and the same duration follows. Two-qubit gates use one
//! segment of length `π/g` under `g(|0⟩_B⟨1| ⊗ K + h.c.)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::bessel::{bessel_j, invert_j1, BesselError};
use crate::device::{DeviceError, LatticeModel};
use crate::frame::{
    build_effective, build_interaction, DriveSpec, EffectiveCoupling, EffectiveDrive, FrameError, Hamiltonian,
    ModulationSpec, ModulationTreatment, TimeDependentHamiltonian,
};
use crate::operator::{cis, digits, matrix_exp, re, ComplexMatrix, StateVector};
use crate::svd::{svd_f, svd_k};

/// Target of the sine factor `sin(a·Q)`: `G_I = I`, `G_z = diag{1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Identity,
    PauliZ,
}

impl Branch {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Branch::Identity => ComplexMatrix::identity(2),
            Branch::PauliZ => ComplexMatrix::real_diagonal(&[1.0, -1.0]),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Identity => "G_I",
            Branch::PauliZ => "G_z",
        }
    }

    /// Winding ratio `cos(θ/2)` reachable with winding numbers `(m, n)`, and
    /// the matching segment area `a`.
    pub fn ratio_and_area(self, m: u32, n: u32) -> (f64, f64) {
        let (m, n) = (m as f64, n as f64);
        match self {
            Branch::Identity => (2.0 * (m - n) / (1.0 + 2.0 * (m + n)), PI * (1.0 + 2.0 * (m + n))),
            Branch::PauliZ => ((2.0 * (m - n) - 1.0) / (2.0 * (m + n) + 2.0), PI * (2.0 + 2.0 * (m + n))),
        }
    }
}

/// Default bound on the winding numbers searched by the duration solver.
pub const DEFAULT_MAX_WINDINGS: u32 = 10;

/// `cos(θ/2)` must match a reachable ratio this closely to count as exact.
const RATIO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSolution {
    /// Dimensionless area `a = Ω·τ/2`.
    pub a: f64,
    pub m: u32,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthesisError {
    /// θ is a multiple of 2π, where the loop degenerates.
    DegenerateAngle { theta: f64 },
    /// No exact segment area within the winding bound; `nearest_theta` is the
    /// closest angle that would be solvable, with its area and windings.
    NoExactSolution { theta: f64, nearest_theta: f64, a: f64, m: u32, n: u32 },
    Bessel(BesselError),
    Frame(FrameError),
    Device(DeviceError),
    InvalidParameter(String),
}

impl fmt::Display for SynthesisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DegenerateAngle { theta } => write!(f, "mixing angle {theta} is a multiple of 2π"),
            Self::NoExactSolution { theta, nearest_theta, a, m, n } => write!(
                f,
                "no exact segment duration for θ = {theta}; nearest solvable θ' = {nearest_theta} (a = {a}, m = {m}, n = {n})"
            ),
            Self::Bessel(e) => write!(f, "{e}"),
            Self::Frame(e) => write!(f, "{e}"),
            Self::Device(e) => write!(f, "{e}"),
            Self::InvalidParameter(s) => f.write_str(s),
        }
    }
}

impl core::error::Error for SynthesisError {}

impl From<BesselError> for SynthesisError {
    fn from(e: BesselError) -> Self {
        Self::Bessel(e)
    }
}

impl From<FrameError> for SynthesisError {
    fn from(e: FrameError) -> Self {
        Self::Frame(e)
    }
}

impl From<DeviceError> for SynthesisError {
    fn from(e: DeviceError) -> Self {
        Self::Device(e)
    }
}

/// Smallest `a > 0` with `a·cos²(θ/4) ≡ π/2` and `a·sin²(θ/4) ≡ π/2` (G_I) or
/// `≡ 3π/2` (G_z), both mod 2π, over winding numbers `m, n ≤ max_windings`.
pub fn solve_segment_duration(theta: f64, branch: Branch, max_windings: u32) -> Result<SegmentSolution, SynthesisError> {
    if !theta.is_finite() {
        return Err(SynthesisError::InvalidParameter(format!("mixing angle {theta} is not finite")));
    }
    let wrapped = theta - 2.0 * PI * (theta / (2.0 * PI)).floor();
    if wrapped < 1e-12 || 2.0 * PI - wrapped < 1e-12 {
        return Err(SynthesisError::DegenerateAngle { theta });
    }
    let target = (0.5 * theta).cos();
    let mut best: Option<(f64, f64, u32, u32)> = None;
    let mut exact: Option<SegmentSolution> = None;
    for m in 0..=max_windings {
        for n in 0..=max_windings {
            let (ratio, a) = branch.ratio_and_area(m, n);
            let miss = (ratio - target).abs();
            if miss <= RATIO_TOLERANCE {
                if exact.map_or(true, |s| a < s.a) {
                    exact = Some(SegmentSolution { a, m, n });
                }
            } else if best.map_or(true, |(bm, ba, _, _)| miss < bm || (miss == bm && a < ba)) {
                best = Some((miss, a, m, n));
            }
        }
    }
    if let Some(s) = exact {
        return Ok(s);
    }
    let (_, a, m, n) = best.expect("at least one winding pair");
    let (ratio, _) = branch.ratio_and_area(m, n);
    Err(SynthesisError::NoExactSolution { theta, nearest_theta: 2.0 * ratio.acos(), a, m, n })
}

/// Calibration of one target–auxiliary edge: bare coupling, modulation
/// frequency (resonant with the detuning) and the nominal modulation index.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCalibration {
    pub target: String,
    pub auxiliary: String,
    /// g in rad/s.
    pub g: f64,
    /// ν in rad/s.
    pub nu: f64,
    /// Nominal β; synthesis never exceeds `J₁(β)·g`.
    pub beta: f64,
}

impl EdgeCalibration {
    /// Edge `target`–`auxiliary` of `model`, modulated at ν = Δ_target.
    pub fn from_model(model: &LatticeModel, target: &str, auxiliary: &str, beta: f64) -> Result<Self, SynthesisError> {
        let c = model.coupling(target, auxiliary).ok_or_else(|| {
            SynthesisError::Frame(FrameError::MissingEdge { a: target.into(), b: auxiliary.into() })
        })?;
        let t = model.qubit(target)?;
        Ok(Self { target: target.into(), auxiliary: auxiliary.into(), g: c.g, nu: t.detuning, beta })
    }

    /// `J₁(β)·g`.
    pub fn effective_coupling(&self) -> Result<f64, SynthesisError> {
        Ok(bessel_j(1, self.beta)? * self.g)
    }

    /// Modulation reaching effective coupling `gp` (sign via a π phase).
    fn modulation_for(&self, gp: f64, extra_phase: f64) -> Result<ModulationSpec, SynthesisError> {
        let beta = invert_j1(gp.abs() / self.g)?;
        let phase = if gp < 0.0 { extra_phase + PI } else { extra_phase };
        Ok(ModulationSpec::with_index(&self.target, beta, self.nu, phase))
    }
}

/// Target–auxiliary pair with a resonant drive on the auxiliary.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitDevice {
    pub edge: EdgeCalibration,
    /// ε in rad/s.
    pub drive_amplitude: f64,
}

impl SingleQubitDevice {
    pub fn effective_coupling(&self) -> Result<f64, SynthesisError> {
        self.edge.effective_coupling()
    }

    /// `θ = 2·atan(ε/g′)`.
    pub fn theta(&self) -> Result<f64, SynthesisError> {
        Ok(2.0 * self.drive_amplitude.atan2(self.effective_coupling()?))
    }

    /// `Ω = √(g′² + ε²)`.
    pub fn omega(&self) -> Result<f64, SynthesisError> {
        Ok(self.effective_coupling()?.hypot(self.drive_amplitude))
    }

    /// Same coupling, drive amplitude changed so that θ becomes `theta`.
    pub fn retuned(&self, theta: f64) -> Result<Self, SynthesisError> {
        let gp = self.effective_coupling()?;
        Ok(Self { edge: self.edge.clone(), drive_amplitude: gp * (0.5 * theta).tan() })
    }
}

/// Target–auxiliary–target chain: `first` is A–B, `second` is C–B.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDevice {
    pub first: EdgeCalibration,
    pub second: EdgeCalibration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    RotY { theta: f64 },
    RotZ { gamma: f64 },
    TwoQubit { vartheta: f64, varphi: f64 },
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::RotY { .. } => "rot_y",
            GateKind::RotZ { .. } => "rot_z",
            GateKind::TwoQubit { .. } => "two_qubit",
        }
    }

    /// Ideal unitary on the targets' qubit subspace.
    pub fn ideal_unitary(&self) -> ComplexMatrix {
        match *self {
            GateKind::RotY { theta } => {
                let (c, s) = (theta.cos(), theta.sin());
                ComplexMatrix::from_real_rows(&[[c, -s], [s, c]])
            }
            GateKind::RotZ { gamma } => ComplexMatrix::diagonal(&[cis(-gamma), cis(gamma)]),
            GateKind::TwoQubit { vartheta, varphi } => {
                let f = svd_k(vartheta, varphi);
                let j = ComplexMatrix::real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
                &(&f.x * &j) * &f.x.dagger()
            }
        }
    }
}

/// Parameters of the effective block Hamiltonian a recipe realizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Synthesis {
    SingleQubit { mixing_angle: f64, branch: Branch, phases: [f64; 2], omega: f64, a: f64 },
    TwoQubit { vartheta: f64, varphi: f64, g: f64 },
}

/// Controls held constant over one time interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSchedule {
    /// Seconds.
    pub duration: f64,
    pub auxiliary: String,
    pub drive: Option<DriveSpec>,
    pub modulations: Vec<ModulationSpec>,
}

impl SegmentSchedule {
    /// Edges (target, auxiliary) that the segment's modulations bring into
    /// resonance.
    pub fn active_edges(&self) -> Vec<(&str, &str)> {
        self.modulations.iter().map(|m| (m.target.as_str(), self.auxiliary.as_str())).collect()
    }

    /// Interaction-picture Hamiltonian on `model`. Without `all_edges` only
    /// the gate's own edges couple.
    pub fn interaction(
        &self,
        model: &LatticeModel,
        all_edges: bool,
        treatment: ModulationTreatment,
    ) -> Result<TimeDependentHamiltonian, SynthesisError> {
        let edges = self.active_edges();
        let active = if all_edges { None } else { Some(edges.as_slice()) };
        let drives: Vec<DriveSpec> = self.drive.iter().cloned().collect();
        Ok(build_interaction(model, active, &self.modulations, &drives, treatment)?)
    }

    /// Effective resonant Hamiltonian on `model`: each modulation gives
    /// `J₁(β)·g·e^{iφ}` on its edge, the drive gives `(ε/2)e^{iφ}`.
    pub fn effective(&self, model: &LatticeModel) -> Result<ComplexMatrix, SynthesisError> {
        let mut couplings = Vec::with_capacity(self.modulations.len());
        for m in &self.modulations {
            let c = model.coupling(&m.target, &self.auxiliary).ok_or_else(|| {
                SynthesisError::Frame(FrameError::MissingEdge { a: m.target.clone(), b: self.auxiliary.clone() })
            })?;
            couplings.push(EffectiveCoupling {
                target: m.target.clone(),
                auxiliary: self.auxiliary.clone(),
                strength: cis(m.phase) * (bessel_j(1, m.index())? * c.g),
            });
        }
        let drives: Vec<EffectiveDrive> = self
            .drive
            .iter()
            .map(|d| EffectiveDrive { qubit: d.qubit.clone(), strength: cis(d.phase) * (0.5 * d.amplitude) })
            .collect();
        Ok(build_effective(model, &couplings, &drives)?)
    }
}

/// A synthesized gate: timed segments plus its ideal action.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRecipe {
    pub kind: GateKind,
    pub segments: Vec<SegmentSchedule>,
    /// Ideal unitary on the targets' qubit subspace, targets in `targets`
    /// order (`|0⟩, |1⟩` per target, row-major).
    pub ideal_unitary: ComplexMatrix,
    pub targets: Vec<String>,
    pub auxiliary: String,
    pub synthesis: Synthesis,
}

impl GateRecipe {
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Natural register order: (target, auxiliary) or (A, B, C).
    pub fn register(&self) -> Vec<&str> {
        match self.targets.as_slice() {
            [t] => vec![t.as_str(), self.auxiliary.as_str()],
            [a, c] => vec![a.as_str(), self.auxiliary.as_str(), c.as_str()],
            _ => self.targets.iter().map(String::as_str).chain([self.auxiliary.as_str()]).collect(),
        }
    }
}

fn validate_device_coupling(edge: &EdgeCalibration) -> Result<(), SynthesisError> {
    if !(edge.g > 0.0) || !(edge.nu > 0.0) || !edge.beta.is_finite() {
        return Err(SynthesisError::InvalidParameter(format!(
            "edge {}-{} needs g > 0, ν > 0 and a finite β",
            edge.target, edge.auxiliary
        )));
    }
    Ok(())
}

fn single_qubit_recipe(
    kind: GateKind,
    device: &SingleQubitDevice,
    gp: f64,
    eps: f64,
    branch: Branch,
    phases: [f64; 2],
    max_windings: u32,
    ideal_unitary: ComplexMatrix,
) -> Result<GateRecipe, SynthesisError> {
    let omega = gp.hypot(eps);
    if !(omega > 0.0) {
        return Err(SynthesisError::InvalidParameter("Ω must be positive".to_string()));
    }
    let mixing_angle = 2.0 * eps.atan2(gp);
    let solution = solve_segment_duration(mixing_angle, branch, max_windings)?;
    let modulation = device.edge.modulation_for(gp, 0.0)?;
    let duration = solution.a / omega;
    let segments = phases
        .iter()
        .map(|&phi| SegmentSchedule {
            duration,
            auxiliary: device.edge.auxiliary.clone(),
            drive: Some(DriveSpec::resonant(&device.edge.auxiliary, eps, phi)),
            modulations: vec![modulation.clone()],
        })
        .collect();
    Ok(GateRecipe {
        kind,
        segments,
        ideal_unitary,
        targets: vec![device.edge.target.clone()],
        auxiliary: device.edge.auxiliary.clone(),
        synthesis: Synthesis::SingleQubit { mixing_angle, branch, phases, omega, a: solution.a },
    })
}

/// Z rotation `diag{e^{−iγ}, e^{iγ}}`: drive phase 0, then γ, under the
/// device's own mixing angle on the G_z branch.
pub fn make_rot_z(gamma: f64, device: &SingleQubitDevice, max_windings: u32) -> Result<GateRecipe, SynthesisError> {
    validate_device_coupling(&device.edge)?;
    let gp = device.effective_coupling()?;
    let kind = GateKind::RotZ { gamma };
    let ideal = kind.ideal_unitary();
    single_qubit_recipe(
        kind,
        device,
        gp,
        device.drive_amplitude,
        Branch::PauliZ,
        [0.0, gamma],
        max_windings,
        ideal,
    )
}

/// Y rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`: mixing angle θ on the G_I
/// branch, drive phase 0 then π.
///
/// Ω is the device's, lowered when needed so that `|g′| = Ω|cos(θ/2)|` stays
/// within the edge's nominal `J₁(β)·g`.
pub fn make_rot_y(theta: f64, device: &SingleQubitDevice, max_windings: u32) -> Result<GateRecipe, SynthesisError> {
    validate_device_coupling(&device.edge)?;
    solve_segment_duration(theta, Branch::Identity, max_windings)?;
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let reach = device.effective_coupling()? / c.abs();
    let omega = device.omega()?.min(reach);
    let (gp, eps) = (omega * c, omega * s.abs());
    let offset = if s < 0.0 { PI } else { 0.0 };
    let kind = GateKind::RotY { theta };
    let ideal = kind.ideal_unitary();
    let mut recipe = single_qubit_recipe(
        kind,
        device,
        gp,
        eps,
        Branch::Identity,
        [offset, PI + offset],
        max_windings,
        ideal,
    )?;
    recipe.synthesis = match recipe.synthesis {
        Synthesis::SingleQubit { branch, omega, a, .. } => {
            Synthesis::SingleQubit { mixing_angle: theta, branch, phases: [0.0, PI], omega, a }
        }
        other => other,
    };
    Ok(recipe)
}

/// Two-qubit gate `V₀(ϑ, φ)` on (A, C) through auxiliary B, one segment of
/// length `π/g`.
///
/// `g` is the largest value for which neither edge exceeds its nominal
/// `J₁(β)·g_edge`.
pub fn make_two_qubit(vartheta: f64, varphi: f64, device: &TwoQubitDevice) -> Result<GateRecipe, SynthesisError> {
    validate_device_coupling(&device.first)?;
    validate_device_coupling(&device.second)?;
    if device.first.auxiliary != device.second.auxiliary {
        return Err(SynthesisError::InvalidParameter("both edges must share one auxiliary".to_string()));
    }
    let (c, s) = ((0.5 * vartheta).cos(), (0.5 * vartheta).sin());
    let mut g = f64::INFINITY;
    if c != 0.0 {
        g = g.min(device.first.effective_coupling()? / c.abs());
    }
    if s != 0.0 {
        g = g.min(device.second.effective_coupling()? / s.abs());
    }
    if !(g.is_finite() && g > 0.0) {
        return Err(SynthesisError::InvalidParameter("effective coupling vanishes".to_string()));
    }
    let first = device.first.modulation_for(g * c, 0.0)?;
    let second = device.second.modulation_for(g * s, varphi)?;
    let segment = SegmentSchedule {
        duration: PI / g,
        auxiliary: device.first.auxiliary.clone(),
        drive: None,
        modulations: vec![first, second],
    };
    let kind = GateKind::TwoQubit { vartheta, varphi };
    Ok(GateRecipe {
        kind,
        segments: vec![segment],
        ideal_unitary: kind.ideal_unitary(),
        targets: vec![device.first.target.clone(), device.second.target.clone()],
        auxiliary: device.first.auxiliary.clone(),
        synthesis: Synthesis::TwoQubit { vartheta, varphi, g },
    })
}

/// Closed-form action on the qubit subspace with the auxiliary fixed in
/// `aux_state` (0 or 1): `U₀ = −W₂GR₂†R₁GW₁†`, `U₁ = −R₂GW₂†W₁GR₁†`, or
/// `V₀ = XJX†`, `V₁ = ZJZ†`.
pub fn ideal_conditional_decomposition(recipe: &GateRecipe, aux_state: usize) -> ComplexMatrix {
    match recipe.synthesis {
        Synthesis::SingleQubit { mixing_angle, branch, phases, .. } => {
            let g = branch.matrix();
            let f1 = svd_f(mixing_angle, phases[0]);
            let f2 = svd_f(mixing_angle, phases[1]);
            let product = if aux_state == 0 {
                let r2_dag_r1 = &f2.r_dag * &f1.r_dag.dagger();
                &(&(&(&f2.w * &g) * &r2_dag_r1) * &g) * &f1.w.dagger()
            } else {
                let w2_dag_w1 = &f2.w.dagger() * &f1.w;
                &(&(&(&f2.r_dag.dagger() * &g) * &w2_dag_w1) * &g) * &f1.r_dag
            };
            product.scale_real(-1.0)
        }
        Synthesis::TwoQubit { vartheta, varphi, .. } => {
            let f = svd_k(vartheta, varphi);
            let j = ComplexMatrix::real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
            let side = if aux_state == 0 { f.x } else { f.z_dag.dagger() };
            &(&side * &j) * &side.dagger()
        }
    }
}

/// Register indices of the states with every target in {|0⟩, |1⟩} and the
/// auxiliary in `aux_state`, in row-major order of the target bits.
pub fn qubit_subspace(model: &LatticeModel, targets: &[&str], auxiliary: &str, aux_state: usize) -> Result<Vec<usize>, SynthesisError> {
    let dims = model.dims();
    let t_sites: Vec<usize> = targets.iter().map(|t| model.index_of(t)).collect::<Result<_, _>>()?;
    let aux = model.index_of(auxiliary)?;
    let mut out = Vec::with_capacity(1 << targets.len());
    for bits in 0..(1usize << targets.len()) {
        let mut levels = vec![0usize; dims.len()];
        for (k, &site) in t_sites.iter().enumerate() {
            levels[site] = (bits >> (targets.len() - 1 - k)) & 1;
        }
        levels[aux] = aux_state;
        out.push(crate::operator::compose_index(&levels, &dims));
    }
    Ok(out)
}

/// Projector onto the given basis indices.
pub fn subspace_projector(dim: usize, indices: &[usize]) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim);
    for &i in indices {
        p[(i, i)] = re(1.0);
    }
    p
}

/// Propagator of the recipe's effective Hamiltonian on `model`.
pub fn effective_propagator(recipe: &GateRecipe, model: &LatticeModel) -> Result<ComplexMatrix, SynthesisError> {
    let mut u = ComplexMatrix::identity(model.hilbert_dim());
    for segment in &recipe.segments {
        let h = segment.effective(model)?;
        let step = matrix_exp(&h, segment.duration).map_err(|e| SynthesisError::InvalidParameter(format!("{e}")))?;
        u = &step * &u;
    }
    Ok(u)
}

/// `max_t ‖P·H(t)·P‖` (Frobenius) over the sample times.
pub fn check_parallel_transport(h: &dyn Hamiltonian, projector: &ComplexMatrix, times: &[f64]) -> f64 {
    let mut buffer = ComplexMatrix::zeros(h.dim(), h.dim());
    let mut worst: f64 = 0.0;
    for &t in times {
        h.eval_into(t, &mut buffer);
        let inner = &(projector * &buffer) * projector;
        worst = worst.max(inner.frobenius_norm());
    }
    worst
}

/// Smallest squared overlap of `U·b` with span(basis) over the basis vectors,
/// which must be orthonormal.
pub fn check_cyclic(u: &ComplexMatrix, basis: &[StateVector]) -> f64 {
    let mut worst: f64 = 1.0;
    for b in basis {
        let image = u.mul_vec(b);
        let kept: f64 = basis.iter().map(|e| e.inner(&image).norm_sqr()).sum();
        worst = worst.min(kept);
    }
    worst
}

/// Population left outside the auxiliary ground state: `1 − Σ_{aux=0}|ψ_i|²`.
pub fn auxiliary_excitation(state: &StateVector, dims: &[usize], aux_site: usize) -> f64 {
    let ground: f64 = (0..state.dim())
        .filter(|&i| digits(i, dims)[aux_site] == 0)
        .map(|i| state[i].norm_sqr())
        .sum();
    (1.0 - ground).max(0.0)
}

/// Sub-block of `u` on `indices` (rows and columns).
pub fn restrict(u: &ComplexMatrix, indices: &[usize]) -> ComplexMatrix {
    u.submatrix(indices, indices)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{Coupling, TransmonSpec};
    use crate::mhz;
    use crate::operator::distance_up_to_phase;

    fn brute_force(theta: f64, branch: Branch, w: u32) -> Option<f64> {
        let (c2, s2) = ((0.25 * theta).cos().powi(2), (0.25 * theta).sin().powi(2));
        let second = if branch == Branch::Identity { 0.5 * PI } else { 1.5 * PI };
        let mut best: Option<f64> = None;
        for m in 0..=w {
            for n in 0..=w {
                let (_, a) = branch.ratio_and_area(m, n);
                let wrap = |x: f64| x - 2.0 * PI * (x / (2.0 * PI)).floor();
                let r1 = wrap(a * c2 - 0.5 * PI);
                let r2 = wrap(a * s2 - second);
                let ok = |r: f64| r < 1e-9 || 2.0 * PI - r < 1e-9;
                if ok(r1) && ok(r2) && best.map_or(true, |b| a < b) {
                    best = Some(a);
                }
            }
        }
        best
    }

    #[test]
    fn solver_examples() {
        let s = solve_segment_duration(2.0 * PI / 3.0, Branch::PauliZ, 10).unwrap();
        assert!((s.a - 6.0 * PI).abs() < 1e-12);
        assert_eq!((s.m, s.n), (2, 0));
        assert_eq!(brute_force(2.0 * PI / 3.0, Branch::PauliZ, 10), Some(s.a));
        let s = solve_segment_duration(PI, Branch::Identity, 10).unwrap();
        assert!((s.a - PI).abs() < 1e-12);
        let e = solve_segment_duration(PI, Branch::PauliZ, 10).unwrap_err();
        assert!(matches!(e, SynthesisError::NoExactSolution { .. }));
        assert_eq!(brute_force(PI, Branch::PauliZ, 10), None);
        let theta = 2.0 * (2.0f64 / 3.0).acos();
        assert!((solve_segment_duration(theta, Branch::Identity, 10).unwrap().a - 3.0 * PI).abs() < 1e-12);
        assert!(matches!(
            solve_segment_duration(2.0 * PI, Branch::Identity, 10),
            Err(SynthesisError::DegenerateAngle { .. })
        ));
    }

    #[test]
    fn nearest_angle_is_solvable() {
        let err = solve_segment_duration(0.6666 * PI, Branch::PauliZ, 10).unwrap_err();
        let SynthesisError::NoExactSolution { nearest_theta, a, .. } = err else { panic!() };
        let s = solve_segment_duration(nearest_theta, Branch::PauliZ, 10).unwrap();
        assert!((s.a - a).abs() < 1e-9);
    }

    fn pair() -> (LatticeModel, SingleQubitDevice) {
        let model = LatticeModel::new(
            vec![
                TransmonSpec::target("A", mhz(375.0), mhz(245.0)),
                TransmonSpec::auxiliary("B", mhz(350.0)),
            ],
            vec![Coupling::new("A", "B", mhz(11.41))],
        )
        .unwrap();
        let edge = EdgeCalibration::from_model(&model, "A", "B", 1.6).unwrap();
        let gp = edge.effective_coupling().unwrap();
        (model, SingleQubitDevice { edge, drive_amplitude: gp * 3f64.sqrt() })
    }

    #[test]
    fn rot_z_closed_form_and_propagation() {
        let (model, device) = pair();
        let recipe = make_rot_z(PI / 8.0, &device, 10).unwrap();
        assert_eq!(recipe.segments.len(), 2);
        let u0 = ideal_conditional_decomposition(&recipe, 0);
        assert!(distance_up_to_phase(&u0, &recipe.ideal_unitary) < 1e-12);
        let u = effective_propagator(&recipe, &model).unwrap();
        let sub = qubit_subspace(&model, &["A"], "B", 0).unwrap();
        assert!((&restrict(&u, &sub) - &u0).max_abs() < 1e-9);
    }

    #[test]
    fn rot_y_closed_form() {
        let (model, device) = pair();
        let recipe = make_rot_y(PI, &device, 10).unwrap();
        let minus = ComplexMatrix::real_diagonal(&[-1.0, -1.0]);
        assert!((&recipe.ideal_unitary - &minus).max_abs() < 1e-15);
        let u = effective_propagator(&recipe, &model).unwrap();
        let sub = qubit_subspace(&model, &["A"], "B", 0).unwrap();
        assert!(distance_up_to_phase(&restrict(&u, &sub), &recipe.ideal_unitary) < 1e-9);
    }
}
