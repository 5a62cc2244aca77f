//! State and averaged gate fidelities, leakage, and the fidelity-curve type.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::lindblad::{DensityMatrix, ProcessMatrix};
use crate::operator::{digits, ComplexMatrix, StateVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    DimensionMismatch { expected: usize, found: usize },
    /// Curve point outside `[0, 1 + 1e-9]` or with descending κ.
    InvalidPoint { index: usize, reason: &'static str },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Self::InvalidPoint { index, reason } => write!(f, "curve point {index}: {reason}"),
        }
    }
}

impl core::error::Error for MetricsError {}

/// Slack above 1 tolerated in reported fidelities.
pub const FIDELITY_SLACK: f64 = 1e-9;

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64, MetricsError> {
    if rho.dim() != psi.dim() {
        return Err(MetricsError::DimensionMismatch { expected: rho.dim(), found: psi.dim() });
    }
    Ok(rho.matrix.expectation(psi, psi).re)
}

/// Sum by recursive halving; the result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `2πk/(n−1)` for `k = 0..n` (both endpoints).
pub fn single_qubit_angles(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n).map(|k| TAU * k as f64 / (n - 1) as f64).collect(),
    }
}

/// `2πk/n` for `k = 0..n` (periodic grid).
pub fn two_qubit_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// `cos θ|0⟩ + sin θ|1⟩` for every grid angle.
pub fn single_qubit_inputs(n: usize) -> Vec<Vec<C64>> {
    single_qubit_angles(n)
        .into_iter()
        .map(|t| alloc::vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)])
        .collect()
}

/// `(cos ϑ₁|0⟩ + sin ϑ₁|1⟩) ⊗ (cos ϑ₂|0⟩ + sin ϑ₂|1⟩)` over the `n × n` grid,
/// ϑ₁ slowest.
pub fn two_qubit_inputs(n: usize) -> Vec<Vec<C64>> {
    let angles = two_qubit_angles(n);
    let mut out = Vec::with_capacity(n * n);
    for &a in &angles {
        for &b in &angles {
            let (ca, sa, cb, sb) = (a.cos(), a.sin(), b.cos(), b.sin());
            out.push([ca * cb, ca * sb, sa * cb, sa * sb].iter().map(|&v| C64::new(v, 0.0)).collect());
        }
    }
    out
}

/// Ideal final state for every input basis vector of a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealMap {
    outputs: Vec<StateVector>,
}

impl IdealMap {
    pub fn from_outputs(outputs: Vec<StateVector>) -> Self {
        Self { outputs }
    }

    /// Basis vector `a` of `indices` goes to `Σ_b u[b, a] |indices[b]⟩`.
    pub fn from_subspace_unitary(dim: usize, indices: &[usize], u: &ComplexMatrix) -> Self {
        let outputs = (0..indices.len())
            .map(|a| {
                let mut v = StateVector::zeros(dim);
                for (b, &i) in indices.iter().enumerate() {
                    v[i] = u[(b, a)];
                }
                v
            })
            .collect();
        Self { outputs }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn outputs(&self) -> &[StateVector] {
        &self.outputs
    }

    /// `Σ_a c_a · output_a`.
    pub fn final_state(&self, input: &[C64]) -> StateVector {
        let dim = self.outputs.first().map_or(0, StateVector::dim);
        let mut v = StateVector::zeros(dim);
        for (c, o) in input.iter().zip(&self.outputs) {
            for i in 0..dim {
                v[i] += c * o[i];
            }
        }
        v
    }
}

/// Overlaps `T[a,b,e,f] = ⟨o_e|E(|i_a⟩⟨i_b|)|o_f⟩` between a channel and an
/// ideal map. The fidelity of any input `c` is then a quartic form in `c`,
/// independent of the register size.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOverlaps {
    d: usize,
    table: Vec<C64>,
}

impl ChannelOverlaps {
    pub fn new(channel: &ProcessMatrix, ideal: &IdealMap) -> Result<Self, MetricsError> {
        let d = channel.indices().len();
        if ideal.len() != d {
            return Err(MetricsError::DimensionMismatch { expected: d, found: ideal.len() });
        }
        for o in ideal.outputs() {
            if o.dim() != channel.dim() {
                return Err(MetricsError::DimensionMismatch { expected: channel.dim(), found: o.dim() });
            }
        }
        let mut table = Vec::with_capacity(d * d * d * d);
        for a in 0..d {
            for b in 0..d {
                let image = channel.image(a, b);
                for e in 0..d {
                    for f in 0..d {
                        table.push(image.expectation(&ideal.outputs()[e], &ideal.outputs()[f]));
                    }
                }
            }
        }
        Ok(Self { d, table })
    }

    /// `⟨ψ_f|E(|ψ_in⟩⟨ψ_in|)|ψ_f⟩` for input amplitudes `c`.
    pub fn fidelity(&self, c: &[C64]) -> f64 {
        let d = self.d;
        let mut total = C64::new(0.0, 0.0);
        let mut k = 0;
        for a in 0..d {
            for b in 0..d {
                let ab = c[a] * c[b].conj();
                for e in 0..d {
                    let abe = ab * c[e].conj();
                    for f in 0..d {
                        total += abe * c[f] * self.table[k];
                        k += 1;
                    }
                }
            }
        }
        total.re
    }
}

/// Mean fidelity over `inputs` through the process-matrix path.
pub fn gate_fidelity(channel: &ProcessMatrix, ideal: &IdealMap, inputs: &[Vec<C64>]) -> Result<f64, MetricsError> {
    let overlaps = ChannelOverlaps::new(channel, ideal)?;
    let values: Vec<f64> = inputs.iter().map(|c| overlaps.fidelity(c)).collect();
    Ok(pairwise_sum(&values) / values.len().max(1) as f64)
}

/// Average over the single-qubit family with `grid` angles.
pub fn gate_fidelity_1q(channel: &ProcessMatrix, ideal: &IdealMap, grid: usize) -> Result<f64, MetricsError> {
    gate_fidelity(channel, ideal, &single_qubit_inputs(grid))
}

/// Average over the `grid × grid` two-qubit product family.
pub fn gate_fidelity_2q(channel: &ProcessMatrix, ideal: &IdealMap, grid: usize) -> Result<f64, MetricsError> {
    gate_fidelity(channel, ideal, &two_qubit_inputs(grid))
}

/// Mean fidelity with each input evolved separately by `evolve`, which
/// receives the full-space input state and returns the final density matrix.
pub fn gate_fidelity_per_state<E, F>(
    indices: &[usize],
    dim: usize,
    ideal: &IdealMap,
    inputs: &[Vec<C64>],
    mut evolve: F,
) -> Result<f64, E>
where
    F: FnMut(&StateVector) -> Result<ComplexMatrix, E>,
{
    let mut values = Vec::with_capacity(inputs.len());
    for c in inputs {
        let mut psi = StateVector::zeros(dim);
        for (&i, &v) in indices.iter().zip(c) {
            psi[i] = v;
        }
        let rho = evolve(&psi)?;
        let target = ideal.final_state(c);
        values.push(rho.expectation(&target, &target).re);
    }
    Ok(pairwise_sum(&values) / values.len().max(1) as f64)
}

/// Projector onto states with every transmon in {|0⟩, |1⟩} and each listed
/// auxiliary site in |0⟩.
pub fn computational_projector(dims: &[usize], auxiliaries: &[usize]) -> ComplexMatrix {
    let dim: usize = dims.iter().product();
    let mut p = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let levels = digits(i, dims);
        let inside = levels
            .iter()
            .enumerate()
            .all(|(s, &l)| if auxiliaries.contains(&s) { l == 0 } else { l <= 1 });
        if inside {
            p[(i, i)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// `1 − Tr(PρP)`.
pub fn leakage(rho: &ComplexMatrix, projector: &ComplexMatrix) -> f64 {
    let kept: f64 = (0..rho.rows())
        .map(|i| (0..rho.rows()).map(|j| (projector[(i, j)] * rho[(j, i)]).re).sum::<f64>())
        .sum();
    rho.trace().re - kept
}

/// `1 − |Tr(V†U)|²/d²` between an actual and an ideal operator on the same
/// subspace (phase-insensitive).
pub fn operator_infidelity(actual: &ComplexMatrix, ideal: &ComplexMatrix) -> f64 {
    let d = ideal.rows() as f64;
    let overlap = (&ideal.dagger() * actual).trace();
    1.0 - overlap.norm_sqr() / (d * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// κ in rad/s.
    pub kappa: f64,
    pub state_fidelity: f64,
    pub gate_fidelity: f64,
    pub leakage: f64,
}

/// Fidelities along a decoherence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub variable: String,
    pub points: Vec<CurvePoint>,
}

impl FidelityCurve {
    pub fn new(variable: &str) -> Self {
        Self { variable: variable.into(), points: Vec::new() }
    }

    /// Ascending non-negative κ, fidelities within `[0, 1 + 1e-9]`.
    pub fn validate(&self) -> Result<(), MetricsError> {
        let in_range = |v: f64| (-FIDELITY_SLACK..=1.0 + FIDELITY_SLACK).contains(&v);
        for (index, p) in self.points.iter().enumerate() {
            if !(p.kappa >= 0.0) {
                return Err(MetricsError::InvalidPoint { index, reason: "negative κ" });
            }
            if index > 0 && !(p.kappa > self.points[index - 1].kappa) {
                return Err(MetricsError::InvalidPoint { index, reason: "κ not ascending" });
            }
            if !in_range(p.state_fidelity) || !in_range(p.gate_fidelity) || !in_range(p.leakage) {
                return Err(MetricsError::InvalidPoint { index, reason: "value outside [0, 1]" });
            }
        }
        Ok(())
    }

    pub fn is_non_increasing(&self, tolerance: f64) -> bool {
        self.points.windows(2).all(|w| {
            w[1].state_fidelity <= w[0].state_fidelity + tolerance
                && w[1].gate_fidelity <= w[0].gate_fidelity + tolerance
        })
    }
}
