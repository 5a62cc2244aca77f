//! Fixed-step Lindblad propagation.
//!
//! `dρ/dt = −i[H(t), ρ] + Σ_k r_k (2A_kρA_k† − A_k†A_kρ − ρA_k†A_k)`, with
//! `r = κ/2` for each transmon's relaxation and dephasing channel.
//!
//! The integrator is classical RK4 on the matrix form of the equation (the
//! same arithmetic as the vectorized form, without building superoperators).
//! For Hermitian ρ the right-hand side is `−iXρ + (−iXρ)† + Σ 2r AρA†` with
//! `X = H − iΣ r A†A`, so one matrix product per stage suffices. Several
//! density matrices can share the Hamiltonian samples of one step.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::device::LatticeModel;
use crate::frame::Hamiltonian;
use crate::operator::{digits, hermitian_eigenvalues, matrix_exp, re, ComplexMatrix, StateVector, C64};

/// Weight of the `|1⟩⟨2|` component in the relaxation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelaxationWeight {
    /// `|0⟩⟨1| + 2|1⟩⟨2| + …` (weights `j`, as commonly printed).
    #[default]
    Printed,
    /// Bosonic lowering operator, weights `√j`.
    Bosonic,
}

/// Rates for one transmon, rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRates {
    pub label: String,
    pub relaxation: f64,
    pub dephasing: f64,
}

/// Decoherence rates (κ₋, κ_z) for every transmon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseSpec {
    pub relaxation: f64,
    pub dephasing: f64,
    pub relaxation_weight: RelaxationWeight,
    /// Per-transmon rates replacing the uniform ones.
    pub overrides: Vec<QubitRates>,
}

impl NoiseSpec {
    /// κ₋ = κ_z = κ on every transmon.
    pub fn uniform(kappa: f64) -> Self {
        Self { relaxation: kappa, dephasing: kappa, ..Self::default() }
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn with_weight(mut self, weight: RelaxationWeight) -> Self {
        self.relaxation_weight = weight;
        self
    }

    pub fn rates_for(&self, label: &str) -> (f64, f64) {
        self.overrides
            .iter()
            .find(|r| r.label == label)
            .map_or((self.relaxation, self.dephasing), |r| (r.relaxation, r.dephasing))
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let all = [(self.relaxation, self.dephasing)]
            .into_iter()
            .chain(self.overrides.iter().map(|r| (r.relaxation, r.dephasing)));
        for (a, b) in all {
            if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
                return Err(EngineError::InvalidRate { rate: if a >= 0.0 { b } else { a } });
            }
        }
        Ok(())
    }
}

/// One dissipative channel `rate·L(operator)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOperator {
    pub rate: f64,
    pub operator: ComplexMatrix,
    pub site: usize,
}

/// Relaxation and dephasing channels for every transmon of `model`,
/// embedded in the full register. Channels with zero rate are omitted.
pub fn collapse_operators(model: &LatticeModel, noise: &NoiseSpec) -> Result<Vec<CollapseOperator>, EngineError> {
    noise.validate()?;
    let dims = model.dims();
    let mut out = Vec::new();
    for (site, q) in model.qubits().iter().enumerate() {
        let d = q.levels;
        let (relax, dephase) = noise.rates_for(&q.label);
        let mut lowering = ComplexMatrix::zeros(d, d);
        for j in 1..d {
            let w = match noise.relaxation_weight {
                RelaxationWeight::Printed => j as f64,
                RelaxationWeight::Bosonic => (j as f64).sqrt(),
            };
            lowering[(j - 1, j)] = re(w);
        }
        let number = ComplexMatrix::real_diagonal(&(0..d).map(|j| j as f64).collect::<Vec<_>>());
        for (rate, op) in [(0.5 * relax, lowering), (0.5 * dephase, number)] {
            if rate > 0.0 {
                let operator = crate::operator::embed(&op, &dims, &[site]).expect("valid site");
                out.push(CollapseOperator { rate, operator, site });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    StepUnderflow { step: f64 },
    InvariantBreach { quantity: &'static str, value: f64, time: f64 },
    DimensionMismatch { expected: usize, found: usize },
    InvalidTimeSpan { t0: f64, t1: f64 },
    InvalidRate { rate: f64 },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::StepUnderflow { step } => write!(f, "integration step {step:e} s underflows"),
            Self::InvariantBreach { quantity, value, time } => {
                write!(f, "invariant breach at t = {time:e} s: {quantity} = {value:e}")
            }
            Self::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Self::InvalidTimeSpan { t0, t1 } => write!(f, "invalid time span [{t0:e}, {t1:e}]"),
            Self::InvalidRate { rate } => write!(f, "decoherence rate {rate} must be finite and non-negative"),
        }
    }
}

impl core::error::Error for EngineError {}

/// Tolerances of [`DensityMatrix::validate`].
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const POSITIVITY_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: ComplexMatrix,
    /// Seconds.
    pub time: f64,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Self {
        Self { matrix: ComplexMatrix::outer(psi, psi), time: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)
            .map(|v| v.into_iter().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Hermiticity, unit trace and positivity within the module tolerances.
    pub fn validate(&self) -> Result<(), EngineError> {
        let breach = |quantity, value| Err(EngineError::InvariantBreach { quantity, value, time: self.time });
        let h = self.matrix.hermiticity_deviation();
        if !(h <= HERMITICITY_TOLERANCE) {
            return breach("hermiticity deviation", h);
        }
        let drift = (self.matrix.trace() - re(1.0)).norm();
        if !(drift <= TRACE_TOLERANCE) {
            return breach("trace drift", drift);
        }
        let low = self.min_eigenvalue();
        if !(low >= -POSITIVITY_TOLERANCE) {
            return breach("minimum eigenvalue", low);
        }
        Ok(())
    }
}

/// Step selection: `h = 2π/(samples_per_period·ω_max)`, capped at `max_step`
/// and shrunk so that an integer number of steps covers the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub samples_per_period: f64,
    /// Seconds.
    pub max_step: f64,
    /// Seconds; anything smaller is an underflow.
    pub min_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { samples_per_period: 200.0, max_step: 20e-12, min_step: 1e-18 }
    }
}

impl StepControl {
    /// Same rule with twice the samples per period and half the cap.
    pub fn halved(self) -> Self {
        Self { samples_per_period: 2.0 * self.samples_per_period, max_step: 0.5 * self.max_step, ..self }
    }

    /// Number of steps and step length for `[t0, t1]`.
    pub fn plan(&self, h: &dyn Hamiltonian, t0: f64, t1: f64) -> Result<(usize, f64), EngineError> {
        if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(EngineError::InvalidTimeSpan { t0, t1 });
        }
        let span = t1 - t0;
        if span == 0.0 {
            return Ok((0, 0.0));
        }
        let omega = h.frequency_bound();
        let mut step = self.max_step;
        if omega > 0.0 {
            step = step.min(TAU / (self.samples_per_period * omega));
        }
        if !(step >= self.min_step) {
            return Err(EngineError::StepUnderflow { step });
        }
        let count = (span / step).ceil().max(1.0);
        if count > 1e10 {
            return Err(EngineError::StepUnderflow { step });
        }
        let count = count as usize;
        Ok((count, span / count as f64))
    }
}

/// Precomputed dissipative part: `K = Σ r A†A` and the sparse jump operators
/// scaled by `√(2r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissipator {
    dim: usize,
    anti: ComplexMatrix,
    jumps: Vec<Vec<(usize, usize, C64)>>,
}

impl Dissipator {
    pub fn new(dim: usize, collapses: &[CollapseOperator]) -> Result<Self, EngineError> {
        let mut anti = ComplexMatrix::zeros(dim, dim);
        let mut jumps = Vec::with_capacity(collapses.len());
        for c in collapses {
            if c.operator.rows() != dim || c.operator.cols() != dim {
                return Err(EngineError::DimensionMismatch { expected: dim, found: c.operator.rows() });
            }
            if !(c.rate >= 0.0) {
                return Err(EngineError::InvalidRate { rate: c.rate });
            }
            let a_dag_a = &c.operator.dagger() * &c.operator;
            anti = &anti + &a_dag_a.scale_real(c.rate);
            let w = (2.0 * c.rate).sqrt();
            let mut entries = Vec::new();
            for r in 0..dim {
                for col in 0..dim {
                    let v = c.operator[(r, col)];
                    if v.norm() > 0.0 {
                        entries.push((r, col, v * w));
                    }
                }
            }
            jumps.push(entries);
        }
        Ok(Self { dim, anti, jumps })
    }

    pub fn none(dim: usize) -> Self {
        Self { dim, anti: ComplexMatrix::zeros(dim, dim), jumps: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn add_jumps(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        for entries in &self.jumps {
            for &(r1, c1, a) in entries {
                for &(r2, c2, b) in entries {
                    out[(r1, r2)] += a * b.conj() * rho[(c1, c2)];
                }
            }
        }
    }
}

/// Writes `H(t) − iK` into `out`.
fn non_hermitian(h: &dyn Hamiltonian, diss: &Dissipator, t: f64, out: &mut ComplexMatrix) {
    h.eval_into(t, out);
    if !diss.is_empty() {
        let minus_i = C64::new(0.0, -1.0);
        for (o, k) in out.as_mut_slice().iter_mut().zip(diss.anti.as_slice()) {
            *o += minus_i * k;
        }
    }
}

struct Workspace {
    product: ComplexMatrix,
    stage: ComplexMatrix,
    k: [ComplexMatrix; 4],
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = || ComplexMatrix::zeros(dim, dim);
        Self { product: z(), stage: z(), k: [z(), z(), z(), z()] }
    }
}

/// Lindblad right-hand side for Hermitian `rho`.
fn rhs(hnh: &ComplexMatrix, diss: &Dissipator, rho: &ComplexMatrix, product: &mut ComplexMatrix, out: &mut ComplexMatrix) {
    hnh.mul_into(rho, product);
    let n = rho.rows();
    for i in 0..n {
        for j in 0..n {
            let x_ij = product[(i, j)];
            let x_ji = product[(j, i)];
            // −i X_ij + i conj(X_ji)
            out[(i, j)] = C64::new(x_ij.im + x_ji.im, -x_ij.re + x_ji.re);
        }
    }
    diss.add_jumps(rho, out);
}

fn axpy(base: &ComplexMatrix, k: &ComplexMatrix, scale: f64, out: &mut ComplexMatrix) {
    for ((o, b), d) in out.as_mut_slice().iter_mut().zip(base.as_slice()).zip(k.as_slice()) {
        *o = b + d * scale;
    }
}

/// Propagates every Hermitian matrix in `states` from `t0` to `t1` in place.
///
/// Hermiticity is restored after each step; the trace change of every
/// state is checked against [`TRACE_TOLERANCE`] at the end.
pub fn propagate_batch(
    h: &dyn Hamiltonian,
    diss: &Dissipator,
    states: &mut [ComplexMatrix],
    t0: f64,
    t1: f64,
    control: &StepControl,
) -> Result<(), EngineError> {
    let dim = h.dim();
    if diss.dim() != dim {
        return Err(EngineError::DimensionMismatch { expected: dim, found: diss.dim() });
    }
    for s in states.iter() {
        if s.rows() != dim || s.cols() != dim {
            return Err(EngineError::DimensionMismatch { expected: dim, found: s.rows() });
        }
    }
    let (count, step) = control.plan(h, t0, t1)?;
    if count == 0 || states.is_empty() {
        return Ok(());
    }
    let initial_traces: Vec<C64> = states.iter().map(|s| s.trace()).collect();

    if h.is_constant() && diss.is_empty() {
        let mut hm = ComplexMatrix::zeros(dim, dim);
        h.eval_into(t0, &mut hm);
        let u = matrix_exp(&hm, t1 - t0).map_err(|_| EngineError::InvariantBreach {
            quantity: "hermiticity deviation of H",
            value: hm.hermiticity_deviation(),
            time: t0,
        })?;
        let u_dag = u.dagger();
        for s in states.iter_mut() {
            *s = &(&u * s) * &u_dag;
            s.symmetrize();
        }
    } else {
        let mut h_start = ComplexMatrix::zeros(dim, dim);
        let mut h_mid = ComplexMatrix::zeros(dim, dim);
        let mut h_end = ComplexMatrix::zeros(dim, dim);
        let mut ws = Workspace::new(dim);
        non_hermitian(h, diss, t0, &mut h_start);
        for n in 0..count {
            let t = t0 + n as f64 * step;
            non_hermitian(h, diss, t + 0.5 * step, &mut h_mid);
            non_hermitian(h, diss, t + step, &mut h_end);
            for rho in states.iter_mut() {
                let Workspace { product, stage, k } = &mut ws;
                let [k1, k2, k3, k4] = k;
                rhs(&h_start, diss, rho, product, k1);
                axpy(rho, k1, 0.5 * step, stage);
                rhs(&h_mid, diss, stage, product, k2);
                axpy(rho, k2, 0.5 * step, stage);
                rhs(&h_mid, diss, stage, product, k3);
                axpy(rho, k3, step, stage);
                rhs(&h_end, diss, stage, product, k4);
                let w = step / 6.0;
                for ((((r, a), b), c), d) in rho
                    .as_mut_slice()
                    .iter_mut()
                    .zip(k1.as_slice())
                    .zip(k2.as_slice())
                    .zip(k3.as_slice())
                    .zip(k4.as_slice())
                {
                    *r += (a + (b + c) * 2.0 + d) * w;
                }
                rho.symmetrize();
            }
            core::mem::swap(&mut h_start, &mut h_end);
        }
    }

    for (s, t_in) in states.iter().zip(initial_traces) {
        let drift = (s.trace() - t_in).norm();
        let scale = s.frobenius_norm().max(1.0);
        if !(drift <= TRACE_TOLERANCE * scale) {
            return Err(EngineError::InvariantBreach { quantity: "trace drift", value: drift, time: t1 });
        }
    }
    Ok(())
}

/// `ρ(t1)` from `ρ(t0)`.
pub fn propagate(
    h: &dyn Hamiltonian,
    collapses: &[CollapseOperator],
    rho0: &DensityMatrix,
    t0: f64,
    t1: f64,
    control: &StepControl,
) -> Result<DensityMatrix, EngineError> {
    let diss = Dissipator::new(h.dim(), collapses)?;
    let mut states = [rho0.matrix.clone()];
    propagate_batch(h, &diss, &mut states, t0, t1, control)?;
    let [matrix] = states;
    Ok(DensityMatrix { matrix, time: rho0.time + (t1 - t0) })
}

/// Schrödinger propagator `U(t1, t0)`; exact exponential for constant `H`.
pub fn propagator(h: &dyn Hamiltonian, t0: f64, t1: f64, control: &StepControl) -> Result<ComplexMatrix, EngineError> {
    let dim = h.dim();
    let (count, step) = control.plan(h, t0, t1)?;
    if count == 0 {
        return Ok(ComplexMatrix::identity(dim));
    }
    if h.is_constant() {
        let hm = h.eval(t0);
        return matrix_exp(&hm, t1 - t0).map_err(|_| EngineError::InvariantBreach {
            quantity: "hermiticity deviation of H",
            value: hm.hermiticity_deviation(),
            time: t0,
        });
    }
    let mut u = ComplexMatrix::identity(dim);
    let mut h_start = h.eval(t0);
    let mut h_mid = ComplexMatrix::zeros(dim, dim);
    let mut h_end = ComplexMatrix::zeros(dim, dim);
    let mut ws = Workspace::new(dim);
    let minus_i = C64::new(0.0, -1.0);
    let derivative = |hm: &ComplexMatrix, x: &ComplexMatrix, out: &mut ComplexMatrix| {
        hm.mul_into(x, out);
        for v in out.as_mut_slice() {
            *v *= minus_i;
        }
    };
    for n in 0..count {
        let t = t0 + n as f64 * step;
        h.eval_into(t + 0.5 * step, &mut h_mid);
        h.eval_into(t + step, &mut h_end);
        let Workspace { stage, k, .. } = &mut ws;
        let [k1, k2, k3, k4] = k;
        derivative(&h_start, &u, k1);
        axpy(&u, k1, 0.5 * step, stage);
        derivative(&h_mid, stage, k2);
        axpy(&u, k2, 0.5 * step, stage);
        derivative(&h_mid, stage, k3);
        axpy(&u, k3, step, stage);
        derivative(&h_end, stage, k4);
        let w = step / 6.0;
        for ((((r, a), b), c), d) in u
            .as_mut_slice()
            .iter_mut()
            .zip(k1.as_slice())
            .zip(k2.as_slice())
            .zip(k3.as_slice())
            .zip(k4.as_slice())
        {
            *r += (a + (b + c) * 2.0 + d) * w;
        }
        core::mem::swap(&mut h_start, &mut h_end);
    }
    Ok(u)
}

/// `ψ(t1) = U(t1, t0)ψ(t0)`; the norm is checked to 1e-8.
pub fn propagate_unitary(
    h: &dyn Hamiltonian,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    control: &StepControl,
) -> Result<StateVector, EngineError> {
    if psi0.dim() != h.dim() {
        return Err(EngineError::DimensionMismatch { expected: h.dim(), found: psi0.dim() });
    }
    let u = propagator(h, t0, t1, control)?;
    let out = u.mul_vec(psi0);
    let drift = (out.norm() - psi0.norm()).abs();
    if !(drift <= 1e-8) {
        return Err(EngineError::InvariantBreach { quantity: "norm drift", value: drift, time: t1 });
    }
    Ok(out)
}

/// Linear channel on operators supported on a basis subspace, stored as the
/// images `E(|i⟩⟨j|)` for every pair of subspace indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    dim: usize,
    indices: Vec<usize>,
    images: Vec<ComplexMatrix>,
}

impl ProcessMatrix {
    /// Builds the channel by propagating a Hermitian operator basis of the
    /// subspace through `evolve` in one batch.
    pub fn build<F>(dim: usize, indices: &[usize], evolve: F) -> Result<Self, EngineError>
    where
        F: FnOnce(&mut [ComplexMatrix]) -> Result<(), EngineError>,
    {
        let d = indices.len();
        for &i in indices {
            if i >= dim {
                return Err(EngineError::DimensionMismatch { expected: dim, found: i });
            }
        }
        // Order: diagonals, then (X_ij, Y_ij) for i < j.
        let mut batch = Vec::with_capacity(d * d);
        for &i in indices {
            let mut m = ComplexMatrix::zeros(dim, dim);
            m[(i, i)] = re(1.0);
            batch.push(m);
        }
        for a in 0..d {
            for b in a + 1..d {
                let (i, j) = (indices[a], indices[b]);
                let mut x = ComplexMatrix::zeros(dim, dim);
                x[(i, j)] = re(1.0);
                x[(j, i)] = re(1.0);
                let mut y = ComplexMatrix::zeros(dim, dim);
                y[(i, j)] = C64::new(0.0, -1.0);
                y[(j, i)] = C64::new(0.0, 1.0);
                batch.push(x);
                batch.push(y);
            }
        }
        evolve(&mut batch)?;

        let mut images = vec![ComplexMatrix::zeros(dim, dim); d * d];
        for a in 0..d {
            images[a * d + a] = batch[a].clone();
        }
        let mut next = d;
        for a in 0..d {
            for b in a + 1..d {
                let (ex, ey) = (&batch[next], &batch[next + 1]);
                next += 2;
                let upper = (ex + &ey.scale(C64::new(0.0, 1.0))).scale_real(0.5);
                images[b * d + a] = upper.dagger();
                images[a * d + b] = upper;
            }
        }
        Ok(Self { dim, indices: indices.to_vec(), images })
    }

    /// Channel of `H` and `collapses` over `[t0, t1]`.
    pub fn from_dynamics(
        h: &dyn Hamiltonian,
        collapses: &[CollapseOperator],
        indices: &[usize],
        t0: f64,
        t1: f64,
        control: &StepControl,
    ) -> Result<Self, EngineError> {
        let diss = Dissipator::new(h.dim(), collapses)?;
        Self::build(h.dim(), indices, |batch| propagate_batch(h, &diss, batch, t0, t1, control))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `E(|i⟩⟨j|)` for subspace positions `a = i`, `b = j`.
    pub fn image(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.images[a * self.indices.len() + b]
    }

    /// Applies the channel to `Σ c_ab |i_a⟩⟨i_b|`.
    pub fn apply(&self, coefficients: &ComplexMatrix) -> ComplexMatrix {
        let d = self.indices.len();
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in 0..d {
            for b in 0..d {
                let c = coefficients[(a, b)];
                if c.norm() == 0.0 {
                    continue;
                }
                for (o, v) in out.as_mut_slice().iter_mut().zip(self.images[a * d + b].as_slice()) {
                    *o += c * v;
                }
            }
        }
        out
    }

    /// Applies the channel to a full-space density matrix supported on the
    /// subspace.
    pub fn apply_full(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.apply(&rho.submatrix(&self.indices, &self.indices))
    }

    /// `⟨ψ|E(|ψ_in⟩⟨ψ_in|)|ψ⟩` with `ψ_in` given by its subspace amplitudes.
    pub fn overlap(&self, input: &[C64], output: &StateVector) -> f64 {
        let d = self.indices.len();
        let mut total = C64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                let c = input[a] * input[b].conj();
                if c.norm() == 0.0 {
                    continue;
                }
                total += c * self.images[a * d + b].expectation(output, output);
            }
        }
        total.re
    }
}

/// `1 − Σ_i ρ_ii` over basis states with an excited auxiliary, or any
/// transmon outside {|0⟩, |1⟩}: population leaked from the computational
/// register.
pub fn leaked_population(rho: &ComplexMatrix, dims: &[usize], auxiliaries: &[usize]) -> f64 {
    let mut inside = 0.0;
    for i in 0..rho.rows() {
        let levels = digits(i, dims);
        let ok = levels.iter().enumerate().all(|(s, &l)| if auxiliaries.contains(&s) { l == 0 } else { l <= 1 });
        if ok {
            inside += rho[(i, i)].re;
        }
    }
    rho.trace().re - inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::TransmonSpec;

    fn single(levels: usize) -> LatticeModel {
        LatticeModel::new(vec![TransmonSpec::auxiliary("B", 1.0).with_levels(levels)], vec![]).unwrap()
    }

    #[test]
    fn collapse_counts_and_weights() {
        let ops = collapse_operators(&single(3), &NoiseSpec::uniform(2.0)).unwrap();
        assert_eq!(ops.len(), 2);
        assert_eq!(ops[0].operator[(1, 2)], re(2.0));
        assert_eq!(ops[0].rate, 1.0);
        let bos = collapse_operators(&single(3), &NoiseSpec::uniform(2.0).with_weight(RelaxationWeight::Bosonic)).unwrap();
        assert!((bos[0].operator[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!(collapse_operators(&single(3), &NoiseSpec::uniform(0.0)).unwrap().is_empty());
        assert!(collapse_operators(&single(3), &NoiseSpec::uniform(-1.0)).is_err());
    }

    #[test]
    fn zero_hamiltonian_keeps_state() {
        let h = ComplexMatrix::zeros(3, 3);
        let psi = StateVector::new(vec![re(0.6), C64::new(0.0, 0.8), re(0.0)]);
        let rho = DensityMatrix::from_pure(&psi);
        let out = propagate(&h, &[], &rho, 0.0, 1e-6, &StepControl::default()).unwrap();
        assert!((&out.matrix - &rho.matrix).max_abs() < 1e-15);
    }

    #[test]
    fn amplitude_damping_oracle() {
        // From |1⟩⟨1| with only the |0⟩⟨1| part active: ρ₁₁ = e^{−2rt}.
        let model = single(2);
        let kappa = 1e5;
        let noise = NoiseSpec { relaxation: kappa, ..NoiseSpec::default() };
        let ops = collapse_operators(&model, &noise).unwrap();
        let h = ComplexMatrix::zeros(2, 2);
        let rho = DensityMatrix::from_pure(&StateVector::basis(2, 1));
        let t = 5e-6;
        let control = StepControl { max_step: 1e-8, ..StepControl::default() };
        let out = propagate(&h, &ops, &rho, 0.0, t, &control).unwrap();
        let expected = (-kappa * t).exp();
        assert!((out.matrix[(1, 1)].re - expected).abs() < 1e-10, "{}", out.matrix[(1, 1)].re);
        out.validate().unwrap();
    }
}
