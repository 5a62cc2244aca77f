//! Closed-form singular value decompositions of the coupling blocks.
//!
//! The single-qubit Hamiltonian is `Ω [[0, F], [F†, 0]]` on
//! `{|00⟩, |10⟩, |01⟩, |11⟩}` and the two-qubit one is
//! `g (|0⟩_B⟨1| ⊗ K + h.c.)`. Both blocks have analytic factorizations that
//! give the propagators in block form.

use crate::operator::{cis, re, ComplexMatrix, C64};
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

/// Factors `(W, Q, R†)` with `F = W Q R†`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitFactors {
    pub w: ComplexMatrix,
    pub q: ComplexMatrix,
    pub r_dag: ComplexMatrix,
}

/// Factors `(X, Y, Z†)` with `K = X Y Z†`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitFactors {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z_dag: ComplexMatrix,
}

/// Coupling block `F(θ, φ)` of the single-qubit Hamiltonian.
pub fn f_block(theta: f64, phi: f64) -> ComplexMatrix {
    let half = 0.5 * (0.5 * theta).sin();
    let c = (0.5 * theta).cos();
    let e = cis(-phi);
    ComplexMatrix::from_rows(&[[e * half, re(0.0)], [re(c), e * half]])
}

/// Singular value decomposition of [`f_block`].
///
/// `Q = diag{cos²(θ/4), sin²(θ/4)}`. The left factor carries an `e^{−iφ}`
/// phase so that the product reproduces `F` exactly, not just up to phase.
pub fn svd_f(theta: f64, phi: f64) -> SingleQubitFactors {
    let s = (0.25 * theta).sin();
    let c = (0.25 * theta).cos();
    let e = cis(phi);
    let ph = cis(-phi);
    let w = ComplexMatrix::from_rows(&[[re(s), e.conj() * c], [e * c, re(-s)]]).scale(ph);
    let q = ComplexMatrix::real_diagonal(&[c * c, s * s]);
    let r_dag = ComplexMatrix::from_rows(&[[re(c), e.conj() * s], [e * s, re(-c)]]);
    SingleQubitFactors { w, q, r_dag }
}

/// Coupling block `K(ϑ, φ)` on `{|00⟩, |01⟩, |10⟩, |11⟩}_AC`.
pub fn k_block(vartheta: f64, varphi: f64) -> ComplexMatrix {
    let s = cis(varphi) * (0.5 * vartheta).sin();
    let c = re((0.5 * vartheta).cos());
    let mut k = ComplexMatrix::zeros(4, 4);
    k[(1, 0)] = s;
    k[(2, 0)] = c;
    k[(3, 1)] = c;
    k[(3, 2)] = s;
    k
}

/// Singular value decomposition of [`k_block`]; `Y = diag{0, 0, 1, 1}`.
pub fn svd_k(vartheta: f64, varphi: f64) -> TwoQubitFactors {
    let s = (0.5 * vartheta).sin();
    let c = (0.5 * vartheta).cos();
    let e = cis(varphi);
    let z0 = re(0.0);
    let one = re(1.0);
    let x = ComplexMatrix::from_rows(&[
        [one, z0, z0, z0],
        [z0, re(c), z0, e * s],
        [z0, -e.conj() * s, z0, re(c)],
        [z0, z0, one, z0],
    ]);
    let y = ComplexMatrix::real_diagonal(&[0.0, 0.0, 1.0, 1.0]);
    let z_dag = ComplexMatrix::from_rows(&[
        [z0, z0, z0, one],
        [z0, e.conj() * s, re(-c), z0],
        [z0, re(c), e * s, z0],
        [one, z0, z0, z0],
    ]);
    TwoQubitFactors { x, y, z_dag }
}

/// `cos(a·D)` and `sin(a·D)` for a real diagonal `D`.
pub(crate) fn diag_cos_sin(a: f64, d: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = d.rows();
    let vals: alloc::vec::Vec<f64> = (0..n).map(|i| d[(i, i)].re * a).collect();
    let cos: alloc::vec::Vec<C64> = vals.iter().map(|v| re(v.cos())).collect();
    let sin: alloc::vec::Vec<C64> = vals.iter().map(|v| re(v.sin())).collect();
    (ComplexMatrix::diagonal(&cos), ComplexMatrix::diagonal(&sin))
}

/// Block propagator `exp(−i a [[0, M], [M†, 0]])` from `M = U S V†`:
/// `[[U cos(aS) U†, −i U sin(aS) V†], [−i V sin(aS) U†, V cos(aS) V†]]`.
pub fn block_propagator(u: &ComplexMatrix, s: &ComplexMatrix, v_dag: &ComplexMatrix, a: f64) -> ComplexMatrix {
    let n = u.rows();
    let (cos, sin) = diag_cos_sin(a, s);
    let u_dag = u.dagger();
    let v = v_dag.dagger();
    let mi = C64::new(0.0, -1.0);
    let tl = &(u * &cos) * &u_dag;
    let tr = (&(u * &sin) * v_dag).scale(mi);
    let bl = (&(&v * &sin) * &u_dag).scale(mi);
    let br = &(&v * &cos) * v_dag;
    ComplexMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, true) => tl[(r, c)],
        (true, false) => tr[(r, c - n)],
        (false, true) => bl[(r - n, c)],
        (false, false) => br[(r - n, c - n)],
    })
}
