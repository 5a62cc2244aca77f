//! Dense complex matrices and state vectors for truncated-oscillator registers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

/// Complex double.
pub type C64 = Complex<f64>;

/// `e^{i·phase}`.
#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::new(phase.cos(), phase.sin())
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Errors raised by operator construction and checks.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorError {
    /// A truncation level or matrix size that cannot be used.
    InvalidDimension { dim: usize },
    /// Two operands whose shapes are incompatible.
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    /// A Hermitian operator was required.
    NotHermitian { deviation: f64 },
    /// An embedding refers to a site that does not exist or repeats one.
    InvalidSites,
}

impl fmt::Display for OperatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidDimension { dim } => write!(f, "invalid dimension {dim}"),
            Self::ShapeMismatch { left, right } => write!(
                f,
                "shape mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Self::NotHermitian { deviation } => {
                write!(f, "operator is not Hermitian (max |H - H†| = {deviation:e})")
            }
            Self::InvalidSites => f.write_str("embedding sites are out of range or repeated"),
        }
    }
}

impl core::error::Error for OperatorError {}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            f.write_str("  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            f.write_str("\n")?;
        }
        f.write_str("]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { rows: rows.len(), cols, data }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_fn(n, cols, |r, c| re(rows[r].as_ref()[c]))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = re(x);
        }
        m
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Self {
        Self::from_fn(ket.dim(), bra.dim(), |r, c| ket[r] * bra[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * k).collect() }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(re(k))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum; bounds the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |A - A†|`, or infinity for a non-square matrix.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `max |U U† - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&(self * &self.dagger()) - &Self::identity(self.rows)).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Replaces the matrix by its Hermitian part `(A + A†)/2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        let n = self.rows;
        for r in 0..n {
            let d = self.data[r * n + r];
            self.data[r * n + r] = C64::new(d.re, 0.0);
            for c in (r + 1)..n {
                let a = self.data[r * n + c];
                let b = self.data[c * n + r];
                let m = (a + b.conj()) * 0.5;
                self.data[r * n + c] = m;
                self.data[c * n + r] = m.conj();
            }
        }
    }

    /// `out = self · rhs`, skipping zero entries of `self`.
    pub fn mul_into(&self, rhs: &Self, out: &mut Self) {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        assert_eq!((out.rows, out.cols), (self.rows, rhs.cols));
        out.fill_zero();
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, OperatorError> {
        if self.cols != rhs.rows {
            return Err(OperatorError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        self.mul_into(rhs, &mut out);
        Ok(out)
    }

    pub fn mul_vec(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.cols, v.dim());
        StateVector::new(
            (0..self.rows)
                .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
                .collect(),
        )
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &(self * rhs) - &(rhs * self)
    }

    /// Extracts the block with the given row and column indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])])
    }

    /// `⟨a|self|b⟩`.
    pub fn expectation(&self, a: &StateVector, b: &StateVector) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.rows {
            let ar = a[r].conj();
            if ar.re == 0.0 && ar.im == 0.0 {
                continue;
            }
            let mut row = C64::new(0.0, 0.0);
            for c in 0..self.cols {
                row += self.data[r * self.cols + c] * b[c];
            }
            acc += ar * row;
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Pure state amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amps: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[index] = re(1.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { amps: self.amps.iter().map(|z| z / n).collect() }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { amps: self.amps.iter().map(|z| z * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() }
    }
}

impl Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.amps[i]
    }
}

/// Lowering operator of a `d`-level oscillator, `⟨j|a|j+1⟩ = √(j+1)`.
pub fn ladder(d: usize) -> Result<ComplexMatrix, OperatorError> {
    if d < 2 {
        return Err(OperatorError::InvalidDimension { dim: d });
    }
    let mut a = ComplexMatrix::zeros(d, d);
    for j in 0..d - 1 {
        a[(j, j + 1)] = re(((j + 1) as f64).sqrt());
    }
    Ok(a)
}

/// Number operator `diag{0, …, d−1}`.
pub fn number(d: usize) -> Result<ComplexMatrix, OperatorError> {
    if d < 2 {
        return Err(OperatorError::InvalidDimension { dim: d });
    }
    Ok(ComplexMatrix::real_diagonal(&(0..d).map(|j| j as f64).collect::<Vec<_>>()))
}

/// Tensor product; the index of `|i⟩⊗|j⟩` is `i·dim(B) + j`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Tensor product of state vectors.
pub fn kron_vec(a: &StateVector, b: &StateVector) -> StateVector {
    let mut out = Vec::with_capacity(a.dim() * b.dim());
    for x in a.as_slice() {
        for y in b.as_slice() {
            out.push(x * y);
        }
    }
    StateVector::new(out)
}

/// Decomposes a register index into per-site levels (row-major).
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits`].
pub fn compose_index(levels: &[usize], dims: &[usize]) -> usize {
    levels.iter().zip(dims).fold(0, |acc, (&l, &d)| acc * d + l)
}

/// Places `op`, defined on the product of `sites` (in that order), into the
/// register with per-site dimensions `dims`; identity on every other site.
pub fn embed(
    op: &ComplexMatrix,
    dims: &[usize],
    sites: &[usize],
) -> Result<ComplexMatrix, OperatorError> {
    let mut seen = vec![false; dims.len()];
    for &s in sites {
        if s >= dims.len() || seen[s] {
            return Err(OperatorError::InvalidSites);
        }
        seen[s] = true;
    }
    let sub_dims: Vec<usize> = sites.iter().map(|&s| dims[s]).collect();
    let sub: usize = sub_dims.iter().product();
    if op.rows() != sub || op.cols() != sub {
        return Err(OperatorError::ShapeMismatch { left: (op.rows(), op.cols()), right: (sub, sub) });
    }
    let total: usize = dims.iter().product();
    let all_digits: Vec<Vec<usize>> = (0..total).map(|i| digits(i, dims)).collect();
    let sub_index = |lv: &[usize]| sites.iter().fold(0, |acc, &s| acc * dims[s] + lv[s]);
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let dr = &all_digits[r];
        for c in 0..total {
            let dc = &all_digits[c];
            let spectators_match = (0..dims.len()).all(|k| seen[k] || dr[k] == dc[k]);
            if spectators_match {
                out[(r, c)] = op[(sub_index(dr), sub_index(dc))];
            }
        }
    }
    Ok(out)
}

/// `exp(−i H t)` for Hermitian `H`, by scaling and squaring a Taylor series.
pub fn matrix_exp(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, OperatorError> {
    if !h.is_square() {
        return Err(OperatorError::ShapeMismatch { left: (h.rows(), h.cols()), right: (h.cols(), h.rows()) });
    }
    let deviation = h.hermiticity_deviation();
    if deviation > 1e-10 * h.max_abs().max(1.0) {
        return Err(OperatorError::NotHermitian { deviation });
    }
    Ok(exp_scaled(&h.scale(C64::new(0.0, -t))))
}

/// `exp(A)` for a general square matrix of moderate norm.
pub(crate) fn exp_scaled(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let norm = a.one_norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let b = a.scale_real(0.5f64.powi(squarings as i32));
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    let mut scratch = ComplexMatrix::zeros(n, n);
    for k in 1..=40 {
        term.mul_into(&b, &mut scratch);
        term = scratch.scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum.mul_into(&sum.clone(), &mut scratch);
        core::mem::swap(&mut sum, &mut scratch);
    }
    sum
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Uses cyclic Jacobi rotations on the real symmetric embedding
/// `[[Re H, −Im H], [Im H, Re H]]`, whose spectrum is that of `H` with every
/// eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>, OperatorError> {
    let deviation = h.hermiticity_deviation();
    if deviation > 1e-8 * h.max_abs().max(1.0) {
        return Err(OperatorError::NotHermitian { deviation });
    }
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = h[(r, c)];
            a[r * m + c] = z.re;
            a[(r + n) * m + (c + n)] = z.re;
            a[r * m + (c + n)] = -z.im;
            a[(r + n) * m + c] = z.im;
        }
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|p| ((p + 1)..m).map(move |q| (p, q)))
            .map(|(p, q)| a[p * m + q] * a[p * m + q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    Ok(eig.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Entry-wise distance between `a` and `b` after removing the best global phase.
///
/// The phase is taken from `Tr(b† a)`; if that trace vanishes the plain
/// distance is returned.
pub fn distance_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let overlap = (&b.dagger() * a).trace();
    let phase = if overlap.norm() > 1e-300 { overlap / overlap.norm() } else { re(1.0) };
    (a - &b.scale(phase)).max_abs()
}
