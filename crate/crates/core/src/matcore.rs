//! Dense complex linear algebra on small matrices.
//!
//! Everything here works on square matrices of dimension at most
//! [`MAX_DIM`] stored row-major. Qubit-structured operations (tensor
//! product, partial transpose, partial trace, slot permutation) address
//! subsystems through a [`QubitFactorization`] with big-endian slot
//! order: slot 0 is the most significant bit of a basis index.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported matrix dimension (6 qubit slots).
pub const MAX_DIM: usize = 64;

/// Tolerance for structural checks (Hermiticity, trace, normalization).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Tolerance for spectral assertions (eigenvalue reconstruction, positivity).
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Jacobi sweep convergence threshold on the off-diagonal Frobenius norm,
/// relative to the matrix scale.
const JACOBI_OFF_TOL: f64 = 1e-14;

const MAX_JACOBI_SWEEPS: usize = 64;

pub type C64 = Complex64;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge(dim));
    }
    Ok(())
}

/// Dense square complex matrix; the carrier for states, operators and
/// density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        Ok(m)
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, C64::new(d, 0.0));
        }
        Ok(m)
    }

    /// Build from rows of complex entries; every row must have the same
    /// length as the number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut m = Self::zeros(dim)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self { dim: self.dim, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Self::zeros(n).expect("dims already validated");
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n).expect("dims already validated");
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute deviation from Hermiticity, max |a_ij - conj(a_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c && self.get(r, c).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Validate the density-matrix invariants: Hermitian within 1e-12,
    /// unit trace within 1e-12, eigenvalues >= -1e-10.
    pub fn check_density_matrix(&self) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > STRUCTURAL_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "hermiticity deviation {dev:.3e}"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let (evals, _) = hermitian_eigen(self)?;
        if evals[0] < -SPECTRAL_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:.3e}",
                evals[0]
            )));
        }
        Ok(())
    }

    /// Plain-text dump: one row per line, entries as `re+imj` with 17
    /// significant digits, space-separated.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim {
            for c in 0..self.dim {
                if c > 0 {
                    out.push(' ');
                }
                out.push_str(&format_entry(self.get(r, c)));
            }
            out.push('\n');
        }
        out
    }
}

fn format_entry(z: C64) -> String {
    // normalize -0.0 so the sign printed is the separator, not the value's
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{:.16e}-{:.16e}j", z.re, -im)
    } else {
        format!("{:.16e}+{:.16e}j", z.re, im)
    }
}

/// Normalized complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    dim: usize,
    amps: Vec<C64>,
}

impl Ket {
    /// Construct from amplitudes, requiring unit norm within 1e-12.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { dim: amps.len(), amps })
    }

    /// Construct from unnormalized amplitudes, dividing out the norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let inv = 1.0 / norm_sqr.sqrt();
        let dim = amps.len();
        let amps = amps.into_iter().map(|a| a * inv).collect();
        Ok(Self { dim, amps })
    }

    /// Basis ket |index> of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { dim, amps })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Outer product |psi><psi| as a density matrix.
    pub fn density(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim).expect("ket dim already validated");
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.set(r, c, self.amps[r] * self.amps[c].conj());
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "ket dimensions differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// View of a dimension-2^n space as n qubit slots, big-endian: slot 0 is
/// the most significant bit of a basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitFactorization {
    num_qubits: usize,
}

impl QubitFactorization {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if 1usize << num_qubits > MAX_DIM {
            return Err(Error::DimensionTooLarge(1 << num_qubits));
        }
        Ok(Self { num_qubits })
    }

    /// Factorization matching a matrix or ket dimension, which must be a
    /// power of two.
    pub fn for_dim(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !dim.is_power_of_two() || dim == 1 {
            return Err(Error::NotPowerOfTwo(dim));
        }
        Self::new(dim.trailing_zeros() as usize)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    /// Bit carried by `slot` in basis index `index`.
    #[inline]
    pub fn bit(&self, index: usize, slot: usize) -> usize {
        (index >> (self.num_qubits - 1 - slot)) & 1
    }

    /// `index` with the bit of `slot` replaced by `bit`.
    #[inline]
    pub fn with_bit(&self, index: usize, slot: usize, bit: usize) -> usize {
        let shift = self.num_qubits - 1 - slot;
        (index & !(1 << shift)) | (bit << shift)
    }

    pub fn check_slots(&self, slots: &[usize]) -> Result<()> {
        for &s in slots {
            if s >= self.num_qubits {
                return Err(Error::SlotOutOfRange { slot: s, num_qubits: self.num_qubits });
            }
        }
        Ok(())
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dim {} does not match {} qubit slots",
                m.dim(),
                self.num_qubits
            )));
        }
        Ok(())
    }
}

/// Kronecker product with index convention (i_a * b.dim + i_b).
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = a.dim() * b.dim();
    check_dim(dim)?;
    let mut out = ComplexMatrix::zeros(dim)?;
    for ra in 0..a.dim() {
        for ca in 0..a.dim() {
            let va = a.get(ra, ca);
            if va.norm_sqr() == 0.0 {
                continue;
            }
            for rb in 0..b.dim() {
                for cb in 0..b.dim() {
                    out.set(ra * b.dim() + rb, ca * b.dim() + cb, va * b.get(rb, cb));
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of state vectors.
pub fn tensor_ket(a: &Ket, b: &Ket) -> Result<Ket> {
    let dim = a.dim() * b.dim();
    check_dim(dim)?;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for ia in 0..a.dim() {
        for ib in 0..b.dim() {
            amps[ia * b.dim() + ib] = a.amplitude(ia) * b.amplitude(ib);
        }
    }
    Ket::new(amps)
}

/// Transpose the listed qubit slots: the bra/ket bits of those slots are
/// swapped between row and column index. Applying it twice is the identity.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    fact: &QubitFactorization,
    slots: &[usize],
) -> Result<ComplexMatrix> {
    fact.check_matrix(rho)?;
    fact.check_slots(slots)?;
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            let (mut ii, mut jj) = (i, j);
            for &s in slots {
                let (bi, bj) = (fact.bit(i, s), fact.bit(j, s));
                ii = fact.with_bit(ii, s, bj);
                jj = fact.with_bit(jj, s, bi);
            }
            out.set(ii, jj, rho.get(i, j));
        }
    }
    Ok(out)
}

/// Trace out the listed qubit slots. Tracing all slots yields the 1x1
/// matrix holding the trace.
pub fn partial_trace(
    rho: &ComplexMatrix,
    fact: &QubitFactorization,
    slots: &[usize],
) -> Result<ComplexMatrix> {
    fact.check_matrix(rho)?;
    fact.check_slots(slots)?;
    let n = fact.num_qubits();
    let mut traced = vec![false; n];
    for &s in slots {
        traced[s] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&s| !traced[s]).collect();
    let traced_slots: Vec<usize> = (0..n).filter(|&s| traced[s]).collect();
    let dk = 1usize << kept.len();
    let dt = 1usize << traced_slots.len();

    // embed a kept-index/traced-index pair back into a full basis index
    let embed = |k: usize, t: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &s) in kept.iter().enumerate() {
            let bit = (k >> (kept.len() - 1 - pos)) & 1;
            idx = fact.with_bit(idx, s, bit);
        }
        for (pos, &s) in traced_slots.iter().enumerate() {
            let bit = (t >> (traced_slots.len() - 1 - pos)) & 1;
            idx = fact.with_bit(idx, s, bit);
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(dk)?;
    for a in 0..dk {
        for b in 0..dk {
            let mut sum = C64::new(0.0, 0.0);
            for t in 0..dt {
                sum += rho.get(embed(a, t), embed(b, t));
            }
            out.set(a, b, sum);
        }
    }
    Ok(out)
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation length {} does not match {n} slots",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::SlotOutOfRange { slot: p, num_qubits: n });
        }
        if seen[p] {
            return Err(Error::InvalidLayout(format!("slot {p} repeated in permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

fn remap_index(fact: &QubitFactorization, perm: &[usize], index: usize) -> usize {
    let n = fact.num_qubits();
    let mut out = 0usize;
    for new_slot in 0..n {
        let bit = fact.bit(index, perm[new_slot]);
        out |= bit << (n - 1 - new_slot);
    }
    out
}

/// Reorder qubit slots of a matrix. `perm[new] = old`: the value held at
/// old slot `perm[s]` appears at new slot `s`.
pub fn permute_slots(
    m: &ComplexMatrix,
    fact: &QubitFactorization,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    fact.check_matrix(m)?;
    check_permutation(perm, fact.num_qubits())?;
    let d = m.dim();
    let mut out = ComplexMatrix::zeros(d)?;
    for i in 0..d {
        let ri = remap_index(fact, perm, i);
        for j in 0..d {
            out.set(ri, remap_index(fact, perm, j), m.get(i, j));
        }
    }
    Ok(out)
}

/// Reorder qubit slots of a ket, same convention as [`permute_slots`].
pub fn permute_slots_ket(k: &Ket, fact: &QubitFactorization, perm: &[usize]) -> Result<Ket> {
    if k.dim() != fact.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ket dim {} does not match {} qubit slots",
            k.dim(),
            fact.num_qubits()
        )));
    }
    check_permutation(perm, fact.num_qubits())?;
    let mut amps = vec![C64::new(0.0, 0.0); k.dim()];
    for i in 0..k.dim() {
        amps[remap_index(fact, perm, i)] = k.amplitude(i);
    }
    Ket::new(amps)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues sorted ascending and the unitary whose columns are
/// the matching eigenvectors, so that `h = Q diag(evals) Q^dagger`. The
/// eigenvector order inside a degenerate cluster is unspecified.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = h.hermiticity_deviation();
    if dev > SPECTRAL_TOL {
        return Err(Error::NotHermitian { deviation: dev, tol: SPECTRAL_TOL });
    }
    let n = h.dim();

    // work on the exactly Hermitian part (h + h^dagger)/2
    let mut a = h.add(&h.adjoint()).scaled(0.5);
    let mut q = ComplexMatrix::identity(n)?;
    let scale = a.frobenius_norm().max(1.0);

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                jacobi_rotate(&mut a, &mut q, p, r);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let evals: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vecs = ComplexMatrix::zeros(n)?;
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vecs.set(row, new_col, q.get(row, old_col));
        }
    }
    Ok((evals, vecs))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += a.get(r, c).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation zeroing a[p][r].
fn jacobi_rotate(a: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize) {
    let b = a.get(p, r);
    let abs_b = b.norm();
    if abs_b < 1e-150 {
        return;
    }
    let phase = b / abs_b;
    let app = a.get(p, p).re;
    let arr = a.get(r, r).re;

    // rotation angle from tan(2 theta) = 2|b| / (app - arr)
    let tau = (app - arr) / (2.0 * abs_b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // column mixing coefficients of the rotation
    let sp = phase * s; // enters with e^{+i phi}
    let sm = phase.conj() * s; // enters with e^{-i phi}

    let n = a.dim();
    for k in 0..n {
        if k == p || k == r {
            continue;
        }
        let akp = a.get(k, p);
        let akr = a.get(k, r);
        let new_kp = akp * c + akr * sm;
        let new_kr = -akp * sp + akr * c;
        a.set(k, p, new_kp);
        a.set(p, k, new_kp.conj());
        a.set(k, r, new_kr);
        a.set(r, k, new_kr.conj());
    }
    let new_pp = c * c * app + 2.0 * c * s * abs_b + s * s * arr;
    let new_rr = s * s * app - 2.0 * c * s * abs_b + c * c * arr;
    a.set(p, p, C64::new(new_pp, 0.0));
    a.set(r, r, C64::new(new_rr, 0.0));
    a.set(p, r, C64::new(0.0, 0.0));
    a.set(r, p, C64::new(0.0, 0.0));

    for k in 0..n {
        let qkp = q.get(k, p);
        let qkr = q.get(k, r);
        q.set(k, p, qkp * c + qkr * sm);
        q.set(k, r, -qkp * sp + qkr * c);
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let (evals, _) = hermitian_eigen(m)?;
    Ok(evals.iter().map(|v| v.abs()).sum())
}
