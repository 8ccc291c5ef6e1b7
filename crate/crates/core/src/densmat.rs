//! Dense complex density matrices over qubit registers.
//!
//! Qubits are numbered from 1. Qubit 1 is the leftmost tensor factor and the
//! most significant bit of a basis index, so for `q` qubits the basis state
//! `|b_1 b_2 ... b_q>` sits at index `sum_k b_k * 2^(q - k)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn qubits_for_dim(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

fn check_register(qubits: usize) -> Result<()> {
    if qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits(qubits));
    }
    Ok(())
}

/// Bit mask selecting qubit `k` (1-based) of a `q`-qubit basis index.
#[inline]
fn qubit_mask(k: usize, q: usize) -> usize {
    1 << (q - k)
}

fn subset_mask(subset: &[usize], q: usize) -> Result<usize> {
    let mut mask = 0;
    for &k in subset {
        if k == 0 || k > q {
            return Err(Error::UnknownQubit { qubit: k, qubits: q });
        }
        mask |= qubit_mask(k, q);
    }
    Ok(mask)
}

/// Max entrywise |M - M^dagger|.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    data: CMatrix,
}

impl DensityMatrix {
    /// Wraps a square matrix of power-of-two dimension. Hermiticity is checked
    /// to the structural tolerance; trace and positivity are not (intermediate
    /// unnormalized states are legitimate).
    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        let (rows, cols) = data.shape();
        let qubits = match qubits_for_dim(rows) {
            Some(q) if rows == cols => q,
            _ => return Err(Error::BadShape { rows, cols }),
        };
        check_register(qubits)?;
        let defect = hermitian_defect(&data);
        if defect > tol::STRUCTURAL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { qubits, data })
    }

    pub(crate) fn from_raw(qubits: usize, data: CMatrix) -> Self {
        debug_assert_eq!(data.nrows(), 1 << qubits);
        Self { qubits, data }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self::from_raw(psi.qubits(), v * v.adjoint())
    }

    /// The 0-qubit state `[1]`, identity for `tensor`.
    pub fn scalar() -> Self {
        Self::from_raw(0, CMatrix::from_element(1, 1, ONE))
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        check_register(qubits)?;
        let dim = 1 << qubits;
        let diag = DVector::from_element(dim, Complex64::new(1.0 / dim as f64, 0.0));
        Ok(Self::from_raw(qubits, CMatrix::from_diagonal(&diag)))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    /// Rescales to unit trace. Fails on a (numerically) zero trace.
    pub fn normalized(mut self) -> Result<Self> {
        let tr = self.trace();
        if tr.abs() < f64::MIN_POSITIVE {
            return Err(Error::ZeroProbability);
        }
        self.data /= Complex64::new(tr, 0.0);
        Ok(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.data)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Hermitian, unit trace and positive semidefinite within tolerance.
    pub fn is_physical(&self) -> bool {
        hermitian_defect(&self.data) <= tol::STRUCTURAL
            && (self.trace() - 1.0).abs() <= tol::STRUCTURAL
            && self.min_eigenvalue().is_ok_and(|m| m >= -tol::SPECTRAL)
    }

    /// Reorders qubits: qubit `k` of the result is qubit `order[k - 1]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let q = self.qubits;
        let mut seen = vec![false; q + 1];
        if order.len() != q {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} for a {q}-qubit state",
                order.len()
            )));
        }
        for &k in order {
            if k == 0 || k > q {
                return Err(Error::UnknownQubit { qubit: k, qubits: q });
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidArgument(format!("qubit {k} repeated in permutation")));
            }
        }
        let dim = self.dim();
        let map: Vec<usize> = (0..dim)
            .map(|out| {
                order.iter().enumerate().fold(0, |acc, (pos, &src)| {
                    if out & qubit_mask(pos + 1, q) != 0 {
                        acc | qubit_mask(src, q)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let data = CMatrix::from_fn(dim, dim, |r, c| self.data[(map[r], map[c])]);
        Ok(Self::from_raw(q, data))
    }

    /// Reverses qubit order (mirror image of a chain).
    pub fn reversed(&self) -> Self {
        let order: Vec<usize> = (1..=self.qubits).rev().collect();
        self.permute_qubits(&order).expect("reversal is a valid permutation")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    qubits: usize,
    amps: DVector<Complex64>,
}

impl PureState {
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        let dim = amps.len();
        let qubits = qubits_for_dim(dim).ok_or(Error::BadShape { rows: dim, cols: 1 })?;
        check_register(qubits)?;
        let norm2 = amps.norm_squared();
        if (norm2 - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { qubits, amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            amps.len(),
            amps.iter().map(|&a| Complex64::new(a, 0.0)),
        ))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }
}

/// Kronecker product; `a` supplies the leading (most significant) qubits.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let qubits = a.qubits + b.qubits;
    check_register(qubits)?;
    Ok(DensityMatrix::from_raw(qubits, a.data.kronecker(&b.data)))
}

/// Traces out the listed qubits; the survivors keep their relative order.
pub fn partial_trace(rho: &DensityMatrix, discard: &[usize]) -> Result<DensityMatrix> {
    let q = rho.qubits;
    let mask = subset_mask(discard, q)?;
    let kept: Vec<usize> = (1..=q).filter(|&k| mask & qubit_mask(k, q) == 0).collect();
    let q_out = kept.len();
    let dim = rho.dim();

    // compress the kept bits of every input index into an output index
    let out_index: Vec<usize> = (0..dim)
        .map(|i| {
            kept.iter().enumerate().fold(0, |acc, (pos, &k)| {
                if i & qubit_mask(k, q) != 0 {
                    acc | qubit_mask(pos + 1, q_out)
                } else {
                    acc
                }
            })
        })
        .collect();

    let dim_out = 1 << q_out;
    let mut out = CMatrix::zeros(dim_out, dim_out);
    for c in 0..dim {
        for r in 0..dim {
            if (r ^ c) & mask == 0 {
                out[(out_index[r], out_index[c])] += rho.data[(r, c)];
            }
        }
    }
    Ok(DensityMatrix::from_raw(q_out, out))
}

/// Transposes the row/column indices of the listed qubits only.
pub fn partial_transpose(rho: &DensityMatrix, subset: &[usize]) -> Result<DensityMatrix> {
    let q = rho.qubits;
    let mask = subset_mask(subset, q)?;
    let dim = rho.dim();
    let data = CMatrix::from_fn(dim, dim, |r, c| {
        let r2 = (r & !mask) | (c & mask);
        let c2 = (c & !mask) | (r & mask);
        rho.data[(r2, c2)]
    });
    Ok(DensityMatrix::from_raw(q, data))
}

/// Ascending real eigenvalues of a Hermitian matrix.
///
/// The solver runs on `(M + M^dagger) / 2`; an asymmetry above the spectral
/// tolerance is rejected rather than silently symmetrized away.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::BadShape { rows, cols });
    }
    let defect = hermitian_defect(m);
    if defect > tol::SPECTRAL {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Most negative eigenvalue of the partial transpose over `subset`.
///
/// This is the entanglement measure used throughout the crate: negative
/// values certify entanglement across the cut.
pub fn negativity(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    partial_transpose(rho, subset)?.min_eigenvalue()
}

/// `<psi| rho |psi>`.
pub fn fidelity_pure(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: target.dim(),
        });
    }
    let psi = target.amplitudes();
    Ok((psi.adjoint() * &rho.data * psi)[(0, 0)].re)
}

/// `Tr(rho^2)`, computed as the Frobenius norm squared (rho is Hermitian).
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.data.iter().map(|z| z.norm_sqr()).sum()
}

fn completeness_defect(ops: &[CMatrix]) -> f64 {
    let cols = ops[0].ncols();
    let sum = ops
        .iter()
        .fold(CMatrix::zeros(cols, cols), |acc, k| acc + k.adjoint() * k);
    (sum - CMatrix::identity(cols, cols))
        .iter()
        .fold(0.0, |worst, z| worst.max(z.norm()))
}

fn check_kraus_shapes(ops: &[CMatrix]) -> Result<(usize, usize)> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?;
    let (rows, cols) = first.shape();
    for k in ops {
        if k.shape() != (rows, cols) {
            return Err(Error::DimensionMismatch {
                left: cols,
                right: k.ncols(),
            });
        }
    }
    match (qubits_for_dim(rows), qubits_for_dim(cols)) {
        (Some(w_out), Some(w_in)) => Ok((w_out, w_in)),
        _ => Err(Error::BadShape { rows, cols }),
    }
}

/// `sum_k K_k rho K_k^dagger` with full-register operators.
///
/// When `trace_preserving` is set the completeness relation is checked first.
pub fn apply_kraus(rho: &DensityMatrix, ops: &[CMatrix], trace_preserving: bool) -> Result<DensityMatrix> {
    let (w_out, w_in) = check_kraus_shapes(ops)?;
    if w_in != rho.qubits {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: ops[0].ncols(),
        });
    }
    if trace_preserving {
        let defect = completeness_defect(ops);
        if defect > tol::SPECTRAL {
            return Err(Error::IncompleteKraus(defect));
        }
    }
    let data = ops.iter().fold(CMatrix::zeros(1 << w_out, 1 << w_out), |acc, k| {
        acc + k * &rho.data * k.adjoint()
    });
    Ok(DensityMatrix::from_raw(w_out, data))
}

/// Applies `sum_k K_k rho K_k^dagger` where each `K_k` acts on the contiguous
/// block of qubits starting at `first` (1-based).
///
/// Operators may change the block width: a `2^a x 2^b` operator replaces `b`
/// qubits by `a` qubits at the same position. Nothing is renormalized.
pub fn apply_local(rho: &DensityMatrix, first: usize, ops: &[CMatrix]) -> Result<DensityMatrix> {
    let q = rho.qubits;
    let (w_out, w_in) = check_kraus_shapes(ops)?;
    if first == 0 || first + w_in - 1 > q {
        return Err(Error::UnknownQubit {
            qubit: first + w_in.saturating_sub(1),
            qubits: q,
        });
    }
    let lo_bits = q + 1 - first - w_in;
    if w_in == w_out && ops.iter().all(is_diagonal) {
        return Ok(apply_local_diagonal(rho, first, w_in, ops));
    }

    let q_out = q - w_in + w_out;
    check_register(q_out)?;
    let hi_count = 1usize << (first - 1);
    let lo_count = 1usize << lo_bits;
    let (rows, cols) = (1usize << w_out, 1usize << w_in);
    let dim = rho.dim();
    let dim_out = 1usize << q_out;
    let idx_in = |hi: usize, m: usize, lo: usize| (hi << (w_in + lo_bits)) | (m << lo_bits) | lo;
    let idx_out = |hi: usize, m: usize, lo: usize| (hi << (w_out + lo_bits)) | (m << lo_bits) | lo;

    let src = rho.data.as_slice();
    let mut out = vec![ZERO; dim_out * dim_out];
    let mut left = vec![ZERO; dim_out * dim];

    for k in ops {
        // left = K rho (dim_out x dim), column-major
        for col in 0..dim {
            let src_col = &src[col * dim..(col + 1) * dim];
            let dst_col = &mut left[col * dim_out..(col + 1) * dim_out];
            for hi in 0..hi_count {
                for lo in 0..lo_count {
                    for a in 0..rows {
                        let mut acc = ZERO;
                        for c in 0..cols {
                            let kv = k[(a, c)];
                            if kv != ZERO {
                                acc += kv * src_col[idx_in(hi, c, lo)];
                            }
                        }
                        dst_col[idx_out(hi, a, lo)] = acc;
                    }
                }
            }
        }
        // out += left K^dagger (dim_out x dim_out)
        for hi in 0..hi_count {
            for lo in 0..lo_count {
                for b in 0..rows {
                    let out_col = idx_out(hi, b, lo);
                    for d in 0..cols {
                        let kv = k[(b, d)].conj();
                        if kv == ZERO {
                            continue;
                        }
                        let in_col = idx_in(hi, d, lo);
                        let l = &left[in_col * dim_out..(in_col + 1) * dim_out];
                        let o = &mut out[out_col * dim_out..(out_col + 1) * dim_out];
                        for (o, l) in o.iter_mut().zip(l) {
                            *o += l * kv;
                        }
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::from_raw(q_out, CMatrix::from_vec(dim_out, dim_out, out)))
}

fn is_diagonal(k: &CMatrix) -> bool {
    k.is_square()
        && k.iter()
            .enumerate()
            .all(|(n, z)| n % k.nrows() == n / k.nrows() || *z == ZERO)
}

/// Diagonal operators only rescale entries: entry (r, c) picks up
/// `sum_k K_k[r_block] conj(K_k[c_block])`.
fn apply_local_diagonal(rho: &DensityMatrix, first: usize, width: usize, ops: &[CMatrix]) -> DensityMatrix {
    let q = rho.qubits;
    let lo_bits = q + 1 - first - width;
    let block = (1usize << width) - 1;
    let n = 1usize << width;
    let mut factor = vec![ZERO; n * n];
    for k in ops {
        for a in 0..n {
            for b in 0..n {
                factor[a * n + b] += k[(a, a)] * k[(b, b)].conj();
            }
        }
    }
    let dim = rho.dim();
    let mut data = rho.data.clone();
    for c in 0..dim {
        let cb = (c >> lo_bits) & block;
        for r in 0..dim {
            let rb = (r >> lo_bits) & block;
            data[(r, c)] *= factor[rb * n + cb];
        }
    }
    DensityMatrix::from_raw(q, data)
}
