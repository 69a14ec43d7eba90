//! Complex linear algebra for qubit states: tensor products, partial
//! trace/transpose, Hermitian eigenvalues, concurrence, negativity.
//!
//! Basis convention, fixed once: a state over the qubit list `[q0, q1, ...]`
//! orders its computational basis lexicographically with the first listed
//! qubit as the most significant bit, so |0...0⟩ is index 0. Matrices are
//! row-major in that basis.

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Validity thresholds used when no explicit tolerance is supplied.
pub const DEFAULT_VALIDITY_TOL: f64 = 1e-10;

/// Eigenvalues of ρ that round-off pushed slightly negative are clamped to
/// zero; anything below this is treated as genuinely invalid.
pub const PSD_CLAMP: f64 = -1e-10;

/// Dimension cap above which validation skips the O(d³) eigenvalue PSD check
/// (Hermiticity and trace are always checked; pair reductions are always
/// fully checked at 4×4).
const PSD_EIGEN_CAP: usize = 512;

/// Density operator over an ordered list of qubit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    qubits: Vec<usize>,
    matrix: DMatrix<C64>,
}

/// Normalized pure state over an ordered list of qubit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    qubits: Vec<usize>,
    amplitudes: DVector<C64>,
}

fn check_labels(qubits: &[usize]) -> Result<()> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != qubits.len() {
        return Err(Error::OverlappingLabels);
    }
    Ok(())
}

impl DensityOperator {
    /// Wrap a matrix after validating Hermiticity, trace and (for small
    /// dimensions) positive semidefiniteness at the default thresholds.
    pub fn new(qubits: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        let op = Self::new_unchecked(qubits, matrix)?;
        op.validate(DEFAULT_VALIDITY_TOL)?;
        Ok(op)
    }

    /// Wrap without numerical validation; shape and labels are still checked.
    /// For matrices that are valid by construction.
    pub fn new_unchecked(qubits: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        check_labels(&qubits)?;
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::ShapeMismatch(matrix.nrows(), matrix.ncols(), dim, dim));
        }
        Ok(Self { qubits, matrix })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diagonal().sum()
    }

    /// Hermiticity, unit trace, and positive semidefiniteness (the latter via
    /// eigenvalues only up to a dimension cap; see module notes).
    pub fn validate(&self, tol: f64) -> Result<()> {
        let dev = hermiticity_deviation(&self.matrix);
        if dev > tol {
            return Err(Error::NonHermitian(dev));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!(
                "trace {} deviates from 1",
                tr.re
            )));
        }
        if self.dim() <= PSD_EIGEN_CAP {
            let eigs = hermitian_eigenvalues_unchecked(&self.matrix);
            if let Some(&min) = eigs.last() {
                if min < -tol.max(-PSD_CLAMP) {
                    return Err(Error::InvalidDensity(format!(
                        "minimum eigenvalue {min:.3e} below -{tol:.1e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl PureState {
    /// Wrap amplitudes, requiring unit norm to the default threshold.
    pub fn new(qubits: Vec<usize>, amplitudes: DVector<C64>) -> Result<Self> {
        check_labels(&qubits)?;
        let dim = 1usize << qubits.len();
        if amplitudes.len() != dim {
            return Err(Error::ShapeMismatch(amplitudes.len(), 1, dim, 1));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > DEFAULT_VALIDITY_TOL {
            return Err(Error::Unnormalized((norm - 1.0).abs()));
        }
        Ok(Self { qubits, amplitudes })
    }

    /// Wrap after projecting onto the unit sphere (errors only on zero norm).
    pub fn new_normalized(qubits: Vec<usize>, amplitudes: DVector<C64>) -> Result<Self> {
        check_labels(&qubits)?;
        let dim = 1usize << qubits.len();
        if amplitudes.len() != dim {
            return Err(Error::ShapeMismatch(amplitudes.len(), 1, dim, 1));
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero amplitude vector".into()));
        }
        Ok(Self {
            qubits,
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// Projector |ψ⟩⟨ψ| as a density operator.
    pub fn projector(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::new_unchecked(self.qubits.clone(), m).expect("projector shape")
    }

    /// Relabel qubit `positions` (state itself unchanged).
    pub fn with_qubits(&self, qubits: Vec<usize>) -> Result<Self> {
        check_labels(&qubits)?;
        if qubits.len() != self.qubits.len() {
            return Err(Error::QubitCount {
                expected: self.qubits.len(),
                got: qubits.len(),
            });
        }
        Ok(Self {
            qubits,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Reorder the qubit list ascending, permuting amplitudes to match.
    pub fn sorted_qubits(&self) -> Self {
        let k = self.qubits.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&p| self.qubits[p]);
        let mut qubits = Vec::with_capacity(k);
        for &p in &order {
            qubits.push(self.qubits[p]);
        }
        let dim = 1usize << k;
        let mut amps = DVector::zeros(dim);
        for idx in 0..dim {
            // bit of source position p lands at the slot of its new rank
            let mut new_idx = 0usize;
            for (new_pos, &old_pos) in order.iter().enumerate() {
                let bit = (idx >> (k - 1 - old_pos)) & 1;
                new_idx |= bit << (k - 1 - new_pos);
            }
            amps[new_idx] = self.amplitudes[idx];
        }
        Self { qubits, amplitudes: amps }
    }
}

pub fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

/// Kronecker product with concatenated qubit order.
pub fn tensor_product(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let mut qubits = a.qubits.clone();
    qubits.extend_from_slice(&b.qubits);
    check_labels(&qubits).map_err(|_| Error::OverlappingLabels)?;
    DensityOperator::new_unchecked(qubits, a.matrix.kronecker(&b.matrix))
}

/// Kronecker product of pure states with concatenated qubit order.
pub fn tensor_product_pure(a: &PureState, b: &PureState) -> Result<PureState> {
    let mut qubits = a.qubits.clone();
    qubits.extend_from_slice(&b.qubits);
    check_labels(&qubits).map_err(|_| Error::OverlappingLabels)?;
    let amps = DVector::from_column_slice(a.amplitudes.kronecker(&b.amplitudes).as_slice());
    PureState::new(qubits, amps)
}

/// Positions (within the state's qubit list) of the kept labels, preserving
/// the list's own order; errors on labels the state does not carry.
fn keep_positions(qubits: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    for &k in keep {
        if !qubits.contains(&k) {
            return Err(Error::UnknownLabel(k));
        }
    }
    let mut dedup = keep.to_vec();
    dedup.sort_unstable();
    dedup.dedup();
    if dedup.len() != keep.len() {
        return Err(Error::OverlappingLabels);
    }
    Ok(qubits
        .iter()
        .enumerate()
        .filter(|(_, q)| keep.contains(q))
        .map(|(pos, _)| pos)
        .collect())
}

/// Split a full basis index into (kept bits, environment bits) and rebuild.
struct BitSplit {
    total: usize,
    kept: Vec<usize>,
    env: Vec<usize>,
}

impl BitSplit {
    fn new(total: usize, kept_positions: &[usize]) -> Self {
        let env = (0..total).filter(|p| !kept_positions.contains(p)).collect();
        Self {
            total,
            kept: kept_positions.to_vec(),
            env,
        }
    }

    fn index(&self, kept_bits: usize, env_bits: usize) -> usize {
        let mut idx = 0usize;
        for (rank, &pos) in self.kept.iter().enumerate() {
            let bit = (kept_bits >> (self.kept.len() - 1 - rank)) & 1;
            idx |= bit << (self.total - 1 - pos);
        }
        for (rank, &pos) in self.env.iter().enumerate() {
            let bit = (env_bits >> (self.env.len() - 1 - rank)) & 1;
            idx |= bit << (self.total - 1 - pos);
        }
        idx
    }
}

fn kahan_add(sum: &mut C64, comp: &mut C64, term: C64) {
    let y = term - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Reduced density operator of a pure state on the `keep` labels.
pub fn partial_trace_pure(state: &PureState, keep: &[usize]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::InvalidState("empty keep set".into()));
    }
    let positions = keep_positions(&state.qubits, keep)?;
    let split = BitSplit::new(state.qubits.len(), &positions);
    let kd = 1usize << positions.len();
    let ed = 1usize << split.env.len();
    let mut out = DMatrix::<C64>::zeros(kd, kd);
    for r in 0..kd {
        for c in 0..kd {
            let mut sum = C64::new(0.0, 0.0);
            let mut comp = C64::new(0.0, 0.0);
            for e in 0..ed {
                let term =
                    state.amplitudes[split.index(r, e)] * state.amplitudes[split.index(c, e)].conj();
                kahan_add(&mut sum, &mut comp, term);
            }
            out[(r, c)] = sum;
        }
    }
    let kept_labels: Vec<usize> = positions.iter().map(|&p| state.qubits[p]).collect();
    DensityOperator::new_unchecked(kept_labels, out)
}

/// Reduced density operator of a density operator on the `keep` labels.
pub fn partial_trace_density(op: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::InvalidState("empty keep set".into()));
    }
    let positions = keep_positions(&op.qubits, keep)?;
    let split = BitSplit::new(op.qubits.len(), &positions);
    let kd = 1usize << positions.len();
    let ed = 1usize << split.env.len();
    let mut out = DMatrix::<C64>::zeros(kd, kd);
    for r in 0..kd {
        for c in 0..kd {
            let mut sum = C64::new(0.0, 0.0);
            let mut comp = C64::new(0.0, 0.0);
            for e in 0..ed {
                kahan_add(
                    &mut sum,
                    &mut comp,
                    op.matrix[(split.index(r, e), split.index(c, e))],
                );
            }
            out[(r, c)] = sum;
        }
    }
    let kept_labels: Vec<usize> = positions.iter().map(|&p| op.qubits[p]).collect();
    DensityOperator::new_unchecked(kept_labels, out)
}

/// Transpose the indices of one qubit of a two-qubit operator.
pub fn partial_transpose(rho: &DensityOperator, which: usize) -> Result<Matrix4<C64>> {
    if rho.num_qubits() != 2 {
        return Err(Error::QubitCount {
            expected: 2,
            got: rho.num_qubits(),
        });
    }
    let pos = rho
        .qubits
        .iter()
        .position(|&q| q == which)
        .ok_or(Error::UnknownLabel(which))?;
    let m = &rho.matrix;
    let mut out = Matrix4::<C64>::zeros();
    for r in 0..4usize {
        for c in 0..4usize {
            // split row/col indices into (first qubit bit, second qubit bit)
            let (r0, r1) = (r >> 1, r & 1);
            let (c0, c1) = (c >> 1, c & 1);
            let (sr, sc) = if pos == 0 {
                ((c0 << 1) | r1, (r0 << 1) | c1)
            } else {
                ((r0 << 1) | c1, (c0 << 1) | r1)
            };
            out[(r, c)] = m[(sr, sc)];
        }
    }
    Ok(out)
}

// All Hermitian eigenproblems go through the real embedding
// H = A+iB -> [[A, -B], [B, A]], which is symmetric with every eigenvalue
// of H doubled, and satisfies f(embed(H)) = embed(f(H)) for real matrix
// functions. The real-symmetric solver is reliable where the complex one
// mispairs eigenvectors on nearly degenerate spectra.

fn embed_hermitian(m: &DMatrix<C64>) -> DMatrix<f64> {
    let n = m.nrows();
    let a = |r: usize, c: usize| (m[(r, c)].re + m[(c, r)].re) * 0.5;
    let b = |r: usize, c: usize| (m[(r, c)].im - m[(c, r)].im) * 0.5;
    DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r >= n, c >= n) {
        (false, false) => a(r, c),
        (true, true) => a(r - n, c - n),
        (false, true) => -b(r, c - n),
        (true, false) => b(r - n, c),
    })
}

fn doubled_to_single(mut eigs: Vec<f64>) -> Vec<f64> {
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let singles: Vec<f64> = eigs.iter().copied().step_by(2).collect();
    singles.into_iter().rev().collect()
}

fn hermitian_eigenvalues_unchecked(m: &DMatrix<C64>) -> Vec<f64> {
    let e = embed_hermitian(m);
    doubled_to_single(e.symmetric_eigenvalues().iter().copied().collect())
}

/// Real eigenvalues of a Hermitian matrix, descending. Errors if the input
/// is not Hermitian to the default threshold.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let dev = hermiticity_deviation(m);
    if dev > DEFAULT_VALIDITY_TOL {
        return Err(Error::NonHermitian(dev));
    }
    Ok(hermitian_eigenvalues_unchecked(m))
}

fn spin_flip(m: &Matrix4<C64>) -> Matrix4<C64> {
    // (σy⊗σy) m* (σy⊗σy), the two-qubit spin flip; σy⊗σy is the
    // anti-diagonal with entries (-1, 1, 1, -1).
    let conj = m.map(|z| z.conj());
    let mut out = Matrix4::<C64>::zeros();
    let sign = |i: usize| if i == 0 || i == 3 { -1.0 } else { 1.0 };
    for r in 0..4 {
        for c in 0..4 {
            let v = conj[(3 - r, 3 - c)] * C64::new(sign(r) * sign(c), 0.0);
            out[(r, c)] = v;
        }
    }
    out
}

fn to_matrix4(rho: &DensityOperator) -> Result<Matrix4<C64>> {
    if rho.num_qubits() != 2 {
        return Err(Error::QubitCount {
            expected: 2,
            got: rho.num_qubits(),
        });
    }
    Ok(Matrix4::from_fn(|r, c| rho.matrix[(r, c)]))
}

type Embed8 = nalgebra::SMatrix<f64, 8, 8>;

fn embed_hermitian4(m: &Matrix4<C64>) -> Embed8 {
    let a = |r: usize, c: usize| (m[(r, c)].re + m[(c, r)].re) * 0.5;
    let b = |r: usize, c: usize| (m[(r, c)].im - m[(c, r)].im) * 0.5;
    Embed8::from_fn(|r, c| match (r >= 4, c >= 4) {
        (false, false) => a(r, c),
        (true, true) => a(r - 4, c - 4),
        (false, true) => -b(r, c - 4),
        (true, false) => b(r - 4, c),
    })
}

/// Eigenvalues of a Hermitian 4×4, descending.
fn hermitian_eigvals4(m: &Matrix4<C64>) -> [f64; 4] {
    let e = embed_hermitian4(m);
    let mut eigs: Vec<f64> = e.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    [eigs[0], eigs[2], eigs[4], eigs[6]]
}

// Eigenvalues this close to zero, relative to the largest, are round-off:
// the square roots below would amplify an ε-size error to √ε ≈ 1e-8, which
// is visible at concurrence scale, so they are zeroed first.
const RANK_EPS: f64 = 256.0 * f64::EPSILON;

/// Principal square root of a Hermitian PSD 4×4; eigenvalues within
/// round-off of zero (including negatives) are treated as exact zeros.
fn sqrt_psd4(m: &Matrix4<C64>) -> Matrix4<C64> {
    let se = embed_hermitian4(m).symmetric_eigen();
    let floor = RANK_EPS * se.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v));
    let mut f = Embed8::zeros();
    for k in 0..8 {
        let s = if se.eigenvalues[k] <= floor { 0.0 } else { se.eigenvalues[k].sqrt() };
        let v = se.eigenvectors.column(k);
        for r in 0..8 {
            for c in 0..8 {
                f[(r, c)] += s * v[r] * v[c];
            }
        }
    }
    Matrix4::from_fn(|r, c| C64::new(f[(r, c)], f[(r + 4, c)]))
}

/// Raw concurrence kernel on a 4×4 matrix assumed to be a valid two-qubit
/// density operator.
pub fn concurrence4(m: &Matrix4<C64>) -> f64 {
    let sq = sqrt_psd4(m);
    let h = sq * spin_flip(m) * sq;
    let ev = hermitian_eigvals4(&h);
    let floor = RANK_EPS * ev[0].max(0.0);
    let lambdas = ev.map(|v| if v <= floor { 0.0 } else { v.sqrt() });
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Raw negativity kernel: partial transpose on the second qubit (the
/// spectrum is the same for either choice).
pub fn negativity4(m: &Matrix4<C64>) -> f64 {
    let mut pt = Matrix4::<C64>::zeros();
    for r in 0..4usize {
        for c in 0..4usize {
            let (r0, r1) = (r >> 1, r & 1);
            let (c0, c1) = (c >> 1, c & 1);
            pt[(r, c)] = m[((r0 << 1) | c1, (c0 << 1) | r1)];
        }
    }
    let vals = hermitian_eigvals4(&pt);
    vals.iter().filter(|&&v| v < 0.0).map(|v| -v).sum()
}

/// Wootters concurrence of a two-qubit density operator, in [0, 1].
///
/// Computed through the Hermitian route: the λᵢ are the square roots of the
/// eigenvalues of √ρ·ρ̃·√ρ with ρ̃ the spin-flipped state, and
/// C = max(0, λ₁−λ₂−λ₃−λ₄). Eigenvalues of ρ pushed just below zero by
/// round-off are clamped before the square roots.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    rho.validate(DEFAULT_VALIDITY_TOL)
        .map_err(|e| Error::InvalidDensity(format!("concurrence input: {e}")))?;
    let m = to_matrix4(rho)?;
    Ok(concurrence4(&m))
}

/// Sum of the absolute values of the negative eigenvalues of the partial
/// transpose. Zero iff separable, for two qubits.
pub fn negativity(rho: &DensityOperator) -> Result<f64> {
    rho.validate(DEFAULT_VALIDITY_TOL)
        .map_err(|e| Error::InvalidDensity(format!("negativity input: {e}")))?;
    let pt = partial_transpose(rho, rho.qubits[1])?;
    let vals = hermitian_eigvals4(&pt);
    Ok(vals.iter().filter(|&&v| v < 0.0).map(|v| -v).sum())
}

/// √Σ|a−b|² over entries.
pub fn frobenius_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<f64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::ShapeMismatch(a.nrows(), a.ncols(), b.nrows(), b.ncols()));
    }
    Ok((a - b).norm())
}

/// Single-qubit density matrix helper.
pub fn qubit_density(p0: f64, coherence: C64) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[
        C64::new(p0, 0.0),
        coherence,
        coherence.conj(),
        C64::new(1.0 - p0, 0.0),
    ])
}

/// Pure two-qubit concurrence oracle: 2|ad − bc| for amplitudes (a,b,c,d).
pub fn pure_pair_concurrence(amps: &[C64; 4]) -> f64 {
    2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm()
}

pub fn bell_phi_plus() -> PureState {
    let s = 1.0 / 2f64.sqrt();
    PureState::new(
        vec![0, 1],
        DVector::from_vec(vec![
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ]),
    )
    .expect("bell state")
}

/// The Bell state (|01⟩+|10⟩)/√2.
pub fn bell_psi_plus() -> PureState {
    let s = 1.0 / 2f64.sqrt();
    PureState::new(
        vec![0, 1],
        DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
        ]),
    )
    .expect("bell state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ghz3() -> PureState {
        let s = 1.0 / 2f64.sqrt();
        let mut v = DVector::zeros(8);
        v[0] = c(s);
        v[7] = c(s);
        PureState::new(vec![0, 1, 2], v).unwrap()
    }

    #[test]
    fn tensor_product_basics() {
        let zero = DensityOperator::new(vec![0], qubit_density(1.0, c(0.0))).unwrap();
        let one = DensityOperator::new(vec![1], qubit_density(0.0, c(0.0))).unwrap();
        let prod = tensor_product(&zero, &one).unwrap();
        assert_eq!(prod.matrix()[(1, 1)], c(1.0));
        assert_abs_diff_eq!(prod.trace().re, 1.0, epsilon = 1e-15);

        let half_a = DensityOperator::new(vec![0], qubit_density(0.5, c(0.0))).unwrap();
        let half_b = DensityOperator::new(vec![1], qubit_density(0.5, c(0.0))).unwrap();
        let prod = tensor_product(&half_a, &half_b).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(prod.matrix()[(k, k)].re, 0.25, epsilon = 1e-15);
        }

        let clash = tensor_product(&zero, &zero);
        assert!(clash.is_err());
    }

    #[test]
    fn partial_trace_ghz_and_bell() {
        let ghz = ghz3();
        let pair = partial_trace_pure(&ghz, &[0, 1]).unwrap();
        assert_abs_diff_eq!(pair.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.matrix()[(3, 3)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.matrix()[(0, 3)].norm(), 0.0, epsilon = 1e-15);

        let bell = bell_phi_plus();
        let one = partial_trace_pure(&bell, &[0]).unwrap();
        assert_abs_diff_eq!(one.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(one.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_of_density_matches_pure_projector() {
        let ghz = ghz3();
        let dense = ghz.projector();
        let a = partial_trace_pure(&ghz, &[1, 2]).unwrap();
        let b = partial_trace_density(&dense, &[1, 2]).unwrap();
        assert!(frobenius_distance(a.matrix(), b.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn partial_transpose_bell_negative_eigenvalue() {
        let bell = bell_phi_plus().projector();
        let pt = partial_transpose(&bell, 1).unwrap();
        let dm = DMatrix::from_fn(4, 4, |r, c2| pt[(r, c2)]);
        let eigs = hermitian_eigenvalues(&dm).unwrap();
        assert_abs_diff_eq!(eigs[3], -0.5, epsilon = 1e-12);

        // diagonal operators are unchanged
        let diag = DensityOperator::new(
            vec![0, 1],
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(0.25), c(0.25), c(0.0)])),
        )
        .unwrap();
        let pt = partial_transpose(&diag, 0).unwrap();
        for r in 0..4 {
            for cc in 0..4 {
                let want = if r == cc { diag.matrix()[(r, cc)] } else { c(0.0) };
                assert_eq!(pt[(r, cc)], want);
            }
        }
    }

    #[test]
    fn eigenvalues_sorted_and_guarded() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.25); 4]));
        let eigs = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(eigs, vec![0.25; 4]);

        let mut bad = m.clone();
        bad[(0, 1)] = c(1.0);
        assert!(hermitian_eigenvalues(&bad).is_err());
    }

    #[test]
    fn concurrence_and_negativity_of_bell() {
        let bell = bell_phi_plus().projector();
        assert_abs_diff_eq!(concurrence(&bell).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(negativity(&bell).unwrap(), 0.5, epsilon = 1e-12);

        // exact 0.5 entries, not (1/√2)²
        let exact = DensityOperator::new(
            vec![0, 1],
            DMatrix::from_fn(4, 4, |r, cc| {
                if (r == 0 || r == 3) && (cc == 0 || cc == 3) { c(0.5) } else { c(0.0) }
            }),
        )
        .unwrap();
        assert_abs_diff_eq!(concurrence(&exact).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn separable_states_score_zero() {
        let id4 = DensityOperator::new(
            vec![0, 1],
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.25); 4])),
        )
        .unwrap();
        assert_abs_diff_eq!(concurrence(&id4).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(negativity(&id4).unwrap(), 0.0, epsilon = 1e-12);

        let ghz_pair = partial_trace_pure(&ghz3(), &[0, 1]).unwrap();
        assert_abs_diff_eq!(concurrence(&ghz_pair).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(negativity(&ghz_pair).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn product_of_coherent_qubits_scores_zero() {
        // For ρ = ρ₁⊗ρ₂, √ρ·ρ̃·√ρ = det(ρ₁)det(ρ₂)·ρ, so with near-pure
        // factors the spectrum is four nearly equal tiny values. That
        // degeneracy plus the complex coherences once made the eigensolver
        // report a concurrence of ~1e-2 on an exactly separable state.
        let a = DensityOperator::new(vec![0], qubit_density(0.9999, C64::new(0.007, 0.004)))
            .unwrap();
        let b = DensityOperator::new(vec![1], qubit_density(0.62, C64::new(-0.31, 0.22)))
            .unwrap();
        let prod = tensor_product(&a, &b).unwrap();
        assert_abs_diff_eq!(concurrence(&prod).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(negativity(&prod).unwrap(), 0.0, epsilon = 1e-12);

        let c1 = DensityOperator::new(vec![0], qubit_density(0.51, C64::new(0.35, -0.33)))
            .unwrap();
        let c2 = DensityOperator::new(vec![1], qubit_density(0.48, C64::new(-0.2, 0.41)))
            .unwrap();
        let prod = tensor_product(&c1, &c2).unwrap();
        assert_abs_diff_eq!(concurrence(&prod).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(negativity(&prod).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_concurrence_oracle_agrees() {
        let bell = bell_phi_plus();
        let amps = [
            bell.amplitudes()[0],
            bell.amplitudes()[1],
            bell.amplitudes()[2],
            bell.amplitudes()[3],
        ];
        assert_abs_diff_eq!(pure_pair_concurrence(&amps), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            concurrence(&bell.projector()).unwrap(),
            pure_pair_concurrence(&amps),
            epsilon = 1e-10
        );
    }

    #[test]
    fn frobenius_distance_basics() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(0.0)]));
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(1.0)]));
        assert_abs_diff_eq!(frobenius_distance(&a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(frobenius_distance(&a, &b).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn sorted_qubits_reorders_amplitudes() {
        // |q2 q0⟩ with amplitude on |1 0⟩ becomes |q0 q2⟩ with |0 1⟩
        let mut v = DVector::zeros(4);
        v[2] = c(1.0);
        let s = PureState::new(vec![2, 0], v).unwrap();
        let sorted = s.sorted_qubits();
        assert_eq!(sorted.qubits(), &[0, 2]);
        assert_eq!(sorted.amplitudes()[1], c(1.0));
    }
}
