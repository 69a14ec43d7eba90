//! State builders: the universal mixed representative of a graph, pure
//! entangled-web states, and the fixed three-qubit pure-state catalog.
//!
//! The mixed representative of every graph lives in the subspace spanned by
//! basis states with at most two excited qubits, so it is stored sparsely as
//! an [`ExcitationBlockState`]: one vacuum weight, an n×n real block for the
//! single-excitation sector, and a weight per doubly-excited pair.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::EntangledGraph;
use crate::linalg::{C64, DensityOperator, PureState};

/// Largest qubit count [`ExcitationBlockState::expand_dense`] will expand.
pub const DENSE_CAP: usize = 14;

/// Sparse density operator supported on the ≤2-excitation subspace.
///
/// `vacuum` is the weight of |0…0⟩⟨0…0|. `single_block[i][j]` holds, on the
/// diagonal, the weight of the basis state with only qubit i excited and,
/// off the diagonal, the (real) coherence between the single-excitation
/// states of i and j. `doubles[{i,j}]` is the weight of the state with
/// exactly i and j excited.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationBlockState {
    n: usize,
    vacuum: f64,
    single_block: DMatrix<f64>,
    doubles: BTreeMap<(usize, usize), f64>,
}

impl ExcitationBlockState {
    pub fn new(
        n: usize,
        vacuum: f64,
        single_block: DMatrix<f64>,
        doubles: BTreeMap<(usize, usize), f64>,
    ) -> Result<Self> {
        if single_block.nrows() != n || single_block.ncols() != n {
            return Err(Error::ShapeMismatch(
                single_block.nrows(),
                single_block.ncols(),
                n,
                n,
            ));
        }
        for &(i, j) in doubles.keys() {
            if i >= j {
                return Err(Error::InvalidState(format!(
                    "double-excitation pair ({i},{j}) not in increasing order"
                )));
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
        }
        Ok(Self { n, vacuum, single_block, doubles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vacuum(&self) -> f64 {
        self.vacuum
    }

    pub fn single_block(&self) -> &DMatrix<f64> {
        &self.single_block
    }

    pub fn doubles(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.doubles
    }

    pub fn trace(&self) -> f64 {
        self.vacuum + self.single_block.diagonal().sum() + self.doubles.values().sum::<f64>()
    }

    /// Unit trace, symmetric PSD single block, nonnegative weights.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if (self.trace() - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!(
                "trace {} deviates from 1",
                self.trace()
            )));
        }
        if self.vacuum < -tol {
            return Err(Error::InvalidState("negative vacuum weight".into()));
        }
        if self.doubles.values().any(|&w| w < -tol) {
            return Err(Error::InvalidState("negative double-excitation weight".into()));
        }
        let asym = (&self.single_block - self.single_block.transpose()).abs().max();
        if asym > tol {
            return Err(Error::InvalidState(format!(
                "single-excitation block asymmetric by {asym:.3e}"
            )));
        }
        let sym = (&self.single_block + self.single_block.transpose()) * 0.5;
        let min_eig = sym
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol {
            return Err(Error::InvalidState(format!(
                "single-excitation block has eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }

    /// Full 2^n×2^n operator with the sparse weights placed on the
    /// computational basis.
    pub fn expand_dense(&self) -> Result<DensityOperator> {
        self.expand_dense_with_cap(DENSE_CAP)
    }

    pub fn expand_dense_with_cap(&self, cap: usize) -> Result<DensityOperator> {
        if self.n > cap {
            return Err(Error::CapExceeded {
                what: "dense expansion qubit count",
                limit: cap,
                got: self.n,
            });
        }
        let n = self.n;
        let dim = 1usize << n;
        let e = |i: usize| 1usize << (n - 1 - i);
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        m[(0, 0)] = C64::new(self.vacuum, 0.0);
        for i in 0..n {
            m[(e(i), e(i))] = C64::new(self.single_block[(i, i)], 0.0);
            for j in (i + 1)..n {
                let c = self.single_block[(i, j)];
                if c != 0.0 {
                    m[(e(i), e(j))] = C64::new(c, 0.0);
                    m[(e(j), e(i))] = C64::new(c, 0.0);
                }
            }
        }
        for (&(i, j), &w) in &self.doubles {
            let idx = e(i) | e(j);
            m[(idx, idx)] = C64::new(w, 0.0);
        }
        DensityOperator::new_unchecked((0..n).collect(), m)
    }

    /// 4×4 reduced operator on qubits (i, j), computed from the sparse form
    /// in O(n + #doubles) without dense expansion. Basis order follows the
    /// argument order (i is the more significant bit).
    pub fn reduce_pair(&self, i: usize, j: usize) -> Result<DensityOperator> {
        let n = self.n;
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        if i == j {
            return Err(Error::InvalidState(format!("pair indices equal: ({i},{j})")));
        }
        let mut p00 = KahanSum::default();
        p00.add(self.vacuum);
        for k in 0..n {
            if k != i && k != j {
                p00.add(self.single_block[(k, k)]);
            }
        }
        let mut p01 = KahanSum::default();
        p01.add(self.single_block[(j, j)]);
        let mut p10 = KahanSum::default();
        p10.add(self.single_block[(i, i)]);
        let mut p11 = 0.0;
        for (&(a, b), &w) in &self.doubles {
            let hits_i = a == i || b == i;
            let hits_j = a == j || b == j;
            match (hits_i, hits_j) {
                (true, true) => p11 = w,
                (true, false) => p10.add(w),
                (false, true) => p01.add(w),
                (false, false) => p00.add(w),
            }
        }
        let coh = self.single_block[(i.min(j), i.max(j))];
        let z = C64::new(0.0, 0.0);
        let m = DMatrix::from_row_slice(4, 4, &[
            C64::new(p00.value(), 0.0), z, z, z,
            z, C64::new(p01.value(), 0.0), C64::new(coh, 0.0), z,
            z, C64::new(coh, 0.0), C64::new(p10.value(), 0.0), z,
            z, z, z, C64::new(p11, 0.0),
        ]);
        DensityOperator::new_unchecked(vec![i, j], m)
    }

    /// Single-qubit reduced operator (diagonal: no vacuum-single coherences
    /// exist in this form).
    pub fn marginal(&self, i: usize) -> Result<DensityOperator> {
        let n = self.n;
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let mut p1 = KahanSum::default();
        p1.add(self.single_block[(i, i)]);
        for (&(a, b), &w) in &self.doubles {
            if a == i || b == i {
                p1.add(w);
            }
        }
        let mut p0 = KahanSum::default();
        p0.add(self.vacuum);
        for k in 0..n {
            if k != i {
                p0.add(self.single_block[(k, k)]);
            }
        }
        for (&(a, b), &w) in &self.doubles {
            if a != i && b != i {
                p0.add(w);
            }
        }
        let z = C64::new(0.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[
            C64::new(p0.value(), 0.0), z,
            z, C64::new(p1.value(), 0.0),
        ]);
        DensityOperator::new_unchecked(vec![i], m)
    }
}

#[derive(Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, term: f64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// The universal mixed representative of a graph.
///
/// With N = n, M the number of absent (uncorrelated) pairs, m_i the number
/// of partners qubit i is uncorrelated with, and Z = 2(N−1)²:
/// vacuum = (N²−3N+M/2+2)/Z, single diagonal (N−1−m_i/2)/Z, a coherence 1/Z
/// between the single excitations of every entangled pair, and a weight
/// (1/2)/Z on the double excitation of every absent pair.
pub fn build_mixed(g: &EntangledGraph) -> Result<ExcitationBlockState> {
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::InvalidGraph(report.violations.join("; ")));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidGraph(
            "mixed construction needs at least 2 vertices; single-vertex graphs carry no pair structure".into(),
        ));
    }
    let profile = g.profile();
    // doubled-unit integer numerators over 2Z, exact for all n here
    let n_i = n as i64;
    let two_z = 4 * (n_i - 1) * (n_i - 1);
    let vac2 = 2 * n_i * n_i - 6 * n_i + profile.total as i64 + 4;
    let scale = 1.0 / two_z as f64;
    let mut single = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let s2 = 2 * (n_i - 1) - profile.m[i] as i64;
        single[(i, i)] = s2 as f64 * scale;
    }
    for (i, j) in g.entangled_edges() {
        single[(i, j)] = 2.0 * scale;
        single[(j, i)] = 2.0 * scale;
    }
    let mut doubles = BTreeMap::new();
    for (i, j) in crate::graph::vertex_pairs(n) {
        if g.pair_class(i, j) == crate::graph::PairClass::Uncorrelated {
            doubles.insert((i, j), scale);
        }
    }
    ExcitationBlockState::new(n, vac2 as f64 * scale, single, doubles)
}

/// Exact trace identity for the mixed construction, in quadrupled units so
/// no division occurs: returns (lhs, rhs) where lhs collects the vacuum,
/// single and double numerators 4Z·[(N²−3N+M/2+2) + Σ(N−1−m_i/2) + M/2]/Z
/// and rhs = 4·2(N−1)². Equal for every m vector.
pub fn trace_identity_doubled(n: usize, m_counts: &[usize]) -> (i64, i64) {
    let n_i = n as i64;
    let m2: i64 = m_counts.iter().map(|&m| m as i64).sum();
    let vac4 = 4 * n_i * n_i - 12 * n_i + m2 + 8;
    let singles4: i64 = m_counts
        .iter()
        .map(|&m| 4 * (n_i - 1) - 2 * m as i64)
        .sum();
    let doubles4 = m2;
    (vac4 + singles4 + doubles4, 8 * (n_i - 1) * (n_i - 1))
}

/// Pure entangled-web state: amplitude `alpha` on |0…0⟩, `beta` on |1…1⟩,
/// and `gamma/√k` on each double excitation of the k entangled edges.
///
/// The graph must be a complete web (every pair carries an edge) on at
/// least 3 vertices; `alpha`, `beta` must be positive, `gamma` nonnegative
/// (zero exactly when the web has no entangled edges), and the three must
/// be normalized.
pub fn build_web(g: &EntangledGraph, alpha: f64, beta: f64, gamma: f64) -> Result<PureState> {
    if !g.is_complete_web() {
        return Err(Error::UnsupportedGraph(
            "web construction requires an edge on every pair".into(),
        ));
    }
    let n = g.n();
    if n < 3 {
        return Err(Error::UnsupportedGraph(
            "web construction requires at least 3 vertices".into(),
        ));
    }
    let k = g.entangled_count();
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(Error::InvalidConfig(
            "web amplitudes alpha and beta must be positive".into(),
        ));
    }
    if gamma < 0.0 {
        return Err(Error::InvalidConfig("web amplitude gamma must be nonnegative".into()));
    }
    if k == 0 && gamma > 0.0 {
        return Err(Error::InvalidConfig(
            "gamma must be zero when the web has no entangled edges".into(),
        ));
    }
    let norm_dev = (alpha * alpha + beta * beta + gamma * gamma - 1.0).abs();
    if norm_dev > 1e-10 {
        return Err(Error::Unnormalized(norm_dev));
    }
    let dim = 1usize << n;
    let e = |i: usize| 1usize << (n - 1 - i);
    let mut amps = DVector::<C64>::zeros(dim);
    amps[0] = C64::new(alpha, 0.0);
    amps[dim - 1] = C64::new(beta, 0.0);
    if k > 0 {
        let w = gamma / (k as f64).sqrt();
        for (i, j) in g.entangled_edges() {
            amps[e(i) | e(j)] = C64::new(w, 0.0);
        }
    }
    PureState::new((0..n).collect(), amps)
}

/// Default web parameters: the symmetric point, degenerating to equal
/// vacuum/full weights when there are no entangled edges.
pub fn web_default_params(k: usize) -> (f64, f64, f64) {
    if k == 0 {
        let s = 1.0 / 2f64.sqrt();
        (s, s, 0.0)
    } else {
        let s = 1.0 / 3f64.sqrt();
        (s, s, s)
    }
}

/// Build a web state whose extracted graph equals `g`, trying the default
/// parameters first and then a 21×21 grid over the squared-amplitude
/// simplex. Returns the state together with the parameters that passed.
pub fn build_web_auto(
    g: &EntangledGraph,
    tol: &crate::analyzer::Tolerances,
) -> Result<(PureState, (f64, f64, f64))> {
    let k = g.entangled_count();
    let verify = |state: &PureState| -> bool {
        crate::analyzer::extract_graph_pure(state, tol)
            .map(|(found, _)| found == *g)
            .unwrap_or(false)
    };
    let (da, db, dg) = web_default_params(k);
    let state = build_web(g, da, db, dg)?;
    if verify(&state) {
        return Ok((state, (da, db, dg)));
    }
    const GRID: usize = 21;
    if k == 0 {
        for ia in 1..GRID {
            let u = ia as f64 / GRID as f64;
            let (a, b) = (u.sqrt(), (1.0 - u).sqrt());
            let state = build_web(g, a, b, 0.0)?;
            if verify(&state) {
                return Ok((state, (a, b, 0.0)));
            }
        }
    } else {
        for ia in 1..GRID {
            for ib in 1..GRID {
                let u = ia as f64 / GRID as f64;
                let v = ib as f64 / GRID as f64;
                let w = 1.0 - u - v;
                // Roundoff on the simplex boundary can leave w at ~1e-16 when
                // ia + ib == GRID; such points put gamma at the same scale as
                // the classification tolerances and must not be sampled.
                if w < 0.5 / GRID as f64 {
                    continue;
                }
                let (a, b, c) = (u.sqrt(), v.sqrt(), w.sqrt());
                let state = build_web(g, a, b, c)?;
                if verify(&state) {
                    return Ok((state, (a, b, c)));
                }
            }
        }
    }
    Err(Error::UnsupportedGraph(
        "no web parameters on the sweep grid realize this edge set".into(),
    ))
}

/// The six fixed three-qubit pure states, by letter. Letters c, d, e, f name
/// the four three-vertex classes that have no pure representative and are
/// rejected.
pub fn three_qubit_catalog(label: char) -> Result<PureState> {
    let entries: &[(char, &[usize], f64)] = &[
        ('a', &[0], 1.0),
        ('b', &[0, 3], std::f64::consts::FRAC_1_SQRT_2),
        ('g', &[1, 2, 4], 1.0 / 3f64.sqrt()),
        ('h', &[0, 4, 6, 7], 0.5),
        ('i', &[0, 3, 7], 1.0 / 3f64.sqrt()),
        ('j', &[0, 7], std::f64::consts::FRAC_1_SQRT_2),
    ];
    if matches!(label, 'c' | 'd' | 'e' | 'f') {
        return Err(Error::NoPureRepresentative(label));
    }
    let (_, indices, amp) = entries
        .iter()
        .find(|(l, _, _)| *l == label)
        .ok_or(Error::UnknownCatalogLabel(label))?;
    let mut amps = DVector::<C64>::zeros(8);
    for &idx in *indices {
        amps[idx] = C64::new(*amp, 0.0);
    }
    PureState::new(vec![0, 1, 2], amps)
}

/// All letters with a pure representative, in catalog order.
pub const CATALOG_LABELS: [char; 6] = ['a', 'b', 'g', 'h', 'i', 'j'];

/// The rejected letters.
pub const CATALOG_REJECTED: [char; 4] = ['c', 'd', 'e', 'f'];
