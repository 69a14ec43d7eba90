//! Pair classification: decide for every qubit pair of a state whether it is
//! entangled, classically correlated only, or uncorrelated, and assemble the
//! resulting graph.
//!
//! The entanglement gate is negativity (exact for two qubits); concurrence is
//! reported as the strength metric. A pair that is not entangled is
//! uncorrelated when its reduction factorizes into its own marginals, and
//! classically correlated otherwise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{vertex_pairs, EntangledGraph, PairClass};
use crate::linalg::{
    concurrence, frobenius_distance, negativity, partial_trace_density, partial_trace_pure,
    tensor_product, DensityOperator, PureState,
};
use crate::synthesis::ExcitationBlockState;

/// Decision thresholds. `ent` gates entanglement (on negativity), `fac`
/// gates factorization (on Frobenius distance); the rest bound how far a
/// state may drift from valid before it is rejected outright.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ent: f64,
    pub fac: f64,
    pub psd: f64,
    pub tr: f64,
    pub herm: f64,
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ent: 1e-9,
            fac: 1e-9,
            psd: 1e-10,
            tr: 1e-10,
            herm: 1e-10,
            norm: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn with_gates(ent: f64, fac: f64) -> Self {
        Self { ent, fac, ..Self::default() }
    }

    pub fn validity(&self) -> f64 {
        self.psd.max(self.tr).max(self.herm)
    }

    pub fn check(&self) -> Result<()> {
        let all = [self.ent, self.fac, self.psd, self.tr, self.herm, self.norm];
        if all.iter().any(|&t| !(t > 0.0) || t >= 1.0) {
            return Err(Error::InvalidConfig(
                "tolerances must be positive and well below 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of classifying one pair. `marginal` flags a verdict whose gating
/// metric fell within a decade of its threshold, i.e. a decision that could
/// flip under a modest tolerance change.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub class: PairClass,
    pub concurrence: f64,
    pub negativity: f64,
    pub fac_distance: f64,
    pub marginal: bool,
}

fn near_threshold(value: f64, threshold: f64) -> bool {
    value > threshold / 10.0 && value < threshold * 10.0
}

/// Classify one two-qubit reduction. The pair labels in the verdict are the
/// operator's own qubit labels.
pub fn classify_pair(rho: &DensityOperator, tol: &Tolerances) -> Result<PairVerdict> {
    tol.check()?;
    if rho.num_qubits() != 2 {
        return Err(Error::QubitCount { expected: 2, got: rho.num_qubits() });
    }
    rho.validate(tol.validity())?;
    let qi = rho.qubits()[0];
    let qj = rho.qubits()[1];
    let neg = negativity(rho)?;
    let conc = concurrence(rho)?;
    let rho_i = partial_trace_density(rho, &[qi])?;
    let rho_j = partial_trace_density(rho, &[qj])?;
    let product = tensor_product(&rho_i, &rho_j)?;
    let fac = frobenius_distance(rho.matrix(), product.matrix())?;
    let class = if neg > tol.ent {
        PairClass::Entangled
    } else if fac <= tol.fac {
        PairClass::Uncorrelated
    } else {
        PairClass::ClassicalOnly
    };
    let marginal = near_threshold(neg, tol.ent) || near_threshold(fac, tol.fac);
    Ok(PairVerdict {
        i: qi,
        j: qj,
        class,
        concurrence: conc,
        negativity: neg,
        fac_distance: fac,
        marginal,
    })
}

fn assemble(n: usize, verdicts: Vec<PairVerdict>) -> Result<(EntangledGraph, Vec<PairVerdict>)> {
    let mut entangled = Vec::new();
    let mut classical = Vec::new();
    for v in &verdicts {
        match v.class {
            PairClass::Entangled => entangled.push((v.i, v.j)),
            PairClass::ClassicalOnly => classical.push((v.i, v.j)),
            PairClass::Uncorrelated => {}
        }
    }
    Ok((EntangledGraph::new(n, entangled, classical)?, verdicts))
}

/// Graph of a pure state. Vertex v is the v-th qubit in ascending label
/// order; states with labels 0..n map onto themselves.
pub fn extract_graph_pure(
    state: &PureState,
    tol: &Tolerances,
) -> Result<(EntangledGraph, Vec<PairVerdict>)> {
    tol.check()?;
    let sorted = state.sorted_qubits();
    let relabeled = sorted.with_qubits((0..sorted.num_qubits()).collect())?;
    let norm_dev = (relabeled.amplitudes().norm() - 1.0).abs();
    if norm_dev > tol.norm {
        return Err(Error::Unnormalized(norm_dev));
    }
    let n = relabeled.num_qubits();
    let verdicts = vertex_pairs(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| {
            let rho = partial_trace_pure(&relabeled, &[i, j])?;
            classify_pair(&rho, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(n, verdicts)
}

/// Graph of a dense density operator, with the same label convention.
pub fn extract_graph_density(
    rho: &DensityOperator,
    tol: &Tolerances,
) -> Result<(EntangledGraph, Vec<PairVerdict>)> {
    tol.check()?;
    rho.validate(tol.validity())?;
    let mut labels = rho.qubits().to_vec();
    labels.sort_unstable();
    let n = labels.len();
    let verdicts = vertex_pairs(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| {
            let rho_ij = partial_trace_density(rho, &[labels[i], labels[j]])?;
            let std = DensityOperator::new_unchecked(vec![i, j], rho_ij.matrix().clone())?;
            classify_pair(&std, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(n, verdicts)
}

/// Graph of a sparse excitation-block state via its O(n) pair reductions.
pub fn extract_graph_block(
    s: &ExcitationBlockState,
    tol: &Tolerances,
) -> Result<(EntangledGraph, Vec<PairVerdict>)> {
    tol.check()?;
    let n = s.n();
    let verdicts = vertex_pairs(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| classify_pair(&s.reduce_pair(i, j)?, tol))
        .collect::<Result<Vec<_>>>()?;
    assemble(n, verdicts)
}

/// A state in any of the three supported representations.
#[derive(Debug, Clone)]
pub enum StateInput {
    Pure(PureState),
    Dense(DensityOperator),
    Block(ExcitationBlockState),
}

impl StateInput {
    pub fn num_qubits(&self) -> usize {
        match self {
            StateInput::Pure(s) => s.num_qubits(),
            StateInput::Dense(d) => d.num_qubits(),
            StateInput::Block(b) => b.n(),
        }
    }
}

/// Dispatch over the three representations.
pub fn extract_graph(
    state: &StateInput,
    tol: &Tolerances,
) -> Result<(EntangledGraph, Vec<PairVerdict>)> {
    match state {
        StateInput::Pure(s) => extract_graph_pure(s, tol),
        StateInput::Dense(d) => extract_graph_density(d, tol),
        StateInput::Block(b) => extract_graph_block(b, tol),
    }
}
