//! Decision procedure for whether a graph admits a pure-state representative.
//!
//! A graph decomposes across its connected components: it is representable
//! iff every component is, and a full witness is the tensor product of
//! component witnesses. Per-component rules run in a fixed order; each
//! verdict records which rule fired, and constructive verdicts carry a
//! witness that is re-verified through the classifier before being emitted.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzer::{extract_graph_pure, Tolerances};
use crate::error::{Error, Result};
use crate::graph::{CanonicalLabel, EntangledGraph};
use crate::linalg::{bell_phi_plus, tensor_product_pure, C64, PureState};
use crate::search::{search as run_search, SearchConfig, SEARCH_QUBIT_CAP};
use crate::synthesis::{build_web_auto, three_qubit_catalog};

/// Largest vertex count accepted by [`census`].
pub const CENSUS_CAP: usize = 5;

/// Ordered worst-to-best; the overall status of a graph is the minimum over
/// its components.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityStatus {
    Infeasible,
    Unknown,
    FeasibleNumericalClaim,
    FeasibleCatalog,
    FeasibleConstructive,
}

impl FeasibilityStatus {
    pub fn is_feasible(self) -> bool {
        self >= FeasibilityStatus::FeasibleNumericalClaim
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeasibilityStatus::Infeasible => "infeasible",
            FeasibilityStatus::Unknown => "unknown",
            FeasibilityStatus::FeasibleNumericalClaim => "feasible-numerical-claim",
            FeasibilityStatus::FeasibleCatalog => "feasible-catalog",
            FeasibilityStatus::FeasibleConstructive => "feasible-constructive",
        }
    }
}

impl fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict for one connected component, in the original vertex labels.
#[derive(Debug, Clone)]
pub struct ComponentVerdict {
    pub vertices: Vec<usize>,
    pub status: FeasibilityStatus,
    pub rule: &'static str,
    pub witness: Option<PureState>,
    pub note: Option<String>,
}

/// Verdict for a whole graph.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: FeasibilityStatus,
    pub reason: String,
    pub witness: Option<PureState>,
    pub components: Vec<ComponentVerdict>,
}

fn describe(status: FeasibilityStatus) -> &'static str {
    match status {
        FeasibilityStatus::Infeasible => "no pure representative exists",
        FeasibilityStatus::Unknown => "undecided by the available rules",
        FeasibilityStatus::FeasibleNumericalClaim => {
            "representative claimed numerically (connected, no open edges)"
        }
        FeasibilityStatus::FeasibleCatalog => "realized by a catalog state",
        FeasibilityStatus::FeasibleConstructive => "realized constructively",
    }
}

fn joined_rules(components: &[ComponentVerdict]) -> String {
    let mut seen: Vec<&'static str> = Vec::new();
    for c in components {
        if !seen.contains(&c.rule) {
            seen.push(c.rule);
        }
    }
    seen.join("+")
}

fn combine(components: Vec<ComponentVerdict>) -> Result<Verdict> {
    let status = components
        .iter()
        .map(|c| c.status)
        .min()
        .expect("at least one component");
    let binding = components
        .iter()
        .filter(|c| c.status == status)
        .min_by_key(|c| c.vertices.clone())
        .expect("at least one component");
    let reason = if status.is_feasible() {
        format!("{}: {}", joined_rules(&components), describe(status))
    } else {
        let detail = binding.note.as_deref().unwrap_or_else(|| describe(status));
        format!(
            "{} on component {:?}: {}",
            binding.rule, binding.vertices, detail
        )
    };
    let witness = if components.iter().all(|c| c.witness.is_some()) {
        let mut acc: Option<PureState> = None;
        for c in &components {
            let w = c.witness.clone().expect("checked above");
            acc = Some(match acc {
                None => w,
                Some(prev) => tensor_product_pure(&prev, &w)?,
            });
        }
        acc.map(|s| s.sorted_qubits())
    } else {
        None
    };
    Ok(Verdict { status, reason, witness, components })
}

fn ket_zero(label: usize) -> PureState {
    PureState::new(
        vec![label],
        DVector::from_column_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
    )
    .expect("unit vector")
}

/// Try the six-permutation catalog match for a 3-vertex component given in
/// local labels 0..3. Returns the matching letter, permutation, and the
/// catalog state with its qubits permuted accordingly (still local labels).
fn catalog_match(sub: &EntangledGraph, tol: &Tolerances) -> Option<(char, [usize; 3], PureState)> {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for letter in ['g', 'h', 'i', 'j'] {
        let state = three_qubit_catalog(letter).expect("feasible letter");
        let (cat_graph, _) = extract_graph_pure(&state, tol).expect("catalog state classifies");
        for perm in PERMS {
            let permuted = cat_graph.permuted(&perm).expect("valid permutation");
            if permuted == *sub {
                let relabeled = state
                    .with_qubits(perm.to_vec())
                    .expect("three distinct labels");
                return Some((letter, perm, relabeled));
            }
        }
    }
    None
}

/// Decide one connected component. `sub` uses local labels 0..k matching
/// `vertices` positionally; the returned verdict is in original labels.
fn assess_component(
    sub: &EntangledGraph,
    vertices: &[usize],
    tol: &Tolerances,
) -> Result<ComponentVerdict> {
    let k = sub.n();
    let relabel = |state: PureState| -> Result<PureState> {
        let mapped: Vec<usize> = state.qubits().iter().map(|&q| vertices[q]).collect();
        state.with_qubits(mapped)
    };

    if k == 1 {
        return Ok(ComponentVerdict {
            vertices: vertices.to_vec(),
            status: FeasibilityStatus::FeasibleConstructive,
            rule: "R1",
            witness: Some(ket_zero(vertices[0])),
            note: Some("single vertex, product witness".into()),
        });
    }
    if k == 2 && sub.entangled_count() == 1 {
        return Ok(ComponentVerdict {
            vertices: vertices.to_vec(),
            status: FeasibilityStatus::FeasibleConstructive,
            rule: "R2",
            witness: Some(relabel(bell_phi_plus())?),
            note: Some("entangled pair realized by a Bell state".into()),
        });
    }
    if k == 2 && sub.classical_count() == 1 {
        return Ok(ComponentVerdict {
            vertices: vertices.to_vec(),
            status: FeasibilityStatus::Infeasible,
            rule: "R3",
            witness: None,
            note: Some(
                "no two-qubit pure state carries classical-only correlation".into(),
            ),
        });
    }
    if k > 2 {
        let open = sub.open_edges();
        if !open.is_empty() {
            let listed: Vec<String> = open
                .iter()
                .map(|&(v, (a, b))| {
                    format!("vertex {} on edge {}-{}", vertices[v], vertices[a], vertices[b])
                })
                .collect();
            return Ok(ComponentVerdict {
                vertices: vertices.to_vec(),
                status: FeasibilityStatus::Infeasible,
                rule: "R4",
                witness: None,
                note: Some(format!("open edge: {}", listed.join(", "))),
            });
        }
    }

    let mut sweep_note: Option<String> = None;
    if sub.is_complete_web() {
        match build_web_auto(sub, tol) {
            Ok((state, (a, b, g))) => {
                return Ok(ComponentVerdict {
                    vertices: vertices.to_vec(),
                    status: FeasibilityStatus::FeasibleConstructive,
                    rule: "R5",
                    witness: Some(relabel(state)?),
                    note: Some(format!(
                        "web parameters alpha={a:.6}, beta={b:.6}, gamma={g:.6}"
                    )),
                });
            }
            Err(e) => {
                sweep_note = Some(format!("web sweep failed ({e}); "));
            }
        }
    }

    if k == 3 {
        if let Some((letter, perm, state)) = catalog_match(sub, tol) {
            return Ok(ComponentVerdict {
                vertices: vertices.to_vec(),
                status: FeasibilityStatus::FeasibleCatalog,
                rule: "R6",
                witness: Some(relabel(state)?),
                note: Some(format!(
                    "{}catalog state '{letter}' under vertex permutation {perm:?}",
                    sweep_note.clone().unwrap_or_default()
                )),
            });
        }
    }

    if k == 4 {
        return Ok(ComponentVerdict {
            vertices: vertices.to_vec(),
            status: FeasibilityStatus::FeasibleNumericalClaim,
            rule: "R7",
            witness: None,
            note: Some(format!(
                "{}connected with no open edges; run a search to attach a witness",
                sweep_note.unwrap_or_default()
            )),
        });
    }

    Ok(ComponentVerdict {
        vertices: vertices.to_vec(),
        status: FeasibilityStatus::Unknown,
        rule: "R8",
        witness: None,
        note: Some(format!(
            "{}no decision rule applies",
            sweep_note.unwrap_or_default()
        )),
    })
}

/// Decide whether `g` has a pure-state representative, component by
/// component. Rule-based and deterministic; no stochastic search is run
/// (see [`assess_with_search`]).
pub fn assess(g: &EntangledGraph) -> Result<Verdict> {
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::InvalidGraph(report.violations.join("; ")));
    }
    if g.n() == 0 {
        return Err(Error::InvalidGraph("graph has no vertices".into()));
    }
    let tol = Tolerances::default();
    let comps = g.connected_components();
    let verdicts = comps
        .into_par_iter()
        .map(|vertices| {
            let sub = g.induced(&vertices)?;
            assess_component(&sub, &vertices, &tol)
        })
        .collect::<Result<Vec<_>>>()?;
    combine(verdicts)
}

/// [`assess`], then run the stochastic search on every undecided component
/// within the search cap, attaching any verified witness. Search success
/// never upgrades a status: a numerically found state is evidence, not a
/// theorem, so the rule-based status stands and the witness plus note carry
/// the outcome.
pub fn assess_with_search(g: &EntangledGraph, cfg: &SearchConfig) -> Result<Verdict> {
    let base = assess(g)?;
    let mut components = base.components;
    for c in components.iter_mut() {
        let undecided = matches!(
            c.status,
            FeasibilityStatus::FeasibleNumericalClaim | FeasibilityStatus::Unknown
        );
        if !undecided || c.witness.is_some() {
            continue;
        }
        if c.vertices.len() > SEARCH_QUBIT_CAP {
            c.note = Some(format!(
                "{}; component exceeds the search cap of {SEARCH_QUBIT_CAP} qubits",
                c.note.take().unwrap_or_default()
            ));
            continue;
        }
        let sub = g.induced(&c.vertices)?;
        let result = run_search(&sub, cfg)?;
        if result.found {
            let witness = result.witness.expect("found implies witness");
            let mapped: Vec<usize> = witness.qubits().iter().map(|&q| c.vertices[q]).collect();
            c.witness = Some(witness.with_qubits(mapped)?);
            c.note = Some(format!(
                "search witness found (objective {:.3e}, {} evaluations)",
                result.best_objective, result.evals
            ));
        } else {
            c.note = Some(format!(
                "search exhausted: best objective {:.3e} over {} evaluations",
                result.best_objective, result.evals
            ));
        }
    }
    combine(components)
}

/// One isomorphism class in a census.
#[derive(Debug, Clone)]
pub struct CensusRow {
    pub label: CanonicalLabel,
    pub count: usize,
    pub status: FeasibilityStatus,
    pub rule: String,
    pub witness: Option<PureState>,
}

/// Exhaustive classification of all graphs on `n` vertices, grouped by
/// isomorphism class. The convention tallies expose every plausible way of
/// counting "interesting" classes so downstream comparisons can state which
/// one they use.
#[derive(Debug, Clone)]
pub struct CensusReport {
    pub n: usize,
    pub raw_total: usize,
    pub class_total: usize,
    pub connected_classes: usize,
    pub connected_no_open_edge_classes: usize,
    pub connected_no_open_edge_non_web_classes: usize,
    /// Classes whose overall status is feasible-numerical-claim or unknown.
    pub ambiguous_classes: usize,
    pub status_counts: BTreeMap<FeasibilityStatus, usize>,
    pub rows: Vec<CensusRow>,
}

fn label_colors(label: &CanonicalLabel) -> Result<(usize, Vec<u8>)> {
    let s = label.as_str();
    let (n_part, digits) = s
        .split_once(':')
        .ok_or_else(|| Error::Malformed(format!("bad canonical label {s}")))?;
    let n: usize = n_part
        .parse()
        .map_err(|_| Error::Malformed(format!("bad canonical label {s}")))?;
    let colors: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
    Ok((n, colors))
}

/// Enumerate every edge coloring on `n` vertices, group by canonical class,
/// and assess one representative per class.
pub fn census(n: usize) -> Result<CensusReport> {
    if n < 1 || n > CENSUS_CAP {
        return Err(Error::CapExceeded { what: "census vertex count", limit: CENSUS_CAP, got: n });
    }
    let pairs = n * (n - 1) / 2;
    let raw_total = 3usize.pow(pairs as u32);

    let mut class_sizes: BTreeMap<CanonicalLabel, usize> = BTreeMap::new();
    let mut colors = vec![0u8; pairs];
    for _ in 0..raw_total {
        let g = EntangledGraph::from_colors(n, &colors)?;
        *class_sizes.entry(g.canonical_form()).or_insert(0) += 1;
        for slot in colors.iter_mut() {
            if *slot == 2 {
                *slot = 0;
            } else {
                *slot += 1;
                break;
            }
        }
    }

    let labels: Vec<CanonicalLabel> = class_sizes.keys().cloned().collect();
    let rows = labels
        .into_par_iter()
        .map(|label| {
            let (ln, lcolors) = label_colors(&label)?;
            let rep = EntangledGraph::from_colors(ln, &lcolors)?;
            let verdict = assess(&rep)?;
            Ok(CensusRow {
                count: class_sizes[&label],
                status: verdict.status,
                rule: joined_rules(&verdict.components),
                witness: verdict.witness,
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut status_counts: BTreeMap<FeasibilityStatus, usize> = BTreeMap::new();
    let mut connected = 0usize;
    let mut no_open = 0usize;
    let mut non_web = 0usize;
    let mut ambiguous = 0usize;
    for row in &rows {
        *status_counts.entry(row.status).or_insert(0) += 1;
        let (ln, lcolors) = label_colors(&row.label)?;
        let rep = EntangledGraph::from_colors(ln, &lcolors)?;
        if rep.is_connected() {
            connected += 1;
            if rep.open_edges().is_empty() || rep.n() <= 2 {
                no_open += 1;
                if !rep.is_complete_web() {
                    non_web += 1;
                }
            }
        }
        if matches!(
            row.status,
            FeasibilityStatus::FeasibleNumericalClaim | FeasibilityStatus::Unknown
        ) {
            ambiguous += 1;
        }
    }

    Ok(CensusReport {
        n,
        raw_total,
        class_total: rows.len(),
        connected_classes: connected,
        connected_no_open_edge_classes: no_open,
        connected_no_open_edge_non_web_classes: non_web,
        ambiguous_classes: ambiguous,
        status_counts,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EntangledGraph;

    fn g(n: usize, e: &[(usize, usize)], c: &[(usize, usize)]) -> EntangledGraph {
        EntangledGraph::new(n, e.to_vec(), c.to_vec()).unwrap()
    }

    fn verify_witness(v: &Verdict, target: &EntangledGraph) {
        let w = v.witness.as_ref().expect("witness expected");
        let (found, _) = extract_graph_pure(w, &Tolerances::default()).unwrap();
        assert_eq!(&found, target);
    }

    #[test]
    fn status_ordering() {
        use FeasibilityStatus::*;
        assert!(Infeasible < Unknown);
        assert!(Unknown < FeasibleNumericalClaim);
        assert!(FeasibleNumericalClaim < FeasibleCatalog);
        assert!(FeasibleCatalog < FeasibleConstructive);
        assert!(!Unknown.is_feasible() && FeasibleNumericalClaim.is_feasible());
    }

    #[test]
    fn single_vertex_and_pairs() {
        let v = assess(&g(1, &[], &[])).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleConstructive);
        assert_eq!(v.components[0].rule, "R1");

        let target = g(2, &[(0, 1)], &[]);
        let v = assess(&target).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleConstructive);
        assert_eq!(v.components[0].rule, "R2");
        verify_witness(&v, &target);

        let v = assess(&g(2, &[], &[(0, 1)])).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        assert_eq!(v.components[0].rule, "R3");
        assert!(v.reason.starts_with("R3"));
    }

    #[test]
    fn open_edges_are_fatal() {
        let v = assess(&g(3, &[(0, 1), (1, 2)], &[])).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        assert_eq!(v.components[0].rule, "R4");
        assert!(v.reason.contains("open edge"));

        let v = assess(&g(4, &[(0, 1), (1, 2), (2, 3)], &[(0, 2)])).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
    }

    #[test]
    fn triangles_are_constructive() {
        for (e, c) in [
            (vec![(0, 1), (0, 2), (1, 2)], vec![]),
            (vec![], vec![(0, 1), (0, 2), (1, 2)]),
            (vec![(0, 1)], vec![(0, 2), (1, 2)]),
        ] {
            let target = g(3, &e, &c);
            let v = assess(&target).unwrap();
            assert_eq!(v.status, FeasibilityStatus::FeasibleConstructive, "{e:?} {c:?}");
            assert_eq!(v.components[0].rule, "R5");
            verify_witness(&v, &target);
        }
    }

    #[test]
    fn two_adjacent_entangled_edges_need_the_catalog() {
        // The closed-form web state never realizes this class: the reduced
        // state of the classical pair picks up a cross coherence from the
        // shared vertex that keeps it entangled for every parameter choice.
        let target = g(3, &[(0, 1), (0, 2)], &[(1, 2)]);
        let v = assess(&target).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleCatalog);
        assert_eq!(v.components[0].rule, "R6");
        let note = v.components[0].note.as_deref().unwrap_or("");
        assert!(note.contains("web sweep failed"), "note: {note}");
        verify_witness(&v, &target);
    }

    #[test]
    fn catalog_fallback_matches_all_triangles() {
        let tol = Tolerances::default();
        for (e, c) in [
            (vec![(0, 1), (0, 2), (1, 2)], vec![]),
            (vec![], vec![(0, 1), (0, 2), (1, 2)]),
            (vec![(1, 2)], vec![(0, 1), (0, 2)]),
            (vec![(0, 1), (1, 2)], vec![(0, 2)]),
        ] {
            let sub = g(3, &e, &c);
            let (letter, _, state) = catalog_match(&sub, &tol).expect("match");
            assert!(['g', 'h', 'i', 'j'].contains(&letter));
            let (found, _) = extract_graph_pure(&state, &tol).unwrap();
            assert_eq!(found, sub);
        }
    }

    #[test]
    fn disconnected_graphs_combine() {
        // entangled pair on {0,3} plus all-classical triangle on {1,2,4}
        let target = g(5, &[(0, 3)], &[(1, 2), (1, 4), (2, 4)]);
        let v = assess(&target).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleConstructive);
        assert_eq!(v.components.len(), 2);
        verify_witness(&v, &target);

        // swap the triangle for a classical pair: that component sinks it
        let v = assess(&g(4, &[(0, 3)], &[(1, 2)])).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Infeasible);
        assert!(v.witness.is_none());
    }

    #[test]
    fn four_vertex_claims_and_unknowns() {
        let square = g(4, &[(0, 2), (0, 3), (1, 2), (1, 3)], &[]);
        let v = assess(&square).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleNumericalClaim);
        assert_eq!(v.components[0].rule, "R7");
        assert!(v.witness.is_none());

        let five_cycle = g(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)], &[]);
        let v = assess(&five_cycle).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Unknown);
        assert_eq!(v.components[0].rule, "R8");
    }

    #[test]
    fn webs_beyond_three_vertices() {
        // disjoint entangled pair: the closed-form web state works
        let target = g(
            4,
            &[(0, 1), (2, 3)],
            &[(0, 2), (0, 3), (1, 2), (1, 3)],
        );
        assert!(target.is_complete_web());
        let v = assess(&target).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleConstructive);
        assert_eq!(v.components[0].rule, "R5");
        verify_witness(&v, &target);
    }

    #[test]
    fn unrealizable_webs_fall_through_to_numerical_claim() {
        // adjacent entangled pair: the web state puts a vacuum/full coherence
        // on the complement pair that no positive parameters can suppress, so
        // the sweep fails and the 4-vertex rule takes over
        let target = g(
            4,
            &[(0, 1), (0, 2)],
            &[(0, 3), (1, 2), (1, 3), (2, 3)],
        );
        assert!(target.is_complete_web());
        let v = assess(&target).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleNumericalClaim);
        assert_eq!(v.components[0].rule, "R7");
        let note = v.components[0].note.as_deref().unwrap();
        assert!(note.contains("web sweep failed"), "{note}");
    }

    #[test]
    fn search_attaches_witness_without_upgrading() {
        let square = g(4, &[(0, 2), (0, 3), (1, 2), (1, 3)], &[]);
        let cfg = SearchConfig {
            restarts: 16,
            max_evals_per_restart: 12_000,
            ..SearchConfig::default()
        };
        let v = assess_with_search(&square, &cfg).unwrap();
        assert_eq!(v.status, FeasibilityStatus::FeasibleNumericalClaim);
        verify_witness(&v, &square);
        assert!(v.components[0].note.as_deref().unwrap().contains("search witness"));
    }

    #[test]
    fn census_small() {
        let r = census(2).unwrap();
        assert_eq!(r.raw_total, 3);
        assert_eq!(r.class_total, 3);
        assert_eq!(
            r.status_counts.get(&FeasibilityStatus::Infeasible).copied(),
            Some(1)
        );

        let r = census(3).unwrap();
        assert_eq!(r.raw_total, 27);
        assert_eq!(r.class_total, 10);
        let feasible: usize = r
            .rows
            .iter()
            .filter(|row| row.status.is_feasible())
            .count();
        assert_eq!(feasible, 6);
        assert_eq!(
            r.status_counts.get(&FeasibilityStatus::Infeasible).copied(),
            Some(4)
        );
        assert_eq!(r.ambiguous_classes, 0);
        let total: usize = r.rows.iter().map(|row| row.count).sum();
        assert_eq!(total, 27);

        assert!(census(6).is_err());
    }
}
