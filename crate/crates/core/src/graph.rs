//! Graphs whose vertices are qubits and whose edges carry one of two
//! correlation types: entanglement or classical-only correlation. A missing
//! edge means the pair is uncorrelated (the pair state factorizes).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three-way classification of an unordered qubit pair.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    Entangled,
    ClassicalOnly,
    Uncorrelated,
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairClass::Entangled => write!(f, "entangled"),
            PairClass::ClassicalOnly => write!(f, "classical-only"),
            PairClass::Uncorrelated => write!(f, "uncorrelated"),
        }
    }
}

/// All unordered pairs (i, j) with i < j < n, lexicographic.
pub fn vertex_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn norm_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Outcome of structural validation; empty iff the graph data is usable.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            for v in &self.violations {
                writeln!(f, "- {v}")?;
            }
            Ok(())
        }
    }
}

/// Check raw graph data: n, entangled pairs, classical pairs. Reports every
/// violation rather than stopping at the first.
pub fn validate(
    n: usize,
    entangled: &[(usize, usize)],
    classical: &[(usize, usize)],
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if n == 0 {
        report.violations.push("vertex count is zero".into());
    }
    let mut seen_e = BTreeSet::new();
    for &(a, b) in entangled {
        check_pair(n, a, b, "entangled", &mut report);
        seen_e.insert(norm_pair(a, b));
    }
    let mut seen_c = BTreeSet::new();
    for &(a, b) in classical {
        check_pair(n, a, b, "classical", &mut report);
        seen_c.insert(norm_pair(a, b));
    }
    for p in seen_e.intersection(&seen_c) {
        report
            .violations
            .push(format!("pair {{{},{}}} in both edge sets", p.0, p.1));
    }
    report
}

fn check_pair(n: usize, a: usize, b: usize, kind: &str, report: &mut ValidationReport) {
    if a == b {
        report
            .violations
            .push(format!("self-loop at vertex {a} in {kind} set"));
    }
    for v in [a, b] {
        if v >= n {
            report
                .violations
                .push(format!("{kind} edge index {v} out of range for n={n}"));
        }
    }
}

/// An entangled graph with classical correlations: `n` qubit-vertices, a set
/// of entangled pairs and a disjoint set of classically-correlated pairs.
/// Pairs are stored normalized as (min, max) in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntangledGraph {
    n: usize,
    entangled: BTreeSet<(usize, usize)>,
    classical: BTreeSet<(usize, usize)>,
}

/// Per-vertex uncorrelated-partner counts `m[i]` and their total `M`
/// (`M = Σ m[i] / 2`, the number of absent edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncorrelationProfile {
    pub m: Vec<usize>,
    pub total: usize,
}

impl EntangledGraph {
    pub fn new<I, J>(n: usize, entangled: I, classical: J) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
        J: IntoIterator<Item = (usize, usize)>,
    {
        let ent: Vec<_> = entangled.into_iter().collect();
        let cls: Vec<_> = classical.into_iter().collect();
        let report = validate(n, &ent, &cls);
        if !report.is_valid() {
            return Err(Error::InvalidGraph(report.violations.join("; ")));
        }
        Ok(Self {
            n,
            entangled: ent.into_iter().map(|(a, b)| norm_pair(a, b)).collect(),
            classical: cls.into_iter().map(|(a, b)| norm_pair(a, b)).collect(),
        })
    }

    /// Graph with no edges at all.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [], [])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entangled_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entangled.iter().copied()
    }

    pub fn classical_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.classical.iter().copied()
    }

    pub fn entangled_count(&self) -> usize {
        self.entangled.len()
    }

    pub fn classical_count(&self) -> usize {
        self.classical.len()
    }

    pub fn pair_class(&self, i: usize, j: usize) -> PairClass {
        let p = norm_pair(i, j);
        if self.entangled.contains(&p) {
            PairClass::Entangled
        } else if self.classical.contains(&p) {
            PairClass::ClassicalOnly
        } else {
            PairClass::Uncorrelated
        }
    }

    /// Re-run structural validation (always clean for a constructed graph).
    pub fn validate(&self) -> ValidationReport {
        let ent: Vec<_> = self.entangled.iter().copied().collect();
        let cls: Vec<_> = self.classical.iter().copied().collect();
        validate(self.n, &ent, &cls)
    }

    /// Uncorrelated-partner counts per vertex and their pair total.
    pub fn profile(&self) -> UncorrelationProfile {
        let mut m = vec![self.n - 1; self.n];
        for &(a, b) in self.entangled.iter().chain(self.classical.iter()) {
            m[a] -= 1;
            m[b] -= 1;
        }
        let sum: usize = m.iter().sum();
        debug_assert_eq!(sum % 2, 0);
        UncorrelationProfile { m, total: sum / 2 }
    }

    /// Total degree (both edge types) of a vertex.
    pub fn degree(&self, v: usize) -> usize {
        self.entangled
            .iter()
            .chain(self.classical.iter())
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Maximal sets of vertices connected by edges of either type, each
    /// sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for &(a, b) in self.entangled.iter().chain(self.classical.iter()) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Every vertex of total degree exactly 1, with its unique edge. The
    /// feasibility rule only cares when the containing component has more
    /// than two vertices; that filter is the caller's.
    pub fn open_edges(&self) -> Vec<(usize, (usize, usize))> {
        (0..self.n)
            .filter_map(|v| {
                let incident: Vec<_> = self
                    .entangled
                    .iter()
                    .chain(self.classical.iter())
                    .filter(|&&(a, b)| a == v || b == v)
                    .copied()
                    .collect();
                (incident.len() == 1).then(|| (v, incident[0]))
            })
            .collect()
    }

    /// True iff every pair carries an edge of some type (no uncorrelated pair).
    pub fn is_complete_web(&self) -> bool {
        self.entangled.len() + self.classical.len() == self.n * (self.n - 1) / 2
    }

    /// Pair colors in lexicographic pair order: 0 = none, 1 = classical,
    /// 2 = entangled.
    pub fn colors(&self) -> Vec<u8> {
        vertex_pairs(self.n)
            .map(|(i, j)| match self.pair_class(i, j) {
                PairClass::Uncorrelated => 0,
                PairClass::ClassicalOnly => 1,
                PairClass::Entangled => 2,
            })
            .collect()
    }

    /// Rebuild a graph from a color vector (inverse of `colors`).
    pub fn from_colors(n: usize, colors: &[u8]) -> Result<Self> {
        if colors.len() != n * (n - 1) / 2 {
            return Err(Error::InvalidGraph(format!(
                "color vector length {} does not match n={n}",
                colors.len()
            )));
        }
        let mut ent = Vec::new();
        let mut cls = Vec::new();
        for ((i, j), &c) in vertex_pairs(n).zip(colors) {
            match c {
                0 => {}
                1 => cls.push((i, j)),
                2 => ent.push((i, j)),
                other => {
                    return Err(Error::InvalidGraph(format!("bad color {other}")));
                }
            }
        }
        Self::new(n, ent, cls)
    }

    /// Relabel vertices: vertex v becomes perm[v].
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidGraph(format!(
                "permutation length {} does not match n={}",
                perm.len(),
                self.n
            )));
        }
        let map = |s: &BTreeSet<(usize, usize)>| {
            s.iter()
                .map(|&(a, b)| norm_pair(perm[a], perm[b]))
                .collect::<Vec<_>>()
        };
        Self::new(self.n, map(&self.entangled), map(&self.classical))
    }

    /// Induced subgraph on a vertex subset, relabeled to 0..k in the order
    /// given. Edges with an endpoint outside the subset are dropped.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        let pos: std::collections::BTreeMap<usize, usize> = vertices
            .iter()
            .enumerate()
            .map(|(local, &v)| (v, local))
            .collect();
        let map = |s: &BTreeSet<(usize, usize)>| {
            s.iter()
                .filter_map(|&(a, b)| match (pos.get(&a), pos.get(&b)) {
                    (Some(&la), Some(&lb)) => Some(norm_pair(la, lb)),
                    _ => None,
                })
                .collect::<Vec<_>>()
        };
        Self::new(vertices.len(), map(&self.entangled), map(&self.classical))
    }

    /// Permutation-invariant label: the lexicographically smallest color
    /// vector over all vertex relabelings. Brute force; fine for n ≤ 8.
    pub fn canonical_form(&self) -> CanonicalLabel {
        assert!(
            self.n <= CANONICAL_CAP,
            "canonical_form is brute-force and capped at n={CANONICAL_CAP}"
        );
        let colors = self.colors();
        let mut best: Option<Vec<u8>> = None;
        permutations(self.n, &mut |perm| {
            let permuted = permute_colors(self.n, &colors, perm);
            if best.as_ref().is_none_or(|b| permuted < *b) {
                best = Some(permuted);
            }
        });
        CanonicalLabel::new(self.n, &best.unwrap_or_default())
    }
}

/// Largest n for which brute-force canonicalization is allowed.
pub const CANONICAL_CAP: usize = 8;

/// Default cap for raw graph enumeration.
pub const ENUMERATION_CAP: usize = 6;

/// Canonical class label: vertex count plus the minimal color string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalLabel(String);

impl CanonicalLabel {
    fn new(n: usize, colors: &[u8]) -> Self {
        let digits: String = colors.iter().map(|c| char::from(b'0' + c)).collect();
        CanonicalLabel(format!("{n}:{digits}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Apply a vertex permutation to a color vector: the returned vector lists
/// the color of pair (perm⁻¹(i), perm⁻¹(j)) at slot (i, j), i.e. the color
/// vector of the relabeled graph.
fn permute_colors(n: usize, colors: &[u8], perm: &[usize]) -> Vec<u8> {
    let idx = |a: usize, b: usize| -> usize {
        let (a, b) = norm_pair(a, b);
        // slot of pair (a, b) in lexicographic order
        a * n - a * (a + 1) / 2 + (b - a - 1)
    };
    let mut out = vec![0u8; colors.len()];
    for ((i, j), &c) in vertex_pairs(n).zip(colors) {
        out[idx(perm[i], perm[j])] = c;
    }
    out
}

/// Call `f` with every permutation of 0..n (Heap's algorithm).
fn permutations(n: usize, f: &mut impl FnMut(&[usize])) {
    let mut items: Vec<usize> = (0..n).collect();
    heap_recurse(n, &mut items, f);
}

fn heap_recurse(k: usize, items: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k {
        heap_recurse(k - 1, items, f);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Stream every assignment of {none, classical, entangled} to the n(n−1)/2
/// pairs; with `up_to_iso`, only class representatives (the graphs whose
/// color vector is lexicographically minimal within their orbit) are yielded.
pub fn enumerate_graphs(
    n: usize,
    up_to_iso: bool,
) -> Result<impl Iterator<Item = EntangledGraph>> {
    enumerate_graphs_with_cap(n, up_to_iso, ENUMERATION_CAP)
}

pub fn enumerate_graphs_with_cap(
    n: usize,
    up_to_iso: bool,
    cap: usize,
) -> Result<impl Iterator<Item = EntangledGraph>> {
    if n > cap {
        return Err(Error::CapExceeded {
            what: "graph enumeration",
            limit: cap,
            got: n,
        });
    }
    if up_to_iso && n > CANONICAL_CAP {
        return Err(Error::CapExceeded {
            what: "isomorphism-reduced enumeration",
            limit: CANONICAL_CAP,
            got: n,
        });
    }
    let pairs = n * (n - 1) / 2;
    let total = 3u64.pow(pairs as u32);
    let mut counter = 0u64;
    Ok(std::iter::from_fn(move || {
        while counter < total {
            let mut colors = vec![0u8; pairs];
            let mut x = counter;
            for slot in colors.iter_mut() {
                *slot = (x % 3) as u8;
                x /= 3;
            }
            counter += 1;
            if up_to_iso && !is_color_minimal(n, &colors) {
                continue;
            }
            return Some(EntangledGraph::from_colors(n, &colors).expect("generated colors valid"));
        }
        None
    }))
}

fn is_color_minimal(n: usize, colors: &[u8]) -> bool {
    let mut minimal = true;
    permutations(n, &mut |perm| {
        if minimal && permute_colors(n, colors, perm).as_slice() < colors {
            minimal = false;
        }
    });
    minimal
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_flags_each_violation() {
        let r = validate(3, &[(0, 1)], &[]);
        assert!(r.is_valid());

        let r = validate(3, &[(0, 1)], &[(0, 1)]);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].contains("both edge sets"));

        let r = validate(2, &[(0, 2)], &[]);
        assert!(r.violations.iter().any(|v| v.contains("out of range")));

        let r = validate(3, &[(1, 1)], &[]);
        assert!(r.violations.iter().any(|v| v.contains("self-loop")));
    }

    #[test]
    fn profile_counts_complement_pairs() {
        let g = EntangledGraph::empty(3).unwrap();
        let p = g.profile();
        assert_eq!(p.m, vec![2, 2, 2]);
        assert_eq!(p.total, 3);

        let g = EntangledGraph::new(3, [(0, 1), (0, 2), (1, 2)], []).unwrap();
        let p = g.profile();
        assert_eq!(p.m, vec![0, 0, 0]);
        assert_eq!(p.total, 0);

        let g = EntangledGraph::new(4, [(0, 1)], [(1, 2)]).unwrap();
        let p = g.profile();
        assert_eq!(p.m, vec![2, 1, 2, 3]);
        assert_eq!(p.total, 4);
    }

    #[test]
    fn components_and_open_edges() {
        let g = EntangledGraph::new(4, [(0, 1)], [(2, 3)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2, 3]]);

        let g = EntangledGraph::new(3, [], [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1, 2]]);
        let open = g.open_edges();
        assert_eq!(open, vec![(0, (0, 1)), (2, (1, 2))]);

        let g = EntangledGraph::empty(5).unwrap();
        assert_eq!(g.connected_components().len(), 5);

        let g = EntangledGraph::new(3, [(0, 1), (0, 2), (1, 2)], []).unwrap();
        assert!(g.open_edges().is_empty());

        let g = EntangledGraph::new(2, [(0, 1)], []).unwrap();
        assert_eq!(g.open_edges().len(), 2);
    }

    #[test]
    fn complete_web_detection() {
        let g = EntangledGraph::new(3, [], [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(g.is_complete_web());
        let g = EntangledGraph::new(3, [(0, 1)], [(1, 2)]).unwrap();
        assert!(!g.is_complete_web());
        let g = EntangledGraph::new(4, [(0, 1), (2, 3), (0, 2)], [(0, 3), (1, 2), (1, 3)]).unwrap();
        assert!(g.is_complete_web());
    }

    #[test]
    fn canonical_form_identifies_relabelings() {
        let a = EntangledGraph::new(3, [(0, 1)], []).unwrap();
        let b = EntangledGraph::new(3, [(1, 2)], []).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());

        let c = EntangledGraph::new(3, [], [(0, 1)]).unwrap();
        assert_ne!(a.canonical_form(), c.canonical_form());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_graphs(2, false).unwrap().count(), 3);
        assert_eq!(enumerate_graphs(2, true).unwrap().count(), 3);
        assert_eq!(enumerate_graphs(3, false).unwrap().count(), 27);
        assert_eq!(enumerate_graphs(3, true).unwrap().count(), 10);
        assert_eq!(enumerate_graphs(4, false).unwrap().count(), 729);
        assert_eq!(enumerate_graphs(4, true).unwrap().count(), 66);
        assert!(enumerate_graphs(7, false).is_err());
    }

    #[test]
    fn edge_count_identity() {
        for g in enumerate_graphs(4, false).unwrap() {
            let p = g.profile();
            assert_eq!(g.entangled_count() + g.classical_count() + p.total, 6);
        }
    }

    #[test]
    fn permuted_preserves_class() {
        let g = EntangledGraph::new(4, [(0, 1), (1, 2)], [(2, 3)]).unwrap();
        let h = g.permuted(&[3, 2, 1, 0]).unwrap();
        assert_eq!(g.canonical_form(), h.canonical_form());
        assert_eq!(h.pair_class(3, 2), PairClass::Entangled);
        assert_eq!(h.pair_class(1, 0), PairClass::ClassicalOnly);
    }

    #[test]
    fn induced_subgraph() {
        let g = EntangledGraph::new(5, [(0, 1), (1, 4)], [(2, 3)]).unwrap();
        let sub = g.induced(&[0, 1, 4]).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.pair_class(0, 1), PairClass::Entangled);
        assert_eq!(sub.pair_class(1, 2), PairClass::Entangled);
        assert_eq!(sub.pair_class(0, 2), PairClass::Uncorrelated);
    }
}
