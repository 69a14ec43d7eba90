//! Derivative-free search for a pure state whose extracted graph equals a
//! target graph.
//!
//! The state is parameterized by the real and imaginary parts of amplitudes
//! 1..2^n−1 with amplitude 0 pinned to 1 (removing global phase) and the
//! whole vector projected to the unit sphere inside the objective (removing
//! norm): 2^(n+1)−2 free parameters. A penalty objective demands margin
//! floors on the edge constraints and exact factorization on absent pairs;
//! reaching (numerical) zero triggers final arbitration by the classifier,
//! which alone decides success.

use nalgebra::{DVector, Matrix2, Matrix4};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzer::{extract_graph_pure, Tolerances};
use crate::error::{Error, Result};
use crate::graph::{vertex_pairs, EntangledGraph, PairClass};
use crate::linalg::{concurrence4, negativity4, C64, PureState};

/// Objective value at or below which a restart stops early and the final
/// classifier arbitration is attempted. Safely below the default decision
/// thresholds so that a state passing the objective also passes the gates.
pub const ACCEPT_OBJECTIVE: f64 = 1e-10;

/// Default qubit cap for [`search`]; the parameter count grows as 2^(n+1).
pub const SEARCH_QUBIT_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    NelderMead,
    FiniteDifferenceDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_evals_per_restart: usize,
    pub seed: u64,
    pub target_concurrence_floor: f64,
    pub correlation_floor: f64,
    pub accept_tol: Tolerances,
    pub method: SearchMethod,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_evals_per_restart: 20_000,
            seed: 7,
            target_concurrence_floor: 0.01,
            correlation_floor: 0.01,
            accept_tol: Tolerances::default(),
            method: SearchMethod::NelderMead,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_evals_per_restart < 50 {
            return Err(Error::InvalidConfig(
                "max_evals_per_restart must be at least 50".into(),
            ));
        }
        self.accept_tol.check()?;
        if self.target_concurrence_floor <= self.accept_tol.ent
            || self.correlation_floor <= self.accept_tol.fac
        {
            return Err(Error::InvalidConfig(
                "margin floors must exceed the acceptance thresholds".into(),
            ));
        }
        if self.target_concurrence_floor >= 1.0 || self.correlation_floor >= 1.0 {
            return Err(Error::InvalidConfig("margin floors must be below 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub found: bool,
    pub witness: Option<PureState>,
    pub best_objective: f64,
    pub evals: u64,
    /// (derived per-restart seed, best objective in that restart)
    pub per_restart_trace: Vec<(u64, f64)>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-restart RNG stream: a bijective mix of (seed, restart index), so
/// parallel and serial execution see identical streams.
fn derived_seed(seed: u64, restart: usize) -> u64 {
    splitmix64(seed ^ splitmix64(restart as u64))
}

/// Pair constraint data precomputed from the target graph.
struct PairTargets {
    pairs: Vec<(usize, usize, PairClass)>,
    n: usize,
}

impl PairTargets {
    fn new(g: &EntangledGraph) -> Self {
        let n = g.n();
        let pairs = vertex_pairs(n)
            .map(|(i, j)| (i, j, g.pair_class(i, j)))
            .collect();
        Self { pairs, n }
    }
}

/// Reduced 4×4 operator of a normalized amplitude vector on qubits (i, j),
/// i the more significant bit.
fn reduce_pair_amps(amps: &[C64], n: usize, i: usize, j: usize) -> Matrix4<C64> {
    let bi = 1usize << (n - 1 - i);
    let bj = 1usize << (n - 1 - j);
    let dim = 1usize << n;
    let mut env_bases: Vec<usize> = Vec::with_capacity(dim >> 2);
    for idx in 0..dim {
        if idx & (bi | bj) == 0 {
            env_bases.push(idx);
        }
    }
    let kept = [0usize, bj, bi, bi | bj];
    let mut out = Matrix4::<C64>::zeros();
    for r in 0..4 {
        for c in r..4 {
            let mut sum = C64::new(0.0, 0.0);
            for &base in &env_bases {
                sum += amps[base | kept[r]] * amps[base | kept[c]].conj();
            }
            out[(r, c)] = sum;
            if r != c {
                out[(c, r)] = sum.conj();
            }
        }
    }
    out
}

/// Frobenius distance between rho and the product of its own marginals.
fn factorization_distance4(rho: &Matrix4<C64>) -> f64 {
    let mut rho_i = Matrix2::<C64>::zeros();
    let mut rho_j = Matrix2::<C64>::zeros();
    for a in 0..2usize {
        for c in 0..2usize {
            rho_i[(a, c)] = rho[((a << 1), (c << 1))] + rho[((a << 1) | 1, (c << 1) | 1)];
            rho_j[(a, c)] = rho[(a, c)] + rho[((1 << 1) | a, (1 << 1) | c)];
        }
    }
    let mut sq = 0.0;
    for a in 0..2usize {
        for b in 0..2usize {
            for c in 0..2usize {
                for d in 0..2usize {
                    let diff = rho[((a << 1) | b, (c << 1) | d)] - rho_i[(a, c)] * rho_j[(b, d)];
                    sq += diff.norm_sqr();
                }
            }
        }
    }
    sq.sqrt()
}

fn objective_on_amps(amps: &[C64], targets: &PairTargets, floor_c: f64, floor_d: f64) -> f64 {
    let mut total = 0.0;
    for &(i, j, class) in &targets.pairs {
        let rho = reduce_pair_amps(amps, targets.n, i, j);
        match class {
            PairClass::Entangled => {
                let c = concurrence4(&rho);
                if c < floor_c {
                    total += floor_c - c;
                }
            }
            PairClass::ClassicalOnly => {
                total += negativity4(&rho);
                let d = factorization_distance4(&rho);
                if d < floor_d {
                    total += floor_d - d;
                }
            }
            PairClass::Uncorrelated => {
                total += factorization_distance4(&rho);
            }
        }
    }
    total
}

fn params_to_amps(x: &[f64], n: usize) -> DVector<C64> {
    let dim = 1usize << n;
    let mut amps = DVector::<C64>::zeros(dim);
    amps[0] = C64::new(1.0, 0.0);
    for k in 1..dim {
        amps[k] = C64::new(x[2 * k - 2], x[2 * k - 1]);
    }
    let norm = amps.norm();
    if norm > 0.0 {
        amps /= C64::new(norm, 0.0);
    }
    amps
}

/// Penalty objective for a candidate state against a target graph.
///
/// Σ over entangled pairs of the concurrence shortfall below the floor,
/// plus, over classical-only pairs, the negativity and the factorization-
/// distance shortfall, plus, over absent pairs, the factorization distance
/// itself. Zero means every constraint holds with margin. A state whose
/// norm deviates by at most 1e−6 is renormalized silently; worse is an
/// error.
pub fn objective(psi: &PureState, g: &EntangledGraph, cfg: &SearchConfig) -> Result<f64> {
    if psi.num_qubits() != g.n() {
        return Err(Error::QubitCount { expected: g.n(), got: psi.num_qubits() });
    }
    let sorted = psi.sorted_qubits();
    let norm = sorted.amplitudes().norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Unnormalized((norm - 1.0).abs()));
    }
    let amps: Vec<C64> = sorted.amplitudes().iter().map(|&a| a / C64::new(norm, 0.0)).collect();
    let targets = PairTargets::new(g);
    Ok(objective_on_amps(
        &amps,
        &targets,
        cfg.target_concurrence_floor,
        cfg.correlation_floor,
    ))
}

struct Evaluator<'a> {
    targets: &'a PairTargets,
    floor_c: f64,
    floor_d: f64,
    evals: usize,
    max_evals: usize,
    best: f64,
    best_x: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(targets: &'a PairTargets, floor_c: f64, floor_d: f64, max_evals: usize) -> Self {
        Self {
            targets,
            floor_c,
            floor_d,
            evals: 0,
            max_evals,
            best: f64::INFINITY,
            best_x: Vec::new(),
        }
    }

    fn spent(&self) -> bool {
        self.evals >= self.max_evals || self.best <= ACCEPT_OBJECTIVE
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let amps = params_to_amps(x, self.targets.n);
        let v = objective_on_amps(amps.as_slice(), self.targets, self.floor_c, self.floor_d);
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
        }
        v
    }
}

/// Adaptive Nelder-Mead (coefficients scaled by dimension) from `x0` with an
/// initial simplex of the given step, until the budget slice is exhausted,
/// the simplex degenerates, or the evaluator hits the accept threshold.
fn nelder_mead(ev: &mut Evaluator, x0: &[f64], step: f64, budget: usize) {
    let d = x0.len();
    let budget_end = (ev.evals + budget).min(ev.max_evals);
    let alpha = 1.0;
    let beta = 1.0 + 2.0 / d as f64;
    let gamma = 0.75 - 1.0 / (2.0 * d as f64);
    let delta = 1.0 - 1.0 / d as f64;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut values: Vec<f64> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    values.push(ev.eval(x0));
    for k in 0..d {
        let mut v = x0.to_vec();
        v[k] += step;
        values.push(ev.eval(&v));
        simplex.push(v);
        if ev.spent() || ev.evals >= budget_end {
            return;
        }
    }

    let mut order: Vec<usize> = (0..=d).collect();
    loop {
        if ev.spent() || ev.evals >= budget_end {
            return;
        }
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];
        if values[worst] - values[best] < 1e-14 {
            return;
        }

        let mut centroid = vec![0.0; d];
        for &idx in order.iter().take(d) {
            for (c, xi) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += xi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= d as f64;
        }

        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = ev.eval(&reflect);

        if fr < values[order[0]] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + beta * (c - w))
                .collect();
            let fe = ev.eval(&expand);
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let (point, fp) = if fr < values[worst] {
                let outside: Vec<f64> = centroid
                    .iter()
                    .zip(&reflect)
                    .map(|(c, r)| c + gamma * (r - c))
                    .collect();
                let fo = ev.eval(&outside);
                (outside, fo)
            } else {
                let inside: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c - gamma * (c - w))
                    .collect();
                let fi = ev.eval(&inside);
                (inside, fi)
            };
            if fp < values[worst].min(fr) {
                simplex[worst] = point;
                values[worst] = fp;
            } else {
                // shrink toward the best vertex
                let anchor = simplex[best].clone();
                for &idx in order.iter().skip(1) {
                    let shrunk: Vec<f64> = anchor
                        .iter()
                        .zip(&simplex[idx])
                        .map(|(a, xi)| a + delta * (xi - a))
                        .collect();
                    values[idx] = ev.eval(&shrunk);
                    simplex[idx] = shrunk;
                    if ev.spent() || ev.evals >= budget_end {
                        return;
                    }
                }
            }
        }
    }
}

/// Forward-difference gradient descent with a backtracking step, for the
/// same budget contract as the simplex method.
fn fd_descent(ev: &mut Evaluator, x0: &[f64]) {
    let d = x0.len();
    let h = 1e-6;
    let mut x = x0.to_vec();
    let mut fx = ev.eval(&x);
    let mut lr = 0.1;
    while !ev.spent() {
        let mut grad = vec![0.0; d];
        for k in 0..d {
            let mut xk = x.clone();
            xk[k] += h;
            grad[k] = (ev.eval(&xk) - fx) / h;
            if ev.spent() {
                return;
            }
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            return;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi - lr * gi / gnorm)
                .collect();
            let ft = ev.eval(&trial);
            if ev.spent() {
                return;
            }
            if ft < fx {
                x = trial;
                fx = ft;
                lr *= 1.5;
                accepted = true;
                break;
            }
            lr *= 0.5;
            if lr < 1e-13 {
                return;
            }
        }
        if !accepted {
            return;
        }
    }
}

struct RestartOutcome {
    seed: u64,
    best: f64,
    best_x: Vec<f64>,
    evals: usize,
}

fn run_restart(
    targets: &PairTargets,
    cfg: &SearchConfig,
    restart: usize,
) -> RestartOutcome {
    let seed = derived_seed(cfg.seed, restart);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = (1usize << (targets.n + 1)) - 2;
    let x0: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut ev = Evaluator::new(
        targets,
        cfg.target_concurrence_floor,
        cfg.correlation_floor,
        cfg.max_evals_per_restart,
    );
    match cfg.method {
        SearchMethod::NelderMead => {
            let b = cfg.max_evals_per_restart;
            let phases = [(0.1, b * 7 / 10), (1e-2, b * 15 / 100), (1e-4, b)];
            let mut start = x0;
            for &(step, slice) in &phases {
                nelder_mead(&mut ev, &start, step, slice);
                if ev.spent() {
                    break;
                }
                start = ev.best_x.clone();
            }
        }
        SearchMethod::FiniteDifferenceDescent => fd_descent(&mut ev, &x0),
    }
    RestartOutcome { seed, best: ev.best, best_x: ev.best_x, evals: ev.evals }
}

/// Multi-restart search for a pure state realizing `g`, with the default
/// qubit cap.
pub fn search(g: &EntangledGraph, cfg: &SearchConfig) -> Result<SearchResult> {
    search_with_cap(g, cfg, SEARCH_QUBIT_CAP)
}

/// Multi-restart search with an explicit qubit cap. Deterministic for a
/// given (graph, config) regardless of thread count: every restart always
/// runs to its own conclusion and results reduce by (objective, restart
/// index).
pub fn search_with_cap(g: &EntangledGraph, cfg: &SearchConfig, cap: usize) -> Result<SearchResult> {
    cfg.validate()?;
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::InvalidGraph(report.violations.join("; ")));
    }
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded { what: "search qubit count", limit: cap, got: n });
    }
    if n < 1 {
        return Err(Error::InvalidGraph("search needs at least one vertex".into()));
    }
    let targets = PairTargets::new(g);
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&targets, cfg, r))
        .collect();

    let evals: u64 = outcomes.iter().map(|o| o.evals as u64).sum();
    let per_restart_trace: Vec<(u64, f64)> = outcomes.iter().map(|o| (o.seed, o.best)).collect();
    let mut best_idx = 0usize;
    for (k, o) in outcomes.iter().enumerate() {
        if o.best < outcomes[best_idx].best {
            best_idx = k;
        }
    }
    let best_objective = outcomes[best_idx].best;

    // arbitration: among restarts that reached the accept threshold, in
    // (objective, restart index) order, the first whose state classifies to
    // exactly the target graph wins
    let mut candidates: Vec<usize> = (0..outcomes.len())
        .filter(|&k| outcomes[k].best <= ACCEPT_OBJECTIVE)
        .collect();
    candidates.sort_by(|&a, &b| {
        outcomes[a]
            .best
            .partial_cmp(&outcomes[b].best)
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut found = false;
    let mut witness = None;
    for k in candidates {
        let amps = params_to_amps(&outcomes[k].best_x, n);
        let psi = PureState::new_normalized((0..n).collect(), amps)?;
        if let Ok((extracted, _)) = extract_graph_pure(&psi, &cfg.accept_tol) {
            if extracted == *g {
                found = true;
                witness = Some(psi);
                break;
            }
        }
    }

    Ok(SearchResult { found, witness, best_objective, evals, per_restart_trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EntangledGraph;
    use crate::synthesis::three_qubit_catalog;
    use approx::assert_abs_diff_eq;

    fn small_cfg() -> SearchConfig {
        SearchConfig {
            restarts: 8,
            max_evals_per_restart: 6000,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn objective_zero_on_known_solutions() {
        let triangle_e = EntangledGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![]).unwrap();
        let w = three_qubit_catalog('g').unwrap();
        let cfg = SearchConfig::default();
        assert_abs_diff_eq!(objective(&w, &triangle_e, &cfg).unwrap(), 0.0);

        let triangle_c = EntangledGraph::new(3, vec![], vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let ghz = three_qubit_catalog('j').unwrap();
        assert_abs_diff_eq!(objective(&ghz, &triangle_c, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn objective_penalizes_product_state() {
        let triangle_e = EntangledGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![]).unwrap();
        let product = three_qubit_catalog('a').unwrap();
        let cfg = SearchConfig::default();
        let v = objective(&product, &triangle_e, &cfg).unwrap();
        assert_abs_diff_eq!(v, 3.0 * cfg.target_concurrence_floor, epsilon = 1e-12);
    }

    #[test]
    fn finds_entangled_triangle() {
        let g = EntangledGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![]).unwrap();
        let r = search(&g, &small_cfg()).unwrap();
        assert!(r.found, "best objective {}", r.best_objective);
        let psi = r.witness.unwrap();
        let (extracted, _) = extract_graph_pure(&psi, &Tolerances::default()).unwrap();
        assert_eq!(extracted, g);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = EntangledGraph::new(3, vec![(0, 1)], vec![(0, 2), (1, 2)]).unwrap();
        let cfg = SearchConfig { restarts: 4, max_evals_per_restart: 2000, ..SearchConfig::default() };
        let a = search(&g, &cfg).unwrap();
        let b = search(&g, &cfg).unwrap();
        assert_eq!(a.best_objective.to_bits(), b.best_objective.to_bits());
        assert_eq!(a.per_restart_trace, b.per_restart_trace);
        assert_eq!(a.evals, b.evals);
    }

    #[test]
    fn open_edge_path_is_never_accepted() {
        // two entangled edges in a 3-path: infeasible by the open-edge rule
        let g = EntangledGraph::new(3, vec![(0, 1), (1, 2)], vec![]).unwrap();
        let cfg = SearchConfig { restarts: 6, max_evals_per_restart: 4000, ..SearchConfig::default() };
        let r = search(&g, &cfg).unwrap();
        assert!(!r.found);
        assert!(r.best_objective > 10.0 * ACCEPT_OBJECTIVE);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SearchConfig::default();
        cfg.restarts = 0;
        assert!(cfg.validate().is_err());
        cfg = SearchConfig::default();
        cfg.target_concurrence_floor = 1e-12;
        assert!(cfg.validate().is_err());
        let g = EntangledGraph::new(7, vec![], vec![]).unwrap();
        assert!(matches!(
            search(&g, &SearchConfig::default()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn fd_descent_runs_and_reports() {
        let g = EntangledGraph::new(2, vec![(0, 1)], vec![]).unwrap();
        let cfg = SearchConfig {
            restarts: 4,
            max_evals_per_restart: 3000,
            method: SearchMethod::FiniteDifferenceDescent,
            ..SearchConfig::default()
        };
        let r = search(&g, &cfg).unwrap();
        assert!(r.found, "best objective {}", r.best_objective);
    }
}
