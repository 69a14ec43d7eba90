#!/usr/bin/env python3
"""Smoke test for the entangled_graphs_py extension module.

Builds nothing itself: expects `cargo build -p entangled-graphs-py`
(debug or release) to have produced the cdylib already.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    names = ["libentangled_graphs_py.so", "entangled_graphs_py.dll", "libentangled_graphs_py.dylib"]
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("extension not built; run: cargo build -p entangled-graphs-py")
    stage = Path(tempfile.mkdtemp(prefix="egraph_py_"))
    shutil.copy2(built, stage / "entangled_graphs_py.so")
    sys.path.insert(0, str(stage))
    import entangled_graphs_py
    return entangled_graphs_py


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    eg = load_module()
    checks = 0

    def ok(label, cond):
        nonlocal checks
        if not cond:
            sys.exit(f"FAIL: {label}")
        checks += 1
        print(f"ok {checks}: {label}")

    bell = [
        [0.5, 0, 0, 0.5],
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [0.5, 0, 0, 0.5],
    ]
    ok("Bell state concurrence is 1", close(eg.concurrence(bell), 1.0))
    ok("Bell state negativity is 1/2", close(eg.negativity(bell), 0.5))

    n = 4
    g = eg.Graph(n, entangled=[(0, 1)], classical=[(2, 3)])
    ok("graph JSON round-trip", eg.Graph.from_json(g.to_json()) == g)
    ok("pair classes", g.pair_class(0, 1) == "entangled"
       and g.pair_class(2, 3) == "classical-only"
       and g.pair_class(0, 2) == "uncorrelated")

    state = eg.build_mixed(g)
    ok("mixed state is normalized", close(state.trace(), 1.0, 1e-12))

    z = 2.0 * (n - 1) ** 2
    rho = state.reduce_pair(0, 1)
    ok("entangled pair closed form", close(rho[0][0].real, (2 * n * n - 6 * n + 4) / z, 1e-12)
       and close(rho[1][2].real, 1 / z, 1e-12))
    rho = state.reduce_pair(2, 3)
    ok("classical pair drops the coherence", close(rho[1][2].real, 0.0, 1e-12)
       and close(rho[1][1].real, (n - 1) / z, 1e-12))
    rho = state.reduce_pair(0, 2)
    ok("uncorrelated pair closed form", close(rho[0][0].real, (2 * n * n - 6 * n + 4.5) / z, 1e-12))

    extracted, verdicts = eg.extract_graph(state)
    ok("classification recovers the graph", extracted == g and len(verdicts) == n * (n - 1) // 2)
    ent = next(v for v in verdicts if (v["i"], v["j"]) == (0, 1))
    ok("recovered concurrence is 1/(n-1)^2", close(ent["concurrence"], 1 / (n - 1) ** 2, 1e-10))

    block_json = state.to_json()
    ok("state JSON round-trip", close(eg.BlockState.from_json(block_json).vacuum, state.vacuum, 0.0))

    amp = 1 / math.sqrt(3)
    w = eg.PureState([0, amp, amp, 0, amp, 0, 0, 0])
    rho = w.reduce_pair(0, 1)
    ok("W state pair concurrence is 2/3", close(eg.concurrence(rho), 2 / 3))
    wg, _ = eg.extract_graph(w)
    ok("W state graph is fully entangled", wg == eg.Graph(3, entangled=[(0, 1), (0, 2), (1, 2)]))

    cat = eg.three_qubit_catalog("g")
    cg, _ = eg.extract_graph(cat)
    ok("catalog state g is the entangled triangle", cg == wg)

    bad = eg.Graph(3, classical=[(0, 1)])
    verdict = eg.assess(bad)
    ok("correlated pair plus isolated vertex is infeasible",
       verdict["status"] == "infeasible" and not verdict["feasible"])

    tri = eg.Graph(3, entangled=[(0, 1), (0, 2), (1, 2)])
    verdict = eg.assess(tri)
    ok("entangled triangle is constructive", verdict["status"] == "feasible-constructive"
       and verdict["witness"] is not None)
    tg, _ = eg.extract_graph(verdict["witness"])
    ok("triangle witness classifies back", tg == tri)

    star = eg.Graph(4, entangled=[(0, 1), (0, 2), (0, 3)],
                    classical=[(1, 2), (1, 3), (2, 3)])
    psi, (alpha, beta, gamma) = eg.build_web_verified(star)
    ok("star web parameters are a unit vector", close(alpha ** 2 + beta ** 2 + gamma ** 2, 1.0, 1e-9))
    sg, _ = eg.extract_graph(psi)
    ok("star web state classifies back", sg == star)

    result = eg.search(eg.Graph(2, entangled=[(0, 1)]), restarts=8, max_evals=5000, seed=11)
    ok("search finds a two-qubit entangled pair",
       result["found"] and result["best_objective"] <= eg.ACCEPT_OBJECTIVE)

    report = eg.census(3)
    ok("three-vertex census has 10 classes and 27 raw graphs",
       report["class_total"] == 10 and report["raw_total"] == 27)
    feasible = sum(1 for r in report["rows"] if r["status"].startswith("feasible"))
    ok("six of the ten classes are feasible", feasible == 6)

    print(f"\nall {checks} checks passed")


if __name__ == "__main__":
    main()
