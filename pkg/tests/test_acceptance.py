"""Acceptance suite: one test per exit criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines even on success.
"""

import math
import time

import numpy as np
import pytest

import amplisat as a
from amplisat.cli import main as cli_main
from amplisat.errors import TargetUnreachable
from amplisat.formula import assignment_to_point, index_to_assignment
from amplisat.landscape import vertex_matrix
from amplisat.solvers import BENCH_CSV_HEADER


def report(name, ok):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    assert ok, name


def planted_with_L(n, M, k, seed0=0, tries=400):
    """First planted instance (by seed) whose exact solution count is known."""
    for seed in range(seed0, seed0 + tries):
        f, _ = a.generate_planted(n, M, k, seed=seed)
        L, _ = a.count_solutions(f)
        if L >= 1:
            return f, L
    raise AssertionError("no satisfiable instance found")


def test_criterion_1_oracle_equivalence():
    """>=50 planted instances, all oracles, both f0, ell in [0, 2*ell_star]."""
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    checked = 0
    worst = 0.0
    while checked < 50:
        n = int(rng.integers(2, 13))
        k = min(3, n)
        M = max(3, 3 * n)
        f, _ = a.generate_planted(n, M, k, seed=int(rng.integers(0, 10 ** 6)))
        L, _ = a.count_solutions(f)
        ell_star = a.optimal_iterations(n, L)
        ells = range(0, 2 * ell_star + 1)
        refs = {f0: [a.brute_force_amplify(f, f0, ell) for ell in ells]
                for f0 in a.InitialObjective}
        for kind in a.OracleKind:
            for f0 in a.InitialObjective:
                for ell in ells:
                    sweep = a.vertex_sweep(a.conditioned(f, L, ell, kind, f0))
                    ref = refs[f0][ell]
                    scale = max(1.0, float(np.abs(ref.values).max()))
                    err = float(np.abs(sweep.values - ref.values).max()) / scale
                    worst = max(worst, err)
        checked += 1
    elapsed = time.perf_counter() - start
    report(
        f"criterion 1: oracle equivalence over {checked} instances "
        f"(worst rel err {worst:.2e}, {elapsed:.1f}s)",
        worst <= 1e-9 and elapsed <= 120.0,
    )


def test_criterion_2_ledger_exactness():
    """Empirical E[T*f_ell] == e_W[ell] (n<=10, ell<=10); E[V] == M(1-2^-k)."""
    worst_w = 0.0
    worst_v = 0.0
    for n, seed in [(4, 1), (6, 2), (8, 3), (10, 4)]:
        f, _ = planted_with_L(n, 3 * n, 3, seed0=seed)
        L, _ = a.count_solutions(f)
        ledger = a.ledger_for(f, L, a.InitialObjective.CLAUSE_COUNT, 10)
        vertices = vertex_matrix(n)
        t = np.array([a.oracle_value(f, a.OracleKind.PRODUCT, v)
                      for v in vertices])
        v0 = np.array([a.value(f, v) for v in vertices])
        worst_v = max(worst_v,
                      abs(v0.mean() - f.num_clauses * (1 - 2.0 ** -3)))
        y = v0.copy()
        for ell in range(11):
            empirical = float((t * y).mean())
            denom = max(1.0, abs(ledger.e_w[ell]))
            worst_w = max(worst_w, abs(empirical - ledger.e_w[ell]) / denom)
            y = 2.0 * ledger.e_w[ell] - t * y
    report(
        f"criterion 2: ledger exactness (W err {worst_w:.2e}, "
        f"E[V] err {worst_v:.2e})",
        worst_w <= 1e-9 and worst_v <= 1e-12,
    )


def test_criterion_3_fig1_parameter_reproduction(tmp_path):
    """n=4, M=25, k=3, L=1: ell*=3, f_ell(s*) increasing 0->3, ratio peaks
    at ell=3 over [0,6], four sweep CSVs emitted."""
    f, _ = a.generate_planted(4, 25, 3, target_L=1, seed=7)
    L, _ = a.count_solutions(f)
    ok = L == 1 and a.optimal_iterations(4, 1) == 3
    sol_values = []
    ratios = []
    for ell in range(7):
        sweep = a.vertex_sweep(a.conditioned(f, 1, ell))
        st = a.stats(sweep)
        sol_values.append(float(sweep.values[sweep.solution_indices[0]]))
        ratios.append(st.ratio)
    ok = ok and all(x < y for x, y in zip(sol_values[:4], sol_values[1:4]))
    ok = ok and int(np.argmax(ratios)) == 3
    cnf = tmp_path / "fig1.cnf"
    code = cli_main(["gen", "-n", "4", "-M", "25", "-k", "3",
                     "--target-L", "1", "--seed", "7", "--out", str(cnf)])
    ok = ok and code == 0
    code = cli_main(["landscape", str(cnf), "--ell", "0,1,2,3", "--verify",
                     "--out-prefix", str(tmp_path / "panel")])
    ok = ok and code == 0
    for ell in range(4):
        csv = tmp_path / f"panel_ell{ell}.csv"
        ok = ok and csv.exists() and len(csv.read_text().splitlines()) == 17
    report(
        "criterion 3: Fig.1-parameter reproduction "
        f"(solution values {['%.2f' % v for v in sol_values[:4]]}, "
        f"ratio argmax {int(np.argmax(ratios))})",
        ok,
    )


def test_criterion_4_grover_closed_form():
    """Unit f0: solution value equals 2^{n/2} sin((2l+1)theta)/sqrt(L)."""
    worst = 0.0
    covered = set()
    cases = 0
    for n in (2, 4, 6, 8, 10, 12):
        k = min(3, n)
        for L_target in (1, 2, 4):
            # a k-clause always excludes 2^(n-k) assignments
            if L_target > (1 << n) - (1 << (n - k)):
                continue
            found = None
            for M in sorted({round(4.3 * n), round(3.4 * n), round(2.5 * n),
                             max(3, n)}, reverse=True):
                try:
                    found, _ = a.generate_planted(
                        n, M, k, target_L=L_target, seed=17,
                        max_attempts=300,
                    )
                    break
                except TargetUnreachable:
                    continue
            if found is None:
                continue
            f, L = found, L_target
            covered.add(L)
            cases += 1
            theta = math.asin(math.sqrt(L / 2 ** n))
            _, sols = a.count_solutions(f, enumerate_solutions=True)
            for ell in range(a.optimal_iterations(n, L) + 1):
                obj = a.conditioned(f, L, ell, f0=a.InitialObjective.UNIT)
                expected = (2 ** (n / 2) * math.sin((2 * ell + 1) * theta)
                            / math.sqrt(L))
                for sol in sols:
                    got = a.condition_value(obj, assignment_to_point(sol))
                    denom = max(1.0, abs(expected))
                    worst = max(worst, abs(got - expected) / denom)
    report(
        f"criterion 4: Grover closed form ({cases} instances, "
        f"L covered {sorted(covered)}, worst err {worst:.2e})",
        cases >= 8 and covered == {1, 2, 4} and worst <= 1e-9,
    )


def test_criterion_5_gradient_correctness():
    """Analytic gradients match central differences (h=1e-5, 100 points)."""
    f, _ = planted_with_L(6, 18, 3, seed0=4)
    L, _ = a.count_solutions(f)
    h = 1e-5
    rng = np.random.default_rng(99)

    def fd(fn, s):
        g = np.zeros(len(s))
        for j in range(len(s)):
            e = np.zeros(len(s))
            e[j] = h
            g[j] = (fn(s + e) - fn(s - e)) / (2 * h)
        return g

    def check(fn, grad_fn, points):
        worst = 0.0
        for s in points:
            g = grad_fn(s)
            err = np.abs(fd(fn, s) - g).max() / max(1.0, np.abs(g).max())
            worst = max(worst, err)
        return worst

    from amplisat.relaxation import clause_values

    def interior_points(count, avoid_ties=False):
        pts = []
        while len(pts) < count:
            s = rng.uniform(-0.95, 0.95, f.n)
            if avoid_ties:
                sat = np.sort(1.0 - clause_values(f, s))
                if sat[1] - sat[0] < 1e-3:
                    continue
            pts.append(s)
        return pts

    pts = interior_points(100)
    pts_no_tie = interior_points(100, avoid_ties=True)
    worst = check(lambda s: a.clause_value(f, 1, s),
                  lambda s: a.clause_gradient(f, 1, s), pts)
    worst = max(worst, check(lambda s: a.value(f, s),
                             lambda s: a.value_gradient(f, s), pts))
    for kind in (a.OracleKind.PRODUCT, a.OracleKind.WEIGHTED_MIN):
        p = pts if kind is a.OracleKind.PRODUCT else pts_no_tie
        worst = max(worst, check(lambda s: a.oracle_value(f, kind, s),
                                 lambda s: a.oracle_gradient(f, kind, s), p))
    for ell in (1, 2, 3):
        obj = a.conditioned(f, L, ell)
        worst = max(worst, check(lambda s: a.condition_value(obj, s),
                                 lambda s: a.condition_gradient(obj, s),
                                 pts[:40]))
    report(f"criterion 5: gradient correctness (worst rel err {worst:.2e})",
           worst <= 1e-6)


def test_criterion_6_vertex_exactness():
    """K in {0,1}, T in {-1,+1}, E(s*)=0, V(s*)=M exactly at all vertices."""
    from amplisat.relaxation import clause_values

    f, _ = planted_with_L(8, 24, 3, seed0=5)
    ok = True
    for idx in range(1 << f.n):
        bits = index_to_assignment(idx, f.n)
        s = assignment_to_point(bits)
        K = clause_values(f, s)
        ok = ok and set(np.unique(K)) <= {0.0, 1.0}
        for kind in a.OracleKind:
            ok = ok and a.oracle_value(f, kind, s) in (-1.0, 1.0)
        if a.evaluate(f, bits):
            ok = ok and a.energy(f, s) == 0.0
            ok = ok and a.value(f, s) == float(f.num_clauses)
    report("criterion 6: vertex exactness (n=8 exhaustive)", ok)


def test_criterion_7_benchmark_end_to_end(tmp_path):
    """100-instance n=12 ensemble, SA + gradient, ell in {0, ell*},
    deterministic, < 5 minutes, exact CSV schema."""
    start = time.perf_counter()
    instances = []
    for i in range(100):
        f, _ = a.generate_planted(12, 51, 3, seed=1000 + i)
        L, _ = a.count_solutions(f)
        instances.append(a.BenchInstance(f"inst{i:03d}", f, L))
    sa_cfg = a.AnnealConfig(steps=300, seed=0)
    gr_cfg = a.GradientConfig(iterations=60, rounding_period=10, seed=0)
    rows = []
    for solver, cfg in (("sa", sa_cfg), ("grad", gr_cfg)):
        rows += a.benchmark(instances, solver, cfg, [0, -1],
                            a.OracleKind.PRODUCT,
                            a.InitialObjective.CLAUSE_COUNT, base_seed=5)
    rows2 = []
    for solver, cfg in (("sa", sa_cfg), ("grad", gr_cfg)):
        rows2 += a.benchmark(instances, solver, cfg, [0, -1],
                             a.OracleKind.PRODUCT,
                             a.InitialObjective.CLAUSE_COUNT, base_seed=5)
    elapsed = time.perf_counter() - start
    cols = BENCH_CSV_HEADER.split(",")
    ok = len(rows) == 400
    ok = ok and all(list(r.keys()) == cols for r in rows)
    stable_cols = [c for c in cols if c != "wall_ms"]
    ok = ok and all(
        {k: r1[k] for k in stable_cols} == {k: r2[k] for k in stable_cols}
        for r1, r2 in zip(rows, rows2)
    )
    ok = ok and elapsed < 300.0
    report(
        f"criterion 7: end-to-end benchmark (400 rows, {elapsed:.1f}s, "
        "no performance direction asserted)",
        ok,
    )


def test_criterion_8_dimacs_roundtrip_and_validation(tmp_path):
    """Canonical round-trip plus rejection of malformed inputs, with the
    documented CLI exit codes."""
    ok = True
    f, _ = a.generate_planted(9, 30, 3, seed=8)
    text = a.serialize_dimacs(f)
    ok = ok and a.serialize_dimacs(a.parse_dimacs(text)) == text
    from amplisat.errors import (
        DuplicateLiteral,
        EmptyClause,
        TautologicalClause,
        VariableOutOfRange,
    )

    for bad, err in [
        ("p cnf 2 1\n1 -1 0", TautologicalClause),
        ("p cnf 2 1\n1 1 0", DuplicateLiteral),
        ("p cnf 2 1\n0", EmptyClause),
        ("p cnf 2 1\n1 5 0", VariableOutOfRange),
    ]:
        try:
            a.parse_dimacs(bad)
            ok = False
        except err:
            pass
        path = tmp_path / "bad.cnf"
        path.write_text(bad)
        ok = ok and cli_main(["ledger", str(path)]) == 2
    report("criterion 8: DIMACS round-trip and validation", ok)
