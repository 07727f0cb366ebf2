"""Exhaustive vertex-level analysis of conditioned objectives.

The brute-force amplifier materializes the full 2^n cost vector and applies
the sign-flip + reflect-about-the-mean rounds literally; it is the ground
truth the ledger-driven per-point evaluation is checked against, and it
never touches an ExpectationLedger.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .amplify import ConditionedObjective, InitialObjective, OracleKind
from .errors import EmptySolutionSet, NoSolutions, TooManyVariables
from .formula import CnfFormula, satisfying_mask
from .relaxation import _compiled

DEFAULT_SWEEP_LIMIT = 20


@dataclass(frozen=True)
class VertexSweep:
    """Objective values at all 2^n vertices, indexed by assignment bits.

    Bit i of the index encodes variable i+1 (0 = FALSE)."""

    n: int
    ell: int
    values: np.ndarray
    solution_indices: np.ndarray

    def bits_label(self, index: int) -> str:
        return "".join("1" if (index >> i) & 1 else "0" for i in range(self.n))


@dataclass(frozen=True)
class LandscapeStats:
    ell: int
    gap: float
    ratio: float
    max_local_min_depth: float
    n_local_minima: int

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "gap": self.gap,
            "ratio": self.ratio,
            "max_local_min_depth": self.max_local_min_depth,
            "n_local_minima": self.n_local_minima,
        }


def vertex_matrix(n: int) -> np.ndarray:
    """(2^n, n) matrix of vertex coordinates; row index = assignment index."""
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = (idx[:, None] >> np.arange(n, dtype=np.uint32)) & 1
    return np.where(bits == 1, 1.0, -1.0)


def _clause_values_at_vertices(formula: CnfFormula, vertices: np.ndarray) -> np.ndarray:
    """(2^n, M) clause values, clause by clause to bound memory."""
    comp = _compiled(formula)
    P = vertices.shape[0]
    out = np.empty((P, formula.num_clauses))
    for m in range(formula.num_clauses):
        factors = 1.0 - comp.coef[m] * vertices[:, comp.idx[m]]
        out[:, m] = comp.scale[m] * factors.prod(axis=1)
    return out


def _satisfied_counts(formula: CnfFormula, n_limit: int) -> np.ndarray:
    """Number of satisfied clauses at each vertex, counted discretely."""
    n = formula.n
    idx = np.arange(1 << n, dtype=np.uint32)
    counts = np.zeros(1 << n, dtype=np.int64)
    for clause in formula.clauses:
        violated = np.ones(1 << n, dtype=bool)
        for lit in clause.literals:
            bit = (idx >> np.uint32(lit.variable - 1)) & np.uint32(1)
            violated &= bit == (1 if lit.negated else 0)
        counts += ~violated
    return counts


def brute_force_amplify(
    formula: CnfFormula,
    f0: InitialObjective,
    ell: int,
    n_limit: int = DEFAULT_SWEEP_LIMIT,
) -> VertexSweep:
    """Explicit-vector conditioning: flip signs at solutions, reflect about
    the mean, `ell` times. Independent of the closed-form ledger."""
    n = formula.n
    if n > n_limit:
        raise TooManyVariables(f"n={n} exceeds sweep limit {n_limit}")
    mask = satisfying_mask(formula, n_limit)
    sol = np.flatnonzero(mask)
    if sol.size == 0:
        raise NoSolutions("formula has no satisfying assignments")
    if f0 is InitialObjective.UNIT:
        v = np.ones(1 << n)
    else:
        v = _satisfied_counts(formula, n_limit).astype(float)
    for _ in range(ell):
        v[sol] = -v[sol]
        v = 2.0 * v.mean() - v
    v.flags.writeable = False
    return VertexSweep(n=n, ell=ell, values=v, solution_indices=sol)


def vertex_sweep(
    c: ConditionedObjective,
    n_limit: int = DEFAULT_SWEEP_LIMIT,
) -> VertexSweep:
    """Ledger-path evaluation of the conditioned objective at every vertex."""
    formula = c.formula
    n = formula.n
    if n > n_limit:
        raise TooManyVariables(f"n={n} exceeds sweep limit {n_limit}")
    vertices = vertex_matrix(n)
    K = _clause_values_at_vertices(formula, vertices)
    satisfied = 1.0 - K
    if c.f0 is InitialObjective.UNIT:
        y = np.ones(1 << n)
    else:
        y = formula.num_clauses - K.sum(axis=1)
    if c.oracle is OracleKind.PRODUCT:
        t = 1.0 - 2.0 * satisfied.prod(axis=1)
    elif c.oracle is OracleKind.MIN:
        t = 1.0 - 2.0 * satisfied.min(axis=1)
    else:
        frac = satisfied.sum(axis=1) / formula.num_clauses
        t = 1.0 - 2.0 * frac * satisfied.min(axis=1)
    for i in range(c.ell):
        y = 2.0 * c.ledger.e_w[i] - t * y
    sol = np.flatnonzero(t == -1.0)
    y.flags.writeable = False
    return VertexSweep(n=n, ell=c.ell, values=y, solution_indices=sol)


def _strict_local_minima(energy: np.ndarray, n: int) -> np.ndarray:
    """Indices whose energy is strictly below all Hamming-1 neighbors."""
    is_min = np.ones(energy.size, dtype=bool)
    idx = np.arange(energy.size)
    for b in range(n):
        neighbor = idx ^ (1 << b)
        is_min &= energy < energy[neighbor]
    return np.flatnonzero(is_min)


class _UnionFind:
    def __init__(self, size: int) -> None:
        self.parent = np.arange(size)

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return ra


def local_minimum_depths(energy: np.ndarray, n: int) -> dict[int, float]:
    """Depth of each strict non-global local minimum under bit-flip moves.

    Depth = (lowest barrier that connects the minimum to a strictly lower
    vertex) - (its own energy), the standard cup depth governing simulated-
    annealing cooling schedules. Computed in one pass: activate vertices in
    ascending energy, union with active neighbors, and resolve a pending
    minimum as soon as its component's lowest energy drops below its own.
    """
    order = np.argsort(energy, kind="stable")
    minima = set(int(v) for v in _strict_local_minima(energy, n))
    global_min = float(energy.min())
    uf = _UnionFind(energy.size)
    comp_min: dict[int, float] = {}
    comp_open: dict[int, list[int]] = {}
    active = np.zeros(energy.size, dtype=bool)
    depths: dict[int, float] = {}
    for w in order:
        w = int(w)
        level = float(energy[w])
        comp_min[w] = level
        comp_open[w] = [w] if (w in minima and level > global_min) else []
        active[w] = True
        for b in range(n):
            u = w ^ (1 << b)
            if not active[u]:
                continue
            ru, rw = uf.find(u), uf.find(w)
            if ru == rw:
                continue
            merged = uf.union(ru, rw)
            new_min = min(comp_min.pop(ru), comp_min.pop(rw))
            pending = comp_open.pop(ru) + comp_open.pop(rw)
            still = []
            for m in pending:
                if new_min < energy[m]:
                    depths[m] = level - float(energy[m])
                else:
                    still.append(m)
            comp_min[merged] = new_min
            comp_open[merged] = still
    return depths


def stats(sweep: VertexSweep) -> LandscapeStats:
    """Gap/ratio between solutions and the rest, plus bit-flip basin depths
    of the minimization form (energy = -value)."""
    sol = sweep.solution_indices
    if sol.size == 0:
        raise EmptySolutionSet("sweep has no solution indices")
    values = sweep.values
    mask = np.zeros(values.size, dtype=bool)
    mask[sol] = True
    sol_min = float(values[mask].min())
    if mask.all():
        gap = float("inf")
        ratio = float("inf")
    else:
        other_max = float(values[~mask].max())
        gap = sol_min - other_max
        # denominator is the largest non-solution magnitude so the ratio
        # stays a meaningful separation measure once conditioning drives
        # non-solution values negative
        other_mag = float(np.abs(values[~mask]).max())
        ratio = sol_min / other_mag if other_mag != 0.0 else float("inf")
    energy = -values
    depths = local_minimum_depths(energy, sweep.n)
    n_minima = int(_strict_local_minima(energy, sweep.n).size)
    max_depth = max(depths.values()) if depths else 0.0
    return LandscapeStats(
        ell=sweep.ell,
        gap=gap,
        ratio=ratio,
        max_local_min_depth=float(max_depth),
        n_local_minima=n_minima,
    )


def write_sweep_csv(sweep: VertexSweep, path: str) -> None:
    """CSV schema: index,bits,value,is_solution; full-precision values."""
    sol = set(int(i) for i in sweep.solution_indices)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("index,bits,value,is_solution\n")
        for i, v in enumerate(sweep.values):
            fh.write(
                f"{i},{sweep.bits_label(i)},{float(v)!r},{int(i in sol)}\n"
            )


def write_stats_json(stats_list: list[LandscapeStats], path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump([s.to_json() for s in stats_list], fh, indent=2)
        fh.write("\n")
