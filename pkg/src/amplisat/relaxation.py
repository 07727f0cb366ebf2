"""Continuous relaxation of CNF over the hypercube [-1, 1]^n.

Each clause m with coefficients c in {-1, 0, +1} becomes the product form

    K_m(s) = 2**(-k_m) * prod over clause variables of (1 - c_i * s_i),

which is 0 at vertices satisfying the clause and 1 at vertices violating it.
The energy E(s) sums clause values; the value V(s) = M - E(s) turns
satisfying vertices into global maxima.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IndexOutOfRange, InvalidPoint
from .formula import CnfFormula

VERTEX_SNAP_TOL = 1e-12

GradientVector = np.ndarray


class Point:
    """A point of the closed hypercube [-1, 1]^n.

    Coordinates within 1e-12 of +-1 are snapped to exactly +-1 so that vertex
    identities (K_m in {0,1}, T in {-1,+1}) hold exactly after floating-point
    arithmetic.
    """

    __slots__ = ("coords",)

    def __init__(self, coords) -> None:
        arr = np.array(coords, dtype=float)
        if arr.ndim != 1:
            raise InvalidPoint(f"expected a 1-D coordinate vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidPoint("non-finite coordinate")
        snap = np.abs(np.abs(arr) - 1.0) <= VERTEX_SNAP_TOL
        arr[snap] = np.sign(arr[snap])
        if np.any(np.abs(arr) > 1.0):
            raise InvalidPoint("coordinate outside [-1, 1]")
        arr.flags.writeable = False
        self.coords = arr

    def __len__(self) -> int:
        return len(self.coords)

    def __repr__(self) -> str:
        return f"Point({self.coords.tolist()!r})"


def _coords(s) -> np.ndarray:
    if isinstance(s, Point):
        return s.coords
    return Point(s).coords


@dataclass(frozen=True)
class _Compiled:
    """Padded per-clause index/coefficient arrays for vectorized evaluation."""

    idx: np.ndarray     # (M, k_max) 0-based variable indices, pad 0
    coef: np.ndarray    # (M, k_max) coefficients, pad 0.0 (factor exactly 1)
    scale: np.ndarray   # (M,) 2**-k_m


@lru_cache(maxsize=256)
def _compiled(formula: CnfFormula) -> _Compiled:
    widths = formula.widths
    k_max = max(widths)
    M = formula.num_clauses
    idx = np.zeros((M, k_max), dtype=np.intp)
    coef = np.zeros((M, k_max), dtype=float)
    for m, clause in enumerate(formula.clauses):
        for j, lit in enumerate(clause.literals):
            idx[m, j] = lit.variable - 1
            coef[m, j] = -1.0 if lit.negated else 1.0
    scale = np.ldexp(1.0, -np.asarray(widths, dtype=np.intp))
    idx.flags.writeable = False
    coef.flags.writeable = False
    scale.flags.writeable = False
    return _Compiled(idx, coef, scale)


def _clause_factors(formula: CnfFormula, x: np.ndarray) -> np.ndarray:
    """(M, k_max) array of (1 - c*s) factors; padded slots are exactly 1."""
    comp = _compiled(formula)
    return 1.0 - comp.coef * x[comp.idx]


def clause_values(formula: CnfFormula, s) -> np.ndarray:
    """All clause values K_m(s) as an (M,) array."""
    x = _coords(s)
    comp = _compiled(formula)
    return comp.scale * _clause_factors(formula, x).prod(axis=1)


def clause_value(formula: CnfFormula, m: int, s) -> float:
    """K_m(s) for the 1-based clause index m."""
    if not 1 <= m <= formula.num_clauses:
        raise IndexOutOfRange(f"clause index {m} out of range [1, {formula.num_clauses}]")
    return float(clause_values(formula, s)[m - 1])


def energy(formula: CnfFormula, s) -> float:
    """E(s) = sum of clause values; 0 at a vertex iff it satisfies the formula."""
    return float(clause_values(formula, s).sum())


def value(formula: CnfFormula, s) -> float:
    """V(s) = M - E(s); satisfying vertices attain the global maximum M."""
    return formula.num_clauses - energy(formula, s)


def _leave_one_out(factors: np.ndarray) -> np.ndarray:
    """Row-wise products of all entries except each one, without division."""
    M, k = factors.shape
    prefix = np.ones((M, k))
    suffix = np.ones((M, k))
    if k > 1:
        prefix[:, 1:] = np.cumprod(factors[:, :-1], axis=1)
        suffix[:, :-1] = np.cumprod(factors[:, :0:-1], axis=1)[:, ::-1]
    return prefix * suffix


def clause_gradients(formula: CnfFormula, s) -> np.ndarray:
    """(M, n) array of all clause gradients d K_m / d s_j."""
    x = _coords(s)
    comp = _compiled(formula)
    factors = 1.0 - comp.coef * x[comp.idx]
    loo = _leave_one_out(factors)
    partial = -comp.coef * comp.scale[:, None] * loo
    grads = np.zeros((formula.num_clauses, formula.n))
    rows = np.repeat(np.arange(formula.num_clauses), comp.idx.shape[1])
    np.add.at(grads, (rows, comp.idx.ravel()), partial.ravel())
    return grads


def clause_gradient(formula: CnfFormula, m: int, s) -> GradientVector:
    """Gradient of K_m at s (1-based m); zero outside the clause's variables."""
    if not 1 <= m <= formula.num_clauses:
        raise IndexOutOfRange(f"clause index {m} out of range [1, {formula.num_clauses}]")
    return clause_gradients(formula, s)[m - 1]


def value_gradient(formula: CnfFormula, s) -> GradientVector:
    """Gradient of V(s) = -sum of clause gradients."""
    return -clause_gradients(formula, s).sum(axis=0)
