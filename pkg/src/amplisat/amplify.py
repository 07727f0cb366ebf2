"""Amplitude-amplification-style conditioning of the relaxed objective.

One conditioning round multiplies the current objective by an oracle
function (exactly -1 at satisfying vertices, +1 at all other vertices) and
reflects about the vertex average. Because the vertex averages of every
iterate are available in closed form from (n, L, M, clause widths), the
conditioned objective can be evaluated point by point without ever touching
the full 2^n vertex set; the ExpectationLedger holds those precomputed
constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import NoSolutions
from .formula import CnfFormula
from .relaxation import (
    GradientVector,
    clause_gradients,
    clause_values,
    value,
    value_gradient,
)


class OracleKind(str, Enum):
    PRODUCT = "product"            # 1 - 2 * prod(1 - K_m)
    MIN = "min"                    # 1 - 2 * min(1 - K_m)
    WEIGHTED_MIN = "weighted_min"  # 1 - 2 * (V/M) * min(1 - K_m)


class InitialObjective(str, Enum):
    UNIT = "unit"                  # f0 == 1, structureless start
    CLAUSE_COUNT = "clause_count"  # f0 == V, satisfied-clause count at vertices


def oracle_value(formula: CnfFormula, kind: OracleKind, s) -> float:
    """Continuous oracle; exactly -1 at satisfying vertices, +1 at the rest."""
    satisfied = 1.0 - clause_values(formula, s)
    if kind is OracleKind.PRODUCT:
        return float(1.0 - 2.0 * satisfied.prod())
    if kind is OracleKind.MIN:
        return float(1.0 - 2.0 * satisfied.min())
    if kind is OracleKind.WEIGHTED_MIN:
        frac = satisfied.sum() / formula.num_clauses
        return float(1.0 - 2.0 * frac * satisfied.min())
    raise ValueError(f"unknown oracle kind {kind!r}")


def oracle_gradient(formula: CnfFormula, kind: OracleKind, s) -> GradientVector:
    """Gradient of the oracle; min variants use the argmin clause, ties broken
    by lowest clause index."""
    grads_k = clause_gradients(formula, s)
    satisfied = 1.0 - clause_values(formula, s)
    if kind is OracleKind.PRODUCT:
        loo = _leave_one_out_1d(satisfied)
        # d/ds [1 - 2 prod(1-K_m)] = 2 sum_m (dK_m) prod_{m'!=m}(1-K_m')
        return 2.0 * (loo[:, None] * grads_k).sum(axis=0)
    j = int(np.argmin(satisfied))
    if kind is OracleKind.MIN:
        return 2.0 * grads_k[j]
    if kind is OracleKind.WEIGHTED_MIN:
        M = formula.num_clauses
        frac = satisfied.sum() / M
        frac_grad = -grads_k.sum(axis=0) / M
        return -2.0 * (frac_grad * satisfied[j] - frac * grads_k[j])
    raise ValueError(f"unknown oracle kind {kind!r}")


def _leave_one_out_1d(values: np.ndarray) -> np.ndarray:
    m = len(values)
    prefix = np.ones(m)
    suffix = np.ones(m)
    if m > 1:
        prefix[1:] = np.cumprod(values[:-1])
        suffix[:-1] = np.cumprod(values[:0:-1])[::-1]
    return prefix * suffix


@dataclass(frozen=True)
class ExpectationLedger:
    """Closed-form vertex averages driving per-point conditioned evaluation.

    e_w[l] is the vertex average of the oracle-times-objective product after
    l conditioning rounds; it satisfies a three-term recursion in e_t, so the
    whole sequence is computed up front from (n, L, M, widths, f0).
    """

    n: int
    L: int
    M: int
    widths: tuple[int, ...]
    f0: InitialObjective
    e_t: float
    e_f0: float
    f0_star: float
    e_w: tuple[float, ...]

    @property
    def ell_max(self) -> int:
        return len(self.e_w) - 1

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "L": self.L,
            "M": self.M,
            "widths": list(self.widths),
            "f0": self.f0.value,
            "e_T": self.e_t,
            "e_f0": self.e_f0,
            "f0_star": self.f0_star,
            "e_W": list(self.e_w),
        }

    @staticmethod
    def from_json(payload: dict) -> "ExpectationLedger":
        return ExpectationLedger(
            n=payload["n"],
            L=payload["L"],
            M=payload["M"],
            widths=tuple(payload["widths"]),
            f0=InitialObjective(payload["f0"]),
            e_t=payload["e_T"],
            e_f0=payload["e_f0"],
            f0_star=payload["f0_star"],
            e_w=tuple(payload["e_W"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def build_ledger(
    n: int,
    L: int,
    M: int,
    widths: Sequence[int],
    f0: InitialObjective,
    ell_max: int,
) -> ExpectationLedger:
    """Precompute e_T, e_f0, f0*, and the e_W sequence up to ell_max."""
    if L < 1:
        raise NoSolutions("conditioning is undefined for L = 0")
    if ell_max < 0:
        raise ValueError(f"ell_max must be >= 0, got {ell_max}")
    total = float(1 << n)
    e_t = 1.0 - 2.0 * L / total
    if f0 is InitialObjective.UNIT:
        e_f0 = 1.0
        f0_star = 1.0
    else:
        e_f0 = M - sum(math.ldexp(1.0, -k) for k in widths)
        f0_star = float(M)
    e_w = [e_f0 - 2.0 * f0_star * L / total]
    if ell_max >= 1:
        e_w.append(2.0 * e_w[0] * e_t - e_f0)
    for _ in range(2, ell_max + 1):
        e_w.append(2.0 * e_w[-1] * e_t - e_w[-2])
    return ExpectationLedger(
        n=n, L=L, M=M, widths=tuple(widths), f0=f0,
        e_t=e_t, e_f0=e_f0, f0_star=f0_star, e_w=tuple(e_w),
    )


def ledger_for(
    formula: CnfFormula,
    L: int,
    f0: InitialObjective,
    ell_max: int,
) -> ExpectationLedger:
    return build_ledger(formula.n, L, formula.num_clauses, formula.widths, f0, ell_max)


@dataclass(frozen=True)
class ConditionedObjective:
    """The objective after `ell` conditioning rounds, evaluable at any point."""

    formula: CnfFormula
    oracle: OracleKind
    f0: InitialObjective
    ell: int
    ledger: ExpectationLedger

    def __post_init__(self) -> None:
        if self.ell < 0:
            raise ValueError(f"ell must be >= 0, got {self.ell}")
        lg = self.ledger
        if (lg.n, lg.M, lg.widths, lg.f0) != (
            self.formula.n,
            self.formula.num_clauses,
            self.formula.widths,
            self.f0,
        ):
            raise ValueError("ledger does not match formula/f0")
        if self.ell > 0 and lg.ell_max < self.ell - 1:
            raise ValueError(
                f"ledger holds e_W[0..{lg.ell_max}], need e_W[{self.ell - 1}]"
            )


def initial_value(formula: CnfFormula, f0: InitialObjective, s) -> float:
    if f0 is InitialObjective.UNIT:
        return 1.0
    return value(formula, s)


def initial_gradient(formula: CnfFormula, f0: InitialObjective, s) -> GradientVector:
    if f0 is InitialObjective.UNIT:
        return np.zeros(formula.n)
    return value_gradient(formula, s)


def condition_value(c: ConditionedObjective, s) -> float:
    """Evaluate the conditioned objective at one point.

    The oracle is evaluated once; each round applies
    y <- 2*e_W[i-1] - T(s)*y with the precomputed average.
    """
    y = initial_value(c.formula, c.f0, s)
    if c.ell == 0:
        return y
    t = oracle_value(c.formula, c.oracle, s)
    for i in range(c.ell):
        y = 2.0 * c.ledger.e_w[i] - t * y
    return y


def condition_gradient(c: ConditionedObjective, s) -> GradientVector:
    """Gradient of the conditioned objective by forward accumulation."""
    y = initial_value(c.formula, c.f0, s)
    g = initial_gradient(c.formula, c.f0, s)
    if c.ell == 0:
        return g
    t = oracle_value(c.formula, c.oracle, s)
    gt = oracle_gradient(c.formula, c.oracle, s)
    for i in range(c.ell):
        g = -(t * g + y * gt)
        y = 2.0 * c.ledger.e_w[i] - t * y
    return g


def optimal_iterations(n: int, L: int) -> int:
    """floor((pi/4) * sqrt(2^n / L)), the standard amplification sweet spot."""
    if L < 1:
        raise NoSolutions("L must be >= 1")
    if L > (1 << n):
        raise ValueError(f"L={L} exceeds 2^{n}")
    return int(math.floor(math.pi / 4.0 * math.sqrt((1 << n) / L)))


def conditioned(
    formula: CnfFormula,
    L: int,
    ell: int,
    oracle: OracleKind = OracleKind.PRODUCT,
    f0: InitialObjective = InitialObjective.CLAUSE_COUNT,
) -> ConditionedObjective:
    """Convenience constructor building a matching ledger."""
    ledger = ledger_for(formula, L, f0, max(ell - 1, 0))
    return ConditionedObjective(formula, oracle, f0, ell, ledger)
