"""CNF data model, DIMACS I/O, planted instance generation, and brute-force
evaluation used as ground truth by every other module.

Variable indices are 1-based at the interface (DIMACS convention).
Assignments are boolean sequences of length n; vertex index convention:
bit i of an integer index encodes variable i+1, with 0 meaning FALSE.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ClauseCountMismatch,
    DuplicateLiteral,
    EmptyClause,
    IndexOutOfRange,
    InvalidWidth,
    LengthMismatch,
    MissingHeader,
    TargetUnreachable,
    TautologicalClause,
    TooManyVariables,
    VariableOutOfRange,
)

Assignment = tuple[bool, ...]

DEFAULT_ENUMERATION_LIMIT = 24


@dataclass(frozen=True)
class Literal:
    """A variable or its complement."""

    variable: int
    negated: bool = False

    def __post_init__(self) -> None:
        if self.variable < 1:
            raise VariableOutOfRange(f"variable index must be >= 1, got {self.variable}")

    @property
    def signed(self) -> int:
        return -self.variable if self.negated else self.variable

    @staticmethod
    def from_signed(value: int) -> "Literal":
        if value == 0:
            raise VariableOutOfRange("0 is not a valid signed literal")
        return Literal(abs(value), value < 0)


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals over distinct variables.

    Duplicate variables are rejected: a repeated literal is redundant and a
    tautology (x or not-x) cannot be expressed in the {-1, 0, +1} coefficient
    encoding used by the continuous relaxation.
    """

    literals: tuple[Literal, ...]

    def __post_init__(self) -> None:
        if len(self.literals) == 0:
            raise EmptyClause("clause has no literals")
        seen: dict[int, bool] = {}
        for lit in self.literals:
            if lit.variable in seen:
                if seen[lit.variable] != lit.negated:
                    raise TautologicalClause(
                        f"variable {lit.variable} appears with both polarities"
                    )
                raise DuplicateLiteral(f"variable {lit.variable} appears twice")
            seen[lit.variable] = lit.negated

    @property
    def width(self) -> int:
        return len(self.literals)

    def signed(self) -> tuple[int, ...]:
        return tuple(lit.signed for lit in self.literals)

    @staticmethod
    def from_signed(values: Iterable[int]) -> "Clause":
        return Clause(tuple(Literal.from_signed(v) for v in values))


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula over n variables with at least one clause."""

    n: int
    clauses: tuple[Clause, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise VariableOutOfRange(f"need n >= 1, got {self.n}")
        if len(self.clauses) == 0:
            raise EmptyClause("formula has no clauses")
        for m, clause in enumerate(self.clauses, start=1):
            for lit in clause.literals:
                if lit.variable > self.n:
                    raise VariableOutOfRange(
                        f"clause {m} uses variable {lit.variable} > n={self.n}"
                    )

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(c.width for c in self.clauses)

    @property
    def uniform_k(self) -> int | None:
        widths = set(self.widths)
        return widths.pop() if len(widths) == 1 else None


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text into a validated formula."""
    header: tuple[int, int] | None = None
    tokens: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise MissingHeader("multiple 'p cnf' header lines")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise MissingHeader(f"bad header line: {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise MissingHeader(f"non-integer header fields: {line!r}") from exc
            continue
        if header is None:
            raise MissingHeader("clause data before 'p cnf' header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError as exc:
            raise ClauseCountMismatch(f"non-integer clause token in {line!r}") from exc
    if header is None:
        raise MissingHeader("no 'p cnf' header found")
    n, m_declared = header

    clauses: list[Clause] = []
    current: list[int] = []
    for tok in tokens:
        if tok == 0:
            clauses.append(Clause.from_signed(current))
            current = []
        else:
            current.append(tok)
    if current:
        raise ClauseCountMismatch("last clause is not terminated by 0")
    if len(clauses) != m_declared:
        raise ClauseCountMismatch(
            f"header declares {m_declared} clauses, found {len(clauses)}"
        )
    return CnfFormula(n, tuple(clauses))


def serialize_dimacs(formula: CnfFormula) -> str:
    """Emit canonical DIMACS: literals sorted by variable index, one clause per line."""
    lines = [f"p cnf {formula.n} {formula.num_clauses}"]
    for clause in formula.clauses:
        ordered = sorted(clause.literals, key=lambda lit: lit.variable)
        lines.append(" ".join(str(lit.signed) for lit in ordered) + " 0")
    return "\n".join(lines) + "\n"


def clause_coefficient(formula: CnfFormula, m: int, i: int) -> int:
    """Coefficient of variable i in clause m: +1 plain, -1 negated, 0 absent."""
    if not 1 <= m <= formula.num_clauses:
        raise IndexOutOfRange(f"clause index {m} out of range [1, {formula.num_clauses}]")
    if not 1 <= i <= formula.n:
        raise IndexOutOfRange(f"variable index {i} out of range [1, {formula.n}]")
    for lit in formula.clauses[m - 1].literals:
        if lit.variable == i:
            return -1 if lit.negated else 1
    return 0


def evaluate(formula: CnfFormula, assignment: Sequence[bool]) -> bool:
    """True iff every clause has at least one satisfied literal."""
    if len(assignment) != formula.n:
        raise LengthMismatch(
            f"assignment length {len(assignment)} != n={formula.n}"
        )
    for clause in formula.clauses:
        if not any(
            bool(assignment[lit.variable - 1]) != lit.negated
            for lit in clause.literals
        ):
            return False
    return True


def index_to_assignment(index: int, n: int) -> Assignment:
    return tuple(bool((index >> i) & 1) for i in range(n))


def assignment_to_index(assignment: Sequence[bool]) -> int:
    return sum(1 << i for i, bit in enumerate(assignment) if bit)


def satisfying_mask(formula: CnfFormula, n_limit: int = DEFAULT_ENUMERATION_LIMIT) -> np.ndarray:
    """Boolean array of length 2**n, True at indices of satisfying assignments."""
    n = formula.n
    if n > n_limit:
        raise TooManyVariables(f"n={n} exceeds enumeration limit {n_limit}")
    idx = np.arange(1 << n, dtype=np.uint32)
    sat = np.ones(1 << n, dtype=bool)
    for clause in formula.clauses:
        violated = np.ones(1 << n, dtype=bool)
        for lit in clause.literals:
            bit = (idx >> np.uint32(lit.variable - 1)) & np.uint32(1)
            # literal is falsified when bit == 1 for a negated literal,
            # or bit == 0 for a plain literal
            violated &= bit == (1 if lit.negated else 0)
        sat &= ~violated
    return sat


def count_solutions(
    formula: CnfFormula,
    enumerate_solutions: bool = False,
    n_limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> tuple[int, list[Assignment] | None]:
    """Exhaustively count satisfying assignments; optionally list them."""
    mask = satisfying_mask(formula, n_limit)
    count = int(mask.sum())
    if not enumerate_solutions:
        return count, None
    solutions = [index_to_assignment(int(i), formula.n) for i in np.flatnonzero(mask)]
    return count, solutions


def generate_planted(
    n: int,
    M: int,
    k: int,
    target_L: int | None = None,
    seed: int | None = None,
    n_limit: int = DEFAULT_ENUMERATION_LIMIT,
    max_attempts: int = 10000,
) -> tuple[CnfFormula, Assignment]:
    """Random k-SAT instance guaranteed satisfiable by a hidden planted assignment.

    Each clause samples k distinct variables with uniform polarities and is
    resampled until the planted assignment satisfies it. When target_L is
    given, whole instances are regenerated until the brute-force solution
    count matches (clause-level repair would bias the clause distribution).
    """
    if k < 1 or k > n:
        raise InvalidWidth(f"clause width k={k} outside [1, n={n}]")
    if M < 1:
        raise EmptyClause("need at least one clause")
    if target_L is not None:
        if n > n_limit:
            raise TooManyVariables(
                f"target_L requires enumeration; n={n} exceeds limit {n_limit}"
            )
        if target_L < 1 or target_L > (1 << n):
            raise TargetUnreachable(f"target_L={target_L} outside [1, 2^{n}]")
    rng = np.random.default_rng(seed)
    variables = np.arange(1, n + 1)
    for _ in range(max_attempts):
        planted = tuple(bool(b) for b in rng.integers(0, 2, size=n))
        clauses: list[Clause] = []
        for _ in range(M):
            while True:
                chosen = rng.choice(variables, size=k, replace=False)
                negs = rng.integers(0, 2, size=k)
                lits = tuple(
                    Literal(int(v), bool(neg)) for v, neg in zip(chosen, negs)
                )
                # keep only clauses the planted assignment satisfies
                if any(planted[l.variable - 1] != l.negated for l in lits):
                    clauses.append(Clause(lits))
                    break
        formula = CnfFormula(n, tuple(clauses))
        if target_L is None:
            return formula, planted
        count, _ = count_solutions(formula, n_limit=n_limit)
        if count == target_L:
            return formula, planted
    raise TargetUnreachable(
        f"no instance with L={target_L} found in {max_attempts} attempts"
    )


def assignment_to_point(assignment: Sequence[bool]) -> np.ndarray:
    """Map FALSE -> -1.0, TRUE -> +1.0 componentwise."""
    return np.where(np.asarray(assignment, dtype=bool), 1.0, -1.0)


def point_to_assignment(coords: Sequence[float]) -> Assignment:
    """Round to the nearest vertex; ties at exactly 0 round to FALSE."""
    return tuple(bool(c > 0.0) for c in np.asarray(coords, dtype=float))


def instance_to_json(
    formula: CnfFormula,
    planted: Sequence[bool] | None = None,
    seed: int | None = None,
    L: int | None = None,
) -> dict:
    payload: dict = {
        "n": formula.n,
        "clauses": [list(clause.signed()) for clause in formula.clauses],
    }
    if planted is not None:
        payload["planted"] = "".join("1" if b else "0" for b in planted)
    if seed is not None:
        payload["seed"] = seed
    if L is not None:
        payload["L"] = L
    return payload


def instance_from_json(payload: dict) -> tuple[CnfFormula, Assignment | None]:
    formula = CnfFormula(
        payload["n"],
        tuple(Clause.from_signed(c) for c in payload["clauses"]),
    )
    planted = None
    if payload.get("planted") is not None:
        planted = tuple(ch == "1" for ch in payload["planted"])
    return formula, planted


def load_dimacs(path: str) -> CnfFormula:
    with open(path, "r", encoding="ascii") as fh:
        return parse_dimacs(fh.read())


def save_dimacs(formula: CnfFormula, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(serialize_dimacs(formula))


def save_instance_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
