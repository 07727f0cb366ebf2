"""Continuous k-SAT relaxation with amplification-style conditioning."""

from .amplify import (
    ConditionedObjective,
    ExpectationLedger,
    InitialObjective,
    OracleKind,
    build_ledger,
    condition_gradient,
    condition_value,
    conditioned,
    ledger_for,
    optimal_iterations,
    oracle_gradient,
    oracle_value,
)
from .formula import (
    Assignment,
    Clause,
    CnfFormula,
    Literal,
    assignment_to_point,
    clause_coefficient,
    count_solutions,
    evaluate,
    generate_planted,
    parse_dimacs,
    point_to_assignment,
    serialize_dimacs,
)
from .landscape import (
    LandscapeStats,
    VertexSweep,
    brute_force_amplify,
    stats,
    vertex_sweep,
)
from .relaxation import (
    Point,
    clause_gradient,
    clause_value,
    energy,
    value,
    value_gradient,
)
from .solvers import (
    AnnealConfig,
    BenchInstance,
    GradientConfig,
    ObjectiveHandle,
    SolveReport,
    benchmark,
    gradient_ascent,
    simulated_annealing,
)

__version__ = "0.1.0"
