"""Stochastic solvers over raw or conditioned objectives.

Both solvers certify satisfaction discretely through formula.evaluate at
every visited vertex; the objective value is never trusted as a
satisfiability test, since conditioned values at solutions move with ell.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .amplify import ConditionedObjective, condition_gradient, condition_value
from .errors import InvalidConfig
from .formula import (
    Assignment,
    CnfFormula,
    assignment_to_point,
    evaluate,
    point_to_assignment,
)

GEOMETRIC = "geometric"
LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class ObjectiveHandle:
    objective: ConditionedObjective
    maximize: bool = True


@dataclass(frozen=True)
class AnnealConfig:
    initial_temperature: float = 2.0
    schedule: str = GEOMETRIC
    alpha: float = 0.995          # geometric decay per step
    c: float = 1.0                # logarithmic schedule scale
    steps: int = 2000
    restarts: int = 1
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.initial_temperature <= 0:
            raise InvalidConfig("initial_temperature must be > 0")
        if self.schedule not in (GEOMETRIC, LOGARITHMIC):
            raise InvalidConfig(f"unknown schedule {self.schedule!r}")
        if self.schedule == GEOMETRIC and not 0.0 < self.alpha < 1.0:
            raise InvalidConfig("alpha must be in (0, 1)")
        if self.schedule == LOGARITHMIC and self.c <= 0:
            raise InvalidConfig("c must be > 0")
        if self.steps < 1 or self.restarts < 1:
            raise InvalidConfig("steps and restarts must be >= 1")

    def temperature(self, step: int) -> float:
        if self.schedule == GEOMETRIC:
            return self.initial_temperature * self.alpha ** step
        return self.c / math.log(step + 2.0)


@dataclass(frozen=True)
class GradientConfig:
    step_size: float = 0.05
    iterations: int = 500
    restarts: int = 1
    rounding_period: int = 10
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.step_size <= 0:
            raise InvalidConfig("step_size must be > 0")
        if self.iterations < 1 or self.restarts < 1:
            raise InvalidConfig("iterations and restarts must be >= 1")
        if self.rounding_period < 1:
            raise InvalidConfig("rounding_period must be >= 1")


@dataclass
class SolveReport:
    best_assignment: Assignment
    satisfied: bool
    best_value: float
    trace: list[tuple[int, float]]
    evaluations: int
    seed: int | None
    wall_time: float


def _vertex_value(h: ObjectiveHandle, bits: Sequence[bool]) -> float:
    return condition_value(h.objective, assignment_to_point(bits))


def simulated_annealing(h: ObjectiveHandle, cfg: AnnealConfig) -> SolveReport:
    """Metropolis annealing over vertices with single-bit-flip proposals."""
    formula = h.objective.formula
    n = formula.n
    rng = np.random.default_rng(cfg.seed)
    sign = 1.0 if h.maximize else -1.0
    start_time = time.perf_counter()
    evaluations = 0
    trace: list[tuple[int, float]] = []
    sample_every = max(1, cfg.steps // 64)
    best_bits: Assignment | None = None
    best_value = -math.inf
    done = False

    for _ in range(cfg.restarts):
        bits = [bool(b) for b in rng.integers(0, 2, size=n)]
        current = _vertex_value(h, bits)
        evaluations += 1
        # energy convention: minimize -f when maximizing f
        if best_bits is None or sign * current > sign * best_value:
            best_bits, best_value = tuple(bits), current
        if evaluate(formula, bits):
            done = True
        step = 0
        while not done and step < cfg.steps:
            temp = cfg.temperature(step)
            flip = int(rng.integers(0, n))
            bits[flip] = not bits[flip]
            proposed = _vertex_value(h, bits)
            evaluations += 1
            delta = sign * (current - proposed)  # energy increase
            if delta <= 0 or (temp > 0 and rng.random() < math.exp(-delta / temp)):
                current = proposed
                if sign * current > sign * best_value:
                    best_bits, best_value = tuple(bits), current
                if evaluate(formula, bits):
                    done = True
            else:
                bits[flip] = not bits[flip]
            if step % sample_every == 0:
                trace.append((step, current))
            step += 1
        if done:
            break

    assert best_bits is not None
    satisfied = evaluate(formula, best_bits)
    return SolveReport(
        best_assignment=best_bits,
        satisfied=satisfied,
        best_value=best_value,
        trace=trace,
        evaluations=evaluations,
        seed=cfg.seed,
        wall_time=time.perf_counter() - start_time,
    )


def gradient_ascent(h: ObjectiveHandle, cfg: GradientConfig) -> SolveReport:
    """Fixed-step projected gradient ascent with periodic vertex rounding."""
    formula = h.objective.formula
    n = formula.n
    rng = np.random.default_rng(cfg.seed)
    sign = 1.0 if h.maximize else -1.0
    start_time = time.perf_counter()
    evaluations = 0
    trace: list[tuple[int, float]] = []
    best_bits: Assignment | None = None
    best_value = -math.inf
    done = False

    for _ in range(cfg.restarts):
        s = rng.uniform(-1.0, 1.0, size=n)
        for it in range(1, cfg.iterations + 1):
            g = condition_gradient(h.objective, s)
            evaluations += 1
            s = np.clip(s + cfg.step_size * sign * g, -1.0, 1.0)
            if it % cfg.rounding_period == 0 or it == cfg.iterations:
                bits = point_to_assignment(s)
                val = _vertex_value(h, bits)
                evaluations += 1
                trace.append((it, val))
                if best_bits is None or sign * val > sign * best_value:
                    best_bits, best_value = bits, val
                if evaluate(formula, bits):
                    done = True
                    break
        if done:
            break

    assert best_bits is not None
    satisfied = evaluate(formula, best_bits)
    return SolveReport(
        best_assignment=best_bits,
        satisfied=satisfied,
        best_value=best_value,
        trace=trace,
        evaluations=evaluations,
        seed=cfg.seed,
        wall_time=time.perf_counter() - start_time,
    )


BENCH_CSV_HEADER = (
    "instance_id,n,M,k,L,ell,oracle,f0,solver,seed,"
    "satisfied,evaluations,best_value,wall_ms"
)


@dataclass(frozen=True)
class BenchInstance:
    instance_id: str
    formula: CnfFormula
    L: int


def _run_seed(base_seed: int, instance_id: str, ell: int) -> int:
    """Stable per-run RNG seed so parallel order cannot change results."""
    key = f"{instance_id}|{ell}".encode()
    return (base_seed << 32) ^ zlib.crc32(key)


def run_benchmark_case(
    inst: BenchInstance,
    ell: int,
    oracle,
    f0,
    solver: str,
    config,
    base_seed: int,
) -> dict:
    from .amplify import conditioned, optimal_iterations

    resolved_ell = optimal_iterations(inst.formula.n, inst.L) if ell == -1 else ell
    obj = conditioned(inst.formula, inst.L, resolved_ell, oracle, f0)
    handle = ObjectiveHandle(obj, maximize=True)
    seed = _run_seed(base_seed, inst.instance_id, resolved_ell)
    cfg = _reseed(config, seed)
    if solver == "sa":
        report = simulated_annealing(handle, cfg)
    elif solver == "grad":
        report = gradient_ascent(handle, cfg)
    else:
        raise InvalidConfig(f"unknown solver {solver!r}")
    k = inst.formula.uniform_k
    return {
        "instance_id": inst.instance_id,
        "n": inst.formula.n,
        "M": inst.formula.num_clauses,
        "k": k if k is not None else "",
        "L": inst.L,
        "ell": resolved_ell,
        "oracle": oracle.value,
        "f0": f0.value,
        "solver": solver,
        "seed": seed,
        "satisfied": int(report.satisfied),
        "evaluations": report.evaluations,
        "best_value": report.best_value,
        "wall_ms": report.wall_time * 1000.0,
    }


def _reseed(config, seed: int):
    if isinstance(config, AnnealConfig):
        return AnnealConfig(
            initial_temperature=config.initial_temperature,
            schedule=config.schedule,
            alpha=config.alpha,
            c=config.c,
            steps=config.steps,
            restarts=config.restarts,
            seed=seed,
        )
    return GradientConfig(
        step_size=config.step_size,
        iterations=config.iterations,
        restarts=config.restarts,
        rounding_period=config.rounding_period,
        seed=seed,
    )


def benchmark(
    instances: Sequence[BenchInstance],
    solver: str,
    config,
    ell_choices: Sequence[int],
    oracle,
    f0,
    base_seed: int = 0,
    jobs: int = 1,
) -> list[dict]:
    """Run solver over every (instance, ell) cell; rows are deterministic in
    (instance, config, base_seed) and independent of execution order."""
    cases = [(inst, ell) for inst in instances for ell in ell_choices]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(
                pool.map(
                    _bench_star,
                    [(inst, ell, oracle, f0, solver, config, base_seed)
                     for inst, ell in cases],
                )
            )
    else:
        rows = [
            run_benchmark_case(inst, ell, oracle, f0, solver, config, base_seed)
            for inst, ell in cases
        ]
    return rows


def _bench_star(args):
    return run_benchmark_case(*args)


def format_bench_row(row: dict) -> str:
    def fmt(v):
        if isinstance(v, float):
            return repr(v)
        return str(v)

    return ",".join(
        fmt(row[col]) for col in BENCH_CSV_HEADER.split(",")
    )
