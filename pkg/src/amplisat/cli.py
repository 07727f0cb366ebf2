"""Command-line interface: gen, ledger, landscape, solve, bench.

Exit codes: 0 success (solve: satisfied), 1 I/O error, 2 validation or
domain error, 3 solver budget exhausted without satisfaction. Every command
honors --seed; an omitted seed is drawn from entropy and recorded in the run
manifest so any run can be replayed exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import secrets
import sys

import numpy as np

from . import __version__
from .amplify import (
    InitialObjective,
    OracleKind,
    conditioned,
    ledger_for,
    optimal_iterations,
)
from .errors import AmpliSatError
from .formula import (
    count_solutions,
    generate_planted,
    instance_to_json,
    load_dimacs,
    save_dimacs,
    save_instance_json,
)
from .landscape import (
    brute_force_amplify,
    stats,
    vertex_sweep,
    write_stats_json,
    write_sweep_csv,
)
from .solvers import (
    BENCH_CSV_HEADER,
    AnnealConfig,
    BenchInstance,
    GradientConfig,
    ObjectiveHandle,
    format_bench_row,
    gradient_ascent,
    run_benchmark_case,
    simulated_annealing,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_DOMAIN = 2
EXIT_BUDGET = 3


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()


def _write_manifest(path: str, command: str, params: dict,
                    inputs: list[str], outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "version": __version__,
        "input_hashes": {p: _sha256(p) for p in inputs},
        "outputs": outputs,
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_seed(seed: int | None) -> int:
    return seed if seed is not None else secrets.randbits(32)


def _resolve_L(args, formula, sidecar: dict | None) -> int:
    if getattr(args, "L", None) is not None:
        return args.L
    if sidecar is not None and sidecar.get("L") is not None:
        return int(sidecar["L"])
    count, _ = count_solutions(formula)
    return count


def _load_instance(path: str):
    formula = load_dimacs(path)
    sidecar = None
    sidecar_path = path + ".json"
    if os.path.exists(sidecar_path):
        with open(sidecar_path, "r", encoding="ascii") as fh:
            sidecar = json.load(fh)
    return formula, sidecar


def cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    formula, planted = generate_planted(
        args.n, args.M, args.k, target_L=args.target_L, seed=seed
    )
    L = None
    if args.n <= 24:
        L, _ = count_solutions(formula)
    save_dimacs(formula, args.out)
    sidecar = instance_to_json(formula, planted=planted, seed=seed, L=L)
    save_instance_json(args.out + ".json", sidecar)
    _write_manifest(
        args.out + ".manifest.json",
        "gen",
        {"n": args.n, "M": args.M, "k": args.k,
         "target_L": args.target_L, "seed": seed, "out": args.out},
        [],
        [args.out, args.out + ".json"],
    )
    print(f"wrote {args.out} (n={args.n}, M={args.M}, k={args.k}, L={L})")
    return EXIT_OK


def cmd_ledger(args) -> int:
    formula, sidecar = _load_instance(args.instance)
    L = _resolve_L(args, formula, sidecar)
    f0 = InitialObjective(args.f0)
    ledger = ledger_for(formula, L, f0, args.ell_max)
    print(ledger.dumps())
    return EXIT_OK


def cmd_landscape(args) -> int:
    formula, sidecar = _load_instance(args.instance)
    L = _resolve_L(args, formula, sidecar)
    f0 = InitialObjective(args.f0)
    oracle = OracleKind(args.oracle)
    ells = [int(e) for e in args.ell.split(",")]
    outputs = []
    stats_list = []
    for ell in ells:
        obj = conditioned(formula, L, ell, oracle, f0)
        sweep = vertex_sweep(obj)
        if args.verify:
            reference = brute_force_amplify(formula, f0, ell)
            scale = max(1.0, float(np.abs(reference.values).max()))
            err = float(np.abs(sweep.values - reference.values).max()) / scale
            if err > 1e-9:
                print(f"verification failed at ell={ell}: rel err {err:.3e}",
                      file=sys.stderr)
                return EXIT_DOMAIN
        out_csv = f"{args.out_prefix}_ell{ell}.csv"
        write_sweep_csv(sweep, out_csv)
        outputs.append(out_csv)
        stats_list.append(stats(sweep))
    stats_path = f"{args.out_prefix}_stats.json"
    write_stats_json(stats_list, stats_path)
    outputs.append(stats_path)
    _write_manifest(
        f"{args.out_prefix}.manifest.json",
        "landscape",
        {"instance": args.instance, "f0": args.f0, "oracle": args.oracle,
         "ell": args.ell, "L": L, "verify": args.verify},
        [args.instance],
        outputs,
    )
    print("\n".join(outputs))
    return EXIT_OK


def _load_solver_config(args, seed: int):
    overrides = {}
    if args.config:
        with open(args.config, "r", encoding="ascii") as fh:
            overrides = json.load(fh)
        if not isinstance(overrides, dict):
            raise AmpliSatError("config file must hold a JSON object")
    overrides["seed"] = seed
    if args.solver == "sa":
        return AnnealConfig(**overrides)
    return GradientConfig(**overrides)


def cmd_solve(args) -> int:
    formula, sidecar = _load_instance(args.instance)
    L = _resolve_L(args, formula, sidecar)
    ell = optimal_iterations(formula.n, L) if args.ell == "auto" else int(args.ell)
    seed = _resolve_seed(args.seed)
    try:
        config = _load_solver_config(args, seed)
    except TypeError as exc:
        raise AmpliSatError(f"bad config field: {exc}") from exc
    obj = conditioned(formula, L, ell,
                      OracleKind(args.oracle), InitialObjective(args.f0))
    handle = ObjectiveHandle(obj, maximize=True)
    if args.solver == "sa":
        report = simulated_annealing(handle, config)
    else:
        report = gradient_ascent(handle, config)
    print(json.dumps({
        "instance": args.instance,
        "ell": ell,
        "solver": args.solver,
        "seed": seed,
        "satisfied": report.satisfied,
        "best_assignment": "".join("1" if b else "0" for b in report.best_assignment),
        "best_value": report.best_value,
        "evaluations": report.evaluations,
        "wall_time": report.wall_time,
    }, indent=2))
    return EXIT_OK if report.satisfied else EXIT_BUDGET


def cmd_bench(args) -> int:
    seed = _resolve_seed(args.seed)
    rng_seeds = [seed + i for i in range(args.count)]
    instances = []
    for i, s in enumerate(rng_seeds):
        formula, _ = generate_planted(args.n, args.M, args.k,
                                      target_L=args.target_L, seed=s)
        L, _ = count_solutions(formula)
        instances.append(BenchInstance(f"inst{i:04d}", formula, L))
    ells = [int(e) for e in args.ell.split(",")]
    config = _load_solver_config(args, seed)
    oracle = OracleKind(args.oracle)
    f0 = InitialObjective(args.f0)
    jobs = args.jobs or int(os.environ.get("AMPLISAT_JOBS", "1"))
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(BENCH_CSV_HEADER + "\n")
        fh.flush()
        if jobs > 1:
            from .solvers import benchmark

            rows = benchmark(instances, args.solver, config, ells,
                             oracle, f0, base_seed=seed, jobs=jobs)
            for row in rows:
                fh.write(format_bench_row(row) + "\n")
        else:
            # sequential path flushes row by row so interrupts leave a
            # valid partial CSV
            for inst in instances:
                for ell in ells:
                    row = run_benchmark_case(inst, ell, oracle, f0,
                                             args.solver, config, seed)
                    fh.write(format_bench_row(row) + "\n")
                    fh.flush()
    _write_manifest(
        args.out + ".manifest.json",
        "bench",
        {"n": args.n, "M": args.M, "k": args.k, "count": args.count,
         "target_L": args.target_L, "ell": args.ell, "solver": args.solver,
         "oracle": args.oracle, "f0": args.f0, "seed": seed,
         "config": args.config, "jobs": jobs},
        [args.config] if args.config else [],
        [args.out],
    )
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amplisat",
        description="Continuous k-SAT relaxation with amplification-style "
                    "objective conditioning",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a planted random k-SAT instance")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--target-L", dest="target_L", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ledger", help="print the expectation ledger as JSON")
    p.add_argument("instance")
    p.add_argument("--f0", choices=[e.value for e in InitialObjective],
                   default=InitialObjective.CLAUSE_COUNT.value)
    p.add_argument("--ell-max", dest="ell_max", type=int, default=10)
    p.add_argument("--L", type=int, default=None)
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("landscape", help="emit vertex sweep CSVs and stats")
    p.add_argument("instance")
    p.add_argument("--f0", choices=[e.value for e in InitialObjective],
                   default=InitialObjective.CLAUSE_COUNT.value)
    p.add_argument("--oracle", choices=[e.value for e in OracleKind],
                   default=OracleKind.PRODUCT.value)
    p.add_argument("--ell", default="0,1,2,3",
                   help="comma-separated iteration counts")
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--verify", action="store_true",
                   help="cross-check against the brute-force vector oracle")
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("solve", help="run a solver on one instance")
    p.add_argument("instance")
    p.add_argument("--solver", choices=["sa", "grad"], default="sa")
    p.add_argument("--ell", default="auto",
                   help="iteration count or 'auto' for the closed-form optimum")
    p.add_argument("--oracle", choices=[e.value for e in OracleKind],
                   default=OracleKind.PRODUCT.value)
    p.add_argument("--f0", choices=[e.value for e in InitialObjective],
                   default=InitialObjective.CLAUSE_COUNT.value)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON solver config file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="benchmark solvers over a planted ensemble")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--target-L", dest="target_L", type=int, default=None)
    p.add_argument("--ell", default="0,-1",
                   help="comma-separated; -1 resolves to the per-instance optimum")
    p.add_argument("--solver", choices=["sa", "grad"], default="sa")
    p.add_argument("--oracle", choices=[e.value for e in OracleKind],
                   default=OracleKind.PRODUCT.value)
    p.add_argument("--f0", choices=[e.value for e in InitialObjective],
                   default=InitialObjective.CLAUSE_COUNT.value)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AmpliSatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
