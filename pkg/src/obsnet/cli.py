"""Command-line interface.

Exit codes: 0 success, 2 infeasible input, 3 validation failure,
4 I/O or format error. Nonzero exits write a JSON diagnostic to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable

from .errors import (
    EnumerationBoundError,
    GraphFormatError,
    InconsistentTraceError,
    InfeasibleError,
    ObsNetError,
    RetriesExhaustedError,
    UnobservableError,
)
from .field import (
    DEFAULT_PRIME,
    DEFAULT_RETRIES,
    FieldSystem,
    PrimeField,
    instantiate_deterministic,
    instantiate_random,
    recover_initial_state,
    simulate,
    trace_from_csv,
    trace_to_csv,
)
from .flows import deficient_sensor, max_robustness
from .generators import CostModel, random_geometric
from .graph import parse_physical_graph
from .pipeline import DesignSolution, design
from .robustness import failure_curve
from .serialize import serialize
from .structural import extract_cactus_certificate, robust_structural_observability

OK, INFEASIBLE, INVALID, IO_ERROR = 0, 2, 3, 4


class _Exit(Exception):
    def __init__(self, code: int, kind: str, message: str, **extra: Any):
        super().__init__(message)
        self.code = code
        self.body = {"error": kind, "message": message, **{k: v for k, v in extra.items() if v is not None}}


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(IO_ERROR, "io", f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _Exit(IO_ERROR, "io", f"cannot write {path}: {exc.strerror}") from exc


def _load_graph(path: str):
    return parse_physical_graph(_read(path))


def _load_design(path: str) -> DesignSolution:
    return DesignSolution.from_json(_read(path))


def _load_system(path: str) -> FieldSystem:
    return FieldSystem.from_json(_read(path))


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError as exc:
        raise _Exit(IO_ERROR, "format", f"expected comma-separated integers, got {text!r}") from exc


def cmd_design(args) -> int:
    g = _load_graph(args.input)
    try:
        sol = design(g, args.k, method=args.method)
    except InfeasibleError as exc:
        weak = deficient_sensor(g, args.k)
        sensor = exc.sensor or (g.name(weak) if weak is not None else None)
        raise _Exit(INFEASIBLE, "infeasible", str(exc), sensor=sensor, node=exc.node) from exc
    _write(args.output, serialize(sol, args.format))
    print(sol.summary())
    return OK


def cmd_verify(args) -> int:
    sol = _load_design(args.design)
    try:
        result = robust_structural_observability(sol.structure, args.k)
    except EnumerationBoundError as exc:
        raise _Exit(INFEASIBLE, "enumeration-bound", str(exc)) from exc
    names = sol.structure.sensor_names
    if result is True:
        cert = extract_cactus_certificate(sol.structure)
        print(json.dumps({"robust": True, "k": args.k, "certificate": cert.to_dict(names)}))
        return OK
    failing = [names[j] for j in result]
    print("counterexample {" + ", ".join(failing) + "}")
    raise _Exit(INVALID, "not-robust", "deletion breaks observability", counterexample=failing)


def cmd_max_k(args) -> int:
    g = _load_graph(args.input)
    k = max_robustness(g)
    if k is None:
        print("infeasible")
        raise _Exit(INFEASIBLE, "infeasible", "no robust design exists for any k")
    print(k)
    return OK


def cmd_instantiate(args) -> int:
    sol = _load_design(args.design)
    field = PrimeField(args.prime)
    try:
        if args.deterministic:
            sys_ = instantiate_deterministic(sol.structure, field)
        else:
            if args.seed is None:
                raise _Exit(IO_ERROR, "usage", "--seed is required for random instantiation")
            sys_, _ = instantiate_random(sol.structure, field, args.seed, args.max_retries)
    except RetriesExhaustedError as exc:
        raise _Exit(INVALID, "retries-exhausted", str(exc), trials=exc.trials) from exc
    except UnobservableError as exc:
        raise _Exit(INVALID, "unobservable", str(exc)) from exc
    _write(args.output, sys_.to_json())
    return OK


def cmd_simulate(args) -> int:
    sys_ = _load_system(args.system)
    trace = simulate(sys_, _ints(args.x0), args.steps)
    _write(args.output, trace_to_csv(trace, sys_.m))
    return OK


def cmd_recover(args) -> int:
    sys_ = _load_system(args.system)
    trace = trace_from_csv(_read(args.trace))
    try:
        x0 = recover_initial_state(sys_, trace)
    except UnobservableError as exc:
        print("unobservable")
        raise _Exit(INFEASIBLE, "unobservable", str(exc)) from exc
    except InconsistentTraceError as exc:
        raise _Exit(INVALID, "inconsistent-trace", "inconsistent trace") from exc
    print(",".join(map(str, x0)))
    return OK


def cmd_robustness(args) -> int:
    try:
        curve = failure_curve(
            args.sensors, args.backbone, args.radius, args.cost, args.k, args.graphs, args.trials, args.seed
        )
    except InfeasibleError as exc:
        raise _Exit(INFEASIBLE, "infeasible", str(exc)) from exc
    _write(args.output, curve.to_csv())
    return OK


def cmd_generate(args) -> int:
    g = random_geometric(args.sensors, args.backbone, args.radius, args.cost, args.seed)
    _write(args.output, serialize(g, args.format))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obsnet", description="Robust structurally observable sensor network design.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("design", cmd_design, "design the cheapest k-robust structure")
    sp.add_argument("--input", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--method", choices=["auto", "matroid", "lp"], default="auto")
    sp.add_argument("--format", choices=["json", "dot"], default="json")

    sp = add("verify", cmd_verify, "check observability under every deletion of at most k sensors")
    sp.add_argument("--design", required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = add("max-k", cmd_max_k, "largest achievable robustness")
    sp.add_argument("--input", required=True)

    sp = add("instantiate", cmd_instantiate, "pick numeric (A, C) over a prime field")
    sp.add_argument("--design", required=True)
    sp.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--max-retries", type=int, default=DEFAULT_RETRIES)
    sp.add_argument("--deterministic", action="store_true")
    sp.add_argument("--output", default=None)

    sp = add("simulate", cmd_simulate, "output trace from an initial state")
    sp.add_argument("--system", required=True)
    sp.add_argument("--x0", required=True, help="comma-separated initial state")
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--output", default=None)

    sp = add("recover", cmd_recover, "reconstruct the initial state from a trace")
    sp.add_argument("--system", required=True)
    sp.add_argument("--trace", required=True)

    sp = add("robustness", cmd_robustness, "Monte Carlo failure curve")
    sp.add_argument("--sensors", type=int, default=50)
    sp.add_argument("--backbone", type=int, default=3)
    sp.add_argument("--radius", type=float, default=math.sqrt(2))
    sp.add_argument("--cost", choices=[c.value for c in CostModel], default=CostModel.DISTANCE_SQUARED.value)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--graphs", type=int, default=100)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--output", default=None)

    sp = add("generate", cmd_generate, "random geometric instance")
    sp.add_argument("--sensors", type=int, required=True)
    sp.add_argument("--backbone", type=int, required=True)
    sp.add_argument("--radius", type=float, default=math.sqrt(2))
    sp.add_argument("--cost", choices=[c.value for c in CostModel], default=CostModel.DISTANCE_SQUARED.value)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--format", choices=["json", "dot"], default="json")
    sp.add_argument("--output", default=None)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return IO_ERROR if exc.code else OK
    try:
        return args.func(args)
    except _Exit as exc:
        print(json.dumps(exc.body), file=sys.stderr)
        return exc.code
    except GraphFormatError as exc:
        print(json.dumps({"error": "format", "message": str(exc)}), file=sys.stderr)
        return IO_ERROR
    except InfeasibleError as exc:
        body = {"error": "infeasible", "message": str(exc)}
        if exc.sensor:
            body["sensor"] = exc.sensor
        print(json.dumps(body), file=sys.stderr)
        return INFEASIBLE
    except (ObsNetError, ValueError) as exc:
        print(json.dumps({"error": "invalid", "message": str(exc)}), file=sys.stderr)
        return IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
