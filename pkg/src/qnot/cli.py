"""Command line front end.

Subcommands::

    qnot check      --input set.json [--gamma ... [--phases ...]]
    qnot synthesize --input set.json [--gamma ... [--phases ...]] [--output m.json]
    qnot simulate   --input set.json --machine m.json [--shots N] [--seed S]
    qnot gamma-max  --input set.json
    qnot oracle     --input set.json [--policy equal|coordinate] [--phases ...]

Exit codes: 0 success, 2 malformed input, 3 linearly dependent set,
4 simulation contract violation, 5 closed form vs oracle disagreement,
6 degenerate determinant.  The environment variable ``QNOT_TOL``
overrides the default PSD tolerance of 1e-9.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import serialize
from .errors import (
    DegenerateDeterminant,
    LinearlyDependent,
    LinearlyDependentPair,
    QnotError,
    ZeroOverlap,
)
from .feasibility import (
    ProbeSpec,
    check_exact_unitary,
    check_exact_with_probe,
    check_probabilistic,
)
from .optimizer import (
    GammaPolicy,
    TripleBoundInput,
    gamma_max_triple,
    grid_oracle_triple,
    search_gamma,
    standard_probe,
)
from .simulator import verify_machine
from .states import gram
from .synthesis import synthesize, synthesize_with

DEFAULT_PSD_TOL = 1e-9
GAMMA_MAX_AGREEMENT = 1e-5


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip() != ""])
    except ValueError:
        raise serialize.SchemaError(f"cannot parse float list {text!r}") from None


def _load_set(path: str):
    try:
        doc = serialize.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise serialize.SchemaError(f"cannot read {path}: {exc}") from None
    return serialize.state_set_from_dict(doc)


def _load_machine(path: str):
    try:
        doc = serialize.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise serialize.SchemaError(f"cannot read {path}: {exc}") from None
    return serialize.machine_from_dict(doc)


def _emit(doc: dict, args, text_lines=None) -> None:
    if args.format == "text" and text_lines is not None:
        payload = "\n".join(text_lines) + "\n"
    else:
        payload = json.dumps(doc, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _probe_from_args(args, gram_matrix):
    if args.phases:
        return ProbeSpec.phase_vector(_parse_floats(args.phases))
    return standard_probe(gram_matrix)


def _gram_text(gm) -> list[str]:
    lines = ["overlaps (magnitude / phase):"]
    n = gm.n
    for i in range(n):
        row = "  ".join(f"{gm.magnitudes[i, j]:.6f}/{gm.phases[i, j]:+.6f}"
                        for j in range(n))
        lines.append("  " + row)
    return lines


def cmd_check(args, tol: float) -> int:
    state_set = _load_set(args.input)
    gm = gram(state_set)
    doc = {}
    v1 = check_exact_unitary(state_set)
    doc["exact_unitary"] = serialize.verdict_to_dict(v1)
    try:
        v2 = check_exact_with_probe(state_set)
        doc["exact_with_probe"] = serialize.verdict_to_dict(v2)
    except ZeroOverlap as exc:
        v2 = None
        doc["exact_with_probe"] = {"applicable": False,
                                   "reason": str(exc)}
    if args.gamma:
        probe = _probe_from_args(args, gm)
        v3 = check_probabilistic(state_set, _parse_floats(args.gamma), probe,
                                 tol)
        doc["probabilistic"] = serialize.verdict_to_dict(v3)

    lines = _gram_text(gm)
    lines.append(f"exact via plain unitary: "
                 f"{'feasible' if v1.feasible else 'infeasible'}")
    if v2 is None:
        lines.append("exact via unitary + probe: not applicable "
                     "(zero overlap)")
    else:
        lines.append(f"exact via unitary + probe: "
                     f"{'feasible' if v2.feasible else 'infeasible'}")
        if v2.feasible:
            ph = ", ".join(f"{p:.6f}" for p in v2.witness.phases)
            lines.append(f"  witness probe phases: [{ph}]")
    if "probabilistic" in doc:
        lines.append(f"probabilistic at requested efficiencies: "
                     f"{'feasible' if doc['probabilistic']['feasible'] else 'infeasible'}")
    _emit(doc, args, lines)
    return 0


def cmd_synthesize(args, tol: float) -> int:
    state_set = _load_set(args.input)
    if args.gamma:
        gm = gram(state_set)
        probe = _probe_from_args(args, gm)
        machine = synthesize_with(state_set, _parse_floats(args.gamma), probe)
        doc = serialize.machine_to_dict(machine)
        lines = [f"machine on {machine.system_dim}x{machine.probe_dim} "
                 f"(system x probe), requested efficiencies honored"]
    else:
        machine, report = synthesize(state_set)
        doc = serialize.machine_to_dict(machine)
        doc["report"] = {
            "epsilon": report.epsilon,
            "c": report.c,
            "d_max": report.d_max,
            "residual": report.residual,
            "path": report.path,
        }
        lines = [f"machine on {machine.system_dim}x{machine.probe_dim} "
                 f"(system x probe), path={report.path}, "
                 f"gamma={report.epsilon:.6f}"]
    _emit(doc, args, lines)
    return 0


def cmd_simulate(args, tol: float) -> int:
    if not args.machine:
        raise serialize.SchemaError("simulate needs --machine")
    state_set = _load_set(args.input)
    machine = _load_machine(args.machine)
    report = verify_machine(machine, state_set, shots=args.shots,
                            seed=args.seed)
    doc = serialize.report_to_dict(report)
    lines = [f"unitarity error: {report.unitary_error:.3e}"]
    for rec in report.records:
        lines.append(
            f"state {rec.index}: p={rec.success_prob:.8f} "
            f"fidelity={rec.fidelity:.10f} {'ok' if rec.ok else 'FLAGGED'}")
    lines.append("all ok" if report.all_ok else "contract violations found")
    _emit(doc, args, lines)
    return 0 if report.all_ok else 4


def cmd_gamma_max(args, tol: float) -> int:
    state_set = _load_set(args.input)
    if len(state_set) != 3:
        raise serialize.SchemaError("gamma-max needs exactly three states")
    gm = gram(state_set)
    inp = TripleBoundInput.from_gram(gm)
    closed = gamma_max_triple(inp, tol)
    oracle = grid_oracle_triple(gm, inp.probe(), tol=tol)
    diff = abs(closed - oracle)
    probe_phases = [0.0, 2.0 * inp.theta12, 2.0 * inp.theta13]
    m = gm.matrix - oracle * (np.conj(gm.matrix)
                              * inp.probe().gram_matrix())
    doc = {
        "gamma_max": closed,
        "method": "closed_form",
        "probe_phases": probe_phases,
        "lambda_min_at_boundary": float(np.linalg.eigvalsh(m).min()),
        "oracle_gamma": oracle,
        "difference": diff,
        "agreement": diff <= GAMMA_MAX_AGREEMENT,
    }
    lines = [f"closed form : {closed:.10f}",
             f"psd oracle  : {oracle:.10f}",
             f"difference  : {diff:.3e}"]
    _emit(doc, args, lines)
    return 0 if diff <= GAMMA_MAX_AGREEMENT else 5


def cmd_oracle(args, tol: float) -> int:
    state_set = _load_set(args.input)
    gm = gram(state_set)
    policy = (GammaPolicy.COORDINATE if args.policy == "coordinate"
              else GammaPolicy.EQUAL)
    probe = _probe_from_args(args, gm)
    result = search_gamma(state_set, policy, probe, tol)
    doc = {
        "gammas": [float(g) for g in result.gammas],
        "mean_gamma": result.mean_gamma,
        "method": "bisection" if policy is GammaPolicy.EQUAL else "coordinate",
        "probe_phases": [float(p) for p in result.probe.phases],
        "lambda_min_at_boundary": result.boundary_lambda_min,
        "iterations": result.iterations,
    }
    if policy is GammaPolicy.EQUAL:
        doc["gamma_max"] = float(result.gammas[0])
    lines = [f"gammas: {np.array2string(result.gammas, precision=8)}",
             f"mean  : {result.mean_gamma:.8f}"]
    _emit(doc, args, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnot",
        description="Feasibility, synthesis, and simulation of exact and "
                    "probabilistic spin-flip / conjugation machines.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--input", required=True, help="state-set JSON file")
        p.add_argument("--gamma", help="comma-separated efficiencies")
        p.add_argument("--phases",
                       help="comma-separated probe phases (radians); "
                            "defaults to doubled Gram phases")
        p.add_argument("--shots", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--output", help="write the result document here")
        p.add_argument("--format", choices=("json", "text"), default="json")

    p_check = sub.add_parser("check", help="run the feasibility checks")
    add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_synth = sub.add_parser("synthesize", help="build a machine")
    add_common(p_synth)
    p_synth.set_defaults(func=cmd_synthesize)

    p_sim = sub.add_parser("simulate", help="verify a machine on a state set")
    add_common(p_sim)
    p_sim.add_argument("--machine", help="machine JSON file")
    p_sim.set_defaults(func=cmd_simulate)

    p_gm = sub.add_parser("gamma-max",
                          help="triple efficiency bound, closed form vs oracle")
    add_common(p_gm)
    p_gm.set_defaults(func=cmd_gamma_max)

    p_or = sub.add_parser("oracle", help="search feasible efficiencies")
    add_common(p_or)
    p_or.add_argument("--policy", choices=("equal", "coordinate"),
                      default="equal")
    p_or.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = float(os.environ.get("QNOT_TOL", DEFAULT_PSD_TOL))
    except ValueError:
        print("QNOT_TOL is not a float", file=sys.stderr)
        return 2
    try:
        return args.func(args, tol)
    except DegenerateDeterminant as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 6
    except (LinearlyDependent, LinearlyDependentPair) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (QnotError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
