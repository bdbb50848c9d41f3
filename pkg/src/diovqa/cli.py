"""Command-line entry point: every pipeline behind one executable.

JSON in, JSON/CSV out, nothing binary. Identical config and seed produce
byte-identical artifacts (floats are written with 17 significant digits).
Exit codes: 0 success, 2 validation error, 3 budget or cap exhaustion,
4 an Undecided classification under --strict. Logging level comes from the
DIOVQA_LOG environment variable (error, info, debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import _jsonio, encoder, jsr, matcore, sospoly, vqasim
from .errors import (
    BudgetExceeded,
    BudgetExhausted,
    CapExceeded,
    DiovqaError,
    EnumerationCapExceeded,
)

log = logging.getLogger("diovqa")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_UNDECIDED = 4


def _configure_logging():
    level = os.environ.get("DIOVQA_LOG", "error").lower()
    mapping = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=mapping.get(level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote %s", args.output)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj):
    _emit(args, _jsonio.dumps(obj, indent=2))


def _parse_floats(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError as exc:
        raise ValueError(f"{name}: expected comma-separated floats, got {text!r}") from exc


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    inst = vqasim.VqaInstance.from_json(_read_json(args.input))
    phi = _parse_floats(args.phi, "--phi")
    if phi.size != inst.num_layers:
        raise ValueError(f"--phi supplies {phi.size} values, instance has {inst.num_layers} layers")
    if args.dry_run:
        print(f"dry-run: would evaluate objectives at phi={list(phi)} on an n={inst.dim}, L={inst.num_layers} instance")
        return EXIT_OK
    _emit_json(args, {
        "phi": [float(v) for v in phi],
        "objective": vqasim.vqa_objective(inst, phi),
        "norm_objective": vqasim.vqa_norm_objective(inst, phi),
    })
    return EXIT_OK


def _cmd_decide(args) -> int:
    inst = vqasim.VqaInstance.from_json(_read_json(args.input))
    if inst.digit_set is None:
        raise ValueError("instance carries no digit set; `decide` needs one")
    size = len(inst.digit_set) ** inst.num_layers
    if args.dry_run:
        print(f"dry-run: would enumerate |D|^L = {size} parameter points against threshold {args.threshold}")
        return EXIT_OK
    outcome = vqasim.digitized_decision(inst, args.threshold, enumeration_cap=args.enumeration_cap)
    _emit_json(args, {
        "satisfiable": outcome.satisfiable,
        "witness": list(outcome.witness) if outcome.witness is not None else None,
        "value": outcome.value,
        "points_checked": outcome.points_checked,
        "threshold": float(args.threshold),
    })
    return EXIT_OK


def _cmd_qaoa_landscape(args) -> int:
    inst = vqasim.BkInstance.from_json(_read_json(args.input))
    gamma_max = args.gamma_max if args.gamma_max is not None else np.pi / inst.tau
    betas = np.linspace(args.beta_min, args.beta_max, args.beta_steps)
    gammas = np.linspace(args.gamma_min, gamma_max, args.gamma_steps)
    if args.dry_run:
        print(f"dry-run: would tabulate a {args.beta_steps}x{args.gamma_steps} landscape for d={inst.d}, tau={inst.tau}")
        return EXIT_OK
    table = vqasim.bk_landscape(inst, betas, gammas, deviation_atol=args.tolerance)
    _emit(args, table.to_csv())
    return EXIT_OK


def _load_target(path: str) -> sospoly.SosPolynomial:
    return sospoly.SosPolynomial.from_json(_read_json(path))


def _cmd_encode(args) -> int:
    target = _load_target(args.input)
    if args.dry_run:
        count = sospoly.count_monomials(args.L, 2 * (args.n - 1))
        print(f"dry-run: would build {count} matching equations ({2 * count} real) for L={args.L}, n={args.n}")
        return EXIT_OK
    system = encoder.build_system(target, args.L, args.n)
    _emit_json(args, system.to_json())
    return EXIT_OK


def _solution_to_json(sol: encoder.Solution, system: encoder.EncodingSystem) -> dict:
    obj = {
        "num_layers": system.num_layers,
        "dim": system.dim,
        "status": sol.status,
        "residual": sol.residual,
        "gradient_norm": sol.gradient_norm,
        "start_index": sol.start_index,
        "iterations": sol.iterations,
        "observable_coords": [float(v) for v in sol.observable.coords],
        "state_coords": [float(v) for v in sol.state.coords],
        "eigenvalues": [[float(v) for v in row] for row in sol.eigenvalues],
        "phi_anchor": [float(v) for v in sol.phi_anchor],
    }
    if sol.kappas is not None:
        obj["kappas_re"] = [float(v) for v in sol.kappas.real]
        obj["kappas_im"] = [float(v) for v in sol.kappas.imag]
    return obj


def _solution_from_json(obj) -> encoder.Solution:
    kappas = None
    if "kappas_re" in obj:
        kappas = np.array(obj["kappas_re"]) + 1j * np.array(obj["kappas_im"])
    return encoder.Solution(
        status=obj["status"],
        observable=encoder.ObservableParams(int(obj["dim"]), obj["observable_coords"]),
        state=encoder.StateParams(int(obj["dim"]), obj["state_coords"]),
        eigenvalues=np.asarray(obj["eigenvalues"], dtype=float),
        residual=float(obj["residual"]),
        gradient_norm=float(obj["gradient_norm"]),
        start_index=int(obj["start_index"]),
        iterations=int(obj["iterations"]),
        phi_anchor=np.asarray(obj["phi_anchor"], dtype=float),
        kappas=kappas,
    )


def _cmd_solve(args) -> int:
    system = encoder.EncodingSystem.from_json(_read_json(args.input))
    anchor = _parse_floats(args.anchor, "--anchor") if args.anchor else None
    config = encoder.SolveConfig(
        multistarts=args.multistarts,
        max_iterations=args.max_iterations,
        tolerance=args.tolerance,
        seed=args.seed,
        free_kappa=args.free_kappa,
        threads=args.threads,
    )
    if args.dry_run:
        mode = "free-kappa" if args.free_kappa else "anchored"
        print(
            f"dry-run: would run {config.multistarts} starts of {mode} descent on "
            f"{system.real_equation_count} real equations in {system.unknown_count(args.free_kappa)} unknowns"
        )
        return EXIT_OK
    sol = encoder.solve_system(system, config, phi_anchor=anchor)
    log.info("solver finished: %s with residual %.3e", sol.status, sol.residual)
    _emit_json(args, _solution_to_json(sol, system))
    return EXIT_OK


def _cmd_verify(args) -> int:
    sol = _solution_from_json(_read_json(args.input))
    target = _load_target(args.target)
    grid = encoder.integer_grid(sol.eigenvalues.shape[0], args.grid_lo, args.grid_hi)
    if args.dry_run:
        print(f"dry-run: would compare circuit and target values on {len(grid)} grid points")
        return EXIT_OK
    report = encoder.verify_encoding(sol, target, grid, deviation_atol=args.tolerance)
    _emit_json(args, {
        "passed": report.passed,
        "max_deviation": report.max_deviation,
        "rows": [
            {"phi": list(phi), "circuit": circuit, "target": tgt}
            for phi, circuit, tgt in report.rows
        ],
    })
    return EXIT_OK


def _cmd_dof(args) -> int:
    report = encoder.dof_report(args.L, args.n)
    if args.dry_run:
        print(f"dry-run: would print parameter counts for L={args.L}, n={args.n}")
        return EXIT_OK
    lines = [
        f"psi0 (pure-state chart): {report.psi0}",
        f"observable: {report.observable}",
        f"generator (single, diagonal): {report.generator}",
        f"family ({args.L} generators): {report.family}",
    ]
    print("\n".join(lines))
    if args.output:
        _emit_json(args, report.as_dict())
    return EXIT_OK


def _cmd_jsr(args) -> int:
    vocab = jsr.MatrixVocabulary.from_json(_read_json(args.input))
    if args.block_reduce:
        vocab = jsr.block_reduce(vocab)
    if args.dry_run:
        print(
            f"dry-run: would explore words up to depth {args.depth} over "
            f"{vocab.size} matrices of dimension {vocab.dim}"
        )
        return EXIT_OK
    bounds = jsr.jsr_bounds(vocab, args.depth, prune_threshold=args.prune_threshold, product_cap=args.product_cap)
    report = jsr.bounds_to_json(bounds, margin=args.margin)
    _emit_json(args, report)
    if args.strict and report["classification"] == jsr.UNDECIDED:
        log.error("classification is undecided and --strict was requested")
        return EXIT_UNDECIDED
    return EXIT_OK


def _cmd_ude_eval(args) -> int:
    obj = _read_json(args.input)
    cap = obj.get("exponent_cap")
    instance = sospoly.ude_instance(obj["u"], obj["x"], obj["y"], obj["z"], exponent_cap=cap)
    point = [int(v) for v in obj["point"]]
    if len(point) != len(instance.variables):
        raise ValueError(f"point must supply {len(instance.variables)} integers")
    if args.dry_run:
        print(f"dry-run: would evaluate 18 clauses at the supplied point with a {args.bit_budget}-bit budget")
        return EXIT_OK
    clause_values = [str(sospoly.evaluate(q, point, args.bit_budget)) for q in instance.body.summands]
    total = sospoly.evaluate_sos(instance.body, point, args.bit_budget)
    _emit_json(args, {
        "value": str(total),
        "clauses": clause_values,
        "parameters": instance.parameters,
    })
    return EXIT_OK


def _cmd_export_ideal(args) -> int:
    system = encoder.EncodingSystem.from_json(_read_json(args.input))
    if args.dry_run:
        print(f"dry-run: would export {system.equation_count} polynomials in {len(encoder.ideal_variable_names(system))} unknowns")
        return EXIT_OK
    _emit(args, encoder.export_ideal(system))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, output=True):
    if output:
        p.add_argument("--output", help="output path (stdout when omitted)")
    p.add_argument("--dry-run", action="store_true", help="validate inputs and print the plan without computing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diovqa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="evaluate the objective of a layered instance at one parameter point")
    p.add_argument("--input", required=True, help="instance JSON")
    p.add_argument("--phi", required=True, help="comma-separated layer parameters")
    _add_common(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("decide", help="exhaustively decide a digitized threshold question")
    p.add_argument("--input", required=True, help="instance JSON (must carry a digit set)")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--enumeration-cap", type=int, default=vqasim.DEFAULT_ENUMERATION_CAP)
    _add_common(p)
    p.set_defaults(handler=_cmd_decide)

    p = sub.add_parser("qaoa-landscape", help="tabulate closed-form vs direct energies on a grid")
    p.add_argument("--input", required=True, help="mixer/cost family JSON (energies, adjacency, tau)")
    p.add_argument("--beta-min", type=float, default=0.0)
    p.add_argument("--beta-max", type=float, default=2 * np.pi)
    p.add_argument("--beta-steps", type=int, default=50)
    p.add_argument("--gamma-min", type=float, default=0.0)
    p.add_argument("--gamma-max", type=float, default=None, help="defaults to pi/tau")
    p.add_argument("--gamma-steps", type=int, default=50)
    p.add_argument("--tolerance", type=float, default=1e-8, help="closed-form vs direct deviation bound")
    _add_common(p)
    p.set_defaults(handler=_cmd_qaoa_landscape)

    p = sub.add_parser("encode", help="build the coefficient-matching system for a target polynomial")
    p.add_argument("--input", required=True, help="target sum-of-squares JSON")
    p.add_argument("--L", type=int, required=True, help="layer count")
    p.add_argument("--n", type=int, required=True, help="Hilbert dimension")
    _add_common(p)
    p.set_defaults(handler=_cmd_encode)

    p = sub.add_parser("solve", help="multistart descent on a matching system")
    p.add_argument("--input", required=True, help="system JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--multistarts", type=int, default=64)
    p.add_argument("--max-iterations", type=int, default=10_000)
    p.add_argument("--anchor", help="comma-separated anchor parameters (default: all ones)")
    p.add_argument("--free-kappa", action="store_true", help="treat expansion coefficients as unknowns")
    _add_common(p)
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("verify", help="check a solution pointwise against its target on an integer grid")
    p.add_argument("--input", required=True, help="solution JSON")
    p.add_argument("--target", required=True, help="target sum-of-squares JSON")
    p.add_argument("--grid-lo", type=int, default=-2)
    p.add_argument("--grid-hi", type=int, default=2)
    p.add_argument("--tolerance", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("dof", help="print real-parameter counts of the encoding unknowns")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_dof)

    p = sub.add_parser("jsr", help="sandwich the joint spectral radius of a matrix vocabulary")
    p.add_argument("--input", required=True, help="vocabulary JSON")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--prune-threshold", type=float, default=jsr.DEFAULT_PRUNE_THRESHOLD)
    p.add_argument("--product-cap", type=int, default=jsr.DEFAULT_PRODUCT_CAP)
    p.add_argument("--margin", type=float, default=jsr.DEFAULT_MARGIN)
    p.add_argument("--block-reduce", action="store_true", help="reduce to the two-matrix embedding first")
    p.add_argument("--strict", action="store_true", help="exit 4 when the classification is undecided")
    _add_common(p)
    p.set_defaults(handler=_cmd_jsr)

    p = sub.add_parser("ude-eval", help="evaluate the 28-variable sum-of-squares equation at an integer point")
    p.add_argument("--input", required=True, help="JSON with u, x, y, z, point[28] and optional exponent_cap")
    p.add_argument("--bit-budget", type=int, default=sospoly.DEFAULT_BIT_BUDGET)
    _add_common(p)
    p.set_defaults(handler=_cmd_ude_eval)

    p = sub.add_parser("export-ideal", help="write the matching equations as plain-text polynomials")
    p.add_argument("--input", required=True, help="system JSON")
    _add_common(p)
    p.set_defaults(handler=_cmd_export_ideal)

    return parser


def run(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (BudgetExceeded, EnumerationCapExceeded, CapExceeded, BudgetExhausted) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DiovqaError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main(argv=None):
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
