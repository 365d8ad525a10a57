"""Command-line interface.

Subcommands: validate, poisson, holonomy, delaunay, selftest.  Every command
reads a surface description in the JSON wire format (except selftest), emits
deterministic key/value rows, and signals its outcome through the exit code:

* 0 - success,
* 1 - unreadable input or an invalid surface,
* 2 - a wall angle or degenerate configuration blocks the computation,
* 3 - a numerical failure (collapse, non-termination, residual above tolerance).

Floats are printed with repr-faithful precision (%.17g) so output is
byte-for-byte reproducible for a fixed input, seed, and tolerance set.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import delaunay as delaunay_mod
from . import poisson as poisson_mod
from .errors import (
    CoincidentFixedPoints,
    DegenerateDirection,
    Disconnected,
    DimensionMismatch,
    HypconeError,
    NonManifold,
    NonPositiveLength,
    NotAdmissible,
    NotElliptic,
    NotHyperbolic,
    NotSemisimple,
    OutOfRange,
    TriangleInequality,
    UnflippableConfiguration,
    WallAngle,
)
from .holonomy import develop, holonomy_report
from .selftest import DEFAULT_SEED, run_all
from .surface import build_surface, classify_angles, fmt17

TOL_DEFAULTS = {
    "wall": 1e-6,       # minimum |sin(theta/2)| before the bivector is refused
    "radical": 1e-8,    # cone-angle gradients must annihilate the bivector
    "jacobi": 1e-5,     # normalized Jacobi cyclic sum
    "holonomy": 1e-8,   # trace-law and edge-length recovery errors
    "psi": 1e-10,       # Delaunay edge-invariant threshold
    "lemma": 1e-9,      # randomized pairing-identity suites
    "lemma-log": 1e-6,  # randomized logarithm-expansion suite
}

INPUT_ERRORS = (
    NonManifold,
    Disconnected,
    TriangleInequality,
    NonPositiveLength,
    NotAdmissible,
    OutOfRange,
    DimensionMismatch,
)

BLOCKED_ERRORS = (
    WallAngle,
    DegenerateDirection,
    CoincidentFixedPoints,
    NotElliptic,
    NotHyperbolic,
    NotSemisimple,
    UnflippableConfiguration,
)


class Emitter:
    """Accumulates key/value rows and prints them in the chosen format."""

    def __init__(self, fmt: str):
        self.sep = "=" if fmt == "structured" else ": "
        self.rows = []

    def put(self, key, value):
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = fmt17(value)
        self.rows.append((key, str(value)))

    def flush(self):
        for key, value in self.rows:
            sys.stdout.write(f"{key}{self.sep}{value}\n")


def _parse_tols(pairs) -> dict:
    tols = dict(TOL_DEFAULTS)
    for item in pairs or ():
        key, eq, raw = item.partition("=")
        if not eq or key not in tols:
            raise ValueError(f"unknown tolerance {item!r}; known keys: "
                             + ", ".join(sorted(tols)))
        tols[key] = float(raw)
    return tols


def _load_surface(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return build_surface(json.loads(text))


def cmd_validate(args, out: Emitter, tols) -> int:
    s = _load_surface(args.input)
    data = s.angle_data()
    report = classify_angles(data)
    out.put("valid", True)
    out.put("genus", s.genus)
    out.put("vertices", s.n_vertices)
    out.put("edges", s.n_edges)
    out.put("triangles", len(s.triangles))
    out.put("chi", data.chi)
    out.put("area", s.area())
    for v in range(s.n_vertices):
        out.put(f"theta.{v}", s.cone_angle[v])
    out.put("hyperbolic", report.hyperbolic)
    out.put("flat", report.flat)
    out.put("off_walls", report.off_walls)
    out.put("small", report.small)
    return 0


def cmd_poisson(args, out: Emitter, tols) -> int:
    s = _load_surface(args.input)
    margins = poisson_mod.wall_margins(s)
    for v in range(s.n_vertices):
        out.put(f"wall_margin.{v}", float(margins[v]))
    p = poisson_mod.eta_matrix(s, wall_guard=tols["wall"])
    for i, eid in enumerate(s.edge_ids):
        out.put(f"P.{eid}", " ".join(fmt17(x) for x in p[i]))
    rank = poisson_mod.bivector_rank(p)
    expected = 6 * s.genus - 6 + 2 * s.n_vertices
    out.put("rank", rank)
    out.put("rank_expected", expected)
    grads = poisson_mod.angle_gradients(s)
    residuals = poisson_mod.radical_residuals(p, grads)
    for v in range(s.n_vertices):
        out.put(f"radical.{v}", float(residuals[v]))
    radical_max = float(max(residuals)) if len(residuals) else 0.0
    out.put("radical_max", radical_max)
    jac = poisson_mod.jacobi_residual(s, jobs=args.jobs, wall_guard=tols["wall"])
    out.put("jacobi", jac)
    for key, value in poisson_mod.comparison_note():
        out.put(key, value)
    ok = (rank == expected and radical_max < tols["radical"]
          and jac < tols["jacobi"])
    return 0 if ok else 3


def cmd_holonomy(args, out: Emitter, tols) -> int:
    s = _load_surface(args.input)
    atlas = develop(s)
    out.put("base", atlas.base)
    for line in atlas.dump().splitlines():
        key, _, rest = line.partition(": ")
        out.put(key.replace(" ", "."), rest)
    vrows, erows, max_error = holonomy_report(atlas)
    for v, trace, err in vrows:
        out.put(f"trace.{v}", trace)
        out.put(f"trace_error.{v}", err)
    for eid, recovered, err in erows:
        out.put(f"alength.{eid}", recovered)
        out.put(f"alength_error.{eid}", err)
    out.put("max_error", max_error)
    return 0 if max_error < tols["holonomy"] else 3


def cmd_delaunay(args, out: Emitter, tols) -> int:
    s = _load_surface(args.input)
    result, moves = delaunay_mod.make_delaunay(s, tol=tols["psi"])
    out.put("flips", len(moves))
    for k, line in enumerate(delaunay_mod.move_log_lines(moves)):
        out.put(f"move.{k}", line)
    psi = delaunay_mod.edge_invariants(result)
    for eid in result.edge_ids:
        out.put(f"psi.{eid}", psi[eid])
    psi_min = min(psi.values())
    out.put("psi_min", psi_min)
    for eid in result.edge_ids:
        out.put(f"length.{eid}", result.lengths[eid])
    return 0 if psi_min >= -tols["psi"] else 3


def cmd_selftest(args, out: Emitter, tols) -> int:
    out.put("seed", args.seed)
    all_ok = True
    for name, count, residual, default_tol in run_all(seed=args.seed):
        tol = tols["lemma-log"] if name == "log-expansion" else tols["lemma"]
        ok = residual < tol
        all_ok = all_ok and ok
        out.put(f"lemma.{name}.count", count)
        out.put(f"lemma.{name}.residual", residual)
        out.put(f"lemma.{name}.tolerance", tol)
        out.put(f"lemma.{name}.pass", ok)
    out.put("pass", all_ok)
    return 0 if all_ok else 3


COMMANDS = {
    "validate": (cmd_validate, True),
    "poisson": (cmd_poisson, True),
    "holonomy": (cmd_holonomy, True),
    "delaunay": (cmd_delaunay, True),
    "selftest": (cmd_selftest, False),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypcone",
        description="Hyperbolic cone surfaces: validation, holonomy, "
                    "Poisson bivector, Delaunay retriangulation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, needs_input) in COMMANDS.items():
        p = sub.add_parser(name)
        if needs_input:
            p.add_argument("--input", required=True,
                           help="path to a surface description (JSON)")
        p.add_argument("--format", choices=("text", "structured"),
                       default="text")
        p.add_argument("--tol", action="append", metavar="KEY=VALUE",
                       help="override a named tolerance; repeatable")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--jobs", type=int, default=None,
                       help="worker threads for derivative evaluations")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tols = _parse_tols(args.tol)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    out = Emitter(args.format)
    fn, _ = COMMANDS[args.command]
    try:
        code = fn(args, out, tols)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(f"error[{type(exc).__name__}]: {exc}\n")
        return 1
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"error[{type(exc).__name__}]: {exc}\n")
        return 1
    except BLOCKED_ERRORS as exc:
        sys.stderr.write(f"error[{type(exc).__name__}]: {exc}\n")
        return 2
    except HypconeError as exc:
        sys.stderr.write(f"error[{type(exc).__name__}]: {exc}\n")
        return 3
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
