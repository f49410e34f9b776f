"""Command-line front end: ``treesquare {colour,verify,bounds,generate}``.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tree as treemod
from .errors import (
    InvalidParams,
    MissingColour,
    ParseError,
    SpanBoundViolated,
    TooLarge,
    TreeError,
)
from .product import (
    DEFAULT_MATERIALIZE_CAP,
    ProductColouring,
    ProductInstance,
    bounds,
    colour_product,
    mixed_radix_encode,
    total_span_bound,
    wrap,
)
from .verify import (
    DEFAULT_EXACT_CAP,
    DEFAULT_GRAPH_CAP,
    build_product_graph,
    check_proper,
    check_spans,
    chi_exact,
    clique_certificate,
    is_clique,
    square,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

PASS, FAIL = "pass", "fail"


class InvariantBreach(Exception):
    pass


@dataclass
class RunReport:
    """Ordered report fields plus per-phase timings (only shown with --timings)."""

    fields: list[tuple[str, str]] = field(default_factory=list)
    timings: list[tuple[str, float]] = field(default_factory=list)
    warning: bool = False

    def add(self, key: str, value) -> None:
        self.fields.append((key, _fmt(value)))

    def verdict(self, key: str, ok: bool | None, reason: str = "") -> None:
        if ok is None:
            self.add(key, f"skipped ({reason})")
        else:
            self.add(key, PASS if ok else FAIL if not reason else f"fail ({reason})")

    def failed(self) -> bool:
        return any(v.startswith(FAIL) for _, v in self.fields)

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings.append((name, (time.perf_counter() - t0) * 1000.0))

    def render(self, machine: bool, timings: bool) -> str:
        rows = list(self.fields)
        if self.warning:
            rows.append(("warning", "1"))
        if timings:
            rows += [(f"time_ms.{k}", f"{v:.1f}") for k, v in self.timings]
        if machine:
            return "".join(f"{k}={v.replace(' ', '_')}\n" for k, v in rows)
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k.replace('_', ' '):<{width}}  {v}\n" for k, v in rows)


def _fmt(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, (list, tuple)):
        return ",".join(str(x) for x in value)
    return str(value)


def load_instance(path: str) -> ProductInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return ProductInstance(tuple(treemod.parse_trees(text)))


def _describe(report: RunReport, inst: ProductInstance) -> None:
    b = bounds(inst)
    report.add("d", inst.d)
    report.add("dims", inst.dims)
    report.add("degrees", inst.degrees)
    report.add("lower", b.lower)
    report.add("upper", b.upper)
    report.add("jmv", b.jmv)


def format_colouring(pc: ProductColouring) -> str:
    dims = pc.instance.dims
    total = pc.instance.total
    grids = np.indices(dims[::-1]).reshape(len(dims), total)[::-1]
    values = pc.to_array()
    lines = []
    for flat in range(total):
        coords = ",".join(str(int(grids[i, flat])) for i in range(len(dims)))
        lines.append(f"{coords}\t{int(values[flat])}\n")
    return "".join(lines)


def parse_colouring(text: str, inst: ProductInstance) -> np.ndarray:
    dims = inst.dims
    values = np.zeros(inst.total, dtype=np.int64)
    seen = np.zeros(inst.total, dtype=bool)
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            left, right = line.split("\t")
            coords = [int(x) for x in left.split(",")]
            colour = int(right)
            flat = mixed_radix_encode(coords, dims)
        except (ValueError, IndexError) as exc:
            raise ParseError(f"colouring line {lineno}: {line!r}: {exc}") from exc
        if seen[flat]:
            raise ParseError(f"colouring line {lineno}: vertex {left} listed twice")
        seen[flat] = True
        values[flat] = colour
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise MissingColour(f"colouring has no entry for flat vertex {missing}")
    return values


def _explicit_checks(report, inst, values, caps, *, unwrapped, pc=None):
    """Square-properness, span windows and clique certificate; skipped above the cap."""
    if inst.total > caps.vertices:
        reason = f"{inst.total} vertices > cap {caps.vertices}"
        report.verdict("proper_on_square", None, reason)
        report.verdict("spans_in_windows", None, reason)
        report.add("clique_size", clique_certificate(inst).size)
        report.verdict("clique_verified", None, reason)
        report.warning = True
        return None
    with report.phase("square"):
        sq = square(build_product_graph(inst, caps.vertices), caps.vertices)
    with report.phase("check"):
        bad = check_proper(sq, values)
        report.verdict(
            "proper_on_square", bad is None, "" if bad is None else f"vertices {bad.u},{bad.v} share colour {bad.colour}"
        )
        if unwrapped:
            if pc is None:
                pc = ProductColouring(inst, (), total_span_bound(inst), False, values)
            sv = check_spans(inst, pc)
            report.verdict(
                "spans_in_windows",
                sv is None,
                "" if sv is None else f"edge {sv.u},{sv.v} dim {sv.dimension + 1} span {sv.span} not in {sv.window[0]}..{sv.window[1]}",
            )
        else:
            report.verdict("spans_in_windows", None, "wrapped colouring")
        cert = clique_certificate(inst)
        report.add("clique_size", cert.size)
        report.verdict("clique_verified", is_clique(sq, cert.members))
    return sq


@dataclass
class Caps:
    vertices: int = DEFAULT_GRAPH_CAP
    exact: int = DEFAULT_EXACT_CAP
    materialize: int = DEFAULT_MATERIALIZE_CAP


def _caps(args) -> Caps:
    return Caps(args.cap_vertices, args.cap_exact, args.cap_materialize)


# -- commands ---------------------------------------------------------------


def cmd_colour(args, out) -> tuple[int, RunReport]:
    report = RunReport()
    caps = _caps(args)
    with report.phase("parse"):
        inst = load_instance(args.instance)
    _describe(report, inst)
    with report.phase("colour"):
        pc = colour_product(inst, materialize_cap=caps.materialize)
        try:
            final = wrap(pc) if args.wrap else pc
        except SpanBoundViolated as exc:
            raise InvariantBreach(str(exc)) from exc
    report.add("wrapped", int(args.wrap))
    with report.phase("count"):
        used = final.num_colours()
    report.add("colours_used", used)
    if args.wrap and used > bounds(inst).upper:
        raise InvariantBreach(f"{used} colours exceeds the upper bound")
    with report.phase("write"):
        text = format_colouring(final)
        if args.output:
            Path(args.output).write_text(text)
        else:
            out.write(text)
    values = final.to_array() if inst.total <= caps.vertices else None
    _explicit_checks(report, inst, values, caps, unwrapped=not args.wrap, pc=None if args.wrap else pc)
    if report.failed():
        raise InvariantBreach("construction failed its own verification")
    return EXIT_OK, report


def cmd_verify(args, out) -> tuple[int, RunReport]:
    report = RunReport()
    caps = _caps(args)
    with report.phase("parse"):
        inst = load_instance(args.instance)
        try:
            text = Path(args.colouring).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {args.colouring}: {exc.strerror}") from exc
        values = parse_colouring(text, inst)
    _describe(report, inst)
    S = total_span_bound(inst)
    unwrapped = args.unwrapped or bool(values.min() < 0 or values.max() > 2 * S)
    report.add("wrapped", int(not unwrapped))
    report.add("colours_used", len(np.unique(values)))
    _explicit_checks(report, inst, values, caps, unwrapped=unwrapped)
    return (EXIT_FAIL if report.failed() else EXIT_OK), report


def cmd_bounds(args, out) -> tuple[int, RunReport]:
    report = RunReport()
    caps = _caps(args)
    with report.phase("parse"):
        inst = load_instance(args.instance)
    _describe(report, inst)
    if args.exact:
        if inst.total > caps.exact:
            raise TooLarge(f"{inst.total} vertices exceeds exact-search cap {caps.exact}")
        with report.phase("exact"):
            sq = square(build_product_graph(inst, caps.vertices), caps.vertices)
            cert = clique_certificate(inst)
            chi = chi_exact(sq, caps.exact, clique=cert.members)
        report.add("exact", chi)
        b = bounds(inst)
        if not b.lower <= chi <= b.upper:
            raise InvariantBreach(f"exact value {chi} outside [{b.lower}, {b.upper}]")
    return EXIT_OK, report


def cmd_generate(args, out) -> tuple[int, RunReport | None]:
    t = treemod.generate(args.kind, args.n, seed=args.seed, spine=args.spine, legs=args.legs)
    text = treemod.format_tree(t)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK, None


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treesquare",
        description="Distance-2 colourings of cartesian products of trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--machine", action="store_true", help="key=value report lines")
        p.add_argument("--timings", action="store_true", help="include per-phase wall times")
        p.add_argument("--cap-vertices", type=int, default=DEFAULT_GRAPH_CAP,
                       help="largest product built explicitly for checks")
        p.add_argument("--cap-exact", type=int, default=DEFAULT_EXACT_CAP,
                       help="largest graph given to the exact chromatic search")
        p.add_argument("--cap-materialize", type=int, default=DEFAULT_MATERIALIZE_CAP,
                       help="largest product whose colours are stored densely")

    p = sub.add_parser("colour", aliases=["color"], help="colour an instance")
    p.add_argument("instance")
    p.add_argument("-o", "--output", help="colouring file (default: stdout)")
    p.add_argument("--wrap", dest="wrap", action="store_true", default=True)
    p.add_argument("--no-wrap", dest="wrap", action="store_false")
    common(p)
    p.set_defaults(func=cmd_colour)

    p = sub.add_parser("verify", help="check a colouring against an instance")
    p.add_argument("instance")
    p.add_argument("colouring")
    p.add_argument("--unwrapped", action="store_true",
                   help="also check span windows (implied when colours leave 0..2S)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="closed-form bounds, optionally the exact value")
    p.add_argument("instance")
    p.add_argument("--exact", action="store_true")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("generate", help="write a tree instance")
    p.add_argument("kind", choices=treemod.KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--spine", type=int)
    p.add_argument("--legs", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        code, report = args.func(args, stdout)
    except (ParseError, TreeError, InvalidParams, MissingColour, TooLarge) as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    except InvariantBreach as exc:
        stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL
    if report is not None:
        # keep stdout clean for the colouring when no output file was given
        dest = stderr if getattr(args, "output", "x") is None else stdout
        dest.write(report.render(args.machine, args.timings))
        if report.warning:
            stderr.write("warning: explicit checks skipped, instance above --cap-vertices\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
