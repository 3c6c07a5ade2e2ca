"""Command-line front end.

Exit status is 0 on success, 2 on invalid input and 3 on numerical failure;
failures also print a one-line JSON object to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .ballpot import ball_potential
from .centers import CenterSearchConfig, find_centers, sweep_csv, uniqueness_sweep
from .engine import gradient, potential, v_hat
from .errors import DomainError, NumericalError, RieszValueError
from .fixtures import builtin, family
from .quadrature import default_rule
from .rings import GRID_RESOLUTION, asphericity, best_ball, minimal_ring
from .shapes import Ball, Shape, from_dict

EXIT_INPUT = 2
EXIT_NUMERIC = 3


class UsageError(RieszValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def load_shape(source: str) -> Shape:
    """``builtin:NAME[:PARAM]`` or a path to a JSON shape description."""
    if source.startswith("builtin:"):
        return builtin(source[len("builtin:"):])
    try:
        with open(source, encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read shape file {source!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"shape file {source!r} is not valid JSON: {exc}") from None
    return from_dict(spec)


def _metadata(args, quad_size) -> dict:
    meta = {"tool": "riesz", "version": __version__, "command": args.command,
            "seed": args.seed, "quadrature_size": quad_size}
    if args.timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _header(meta: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_json(payload: dict, path: str | None):
    _emit(json.dumps(payload, indent=2) + "\n", path)


def _table(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_potential(args) -> int:
    shape = load_shape(args.shape)
    n = shape.dim
    quad = default_rule(n, args.size, args.seed)
    if not args.point:
        raise UsageError("give at least one --point")
    lambdas = [x for text in args.lam for x in _floats(text)]
    header = [f"x{i}" for i in range(n)] + ["lambda", "V", "regularized", "quadrature_error"]
    if args.vhat:
        header.append("vhat")
    if args.gradient:
        header += [f"grad{i}" for i in range(n)]
    rows = []
    for text in args.point:
        x = np.array(_floats(text))
        if x.size != n:
            raise UsageError(f"point {text!r} is not {n}-dimensional")
        for lam in lambdas:
            pv = potential(shape, x, lam, quad)
            row = [_fmt(c) for c in x] + [_fmt(lam), _fmt(pv.value), int(pv.regularized), _fmt(pv.error)]
            if args.vhat:
                row.append(_fmt(v_hat(shape, x, lam, quad)))
            if args.gradient:
                try:
                    row += [_fmt(g) for g in gradient(shape, x, lam, quad)]
                except DomainError:
                    # diverges at points of the body for lambda <= 1
                    row += [""] * n
            rows.append(row)
    _emit(_header(_metadata(args, quad.size)) + _table(header, rows), args.out)
    return 0


def cmd_ball_oracle(args) -> int:
    n = args.n
    quad = default_rule(n, args.size, args.seed)
    body = Ball(np.zeros(n), 1.0)
    rows, worst = [], 0.0
    for lam in _floats(args.lam):
        for t in _floats(args.t):
            exact = ball_potential(n, lam, t)
            x = np.zeros(n)
            x[0] = t
            got = potential(body, x, lam, quad).value
            err = abs(got - exact)
            worst = max(worst, err)
            rel = err / abs(exact) if exact != 0 else err
            rows.append([n, _fmt(lam), _fmt(t), _fmt(exact), _fmt(got), _fmt(err), _fmt(rel)])
    meta = _metadata(args, quad.size)
    meta["max_abs_error"] = _fmt(worst)
    header = ["n", "lambda", "t", "closed_form", "engine", "abs_error", "rel_error"]
    _emit(_header(meta) + _table(header, rows), args.out)
    if args.svg:
        series = {}
        for row in rows:
            series.setdefault(row[1], []).append((float(row[2]), float(row[3]), float(row[4])))
        _emit(line_svg(series, f"unit {n}-ball potential"), args.svg)
    return 0


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def line_svg(series: dict, title: str) -> str:
    """Closed form as lines and engine values as dots, one colour per lambda.

    ``series`` maps a label to (t, closed_form, engine) triples.
    """
    pts = [p for triples in series.values() for p in triples]
    ts = [p[0] for p in pts]
    vs = [v for p in pts for v in p[1:] if np.isfinite(v)]
    t0, t1 = min(ts), max(ts)
    v0, v1 = (min(vs), max(vs)) if vs else (0.0, 1.0)
    t1 = t1 if t1 > t0 else t0 + 1
    v1 = v1 if v1 > v0 else v0 + 1
    w, h, left, top = 480, 300, 60, 30
    sx = lambda t: left + w * (t - t0) / (t1 - t0)
    sy = lambda v: top + h * (v1 - v) / (v1 - v0)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + left + 120}" height="{h + top + 50}" font-family="sans-serif" font-size="11">',
           f'<text x="{left}" y="18" font-size="13">{title}</text>',
           f'<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="#444"/>',
           f'<text x="{left}" y="{top + h + 16}">{t0:g}</text>',
           f'<text x="{left + w}" y="{top + h + 16}" text-anchor="end">{t1:g}</text>',
           f'<text x="{left + w / 2}" y="{top + h + 36}" text-anchor="middle">t</text>',
           f'<text x="{left - 6}" y="{top + 4}" text-anchor="end">{v1:.3g}</text>',
           f'<text x="{left - 6}" y="{top + h}" text-anchor="end">{v0:.3g}</text>']
    for i, (label, triples) in enumerate(series.items()):
        colour = _PALETTE[i % len(_PALETTE)]
        triples = sorted(triples)
        line = " ".join(f"{sx(t):.2f},{sy(c):.2f}" for t, c, _ in triples if np.isfinite(c))
        out.append(f'<polyline points="{line}" fill="none" stroke="{colour}"/>')
        for t, _, e in triples:
            if np.isfinite(e):
                out.append(f'<circle cx="{sx(t):.2f}" cy="{sy(e):.2f}" r="2.5" fill="{colour}"/>')
        out.append(f'<text x="{left + w + 10}" y="{top + 14 * (i + 1)}" fill="{colour}">lambda={label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _search_quad(args, n):
    return default_rule(n, args.size, args.seed) if args.size else None


def cmd_center(args) -> int:
    shape = load_shape(args.shape)
    cfg = CenterSearchConfig(args.lam, args.starts, args.cluster_radius, args.max_iterations, args.seed)
    report = find_centers(shape, cfg, polish_quad=_search_quad(args, shape.dim))
    size = args.size or default_rule(shape.dim, seed=args.seed).size
    _emit_json({"metadata": _metadata(args, size), **report.to_dict()}, args.out)
    return 0


def heatmap_svg(rows, title: str = "center multiplicity") -> str:
    """Cells over (parameter, lambda) shaded by the number of centers found."""
    params = sorted({r.param for r in rows})
    lambdas = sorted({r.lam for r in rows})
    counts = {(r.param, r.lam): r.n_centers for r in rows}
    cell, left, top = 48, 80, 40
    width = left + cell * len(lambdas) + 20
    height = top + cell * len(params) + 50
    top_count = max(counts.values(), default=1)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
           f'<text x="{left}" y="20" font-size="13">{title}</text>']
    for i, p in enumerate(params):
        y = top + i * cell
        out.append(f'<text x="{left - 6}" y="{y + cell / 2 + 4}" text-anchor="end">{p:g}</text>')
        for j, lam in enumerate(lambdas):
            x = left + j * cell
            k = counts.get((p, lam))
            if k is None:
                fill, label = "#ffffff", ""
            else:
                shade = int(235 - 180 * (k - 1) / max(top_count - 1, 1)) if k >= 1 else 255
                fill, label = f"rgb({shade},{shade},255)", str(k)
            out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="#444"/>')
            out.append(f'<text x="{x + cell / 2}" y="{y + cell / 2 + 4}" text-anchor="middle">{label}</text>')
    base = top + cell * len(params)
    for j, lam in enumerate(lambdas):
        out.append(f'<text x="{left + j * cell + cell / 2}" y="{base + 16}" text-anchor="middle">{lam:g}</text>')
    out.append(f'<text x="{left + cell * len(lambdas) / 2}" y="{base + 36}" text-anchor="middle">lambda</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_sweep(args) -> int:
    make = family(args.family)
    params = _floats(args.params)
    lambdas = _floats(args.lam)
    cfg = CenterSearchConfig(lambdas[0] if lambdas else 0.0, args.starts, args.cluster_radius,
                             args.max_iterations, args.seed)
    rows = uniqueness_sweep(make, params, lambdas, cfg, with_asphericity=not args.no_asphericity,
                            grid_resolution=args.grid)
    meta = _metadata(args, args.size or "search default")
    meta["family"] = args.family
    _emit(_header(meta) + sweep_csv(rows), args.out)
    if args.svg:
        _emit(heatmap_svg(rows, f"center multiplicity: {args.family}"), args.svg)
    return 0


def _ring_quad(args, n):
    return default_rule(n, args.size, args.seed) if args.size else None


def cmd_asphericity(args) -> int:
    shape = load_shape(args.shape)
    value, point = asphericity(shape, args.grid, _ring_quad(args, shape.dim))
    _emit_json({"metadata": _metadata(args, args.size or "ring default"),
                "asphericity": value, "center": point.tolist()}, args.out)
    return 0


def cmd_minimal_ring(args) -> int:
    shape = load_shape(args.shape)
    report = minimal_ring(shape, args.grid, _ring_quad(args, shape.dim))
    _emit_json({"metadata": _metadata(args, args.size or "ring default"), **report.to_dict()}, args.out)
    return 0


def cmd_best_ball(args) -> int:
    shape = load_shape(args.shape)
    ball = best_ball(shape, args.grid, _ring_quad(args, shape.dim))
    _emit_json({"metadata": _metadata(args, args.size or "ring default"), **ball.to_dict()}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--size", type=int, help="number of quadrature directions")
    common.add_argument("--timestamp", action="store_true", help="add a UTC timestamp to the metadata")

    search = _Parser(add_help=False)
    search.add_argument("--starts", type=int, default=24)
    search.add_argument("--cluster-radius", type=float)
    search.add_argument("--max-iterations", type=int, default=400)

    parser = _Parser(prog="riesz", description="Regularized Riesz potentials, centers and minimal rings.")
    parser.add_argument("--version", action="version", version=f"riesz {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("potential", parents=[common], help="V (and optionally V-hat, gradient) at points")
    p.add_argument("--shape", required=True)
    p.add_argument("--lambda", dest="lam", action="append", required=True)
    p.add_argument("--point", action="append", default=[])
    p.add_argument("--vhat", action="store_true")
    p.add_argument("--gradient", action="store_true")
    p.set_defaults(run=cmd_potential)

    p = sub.add_parser("ball-oracle", parents=[common], help="closed-form ball potential against the engine")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--svg", help="write a line plot of both columns against t here")
    p.set_defaults(run=cmd_ball_oracle)

    p = sub.add_parser("center", parents=[common, search], help="multi-start center search")
    p.add_argument("--shape", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.set_defaults(run=cmd_center)

    p = sub.add_parser("sweep", parents=[common, search], help="center multiplicity over a shape family")
    p.add_argument("--family", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--svg", help="write the multiplicity heatmap here")
    p.add_argument("--grid", type=int, default=GRID_RESOLUTION)
    p.add_argument("--no-asphericity", action="store_true")
    p.set_defaults(run=cmd_sweep)

    for name, fn, text in [("asphericity", cmd_asphericity, "Dvoretzky asphericity"),
                           ("minimal-ring", cmd_minimal_ring, "minimal ring centers"),
                           ("best-ball", cmd_best_ball, "best bi-Hausdorff ball")]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--shape", required=True)
        p.add_argument("--grid", type=int, default=GRID_RESOLUTION)
        p.set_defaults(run=fn)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


_NUMERIC = re.compile(r"^-[\d.]")


def _glue_negatives(argv: list[str]) -> list[str]:
    """``--lambda -1,2`` becomes ``--lambda=-1,2``; argparse would read ``-1,2`` as an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and i + 1 < len(argv) and _NUMERIC.match(argv[i + 1]):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_glue_negatives(argv))
        return args.run(args)
    except (RieszValueError, ValueError) as exc:
        return _fail(EXIT_INPUT, exc)
    except (NumericalError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, exc)


if __name__ == "__main__":
    sys.exit(main())
