"""Command-line front end: ``cospectra <command> [options]``.

Exit status: 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import forbidden, graph_core, jacobi, measures, schreier, spectra, ssrt
from .errors import CospectraError, InvalidParameter
from .families import family_from_json, parse_family
from .sequences import BranchingSeq


@dataclass(frozen=True)
class RunConfig:
    vertex_budget: int
    eigen_tolerance: float
    grid_step: float
    radius_schedule: tuple[int, ...] | None
    output_format: str | None
    output_path: str | None
    threads: int


class UsageError(Exception):
    pass


# argument types ---------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def _radii(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("radii must be non-negative integers")
    return vals


def _family(text: str):
    try:
        if text.lstrip().startswith("{"):
            return family_from_json(text)
        return parse_family(text)
    except (CospectraError, KeyError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _branching(text: str) -> BranchingSeq:
    try:
        return BranchingSeq.parse(text)
    except CospectraError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _jacobi(text: str) -> jacobi.JacobiSpec:
    """``free``, ``ja:<a^2>`` or ``branch:<sequence>[@offset]``."""
    name, _, arg = text.partition(":")
    try:
        if name == "free":
            return jacobi.free_jacobi()
        if name == "ja":
            return jacobi.jacobi_a(a_squared=Fraction(arg))
        if name == "branch":
            seq, _, off = arg.partition("@")
            return jacobi.jacobi_from_branching(BranchingSeq.parse(seq), int(off or 0))
    except (CospectraError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    raise argparse.ArgumentTypeError(f"unknown Jacobi matrix {text!r} (free, ja:A2, branch:SEQ[@N])")


# output -----------------------------------------------------------------


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _table(header: str, rows) -> str:
    return header + "\n" + "".join(",".join(str(c) for c in row) + "\n" for row in rows)


def _choose(cfg: RunConfig, allowed: Sequence[str], default: str) -> str:
    fmt = cfg.output_format or default
    if fmt not in allowed:
        raise UsageError(f"--format {fmt} is not available for this command")
    return fmt


# commands ---------------------------------------------------------------


def cmd_family_show(args, cfg):
    fam = args.family
    out = fam.to_json()
    out["max_degree"] = fam.max_degree
    out["base_vertex"] = repr(fam.base_vertex)
    try:
        out["branching"] = fam.branching.to_text()
    except AttributeError:
        pass
    _choose(cfg, ["json"], "json")
    return _dump_json(out)


def cmd_ball(args, cfg):
    center = None
    if args.center is not None:
        try:
            center = json.loads(args.center)
        except json.JSONDecodeError:
            raise UsageError(f"--center must be JSON, got {args.center!r}") from None
        if isinstance(center, list):
            center = tuple(center)
    g = graph_core.ball(args.family, center, args.radius, budget=cfg.vertex_budget)
    fmt = _choose(cfg, ["edges", "json"], "edges")
    if fmt == "edges":
        return graph_core.format_edge_list(g)
    return _dump_json({
        "vertices": g.vertex_count,
        "edges": [list(e) for e in g.edges()],
        "labels": [repr(k) for k in g.labels],
        "boundary": sorted(g.boundary),
    })


def cmd_walks(args, cfg):
    lengths = range(args.n, args.n + 1) if args.up_to is None else range(args.up_to + 1)
    rows = [(k, graph_core.closed_walk_count(args.family, None, k, budget=cfg.vertex_budget))
            for k in lengths]
    fmt = _choose(cfg, ["csv", "json"], "csv")
    if fmt == "csv":
        return _table("n,count", rows)
    return _dump_json([{"n": k, "count": c} for k, c in rows])


def _measure(text: str):
    name, _, arg = text.partition(":")
    if name == "semicircle":
        return measures.semicircle(Fraction(arg or 1))
    if name == "arcsine":
        return measures.arcsine()
    raise UsageError(f"unknown measure {text!r} (semicircle:D, arcsine)")


def cmd_moments(args, cfg):
    if args.family is not None:
        vals = [Fraction(graph_core.closed_walk_count(args.family, None, k, budget=cfg.vertex_budget))
                for k in range(args.up_to + 1)]
    elif args.jacobi is not None:
        vals = jacobi.jacobi_moments(args.jacobi, args.up_to)
    else:
        vals = _measure(args.measure).exact_moments(args.up_to).moments
    fmt = _choose(cfg, ["csv", "json"], "csv")
    if fmt == "csv":
        return measures.moments_csv(vals)
    return _dump_json([str(v) for v in vals])


def cmd_jacobi_eig(args, cfg):
    es = jacobi.eigen(jacobi.truncate(args.jacobi, args.size))
    fmt = _choose(cfg, ["csv", "json"], "csv")
    return es.to_csv() if fmt == "csv" else _dump_json(es.to_json())


def cmd_jacobi_quadrature(args, cfg):
    q = jacobi.quadrature_measure(args.jacobi, args.size)
    order = 2 * args.size - 1
    exact = jacobi.jacobi_moments(args.jacobi, order)
    approx = q.moments(order)
    scale = [float((q.weights * abs(q.nodes) ** k).sum()) for k in range(order + 1)]
    err = max(abs(a - float(m)) / max(abs(float(m)), s, 1e-300)
              for a, m, s in zip(approx, exact, scale))
    fmt = _choose(cfg, ["csv", "json"], "json")
    if fmt == "csv":
        return _table("index,node,weight", [(i, repr(x), repr(w)) for i, (x, w)
                                            in enumerate(zip(q.nodes.tolist(), q.weights.tolist()))])
    return _dump_json({
        "jacobi": args.jacobi.describe(),
        "size": args.size,
        "nodes": q.nodes.tolist(),
        "weights": q.weights.tolist(),
        "checked_orders": order,
        "max_relative_moment_error": err,
    })


def cmd_decompose(args, cfg):
    _choose(cfg, ["json"], "json")
    return _dump_json(ssrt.decompose(args.branching, args.levels).to_json())


def cmd_verify(args, cfg):
    _choose(cfg, ["json"], "json")
    rep = ssrt.verify_decomposition(args.branching, args.depth, budget=cfg.vertex_budget,
                                    workers=cfg.threads)
    return _dump_json(rep.to_json())


def cmd_cospectral(args, cfg):
    _choose(cfg, ["json"], "json")
    return _dump_json(spectra.are_cospectral(args.a, args.b, evidence=not args.no_evidence,
                                               grid_step=cfg.grid_step).to_json())


def cmd_norm(args, cfg):
    est = spectra.norm_estimate(args.family, cfg.radius_schedule, budget=cfg.vertex_budget,
                                workers=cfg.threads)
    fmt = _choose(cfg, ["csv", "json"], "csv")
    return est.to_csv() if fmt == "csv" else _dump_json(est.to_json())


def cmd_classify(args, cfg):
    _choose(cfg, ["json"], "json")
    res = forbidden.classify_norm_le_2(args.family, max_radius=args.max_radius,
                                       budget=cfg.vertex_budget)
    return _dump_json(res.to_json())


def cmd_dinfinity(args, cfg):
    _choose(cfg, ["json"], "json")
    return _dump_json(spectra.dinfinity_checks().to_json())


def cmd_rotations(args, cfg):
    _choose(cfg, ["json"], "json")
    return _dump_json(spectra.compare_rotations(args.branching).to_json())


def cmd_schreier_graph(args, cfg):
    _choose(cfg, ["edges"], "edges")
    return graph_core.format_edge_list(schreier.schreier_level(args.level, budget=min(
        cfg.vertex_budget, schreier.WORD_BUDGET)))


def cmd_schreier_spectrum(args, cfg):
    fmt = _choose(cfg, ["csv", "json"], "csv")
    if fmt == "csv":
        return schreier.spectrum_csv(schreier.level_spectrum(args.level))
    return _dump_json(schreier.spectrum_report(args.level))


# parser -----------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--budget", type=_positive_int, default=argparse.SUPPRESS,
                   help="vertex budget for finite truncations (default 10^6 or $COSPECTRA_BUDGET)")
    g.add_argument("--tol", type=_positive_float, default=argparse.SUPPRESS,
                   help="eigenvalue tolerance (default 1e-12)")
    g.add_argument("--grid-step", type=_positive_float, default=argparse.SUPPRESS,
                   help="grid step for density computations (default 1e-3)")
    g.add_argument("--radii", type=_radii, default=argparse.SUPPRESS,
                   help="comma-separated radius schedule")
    g.add_argument("--format", choices=["csv", "json", "edges"], default=argparse.SUPPRESS)
    g.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    g.add_argument("--threads", type=_positive_int, default=argparse.SUPPRESS,
                   help="worker threads; output does not depend on it")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="cospectra", parents=[common],
                                     description="Spectra of adjacency operators of infinite graphs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func: Callable, helptext: str, parent=sub):
        p = parent.add_parser(name, parents=[common], help=helptext, description=helptext)
        p.set_defaults(func=func)
        return p

    fam = sub.add_parser("family", help="family descriptors")
    fam_sub = fam.add_subparsers(dest="action", required=True, metavar="ACTION")
    p = add("show", cmd_family_show, "show a family descriptor as JSON", fam_sub)
    p.add_argument("--family", type=_family, required=True)

    p = add("ball", cmd_ball, "finite ball as an edge list")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--radius", type=_nonneg_int, required=True)
    p.add_argument("--center", help="vertex key as JSON (default: base vertex)")

    p = add("walks", cmd_walks, "exact closed-walk counts at the base vertex")
    p.add_argument("--family", type=_family, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--n", type=_nonneg_int)
    grp.add_argument("--up-to", type=_nonneg_int)

    p = add("moments", cmd_moments, "exact moments of a vertex measure")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", type=_family)
    src.add_argument("--measure", help="semicircle:D or arcsine")
    src.add_argument("--jacobi", type=_jacobi, help="free, ja:A2 or branch:SEQ[@N]")
    p.add_argument("--up-to", type=_nonneg_int, required=True)

    jac = sub.add_parser("jacobi", help="finite Jacobi sections")
    jac_sub = jac.add_subparsers(dest="action", required=True, metavar="ACTION")
    for name, func, helptext in (("eig", cmd_jacobi_eig, "eigenvalues and first-component weights"),
                                 ("quadrature", cmd_jacobi_quadrature, "Gauss quadrature with moment check")):
        p = add(name, func, helptext, jac_sub)
        p.add_argument("--jacobi", type=_jacobi, required=True, help="free, ja:A2 or branch:SEQ[@N]")
        p.add_argument("--size", type=_positive_int, required=True)

    p = add("decompose", cmd_decompose, "Jacobi components of a spherically symmetric tree")
    p.add_argument("--branching", type=_branching, required=True, help='e.g. "2,3" or "3/2"')
    p.add_argument("--levels", type=_positive_int, default=6)

    p = add("verify-decomposition", cmd_verify, "audit the Jacobi reduction on a finite ball")
    p.add_argument("--branching", type=_branching, required=True)
    p.add_argument("--depth", type=_nonneg_int, required=True)

    p = add("cospectral", cmd_cospectral, "cospectrality verdict with evidence")
    p.add_argument("--a", type=_family, required=True)
    p.add_argument("--b", type=_family, required=True)
    p.add_argument("--no-evidence", action="store_true")

    p = add("norm", cmd_norm, "norm lower bounds from balls")
    p.add_argument("--family", type=_family, required=True)

    p = add("classify", cmd_classify, "classification of families with norm at most 2")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--max-radius", type=_positive_int, default=10)

    add("dinfinity", cmd_dinfinity, "kernel vector and D_n spectra")

    p = add("rotations", cmd_rotations, "compare rotations of a periodic branching sequence")
    p.add_argument("--branching", type=_branching, required=True)

    sch = sub.add_parser("schreier", help="Schreier graphs of the ternary automaton group")
    sch_sub = sch.add_subparsers(dest="action", required=True, metavar="ACTION")
    p = add("graph", cmd_schreier_graph, "level graph as an edge list", sch_sub)
    p.add_argument("--level", type=_positive_int, required=True)
    p = add("spectrum", cmd_schreier_spectrum, "level spectrum", sch_sub)
    p.add_argument("--level", type=_positive_int, required=True)
    return parser


def _config(args) -> RunConfig:
    budget = getattr(args, "budget", None)
    return RunConfig(
        vertex_budget=graph_core.default_budget() if budget is None else budget,
        eigen_tolerance=getattr(args, "tol", 1e-12),
        grid_step=getattr(args, "grid_step", measures.DEFAULT_GRID_STEP),
        radius_schedule=getattr(args, "radii", None),
        output_format=getattr(args, "format", None),
        output_path=getattr(args, "out", None),
        threads=getattr(args, "threads", 1),
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        text = args.func(args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cospectra: error: {exc}", file=sys.stderr)
        return 2
    except (CospectraError, InvalidParameter) as exc:
        print(f"cospectra: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
