"""Command-line front end: JSON in, JSON out.

Exit codes: 0 success, 2 input validation, 3 resonant dead end,
4 quadrature tolerance failure.  Every number in the output is a string.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from ._rational import fmt_float, fmt_fraction, to_fraction
from .errors import (
    DegenerateConfigurationError,
    DivergentInputError,
    EnumerationCapError,
    GammaSeriesError,
    GraphValidationError,
    LatticeError,
    QuadratureToleranceError,
    ReductionLimitError,
    ResonanceError,
)

DEFAULT_REL_TOL = 1e-7
ORACLE_REL_TOL = 3e-3
ORACLE_MAX_EVALS = 40_000_000

EXIT_OK, EXIT_VALIDATION, EXIT_RESONANCE, EXIT_TOLERANCE = 0, 2, 3, 4

_EXIT_MAP = (
    (QuadratureToleranceError, EXIT_TOLERANCE),
    ((ResonanceError, GammaSeriesError, ReductionLimitError), EXIT_RESONANCE),
    (
        (GraphValidationError, EnumerationCapError, LatticeError, DegenerateConfigurationError,
         DivergentInputError, ValueError),
        EXIT_VALIDATION,
    ),
)


def stringify(obj):
    """Recursively render numbers as strings (bools and None are kept)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return fmt_fraction(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, dict):
        return {str(k): stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [stringify(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _d_half(args) -> Fraction:
    if args.dim is None:
        raise GraphValidationError("--dim is required for this command")
    try:
        return to_fraction(args.dim) / 2
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise GraphValidationError(f"bad --dim {args.dim!r}: {exc}") from None


def _quad_config(args, default_method: str = "auto"):
    from .numeric import QuadratureConfig

    return QuadratureConfig(
        method=args.method or default_method,
        rel_tol=args.rel_tol if args.rel_tol is not None else DEFAULT_REL_TOL,
        seed=args.seed,
    )


# -- commands -----------------------------------------------------------------


def cmd_symanzik(g, args) -> dict:
    from .graph import first_symanzik, loop_number, q_polynomial
    from .lattice import build_point_set, reduce_lattice

    psi, q = first_symanzik(g), q_polynomial(g)
    a = reduce_lattice(build_point_set(psi, q), loop_number(g))
    return {"loops": loop_number(g), "psi": psi.to_json(), "q": q.to_json(), "lattice_set": a.to_json()}


def cmd_polytope(g, args) -> dict:
    from .lattice import NON_SATURATED, graph_lattice, is_saturated, normalized_volume
    from .polytope import brute_force_facets, cone_normals, normal_set

    a = graph_lattice(g)
    normals = cone_normals(g, a)
    doc = {
        "lattice_set": a.to_json(),
        "facets": [f.to_json() for f in normals],
        "normalized_volume": normalized_volume(a),
        "saturated": is_saturated(a),
    }
    if not doc["saturated"]:
        doc["warning"] = NON_SATURATED
    if args.brute_force:
        hull = brute_force_facets(a)
        doc["hull_facets"] = [f.to_json() for f in hull]
        doc["hull_agrees"] = normal_set(hull) == normal_set(normals)
    return doc


def cmd_classify(g, args) -> dict:
    from .lattice import amplitude_beta, graph_lattice
    from .polytope import amplitude_pole_report, cone_normals, semi_nonresonant

    dh = _d_half(args)
    doc = amplitude_pole_report(g, dh).to_json()
    a = graph_lattice(g)
    doc["resonance"] = semi_nonresonant(amplitude_beta(dh, g.n_edges), cone_normals(g, a), a).to_json()
    return doc


def cmd_gkz(g, args) -> dict:
    from .lattice import NON_SATURATED, amplitude_beta, gkz_system, graph_lattice, is_saturated

    a = graph_lattice(g)
    doc = gkz_system(a, amplitude_beta(_d_half(args), g.n_edges)).to_json()
    if not is_saturated(a):
        doc["warning"] = NON_SATURATED
    return doc


def cmd_evaluate(g, args) -> dict:
    from .continuation import assemble_amplitude_expansion
    from .numeric import default_evaluator

    dh = _d_half(args)
    cfg = _quad_config(args)
    ev = default_evaluator(cfg, strict=True)
    res = assemble_amplitude_expansion(g, dh, order=args.order, evaluator=ev, include_pi=not args.integral)
    doc = {
        "d_half": dh,
        "normalization": "integral" if args.integral else "amplitude",
        "expansion": res.to_json(),
    }
    if args.oracle:
        doc["oracle"] = _oracle_doc(g, args, compare=res.series if res.pole_order == 0 else None)
    return doc


def _oracle_doc(g, args, compare=None) -> dict:
    from .numeric import QuadratureConfig, momentum_space_amplitude

    # the oracle is Monte Carlo only; --rel-tol applies to it under the oracle command
    tol = args.rel_tol if args.command == "oracle" and args.rel_tol is not None else ORACLE_REL_TOL
    cfg = QuadratureConfig(method="montecarlo", rel_tol=tol, max_evals=ORACLE_MAX_EVALS, seed=args.seed)
    est = momentum_space_amplitude(g, cfg)
    if not est.converged:
        raise QuadratureToleranceError(f"oracle missed relative tolerance {cfg.rel_tol:g}")
    doc = {"value": est.value, "abs_error": est.abs_error, "dim": g.dim}
    if compare is not None and g.dim is not None and Fraction(g.dim, 2) == _d_half(args):
        c0, e0 = compare[0]
        doc["difference"] = c0 - est.value
        doc["combined_error"] = e0 + est.abs_error
    return doc


def cmd_oracle(g, args) -> dict:
    return _oracle_doc(g, args)


COMMANDS = {
    "symanzik": cmd_symanzik,
    "polytope": cmd_polytope,
    "classify": cmd_classify,
    "gkz": cmd_gkz,
    "evaluate": cmd_evaluate,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feyntope", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--graph", help="graph JSON file")
        src.add_argument("--graphs-dir", help="run on every *.json file in a directory")
        s.add_argument("--out", help="write JSON here instead of stdout")
        if name in ("classify", "gkz", "evaluate", "oracle"):
            s.add_argument("--dim", help="spacetime dimension D (rational)")
        if name in ("evaluate", "oracle"):
            s.add_argument("--method", choices=("tensor", "mc"), default=None)
            s.add_argument("--rel-tol", type=float, default=None,
                           help="relative tolerance (default 1e-7; 3e-3 for the oracle)")
            s.add_argument("--seed", type=int, default=0)
        if name == "evaluate":
            s.add_argument("--order", type=int, default=2)
            s.add_argument("--oracle", action="store_true", help="cross-check eps^0 against momentum space")
            s.add_argument("--integral", action="store_true", help="report I(0, D/2 + eps) without the pi power")
        if name == "polytope":
            s.add_argument("--brute-force", action="store_true", help="also compute the exact hull")
    return p


def _run_one(path, args) -> tuple[int, dict]:
    from .graph import load_graph

    try:
        g = load_graph(path)
        return EXIT_OK, COMMANDS[args.command](g, args)
    except Exception as exc:
        for kinds, code in _EXIT_MAP:
            if isinstance(exc, kinds):
                doc = {"error": type(exc).__name__, "message": str(exc)}
                if isinstance(exc, ResonanceError) and exc.facet is not None:
                    doc["facet"] = list(exc.facet)
                return code, doc
        raise


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.graphs_dir:
        root = Path(args.graphs_dir)
        if not root.is_dir():
            print(f"error: {root} is not a directory", file=sys.stderr)
            return EXIT_VALIDATION
        code, results = EXIT_OK, {}
        for path in sorted(root.glob("*.json")):
            c, doc = _run_one(path, args)
            results[path.stem] = doc
            code = code or c
        out = {"results": results}
    else:
        code, out = _run_one(args.graph, args)
    text = json.dumps(stringify(out), indent=2)
    if code and not args.graphs_dir:
        print(f"error: {out['message']}", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
