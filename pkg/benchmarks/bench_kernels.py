"""Time the hot kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is called once per backend to warm up (numba compiles or loads
its cache), then timed over ``--repeat`` runs; the best time is reported.
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction
from pathlib import Path

from feyntope import _accel, graph_lattice, load_graph
from feyntope.numeric import QuadratureConfig, k_integral, momentum_space_amplitude

GRAPHS = Path(__file__).resolve().parent.parent / "graphs"


def _cases():
    tri = load_graph(GRAPHS / "triangle.json")
    bub = load_graph(GRAPHS / "bubble.json")
    a_tri = graph_lattice(tri)
    a_bub = graph_lattice(bub)
    from feyntope._kernels import facet_candidates

    return {
        "facet_candidates (triangle)": lambda: facet_candidates(a_tri.points),
        "K tensor, n=2 (bubble)": lambda: k_integral((Fraction(3, 2), 1, 1), None, a_bub, QuadratureConfig(rel_tol=1e-12)),
        "K tensor, n=3 (triangle)": lambda: k_integral(
            (Fraction(5, 2), 1, 1, 1), None, a_tri, QuadratureConfig(rel_tol=1e-9)
        ),
        "K monte carlo, n=3 (triangle)": lambda: k_integral(
            (Fraction(5, 2), 1, 1, 1), None, a_tri, QuadratureConfig(method="mc", rel_tol=2e-3, seed=1)
        ),
        "momentum oracle (triangle)": lambda: momentum_space_amplitude(
            tri, QuadratureConfig(method="mc", rel_tol=5e-3, max_evals=40_000_000, seed=1)
        ),
    }


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    cases = _cases()
    width = max(map(len, cases))
    print(f"{'kernel':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    prev = _accel.backend()
    try:
        for name, fn in cases.items():
            row = []
            for b in backends:
                _accel.set_backend(b)
                row.append(_best(fn, args.repeat))
            line = f"{name:<{width}}  " + "  ".join(f"{t * 1e3:>8.1f}ms" for t in row)
            if len(row) > 1:
                line += f"  {row[0] / row[1]:>9.1f}x"
            print(line)
    finally:
        _accel.set_backend(prev)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
