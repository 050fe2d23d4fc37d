"""Facets of the Newton cone, convergence classification and resonance tests.

Normals are inward: ``<w, x> >= 0`` on the cone over the reduced lattice
set.  For a 2-connected subgraph ``gamma`` the normal is
``(-loops(gamma), 1_gamma)``, a self-loop ``e`` gives ``(-1, 1_e)`` and the
upper facet is ``(ell+1, -1, ..., -1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Sequence

from ._kernels import facet_candidates
from ._rational import fmt_fraction, to_fraction
from .errors import DegenerateConfigurationError
from .graph import DEFAULT_CAP, Graph, loop_number, two_connected_subgraphs
from .lattice import LatticeSet, hull_normals, is_full_dimensional


@dataclass(frozen=True)
class FacetNormal:
    w: tuple[int, ...]
    kind: str  # "subgraph", "self_loop", "upper" or "hull"
    edges: tuple[str, ...] = ()

    def pair(self, x: Sequence) -> Fraction:
        return sum((wi * to_fraction(xi) for wi, xi in zip(self.w, x)), Fraction(0))

    def to_json(self) -> dict:
        return {"w": list(self.w), "kind": self.kind, "edges": list(self.edges)}

    @classmethod
    def from_json(cls, doc) -> "FacetNormal":
        return cls(tuple(int(x) for x in doc["w"]), doc["kind"], tuple(doc.get("edges", ())))


def facet_normals(g: Graph, cap: int = DEFAULT_CAP) -> list[FacetNormal]:
    """Normals predicted from the graph: 2-connected subgraphs, self-loops, upper."""
    n = g.n_edges
    ell = loop_number(g)
    out: list[FacetNormal] = []
    seen = set()
    for sub in two_connected_subgraphs(g, cap):
        idx = {g.edge_index(e) for e in sub.edges}
        ind = tuple(1 if i in idx else 0 for i in range(n))
        if sub.self_loop:
            w, kind = (-1,) + ind, "self_loop"
        else:
            w, kind = (-sub.loops,) + ind, "subgraph"
        if w not in seen:
            seen.add(w)
            out.append(FacetNormal(w, kind, sub.edges))
    upper = (ell + 1,) + (-1,) * n
    if upper not in seen:
        out.append(FacetNormal(upper, "upper", tuple(e.id for e in g.edges)))
    return out


# above this many candidate hyperplanes the exhaustive search gives way to beneath-beyond
EXHAUSTIVE_LIMIT = 2_000_000


def brute_force_facets(a: LatticeSet, method: str = "auto") -> list[FacetNormal]:
    """Exact facet normals of the cone over ``A``, independent of the graph.

    ``"exhaustive"`` tests every hyperplane through ``n`` points (numba
    kernel); ``"incremental"`` reads them off an exact beneath-beyond hull.
    ``"auto"`` picks the exhaustive search while it stays cheap.
    """
    if not is_full_dimensional(a):
        raise DegenerateConfigurationError("lattice set is not full-dimensional; no facet description")
    if method == "auto":
        method = "exhaustive" if comb(len(a.points), a.n) <= EXHAUSTIVE_LIMIT else "incremental"
    if method == "exhaustive":
        rows = [tuple(int(x) for x in row) for row in facet_candidates(a.points)]
    elif method == "incremental":
        rows = hull_normals(a.points)
    else:
        raise ValueError(f"unknown facet method {method!r}")
    return [FacetNormal(w, "hull") for w in rows]


def cone_normals(g: Graph, a: LatticeSet, cap: int = DEFAULT_CAP) -> list[FacetNormal]:
    """Facet normals used downstream.

    With all masses positive the graph-theoretic description applies;
    otherwise (dropped monomials) the exact hull is computed from ``A``.
    """
    if g.masses_positive:
        return facet_normals(g, cap)
    return brute_force_facets(a)


def normal_set(normals: Sequence[FacetNormal]) -> frozenset[tuple[int, ...]]:
    out = set()
    for f in normals:
        g = 0
        for x in f.w:
            g = gcd(g, x)
        out.add(tuple(x // g for x in f.w) if g else f.w)
    return frozenset(out)


@dataclass(frozen=True)
class ConePosition:
    status: str  # "interior", "boundary" or "exterior"
    pairings: tuple[tuple[FacetNormal, Fraction], ...]
    witnesses: tuple[tuple[FacetNormal, Fraction], ...] = ()

    @property
    def interior(self) -> bool:
        return self.status == "interior"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witnesses": [
                {"facet": f.to_json(), "pairing": fmt_fraction(v)} for f, v in self.witnesses
            ],
        }


def cone_position(alpha: Sequence, normals: Sequence[FacetNormal]) -> ConePosition:
    """Interior iff every inward pairing is strictly positive."""
    alpha = tuple(to_fraction(x) for x in alpha)
    pairs = tuple((f, f.pair(alpha)) for f in normals)
    neg = tuple((f, v) for f, v in pairs if v < 0)
    zero = tuple((f, v) for f, v in pairs if v == 0)
    if neg:
        return ConePosition("exterior", pairs, neg + zero)
    if zero:
        return ConePosition("boundary", pairs, zero)
    return ConePosition("interior", pairs)


def in_numerical_semigroup(target: int, generators: Sequence[int]) -> list[int] | None:
    """Multiplicities representing ``target`` over ``generators``, or None.

    Decided exactly: gcd test, then a DP over ``0..target``.  Targets here
    are facet pairings of ``beta`` and stay small.
    """
    if target < 0:
        return None
    gens = sorted({int(x) for x in generators if x > 0})
    if target == 0:
        return [0] * len(generators)
    if not gens:
        return None
    d = 0
    for x in gens:
        d = gcd(d, x)
    if target % d:
        return None
    # DP with back-pointers; the size is bounded by target, which is small here
    reach = [-1] * (target + 1)
    reach[0] = 0
    for s in range(1, target + 1):
        for x in gens:
            if x <= s and reach[s - x] >= 0:
                reach[s] = x
                break
    if reach[target] < 0:
        return None
    mult = {x: 0 for x in gens}
    s = target
    while s:
        mult[reach[s]] += 1
        s -= reach[s]
    out = []
    for x in generators:
        if x > 0 and mult.get(x, 0):
            out.append(mult[x])
            mult[x] = 0
        else:
            out.append(0)
    return out


def frobenius_bound(generators: Sequence[int]) -> int:
    """Every multiple of the gcd above this value lies in the semigroup."""
    gens = sorted({int(x) for x in generators if x > 0})
    if not gens:
        return 0
    return (gens[0] - 1) * (gens[-1] - 1)


@dataclass(frozen=True)
class ResonanceReport:
    semi_nonresonant: bool
    facet: FacetNormal | None = None
    target: Fraction | None = None
    sigma: tuple[int, ...] | None = None  # multiplicity of each point of A

    def __bool__(self) -> bool:
        return self.semi_nonresonant

    def to_json(self) -> dict:
        doc = {"semi_nonresonant": self.semi_nonresonant}
        if self.facet is not None:
            doc["witness"] = {
                "facet": self.facet.to_json(),
                "pairing": fmt_fraction(self.target),
                "sigma": list(self.sigma),
            }
        return doc


def semi_nonresonant(beta: Sequence, normals: Sequence[FacetNormal], a: LatticeSet) -> ResonanceReport:
    """True iff ``<w, -beta + sigma> != 0`` for every facet ``w`` and ``sigma`` in the semigroup."""
    beta = tuple(to_fraction(x) for x in beta)
    for f in normals:
        t = f.pair(beta)
        if t.denominator != 1 or t < 0:
            continue
        gens = [sum(wi * ai for wi, ai in zip(f.w, p)) for p in a.points]
        rep = in_numerical_semigroup(int(t), gens)
        if rep is not None:
            return ResonanceReport(False, f, t, tuple(rep))
    return ResonanceReport(True)


@dataclass(frozen=True)
class ConvergenceReport:
    converges: bool
    d_half: Fraction
    overall_check: Fraction
    violations: tuple[tuple[FacetNormal, Fraction], ...]
    pole_witnesses: tuple[tuple[FacetNormal, int], ...]
    self_loops: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "converges": self.converges,
            "d_half": fmt_fraction(self.d_half),
            "overall_check": {"value": fmt_fraction(self.overall_check), "required": "> 0"},
            "violations": [
                {"facet": f.to_json(), "pairing": fmt_fraction(v)} for f, v in self.violations
            ],
            "pole_witnesses": [
                {"facet": f.to_json(), "edges": list(f.edges), "value": v}
                for f, v in self.pole_witnesses
            ],
            "self_loop_divergence": list(self.self_loops),
        }

    @classmethod
    def from_json(cls, doc) -> "ConvergenceReport":
        return cls(
            bool(doc["converges"]),
            to_fraction(doc["d_half"]),
            to_fraction(doc["overall_check"]["value"]),
            tuple((FacetNormal.from_json(v["facet"]), to_fraction(v["pairing"])) for v in doc["violations"]),
            tuple((FacetNormal.from_json(v["facet"]), int(v["value"])) for v in doc["pole_witnesses"]),
            tuple(doc.get("self_loop_divergence", ())),
        )


def amplitude_pole_report(g: Graph, d_half, cap: int = DEFAULT_CAP) -> ConvergenceReport:
    """Convergence of the amplitude at ``D/2`` and the predicted pole witnesses.

    Converges iff ``(ell+1) D/2 > |E|`` and ``D/2 loops(gamma) < |E(gamma)|``
    for every 2-connected gamma; any self-loop makes the integral diverge.
    A witness is a gamma with ``D/2 loops(gamma) - |E(gamma)|`` a nonnegative integer.
    """
    dh = to_fraction(d_half)
    alpha = (dh,) + (Fraction(1),) * g.n_edges
    normals = facet_normals(g, cap)
    overall = Fraction(0)
    violations = []
    witnesses = []
    loops = []
    for f in normals:
        v = f.pair(alpha)
        if f.kind == "upper":
            overall = v
            if v <= 0:
                violations.append((f, v))
        elif f.kind == "self_loop":
            loops.extend(f.edges)
            violations.append((f, v))
        else:
            if v <= 0:
                violations.append((f, v))
            # v = |E(gamma)| - D/2 loops(gamma); a pole needs -v in Z>=0
            if -v >= 0 and (-v).denominator == 1 and f.w[0] != 0:
                witnesses.append((f, int(-v)))
    converges = not violations and overall > 0
    return ConvergenceReport(converges, dh, overall, tuple(violations), tuple(witnesses), tuple(loops))
