"""Lattice point set of a graph, its reduction, GKZ data and normalized volume."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from ._rational import fmt_fraction, to_fraction
from .errors import DegenerateConfigurationError, LatticeError
from .graph import GradedPolynomial, Graph, first_symanzik, loop_number, q_polynomial
from .intlinalg import bareiss_det, cofactor_normal, integer_kernel, lattice_index, primitive, rank

Point = tuple[int, ...]

NON_SATURATED = "non-saturated configuration: solution-space dimension claims inapplicable"


@dataclass(frozen=True)
class LatticeSet:
    """Ordered point configuration in ``Z^{n+1}`` with coefficient labels.

    ``values`` holds the coefficient ``P_a`` attached to each point.  The
    unreduced set lives on ``sum(x) = ell + 1``; the reduced one on ``x0 = 1``.
    """

    n: int
    points: tuple[Point, ...]
    labels: tuple[str, ...]
    values: tuple[Fraction, ...]
    ell: int
    reduced: bool = True

    def __post_init__(self):
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if not (len(pts) == len(self.labels) == len(self.values)):
            raise LatticeError("points, labels and values differ in length")
        if len(set(pts)) != len(pts):
            raise LatticeError("duplicate lattice points")
        if len(set(self.labels)) != len(self.labels):
            raise LatticeError("duplicate labels")
        for p in pts:
            if len(p) != self.n + 1:
                raise LatticeError(f"point {p} is not in Z^{self.n + 1}")
            if self.reduced and p[0] != 1:
                raise LatticeError(f"reduced point {p} does not have first coordinate 1")
            if not self.reduced and sum(p) != self.ell + 1:
                raise LatticeError(f"point {p} is off the hyperplane sum = {self.ell + 1}")

    def __len__(self) -> int:
        return len(self.points)

    def matrix(self) -> list[list[int]]:
        """``(n+1) x |A|`` matrix whose columns are the points."""
        return [[p[i] for p in self.points] for i in range(self.n + 1)]

    def value_of(self, label: str) -> Fraction:
        return self.values[self.labels.index(label)]

    def with_values(self, values: Mapping[str, Fraction] | Sequence) -> "LatticeSet":
        if isinstance(values, Mapping):
            vals = tuple(to_fraction(values[l]) for l in self.labels)
        else:
            vals = tuple(values)
        return LatticeSet(self.n, self.points, self.labels, vals, self.ell, self.reduced)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "points": [list(p) for p in self.points],
            "labels": list(self.labels),
            "values": [fmt_fraction(v) for v in self.values],
            "ell": self.ell,
            "reduced": self.reduced,
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "LatticeSet":
        labels = doc["labels"]
        values = doc.get("values") or ["1"] * len(labels)
        return cls(
            int(doc["n"]),
            tuple(tuple(int(x) for x in p) for p in doc["points"]),
            tuple(labels),
            tuple(to_fraction(v) for v in values),
            int(doc.get("ell", 0)),
            bool(doc.get("reduced", True)),
        )


def build_point_set(psi: GradedPolynomial, q: GradedPolynomial) -> LatticeSet:
    """Unreduced points ``(1, S)`` for Psi monomials and ``(0, T)`` for Q monomials."""
    if psi.n_vars != q.n_vars:
        raise LatticeError("psi and q have different variable counts")
    if q.degree != psi.degree + 1:
        raise LatticeError(f"degree mismatch: deg psi = {psi.degree}, deg q = {q.degree}")
    if not q.terms:
        raise LatticeError("q has no monomials (all coefficients vanish)")
    points, labels, values = [], [], []
    for exps, c in psi.terms.items():
        points.append((1,) + exps)
        labels.append(c.label)
        values.append(c.value)
    for exps, c in q.terms.items():
        points.append((0,) + exps)
        labels.append(c.label)
        values.append(c.value)
    return LatticeSet(psi.n_vars, tuple(points), tuple(labels), tuple(values), psi.degree, reduced=False)


def reduce_point(x: Sequence[int], ell: int) -> Point:
    s = sum(x)
    if s % (ell + 1):
        raise LatticeError(f"coordinate sum {s} of {tuple(x)} not divisible by {ell + 1}")
    return (s // (ell + 1),) + tuple(x[1:])


def unreduce_point(r: Sequence[int], ell: int) -> Point:
    """Inverse of :func:`reduce_point` on the sublattice ``sum = multiple of ell+1``."""
    return ((ell + 1) * r[0] - sum(r[1:]),) + tuple(r[1:])


def reduce_lattice(a_raw: LatticeSet, ell: int | None = None) -> LatticeSet:
    """Apply ``r0 = sum(x)/(ell+1)``, ``ri = xi``; every image has ``r0 = 1``."""
    if ell is None:
        ell = a_raw.ell
    pts = tuple(reduce_point(p, ell) for p in a_raw.points)
    # r is injective; a collision would be an upstream bug
    assert len(set(pts)) == len(pts)
    return LatticeSet(a_raw.n, pts, a_raw.labels, a_raw.values, ell, reduced=True)


def graph_lattice(g: Graph, cap: int = 16) -> LatticeSet:
    """Reduced lattice set of a graph with its kinematic coefficients."""
    raw = build_point_set(first_symanzik(g, cap), q_polynomial(g, cap))
    return reduce_lattice(raw, loop_number(g))


def is_saturated(a: LatticeSet) -> bool:
    """True iff the points generate ``Z^{n+1}`` (unit elementary divisors)."""
    return lattice_index(a.matrix()) == 1


def is_full_dimensional(a: LatticeSet) -> bool:
    return rank(a.matrix()) == a.n + 1


@dataclass(frozen=True)
class IntegerRelation:
    coefficients: tuple[int, ...]
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not any(self.coefficients):
            raise LatticeError("zero relation")

    def check(self, a: LatticeSet) -> bool:
        return all(
            sum(c * p[i] for c, p in zip(self.coefficients, a.points)) == 0 for i in range(a.n + 1)
        )

    @property
    def positive(self) -> dict[str, int]:
        return {l: c for l, c in zip(self.labels, self.coefficients) if c > 0}

    @property
    def negative(self) -> dict[str, int]:
        return {l: -c for l, c in zip(self.labels, self.coefficients) if c < 0}

    def box_operator(self) -> str:
        """Text form ``prod d_a^{n_a} - prod d_a^{-n_a}`` of the box operator."""

        def side(part):
            if not part:
                return "1"
            return "*".join(f"d[{l}]" + (f"^{k}" if k > 1 else "") for l, k in part.items())

        return f"{side(self.positive)} - {side(self.negative)}"

    def to_json(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "labels": list(self.labels),
            "operator": self.box_operator(),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "IntegerRelation":
        return cls(tuple(int(c) for c in doc["coefficients"]), tuple(doc["labels"]))


def relation_basis(a: LatticeSet) -> list[IntegerRelation]:
    """Z-basis of the relations ``sum n_a a = 0`` (exact, LLL-shortened)."""
    if len(a) < 2:
        return []
    kernel = integer_kernel(a.matrix())
    return [IntegerRelation(tuple(v), a.labels) for v in kernel]


@dataclass(frozen=True)
class GkzSystem:
    box_operators: tuple[IntegerRelation, ...]
    euler_matrix: tuple[tuple[int, ...], ...]
    beta: tuple[Fraction, ...]
    labels: tuple[str, ...]

    def euler_operators(self) -> list[str]:
        out = []
        for i, row in enumerate(self.euler_matrix):
            terms = [
                (f"{c}*" if c != 1 else "") + f"P[{l}]*d[{l}]"
                for c, l in zip(row, self.labels)
                if c
            ]
            rhs = fmt_fraction(self.beta[i])
            out.append(f"Z{i} = " + (" + ".join(terms) if terms else "0") + f" - ({rhs})")
        return out

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "box_operators": [r.to_json() for r in self.box_operators],
            "euler_matrix": [list(r) for r in self.euler_matrix],
            "euler_operators": self.euler_operators(),
            "beta": [fmt_fraction(b) for b in self.beta],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "GkzSystem":
        return cls(
            tuple(IntegerRelation.from_json(r) for r in doc["box_operators"]),
            tuple(tuple(int(x) for x in row) for row in doc["euler_matrix"]),
            tuple(to_fraction(b) for b in doc["beta"]),
            tuple(doc["labels"]),
        )


def gkz_system(a: LatticeSet, beta: Sequence) -> GkzSystem:
    beta = tuple(to_fraction(b) for b in beta)
    if len(beta) != a.n + 1:
        raise LatticeError(f"beta has length {len(beta)}, expected {a.n + 1}")
    return GkzSystem(
        tuple(relation_basis(a)),
        tuple(tuple(row) for row in a.matrix()),
        beta,
        a.labels,
    )


def amplitude_beta(d_half, n: int) -> tuple[Fraction, ...]:
    """``(-D/2, -1, ..., -1)`` in ``Q^{n+1}``."""
    return (-to_fraction(d_half),) + (Fraction(-1),) * n


# -- normalized volume -------------------------------------------------------


def _orient(rows: Sequence[Sequence[int]]) -> int:
    d = bareiss_det(rows)
    return (d > 0) - (d < 0)


def _initial_simplex(points: Sequence[Point]) -> list[int] | None:
    chosen: list[int] = []
    for i in range(len(points)):
        trial = chosen + [i]
        if rank([points[j] for j in trial]) == len(trial):
            chosen = trial
            if len(chosen) == len(points[0]):
                return chosen
    return None


def _placing(points: Sequence[Point]):
    pts = [tuple(p) for p in points]
    dim = len(pts[0])  # homogeneous dimension d+1
    start = _initial_simplex(pts)
    if start is None:
        raise DegenerateConfigurationError("points do not affinely span their ambient space")
    # interior reference: sum of the start vertices, a positive multiple of the centroid
    ref = tuple(sum(pts[i][k] for i in start) for k in range(dim))
    simplices = [tuple(start)]
    boundary: dict[tuple[int, ...], int] = {}
    for drop in range(dim):
        face = tuple(v for k, v in enumerate(start) if k != drop)
        boundary[face] = _orient([pts[v] for v in face] + [ref])
    used = set(start)
    for i, p in enumerate(pts):
        if i in used:
            continue
        visible = [
            f for f, s in boundary.items() if _orient([pts[v] for v in f] + [p]) == -s
        ]
        if not visible:
            continue
        used.add(i)
        ridge_count: dict[tuple[int, ...], int] = {}
        for f in visible:
            simplices.append(tuple(sorted(f + (i,))))
            del boundary[f]
            for ridge in itertools.combinations(f, dim - 2):
                ridge_count[ridge] = ridge_count.get(ridge, 0) + 1
        for ridge, cnt in ridge_count.items():
            if cnt != 1:
                continue
            face = tuple(sorted(ridge + (i,)))
            s = _orient([pts[v] for v in face] + [ref])
            if s == 0:
                continue
            boundary[face] = s
    return simplices, boundary, ref


def placing_triangulation(points: Sequence[Point]) -> list[tuple[int, ...]]:
    """Placing (beneath-beyond) triangulation of homogeneous points ``(1, x)``.

    Returns full-dimensional simplices as index tuples.  Points are inserted
    in order; a point inside the current hull is skipped.
    """
    return _placing(points)[0]


def hull_normals(points: Sequence[Point]) -> list[tuple[int, ...]]:
    """Primitive inward facet normals of the cone over ``points`` (exact).

    Read off the boundary simplices of the placing triangulation; coplanar
    boundary simplices share a normal and collapse to one facet.
    """
    pts = [tuple(p) for p in points]
    _, boundary, ref = _placing(pts)
    out: dict[tuple[int, ...], None] = {}
    for face in boundary:
        w = cofactor_normal([pts[v] for v in face])
        if sum(x * y for x, y in zip(w, ref)) < 0:
            w = [-x for x in w]
        out[tuple(primitive(w))] = None
    return sorted(out)


def normalized_volume(a: LatticeSet) -> int:
    """``n!`` times the Euclidean volume of ``conv(A)``; 0 if degenerate."""
    if not a.reduced:
        raise LatticeError("normalized_volume expects a reduced lattice set")
    if len(a) == 0 or not is_full_dimensional(a):
        return 0
    total = 0
    for simplex in placing_triangulation(a.points):
        total += abs(bareiss_det([a.points[v] for v in simplex]))
    return total


def euclidean_volume(a: LatticeSet) -> Fraction:
    return Fraction(normalized_volume(a), factorial(a.n))
