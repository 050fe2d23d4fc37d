"""Feynman graphs, their combinatorics and the Symanzik polynomials.

A graph is a connected multigraph (self-loops allowed) whose edges carry a
squared mass and whose vertices carry Euclidean external momenta.  Edge
``i`` (0-based, in document order) owns the Schwinger variable ``t{i+1}``.

All enumerations are exhaustive over edge subsets and refuse graphs with
more than ``cap`` edges (default 16).
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ._rational import fmt_fraction, to_fraction
from .errors import EnumerationCapError, GraphValidationError, MissingKinematicsError

DEFAULT_CAP = 16

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    mass2: Fraction = Fraction(0)

    @property
    def is_self_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True, eq=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    momenta: Mapping[str, tuple[Fraction, ...]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        _validate(self)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def dim(self) -> int | None:
        """Spacetime dimension of the momentum vectors, if any were given."""
        if not self.momenta:
            return None
        return len(next(iter(self.momenta.values())))

    def momentum(self, v: str) -> tuple[Fraction, ...]:
        if self.momenta is None:
            raise MissingKinematicsError("graph has no external momenta")
        if v in self.momenta:
            return self.momenta[v]
        return (Fraction(0),) * (self.dim or 0)

    def edge_index(self, edge_id: str) -> int:
        for i, e in enumerate(self.edges):
            if e.id == edge_id:
                return i
        raise KeyError(edge_id)

    @property
    def self_loops(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if e.is_self_loop)

    @property
    def masses_positive(self) -> bool:
        return all(e.mass2 > 0 for e in self.edges)


def _validate(g: Graph) -> None:
    if not g.vertices:
        raise GraphValidationError("graph has no vertices")
    if len(set(g.vertices)) != len(g.vertices):
        raise GraphValidationError("duplicate vertex ids")
    vset = set(g.vertices)
    ids = [e.id for e in g.edges]
    if len(set(ids)) != len(ids):
        raise GraphValidationError("duplicate edge ids")
    for e in g.edges:
        if e.source not in vset or e.target not in vset:
            raise GraphValidationError(f"edge {e.id!r} references an unknown vertex")
        if e.mass2 < 0:
            raise GraphValidationError(f"edge {e.id!r} has negative mass2")
    if g.momenta is not None:
        dims = {len(p) for p in g.momenta.values()}
        if len(dims) > 1:
            raise GraphValidationError("momentum vectors have different dimensions")
        for v in g.momenta:
            if v not in vset:
                raise GraphValidationError(f"momentum given for unknown vertex {v!r}")
        if dims:
            (d,) = dims
            total = [sum((p[k] for p in g.momenta.values()), Fraction(0)) for k in range(d)]
            if any(total):
                raise GraphValidationError(
                    "momentum conservation violated: sum of momenta is "
                    + "(" + ", ".join(fmt_fraction(x) for x in total) + ")"
                )
    if _components(len(g.vertices), _endpoint_pairs(g), range(len(g.edges))) != 1:
        raise GraphValidationError("graph is disconnected")


# -- parsing ---------------------------------------------------------------


def parse_graph(document: str | bytes | Mapping) -> Graph:
    """Build a :class:`Graph` from the JSON document format.

    ``{"vertices": [...], "edges": [{"id", "source", "target", "mass2"}...],
    "momenta": {vertex: ["p/q", ...]}}``; rationals are ``"p/q"`` strings
    (plain integers are accepted too).  An optional ``"metric"`` key must be
    ``"euclidean"``.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GraphValidationError(f"malformed JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise GraphValidationError("graph document must be a JSON object")
    unknown = set(document) - {"vertices", "edges", "momenta", "metric", "name"}
    if unknown:
        raise GraphValidationError(f"unknown keys: {sorted(unknown)}")
    metric = document.get("metric", "euclidean")
    if metric != "euclidean":
        raise GraphValidationError(f"only Euclidean kinematics are supported, got metric={metric!r}")
    try:
        vertices = document["vertices"]
        raw_edges = document["edges"]
    except KeyError as exc:
        raise GraphValidationError(f"missing key {exc.args[0]!r}") from None
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise GraphValidationError("'vertices' must be a list of strings")
    if not isinstance(raw_edges, list):
        raise GraphValidationError("'edges' must be a list")
    edges = []
    for k, item in enumerate(raw_edges):
        if not isinstance(item, Mapping):
            raise GraphValidationError(f"edge #{k} is not an object")
        missing = {"id", "source", "target"} - set(item)
        if missing:
            raise GraphValidationError(f"edge #{k} is missing {sorted(missing)}")
        extra = set(item) - {"id", "source", "target", "mass2"}
        if extra:
            raise GraphValidationError(f"edge #{k} has unknown keys {sorted(extra)}")
        try:
            m2 = to_fraction(item.get("mass2", "0"))
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise GraphValidationError(f"edge #{k}: bad mass2: {exc}") from None
        edges.append(Edge(str(item["id"]), str(item["source"]), str(item["target"]), m2))
    momenta = None
    if "momenta" in document and document["momenta"] is not None:
        raw = document["momenta"]
        if not isinstance(raw, Mapping):
            raise GraphValidationError("'momenta' must be an object")
        momenta = {}
        for v, vec in raw.items():
            if not isinstance(vec, list):
                raise GraphValidationError(f"momentum of {v!r} must be a list")
            try:
                momenta[str(v)] = tuple(to_fraction(x) for x in vec)
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise GraphValidationError(f"momentum of {v!r}: {exc}") from None
    return Graph(tuple(vertices), tuple(edges), momenta)


def load_graph(path: str | Path) -> Graph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphValidationError(f"cannot read {path}: {exc}") from None
    return parse_graph(text)


def graph_to_json(g: Graph) -> dict:
    doc = {
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "source": e.source, "target": e.target, "mass2": fmt_fraction(e.mass2)}
            for e in g.edges
        ],
    }
    if g.momenta is not None:
        doc["momenta"] = {v: [fmt_fraction(x) for x in p] for v, p in g.momenta.items()}
    return doc


# -- small graph algorithms --------------------------------------------------


def _endpoint_pairs(g: Graph) -> list[tuple[int, int]]:
    vidx = {v: i for i, v in enumerate(g.vertices)}
    return [(vidx[e.source], vidx[e.target]) for e in g.edges]


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _components(nv: int, pairs: Sequence[tuple[int, int]], edge_ids: Iterable[int]) -> int:
    dsu = _DSU(nv)
    count = nv
    for i in edge_ids:
        u, v = pairs[i]
        if dsu.union(u, v):
            count -= 1
    return count


def _forest_components(nv: int, pairs, subset) -> _DSU | None:
    """Union-find over ``subset``, or None if the subset contains a cycle."""
    dsu = _DSU(nv)
    for i in subset:
        u, v = pairs[i]
        if not dsu.union(u, v):
            return None
    return dsu


def _check_cap(g: Graph, cap: int) -> None:
    if g.n_edges > cap:
        raise EnumerationCapError(f"graph has {g.n_edges} edges, enumeration cap is {cap}")


def loop_number(g: Graph) -> int:
    """First Betti number ``|E| - |V| + 1`` of a connected graph."""
    return len(g.edges) - len(g.vertices) + 1


def _spanning_tree_indices(g: Graph, cap: int) -> list[tuple[int, ...]]:
    _check_cap(g, cap)
    pairs = _endpoint_pairs(g)
    nv = len(g.vertices)
    candidates = [i for i, (u, v) in enumerate(pairs) if u != v]
    trees = []
    for subset in itertools.combinations(candidates, nv - 1):
        if _forest_components(nv, pairs, subset) is not None:
            trees.append(subset)
    return trees


def spanning_trees(g: Graph, cap: int = DEFAULT_CAP) -> list[tuple[str, ...]]:
    """All spanning trees as tuples of edge ids, in lexicographic index order."""
    return [tuple(g.edges[i].id for i in t) for t in _spanning_tree_indices(g, cap)]


@dataclass(frozen=True)
class Cut:
    """Complement of a spanning 2-forest and the vertex bipartition it induces."""

    edges: tuple[str, ...]
    side: frozenset[str]
    other_side: frozenset[str]


def _cut_indices(g: Graph, cap: int) -> list[tuple[tuple[int, ...], frozenset[int]]]:
    _check_cap(g, cap)
    pairs = _endpoint_pairs(g)
    nv = len(g.vertices)
    if nv < 2:
        return []
    candidates = [i for i, (u, v) in enumerate(pairs) if u != v]
    all_edges = set(range(len(pairs)))
    out = []
    for forest in itertools.combinations(candidates, nv - 2):
        dsu = _forest_components(nv, pairs, forest)
        if dsu is None:
            continue
        root0 = dsu.find(0)
        side = frozenset(v for v in range(nv) if dsu.find(v) == root0)
        cut = tuple(sorted(all_edges - set(forest)))
        out.append((cut, side))
    out.sort()
    return out


def cuts(g: Graph, cap: int = DEFAULT_CAP) -> list[Cut]:
    """All cuts: edge sets whose removal leaves exactly two trees.

    Minimality forces exactly two components: with three or more, adding
    back a removed edge between two of them neither closes a loop nor
    reconnects the graph.  ``side`` is the component of the first vertex.
    """
    verts = g.vertices
    result = []
    for cut, side in _cut_indices(g, cap):
        s = frozenset(verts[v] for v in side)
        result.append(Cut(tuple(g.edges[i].id for i in cut), s, frozenset(verts) - s))
    return result


def momentum_square(g: Graph, side: Iterable[str]) -> Fraction:
    """Euclidean norm squared of the total momentum entering ``side``."""
    d = g.dim or 0
    total = [Fraction(0)] * d
    for v in side:
        for k, x in enumerate(g.momentum(v)):
            total[k] += x
    return sum((x * x for x in total), Fraction(0))


# -- polynomials -------------------------------------------------------------


@dataclass(frozen=True)
class Coefficient:
    label: str
    value: Fraction

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"coefficient {self.label} must be positive, got {self.value}")


def monomial_str(exps: Monomial) -> str:
    parts = []
    for i, k in enumerate(exps):
        if k == 1:
            parts.append(f"t{i + 1}")
        elif k > 1:
            parts.append(f"t{i + 1}^{k}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class GradedPolynomial:
    """Homogeneous polynomial in ``t1..tn`` with labelled positive coefficients.

    ``dropped`` lists monomials whose collected coefficient vanished (for
    instance massless kinematics); they carry no lattice point.
    """

    n_vars: int
    degree: int
    terms: Mapping[Monomial, Coefficient]
    dropped: tuple[Monomial, ...] = field(default=())

    def __post_init__(self):
        ordered = dict(sorted(self.terms.items(), reverse=True))
        object.__setattr__(self, "terms", ordered)
        for exps in ordered:
            if len(exps) != self.n_vars:
                raise ValueError(f"monomial {exps} has wrong length (n={self.n_vars})")
            if sum(exps) != self.degree or min(exps, default=0) < 0:
                raise ValueError(f"monomial {exps} is not of degree {self.degree}")

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for exps, c in self.terms.items():
            m = monomial_str(exps)
            if c.value == 1:
                out.append(m)
            elif m == "1":
                out.append(str(c.value))
            else:
                v = str(c.value)
                out.append(f"({v})*{m}" if "/" in v else f"{v}*{m}")
        return " + ".join(out)

    def evaluate(self, t: Sequence[float]) -> float:
        total = 0.0
        for exps, c in self.terms.items():
            term = float(c.value)
            for ti, k in zip(t, exps):
                if k:
                    term *= ti**k
            total += term
        return total

    def to_json(self) -> dict:
        return {
            "n_vars": self.n_vars,
            "degree": self.degree,
            "expr": str(self),
            "terms": [
                {"exponents": list(exps), "label": c.label, "value": fmt_fraction(c.value)}
                for exps, c in self.terms.items()
            ],
            "dropped": [list(e) for e in self.dropped],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "GradedPolynomial":
        terms = {
            tuple(int(k) for k in t["exponents"]): Coefficient(t["label"], to_fraction(t["value"]))
            for t in doc["terms"]
        }
        dropped = tuple(tuple(int(k) for k in e) for e in doc.get("dropped", []))
        return cls(int(doc["n_vars"]), int(doc["degree"]), terms, dropped)


def _complement_vector(n: int, subset: Iterable[int]) -> Monomial:
    inside = set(subset)
    return tuple(0 if i in inside else 1 for i in range(n))


def first_symanzik(g: Graph, cap: int = DEFAULT_CAP) -> GradedPolynomial:
    """Kirchhoff polynomial: sum over spanning trees of the complement monomials."""
    n = g.n_edges
    terms = {}
    for tree in _spanning_tree_indices(g, cap):
        exps = _complement_vector(n, tree)
        terms[exps] = Coefficient("psi:" + monomial_str(exps), Fraction(1))
    return GradedPolynomial(n, loop_number(g), terms)


def q_polynomial(g: Graph, cap: int = DEFAULT_CAP) -> GradedPolynomial:
    """Second Symanzik polynomial plus the mass term, ``P + (sum m_e^2 t_e) Psi``.

    Coefficients of equal monomials are collected; zero totals are dropped.
    """
    if g.momenta is None:
        raise MissingKinematicsError("q_polynomial needs external momenta")
    n = g.n_edges
    coeff: Counter = Counter()
    seen = set()
    for cut, side in _cut_indices(g, cap):
        exps = tuple(1 if i in cut else 0 for i in range(n))
        coeff[exps] += momentum_square(g, (g.vertices[v] for v in side))
        seen.add(exps)
    for tree in _spanning_tree_indices(g, cap):
        base = _complement_vector(n, tree)
        for i, e in enumerate(g.edges):
            exps = tuple(k + (1 if j == i else 0) for j, k in enumerate(base))
            coeff[exps] += e.mass2
            seen.add(exps)
    terms, dropped = {}, []
    for exps in seen:
        value = Fraction(coeff[exps])
        if value > 0:
            terms[exps] = Coefficient("q:" + monomial_str(exps), value)
        else:
            dropped.append(exps)
    return GradedPolynomial(n, loop_number(g) + 1, terms, tuple(sorted(dropped, reverse=True)))


# -- 2-connected subgraphs ---------------------------------------------------


@dataclass(frozen=True)
class Subgraph:
    edges: tuple[str, ...]
    loops: int
    size: int
    self_loop: bool = False


def _is_two_connected(pairs, subset) -> tuple[bool, int]:
    verts = sorted({v for i in subset for v in pairs[i]})
    local = {v: k for k, v in enumerate(verts)}
    lp = [(local[pairs[i][0]], local[pairs[i][1]]) for i in subset]
    nv = len(verts)
    if _components(nv, lp, range(len(lp))) != 1:
        return False, nv
    if nv <= 2:
        return True, nv
    deg = Counter()
    for u, v in lp:
        deg[u] += 1
        deg[v] += 1
    if min(deg.values()) < 2:
        return False, nv
    for cutv in range(nv):
        dsu = _DSU(nv)
        count = nv - 1
        for u, v in lp:
            if u == cutv or v == cutv:
                continue
            if dsu.union(u, v):
                count -= 1
        if count != 1:
            return False, nv
    return True, nv


def two_connected_subgraphs(g: Graph, cap: int = DEFAULT_CAP) -> list[Subgraph]:
    """Every 2-connected loopless edge-subgraph, plus each self-loop on its own.

    Single edges count as 2-connected.  Ordered by size, then edge indices.
    """
    _check_cap(g, cap)
    pairs = _endpoint_pairs(g)
    plain = [i for i, (u, v) in enumerate(pairs) if u != v]
    found = []
    for mask in range(1, 1 << len(plain)):
        subset = tuple(plain[k] for k in range(len(plain)) if mask >> k & 1)
        ok, nv = _is_two_connected(pairs, subset)
        if ok:
            found.append((len(subset), subset, len(subset) - nv + 1, False))
    for i in g.self_loops:
        found.append((1, (i,), 1, True))
    found.sort(key=lambda r: (r[0], r[1]))
    return [
        Subgraph(tuple(g.edges[i].id for i in subset), loops, size, flag)
        for size, subset, loops, flag in found
    ]


def subgraph_loop_number(g: Graph, edge_indices: Iterable[int]) -> int:
    """Betti number of the edge-induced subgraph (any number of components)."""
    pairs = _endpoint_pairs(g)
    subset = list(edge_indices)
    verts = {v for i in subset for v in pairs[i]}
    local = {v: k for k, v in enumerate(sorted(verts))}
    lp = [(local[pairs[i][0]], local[pairs[i][1]]) for i in subset]
    return len(subset) - len(verts) + _components(len(verts), lp, range(len(lp)))


def indicator(g: Graph, edge_ids: Iterable[str]) -> tuple[int, ...]:
    ids = set(edge_ids)
    return tuple(1 if e.id in ids else 0 for e in g.edges)
