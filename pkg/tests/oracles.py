"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from feyntope.graph import Edge, Graph


def matrix_tree_count(g: Graph) -> int:
    """Number of spanning trees: determinant of the reduced Laplacian (exact)."""
    nv = len(g.vertices)
    if nv == 1:
        return 1
    vidx = {v: i for i, v in enumerate(g.vertices)}
    lap = [[Fraction(0)] * nv for _ in range(nv)]
    for e in g.edges:
        u, v = vidx[e.source], vidx[e.target]
        if u == v:
            continue
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    m = [row[1:] for row in lap[1:]]
    return int(_det_fraction(m))


def _det_fraction(m):
    m = [[Fraction(x) for x in r] for r in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def normalized_volume_oracle(points) -> int:
    """``n!`` times the volume of the reduced points with the leading 1 dropped.

    Qhull (floating point) is independent of the exact triangulation in the
    package; the result is rounded only after checking it is near an integer.
    """
    from scipy.spatial import ConvexHull

    affine = np.array([p[1:] for p in points], dtype=float)
    d = affine.shape[1]
    if d == 1:
        vol = affine.max() - affine.min()
    else:
        centred = affine - affine.mean(axis=0)
        if np.linalg.matrix_rank(centred) < d:
            return 0
        vol = ConvexHull(affine).volume
    scaled = vol * math.factorial(d)
    out = int(round(scaled))
    assert abs(scaled - out) < 1e-6 * max(1.0, scaled), scaled
    return out


# -- small multigraph enumeration -------------------------------------------


def _canonical(nv, edges):
    best = None
    for perm in itertools.permutations(range(nv)):
        key = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
        if best is None or key < best:
            best = key
    return best


def _connected(nv, edges):
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    return len({find(v) for v in range(nv)}) == 1


def connected_multigraphs(max_edges: int, max_vertices: int, self_loops: bool = True):
    """Connected multigraphs up to isomorphism as ``(nv, edge pair tuple)``."""
    seen = set()
    out = []
    for nv in range(1, max_vertices + 1):
        slots = [(u, v) for u in range(nv) for v in range(u, nv) if self_loops or u != v]
        for m in range(max(nv - 1, 1), max_edges + 1):
            for edges in itertools.combinations_with_replacement(slots, m):
                if not _connected(nv, edges):
                    continue
                key = _canonical(nv, edges)
                if (nv, key) in seen:
                    continue
                seen.add((nv, key))
                out.append((nv, key))
    return out


def make_graph(nv, pairs, mass2=(1,), dim=2, seed=0) -> Graph:
    """Graph with generic rational momenta (summing to zero) and given masses."""
    vertices = tuple(f"v{i + 1}" for i in range(nv))
    edges = tuple(
        Edge(f"e{k + 1}", vertices[u], vertices[v], Fraction(mass2[k % len(mass2)]))
        for k, (u, v) in enumerate(pairs)
    )
    momenta = {}
    total = [Fraction(0)] * dim
    for i in range(nv - 1):
        p = tuple(Fraction((i + 1 + seed) * (j + 2) ** (i + 1) % 7 + 1, j + 1) for j in range(dim))
        momenta[vertices[i]] = p
        total = [a + b for a, b in zip(total, p)]
    momenta[vertices[nv - 1]] = tuple(-x for x in total)
    return Graph(vertices, edges, momenta)


def solve_fraction(rows, rhs):
    """One exact solution ``c`` of ``sum_j c_j rows[j] = rhs``, or None."""
    m = len(rows)
    d = len(rhs)
    aug = [[Fraction(rows[j][i]) for j in range(m)] + [Fraction(rhs[i])] for i in range(d)]
    piv_cols = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, d) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(d):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][m] != 0 for i in range(r, d)):
        return None
    sol = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        sol[c] = aug[i][m]
    return sol


def log_box_integral(logf, n, k, panels_per_decade=4, nodes=24):
    """``int exp(logf(x)) dx`` over ``[-k ln 10, k ln 10]^n`` by tensor Gauss-Legendre.

    ``logf`` receives an ``(m, n)`` array of log-coordinates and must include
    the Jacobian of ``t = e^x``.
    """
    g, w = np.polynomial.legendre.leggauss(nodes)
    half = k * math.log(10.0)
    edges = np.linspace(-half, half, 2 * k * panels_per_decade + 1)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (b - a) * g + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    x1, w1 = np.concatenate(xs), np.concatenate(ws)
    grids = np.meshgrid(*([x1] * n), indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids], axis=1)
    wgt = np.ones(pts.shape[0])
    for gr in np.meshgrid(*([w1] * n), indexing="ij"):
        wgt *= gr.ravel()
    return float(np.sum(wgt * np.exp(logf(pts))))


def k_log_integrand(alpha, a, values=None):
    """Log of the K integrand in log-coordinates, with the ``dt/t`` measure absorbed."""
    pts = np.array(a.points, dtype=float)
    vals = np.ones(len(a.points)) if values is None else np.asarray(values, dtype=float)
    al = np.array([float(x) for x in alpha])

    def logf(x):
        expo = x @ pts[:, 1:].T + np.log(vals)[None, :]
        mx = expo.max(axis=1)
        lse = mx + np.log(np.exp(expo - mx[:, None]).sum(axis=1))
        return x @ al[1:] - al[0] * lse

    return logf
