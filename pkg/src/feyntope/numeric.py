"""Numerical evaluation of convergent K, I and J integrals.

K(alpha, P) is integrated in x-space (t = e^x), where the log-integrand
``a_t.x - alpha0 * log sum_a P_a e^{a_t.x}`` is concave.  The maximiser is
found by Newton's method and the integrand is rescaled by the Cholesky
factor of the inverse Hessian.  For n <= 3 a tensor double-exponential
(sinh-sinh) trapezoid rule is used with nested step halving; for larger n
importance-sampled Monte Carlo with a multivariate Student-t proposal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels
from .continuation import AffineAlpha
from .errors import DivergentInputError, NotInteriorError, QuadratureToleranceError
from .graph import Graph, loop_number, _spanning_tree_indices, _endpoint_pairs
from .lattice import LatticeSet

METHODS = ("tensor", "montecarlo")


@dataclass(frozen=True)
class KinematicPoint:
    """Positive coefficient values ``P_a`` keyed by lattice label."""

    assignment: Mapping[str, float | Fraction]

    def __post_init__(self):
        for label, v in self.assignment.items():
            if not float(v) > 0:
                raise ValueError(f"P[{label}] = {v} is not strictly positive")

    @classmethod
    def from_lattice(cls, a: LatticeSet) -> "KinematicPoint":
        return cls(dict(zip(a.labels, a.values)))

    def array(self, labels: Sequence[str]) -> np.ndarray:
        try:
            return np.array([float(self.assignment[l]) for l in labels])
        except KeyError as exc:
            raise ValueError(f"no value for coefficient {exc.args[0]!r}") from None


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "tensor"
    rel_tol: float = 1e-9
    abs_tol: float = 1e-15
    max_evals: int = 20_000_000
    seed: int = 0

    def __post_init__(self):
        m = {"mc": "montecarlo"}.get(self.method, self.method)
        if m not in METHODS + ("auto",):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        object.__setattr__(self, "method", m)
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_evals <= 0:
            raise ValueError("max_evals must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def resolve(self, n: int) -> str:
        if self.method == "auto":
            return "tensor" if n <= 3 else "montecarlo"
        if self.method == "tensor" and n > 3:
            raise ValueError("tensor quadrature is limited to n <= 3; use montecarlo")
        return self.method


class Estimate(tuple):
    """``(value, abs_error)`` with ``converged`` and ``evals`` attached."""

    def __new__(cls, value: float, abs_error: float, converged: bool = True, evals: int = 0):
        obj = super().__new__(cls, (float(value), float(abs_error)))
        obj.converged = bool(converged)
        obj.evals = int(evals)
        return obj

    @property
    def value(self) -> float:
        return self[0]

    @property
    def abs_error(self) -> float:
        return self[1]

    def __repr__(self) -> str:
        flag = "" if self.converged else ", not converged"
        return f"Estimate({self[0]!r} +- {self[1]:.2e}{flag})"


# -- shared DE machinery ------------------------------------------------------

_H0 = 0.5
_TMAX = 3.0


def _de_nodes(h: float, kmax_idx: int):
    kidx = np.arange(-kmax_idx, kmax_idx + 1)
    t = kidx * h
    s = np.sinh(t)
    ys = np.sinh(0.5 * np.pi * s)
    js = 0.5 * np.pi * np.cosh(t) * np.cosh(0.5 * np.pi * s)
    return ys, js, (kidx % 2 == 0)


def _tensor_de(level_fn, n: int, nk: int, cfg: QuadratureConfig, min_levels: int = 3):
    """Run nested DE levels until every coefficient meets its tolerance.

    ``level_fn(ys, js, even, skip_even)`` returns raw sums for ``nk``
    coefficients.  Returns ``(values, errors, converged, evals)``.
    """
    h = _H0
    kidx = int(math.ceil(_TMAX / h))
    raw = np.zeros(nk)
    raw_abs = np.zeros(nk)
    shell = 0.0
    evals = 0
    history = []
    level = 0
    while True:
        ys, js, even = _de_nodes(h, kidx)
        sums, abss, sh, cnt = level_fn(ys, js, even, level > 0)
        raw += sums
        raw_abs += abss
        shell += sh
        evals += int(cnt)
        q = raw * h**n
        history.append(q.copy())
        qabs = raw_abs * h**n
        floor = 10.0 * np.finfo(float).eps * qabs + shell * h**n
        if len(history) >= 4:
            d1, d2, d3 = (np.abs(history[-i] - history[-i - 1]) for i in (1, 2, 3))
            # extrapolate from the last difference, but never faster than the
            # previous contraction: one lucky small difference must not
            # certify convergence on its own (coarse levels can stall)
            with np.errstate(divide="ignore", invalid="ignore"):
                fast = np.where(d2 > 0, 10.0 * d1 * d1 / d2, d1)
                prev = np.where(d3 > 0, d1 * d2 / d3, d1)
            err = np.minimum(d1, np.maximum(fast, prev)) + floor
        elif len(history) >= 2:
            err = np.abs(history[-1] - history[-2]) + floor
        else:
            err = np.abs(q) + floor
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.maximum(np.abs(q), 1e-2 * qabs))
        if len(history) >= min_levels and np.all(err <= tol):
            return q, err, True, evals
        next_cost = (4 * kidx + 1) ** n - (2 * kidx + 1) ** n
        if evals + next_cost > cfg.max_evals:
            return q, err, False, evals
        h /= 2
        kidx *= 2
        level += 1


# -- K integral -----------------------------------------------------------------


@lru_cache(maxsize=256)
def _hull_normals(points: tuple) -> tuple:
    rows = _kernels.facet_candidates(points)
    return tuple(tuple(int(x) for x in r) for r in rows)


def check_interior(alpha: Sequence, a: LatticeSet) -> None:
    """Raise :class:`NotInteriorError` unless ``alpha`` is strictly inside ``C_A``."""
    for w in _hull_normals(a.points):
        v = sum(wi * float(x) for wi, x in zip(w, alpha))
        if not v > 0:
            raise NotInteriorError(f"alpha={list(map(str, alpha))} is not interior: <{list(w)}, alpha> = {v:g}")


@dataclass
class _KProblem:
    at: np.ndarray
    logp: np.ndarray
    a_t: np.ndarray
    alpha0: float
    u_t: np.ndarray
    u0: float
    center: np.ndarray = field(default=None)
    phi_star: float = 0.0
    chol: np.ndarray = field(default=None)
    log_det: float = 0.0


def _k_problem(alpha: AffineAlpha, values: np.ndarray, a: LatticeSet) -> _KProblem:
    pts = np.array(a.points, dtype=float)
    base = np.array([float(x) for x in alpha.base])
    u = np.array([float(x) for x in alpha.direction])
    prob = _KProblem(pts[:, 1:].copy(), np.log(values), base[1:].copy(), base[0], u[1:].copy(), u[0])
    _center(prob)
    return prob


def _phi(prob: _KProblem, x: np.ndarray) -> float:
    e = prob.at @ x + prob.logp
    mx = e.max()
    return float(prob.a_t @ x - prob.alpha0 * (mx + np.log(np.exp(e - mx).sum())))


def _center(prob: _KProblem) -> None:
    n = prob.at.shape[1]
    x = np.zeros(n)
    phi = _phi(prob, x)
    for _ in range(200):
        e = prob.at @ x + prob.logp
        w = np.exp(e - e.max())
        w /= w.sum()
        m = w @ prob.at
        g = prob.a_t - prob.alpha0 * m
        hess = prob.alpha0 * ((prob.at.T * w) @ prob.at - np.outer(m, m))
        try:
            step = np.linalg.solve(hess, g)
        except np.linalg.LinAlgError:
            step = g
        t = 1.0
        while True:
            trial = x + t * step
            p2 = _phi(prob, trial)
            if p2 >= phi + 1e-4 * t * float(g @ step) or t < 1e-12:
                break
            t *= 0.5
        x, phi = trial, p2
        if np.max(np.abs(t * step)) < 1e-12 * (1 + np.max(np.abs(x))):
            break
    e = prob.at @ x + prob.logp
    w = np.exp(e - e.max())
    w /= w.sum()
    m = w @ prob.at
    hess = prob.alpha0 * ((prob.at.T * w) @ prob.at - np.outer(m, m))
    cov = np.linalg.inv(hess)
    chol = np.linalg.cholesky(0.5 * (cov + cov.T))
    prob.center = x
    prob.phi_star = phi
    prob.chol = chol
    prob.log_det = float(np.sum(np.log(np.diag(chol))))


def _k_tensor(prob: _KProblem, kmax: int, cfg: QuadratureConfig):
    def level(ys, js, even, skip):
        return _kernels.k_level_sums(
            prob.center, prob.chol, prob.at, prob.logp, prob.a_t, prob.alpha0,
            prob.u_t, prob.u0, prob.phi_star, ys, js, even, kmax, skip,
        )

    n = prob.center.shape[0]
    return _tensor_de(level, n, kmax + 1, cfg)


_MC_NU = 5.0
_MC_SCALE = 1.25
_MC_BATCH = 1 << 14
_MC_MIN_BATCHES = 16


def _student_t(rng: np.random.Generator, size: int, dim: int, nu: float, scale: float):
    """Samples and log-density of an isotropic multivariate Student-t."""
    z = rng.standard_normal((size, dim)) * scale
    chi = rng.chisquare(nu, size) / nu
    y = z / np.sqrt(chi)[:, None]
    r2 = (y * y).sum(axis=1) / (scale * scale)
    logq = (
        math.lgamma(0.5 * (nu + dim)) - math.lgamma(0.5 * nu)
        - 0.5 * dim * math.log(nu * math.pi) - dim * math.log(scale)
        - 0.5 * (nu + dim) * np.log1p(r2 / nu)
    )
    return y, logq


def _batch_loop(sample_fn, nk: int, cfg: QuadratureConfig):
    """Accumulate batch means until ``3 SE`` meets the tolerance or the budget runs out."""
    means = []
    evals = 0
    while True:
        vals = sample_fn(_MC_BATCH)  # (nk, batch)
        means.append(vals.mean(axis=1))
        evals += _MC_BATCH
        if len(means) >= _MC_MIN_BATCHES:
            arr = np.array(means)
            est = arr.mean(axis=0)
            err = 3.0 * arr.std(axis=0, ddof=1) / math.sqrt(len(means))
            tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(est))
            if np.all(err <= tol):
                return est, err, True, evals
            if evals + _MC_BATCH > cfg.max_evals:
                return est, err, False, evals


def _k_montecarlo(prob: _KProblem, kmax: int, cfg: QuadratureConfig):
    rng = np.random.default_rng(cfg.seed)
    n = prob.center.shape[0]
    fact = np.array([math.factorial(k) for k in range(kmax + 1)], dtype=float)

    def sample(size):
        y, logq = _student_t(rng, size, n, _MC_NU, _MC_SCALE)
        x = prob.center[None, :] + y @ prob.chol.T
        phi, lw = _kernels.k_log_integrand(
            np.ascontiguousarray(x), prob.at, prob.logp, prob.a_t, prob.alpha0, prob.u_t, prob.u0
        )
        w = np.exp(phi - prob.phi_star - logq)
        return np.array([w * lw**k / fact[k] for k in range(kmax + 1)])

    return _batch_loop(sample, kmax + 1, cfg)


def k_taylor_coeffs(
    alpha: AffineAlpha | Sequence,
    p: KinematicPoint | None,
    a: LatticeSet,
    kmax: int,
    cfg: QuadratureConfig | None = None,
) -> list[Estimate]:
    """Taylor coefficients ``0..kmax`` of ``eps -> K(alpha + eps u, P)`` at 0."""
    cfg = cfg or QuadratureConfig()
    if not isinstance(alpha, AffineAlpha):
        alpha = AffineAlpha(alpha)
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    check_interior(alpha.base, a)
    values = p.array(a.labels) if p is not None else np.array([float(v) for v in a.values])
    prob = _k_problem(alpha, values, a)
    method = cfg.resolve(a.n)
    if method == "tensor":
        vals, errs, ok, evals = _k_tensor(prob, kmax, cfg)
    else:
        vals, errs, ok, evals = _k_montecarlo(prob, kmax, cfg)
    scale = math.exp(prob.phi_star + prob.log_det)
    return [Estimate(v * scale, e * scale, ok, evals) for v, e in zip(vals, errs)]


def k_taylor_coeff(alpha, p, a, k: int, cfg: QuadratureConfig | None = None) -> Estimate:
    return k_taylor_coeffs(alpha, p, a, k, cfg)[k]


def k_integral(alpha: Sequence, p: KinematicPoint | None, a: LatticeSet, cfg: QuadratureConfig | None = None) -> Estimate:
    """``K(alpha, P) = int t^{alpha_t} / (sum_a P_a t^{a_t})^{alpha0} dt/t`` over the positive orthant."""
    return k_taylor_coeffs(AffineAlpha(alpha), p, a, 0, cfg)[0]


def default_evaluator(cfg: QuadratureConfig | None = None, strict: bool = False) -> Callable:
    """K-evaluator for :func:`continuation.assemble_amplitude_expansion`."""
    cfg = cfg or QuadratureConfig(method="auto", rel_tol=1e-10)

    def evaluate(alpha: AffineAlpha, a: LatticeSet, kmax: int) -> list[Estimate]:
        out = k_taylor_coeffs(alpha, None, a, kmax, cfg)
        if strict and not all(e.converged for e in out):
            raise QuadratureToleranceError(
                f"K at alpha={[str(x) for x in alpha.base]} missed tolerance {cfg.rel_tol:g}"
            )
        return out

    return evaluate


# -- generic positive integrands (I and J) ---------------------------------------


def _split_raw(a_raw: LatticeSet, values: np.ndarray):
    if a_raw.reduced:
        raise ValueError("I and J need the unreduced lattice set (Psi and Q are told apart by x0)")
    pts = np.array(a_raw.points, dtype=float)
    psi = pts[:, 0] == 1
    return (pts[psi, 1:], np.log(values[psi])), (pts[~psi, 1:], np.log(values[~psi]))


def _lse_rows(x, exps, logc):
    e = x @ exps.T + logc[None, :]
    mx = e.max(axis=1)
    return mx + np.log(np.exp(e - mx[:, None]).sum(axis=1))


def _fd_center(logf, n: int, x0=None):
    """Maximise a smooth log-integrand with finite-difference Newton steps."""
    x = np.zeros(n) if x0 is None else np.array(x0, float)
    step_fd = 1e-4

    def grad_hess(x):
        base = logf(x[None, :])[0]
        g = np.zeros(n)
        hmat = np.zeros((n, n))
        eye = np.eye(n) * step_fd
        for i in range(n):
            fp = logf((x + eye[i])[None, :])[0]
            fm = logf((x - eye[i])[None, :])[0]
            g[i] = (fp - fm) / (2 * step_fd)
            hmat[i, i] = (fp - 2 * base + fm) / step_fd**2
            for j in range(i):
                fpp = logf((x + eye[i] + eye[j])[None, :])[0]
                fpm = logf((x + eye[i] - eye[j])[None, :])[0]
                fmp = logf((x - eye[i] + eye[j])[None, :])[0]
                fmm = logf((x - eye[i] - eye[j])[None, :])[0]
                hmat[i, j] = hmat[j, i] = (fpp - fpm - fmp + fmm) / (4 * step_fd**2)
        return base, g, hmat

    f, g, hmat = grad_hess(x)
    for _ in range(300):
        lam = 0.0
        while True:
            try:
                neg = -hmat + lam * np.eye(n)
                np.linalg.cholesky(neg)
                break
            except np.linalg.LinAlgError:
                lam = max(2 * lam, 1e-6 + np.max(np.abs(hmat)) * 1e-3)
        step = np.linalg.solve(neg, g)
        t = 1.0
        while t > 1e-12:
            f2 = logf((x + t * step)[None, :])[0]
            if f2 >= f + 1e-4 * t * float(g @ step):
                break
            t *= 0.5
        x = x + t * step
        f, g, hmat = grad_hess(x)
        if np.max(np.abs(t * step)) < 1e-10:
            break
    neg = -hmat
    try:
        cov = np.linalg.inv(neg)
        chol = np.linalg.cholesky(0.5 * (cov + cov.T))
    except np.linalg.LinAlgError:
        chol = np.eye(n)
    return x, f, chol


def _generic_tensor(logf, n: int, cfg: QuadratureConfig) -> Estimate:
    if n == 0:
        return Estimate(math.exp(logf(np.zeros((1, 0)))[0]), 0.0, True, 1)
    center, fstar, chol = _fd_center(logf, n)
    powers = None

    def level(ys, js, even, skip):
        nonlocal powers
        m = ys.shape[0]
        total = m**n
        powers = m ** np.arange(n)
        sums = np.zeros(1)
        abs_sums = np.zeros(1)
        shell = 0.0
        count = 0
        for start in range(0, total, 1 << 16):
            lin = np.arange(start, min(start + (1 << 16), total))
            idx = (lin[:, None] // powers[None, :]) % m
            if skip:
                idx = idx[~np.all(even[idx], axis=1)]
                if idx.shape[0] == 0:
                    continue
            count += idx.shape[0]
            y = ys[idx]
            x = center[None, :] + y @ chol.T
            with np.errstate(over="ignore", invalid="ignore"):
                val = np.exp(logf(x) - fstar) * np.prod(js[idx], axis=1)
            val = np.where(np.isfinite(val), val, 0.0)
            sums[0] += val.sum()
            abs_sums[0] += np.abs(val).sum()
            on_shell = np.any((idx == 0) | (idx == m - 1), axis=1)
            shell += val[on_shell].sum()
        return sums, abs_sums, shell, count

    vals, errs, ok, evals = _tensor_de(level, n, 1, cfg)
    scale = math.exp(fstar + float(np.sum(np.log(np.diag(chol)))))
    return Estimate(vals[0] * scale, errs[0] * scale, ok, evals)


def i_integral(c1, c2, v: Sequence, p: KinematicPoint | None, a_raw: LatticeSet,
               cfg: QuadratureConfig | None = None) -> Estimate:
    """Direct ``int e^{-Q/Psi} Q^c1 Psi^-c2 t^v dt`` over the positive orthant."""
    cfg = cfg or QuadratureConfig()
    values = p.array(a_raw.labels) if p is not None else np.array([float(x) for x in a_raw.values])
    (pe, pc), (qe, qc) = _split_raw(a_raw, values)
    c1, c2 = float(c1), float(c2)
    vv = np.array([float(x) for x in v]) + 1.0

    def logf(x):
        lq = _lse_rows(x, qe, qc)
        lp = _lse_rows(x, pe, pc)
        return -np.exp(lq - lp) + c1 * lq - c2 * lp + x @ vv

    n = a_raw.n
    if cfg.resolve(n) != "tensor":
        raise ValueError("i_integral supports tensor quadrature only")
    return _generic_tensor(logf, n, cfg)


def j_integral(c, d, p: KinematicPoint | None, v: Sequence, cfg: QuadratureConfig | None = None,
               *, a_raw: LatticeSet) -> Estimate:
    """``int_simplex Q^c / Psi^d t^v Omega`` in the chart ``t = softmax(x, 0)``."""
    cfg = cfg or QuadratureConfig()
    values = p.array(a_raw.labels) if p is not None else np.array([float(x) for x in a_raw.values])
    (pe, pc), (qe, qc) = _split_raw(a_raw, values)
    n = a_raw.n
    c, d = float(c), float(d)
    vv = np.array([float(x) for x in v]) + 1.0
    ell = a_raw.ell

    def logf(x):
        full = np.concatenate([x, np.zeros((x.shape[0], 1))], axis=1)
        mx = np.maximum(full.max(axis=1), 0.0)
        log_z = mx + np.log(np.exp(full - mx[:, None]).sum(axis=1))
        lq = _lse_rows(full, qe, qc) - (ell + 1) * log_z
        lp = _lse_rows(full, pe, pc) - ell * log_z
        logt = full - log_z[:, None]
        return c * lq - d * lp + logt @ vv

    if n == 1:
        val = math.exp(logf(np.zeros((1, 0)))[0])
        return Estimate(val, 0.0, True, 1)
    return _generic_tensor(logf, n - 1, cfg)


# -- momentum-space oracle ---------------------------------------------------------


def _loop_data(g: Graph):
    """Cycle matrix ``C`` (E x l) and tree flow ``q_part`` (E x D) so that ``q = C k + q_part``."""
    pairs = _endpoint_pairs(g)
    nv = len(g.vertices)
    tree = _spanning_tree_indices(g, g.n_edges + 1)[0]
    tree_set = set(tree)
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(nv)}
    for e in tree:
        u, v = pairs[e]
        adj[u].append((v, e))
        adj[v].append((u, e))
    # root the tree at vertex 0
    parent = {0: (None, None)}
    order = [0]
    for v in order:
        for w, e in adj[v]:
            if w not in parent:
                parent[w] = (v, e)
                order.append(w)
    dim = g.dim or 0
    pvec = [np.array([float(x) for x in g.momentum(v)]) if dim else np.zeros(0) for v in g.vertices]
    # momentum flowing from parent to child on each tree edge = -(external momentum of the subtree)
    subtotal = {v: pvec[v].copy() for v in range(nv)}
    for v in reversed(order[1:]):
        subtotal[parent[v][0]] = subtotal[parent[v][0]] + subtotal[v]
    qpart = np.zeros((g.n_edges, dim))
    for v in order[1:]:
        pv, e = parent[v]
        flow = -subtotal[v]  # along parent -> v
        u, _ = pairs[e]
        qpart[e] = flow if u == pv else -flow
    chords = [e for e in range(g.n_edges) if e not in tree_set]
    cyc = np.zeros((g.n_edges, len(chords)))

    def up_steps(v, stop):
        # (child, parent, edge) steps from v up to the vertex ``stop``
        out = []
        while v != stop:
            pv, e = parent[v]
            out.append((v, pv, e))
            v = pv
        return out

    for j, c in enumerate(chords):
        s, t = pairs[c]
        cyc[c, j] = 1.0
        # the cycle runs s -> t along the chord, then back t -> s through the tree
        anc_s = {s}
        v = s
        while parent[v][0] is not None:
            v = parent[v][0]
            anc_s.add(v)
        common = t
        while common not in anc_s:
            common = parent[common][0]
        for child, par, e in up_steps(t, common):
            cyc[e, j] += 1.0 if pairs[e][0] == child else -1.0
        for child, par, e in up_steps(s, common):
            cyc[e, j] += 1.0 if pairs[e][0] == par else -1.0
    return cyc, qpart


def momentum_space_amplitude(g: Graph, cfg: QuadratureConfig | None = None, max_dl: int = 6) -> Estimate:
    """Direct integral of the propagator product over loop momenta (Lebesgue measure d^Dk)."""
    from .polytope import amplitude_pole_report

    cfg = cfg or QuadratureConfig(method="montecarlo", rel_tol=1e-3)
    if g.momenta is None:
        raise ValueError("momentum-space oracle needs external momenta")
    dim = g.dim
    ell = loop_number(g)
    if dim * ell > max_dl:
        raise ValueError(f"oracle scale exceeded: D*l = {dim * ell} > {max_dl}")
    # only the subgraph conditions matter here: large Schwinger parameters are
    # damped by the masses, which is what cancels the upper-facet poles
    report = amplitude_pole_report(g, Fraction(dim, 2))
    if any(f.kind != "upper" for f, _ in report.violations):
        raise DivergentInputError(f"amplitude diverges at D = {dim}")
    cyc, qpart = _loop_data(g)
    mass2 = np.array([float(e.mass2) for e in g.edges])
    if ell == 0:
        k = np.zeros((1, 0))
        val = _kernels.propagator_product(k, cyc, qpart, mass2, dim)[0]
        return Estimate(val, 0.0, True, 1)
    rng = np.random.default_rng(cfg.seed)
    scale = math.sqrt(max(float(np.mean(mass2)), float(np.mean((qpart**2).sum(axis=1))), 1e-2))

    def sample(size):
        parts = []
        logq = np.zeros(size)
        for _ in range(ell):
            y, lq = _student_t(rng, size, dim, 1.0, scale)
            parts.append(y)
            logq += lq
        k = np.ascontiguousarray(np.concatenate(parts, axis=1))
        vals = _kernels.propagator_product(k, cyc, qpart, mass2, dim)
        return (vals * np.exp(-logq))[None, :]

    est, err, ok, evals = _batch_loop(sample, 1, cfg)
    return Estimate(est[0], err[0], ok, evals)
