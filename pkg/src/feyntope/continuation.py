"""Exact reduction of K(alpha + eps u) to convergent integrals and eps-expansions.

The identity used at every step, for an inward facet normal ``w``::

    <w, alpha + eps u> K(alpha + eps u)
        = (alpha0 + eps u0) * sum_a <w, a> P_a K(alpha + a + eps u)

Each application raises ``<w, .>`` by at least one while no other inward
pairing decreases, so repeated steps reach the interior of the cone.  Eps
stays symbolic; coefficients are exact rational functions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath

from ._accel import thread_count
from ._rational import fmt_float, fmt_fraction, parse_float, to_fraction
from .errors import GammaSeriesError, ReductionLimitError, ResonanceError
from .lattice import LatticeSet
from .polytope import FacetNormal
from .ratfunc import Poly, RationalFunctionEps, laurent_of_rational


@dataclass(frozen=True)
class AffineAlpha:
    """The line ``alpha + eps u`` with exact rational data."""

    base: tuple[Fraction, ...]
    direction: tuple[Fraction, ...]

    def __init__(self, base: Sequence, direction: Sequence | None = None):
        b = tuple(to_fraction(x) for x in base)
        u = tuple(to_fraction(x) for x in direction) if direction is not None else (Fraction(0),) * len(b)
        if len(b) != len(u):
            raise ValueError("base and direction differ in length")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "direction", u)

    def __len__(self) -> int:
        return len(self.base)

    def at(self, eps) -> tuple[Fraction, ...]:
        e = Fraction(eps)
        return tuple(b + e * u for b, u in zip(self.base, self.direction))

    def at_float(self, eps: float) -> tuple[float, ...]:
        return tuple(float(b) + eps * float(u) for b, u in zip(self.base, self.direction))

    def shifted(self, a: Sequence[int]) -> "AffineAlpha":
        return AffineAlpha(tuple(b + x for b, x in zip(self.base, a)), self.direction)

    def pairing(self, w: Sequence[int]) -> Poly:
        return Poly.linear(
            sum((wi * b for wi, b in zip(w, self.base)), Fraction(0)),
            sum((wi * u for wi, u in zip(w, self.direction)), Fraction(0)),
        )

    def alpha0(self) -> Poly:
        return Poly.linear(self.base[0], self.direction[0])

    def to_json(self) -> dict:
        return {
            "base": [fmt_fraction(x) for x in self.base],
            "direction": [fmt_fraction(x) for x in self.direction],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "AffineAlpha":
        return cls(doc["base"], doc["direction"])


def contiguity_step(
    alpha: AffineAlpha, w: FacetNormal | Sequence[int], a: LatticeSet
) -> list[tuple[RationalFunctionEps, int, AffineAlpha]]:
    """One application of the contiguity identity along ``w``.

    Returns ``(coefficient, point index, shifted alpha)`` for every point with
    a positive pairing; the point's ``P_a`` is a separate factor.
    """
    wv = w.w if isinstance(w, FacetNormal) else tuple(w)
    denom = alpha.pairing(wv)
    if denom.is_zero():
        raise ResonanceError(
            f"pairing <{list(wv)}, alpha + eps u> vanishes identically", facet=wv, alpha=alpha
        )
    a0 = alpha.alpha0()
    out = []
    for i, p in enumerate(a.points):
        k = sum(wi * pi for wi, pi in zip(wv, p))
        if k < 0:
            raise ResonanceError(f"{list(wv)} is not an inward normal for point {p}", facet=wv, alpha=alpha)
        if k == 0:
            continue
        coef = RationalFunctionEps(a0 * k, denom)
        out.append((coef, i, alpha.shifted(p)))
    return out


@dataclass(frozen=True)
class ReductionTerm:
    coefficient: RationalFunctionEps
    monomial: tuple[int, ...]  # power of P_a for each point of A, in order
    alpha: AffineAlpha

    def p_factor(self, values: Sequence) -> Fraction:
        out = Fraction(1)
        for v, m in zip(values, self.monomial):
            if m:
                out *= Fraction(v) ** m
        return out

    def to_json(self, labels: Sequence[str]) -> dict:
        return {
            "coefficient": self.coefficient.to_json(),
            "monomial": {l: m for l, m in zip(labels, self.monomial) if m},
            "alpha": self.alpha.to_json(),
        }


@dataclass(frozen=True)
class ReductionStep:
    """One emitted identity: ``K(alpha) = sum coef_j P_{a_j} K(alpha + a_j)``."""

    alpha: AffineAlpha
    facet: FacetNormal
    terms: tuple[tuple[RationalFunctionEps, int, AffineAlpha], ...]


@dataclass(frozen=True)
class ReductionResult:
    terms: tuple[ReductionTerm, ...]
    pole_order_bound: int
    labels: tuple[str, ...]
    steps: tuple[ReductionStep, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "pole_order_bound": self.pole_order_bound,
            "terms": [t.to_json(self.labels) for t in self.terms],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "ReductionResult":
        labels = tuple(doc["labels"])
        terms = tuple(
            ReductionTerm(
                RationalFunctionEps.from_json(t["coefficient"]),
                tuple(int(t["monomial"].get(l, 0)) for l in labels),
                AffineAlpha.from_json(t["alpha"]),
            )
            for t in doc["terms"]
        )
        return cls(terms, int(doc["pole_order_bound"]), labels)


def _choose_facet(alpha: AffineAlpha, normals: Sequence[FacetNormal]) -> FacetNormal | None:
    """Most violated admissible normal, ties broken lexicographically on ``w``."""
    best = None
    blocked = None
    for f in normals:
        p = alpha.pairing(f.w)
        base = p(0)
        if base > 0:
            continue
        if p.is_zero():
            blocked = f
            continue
        key = (base, f.w)
        if best is None or key < best[0]:
            best = (key, f)
    if best is None and blocked is not None:
        raise ResonanceError(
            f"no admissible facet: pairing with {list(blocked.w)} vanishes identically",
            facet=blocked.w,
            alpha=alpha,
        )
    return None if best is None else best[1]


def reduce_to_interior(
    alpha: AffineAlpha,
    a: LatticeSet,
    normals: Sequence[FacetNormal],
    max_steps: int = 20000,
) -> ReductionResult:
    """Expand ``K(alpha + eps u)`` into convergent integrals with exact coefficients.

    Expansion is memoised on the base point, so shared sub-expansions are
    computed once; leaves with the same base and ``P``-monomial are merged.
    """
    for f in normals:
        for p in a.points:
            assert sum(wi * pi for wi, pi in zip(f.w, p)) >= 0, "normal is not inward on A"
    npts = len(a.points)
    memo: dict[tuple[Fraction, ...], dict] = {}
    pole_memo: dict[tuple[Fraction, ...], int] = {}
    steps: list[ReductionStep] = []
    zero_mono = (0,) * npts

    def expand(al: AffineAlpha) -> dict:
        key = al.base
        if key in memo:
            return memo[key]
        f = _choose_facet(al, normals)
        if f is None:
            memo[key] = {(key, zero_mono): RationalFunctionEps.const(1)}
            pole_memo[key] = 0
            return memo[key]
        if len(memo) >= max_steps:
            raise ReductionLimitError(f"reduction exceeded {max_steps} expansion steps")
        memo[key] = None  # cycle guard; progress makes cycles impossible
        step_terms = contiguity_step(al, f, a)
        steps.append(ReductionStep(al, f, tuple(step_terms)))
        before = al.pairing(f.w)(0)
        vanishes = 1 if before == 0 else 0
        acc: dict = {}
        worst = 0
        for coef, i, child in step_terms:
            after = child.pairing(f.w)(0)
            assert after >= before + 1, "contiguity step did not advance the chosen pairing"
            sub = expand(child)
            worst = max(worst, pole_memo[child.base])
            for (leaf, mono), c in sub.items():
                m = list(mono)
                m[i] += 1
                k2 = (leaf, tuple(m))
                prod = coef * c
                acc[k2] = acc[k2] + prod if k2 in acc else prod
        acc = {k: v for k, v in acc.items() if not v.is_zero()}
        memo[key] = acc
        pole_memo[key] = vanishes + worst
        return acc

    result = expand(alpha)
    terms = tuple(
        ReductionTerm(coef, mono, AffineAlpha(leaf, alpha.direction))
        for (leaf, mono), coef in sorted(result.items(), key=lambda kv: (kv[0][0], kv[0][1]))
    )
    return ReductionResult(terms, pole_memo[alpha.base], a.labels, tuple(steps))


# -- Laurent series with error bars -------------------------------------------


@dataclass
class LaurentSeries:
    """Coefficients ``{degree: (value, abs_error)}`` on a contiguous window."""

    coefficients: dict[int, tuple[float, float]]

    @property
    def min_degree(self) -> int:
        return min(self.coefficients) if self.coefficients else 0

    @property
    def max_degree(self) -> int:
        return max(self.coefficients) if self.coefficients else -1

    def __getitem__(self, k: int) -> tuple[float, float]:
        return self.coefficients.get(k, (0.0, 0.0))

    def value(self, k: int) -> float:
        return self[k][0]

    def error(self, k: int) -> float:
        return self[k][1]

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        out: dict[int, list[float]] = {}
        for i, (a, ea) in self.coefficients.items():
            for j, (b, eb) in other.coefficients.items():
                slot = out.setdefault(i + j, [0.0, 0.0])
                slot[0] += a * b
                slot[1] += abs(a) * eb + abs(b) * ea + ea * eb
        return LaurentSeries({k: (v[0], v[1]) for k, v in sorted(out.items())})

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        out = dict(self.coefficients)
        for k, (v, e) in other.coefficients.items():
            v0, e0 = out.get(k, (0.0, 0.0))
            out[k] = (v0 + v, e0 + e)
        return LaurentSeries(dict(sorted(out.items())))

    def scaled(self, c: float) -> "LaurentSeries":
        return LaurentSeries({k: (v * c, e * abs(c)) for k, (v, e) in self.coefficients.items()})

    def truncated(self, min_deg: int, max_deg: int) -> "LaurentSeries":
        return LaurentSeries(
            {k: self[k] for k in range(min_deg, max_deg + 1)}
        )

    def evaluate(self, eps: float) -> float:
        return sum(v * eps**k for k, (v, _) in self.coefficients.items())

    def to_json(self) -> dict:
        return {
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
            "coefficients": {
                str(k): {"value": fmt_float(v), "abs_error": fmt_float(e)}
                for k, (v, e) in sorted(self.coefficients.items())
            },
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "LaurentSeries":
        return cls(
            {
                int(k): (parse_float(c["value"]), parse_float(c["abs_error"]))
                for k, c in doc["coefficients"].items()
            }
        )


# -- Gamma ratio ---------------------------------------------------------------


def _gamma_split(c: Fraction, d: Fraction) -> tuple[RationalFunctionEps, Fraction]:
    """Write ``Gamma(c + d eps) = R(eps) Gamma(c' + d eps)`` with ``c'`` in [1, 2)."""
    r = RationalFunctionEps.const(1)
    while c >= 2:
        c -= 1
        r = r * Poly.linear(c, d)
    while c < 1:
        lin = Poly.linear(c, d)
        if lin.is_zero():
            raise GammaSeriesError(f"Gamma evaluated exactly at its pole {c} (no eps dependence)")
        r = r / lin
        c += 1
    return r, c


def _exp_series(s: list, order: int) -> list:
    # exp of a power series with s[0] included
    out = [mpmath.exp(s[0])] + [mpmath.mpf(0)] * order
    for k in range(1, order + 1):
        acc = mpmath.mpf(0)
        for j in range(1, k + 1):
            if j < len(s):
                acc += j * s[j] * out[k - j]
        out[k] = acc / k
    return out


def _mpq(x: Fraction):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def gamma_ratio_series(
    alpha: AffineAlpha, ell: int, n: int, max_deg: int = 2, include_pi: bool = False, dps: int = 40
) -> LaurentSeries:
    """Laurent series of ``Gamma(a0) / Gamma(-n + a0 (ell+1))`` with ``a0 = alpha0 + eps u0``.

    Each Gamma is pulled back exactly to an argument in [1, 2) with linear
    factors (so zeros and poles are exact), then the analytic remainder is
    expanded via polygamma values.  ``include_pi`` multiplies by
    ``pi^(a0 ell)``.
    """
    a, b = alpha.base[0], alpha.direction[0]
    c2, d2 = -n + a * (ell + 1), b * (ell + 1)
    r1, base1 = _gamma_split(a, b)
    r2, base2 = _gamma_split(c2, d2)
    rat = r1 / r2
    lead = rat.pole_order()
    lo = -lead
    span = max_deg - lo
    if span < 0:
        return LaurentSeries({})
    with mpmath.workdps(dps):
        z1, z2 = _mpq(base1), _mpq(base2)
        log_s = [mpmath.loggamma(z1) - mpmath.loggamma(z2)]
        for k in range(1, span + 1):
            t = mpmath.polygamma(k - 1, z1) * _mpq(b) ** k - mpmath.polygamma(k - 1, z2) * _mpq(d2) ** k
            log_s.append(t / mpmath.factorial(k))
        if include_pi and ell:
            lp = mpmath.log(mpmath.pi)
            log_s[0] += _mpq(a) * ell * lp
            if span >= 1:
                log_s[1] += _mpq(b) * ell * lp
        analytic = _exp_series(log_s, span)
        rc = laurent_of_rational(rat, lo, max_deg)
        out = {}
        for k in range(lo, max_deg + 1):
            acc = mpmath.mpf(0)
            for j in range(lo, k + 1):
                cj = rc.get(j, 0)
                if cj:
                    acc += _mpq(cj) * analytic[k - j]
            val = float(acc)
            out[k] = (val, abs(val) * 2.0**-52)
    return LaurentSeries(out)


# -- assembly ----------------------------------------------------------------

KEvaluator = Callable[[AffineAlpha, LatticeSet, int], list]


@dataclass
class AmplitudeExpansion:
    series: LaurentSeries
    pole_order: int
    reduction: ReductionResult
    gamma: LaurentSeries
    leaf_series: list[LaurentSeries]

    def to_json(self) -> dict:
        doc = self.series.to_json()
        doc["pole_order"] = self.pole_order
        doc["leaves"] = len(self.reduction.terms)
        return doc


def assemble_amplitude_expansion(
    g,
    d_half,
    order: int = 2,
    evaluator: KEvaluator | None = None,
    include_pi: bool = False,
    lattice: LatticeSet | None = None,
    normals: Sequence[FacetNormal] | None = None,
) -> AmplitudeExpansion:
    """Eps-expansion of ``I(0, D/2 + eps)`` up to ``eps^order``.

    ``evaluator(alpha, A, kmax)`` returns Taylor coefficients ``0..kmax`` of
    ``eps -> K(alpha + eps u)`` as ``(value, abs_error)`` pairs.  With
    ``include_pi`` the result is the amplitude itself (times ``pi^{D l/2}``).
    """
    from .graph import loop_number
    from .lattice import graph_lattice
    from .polytope import cone_normals

    if evaluator is None:
        from .numeric import default_evaluator

        evaluator = default_evaluator()
    dh = to_fraction(d_half)
    a = lattice if lattice is not None else graph_lattice(g)
    normals = list(normals) if normals is not None else cone_normals(g, a)
    n, ell = g.n_edges, loop_number(g)
    alpha = AffineAlpha((dh,) + (Fraction(1),) * n, (Fraction(1),) + (Fraction(0),) * n)
    red = reduce_to_interior(alpha, a, normals)
    gam = gamma_ratio_series(alpha, ell, n, max_deg=order + red.pole_order_bound + 1, include_pi=include_pi)
    gmin = min((k for k, (v, _) in gam.coefficients.items() if v != 0), default=0)
    cmin = min(
        (-t.coefficient.pole_order() for t in red.terms if not t.coefficient.is_zero()), default=0
    )
    need = order - gmin  # top degree needed from the reduced sum
    kmax = max(need - cmin, 0)

    def leaf(term: ReductionTerm) -> LaurentSeries:
        coeffs = laurent_of_rational(term.coefficient, cmin, need)
        pf = float(term.p_factor(a.values))
        taylor = evaluator(term.alpha, a, kmax)
        ks = LaurentSeries({k: (float(v), float(e)) for k, (v, e) in enumerate(taylor)})
        cs = LaurentSeries({k: (float(c) * pf, 0.0) for k, c in coeffs.items()})
        return (cs * ks).truncated(cmin, need)

    workers = min(thread_count(), max(len(red.terms), 1))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            leaves = list(pool.map(leaf, red.terms))
    else:
        leaves = [leaf(t) for t in red.terms]
    total = LaurentSeries({k: (0.0, 0.0) for k in range(cmin, need + 1)})
    for s in leaves:
        total = total + s
    series = (gam * total).truncated(gmin + cmin, order)
    pole_order = max(0, -(gmin + cmin))
    assert gmin + cmin >= -n or not red.terms, "pole order exceeds the number of edges"
    return AmplitudeExpansion(series, pole_order, red, gam, leaves)
