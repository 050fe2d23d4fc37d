"""Univariate polynomials and rational functions in eps over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from ._rational import fmt_fraction, to_fraction


def _trim(c: Sequence[Fraction]) -> tuple[Fraction, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    """Coefficients in increasing degree; the zero polynomial has none."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _trim(Fraction(c) for c in coeffs))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def linear(cls, c0, c1) -> "Poly":
        return cls((c0, c1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        """Order of vanishing at 0 (-1 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if isinstance(other, (int, Fraction)):
            return Poly(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.coeffs[-1]
        for k in range(len(q) - 1, -1, -1):
            f = rem[k + other.degree] / lead
            q[k] = f
            if f:
                for j, c in enumerate(other.coeffs):
                    rem[k + j] -= f * c
        return Poly(q), Poly(rem)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * (1 / self.coeffs[-1])

    def shift_out_eps(self) -> tuple[int, "Poly"]:
        """Write ``p = eps^k q`` with ``q(0) != 0``."""
        k = self.valuation
        if k <= 0:
            return max(k, 0), self
        return k, Poly(self.coeffs[k:])

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("eps" if i == 1 else f"eps^{i}")
            if mono and c == 1:
                parts.append(mono)
            elif mono:
                parts.append(f"({c})*{mono}")
            else:
                parts.append(f"({c})")
        return " + ".join(parts)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            if k * k != n:
                out.append(n // k)
        k += 1
    return out


def _deflate(p: Poly, r: Fraction) -> Poly:
    """``p / (eps - r)`` by synthetic division; ``p(r)`` must vanish."""
    c = p.coeffs
    out = [Fraction(0)] * (len(c) - 1)
    acc = Fraction(0)
    for i in range(len(c) - 1, 0, -1):
        acc = acc * r + c[i]
        out[i - 1] = acc
    return Poly(out)


def split_linear(p: Poly) -> tuple[Fraction, dict[Fraction, int], Poly]:
    """Write ``p = lead * prod (eps - r)^m * rest`` with ``rest`` monic and free of rational roots."""
    if p.is_zero():
        raise ZeroDivisionError("zero polynomial has no factorisation")
    roots: dict[Fraction, int] = {}
    k, p = p.shift_out_eps()
    if k:
        roots[Fraction(0)] = k
    while p.degree > 0:
        if p.degree == 1:
            r = -p.coeffs[0] / p.coeffs[1]
            roots[r] = roots.get(r, 0) + 1
            p = Poly.const(p.coeffs[1])
            break
        found = _rational_root(p)
        if found is None:
            break
        roots[found] = roots.get(found, 0) + 1
        p = _deflate(p, found)
    lead = p.coeffs[-1]
    return lead, roots, p.monic()


def _rational_root(p: Poly) -> Fraction | None:
    # rational root theorem on the integer-scaled polynomial
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    for q in _divisors(ints[-1]):
        for a in _divisors(ints[0]):
            for r in (Fraction(a, q), Fraction(-a, q)):
                if p(r) == 0:
                    return r
    return None


def _expand_roots(roots) -> Poly:
    out = Poly.const(1)
    for r, m in roots:
        lin = Poly.linear(-r, 1)
        for _ in range(m):
            out = out * lin
    return out


_ONE = Poly.const(1)


@dataclass(frozen=True)
class RationalFunctionEps:
    """``num / (prod (eps - r)^m * rest)`` in lowest terms.

    Denominators arising from pairings are products of linear factors, so
    the denominator is kept as its rational roots with multiplicities;
    reduction is then a root test and synthetic division instead of a gcd.
    Any factor without rational roots goes into the monic ``rest``.
    """

    num: Poly
    roots: tuple[tuple[Fraction, int], ...]
    rest: Poly

    def __init__(self, num: Poly | Sequence = (), den: Poly | Sequence = (1,)):
        num = num if isinstance(num, Poly) else Poly(num)
        den = den if isinstance(den, Poly) else Poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        lead, roots, rest = split_linear(den)
        self._set(num * Poly.const(1 / lead), roots, rest)

    @classmethod
    def _make(cls, num: Poly, roots: Mapping[Fraction, int], rest: Poly = _ONE) -> "RationalFunctionEps":
        obj = cls.__new__(cls)
        obj._set(num, dict(roots), rest)
        return obj

    def _set(self, num: Poly, roots: dict[Fraction, int], rest: Poly) -> None:
        if num.is_zero():
            roots, rest = {}, _ONE
        else:
            for r in list(roots):
                m = roots[r]
                while m and num(r) == 0:
                    num = _deflate(num, r)
                    m -= 1
                if m:
                    roots[r] = m
                else:
                    del roots[r]
            if rest.degree > 0:
                g = poly_gcd(num, rest)
                if g.degree > 0:
                    num = num.divmod(g)[0]
                    rest = rest.divmod(g)[0].monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "roots", tuple(sorted(roots.items())))
        object.__setattr__(self, "rest", rest)

    @property
    def den(self) -> Poly:
        return _expand_roots(self.roots) * self.rest

    @classmethod
    def const(cls, c) -> "RationalFunctionEps":
        return cls._make(Poly.const(c), {})

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "RationalFunctionEps") -> "RationalFunctionEps":
        a, b = dict(self.roots), dict(other.roots)
        lcm = {r: max(a.get(r, 0), b.get(r, 0)) for r in a.keys() | b.keys()}
        fa = _expand_roots((r, m - a.get(r, 0)) for r, m in lcm.items())
        fb = _expand_roots((r, m - b.get(r, 0)) for r, m in lcm.items())
        ra, rb = self.rest, other.rest
        if ra.degree > 0 or rb.degree > 0:
            g = poly_gcd(ra, rb)
            fa, fb = fa * rb.divmod(g)[0], fb * ra.divmod(g)[0]
            rest = (ra * rb).divmod(g)[0].monic()
        else:
            rest = _ONE
        return RationalFunctionEps._make(self.num * fa + other.num * fb, lcm, rest)

    def __neg__(self) -> "RationalFunctionEps":
        return RationalFunctionEps._make(-self.num, dict(self.roots), self.rest)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "RationalFunctionEps":
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if isinstance(other, Poly):
            return RationalFunctionEps._make(self.num * other, dict(self.roots), self.rest)
        roots = dict(self.roots)
        for r, m in other.roots:
            roots[r] = roots.get(r, 0) + m
        return RationalFunctionEps._make(self.num * other.num, roots, self.rest * other.rest)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunctionEps":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, RationalFunctionEps):
            return (self * other.den) / other.num
        lead, roots, rest = split_linear(other)
        for r, m in self.roots:
            roots[r] = roots.get(r, 0) + m
        return RationalFunctionEps._make(self.num * Poly.const(1 / lead), roots, self.rest * rest)

    def __call__(self, x) -> Fraction:
        return self.num(x) / self.den(x)

    def pole_order(self) -> int:
        """Order of the pole at eps = 0 (negative for a zero)."""
        if self.is_zero():
            return 0
        return dict(self.roots).get(Fraction(0), 0) - self.num.valuation

    def __str__(self) -> str:
        if not self.roots and self.rest.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def to_json(self) -> dict:
        doc = {
            "num": [fmt_fraction(c) for c in self.num.coeffs],
            "den": [fmt_fraction(c) for c in self.den.coeffs],
            "den_roots": [{"root": fmt_fraction(r), "multiplicity": m} for r, m in self.roots],
        }
        if self.rest.degree > 0:
            doc["den_rest"] = [fmt_fraction(c) for c in self.rest.coeffs]
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "RationalFunctionEps":
        num = Poly(to_fraction(c) for c in doc["num"])
        if "den_roots" in doc:
            roots = {to_fraction(d["root"]): int(d["multiplicity"]) for d in doc["den_roots"]}
            rest = Poly(to_fraction(c) for c in doc.get("den_rest", ["1"]))
            return cls._make(num, roots, rest)
        return cls(num, Poly(to_fraction(c) for c in doc["den"]))


def power_series_div(num: Poly, den: Poly, order: int) -> list[Fraction]:
    """First ``order + 1`` Taylor coefficients of ``num/den`` with ``den(0) != 0``."""
    d = den.coeffs
    if not d or d[0] == 0:
        raise ValueError("denominator vanishes at 0")
    out = []
    n = num.coeffs
    for k in range(order + 1):
        acc = n[k] if k < len(n) else Fraction(0)
        for j in range(1, min(k, len(d) - 1) + 1):
            acc -= d[j] * out[k - j]
        out.append(acc / d[0])
    return out


def laurent_of_rational(r: RationalFunctionEps, min_deg: int, max_deg: int) -> dict[int, Fraction]:
    """Exact Laurent coefficients of ``r`` about 0 for degrees in the window."""
    out = {k: Fraction(0) for k in range(min_deg, max_deg + 1)}
    if r.is_zero():
        return out
    j, ntil = r.num.shift_out_eps()
    k, dtil = r.den.shift_out_eps()
    shift = j - k
    if max_deg - shift < 0:
        return out
    series = power_series_div(ntil, dtil, max_deg - shift)
    for m in range(min_deg, max_deg + 1):
        i = m - shift
        if 0 <= i < len(series):
            out[m] = series[i]
    return out
