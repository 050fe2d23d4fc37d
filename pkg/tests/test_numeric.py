import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from feyntope import build_point_set, first_symanzik, graph_lattice, q_polynomial, loop_number
from feyntope.continuation import AffineAlpha
from feyntope.errors import DivergentInputError, NotInteriorError
from feyntope.numeric import (
    KinematicPoint,
    QuadratureConfig,
    i_integral,
    j_integral,
    k_integral,
    k_taylor_coeffs,
    momentum_space_amplitude,
)

F = Fraction


def _raw(g):
    return build_point_set(first_symanzik(g), q_polynomial(g))


def _edge_k(a0, a1, p):
    # int t^a1 (1 + p t)^-a0 dt/t
    return p ** (-a1) * special.beta(a1, a0 - a1)


@pytest.mark.parametrize("alpha", [(2, 1), (3, 1), (F(5, 2), F(3, 2)), (F(7, 3), F(1, 3))])
def test_single_edge_k_closed_form(single_edge, alpha):
    a = graph_lattice(single_edge)
    est = k_integral(alpha, None, a)
    assert est.converged
    ref = _edge_k(float(alpha[0]), float(alpha[1]), float(a.values[1]))
    assert est.value == pytest.approx(ref, rel=1e-9)


def test_single_edge_unit_values(single_edge):
    a = graph_lattice(single_edge)
    p = KinematicPoint({"psi:1": 1, "q:t1": 1})
    assert k_integral((2, 1), p, a).value == pytest.approx(1.0, rel=1e-10)
    assert k_integral((3, 1), p, a).value == pytest.approx(0.5, rel=1e-10)


def test_taylor_coefficients(single_edge):
    # K((2 + eps, 1)) = B(1, 1 + eps) = 1/(1 + eps)
    a = graph_lattice(single_edge)
    p = KinematicPoint({"psi:1": 1, "q:t1": 1})
    ks = k_taylor_coeffs(AffineAlpha((2, 1), (1, 0)), p, a, 1)
    assert ks[0].value == pytest.approx(1.0, rel=1e-10)
    assert ks[1].value == pytest.approx(-1.0, rel=1e-8)


def test_zero_direction_has_no_higher_terms(single_edge):
    a = graph_lattice(single_edge)
    ks = k_taylor_coeffs(AffineAlpha((2, 1), (0, 0)), None, a, 2)
    assert ks[0].value > 0
    assert abs(ks[1].value) < 1e-12 and abs(ks[2].value) < 1e-12


def test_bubble_k_against_dblquad(bubble):
    a = graph_lattice(bubble)

    def f(t2, t1):
        return (t1 + t2 + t1 * t1 + 3 * t1 * t2 + t2 * t2) ** -1.5

    ref, _ = integrate.dblquad(f, 0, np.inf, 0, np.inf, epsabs=0, epsrel=1e-10)
    est = k_integral((F(3, 2), 1, 1), None, a)
    assert est.value == pytest.approx(ref, rel=1e-6)


def test_montecarlo_agrees_with_tensor(bubble):
    a = graph_lattice(bubble)
    alpha = (F(3, 2), 1, 1)
    t = k_integral(alpha, None, a, QuadratureConfig(method="tensor"))
    m = k_integral(alpha, None, a, QuadratureConfig(method="montecarlo", rel_tol=2e-3, seed=7))
    assert m.converged
    assert abs(m.value - t.value) < 5 * m.abs_error + 1e-9


def test_not_interior(bubble):
    a = graph_lattice(bubble)
    with pytest.raises(NotInteriorError):
        k_integral((1, 1, 1), None, a)
    with pytest.raises(NotInteriorError):
        k_integral((F(3, 2), 3, 1), None, a)


@pytest.mark.parametrize(
    "kw",
    [dict(method="simpson"), dict(rel_tol=0), dict(abs_tol=-1), dict(max_evals=0), dict(seed=-1)],
)
def test_quadrature_config_validation(kw):
    with pytest.raises(ValueError):
        QuadratureConfig(**kw)


def test_quadrature_config_aliases():
    assert QuadratureConfig(method="mc").method == "montecarlo"
    assert QuadratureConfig(method="auto").resolve(2) == "tensor"
    assert QuadratureConfig(method="auto").resolve(5) == "montecarlo"
    with pytest.raises(ValueError):
        QuadratureConfig(method="tensor").resolve(4)


def test_kinematic_point_validation(bubble):
    with pytest.raises(ValueError):
        KinematicPoint({"psi:t1": 0})
    with pytest.raises(ValueError):
        KinematicPoint({"psi:t1": 1}).array(graph_lattice(bubble).labels)


def test_j_bubble_unit_exponents(bubble):
    # Q^0 Psi^-1 on the simplex: int_0^1 dt / 1 = 1 since Psi = t1 + t2 = 1 there
    est = j_integral(0, 1, None, (0, 0), a_raw=_raw(bubble))
    assert est.value == pytest.approx(1.0, rel=1e-9)


def test_j_single_point(single_edge):
    est = j_integral(F(1, 2), 1, None, (0,), a_raw=_raw(single_edge))
    assert est.evals == 1
    assert est.value == pytest.approx(2.0 ** 0.5, rel=1e-14)


def test_i_j_relation(bubble):
    raw = _raw(bubble)
    n, ell = raw.n, loop_number(bubble)
    for c1, c2, v in [(0, F(3, 2), (0, 0)), (F(1, 2), F(3, 2), (F(1, 4), F(1, 2)))]:
        s = n + sum(v)
        i = i_integral(c1, c2, v, None, raw)
        j = j_integral(-s + (c2 - c1) * ell, -s + (c2 - c1) * (ell + 1), None, v, a_raw=raw)
        g = math.gamma(float(s + c1 * (ell + 1) - c2 * ell))
        assert i.value == pytest.approx(g * j.value, rel=1e-8)


def test_i_needs_unreduced(bubble):
    with pytest.raises(ValueError):
        i_integral(0, 1, (0, 0), None, graph_lattice(bubble))


@settings(max_examples=12)
@given(
    st.sampled_from([F(1, 2), 2, F(3, 1)]),
    st.sampled_from([1, 2]),
    st.fractions(F(6, 5), F(5, 2), max_denominator=10),
    st.fractions(F(11, 10), F(19, 10), max_denominator=10),
)
def test_euler_homogeneity(bubble, lam, axis, a0, s):
    # P_a -> lam^{a_i} P_a multiplies K by lam^{-alpha_i}
    a = graph_lattice(bubble)
    alpha = (a0, s * a0 / 2, s * a0 / 2)
    vals = dict(zip(a.labels, a.values))
    scaled = {lab: v * F(lam) ** pt[axis] for lab, v, pt in zip(a.labels, a.values, a.points)}
    k1 = k_integral(alpha, KinematicPoint(vals), a).value
    k2 = k_integral(alpha, KinematicPoint(scaled), a).value
    assert k2 == pytest.approx(float(lam) ** (-float(alpha[axis])) * k1, rel=1e-8)


def test_momentum_single_edge(single_edge):
    est = momentum_space_amplitude(single_edge)
    assert est.value == pytest.approx(0.5, rel=1e-15) and est.abs_error == 0


def test_momentum_divergent_raises(bubble_d4):
    with pytest.raises(DivergentInputError):
        momentum_space_amplitude(bubble_d4)


def test_momentum_scale_cap(triangle):
    with pytest.raises(ValueError):
        momentum_space_amplitude(triangle, max_dl=3)


def test_momentum_bubble_d3(bubble):
    est = momentum_space_amplitude(bubble, QuadratureConfig(method="montecarlo", rel_tol=1e-2, seed=3))
    assert est.converged
    assert abs(est.value - 9.1520369647) < 5 * est.abs_error
