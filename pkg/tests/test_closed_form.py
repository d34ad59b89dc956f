import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.optimize import brentq

from qes_singular import closed_form as cf
from qes_singular.errors import DegenerateParametersError, DomainError
from qes_singular.model import (
    AnsatzExponents,
    Channel,
    PotentialParams,
    PrefactorPoly,
    QesSolution,
    dumps,
)

P = PotentialParams


def quartic(b):
    # k=1 constraint at a=c=1, L=0 reduces to this
    return (b + 5) * (b - 1) * (b + 3) * (b + 9) - 256.0


QUARTIC_ROOTS = (brentq(quartic, 1, 2, xtol=1e-15), brentq(quartic, -10, -9.5, xtol=1e-15))


@pytest.mark.parametrize(
    "params,expected",
    [((1, 1, 1), (-1, -1, 2)), ((4, 0, 9), (-2, -3, 1.5)), ((1, -3, 1), (-1, -1, 0))],
)
def test_exponents(params, expected):
    e = cf.exponents(P(*params))
    assert (e.alpha, e.beta, e.delta) == expected


@pytest.mark.parametrize("alpha,delta,k,expected", [(-1, 2, 0, 5), (-1, 2, 1, 9), (-2, 1.5, 0, 8)])
def test_energy_unconfined(alpha, delta, k, expected):
    assert cf.energy_unconfined(AnsatzExponents(alpha, -1.0, delta), k) == expected


@pytest.mark.parametrize("b,L,expected", [(1, 0, 0), (1, 1, -2), (3, 0, 4)])
def test_k0_residual(b, L, expected):
    assert cf.k0_constraint_residual(P(1, b, 1), L) == pytest.approx(expected, abs=1e-15)


def test_k1_coefficient_examples():
    assert cf.k1_coefficient(P(1, 0, 1), 0) == pytest.approx(3.2, rel=1e-15)
    assert cf.k1_coefficient(P(1, 0, 1), 1) == pytest.approx(16 / 13, rel=1e-15)
    with pytest.raises(DegenerateParametersError):
        cf.k1_coefficient(P(1, 1, 1), 0)


def test_k1_residual_examples():
    assert cf.k1_constraint_residual(P(1, 0, 1), 0) == pytest.approx(-19.55, rel=1e-14)
    for b in QUARTIC_ROOTS:
        assert abs(cf.k1_constraint_residual(P(1, b, 1), 0)) < 1e-12


def test_k2_coefficients_example():
    poly = cf.k2_coefficients(P(1, 0, 1), 0)
    assert poly.g == pytest.approx(3.2)
    assert poly.coeffs[1] == pytest.approx(-32 / 129.4, rel=1e-14)
    assert poly.coeffs[0] == pytest.approx(-0.791345, abs=1e-6)
    with pytest.raises(DegenerateParametersError):
        cf.k2_coefficients(P(1, 1, 1), 0)


def test_k2_residual_examples():
    assert cf.k2_constraint_residual(P(1, 0, 1), 0) == pytest.approx(21.76082, abs=1e-5)
    # exact roots sit a few 1e-7 from the six-decimal values
    for b0 in (2.265309, -14.265309):
        root = brentq(lambda b: cf.k2_constraint_residual(P(1, b, 1), 0), b0 - 1e-4, b0 + 1e-4, xtol=1e-15)
        assert abs(root - b0) < 5e-7
        assert abs(cf.k2_constraint_residual(P(1, root, 1), 0)) < 1e-9


def test_eval_wavefunction_examples():
    sol = cf.build_solution(P(1, 1, 1), Channel(3, 0, 0))
    assert cf.eval_wavefunction(sol, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert cf.eval_wavefunction(sol, 1e-3) == 0.0
    with pytest.raises(DomainError):
        cf.eval_wavefunction(sol, 0.0)
    arr = cf.eval_wavefunction(sol, np.array([1e-3, 1.0]))
    assert arr.shape == (2,) and arr[0] == 0.0


def test_eval_wavefunction_node():
    exp = AnsatzExponents(-1.0, -1.0, 2.0)
    sol = QesSolution(P(1, 1, 1), Channel(3, 0, 1), exp, PrefactorPoly(1, (-4.0,)), 9.0)
    assert cf.eval_wavefunction(sol, 2.0) == 0.0


def test_solution_json_round_trip():
    sol = cf.build_solution(P(1, QUARTIC_ROOTS[0], 1), Channel(3, 0, 1))
    d = json.loads(json.dumps(sol.to_dict()))
    assert QesSolution.from_dict(d) == sol
    assert json.loads(dumps(sol))["channel"]["effective_l"] == 0.0


def test_checked_ratio_scale():
    with pytest.raises(DegenerateParametersError):
        cf.checked_ratio(1.0, (1.0, -1.0), "x")
    assert cf.checked_ratio(1.0, (1.0, -0.5), "x") == 2.0


# properties

finite = st.floats(0.1, 10.0)
bvals = st.floats(-20.0, 20.0)
Ls = st.one_of(st.integers(-3, 10).map(lambda n: Fraction(n, 2)), st.floats(-6.0, 6.0))


def _same(x, y, exact):
    if exact:
        return x == y
    return x == pytest.approx(y, rel=1e-9, abs=1e-9)


@given(finite, bvals, finite, Ls)
def test_l_reflection(a, b, c, L):
    # -L-1 is exact for half-integers; float L picks up rounding
    params = P(a, b, c)
    mirror = -L - 1
    exact = isinstance(L, Fraction)
    assert _same(cf.k0_constraint_residual(params, L), cf.k0_constraint_residual(params, mirror), exact)
    for k in (1, 2):
        try:
            r = cf.constraint_residual(params, L, k)
            poly = cf.prefactor(params, L, k)
        except DegenerateParametersError:
            if exact:
                with pytest.raises(DegenerateParametersError):
                    cf.constraint_residual(params, mirror, k)
            continue
        try:
            r2 = cf.constraint_residual(params, mirror, k)
            poly2 = cf.prefactor(params, mirror, k)
        except DegenerateParametersError:
            assert not exact
            continue
        assert _same(r, r2, exact)
        assert all(_same(x, y, exact) for x, y in zip(poly.coeffs, poly2.coeffs))


@given(finite, bvals, finite, Ls)
def test_a21_equals_g_a22(a, b, c, L):
    params = P(a, b, c)
    try:
        poly = cf.k2_coefficients(params, L)
    except DegenerateParametersError:
        assume(False)
    a22 = poly.coeffs[1]
    sc = math.sqrt(c)
    LL = float(L) * (float(L) + 1.0)
    den = 4 * LL * c * sc + 8 * c * c * math.sqrt(a) - b * b * sc - 4 * c * b - 3 * c * sc
    assert poly.coeffs[0] == pytest.approx(16 * c * c * a22 / den, rel=1e-9, abs=1e-300)


@given(st.integers(0, 2), finite, bvals, finite)
def test_energy_formula(k, a, b, c):
    e = cf.exponents(P(a, b, c))
    assert cf.energy_unconfined(e, k) == pytest.approx(math.sqrt(a) * (1 + 4 * k + 2 * e.delta))
