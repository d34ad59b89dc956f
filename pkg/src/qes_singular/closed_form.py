"""Closed-form quasi-exact solutions on the half line (no box).

The ansatz is ``R(q) = F(q) exp(alpha q^2/2 + beta q^-2/2 + delta ln q)`` with
F a monic polynomial in q^2 of degree k.  Matching powers of q in the radial
equation fixes the exponents and the energy for every k; the remaining
orders give the coefficients of F plus one constraint tying b to (a, c, L).
Closed forms are provided for k = 0, 1, 2.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateParametersError, DomainError
from .model import (
    AnsatzExponents,
    Channel,
    PotentialParams,
    PrefactorPoly,
    QesSolution,
    _energy,
    centrifugal,
)

# exponent below which exp() is treated as exact zero: log(min subnormal) + 10
UNDERFLOW_EXPONENT = math.log(5e-324) + 10.0
DEGENERATE_EPS = 1e-12


def checked_ratio(num: float, den_terms, what: str) -> float:
    """``num / sum(den_terms)``, refusing denominators that cancel to ~0.

    The denominator counts as zero when it is below ``DEGENERATE_EPS`` times
    the sum of the magnitudes of its terms.
    """
    den = math.fsum(den_terms)
    scale = math.fsum(abs(t) for t in den_terms)
    if abs(den) <= DEGENERATE_EPS * scale:
        raise DegenerateParametersError(f"vanishing denominator in {what} (value {den:.3e})")
    return num / den


def exponents(params: PotentialParams) -> AnsatzExponents:
    """alpha = -sqrt(a), beta = -sqrt(c), delta = 3/2 + b/(2 sqrt(c))."""
    sc = math.sqrt(params.c)
    return AnsatzExponents(-math.sqrt(params.a), -sc, 1.5 + params.b / (2.0 * sc))


def energy_unconfined(exp: AnsatzExponents, k: int) -> float:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return _energy(exp.alpha, exp.delta, k, confined=False)


def k0_constraint_residual(params: PotentialParams, L) -> float:
    """``delta^2 - delta - 2 alpha beta - L(L+1)``; zero iff a nodeless solution exists."""
    e = exponents(params)
    return e.delta * e.delta - e.delta - 2.0 * e.alpha * e.beta - centrifugal(L)


def _k1_denominator_terms(params: PotentialParams, L) -> tuple:
    a, b, c = params.a, params.b, params.c
    c32 = c * math.sqrt(c)
    return (
        4.0 * centrifugal(L) * c32,
        8.0 * c * c * math.sqrt(a),
        -b * b * math.sqrt(c),
        -4.0 * c * b,
        -3.0 * c32,
    )


def k1_coefficient(params: PotentialParams, L) -> float:
    """Constant term a1 of ``F = q^2 + a1``.

    ``16c^2 / (4L(L+1)c^(3/2) + 8c^2 sqrt(a) - b^2 sqrt(c) - 4cb - 3c^(3/2))``
    """
    c = params.c
    return checked_ratio(16.0 * c * c, _k1_denominator_terms(params, L), "k=1 coefficient")


def k1_constraint_residual(params: PotentialParams, L) -> float:
    """``4 alpha a1 - (delta^2 + 3 delta + 2 - L(L+1) - 2 beta alpha)``."""
    e = exponents(params)
    a1 = k1_coefficient(params, L)
    d = e.delta
    return 4.0 * e.alpha * a1 - (d * d + 3.0 * d + 2.0 - centrifugal(L) - 2.0 * e.beta * e.alpha)


def k2_coefficients(params: PotentialParams, L) -> PrefactorPoly:
    """Coefficients of ``F = q^4 + a22 q^2 + a21`` with ``a21 = G a22``."""
    a, b, c = params.a, params.b, params.c
    sa, sc = math.sqrt(a), math.sqrt(c)
    c32 = c * sc
    LL = centrifugal(L)
    g = k1_coefficient(params, L)
    a22 = checked_ratio(
        -32.0 * c * c,
        (b * b * sc, 12.0 * c * b, -8.0 * c * c * sa, 35.0 * c32, 32.0 * g * sa * c32, -4.0 * LL * c32),
        "k=2 coefficient",
    )
    return PrefactorPoly(2, (g * a22, a22), g)


def k2_constraint_residual(params: PotentialParams, L) -> float:
    """``4 sqrt(a) a22 + delta^2 + 7 delta + 12 - L(L+1) - 2 sqrt(ac)``."""
    d = exponents(params).delta
    a22 = k2_coefficients(params, L).coeffs[1]
    return (
        4.0 * math.sqrt(params.a) * a22
        + d * d
        + 7.0 * d
        + 12.0
        - centrifugal(L)
        - 2.0 * math.sqrt(params.a * params.c)
    )


def constraint_residual(params: PotentialParams, L, k: int) -> float:
    if k == 0:
        return k0_constraint_residual(params, L)
    if k == 1:
        return k1_constraint_residual(params, L)
    if k == 2:
        return k2_constraint_residual(params, L)
    raise DomainError(f"closed forms exist for k <= 2 only, got k={k}")


def prefactor(params: PotentialParams, L, k: int) -> PrefactorPoly:
    if k == 0:
        return PrefactorPoly(0)
    if k == 1:
        return PrefactorPoly(1, (k1_coefficient(params, L),))
    if k == 2:
        return k2_coefficients(params, L)
    raise DomainError(f"closed forms exist for k <= 2 only, got k={k}")


def build_solution(params: PotentialParams, channel: Channel) -> QesSolution:
    """Assemble the closed-form record for ``channel``.

    The constraint is not enforced here; check it with
    :func:`constraint_residual` before trusting the result.
    """
    exp = exponents(params)
    poly = prefactor(params, channel.L, channel.k)
    return QesSolution(params, channel, exp, poly, energy_unconfined(exp, channel.k))


def _log_envelope(exp: AnsatzExponents, q):
    return 0.5 * exp.alpha * q * q + 0.5 * exp.beta / (q * q) + exp.delta * np.log(q)


def ansatz_values(sol: QesSolution, q):
    """``F(q) exp(...)`` without the box factor; vectorised over ``q``."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0):
        raise DomainError("wavefunction is defined for q > 0 only")
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        s = _log_envelope(sol.exponents, q)
        small = s < UNDERFLOW_EXPONENT
        vals = sol.prefactor(q) * np.exp(np.where(small, 0.0, s))
    return np.where(small, 0.0, vals)


def eval_wavefunction(sol: QesSolution, q):
    """Unnormalised ``R(q)`` of an unconfined solution.

    Returns exact 0 where the exponent underflows (towards q -> 0).  Scalars
    in, float out; arrays in, array out.
    """
    if sol.confined:
        raise DomainError("use eval_confined_wavefunction for a solution in a box")
    vals = ansatz_values(sol, q)
    return float(vals) if vals.ndim == 0 else vals
