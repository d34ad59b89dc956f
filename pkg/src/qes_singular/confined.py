"""Closed forms inside an impenetrable wall at q = R (cylinder for D=2, sphere for D=3).

The ansatz gains a factor ``(R^2 - q^2)``, so the wavefunction vanishes at
the wall and both signs of alpha are admissible.  For k = 0 the box radius
follows from the coefficient match; for k = 1 the pair (a1, R^2) does.
Either way one scalar constraint in b remains.
"""

from __future__ import annotations

import math

import numpy as np

from .closed_form import ansatz_values, checked_ratio, energy_unconfined
from .errors import DomainError, NotMappableError
from .model import (
    AnsatzExponents,
    Channel,
    PotentialParams,
    PrefactorPoly,
    QesSolution,
    _energy,
    centrifugal,
)


def exponents_confined(params: PotentialParams, sign: int) -> AnsatzExponents:
    if sign not in (1, -1):
        raise DomainError(f"alpha sign must be +1 or -1, got {sign!r}")
    sc = math.sqrt(params.c)
    return AnsatzExponents(sign * math.sqrt(params.a), -sc, 1.5 + params.b / (2.0 * sc))


def energy_confined(exp: AnsatzExponents, k: int) -> float:
    """``-alpha (5 + 4k + 2 delta)``."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return _energy(exp.alpha, exp.delta, k, confined=True)


def _c32(c: float) -> float:
    return c * math.sqrt(c)


def k0_box_radius(params: PotentialParams, L, alpha: float) -> float:
    """Squared box radius for the nodeless confined state; may come out negative."""
    b, c = params.b, params.c
    c32 = _c32(c)
    return checked_ratio(
        -16.0 * c * c,
        (4.0 * centrifugal(L) * c32, -8.0 * c * c * alpha, -b * b * math.sqrt(c), -4.0 * c * b, -3.0 * c32),
        "confined k=0 radius",
    )


def k0_alpha_constraint_residual(params: PotentialParams, L, R2: float, alpha: float) -> float:
    b, c = params.b, params.c
    c32 = _c32(c)
    rhs = checked_ratio(
        -b * b * math.sqrt(c) - 12.0 * c * b - 35.0 * c32 + 4.0 * centrifugal(L) * c32,
        (16.0 * R2 * c32, 8.0 * c * c),
        "confined k=0 alpha",
    )
    return alpha - rhs


def _k1_bracket(params: PotentialParams, L, alpha: float) -> tuple:
    b, c = params.b, params.c
    c32 = _c32(c)
    return (-8.0 * c * c * alpha, -3.0 * c32, -4.0 * c * b, -b * b * math.sqrt(c), 4.0 * centrifugal(L) * c32)


def k1_a1_from_radius(params: PotentialParams, L, alpha: float, R2: float) -> float:
    """a1 given R^2: ``16c^2 R^2 / (16c^2 + R^2 [...])``."""
    c = params.c
    terms = (16.0 * c * c,) + tuple(R2 * t for t in _k1_bracket(params, L, alpha))
    return checked_ratio(16.0 * c * c * R2, terms, "confined k=1 a1")


def _k1_radius_shift(params: PotentialParams, L, alpha: float) -> float:
    # R^2 = a1 + shift
    b, c = params.b, params.c
    c32 = _c32(c)
    num = -99.0 * c32 - 20.0 * c * b + 4.0 * centrifugal(L) * c32 - 8.0 * c * c * alpha - b * b * math.sqrt(c)
    return checked_ratio(num, (16.0 * c32 * alpha,), "confined k=1 radius")


def k1_radius_from_a1(params: PotentialParams, L, alpha: float, a1: float) -> float:
    return a1 + _k1_radius_shift(params, L, alpha)


def k1_alpha_from_a1_radius(params: PotentialParams, L, a1: float, R2: float) -> float:
    """Right-hand side of the k=1 alpha condition.

    Balancing the q^0 terms puts ``- R^2 c^2`` (not ``- c^2``) next to
    ``a1 (c^2 + 4 R^2 c^(3/2))`` in the denominator.
    """
    b, c = params.b, params.c
    c32 = _c32(c)
    K = 35.0 * c32 + 12.0 * c * b + b * b * math.sqrt(c) - 4.0 * centrifugal(L) * c32
    num = -32.0 * c * c - a1 * K + R2 * K
    return checked_ratio(
        num / 8.0, (a1 * c * c, 4.0 * a1 * R2 * c32, -R2 * c * c), "confined k=1 alpha"
    )


def k1_confined_residuals(params: PotentialParams, L, alpha: float, a1: float, R2: float) -> tuple:
    """``(a1 - rhs_a1, R2 - rhs_R2, alpha - rhs_alpha)``; all zero at a solution."""
    if alpha == 0.0:
        raise DomainError("alpha must be nonzero")
    return (
        a1 - k1_a1_from_radius(params, L, alpha, R2),
        R2 - k1_radius_from_a1(params, L, alpha, a1),
        alpha - k1_alpha_from_a1_radius(params, L, a1, R2),
    )


def k1_radius_candidates(params: PotentialParams, L, alpha: float) -> list:
    """Real ``(R2, a1)`` pairs solving the a1 and R^2 conditions jointly.

    Eliminating a1 leaves ``D R^4 - s D R^2 - 16 c^2 s = 0`` with ``s`` the
    radius shift and ``D`` the bracket of the a1 condition.  Returned largest
    R^2 first; empty when the roots are complex.
    """
    c = params.c
    s = _k1_radius_shift(params, L, alpha)
    bracket = _k1_bracket(params, L, alpha)
    # product of roots = -16 c^2 s / D
    prod = checked_ratio(-16.0 * c * c * s, bracket, "confined k=1 radius quadratic")
    disc = s * s - 4.0 * prod
    if disc < 0.0:
        return []
    big = 0.5 * (s + math.copysign(math.sqrt(disc), s))
    if big == 0.0:
        roots = [0.0, 0.0]
    else:
        roots = sorted([big, prod / big], reverse=True)
    return [(r, r - s) for r in roots]


def build_confined_solution(
    params: PotentialParams, channel: Channel, sign: int, R2: float, a1: float | None = None
) -> QesSolution:
    if not R2 > 0.0:
        raise DomainError(f"box needs R^2 > 0, got {R2}")
    exp = exponents_confined(params, sign)
    if channel.k == 0:
        poly = PrefactorPoly(0)
    elif channel.k == 1:
        if a1 is None:
            a1 = k1_a1_from_radius(params, channel.L, exp.alpha, R2)
        poly = PrefactorPoly(1, (a1,))
    else:
        raise DomainError(f"confined closed forms exist for k <= 1 only, got k={channel.k}")
    return QesSolution(params, channel, exp, poly, energy_confined(exp, channel.k), math.sqrt(R2))


def interior_nodes(sol: QesSolution) -> list:
    """Zeros of F strictly inside the box; the wall itself is not a node."""
    return sol.prefactor.positive_nodes(upper=sol.box_radius)


def eval_confined_wavefunction(sol: QesSolution, q):
    """``(R^2 - q^2) F(q) exp(...)`` for ``0 < q <= R``; exactly 0 at the wall."""
    if not sol.confined:
        raise DomainError("solution has no box radius")
    R = sol.box_radius
    qa = np.asarray(q, dtype=float)
    if np.any(qa <= 0.0) or np.any(qa > R):
        raise DomainError(f"q must lie in (0, {R}]")
    vals = (R - qa) * (R + qa) * ansatz_values(sol, qa)
    return float(vals) if vals.ndim == 0 else vals


def map_confined_to_unconfined(sol_k: QesSolution) -> QesSolution:
    """Absorb the wall factor into F: confined k becomes unconfined k+1.

    Only possible for alpha = -sqrt(a), otherwise the result is not
    normalisable on the half line.
    """
    if not sol_k.confined:
        raise DomainError("expected a confined solution")
    exp = sol_k.exponents
    if not exp.alpha < 0.0:
        raise NotMappableError("alpha = +sqrt(a) grows at infinity; no half-line counterpart")
    R2 = sol_k.box_radius * sol_k.box_radius
    k = sol_k.channel.k
    if k == 0:
        poly = PrefactorPoly(1, (-R2,))
    elif k == 1:
        a1 = sol_k.prefactor.coeffs[0]
        a22 = a1 - R2
        g = -a1 * R2 / a22
        poly = PrefactorPoly(2, (g * a22, a22), g)
    else:
        raise DomainError(f"no mapping for confined k={k}")
    ch = sol_k.channel
    return QesSolution(
        sol_k.params, Channel(ch.dim, ch.l, k + 1), exp, poly, energy_unconfined(exp, k + 1)
    )
