"""Enumerate the values of b for which a quasi-exact solution exists.

For fixed (a, c, D, l, k) and wall/sign choice every constraint reduces to
one scalar equation in b.  It is tabulated on a uniform grid, sign changes
are refined with Brent's method, and cells containing a vanishing
denominator are split at the pole so that its sign flip is not mistaken for
a root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from . import closed_form, confined
from .errors import DegenerateParametersError, DomainError
from .model import Channel, PotentialParams, QesSolution, SolverConfig

ROOT_TOL = 1e-9
_MERGE_TOL = 1e-8

AlphaSign = Union[int, str]


@dataclass(frozen=True)
class ScanRequest:
    a: float
    c: float
    dim: int
    l_list: tuple
    k: int
    confined: bool = False
    alpha_sign: AlphaSign = -1
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        PotentialParams(self.a, 0.0, self.c)
        object.__setattr__(self, "l_list", tuple(int(l) for l in self.l_list))
        if not self.l_list:
            raise DomainError("l_list must not be empty")
        for l in self.l_list:
            Channel(self.dim, l, 0)
        kmax = 1 if self.confined else 2
        if self.k not in range(kmax + 1):
            raise DomainError(f"k must be in 0..{kmax} for {'confined' if self.confined else 'unconfined'} scans")
        if self.alpha_sign not in (1, -1, "both"):
            raise DomainError(f"alpha_sign must be +1, -1 or 'both', got {self.alpha_sign!r}")

    @property
    def signs(self) -> tuple:
        if not self.confined:
            return (-1,)
        return (-1, 1) if self.alpha_sign == "both" else (int(self.alpha_sign),)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "c": self.c,
            "dim": self.dim,
            "l_list": list(self.l_list),
            "k": self.k,
            "confined": self.confined,
            "alpha_sign": self.alpha_sign,
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScanRequest":
        sign = d.get("alpha_sign", -1)
        if sign != "both":
            sign = int(sign)
        return cls(
            d["a"],
            d["c"],
            d["dim"],
            tuple(d["l_list"]),
            d["k"],
            bool(d.get("confined", False)),
            sign,
            SolverConfig.from_dict(d.get("config", {})),
        )


@dataclass(frozen=True)
class ScanResult:
    request: ScanRequest
    solutions: tuple
    diagnostics: tuple = ()

    @property
    def roots(self) -> list:
        """Distinct b values carrying a solution, ascending."""
        return _merge(sorted(s.params.b for s in self.solutions))

    def to_dict(self) -> dict:
        return {
            "request": self.request.to_dict(),
            "roots": self.roots,
            "solutions": [s.to_dict() for s in self.solutions],
            "diagnostics": list(self.diagnostics),
        }


def _merge(values: Sequence[float]) -> list:
    out = []
    for v in values:
        if out and abs(v - out[-1]) <= _MERGE_TOL * (1.0 + abs(v)):
            continue
        out.append(v)
    return out


# --------------------------------------------------------------------------
# one scalar constraint per (channel, sign, branch)


@dataclass
class _System:
    """A constraint in b plus the denominators whose zeros are poles of it."""

    residual: Callable[[float], float]
    denominators: Callable[[float], tuple]
    build: Callable[[float], tuple]  # b -> (solution or None, reason)
    label: dict


def _guard(fn):
    def wrapped(b):
        try:
            return fn(b)
        except (DegenerateParametersError, ZeroDivisionError):
            return math.nan

    return wrapped


def _params(a, b, c):
    return PotentialParams(a, b, c)


def _unconfined_system(a, c, channel) -> _System:
    L, k = channel.L, channel.k

    def denominators(b):
        p = _params(a, b, c)
        dens = []
        if k >= 1:
            dens.append(math.fsum(closed_form._k1_denominator_terms(p, L)))
        if k == 2:
            try:
                g = closed_form.k1_coefficient(p, L)
            except DegenerateParametersError:
                g = math.nan
            sa, sc = math.sqrt(a), math.sqrt(c)
            c32 = c * sc
            LL = float(L * (L + 1))
            dens.append(b * b * sc + 12 * c * b - 8 * c * c * sa + (35 + 32 * g * sa - 4 * LL) * c32)
        return tuple(dens)

    def build(b):
        p = _params(a, b, c)
        sol = closed_form.build_solution(p, channel)
        nodes = len(sol.prefactor.positive_nodes())
        if nodes != k:
            return None, f"prefactor has {nodes} positive nodes, expected {k}"
        res = abs(closed_form.constraint_residual(p, L, k))
        if res > ROOT_TOL:
            return None, f"constraint residual {res:.2e} above tolerance"
        return sol, ""

    return _System(
        _guard(lambda b: closed_form.constraint_residual(_params(a, b, c), L, k)),
        denominators,
        build,
        {"l": channel.l, "alpha_sign": -1, "branch": None},
    )


def _confined_k0_system(a, c, channel, sign) -> _System:
    L = channel.L
    alpha = sign * math.sqrt(a)
    c32 = c * math.sqrt(c)

    def radius2(b):
        return confined.k0_box_radius(_params(a, b, c), L, alpha)

    def residual(b):
        p = _params(a, b, c)
        return confined.k0_alpha_constraint_residual(p, L, radius2(b), alpha)

    def denominators(b):
        terms = (
            4.0 * float(L * (L + 1)) * c32,
            -8.0 * c * c * alpha,
            -b * b * math.sqrt(c),
            -4.0 * c * b,
            -3.0 * c32,
        )
        d20 = math.fsum(terms)
        R2 = -16.0 * c * c / d20 if d20 != 0.0 else math.nan
        return d20, 16.0 * R2 * c32 + 8.0 * c * c

    def build(b):
        p = _params(a, b, c)
        R2 = radius2(b)
        if not R2 > 0.0:
            return None, f"R^2 = {R2:.6g} is not positive"
        res = abs(confined.k0_alpha_constraint_residual(p, L, R2, alpha))
        if res > ROOT_TOL:
            return None, f"constraint residual {res:.2e} above tolerance"
        return confined.build_confined_solution(p, channel, sign, R2), ""

    return _System(_guard(residual), denominators, build, {"l": channel.l, "alpha_sign": sign, "branch": None})


def _confined_k1_system(a, c, channel, sign, branch) -> _System:
    L = channel.L
    alpha = sign * math.sqrt(a)

    def pair(b):
        cands = confined.k1_radius_candidates(_params(a, b, c), L, alpha)
        return cands[branch] if cands else None

    def residual(b):
        pr = pair(b)
        if pr is None:
            return math.nan
        R2, a1 = pr
        return alpha - confined.k1_alpha_from_a1_radius(_params(a, b, c), L, a1, R2)

    def denominators(b):
        p = _params(a, b, c)
        d22 = math.fsum(confined._k1_bracket(p, L, alpha))
        try:
            pr = pair(b)
        except DegenerateParametersError:
            pr = None
        if pr is None:
            return d22, math.nan
        R2, a1 = pr
        c32 = c * math.sqrt(c)
        return d22, a1 * c * c + 4.0 * a1 * R2 * c32 - R2 * c * c

    def build(b):
        p = _params(a, b, c)
        pr = pair(b)
        if pr is None:
            return None, "no real (a1, R^2) pair"
        R2, a1 = pr
        if not R2 > 0.0:
            return None, f"R^2 = {R2:.6g} is not positive"
        res = max(abs(r) for r in confined.k1_confined_residuals(p, L, alpha, a1, R2))
        if res > ROOT_TOL:
            return None, f"constraint residual {res:.2e} above tolerance"
        sol = confined.build_confined_solution(p, channel, sign, R2, a1)
        nodes = len(confined.interior_nodes(sol))
        if nodes != 1:
            return None, f"{nodes} interior nodes inside R = {sol.box_radius:.6g}, expected 1"
        return sol, ""

    return _System(
        _guard(residual), _guard_tuple(denominators), build, {"l": channel.l, "alpha_sign": sign, "branch": branch}
    )


def _guard_tuple(fn):
    def wrapped(b):
        try:
            return fn(b)
        except (DegenerateParametersError, ZeroDivisionError):
            return (math.nan,)

    return wrapped


def _systems(request: ScanRequest, l: int) -> list:
    channel = Channel(request.dim, l, request.k)
    if not request.confined:
        return [_unconfined_system(request.a, request.c, channel)]
    out = []
    for sign in request.signs:
        if request.k == 0:
            out.append(_confined_k0_system(request.a, request.c, channel, sign))
        else:
            for branch in (0, 1):
                out.append(_confined_k1_system(request.a, request.c, channel, sign, branch))
    return out


# --------------------------------------------------------------------------
# bracketing


def _finite_end(f, x, toward):
    """Value at x, nudged toward the cell interior if undefined there."""
    fx = f(x)
    if math.isfinite(fx):
        return x, fx
    for frac in (1e-9, 1e-6, 1e-3):
        xn = x + (toward - x) * frac
        fx = f(xn)
        if math.isfinite(fx):
            return xn, fx
    return x, math.nan


def _pole_points(system, x0, x1, d0, d1) -> list:
    poles = []
    for j, (u, v) in enumerate(zip(d0, d1)):
        if math.isfinite(u) and math.isfinite(v) and u * v < 0.0:
            g = lambda b, j=j: system.denominators(b)[j]  # noqa: E731
            try:
                poles.append(brentq(g, x0, x1, xtol=1e-14 * (1.0 + abs(x0))))
            except ValueError:
                poles.append(0.5 * (x0 + x1))
    return sorted(poles)


def find_roots(system: _System, lo: float, hi: float, steps: int) -> tuple:
    """All sign changes of ``system.residual`` in [lo, hi], pole-free and refined.

    Returns ``(roots, stats)``.
    """
    xs = np.linspace(lo, hi, steps + 1)
    fs = [system.residual(float(x)) for x in xs]
    ds = [system.denominators(float(x)) for x in xs]
    stats = {"cells": steps, "sign_changes": 0, "poles_skipped": 0, "undefined_cells": 0}
    roots = []
    for i in range(steps):
        x0, x1 = float(xs[i]), float(xs[i + 1])
        if fs[i] == 0.0:
            roots.append(x0)
            continue
        pieces = [(x0, x1)]
        poles = _pole_points(system, x0, x1, ds[i], ds[i + 1]) if len(ds[i]) == len(ds[i + 1]) else []
        if poles:
            stats["poles_skipped"] += len(poles)
            edges = [x0]
            for p in poles:
                eta = 1e-9 * (1.0 + abs(p))
                edges += [p - eta, p + eta]
            edges.append(x1)
            pieces = [(edges[j], edges[j + 1]) for j in range(0, len(edges), 2) if edges[j + 1] > edges[j]]
        for a_, b_ in pieces:
            a_, fa = _finite_end(system.residual, a_, b_)
            b_, fb = _finite_end(system.residual, b_, a_)
            if not (math.isfinite(fa) and math.isfinite(fb)):
                stats["undefined_cells"] += 1
                continue
            if fa * fb >= 0.0:
                continue
            stats["sign_changes"] += 1
            try:
                r = brentq(system.residual, a_, b_, xtol=4e-16 * (1.0 + abs(a_)), rtol=1e-15, maxiter=200)
            except ValueError:
                continue
            fr = system.residual(r)
            if math.isfinite(fr) and abs(fr) <= ROOT_TOL:
                roots.append(r)
            else:
                stats["poles_skipped"] += 1
    return _merge(sorted(roots)), stats


def scan_b(request: ScanRequest) -> ScanResult:
    """Find every b in ``[-bracket_range, bracket_range]`` giving a quasi-exact solution."""
    cfg = request.config
    solutions = []
    diagnostics = []
    for l in request.l_list:
        for system in _systems(request, l):
            roots, stats = find_roots(system, -cfg.bracket_range, cfg.bracket_range, cfg.bracket_steps)
            accepted, rejected = [], []
            for b in roots:
                sol, reason = system.build(b)
                if sol is None:
                    rejected.append({"b": b, "reason": reason})
                else:
                    solutions.append(sol)
                    accepted.append(b)
            diagnostics.append({**system.label, **stats, "roots": accepted, "rejected": rejected})
    solutions = _dedupe(solutions)
    return ScanResult(request, tuple(solutions), tuple(diagnostics))


def _sort_key(sol: QesSolution):
    return (sol.channel.l, sol.exponents.alpha, sol.params.b, sol.box_radius or 0.0)


def _dedupe(solutions: list) -> list:
    solutions = sorted(solutions, key=_sort_key)
    out = []
    for s in solutions:
        if out:
            t = out[-1]
            same = (
                t.channel == s.channel
                and t.exponents.alpha == s.exponents.alpha
                and abs(t.params.b - s.params.b) <= _MERGE_TOL * (1.0 + abs(s.params.b))
                and (t.box_radius is None) == (s.box_radius is None)
                and (s.box_radius is None or abs(t.box_radius - s.box_radius) <= 1e-6 * s.box_radius)
            )
            if same:
                continue
        out.append(s)
    return out


def enumerate_table(requests: Sequence[ScanRequest]) -> list:
    return [scan_b(r) for r in requests]


def refine_b(
    a: float, b: float, c: float, dim: int, l: int, k: int, confined_box: bool = False, sign: int = -1,
    window: float = 1e-3,
) -> Optional[QesSolution]:
    """Snap ``b`` to the nearest exact root within ``b +- window``.

    Useful for values quoted to a few decimals.  Returns None if no root is
    found in the window.
    """
    req = ScanRequest(a, c, dim, (l,), k, confined_box, sign)
    best = None
    for system in _systems(req, l):
        roots, _ = find_roots(system, b - window, b + window, 64)
        for r in roots:
            sol, _reason = system.build(r)
            if sol is not None and (best is None or abs(r - b) < abs(best.params.b - b)):
                best = sol
    return best
