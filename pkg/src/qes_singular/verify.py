"""Numerical oracles for the radial equation.

Two independent discretisations of
``-R'' + [L(L+1)/q^2 + V(q)] R = E R`` check the closed forms:

* shooting with Numerov sweeps: node-count bisection on E, then a
  Wronskian match between outward and inward solutions;
* a second-order finite-difference matrix whose eigenvalues are isolated
  by Sturm-sequence bisection, Richardson-extrapolated over two grids.

Neither oracle uses the ansatz.  Only the residual check evaluates a
closed-form wavefunction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq

from . import closed_form, confined
from ._kernels import numerov_sweep, sturm_count
from .errors import BracketFailure, DomainError, GridFailure, ResolutionError
from .model import (
    Channel,
    PotentialParams,
    QesSolution,
    SolverConfig,
    WavefunctionSample,
    centrifugal,
)

# ln of the wavefunction drop required at both ends of the unconfined grid
_TAIL_DECAY = 40.0
# relative magnitude below which samples count as underflowed
UNDERFLOW_GUARD = 1e-10
# stencil step in units of the local length scale
_RESIDUAL_STEP = 1e-4


@dataclass(frozen=True)
class VerificationReport:
    e_closed: Optional[float]
    e_numeric: float
    rel_error: Optional[float]
    residual_norm: Optional[float]
    node_count: int
    method: str
    status: str
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "e_closed": self.e_closed,
            "e_numeric": self.e_numeric,
            "rel_error": self.rel_error,
            "residual_norm": self.residual_norm,
            "node_count": self.node_count,
            "method": self.method,
            "status": self.status,
            "notes": self.notes,
        }


def relative_error(e_ref: float, e_num: float) -> float:
    return abs(e_ref - e_num) / (1.0 + abs(e_ref))


# --------------------------------------------------------------------------
# grids


def effective_potential(params: PotentialParams, L, q):
    return centrifugal(L) / (q * q) + params.potential(q)


def q_min_for(params: PotentialParams, config: SolverConfig) -> float:
    """Inner grid end where ``sqrt(c)/(2 q^2) = 40``."""
    return math.sqrt(math.sqrt(params.c) / (2.0 * _TAIL_DECAY)) * config.q_min_factor


def outer_turning_point(params: PotentialParams, L, energy: float) -> float:
    """Largest q with ``W(q) = energy``; the potential minimum if E lies below it."""
    W = lambda q: effective_potential(params, L, q) - energy  # noqa: E731
    q_hi = max(1.0, math.sqrt(abs(energy) / params.a)) * 2.0
    while W(q_hi) <= 0.0:
        q_hi *= 2.0
    qs = np.geomspace(q_min_for(params, SolverConfig()) * 0.5, q_hi, 4001)
    vals = W(qs)
    below = np.nonzero(vals < 0.0)[0]
    if below.size == 0:
        return float(qs[np.argmin(vals)])
    i = below[-1]
    return brentq(W, qs[i], qs[i + 1], xtol=1e-12)


def q_max_for(params: PotentialParams, L, energy: float, config: SolverConfig) -> float:
    """Outer grid end: the Gaussian tail has dropped by e^-40 past the turning point."""
    qt = outer_turning_point(params, L, energy)
    return math.sqrt(qt * qt + 2.0 * _TAIL_DECAY / math.sqrt(params.a)) * config.q_max_factor


def _domain(params, L, box, energy, config) -> tuple:
    q0 = q_min_for(params, config)
    if box is not None:
        if not box > q0:
            raise DomainError(f"box radius {box} must exceed the inner grid end {q0:.4g}")
        return q0, float(box)
    return q0, max(q_max_for(params, L, energy, config), 2.0 * q0)


def _energy_guess(params: PotentialParams, L, k: int) -> float:
    q = np.geomspace(0.05, 50.0, 4000) * params.c ** 0.25
    w_min = float(np.min(effective_potential(params, L, q)))
    return w_min + math.sqrt(params.a) * (4.0 * k + 6.0)


# --------------------------------------------------------------------------
# shooting


@dataclass(frozen=True)
class ShootingResult:
    energy: float
    q: np.ndarray
    values: np.ndarray
    nodes: int


class _Shooter:
    """Numerov integrator for one (params, L, domain)."""

    def __init__(self, params, L, q_lo, q_hi, n, confined_box):
        self.params = params
        self.L = L
        self.q = np.linspace(q_lo, q_hi, n + 1)
        self.h = self.q[1] - self.q[0]
        self.W = effective_potential(params, L, self.q)
        self.box = confined_box
        sc = math.sqrt(params.c)
        delta = 1.5 + params.b / (2.0 * sc)
        # small-q asymptote q^delta exp(-sqrt(c)/(2 q^2))
        s = delta * np.log(self.q[:2]) - sc / (2.0 * self.q[:2] ** 2)
        self.out_start = (math.exp(s[0] - s[1]), 1.0)
        if confined_box:
            self.in_start = (0.0, 1.0)
        else:
            # large-q asymptote exp(-sqrt(a) q^2/2)
            qa, qb = self.q[-1], self.q[-2]
            self.in_start = (math.exp(-0.5 * math.sqrt(params.a) * (qa * qa - qb * qb)), 1.0)

    def outward(self, energy):
        y, nodes = numerov_sweep(self.W - energy, self.h, *self.out_start, False)
        if not np.all(np.isfinite(y)):
            raise GridFailure(f"outward integration overflowed at E={energy}")
        return y, nodes

    def inward(self, energy):
        y, _ = numerov_sweep(self.W - energy, self.h, *self.in_start, True)
        if not np.all(np.isfinite(y)):
            raise GridFailure(f"inward integration overflowed at E={energy}")
        return y

    def count(self, energy) -> int:
        return self.outward(energy)[1]

    def match_index(self, energy) -> int:
        y = np.abs(self.outward(energy)[0])
        interior = np.nonzero((y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:]))[0]
        if interior.size == 0:
            return len(y) // 2
        return int(np.clip(interior[-1] + 1, 2, len(y) - 3))

    def mismatch(self, energy, m) -> float:
        yo, _ = self.outward(energy)
        yi = self.inward(energy)
        no = np.max(np.abs(yo[: m + 2]))
        ni = np.max(np.abs(yi[m:]))
        return (yo[m + 1] * yi[m] - yi[m + 1] * yo[m]) / (no * ni)

    def joined(self, energy, m) -> np.ndarray:
        yo, _ = self.outward(energy)
        yi = self.inward(energy)
        scale = yo[m] / yi[m] if yi[m] != 0.0 else 1.0
        y = np.concatenate([yo[: m + 1], yi[m + 1 :] * scale])
        return y / np.max(np.abs(y))


def _bracket(count, k, lo, hi, max_expand=80):
    """Grow ``hi`` until at least k+1 nodes appear; ``lo`` must have <= k."""
    if count(lo) > k:
        raise BracketFailure(f"lower energy {lo} already has more than {k} nodes")
    width = max(hi - lo, 1.0)
    for _ in range(max_expand):
        if count(hi) >= k + 1:
            return lo, hi
        lo_candidate = hi
        width *= 2.0
        hi = lo_candidate + width
        if count(lo_candidate) <= k:
            lo = lo_candidate
    raise BracketFailure(f"no energy with {k + 1} nodes found below {hi:.6g}")


def _shoot(params, L, k, box, config, hint=None) -> ShootingResult:
    if k < 0:
        raise DomainError("k must be >= 0")
    n = config.grid_points
    e_ref = _energy_guess(params, L, k) if hint is None else hint + 1.0 + abs(hint)
    for _ in range(8):
        q_lo, q_hi = _domain(params, L, box, e_ref, config)
        sh = _Shooter(params, L, q_lo, q_hi, n, box is not None)
        lo = float(np.min(sh.W))
        hi = max(e_ref, lo + 1.0)
        if hint is not None:
            spread = 0.5 * (1.0 + abs(hint))
            if hint - spread > lo and sh.count(hint - spread) <= k:
                lo = hint - spread
        lo, hi = _bracket(sh.count, k, lo, hi)
        if box is not None or hi <= e_ref:
            break
        e_ref = hi  # domain was sized for too low an energy
    # node-count bisection until the bracket isolates E_k
    tol = config.energy_tol / 10.0
    while True:
        mid = 0.5 * (lo + hi)
        c_mid = sh.count(mid)
        if c_mid <= k:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-3 * (1.0 + abs(mid)) and sh.count(lo) == k and sh.count(hi) == k + 1:
            break
        if hi - lo <= tol * (1.0 + abs(mid)) * 1e-3:
            break
    m = sh.match_index(0.5 * (lo + hi))
    f_lo, f_hi = sh.mismatch(lo, m), sh.mismatch(hi, m)
    if np.sign(f_lo) != np.sign(f_hi):
        energy = brentq(lambda e: sh.mismatch(e, m), lo, hi, xtol=1e-15 * (1.0 + abs(lo)), rtol=1e-15)
    else:
        while hi - lo > tol * (1.0 + abs(lo)):
            mid = 0.5 * (lo + hi)
            if sh.count(mid) <= k:
                lo = mid
            else:
                hi = mid
        energy = 0.5 * (lo + hi)
    values = sh.joined(energy, m)
    return ShootingResult(energy, sh.q, values, count_nodes_array(values[1:-1]))


def shoot_eigenvalue(
    params: PotentialParams,
    L,
    k: int,
    box: Optional[float] = None,
    config: SolverConfig = SolverConfig(),
    hint: Optional[float] = None,
) -> float:
    """Eigenvalue with exactly ``k`` interior nodes, by Numerov shooting.

    ``box`` imposes a Dirichlet wall at q = box.  ``hint`` (e.g. a
    closed-form energy) only narrows the initial bracket.
    """
    return _shoot(params, L, k, box, config, hint).energy


def shoot_wavefunction(params, L, k, box=None, config=SolverConfig(), hint=None) -> ShootingResult:
    return _shoot(params, L, k, box, config, hint)


# --------------------------------------------------------------------------
# finite-difference matrix


def tridiagonal_eigenvalue(diag, offdiag, index: int, rtol: float = 1e-15) -> float:
    """``index``-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix.

    Bisection on the Sturm count, starting from the Gershgorin interval.
    """
    diag = np.ascontiguousarray(diag, dtype=float)
    off = np.ascontiguousarray(offdiag, dtype=float)
    if not 0 <= index < diag.size:
        raise DomainError(f"index {index} out of range for a {diag.size}x{diag.size} matrix")
    off2 = off * off
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    while hi - lo > rtol * max(abs(lo), abs(hi), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sturm_count(diag, off2, mid) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _fd_level(params, L, k, q_lo, q_hi, n_inner) -> float:
    q = np.linspace(q_lo, q_hi, n_inner + 2)[1:-1]
    h = q[1] - q[0]
    diag = 2.0 / (h * h) + effective_potential(params, L, q)
    off = np.full(n_inner - 1, -1.0 / (h * h))
    return tridiagonal_eigenvalue(diag, off, k)


def fd_eigenvalue(
    params: PotentialParams,
    L,
    k: int,
    box: Optional[float] = None,
    config: SolverConfig = SolverConfig(),
    max_doublings: int = 4,
) -> float:
    """``(k+1)``-th Dirichlet eigenvalue from a three-point discretisation.

    Uses ``grid_points // 10`` interior points and the grid with half the
    spacing, Richardson-extrapolated.  The pair is refined while the two
    levels differ by more than ``100 * energy_tol`` (relative).
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    n1 = max(config.grid_points // 10, 50)
    e_ref = _energy_guess(params, L, k)
    for _ in range(8):
        q_lo, q_hi = _domain(params, L, box, e_ref, config)
        e_coarse = _fd_level(params, L, k, q_lo, q_hi, n1)
        if box is not None or e_coarse <= e_ref:
            break
        e_ref = e_coarse + 1.0
    shift = math.inf
    for _ in range(max_doublings + 1):
        n2 = 2 * n1 + 1
        e1 = _fd_level(params, L, k, q_lo, q_hi, n1)
        e2 = _fd_level(params, L, k, q_lo, q_hi, n2)
        shift = abs(e2 - e1) / (1.0 + abs(e2))
        if shift <= 100.0 * config.energy_tol:
            return (4.0 * e2 - e1) / 3.0
        n1 = n2
    raise ResolutionError(f"finite-difference levels still shift by {shift:.2e} at {n1} points")


# --------------------------------------------------------------------------
# closed-form checks


def _natural_domain(sol: QesSolution, config: SolverConfig) -> tuple:
    q_lo = q_min_for(sol.params, config)
    if sol.confined:
        return q_lo, sol.box_radius
    return q_lo, q_max_for(sol.params, sol.L, sol.energy, config)


def wavefunction(sol: QesSolution, q):
    if sol.confined:
        return confined.eval_confined_wavefunction(sol, q)
    return closed_form.eval_wavefunction(sol, q)


def sample_wavefunction(sol: QesSolution, n: int, config: SolverConfig = SolverConfig()) -> list:
    """``n`` evenly spaced samples over the solution's natural domain."""
    q_lo, q_hi = _natural_domain(sol, config)
    q = np.linspace(q_lo, q_hi, n)
    vals = wavefunction(sol, q) if n > 1 else np.atleast_1d(wavefunction(sol, q))
    return [WavefunctionSample(float(x), float(v)) for x, v in zip(q, np.atleast_1d(vals))]


def _mp_wavefunction(sol: QesSolution):
    """The closed-form wavefunction evaluated in mpmath at the working precision."""
    e = sol.exponents
    alpha, beta, delta = mpmath.mpf(e.alpha), mpmath.mpf(e.beta), mpmath.mpf(e.delta)
    coeffs = [mpmath.mpf(x) for x in sol.prefactor.coeffs]
    R = None if sol.box_radius is None else mpmath.mpf(sol.box_radius)

    def value(q):
        t = q * q
        poly = mpmath.mpf(1)
        for cf_ in reversed(coeffs):
            poly = poly * t + cf_
        out = poly * mpmath.exp(alpha * t / 2 + beta / (2 * t) + delta * mpmath.log(q))
        if R is not None:
            out *= (R - q) * (R + q)
        return out

    return value


def ode_residual_norm(
    sol: QesSolution,
    config: SolverConfig = SolverConfig(),
    energy: Optional[float] = None,
    n_samples: int = 2000,
) -> float:
    """Largest scaled residual of the radial equation along the solution.

    At each sample q, R'' comes from a 5-point central stencil whose step is
    a small fraction of ``min(|W - E|^(-1/2), q)``.  The stencil is
    evaluated at 40 significant digits so that cancellation does not swamp
    the check where W is large.  The residual
    ``|-R'' + (W - E) R|`` is divided by ``(|E| + 1)`` and by the largest |R|
    on the stencil (which equals |R| away from nodes).  Samples where the
    double-precision R has underflowed to zero are skipped.  ``energy``
    overrides the solution's own energy.
    """
    E_f = sol.energy if energy is None else float(energy)
    q_lo, q_hi = _natural_domain(sol, config)
    q = np.linspace(q_lo, q_hi, n_samples + 2)[1:-1]
    keep = wavefunction(sol, q) != 0.0
    q = q[keep]
    W = effective_potential(sol.params, sol.L, q)
    h = _RESIDUAL_STEP * np.minimum(1.0 / np.sqrt(np.abs(W - E_f) + 1.0), q)
    h = np.minimum(h, 0.45 * (q_hi - q))
    worst = 0.0
    with mpmath.workdps(40):
        R = _mp_wavefunction(sol)
        a, b, c = (mpmath.mpf(x) for x in (sol.params.a, sol.params.b, sol.params.c))
        LL = mpmath.mpf(sol.L.numerator * (sol.L.numerator + sol.L.denominator)) / sol.L.denominator**2
        E = mpmath.mpf(E_f)
        for qi, hi in zip(q, h):
            if hi <= 0.0:
                continue
            x, step = mpmath.mpf(qi), mpmath.mpf(hi)
            vals = [R(x + m * step) for m in (-2, -1, 0, 1, 2)]
            d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * step * step)
            t = x * x
            w = LL / t + a * t + b / (t * t) + c / (t * t * t)
            mag = max(abs(v) for v in vals)
            if mag == 0:
                continue
            worst = max(worst, float(abs(-d2 + (w - E) * vals[2]) / (abs(E) + 1) / mag))
    return worst


def count_nodes_array(values: Sequence[float]) -> int:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0
    peak = np.max(np.abs(v))
    if peak == 0.0:
        return 0
    v = v[np.abs(v) > UNDERFLOW_GUARD * peak]
    return int(np.count_nonzero(v[1:] * v[:-1] < 0.0))


def count_nodes(samples: Iterable[WavefunctionSample]) -> int:
    """Sign changes between successive samples that have not underflowed.

    Samples must be interior and ordered by q.  Values below
    ``UNDERFLOW_GUARD`` times the largest magnitude are ignored.
    """
    return count_nodes_array([s.value for s in samples])


def closed_form_nodes(sol: QesSolution, config: SolverConfig = SolverConfig(), n: int = 4001) -> int:
    samples = sample_wavefunction(sol, n, config)
    return count_nodes(samples[1:-1])


# --------------------------------------------------------------------------
# reports


def _numeric(method, params, L, k, box, config, hint):
    if method == "shooting":
        return shoot_eigenvalue(params, L, k, box, config, hint)
    if method == "fd_matrix":
        return fd_eigenvalue(params, L, k, box, config)
    raise DomainError(f"unknown method {method!r}")


def verify_solution(
    sol: QesSolution, config: SolverConfig = SolverConfig(), method: str = "shooting"
) -> VerificationReport:
    """Compare a closed-form solution with a numerical eigenvalue.

    Passes when the relative energy error is within ``energy_tol`` and the
    closed-form wavefunction has exactly k interior nodes.
    """
    k = sol.channel.k
    e_num = _numeric(method, sol.params, sol.L, k, sol.box_radius, config, sol.energy)
    rel = relative_error(sol.energy, e_num)
    nodes = closed_form_nodes(sol, config)
    resid = ode_residual_norm(sol, config)
    ok = rel <= config.energy_tol and nodes == k
    notes = f"residual_tol={config.residual_tol:g}"
    if resid > config.residual_tol:
        notes += "; ODE residual above tolerance"
    return VerificationReport(sol.energy, e_num, rel, resid, nodes, method, "pass" if ok else "fail", notes)


def numeric_report(
    params: PotentialParams,
    channel: Channel,
    box: Optional[float] = None,
    config: SolverConfig = SolverConfig(),
    method: str = "shooting",
    expected: Optional[float] = None,
) -> VerificationReport:
    """Numerical eigenvalue for a channel, compared with ``expected`` if given."""
    k = channel.k
    e_num = _numeric(method, params, channel.L, k, box, config, expected)
    if method == "shooting":
        nodes = shoot_wavefunction(params, channel.L, k, box, config, expected).nodes
    else:
        nodes = k
    if expected is None:
        return VerificationReport(None, e_num, None, None, nodes, method, "skipped", "no closed-form energy to compare")
    rel = relative_error(expected, e_num)
    ok = rel <= config.energy_tol and nodes == k
    return VerificationReport(expected, e_num, rel, None, nodes, method, "pass" if ok else "fail", "expected energy supplied")


def degeneracy_check(
    params: PotentialParams, dim: int, l: int, k: int, config: SolverConfig = SolverConfig()
) -> VerificationReport:
    """Compare E(D, l) with E(D+2, l-1); both channels share the same L."""
    if l < 1:
        raise DomainError("degeneracy check needs l >= 1")
    a = Channel(dim, l, k)
    b = Channel(dim + 2, l - 1, k)
    ra = shoot_wavefunction(params, a.L, k, None, config)
    eb = shoot_eigenvalue(params, b.L, k, None, config)
    rel = relative_error(ra.energy, eb)
    ok = rel <= config.energy_tol and ra.nodes == k
    notes = f"E(D={dim}, l={l}) vs E(D={dim + 2}, l={l - 1}); L={float(a.L):g}"
    return VerificationReport(ra.energy, eb, rel, None, ra.nodes, "shooting", "pass" if ok else "fail", notes)


def write_samples_csv(samples: Sequence[WavefunctionSample], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "value"])
        for s in samples:
            writer.writerow([f"{s.q:.15g}", f"{s.value:.15g}"])
