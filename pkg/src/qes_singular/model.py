"""Value types for the singular even-power potential ``V(q) = a q^2 + b q^-4 + c q^-6``.

Everything here is an immutable dataclass with a ``to_dict``/``from_dict``
pair whose keys are the field names, so the JSON written by the CLI can be
read back without a schema layer.  Units are fixed to hbar = 2m = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "PotentialParams",
    "Channel",
    "AnsatzExponents",
    "PrefactorPoly",
    "QesSolution",
    "WavefunctionSample",
    "SolverConfig",
    "effective_L",
    "centrifugal",
    "dumps",
]


def effective_L(dim: int, l: int) -> Fraction:
    """Effective angular momentum ``L = l + (D - 3)/2``.

    Returned as a :class:`~fractions.Fraction` so half-integer values for even
    ``dim`` are exact; it behaves like a number in every formula downstream.
    """
    if int(dim) != dim or int(l) != l:
        raise DomainError(f"dim and l must be integers, got dim={dim!r}, l={l!r}")
    if dim < 2:
        raise DomainError(f"dimension must be >= 2, got {dim}")
    if l < 0:
        raise DomainError(f"orbital quantum number must be >= 0, got {l}")
    return Fraction(2 * int(l) + int(dim) - 3, 2)


def centrifugal(L) -> float:
    """``L(L+1)`` as a float; the only way L enters any formula."""
    if isinstance(L, Fraction):
        return float(L * (L + 1))
    L = float(L)
    return L * (L + 1.0)


def _finite(name: str, value) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PotentialParams:
    """Coefficients of ``V(q) = a q^2 + b q^-4 + c q^-6``; requires a, c > 0."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if not self.a > 0.0:
            raise DomainError(f"a must be > 0, got {self.a}")
        if not self.c > 0.0:
            raise DomainError(f"c must be > 0, got {self.c}")

    def potential(self, q):
        """Evaluate V(q); accepts scalars or numpy arrays."""
        q2 = q * q
        return self.a * q2 + self.b / (q2 * q2) + self.c / (q2 * q2 * q2)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialParams":
        return cls(d["a"], d["b"], d["c"])


@dataclass(frozen=True)
class Channel:
    """Quantum numbers: dimension D, orbital l (|m| for D=2) and node count k."""

    dim: int
    l: int
    k: int = 0

    def __post_init__(self):
        effective_L(self.dim, self.l)  # validates dim and l
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"node count k must be a non-negative integer, got {self.k!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "k", int(self.k))

    @property
    def L(self) -> Fraction:
        return effective_L(self.dim, self.l)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "l": self.l, "k": self.k, "effective_l": float(self.L)}

    @classmethod
    def from_dict(cls, d: dict) -> "Channel":
        return cls(d["dim"], d["l"], d.get("k", 0))


@dataclass(frozen=True)
class AnsatzExponents:
    """Coefficients of ``exp(alpha q^2/2 + beta q^-2/2 + delta ln q)``."""

    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "delta"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if not self.beta < 0.0:
            raise DomainError(f"beta must be negative, got {self.beta}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "delta": self.delta}

    @classmethod
    def from_dict(cls, d: dict) -> "AnsatzExponents":
        return cls(d["alpha"], d["beta"], d["delta"])


@dataclass(frozen=True)
class PrefactorPoly:
    """Monic polynomial ``F(q) = q^(2k) + sum_i coeffs[i] q^(2i)``, i < k.

    ``g`` is the ratio ``coeffs[0] / coeffs[1]`` kept for k = 2, where the
    constant coefficient is built as ``g * coeffs[1]``.
    """

    degree_k: int
    coeffs: tuple = ()
    g: Optional[float] = None

    def __post_init__(self):
        coeffs = tuple(_finite("coefficient", x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if self.degree_k < 0 or len(coeffs) != self.degree_k:
            raise DomainError(
                f"expected {self.degree_k} coefficients for k={self.degree_k}, got {len(coeffs)}"
            )
        if self.degree_k == 2:
            if self.g is None:
                raise DomainError("k=2 prefactor needs its ratio g")
            if coeffs[0] != self.g * coeffs[1]:
                raise DomainError("k=2 prefactor must satisfy coeffs[0] == g * coeffs[1]")
        if self.g is not None:
            object.__setattr__(self, "g", _finite("g", self.g))

    def __call__(self, q):
        """Horner evaluation in ``t = q^2``."""
        t = q * q
        acc = 1.0
        for coeff in reversed(self.coeffs):
            acc = acc * t + coeff
        return acc

    def roots_q2(self) -> list:
        """Roots of F as a polynomial in ``t = q^2`` (complex where applicable)."""
        if self.degree_k == 0:
            return []
        return list(np.roots([1.0, *reversed(self.coeffs)]))

    def positive_nodes(self, upper: float = math.inf) -> list:
        """Positive q where F vanishes, restricted to ``q < upper``; sorted."""
        out = []
        for t in self.roots_q2():
            t = complex(t)
            if abs(t.imag) <= 1e-12 * max(1.0, abs(t.real)) and t.real > 0.0:
                q = math.sqrt(t.real)
                if q < upper:
                    out.append(q)
        return sorted(out)

    def to_dict(self) -> dict:
        return {"degree_k": self.degree_k, "coeffs": list(self.coeffs), "g": self.g}

    @classmethod
    def from_dict(cls, d: dict) -> "PrefactorPoly":
        return cls(d["degree_k"], tuple(d.get("coeffs", ())), d.get("g"))


def _energy(alpha: float, delta: float, k: int, confined: bool) -> float:
    # integer part summed first so confined k and unconfined k+1 agree bitwise
    base = (5 + 4 * k) if confined else (1 + 4 * k)
    return -alpha * (base + 2.0 * delta)


@dataclass(frozen=True)
class QesSolution:
    """A closed-form solution; ``box_radius`` is None on the half line."""

    params: PotentialParams
    channel: Channel
    exponents: AnsatzExponents
    prefactor: PrefactorPoly
    energy: float
    box_radius: Optional[float] = None

    def __post_init__(self):
        if self.prefactor.degree_k != self.channel.k:
            raise DomainError("prefactor degree must equal channel k")
        if self.box_radius is not None:
            R = _finite("box_radius", self.box_radius)
            if not R > 0.0:
                raise DomainError(f"box radius must be > 0, got {R}")
            object.__setattr__(self, "box_radius", R)
        expected = _energy(self.exponents.alpha, self.exponents.delta, self.channel.k, self.confined)
        if not math.isclose(self.energy, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise DomainError(f"energy {self.energy} inconsistent with exponents ({expected})")

    @property
    def confined(self) -> bool:
        return self.box_radius is not None

    @property
    def L(self) -> Fraction:
        return self.channel.L

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "channel": self.channel.to_dict(),
            "exponents": self.exponents.to_dict(),
            "prefactor": self.prefactor.to_dict(),
            "energy": self.energy,
            "box_radius": self.box_radius,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QesSolution":
        return cls(
            PotentialParams.from_dict(d["params"]),
            Channel.from_dict(d["channel"]),
            AnsatzExponents.from_dict(d["exponents"]),
            PrefactorPoly.from_dict(d["prefactor"]),
            d["energy"],
            d.get("box_radius"),
        )


@dataclass(frozen=True)
class WavefunctionSample:
    q: float
    value: float

    def __post_init__(self):
        if not self.q > 0.0:
            raise DomainError(f"sample coordinate must be > 0, got {self.q}")

    def to_dict(self) -> dict:
        return {"q": self.q, "value": self.value}

    @classmethod
    def from_dict(cls, d: dict) -> "WavefunctionSample":
        return cls(d["q"], d["value"])


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs for the eigenvalue oracles and the b scan.

    ``q_min_factor``/``q_max_factor`` scale the automatically chosen grid
    ends; ``energy_tol`` is relative.
    """

    q_min_factor: float = 1.0
    q_max_factor: float = 1.0
    grid_points: int = 20000
    energy_tol: float = 1e-6
    residual_tol: float = 1e-8
    bracket_range: float = 64.0
    bracket_steps: int = 4096

    def __post_init__(self):
        for name in ("q_min_factor", "q_max_factor", "bracket_range"):
            if not _finite(name, getattr(self, name)) > 0.0:
                raise DomainError(f"{name} must be positive")
        for name in ("energy_tol", "residual_tol"):
            if not 0.0 < _finite(name, getattr(self, name)) < 1.0:
                raise DomainError(f"{name} must lie in (0, 1)")
        if int(self.grid_points) != self.grid_points or self.grid_points < 100:
            raise DomainError("grid_points must be an integer >= 100")
        if int(self.bracket_steps) != self.bracket_steps or self.bracket_steps < 1:
            raise DomainError("bracket_steps must be a positive integer")
        object.__setattr__(self, "grid_points", int(self.grid_points))
        object.__setattr__(self, "bracket_steps", int(self.bracket_steps))

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown solver config keys: {sorted(unknown)}")
        return cls(**d)


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.15g}")
    if isinstance(obj, Fraction):
        return float(f"{float(obj):.15g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _round_floats(obj.to_dict())
    return obj


def dumps(obj: Any, indent: Optional[int] = 2) -> str:
    """JSON with floats cut to 15 significant digits, for byte-stable output."""
    return json.dumps(_round_floats(obj), indent=indent)
