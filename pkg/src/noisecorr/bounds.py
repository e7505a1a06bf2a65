"""Certificate records and the constants of the main correlation bound."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .fourier import BOTTOM

CERT_TOL = 1e-9


def deg_minus_2(degrees: Sequence[float]) -> float:
    """Sum of the ``k-2`` smallest degrees; :data:`BOTTOM` entries poison the sum."""
    k = len(degrees)
    if k < 2:
        raise ValueError("deg_-2 needs at least two degrees")
    smallest = sorted(degrees)[:k - 2]
    if any(d == BOTTOM for d in smallest):
        return BOTTOM
    return int(sum(smallest))


def theorem_constant(k: int, q: int, alpha: float = 1.0, balanced: bool = False) -> float:
    """``(k sqrt((q-1)/alpha))^3``, or ``(k sqrt(q-1))^3`` when ``balanced``.

    Clamped below at 1 (only matters for q = 1, where every function is
    constant).
    """
    base = k * math.sqrt(q - 1) if balanced else k * math.sqrt((q - 1) / alpha)
    return max(base ** 3, 1.0)


def power(C: float, D: float) -> float:
    """``C**D`` with ``D = BOTTOM`` giving 0."""
    return 0.0 if D == BOTTOM else C ** D


@dataclass(frozen=True)
class BoundConstants:
    k: int
    q: int
    alpha: float
    balanced: bool
    C: float
    D: float
    delta: float


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if x == BOTTOM:
        return "-inf"
    return repr(float(x))


@dataclass(frozen=True)
class BoundCertificate:
    name: str
    lhs: float
    rhs: float
    holds: bool
    slack: float
    constants: BoundConstants | None = None
    tol: float = CERT_TOL

    @classmethod
    def build(cls, name: str, lhs: float, rhs: float,
              constants: BoundConstants | None = None,
              tol: float = CERT_TOL) -> "BoundCertificate":
        lhs, rhs = float(lhs), float(rhs)
        return cls(name, lhs, rhs, lhs <= rhs + tol, rhs - lhs, constants, tol)

    def to_record(self) -> str:
        c = self.constants
        fields = [self.name, self.lhs, self.rhs, self.holds, self.slack,
                  c.C if c else None, c.D if c else None, c.delta if c else None, self.tol]
        return " ".join(f if isinstance(f, str) else _fmt(f) for f in fields)

    @classmethod
    def from_record(cls, line: str) -> "BoundCertificate":
        name, lhs, rhs, holds, slack, C, D, delta, tol = line.split()
        constants = None
        if C != "nan":
            d = float(D)
            constants = BoundConstants(0, 0, math.nan, False, float(C),
                                       d if math.isinf(d) else int(d), float(delta))
        return cls(name, float(lhs), float(rhs), holds == "1", float(slack),
                   constants, float(tol))
