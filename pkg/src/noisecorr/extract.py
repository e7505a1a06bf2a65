"""Witness extraction: turning a large noise correlation into large, correlated
Fourier coefficients.

:func:`extract_witness` finds one index ``i`` and a non-constant ``sigma``
with ``|fhat_i(sigma)| > delta`` and ``|E[chi_sigma(X_i) f_{i+1} ... f_k]| >
delta^2 C^D``.  :func:`extract_family` repeats that step on the remaining
functions followed by the characters chosen so far, ending with a family of
characters whose joint expectation is nonzero, so every coordinate they
touch is touched at least ``r + 1`` times under r-wise independence.

Functions not taking part in a sub-expectation are replaced by the constant
1, so every expectation is a noisy inner product over the full column law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import power
from .certify import NORM_TOL, bound_constants
from .correlation import ColumnMomentTensor, column_moments, nip_bruteforce, nip_fourier
from .fourier import (BOTTOM, FourierRepresentation, OrthonormalBasis, character_table,
                      default_bases, degree, inverse_transform, support)
from .spaces import JointDistribution, is_pairwise_independent, is_r_wise_independent


class TheoremViolation(RuntimeError):
    """The hypothesis held but the promised witness was not found."""


@dataclass(frozen=True)
class Witness:
    i: int
    sigma: tuple
    coeff_mag: float
    corr_mag: float
    delta: float
    C: float
    D: float

    def to_record(self) -> str:
        digits = " ".join(str(s) for s in self.sigma)
        return (f"{self.i} {digits} {self.coeff_mag!r} {self.corr_mag!r} "
                f"{self.delta!r} {self.C!r} {self.D}")


@dataclass
class WitnessFamily:
    members: list            # (i, sigma, |fhat_i(sigma)|), in extraction order
    schedule: list           # coefficient threshold used in each round
    coverage: dict           # coordinate -> number of members touching it
    family_nip: complex      # E[prod_{i in I} chi_{sigma(i)}(X_i)]
    r: int
    delta: float
    C: float
    D: float
    log_threshold: float = field(default=-math.inf)

    @property
    def indices(self) -> list:
        return sorted(i for i, _, _ in self.members)

    def sigma(self, i: int) -> tuple:
        return next(s for j, s, _ in self.members if j == i)


class _Context:
    """Shared state of one extraction: the law, moments and constants."""

    def __init__(self, fhats, mu, bases):
        if len(fhats) != mu.k:
            raise ValueError(f"{len(fhats)} functions for a {mu.k}-component law")
        for f in fhats:
            if f.norm2() > 1 + NORM_TOL:
                raise ValueError(f"||f||_2 = {f.norm2()!r} exceeds 1")
        if not is_pairwise_independent(mu):
            raise ValueError("the column distribution is not pairwise independent")
        self.fhats = list(fhats)
        self.k = mu.k
        self.n = fhats[0].n
        bases = default_bases(mu) if bases is None else list(bases)
        self.M: ColumnMomentTensor = column_moments(mu, bases)
        degrees = [degree(f) for f in fhats]
        self.D = BOTTOM if BOTTOM in degrees else int(sum(degrees))
        consts = bound_constants(mu, bases, self.D, 0.0)
        self.C = consts.C
        self.CD = power(self.C, self.D)
        self.ones = [FourierRepresentation.constant(f.sizes) for f in fhats]

    def nip(self, assignment: dict) -> complex:
        """Noisy inner product with ``assignment[i]`` at position ``i`` and 1
        elsewhere."""
        fs = [assignment.get(i, self.ones[i]) for i in range(self.k)]
        return nip_fourier(fs, self.M).value

    def correlation(self) -> complex:
        means = complex(np.prod([f.mean for f in self.fhats]))
        return self.nip(dict(enumerate(self.fhats))) - means

    def char(self, i: int, sigma) -> FourierRepresentation:
        return FourierRepresentation.character(self.fhats[i].sizes, sigma)

    def best_character(self, i: int, rest: dict, threshold: float):
        """Over ``sigma != 0`` with ``|fhat_i(sigma)| > threshold``, the one
        maximizing ``|E[chi_sigma * rest]|`` (ties: smallest sigma)."""
        zero = (0,) * self.n
        best = None
        for sigma, c in self.fhats[i].items():
            if sigma == zero or abs(c) <= threshold:
                continue
            t = self.nip({**rest, i: self.char(i, sigma)})
            if best is None or abs(t) > abs(best[2]):
                best = (sigma, abs(c), t)
        return best


def extract_witness(fhats: Sequence[FourierRepresentation], mu: JointDistribution,
                    delta: float, bases: Sequence[OrthonormalBasis] | None = None,
                    exhaustive: bool = False):
    """Witness for a noise correlation above ``2 delta (k-2) C^D``.

    ``D`` is the sum of all degrees.  Returns ``None`` when the correlation
    is below the threshold.  The first qualifying ``i`` is used unless
    ``exhaustive`` is set, in which case every qualifying ``i`` contributes a
    witness and a list is returned.
    """
    delta = float(delta)
    ctx = _Context(fhats, mu, bases)
    k = ctx.k
    if ctx.D == BOTTOM or abs(ctx.correlation()) <= 2 * delta * (k - 2) * ctx.CD:
        return [] if exhaustive else None
    found = []
    for i in range(k - 2):
        rest = {j: ctx.fhats[j] for j in range(i + 1, k)}
        g = ctx.fhats[i].centered()
        if abs(ctx.nip({**rest, i: g})) <= 2 * delta * ctx.CD:
            continue
        best = ctx.best_character(i, rest, delta)
        if best is None or not abs(best[2]) > delta ** 2 * ctx.CD:
            raise TheoremViolation(f"no witness for function {i} at delta={delta!r}")
        sigma, mag, t = best
        found.append(Witness(i, sigma, mag, abs(t), delta, ctx.C, ctx.D))
        if not exhaustive:
            return found[0]
    if not found:
        raise TheoremViolation("correlation above threshold but no index qualifies")
    return found


def extract_family(fhats: Sequence[FourierRepresentation], mu: JointDistribution,
                   delta: float, r: int = 2,
                   bases: Sequence[OrthonormalBasis] | None = None):
    """Intersecting family of large coefficients for a noise correlation above
    ``C^D delta``.

    Round 1 extracts from the noise correlation with threshold
    ``delta_1 = delta / 2k``.  Round ``s`` then works on
    ``E[prod_{j in J} f_j prod_{i in I} chi_i]``, which exceeds
    ``C^D delta_{s-1}^2``; it scans the remaining originals ``J`` in order
    for a centered ``f_j`` carrying a ``1/k`` share of that, and extracts
    with ``delta_s = delta_{s-1}^2 / 2k``.  If only the pure character term
    carries it, the remaining originals are dropped.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    delta = float(delta)
    ctx = _Context(fhats, mu, bases)
    if not is_r_wise_independent(mu, r):
        raise ValueError(f"the column distribution is not {r}-wise independent")
    k = ctx.k
    if k < 3 or ctx.D == BOTTOM or not abs(ctx.correlation()) > ctx.CD * delta:
        return None

    step = delta / (2 * k)
    first = extract_witness(fhats, mu, step, bases)
    if first is None:
        raise TheoremViolation("round 1 found nothing above its threshold")
    schedule = [step]
    members = [(first.i, first.sigma, first.coeff_mag)]
    chars = {first.i: ctx.char(first.i, first.sigma)}
    level = first.corr_mag
    floor = step ** 2
    J = list(range(first.i + 1, k))
    while J:
        step = floor / (2 * k)
        for pos, j in enumerate(J):
            rest = {**{jj: ctx.fhats[jj] for jj in J[pos + 1:]}, **chars}
            if abs(ctx.nip({**rest, j: ctx.fhats[j].centered()})) <= 2 * step * ctx.CD:
                continue
            best = ctx.best_character(j, rest, step)
            if best is None or not abs(best[2]) > step ** 2 * ctx.CD:
                raise TheoremViolation(f"round {len(schedule) + 1}: no character for f_{j}")
            sigma, mag, t = best
            schedule.append(step)
            members.append((j, sigma, mag))
            chars[j] = ctx.char(j, sigma)
            level, floor = abs(t), step ** 2
            J = J[pos + 1:]
            break
        else:
            if not abs(ctx.nip(chars)) > ctx.CD * floor / k:
                raise TheoremViolation(f"level {level!r} not explained by any term")
            J = []

    family_nip = ctx.nip(chars)
    coverage: dict[int, int] = {}
    for _, sigma, _ in members:
        for a in support(sigma):
            coverage[a] = coverage.get(a, 0) + 1
    log_threshold = 2 ** k * (math.log(delta) - math.log(2 * k))
    fam = WitnessFamily(members, schedule, dict(sorted(coverage.items())), family_nip,
                        r, delta, ctx.C, ctx.D, log_threshold)
    problems = []
    if not abs(family_nip) > 0:
        problems.append("character family has zero expectation")
    if len(members) < 3:
        problems.append(f"only {len(members)} members")
    if any(c < r + 1 for c in coverage.values()):
        problems.append(f"coverage {coverage} below {r + 1}")
    if any(math.log(mag) <= log_threshold for _, _, mag in members):
        problems.append("coefficient below (delta/2k)^(2^k)")
    if problems:
        raise TheoremViolation("; ".join(problems))
    return fam


def _dense_inputs(fhats, mu, bases):
    bases = default_bases(mu) if bases is None else list(bases)
    dense = [inverse_transform(f, b) for f, b in zip(fhats, bases)]
    ones = [inverse_transform(FourierRepresentation.constant(f.sizes), b)
            for f, b in zip(fhats, bases)]
    return bases, dense, ones


def verify_witness(w: Witness, fhats: Sequence[FourierRepresentation],
                   mu: JointDistribution, bases: Sequence[OrthonormalBasis] | None = None,
                   tol: float = 1e-9) -> list[str]:
    """Re-check a witness by brute-force enumeration; returns the failures."""
    bases, dense, ones = _dense_inputs(fhats, mu, bases)
    chi = character_table(fhats[w.i].sizes, w.sigma, bases[w.i])
    fs = ones[:w.i] + [chi] + dense[w.i + 1:]
    corr = abs(nip_bruteforce(fs, mu).value)
    coeff = abs(fhats[w.i][w.sigma])
    problems = []
    if not any(w.sigma):
        problems.append("constant character")
    if not coeff > w.delta:
        problems.append(f"|fhat_{w.i}(sigma)| = {coeff!r} <= delta")
    if not corr > w.delta ** 2 * power(w.C, w.D) - tol:
        problems.append(f"correlation {corr!r} <= delta^2 C^D")
    if abs(corr - w.corr_mag) > tol:
        problems.append(f"recorded correlation {w.corr_mag!r} differs from {corr!r}")
    return problems


def verify_family(fam: WitnessFamily, fhats: Sequence[FourierRepresentation],
                  mu: JointDistribution, bases: Sequence[OrthonormalBasis] | None = None,
                  tol: float = 1e-9) -> list[str]:
    """Re-check a witness family by brute-force enumeration; returns the failures."""
    bases, _, ones = _dense_inputs(fhats, mu, bases)
    fs = list(ones)
    for i, sigma, _ in fam.members:
        fs[i] = character_table(fhats[i].sizes, sigma, bases[i])
    value = nip_bruteforce(fs, mu).value
    problems = []
    if len(fam.members) < 3:
        problems.append(f"only {len(fam.members)} members")
    if not abs(value) > tol:
        problems.append(f"character family expectation {value!r} vanishes")
    coverage: dict[int, int] = {}
    for i, sigma, _ in fam.members:
        if not any(sigma):
            problems.append(f"member {i} has the constant character")
        for a in support(sigma):
            coverage[a] = coverage.get(a, 0) + 1
        mag = abs(fhats[i][sigma])
        if mag == 0 or math.log(mag) <= fam.log_threshold:
            problems.append(f"member {i} coefficient {mag!r} below (delta/2k)^(2^k)")
    if any(c < fam.r + 1 for c in coverage.values()):
        problems.append(f"coverage {coverage} below {fam.r + 1}")
    return problems
