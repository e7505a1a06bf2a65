"""Numerical certificates for the correlation bounds.

Each ``certify_*`` function evaluates both sides of one inequality exactly
(at desk scale) and returns a :class:`BoundCertificate`.  A certificate that
fails beyond its tolerance means a bug or a false theorem; callers treat it
as fatal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import (CERT_TOL, BoundCertificate, BoundConstants, deg_minus_2, power,
                     theorem_constant)
from .correlation import column_moments, nip_fourier
from .fourier import (FourierRepresentation, OrthonormalBasis, default_bases,
                      degree, inverse_transform, lp_norm, standard_fourier_basis,
                      sup_coefficient, support, truncate)
from .gowers import gowers_norm
from .spaces import (JointDistribution, ap_distribution, is_balanced, is_pairwise_independent,
                     marginal, min_atom_alpha)

NORM_TOL = 1e-9

__all__ = [
    "BoundCertificate", "BoundConstants", "deg_minus_2", "theorem_constant",
    "bound_constants", "certify_main", "certify_correlation", "certify_roth",
    "certify_holder_truncation", "certify_inverse_gowers", "certify_ap_distinguisher",
    "DistinguisherReport",
]


def _require_pairwise(mu: JointDistribution) -> None:
    if not is_pairwise_independent(mu):
        raise ValueError("the column distribution is not pairwise independent")


def _check_shapes(fhats: Sequence[FourierRepresentation], mu: JointDistribution) -> None:
    if len(fhats) != mu.k:
        raise ValueError(f"{len(fhats)} functions for a {mu.k}-component law")
    n = fhats[0].n
    for f, q in zip(fhats, mu.sizes):
        if f.n != n or any(s != q for s in f.sizes):
            raise ValueError(f"function alphabet {f.sizes} does not match component size {q}")


def bound_constants(mu: JointDistribution, bases: Sequence[OrthonormalBasis],
                    D: float, delta: float, k: int | None = None) -> BoundConstants:
    """Constants of the main bound for ``mu`` under ``bases``.

    Mixed alphabets use the largest size and the smallest atom mass.  The
    balanced constant applies only with uniform marginals and standard
    characters on every component.
    """
    k = mu.k if k is None else k
    q = max(mu.sizes)
    alpha = min(min_atom_alpha(marginal(mu, i)) for i in range(mu.k))
    balanced = is_balanced(mu) and all(b.kind == "standard" for b in bases)
    C = theorem_constant(k, q, alpha, balanced)
    return BoundConstants(k, q, alpha, balanced, C, D, delta)


def _prepare(fhats, mu, bases):
    _check_shapes(fhats, mu)
    _require_pairwise(mu)
    bases = default_bases(mu) if bases is None else list(bases)
    return bases, column_moments(mu, bases)


def certify_main(fhats: Sequence[FourierRepresentation], mu: JointDistribution,
                 bases: Sequence[OrthonormalBasis] | None = None,
                 tol: float = CERT_TOL) -> BoundCertificate:
    """``|<f_1..f_k>| <= C^D * max|fhat_1| * prod_{i>=2} ||f_i||_2``."""
    bases, M = _prepare(fhats, mu, bases)
    lhs = abs(nip_fourier(fhats, M).value)
    delta = sup_coefficient(fhats[0], include_zero=True)
    D = deg_minus_2([degree(f) for f in fhats])
    consts = bound_constants(mu, bases, D, delta)
    rhs = power(consts.C, D) * delta * math.prod(f.norm2() for f in fhats[1:])
    return BoundCertificate.build("main", lhs, rhs, consts, tol)


def _require_unit_norms(fhats) -> None:
    for f in fhats:
        if f.norm2() > 1 + NORM_TOL:
            raise ValueError(f"||f||_2 = {f.norm2()!r} exceeds 1")


def certify_correlation(fhats: Sequence[FourierRepresentation], mu: JointDistribution,
                        bases: Sequence[OrthonormalBasis] | None = None,
                        tol: float = CERT_TOL) -> BoundCertificate:
    """``|<f_1..f_k> - prod E f_i| <= delta (k-2) C^D`` with ``delta`` the largest
    non-constant coefficient among ``f_1..f_{k-2}``."""
    _require_unit_norms(fhats)
    bases, M = _prepare(fhats, mu, bases)
    k = len(fhats)
    value = nip_fourier(fhats, M).value - complex(np.prod([f.mean for f in fhats]))
    delta = max((sup_coefficient(f, include_zero=False) for f in fhats[:k - 2]), default=0.0)
    D = deg_minus_2([degree(f) for f in fhats])
    consts = bound_constants(mu, bases, D, delta)
    rhs = delta * (k - 2) * power(consts.C, D)
    return BoundCertificate.build("correlation", abs(value), rhs, consts, tol)


def certify_roth(fhats: Sequence[FourierRepresentation], mu: JointDistribution,
                 bases: Sequence[OrthonormalBasis] | None = None,
                 tol: float = CERT_TOL) -> BoundCertificate:
    """Three functions of norm at most 1: ``|<f_1,f_2,f_3>| <= min_i max|fhat_i|``."""
    if len(fhats) != 3:
        raise ValueError("the Roth bound is for exactly three functions")
    _require_unit_norms(fhats)
    bases, M = _prepare(fhats, mu, bases)
    lhs = abs(nip_fourier(fhats, M).value)
    rhs = min(sup_coefficient(f, include_zero=True) for f in fhats)
    return BoundCertificate.build("roth", lhs, rhs, tol=tol)


def certify_holder_truncation(fhats: Sequence[FourierRepresentation], mu: JointDistribution,
                              d: int, bases: Sequence[OrthonormalBasis] | None = None,
                              tol: float = CERT_TOL) -> BoundCertificate:
    """``|<f> - <f^{<=d}>| <= k eps (1+eps)^(k-1)``, ``eps = max ||f_i^{>d}||_k``.

    Needs ``||f_i||_k <= 1``.  Only marginal laws matter for the Hölder
    step, so pairwise independence is not required here.
    """
    _check_shapes(fhats, mu)
    bases = default_bases(mu) if bases is None else list(bases)
    k = len(fhats)
    eps = 0.0
    for f, b in zip(fhats, bases):
        if lp_norm(inverse_transform(f, b), k, b.measure) > 1 + NORM_TOL:
            raise ValueError("||f_i||_k exceeds 1")
        eps = max(eps, lp_norm(inverse_transform(truncate(f, ">", d), b), k, b.measure))
    M = column_moments(mu, bases)
    full = nip_fourier(fhats, M).value
    low = nip_fourier([truncate(f, "<=", d) for f in fhats], M).value
    rhs = k * eps * (1 + eps) ** (k - 1)
    return BoundCertificate.build("holder", abs(full - low), rhs, tol=tol)


def _standard_bases(fhat: FourierRepresentation) -> list[OrthonormalBasis]:
    return [standard_fourier_basis(q) for q in fhat.sizes]


def certify_inverse_gowers(fhat: FourierRepresentation, d: int, k: int, eps: float,
                           tol: float = CERT_TOL) -> BoundCertificate:
    """Large ``U^k`` norm forces a coefficient of size at least
    ``(eps / (2^k sqrt(q-1))^(3d))^(2^k)`` (standard basis, q = p).

    The certificate reads ``threshold <= max|fhat|``; it is vacuous (both
    sides recorded, threshold 0) when ``||f||_{U^k} <= eps``.
    """
    if degree(fhat) > d:
        raise ValueError(f"degree {degree(fhat)} exceeds d={d}")
    if abs(fhat.norm2() - 1) > NORM_TOL:
        raise ValueError("f must have unit L2 norm")
    q = fhat.sizes[0]
    f = inverse_transform(fhat, _standard_bases(fhat))
    norm = gowers_norm(f, k).value
    base = 2 ** k * math.sqrt(q - 1)
    threshold = (eps / base ** (3 * d)) ** (2 ** k) if norm > eps else 0.0
    consts = BoundConstants(2 ** k, q, 1.0 / q, True, base ** 3, d, threshold)
    return BoundCertificate.build("inverse_gowers", threshold,
                                  sup_coefficient(fhat, include_zero=True), consts, tol)


@dataclass
class DistinguisherReport:
    """Outcome of the progression-versus-independent distinguisher check."""

    gap: float
    eps: float
    vacuous: bool
    uniformity_threshold: float
    max_coefficients: list
    triple_log_threshold: float
    triple: list = field(default_factory=list)
    holds: bool = True
    message: str = ""

    @property
    def triple_threshold(self) -> float:
        return math.exp(self.triple_log_threshold)


def _find_intersecting_triple(fhats, log_threshold):
    """First coordinate covered by qualifying coefficients of three functions.

    Returns ``[(i, sigma, |coeff|), ...]`` sorted by ``i`` or ``[]``.
    """
    n = fhats[0].n
    best: dict[tuple[int, int], tuple] = {}
    for i, f in enumerate(fhats):
        for sigma, c in f.items():
            mag = abs(c)
            if mag == 0 or math.log(mag) < log_threshold:
                continue
            for a in support(sigma):
                cur = best.get((a, i))
                if cur is None or mag > cur[1]:
                    best[(a, i)] = (sigma, mag)
    for a in range(n):
        owners = [i for i in range(len(fhats)) if (a, i) in best]
        if len(owners) >= 3:
            return [(i, *best[(a, i)]) for i in owners[:3]]
    return []


def certify_ap_distinguisher(fhats: Sequence[FourierRepresentation], p: int, d: int,
                             eps: float) -> DistinguisherReport:
    """If progressions and independent points are ``eps``-distinguishable by
    ``prod f_i``, check that no ``f_i`` is ``delta``-uniform and that three
    large coefficients share a coordinate.

    Thresholds are those of the weak-inverse argument with
    ``q = p``; the triple threshold is compared in log space since it
    underflows for moderate ``k``.
    """
    k = len(fhats)
    mu = ap_distribution(p, k)
    _check_shapes(fhats, mu)
    for f in fhats:
        if degree(f) > d:
            raise ValueError(f"degree {degree(f)} exceeds d={d}")
    _require_unit_norms(fhats)
    M = column_moments(mu, [standard_fourier_basis(p)] * k)
    gap = abs(nip_fourier(fhats, M).value - complex(np.prod([f.mean for f in fhats])))
    log_base = 3 * d * k * math.log(k * math.sqrt(p - 1))
    delta = math.exp(math.log(eps) - log_base) if eps > 0 else 0.0
    log_triple = 2 ** k * (math.log(eps) - math.log(k) - log_base) if eps > 0 else -math.inf
    maxes = [sup_coefficient(f, include_zero=True) for f in fhats]
    report = DistinguisherReport(gap, eps, gap <= eps, delta, maxes, log_triple)
    if report.vacuous:
        return report
    problems = []
    uniform = [i for i, m in enumerate(maxes) if m <= delta]
    if uniform:
        problems.append(f"functions {uniform} are {delta!r}-uniform")
    report.triple = _find_intersecting_triple(fhats, log_triple)
    if not report.triple:
        problems.append("no intersecting triple of large coefficients")
    if problems:
        report.holds = False
        report.message = "theorem violation: " + "; ".join(problems)
    return report
