"""Plain-text formats for distributions, functions and coefficient dumps.

Distribution: ``k``, then the ``k`` alphabet sizes, then one ``a_1 ... a_k mass``
line per support point (0-based atoms).  Function: ``n`` and the ``n``
alphabet sizes, then one ``re im`` line per point in lexicographic order.
Sparse dump: the same ``n``/sizes header, then ``sigma_1 ... sigma_n re im``.

Headers are read token by token, so the sizes may share the first line or
sit on their own.
"""
from __future__ import annotations

from typing import Iterator

import numpy as np

from .fourier import DenseFunction, FourierRepresentation
from .spaces import MASS_TOL, FiniteSpace, JointDistribution


class FormatError(ValueError):
    """Malformed input file."""


def _tokens(text: str) -> Iterator[str]:
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        yield from line.split()


def _header(tok: Iterator[str], what: str) -> tuple[int, tuple[int, ...]]:
    try:
        count = int(next(tok))
        sizes = tuple([int(next(tok)) for _ in range(count)])
    except (StopIteration, ValueError) as exc:
        raise FormatError(f"bad {what} header") from exc
    if count < 0 or any(s < 1 for s in sizes):
        raise FormatError(f"bad {what} header")
    return count, sizes


def parse_distribution(text: str) -> JointDistribution:
    tok = _tokens(text)
    k, sizes = _header(tok, "distribution")
    rest = list(tok)
    if len(rest) % (k + 1):
        raise FormatError("support rows must have k atoms and a mass")
    rows = np.array(rest, dtype=object).reshape(-1, k + 1) if rest else np.empty((0, k + 1))
    try:
        support = np.array([[int(a) for a in r[:k]] for r in rows], dtype=np.int64).reshape(-1, k)
        mass = np.array([float(r[k]) for r in rows])
    except ValueError as exc:
        raise FormatError("non-numeric support row") from exc
    if abs(mass.sum() - 1) > MASS_TOL:
        raise FormatError(f"masses sum to {mass.sum()!r}, not 1")
    spaces = [FiniteSpace.range(q) for q in sizes]
    table = {}
    for row, m in zip(map(tuple, support), mass):
        table[row] = table.get(row, 0.0) + m
    try:
        return JointDistribution.from_mapping(spaces, table)
    except (ValueError, IndexError) as exc:
        raise FormatError(str(exc)) from exc


def format_distribution(mu: JointDistribution) -> str:
    lines = [str(mu.k), " ".join(str(q) for q in mu.sizes)]
    for row, m in zip(mu.support, mu.mass):
        lines.append(" ".join(str(int(a)) for a in row) + f" {float(m)!r}")
    return "\n".join(lines) + "\n"


def read_distribution(path) -> JointDistribution:
    with open(path) as fh:
        return parse_distribution(fh.read())


def write_distribution(mu: JointDistribution, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_distribution(mu))


def parse_function(text: str) -> DenseFunction:
    tok = _tokens(text)
    n, sizes = _header(tok, "function")
    try:
        vals = np.array([float(t) for t in tok])
    except ValueError as exc:
        raise FormatError("non-numeric value") from exc
    N = int(np.prod(sizes, dtype=np.int64))
    if vals.size != 2 * N:
        raise FormatError(f"expected {N} 're im' lines, got {vals.size / 2:g}")
    return DenseFunction(sizes, (vals[0::2] + 1j * vals[1::2]).reshape(sizes))


def format_function(f: DenseFunction) -> str:
    lines = [" ".join(str(s) for s in (f.n, *f.sizes))]
    for v in np.asarray(f.values, dtype=complex).ravel():
        lines.append(f"{float(v.real)!r} {float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def read_function(path) -> DenseFunction:
    with open(path) as fh:
        return parse_function(fh.read())


def write_function(f: DenseFunction, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_function(f))


def parse_coefficients(text: str) -> FourierRepresentation:
    tok = _tokens(text)
    n, sizes = _header(tok, "coefficient dump")
    rest = list(tok)
    if len(rest) % (n + 2):
        raise FormatError("coefficient rows must have n digits and 're im'")
    coeffs = {}
    for r in range(0, len(rest), n + 2):
        try:
            sigma = tuple(int(t) for t in rest[r:r + n])
            c = complex(float(rest[r + n]), float(rest[r + n + 1]))
        except ValueError as exc:
            raise FormatError("non-numeric coefficient row") from exc
        if any(not 0 <= s < q for s, q in zip(sigma, sizes)):
            raise FormatError(f"multi-index {sigma} out of range")
        coeffs[sigma] = coeffs.get(sigma, 0) + c
    return FourierRepresentation(sizes, coeffs)


def format_coefficients(fhat: FourierRepresentation) -> str:
    lines = [" ".join(str(s) for s in (fhat.n, *fhat.sizes))]
    for sigma, c in fhat.items():
        c = complex(c)
        lines.append(" ".join(str(s) for s in sigma) + f" {c.real!r} {c.imag!r}")
    return "\n".join(lines) + "\n"
