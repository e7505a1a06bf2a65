"""Batch experiment runner.

A run reads a flat ``key=value`` config (``#`` starts a comment), applies
command-line overrides, runs ``trials`` independent trials of one experiment
and writes a report: a ``#``-prefixed header echoing the resolved config,
then CSV rows ``trial_id,lhs,rhs,holds,slack`` in trial order, then the
pass/fail tally.  Wall-clock time goes to stderr so reports stay
byte-identical across runs.  Exit status: 0 when every trial holds, 1 when
some trial fails, 2 for a bad config or unreadable input.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np

from . import _accel
from .certify import (certify_correlation, certify_holder_truncation, certify_inverse_gowers,
                      certify_main, certify_roth, certify_ap_distinguisher)
from .correlation import RNG_NAME, column_moments, nip_bruteforce
from .extract import _Context, extract_family, extract_witness, verify_family, verify_witness
from .fourier import (DenseFunction, default_bases, inverse_transform, lp_norm,
                      standard_fourier_basis, sup_coefficient, transform)
from .gowers import (check_gowers_inequality, gowers_direct, gowers_norm, gowers_recursive,
                     gowers_via_cube_nip, u2_closed_form)
from .instances import (generate_random_lowdeg, planted_instance, quadratic_phase,
                        random_bounded_function, trial_rng, xor_example_function)
from .io import FormatError, read_distribution
from .spaces import (JointDistribution, ap_distribution, gowers_cube_distribution,
                     is_r_wise_independent, random_pairwise_independent,
                     xor_subset_distribution, xor_triple_distribution)

__all__ = ["ExperimentConfig", "Report", "TrialRow", "run", "main", "generate_random_lowdeg",
           "EXPERIMENTS"]


class ConfigError(ValueError):
    """Malformed or incomplete experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    trials: int | None = None
    tolerance: float = 1e-9
    p: int | None = None
    n: int | None = None
    k: int | None = None
    d: int | None = None
    delta: float | None = None
    epsilon: float | None = None
    threshold: float = 0.5
    noise: float = 0.2
    r: int | None = None
    m: int = 2
    subsets: str = "0,1"
    dist: str = "mixed"
    input: str | None = None
    output: str | None = None
    workers: int = 1

    @classmethod
    def parse(cls, text: str, **overrides) -> "ExperimentConfig":
        values: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key=value")
            values[key.strip()] = value.strip()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, types[key], raw)
        if "experiment" not in kwargs:
            raise ConfigError("config must name an experiment")
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"choose from {', '.join(EXPERIMENTS)}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.dist != "mixed" and not _DIST_NAME.fullmatch(self.dist):
            raise ConfigError(f"unknown distribution {self.dist!r}")

    @property
    def num_trials(self) -> int:
        return self.trials if self.trials is not None else EXPERIMENTS[self.experiment].trials

    def get(self, name: str):
        value = getattr(self, name)
        return EXPERIMENTS[self.experiment].defaults.get(name) if value is None else value

    def echo(self) -> list[str]:
        spec = EXPERIMENTS[self.experiment]
        out = [f"experiment={spec.name}"]
        for f in dataclasses.fields(self):
            if f.name not in ("seed", "trials", "tolerance") + spec.keys:
                continue
            value = self.num_trials if f.name == "trials" else self.get(f.name)
            if value is not None:
                out.append(f"{f.name}={value}")
        return out


def _coerce(key: str, typ: str, raw):
    if not isinstance(raw, str):
        return raw
    base = typ.replace(" | None", "")
    try:
        if base == "int":
            return int(raw, 0)
        if base == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {base}") from exc
    return raw


@dataclass(frozen=True)
class TrialRow:
    trial_id: int
    lhs: float
    rhs: float
    holds: bool
    slack: float
    notes: tuple = ()

    @classmethod
    def bound(cls, trial_id: int, lhs: float, rhs: float, tol: float,
              extra_ok: bool = True, notes: tuple = ()) -> "TrialRow":
        lhs, rhs = float(lhs), float(rhs)
        return cls(trial_id, lhs, rhs, bool(lhs <= rhs + tol and extra_ok), rhs - lhs, notes)

    def csv(self) -> str:
        return f"{self.trial_id},{self.lhs!r},{self.rhs!r},{int(self.holds)},{self.slack!r}"


@dataclass
class Report:
    config: ExperimentConfig
    rows: list[TrialRow]
    wall_clock: float = 0.0
    backend: str = field(default=_accel.BACKEND)

    @property
    def pass_count(self) -> int:
        return sum(r.holds for r in self.rows)

    @property
    def fail_count(self) -> int:
        return len(self.rows) - self.pass_count

    @property
    def ok(self) -> bool:
        return self.fail_count == 0

    def render(self) -> str:
        spec = EXPERIMENTS[self.config.experiment]
        lines = ["# noisecorr report", f"# backend={self.backend}", f"# rng={RNG_NAME}"]
        lines += [f"# {item}" for item in self.config.echo()]
        lines.append(f"# rows: {spec.columns}")
        for row in self.rows:
            lines += [f"# trial {row.trial_id}: {note}" for note in row.notes]
        lines.append("trial_id,lhs,rhs,holds,slack")
        lines += [row.csv() for row in self.rows]
        lines.append(f"# trials={len(self.rows)} pass={self.pass_count} fail={self.fail_count}")
        return "\n".join(lines) + "\n"


# instance pools -------------------------------------------------------------

_DIST_NAME = re.compile(r"(xor|ap|cube|random)(\d+)?(?:_(\d+))?")


def _scenario(cfg: ExperimentConfig, t: int, rng: np.random.Generator,
              names: tuple[str, ...]) -> tuple[str, JointDistribution]:
    """Column law for trial ``t``: the input file, the configured ``dist``, or
    the pool entry ``t mod len(pool)``.  Names look like ``ap5_4`` (p, k),
    ``cube2_2`` (p, d), ``random4`` (k) or ``xor``."""
    if cfg.input:
        return "file", read_distribution(cfg.input)
    name = cfg.dist if cfg.dist != "mixed" else names[t % len(names)]
    match = _DIST_NAME.fullmatch(name)
    if not match:
        raise ConfigError(f"unknown distribution {name!r}")
    kind, a, b = match.groups()
    if kind == "xor":
        return name, xor_triple_distribution()
    if kind == "ap":
        return name, ap_distribution(int(a or cfg.p or 3), int(b or cfg.k or 3))
    if kind == "cube":
        return name, gowers_cube_distribution(int(a or cfg.p or 2), int(b or 2))
    return name, random_pairwise_independent(rng, int(a or cfg.k or 3), cfg.p or 3)


MAIN_POOL = ("xor", "ap3_3", "cube2_2", "ap5_3", "random3", "ap5_4", "random4")
ROTH_POOL = ("xor", "ap3_3", "ap5_3")
EXTRACT_POOL = ("xor", "ap3_3", "cube2_2", "ap5_4")
WORK_CAP = 10 ** 7


def _n_for(mu: JointDistribution, n_max: int) -> int:
    n = 1
    while n < n_max and max(mu.sizes) ** ((n + 1) * mu.k) <= WORK_CAP:
        n += 1
    return n


def _random_functions(rng, mu, n_max, d_max, scale=(0.2, 1.0)):
    n = int(rng.integers(1, _n_for(mu, n_max) + 1))
    fhats = []
    for q in mu.sizes:
        d = int(rng.integers(0, min(d_max, n) + 1))
        f = generate_random_lowdeg(q, n, d, rng)
        fhats.append(f.scaled(rng.uniform(*scale)))
    return n, fhats


# experiments ----------------------------------------------------------------

def _certify(cfg, t, kind):
    rng = trial_rng(cfg.seed, t)
    pool = ROTH_POOL if kind == "roth" else MAIN_POOL
    name, mu = _scenario(cfg, t, rng, pool)
    scale = (0.2, 3.0) if kind == "main" else (0.2, 1.0)
    n, fhats = _random_functions(rng, mu, cfg.get("n"), cfg.get("d"), scale)
    tol = cfg.tolerance
    if kind == "main":
        cert = certify_main(fhats, mu, tol=tol)
    elif kind == "correlation":
        cert = certify_correlation(fhats, mu, tol=tol)
    elif kind == "roth":
        cert = certify_roth(fhats, mu, tol=tol)
    else:
        bases = default_bases(mu)
        fhats = [_unit_lk(f, b, mu.k, rng) for f, b in zip(fhats, bases)]
        cert = certify_holder_truncation(fhats, mu, int(rng.integers(0, n + 1)), bases, tol)
    return TrialRow(t, cert.lhs, cert.rhs, cert.holds, cert.slack, (f"{name} n={n}",))


def _unit_lk(fhat, basis, k, rng):
    norm = lp_norm(inverse_transform(fhat, basis), k, basis.measure)
    return fhat.scaled(rng.uniform(0.5, 1.0) / norm) if norm > 0 else fhat


def _gowers_routes(cfg, t):
    rng = trial_rng(cfg.seed, t)
    p = cfg.p or int(rng.choice([2, 3]))
    n = int(rng.integers(1, cfg.get("n") + 1))
    d = int(rng.integers(1, cfg.get("d") + 1))
    f = random_bounded_function((p,) * n, rng)
    values = [gowers_direct(f, d).value, gowers_recursive(f, d).value,
              gowers_via_cube_nip(f, d).value]
    if d == 2:
        fhat = transform(f, [standard_fourier_basis(p)] * n)
        values.append(u2_closed_form(fhat).value)
    spread = max(values) - min(values)
    return TrialRow.bound(t, spread, 0.0, cfg.tolerance,
                          notes=(f"p={p} n={n} d={d} norm={values[0]!r}",))


def _gowers_inequality(cfg, t):
    rng = trial_rng(cfg.seed, t)
    p, k = cfg.get("p"), cfg.get("k")
    n = int(rng.integers(1, cfg.get("n") + 1))
    fs = [random_bounded_function((p,) * n, rng) for _ in range(k)]
    cert = check_gowers_inequality(fs, p, cfg.tolerance)
    return TrialRow(t, cert.lhs, cert.rhs, cert.holds, cert.slack)


def _inverse_gowers(cfg, t):
    rng = trial_rng(cfg.seed, t)
    p, order = cfg.get("p"), cfg.get("k")
    n = int(rng.integers(1, cfg.get("n") + 1))
    d = int(rng.integers(0, min(cfg.get("d"), n) + 1))
    fhat = generate_random_lowdeg(p, n, d, rng)
    cert = certify_inverse_gowers(fhat, d, order, cfg.get("epsilon"), cfg.tolerance)
    return TrialRow(t, cert.lhs, cert.rhs, cert.holds, cert.slack, (f"n={n} d={d}",))


def _ap_distinguish(cfg, t):
    rng = trial_rng(cfg.seed, t)
    p, k, d = cfg.get("p"), cfg.get("k"), cfg.get("d")
    n = int(rng.integers(1, cfg.get("n") + 1))
    if t % 2 == 0:
        M = column_moments(ap_distribution(p, k), [standard_fourier_basis(p)] * k)
        fhats = planted_instance(M, n, [int(rng.integers(0, n))], cfg.noise, min(d, 1), rng)
    else:
        fhats = [generate_random_lowdeg(p, n, int(rng.integers(0, min(d, n) + 1)), rng)
                 for _ in range(k)]
    rep = certify_ap_distinguisher(fhats, p, d, cfg.get("epsilon"))
    note = f"gap={rep.gap!r} vacuous={int(rep.vacuous)}"
    if rep.message:
        note += f" {rep.message}"
    return TrialRow(t, rep.uniformity_threshold, min(rep.max_coefficients), rep.holds,
                    min(rep.max_coefficients) - rep.uniformity_threshold, (note,))


def _extract(cfg, t):
    rng = trial_rng(cfg.seed, t)
    name, mu = _scenario(cfg, t, rng, EXTRACT_POOL)
    bases = default_bases(mu)
    M = column_moments(mu, bases)
    n = int(rng.integers(1, min(cfg.get("n"), _n_for(mu, cfg.get("n"))) + 1))
    coords = sorted(int(c) for c in rng.choice(n, size=int(rng.integers(1, n + 1)),
                                                replace=False))
    fhats = planted_instance(M, n, coords, cfg.noise, 1, rng)
    ctx = _Context(fhats, mu, bases)
    corr = abs(ctx.correlation())
    problems = []
    r = cfg.r or max(s for s in range(2, mu.k) if is_r_wise_independent(mu, s))
    delta_w = 0.5 * corr / (2 * (mu.k - 2) * ctx.CD)
    w = extract_witness(fhats, mu, delta_w, bases)
    if w is None:
        problems.append("witness: none")
        lhs, rhs = delta_w ** 2 * ctx.CD, 0.0
    else:
        problems += verify_witness(w, fhats, mu, bases, cfg.tolerance)
        lhs, rhs = delta_w ** 2 * ctx.CD, w.corr_mag
    fam = extract_family(fhats, mu, 0.5 * corr / ctx.CD, r, bases)
    if fam is None:
        problems.append("family: none")
    else:
        problems += verify_family(fam, fhats, mu, bases, cfg.tolerance)
    notes = [f"{name} n={n} coords={coords} r={r}"]
    if fam is not None:
        notes.append(f"family {[(i, list(s)) for i, s, _ in fam.members]} "
                     f"coverage {fam.coverage}")
    notes += problems
    return TrialRow.bound(t, lhs, rhs, 0.0, not problems, tuple(notes))


def _demo_xor(cfg, t):
    n, level = cfg.get("n"), cfg.threshold
    f = np.abs(xor_example_function(n).values).ravel()
    mu = xor_triple_distribution()
    worst = 0.0
    # columns are drawn independently, so walk all 4^n support matrices
    rows = np.asarray(mu.support)
    weights = 2 ** np.arange(n - 1, -1, -1)
    for cols in np.ndindex(*(len(mu),) * n):
        block = rows[list(cols)]           # n x 3 atom indices
        codes = weights @ block            # C-order point code of each row
        worst = max(worst, float(f[codes].min()))
    frac = float(np.mean(f >= level)) ** 3
    note = (f"support points={len(mu) ** n} max_min_abs={worst!r} "
            f"product_fraction_all_ge_{level}={frac!r}")
    return TrialRow.bound(t, worst, 0.0, cfg.tolerance, frac > 0, (note,))


def _demo_quadratic(cfg, t):
    n = cfg.get("n")
    f = quadratic_phase(n)
    u3 = gowers_norm(f, 3).value
    top = sup_coefficient(transform(f, [standard_fourier_basis(2)] * n))
    note = f"u3={u3!r} max_coefficient={top!r}"
    ok = abs(u3 - 1.0) <= cfg.tolerance
    return TrialRow(t, u3, 1.0, ok, 1.0 - u3, (note,))


def _demo_allzeros(cfg, t):
    n, m = cfg.get("n"), cfg.m
    subsets = [[int(a) for a in grp.split(",")] for grp in cfg.subsets.split(";")]
    mu = xor_subset_distribution(m, subsets)
    k = mu.k
    zero_ind = DenseFunction.from_callable((2,) * n, lambda x: float(not any(x)))
    value = nip_bruteforce([zero_ind] * k, mu).value.real
    expected = 2.0 ** (-m * n)
    norm = 2.0 ** (-n / 2)
    ratio = value / norm ** (k - 1)
    note = (f"k={k} nip={value!r} expected={expected!r} norm2={norm!r} "
            f"ratio_to_prod_norms={ratio!r} log2_ratio_per_coord={math.log2(ratio) / n!r}")
    ok = abs(value - expected) <= cfg.tolerance
    return TrialRow(t, value, expected, ok, expected - value, (note,))


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    trial: Callable
    trials: int
    defaults: dict
    columns: str
    keys: tuple


def _spec(name, trial, trials, columns, extra=(), **defaults):
    keys = tuple(defaults) + tuple(extra)
    return name, ExperimentSpec(name, trial, trials, defaults, columns, keys)


_LAW_KEYS = ("dist", "input", "p", "k")

EXPERIMENTS: dict[str, ExperimentSpec] = dict([
    _spec("certify-main", partial(_certify, kind="main"), 100,
          "lhs=|nip| rhs=C^D*max|fhat_1|*prod ||f_i||_2", _LAW_KEYS, n=3, d=3),
    _spec("certify-correlation", partial(_certify, kind="correlation"), 100,
          "lhs=|noise correlation| rhs=delta*(k-2)*C^D", _LAW_KEYS, n=3, d=3),
    _spec("certify-roth", partial(_certify, kind="roth"), 100,
          "lhs=|nip| rhs=min_i max|fhat_i|", _LAW_KEYS, n=3, d=3),
    _spec("certify-holder", partial(_certify, kind="holder"), 100,
          "lhs=|nip(f)-nip(f<=d)| rhs=k*eps*(1+eps)^(k-1)", _LAW_KEYS, n=3, d=3),
    _spec("gowers", _gowers_routes, 50,
          "lhs=spread of U^d norms across routes rhs=0", ("p",), n=2, d=3),
    _spec("gowers-inequality", _gowers_inequality, 100,
          "lhs=|E prod f_i(iX+Y)| rhs=min_i ||f_i||_U^(k-1)", p=3, k=3, n=2),
    _spec("inverse-gowers", _inverse_gowers, 50,
          "lhs=coefficient threshold (0 when ||f||_U^k <= epsilon) rhs=max|fhat|",
          p=2, k=2, n=4, d=2, epsilon=0.1),
    _spec("ap-distinguish", _ap_distinguish, 50,
          "lhs=uniformity threshold rhs=min_i max|fhat_i|; vacuous trials "
          "(gap <= epsilon) hold trivially", ("noise",), p=3, k=3, n=2, d=2, epsilon=0.05),
    _spec("extract", _extract, 50,
          "lhs=delta^2*C^D rhs=witness correlation re-verified by enumeration",
          ("dist", "input", "noise", "r"), n=2),
    _spec("demo-xor-noninvariance", _demo_xor, 1,
          "lhs=max over support of min_i |f(row_i)| rhs=0", ("threshold",), n=4),
    _spec("demo-quadratic-phase", _demo_quadratic, 1,
          "lhs=||f||_U3 rhs=1", n=8),
    _spec("demo-allzeros", _demo_allzeros, 1,
          "lhs=nip of the all-zeros indicator rhs=2^(-m*n)", ("m", "subsets"), n=4),
])


def _run_trial(cfg: ExperimentConfig, t: int) -> TrialRow:
    return EXPERIMENTS[cfg.experiment].trial(cfg, t)


def run(config: ExperimentConfig) -> Report:
    """Run every trial of ``config`` and collect the rows in trial order."""
    start = time.perf_counter()
    trials = range(config.num_trials)
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            rows = list(pool.map(partial(_run_trial, config), trials))
    else:
        rows = [_run_trial(config, t) for t in trials]
    return Report(config, rows, time.perf_counter() - start)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="noisecorr", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", help="key=value config file")
    ap.add_argument("--experiment", choices=sorted(EXPERIMENTS))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--tol", type=float, dest="tolerance")
    ap.add_argument("--out", dest="output", help="report path (default stdout)")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="extra config override, repeatable")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    text = ""
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 2
        overrides[key.strip()] = value.strip()
    for key in ("experiment", "seed", "trials", "tolerance", "output", "workers"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    try:
        cfg = ExperimentConfig.parse(text, **overrides)
        report = run(cfg)
    except (ConfigError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report.render()
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{cfg.experiment}: {report.pass_count}/{len(report.rows)} passed "
          f"in {report.wall_clock:.2f}s", file=sys.stderr)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
