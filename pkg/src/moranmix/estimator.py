"""Monte Carlo fixation-probability estimation with certified run budgets.

Auto mode implements the approximation-scheme construction: with a fixation
probability lower bound ``c_fp * n^-c1`` and an absorption-time upper bound
``c_tau * n^c2``, running

    N = ceil( ln(16) / (2 eps^2 c_fp^2) * n^(2 c1) )    replicates with
    T = ceil( 8 c_tau * N * n^c2 )                      step cutoff

yields a (1 +- eps) multiplicative estimate with probability >= 3/4.  The
exponent pairs are certified only in specific regimes (equal mixing with
r >= 1, and almost-regular graphs with r >= alpha^2); auto mode refuses to
run outside them rather than inventing constants.

Cutoff handling: strict mode aborts the whole estimate if any replicate hits
the cutoff (the scheme's behavior); tolerant mode (default) reports cutoff
counts and brackets the estimate between counting cutoffs as extinctions and
as fixations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import _simulate
from ._util import mix64, mix64_array
from .graphs import Graph, degree_profile
from .process import Configuration, ProcessParams, default_max_steps

__all__ = [
    "EstimatorConfig",
    "EstimateReport",
    "InvalidConfigError",
    "AbortedError",
    "estimate",
    "sweep",
    "wilson_interval",
    "certified_auto_config",
]

_Z95 = 1.959963984540054


class InvalidConfigError(ValueError):
    pass


class AbortedError(RuntimeError):
    """Strict-mode abort: at least one replicate hit the step cutoff."""

    def __init__(self, report: "EstimateReport"):
        super().__init__(
            f"{report.cutoffs} of {report.num_runs} replicates hit the cutoff"
        )
        self.report = report


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; well-behaved near 0 and 1."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p_hat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p_hat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class EstimatorConfig:
    """Run budget specification.

    Build with :meth:`manual` (explicit replicate count and cutoff) or
    :meth:`auto` (theorem-driven budget from the four constants).  Replicate
    RNG streams derive from ``base_seed`` and the replicate index only, so
    reports are identical for any ``threads`` setting.
    """

    mode: str
    base_seed: int = 0
    strict_cutoff: bool = False
    threads: int | None = None
    num_runs: int | None = None
    cutoff: int | None = None
    epsilon: float | None = None
    c1: int | None = None
    c2: int | None = None
    c_fp: float | None = None
    c_tau: float | None = None

    @classmethod
    def manual(cls, num_runs: int, cutoff: int | None = None, base_seed: int = 0,
               strict_cutoff: bool = False, threads: int | None = None) -> "EstimatorConfig":
        if num_runs < 1:
            raise InvalidConfigError(f"need num_runs >= 1, got {num_runs}")
        if cutoff is not None and cutoff < 1:
            raise InvalidConfigError(f"need cutoff >= 1, got {cutoff}")
        return cls("manual", base_seed, strict_cutoff, threads,
                   num_runs=num_runs, cutoff=cutoff)

    @classmethod
    def auto(cls, epsilon: float, c1: int, c2: int, c_fp: float, c_tau: float,
             base_seed: int = 0, strict_cutoff: bool = True,
             threads: int | None = None) -> "EstimatorConfig":
        if not 0 < epsilon < 1:
            raise InvalidConfigError(f"need epsilon in (0, 1), got {epsilon}")
        if c_fp <= 0 or c_tau <= 0:
            raise InvalidConfigError("c_fp and c_tau must be positive")
        return cls("auto", base_seed, strict_cutoff, threads,
                   epsilon=epsilon, c1=c1, c2=c2, c_fp=c_fp, c_tau=c_tau)

    def resolve(self, n: int, r: float) -> tuple[int, int]:
        """Concrete (replicates, cutoff) for an n-vertex instance."""
        if self.mode == "manual":
            cutoff = self.cutoff if self.cutoff is not None else default_max_steps(n, r)
            return self.num_runs, cutoff
        num = math.ceil(
            math.log(16.0) / (2.0 * self.epsilon**2 * self.c_fp**2) * n ** (2 * self.c1)
        )
        cutoff = math.ceil(8.0 * self.c_tau * num * n**self.c2)
        return num, cutoff


def _regime_constants(g: Graph, params: ProcessParams, s0: Configuration
                      ) -> tuple[int, int, float, float] | None:
    """Certified (c1, c2, c_fp_max, c_tau_min) for the instance, or None."""
    lam_exact, r_exact = params.exact()
    if lam_exact == Fraction(1, 2) and r_exact >= 1:
        c_tau = float(r_exact / (r_exact - 1)) if r_exact > 1 else 0.25
        return (1, 4, float(s0.size), c_tau)
    alpha = degree_profile(g).alpha
    if r_exact > 1 and r_exact >= alpha * alpha:
        return (2, 4, 1.0, float(4 * r_exact / (r_exact - 1)))
    return None


def certified_auto_config(g: Graph, params: ProcessParams, s0: Configuration,
                          epsilon: float, base_seed: int = 0,
                          strict_cutoff: bool = True,
                          threads: int | None = None) -> EstimatorConfig:
    """Auto config with the certified constants for this instance.

    Raises :class:`InvalidConfigError` when neither certified regime applies
    (notably any r < 1, where no accuracy guarantee exists).
    """
    constants = _regime_constants(g, params, s0)
    if constants is None:
        raise InvalidConfigError(
            f"no certified budget for lam={params.lam}, r={params.r} on this graph; "
            "use EstimatorConfig.manual"
        )
    c1, c2, c_fp, c_tau = constants
    return EstimatorConfig.auto(epsilon, c1, c2, c_fp, c_tau, base_seed=base_seed,
                                strict_cutoff=strict_cutoff, threads=threads)


def _validate_auto(g: Graph, params: ProcessParams, s0: Configuration,
                   cfg: EstimatorConfig) -> None:
    constants = _regime_constants(g, params, s0)
    if constants is None:
        raise InvalidConfigError(
            f"auto mode is certified only for lam=1/2 with r >= 1 or almost-regular "
            f"graphs with r >= alpha^2; got lam={params.lam}, r={params.r}"
        )
    c1, c2, c_fp_max, c_tau_min = constants
    if (cfg.c1, cfg.c2) != (c1, c2):
        raise InvalidConfigError(
            f"exponents (c1={cfg.c1}, c2={cfg.c2}) do not match the certified "
            f"pair ({c1}, {c2}) for this regime"
        )
    if cfg.c_fp > c_fp_max or cfg.c_tau < c_tau_min:
        raise InvalidConfigError(
            f"need c_fp <= {c_fp_max} and c_tau >= {c_tau_min} in this regime, "
            f"got c_fp={cfg.c_fp}, c_tau={cfg.c_tau}"
        )


@dataclass(frozen=True)
class EstimateReport:
    """Replicate counts and the point/interval estimates they support."""

    fp_hat: float
    fixations: int
    extinctions: int
    cutoffs: int
    num_runs: int
    cutoff_steps: int
    mean_steps: float
    wilson_low: float
    wilson_high: float
    bracket_low: float
    bracket_high: float
    aborted: bool

    def as_dict(self) -> dict:
        return {
            "fp_hat": self.fp_hat,
            "fixations": self.fixations,
            "extinctions": self.extinctions,
            "cutoffs": self.cutoffs,
            "num_runs": self.num_runs,
            "cutoff_steps": self.cutoff_steps,
            "mean_steps": self.mean_steps,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
            "bracket_low": self.bracket_low,
            "bracket_high": self.bracket_high,
            "aborted": self.aborted,
        }


def estimate(g: Graph, s0: Configuration, params: ProcessParams,
             cfg: EstimatorConfig) -> EstimateReport:
    """Estimate the fixation probability from ``s0`` by replication.

    Deterministic in (inputs, base_seed).  In strict mode raises
    :class:`AbortedError` (carrying the report) if any replicate is cut off.
    """
    if g.n != s0.n:
        raise ValueError("configuration size does not match graph")
    if cfg.mode == "auto":
        _validate_auto(g, params, s0, cfg)
    num_runs, cutoff = cfg.resolve(g.n, params.r)
    indptr, indices, _, _ = g.csr()
    seeds = mix64_array(cfg.base_seed, np.arange(num_runs, dtype=np.uint64))
    init = s0.as_bool_array().astype(np.uint8)

    old_threads = None
    if cfg.threads is not None:
        import numba

        old_threads = numba.get_num_threads()
        numba.set_num_threads(cfg.threads)
    try:
        outcomes, steps = _simulate.run_batch(
            indptr, indices, init, params.lam, params.r, seeds, cutoff
        )
    finally:
        if old_threads is not None:
            import numba

            numba.set_num_threads(old_threads)

    fixations = int((outcomes == _simulate.FIXATION).sum())
    extinctions = int((outcomes == _simulate.EXTINCTION).sum())
    cutoffs = int((outcomes == _simulate.CUTOFF).sum())
    fp_hat = fixations / num_runs
    lo, hi = wilson_interval(fixations, num_runs)
    aborted = cfg.strict_cutoff and cutoffs > 0
    report = EstimateReport(
        fp_hat=fp_hat,
        fixations=fixations,
        extinctions=extinctions,
        cutoffs=cutoffs,
        num_runs=num_runs,
        cutoff_steps=cutoff,
        mean_steps=float(int(steps.sum()) / num_runs),
        wilson_low=lo,
        wilson_high=hi,
        bracket_low=fp_hat,
        bracket_high=(fixations + cutoffs) / num_runs,
        aborted=aborted,
    )
    if aborted:
        raise AbortedError(report)
    return report


def sweep(g: Graph, s0: Configuration, lambda_grid, r_grid,
          cfg: EstimatorConfig) -> list[tuple[float, float, EstimateReport]]:
    """One estimate per (lam, r) grid cell with independently derived seeds."""
    rows = []
    for i, lam in enumerate(lambda_grid):
        for j, r in enumerate(r_grid):
            cell_cfg = replace(cfg, base_seed=mix64(cfg.base_seed, i, j))
            params = ProcessParams(lam, r)
            rows.append((float(params.lam), float(params.r),
                         estimate(g, s0, params, cell_cfg)))
    return rows
