"""Closed-form and structured fixation-probability solvers.

Covers the regimes with known exact answers: neutral fitness at equal mixing
(any graph), neutral fitness on regular and bidegreed graphs (any mixing),
and arbitrary parameters on cycles (one-dimensional birth-death chain) and
stars (two-row transfer-matrix recurrence over the leaf count and the
center's type).

Every solver has an exact rational mode used to certify golden values; the
float paths are guarded against under/overflow for fitness far from 1, where
the cycle products leave the double range while the true probabilities are
tiny but positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from ._util import as_fraction
from .drift import Potential
from .graphs import Graph, degree_profile
from .process import Configuration

__all__ = [
    "NotBidegreedError",
    "SingularRecurrenceError",
    "CycleRates",
    "StarCoefficients",
    "StarFixation",
    "neutral_half_lambda_fp",
    "neutral_regular_fp",
    "bidegreed_neutral_fp",
    "cycle_rates",
    "cycle_fp",
    "star_coefficients",
    "star_fp",
]

Scalar = Union[int, float, str, Fraction]


class NotBidegreedError(ValueError):
    pass


class SingularRecurrenceError(ArithmeticError):
    pass


def _coerce(lam: Scalar, r: Scalar, exact: bool) -> tuple:
    if exact:
        lam_c, r_c = as_fraction(lam), as_fraction(r)
    else:
        lam_c, r_c = float(as_fraction(lam)), float(as_fraction(r))
    if not 0 <= lam_c <= 1:
        raise ValueError(f"lam must be in [0, 1], got {lam}")
    if r_c <= 0:
        raise ValueError(f"r must be positive, got {r}")
    return lam_c, r_c


def neutral_half_lambda_fp(n: int, s_size: int, exact: bool = False) -> float | Fraction:
    """Fixation probability ``|S|/n`` at equal mixing and neutral fitness."""
    if not 0 <= s_size <= n or n < 1:
        raise ValueError(f"need 0 <= s_size <= n, got s_size={s_size}, n={n}")
    value = Fraction(s_size, n)
    return value if exact else float(value)


def neutral_regular_fp(n: int, s_size: int, exact: bool = False) -> float | Fraction:
    """Fixation probability ``|S|/n`` on regular graphs at neutral fitness.

    Valid for every mixing weight, which is why lam is not a parameter.
    """
    return neutral_half_lambda_fp(n, s_size, exact=exact)


def bidegreed_neutral_fp(g: Graph, lam: Scalar, s: Configuration,
                         exact: bool = False) -> float | Fraction:
    """Neutral fixation probability on a bidegreed graph.

    Weighted vertex count with weight 1 on the low-degree class and the
    mixing-dependent ratio on the high-degree class; collapses to ``|S|/n``
    for regular graphs and at equal mixing.
    """
    if g.n != s.n:
        raise ValueError("configuration size does not match graph")
    profile = degree_profile(g)
    if not profile.is_bidegreed:
        raise NotBidegreedError(
            f"graph has degrees {profile.distinct_degrees}, not at most two values"
        )
    lam_f = as_fraction(lam)
    if not 0 <= lam_f <= 1:
        raise ValueError(f"lam must be in [0, 1], got {lam}")
    pot = Potential.bidegreed_f(g, lam_f)
    value = pot.value(s, exact=True) / pot.total(exact=True)
    return value if exact else float(value)


# ----------------------------------------------------------------------------
# Cycles
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleRates:
    """Step rates of the mutant-arc length on a cycle with k mutants."""

    k: int
    p_up: float | Fraction
    p_down: float | Fraction
    gamma: float | Fraction
    total_fitness: float | Fraction


def cycle_rates(n: int, k: int, lam: Scalar, r: Scalar, exact: bool = False) -> CycleRates:
    """Up/down probabilities for a contiguous arc of k mutants on an n-cycle.

    The arc boundary has two mutant ends and two resident ends except at
    ``k = 1`` and ``k = n - 1`` where the single minority vertex sees both
    its neighbors in the majority, removing the neighbor lottery.
    """
    if n < 3 or not 1 <= k <= n - 1:
        raise ValueError(f"need n >= 3 and 1 <= k <= n-1, got n={n}, k={k}")
    lam_c, r_c = _coerce(lam, r, exact)
    f_k = r_c * k + (n - k)
    if k < n - 1:
        p_up = lam_c * r_c / f_k + (1 - lam_c) * 2 * r_c / ((1 + r_c) * n)
    else:
        p_up = lam_c * r_c / f_k + (1 - lam_c) / n
    if k > 1:
        p_down = lam_c / f_k + (1 - lam_c) * 2 / ((1 + r_c) * n)
    else:
        p_down = lam_c / f_k + (1 - lam_c) / n
    return CycleRates(k, p_up, p_down, p_down / p_up, f_k)


def cycle_fp(n: int, lam: Scalar, r: Scalar, exact: bool = False) -> float | Fraction:
    """Single-mutant fixation probability on the n-cycle.

    Evaluates ``1 / (1 + sum_j prod_{k<=j} gamma_k)``.  The float path works
    in log space throughout: for small fitness the partial products overflow
    doubles long before the final probability does.
    """
    if n < 3:
        raise ValueError(f"cycle needs n >= 3, got {n}")
    lam_c, r_c = _coerce(lam, r, exact)
    gammas = [cycle_rates(n, k, lam_c, r_c, exact=exact).gamma for k in range(1, n)]
    if exact:
        total = Fraction(0)
        prod = Fraction(1)
        for gamma in gammas:
            prod *= gamma
            total += prod
        return 1 / (1 + total)
    log_cum = np.cumsum(np.log(np.array(gammas, dtype=np.float64)))
    log_sum = np.logaddexp.reduce(log_cum)
    return float(np.exp(-np.logaddexp(0.0, log_sum)))


# ----------------------------------------------------------------------------
# Stars
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class StarCoefficients:
    """One-step move coefficients for the star chain, indexed by mutant leaves.

    State (i, center type): ``cap_a/cap_b/cap_c`` are the center-mutant move
    probabilities (leaf gained / center lost / no change), valid for
    ``i <= N - 1``; ``a/b/c`` the center-resident ones (center gained / no
    change / leaf lost), valid for ``i >= 1``.  ``alpha, beta`` and ``p, q``
    are the same rows normalized by the escape probability.  Entries outside
    the valid range hold None (those states are absorbing).
    """

    leaves: int
    cap_a: tuple
    cap_b: tuple
    cap_c: tuple
    a: tuple
    b: tuple
    c: tuple
    alpha: tuple
    beta: tuple
    p: tuple
    q: tuple


def star_coefficients(leaves: int, lam: Scalar, r: Scalar,
                      exact: bool = False) -> StarCoefficients:
    if leaves < 2:
        raise ValueError(f"need at least 2 leaves, got {leaves}")
    lam_c, r_c = _coerce(lam, r, exact)
    big_n = leaves
    n = big_n + 1
    cap_a: list = [None] * (big_n + 1)
    cap_b: list = [None] * (big_n + 1)
    cap_c: list = [None] * (big_n + 1)
    low_a: list = [None] * (big_n + 1)
    low_b: list = [None] * (big_n + 1)
    low_c: list = [None] * (big_n + 1)
    alpha: list = [None] * (big_n + 1)
    beta: list = [None] * (big_n + 1)
    p: list = [None] * (big_n + 1)
    q: list = [None] * (big_n + 1)
    for i in range(big_n + 1):
        d_i = big_n - i
        f_star = r_c * i + d_i + r_c
        f_emp = r_c * i + d_i + 1
        g_i = r_c * i + d_i
        if i <= big_n - 1:
            cap_a[i] = lam_c * r_c * d_i / (big_n * f_star) + (1 - lam_c) * d_i / n
            cap_b[i] = lam_c * d_i / f_star + (1 - lam_c) * d_i / (n * g_i)
            cap_c[i] = (lam_c * (r_c * i / f_star + r_c * i / (big_n * f_star))
                        + (1 - lam_c) * (i * g_i + r_c * i) / (n * g_i))
            escape = 1 - cap_c[i]
            if escape <= 0:
                raise SingularRecurrenceError(f"no escape from center-mutant state i={i}")
            alpha[i] = cap_a[i] / escape
            beta[i] = cap_b[i] / escape
        if i >= 1:
            low_a[i] = lam_c * r_c * i / f_emp + (1 - lam_c) * r_c * i / (n * g_i)
            low_c[i] = lam_c * i / (big_n * f_emp) + (1 - lam_c) * i / n
            low_b[i] = 1 - low_a[i] - low_c[i]
            escape = low_a[i] + low_c[i]
            if escape <= 0:
                raise SingularRecurrenceError(f"no escape from center-resident state i={i}")
            p[i] = low_a[i] / escape
            q[i] = low_c[i] / escape
    return StarCoefficients(
        big_n, tuple(cap_a), tuple(cap_b), tuple(cap_c),
        tuple(low_a), tuple(low_b), tuple(low_c),
        tuple(alpha), tuple(beta), tuple(p), tuple(q),
    )


@dataclass(frozen=True)
class StarFixation:
    """Fixation probabilities on a star, for every symmetric state.

    ``center_mutant[i]`` is the fixation probability with i mutant leaves and
    a mutant center, ``center_resident[i]`` with a resident center.
    """

    leaves: int
    center_start: float | Fraction
    leaf_start: float | Fraction
    center_mutant: tuple
    center_resident: tuple


def star_fp(leaves: int, lam: Scalar, r: Scalar, exact: bool = False) -> StarFixation:
    """Fixation probabilities on the star with the given number of leaves.

    The two-term recurrences over (mutant leaves, center type) combine into
    2x2 transfer matrices; the boundary values (extinction at zero mutants
    with resident center, fixation at all-mutant leaves with mutant center)
    pin the chain, and a forward substitution recovers the full state table.
    """
    coeff = star_coefficients(leaves, lam, r, exact=exact)
    big_n = leaves
    one = Fraction(1) if exact else 1.0

    # Transfer product mapping (Ps[1], Pe[0]) to (Ps[N], Pe[N-1]); the float
    # path rescales to dodge overflow for strongly disadvantageous mutants.
    m11 = one
    m12 = m21 = zero = one - one
    m22 = one
    log_scale = 0.0
    for i in range(1, big_n):
        t11 = (one - coeff.beta[i] * coeff.p[i]) / coeff.alpha[i]
        t12 = -(coeff.beta[i] * coeff.q[i]) / coeff.alpha[i]
        t21 = coeff.p[i]
        t22 = coeff.q[i]
        m11, m12, m21, m22 = (
            t11 * m11 + t12 * m21, t11 * m12 + t12 * m22,
            t21 * m11 + t22 * m21, t21 * m12 + t22 * m22,
        )
        if not exact:
            mag = max(abs(m11), abs(m12), abs(m21), abs(m22))
            if mag > 1e200 or (mag < 1e-200 and mag > 0.0):
                m11, m12, m21, m22 = m11 / mag, m12 / mag, m21 / mag, m22 / mag
                log_scale += float(np.log(mag))
    if m11 <= 0:
        raise SingularRecurrenceError("transfer product lost positivity")
    if exact:
        ps1 = 1 / m11
    else:
        ps1 = float(np.exp(-(np.log(m11) + log_scale)))

    ps: list = [zero] * (big_n + 1)
    pe: list = [zero] * (big_n + 1)
    ps[1] = ps1
    pe[0] = zero
    for i in range(1, big_n):
        pe[i] = coeff.p[i] * ps[i] + coeff.q[i] * pe[i - 1]
        ps[i + 1] = (ps[i] - coeff.beta[i] * pe[i]) / coeff.alpha[i]
    ps[big_n] = one  # boundary condition; the recurrence reproduces it to roundoff
    pe[big_n] = coeff.p[big_n] * ps[big_n] + coeff.q[big_n] * pe[big_n - 1]
    ps[0] = coeff.alpha[0] * ps[1]
    return StarFixation(big_n, ps[0], pe[1], tuple(ps), tuple(pe))
