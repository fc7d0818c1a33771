"""Discrete sensor signal models and the likelihood statistics derived from them.

A sensor reports an integer level ``s`` in ``{0, ..., levels - 1}``. Under each
hypothesis ``w`` the level follows ``pmf0`` or ``pmf1``; nodes only ever look
at the signal through its natural-log likelihood ratio ``loglik[s]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import binom

PMF_ATOL = 1e-12

TAIL_MODES = ("exact-count", "paper-literal-renormalized")


@dataclass(frozen=True, eq=False)
class SignalModel:
    """Pair of conditional distributions over a finite signal support.

    ``loglik`` may be supplied when a closed form is available (it is checked
    against ``log(pmf1 / pmf0)``); otherwise it is derived. Entries where both
    pmfs vanish carry ``nan`` and are ignored everywhere.
    """

    pmf0: np.ndarray
    pmf1: np.ndarray
    loglik: Optional[np.ndarray] = None
    lower_bound: float = field(init=False)
    upper_bound: float = field(init=False)

    def __post_init__(self):
        p0 = np.array(self.pmf0, dtype=float)
        p1 = np.array(self.pmf1, dtype=float)
        if p0.ndim != 1 or p0.shape != p1.shape or p0.size == 0:
            raise ValueError("pmf0 and pmf1 must be 1-d arrays of equal, positive length")
        for name, p in (("pmf0", p0), ("pmf1", p1)):
            if np.any(p < 0) or not np.all(np.isfinite(p)):
                raise ValueError(f"{name} has negative or non-finite entries")
            if abs(math.fsum(p) - 1.0) > PMF_ATOL:
                raise ValueError(f"{name} sums to {math.fsum(p)!r}, not 1")
        if np.any((p0 > 0) != (p1 > 0)):
            raise ValueError("pmf0 and pmf1 are not mutually absolutely continuous")

        support = p0 > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            derived = np.where(support, np.log(p1 / p0), np.nan)
        if self.loglik is None:
            ll = derived
        else:
            ll = np.array(self.loglik, dtype=float)
            if ll.shape != p0.shape:
                raise ValueError("loglik must match the pmf shape")
            ll = np.where(support, ll, np.nan)
            if not np.allclose(ll[support], derived[support], rtol=0, atol=1e-9):
                raise ValueError("supplied loglik disagrees with log(pmf1 / pmf0)")

        for arr in (p0, p1, ll):
            arr.setflags(write=False)
        object.__setattr__(self, "pmf0", p0)
        object.__setattr__(self, "pmf1", p1)
        object.__setattr__(self, "loglik", ll)
        object.__setattr__(self, "lower_bound", float(np.min(ll[support])))
        object.__setattr__(self, "upper_bound", float(np.max(ll[support])))

        # Sorted distinct likelihood levels with cumulative masses on both sides,
        # so F and 1 - F are each computed as a direct sum (no cancellation).
        levels = np.unique(ll[support])
        below, above = [], []
        for p in (p0, p1):
            mass = np.array([math.fsum(p[ll == v]) for v in levels])
            lo = np.concatenate(([0.0], np.cumsum(mass)))
            hi = np.concatenate((np.cumsum(mass[::-1])[::-1], [0.0]))
            # Past the extreme levels the decision is certain, not 1 - ulp.
            lo[-1] = hi[0] = 1.0
            below.append(lo)
            above.append(hi)
        object.__setattr__(self, "_levels", levels)
        object.__setattr__(self, "_mass_below", tuple(below))
        object.__setattr__(self, "_mass_above", tuple(above))

    @property
    def levels(self) -> int:
        return self.pmf0.size

    def pmf(self, w: int) -> np.ndarray:
        return self.pmf1 if _check_hypothesis(w) else self.pmf0

    def cdf(self, w: int, tau) -> np.ndarray:
        """Vectorised ``P_w{loglik(S) < tau}``; ``nan`` thresholds map to ``nan``."""
        tau = np.asarray(tau, dtype=float)
        idx = np.searchsorted(self._levels, np.nan_to_num(tau), side="left")
        out = self._mass_below[_check_hypothesis(w)][idx]
        return np.where(np.isnan(tau), np.nan, out)

    def sf(self, w: int, tau) -> np.ndarray:
        """Vectorised ``P_w{loglik(S) >= tau}``, the complement of :meth:`cdf`."""
        tau = np.asarray(tau, dtype=float)
        idx = np.searchsorted(self._levels, np.nan_to_num(tau), side="left")
        out = self._mass_above[_check_hypothesis(w)][idx]
        return np.where(np.isnan(tau), np.nan, out)

    def jump_points(self) -> np.ndarray:
        """Distinct values taken by ``loglik`` on the support, ascending."""
        return self._levels.copy()


@dataclass(frozen=True)
class MixtureScenario:
    """Binomial background with a uniform high-level tail when an attack is in range.

    ``m`` is the binomial parameter (support ``0..m``), ``q`` its success
    probability and ``r`` the fraction of the area one sensor covers.
    """

    m: int
    q: float = 1.0 / 3.0
    r: float = 0.05
    tail_normalization: str = "exact-count"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q!r}")
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {self.r!r}")
        if self.tail_normalization not in TAIL_MODES:
            raise ValueError(f"tail_normalization must be one of {TAIL_MODES}")
        if not self.tail_levels().size:
            raise ValueError(
                f"alarm threshold {self.alarm_threshold:.6g} leaves no level <= m={self.m}"
            )

    @property
    def alarm_threshold(self) -> float:
        """Mean plus two standard deviations of the background binomial."""
        m, q = self.m, self.q
        return m * q + 2.0 * math.sqrt(m * q * (1.0 - q))

    def tail_levels(self) -> np.ndarray:
        s = np.arange(self.m + 1)
        # Round-off guard: T = m exactly (m = 2, q = 1/3) must keep level m.
        return s[s >= self.alarm_threshold - 1e-9]


def _mixture_pmfs(scenario: MixtureScenario):
    m, q, r = scenario.m, scenario.q, scenario.r
    s = np.arange(m + 1)
    pmf0 = binom.pmf(s, m, q)
    pmf0 = pmf0 / math.fsum(pmf0)
    in_tail = np.isin(s, scenario.tail_levels())
    if scenario.tail_normalization == "exact-count":
        tail = in_tail / in_tail.sum()
        norm = 1.0
    else:
        width = m - scenario.alarm_threshold
        tail = in_tail / width if width > 1e-9 else in_tail.astype(float)
        norm = math.fsum((1.0 - r) * pmf0 + r * tail)
    pmf1 = ((1.0 - r) * pmf0 + r * tail) / norm
    loglik = np.log((1.0 - r) + r * tail / pmf0)
    if norm != 1.0:
        loglik = loglik - math.log(norm)
    return pmf0, pmf1, loglik


def build_binomial_mixture(scenario: MixtureScenario) -> SignalModel:
    """Build the signal model for a :class:`MixtureScenario`.

    The log-likelihood is evaluated in closed form, so every level below the
    alarm threshold carries exactly ``log(1 - r)``.
    """
    pmf0, pmf1, loglik = _mixture_pmfs(scenario)
    return SignalModel(pmf0, pmf1, loglik)


def null_mixture(m: int, q: float = 1.0 / 3.0) -> SignalModel:
    """The ``r = 0`` limit of the mixture: both hypotheses coincide."""
    s = np.arange(m + 1)
    pmf0 = binom.pmf(s, m, q)
    pmf0 = pmf0 / math.fsum(pmf0)
    return SignalModel(pmf0, pmf0.copy(), np.zeros(m + 1))


def log_likelihood(model: SignalModel, s: int) -> float:
    """Signal log-likelihood ratio at level ``s``."""
    return float(model.loglik[_check_level(model, s)])


def likelihood_cdf(model: SignalModel, w: int, tau: float) -> float:
    """``F_w(tau) = P_w{loglik(S) < tau}`` (strict inequality)."""
    return float(model.cdf(w, tau))


def belief_bounds(model: SignalModel) -> tuple[float, float]:
    """Smallest and largest log-likelihood over the positive-mass support."""
    return model.lower_bound, model.upper_bound


def _check_hypothesis(w) -> int:
    if w not in (0, 1):
        raise ValueError(f"hypothesis must be 0 or 1, got {w!r}")
    return int(w)


def _check_level(model: SignalModel, s) -> int:
    if int(s) != s or not 0 <= s < model.levels or model.pmf0[int(s)] == 0:
        raise ValueError(f"signal level {s!r} is outside the support of size {model.levels}")
    return int(s)
