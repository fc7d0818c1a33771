"""Exact error rates, Neyman-Pearson calibration and parameter sweeps."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .adversary import AdversaryProfile
from .config import ScenarioConfig
from .fusion_engine import PropagationResult, StateSpaceError, propagate
from .signal_model import SignalModel
from .social_kernel import SocialKernel

log = logging.getLogger(__name__)


class InfeasibleAlphaError(ValueError):
    """No threshold in the calibration grid meets the false-alarm budget."""


@dataclass(frozen=True, eq=False)
class RateCurve:
    """Per-node error rates, entry ``i`` belonging to node ``i + 1``.

    ``detect`` and ``reject`` are the complements of ``md`` and ``fa``,
    accumulated separately rather than as ``1 - md``.
    """

    log_md: np.ndarray
    log_fa: np.ndarray
    log_detect: np.ndarray
    log_reject: np.ndarray

    @property
    def md(self) -> np.ndarray:
        return np.exp(self.log_md)

    @property
    def fa(self) -> np.ndarray:
        return np.exp(self.log_fa)

    @property
    def detect(self) -> np.ndarray:
        return np.exp(self.log_detect)

    @property
    def reject(self) -> np.ndarray:
        return np.exp(self.log_reject)

    def __len__(self):
        return self.log_md.size


def exact_rates(result: PropagationResult) -> RateCurve:
    """Honest-decision miss-detection and false-alarm rate of every node."""
    model = result.model
    out = np.empty((4, result.N))
    with np.errstate(divide="ignore"):
        for n in range(1, result.N + 1):
            reach = result.table(n).reachable
            tau = result.tau_array(n)[reach]
            ls = result.table(n).log_state[reach]
            out[0, n - 1] = logsumexp(np.log(model.cdf(1, tau)) + ls[:, 1])
            out[1, n - 1] = logsumexp(np.log(model.sf(0, tau)) + ls[:, 0])
            out[2, n - 1] = logsumexp(np.log(model.sf(1, tau)) + ls[:, 1])
            out[3, n - 1] = logsumexp(np.log(model.cdf(0, tau)) + ls[:, 0])
    return RateCurve(*out)


def calibrate_tau0(
    model: SignalModel,
    kernel: SocialKernel,
    adv: Optional[AdversaryProfile],
    alpha: float,
    N: int,
    grid: Sequence[float],
) -> tuple[float, float]:
    """Smallest ``tau0`` in ``grid`` whose node-``N`` false-alarm rate is at most ``alpha``.

    Returns ``(tau0, fa)``.
    """
    if len(grid) == 0:
        raise ValueError("calibration grid is empty")
    for tau0 in sorted(grid):
        fa = float(exact_rates(propagate(model, kernel, adv, tau0, N)).fa[-1])
        if fa <= alpha:
            return float(tau0), fa
    raise InfeasibleAlphaError(
        f"no tau0 in [{min(grid)}, {max(grid)}] reaches false-alarm rate {alpha} at N={N}"
    )


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    md_final: float
    fa_final: float
    config_hash: str
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def run_config(config: ScenarioConfig, N: Optional[int] = None) -> PropagationResult:
    return propagate(
        config.signal_model(), config.social_kernel(), config.adversary(), config.tau0,
        N if N is not None else config.N,
    )


def _sweep_point(args) -> SweepRow:
    config, value, N = args
    try:
        rates = exact_rates(run_config(config, N))
    except (StateSpaceError, MemoryError) as exc:
        return SweepRow(float(value), float("nan"), float("nan"), config.config_hash(), str(exc))
    return SweepRow(float(value), float(rates.md[-1]), float(rates.fa[-1]), config.config_hash())


def sweep(
    base: ScenarioConfig,
    axis: str,
    values: Sequence[float],
    N: Optional[int] = None,
    jobs: int = 1,
) -> list[SweepRow]:
    """Exact final-node rates for each value along ``axis``, in the given order.

    Resource errors mark their row as failed instead of aborting the sweep.
    """
    jobs_in = [(base.at_axis(axis, v), v, N) for v in values]
    if jobs <= 1 or len(jobs_in) <= 1:
        return [_sweep_point(j) for j in jobs_in]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_point, jobs_in))
