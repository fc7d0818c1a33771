"""Exact forward propagation of the social-learning decision process.

For each step ``n`` and hypothesis ``w`` the engine carries the joint law
``P_w{X_n = x, G_n = g}`` in log space. From it follow the social
log-likelihood ``Lambda_G(g) = log P_1{G_n = g} - log P_0{G_n = g}`` and the
per-state threshold ``tau_n(g) = tau0 - Lambda_G(g)`` that every honest node
compares its signal log-likelihood against.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .adversary import AdversaryProfile
from .signal_model import SignalModel, _check_hypothesis, _check_level
from .social_kernel import SocialKernel, SocialState, UnreachableStateError

log = logging.getLogger(__name__)

DEFAULT_MAX_STATES = 1 << 24
PRUNE_LOG_PROB = -745.0
NORMALIZATION_TOL = 1e-9


class StateSpaceError(RuntimeError):
    """The social state space at some step exceeds the configured cap."""


class AbsoluteContinuityError(RuntimeError):
    """A social state is possible under exactly one hypothesis."""


class NormalizationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class BeliefTable:
    """Log-domain joint law at one step.

    ``log_state[i, w] = log P_w{G_n = g_i}`` and
    ``log_joint[i, x, w] = log P_w{X_n = x, G_n = g_i}``; indices follow the
    kernel's numbering at this step.
    """

    step: int
    log_state: np.ndarray
    log_joint: np.ndarray

    @property
    def reachable(self) -> np.ndarray:
        return ~np.all(np.isneginf(self.log_state), axis=1)


@dataclass(frozen=True, eq=False)
class ThresholdMap:
    """``tau[i]`` for each state index at one step; ``nan`` where unreachable."""

    step: int
    tau: np.ndarray


@dataclass(frozen=True, eq=False)
class PropagationResult:
    model: SignalModel
    kernel: SocialKernel
    adversary: AdversaryProfile
    tau0: float
    N: int
    tables: list
    thresholds: list
    powerless_path: bool = False
    # log of the mass dropped by pruning, indexed [n - 1, w]
    pruned_log_mass: np.ndarray = field(default=None)
    pruned_count: np.ndarray = field(default=None)
    normalization_drift: np.ndarray = field(default=None)

    def table(self, n: int) -> BeliefTable:
        return self.tables[self._step(n) - 1]

    def tau_array(self, n: int) -> np.ndarray:
        return self.thresholds[self._step(n) - 1].tau

    def index(self, n: int, g: SocialState) -> int:
        i = self.kernel.index_of(n, g)
        if not self.table(n).reachable[i]:
            raise UnreachableStateError(f"state {g!r} has probability 0 at step {n}")
        return i

    def tau(self, n: int, g: SocialState) -> float:
        return float(self.tau_array(n)[self.index(n, g)])

    def state_prob(self, n: int, g: SocialState, w: int) -> float:
        return float(np.exp(self.table(n).log_state[self.index(n, g), _check_hypothesis(w)]))

    def joint_prob(self, n: int, g: SocialState, x: int, w: int) -> float:
        return float(np.exp(self.table(n).log_joint[self.index(n, g), x, _check_hypothesis(w)]))

    def reachable_indices(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.table(n).reachable)

    def reachable_states(self, n: int) -> list:
        return [self.kernel.state_at(n, int(i)) for i in self.reachable_indices(n)]

    def _step(self, n: int) -> int:
        if int(n) != n or not 1 <= n <= self.N:
            raise ValueError(f"step {n!r} outside 1..{self.N}")
        return int(n)


def broadcast_probs(model: SignalModel, adv: Optional[AdversaryProfile], tau) -> np.ndarray:
    """``P_w{X = x | threshold tau}`` as an array indexed ``[..., x, w]``.

    With ``adv=None`` no adversary logic runs at all: the broadcast is the
    honest decision.
    """
    tau = np.asarray(tau, dtype=float)
    decide0 = np.stack([model.cdf(0, tau), model.cdf(1, tau)], axis=-1)
    decide1 = np.stack([model.sf(0, tau), model.sf(1, tau)], axis=-1)
    if adv is None:
        return np.stack([decide0, decide1], axis=-2)
    send0 = adv.z0 + adv.z1 * decide0
    send1 = adv.one_intercept + adv.z1 * decide1
    out = np.stack([send0, send1], axis=-2)
    return np.where(np.isnan(out), out, np.clip(out, 0.0, 1.0))


def propagate(
    model: SignalModel,
    kernel: SocialKernel,
    adv: Optional[AdversaryProfile],
    tau0: float,
    N: int,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    prune_below: float = PRUNE_LOG_PROB,
) -> PropagationResult:
    """Compute beliefs and thresholds for nodes ``1..N``.

    Args:
        model: sensor signal model shared by all nodes.
        kernel: social observation structure.
        adv: Byzantine adversary, or ``None`` for the adversary-free path.
        tau0: decision threshold with no social information.
        N: number of nodes.
        max_states: cap on the number of social states at any step.
        prune_below: states whose log-probability is below this value under
            both hypotheses are dropped (their mass is recorded).

    Raises:
        StateSpaceError: a step has more than ``max_states`` states.
        AbsoluteContinuityError: a state is reachable under one hypothesis only.
        NormalizationError: a joint law drifts from 1 by more than 1e-9.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    tau0 = float(tau0)

    tables, thresholds = [], []
    pruned_log_mass = np.full((N, 2), -np.inf)
    pruned_count = np.zeros(N, dtype=np.int64)
    drift = np.zeros((N, 2))

    _check_size(kernel, 1, max_states)
    log_state = np.zeros((kernel.num_states(1), 2))

    for n in range(1, N + 1):
        dead = np.isneginf(log_state)
        if np.any(dead[:, 0] != dead[:, 1]):
            bad = int(np.flatnonzero(dead[:, 0] != dead[:, 1])[0])
            raise AbsoluteContinuityError(
                f"state {kernel.state_at(n, bad)!r} at step {n} is possible under one hypothesis only"
            )
        reach = ~dead[:, 0]
        tau = np.full(log_state.shape[0], np.nan)
        tau[reach] = tau0 - (log_state[reach, 1] - log_state[reach, 0])

        probs = broadcast_probs(model, adv, tau)
        with np.errstate(divide="ignore"):
            log_joint = np.log(probs) + log_state[:, None, :]
        log_joint[~reach] = -np.inf

        for w in (0, 1):
            drift[n - 1, w] = abs(logsumexp(log_joint[:, :, w]))
        if drift[n - 1].max() > NORMALIZATION_TOL:
            raise NormalizationError(f"joint law at step {n} off by {drift[n - 1].max():.3e}")

        for arr in (log_state, log_joint, tau):
            arr.setflags(write=False)
        tables.append(BeliefTable(n, log_state, log_joint))
        thresholds.append(ThresholdMap(n, tau))

        if n == N:
            break
        _check_size(kernel, n + 1, max_states)
        log_state = _advance(kernel, n, log_joint)

        dropped = np.all(log_state < prune_below, axis=1) & ~np.all(np.isneginf(log_state), axis=1)
        if np.any(dropped):
            pruned_count[n] = int(dropped.sum())
            pruned_log_mass[n] = logsumexp(log_state[dropped], axis=0)
            log_state[dropped] = -np.inf
            log.debug("step %d: pruned %d states", n + 1, pruned_count[n])

    return PropagationResult(
        model=model,
        kernel=kernel,
        adversary=adv if adv is not None else AdversaryProfile.powerless(),
        tau0=tau0,
        N=N,
        tables=tables,
        thresholds=thresholds,
        powerless_path=adv is None,
        pruned_log_mass=pruned_log_mass,
        pruned_count=pruned_count,
        normalization_drift=drift,
    )


def _advance(kernel: SocialKernel, n: int, log_joint: np.ndarray) -> np.ndarray:
    out = np.full((kernel.num_states(n + 1), 2), -np.inf)
    cached = None
    for w in (0, 1):
        # Built-in kernels do not depend on w; reuse their transition arrays.
        if cached is None or not kernel.deterministic:
            cached = kernel.transitions(n, w)
        src, x, dst, prob = cached
        with np.errstate(divide="ignore"):
            vals = log_joint[src, x, w] + np.log(prob)
        column = out[:, w].copy()
        np.logaddexp.at(column, dst, vals)
        out[:, w] = column
    return out


def _check_size(kernel: SocialKernel, n: int, max_states: int):
    size = kernel.num_states(n)
    if size > max_states:
        raise StateSpaceError(
            f"{kernel.describe()} has {size} states at step {n}, above the cap of {max_states}"
        )


def decide(model: SignalModel, tau: float, s: int) -> int:
    """Honest decision: 1 when the signal log-likelihood reaches ``tau``."""
    return int(model.loglik[_check_level(model, s)] >= tau)


def conditional_decision_prob(result: PropagationResult, n: int, g: SocialState, w: int) -> float:
    """``P_w{X_n = 0 | G_n = g}`` after corruption."""
    tau = result.tau(n, g)
    adv = result.adversary
    return float(adv.z0 + adv.z1 * result.model.cdf(w, tau))
