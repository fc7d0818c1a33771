"""Stochastic simulation of the sequential network, used as an oracle for the exact engine.

Randomness comes from numpy's Philox counter-based generator. Node ``n`` under
hypothesis ``w`` owns the substream ``SeedSequence(seed, spawn_key=(w, n))``
and draws three uniforms per trial from it: sensor level, capture, corruption.
Streams are therefore independent of the number of nodes simulated and of
any other hypothesis, and reproduce bit-for-bit for a fixed seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fusion_engine import PropagationResult
from .signal_model import _check_hypothesis


def node_stream(seed: int, w: int, n: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(w, n))))


@dataclass(frozen=True, eq=False)
class Batch:
    """Arrays indexed ``[trial, n - 1]`` for a fixed hypothesis."""

    w: int
    signal: np.ndarray
    byzantine: np.ndarray
    honest: np.ndarray
    broadcast: np.ndarray
    state_index: np.ndarray
    tau: np.ndarray


@dataclass(frozen=True, eq=False)
class RunTrace:
    seed: int
    w: int
    signal: tuple
    byzantine: tuple
    honest: tuple
    broadcast: tuple
    state: tuple
    tau: tuple


def simulate_batch(result: PropagationResult, w: int, trials: int, seed: int) -> Batch:
    """Simulate ``trials`` independent runs of nodes ``1..N`` under hypothesis ``w``."""
    w = _check_hypothesis(w)
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    kernel = result.kernel
    if not kernel.deterministic:
        raise NotImplementedError("Monte Carlo needs a deterministic social kernel")
    model, adv, N = result.model, result.adversary, result.N
    cdf = np.cumsum(model.pmf(w))
    corrupt0 = np.array([adv.c00, adv.c01])

    shape = (trials, N)
    signal = np.empty(shape, dtype=np.int64)
    byz = np.empty(shape, dtype=bool)
    honest = np.empty(shape, dtype=np.int8)
    sent = np.empty(shape, dtype=np.int8)
    states = np.empty(shape, dtype=np.int64)
    taus = np.empty(shape)

    g = np.zeros(trials, dtype=np.int64)
    for n in range(1, N + 1):
        u = node_stream(seed, w, n).random((trials, 3))
        s = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), model.levels - 1)
        tau = result.tau_array(n)[g]
        if np.isnan(tau).any():
            raise RuntimeError(f"simulation reached a state the exact engine marks unreachable at step {n}")
        pi = (model.loglik[s] >= tau).astype(np.int8)
        captured = u[:, 1] < adv.p_b
        forced0 = u[:, 2] < corrupt0[pi]
        x = np.where(captured, np.where(forced0, 0, 1), pi).astype(np.int8)

        signal[:, n - 1], byz[:, n - 1], honest[:, n - 1] = s, captured, pi
        sent[:, n - 1], states[:, n - 1], taus[:, n - 1] = x, g, tau
        if n < N:
            g = kernel.next_index(n, g, x.astype(np.int64))
    return Batch(w, signal, byz, honest, sent, states, taus)


def simulate_run(result: PropagationResult, w: int, seed: int) -> RunTrace:
    """One network run; identical to trial 0 of :func:`simulate_batch` with the same seed."""
    b = simulate_batch(result, w, 1, seed)
    kernel = result.kernel
    return RunTrace(
        seed=seed,
        w=w,
        signal=tuple(int(v) for v in b.signal[0]),
        byzantine=tuple(bool(v) for v in b.byzantine[0]),
        honest=tuple(int(v) for v in b.honest[0]),
        broadcast=tuple(int(v) for v in b.broadcast[0]),
        state=tuple(kernel.state_at(n, int(i)) for n, i in enumerate(b.state_index[0], start=1)),
        tau=tuple(float(v) for v in b.tau[0]),
    )


@dataclass(frozen=True, eq=False)
class RateEstimate:
    md: np.ndarray
    fa: np.ndarray
    md_stderr: np.ndarray
    fa_stderr: np.ndarray
    trials: int


def estimate_rates(result: PropagationResult, trials: int, seed: int) -> RateEstimate:
    """Empirical per-node miss-detection and false-alarm rates of the honest decision."""
    md = (simulate_batch(result, 1, trials, seed).honest == 0).mean(axis=0)
    fa = (simulate_batch(result, 0, trials, seed).honest == 1).mean(axis=0)
    return RateEstimate(md, fa, binomial_stderr(md, trials), binomial_stderr(fa, trials), trials)


def binomial_stderr(p, trials: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / trials)
