"""Information-cascade detection and structural audits of a propagated system.

A state ``g`` at step ``n`` is a local cascade when the honest decision is a
deterministic function of ``g``: both ``F_0(tau_n(g))`` and ``F_1(tau_n(g))``
are 0, or both are 1. With a strict c.d.f. this happens exactly when
``tau <= L_s`` or ``tau > U_s``.

All audits walk the exact reachable transition graph; nothing is sampled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .fusion_engine import PropagationResult
from .social_kernel import SocialState

# Slack for comparing thresholds produced by different log-domain paths.
TAU_ATOL = 1e-9


class HypothesisNotMetError(RuntimeError):
    """Cascade-persistence audit requested on a system without weakly consistent transitions."""


@dataclass(frozen=True)
class Violation:
    step: int
    prev_state: SocialState
    x: Optional[int]
    state: SocialState
    prev_tau: float
    tau: float
    note: str = ""


@dataclass
class CascadeReport:
    local_cascade_states: list
    first_onset: Optional[int]
    cascade_mass: np.ndarray
    strong_consistent: bool
    weak_consistent: bool
    weakly_invertible: bool
    theorem2: Optional[bool]
    counterexamples: dict = field(default_factory=dict)
    boundary_states: list = field(default_factory=list)


def cascade_flags(result: PropagationResult, n: int) -> np.ndarray:
    """Boolean local-cascade flag for every state index at step ``n``."""
    model = result.model
    tau = result.tau_array(n)
    reach = result.table(n).reachable
    t = np.where(reach, tau, 0.0)
    none_zero = (model.cdf(0, t) == 0.0) & (model.cdf(1, t) == 0.0)
    none_one = (model.sf(0, t) == 0.0) & (model.sf(1, t) == 0.0)
    return reach & (none_zero | none_one)


def is_local_cascade(result: PropagationResult, n: int, g: SocialState) -> bool:
    return bool(cascade_flags(result, n)[result.index(n, g)])


def outside_belief_interval(result: PropagationResult, tau) -> np.ndarray:
    """``tau`` outside the closed interval ``[L_s, U_s]``."""
    tau = np.asarray(tau)
    return (tau < result.model.lower_bound) | (tau > result.model.upper_bound)


def _edges(result: PropagationResult, n: int):
    """Transitions from step ``n`` to ``n + 1`` between reachable states.

    Returns ``(src, x, dst, live)`` where ``live`` marks edges whose
    broadcast ``x`` has positive probability under some hypothesis.
    """
    kernel = result.kernel
    parts = [kernel.transitions(n, w) for w in ((0,) if kernel.deterministic else (0, 1))]
    src = np.concatenate([p[0] for p in parts])
    x = np.concatenate([p[1] for p in parts])
    dst = np.concatenate([p[2] for p in parts])
    prob = np.concatenate([p[3] for p in parts])
    keep = (prob > 0) & result.table(n).reachable[src] & result.table(n + 1).reachable[dst]
    src, x, dst = src[keep], x[keep], dst[keep]
    live = np.any(np.isfinite(result.table(n).log_joint[src, x, :]), axis=1)
    return src, x, dst, live


def _violation(result, n, i, x, j, note="") -> Violation:
    k = result.kernel
    return Violation(
        step=n + 1,
        prev_state=k.state_at(n, int(i)),
        x=None if x is None else int(x),
        state=k.state_at(n + 1, int(j)),
        prev_tau=float(result.tau_array(n)[i]),
        tau=float(result.tau_array(n + 1)[j]),
        note=note,
    )


def check_strong_consistency(result: PropagationResult) -> tuple[bool, list]:
    """Thresholds never rise after a 1 and never fall after a 0."""
    bad = []
    for n in range(1, result.N):
        src, x, dst, _ = _edges(result, n)
        before = result.tau_array(n)[src]
        after = result.tau_array(n + 1)[dst]
        wrong = np.where(x == 1, after > before + TAU_ATOL, after < before - TAU_ATOL)
        bad.extend(_violation(result, n, i, xx, j) for i, xx, j in zip(src[wrong], x[wrong], dst[wrong]))
    return not bad, bad


def check_weak_consistency(result: PropagationResult) -> tuple[bool, list]:
    """Once a threshold leaves the belief range on one side, it stays out on that side."""
    L, U = result.model.lower_bound, result.model.upper_bound
    bad = []
    for n in range(1, result.N):
        src, x, dst, live = _edges(result, n)
        src, x, dst = src[live], x[live], dst[live]
        before = result.tau_array(n)[src]
        after = result.tau_array(n + 1)[dst]
        wrong = ((before <= L) & (after > L + TAU_ATOL)) | ((before >= U) & (after < U - TAU_ATOL))
        bad.extend(_violation(result, n, i, xx, j) for i, xx, j in zip(src[wrong], x[wrong], dst[wrong]))
    return not bad, bad


def check_weak_invertibility(result: PropagationResult) -> tuple[bool, list]:
    """Out of the belief range, transitions are deterministic and one-to-one.

    Each successor reached from an out-of-range state ``g`` via a broadcast
    ``x`` must have ``(g, x)`` as its only live predecessor, which is what
    keeps the social log-likelihood frozen once a cascade starts.
    """
    kernel = result.kernel
    bad = []
    for n in range(1, result.N):
        src, x, dst, live = _edges(result, n)
        src, x, dst = src[live], x[live], dst[live]
        out = outside_belief_interval(result, result.tau_array(n)[src])
        for i, xx, j in zip(src[out], x[out], dst[out]):
            if not kernel.deterministic:
                branches = kernel.successors(n, kernel.state_at(n, int(i)), int(xx))
                if len(branches) != 1:
                    bad.append(_violation(result, n, i, xx, j, "stochastic transition"))
                    continue
            others = (dst == j) & ~((src == i) & (x == xx))
            if np.any(others):
                k = int(np.flatnonzero(others)[0])
                bad.append(_violation(
                    result, n, i, xx, j,
                    f"also reached from {kernel.state_at(n, int(src[k]))!r} via x={int(x[k])}",
                ))
    return not bad, bad


def audit_theorem2(result: PropagationResult, *, weak: Optional[tuple] = None) -> tuple[bool, list]:
    """Every local cascade is followed by cascades at all reachable descendants.

    Raises:
        HypothesisNotMetError: transitions are not weakly consistent, so the
            statement does not apply.
    """
    ok_weak, weak_bad = weak if weak is not None else check_weak_consistency(result)
    if not ok_weak:
        raise HypothesisNotMetError(
            f"transitions are not weakly consistent ({len(weak_bad)} violations); no claim made"
        )
    flags = [cascade_flags(result, n) for n in range(1, result.N + 1)]
    holds = flags[-1].copy()
    bad = []
    for n in range(result.N - 1, 0, -1):
        src, x, dst, live = _edges(result, n)
        src, x, dst = src[live], x[live], dst[live]
        failing_edge = ~holds[dst]
        broken = np.zeros(flags[n - 1].size, dtype=bool)
        np.logical_or.at(broken, src, failing_edge)
        for i in np.flatnonzero(flags[n - 1] & broken):
            e = int(np.flatnonzero((src == i) & failing_edge)[0])
            bad.append(_violation(
                result, n, i, x[e], dst[e], "cascaded state with a non-cascaded descendant"
            ))
        holds = flags[n - 1] & ~broken
    return not bad, bad


def proposition1_crosscheck(result: PropagationResult) -> tuple[bool, list]:
    """Compare the cascade flag against ``tau`` outside ``[L_s, U_s]``.

    Returns ``(agree, boundary)``: ``agree`` is False if the two predicates
    disagree anywhere other than at ``tau`` equal to ``L_s`` or ``U_s``
    (within :data:`TAU_ATOL`); ``boundary`` lists ``(n, state, tau)`` for the
    boundary disagreements.
    """
    L, U = result.model.lower_bound, result.model.upper_bound
    boundary, agree = [], True
    for n in range(1, result.N + 1):
        reach = result.table(n).reachable
        tau = result.tau_array(n)
        differ = reach & (cascade_flags(result, n) != outside_belief_interval(result, np.where(reach, tau, 0.0)))
        for i in np.flatnonzero(differ):
            t = float(tau[i])
            if min(abs(t - L), abs(t - U)) <= TAU_ATOL:
                boundary.append((n, result.kernel.state_at(n, int(i)), t))
            else:
                agree = False
    return agree, boundary


def cascade_mass(result: PropagationResult) -> np.ndarray:
    """``mass[n - 1, w]``: probability under ``w`` that node ``n`` is in a local cascade."""
    out = np.zeros((result.N, 2))
    for n in range(1, result.N + 1):
        flags = cascade_flags(result, n)
        if flags.any():
            out[n - 1] = np.exp(logsumexp(result.table(n).log_state[flags], axis=0))
    return out


def cascade_report(result: PropagationResult) -> CascadeReport:
    local = []
    onset = None
    for n in range(1, result.N + 1):
        idx = np.flatnonzero(cascade_flags(result, n))
        local.append([result.kernel.state_at(n, int(i)) for i in idx])
        if onset is None and idx.size:
            onset = n
    strong, strong_bad = check_strong_consistency(result)
    weak = check_weak_consistency(result)
    invertible, inv_bad = check_weak_invertibility(result)
    try:
        theorem2, thm_bad = audit_theorem2(result, weak=weak)
    except HypothesisNotMetError:
        theorem2, thm_bad = None, []
    _, boundary = proposition1_crosscheck(result)
    return CascadeReport(
        local_cascade_states=local,
        first_onset=onset,
        cascade_mass=cascade_mass(result),
        strong_consistent=strong,
        weak_consistent=weak[0],
        weakly_invertible=invertible,
        theorem2=theorem2,
        counterexamples={
            "strong_consistency": strong_bad,
            "weak_consistency": weak[1],
            "weak_invertibility": inv_bad,
            "theorem2": thm_bad,
        },
        boundary_states=boundary,
    )
