import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from socialfusion import (
    AbsoluteContinuityError,
    AdversaryProfile,
    CountKernel,
    FullHistoryKernel,
    MixtureScenario,
    SignalModel,
    StateSpaceError,
    WindowKernel,
    build_binomial_mixture,
    make_kernel,
    propagate,
)
from socialfusion.fusion_engine import SocialKernel, conditional_decision_prob, decide
from socialfusion.signal_model import null_mixture

from conftest import random_model
from oracles import count_view, enumerate_system, full_view, window_view


def mixture(m):
    return build_binomial_mixture(MixtureScenario(m))


def _view(kernel):
    if isinstance(kernel, WindowKernel):
        return window_view(kernel.k)
    if isinstance(kernel, CountKernel):
        return count_view
    return full_view


def assert_matches_oracle(model, kernel, adv, tau0, N, tol=1e-9):
    result = propagate(model, kernel, adv, tau0, N)
    steps, _, _ = enumerate_system(model.pmf0, model.pmf1, adv.p_b, adv.c00, adv.c01, tau0, N, _view(kernel))
    for n, states in enumerate(steps, start=1):
        reach = set(result.reachable_states(n))
        oracle_reach = {g for g, (p0, p1, _) in states.items() if p0 > 0}
        # the linear-space oracle underflows near denormals; the log-domain engine does not
        for g in reach - oracle_reach:
            assert max(result.table(n).log_state[result.kernel.index_of(n, g)]) < math.log(1e-280)
        for g in oracle_reach - reach:
            assert max(states[g][:2]) < 1e-280
        for g, (p0, p1, tau) in states.items():
            if g not in reach or p0 == 0:
                continue
            assert result.state_prob(n, g, 0) == pytest.approx(p0, abs=tol, rel=0)
            assert result.state_prob(n, g, 1) == pytest.approx(p1, abs=tol, rel=0)
            if min(p0, p1) > 1e-280:  # the linear-space oracle loses precision near denormals
                assert result.tau(n, g) == pytest.approx(tau, abs=1e-9, rel=1e-9)
    return result


def test_two_point_first_step(two_point):
    r = propagate(two_point, WindowKernel(1), AdversaryProfile.powerless(), 0.0, 2)
    assert r.tau(1, ()) == 0.0
    assert r.tau(2, (0,)) == pytest.approx(math.log(9), abs=1e-12)
    assert r.tau(2, (1,)) == pytest.approx(-math.log(9), abs=1e-12)
    assert_matches_oracle(two_point, WindowKernel(1), AdversaryProfile.powerless(), 0.0, 2)


@pytest.mark.parametrize("tau0", [-1.0, 0.0, 0.7])
def test_single_node_threshold_is_tau0(tau0):
    r = propagate(mixture(16), WindowKernel(4), AdversaryProfile.bit_flip(0.3), tau0, 1)
    assert r.tau(1, ()) == tau0


@pytest.mark.parametrize("adv", [AdversaryProfile.powerless(), AdversaryProfile.bit_flip(0.3),
                                 AdversaryProfile.blackout(0.5)])
@pytest.mark.parametrize("kernel", [WindowKernel(3), CountKernel(), FullHistoryKernel()])
def test_null_model_never_learns(adv, kernel):
    r = propagate(null_mixture(8), kernel, adv, 0.25, 7)
    for n in range(1, 8):
        tau = r.tau_array(n)[r.table(n).reachable]
        assert np.all(tau == 0.25)


@pytest.mark.parametrize("p_b,c00,c01", [(0, 0, 1), (0.3, 0, 1), (1, 0, 1), (0.3, 1, 1), (0.45, 0.2, 0.7)])
@pytest.mark.parametrize("kind", ["window", "count", "full_history"])
@pytest.mark.parametrize("m", [2, 4])
def test_matches_enumeration(m, kind, p_b, c00, c01):
    assert_matches_oracle(mixture(m), make_kernel(kind, 2), AdversaryProfile(p_b, c00, c01), 0.0, 8)


def test_full_joint_enumeration():
    """Literal sum over every (signal, capture, corruption) outcome of every node."""
    model = mixture(2)
    adv = AdversaryProfile(0.3, 0.2, 0.9)
    N = 6
    r = propagate(model, FullHistoryKernel(), adv, 0.1, N)
    acc = {}

    def walk(w, n, h, p):
        acc.setdefault((n, h), [0.0, 0.0])[w] += p
        if n == N:
            return
        tau = r.tau(n, h)
        for s, cap, cor in itertools.product(range(model.levels), (0, 1), (0, 1)):
            pi = decide(model, tau, s)
            c0 = adv.c00 if pi == 0 else adv.c01
            q = model.pmf(w)[s]
            if cap:
                q *= adv.p_b * (c0 if cor == 0 else 1 - c0)
                x = cor
            else:
                q *= (1 - adv.p_b) * (cor == 0)
                x = pi
            if q > 0:
                walk(w, n + 1, h + (x,), p * q)

    for w in (0, 1):
        walk(w, 1, (), 1.0)
    assert {g for (n, g) in acc if n == N} == set(r.reachable_states(N))
    for (n, h), (p0, p1) in acc.items():
        assert r.state_prob(n, h, 0) == pytest.approx(p0, abs=1e-9)
        assert r.state_prob(n, h, 1) == pytest.approx(p1, abs=1e-9)


def test_powerless_is_bit_identical_to_no_adversary():
    model = mixture(16)
    a = propagate(model, WindowKernel(3), AdversaryProfile.powerless(), 0.0, 40)
    b = propagate(model, WindowKernel(3), None, 0.0, 40)
    for n in range(1, 41):
        assert np.array_equal(a.table(n).log_joint, b.table(n).log_joint)
        assert np.array_equal(a.tau_array(n), b.tau_array(n), equal_nan=True)


def test_deterministic():
    model = mixture(16)
    adv = AdversaryProfile(0.2, 0.1, 0.8)
    a = propagate(model, CountKernel(), adv, 0.0, 30)
    b = propagate(model, CountKernel(), adv, 0.0, 30)
    for n in range(1, 31):
        assert a.table(n).log_joint.tobytes() == b.table(n).log_joint.tobytes()


def test_state_cap():
    with pytest.raises(StateSpaceError):
        propagate(mixture(4), FullHistoryKernel(), None, 0.0, 12, max_states=1 << 10)


class _LeakyKernel(SocialKernel):
    """Two states whose second is only reachable under one hypothesis; for error tests."""

    deterministic = False

    def num_states(self, n):
        return 1 if n == 1 else 2

    def state_at(self, n, index):
        return () if n == 1 else (int(index),)

    def index_of(self, n, g):
        return 0 if n == 1 else g[0]

    def transitions(self, n, w):
        src = np.zeros(2, dtype=np.int64) if n == 1 else np.array([0, 0, 1, 1])
        x = np.array([0, 1]) if n == 1 else np.array([0, 1, 0, 1])
        dst = np.array([0, w]) if n == 1 else np.array([0, 1, 0, 1])
        prob = np.ones(src.size)
        return src, x, dst, prob

    def successors(self, n, g, x):
        return [((x,), 1.0)]


def test_absolute_continuity_violation():
    with pytest.raises(AbsoluteContinuityError):
        propagate(mixture(4), _LeakyKernel(), None, 0.0, 3)


def test_decide_examples(two_point):
    model = mixture(16)
    assert decide(model, model.lower_bound - 1, 0) == 1
    assert decide(model, model.upper_bound + 1, 16) == 0
    assert decide(model, 0.0, 3) == 0
    assert decide(two_point, math.log(9), 1) == 1  # tie goes to 1


def test_conditional_decision_prob_examples():
    model = mixture(16)
    r0 = propagate(model, WindowKernel(1), None, model.lower_bound - 0.5, 1)
    assert conditional_decision_prob(r0, 1, (), 0) == 0.0
    r1 = propagate(model, WindowKernel(1), None, model.upper_bound + 0.5, 1)
    assert conditional_decision_prob(r1, 1, (), 1) == 1.0
    r2 = propagate(model, WindowKernel(1), AdversaryProfile.bit_flip(0.3), model.upper_bound + 0.5, 1)
    assert conditional_decision_prob(r2, 1, (), 0) == pytest.approx(0.7)


def test_sufficient_statistic():
    model = mixture(4)
    r = propagate(model, FullHistoryKernel(), AdversaryProfile.bit_flip(0.2), 0.0, 8)
    for n in range(2, 9):
        states = r.reachable_states(n)
        taus = np.array([r.tau(n, g) for g in states])
        for i, j in itertools.combinations(range(len(states)), 2):
            if abs(taus[i] - taus[j]) < 1e-12:
                for w in (0, 1):
                    assert conditional_decision_prob(r, n, states[i], w) == pytest.approx(
                        conditional_decision_prob(r, n, states[j], w), abs=1e-12)


def test_deep_run_stays_normalized():
    r = propagate(mixture(64), WindowKernel(4), AdversaryProfile.bit_flip(0.1), 0.0, 500)
    assert np.abs(r.normalization_drift).max() <= 1e-9


def test_window_runtime_linear_in_N():
    import time

    model = mixture(64)
    times = []
    for N in (200, 800):
        t = time.perf_counter()
        propagate(model, WindowKernel(4), None, 0.0, N)
        times.append(time.perf_counter() - t)
    assert times[1] < 4 * times[0] * 2.5


@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.sampled_from(["window", "count", "full_history"]),
       st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(-1, 1))
def test_random_systems_match_oracle(seed, levels, kind, p_b, c00, c01, tau0):
    model = random_model(np.random.default_rng(seed), levels)
    result = assert_matches_oracle(model, make_kernel(kind, 2), AdversaryProfile(p_b, c00, c01), tau0, 6)
    for n in range(1, 7):
        for w in (0, 1):
            total = np.logaddexp.reduce(result.table(n).log_joint[:, :, w], axis=None)
            assert abs(total) <= 1e-9
