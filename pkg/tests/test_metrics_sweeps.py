import math

import numpy as np
import pytest

from socialfusion import (
    AdversaryProfile,
    FullHistoryKernel,
    MixtureScenario,
    ScenarioConfig,
    WindowKernel,
    build_binomial_mixture,
    calibrate_tau0,
    exact_rates,
    propagate,
    sweep,
)
from socialfusion.metrics_sweeps import InfeasibleAlphaError, run_config

from oracles import enumerate_system, full_view


def mixture(m):
    return build_binomial_mixture(MixtureScenario(m))


def test_first_node_rates():
    model = mixture(16)
    r = exact_rates(propagate(model, WindowKernel(2), AdversaryProfile.bit_flip(0.2), 0.3, 5))
    assert r.md[0] == pytest.approx(model.cdf(1, 0.3), abs=1e-15)
    assert r.fa[0] == pytest.approx(1 - model.cdf(0, 0.3), abs=1e-15)


def test_lone_sensor_miss_rate_m64():
    md1 = exact_rates(propagate(mixture(64), WindowKernel(4), None, 0.0, 1)).md[0]
    # 0.95 * P0{S < T}: out-of-range attacks are missed, plus the binomial body.
    model = mixture(64)
    assert md1 == pytest.approx(0.95 * model.cdf(0, 1e-9), abs=1e-12)
    assert md1 == pytest.approx(0.9208, abs=1e-4)


def test_complements():
    r = exact_rates(propagate(mixture(16), WindowKernel(3), AdversaryProfile.bit_flip(0.3), 0.0, 60))
    assert np.allclose(r.md + r.detect, 1, atol=1e-12)
    assert np.allclose(r.fa + r.reject, 1, atol=1e-12)


@pytest.mark.parametrize("p_b", [0, 0.3])
def test_rates_match_enumeration(p_b):
    model = mixture(4)
    r = exact_rates(propagate(model, FullHistoryKernel(), AdversaryProfile.bit_flip(p_b), 0.0, 8))
    _, md, fa = enumerate_system(model.pmf0, model.pmf1, p_b, 0, 1, 0.0, 8, full_view)
    assert np.allclose(r.md, md, atol=1e-9, rtol=0)
    assert np.allclose(r.fa, fa, atol=1e-9, rtol=0)


def test_sub_denormal_states_are_pruned_and_reported():
    from socialfusion import SignalModel

    eps = 1e-40
    model = SignalModel([1 - eps, eps], [eps, 1 - eps])
    res = propagate(model, FullHistoryKernel(), AdversaryProfile.bit_flip(1e-200), 0.0, 14)
    assert res.pruned_count.sum() > 0
    assert np.all(res.pruned_log_mass[res.pruned_count > 0] < -745 + 20)
    assert np.abs(res.normalization_drift).max() <= 1e-9
    r = exact_rates(res)
    assert np.all(np.isfinite(r.log_md))


def test_calibrate_alpha_one_gives_smallest():
    grid = [0.5, 0.1, 2.0]
    tau0, _ = calibrate_tau0(mixture(16), WindowKernel(2), None, 1.0, 20, grid)
    assert tau0 == 0.1


def test_calibrate_alpha_zero_infeasible():
    with pytest.raises(InfeasibleAlphaError):
        calibrate_tau0(mixture(16), WindowKernel(2), None, 0.0, 20, [0.0, 0.5, 1.0])


def test_calibrate_is_smallest_feasible():
    model, kernel = mixture(64), WindowKernel(4)
    grid = [round(0.05 * i, 10) for i in range(41)]
    tau0, fa = calibrate_tau0(model, kernel, None, 0.05, 200, grid)
    assert fa <= 0.05
    below = [g for g in grid if g < tau0]
    for g in below:
        assert exact_rates(propagate(model, kernel, None, g, 200)).fa[-1] > 0.05


def test_sweep_order_and_hash():
    base = ScenarioConfig(m=16, N=40, k=2)
    rows = sweep(base, "attack", [0.3, 0.0, 0.1])
    assert [r.axis_value for r in rows] == [0.3, 0.0, 0.1]
    assert rows[1].config_hash == base.at_axis("attack", 0.0).config_hash()
    assert len({r.config_hash for r in rows}) == 3
    direct = exact_rates(run_config(base.replace(p_b=0.3)))
    assert rows[0].md_final == direct.md[-1]


def test_sweep_parallel_matches_serial():
    base = ScenarioConfig(m=16, N=40)
    assert sweep(base, "memory", [1, 2, 3], jobs=1) == sweep(base, "memory", [1, 2, 3], jobs=3)


def test_sweep_marks_resource_failures(monkeypatch):
    import functools

    import socialfusion.metrics_sweeps as ms

    monkeypatch.setattr(ms, "propagate", functools.partial(propagate, max_states=1024))
    base = ScenarioConfig(m=4, N=40, kernel="full_history")
    rows = sweep(base, "attack", [0.0])
    assert rows[0].failed and math.isnan(rows[0].md_final)


def test_attack_ordering_fig3_grid():
    base = ScenarioConfig(m=64, N=200, k=4)
    md = [r.md_final for r in sweep(base, "attack", [0, 0.1, 0.3, 0.5])]
    assert md == sorted(md)


def test_memory_monotone_under_blackout():
    base = ScenarioConfig(m=64, N=200, p_b=0.5, c00=1, c01=1)
    md = [r.md_final for r in sweep(base, "memory", [1, 2, 4, 6, 8])]
    assert all(b <= a for a, b in zip(md, md[1:]))
