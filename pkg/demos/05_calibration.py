"""Pick the smallest threshold meeting a 5% false-alarm budget at the last node."""
from socialfusion import ScenarioConfig, calibrate_tau0, exact_rates
from socialfusion.metrics_sweeps import run_config

base = ScenarioConfig(m=64, N=200, k=4)
for p_b in (0.0, 0.1):
    cfg = base.replace(p_b=p_b)
    tau0, fa = calibrate_tau0(cfg.signal_model(), cfg.social_kernel(), cfg.adversary(),
                              0.05, cfg.N, cfg.tau0_grid)
    md = exact_rates(run_config(cfg.replace(tau0=tau0))).md[-1]
    print(f"p_b={p_b}: tau0={tau0:.2f}  fa[N]={fa:.4f}  md[N]={md:.3e}")
