"""A single sensor: what each signal level says about an attack.

Prints the two conditional distributions of the m=16 mixture scenario and the
log-likelihood each level carries. Below the alarm threshold every level is
slightly reassuring (log 0.95); above it the evidence jumps.
"""
import math

from socialfusion import MixtureScenario, build_binomial_mixture

scenario = MixtureScenario(m=16)
model = build_binomial_mixture(scenario)
print(f"alarm threshold T = {scenario.alarm_threshold:.4f}")
print(f"belief bounds: [{model.lower_bound:.5f}, {model.upper_bound:.5f}]\n")
print(" s   P(s | no attack)   P(s | attack)   log-likelihood")
for s in range(scenario.m + 1):
    bar = "#" * max(0, int(round(6 * (model.loglik[s] - model.lower_bound))))
    print(f"{s:2d}   {model.pmf0[s]:14.3e}   {model.pmf1[s]:13.3e}   {model.loglik[s]:+.4f} {bar}")
print(f"\nlow levels all carry log(0.95) = {math.log(0.95):.5f}")
print(f"lone-node miss rate with threshold 0: {model.cdf(1, 0.0):.4f}"
      f" = 0.95 * P(s < T | no attack) = {0.95 * model.cdf(0, 0.0):.4f}")
