"""Exact rates against simulation.

Simulates 100000 networks per hypothesis with per-node Philox substreams and
compares the empirical miss rate with the exact recursion at a few nodes.
"""
from socialfusion import AdversaryProfile, CountKernel, MixtureScenario, build_binomial_mixture
from socialfusion import estimate_rates, exact_rates, propagate

result = propagate(build_binomial_mixture(MixtureScenario(16)), CountKernel(),
                   AdversaryProfile(0.3, 0.2, 0.9), 0.0, 40)
exact = exact_rates(result)
est = estimate_rates(result, 100_000, seed=11)
print(" n   exact md   simulated md   stderr   z")
for n in (1, 2, 5, 10, 20, 40):
    i = n - 1
    z = (est.md[i] - exact.md[i]) / est.md_stderr[i] if est.md_stderr[i] else 0.0
    print(f"{n:2d}   {exact.md[i]:.5f}    {est.md[i]:.5f}        {est.md_stderr[i]:.5f}  {z:+.2f}")
