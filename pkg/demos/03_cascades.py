"""Information cascades: when nodes stop listening to their own sensor.

With full history a cascade, once started, never ends. A one-bit window
forgets, so a cascaded threshold can fall back into the informative range.
"""
from socialfusion import AdversaryProfile, FullHistoryKernel, MixtureScenario, WindowKernel
from socialfusion import build_binomial_mixture, cascade_report, propagate

model4 = build_binomial_mixture(MixtureScenario(4))
full = cascade_report(propagate(model4, FullHistoryKernel(), AdversaryProfile.bit_flip(0.3), 0.0, 8))
print("full history, m=4, N=8, p_b=0.3")
print(f"  first cascade at node {full.first_onset}; weakly consistent={full.weak_consistent}; "
      f"cascades persist={full.theorem2}")
print("  P(node n in cascade | attack):", " ".join(f"{v:.3f}" for v in full.cascade_mass[:, 1]))

window = cascade_report(propagate(model4, WindowKernel(1), AdversaryProfile.bit_flip(0.1), 0.0, 20))
print("\none-bit window, m=4, N=20, p_b=0.1")
print(f"  weakly consistent={window.weak_consistent}; the persistence result does not apply")
v = window.counterexamples["weak_consistency"][0]
print(f"  e.g. node {v.step - 1} in state {v.prev_state} (threshold {v.prev_tau:+.3f}) sends {v.x}; "
      f"node {v.step} sees {v.state} and gets threshold {v.tau:+.3f}")
print(f"  belief range is [{model4.lower_bound:+.3f}, {model4.upper_bound:+.3f}]")
