"""
Energy decay without sources
============================

Removes the sources and the linear growth term. The discrete L2 norms of
both fields then never exceed their initial values.
"""

from dlngl import DlnConfig, make_example, run_simulation, source_free

prob = source_free(make_example(1), gamma=0.0)
for theta in (0.0, 0.5, 1.0):
    res = run_simulation(prob, DlnConfig.from_steps(theta, 200), 10, 1)
    total = res.norms_u + res.norms_v
    print(f"theta={theta}: initial {total[0]:.6f}, max {total.max():.6f}, final {total[-1]:.3e}")
