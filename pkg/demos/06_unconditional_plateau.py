"""
Error plateau at a fixed time step
==================================

With tau = 1/20 fixed and h refined, the L2 error drops with h until it
meets the temporal error. For P1 that happens near h = 1/32 for v in
example 1 and near h = 1/64 for u in example 2. The other components are
still spatially dominated at h = 1/64. No mesh/step restriction is needed,
so even tau >> h runs stay bounded.
"""

from dlngl import DlnConfig, error_report, make_example, run_simulation

tau = 1 / 20
for example, theta in [(1, 0.5), (2, 0.75)]:
    prob = make_example(example)
    print(f"example {example}, theta={theta}, tau={tau}")
    prev = None
    for n in (4, 8, 16, 32, 64):
        rep = error_report(run_simulation(prob, DlnConfig(theta, tau), n, 1))
        ratio = "" if prev is None else f"  ratios u {rep.E0_u / prev[0]:.3f} v {rep.E0_v / prev[1]:.3f}"
        print(f"  h=1/{n:<3d} E0_u={rep.E0_u:.4e}  E0_v={rep.E0_v:.4e}{ratio}")
        prev = (rep.E0_u, rep.E0_v)

# tau much larger than h: two steps on a fine mesh
rep = error_report(run_simulation(make_example(1), DlnConfig(0.5, 0.5), 32, 1))
print("tau=1/2, h=1/32:", rep)
