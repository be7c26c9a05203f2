"""
DLN difference operators and their algebraic identities
=======================================================

The two-step DLN family targets the off-step time t_{n-1+theta/2}. This
script checks the exactness of the difference quotient and averages, the
G-stability identity and the transfer inequality on random data.
"""

import numpy as np

from dlngl import check_g_stability_identity, check_transfer_inequality, d_tau, dln_weights, hat, tilde

for theta in (0.0, 0.5, 1.0):
    w = dln_weights(theta, 1.0)
    print(f"theta={theta}: d={w.d}, w_hat={w.w_hat}, w_tilde={w.w_tilde}")

# Quadratics are differentiated exactly, linears averaged exactly
theta, tau, n = 0.3, 0.05, 7
ts = np.arange(n + 1) * tau
t_star = (n - 1 + theta / 2) * tau
print("D(t^2) - 2 t*:", d_tau(ts ** 2, n, theta, tau) - 2 * t_star)
print("hat(t) - t*:", hat(ts, n, theta) - t_star, " tilde(t) - t*:", tilde(ts, n, theta) - t_star)

# The identity from the scalar example: both sides equal 0.421875
print("scalar identity:", check_g_stability_identity(0.5, 1.0, 0.0, 0.0, 1.0))

rng = np.random.default_rng(0)
worst = 0.0
for theta in np.linspace(0, 1, 11):
    for _ in range(200):
        v = [rng.normal(size=5) + 1j * rng.normal(size=5) for _ in range(3)]
        lhs, rhs, diff = check_g_stability_identity(theta, 0.1, *v)
        worst = max(worst, diff / (1 + abs(lhs)))
print(f"largest relative identity gap over 2200 random triples: {worst:.2e}")

slack = min(check_transfer_inequality(theta, [rng.normal(size=4) for _ in range(10)])[1]
            for theta in np.linspace(0, 1, 11))
print(f"smallest transfer-inequality slack: {slack:.3e}")
