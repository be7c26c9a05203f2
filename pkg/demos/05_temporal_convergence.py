"""
Temporal convergence with tau = h
=================================

Couples the step to the mesh so that the observed order reflects the
second-order accuracy of the DLN scheme.
"""

from dlngl.cli import RunConfig, format_table, run_convergence_study

for example, theta, k in [(1, 0.1, 2), (2, 0.35, 1)]:
    table = run_convergence_study(RunConfig(example=example, theta=theta, degree=k, mode="temporal",
                                            n_list=(5, 10, 15, 20)))
    print(f"example {example}, theta={theta}, k={k}")
    print(format_table(table, "markdown"))
