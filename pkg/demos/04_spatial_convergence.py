"""
Spatial convergence for the first manufactured problem
======================================================

Fixes a small time step and refines the mesh. Prints the table in the
same layout as the published results and writes a CSV to the working directory.
"""

from pathlib import Path

from dlngl.cli import RunConfig, format_table, run_convergence_study

out = Path.cwd() / "spatial_theta025_k1.csv"
config = RunConfig(example=1, theta=0.25, degree=1, mode="spatial", n_list=(5, 10, 15, 20),
                   tau=1e-3, out=str(out))
table = run_convergence_study(config)
print(format_table(table, "markdown"))
print("written to", out)
