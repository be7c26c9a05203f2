"""Finite-element DLN solver for coupled complex Ginzburg-Landau equations.

Modules
-------
mesh        structured simplicial meshes of the unit square and cube
fespace     Lagrange elements, simplex quadrature, DOF maps
linalg      complex CSR matrices and checked sparse solves
assembly    mass, stiffness, weighted-mass and load assembly
projection  Ritz and L2 projections, discrete Laplacian, norm diagnostics
problems    coefficient sets and the manufactured test problems
scheme      DLN weights, the Crank-Nicolson start step and the time loop
analysis    error norms, convergence orders, identity checks
cli         convergence-sweep driver
"""

from .analysis import (
    ErrorReport,
    RateTable,
    build_rate_table,
    check_g_stability_identity,
    check_transfer_inequality,
    convergence_order,
    error_norms,
    error_report,
)
from .assembly import (
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    assemble_weighted_mass,
    local_mass,
    local_stiffness,
)
from .errors import (
    ConfigurationError,
    DimensionMismatch,
    DivergenceDetected,
    DlnGlError,
    InvalidArgument,
    InvalidSource,
    InvalidWeight,
    SingularMatrix,
    SolverFailure,
    SweepAborted,
    UnsupportedDegree,
    UnsupportedQuery,
)
from .fespace import FeSpace, QuadRule, build_space, eval_fe_function, interpolate, quadrature_rule, reference_basis
from .linalg import ComplexCsr, csr_from_triplets, matvec, solve
from .mesh import Mesh, boundary_facets, build_unit_cube_mesh, build_unit_square_mesh, read_mesh, write_mesh
from .problems import GlCoefficients, GlProblem, Nonlinearity, eval_exact, eval_source, make_example, source_free
from .projection import agmon_ratio, discrete_laplacian, inverse_ratio, l2_project, ritz_project, sup_norm
from .scheme import (
    DlnConfig,
    DlnWeights,
    SimulationResult,
    build_operators,
    d_tau,
    dln_step,
    dln_weights,
    hat,
    initial_state,
    make_space,
    run_simulation,
    start_step_cn,
    tilde,
)

__version__ = "0.1.0"
