"""Direct discontinuous Galerkin solver for 1D singularly perturbed
convection-diffusion problems on Shishkin meshes."""

__version__ = "0.1.0"

from .mesh import Mesh, ShishkinMesh, build_shishkin, uniform_mesh, delta_h
from .basis import (
    QuadratureRule,
    legendre_eval,
    legendre_table,
    gauss_legendre_rule,
    gauss_lobatto_nodes,
)
from .problem import ProblemSpec, ProblemError, make_test_problem, coercivity_constant
from .ddg import (
    DGFunction,
    FluxParams,
    AssembledSystem,
    SolverError,
    beta0_schedule,
    beta0_values,
    hat_flux,
    tilde_flux,
    assemble,
    solve,
    bilinear_apply,
)
from .projections import (
    SampledFunction,
    gauss_radau_project,
    global_theta_project,
    gauss_lobatto_interpolate,
    composite_interpolant,
)
from .norms import ErrorBundle, jump_and_average, energy_norm, error_bundle
from .admissibility import (
    AdmissibilityReport,
    hilbert_lambda_max,
    beta0_integer_rule,
    estimate_M,
    check_admissibility,
    admissibility_report,
)
from .harness import (
    RunConfig,
    ConvergenceReport,
    ReportRow,
    run_convergence_study,
    compute_rate,
    emit_report,
    parse_csv_report,
    write_report,
    ConfigError,
)
