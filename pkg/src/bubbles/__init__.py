"""Point-interaction simulation engine for acoustic scattering by clusters of
small high-density-contrast bubbles, with shape functionals, resonance
formulas, invertibility diagnostics, and desk-scale reference solvers.
"""

from .bem import BemSolution, OracleDomainError, bem_far_values, bem_solve
from .fields import (
    FarFieldPattern,
    far_field,
    fibonacci_directions,
    incident_field,
    scattered_near_field,
)
from .foldy_lax import (
    FoldyLaxSystem,
    InvertibilityReport,
    MixedSignError,
    assemble,
    fundamental_solution,
    invertibility_report,
    solve,
)
from .functionals import (
    ShapeFunctionals,
    compute_A_function,
    compute_a_hat,
    compute_capacitance,
    compute_functionals,
    compute_volume,
)
from .geometry import (
    BubbleShape,
    Cluster,
    ClusterSpec,
    InfeasibleRegimeError,
    MeshError,
    counting_bound,
    distance_sum,
    generate_cluster,
    icosphere,
)
from .layers import (
    LayerOperator,
    SingularSystemError,
    apply_layer,
    assemble_layer,
    solve_single_layer,
    sphere_mode_eigenvalues,
)
from .linsolve import NumericallySingularError, solve_dense
from .mie import PartialWaveSolution, TruncationError, mie_sphere
from .oracle import oracle_far_field
from .physics import (
    AtResonanceError,
    BubbleMaterial,
    ContrastLaw,
    MediumSpec,
    NonPositiveResonanceError,
    ScatterCoefficient,
    UnreachableFrequencyError,
    dominating_inverse_coefficient,
    leading_coefficient,
    minnaert_frequency,
    near_resonance_omega,
    refined_inverse_coefficient,
)
from .quadrature import SurfaceQuadrature, build_quadrature
from .runconfig import ConfigError, RunConfig, load_config, parse_config, regime_flags
from .studies import (
    ConvergenceStudy,
    RunResult,
    StudyError,
    convergence_study,
    resonance_sweep,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "AtResonanceError",
    "BemSolution",
    "BubbleMaterial",
    "BubbleShape",
    "Cluster",
    "ClusterSpec",
    "ConfigError",
    "ContrastLaw",
    "ConvergenceStudy",
    "FarFieldPattern",
    "FoldyLaxSystem",
    "InfeasibleRegimeError",
    "InvertibilityReport",
    "LayerOperator",
    "MediumSpec",
    "MeshError",
    "MixedSignError",
    "NonPositiveResonanceError",
    "NumericallySingularError",
    "OracleDomainError",
    "PartialWaveSolution",
    "RunConfig",
    "RunResult",
    "ScatterCoefficient",
    "ShapeFunctionals",
    "SingularSystemError",
    "StudyError",
    "SurfaceQuadrature",
    "TruncationError",
    "UnreachableFrequencyError",
    "apply_layer",
    "assemble",
    "assemble_layer",
    "bem_far_values",
    "bem_solve",
    "build_quadrature",
    "compute_A_function",
    "compute_a_hat",
    "compute_capacitance",
    "compute_functionals",
    "compute_volume",
    "convergence_study",
    "counting_bound",
    "distance_sum",
    "dominating_inverse_coefficient",
    "far_field",
    "fibonacci_directions",
    "fundamental_solution",
    "generate_cluster",
    "icosphere",
    "incident_field",
    "invertibility_report",
    "leading_coefficient",
    "load_config",
    "mie_sphere",
    "minnaert_frequency",
    "near_resonance_omega",
    "oracle_far_field",
    "parse_config",
    "refined_inverse_coefficient",
    "regime_flags",
    "resonance_sweep",
    "run",
    "scattered_near_field",
    "solve",
    "solve_dense",
    "solve_single_layer",
    "sphere_mode_eigenvalues",
    "__version__",
]
