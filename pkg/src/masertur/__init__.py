"""Three-level maser heat engine: steady states, full counting statistics,
thermodynamic uncertainty and its quantum bound, with a classical
rate-equation twin for comparison.
"""

from .bound import (
    BoundComponents,
    coherent_contribution,
    dynamical_activity,
    full_basis_steady_state,
    full_liouvillian,
    k_supermatrices,
    projected_pseudoinverse,
    quantum_bound,
)
from .counting import (
    charpoly_coeffs_classical,
    charpoly_coeffs_numeric,
    charpoly_coeffs_quantum,
    CharPolyCoeffs,
    Cumulants,
    cumulants_via_eigenvalue,
    fano,
    mean_rate,
    variance_rate,
)
from .errors import ConfigError, DomainError, MaserturError, NumericalError
from .explorer import (
    AxisSpec,
    heatmap,
    Histogram,
    McSpec,
    monte_carlo,
    sweep,
    SweepSpec,
)
from .model import (
    build_classical_generator,
    build_quantum_generator,
    coherence_ridge,
    derived_rates,
    EngineParams,
    GeneratorMatrix,
    steady_state_closed_form,
    steady_state_numeric,
    SteadyState,
)
from .uncertainty import (
    entropy_production,
    q_pop,
    quantum_advantage,
    thermodynamic_uncertainty,
    TurReport,
)

__version__ = "0.1.0"

__all__ = [
    "AxisSpec",
    "BoundComponents",
    "CharPolyCoeffs",
    "ConfigError",
    "Cumulants",
    "DomainError",
    "EngineParams",
    "GeneratorMatrix",
    "Histogram",
    "MaserturError",
    "McSpec",
    "NumericalError",
    "SteadyState",
    "SweepSpec",
    "TurReport",
    "build_classical_generator",
    "build_quantum_generator",
    "charpoly_coeffs_classical",
    "charpoly_coeffs_numeric",
    "charpoly_coeffs_quantum",
    "coherence_ridge",
    "coherent_contribution",
    "cumulants_via_eigenvalue",
    "derived_rates",
    "dynamical_activity",
    "entropy_production",
    "fano",
    "full_basis_steady_state",
    "full_liouvillian",
    "heatmap",
    "k_supermatrices",
    "mean_rate",
    "monte_carlo",
    "projected_pseudoinverse",
    "q_pop",
    "quantum_advantage",
    "quantum_bound",
    "steady_state_closed_form",
    "steady_state_numeric",
    "sweep",
    "thermodynamic_uncertainty",
    "variance_rate",
]
