"""Two-qubit half-parity measurement simulator."""

from ._core import (
    IntegrationError,
    SimulationConfig,
    __version__,
    classify_outcome,
    concurrence,
    dcdt,
    final_samples,
    heat,
    outcome_cdf,
    outcome_pdf,
    rate_bounds,
    rate_grid,
    run_trajectory,
    sigma,
    sigma_eo,
)

__all__ = [
    "IntegrationError",
    "SimulationConfig",
    "__version__",
    "classify_outcome",
    "concurrence",
    "dcdt",
    "final_samples",
    "heat",
    "outcome_cdf",
    "outcome_pdf",
    "rate_bounds",
    "rate_grid",
    "run_trajectory",
    "sigma",
    "sigma_eo",
]
