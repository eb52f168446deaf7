"""Coherent states for the bound-state hydrogen atom.

Construction of the five-parameter coherent-state family (radial amplitude
s, covering-space phase gamma, shell Euler angles) over arbitrary moment
weights, with numerical verification of normalization, resolution of
unity, and temporal stability.
"""

from .angular import (
    AngularResolutionReport,
    EulerAngles,
    ShellExpansion,
    angular_cs,
    angular_resolution_check,
    shell_norm_squared,
)
from .errors import ConfigurationError, NumericalError, TruncationError
from .fock1d import (
    FockExpansion,
    ResolutionReport,
    Spectrum,
    degen_cs,
    evolve_spectral,
    generalized_cs,
    oscillator_cs,
    overlap,
    resolution_check_1d,
    stability_residual,
)
from .hydrogen import (
    HydrogenExpansion,
    HydrogenLabel,
    HydrogenResolutionReport,
    evolve_hydrogen,
    hydrogen_cs,
    hydrogen_resolution_check,
    hydrogen_spectrum,
    hydrogen_stability_residual,
    state_norm,
)
from .position import (
    GridSpec,
    eval_angular_cs_position,
    eval_eigenstate,
    eval_hydrogen_cs_position,
    export_density_grid,
    quadrature_norm_squared,
    radial_expectation,
    radial_uncertainty_product,
)
from .specfun import (
    BasisIndex,
    QuadratureRule,
    confluent_polynomial,
    log_factorial,
    make_quadrature,
    radial_eigenfunction,
    radial_normalization,
    spherical_harmonic,
    sqrt_binomial_weight,
)
from .weights import (
    FamilyValidation,
    WeightFamily,
    builtin_family,
    family_from_file,
    tabulated_family,
    validate_family,
)

__version__ = "0.1.0"
