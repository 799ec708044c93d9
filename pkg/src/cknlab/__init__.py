"""cknlab: a numerical laboratory for fractional Caffarelli-Kohn-Nirenberg
inequalities in their Hardy form.

Computes the weight constant C(alpha), ground states of the Euler-Lagrange
equation on a logarithmic-radius grid, the non-degeneracy eigenstructure of
the linearized operator, stability constants, symmetry charts, a general
Hardy-type inequality with profile-derived weights, and the smoothed
fundamental-solution machinery behind fractional maximum principles.
"""

from .errors import (
    ConfigError,
    DomainError,
    DomainExtensionNeeded,
    EigenError,
    ParameterError,
    QuadratureError,
    SolverError,
)
from .specfun import (
    ChannelSymbol,
    Params,
    channel_symbol,
    hardy_constant,
    mellin_multiplier,
    power_solution_constant,
    riesz_constant,
    riesz_inverse_constant,
    sphere_area,
)

__version__ = "0.1.0"
