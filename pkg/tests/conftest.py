"""Shared fixtures.

The Gamma-ratio multiplier formula is treated as unverified until the direct
singular-quadrature oracle confirms it; the autouse session fixture below runs
that validation before anything else, for every (n, s) pair the suite uses.
Ground states are expensive, so solves are memoized per session.
"""

import numpy as np
import pytest

from cknlab.specfun import mellin_multiplier
from cknlab.quadrature import mellin_multiplier_quadrature

PAIRS = [(1, 0.25), (1, 0.4), (2, 0.5), (3, 0.25), (3, 0.5)]


@pytest.fixture(scope="session", autouse=True)
def mellin_formula_validated():
    """Mandatory pre-build verification of the multiplier formula."""
    for n, s in PAIRS:
        for ell in range(2 if n == 1 else 4):
            lo, hi = -ell, n + ell - 2 * s
            for gamma in np.linspace(lo, hi, 7)[1:-1]:
                ref = mellin_multiplier_quadrature(n, s, ell, float(gamma))
                val = mellin_multiplier(n, s, ell, float(gamma))
                assert abs(val - ref) <= 1e-6 * abs(ref), (
                    f"Gamma-ratio formula disagrees with quadrature at "
                    f"n={n}, s={s}, ell={ell}, gamma={gamma}: {val} vs {ref}"
                )
    return True


@pytest.fixture(scope="session")
def ground_state_cache():
    """Session memo of solved ground states keyed by (n, s, alpha, p)."""
    from cknlab.cylcore import CylGrid
    from cknlab.solver import solve_ground_state
    from cknlab.specfun import Params

    cache = {}

    def get(n, s, alpha, p, N=2048, L=20.0):
        key = (n, s, alpha, p, N, L)
        if key not in cache:
            cache[key] = solve_ground_state(Params(n, s, p, alpha), CylGrid(L=L, N=N))
        return cache[key]

    return get
