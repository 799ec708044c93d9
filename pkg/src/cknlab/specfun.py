"""Special functions and exact Fourier/Mellin multipliers of the fractional Laplacian.

Every sharp constant in the package derives from the functions here: the
kernel normalization ``C_{n,s}`` of ``(-Delta)^s``, the homogeneous-function
eigenvalues ``lambda_ell(gamma)`` and their continuation to the critical line
``Lambda_ell(xi)``, and the sharp Hardy constant.

The Gamma-ratio formula for ``lambda_ell`` is shipped here but is treated as
unverified until the direct singular-quadrature oracle
(:func:`cknlab.quadrature.mellin_multiplier_quadrature`) confirms it; the test
suite performs that validation at session start.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "Params",
    "ChannelSymbol",
    "log_gamma_lanczos",
    "riesz_constant",
    "riesz_inverse_constant",
    "sphere_area",
    "mellin_multiplier",
    "channel_symbol",
    "hardy_constant",
    "power_solution_constant",
]


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Params:
    """Validated parameter tuple (n, s, p, alpha) with derived exponents.

    The admissible window is

        n >= 1,  0 < s < min(1, n/2),  2 < p < 2n/(n-2s),
        -2s < alpha < n/2 - s,

    and the derived quantities are t = s - n(1/2 - 1/p), beta = alpha + t and
    the critical exponent two_star = 2n/(n-2s).  Construction fails with
    :class:`ParameterError` naming the violated bound.
    """

    n: int
    s: float
    p: float
    alpha: float

    def __post_init__(self):
        n, s, p, alpha = self.n, self.s, self.p, self.alpha
        if not (isinstance(n, (int, np.integer)) and n >= 1):
            raise ParameterError(f"n must be a positive integer, got {n!r}")
        smax = min(1.0, n / 2.0)
        if not (0.0 < s < smax):
            raise ParameterError(f"s must satisfy 0 < s < min(1, n/2) = {smax}, got {s}")
        two_star = 2.0 * n / (n - 2.0 * s)
        if not (2.0 < p < two_star):
            raise ParameterError(
                f"p must satisfy 2 < p < 2n/(n-2s) = {two_star}, got {p}"
            )
        if not (-2.0 * s < alpha < n / 2.0 - s):
            raise ParameterError(
                f"alpha must satisfy -2s = {-2 * s} < alpha < n/2 - s = {n / 2 - s}, got {alpha}"
            )

    @property
    def t(self) -> float:
        return self.s - self.n * (0.5 - 1.0 / self.p)

    @property
    def beta(self) -> float:
        return self.alpha + self.t

    @property
    def two_star(self) -> float:
        return 2.0 * self.n / (self.n - 2.0 * self.s)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n (2 for n = 1)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


# ---------------------------------------------------------------------------
# complex log-Gamma (Lanczos)
# ---------------------------------------------------------------------------

# 15-term Lanczos coefficients for g = 607/128 (Godfrey); about 15 significant
# digits for Re z > 0.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma_lanczos(z: complex) -> complex:
    """log Gamma(z) by the Lanczos approximation, with reflection for Re z < 1/2.

    Accuracy is ~1e-14 relative on the strip Re z in [0.1, 30]; the imaginary
    part on the reflection branch is only defined modulo 2*pi*i, which is
    irrelevant for the |Gamma|^2 ratios consumed in this package.
    """
    z = complex(z)
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - log_gamma_lanczos(1.0 - z)
    zm1 = z - 1.0
    series = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        series += _LANCZOS_C[k] / (zm1 + k)
    t = zm1 + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm1 + 0.5) * cmath.log(t) - t + cmath.log(series)


def _log_abs_gamma(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Re log Gamma(x + iy), vectorized, for x > 0 (no reflection needed)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    zm1 = (x - 1.0) + 1j * y
    series = np.full(np.broadcast(x, y).shape, _LANCZOS_C[0], dtype=complex)
    for k in range(1, len(_LANCZOS_C)):
        series = series + _LANCZOS_C[k] / (zm1 + k)
    t = zm1 + _LANCZOS_G + 0.5
    out = _LOG_SQRT_2PI + ((zm1 + 0.5) * np.log(t)).real - t.real + np.log(np.abs(series))
    return out


# ---------------------------------------------------------------------------
# kernel normalizations
# ---------------------------------------------------------------------------


def riesz_constant(n: int, s: float) -> float:
    """Kernel constant C_{n,s} making the singular integral have symbol |xi|^{2s}.

        C_{n,s} = 4^s * s * Gamma(n/2 + s) / (pi^{n/2} * Gamma(1 - s))

    Deterministic and pure; raises :class:`DomainError` for s outside (0, 1).
    """
    if not (0.0 < s < 1.0):
        raise DomainError(f"riesz_constant requires 0 < s < 1, got s = {s}")
    if n < 1:
        raise DomainError(f"riesz_constant requires n >= 1, got n = {n}")
    return (
        4.0**s * s * math.gamma(n / 2.0 + s) / (math.pi ** (n / 2.0) * math.gamma(1.0 - s))
    )


def riesz_inverse_constant(n: int, s: float) -> float:
    """Constant C_{n,-s} of the Riesz potential, so that Phi = C_{n,-s} |x|^{-(n-2s)}
    is the fundamental solution of (-Delta)^s.  Requires 0 < s < n/2."""
    if not (0.0 < s < min(1.0, n / 2.0)):
        raise DomainError(
            f"riesz_inverse_constant requires 0 < s < min(1, n/2), got s = {s}, n = {n}"
        )
    return math.gamma(n / 2.0 - s) / (4.0**s * math.pi ** (n / 2.0) * math.gamma(s))


# ---------------------------------------------------------------------------
# Mellin multipliers on power functions and angular channels
# ---------------------------------------------------------------------------


def _check_channel(n: int, ell: int) -> None:
    if ell < 0 or int(ell) != ell:
        raise DomainError(f"ell must be a nonnegative integer, got {ell}")
    if n == 1 and ell > 1:
        # S^0 carries only the even and odd harmonics
        raise DomainError(f"n = 1 has angular channels ell in {{0, 1}} only, got {ell}")


def _check_strip(n: int, s: float, ell: int, gamma: float) -> None:
    _check_channel(n, ell)
    if gamma + ell <= 0.0:
        raise DomainError(
            f"power function inadmissible: need gamma + ell > 0, got gamma + ell = {gamma + ell}"
        )
    if gamma + 2.0 * s + ell >= n + 2.0 * ell:
        raise DomainError(
            "power function inadmissible: need gamma + 2s + ell < n + 2*ell, "
            f"got {gamma + 2.0 * s + ell} >= {n + 2.0 * ell}"
        )


def mellin_multiplier(n: int, s: float, ell: int, gamma: float) -> float:
    """Eigenvalue lambda_ell(gamma) of (-Delta)^s on |x|^{-gamma} Y_ell.

    (-Delta)^s (|x|^{-gamma} Y_ell) = lambda_ell(gamma) |x|^{-gamma-2s} Y_ell
    on the admissible strip 0 < gamma + ell, gamma + 2s < n + ell, via

        lambda = 4^s * G((gamma+2s+ell)/2) G((n+ell-gamma)/2)
                       / [G((gamma+ell)/2) G((n+ell-gamma-2s)/2)].

    The value is validated against a direct singular-quadrature oracle by the
    test suite before any downstream use.
    """
    if not (0.0 < s < 1.0):
        raise DomainError(f"mellin_multiplier requires 0 < s < 1, got s = {s}")
    _check_strip(n, s, ell, gamma)
    a = 0.5 * (gamma + 2.0 * s + ell)
    b = 0.5 * (n + ell - gamma)
    c = 0.5 * (gamma + ell)
    d = 0.5 * (n + ell - gamma - 2.0 * s)
    lg = log_gamma_lanczos
    return 4.0**s * math.exp((lg(a) + lg(b) - lg(c) - lg(d)).real)


@dataclass(frozen=True)
class ChannelSymbol:
    """Fourier symbol of the radial part of (-Delta)^s on angular channel ell.

    On the logarithmic radius tau = log r a function r^{-(n-2s)/2} v(log r) Y_ell
    is mapped by (-Delta)^s to r^{-(n+2s)/2} (Lambda_ell * v-hat) Y_ell, where

        Lambda_ell(xi) = lambda_ell((n-2s)/2 + i xi)
                       = 4^s |G((n+2s)/4 + ell/2 + i xi/2)|^2
                             / |G((n-2s)/4 + ell/2 + i xi/2)|^2

    is real, even and positive, increasing in |xi| and in ell.
    """

    n: int
    s: float
    ell: int

    @property
    def sph_eigenvalue(self) -> float:
        """Eigenvalue ell*(ell + n - 2) of the spherical Laplacian on channel ell."""
        return float(self.ell * (self.ell + self.n - 2))

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        a = (self.n + 2.0 * self.s) / 4.0 + self.ell / 2.0
        b = (self.n - 2.0 * self.s) / 4.0 + self.ell / 2.0
        y = xi / 2.0
        out = 4.0**self.s * np.exp(2.0 * (_log_abs_gamma(a, y) - _log_abs_gamma(b, y)))
        return out if out.shape else float(out)

    def at_zero(self) -> float:
        return float(self(0.0))


_symbol_cache: dict[tuple, ChannelSymbol] = {}
_symbol_lock = threading.Lock()


def channel_symbol(n: int, s: float, ell: int) -> ChannelSymbol:
    """Cached ChannelSymbol for (n, s, ell); safe for concurrent use."""
    if not (0.0 < s < min(1.0, n / 2.0)):
        raise DomainError(f"channel_symbol requires 0 < s < min(1, n/2), got s={s}, n={n}")
    _check_channel(n, ell)
    key = (int(n), float(s), int(ell))
    with _symbol_lock:
        sym = _symbol_cache.get(key)
        if sym is None:
            sym = ChannelSymbol(int(n), float(s), int(ell))
            _symbol_cache[key] = sym
        return sym


def hardy_constant(n: int, s: float) -> float:
    """Sharp constant of the fractional Hardy inequality
    ||w||_{Hs}^2 >= C_Hardy ||w |x|^{-s}||_{L2}^2.

    Equals the minimum of Lambda_ell(xi) over all channels and frequencies,
    attained at ell = 0, xi = 0.
    """
    return channel_symbol(n, s, 0).at_zero()


def power_solution_constant(params: Params) -> float:
    """Constant A with which w = |x|^{-(n/2-s)} solves
    (-Delta)^s w = A w^{p-1} |x|^{-tp}; equals lambda_0((n-2s)/2) for every p."""
    n, s = params.n, params.s
    return mellin_multiplier(n, s, 0, (n - 2.0 * s) / 2.0)
