"""The weight constant C(alpha) of the Hardy reformulation, by two routes.

Production route: the unit-ball reduction

    C(alpha) = C_{n,s} int_{B_1} (1-|z|^a)(|z|^{-a} - |z|^{2s-n}) / |e1-z|^{n+2s} dz,

whose integrand has a double zero at |z| = 1 cancelling the angular kernel's
(1-r)^{-1-2s} blow-up, leaving an integrable (1-r)^{1-2s} endpoint handled by
a geometric mesh.  Oracle route: the pointwise operator identity

    C_{n,s} |x|^a L_{s,a} u - (-Delta)^s (|x|^{-a} u) = C(alpha) |x|^{-2s-a} u

evaluated on a smooth annular bump by direct principal-value quadrature; the
result must not depend on the bump or the evaluation point.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, QuadratureError
from .quadrature import (
    fractional_laplacian_channel,
    gauss_panels,
    geometric_edges,
    channel_kernel,
    weighted_operator_radial,
)
from .specfun import Params, riesz_constant

__all__ = ["CoeffResult", "coeff_quadrature", "coeff_derivative", "coeff_oracle", "coeff_result"]


@dataclass(frozen=True)
class CoeffResult:
    """C(alpha) with its dual-route diagnostics."""

    value: float
    route_a: float  # ball-reduced quadrature
    route_b: float  # operator-identity oracle
    est_error: float
    derivative: float


def _check_window(n: int, s: float, alpha: float) -> None:
    if not (0.0 < s < min(1.0, n / 2.0)):
        raise ParameterError(f"need 0 < s < min(1, n/2), got s = {s}")
    if not (-2.0 * s < alpha < n / 2.0 - s):
        raise ParameterError(
            f"alpha must satisfy -2s = {-2 * s} < alpha < n/2 - s = {n / 2 - s}, got {alpha}"
        )


def _angular_kernel(n: int, s: float, r: np.ndarray) -> np.ndarray:
    """k_{n,s}(r) = int_{S^{n-1}} |e1 - r theta|^{-(n+2s)} dsigma(theta), r < 1."""
    ker = channel_kernel(n, s)
    h = ker.h
    if n == 1:
        return (1.0 - r) ** (-(1.0 + 2.0 * s)) + (1.0 + r) ** (-(1.0 + 2.0 * s))
    theta, wtheta = ker._theta, ker._wtheta
    dist2 = (1.0 - r)[:, None] ** 2 + 4.0 * r[:, None] * np.sin(theta / 2.0)[None, :] ** 2
    return dist2 ** (-h) @ wtheta


_R_HEAD = 0.1  # the [0, r0] head is summed analytically against the kernel series


def _ball_mesh(order: int):
    """Radial nodes on (r0, 1) with ratio-1/2 grading toward the r = 1 endpoint."""
    lo_edges = geometric_edges(_R_HEAD, 0.5, 1.4)
    up_edges = 1.0 - geometric_edges(1e-13, 0.5, 2.0)[::-1]
    r1, w1 = gauss_panels(lo_edges, order)
    r2, w2 = gauss_panels(up_edges, order)
    return np.concatenate([r1, r2]), np.concatenate([w1, w2])


def _kernel_series(n: int, s: float, nterms: int = 16) -> np.ndarray:
    return channel_kernel(n, s).k_series(nterms)


def _head_power(n: int, s: float, exponents, signs) -> float:
    """int_0^{r0} sum_j sign_j r^{e_j - 1} k(r) dr, k by its Taylor series."""
    c = _kernel_series(n, s)
    total = 0.0
    for e, sg in zip(exponents, signs):
        ks = np.arange(c.size)
        total += sg * float(np.sum(c * _R_HEAD ** (e + ks) / (e + ks)))
    return total


def _head_power_log(n: int, s: float, exponents, signs) -> float:
    """Same as :func:`_head_power` with an extra log r in the integrand."""
    c = _kernel_series(n, s)
    lr = math.log(_R_HEAD)
    total = 0.0
    for e, sg in zip(exponents, signs):
        ks = np.arange(c.size)
        ee = e + ks
        total += sg * float(np.sum(c * _R_HEAD**ee * (lr - 1.0 / ee) / ee))
    return total


def _ball_integral(n: int, s: float, fvals_fn, head: float, order: int) -> float:
    r, w = _ball_mesh(order)
    k = _angular_kernel(n, s, r)
    return riesz_constant(n, s) * (float(w @ (r ** (n - 1) * fvals_fn(r) * k)) + head)


def _adaptive(n: int, s: float, fvals_fn, head: float, tol: float = 1e-9) -> float:
    prev = _ball_integral(n, s, fvals_fn, head, 10)
    for order in (16, 24, 32):
        cur = _ball_integral(n, s, fvals_fn, head, order)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(
        f"ball quadrature did not converge (last delta {abs(cur - prev):.3g})",
        estimate=abs(cur - prev),
    )


_memo: dict = {}
_memo_lock = threading.Lock()


def coeff_quadrature(params_or_n, s: float | None = None, alpha: float | None = None) -> float:
    """C(alpha) by the unit-ball reduced quadrature (production route).

    Memoized on (n, s, alpha rounded to 1e-12).  Raises
    :class:`QuadratureError` when refinement stalls above the 1e-9 target.
    """
    if isinstance(params_or_n, Params):
        n, s, alpha = params_or_n.n, params_or_n.s, params_or_n.alpha
    else:
        n = params_or_n
    _check_window(n, s, alpha)
    key = (n, float(s), round(alpha * 1e12))
    with _memo_lock:
        if key in _memo:
            return _memo[key]

    def fvals(r):
        # (1 - r^a)(r^{-a} - r^{2s-n}), each factor O(1-r), via expm1
        logr = np.log(r)
        one_minus_ra = -np.expm1(alpha * logr)
        second = np.exp((2.0 * s - n) * logr) * np.expm1((n - 2.0 * s - alpha) * logr)
        return one_minus_ra * second

    # expanded integrand r^{n-1} fvals = r^{n-1-a} - r^{2s-1} - r^{n-1} + r^{a+2s-1},
    # summed analytically against the kernel series on [0, r0]
    head = _head_power(n, s,
                       [n - alpha, 2.0 * s, n, alpha + 2.0 * s],
                       [1.0, -1.0, -1.0, 1.0])
    val = _adaptive(n, s, fvals, head)
    with _memo_lock:
        _memo[key] = val
    return val


def coeff_derivative(params_or_n, s: float | None = None, alpha: float | None = None) -> float:
    """dC/dalpha by quadrature of the differentiated ball integrand; < 0."""
    if isinstance(params_or_n, Params):
        n, s, alpha = params_or_n.n, params_or_n.s, params_or_n.alpha
    else:
        n = params_or_n
    _check_window(n, s, alpha)

    def fvals(r):
        logr = np.log(r)
        # r^{a+2s-n} - r^{-a} = r^{-a} expm1((2a+2s-n) log r), double zero with log r
        diff = np.exp(-alpha * logr) * np.expm1((2.0 * alpha + 2.0 * s - n) * logr)
        return diff * logr

    # integrand r^{n-1} fvals = (r^{a+2s-1} - r^{n-1-a}) log r
    head = _head_power_log(n, s, [alpha + 2.0 * s, n - alpha], [1.0, -1.0])
    return _adaptive(n, s, fvals, head)


def _default_bump(width: float = 2.0, center: float = 0.0):
    def u(tau):
        tau = np.asarray(tau, dtype=float)
        t = (tau - center) / width
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out

    return u


def coeff_oracle(params_or_n, s: float | None = None, alpha: float | None = None,
                 u_test=None, tau_star: float = 0.3) -> float:
    """C(alpha) from the operator identity on a smooth annular test function.

    ``u_test`` is a callable of tau = log r vanishing outside a compact
    tau-interval; the default is a C^inf bump on [-2, 2].  Result must be
    independent of the bump and of the evaluation radius up to quadrature
    error.  Rejects evaluation points where the test function is tiny.
    """
    if isinstance(params_or_n, Params):
        n, s, alpha = params_or_n.n, params_or_n.s, params_or_n.alpha
    else:
        n = params_or_n
    _check_window(n, s, alpha)
    u = u_test if u_test is not None else _default_bump()
    ustar = float(np.asarray(u(np.array([tau_star])))[0])
    if abs(ustar) < 1e-8:
        raise ValueError(f"test function too small at tau = {tau_star}: {ustar}")
    kappa = (n - 2.0 * s) / 2.0
    rstar = math.exp(tau_star)
    cns = riesz_constant(n, s)
    lhs = cns * rstar**alpha * weighted_operator_radial(u, tau_star, n, s, alpha)

    def w_profile(tau):
        return np.exp((kappa - alpha) * np.asarray(tau, dtype=float)) * np.asarray(u(tau), dtype=float)

    flap_w = fractional_laplacian_channel(w_profile, tau_star, n, s, 0)
    wstar = rstar ** (-alpha) * ustar
    return rstar ** (2.0 * s) * (lhs - flap_w) / wstar


def coeff_result(params: Params) -> CoeffResult:
    """Both routes plus the derivative, with the route-disagreement estimate."""
    a = coeff_quadrature(params)
    b = coeff_oracle(params)
    return CoeffResult(
        value=a,
        route_a=a,
        route_b=b,
        est_error=abs(a - b),
        derivative=coeff_derivative(params),
    )
