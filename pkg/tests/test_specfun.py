import math

import numpy as np
import pytest
import scipy.special as sps

from cknlab.errors import DomainError, ParameterError
from cknlab.quadrature import (
    channel_symbol_quadrature,
    fourier_route_gaussian,
    fractional_laplacian_channel,
    gauss_panels,
    geometric_edges,
    mellin_multiplier_quadrature,
)
from cknlab.specfun import (
    Params,
    channel_symbol,
    hardy_constant,
    log_gamma_lanczos,
    mellin_multiplier,
    power_solution_constant,
    riesz_constant,
    sphere_area,
)


# ---------------------------------------------------------------------------
# Params window
# ---------------------------------------------------------------------------


def test_params_valid_and_derived():
    p = Params(3, 0.5, 2.5, 0.0)
    assert 0.0 < p.t < p.s
    assert p.beta - p.alpha == pytest.approx(p.t, abs=1e-15)
    assert p.two_star == pytest.approx(3.0)


@pytest.mark.parametrize(
    "n, s, p, alpha",
    [
        (3, 0.5, 2.5, 1.2),   # alpha >= n/2 - s
        (3, 0.5, 6.0, 0.0),   # p >= 2*_s (and 2*_s = 3 anyway)
        (3, 0.5, 3.0, 0.0),   # p = 2*_s boundary
        (3, 0.5, 2.0, 0.0),   # p = 2 boundary
        (3, 1.0, 2.5, 0.0),   # s = 1
        (1, 0.5, 2.5, -1.1),  # alpha <= -2s
        (0, 0.5, 2.5, 0.0),   # n < 1
    ],
)
def test_params_rejects(n, s, p, alpha):
    with pytest.raises(ParameterError):
        Params(n, s, p, alpha)


def test_t_in_zero_s_across_window():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        s = float(rng.uniform(0.05, min(1.0, n / 2) - 0.05))
        two_star = 2 * n / (n - 2 * s)
        p = float(rng.uniform(2.0 + 1e-3, two_star - 1e-3))
        alpha = float(rng.uniform(-2 * s + 1e-3, n / 2 - s - 1e-3))
        pr = Params(n, s, p, alpha)
        assert 0.0 < pr.t < pr.s


# ---------------------------------------------------------------------------
# Lanczos log-Gamma
# ---------------------------------------------------------------------------


def test_log_gamma_accuracy_on_strip():
    rng = np.random.default_rng(3)
    xs = rng.uniform(0.1, 30.0, 200)
    ys = rng.uniform(-50.0, 50.0, 200)
    worst = 0.0
    for x, y in zip(xs, ys):
        z = complex(x, y)
        mine = log_gamma_lanczos(z)
        ref = sps.loggamma(z)
        worst = max(worst, abs(mine - ref) / max(1.0, abs(ref)))
    assert worst < 1e-13


def test_log_gamma_reflection_real_part():
    # only the real part is contractually meaningful below Re z = 1/2
    for z in [complex(0.3, 2.0), complex(-0.7, 1.3), complex(0.05, -4.0)]:
        assert log_gamma_lanczos(z).real == pytest.approx(sps.loggamma(z).real, abs=1e-12)


# ---------------------------------------------------------------------------
# riesz_constant
# ---------------------------------------------------------------------------


def test_riesz_constant_closed_values():
    assert riesz_constant(1, 0.5) == pytest.approx(1.0 / math.pi, rel=1e-14)
    assert riesz_constant(3, 0.5) == pytest.approx(1.0 / math.pi**2, rel=1e-14)


def test_riesz_constant_domain():
    with pytest.raises(DomainError):
        riesz_constant(3, 1.0)
    with pytest.raises(DomainError):
        riesz_constant(3, 0.0)


@pytest.mark.parametrize("n,s", [(1, 0.5), (1, 0.25), (3, 0.5), (3, 0.25)])
def test_riesz_constant_gaussian_symbol_oracle(n, s):
    # kernel route vs pure-Fourier route on a Gaussian at 10 radii
    kap = (n - 2 * s) / 2

    def prof(tau):
        return np.exp(kap * tau) * np.exp(-0.5 * np.exp(2.0 * tau))

    for r in np.linspace(0.3, 2.8, 10):
        a = fractional_laplacian_channel(prof, math.log(r), n, s, 0)
        b = fourier_route_gaussian(n, s, float(r))
        assert abs(a - b) <= 1e-6 * max(1.0, abs(b))


@pytest.mark.parametrize("n", [1, 3])
def test_riesz_constant_classical_limit(n):
    # s -> 1^-: (-Delta)^s(|x|^2 c(|x|)) at 0 approaches -Delta(|x|^2) = -2n.
    # At x = 0 there is no principal value: the integral is -C int phi(y)|y|^{-n-2s} dy,
    # with the radial head [0, delta] done in closed form (c(rho) = exp(-rho^4) ~ 1).
    s = 0.999
    delta = 1e-3
    head = delta ** (2 - 2 * s) / (2 - 2 * s) - delta ** (6 - 2 * s) / (6 - 2 * s)
    rho, w = gauss_panels(geometric_edges(delta, 60.0, 1.2), 14)
    tail = float(w @ (rho ** (1 - 2 * s) * np.exp(-(rho**4))))
    val = -riesz_constant(n, s) * sphere_area(n) * (head + tail)
    assert val == pytest.approx(-2.0 * n, rel=0.01)


# ---------------------------------------------------------------------------
# mellin_multiplier
# ---------------------------------------------------------------------------


def test_mellin_closed_values():
    assert mellin_multiplier(3, 0.5, 0, 1.0) == pytest.approx(2.0 / math.pi, rel=1e-10)
    assert mellin_multiplier(3, 0.5, 1, 1.0) == pytest.approx(math.pi / 2.0, rel=1e-10)


def test_mellin_closed_values_by_quadrature():
    assert mellin_multiplier_quadrature(3, 0.5, 0, 1.0) == pytest.approx(2.0 / math.pi, rel=1e-8)
    assert mellin_multiplier_quadrature(3, 0.5, 1, 1.0) == pytest.approx(math.pi / 2.0, rel=1e-8)


@pytest.mark.parametrize("n,s", [(1, 0.25), (3, 0.5)])
def test_mellin_dual_route_strip_sweep(n, s):
    rng = np.random.default_rng(11)
    for ell in range(2 if n == 1 else 4):
        lo, hi = -ell, n + ell - 2 * s
        span = hi - lo
        for gamma in rng.uniform(lo + 0.12 * span, hi - 0.12 * span, 10):
            a = mellin_multiplier(n, s, ell, float(gamma))
            b = mellin_multiplier_quadrature(n, s, ell, float(gamma))
            assert abs(a - b) <= 1e-6 * abs(b)


def test_mellin_strip_rejection_names_bound():
    with pytest.raises(DomainError, match="gamma \\+ ell > 0"):
        mellin_multiplier(3, 0.5, 0, -0.1)
    with pytest.raises(DomainError, match="gamma \\+ 2s \\+ ell < n"):
        mellin_multiplier(3, 0.5, 0, 2.5)


def test_mellin_matches_power_solution_constant():
    for p in [2.1, 2.5, 2.9]:
        params = Params(3, 0.5, p, 0.2)
        assert power_solution_constant(params) == pytest.approx(
            mellin_multiplier(3, 0.5, 0, 1.0), rel=1e-14
        )


# ---------------------------------------------------------------------------
# channel_symbol
# ---------------------------------------------------------------------------


def test_channel_symbol_closed_values():
    assert channel_symbol(3, 0.5, 0)(0.0) == pytest.approx(2.0 / math.pi, rel=1e-12)
    assert channel_symbol(3, 0.5, 1)(0.0) == pytest.approx(math.pi / 2.0, rel=1e-12)


def test_channel_symbol_even_and_positive():
    sym = channel_symbol(3, 0.5, 0)
    xi = np.random.default_rng(5).uniform(-30, 30, 100)
    a, b = sym(xi), sym(-xi)
    assert np.all(a > 0)
    assert np.max(np.abs(a - b)) == 0.0  # evenness is exact by construction


def test_channel_symbol_monotone_in_ell_and_xi():
    for n, s in [(1, 0.25), (3, 0.5)]:
        nell = 2 if n == 1 else 4
        vals = [channel_symbol(n, s, ell)(0.0) for ell in range(nell)]
        assert all(vals[i] < vals[i + 1] for i in range(nell - 1))
        sym = channel_symbol(n, s, 0)
        xi = np.linspace(0.0, 20.0, 50)
        v = sym(xi)
        assert np.all(np.diff(v) > 0)


def test_channel_symbol_growth():
    # Lambda_0(xi) ~ xi^{2s}; at s = 1/2 the 100x mark is passed near xi = 64
    sym = channel_symbol(3, 0.5, 0)
    assert sym(10.0) > 10.0 * sym(0.0)
    assert sym(100.0) > 100.0 * sym(0.0)
    xi = np.array([1.0, 10.0, 100.0, 1000.0])
    assert np.all(np.diff(sym(xi) / xi) < 0.01)  # growth rate settles at xi^{2s}


def test_channel_symbol_agrees_with_mellin_on_axis():
    for n, s, ell in [(1, 0.25, 0), (3, 0.5, 2), (2, 0.4, 1)]:
        sym = channel_symbol(n, s, ell)
        assert sym.at_zero() == pytest.approx(
            mellin_multiplier(n, s, ell, (n - 2 * s) / 2.0), rel=1e-13
        )


def test_channel_symbol_quadrature_route():
    for xi in [0.0, 0.7, 3.3, 9.0]:
        a = float(channel_symbol(3, 0.5, 1)(xi))
        b = channel_symbol_quadrature(3, 0.5, 1, xi)
        assert abs(a - b) <= 1e-8 * abs(a)


def test_sph_eigenvalue():
    assert channel_symbol(3, 0.5, 2).sph_eigenvalue == 2 * (2 + 1)
    assert channel_symbol(5, 0.5, 1).sph_eigenvalue == 1 * (1 + 3)


# ---------------------------------------------------------------------------
# hardy_constant / power_solution_constant
# ---------------------------------------------------------------------------


def test_hardy_constant_closed_value():
    assert hardy_constant(3, 0.5) == pytest.approx(2.0 / math.pi, rel=1e-12)


def test_hardy_constant_is_channel_minimum():
    for n, s in [(1, 0.25), (3, 0.5)]:
        ch = hardy_constant(n, s)
        for ell in range(2 if n == 1 else 3):
            sym = channel_symbol(n, s, ell)
            xi = np.linspace(0, 15, 40)
            assert np.all(sym(xi) >= ch * (1 - 1e-14))


def test_inverse_yafaev_constants_gap():
    # 1/C^{(0)} = C_Hardy and 1/C^{(1)} = Lambda_1(0) > C_Hardy
    c0 = hardy_constant(3, 0.5)
    c1 = channel_symbol(3, 0.5, 1)(0.0)
    assert c0 == pytest.approx(2 / math.pi, rel=1e-12)
    assert c1 == pytest.approx(math.pi / 2, rel=1e-12)
    assert c1 > c0


def test_power_solution_constant_value_and_p_independence():
    vals = [power_solution_constant(Params(3, 0.5, p, 0.1)) for p in [2.2, 2.6, 2.9]]
    assert all(v == pytest.approx(2.0 / math.pi, rel=1e-12) for v in vals)


def test_power_solution_homogeneity_identity():
    # w^{p-1} |x|^{-tp} is -(n+2s)/2-homogeneous when w is -(n-2s)/2-homogeneous
    import sympy

    n, s, p = sympy.symbols("n s p", positive=True)
    t = s - n * (sympy.Rational(1, 2) - 1 / p)
    expr = -(n - 2 * s) / 2 * (p - 1) - t * p - (-(n + 2 * s) / 2)
    assert sympy.simplify(expr) == 0
