import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.special import erf

from spinor_moment.quadrature import (DEFAULT_SEED, CoulombPairIntegrand, Method, QuadratureResult, ball_rule,
                                      c_b_integrand, c_e_integrand, c_i_integrand, coulomb_convolution,
                                      dipole_kernel, dipole_shell_convolution, erf_over_r, gauss_hermite_rule,
                                      gaussian_coulomb_potential, gaussian_moment_convolution, integrate_3d,
                                      integrate_6d_coulomb, radial_space_rule)

C_E = 1 / math.sqrt(2 * math.pi)


def _brute_convolution(monomial, x, b, n=64):
    """int y^beta exp(-b|y|^2) / |x - y| d^3y in spherical coordinates centred on x."""
    rho, wr = np.polynomial.legendre.leggauss(n)
    top = np.linalg.norm(x) + 9 / math.sqrt(b)
    rho = 0.5 * top * (rho + 1)
    wr = 0.5 * top * wr * rho  # rho^2 / rho
    ct, wt = np.polynomial.legendre.leggauss(n)
    phi = 2 * math.pi * np.arange(2 * n) / (2 * n)
    R, C, P = np.meshgrid(rho, ct, phi, indexing="ij")
    S = np.sqrt(1 - C**2)
    y = x + np.stack([R * S * np.cos(P), R * S * np.sin(P), R * C], axis=-1)
    w = wr[:, None, None] * wt[None, :, None] * np.full(2 * n, math.pi / n)[None, None, :]
    mono = np.prod(y ** np.asarray(monomial), axis=-1)
    return float(np.sum(w * mono * np.exp(-b * np.sum(y * y, axis=-1))))


def test_hermite_rule_gaussian_moments():
    d = 2.5
    pts, w = gauss_hermite_rule(12, d)
    r2 = np.sum(pts**2, axis=1)
    assert w @ np.exp(-r2 / d**2) == pytest.approx(math.pi**1.5 * d**3, rel=1e-13)
    assert w @ (r2 * np.exp(-r2 / d**2)) == pytest.approx(1.5 * math.pi**1.5 * d**5, rel=1e-13)
    pts, w = gauss_hermite_rule(12, d, absorb_weight=False)
    assert w.sum() == pytest.approx(math.pi**1.5 * d**3, rel=1e-13)


def test_ball_and_space_rules():
    pts, w = ball_rule(16, 2.0)
    assert w.sum() == pytest.approx(4 / 3 * math.pi * 8, rel=1e-13)
    assert w @ np.sum(pts**2, axis=1) == pytest.approx(4 * math.pi * 32 / 5, rel=1e-12)
    pts, w = radial_space_rule(64, 1.0)
    r2 = np.sum(pts**2, axis=1)
    assert w @ (1 / (1 + r2) ** 3) == pytest.approx(math.pi**2 / 4, rel=1e-8)


@pytest.mark.parametrize("s", [1e-6, 0.01, 0.5, 1.4999, 1.5, 1.5001, 3.0, 12.0])
def test_kernels_match_quad_oracle(s):
    # erf(s)/s and q(s) = (erf(s)/s - 2 exp(-s^2)/sqrt(pi)) / s^2 via their integral forms
    e_ref = 2 / math.sqrt(math.pi) * quad(lambda t: math.exp(-(s * t) ** 2), 0, 1, epsabs=0, epsrel=1e-13)[0]
    q_ref = 4 / math.sqrt(math.pi) * quad(lambda t: t * t * math.exp(-(s * t) ** 2), 0, 1,
                                          epsabs=0, epsrel=1e-13)[0]
    assert erf_over_r(s) == pytest.approx(e_ref, rel=1e-13)
    assert dipole_kernel(s) == pytest.approx(q_ref, rel=1e-12)


def test_gaussian_potential_far_field():
    r = np.array([20.0, 50.0])
    np.testing.assert_allclose(gaussian_coulomb_potential(r, 1.0), math.pi**1.5 / r, rtol=1e-14)
    np.testing.assert_allclose(erf_over_r(r), erf(r) / r)


@pytest.mark.parametrize("beta", [(0, 0, 0), (1, 0, 0), (0, 0, 1), (2, 0, 0), (0, 1, 1), (1, 0, 1), (0, 0, 2)])
def test_moment_convolution_brute_force(beta):
    x = np.array([0.4, -0.7, 1.1])
    b = 1.3
    got = gaussian_moment_convolution(beta, x, b)[0]
    assert got == pytest.approx(_brute_convolution(beta, x, b), rel=1e-9)


def test_moment_convolution_at_origin_finite():
    vals = [gaussian_moment_convolution(beta, np.zeros(3), 1.0)[0] for beta in [(0, 0, 0), (1, 0, 0), (2, 0, 0)]]
    assert vals[0] == pytest.approx(2 * math.pi)
    assert vals[1] == 0.0
    assert vals[2] == pytest.approx(2 * math.pi / 3, rel=1e-12)
    with pytest.raises(ValueError):
        gaussian_moment_convolution((1, 1, 1), np.zeros(3))


def test_shell_convolutions_match_closed_forms():
    prof = lambda s: np.exp(-s**2)  # noqa: E731
    x = np.array([[0, 0, 0], [0.3, 0, 0], [1.0, 1.0, 0.5], [4.0, 0, 0]])
    np.testing.assert_allclose(coulomb_convolution(prof, x), gaussian_moment_convolution((0, 0, 0), x, 1.0),
                               rtol=1e-12)
    r = np.linalg.norm(x[1:], axis=1)
    G = dipole_shell_convolution(prof, r)
    np.testing.assert_allclose(G * x[1:, 0], gaussian_moment_convolution((1, 0, 0), x[1:], 1.0), rtol=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 5.0))
def test_convolution_scaling(x0, x1, x2, b):
    x = np.array([x0, x1, x2])
    lhs = gaussian_moment_convolution((1, 0, 0), x, b)[0]
    # y -> u / sqrt(b): the degree-1 convolution picks up b^(-3/2)
    rhs = gaussian_moment_convolution((1, 0, 0), math.sqrt(b) * x, 1.0)[0] / b**1.5
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-14)


def test_integrate_3d_engines():
    f = lambda p: np.exp(-np.sum(p**2, axis=1) / 4)  # noqa: E731
    det = integrate_3d(f, "det", 20**3, scale=2.0)
    assert det.value == pytest.approx(8 * math.pi**1.5, rel=1e-13)
    mc = integrate_3d(lambda p: f(p) * (1 + p[:, 0] ** 2), "mc", 200_000, scale=2.0, seed=7)
    exact = 8 * math.pi**1.5 * 3
    assert abs(mc.value - exact) < 4 * mc.std_error
    ball = integrate_3d(lambda p: np.ones(len(p)), "mc", 1000, radius=1.0)
    assert ball.value == pytest.approx(4 / 3 * math.pi)
    vec = integrate_3d(lambda p: np.stack([f(p), p[:, 1] * f(p)], axis=1), "det", 16**3, scale=2.0)
    assert len(vec) == 2 and abs(vec[1].value) < 1e-12
    with pytest.raises(ValueError):
        integrate_3d(f, "det", 0)
    with pytest.raises(ValueError):
        integrate_3d(f, "mc", 10, domain="space")


def test_method_and_result():
    assert Method.parse("DET") is Method.DETERMINISTIC
    assert Method.parse(Method.MONTE_CARLO) is Method.MONTE_CARLO
    with pytest.raises(ValueError):
        Method.parse("simpson")
    r = QuadratureResult(2.0, 0.1, Method.MONTE_CARLO, 10, 1, 0.1).scaled(-3)
    assert (r.value, r.std_error, r.uncertainty) == (-6.0, pytest.approx(0.3), pytest.approx(0.3))
    assert r.to_dict()["method"] == "mc"


def test_pair_integrand_validation():
    with pytest.raises(ValueError):
        CoulombPairIntegrand(((1.0, (2, 1, 0), (1, 1, 0)),))
    with pytest.raises(ValueError):
        CoulombPairIntegrand(((1.0, (-1, 0, 0), (0, 0, 0)),))
    with pytest.raises(ValueError):
        CoulombPairIntegrand(((1.0, (0, 0, 0), (0, 0, 0)),), a=0.0)
    zero = CoulombPairIntegrand(((0.0, (0, 0, 0), (0, 0, 0)),))
    assert integrate_6d_coulomb(zero, "mc", 100).value == 0.0


def test_deterministic_constants():
    assert integrate_6d_coulomb(c_e_integrand()).value == pytest.approx(C_E, rel=1e-10)
    assert integrate_6d_coulomb(c_i_integrand()).value == pytest.approx(C_E / 3, rel=1e-10)
    assert integrate_6d_coulomb(c_b_integrand()).value == pytest.approx(C_E / 12, rel=1e-10)


def test_high_degree_terms_swap_sides():
    # x^2 y^2 is degree 2 on each side; x_1^2 x_2^2 forces the swap path
    itg = CoulombPairIntegrand(((1.0, (0, 0, 0), (2, 2, 0)),))
    swapped = CoulombPairIntegrand(((1.0, (2, 2, 0), (0, 0, 0)),))
    assert integrate_6d_coulomb(itg, "det", 24**3).value == pytest.approx(
        integrate_6d_coulomb(swapped, "det", 24**3).value, rel=1e-12)


def test_mc_reproducible_and_ragged_chunks():
    a = integrate_6d_coulomb(c_e_integrand(), "mc", 123_457, seed=11, chunk=50_000)
    b = integrate_6d_coulomb(c_e_integrand(), "mc", 123_457, seed=11, chunk=50_000)
    c = integrate_6d_coulomb(c_e_integrand(), "mc", 123_457, seed=12, chunk=50_000)
    assert a == b
    assert a.value != c.value
    assert a.budget == 123_457
    assert abs(a.value - C_E) < 5 * a.std_error
    assert integrate_6d_coulomb(c_e_integrand(), "mc", 1000).seed == DEFAULT_SEED


def test_stratification_not_worse():
    plain = [integrate_6d_coulomb(c_i_integrand(), "mc", 40_000, seed=s, stratified=False).value for s in range(12)]
    strat = [integrate_6d_coulomb(c_i_integrand(), "mc", 40_000, seed=s).value for s in range(12)]
    err = lambda v: math.sqrt(np.mean((np.asarray(v) - C_E / 3) ** 2))  # noqa: E731
    assert err(strat) < 1.5 * err(plain)
