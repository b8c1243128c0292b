"""Deterministic and Monte Carlo integration with the Coulomb kernel.

The deterministic 6D route never samples the 1/|x - y| singularity: the inner
integral over a Gaussian-times-monomial factor is done in closed form (erf
potential and its derivatives), leaving a smooth 3D outer integral on a
tensor Gauss-Hermite grid. The Monte Carlo route is brute force: draw both
points from the Gaussian weights and average K / |x - y|.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import erf, ndtri, roots_hermite, roots_legendre

__all__ = [
    "Method",
    "QuadratureResult",
    "CoulombPairIntegrand",
    "DEFAULT_SEED",
    "DEFAULT_DET_BUDGET",
    "DEFAULT_MC_BUDGET",
    "integrate_3d",
    "integrate_6d_coulomb",
    "coulomb_convolution",
    "gaussian_coulomb_potential",
    "dipole_shell_convolution",
    "gaussian_moment_convolution",
    "erf_over_r",
    "dipole_kernel",
    "gauss_hermite_rule",
    "ball_rule",
    "radial_space_rule",
    "c_e_integrand",
    "c_i_integrand",
    "c_b_integrand",
]

DEFAULT_SEED = 0x5EED
DEFAULT_DET_BUDGET = 64**3
DEFAULT_MC_BUDGET = 10**7
MC_CHUNK = 500_000
COINCIDENT_TOL = 1e-12
MAX_KERNEL_DEGREE = 4


class Method(str, Enum):
    DETERMINISTIC = "det"
    MONTE_CARLO = "mc"

    @classmethod
    def parse(cls, value) -> Method:
        if isinstance(value, Method):
            return value
        v = str(value).lower()
        if v in ("det", "deterministic"):
            return cls.DETERMINISTIC
        if v in ("mc", "montecarlo", "monte_carlo"):
            return cls.MONTE_CARLO
        raise ValueError(f"unknown quadrature method {value!r}")


@dataclass(frozen=True)
class QuadratureResult:
    """Integral estimate.

    ``std_error`` is the Monte Carlo standard error (zero for deterministic
    runs); ``error_estimate`` is the deterministic convergence estimate
    (difference against a coarser rule) or, for MC, equal to ``std_error``.
    """

    value: float
    std_error: float
    method: Method
    budget: int
    seed: int | None = None
    error_estimate: float = 0.0

    @property
    def uncertainty(self) -> float:
        return max(self.std_error, self.error_estimate)

    def scaled(self, k: float) -> QuadratureResult:
        k = float(k)
        return QuadratureResult(self.value * k, self.std_error * abs(k), self.method, self.budget,
                                self.seed, self.error_estimate * abs(k))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        return out


# ---------------------------------------------------------------------------
# 1D and 3D rules

@lru_cache(maxsize=32)
def _hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_hermite(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=32)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_hermite_rule(n: int, scale: float = 1.0, absorb_weight: bool = True):
    """Tensor Gauss-Hermite nodes for weight exp(-|x|^2 / scale^2).

    With ``absorb_weight`` the returned weights integrate a function that
    already contains its Gaussian decay (``sum w f = int f d^3x``); otherwise
    they integrate ``f`` against the Gaussian weight.
    """
    x, w = _hermite(n)
    g = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    logw = np.log(w)
    lw = (logw[:, None, None] + logw[None, :, None] + logw[None, None, :]).reshape(-1)
    if absorb_weight:
        lw = lw + np.einsum("ij,ij->i", g, g)
    return g * scale, np.exp(lw) * scale**3


def ball_rule(n: int, radius: float):
    """Product rule on a ball: Gauss-Legendre in r and cos(theta), uniform in phi."""
    xr, wr = _legendre(n)
    r = 0.5 * radius * (xr + 1.0)
    wr = 0.5 * radius * wr * r**2
    ct, wt = _legendre(n)
    nphi = 2 * n
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    wphi = np.full(nphi, 2.0 * np.pi / nphi)
    return _spherical_product(r, wr, ct, wt, phi, wphi)


def radial_space_rule(n: int, scale: float):
    """All of R^3 through r = scale * t / (1 - t); suits algebraic decay."""
    xt, wt_ = _legendre(n)
    t = 0.5 * (xt + 1.0)
    r = scale * t / (1.0 - t)
    wr = 0.5 * wt_ * scale / (1.0 - t) ** 2 * r**2
    ct, wt = _legendre(n)
    nphi = 2 * n
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    wphi = np.full(nphi, 2.0 * np.pi / nphi)
    return _spherical_product(r, wr, ct, wt, phi, wphi)


def _spherical_product(r, wr, ct, wt, phi, wphi):
    st = np.sqrt(1.0 - ct**2)
    R, C, P = np.meshgrid(r, ct, phi, indexing="ij")
    S = np.sqrt(1.0 - C**2)
    pts = np.stack([R * S * np.cos(P), R * S * np.sin(P), R * C], axis=-1).reshape(-1, 3)
    w = (wr[:, None, None] * wt[None, :, None] * wphi[None, None, :]).reshape(-1)
    del st
    return pts, w


def _apply_rule(f, pts, w, chunk: int = 200_000) -> np.ndarray:
    acc = None
    for start in range(0, len(w), chunk):
        vals = np.asarray(f(pts[start:start + chunk]), dtype=float)
        part = np.tensordot(w[start:start + chunk], vals, axes=(0, 0))
        acc = part if acc is None else acc + part
    return np.asarray(acc)


def _per_axis(budget: int) -> int:
    return max(4, int(round(budget ** (1.0 / 3.0))))


def integrate_3d(f: Callable[[np.ndarray], np.ndarray], method="det", budget: int | None = None, *,
                 scale: float = 1.0, radius: float | None = None, domain: str | None = None,
                 seed: int = DEFAULT_SEED) -> QuadratureResult | list[QuadratureResult]:
    """Estimate the integral of ``f`` over R^3 (or over a ball).

    ``f`` maps (N, 3) points to (N,) or (N, k) values. ``domain`` is
    ``"gaussian"`` (f decays like exp(-|x|^2/scale^2); default), ``"ball"``
    (f supported in the ball of ``radius``) or ``"space"`` (algebraic decay).
    Vector-valued integrands return one result per component.
    """
    method = Method.parse(method)
    if domain is None:
        domain = "ball" if radius is not None else "gaussian"
    if budget is None:
        budget = DEFAULT_DET_BUDGET if method is Method.DETERMINISTIC else 10**6
    if budget <= 0:
        raise ValueError("quadrature budget must be positive")
    if method is Method.DETERMINISTIC:
        n = _per_axis(budget) if domain == "gaussian" else max(8, int(round((budget / 2) ** (1 / 3))))
        coarse = max(4, (3 * n) // 4)
        fine_v = _det_rule_value(f, domain, n, scale, radius)
        coarse_v = _det_rule_value(f, domain, coarse, scale, radius)
        nodes = n**3 if domain == "gaussian" else 2 * n**3
        err = np.abs(fine_v - coarse_v)
        return _pack(fine_v, np.zeros_like(fine_v), err, method, nodes, None)
    rng = np.random.Generator(np.random.PCG64(seed))
    if domain == "gaussian":
        pts = rng.normal(scale=scale / math.sqrt(2.0), size=(budget, 3))
        dens = np.exp(-np.einsum("ij,ij->i", pts, pts) / scale**2) / (math.pi ** 1.5 * scale**3)
    elif domain == "ball":
        if radius is None:
            raise ValueError("ball domain needs a radius")
        u = rng.normal(size=(budget, 3))
        u /= np.linalg.norm(u, axis=1)[:, None]
        pts = u * (radius * rng.random(budget) ** (1.0 / 3.0))[:, None]
        dens = np.full(budget, 3.0 / (4.0 * math.pi * radius**3))
    else:
        raise ValueError("Monte Carlo supports the 'gaussian' and 'ball' domains")
    vals = np.asarray(f(pts), dtype=float)
    ratio = vals / (dens if vals.ndim == 1 else dens[:, None])
    mean = ratio.mean(axis=0)
    se = ratio.std(axis=0, ddof=1) / math.sqrt(budget)
    return _pack(mean, se, se, method, budget, seed)


def _det_rule_value(f, domain, n, scale, radius):
    if domain == "gaussian":
        pts, w = gauss_hermite_rule(n, scale)
    elif domain == "ball":
        if radius is None:
            raise ValueError("ball domain needs a radius")
        pts, w = ball_rule(n, radius)
    elif domain == "space":
        pts, w = radial_space_rule(n, scale)
    else:
        raise ValueError(f"unknown domain {domain!r}")
    return _apply_rule(f, pts, w)


def _pack(value, se, err, method, budget, seed):
    value = np.asarray(value, dtype=float)
    if value.ndim == 0:
        return QuadratureResult(float(value), float(se), method, int(budget), seed, float(err))
    return [QuadratureResult(float(v), float(s), method, int(budget), seed, float(e))
            for v, s, e in zip(value, np.broadcast_to(se, value.shape), np.broadcast_to(err, value.shape))]


# ---------------------------------------------------------------------------
# Radial kernels of the Gaussian Coulomb convolution

_SQRT_PI = math.sqrt(math.pi)
_SERIES_CUT = 1.5
_NTERMS = 40


def _series_coeffs() -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(_NTERMS)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    fact = np.array([math.factorial(int(k)) for k in n], dtype=float)
    a = sign / (fact * (2 * n + 1))
    b = sign / fact
    return a, b


_A_COEF, _B_COEF = _series_coeffs()
# q(s) = (2/sqrt(pi)) sum_{n>=1} (a_n - b_n) s^(2n-2)
_Q_COEF = (2.0 / _SQRT_PI) * (_A_COEF - _B_COEF)[1:]
# q'(s)/s = (2/sqrt(pi)) sum_{n>=2} (a_n - b_n) (2n-2) s^(2n-4)
_P_COEF = (2.0 / _SQRT_PI) * ((_A_COEF - _B_COEF) * (2 * np.arange(_NTERMS) - 2))[2:]


def _even_series(coef: np.ndarray, s: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(s * s, coef)


def erf_over_r(s) -> np.ndarray:
    """erf(s)/s, finite at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = s < _SERIES_CUT
    out[small] = _even_series((2.0 / _SQRT_PI) * _A_COEF, s[small])
    big = ~small
    out[big] = erf(s[big]) / s[big]
    return out


def dipole_kernel(s) -> np.ndarray:
    """q(s) = (erf(s)/s - 2 exp(-s^2)/sqrt(pi)) / s^2 = -(d/ds)(erf(s)/s) / s."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = s < _SERIES_CUT
    out[small] = _even_series(_Q_COEF, s[small])
    sb = s[~small]
    out[~small] = (erf(sb) / sb - 2.0 * np.exp(-sb * sb) / _SQRT_PI) / sb**2
    return out


def _quadrupole_kernel(s) -> np.ndarray:
    """P(s) = q'(s) / s."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = s < _SERIES_CUT
    out[small] = _even_series(_P_COEF, s[small])
    sb = s[~small]
    e = np.exp(-sb * sb) / _SQRT_PI
    out[~small] = -3.0 * erf(sb) / sb**5 + 6.0 * e / sb**4 + 4.0 * e / sb**2
    return out


def gaussian_coulomb_potential(r, width: float = 1.0) -> np.ndarray:
    """Closed form of int exp(-|y|^2/width^2) / |x - y| d^3y at |x| = r."""
    r = np.asarray(r, dtype=float)
    return math.pi**1.5 * width**2 * erf_over_r(r / width)


def gaussian_moment_convolution(beta: Sequence[int], x, b: float = 1.0) -> np.ndarray:
    """int y^beta exp(-b |y|^2) / |x - y| d^3y for a monomial of degree <= 2."""
    beta = tuple(int(v) for v in beta)
    pts = np.asarray(x, dtype=float).reshape(-1, 3)
    r = np.linalg.norm(pts, axis=1)
    s = math.sqrt(b) * r
    deg = sum(beta)
    pi32 = math.pi**1.5
    if deg == 0:
        return (pi32 / b) * erf_over_r(s)
    if deg == 1:
        j = beta.index(1)
        return pi32 / (2.0 * b) * dipole_kernel(s) * pts[:, j]
    if deg == 2:
        idx = [i for i, k in enumerate(beta) for _ in range(k)]
        j, k = idx
        delta = 1.0 if j == k else 0.0
        hess = -pi32 * (dipole_kernel(s) * delta + b * _quadrupole_kernel(s) * pts[:, j] * pts[:, k])
        return hess / (4.0 * b * b) + delta / (2.0 * b) * (pi32 / b) * erf_over_r(s)
    raise ValueError("closed-form convolution only implemented up to degree 2")


# ---------------------------------------------------------------------------
# Shell-theorem reductions for general radial profiles

_GL_N = 96
_TAIL_SPAN = 14.0


def _radial_integral(fun, lo: np.ndarray, hi: np.ndarray, n: int = _GL_N) -> np.ndarray:
    xg, wg = _legendre(n)
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    s = mid[:, None] + half[:, None] * xg[None, :]
    return half * np.sum(wg[None, :] * fun(s), axis=1)


def _shell_parts(profile, r, scale, inner_power, outer_power):
    r = np.asarray(r, dtype=float)
    inner = _radial_integral(lambda s: profile(s) * s**inner_power, np.zeros_like(r), r)
    # split the tail so Gauss-Legendre sees the Gaussian envelope in two pieces
    cut = r + 3.0 * scale
    tail = (_radial_integral(lambda s: profile(s) * s**outer_power, r, cut)
            + _radial_integral(lambda s: profile(s) * s**outer_power, cut, r + _TAIL_SPAN * scale))
    return inner, tail


def coulomb_convolution(profile: Callable[[np.ndarray], np.ndarray], x, scale: float = 1.0) -> np.ndarray:
    """int g(|y|) / |x - y| d^3y by the shell theorem.

    ``profile`` is the radial function g (vectorized) with Gaussian-like
    decay on the length ``scale``.
    """
    pts = np.asarray(x, dtype=float).reshape(-1, 3)
    r = np.linalg.norm(pts, axis=1)
    inner, tail = _shell_parts(profile, r, scale, 2, 1)
    out = np.empty_like(r)
    nz = r > 0
    out[nz] = 4.0 * math.pi * (inner[nz] / r[nz] + tail[nz])
    out[~nz] = 4.0 * math.pi * tail[~nz]
    return out


def dipole_shell_convolution(profile: Callable[[np.ndarray], np.ndarray], r, scale: float = 1.0) -> np.ndarray:
    """Radial factor G(r) with int g(|y|) y / |x - y| d^3y = G(|x|) x.

    From the l = 1 term of the multipole expansion:
    G(r) = (4 pi / 3) [ r^-3 int_0^r g s^4 ds + int_r^inf g s ds ].
    """
    r = np.asarray(r, dtype=float)
    inner, tail = _shell_parts(profile, r, scale, 4, 1)
    out = np.empty_like(r)
    nz = r > 1e-8 * scale
    out[nz] = (4.0 * math.pi / 3.0) * (inner[nz] / r[nz] ** 3 + tail[nz])
    # r -> 0: inner / r^3 -> g(0) r^2 / 5 -> 0
    out[~nz] = (4.0 * math.pi / 3.0) * tail[~nz]
    return out


# ---------------------------------------------------------------------------
# 6D Coulomb pair integrals

Monomial = tuple[int, int, int]


@dataclass(frozen=True)
class CoulombPairIntegrand:
    """int int exp(-a|x|^2) exp(-b|y|^2) K(x, y) / |x - y| d^3x d^3y, times ``prefactor``.

    ``terms`` lists ``(coefficient, alpha, beta)`` so that
    ``K = sum c x^alpha y^beta`` with multi-indices alpha, beta.
    """

    terms: tuple[tuple[float, Monomial, Monomial], ...]
    a: float = 1.0
    b: float = 1.0
    prefactor: float = 1.0
    name: str = ""

    def __post_init__(self) -> None:
        clean = []
        for c, al, be in self.terms:
            al, be = tuple(int(v) for v in al), tuple(int(v) for v in be)
            if len(al) != 3 or len(be) != 3 or min(al + be) < 0:
                raise ValueError("monomial exponents must be three non-negative integers")
            if sum(al) + sum(be) > MAX_KERNEL_DEGREE:
                raise ValueError(f"kernel degree {sum(al) + sum(be)} exceeds {MAX_KERNEL_DEGREE}")
            clean.append((float(c), al, be))
        object.__setattr__(self, "terms", tuple(clean))
        if self.a <= 0 or self.b <= 0:
            raise ValueError("Gaussian exponents must be positive")

    @property
    def is_zero(self) -> bool:
        return self.prefactor == 0 or all(c == 0 for c, _, _ in self.terms)

    def kernel(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        for c, al, be in self.terms:
            mono = np.ones(x.shape[0])
            for i in range(3):
                if al[i]:
                    mono = mono * x[:, i] ** al[i]
                if be[i]:
                    mono = mono * y[:, i] ** be[i]
            out += c * mono
        return out


def c_e_integrand() -> CoulombPairIntegrand:
    """Electrostatic self-energy constant: U_E = C_E e^2 / d."""
    return CoulombPairIntegrand(((1.0, (0, 0, 0), (0, 0, 0)),), prefactor=0.5 / math.pi**3, name="C_E")


def _perp_dot_terms():
    return ((1.0, (1, 0, 0), (1, 0, 0)), (1.0, (0, 1, 0), (0, 1, 0)))


def c_i_integrand() -> CoulombPairIntegrand:
    """Moment-correction constant: |m_1| = C_I e^3 hbar / (2 m^2 c^3 d)."""
    return CoulombPairIntegrand(_perp_dot_terms(), prefactor=1.0 / math.pi**3, name="C_I")


def c_b_integrand() -> CoulombPairIntegrand:
    """Magnetostatic self-energy constant: U_B = C_B e^2 hbar^2 / (m^2 c^2 d^3)."""
    return CoulombPairIntegrand(_perp_dot_terms(), prefactor=0.25 / math.pi**3, name="C_B")


def integrate_6d_coulomb(integrand: CoulombPairIntegrand, method="det", budget: int | None = None,
                         seed: int = DEFAULT_SEED, stratified: bool = True,
                         chunk: int = MC_CHUNK) -> QuadratureResult:
    method = Method.parse(method)
    if budget is None:
        budget = DEFAULT_DET_BUDGET if method is Method.DETERMINISTIC else DEFAULT_MC_BUDGET
    if budget <= 0:
        raise ValueError("quadrature budget must be positive")
    if integrand.is_zero:
        return QuadratureResult(0.0, 0.0, method, int(budget), seed if method is Method.MONTE_CARLO else None)
    if method is Method.DETERMINISTIC:
        n = _per_axis(budget)
        fine = _coulomb_det(integrand, n)
        coarse = _coulomb_det(integrand, max(4, (3 * n) // 4))
        return QuadratureResult(fine, 0.0, method, n**3, None, abs(fine - coarse))
    return _coulomb_mc(integrand, budget, seed, stratified, chunk)


def _coulomb_det(itg: CoulombPairIntegrand, n: int) -> float:
    total = 0.0
    for c, al, be in itg.terms:
        a, b = itg.a, itg.b
        if sum(be) > 2:
            al, be, a, b = be, al, b, a
        pts, w = gauss_hermite_rule(n, 1.0 / math.sqrt(a), absorb_weight=False)
        w = w  # weights for exp(-a|x|^2)
        mono = np.ones(len(w))
        for i in range(3):
            if al[i]:
                mono = mono * pts[:, i] ** al[i]
        total += c * float(np.dot(w, mono * gaussian_moment_convolution(be, pts, b)))
    return itg.prefactor * total


def _stratified_normals(rng: np.random.Generator, n: int, dims: int) -> np.ndarray:
    """Latin-hypercube draws mapped through the normal quantile."""
    out = np.empty((n, dims))
    for k in range(dims):
        u = (rng.permutation(n) + rng.random(n)) / n
        out[:, k] = ndtri(u)
    return out


def _coulomb_mc(itg: CoulombPairIntegrand, budget: int, seed: int, stratified: bool, chunk: int) -> QuadratureResult:
    sx, sy = 1.0 / math.sqrt(2.0 * itg.a), 1.0 / math.sqrt(2.0 * itg.b)
    norm = (math.pi / itg.a) ** 1.5 * (math.pi / itg.b) ** 1.5 * itg.prefactor
    sizes = [chunk] * (budget // chunk) + ([budget % chunk] if budget % chunk else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    count, mean, m2 = 0, 0.0, 0.0
    for size, child in zip(sizes, children):
        rng = np.random.Generator(np.random.PCG64(child))
        z = _stratified_normals(rng, size, 6) if stratified else rng.normal(size=(size, 6))
        x, y = z[:, :3] * sx, z[:, 3:] * sy
        dist = np.linalg.norm(x - y, axis=1)
        bad = dist < COINCIDENT_TOL
        while bad.any():
            k = int(bad.sum())
            x[bad] = rng.normal(size=(k, 3)) * sx
            y[bad] = rng.normal(size=(k, 3)) * sy
            dist[bad] = np.linalg.norm(x[bad] - y[bad], axis=1)
            bad = dist < COINCIDENT_TOL
        vals = itg.kernel(x, y) / dist
        c_mean = float(vals.mean())
        c_m2 = float(((vals - c_mean) ** 2).sum())
        # Chan et al. pairwise combination, always in chunk order
        tot = count + size
        delta = c_mean - mean
        mean = mean + delta * size / tot
        m2 = m2 + c_m2 + delta * delta * count * size / tot
        count = tot
    var = m2 / (count - 1) if count > 1 else 0.0
    se = math.sqrt(var / count) * abs(norm)
    return QuadratureResult(mean * norm, se, Method.MONTE_CARLO, count, seed, se)
