"""Gamma matrices in the Dirac representation and analytic Dirac states.

States are evaluated on arrays of points of shape (N, 3) in cm. Each state
exposes its spinor, its spatial gradient and its time derivative in closed
form, which is all the densities and the Gordon terms need.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import VectorField3, as_points
from .scales import CODATA_CGS, PhysicalScales

__all__ = [
    "GammaAlgebra",
    "GAMMA",
    "GaussianPacket",
    "PlaneWave",
    "make_gaussian_packet",
    "make_plane_wave",
    "spinor_for_direction",
    "charge_density",
    "probability_density",
    "current_density",
    "dirac_energy_density",
    "dirac_residual",
    "EnergyDensity",
    "SpinorState",
    "upper_block",
    "lower_block",
]


class GammaAlgebra:
    """Dirac-representation gamma matrices, metric (+, -, -, -)."""

    def __init__(self) -> None:
        i2 = np.eye(2, dtype=complex)
        z2 = np.zeros((2, 2), dtype=complex)
        self.pauli = np.array([
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ], dtype=complex)
        self.gamma0 = np.block([[i2, z2], [z2, -i2]])
        self.gamma = np.array([np.block([[z2, s], [-s, z2]]) for s in self.pauli])
        self.sigma = np.array([np.block([[s, z2], [z2, s]]) for s in self.pauli])
        self.alpha = np.array([self.gamma0 @ g for g in self.gamma])  # gamma^0 gamma^i
        self.metric = np.diag([1.0, -1.0, -1.0, -1.0])
        for a in (self.pauli, self.gamma0, self.gamma, self.sigma, self.alpha):
            a.setflags(write=False)

    def gamma_mu(self, mu: int) -> np.ndarray:
        return self.gamma0 if mu == 0 else self.gamma[mu - 1]

    def pauli_dot(self, v) -> np.ndarray:
        """sigma_p . v for a real 3-vector ``v``."""
        return np.tensordot(np.asarray(v, dtype=complex), self.pauli, axes=1)


GAMMA = GammaAlgebra()


def spinor_for_direction(direction) -> np.ndarray:
    """Two-spinor whose spin expectation points along ``direction``."""
    n = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(n)
    if not np.isfinite(norm) or abs(norm - 1.0) > 1e-9:
        raise ValueError(f"spin direction must be a unit vector, got {direction!r}")
    theta = math.atan2(math.hypot(n[0], n[1]), n[2])
    phi = math.atan2(n[1], n[0])
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex)


@dataclass(frozen=True)
class GaussianPacket:
    """Frozen Gaussian packet with only upper components (unless ``nr_lower``).

    Upper block is ``(pi d^2)^(-3/4) exp(-|x|^2 / 2 d^2) xi`` with ``xi`` the
    two-spinor polarized along ``spin_dir``. With ``nr_lower=True`` the lower
    block is filled in from the non-relativistic relation
    ``chi_l = -(i hbar / 2 m c) sigma . grad chi_u`` (upper block left
    normalized, so the total norm exceeds one at order (hbar / m c d)^2).
    """

    d: float
    spin_dir: tuple[float, float, float] = (0.0, 0.0, 1.0)
    scales: PhysicalScales = field(default=CODATA_CGS, compare=False)
    nr_lower: bool = False

    def __post_init__(self) -> None:
        if not (self.d > 0 and math.isfinite(self.d)):
            raise ValueError(f"packet width must be positive, got {self.d!r}")
        object.__setattr__(self, "spin_dir", tuple(float(v) for v in self.spin_dir))
        object.__setattr__(self, "_xi", spinor_for_direction(self.spin_dir))

    @property
    def xi(self) -> np.ndarray:
        return self._xi  # type: ignore[attr-defined]

    @property
    def amplitude(self) -> float:
        """Value of the upper envelope at the origin."""
        return (1.0 / (math.pi * self.d**2)) ** 0.75

    def envelope(self, x) -> np.ndarray:
        pts = as_points(x)
        r2 = np.einsum("ij,ij->i", pts, pts)
        return self.amplitude * np.exp(-r2 / (2.0 * self.d**2))

    def density_profile(self, r: np.ndarray) -> np.ndarray:
        """psi^dagger psi of the upper block as a function of radius."""
        return self.amplitude**2 * np.exp(-np.asarray(r) ** 2 / self.d**2)

    def _lower_coeff(self) -> complex:
        s = self.scales
        return 1j * s.hbar / (2.0 * s.m * s.c * self.d**2)

    def psi(self, x, t: float = 0.0) -> np.ndarray:
        pts = as_points(x)
        f = self.envelope(pts)
        out = np.zeros((pts.shape[0], 4), dtype=complex)
        out[:, :2] = f[:, None] * self.xi
        if self.nr_lower:
            sx = np.einsum("nk,kab->nab", pts.astype(complex), GAMMA.pauli)
            out[:, 2:] = self._lower_coeff() * f[:, None] * (sx @ self.xi)
        return out

    def grad_psi(self, x, t: float = 0.0) -> np.ndarray:
        """d psi / d x_k, shape (N, 3, 4)."""
        pts = as_points(x)
        f = self.envelope(pts)
        out = np.zeros((pts.shape[0], 3, 4), dtype=complex)
        out[:, :, :2] = (-pts / self.d**2 * f[:, None])[:, :, None] * self.xi
        if self.nr_lower:
            sx = np.einsum("nk,kab->nab", pts.astype(complex), GAMMA.pauli) @ self.xi  # (N, 2)
            sj = np.einsum("kab,b->ka", GAMMA.pauli, self.xi)  # (3, 2)
            term = -(pts / self.d**2)[:, :, None] * sx[:, None, :] + sj[None, :, :]
            out[:, :, 2:] = self._lower_coeff() * f[:, None, None] * term
        return out

    def dpsi_dt(self, x, t: float = 0.0) -> np.ndarray:
        # frozen in time by assumption
        return np.zeros((as_points(x).shape[0], 4), dtype=complex)


@dataclass(frozen=True)
class PlaneWave:
    """Positive-energy plane wave, exact in a constant background potential.

    ``psi = u exp(i (p.x - E t) / hbar)`` with ``u^dagger u = 1``. The spinor
    is built from the kinetic momentum ``p + (e/c) A_background`` so the state
    solves the Dirac equation with that constant vector potential.
    """

    p: tuple[float, float, float]
    spin: str | tuple = "up"
    scales: PhysicalScales = field(default=CODATA_CGS, compare=False)
    A_background: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise ValueError("momentum must be a finite 3-vector")
        object.__setattr__(self, "p", tuple(p))
        object.__setattr__(self, "A_background", tuple(float(v) for v in self.A_background))
        if isinstance(self.spin, str):
            if self.spin not in ("up", "down"):
                raise ValueError("spin label must be 'up' or 'down'")
            xi = np.array([1, 0] if self.spin == "up" else [0, 1], dtype=complex)
        else:
            xi = np.asarray(self.spin, dtype=complex)
            xi = xi / np.linalg.norm(xi)
        s = self.scales
        pk = self.kinetic_momentum
        energy = math.sqrt(float(pk @ pk) * s.c**2 + (s.m * s.c**2) ** 2)
        mc2 = s.m * s.c**2
        lower = s.c * (GAMMA.pauli_dot(pk) @ xi) / (energy + mc2)
        u = math.sqrt((energy + mc2) / (2.0 * energy)) * np.concatenate([xi, lower])
        object.__setattr__(self, "energy", energy)
        object.__setattr__(self, "u", u)

    @property
    def kinetic_momentum(self) -> np.ndarray:
        s = self.scales
        return np.asarray(self.p) + (s.e / s.c) * np.asarray(self.A_background)

    def _phase(self, pts: np.ndarray, t: float) -> np.ndarray:
        hbar = self.scales.hbar
        return np.exp(1j * (pts @ np.asarray(self.p) - self.energy * t) / hbar)  # type: ignore[attr-defined]

    def psi(self, x, t: float = 0.0) -> np.ndarray:
        pts = as_points(x)
        return self._phase(pts, t)[:, None] * self.u  # type: ignore[attr-defined]

    def grad_psi(self, x, t: float = 0.0) -> np.ndarray:
        k = 1j * np.asarray(self.p) / self.scales.hbar
        return k[None, :, None] * self.psi(x, t)[:, None, :]

    def dpsi_dt(self, x, t: float = 0.0) -> np.ndarray:
        return (-1j * self.energy / self.scales.hbar) * self.psi(x, t)  # type: ignore[attr-defined]


def make_gaussian_packet(d: float, spin_dir=(0.0, 0.0, 1.0), scales: PhysicalScales = CODATA_CGS,
                         nr_lower: bool = False) -> GaussianPacket:
    return GaussianPacket(d=d, spin_dir=tuple(spin_dir), scales=scales, nr_lower=nr_lower)


def make_plane_wave(p, spin="up", scales: PhysicalScales = CODATA_CGS, A_background=(0.0, 0.0, 0.0)) -> PlaneWave:
    return PlaneWave(p=tuple(p), spin=spin, scales=scales, A_background=tuple(A_background))


SpinorState = GaussianPacket | PlaneWave


def upper_block(state: SpinorState, x, t: float = 0.0) -> np.ndarray:
    """chi_u, the first two components of psi, shape (N, 2)."""
    return state.psi(x, t)[:, :2]


def lower_block(state: SpinorState, x, t: float = 0.0) -> np.ndarray:
    """chi_l, the last two components of psi, shape (N, 2)."""
    return state.psi(x, t)[:, 2:]


def _bilinear(psi: np.ndarray, matrix: np.ndarray, chi: np.ndarray | None = None) -> np.ndarray:
    """psi^dagger M chi per point; ``matrix`` may be a stack (K, 4, 4)."""
    chi = psi if chi is None else chi
    if matrix.ndim == 2:
        return np.einsum("na,ab,nb->n", psi.conj(), matrix, chi)
    return np.einsum("na,kab,nb->nk", psi.conj(), matrix, chi)


def probability_density(state, x, t: float = 0.0) -> np.ndarray:
    psi = state.psi(x, t)
    return np.einsum("na,na->n", psi.conj(), psi).real


def charge_density(state, x, t: float = 0.0) -> np.ndarray:
    """rho = -e psi^dagger psi (statC / cm^3)."""
    return -state.scales.e * probability_density(state, x, t)


def current_density(state, x, t: float = 0.0) -> np.ndarray:
    """J = -e c psi^dagger gamma^0 gamma psi, shape (N, 3)."""
    s = state.scales
    return -s.e * s.c * _bilinear(state.psi(x, t), GAMMA.alpha).real


def current_field(state) -> VectorField3:
    return VectorField3(lambda p: current_density(state, p), scale=getattr(state, "d", None), name="J")


@dataclass(frozen=True)
class EnergyDensity:
    total: np.ndarray
    term_a: np.ndarray  # mass term
    term_b: np.ndarray  # gradient (kinetic) term
    term_c: np.ndarray  # vector-potential coupling


def dirac_energy_density(state, x, A: VectorField3 | None = None, t: float = 0.0) -> EnergyDensity:
    s = state.scales
    pts = as_points(x)
    psi = state.psi(pts, t)
    grad = state.grad_psi(pts, t)
    term_a = s.m * s.c**2 * _bilinear(psi, GAMMA.gamma0).real
    # psi^dagger alpha_k d_k psi; term (b) is hbar c times its imaginary part
    x_k = np.einsum("na,kab,nkb->n", psi.conj(), GAMMA.alpha, grad)
    term_b = s.hbar * s.c * x_k.imag
    if A is None:
        term_c = np.zeros(pts.shape[0])
    else:
        term_c = s.e * np.einsum("nk,nk->n", _bilinear(psi, GAMMA.alpha).real, A(pts))
    return EnergyDensity(term_a + term_b + term_c, term_a, term_b, term_c)


def dirac_residual(state, x, t: float = 0.0, A=None, phi: float = 0.0) -> np.ndarray:
    """Pointwise residual of the Dirac equation for a constant potential ``A``."""
    s = state.scales
    pts = as_points(x)
    psi = state.psi(pts, t)
    lhs = 1j * s.hbar * state.dpsi_dt(pts, t)
    grad = state.grad_psi(pts, t)
    rhs = -1j * s.hbar * s.c * np.einsum("kab,nkb->na", GAMMA.alpha, grad)
    rhs = rhs + s.m * s.c**2 * psi @ GAMMA.gamma0.T
    if A is not None:
        rhs = rhs + s.e * np.einsum("kab,k,nb->na", GAMMA.alpha, np.asarray(A, dtype=float), psi)
    rhs = rhs - s.e * phi * psi
    return lhs - rhs
