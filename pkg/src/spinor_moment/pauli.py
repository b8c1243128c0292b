"""Non-relativistic (Pauli) reduction and the A_ext . A_self cross term.

The cross-term moment is computed along a different route from the
current-density correction in :mod:`moments`: here the x-integral against
the probability density is collapsed first (a Cartesian-moment Coulomb
convolution), and the outer integral runs over the source current J_M(y).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dirac import GAMMA, spinor_for_direction
from .fields import VectorField3, as_points
from .quadrature import gauss_hermite_rule, gaussian_moment_convolution, integrate_3d
from .scales import CODATA_CGS, PhysicalScales

__all__ = [
    "PauliState",
    "PauliResidual",
    "PauliExpectation",
    "lower_from_upper",
    "pauli_hamiltonian_apply",
    "pauli_residual",
    "pauli_expectation",
    "sigma_B_expectation",
    "implied_moment",
    "nr_magnetization_current",
    "cross_term_moment",
    "equivalence_report",
]


@dataclass(frozen=True)
class PauliState:
    """Two-component upper spinor chi_u.

    ``family="gaussian"``: (pi d^2)^(-3/4) exp(-|x|^2/2d^2) xi, normalized.
    ``family="plane"``: xi exp(i p.x / hbar), unit density.
    """

    d: float | None = None
    spin_dir: tuple[float, float, float] = (0.0, 0.0, 1.0)
    scales: PhysicalScales = field(default=CODATA_CGS, compare=False)
    family: str = "gaussian"
    p: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.family not in ("gaussian", "plane"):
            raise ValueError("family must be 'gaussian' or 'plane'")
        if self.family == "gaussian" and not (self.d is not None and self.d > 0):
            raise ValueError("Gaussian Pauli state needs a positive width")
        object.__setattr__(self, "spin_dir", tuple(float(v) for v in self.spin_dir))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        object.__setattr__(self, "_xi", spinor_for_direction(self.spin_dir))

    @classmethod
    def from_packet(cls, packet) -> PauliState:
        return cls(d=packet.d, spin_dir=packet.spin_dir, scales=packet.scales)

    @property
    def xi(self) -> np.ndarray:
        return self._xi  # type: ignore[attr-defined]

    def _envelope(self, pts):
        if self.family == "plane":
            return np.exp(1j * pts @ np.asarray(self.p) / self.scales.hbar)
        r2 = np.einsum("ij,ij->i", pts, pts)
        return (1.0 / (math.pi * self.d**2)) ** 0.75 * np.exp(-r2 / (2.0 * self.d**2))

    def chi(self, x) -> np.ndarray:
        pts = as_points(x)
        return self._envelope(pts)[:, None] * self.xi

    def grad_chi(self, x) -> np.ndarray:
        """Shape (N, 3, 2)."""
        pts = as_points(x)
        f = self._envelope(pts)
        if self.family == "plane":
            g = (1j * np.asarray(self.p) / self.scales.hbar)[None, :] * f[:, None]
        else:
            g = -pts / self.d**2 * f[:, None]
        return g[:, :, None] * self.xi

    def laplacian_chi(self, x) -> np.ndarray:
        pts = as_points(x)
        f = self._envelope(pts)
        if self.family == "plane":
            lap = -float(np.dot(self.p, self.p)) / self.scales.hbar**2 * f
        else:
            r2 = np.einsum("ij,ij->i", pts, pts)
            lap = (r2 / self.d**4 - 3.0 / self.d**2) * f
        return lap[:, None] * self.xi

    def density(self, x) -> np.ndarray:
        c = self.chi(x)
        return np.einsum("na,na->n", c.conj(), c).real


def _uniform_A(B_ext, pts: np.ndarray) -> np.ndarray:
    """Symmetric-gauge potential (1/2) B x r of a uniform field (divergence free)."""
    return 0.5 * np.cross(np.broadcast_to(np.asarray(B_ext, dtype=float), pts.shape), pts)


def lower_from_upper(state: PauliState, x, A=None) -> np.ndarray:
    """chi_l = (-i hbar c sigma.grad + e sigma.A) chi_u / (2 m c^2)."""
    s = state.scales
    pts = as_points(x)
    grad = state.grad_chi(pts)
    out = -1j * s.hbar * s.c * np.einsum("kab,nkb->na", GAMMA.pauli, grad)
    if A is not None:
        Av = A(pts) if callable(A) else np.broadcast_to(np.asarray(A, dtype=float), pts.shape)
        out = out + s.e * np.einsum("nk,kab,nb->na", Av, GAMMA.pauli, state.chi(pts))
    return out / (2.0 * s.m * s.c**2)


@dataclass(frozen=True)
class PauliExpectation:
    kinetic: float
    orbital: float
    diamagnetic: float
    spin: float
    electric: float

    @property
    def total(self) -> float:
        return self.kinetic + self.orbital + self.diamagnetic + self.spin + self.electric


def _hamiltonian_parts(state: PauliState, pts: np.ndarray, B_ext, phi: float):
    s = state.scales
    chi = state.chi(pts)
    A = _uniform_A(B_ext, pts)
    grad = state.grad_chi(pts)
    kin = -(s.hbar**2 / (2.0 * s.m)) * state.laplacian_chi(pts)
    # Coulomb gauge: (p + eA/c)^2 = p^2 + 2 (e/c) A.p + (e/c)^2 A^2
    orb = -1j * s.hbar * s.e / (s.m * s.c) * np.einsum("nk,nka->na", A, grad)
    dia = (s.e**2 / (2.0 * s.m * s.c**2)) * np.einsum("nk,nk->n", A, A)[:, None] * chi
    mu_b = s.e * s.hbar / (2.0 * s.m * s.c)
    spin = mu_b * (GAMMA.pauli_dot(B_ext) @ chi.T).T
    elec = -s.e * phi * chi
    return chi, kin, orb, dia, spin, elec


def pauli_hamiltonian_apply(state: PauliState, x, B_ext=(0.0, 0.0, 0.0), phi: float = 0.0) -> np.ndarray:
    """H chi_u for a uniform external field B_ext and constant scalar potential."""
    _, *parts = _hamiltonian_parts(state, as_points(x), B_ext, phi)
    return sum(parts)


def _gaussian_rule(state: PauliState, n: int):
    # |chi|^2 carries exp(-r^2/d^2); integrands here are that times polynomials
    return gauss_hermite_rule(n, state.d)


def pauli_expectation(state: PauliState, B_ext=(0.0, 0.0, 0.0), phi: float = 0.0, n: int = 24) -> PauliExpectation:
    if state.family != "gaussian":
        raise ValueError("expectation values need a normalizable (Gaussian) state")
    pts, w = _gaussian_rule(state, n)
    chi, *parts = _hamiltonian_parts(state, pts, B_ext, phi)
    vals = [float(np.dot(w, np.einsum("na,na->n", chi.conj(), p).real)) for p in parts]
    return PauliExpectation(*vals)


@dataclass(frozen=True)
class PauliResidual:
    residual_norm: float
    h_norm: float
    energy: float

    @property
    def relative(self) -> float:
        return self.residual_norm / self.h_norm if self.h_norm else 0.0


def pauli_residual(state: PauliState, B_ext=(0.0, 0.0, 0.0), phi: float = 0.0, E_eff: float | None = None,
                   n: int = 32, probe=None) -> PauliResidual:
    """Norm of (H - E_eff) chi_u.

    Gaussian states use L^2 norms; plane waves (unit density) use the RMS of
    the pointwise residual over ``probe`` points. ``E_eff`` defaults to <H>.
    """
    if state.family == "gaussian":
        if E_eff is None:
            E_eff = pauli_expectation(state, B_ext, phi).total
        pts, w = _gaussian_rule(state, n)
        chi = state.chi(pts)
        h = pauli_hamiltonian_apply(state, pts, B_ext, phi)
        res = h - E_eff * chi
        rn = math.sqrt(max(float(np.dot(w, np.einsum("na,na->n", res.conj(), res).real)), 0.0))
        hn = math.sqrt(float(np.dot(w, np.einsum("na,na->n", h.conj(), h).real)))
        return PauliResidual(rn, hn, float(E_eff))
    if E_eff is None:
        E_eff = float(np.dot(state.p, state.p)) / (2.0 * state.scales.m)
    pts = as_points(probe) if probe is not None else np.random.default_rng(0).normal(size=(16, 3)) * 1e-10
    chi = state.chi(pts)
    h = pauli_hamiltonian_apply(state, pts, B_ext, phi)
    res = h - E_eff * chi
    rms = lambda a: math.sqrt(float(np.mean(np.einsum("na,na->n", a.conj(), a).real)))  # noqa: E731
    return PauliResidual(rms(res), rms(h), float(E_eff))


def _spin_vector(state: PauliState, n: int = 24) -> np.ndarray:
    """int chi^dagger sigma_p chi d^3x."""
    pts, w = _gaussian_rule(state, n)
    chi = state.chi(pts)
    dens = np.einsum("na,kab,nb->nk", chi.conj(), GAMMA.pauli, chi).real
    return w @ dens


def sigma_B_expectation(state: PauliState, B_ext) -> float:
    """<(e hbar / 2 m c) sigma_p . B_ext> for a uniform field, in erg."""
    s = state.scales
    return float(s.e * s.hbar / (2.0 * s.m * s.c) * _spin_vector(state) @ np.asarray(B_ext, dtype=float))


def implied_moment(state: PauliState) -> np.ndarray:
    """Moment read off from U = -m . B applied to the sigma . B coupling."""
    s = state.scales
    return -(s.e * s.hbar / (2.0 * s.m * s.c)) * _spin_vector(state)


def nr_magnetization_current(state: PauliState) -> VectorField3:
    """J_M = -(e hbar / 2 m) curl(chi^dagger sigma_p chi)."""
    s = state.scales

    def J(p: np.ndarray) -> np.ndarray:
        chi = state.chi(p)
        grad = state.grad_chi(p)
        jac = 2.0 * np.einsum("na,iab,nkb->nik", chi.conj(), GAMMA.pauli, grad).real
        cu = np.stack([jac[:, 2, 1] - jac[:, 1, 2], jac[:, 0, 2] - jac[:, 2, 0], jac[:, 1, 0] - jac[:, 0, 1]], axis=1)
        return -(s.e * s.hbar / (2.0 * s.m)) * cu

    return VectorField3(J, scale=state.d, name="J_M")


def cross_term_moment(state: PauliState, current: VectorField3 | None = None, budget: int | None = None) -> np.ndarray:
    """-(e^2 / 2 m c^3) int int |chi(x)|^2 x cross J(y) / |x - y| d^3x d^3y.

    ``current`` defaults to the magnetization current of ``state``.
    """
    if state.family != "gaussian":
        raise ValueError("cross term needs a normalizable (Gaussian) state")
    s = state.scales
    J = nr_magnetization_current(state) if current is None else current
    amp2 = (1.0 / (math.pi * state.d**2)) ** 1.5
    b = 1.0 / state.d**2

    def integrand(y: np.ndarray) -> np.ndarray:
        # W(y) = int |chi(x)|^2 x / |x - y| d^3x
        W = amp2 * np.stack([gaussian_moment_convolution(e, y, b) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))], axis=1)
        return np.cross(W, J(y))

    res = integrate_3d(integrand, "det", budget, scale=state.d)
    return -(s.e**2 / (2.0 * s.m * s.c**3)) * np.array([r.value for r in res])


def equivalence_report(packet, budget: int | None = None) -> dict:
    """Cross-term moment against the current-density correction for one packet."""
    from .moments import first_order_si_moment

    method1 = cross_term_moment(PauliState.from_packet(packet), budget=budget)
    method2 = first_order_si_moment(packet)
    rel = float(np.linalg.norm(method1 - method2) / np.linalg.norm(method2))
    lam = packet.scales.compton_radius()
    return {
        "d_over_compton": packet.d / lam,
        "cross_term_moment": list(map(float, method1)),
        "first_order_si_moment": list(map(float, method2)),
        "relative_difference": rel,
    }


def equivalence_json(packet) -> str:
    return json.dumps(equivalence_report(packet), indent=2, sort_keys=True)
