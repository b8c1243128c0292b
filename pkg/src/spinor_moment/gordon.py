"""Gordon decomposition of the Dirac current and the magnetization density."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dirac import GAMMA, GaussianPacket, current_density
from .fields import AzimuthalField, VectorField3, as_points

__all__ = [
    "GordonTerms",
    "spin_density",
    "magnetization_density",
    "magnetization_current",
    "magnetization_current_field",
    "polarization_current",
    "convection_current",
    "a_coupling_current",
    "gordon_terms",
    "gordon_residual",
    "field_slice",
    "write_slice_csv",
]

_G0_SIGMA = np.array([GAMMA.gamma0 @ s for s in GAMMA.sigma])


def _eval_A(A, pts: np.ndarray) -> np.ndarray:
    if A is None:
        return np.zeros_like(pts)
    if callable(A):
        return A(pts)
    return np.broadcast_to(np.asarray(A, dtype=float), pts.shape)


def spin_density(state, x) -> np.ndarray:
    """psi^dagger gamma^0 sigma psi, shape (N, 3)."""
    psi = state.psi(x)
    return np.einsum("na,kab,nb->nk", psi.conj(), _G0_SIGMA, psi).real


def magnetization_density(state, x) -> np.ndarray:
    """M = -(e hbar / 2 m c) psi^dagger gamma^0 sigma psi."""
    s = state.scales
    return -(s.e * s.hbar / (2.0 * s.m * s.c)) * spin_density(state, x)


def _curl_spin_density(state, pts: np.ndarray) -> np.ndarray:
    psi = state.psi(pts)
    grad = state.grad_psi(pts)
    # jac[n, i, k] = d_k (psi^dagger gamma^0 sigma_i psi); gamma^0 sigma_i is Hermitian
    jac = 2.0 * np.einsum("na,iab,nkb->nik", psi.conj(), _G0_SIGMA, grad).real
    return np.stack([jac[:, 2, 1] - jac[:, 1, 2], jac[:, 0, 2] - jac[:, 2, 0], jac[:, 1, 0] - jac[:, 0, 1]], axis=1)


def magnetization_current(state, x) -> np.ndarray:
    """J_M = -(e hbar / 2 m) curl(psi^dagger gamma^0 sigma psi), from analytic gradients."""
    s = state.scales
    return -(s.e * s.hbar / (2.0 * s.m)) * _curl_spin_density(state, as_points(x))


def magnetization_current_field(state) -> VectorField3:
    """J_M as a field; azimuthal closed form for upper-only Gaussian packets."""
    if isinstance(state, GaussianPacket) and not state.nr_lower:
        s = state.scales
        k = s.e * s.hbar / (s.m * state.d**2)
        prof = state.density_profile
        return AzimuthalField(lambda r: k * prof(r), state.spin_dir, scale=state.d, name="J_M",
                              gaussian=(k * state.amplitude**2, state.d))
    return VectorField3(lambda p: magnetization_current(state, p), scale=getattr(state, "d", None), name="J_M")


def polarization_current(state, x) -> np.ndarray:
    """(i e hbar / 2 m c) d/dt (psi^dagger gamma psi)."""
    s = state.scales
    pts = as_points(x)
    psi = state.psi(pts)
    dt = state.dpsi_dt(pts)
    # gamma^i is anti-Hermitian, so d/dt(psi^dag gamma psi) = 2 i Im(psi^dag gamma d_t psi)
    xk = np.einsum("na,kab,nb->nk", psi.conj(), GAMMA.gamma, dt)
    return -(s.e * s.hbar / (s.m * s.c)) * xk.imag


def convection_current(state, x) -> np.ndarray:
    """(i e hbar / 2 m) [psi^dag gamma^0 grad psi - (grad psi^dag) gamma^0 psi]."""
    s = state.scales
    pts = as_points(x)
    psi = state.psi(pts)
    grad = state.grad_psi(pts)
    xk = np.einsum("na,ab,nkb->nk", psi.conj(), GAMMA.gamma0, grad)
    return -(s.e * s.hbar / s.m) * xk.imag


def a_coupling_current(state, A, x) -> np.ndarray:
    """-(e^2 / m c) psi^dagger gamma^0 psi A(x)."""
    s = state.scales
    pts = as_points(x)
    psi = state.psi(pts)
    scalar = np.einsum("na,ab,nb->n", psi.conj(), GAMMA.gamma0, psi).real
    return -(s.e**2 / (s.m * s.c)) * scalar[:, None] * _eval_A(A, pts)


@dataclass(frozen=True)
class GordonTerms:
    polarization: np.ndarray
    convection: np.ndarray
    magnetization: np.ndarray
    a_coupling: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.polarization + self.convection + self.magnetization + self.a_coupling


def gordon_terms(state, A, x) -> GordonTerms:
    pts = as_points(x)
    return GordonTerms(
        polarization_current(state, pts),
        convection_current(state, pts),
        magnetization_current(state, pts),
        a_coupling_current(state, A, pts),
    )


def gordon_residual(state, A, x) -> np.ndarray:
    """|sum of Gordon terms - J| / |J| per point (|J| floored at tiny)."""
    pts = as_points(x)
    j = current_density(state, pts)
    diff = np.linalg.norm(gordon_terms(state, A, pts).total - j, axis=1)
    return diff / np.maximum(np.linalg.norm(j, axis=1), np.finfo(float).tiny)


def field_slice(field: VectorField3, extent: float, grid_n: int, z: float = 0.0) -> np.ndarray:
    """Sample ``field`` on a grid_n x grid_n grid over [-extent, extent]^2 at height z.

    Returns rows ``(x, y, z, Fx, Fy, Fz)``.
    """
    if grid_n < 8:
        raise ValueError("grid_n must be at least 8")
    axis = np.linspace(-extent, extent, grid_n)
    X, Y = np.meshgrid(axis, axis, indexing="xy")
    pts = np.stack([X.ravel(), Y.ravel(), np.full(X.size, float(z))], axis=1)
    return np.hstack([pts, field(pts)])


SLICE_HEADER = ("x", "y", "z", "Jx", "Jy", "Jz")


def write_slice_csv(rows: np.ndarray, out=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SLICE_HEADER)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return text
