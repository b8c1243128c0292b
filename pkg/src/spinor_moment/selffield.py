"""Electromagnetic self-field of a frozen packet.

Static approximation throughout: the charge and current densities are held
fixed, the vector potential is the instantaneous magnetostatic convolution of
the current, and the self-energies are the electrostatic and magnetostatic
pair integrals. The Coulomb potential of the packet enters only the mass
budget, never the corrected current.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .dirac import GaussianPacket, probability_density
from .fields import AzimuthalField, VectorField3, as_points, curl
from .gordon import a_coupling_current, magnetization_current_field
from .quadrature import (
    QuadratureResult,
    _legendre,
    c_e_integrand,
    dipole_kernel,
    dipole_shell_convolution,
    integrate_3d,
    integrate_6d_coulomb,
    radial_space_rule,
)

__all__ = [
    "NonRelativisticWarning",
    "STATIC_APPROXIMATION",
    "SelfEnergy",
    "SelfFieldReport",
    "vector_potential_from_current",
    "vector_potential_field",
    "first_order_current_field",
    "first_order_current_correction",
    "iterate_current_correction",
    "electric_self_energy",
    "magnetic_self_energy",
    "electromagnetic_mass",
    "electric_field_energy",
    "magnetic_field_energy",
    "self_field_report",
    "check_width",
]

MAX_ITERATION_ORDER = 3
STATIC_APPROXIMATION = "static approximation"


class NonRelativisticWarning(UserWarning):
    """Packet width close to the Compton radius; NR assumptions degrade."""


def check_width(state) -> bool:
    """Warn when d < 2 Compton radii. Returns True if the warning fired."""
    d = getattr(state, "d", None)
    if d is None:
        return False
    lam = state.scales.compton_radius()
    if d < 2.0 * lam:
        warnings.warn(f"packet width d = {d / lam:.4g} Compton radii is below 2; "
                      "non-relativistic assumptions are weak here", NonRelativisticWarning, stacklevel=3)
        return True
    return False


def _require_packet(state) -> GaussianPacket:
    if not isinstance(state, GaussianPacket):
        raise TypeError("self-field integrals are implemented for Gaussian packets")
    return state


# ---------------------------------------------------------------------------
# Vector potential

def _azimuthal_potential_factor(J: AzimuthalField) -> Callable[[np.ndarray], np.ndarray]:
    """G(r) with int J(y) / |x - y| d^3y = G(|x|) (x cross axis)."""
    if J.gaussian is not None:
        k, w = J.gaussian
        return lambda r: k * math.pi**1.5 * w**2 / 2.0 * dipole_kernel(np.asarray(r) / w)
    return lambda r: dipole_shell_convolution(J.profile, r, J.scale)


def vector_potential_field(J: VectorField3, c: float, n_raw: int = 48) -> VectorField3:
    """A(x) = (1/c) int J(y) / |x - y| d^3y as a field."""
    if not J.decaying:
        raise ValueError("vector potential needs a decaying current density")
    if isinstance(J, AzimuthalField):
        G = _azimuthal_potential_factor(J)
        return AzimuthalField(lambda r: G(r) / c, J.axis, J.scale, name="A")
    return VectorField3(lambda p: _raw_vector_potential(J, p, c, n_raw), scale=J.scale or J.radius, name="A")


def vector_potential_from_current(J: VectorField3, x, c: float, method: str = "auto", n_raw: int = 48) -> np.ndarray:
    """Vector potential of ``J`` at points ``x``.

    ``method="auto"`` uses the shell-theorem reduction for azimuthal fields
    and the raw 3D quadrature otherwise; ``"raw"`` forces the latter.
    """
    if not J.decaying:
        raise ValueError("vector potential needs a decaying current density")
    if method == "raw" or not isinstance(J, AzimuthalField):
        return _raw_vector_potential(J, as_points(x), c, n_raw)
    return vector_potential_field(J, c)(x)


def _raw_vector_potential(J: VectorField3, pts: np.ndarray, c: float, n: int) -> np.ndarray:
    # spherical coordinates centred on each probe point: the 1/|x-y| cancels the rho^2 Jacobian
    pts = as_points(pts)
    scale = J.scale if J.scale is not None else J.radius
    xl, wl = _legendre(n)
    ct, wt = _legendre(n)
    nphi = 2 * n
    phi = 2.0 * np.pi * (np.arange(nphi) + 0.5) / nphi
    st = np.sqrt(1.0 - ct**2)
    dirs = np.stack([np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)),
                     np.outer(ct, np.ones(nphi))], axis=-1).reshape(-1, 3)
    wdir = np.outer(wt, np.full(nphi, 2.0 * np.pi / nphi)).reshape(-1)
    out = np.empty_like(pts)
    for i, x in enumerate(pts):
        rmax = np.linalg.norm(x) + 12.0 * scale
        edges = np.unique(np.clip([0.0, np.linalg.norm(x), rmax], 0.0, rmax))
        acc = np.zeros(3)
        for lo, hi in zip(edges[:-1], edges[1:]):
            rho = 0.5 * (hi - lo) * (xl + 1.0) + lo
            wr = 0.5 * (hi - lo) * wl * rho  # rho^2 / rho
            y = x[None, None, :] + rho[:, None, None] * dirs[None, :, :]
            vals = J(y.reshape(-1, 3)).reshape(len(rho), len(wdir), 3)
            acc += np.einsum("r,d,rdk->k", wr, wdir, vals)
        out[i] = acc / c
    return out


# ---------------------------------------------------------------------------
# Self-interaction currents

def first_order_current_field(state) -> VectorField3:
    """J_1 = -(e^2 / m c) psi^dagger gamma^0 psi A_1, with A_1 sourced by J_M only."""
    s = state.scales
    JM = magnetization_current_field(state)
    A1 = vector_potential_field(JM, s.c)
    if isinstance(state, GaussianPacket) and not state.nr_lower and isinstance(A1, AzimuthalField):
        k = -(s.e**2 / (s.m * s.c))
        prof, aprof = state.density_profile, A1.profile
        return AzimuthalField(lambda r: k * prof(r) * aprof(r), A1.axis, state.d, name="J_1")
    return VectorField3(lambda p: a_coupling_current(state, A1, p), scale=getattr(state, "d", None), name="J_1")


def first_order_current_correction(state, x) -> np.ndarray:
    return first_order_current_field(state)(x)


def _tabulated_profile(profile, scale: float, n: int = 600, span: float = 16.0):
    """Cubic-spline table of a radial profile; zero beyond the table."""
    r = scale * span * (np.linspace(0.0, 1.0, n) ** 2)
    spline = CubicSpline(r, profile(r))
    rmax = r[-1]

    def tab(rr):
        rr = np.asarray(rr, dtype=float)
        return np.where(rr <= rmax, spline(np.minimum(rr, rmax)), 0.0)

    return tab


def iterate_current_correction(state, order: int) -> list[AzimuthalField]:
    """Self-interaction currents J_1 .. J_order.

    J_{k+1} is the A-coupling current of the potential sourced by J_k.
    Orders above the first use tabulated radial profiles.
    """
    if order < 1:
        raise ValueError("iteration order must be at least 1")
    if order > MAX_ITERATION_ORDER:
        raise ValueError(f"iteration order {order} exceeds the cost guard of {MAX_ITERATION_ORDER}")
    packet = _require_packet(state)
    if packet.nr_lower:
        raise TypeError("iteration needs an upper-only packet (azimuthal currents)")
    s = packet.scales
    currents = [first_order_current_field(packet)]
    k = -(s.e**2 / (s.m * s.c))
    for _ in range(order - 1):
        prev = currents[-1]
        table = _tabulated_profile(prev.profile, packet.d)
        src = AzimuthalField(table, prev.axis, packet.d)
        G = _tabulated_profile(lambda r: dipole_shell_convolution(src.profile, r, packet.d), packet.d)
        prof = packet.density_profile
        currents.append(AzimuthalField(lambda r, G=G: k * prof(r) * G(r) / s.c, prev.axis, packet.d,
                                       name=f"J_{len(currents) + 1}"))
    return currents


# ---------------------------------------------------------------------------
# Self-energies

@dataclass(frozen=True)
class SelfEnergy:
    value: float  # erg
    constant: float  # dimensionless coefficient
    quadrature: QuadratureResult | None = None


def electric_self_energy(state, method="det", budget: int | None = None, seed: int | None = None) -> SelfEnergy:
    """(1/2) int int rho(x) rho(y) / |x - y| = C_E e^2 / d for the packet."""
    packet = _require_packet(state)
    kw = {} if seed is None else {"seed": seed}
    res = integrate_6d_coulomb(c_e_integrand(), method, budget, **kw)
    return SelfEnergy(res.value * packet.scales.e**2 / packet.d, res.value, res)


def magnetic_self_energy(state, budget: int | None = None) -> SelfEnergy:
    """(1/2c) int J_M . A_1 d^3x = C_B e^2 hbar^2 / (m^2 c^2 d^3)."""
    packet = _require_packet(state)
    s = packet.scales
    JM = magnetization_current_field(packet)
    A1 = vector_potential_field(JM, s.c)
    res = integrate_3d(lambda p: np.einsum("ij,ij->i", JM(p), A1(p)), "det", budget, scale=packet.d)
    value = res.value / (2.0 * s.c)
    unit = s.e**2 * s.hbar**2 / (s.m**2 * s.c**2 * packet.d**3)
    return SelfEnergy(value, value / unit, res.scaled(1.0 / (2.0 * s.c)))


def electromagnetic_mass(state, include_magnetic: bool = False, method="det", budget: int | None = None,
                         seed: int | None = None) -> float:
    """(U_E [+ U_B]) / c^2 in grams."""
    packet = _require_packet(state)
    c2 = packet.scales.c**2
    u = electric_self_energy(packet, method, budget, seed).value
    if include_magnetic:
        u += magnetic_self_energy(packet).value
    return u / c2


def electric_field_energy(state, n: int = 64) -> float:
    """(1/8 pi) int E^2 with E the gradient of the erf potential."""
    packet = _require_packet(state)
    e, d = packet.scales.e, packet.d
    pts, w = radial_space_rule(n, d)
    r = np.linalg.norm(pts, axis=1)
    s = r / d
    # phi = -(e/d) erf(s)/s, E_r = -d phi/dr = -(e/d^2) s q(s)
    er = -(e / d**2) * s * dipole_kernel(s)
    return float(np.dot(w, er**2)) / (8.0 * math.pi)


def magnetic_field_energy(state, n: int = 48) -> float:
    """(1/8 pi) int |curl A_1|^2, curl taken by finite differences."""
    packet = _require_packet(state)
    s = packet.scales
    A1 = vector_potential_field(magnetization_current_field(packet), s.c)
    pts, w = radial_space_rule(n, packet.d)
    B = curl(A1, pts, 1e-3 * packet.d)
    return float(np.dot(w, np.einsum("ij,ij->i", B, B))) / (8.0 * math.pi)


@dataclass(frozen=True)
class SelfFieldReport:
    d: float
    U_electric: float
    U_magnetic: float
    m_em: float
    C_E: float
    C_B: float
    include_magnetic: bool = False
    approximation: str = STATIC_APPROXIMATION
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "d_cm": self.d,
            "U_electric_erg": self.U_electric,
            "U_magnetic_erg": self.U_magnetic,
            "m_em_g": self.m_em,
            "C_E": self.C_E,
            "C_B": self.C_B,
            "include_magnetic": self.include_magnetic,
            "approximation": self.approximation,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def self_field_report(state, include_magnetic: bool = False, method="det", budget=None, seed=None) -> SelfFieldReport:
    packet = _require_packet(state)
    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        check_width(packet)
    notes.extend(str(w.message) for w in caught)
    ue = electric_self_energy(packet, method, budget, seed)
    ub = magnetic_self_energy(packet)
    m_em = (ue.value + (ub.value if include_magnetic else 0.0)) / packet.scales.c**2
    return SelfFieldReport(packet.d, ue.value, ub.value, m_em, ue.constant, ub.constant,
                           include_magnetic, warnings=tuple(notes))
