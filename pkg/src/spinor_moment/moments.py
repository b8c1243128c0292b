"""Magnetic moments from current densities and the state-dependent total."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dirac import GaussianPacket, make_gaussian_packet
from .fields import VectorField3
from .gordon import magnetization_current_field
from .quadrature import DEFAULT_SEED, Method, integrate_3d
from .scales import CODATA_CGS, PhysicalScales, bohr_magneton
from .selffield import (
    NonRelativisticWarning,
    electric_self_energy,
    electromagnetic_mass,
    first_order_current_field,
)

__all__ = [
    "Convention",
    "SphereSpec",
    "MomentBreakdown",
    "ConvergenceError",
    "BracketError",
    "TaylorValidityError",
    "PUBLISHED_C_E",
    "PUBLISHED_M1_COEFF",
    "sphere_current_field",
    "sphere_moment_closed_form",
    "magnetic_moment_from_current",
    "first_order_si_moment",
    "mass_renorm_moment_correction",
    "total_moment",
    "solve_matching_width",
    "sweep",
    "SWEEP_HEADER",
    "write_sweep_csv",
]

# Printed coefficients, both multiplying e^3 hbar / (2 m_e^2 c^3 d) in the total.
PUBLISHED_C_E = 0.403
PUBLISHED_M1_COEFF = 0.071
TAYLOR_LIMIT = 0.1
BISECTION_XTOL = 1e-4


class Convention(str, Enum):
    PUBLISHED = "paper"    # coefficients exactly as printed
    ORACLE = "oracle"  # coefficients from the integrals computed here

    @classmethod
    def parse(cls, value) -> Convention:
        if isinstance(value, Convention):
            return value
        v = str(value).lower()
        aliases = {"paper": cls.PUBLISHED, "paperaspublished": cls.PUBLISHED,
                   "oracle": cls.ORACLE, "oracleresolved": cls.ORACLE}
        if v not in aliases:
            raise ValueError(f"unknown convention {value!r}")
        return aliases[v]


class ConvergenceError(RuntimeError):
    """Quadrature did not settle within the allowed budget."""


class BracketError(ValueError):
    """Root-finding bracket does not contain a sign change."""


class TaylorValidityError(ValueError):
    """m_em / m_e too large for the first-order mass expansion."""


@dataclass(frozen=True)
class SphereSpec:
    Q: float
    R: float
    omega: float

    def __post_init__(self) -> None:
        if not self.R > 0:
            raise ValueError("sphere radius must be positive")
        if not math.isfinite(self.omega):
            raise ValueError("angular velocity must be finite")


def sphere_current_field(spec: SphereSpec) -> VectorField3:
    """Uniformly charged sphere spinning about z: J = rho omega z_hat x x inside R."""
    rho = spec.Q / (4.0 / 3.0 * math.pi * spec.R**3)

    def J(p: np.ndarray) -> np.ndarray:
        inside = np.einsum("ij,ij->i", p, p) <= spec.R**2
        return rho * spec.omega * np.cross([0.0, 0.0, 1.0], p) * inside[:, None]

    return VectorField3(J, radius=spec.R, name="J_sphere")


def sphere_moment_closed_form(spec: SphereSpec, c: float) -> np.ndarray:
    return np.array([0.0, 0.0, spec.Q * spec.omega * spec.R**2 / (5.0 * c)])


_MOMENT_ORDERS = (24, 32, 48, 64, 96)


def magnetic_moment_from_current(J: VectorField3, c: float = CODATA_CGS.c, method="det",
                                 budget: int | None = None, rtol: float = 1e-10,
                                 seed: int = DEFAULT_SEED) -> np.ndarray:
    """m = (1/2c) int x cross J d^3x.

    Deterministic runs refine the product rule until the value settles to
    ``rtol``; if the largest rule still disagrees with its coarser companion
    the integral is treated as divergent and :class:`ConvergenceError` raised.
    """
    if not J.decaying:
        raise ConvergenceError("current density has no decay scale; moment integral diverges")
    method = Method.parse(method)
    integrand = lambda p: np.cross(p, J(p))  # noqa: E731
    kw = dict(radius=J.radius) if J.radius is not None and J.scale is None else dict(scale=J.scale)
    if method is Method.MONTE_CARLO:
        res = integrate_3d(integrand, method, budget or 10**6, seed=seed, **kw)
        return np.array([r.value for r in res]) / (2.0 * c)
    orders = _MOMENT_ORDERS if budget is None else (int(round(budget ** (1 / 3))),)
    for n in orders:
        nodes = n**3 if "scale" in kw else 2 * n**3
        res = integrate_3d(integrand, method, nodes, **kw)
        value = np.array([r.value for r in res])
        err = max(r.error_estimate for r in res)
        if err <= rtol * max(np.linalg.norm(value), np.finfo(float).tiny) or err == 0.0:
            return value / (2.0 * c)
    if budget is not None:
        return value / (2.0 * c)
    raise ConvergenceError(f"moment integral not converged (error {err:.3g} at {nodes} nodes)")


def first_order_si_moment(state, method="det", budget=None) -> np.ndarray:
    """(1/2c) int x cross J_1 for the packet."""
    return magnetic_moment_from_current(first_order_current_field(state), state.scales.c, method, budget)


def _axis(state) -> np.ndarray:
    return np.asarray(state.spin_dir, dtype=float)


def mass_renorm_moment_correction(state, m_em: float | None = None, include_magnetic: bool = False) -> np.ndarray:
    """Taylor term (e hbar m_em / 2 m_e^2 c) along the Dirac moment.

    The Dirac moment points against the spin, and renormalization makes it
    stronger, so the correction points against the spin as well.
    """
    s = state.scales
    if m_em is None:
        m_em = electromagnetic_mass(state, include_magnetic=include_magnetic)
    ratio = m_em / s.m_e
    if ratio >= TAYLOR_LIMIT:
        raise TaylorValidityError(f"m_em / m_e = {ratio:.4g} exceeds the Taylor limit {TAYLOR_LIMIT}")
    return -(s.e * s.hbar * m_em / (2.0 * s.m_e**2 * s.c)) * _axis(state)


@dataclass(frozen=True)
class MomentBreakdown:
    m0: np.ndarray
    m1_selfinteraction: np.ndarray
    m_massrenorm: np.ndarray
    convention: Convention
    d: float
    compton_radius: float
    mu_B: float  # e hbar / (2 m_e c)
    m_em: float
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def total(self) -> np.ndarray:
        return self.m0 + self.m1_selfinteraction + self.m_massrenorm

    @property
    def ratio(self) -> float:
        """|total| / mu_B."""
        return float(np.linalg.norm(self.total) / self.mu_B)

    def to_dict(self) -> dict:
        return {
            "convention": self.convention.value,
            "d_cm": self.d,
            "d_over_compton": self.d / self.compton_radius,
            "mu_B": self.mu_B,
            "m0": list(map(float, self.m0)),
            "m1_selfinteraction": list(map(float, self.m1_selfinteraction)),
            "m_massrenorm": list(map(float, self.m_massrenorm)),
            "total": list(map(float, self.total)),
            "mu_over_muB": self.ratio,
            "m_em_g": self.m_em,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def total_moment(state, convention="oracle", method="det", budget=None, seed=None) -> MomentBreakdown:
    """m0 + first-order self-interaction + mass-renormalization correction.

    All correction prefactors use the observed mass m_e.
    """
    if not isinstance(state, GaussianPacket):
        raise TypeError("total moment is defined for Gaussian packets")
    convention = Convention.parse(convention)
    s = state.scales.dressed()
    packet = make_gaussian_packet(state.d, state.spin_dir, s)
    n = _axis(packet)
    mu_b = bohr_magneton(s)
    lam = s.compton_radius()
    notes = []
    if state.d < 2.0 * lam:
        msg = f"d = {state.d / lam:.4g} Compton radii is below 2; NR limit assumptions are weak"
        notes.append(msg)
        warnings.warn(msg, NonRelativisticWarning, stacklevel=2)
    unit = s.e**3 * s.hbar / (2.0 * s.m_e**2 * s.c**3 * state.d)
    if convention is Convention.PUBLISHED:
        m0 = -mu_b * n
        m1 = PUBLISHED_M1_COEFF * unit * n
        m_em = PUBLISHED_C_E * s.e**2 / (s.c**2 * state.d)
        mr = -PUBLISHED_C_E * unit * n
    else:
        m0 = magnetic_moment_from_current(magnetization_current_field(packet), s.c)
        m1 = first_order_si_moment(packet)
        m_em = electric_self_energy(packet, method, budget, seed).value / s.c**2
        mr = mass_renorm_moment_correction(packet, m_em)
    return MomentBreakdown(m0, m1, mr, convention, state.d, lam, mu_b, m_em, tuple(notes))


def _breakdown_at(d_over_compton: float, convention, scales: PhysicalScales, spin_dir=(0.0, 0.0, 1.0),
                  **kw) -> MomentBreakdown:
    packet = make_gaussian_packet(d_over_compton * scales.compton_radius(), spin_dir, scales)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonRelativisticWarning)
        return total_moment(packet, convention, **kw)


def solve_matching_width(convention="paper", scales: PhysicalScales = CODATA_CGS,
                         target_anomaly: float | None = None, bracket=(0.1, 100.0),
                         xtol: float = BISECTION_XTOL, **kw) -> float:
    """Width d*/lambda_C at which |total| / mu_B = 1 + target (default alpha / 2 pi).

    Plain bisection on ``bracket`` (in Compton radii). Warns if d* < 2.
    """
    if target_anomaly is None:
        target_anomaly = scales.alpha() / (2.0 * math.pi)

    def f(x: float) -> float:
        return _breakdown_at(x, convention, scales, **kw).ratio - 1.0 - target_anomaly

    lo, hi = map(float, bracket)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}] Compton radii (f = {flo:.3g}, {fhi:.3g})")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    if root < 2.0:
        warnings.warn(f"matching width {root:.4f} Compton radii is below 2", NonRelativisticWarning, stacklevel=2)
    return root


SWEEP_HEADER = ("d_over_compton", "mu_over_muB", "m0_z", "m1_z", "m_renorm_z", "total_z")


def sweep(d_min: float, d_max: float, steps: int, convention="paper", scales: PhysicalScales = CODATA_CGS,
          **kw) -> list[tuple[float, ...]]:
    """Rows of SWEEP_HEADER on a geometric grid of widths (Compton radii)."""
    if not (0 < d_min < d_max) or steps < 2:
        raise ValueError("need 0 < d_min < d_max and steps >= 2")
    rows = []
    for x in np.geomspace(d_min, d_max, int(steps)):
        b = _breakdown_at(float(x), convention, scales, **kw)
        rows.append((float(x), b.ratio, float(b.m0[2]), float(b.m1_selfinteraction[2]),
                     float(b.m_massrenorm[2]), float(b.total[2])))
    return rows


def write_sweep_csv(rows, out=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return text
