"""Physical constants in Gaussian CGS units and the derived scales.

Everything downstream works in coordinates rescaled by the packet width, so
the only place raw CGS numbers meet the dimensionless integrals is through
the prefactors assembled here.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

__all__ = [
    "PhysicalScales",
    "CODATA_CGS",
    "bohr_magneton",
    "qed_first_order_moment",
    "g_factor",
    "load_config",
]

# CODATA 2018, converted to Gaussian CGS.
_E_STATC = 4.803204712570263e-10
_M_E_G = 9.1093837015e-28
_C_CM_S = 2.99792458e10
_HBAR_ERG_S = 1.054571817e-27


@dataclass(frozen=True)
class PhysicalScales:
    """Immutable bundle of the constants a calculation depends on.

    ``m`` is the mass appearing in the Dirac equation and ``m_e`` the observed
    (dressed) mass. They default to the same number; mass renormalization is
    what relates them.
    """

    e: float = _E_STATC
    m: float = _M_E_G
    m_e: float = _M_E_G
    c: float = _C_CM_S
    hbar: float = _HBAR_ERG_S
    d: float = 1.0  # packet width in cm; usually overwritten via with_width

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{f.name} must be a finite positive number, got {value!r}")

    def alpha(self) -> float:
        """Fine-structure constant e^2 / (hbar c)."""
        return self.e**2 / (self.hbar * self.c)

    def compton_radius(self) -> float:
        """Reduced Compton wavelength hbar / (m_e c), in cm."""
        return self.hbar / (self.m_e * self.c)

    def with_width(self, d: float) -> PhysicalScales:
        return replace(self, d=float(d))

    def with_width_compton(self, d_over_compton: float) -> PhysicalScales:
        return replace(self, d=float(d_over_compton) * self.compton_radius())

    def dressed(self) -> PhysicalScales:
        """Copy whose Dirac mass is set to the observed mass."""
        return replace(self, m=self.m_e)

    def replace(self, **changes: float) -> PhysicalScales:
        return replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


CODATA_CGS = PhysicalScales()


def bohr_magneton(scales: PhysicalScales) -> float:
    """e hbar / (2 m c) in erg/G, using the Dirac-equation mass ``m``."""
    return scales.e * scales.hbar / (2.0 * scales.m * scales.c)


def qed_first_order_moment(scales: PhysicalScales) -> float:
    """Bohr magneton times (1 + alpha / 2 pi)."""
    return bohr_magneton(scales) * (1.0 + scales.alpha() / (2.0 * math.pi))


def g_factor(moment_magnitude: float, spin: float, scales: PhysicalScales) -> float:
    """Gyromagnetic factor g = 2 m c mu / (e S)."""
    if spin == 0:
        raise ZeroDivisionError("g-factor is undefined for zero spin angular momentum")
    if spin < 0:
        raise ValueError("spin angular momentum must be positive")
    return 2.0 * scales.m * scales.c * moment_magnitude / (scales.e * spin)


_KEYS = {f.name for f in fields(PhysicalScales)}


def load_config(path: str | Path | None = None, overrides: dict[str, float] | None = None,
                base: PhysicalScales = CODATA_CGS) -> tuple[PhysicalScales, dict[str, str]]:
    """Read ``key = value`` lines into a :class:`PhysicalScales`.

    Lines may carry ``#`` comments. Keys naming a constant (``e``, ``m``,
    ``m_e``, ``c``, ``hbar``, ``d``) update the scales; any other key is
    returned untouched in the second element so callers (the CLI) can treat it
    as a flag default. ``overrides`` win over file values.
    """
    values: dict[str, float] = {}
    extra: dict[str, str] = {}
    if path is not None:
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = (part.strip() for part in line.partition("="))
            key = key.replace("-", "_")
            if key in _KEYS:
                values[key] = float(val)
            else:
                extra[key] = val
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = float(val)
    return replace(base, **values), extra
