"""Vector fields on R^3 with linear-combination support."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

__all__ = ["VectorField3", "AzimuthalField", "GridField", "as_points", "curl", "zero_field"]


def as_points(x) -> np.ndarray:
    """Coerce ``x`` to a float array of shape (N, 3)."""
    pts = np.asarray(x, dtype=float)
    if pts.shape == (3,):
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected points of shape (N, 3), got {pts.shape}")
    return pts


class VectorField3:
    """A 3-vector field evaluated pointwise on arrays of shape (N, 3).

    Parameters
    ----------
    func : callable
        Maps an (N, 3) array of points (cm) to an (N, 3) array of values.
    scale : float, optional
        Length over which the field is concentrated around the origin. Fields
        without a scale are treated as non-decaying and are rejected by the
        integral routines that need decay.
    radius : float, optional
        Radius of a compact ball outside which the field vanishes identically.
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], scale: float | None = None,
                 radius: float | None = None, name: str = ""):
        self._func = func
        self.scale = scale
        self.radius = radius
        self.name = name

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x)
        return np.asarray(self._func(pts), dtype=float).reshape(pts.shape)

    @property
    def decaying(self) -> bool:
        return self.scale is not None or self.radius is not None

    def _combine(self, other: VectorField3, sign: float) -> VectorField3:
        scale = _max_or_none(self.scale, other.scale)
        radius = None if (self.radius is None or other.radius is None) else max(self.radius, other.radius)
        return VectorField3(lambda p: self(p) + sign * other(p), scale=scale, radius=radius)

    def __add__(self, other: VectorField3) -> VectorField3:
        return self._combine(other, 1.0)

    def __sub__(self, other: VectorField3) -> VectorField3:
        return self._combine(other, -1.0)

    def __mul__(self, k: float) -> VectorField3:
        k = float(k)
        return VectorField3(lambda p: k * self(p), scale=self.scale, radius=self.radius, name=self.name)

    __rmul__ = __mul__

    def __neg__(self) -> VectorField3:
        return self * -1.0


def _max_or_none(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def zero_field() -> VectorField3:
    return VectorField3(lambda p: np.zeros_like(p), scale=1.0, name="zero")


class AzimuthalField(VectorField3):
    """Field of the form ``profile(|x|) * (x cross axis)``.

    Closed circulation about ``axis``; the magnetization current of a
    uniformly polarized spherically symmetric packet and all of its
    self-interaction corrections have this shape. ``gaussian = (k, w)`` marks
    a profile that is exactly ``k exp(-r^2 / w^2)``.
    """

    def __init__(self, profile: Callable[[np.ndarray], np.ndarray], axis, scale: float,
                 name: str = "", gaussian: tuple[float, float] | None = None):
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        self.profile = profile
        self.axis = axis
        self.gaussian = gaussian

        def func(p: np.ndarray) -> np.ndarray:
            r = np.linalg.norm(p, axis=1)
            return profile(r)[:, None] * np.cross(p, axis)

        super().__init__(func, scale=scale, name=name)

    def __mul__(self, k: float) -> AzimuthalField:
        k = float(k)
        prof = self.profile
        gauss = None if self.gaussian is None else (k * self.gaussian[0], self.gaussian[1])
        return AzimuthalField(lambda r: k * prof(r), self.axis, self.scale, name=self.name, gaussian=gauss)

    __rmul__ = __mul__


class GridField(VectorField3):
    """Trilinear interpolation of samples on a regular grid; zero outside it."""

    def __init__(self, axes: tuple[np.ndarray, np.ndarray, np.ndarray], values: np.ndarray,
                 name: str = ""):
        values = np.asarray(values, dtype=float)
        if values.shape != (len(axes[0]), len(axes[1]), len(axes[2]), 3):
            raise ValueError("values must have shape (nx, ny, nz, 3)")
        interp = RegularGridInterpolator(axes, values, method="linear", bounds_error=False,
                                         fill_value=0.0)
        half = max(max(abs(a[0]), abs(a[-1])) for a in axes)
        super().__init__(interp, radius=float(np.sqrt(3.0) * half), name=name)
        self.axes = axes
        self.values = values

    @classmethod
    def sample(cls, field: VectorField3, axes) -> GridField:
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        vals = field(mesh.reshape(-1, 3)).reshape(mesh.shape)
        return cls(tuple(np.asarray(a, dtype=float) for a in axes), vals, name=field.name)


def curl(field: VectorField3, x, h: float) -> np.ndarray:
    """Curl by Richardson-extrapolated central differences with step ``h``."""
    pts = as_points(x)

    def jac(step: float) -> np.ndarray:
        out = np.empty((pts.shape[0], 3, 3))  # out[:, i, k] = d F_i / d x_k
        for k in range(3):
            dx = np.zeros(3)
            dx[k] = step
            out[:, :, k] = (field(pts + dx) - field(pts - dx)) / (2.0 * step)
        return out

    j = (4.0 * jac(h / 2.0) - jac(h)) / 3.0
    return np.stack([j[:, 2, 1] - j[:, 1, 2], j[:, 0, 2] - j[:, 2, 0], j[:, 1, 0] - j[:, 0, 1]], axis=1)
