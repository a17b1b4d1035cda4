"""Jones-calculus primitives: half-wave plates, linear analyzers, projections.

Angles are in radians. Vectors and matrices are immutable value types; the
underlying numpy arrays are exposed through :meth:`JonesVector.array` and
:meth:`JonesMatrix.array` as fresh copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


def _check_angle(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInput(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class JonesVector:
    h: complex
    v: complex

    @classmethod
    def from_array(cls, arr) -> "JonesVector":
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != (2,):
            raise InvalidInput(f"Jones vector needs 2 components, got shape {arr.shape}")
        return cls(complex(arr[0]), complex(arr[1]))

    def array(self) -> np.ndarray:
        return np.array([self.h, self.v], dtype=complex)

    def norm2(self) -> float:
        return abs(self.h) ** 2 + abs(self.v) ** 2

    def __neg__(self) -> "JonesVector":
        return JonesVector(-self.h, -self.v)


H = JonesVector(1.0 + 0j, 0j)
V = JonesVector(0j, 1.0 + 0j)


@dataclass(frozen=True)
class JonesMatrix:
    m_hh: complex
    m_hv: complex
    m_vh: complex
    m_vv: complex

    @classmethod
    def from_array(cls, arr) -> "JonesMatrix":
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != (2, 2):
            raise InvalidInput(f"Jones matrix must be 2x2, got shape {arr.shape}")
        return cls(complex(arr[0, 0]), complex(arr[0, 1]), complex(arr[1, 0]), complex(arr[1, 1]))

    def array(self) -> np.ndarray:
        return np.array([[self.m_hh, self.m_hv], [self.m_vh, self.m_vv]], dtype=complex)

    def trace(self) -> complex:
        return self.m_hh + self.m_vv

    def dagger(self) -> "JonesMatrix":
        return JonesMatrix.from_array(self.array().conj().T)

    def __matmul__(self, other):
        if isinstance(other, JonesMatrix):
            return JonesMatrix.from_array(self.array() @ other.array())
        if isinstance(other, JonesVector):
            return JonesVector.from_array(self.array() @ other.array())
        return NotImplemented


def hwp(theta: float) -> JonesMatrix:
    """Half-wave plate with its fast axis at ``theta`` from horizontal.

    The global phase is dropped, leaving the real reflection matrix
    ``[[cos 2θ, sin 2θ], [sin 2θ, -cos 2θ]]``. Note that ``hwp(0) @ V == -V``.
    """
    theta = _check_angle("theta", theta)
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    return JonesMatrix(c, s, s, -c)


def polarizer(alpha: float) -> JonesMatrix:
    """Projector onto linear polarization at angle ``alpha``."""
    alpha = _check_angle("alpha", alpha)
    c, s = math.cos(alpha), math.sin(alpha)
    return JonesMatrix(c * c, c * s, c * s, s * s)


def projection_amplitude(alpha: float, psi: JonesVector) -> complex:
    """Scalar amplitude <alpha|psi> for a linear analyzer at ``alpha``."""
    alpha = _check_angle("alpha", alpha)
    if not (np.isfinite(psi.h) and np.isfinite(psi.v)):
        raise InvalidInput("Jones vector components must be finite")
    return math.cos(alpha) * psi.h + math.sin(alpha) * psi.v
