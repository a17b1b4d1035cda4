"""Two-crystal polarization-entangled photon pairs.

Crystal 1 emits an H-polarized signal/idler pair with amplitude ``alpha``,
crystal 2 a V-polarized pair with amplitude ``beta``; the relative phase
``phi`` between the two emission paths is stored once on the state and
attached to the crystal-2 term when the analyzers are applied.

Sign convention
---------------
Propagating the crystal-2 signal through :func:`~condpattern.polarization.hwp`
gives a 45-degree projection of ``-sin(pi/4 - 2*theta)`` for every plate
angle, whereas the two-crystal rate formula in :mod:`condpattern.coincidence`
carries ``+sin``. The two descriptions differ only by the constant
:data:`HWP_REFLECTION_PHASE`. Phases handed to the rate formulas (and the
phase of the spatial model) are in the rate-formula frame; use
:func:`jones_phase` before building a state whose projection should
reproduce them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInput
from .polarization import H, V, JonesVector, hwp, projection_amplitude

NORM_TOL = 1e-9
ANALYZER_45 = math.pi / 4
HWP_REFLECTION_PHASE = math.pi


@dataclass(frozen=True)
class PathAmplitude:
    crystal: int
    signal_pol: JonesVector
    idler_pol: JonesVector
    amp: complex

    def __post_init__(self):
        if self.crystal not in (1, 2):
            raise InvalidInput(f"crystal index must be 1 or 2, got {self.crystal!r}")

    def weight(self) -> float:
        return abs(self.amp) ** 2 * self.signal_pol.norm2() * self.idler_pol.norm2()


@dataclass(frozen=True)
class BiphotonState:
    paths: tuple[PathAmplitude, PathAmplitude]
    phase_phi: float = 0.0

    def __post_init__(self):
        if len(self.paths) != 2 or {p.crystal for p in self.paths} != {1, 2}:
            raise InvalidInput("state needs exactly one path per crystal")
        if not math.isfinite(self.phase_phi):
            raise InvalidInput("phase_phi must be finite")
        total = sum(p.weight() for p in self.paths)
        if abs(total - 1.0) > NORM_TOL:
            raise InvalidInput(f"state not normalized: sum of weights = {total!r}")

    def path(self, crystal: int) -> PathAmplitude:
        for p in self.paths:
            if p.crystal == crystal:
                return p
        raise InvalidInput(f"no path for crystal {crystal}")

    def with_phase(self, phi: float) -> "BiphotonState":
        return replace(self, phase_phi=float(phi))

    def norm2(self) -> float:
        return sum(p.weight() for p in self.paths)


@dataclass(frozen=True)
class PumpSetting:
    hwp_angle: float

    def __post_init__(self):
        if not math.isfinite(self.hwp_angle):
            raise InvalidInput("pump hwp_angle must be finite")


def _check_pair(alpha: float, beta: float) -> tuple[float, float]:
    alpha, beta = float(alpha), float(beta)
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise InvalidInput("alpha and beta must be finite")
    if alpha < 0 or beta < 0:
        raise InvalidInput(f"alpha and beta must be non-negative, got ({alpha}, {beta})")
    defect = alpha * alpha + beta * beta - 1.0
    if abs(defect) > NORM_TOL:
        raise InvalidInput(f"alpha^2 + beta^2 - 1 = {defect:.3e}; pump split must be normalized")
    return alpha, beta


def jones_phase(phi: float) -> float:
    """Map a rate-formula relative phase to the phase stored on a Jones-frame state."""
    return phi + HWP_REFLECTION_PHASE


def make_two_crystal_state(alpha: float, beta: float, phi: float = 0.0) -> BiphotonState:
    alpha, beta = _check_pair(alpha, beta)
    return BiphotonState(
        paths=(
            PathAmplitude(1, H, H, complex(alpha)),
            PathAmplitude(2, V, V, complex(beta)),
        ),
        phase_phi=float(phi),
    )


def pump_split(pump: PumpSetting, h_crystal: int = 1) -> tuple[float, float]:
    """Split an H-polarized pump between the crystals with a half-wave plate.

    ``h_crystal`` selects which crystal the H pump component drives; the
    source describes both assignments, so it is left configurable.
    """
    if h_crystal not in (1, 2):
        raise InvalidInput(f"h_crystal must be 1 or 2, got {h_crystal!r}")
    a = abs(math.cos(2 * pump.hwp_angle))
    b = abs(math.sin(2 * pump.hwp_angle))
    n = math.hypot(a, b)
    a, b = a / n, b / n
    return (a, b) if h_crystal == 1 else (b, a)


def apply_signal_hwp(state: BiphotonState, theta: float) -> BiphotonState:
    plate = hwp(theta)
    paths = tuple(replace(p, signal_pol=plate @ p.signal_pol) for p in state.paths)
    return replace(state, paths=paths)


def project_analyzers(state: BiphotonState, a_signal: float, a_idler: float) -> tuple[complex, complex]:
    """Coincidence amplitudes (c1, c2) behind signal/idler analyzers.

    The crystal-2 amplitude carries ``exp(i*phase_phi)``.
    """
    out = {}
    for p in state.paths:
        c = p.amp * projection_amplitude(a_signal, p.signal_pol) * projection_amplitude(a_idler, p.idler_pol)
        if p.crystal == 2:
            c *= np.exp(1j * state.phase_phi)
        out[p.crystal] = complex(c)
    return out[1], out[2]


def eq1_coefficients(alpha: float, beta: float, theta: float) -> tuple[float, float]:
    alpha, beta = _check_pair(alpha, beta)
    u = math.pi / 4 - 2 * theta
    return alpha * math.cos(u), beta * math.sin(u)


def concurrence(alpha: float, beta: float) -> float:
    alpha, beta = _check_pair(alpha, beta)
    return 2 * alpha * beta


def coherent_rate(alpha: float, beta: float, theta: float, phi: float) -> float:
    """Fully coherent 45/45 coincidence probability by explicit Jones propagation.

    ``phi`` is taken in the rate-formula frame. The result is rescaled by the
    idler-analyzer transmission (1/2) so that it is directly comparable with
    :func:`condpattern.coincidence.rate_eq2` at ``gamma = 1``.
    """
    state = apply_signal_hwp(make_two_crystal_state(alpha, beta, jones_phase(phi)), theta)
    c1, c2 = project_analyzers(state, ANALYZER_45, ANALYZER_45)
    idler_transmission = abs(projection_amplitude(ANALYZER_45, H)) ** 2
    return abs(c1 + c2) ** 2 / idler_transmission
