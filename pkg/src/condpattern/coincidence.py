"""Coincidence rates and simulated detector scans.

The interference cross term is scaled by a coherence parameter ``gamma`` in
[0, 1]: ``gamma = 1`` is the fully coherent two-path sum, ``gamma = 0`` an
incoherent mixture of the two crystals, and ``gamma = 1/2`` reproduces the
two-crystal rate formula exactly as it is usually printed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .biphoton import ANALYZER_45, BiphotonState, apply_signal_hwp, jones_phase, project_analyzers
from .errors import InvalidInput
from .geometry import OpticalLayout, envelope, phase_diff

ABSCISSA_KINDS = ("position", "waveplate_angle")


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not (0.0 <= gamma <= 1.0):
        raise InvalidInput(f"gamma must lie in [0, 1], got {gamma!r}")
    return gamma


@dataclass(frozen=True)
class CoherenceSetting:
    gamma: float = 1.0

    def __post_init__(self):
        _check_gamma(self.gamma)


@dataclass(frozen=True)
class ScanConfig:
    x_start: float = 4.0
    x_end: float = 9.0
    n_points: int = 201
    theta_signal: float = math.pi / 4
    shots_scale: float = 1000.0
    noise: bool = False
    seed: int = 0
    slit_samples: int = 5

    def __post_init__(self):
        if not (math.isfinite(self.x_start) and math.isfinite(self.x_end)) or self.x_end <= self.x_start:
            raise InvalidInput(f"scan range must satisfy x_end > x_start, got [{self.x_start}, {self.x_end}]")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidInput(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not (self.shots_scale > 0 and math.isfinite(self.shots_scale)):
            raise InvalidInput(f"shots_scale must be > 0, got {self.shots_scale!r}")
        if int(self.slit_samples) != self.slit_samples or self.slit_samples < 1 or self.slit_samples % 2 == 0:
            raise InvalidInput(f"slit_samples must be a positive odd integer, got {self.slit_samples!r}")
        if not math.isfinite(self.theta_signal):
            raise InvalidInput("theta_signal must be finite")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidInput("seed must fit in 64 unsigned bits")

    def grid(self) -> np.ndarray:
        return np.linspace(self.x_start, self.x_end, int(self.n_points))


@dataclass(frozen=True, eq=False)
class Pattern:
    abscissa: np.ndarray
    counts: np.ndarray
    abscissa_kind: str = "position"

    def __post_init__(self):
        x = np.array(self.abscissa, dtype=float)
        y = np.array(self.counts, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise InvalidInput(f"abscissa and counts must be 1-D and equal length, got {x.shape} and {y.shape}")
        if x.size and not np.all(np.isfinite(x)):
            raise InvalidInput("abscissa must be finite")
        if np.any(np.diff(x) <= 0):
            raise InvalidInput("abscissa must be strictly increasing")
        if np.any(np.isnan(y)):
            raise InvalidInput("counts contain NaN")
        if np.any(y < 0):
            raise InvalidInput("counts must be non-negative")
        if self.abscissa_kind not in ABSCISSA_KINDS:
            raise InvalidInput(f"abscissa_kind must be one of {ABSCISSA_KINDS}")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "counts", y)

    def __len__(self):
        return self.abscissa.size


def rate_eq2(alpha: float, beta: float, theta: float, phi: float, gamma: float):
    """Two-crystal coincidence rate at 45/45 analyzers, signal plate at ``theta``.

    Vectorizes over ``theta`` and ``phi``.
    """
    gamma = _check_gamma(gamma)
    u = np.pi / 4 - 2 * np.asarray(theta, dtype=float)
    c, s = np.cos(u), np.sin(u)
    r = alpha ** 2 * c ** 2 + beta ** 2 * s ** 2 + 2 * gamma * alpha * beta * c * s * np.cos(phi)
    r = np.maximum(r, 0.0)
    return float(r) if r.ndim == 0 else r


def _amplitudes(state: BiphotonState, theta: float) -> tuple[complex, complex]:
    rotated = apply_signal_hwp(state.with_phase(0.0), theta)
    return project_analyzers(rotated, ANALYZER_45, ANALYZER_45)


def rate_spatial(layout: OpticalLayout, state: BiphotonState, theta: float, gamma: float, x):
    """Coincidence probability with the signal detector at ``x`` (mm).

    The relative phase comes from :func:`~condpattern.geometry.phase_diff`
    and replaces the scalar phase stored on ``state``.
    """
    gamma = _check_gamma(gamma)
    c1, c2 = _amplitudes(state, theta)
    x = np.asarray(x, dtype=float)
    a1 = c1 * envelope(layout, 1, x)
    a2 = c2 * envelope(layout, 2, x) * np.exp(1j * jones_phase(phase_diff(layout, x)))
    r = np.abs(a1) ** 2 + np.abs(a2) ** 2 + 2 * gamma * np.real(np.conj(a1) * a2)
    r = np.maximum(r, 0.0)
    return float(r) if r.ndim == 0 else r


def slit_offsets(width: float, samples: int = 5) -> np.ndarray:
    """Midpoint-rule nodes across a slit of ``width`` centred on zero."""
    if int(samples) != samples or samples < 1:
        raise InvalidInput(f"slit samples must be a positive integer, got {samples!r}")
    k = np.arange(samples)
    return ((k + 0.5) / samples - 0.5) * width


def slit_average(layout: OpticalLayout, f, x, samples: int = 5):
    """Average ``f`` over the detector slit centred at ``x`` (mm)."""
    x = np.asarray(x, dtype=float)
    offsets = slit_offsets(layout.slit_width_mm, samples)
    vals = np.stack([np.asarray(f(x + d), dtype=float) for d in offsets])
    out = vals.mean(axis=0)
    return float(out) if out.ndim == 0 else out


def slit_fringe_factor(layout: OpticalLayout, samples: int = 5) -> float:
    """Visibility reduction of linear-phase fringes by the sampled slit average."""
    offsets = slit_offsets(layout.slit_width_mm, samples)
    return float(np.mean(np.cos(2 * np.pi * offsets / layout.fringe_period)))


def _poisson_at(seed: int, index: int, mean: float) -> float:
    # key = seed, stream position = index in the high counter word
    bitgen = np.random.Philox(key=int(seed), counter=[0, 0, 0, int(index)])
    return float(np.random.Generator(bitgen).poisson(mean))


def poissonize(pattern: Pattern, seed: int) -> Pattern:
    """Replace each count by a Poisson draw with that mean.

    Draw ``i`` depends only on ``(seed, i)``, so the result does not depend on
    evaluation order.
    """
    means = pattern.counts
    if np.any(means < 0):
        raise InvalidInput("Poisson mean must be non-negative")
    noisy = np.array([_poisson_at(seed, i, m) if m > 0 else 0.0 for i, m in enumerate(means)])
    return Pattern(pattern.abscissa, noisy, pattern.abscissa_kind)


def scan_signal(layout: OpticalLayout, state: BiphotonState, cfg: ScanConfig, gamma: float) -> Pattern:
    gamma = _check_gamma(gamma)
    xs = cfg.grid()

    def rate(x):
        return rate_spatial(layout, state, cfg.theta_signal, gamma, x)

    counts = cfg.shots_scale * np.asarray(slit_average(layout, rate, xs, cfg.slit_samples))
    pattern = Pattern(xs, counts, "position")
    return poissonize(pattern, cfg.seed) if cfg.noise else pattern


def scan_waveplate(layout: OpticalLayout, state: BiphotonState, x_fixed: float, theta_grid,
                   shots_scale: float, noise: bool = False, seed: int = 0, gamma: float = 1.0,
                   slit_samples: int = 1) -> Pattern:
    """Counts versus signal-plate angle with both detectors parked.

    ``slit_samples=1`` evaluates the rate at the slit centre.
    """
    gamma = _check_gamma(gamma)
    thetas = np.asarray(theta_grid, dtype=float)
    if thetas.ndim != 1 or thetas.size < 2 or np.any(np.diff(thetas) <= 0):
        raise InvalidInput("theta_grid must be a strictly increasing 1-D array")
    if not shots_scale > 0:
        raise InvalidInput("shots_scale must be > 0")
    counts = np.array([
        slit_average(layout, lambda x, t=t: rate_spatial(layout, state, t, gamma, x), x_fixed, slit_samples)
        for t in thetas
    ]) * shots_scale
    pattern = Pattern(thetas, counts, "waveplate_angle")
    return poissonize(pattern, seed) if noise else pattern
