"""Bench parameters and the phenomenological spatial model.

Detector positions are in millimetres at the API surface; physical lengths
(wavelengths, separations, distances) are stored in metres. All mm/m
conversion happens here.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import InvalidInput

MM = 1e-3
PHASE_MODELS = ("linear", "fresnel")


@dataclass(frozen=True)
class OpticalLayout:
    lambda_pump: float = 442e-9
    lambda_down: float = 884e-9
    crystal_length: float = 0.01
    crystal_separation: float = 0.01
    z_detector: float = 1.0
    slit_width: float = 0.2e-3
    env_center_1: float = 6.2
    env_center_2: float = 6.4
    env_width_1: float = 0.9
    env_width_2: float = 0.9
    fringe_period: float = 1.0
    phase_offset: float = 0.0
    x_ref: float = 6.3
    phase_model: str = "linear"

    def __post_init__(self):
        for f in fields(self):
            if f.name == "phase_model":
                continue
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidInput(f"layout.{f.name} must be a finite number, got {value!r}")
        positive = ("lambda_pump", "lambda_down", "crystal_length", "crystal_separation",
                    "z_detector", "slit_width", "env_width_1", "env_width_2", "fringe_period")
        for name in positive:
            if getattr(self, name) <= 0:
                raise InvalidInput(f"layout.{name} must be > 0, got {getattr(self, name)!r}")
        if self.phase_model not in PHASE_MODELS:
            raise InvalidInput(f"layout.phase_model must be one of {PHASE_MODELS}, got {self.phase_model!r}")

    @property
    def slit_width_mm(self) -> float:
        return self.slit_width / MM

    def fresnel_local_period(self) -> float:
        """Local fringe period (mm) of the quadratic phase model at ``x_ref``."""
        return self.lambda_down * self.z_detector ** 2 / (self.crystal_separation * self.x_ref * MM) / MM

    def to_dict(self) -> dict:
        return asdict(self)


def default_layout() -> OpticalLayout:
    return OpticalLayout()


def envelope(layout: OpticalLayout, crystal: int, x):
    """Gaussian amplitude envelope of the pairs from ``crystal`` at detector position ``x`` (mm)."""
    if crystal == 1:
        center, width = layout.env_center_1, layout.env_width_1
    elif crystal == 2:
        center, width = layout.env_center_2, layout.env_width_2
    else:
        raise InvalidInput(f"crystal index must be 1 or 2, got {crystal!r}")
    x = np.asarray(x, dtype=float)
    return np.exp(-((x - center) ** 2) / (2.0 * width ** 2))


def phase_diff(layout: OpticalLayout, x):
    """Relative phase between the two emission paths at detector position ``x`` (mm)."""
    x = np.asarray(x, dtype=float)
    if layout.phase_model == "linear":
        return layout.phase_offset + 2 * np.pi * (x - layout.x_ref) / layout.fringe_period
    # quadratic path difference between sources displaced along the axis
    xm, xr = x * MM, layout.x_ref * MM
    k = np.pi * layout.crystal_separation / (layout.lambda_down * layout.z_detector ** 2)
    return layout.phase_offset + k * (xm - xr) * (xm + xr)


def coincidence_envelope_width(layout: OpticalLayout) -> float:
    """Gaussian sigma (mm) of the cross-term envelope E1*E2."""
    return 1.0 / math.sqrt(1.0 / layout.env_width_1 ** 2 + 1.0 / layout.env_width_2 ** 2)


def sinc_aperture(layout: OpticalLayout) -> float:
    """Aperture ``a_eff`` (1/mm) of a sinc^2 envelope with the same central curvature as E1*E2.

    sinc^2(pi a u) ~ 1 - (pi a u)^2 / 3 is matched to exp(-u^2 / (2 sigma^2)).
    """
    sigma = coincidence_envelope_width(layout)
    return math.sqrt(1.5) / (math.pi * sigma)
