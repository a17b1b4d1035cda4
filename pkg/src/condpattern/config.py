"""JSON run configuration with unit-suffixed keys.

Every key carries its unit (``_nm``, ``_mm``, ``_m``, ``_deg``, ``_rad``) and
is converted to the library's internal units here. Validation errors are
reported as ``file:line: message`` pointing at the offending key.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .biphoton import PumpSetting, make_two_crystal_state, pump_split
from .coincidence import ScanConfig
from .errors import InvalidInput
from .geometry import OpticalLayout

# config key -> (layout field, factor to internal units)
LAYOUT_KEYS = {
    "lambda_pump_nm": ("lambda_pump", 1e-9),
    "lambda_down_nm": ("lambda_down", 1e-9),
    "crystal_length_mm": ("crystal_length", 1e-3),
    "crystal_separation_mm": ("crystal_separation", 1e-3),
    "z_detector_m": ("z_detector", 1.0),
    "slit_width_mm": ("slit_width", 1e-3),
    "env_center_1_mm": ("env_center_1", 1.0),
    "env_center_2_mm": ("env_center_2", 1.0),
    "env_width_1_mm": ("env_width_1", 1.0),
    "env_width_2_mm": ("env_width_2", 1.0),
    "fringe_period_mm": ("fringe_period", 1.0),
    "phase_offset_rad": ("phase_offset", 1.0),
    "x_ref_mm": ("x_ref", 1.0),
    "phase_model": ("phase_model", None),
}
SCAN_KEYS = {"x_start_mm", "x_end_mm", "n_points", "theta_deg", "shots_scale", "noise", "seed", "slit_samples"}
BELL_KEYS = {"x_fixed_mm", "theta_start_deg", "theta_end_deg", "n_points", "shots_scale", "slit_samples"}
TOP_KEYS = {"layout", "alpha", "beta", "pump_hwp_deg", "h_pump_crystal", "phi0_override_rad",
            "gamma", "scan", "bell_scan", "output"}


@dataclass(frozen=True)
class BellScanConfig:
    x_fixed: float = 6.3
    theta_start: float = 0.0
    theta_end: float = math.pi
    n_points: int = 91
    shots_scale: float = 4000.0
    slit_samples: int = 1

    def grid(self) -> np.ndarray:
        return np.linspace(self.theta_start, self.theta_end, int(self.n_points))


@dataclass(frozen=True)
class RunConfig:
    layout: OpticalLayout = field(default_factory=OpticalLayout)
    alpha: float = math.sqrt(0.5)
    beta: float = math.sqrt(0.5)
    gamma: float = 1.0
    scan: ScanConfig = field(default_factory=ScanConfig)
    bell_scan: BellScanConfig = field(default_factory=BellScanConfig)
    output: str | None = None

    def state(self):
        return make_two_crystal_state(self.alpha, self.beta)


class ConfigError(InvalidInput):
    pass


class _Locator:
    def __init__(self, text: str, source: str):
        self.lines = text.splitlines()
        self.source = source

    def line_of(self, path: tuple[str, ...]) -> int:
        """1-based line of the last key in ``path``, searched after its parents."""
        start = 0
        for key in path:
            pat = re.compile(r'"%s"\s*:' % re.escape(key))
            for i in range(start, len(self.lines)):
                if pat.search(self.lines[i]):
                    start = i
                    break
        return start + 1

    def error(self, path: tuple[str, ...], msg: str) -> ConfigError:
        return ConfigError(f"{self.source}:{self.line_of(path)}: {'.'.join(path)}: {msg}")


def _number(loc: _Locator, path, value, *, integer=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise loc.error(path, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise loc.error(path, f"expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise loc.error(path, "must be finite")
    return int(value) if integer else float(value)


def _section(loc: _Locator, obj, path, allowed) -> dict:
    if not isinstance(obj, dict):
        raise loc.error(path, "expected an object")
    for key in obj:
        if key not in allowed:
            raise loc.error(path + (key,), "unknown key")
    return obj


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    loc = _Locator(text, source)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    raw = _section(loc, raw, (), TOP_KEYS)

    lay = {}
    for key, value in _section(loc, raw.get("layout", {}), ("layout",), LAYOUT_KEYS).items():
        name, factor = LAYOUT_KEYS[key]
        if factor is None:
            lay[name] = value
        else:
            lay[name] = _number(loc, ("layout", key), value) * factor
    if raw.get("phi0_override_rad") is not None:
        lay["phase_offset"] = _number(loc, ("phi0_override_rad",), raw["phi0_override_rad"])
    try:
        layout = OpticalLayout(**lay)
    except InvalidInput as exc:
        bad = next((k for k, (n, _) in LAYOUT_KEYS.items() if f"layout.{n} " in str(exc)), None)
        raise loc.error(("layout", bad) if bad else ("layout",), str(exc)) from None

    has_pair = "alpha" in raw or "beta" in raw
    if has_pair and "pump_hwp_deg" in raw:
        raise loc.error(("pump_hwp_deg",), "give either alpha/beta or pump_hwp_deg, not both")
    h_crystal = raw.get("h_pump_crystal", 1)
    if h_crystal not in (1, 2):
        raise loc.error(("h_pump_crystal",), "must be 1 or 2")
    if "pump_hwp_deg" in raw:
        deg = _number(loc, ("pump_hwp_deg",), raw["pump_hwp_deg"])
        alpha, beta = pump_split(PumpSetting(math.radians(deg)), h_crystal)
    elif has_pair:
        if "alpha" not in raw or "beta" not in raw:
            raise loc.error(("alpha",) if "alpha" in raw else ("beta",), "alpha and beta must be given together")
        alpha = _number(loc, ("alpha",), raw["alpha"])
        beta = _number(loc, ("beta",), raw["beta"])
        try:
            make_two_crystal_state(alpha, beta)
        except InvalidInput as exc:
            raise loc.error(("alpha",), str(exc)) from None
    else:
        alpha = beta = math.sqrt(0.5)

    gamma = _number(loc, ("gamma",), raw.get("gamma", 1.0))
    if not 0 <= gamma <= 1:
        raise loc.error(("gamma",), f"must lie in [0, 1], got {gamma}")

    sc = _section(loc, raw.get("scan", {}), ("scan",), SCAN_KEYS)
    scan_kwargs = {}
    conv = {"x_start_mm": ("x_start", False), "x_end_mm": ("x_end", False), "n_points": ("n_points", True),
            "shots_scale": ("shots_scale", False), "seed": ("seed", True), "slit_samples": ("slit_samples", True)}
    for key, (name, integer) in conv.items():
        if key in sc:
            scan_kwargs[name] = _number(loc, ("scan", key), sc[key], integer=integer)
    if "theta_deg" in sc:
        scan_kwargs["theta_signal"] = math.radians(_number(loc, ("scan", "theta_deg"), sc["theta_deg"]))
    if "noise" in sc:
        if not isinstance(sc["noise"], bool):
            raise loc.error(("scan", "noise"), "expected true or false")
        scan_kwargs["noise"] = sc["noise"]
    try:
        scan = ScanConfig(**scan_kwargs)
    except InvalidInput as exc:
        raise loc.error(("scan",), str(exc)) from None

    bs = _section(loc, raw.get("bell_scan", {}), ("bell_scan",), BELL_KEYS)
    bell_kwargs = {}
    for key, name, integer, factor in (("x_fixed_mm", "x_fixed", False, 1.0),
                                       ("theta_start_deg", "theta_start", False, math.pi / 180),
                                       ("theta_end_deg", "theta_end", False, math.pi / 180),
                                       ("n_points", "n_points", True, 1),
                                       ("shots_scale", "shots_scale", False, 1.0),
                                       ("slit_samples", "slit_samples", True, 1)):
        if key in bs:
            v = _number(loc, ("bell_scan", key), bs[key], integer=integer)
            bell_kwargs[name] = v * factor if not integer else v
    bell = BellScanConfig(**bell_kwargs)
    if bell.theta_end <= bell.theta_start or bell.n_points < 2:
        raise loc.error(("bell_scan",), "need theta_end_deg > theta_start_deg and n_points >= 2")
    if bell.shots_scale <= 0 or bell.slit_samples < 1 or bell.slit_samples % 2 == 0:
        raise loc.error(("bell_scan",), "shots_scale must be > 0 and slit_samples a positive odd integer")

    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise loc.error(("output",), "expected a path string")

    return RunConfig(layout=layout, alpha=alpha, beta=beta, gamma=gamma, scan=scan,
                     bell_scan=bell, output=output)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}:0: cannot read config: {exc.strerror}") from None
    return parse_config(text, str(path))


def with_overrides(cfg: RunConfig, *, theta_deg=None, seed=None, noise=None) -> RunConfig:
    scan = cfg.scan
    if theta_deg is not None:
        scan = replace(scan, theta_signal=math.radians(theta_deg))
    if seed is not None:
        scan = replace(scan, seed=int(seed))
    if noise is not None:
        scan = replace(scan, noise=bool(noise))
    return replace(cfg, scan=scan)
