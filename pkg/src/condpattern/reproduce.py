"""Simulate and fit the five published coincidence figures.

The coherence parameter is not a quantity of the experiment, so each
interference figure solves for the ``gamma`` whose noise-free simulation,
fitted with the same model, returns the reported visibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .biphoton import make_two_crystal_state
from .coincidence import Pattern, scan_signal, scan_waveplate
from .config import RunConfig
from .errors import InvalidInput
from .fitting import FitModel, FitResult, fit, visibility_from_fit
from .geometry import sinc_aperture

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6")
SQRT_HALF = math.sqrt(0.5)

# reported values the reproduction is steered to
REPORTED = {
    "fig2": {"peak_mm": 6.2},
    "fig3": {"peak_mm": 6.4},
    "fig4": {"visibility": 0.64},
    "fig5": {"visibility": 0.62},
    "fig6": {"visibility": 0.75},
}
GAUSSIAN_PEAK_COUNTS = 200.0
FRINGE_PEAK_COUNTS = 2000.0
EXTREMUM_WINDOW = (6.0, 6.6)


@dataclass
class Reproduction:
    figure: str
    pattern: Pattern
    model: FitModel
    result: FitResult
    summary: dict


def _calibrate_gamma(target: float, simulate, model: FitModel, start: float) -> tuple[float, float]:
    gamma, vis = min(start, 1.0), float("nan")
    for _ in range(8):
        res = fit(model, simulate(gamma))
        vis = visibility_from_fit(res, model)
        if abs(vis - target) < 1e-9:
            break
        gamma = min(gamma * target / vis, 1.0)
    return gamma, vis


def _local_extremum(pattern: Pattern, kind: str) -> float:
    x, y = pattern.abscissa, pattern.counts
    sel = (x >= EXTREMUM_WINDOW[0]) & (x <= EXTREMUM_WINDOW[1])
    i = np.argmin(y[sel]) if kind == "minimum" else np.argmax(y[sel])
    return float(x[sel][i])


def reproduce_figure(fig: str, cfg: RunConfig | None = None, *, noise: bool = False, seed: int = 0) -> Reproduction:
    if fig not in FIGURES:
        raise InvalidInput(f"unknown figure {fig!r}; expected one of {FIGURES}")
    cfg = cfg or RunConfig()
    layout = cfg.layout
    base = replace(cfg.scan, noise=False, seed=seed)

    if fig in ("fig2", "fig3"):
        alpha, beta = (1.0, 0.0) if fig == "fig2" else (0.0, 1.0)
        state = make_two_crystal_state(alpha, beta)
        scan = replace(base, theta_signal=0.0, shots_scale=1.0)
        unit = scan_signal(layout, state, scan, 0.0)
        scan = replace(scan, shots_scale=GAUSSIAN_PEAK_COUNTS / float(unit.counts.max()), noise=noise)
        pattern = scan_signal(layout, state, scan, 0.0)
        model = FitModel("gaussian")
        result = fit(model, pattern)
        summary = {
            "alpha": alpha, "beta": beta, "theta_deg": 0.0, "gamma": None,
            "peak_mm": float(result.params[1]),
            "peak_counts_nominal": GAUSSIAN_PEAK_COUNTS,
        }
    elif fig in ("fig4", "fig5"):
        target = REPORTED[fig]["visibility"]
        theta = math.pi / 4 if fig == "fig4" else 0.0
        state = make_two_crystal_state(SQRT_HALF, SQRT_HALF)
        scan = replace(base, theta_signal=theta, shots_scale=1.0)
        unit = scan_signal(layout, state, scan, 1.0)
        scan = replace(scan, shots_scale=FRINGE_PEAK_COUNTS / float(unit.counts.max()))
        model = FitModel("double_slit", aperture=sinc_aperture(layout))
        gamma, _ = _calibrate_gamma(target, lambda g: scan_signal(layout, state, scan, g), model, target)
        pattern = scan_signal(layout, state, replace(scan, noise=noise), gamma)
        result = fit(model, pattern)
        kind = "minimum" if fig == "fig4" else "maximum"
        summary = {
            "alpha": SQRT_HALF, "beta": SQRT_HALF, "theta_deg": math.degrees(theta), "gamma": gamma,
            "visibility": visibility_from_fit(result, model) if result.converged else None,
            "fringe_phase_rad": float(result.params[3]),
            "fringe_period_mm": float(result.params[2]),
            "extremum_kind": kind,
            "extremum_mm": _local_extremum(pattern, kind),
        }
    else:
        target = REPORTED[fig]["visibility"]
        bs = cfg.bell_scan
        state = make_two_crystal_state(SQRT_HALF, SQRT_HALF)
        model = FitModel("fringe")

        def simulate(g, noisy=False):
            return scan_waveplate(layout, state, bs.x_fixed, bs.grid(), bs.shots_scale,
                                  noise=noisy, seed=seed, gamma=g, slit_samples=bs.slit_samples)

        gamma, _ = _calibrate_gamma(target, simulate, model, target)
        pattern = simulate(gamma, noise)
        result = fit(model, pattern)
        summary = {
            "alpha": SQRT_HALF, "beta": SQRT_HALF, "x_fixed_mm": bs.x_fixed, "gamma": gamma,
            "visibility": visibility_from_fit(result, model) if result.converged else None,
            "period_rad": float(result.params[3]),
            "period_deg": math.degrees(result.params[3]),
        }

    summary.update({
        "figure": fig,
        "reported": REPORTED[fig],
        "noise": bool(noise),
        "seed": int(seed),
        "fit_converged": bool(result.converged),
    })
    if summary.get("gamma") is not None:
        summary["gamma_source"] = "solved so that the noise-free fit returns the reported visibility"
    return Reproduction(fig, pattern, model, result, summary)
