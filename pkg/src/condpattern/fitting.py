"""Damped Gauss-Newton (Levenberg-Marquardt) fitting and the three pattern models.

Models
------
``gaussian``     B + A exp(-(x - x_c)^2 / (2 w^2))                      (A, x_c, w, B)
``double_slit``  B + A sinc^2(pi a (x - x0)) (1 + V cos(2 pi (x - x0)/period + phase))
                                                                        (A, x0, period, phase, V, B)
``fringe``       B + A cos(2 pi theta / period + psi)                   (A, psi, B, period)

``a`` (the sinc aperture, 1/mm) is a property of the double-slit model, not a
fitted parameter. All Jacobians are analytic; :func:`numerical_jacobian`
exists to check them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .coincidence import Pattern
from .errors import InvalidInput, InvalidParameter, InvalidState

PARAM_NAMES = {
    "gaussian": ("A", "x_c", "w", "B"),
    "double_slit": ("A", "x0", "period", "phase", "V", "B"),
    "fringe": ("A", "psi", "B", "period"),
}
# parameters that must stay > 0; violating steps are rejected
POSITIVE = {"gaussian": ("w",), "double_slit": ("period",), "fringe": ("period",)}
TWO_PI = 2 * math.pi


class VisibilityClipped(UserWarning):
    pass


@dataclass(frozen=True)
class FitModel:
    kind: str
    fixed_params: dict = field(default_factory=dict)
    aperture: float = 1.0

    def __post_init__(self):
        if self.kind not in PARAM_NAMES:
            raise InvalidInput(f"unknown model kind {self.kind!r}; expected one of {tuple(PARAM_NAMES)}")
        unknown = set(self.fixed_params) - set(self.names)
        if unknown:
            raise InvalidInput(f"cannot pin unknown parameters {sorted(unknown)} of {self.kind}")
        if not (self.aperture > 0 and math.isfinite(self.aperture)):
            raise InvalidInput("double-slit aperture must be > 0")

    @property
    def names(self) -> tuple[str, ...]:
        return PARAM_NAMES[self.kind]

    @property
    def n_params(self) -> int:
        return len(self.names)

    def free_mask(self) -> np.ndarray:
        return np.array([n not in self.fixed_params for n in self.names])

    def apply_fixed(self, params) -> np.ndarray:
        p = np.array(params, dtype=float)
        for i, n in enumerate(self.names):
            if n in self.fixed_params:
                p[i] = self.fixed_params[n]
        return p

    def as_dict(self, params) -> dict:
        return {n: float(v) for n, v in zip(self.names, params)}


@dataclass
class FitResult:
    params: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    param_stderr: np.ndarray


def _check_params(model: FitModel, params) -> np.ndarray:
    p = np.asarray(params, dtype=float)
    if p.shape != (model.n_params,):
        raise InvalidInput(f"{model.kind} needs {model.n_params} parameters, got {p.shape}")
    for name in POSITIVE[model.kind]:
        if not p[model.names.index(name)] > 0:
            raise InvalidParameter(f"{model.kind} parameter {name} must be > 0, got {p[model.names.index(name)]!r}")
    return p


def _sinc_and_slope(u):
    """sinc(u) = sin(u)/u and its derivative, with series near zero."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-4
    us = np.where(small, 1.0, u)
    s = np.where(small, 1 - u * u / 6, np.sin(us) / us)
    ds = np.where(small, -u / 3 + u ** 3 / 30, (us * np.cos(us) - np.sin(us)) / us ** 2)
    return s, ds


def model_eval(model: FitModel, params, x):
    p = _check_params(model, params)
    x = np.asarray(x, dtype=float)
    if model.kind == "gaussian":
        a, xc, w, b = p
        return b + a * np.exp(-((x - xc) ** 2) / (2 * w * w))
    if model.kind == "double_slit":
        a, x0, period, phase, vis, b = p
        s, _ = _sinc_and_slope(math.pi * model.aperture * (x - x0))
        return b + a * s * s * (1 + vis * np.cos(TWO_PI * (x - x0) / period + phase))
    a, psi, b, period = p
    return b + a * np.cos(TWO_PI * x / period + psi)


def model_jacobian(model: FitModel, params, x) -> np.ndarray:
    """Analytic d(model)/d(params), shape (len(x), n_params)."""
    p = _check_params(model, params)
    x = np.asarray(x, dtype=float)
    if model.kind == "gaussian":
        a, xc, w, _ = p
        d = x - xc
        g = np.exp(-d * d / (2 * w * w))
        return np.column_stack([g, a * g * d / w ** 2, a * g * d * d / w ** 3, np.ones_like(x)])
    if model.kind == "double_slit":
        a, x0, period, phase, vis, _ = p
        d = x - x0
        s, ds = _sinc_and_slope(math.pi * model.aperture * d)
        env = s * s
        denv_du = 2 * s * ds
        k = TWO_PI * d / period + phase
        cos_k, sin_k = np.cos(k), np.sin(k)
        mod = 1 + vis * cos_k
        return np.column_stack([
            env * mod,
            a * (-math.pi * model.aperture * denv_du * mod + env * vis * sin_k * TWO_PI / period),
            a * env * vis * sin_k * TWO_PI * d / period ** 2,
            -a * env * vis * sin_k,
            a * env * cos_k,
            np.ones_like(x),
        ])
    a, psi, _, period = p
    k = TWO_PI * x / period + psi
    return np.column_stack([np.cos(k), -a * np.sin(k), np.ones_like(x), a * np.sin(k) * TWO_PI * x / period ** 2])


def numerical_jacobian(model: FitModel, params, xs) -> np.ndarray:
    """Central differences with step max(1e-6, 1e-6 |p|)."""
    p = np.asarray(params, dtype=float)
    cols = []
    for i in range(p.size):
        h = max(1e-6, 1e-6 * abs(p[i]))
        up, dn = p.copy(), p.copy()
        up[i] += h
        dn[i] -= h
        cols.append((model_eval(model, up, xs) - model_eval(model, dn, xs)) / (2 * h))
    return np.column_stack(cols)


def _wrap(angle: float) -> float:
    return float(math.remainder(angle, TWO_PI))


def canonical_params(model: FitModel, params) -> np.ndarray:
    """Fold sign-degenerate solutions onto V >= 0 / A >= 0 and wrap phases to [-pi, pi]."""
    p = np.array(params, dtype=float)
    names = model.names
    if model.kind == "double_slit":
        iv, iph = names.index("V"), names.index("phase")
        if p[iv] < 0 and "V" not in model.fixed_params and "phase" not in model.fixed_params:
            p[iv], p[iph] = -p[iv], p[iph] + math.pi
        if "phase" not in model.fixed_params:
            p[iph] = _wrap(p[iph])
    elif model.kind == "fringe":
        ia, ips = names.index("A"), names.index("psi")
        if p[ia] < 0 and "A" not in model.fixed_params and "psi" not in model.fixed_params:
            p[ia], p[ips] = -p[ia], p[ips] + math.pi
        if "psi" not in model.fixed_params:
            p[ips] = _wrap(p[ips])
    return p


@dataclass(frozen=True)
class LMOptions:
    max_iter: int = 200
    initial_damping: float = 1e-9
    max_damping: float = 1e16
    rtol_residual: float = 1e-10
    rtol_step: float = 1e-8


def _unpack(data):
    if isinstance(data, Pattern):
        return data.abscissa, data.counts
    x, y = data
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def _valid(model: FitModel, p: np.ndarray) -> bool:
    if not np.all(np.isfinite(p)):
        return False
    return all(p[model.names.index(n)] > 0 for n in POSITIVE[model.kind])


def _identified(jac: np.ndarray, scales: np.ndarray, y_norm: float, rcond: float = 1e-10) -> bool:
    """False when some parameter has no numerical influence on the model.

    A column is negligible when moving its parameter by its own scale changes
    the model by less than ``rcond`` of the data norm; the remaining columns
    are normalized and checked for collinearity.
    """
    if not np.all(np.isfinite(jac)):
        return False
    norms = np.linalg.norm(jac, axis=0)
    if np.any(norms * scales <= rcond * max(y_norm, 1e-300)):
        return False
    sv = np.linalg.svd(jac / norms, compute_uv=False)
    return bool(sv[-1] > rcond * sv[0])


def least_squares(model: FitModel, data, init, opts: LMOptions | None = None) -> FitResult:
    """Minimize the sum of squared residuals with a damped Gauss-Newton iteration.

    The damping is multiplied by 10 on a rejected step and divided by 10 on an
    accepted one. Convergence needs a relative drop in the residual sum below
    ``rtol_residual`` (or a residual at round-off level) together with a
    largest relative parameter step below ``rtol_step``. A stationary point
    at which some parameter is not identified (rank-deficient Jacobian) is
    reported as not converged.
    """
    opts = opts or LMOptions()
    x, y = _unpack(data)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidInput("data abscissa and ordinate must be equal-length 1-D arrays")
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise InvalidInput("data contain NaN or infinite values")
    p = model.apply_fixed(init)
    if p.shape != (model.n_params,) or not np.all(np.isfinite(p)):
        raise InvalidInput(f"initial parameters must be {model.n_params} finite numbers")
    _check_params(model, p)
    free = model.free_mask()
    n_free = int(free.sum())
    if x.size <= n_free:
        raise InvalidInput(f"{x.size} data points cannot determine {n_free} free parameters")

    def cost(params):
        r = y - model_eval(model, params, x)
        return float(r @ r), r

    s_cur, r_cur = cost(p)
    floor = (1e-12) ** 2 * float(y @ y)
    lam = opts.initial_damping
    converged = False
    iterations = 0
    if not math.isfinite(s_cur):
        raise InvalidInput("model is not finite at the initial parameters")

    while iterations < opts.max_iter and not converged:
        iterations += 1
        jac = model_jacobian(model, p, x)[:, free]
        jtj = jac.T @ jac
        grad = jac.T @ r_cur
        diag = np.diag(jtj).copy()
        diag = np.maximum(diag, 1e-12 * max(diag.max(), 1e-300))
        accepted = False
        while lam <= opts.max_damping:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            if not np.all(np.isfinite(step)):
                lam *= 10
                continue
            trial = p.copy()
            trial[free] += step
            rel_step = float(np.max(np.abs(step) / np.maximum(np.abs(p[free]), 1e-6)))
            if _valid(model, trial):
                s_new, r_new = cost(trial)
            else:
                s_new, r_new = math.inf, None
            if math.isfinite(s_new) and s_new <= s_cur:
                rel_drop = (s_cur - s_new) / max(s_cur, 1e-300)
                p, s_cur, r_cur = trial, s_new, r_new
                lam = max(lam / 10, 1e-15)
                accepted = True
                if (rel_drop < opts.rtol_residual or s_cur <= floor) and rel_step < opts.rtol_step:
                    converged = True
                break
            if math.isfinite(s_new) and rel_step < opts.rtol_step and \
                    (s_new - s_cur) <= opts.rtol_residual * max(s_cur, floor, 1e-300):
                # stationary within round-off: no descent left to find
                converged = True
                break
            lam *= 10
        if not accepted and not converged:
            break

    p = canonical_params(model, p)
    s_cur, _ = cost(p)
    stderr = np.zeros(model.n_params)
    dof = x.size - n_free
    jac = model_jacobian(model, p, x)[:, free]
    scales = np.maximum(np.abs(p[free]), 1.0)
    if converged and not _identified(jac, scales, float(np.linalg.norm(y))):
        converged = False
    cov = np.linalg.pinv(jac.T @ jac) * (s_cur / dof)
    stderr[free] = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    stderr = np.where(np.isfinite(stderr), stderr, 0.0)
    return FitResult(params=p, residual_norm=math.sqrt(s_cur), iterations=iterations,
                     converged=converged, param_stderr=stderr)


# -- initial guesses ---------------------------------------------------------

def guess_gaussian(x, y) -> np.ndarray:
    x, y = np.asarray(x, float), np.asarray(y, float)
    lo, hi = float(y.min()), float(y.max())
    i = int(np.argmax(y))
    above = x[y >= lo + 0.5 * (hi - lo)]
    fwhm = float(above.max() - above.min()) if above.size > 1 else float(np.ptp(x)) / 10
    fwhm = max(fwhm, float(np.min(np.diff(x))))
    return np.array([hi - lo, x[i], fwhm / (2 * math.sqrt(2 * math.log(2))), lo])


def _best_harmonic(x, y, periods, columns):
    """Scan trial periods; at each solve the linear model [columns, env*cos, env*sin]."""
    best = None
    for period in periods:
        k = TWO_PI * x / period
        design = np.column_stack(columns + [columns[-1] * np.cos(k), columns[-1] * np.sin(k)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = y - design @ coef
        score = float(resid @ resid)
        if best is None or score < best[0]:
            best = (score, period, coef)
    return best[1], best[2]


def guess_double_slit(x, y, aperture: float) -> np.ndarray:
    x, y = np.asarray(x, float), np.asarray(y, float)
    w = y - y.min()
    x0 = float((w * x).sum() / w.sum()) if w.sum() > 0 else float(x[np.argmax(y)])
    s, _ = _sinc_and_slope(math.pi * aperture * (x - x0))
    env = s * s
    dx = float(np.min(np.diff(x)))
    periods = np.geomspace(4 * dx, max(np.ptp(x) / 1.5, 5 * dx), 300)
    period, (b, a, c, d) = _best_harmonic(x - x0, y, periods, [np.ones_like(x), env])
    amp = a if abs(a) > 1e-300 else float(np.ptp(y))
    vis = math.hypot(c, d) / abs(amp)
    phase = math.atan2(-d, c) if amp > 0 else math.atan2(d, -c)
    return np.array([abs(amp), x0, period, phase, min(vis, 1.0), b])


def guess_fringe(theta, y) -> np.ndarray:
    t, y = np.asarray(theta, float), np.asarray(y, float)
    dt = float(np.min(np.diff(t)))
    periods = np.geomspace(4 * dt, max(np.ptp(t), 5 * dt), 400)
    period, (b, c, d) = _best_harmonic(t, y, periods, [np.ones_like(t)])
    return np.array([math.hypot(c, d), math.atan2(-d, c), b, period])


def initial_guess(model: FitModel, data) -> np.ndarray:
    x, y = _unpack(data)
    if model.kind == "gaussian":
        g = guess_gaussian(x, y)
    elif model.kind == "double_slit":
        g = guess_double_slit(x, y, model.aperture)
    else:
        g = guess_fringe(x, y)
    return model.apply_fixed(g)


def fit(model: FitModel, data, init=None, opts: LMOptions | None = None) -> FitResult:
    """:func:`least_squares` with a data-driven starting point when ``init`` is omitted."""
    if init is None:
        init = initial_guess(model, data)
    return least_squares(model, data, init, opts)


# -- visibility --------------------------------------------------------------

def visibility_raw(pattern: Pattern, window: tuple[float, float] | None = None) -> float:
    x, y = pattern.abscissa, pattern.counts
    if window is not None:
        lo, hi = window
        y = y[(x >= lo) & (x <= hi)]
    if y.size == 0:
        raise InvalidInput("no samples in the visibility window")
    hi_v, lo_v = float(y.max()), float(y.min())
    if hi_v + lo_v <= 0:
        raise InvalidInput("visibility undefined for an all-zero pattern")
    return (hi_v - lo_v) / (hi_v + lo_v)


def visibility_from_fit(result: FitResult, model: FitModel) -> float:
    if not result.converged:
        raise InvalidState("visibility requested from a fit that did not converge")
    p = model.as_dict(result.params)
    if model.kind == "double_slit":
        v = p["V"]
    elif model.kind == "fringe":
        if p["B"] == 0:
            raise InvalidState("fringe offset is zero; visibility undefined")
        v = p["A"] / p["B"]
    else:
        raise InvalidInput("a gaussian fit carries no visibility")
    if 0.0 <= v <= 1.0:
        return v
    if -0.05 < v < 1.05:
        warnings.warn(f"fitted visibility {v:.4f} clipped to [0, 1]", VisibilityClipped, stacklevel=2)
        return min(max(v, 0.0), 1.0)
    raise InvalidState(f"fitted visibility {v:.4f} is far outside [0, 1]")
