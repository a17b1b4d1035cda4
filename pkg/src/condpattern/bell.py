"""Polarization correlations and CHSH tests for the two-crystal source."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .biphoton import _check_pair
from .errors import InvalidInput, InvalidState

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2 * SQRT2


@dataclass(frozen=True)
class BellSettings:
    a: float = 0.0
    a_prime: float = math.pi / 4
    b: float = math.pi / 8
    b_prime: float = 3 * math.pi / 8

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInput(f"Bell setting {name} must be finite")


STANDARD = BellSettings()


def _check_gamma(gamma: float) -> float:
    if not 0.0 <= gamma <= 1.0:
        raise InvalidInput(f"gamma must lie in [0, 1], got {gamma!r}")
    return float(gamma)


def joint_probability(alpha, beta, phi, gamma, a_s, a_i) -> float:
    """Probability of passing a signal analyzer at ``a_s`` and an idler analyzer at ``a_i``."""
    alpha, beta = _check_pair(alpha, beta)
    gamma = _check_gamma(gamma)
    cs, ss = math.cos(a_s), math.sin(a_s)
    ci, si = math.cos(a_i), math.sin(a_i)
    p = (alpha * alpha * cs * cs * ci * ci + beta * beta * ss * ss * si * si
         + 2 * gamma * alpha * beta * cs * ci * ss * si * math.cos(phi))
    return max(p, 0.0)


def correlation_E(alpha, beta, phi, gamma, a, b) -> float:
    perp = math.pi / 2
    pp = joint_probability(alpha, beta, phi, gamma, a, b)
    mm = joint_probability(alpha, beta, phi, gamma, a + perp, b + perp)
    pm = joint_probability(alpha, beta, phi, gamma, a, b + perp)
    mp = joint_probability(alpha, beta, phi, gamma, a + perp, b)
    total = pp + mm + pm + mp
    if total <= 0:
        raise InvalidState("all four joint probabilities vanish; correlation undefined")
    return (pp + mm - pm - mp) / total


def chsh_from_state(alpha, beta, phi, gamma, s: BellSettings = STANDARD) -> float:
    def e(x, y):
        return correlation_E(alpha, beta, phi, gamma, x, y)

    return e(s.a, s.b) - e(s.a, s.b_prime) + e(s.a_prime, s.b) + e(s.a_prime, s.b_prime)


def chsh_from_visibility(v: float) -> tuple[float, bool]:
    """CHSH value implied by a uniform fringe visibility ``v``.

    The inequality is violated only when ``v`` strictly exceeds 1/sqrt(2).
    """
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise InvalidInput(f"visibility must lie in [0, 1], got {v!r}")
    return TSIRELSON * v, v > 1 / SQRT2
