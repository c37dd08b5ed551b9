"""Maps between the coupling pair (alpha, c), the real parameter gamma, the
unimodular number v and the extension angle theta in [0, pi).

``alpha = math.inf`` and ``gamma = math.inf`` are first-class values: the
former is the extension missing from the regular coupling family, the latter
the unperturbed operator (``v = 1``, ``theta = pi/2``).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ExcludedAngle, NotUnimodular

ANGLE_TOL = 1e-12
UNIMODULAR_TOL = 1e-12


@dataclass(frozen=True)
class Coupling:
    alpha: float
    c: float

    def __post_init__(self):
        if math.isnan(self.alpha) or not math.isfinite(self.c):
            raise ValueError("alpha must be real or infinite, c finite")


def _arg(z):
    """Argument of ``z`` in [0, 2*pi)."""
    a = math.atan2(z.imag, z.real)
    if a < 0:
        a += 2 * math.pi
    return 0.0 if a >= 2 * math.pi else a


def reduce_angle(theta):
    """theta modulo pi, in [0, pi)."""
    t = math.fmod(theta, math.pi)
    if t < 0:
        t += math.pi
    return 0.0 if t >= math.pi else t


def angle_distance(t1, t2):
    """Distance between two angles on the circle R / pi Z."""
    d = reduce_angle(t1 - t2)
    return min(d, math.pi - d)


def gamma_from_coupling(alpha, c):
    """gamma = -(1/alpha + c); alpha = 0 gives infinity, alpha = inf gives -c."""
    if alpha == 0:
        return math.inf
    if math.isinf(alpha):
        return -c
    return -(1.0 / alpha + c)


def v_from_gamma(gamma):
    """v = (gamma + i)/(gamma - i), with v = 1 at gamma = infinity."""
    if math.isinf(gamma):
        return 1.0 + 0.0j
    # (g + i)/(g - i) = (g + i)^2 / (g^2 + 1), exactly unimodular in exact
    # arithmetic; the division by |.|^2 keeps rounding at ~1 ulp
    num = complex(gamma, 1.0)
    return num * num / (gamma * gamma + 1.0)


def theta_from_v(v):
    """theta = arg(-v)/2 with arg valued in [0, 2*pi)."""
    v = complex(v)
    if abs(abs(v) - 1.0) > UNIMODULAR_TOL:
        raise NotUnimodular(f"|v| = {abs(v)!r} is not 1")
    return reduce_angle(0.5 * _arg(-v))


def theta_from_coupling(alpha, c):
    """Extension angle of the coupling pair (the map Psi_c).

    theta = arg[-(1 + alpha(c - i)) / (1 + alpha(c + i))] / 2. Infinite alpha
    goes through gamma = -c.
    """
    if math.isinf(alpha):
        return theta_from_v(v_from_gamma(-c))
    ratio = -(1 + alpha * complex(c, -1.0)) / (1 + alpha * complex(c, 1.0))
    return reduce_angle(0.5 * _arg(ratio))


def excluded_angle(c):
    """theta' = arg(-(c - i)/(c + i))/2, the image of alpha = infinity."""
    return reduce_angle(0.5 * _arg(-complex(c, -1.0) / complex(c, 1.0)))


def coupling_from_theta(theta, c):
    """Inverse of :func:`theta_from_coupling` for fixed ``c``.

    alpha = -(1 + e^{2 i theta}) / (c - i + (c + i) e^{2 i theta}). Raises
    :class:`ExcludedAngle` at theta = 0 and at theta' (where alpha would be
    infinite or the map leaves its open domain).
    """
    theta = float(theta)
    if not 0.0 <= theta < math.pi:
        raise ExcludedAngle(f"theta={theta} outside [0, pi)")
    if angle_distance(theta, 0.0) < ANGLE_TOL:
        raise ExcludedAngle("theta = 0 is outside the image (0, pi)")
    tp = excluded_angle(c)
    if angle_distance(theta, tp) < ANGLE_TOL:
        raise ExcludedAngle(f"theta = theta' = {tp} corresponds to alpha = infinity")
    e = cmath.exp(2j * theta)
    alpha = -(1 + e) / (complex(c, -1.0) + complex(c, 1.0) * e)
    return Coupling(alpha.real, float(c))


def chain(alpha, c):
    """All intermediate parameters for one coupling, as a dict."""
    gamma = gamma_from_coupling(alpha, c)
    v = v_from_gamma(gamma)
    return {
        "alpha": alpha,
        "c": c,
        "gamma": gamma,
        "v": v,
        "theta": theta_from_v(v),
    }
