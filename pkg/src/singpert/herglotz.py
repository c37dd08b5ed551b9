"""Herglotz transform of a measure, its real boundary values, and the
regularized inverse-square moments used to decide where those boundary
values exist.

For a measure ``mu`` with finite ``int dmu/(1+x^2)``::

    F(z) = int (1/(x - z) - x/(1 + x^2)) dmu(x),      Im z > 0
    G_n(lam) = int dmu(x) / ((x - lam)^2 + 1/n^2) = n * Im F(lam + i/n)

``G_n`` increases with ``n`` to ``I(y) = int dmu/(x - y)^2``. Where ``I(y)`` is
finite, ``F(y + i0)`` exists and is real.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ForbiddenEnergy, NonUpperHalfPlane, NumericalError
from .measure import MERGE_RTOL, Measure, merge_tolerance, scaled_moments, shift_poly, weighted_integral


@dataclass(frozen=True)
class HerglotzEval:
    value: complex
    at: complex


@dataclass(frozen=True)
class ClassifierConfig:
    """Thresholds of the convergent/divergent decision.

    The ladder evaluates G_n at n = 2^0 .. 2^kmax. A point is convergent when
    ``window`` consecutive relative increments drop below ``rtol`` and the
    last value stays below ``cap``.
    """

    kmax: int = 60
    rtol: float = 1e-10
    window: int = 3
    cap: float = 1e12

    def __post_init__(self):
        if self.kmax < self.window or self.window < 1:
            raise ValueError("need kmax >= window >= 1")
        if not (self.rtol > 0 and self.cap > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_CLASSIFIER = ClassifierConfig()


@dataclass(frozen=True)
class GnWitness:
    kmax: int
    last: float
    growth_ratio: float
    stabilized_at: int | None = None  # first k of the stable window


@dataclass(frozen=True)
class EnergyClass:
    """Outcome of the inverse-square moment test at one energy."""

    convergent: bool
    moment: float | None
    witness: GnWitness | None
    reason: str = ""

    @property
    def tag(self):
        return "Convergent" if self.convergent else "Divergent"

    def to_dict(self):
        out = {"class": self.tag, "moment": self.moment, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = {
                "kmax": self.witness.kmax,
                "last": self.witness.last,
                "growth_ratio": self.witness.growth_ratio,
                "stabilized_at": self.witness.stabilized_at,
            }
        return out


# --- transform ------------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def _piece_offset(piece):
    """int p(x) x/(1+x^2) dx over the piece."""
    return weighted_integral(Measure(pieces=[piece]), "identity_over_one_plus_sq")


def _pieces_complex(m, lam, eta):
    """Piece contributions to Re F and Im F at lam + i*eta (arrays)."""
    re = np.zeros(lam.shape)
    im = np.zeros(lam.shape)
    for p in m.active_pieces:
        q = shift_poly(p.coeffs, lam)
        mom = scaled_moments(p.a - lam, p.b - lam, eta, 4)
        re += sum(q[j] * mom[j + 1] for j in range(4)) - _piece_offset(p)
        im += eta * sum(q[j] * mom[j] for j in range(4))
    return re, im


def transform_values(m, z):
    """Vectorized F(z); ``z`` is any array of points with Im z > 0."""
    z = np.asarray(z, dtype=np.complex128)
    flat = z.ravel()
    if np.any(~(flat.imag > 0)):
        raise NonUpperHalfPlane("Herglotz transform needs Im z > 0")
    re, im = kernels.herglotz_atoms(m.x, m.w, flat.real, flat.imag)
    if m.active_pieces:
        pre, pim = _pieces_complex(m, flat.real, flat.imag)
        re, im = re + pre, im + pim
    return (re + 1j * im).reshape(z.shape)


def transform(m, z):
    """F_mu(z) for a single point of the open upper half-plane."""
    z = complex(z)
    if not z.imag > 0:
        raise NonUpperHalfPlane(f"Im z must be > 0, got {z!r}")
    return HerglotzEval(complex(transform_values(m, np.array([z]))[0]), z)


def g_n(m, lam, n):
    """G_n(lam) = int dmu / ((x - lam)^2 + 1/n^2), in closed form.

    ``lam`` may be an array; a scalar input returns a float.
    """
    scalar = np.ndim(lam) == 0
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=np.float64))
    eta = 1.0 / float(n)
    out = kernels.gn_atoms(m.x, m.w, lam_arr, eta)
    for p in m.active_pieces:
        q = shift_poly(p.coeffs, lam_arr)
        mom = scaled_moments(p.a - lam_arr, p.b - lam_arr, eta, 3)
        out = out + sum(q[j] * mom[j] for j in range(4))
    return float(out[0]) if scalar else out


# --- classification ---------------------------------------------------------

def _nearest_atom_distance(x, y):
    if x.size == 0:
        return np.full(y.shape, np.inf)
    idx = np.clip(np.searchsorted(x, y), 1, max(x.size - 1, 1))
    left = np.abs(y - x[idx - 1])
    right = np.abs(x[np.minimum(idx, x.size - 1)] - y)
    return np.minimum(left, right)


def piece_vanishing_order(p, y):
    """Order (0, 1 or 2+) to which the density of ``p`` vanishes at ``y``.

    Decided from the shifted coefficients; relative tolerance 1e-12 of the
    piece scale.
    """
    q = shift_poly(p.coeffs, y)
    tol = 1e-12 * p.scale()
    if abs(q[0]) > tol:
        return 0
    if abs(q[1]) > tol:
        return 1
    return 2


def _piece_status(m, y):
    """Per point: True if a nonvanishing density covers it; plus the set
    of indices of pieces with a double zero at the point."""
    blocked = np.zeros(y.shape, dtype=bool)
    double_zero = [[] for _ in range(y.size)]
    for pi, p in enumerate(m.active_pieces):
        inside = np.flatnonzero((y >= p.a) & (y <= p.b))
        for i in inside:
            if piece_vanishing_order(p, float(y[i])) < 2:
                blocked[i] = True
            else:
                double_zero[i].append(pi)
    return blocked, double_zero


def gn_ladder(m, y, kmax=60, double_zero=None):
    """G_{2^k}(y) for k = 0..kmax, shape (len(y), kmax + 1)."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    ladder = kernels.gn_ladder(m.x, m.w, y, kmax)
    pieces = m.active_pieces
    for pi, p in enumerate(pieces):
        q = np.array(shift_poly(p.coeffs, y)) * np.ones((1, y.size))
        if double_zero is not None:
            for i, dz in enumerate(double_zero):
                if pi in dz:
                    q[0, i] = q[1, i] = 0.0
        for k in range(kmax + 1):
            mom = scaled_moments(p.a - y, p.b - y, 2.0**-k, 3)
            ladder[:, k] += (q * mom).sum(axis=0)
    return ladder


def classify_energies(m, y, config=DEFAULT_CLASSIFIER):
    """Vectorized :func:`inverse_square_moment` over an array of energies."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    tol = MERGE_RTOL * np.maximum(1.0, np.abs(y))
    on_atom = _nearest_atom_distance(m.x, y) < tol
    blocked, double_zero = _piece_status(m, y)
    todo = np.flatnonzero(~on_atom & ~blocked)
    out = [None] * y.size
    for i in np.flatnonzero(on_atom):
        out[i] = EnergyClass(False, None, None, "atom")
    for i in np.flatnonzero(blocked & ~on_atom):
        out[i] = EnergyClass(False, None, None, "density")
    if todo.size:
        ladder = gn_ladder(m, y[todo], config.kmax,
                           [double_zero[i] for i in todo])
        for row, i in zip(ladder, todo):
            out[i] = _classify_ladder(row, config)
    return out


def _classify_ladder(row, config):
    last = float(row[-1])
    prev = float(row[-2])
    growth = last / prev if prev > 0 else (1.0 if last == 0 else math.inf)
    if last == 0.0:
        return EnergyClass(True, 0.0, GnWitness(config.kmax, 0.0, 1.0, 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        inc = np.diff(row) / row[1:]
    small = inc < config.rtol
    stable = None
    run = 0
    for k, ok in enumerate(small, start=1):
        run = run + 1 if ok else 0
        if run >= config.window:
            stable = k - config.window + 1
            break
    witness = GnWitness(config.kmax, last, growth, stable)
    if last > config.cap:
        return EnergyClass(False, None, witness, "cap")
    if stable is None:
        return EnergyClass(False, None, witness, "growth")
    return EnergyClass(True, last, witness)


def inverse_square_moment(m, y, config=DEFAULT_CLASSIFIER):
    """Classify ``y`` as Convergent(I) or Divergent via the G_n ladder.

    Atoms at ``y`` (within merge tolerance) and densities not vanishing to
    second order at ``y`` are divergent without running the ladder.
    """
    return classify_energies(m, np.array([float(y)]), config)[0]


def inverse_square_exact(m, y):
    """Closed-form int dmu/(x-y)^2; ``inf`` where it diverges."""
    y = float(y)
    if m.x.size and np.min(np.abs(m.x - y)) < merge_tolerance(y):
        return math.inf
    total = float(np.sum(m.w / (m.x - y) ** 2))
    for p in m.active_pieces:
        q = shift_poly(p.coeffs, y)
        ta, tb = p.a - y, p.b - y
        if ta <= 0 <= tb:
            if piece_vanishing_order(p, y) < 2:
                return math.inf
            total += q[2] * (tb - ta) + q[3] * (tb**2 - ta**2) / 2
        else:
            total += (q[0] * (1 / ta - 1 / tb) + q[1] * math.log(tb / ta)
                      + q[2] * (tb - ta) + q[3] * (tb**2 - ta**2) / 2)
    return total


# --- boundary values ----------------------------------------------------------

def boundary_values_unchecked(m, y):
    """F(y + i0) by closed form, without checking the moment condition.

    Valid off the atoms and off densities not vanishing to second order;
    used by the root finders on intervals already known to be admissible.
    """
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    shift = float(np.sum(m.w * m.x / (1.0 + m.x * m.x)))
    out = kernels.stieltjes_real(m.x, m.w, y) - shift
    for p in m.active_pieces:
        q = shift_poly(p.coeffs, y)
        ta, tb = p.a - y, p.b - y
        inside = (ta <= 0) & (tb >= 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            logterm = np.where(inside, 0.0, q[0] * np.log(np.abs(tb / ta)))
        out = out + logterm + q[1] * (tb - ta) + q[2] * (tb**2 - ta**2) / 2 \
            + q[3] * (tb**3 - ta**3) / 3 - _piece_offset(p)
    return out


def boundary_value(m, y, config=DEFAULT_CLASSIFIER, eps=1e-6):
    """lim F(y + i eps) as eps -> 0, for energies with a finite moment.

    Raises :class:`ForbiddenEnergy` if the inverse-square moment diverges.
    The value is cross-checked against ``|Im F(y + i eps)| <= eps * I(y)``.
    """
    y = float(y)
    cls = inverse_square_moment(m, y, config)
    if not cls.convergent:
        raise ForbiddenEnergy(y)
    value = float(boundary_values_unchecked(m, np.array([y]))[0])
    im = transform(m, complex(y, eps)).value.imag
    if abs(im) > eps * cls.moment * (1 + 1e-9) + 1e-300:
        raise NumericalError(
            f"boundary check failed at y={y}: Im F={im} > eps*I={eps * cls.moment}")
    return value
