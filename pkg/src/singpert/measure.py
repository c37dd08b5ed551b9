"""Finite positive measures on the real line: atoms plus cubic densities.

A :class:`Measure` is a sum of point masses and of densities given by
polynomials of degree at most three on closed intervals. Every integral the
rest of the package needs against such a density has a closed-form
antiderivative; the helpers at the bottom of this module provide them.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

MERGE_RTOL = 1e-12
MAX_ATOMS = 10**6
MAX_PIECES = 10**4
MAX_DEGREE = 3

KERNELS = ("inv_one_plus_sq", "identity_over_one_plus_sq")


def merge_tolerance(x):
    """Distance below which two atoms near ``x`` are treated as one."""
    return MERGE_RTOL * max(1.0, abs(x))


@dataclass(frozen=True)
class Window:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError("window bounds must be finite")
        if not self.lo < self.hi:
            raise ValidationError(f"empty window [{self.lo}, {self.hi}]")

    def __contains__(self, y):
        return self.lo <= y <= self.hi


@dataclass(frozen=True)
class Piece:
    """Density ``sum_j coeffs[j] * x**j`` on ``[a, b]``."""

    a: float
    b: float
    coeffs: tuple = field(default=(1.0,))

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if not 1 <= len(c) <= MAX_DEGREE + 1:
            raise ValidationError(f"density degree must be <= {MAX_DEGREE}")
        c = c + (0.0,) * (MAX_DEGREE + 1 - len(c))
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    def density(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    @property
    def is_zero(self):
        return not any(self.coeffs)

    def scale(self):
        """Magnitude used for relative zero tests of the density."""
        m = max(abs(self.a), abs(self.b), 1.0)
        return max(abs(c) * m**j for j, c in enumerate(self.coeffs)) or 1.0


class Measure:
    """Immutable atoms + piecewise-cubic density.

    Atoms closer than ``merge_tolerance`` are merged on construction (weights
    added). Construction only checks structure; use :func:`validate` for the
    positivity and integrability invariants.
    """

    __slots__ = ("x", "w", "pieces")

    def __init__(self, atoms=(), pieces=()):
        arr = np.asarray(atoms, dtype=np.float64).reshape(-1, 2)
        if arr.shape[0] > MAX_ATOMS:
            raise ValidationError(f"more than {MAX_ATOMS} atoms")
        pieces = tuple(p if isinstance(p, Piece) else Piece(*p) for p in pieces)
        if len(pieces) > MAX_PIECES:
            raise ValidationError(f"more than {MAX_PIECES} density pieces")
        x, w = _merge_atoms(arr[:, 0], arr[:, 1])
        x.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "pieces", pieces)

    def __setattr__(self, name, value):
        raise AttributeError("Measure is immutable")

    def __repr__(self):
        return f"Measure(<{self.x.size} atoms>, <{len(self.pieces)} pieces>)"

    def __eq__(self, other):
        if not isinstance(other, Measure):
            return NotImplemented
        return (np.array_equal(self.x, other.x)
                and np.array_equal(self.w, other.w)
                and self.pieces == other.pieces)

    __hash__ = None

    @property
    def atoms(self):
        return list(zip(self.x.tolist(), self.w.tolist()))

    @property
    def is_atomic(self):
        return all(p.is_zero for p in self.pieces)

    @property
    def active_pieces(self):
        return tuple(p for p in self.pieces if not p.is_zero)

    def is_zero(self):
        return self.x.size == 0 and not self.active_pieces

    def total_mass(self):
        """Total mass; atoms exactly, densities by polynomial antiderivative."""
        total = float(self.w.sum())
        for p in self.pieces:
            anti = np.polynomial.polynomial.polyint(p.coeffs)
            total += float(np.polynomial.polynomial.polyval(p.b, anti)
                           - np.polynomial.polynomial.polyval(p.a, anti))
        return total

    def support_hull(self):
        """Smallest closed interval containing supp(mu), or None if empty."""
        lo, hi = math.inf, -math.inf
        if self.x.size:
            lo, hi = float(self.x[0]), float(self.x[-1])
        for p in self.active_pieces:
            lo, hi = min(lo, p.a), max(hi, p.b)
        return None if lo > hi else (lo, hi)

    # serialization -------------------------------------------------------

    def to_dict(self):
        return {
            "atoms": [{"x": float(x), "w": float(w)} for x, w in self.atoms],
            "ac": [{"a": p.a, "b": p.b, "coeffs": list(p.coeffs)}
                   for p in self.pieces],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            atoms = [(float(a["x"]), float(a["w"])) for a in data.get("atoms", [])]
            pieces = [Piece(float(p["a"]), float(p["b"]),
                            tuple(float(c) for c in p["coeffs"]))
                      for p in data.get("ac", [])]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed measure JSON: {exc}") from exc
        return cls(atoms, pieces)

    def to_json(self):
        from .report import dumps
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError("measure JSON must be an object")
        return cls.from_dict(data)


def _merge_atoms(x, w):
    if x.size == 0:
        return np.empty(0), np.empty(0)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        raise ValidationError("atom locations and weights must be finite")
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    gaps = np.diff(x)
    tol = MERGE_RTOL * np.maximum(1.0, np.abs(x[:-1]))
    if not np.any(gaps < tol):
        return x.copy(), w.copy()
    keep_x, keep_w = [x[0]], [w[0]]
    for xi, wi in zip(x[1:], w[1:]):
        if xi - keep_x[-1] < merge_tolerance(keep_x[-1]):
            keep_w[-1] += wi
        else:
            keep_x.append(xi)
            keep_w.append(wi)
    return np.array(keep_x), np.array(keep_w)


@dataclass
class ValidationReport:
    valid: bool
    problems: list
    mass: float  # integral of 1/(1+x^2) d mu

    def to_dict(self):
        return {"valid": self.valid, "problems": list(self.problems),
                "mass_inv_one_plus_sq": self.mass}


def _piece_minimum(p):
    """Minimum of the density over [a, b] (samples plus critical points)."""
    k = np.arange(16)
    cheb = np.cos((2 * k + 1) * np.pi / 32)
    pts = [p.a, p.b, *(0.5 * (p.a + p.b) + 0.5 * (p.b - p.a) * cheb)]
    deriv = np.polynomial.polynomial.polyder(p.coeffs)
    if np.any(deriv):
        for r in np.polynomial.polynomial.polyroots(np.trim_zeros(deriv, "b")):
            if abs(r.imag) < 1e-12 * max(1.0, abs(r.real)) and p.a <= r.real <= p.b:
                pts.append(r.real)
    return float(np.min(p.density(np.array(pts))))


def validate(m):
    """Check every measure invariant; never raises on bad data."""
    problems = []
    if np.any(m.w <= 0):
        bad = m.x[m.w <= 0]
        problems.append(f"nonpositive atom weight at x={bad.tolist()}")
    for i, p in enumerate(m.pieces):
        if not (math.isfinite(p.a) and math.isfinite(p.b)) or not p.a < p.b:
            problems.append(f"piece {i}: invalid interval [{p.a}, {p.b}]")
            continue
        if not all(math.isfinite(c) for c in p.coeffs):
            problems.append(f"piece {i}: non-finite coefficient")
            continue
        if _piece_minimum(p) < -1e-14 * p.scale():
            problems.append(f"piece {i}: negative density on [{p.a}, {p.b}]")
    mass = math.nan
    if not problems:
        mass = weighted_integral(m, "inv_one_plus_sq")
        if not math.isfinite(mass):
            problems.append("integral of 1/(1+x^2) is not finite")
        elif not m.is_zero() and mass <= 0:
            problems.append("nonzero measure with nonpositive mass")
    return ValidationReport(not problems, problems, mass)


def require_valid(m):
    report = validate(m)
    if not report.valid:
        raise ValidationError("; ".join(report.problems))
    return m


def weighted_integral(m, kernel):
    """Integral of 1/(1+x^2) or x/(1+x^2) against ``m``, in closed form."""
    if kernel not in KERNELS:
        raise ValidationError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    x, w = m.x, m.w
    if kernel == "inv_one_plus_sq":
        total = float(np.sum(w / (1.0 + x * x)))
    else:
        total = float(np.sum(w * x / (1.0 + x * x)))
    off = 0 if kernel == "inv_one_plus_sq" else 1
    for p in m.pieces:
        if p.is_zero:
            continue
        mom = unit_moments(np.array(p.a), np.array(p.b), MAX_DEGREE + 1)
        total += float(sum(c * mom[j + off] for j, c in enumerate(p.coeffs)))
    return total


def dyadic_benchmark(depth, decay):
    """Atoms at the dyadic rationals k/2^m of [-1, 1], m = 1..depth.

    Level m carries 2^m atoms (odd k) of weight ``decay**-m`` each before the
    whole measure is normalized to mass 1.
    """
    depth = int(depth)
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    if decay <= 1:
        raise ValidationError("decay must be > 1")
    if 2 ** (depth + 1) - 2 > MAX_ATOMS:
        raise ValidationError(f"depth {depth} exceeds the {MAX_ATOMS}-atom cap")
    xs, ws = [], []
    for level in range(1, depth + 1):
        den = 2**level
        k = np.arange(-den + 1, den, 2)
        xs.append(k / den)
        ws.append(np.full(k.size, float(decay) ** -level))
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    w = w / math.fsum(w)
    return Measure(np.column_stack([x, w]))


# closed-form moments ------------------------------------------------------

def shift_poly(coeffs, lam):
    """Coefficients of q(t) = p(lam + t) for p given by ``coeffs``."""
    c = list(coeffs)
    n = len(c)
    out = [0.0] * n
    for j in range(n):
        for i in range(j, n):
            out[j] += c[i] * math.comb(i, j) * lam ** (i - j)
    return out


def unit_moments(ua, ub, jmax):
    """m_j = int_{ua}^{ub} u^j / (u^2 + 1) du for j = 0..jmax (vectorized).

    Small |u| uses the geometric series of 1/(1+u^2) to avoid the
    cancellation in the recursion m_j = [u^(j-1)/(j-1)] - m_{j-2}.
    """
    ua = np.asarray(ua, dtype=np.float64)
    ub = np.asarray(ub, dtype=np.float64)
    out = np.empty((jmax + 1,) + np.broadcast(ua, ub).shape)
    with np.errstate(over="ignore", invalid="ignore"):
        out[0] = np.arctan2(ub - ua, 1.0 + ua * ub)
        out[1] = 0.5 * np.log1p((ub - ua) * (ub + ua) / (1.0 + ua * ua))
        for j in range(2, jmax + 1):
            out[j] = (ub ** (j - 1) - ua ** (j - 1)) / (j - 1) - out[j - 2]
    small = np.maximum(np.abs(ua), np.abs(ub)) <= 0.5
    if np.any(small):
        sa, sb = np.broadcast_to(ua, small.shape)[small], np.broadcast_to(ub, small.shape)[small]
        for j in range(jmax + 1):
            acc = np.zeros(sa.shape)
            for k in range(40):
                p = j + 2 * k + 1
                acc += (-1) ** k * (sb**p - sa**p) / p
            out[j, ...][small] = acc
    return out


def scaled_moments(ta, tb, eta, jmax):
    """M_j = int_{ta}^{tb} t^j / (t^2 + eta^2) dt, eta > 0 (vectorized)."""
    eta = np.asarray(eta, dtype=np.float64)
    m = unit_moments(np.asarray(ta) / eta, np.asarray(tb) / eta, jmax)
    for j in range(jmax + 1):
        m[j] *= eta ** (j - 1)
    return m
