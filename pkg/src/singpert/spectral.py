"""Aronszajn-Donoghue eigenvalue criterion for the extension family T_theta.

Given the spectral measure ``mu0`` of the base extension T_theta0, an energy
``y`` is an eigenvalue of T_theta (theta != theta0) exactly when
``int dmu0/(x - y)^2 < inf`` and ``F_mu0(y + i0) = cot(theta - theta0)``.
Off the support, F(y + i0) is strictly increasing, so each gap between
consecutive support components holds at most one root, found by bisection.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import SameExtension, ValidationError
from .herglotz import (
    DEFAULT_CLASSIFIER,
    boundary_value,
    boundary_values_unchecked,
    classify_energies,
    piece_vanishing_order,
)
from .measure import Measure, Window, merge_tolerance, require_valid
from .params import ANGLE_TOL, angle_distance, reduce_angle, theta_from_coupling

SCAN_SCHEMA = "ad-scan/1"
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class AdProblem:
    """Spectral measure ``mu0`` of T_theta0 together with ``theta0``."""

    mu0: Measure
    theta0: float

    def __post_init__(self):
        if not 0.0 <= self.theta0 < math.pi:
            raise ValidationError("theta0 must lie in [0, pi)")


@dataclass
class EigenvalueSet:
    values: list
    near_atom: list

    def __len__(self):
        return len(self.values)


def cot_target(theta, theta0):
    d = theta - theta0
    return math.cos(d) / math.sin(d)


def _check_theta(p, theta, window=None):
    if angle_distance(theta, p.theta0) < ANGLE_TOL:
        atoms = [float(x) for x in p.mu0.x
                 if window is None or window.lo <= x <= window.hi]
        raise SameExtension(theta, atoms)


def _segments(m, window):
    """Closed support components meeting the window, merged and sorted.

    Each entry is (start, end, left_singular, right_singular): singular ends
    are atoms or density endpoints where the density does not vanish, i.e.
    where F(y + i0) runs off to infinity.
    """
    segs = []
    for x in m.x[(m.x >= window.lo) & (m.x <= window.hi)]:
        segs.append([float(x), float(x), True, True])
    for p in m.active_pieces:
        if p.b < window.lo or p.a > window.hi:
            continue
        segs.append([p.a, p.b,
                     piece_vanishing_order(p, p.a) == 0,
                     piece_vanishing_order(p, p.b) == 0])
    segs.sort(key=lambda s: (s[0], s[1]))
    merged = []
    for s in segs:
        if merged and s[0] <= merged[-1][1]:
            last = merged[-1]
            if s[1] > last[1]:
                last[1], last[3] = s[1], s[3]
            elif s[1] == last[1]:
                last[3] = last[3] or s[3]
        else:
            merged.append(s)
    return merged


def _gaps(m, window):
    """Open intervals of the window free of support, clipped off barriers.

    Returns arrays lo, hi and flags telling whether each end touches a
    singular barrier.
    """
    segs = _segments(m, window)
    lo, hi, lsing, rsing = [], [], [], []
    left, left_sing, left_bar = window.lo, False, False
    for s, e, ssing, esing in segs:
        right = s
        a = left + merge_tolerance(left) if left_bar else left
        b = right - merge_tolerance(right)
        squeezed = a >= b and left_bar and left_sing and ssing and right > left
        if squeezed:
            # unresolvable gap between two barriers: F still sweeps all of R
            a = b = 0.5 * (left + right)
        if a < b or squeezed:
            lo.append(a), hi.append(b), lsing.append(left_sing), rsing.append(ssing)
        left, left_sing, left_bar = e, esing, True
    a = left + merge_tolerance(left) if left_bar else left
    b = window.hi
    if a < b:
        lo.append(a), hi.append(b), lsing.append(left_sing), rsing.append(False)
    return np.array(lo), np.array(hi), np.array(lsing, bool), np.array(rsing, bool)


def _isolated_points(m, window):
    """Points inside density pieces where the density has a double zero.

    These are the only support points of a density piece with a finite
    inverse-square moment.
    """
    pts = []
    for p in m.active_pieces:
        cand = [p.a, p.b]
        d = np.polynomial.polynomial.polyder(p.coeffs)
        if np.any(d):
            for r in np.polynomial.polynomial.polyroots(np.trim_zeros(d, "b")):
                if abs(r.imag) < 1e-12 and p.a <= r.real <= p.b:
                    cand.append(float(r.real))
        pts += [y for y in cand if window.lo <= y <= window.hi
                and piece_vanishing_order(p, y) >= 2]
    if not pts:
        return []
    pts = sorted(set(pts))
    classes = classify_energies(m, np.array(pts))
    return [y for y, c in zip(pts, classes) if c.convergent]


def _bisect(m, lo, hi, target, tol):
    if m.is_atomic:
        shift = float(np.sum(m.w * m.x / (1.0 + m.x * m.x)))
        return kernels.bisect_stieltjes(m.x, m.w, lo, hi, target + shift, tol)
    lo, hi = lo.copy(), hi.copy()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        active = (hi - lo > tol) & (mid > lo) & (mid < hi)
        if not active.any():
            break
        f = boundary_values_unchecked(m, mid[active])
        below = f < target[active]
        idx = np.flatnonzero(active)
        lo[idx[below]] = mid[active][below]
        hi[idx[~below]] = mid[active][~below]
    return 0.5 * (lo + hi)


def locate_eigenvalues(p, theta, window, tol=ROOT_TOL):
    """Eigenvalues of T_theta in ``window`` with near-atom flags.

    A root closer to a singular barrier than the merge tolerance cannot be
    resolved; it is reported at the clipped gap end and flagged. A gap
    between two singular barriers narrower than twice the merge tolerance
    still holds one root, reported at its midpoint and flagged.
    """
    _check_theta(p, theta, window)
    m = p.mu0
    target = cot_target(theta, p.theta0)
    lo, hi, lsing, rsing = _gaps(m, window)
    values, flags = [], []
    if lo.size:
        f_lo = boundary_values_unchecked(m, lo)
        f_hi = boundary_values_unchecked(m, hi)
        inside = (f_lo <= target) & (target <= f_hi)
        if inside.any():
            roots = _bisect(m, lo[inside], hi[inside],
                            np.full(int(inside.sum()), target), tol)
            values += roots.tolist()
            flags += [False] * roots.size
        left = ~inside & (target < f_lo) & lsing
        right = ~inside & (target > f_hi) & rsing
        values += lo[left].tolist() + hi[right].tolist()
        flags += [True] * int(left.sum() + right.sum())
    for y in _isolated_points(m, window):
        f = float(boundary_values_unchecked(m, np.array([y]))[0])
        if abs(f - target) <= tol * max(1.0, abs(target)):
            values.append(y)
            flags.append(False)
    order = np.argsort(values, kind="stable")
    return EigenvalueSet([values[i] for i in order], [flags[i] for i in order])


def eigenvalues_for_extension(p, theta, window, tol=ROOT_TOL):
    """Sorted eigenvalues of T_theta inside ``window`` (theta != theta0)."""
    return locate_eigenvalues(p, theta, window, tol).values


def extension_for_energy(p, y, config=DEFAULT_CLASSIFIER):
    """The unique theta != theta0 having ``y`` as an eigenvalue.

    Raises :class:`ForbiddenEnergy` where the inverse-square moment of
    ``mu0`` diverges: such energies are eigenvalues of no T_theta.
    """
    f = boundary_value(p.mu0, y, config)
    # cot(theta - theta0) = f with theta - theta0 in (0, pi)
    return reduce_angle(p.theta0 + math.atan2(1.0, f))


# --- scans ------------------------------------------------------------------

@dataclass
class ScanReport:
    window: Window
    theta0: float
    grid: list = field(default_factory=list)  # (y, EnergyClass)
    eigen_hits: list = field(default_factory=list)  # (theta, [eigenvalues])
    forbidden_fraction: float = 0.0
    violations: list = field(default_factory=list)
    couplings: list = field(default_factory=list)
    cap: float = DEFAULT_CLASSIFIER.cap
    c: float | None = None

    @property
    def all_hits_convergent(self):
        return not self.violations

    def to_dict(self):
        out = {
            "schema": SCAN_SCHEMA,
            "window": [self.window.lo, self.window.hi],
            "theta0": self.theta0,
            "grid_n": len(self.grid),
            "forbidden_fraction": self.forbidden_fraction,
            "all_hits_convergent": self.all_hits_convergent,
            "violations": self.violations,
            "grid": [{"y": y, "class": cls.tag, "I_or_cap": self._i_or_cap(cls)}
                     for y, cls in self.grid],
            "eigen_hits": [{"theta": t, "eigenvalues": list(v)}
                           for t, v in self.eigen_hits],
        }
        if self.c is not None:
            out["c"] = self.c
            out["couplings"] = self.couplings
        return out

    def _i_or_cap(self, cls):
        return cls.moment if cls.convergent else self.cap

    def csv_rows(self):
        rows = [(y, cls.tag, self._i_or_cap(cls), "") for y, cls in self.grid]
        for theta, vals in self.eigen_hits:
            rows += [(v, "eigenvalue", "", theta) for v in vals]
        return ["y", "class", "I_or_cap", "theta"], rows


def _pmap(fn, items, parallel):
    if parallel <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(fn, items))


def _chunks(arr, k):
    return [c for c in np.array_split(arr, max(1, k)) if c.size]


def classify_grid(m, ys, config=DEFAULT_CLASSIFIER, parallel=1):
    parts = _pmap(lambda c: classify_energies(m, c, config),
                  _chunks(ys, parallel), parallel)
    return [cls for part in parts for cls in part]


def default_theta_sweep(count, theta0):
    """``count`` midpoint angles (j + 1/2) pi / count, minus any at theta0."""
    thetas = [(j + 0.5) * math.pi / count for j in range(count)]
    return [t for t in thetas if angle_distance(t, theta0) >= ANGLE_TOL]


def forbidden_energy_scan(p, window, grid_n, thetas=(), config=DEFAULT_CLASSIFIER,
                          tol=ROOT_TOL, parallel=1, check_exact=True):
    """Classify a uniform energy grid and cross-check eigenvalues of T_theta.

    Every eigenvalue found for the supplied angles must sit at a convergent
    energy, both at its grid-rounded location and (``check_exact``) at the
    eigenvalue itself; failures are collected in ``violations``.
    """
    if grid_n < 2:
        raise ValidationError("grid_n must be >= 2")
    require_valid(p.mu0)
    ys = np.linspace(window.lo, window.hi, int(grid_n))
    grid_classes = classify_grid(p.mu0, ys, config, parallel)
    n_div = sum(not c.convergent for c in grid_classes)
    report = ScanReport(window, p.theta0, list(zip(ys.tolist(), grid_classes)),
                        forbidden_fraction=n_div / len(grid_classes), cap=config.cap)
    thetas = sorted(float(t) for t in thetas)
    hits = _pmap(lambda t: eigenvalues_for_extension(p, t, window, tol),
                 thetas, parallel)
    report.eigen_hits = list(zip(thetas, hits))
    step = (window.hi - window.lo) / (grid_n - 1)
    for theta, vals in report.eigen_hits:
        for v in vals:
            idx = int(round((v - window.lo) / step))
            if not grid_classes[min(max(idx, 0), grid_n - 1)].convergent:
                report.violations.append({"theta": theta, "y": v, "where": "grid"})
    if check_exact:
        flat = [(t, v) for t, vals in report.eigen_hits for v in vals]
        if flat:
            exact = classify_grid(p.mu0, np.array([v for _, v in flat]), config, parallel)
            report.violations += [{"theta": t, "y": v, "where": "exact"}
                                  for (t, v), c in zip(flat, exact) if not c.convergent]
    return report


def coupling_sweep(p, c, alphas, window, include_infinity=False, grid_n=0,
                   config=DEFAULT_CLASSIFIER, tol=ROOT_TOL, parallel=1):
    """Eigenvalue counts of A_{alpha,c} = T_{Psi_c(alpha)} for each alpha.

    Requires theta0 = pi/2 (the unperturbed operator). An alpha counts as an
    empirical member of Gamma_c when none of its eigenvalues in ``window``
    falls inside the convex hull of supp(mu0). alpha = 0 is recorded as
    SameExtension and excluded from the count.
    """
    if angle_distance(p.theta0, math.pi / 2) > ANGLE_TOL:
        raise ValidationError("coupling sweep needs theta0 = pi/2")
    require_valid(p.mu0)
    hull = p.mu0.support_hull()
    alphas = sorted(float(a) for a in alphas)
    if include_infinity and math.inf not in alphas:
        alphas.append(math.inf)

    def one(alpha):
        if alpha == 0:
            return {"alpha": alpha, "status": "SameExtension"}
        theta = theta_from_coupling(alpha, c)
        try:
            vals = eigenvalues_for_extension(p, theta, window, tol)
        except SameExtension:
            return {"alpha": alpha, "theta": theta, "status": "SameExtension"}
        inside = [] if hull is None else \
            [v for v in vals if hull[0] <= v <= hull[1]]
        return {"alpha": alpha, "theta": theta, "status": "ok",
                "eigenvalues": vals, "count_in_support": len(inside),
                "in_gamma": not inside}

    records = _pmap(one, alphas, parallel)
    report = ScanReport(window, p.theta0, cap=config.cap, c=float(c))
    report.couplings = records
    report.eigen_hits = [(r["theta"], r["eigenvalues"]) for r in records
                         if r["status"] == "ok"]
    if grid_n:
        ys = np.linspace(window.lo, window.hi, int(grid_n))
        classes = classify_grid(p.mu0, ys, config, parallel)
        report.grid = list(zip(ys.tolist(), classes))
        report.forbidden_fraction = sum(not k.convergent for k in classes) / len(classes)
    return report
