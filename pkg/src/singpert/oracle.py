"""Finite self-adjoint matrix models used as a brute-force oracle.

A model is a Hermitian matrix ``A`` with a marked vector ``phi``. Its rank-one
perturbations ``A + alpha phi phi*`` can be diagonalized directly, which
gives an independent check of the secular equation, of the parameter maps,
and of the eigenvalue criterion in :mod:`singpert.spectral`.

Inner products are conjugate-linear in the first argument:
``<u, v> = u.conj() @ v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DegenerateDenominator,
    DegenerateSpectrum,
    NotNormalized,
    SameExtension,
    ValidationError,
)
from .measure import MERGE_RTOL, Measure, Window
from .params import theta_from_coupling
from .spectral import AdProblem, eigenvalues_for_extension

MAX_DIM = 64
NORM_TOL = 1e-12
SUITE_SCHEMA = "oracle-suite/1"


def inner(u, v):
    return complex(np.vdot(u, v))


@dataclass(frozen=True, eq=False)
class MatrixModel:
    A: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A)
        A = np.array(A, dtype=np.result_type(A, float))
        phi = np.asarray(self.phi)
        phi = np.array(phi, dtype=np.result_type(phi, float)).ravel()
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != phi.size:
            raise ValidationError("A must be square and match phi in length")
        if A.shape[0] > MAX_DIM:
            raise ValidationError(f"dimension above {MAX_DIM}")
        scale = max(np.linalg.norm(A), 1e-300)
        if np.linalg.norm(A - A.conj().T) > 1e-12 * scale:
            raise ValidationError("A is not self-adjoint")
        if not np.any(phi):
            raise ValidationError("phi must be nonzero")
        A.flags.writeable = False
        phi.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "phi", phi)

    @property
    def n(self):
        return self.phi.size

    @property
    def u_plus(self):
        """(A - iI)^-1 phi."""
        return np.linalg.solve(self.A - 1j * np.eye(self.n), self.phi)

    @property
    def u_minus(self):
        """(A + iI)^-1 phi."""
        return np.linalg.solve(self.A + 1j * np.eye(self.n), self.phi)

    @property
    def normalized(self):
        return abs(np.linalg.norm(self.u_plus) - 1.0) <= NORM_TOL

    def to_dict(self):
        def enc(a):
            return a.tolist() if not np.iscomplexobj(a) else \
                {"re": a.real.tolist(), "im": a.imag.tolist()}
        return {"A": enc(self.A), "phi": enc(self.phi)}

    @classmethod
    def from_dict(cls, data):
        def dec(v):
            if isinstance(v, dict):
                return np.array(v["re"]) + 1j * np.array(v["im"])
            return np.array(v, dtype=float)
        try:
            return cls(dec(data["A"]), dec(data["phi"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed model: {exc}") from exc


def random_model(seed, n, max_attempts=100):
    """Reproducible real-symmetric model with simple spectrum and cyclic phi.

    Redraws until every eigenvalue gap is >= 1e-6 and every eigenbasis
    overlap |<e_k, phi>| is >= 1e-3.
    """
    if not 2 <= n <= MAX_DIM:
        raise ValidationError(f"need 2 <= n <= {MAX_DIM}, got {n}")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        g = rng.standard_normal((n, n))
        A = (g + g.T) / 2
        phi = rng.standard_normal(n)
        lam, vec = np.linalg.eigh(A)
        if np.min(np.diff(lam)) < 1e-6:
            continue
        if np.min(np.abs(vec.T @ phi)) < 1e-3:
            continue
        return MatrixModel(A, phi)
    raise RuntimeError(f"seed {seed}: no admissible model after {max_attempts} draws")


def normalize_pair(m, alpha):
    """Rescale phi -> phi/s, alpha -> alpha s^2 with s = ||(A - iI)^-1 phi||."""
    s = float(np.linalg.norm(m.u_plus))
    return MatrixModel(m.A, m.phi / s), alpha * s * s


def _eigh(m):
    lam, vec = np.linalg.eigh(m.A)
    return lam, vec


def spectral_measure(m):
    """Atoms sum_k |<e_k, phi>|^2 delta_{lambda_k}.

    Eigenvalues closer than the merge tolerance are merged once (weights
    added); zero-weight directions (outside the cyclic subspace) are dropped.
    """
    lam, vec = _eigh(m)
    w = np.abs(vec.conj().T @ m.phi) ** 2
    xs, ws = [lam[0]], [w[0]]
    for x, wk in zip(lam[1:], w[1:]):
        if x - xs[-1] < MERGE_RTOL * max(1.0, abs(xs[-1])):
            ws[-1] += wk
        else:
            xs.append(x)
            ws.append(wk)
    xs, ws = np.array(xs), np.array(ws)
    if xs.size > 1 and np.any(np.diff(xs) < MERGE_RTOL * np.maximum(1.0, np.abs(xs[:-1]))):
        raise DegenerateSpectrum("eigenvalue cluster survives one merge pass")
    keep = ws > 1e-24 * float(np.vdot(m.phi, m.phi).real)
    return Measure(np.column_stack([xs[keep], ws[keep]]))


def mu_zero(m):
    """Spectral measure (1 + x^2) d<u+, E u+>; equals spectral_measure(m)."""
    if not m.normalized:
        raise NotNormalized("mu_zero needs ||(A - iI)^-1 phi|| = 1")
    lam, vec = _eigh(m)
    w = (1 + lam**2) * np.abs(vec.conj().T @ m.u_plus) ** 2
    keep = w > 1e-24 * float(np.vdot(m.phi, m.phi).real)
    return Measure(np.column_stack([lam[keep], w[keep]]))


def natural_c(m):
    """c = <phi, A (A^2 + I)^-1 phi> = Re F_mu(i) for the normalized model."""
    if not m.normalized:
        raise NotNormalized("natural_c needs ||(A - iI)^-1 phi|| = 1")
    rhs = m.A @ np.linalg.solve(m.A @ m.A + np.eye(m.n), m.phi)
    c = inner(m.phi, rhs)
    if abs(c.imag) > 1e-12 * max(1.0, abs(c.real)):
        raise ValidationError(f"c has imaginary residue {c.imag}")
    return c.real


def perturb_direct(m, alpha):
    """Sorted eigenvalues of A + alpha phi phi*."""
    B = m.A + alpha * np.outer(m.phi, m.phi.conj())
    return np.linalg.eigvalsh(B).tolist()


def secular_roots(m, alpha, tol=1e-11):
    """Roots of 1 + alpha sum_k w_k/(lambda_k - y) by per-gap bisection."""
    if alpha == 0:
        raise ValidationError("secular equation needs alpha != 0")
    mu = spectral_measure(m)
    x, w = mu.x, mu.w
    if np.any(w <= 0):
        raise ValidationError("weights must be positive")
    target = -1.0 / alpha
    span = abs(alpha) * float(w.sum())
    delta = MERGE_RTOL * np.maximum(1.0, np.abs(x))
    lo = list(x[:-1] + delta[:-1])
    hi = list(x[1:] - delta[1:])
    # exterior root: above the top atom for alpha > 0, below the bottom otherwise
    if alpha > 0:
        lo.append(x[-1] + delta[-1])
        hi.append(x[-1] + span + 1.0)
    else:
        lo.append(x[0] - span - 1.0)
        hi.append(x[0] - delta[0])
    roots = kernels.bisect_stieltjes(x, w, np.array(lo), np.array(hi),
                                     np.full(len(lo), target), tol)
    return sorted(roots.tolist())


def hausdorff(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def ad_route(m, alpha, tol=1e-12):
    """Eigenvalues of A + alpha phi phi* through the extension-angle route.

    normalize -> c -> theta = Psi_c(alpha') -> criterion with theta0 = pi/2
    on the spectral measure of the (cyclic part of the) model.
    """
    if alpha == 0:
        raise SameExtension(math.pi / 2)
    mn, a2 = normalize_pair(m, alpha)
    c = natural_c(mn)
    theta = theta_from_coupling(a2, c)
    mu0 = mu_zero(mn)
    span = abs(a2) * float(mu0.w.sum()) + 1.0
    window = Window(float(mu0.x[0]) - span, float(mu0.x[-1]) + span)
    return eigenvalues_for_extension(AdProblem(mu0, math.pi / 2), theta, window, tol)


def ad_consistency_check(m, alpha, tol=1e-12):
    """Hausdorff distance between the criterion route and diagonalization.

    Non-cyclic models are first compressed to the cyclic subspace, where the
    criterion applies.
    """
    if len(spectral_measure(m).x) < m.n:
        m = krylov_cyclic_reduce(m)
    return hausdorff(ad_route(m, alpha, tol), perturb_direct(m, alpha))


# --- eigenvector identities -----------------------------------------------

@dataclass(frozen=True)
class EigvecDecomposition:
    """y = x + c e^{i theta} u+ + c e^{-i theta} u- with <phi, x> = 0."""

    x_part: np.ndarray
    c: complex
    theta: float


def decompose_eigenvector(m, theta, E, y):
    """Split an eigenvector of the extension at angle ``theta``.

    With a = <phi, y>/(<phi, u+> + e^{-2i theta} <phi, u->), the pieces are
    c = a e^{-i theta} and x = y - a u+ - a e^{-2i theta} u-.
    """
    if not m.normalized:
        raise NotNormalized("decomposition needs a normalized model")
    up, um = m.u_plus, m.u_minus
    e2 = np.exp(-2j * theta)
    den = inner(m.phi, up) + e2 * inner(m.phi, um)
    if abs(den) < 1e-14 * max(1.0, float(np.linalg.norm(m.phi)) ** 2):
        raise DegenerateDenominator(f"denominator vanishes at theta={theta}")
    a = inner(m.phi, y) / den
    x = y - a * up - a * e2 * um
    return EigvecDecomposition(x, a * np.exp(-1j * theta), float(theta))


def reconstruction_residual(m, d, y):
    rec = d.x_part + d.c * np.exp(1j * d.theta) * m.u_plus \
        + d.c * np.exp(-1j * d.theta) * m.u_minus
    return float(np.linalg.norm(rec - y))


def eigvec_identity_residual(m, pair1, pair2):
    """|-4 conj(c1) c2 sin(theta1 - theta2) - (E1 - E2) <y1, y2>|.

    Each pair is (theta, E, y). The conjugate sits on c1 because the inner
    product is conjugate-linear in its first slot.
    """
    (t1, e1, y1), (t2, e2, y2) = pair1, pair2
    d1 = decompose_eigenvector(m, t1, e1, y1)
    d2 = decompose_eigenvector(m, t2, e2, y2)
    lhs = -4 * np.conj(d1.c) * d2.c * math.sin(t1 - t2)
    return float(abs(lhs - (e1 - e2) * inner(y1, y2)))


def eigenpairs(m, alpha):
    """(theta, E, y) for every eigenpair of A + alpha phi phi* (normalized m)."""
    if not m.normalized:
        raise NotNormalized("eigenpairs need a normalized model")
    theta = theta_from_coupling(alpha, natural_c(m))
    B = m.A + alpha * np.outer(m.phi, m.phi.conj())
    lam, vec = np.linalg.eigh(B)
    return [(theta, float(lam[k]), vec[:, k]) for k in range(m.n)]


def krylov_cyclic_reduce(m, tol=1e-10):
    """Compress (A, phi) to the Krylov space of phi.

    Builds an orthonormal basis of span{phi, A phi, A^2 phi, ...} with full
    reorthogonalization; stops when the new direction falls below ``tol``
    relative to ||A q|| (or 1).
    """
    A = m.A
    q = m.phi / np.linalg.norm(m.phi)
    basis = [q]
    for _ in range(m.n - 1):
        v = A @ basis[-1]
        ref = max(float(np.linalg.norm(v)), 1.0)
        for _ in range(2):
            for b in basis:
                v = v - np.vdot(b, v) * b
        nv = float(np.linalg.norm(v))
        if nv < tol * ref:
            break
        basis.append(v / nv)
    Q = np.column_stack(basis)
    Ar = Q.conj().T @ A @ Q
    Ar = (Ar + Ar.conj().T) / 2
    phir = Q.conj().T @ m.phi
    if not np.iscomplexobj(A) and not np.iscomplexobj(m.phi):
        Ar, phir = Ar.real, phir.real
    return MatrixModel(Ar, phir)


# --- suite ---------------------------------------------------------------------

SUITE_ALPHAS = (-10.0, -1.0, -0.1, 0.1, 1.0, 10.0)


def suite_case(m, alpha, seed=None, tol=1e-8):
    dev = ad_consistency_check(m, alpha)
    sec = hausdorff(secular_roots(m, alpha), perturb_direct(m, alpha))
    flags = []
    if not dev < tol:
        flags.append("ad_deviation")
    if not sec < 1e-9:
        flags.append("secular_deviation")
    return {"seed": seed, "n": m.n, "alpha": alpha, "deviation": dev,
            "secular_deviation": sec, "flags": flags}


def suite_models(count, seed0=0, dims=range(2, 11), dim=None):
    """``count`` random models with seeds seed0.., dims cycling 2..10."""
    dims = list(dims)
    out = []
    for k in range(count):
        n = dim if dim is not None else dims[k % len(dims)]
        out.append((seed0 + k, random_model(seed0 + k, n)))
    return out
