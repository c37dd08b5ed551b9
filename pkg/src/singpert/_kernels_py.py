"""Numpy implementations of the atom-sum kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the compiled version is tested against. Every function takes
contiguous float64 arrays ``x`` (atom locations) and ``w`` (atom weights).
"""
import numpy as np

# points per block; bounds the temporary (block, n_atoms) arrays
_BLOCK = 256


def _blocks(n):
    for start in range(0, n, _BLOCK):
        yield slice(start, min(start + _BLOCK, n))


def herglotz_atoms(x, w, zre, zim):
    """Real and imaginary parts of sum_k w_k (1/(x_k - z) - x_k/(1+x_k^2))."""
    re = np.empty(zre.shape[0])
    im = np.empty(zre.shape[0])
    shift = w * x / (1.0 + x * x)
    for s in _blocks(zre.shape[0]):
        d = x[None, :] - zre[s, None]
        eta = zim[s, None]
        den = d * d + eta * eta
        re[s] = (w * d / den - shift).sum(axis=1)
        im[s] = (w * eta / den).sum(axis=1)
    return re, im


def gn_atoms(x, w, lam, eta):
    """sum_k w_k / ((x_k - lam)^2 + eta^2) for each entry of ``lam``."""
    out = np.empty(lam.shape[0])
    e2 = eta * eta
    for s in _blocks(lam.shape[0]):
        d = x[None, :] - lam[s, None]
        out[s] = (w / (d * d + e2)).sum(axis=1)
    return out


def stieltjes_real(x, w, y):
    """sum_k w_k / (x_k - y) for real ``y`` away from the atoms."""
    out = np.empty(y.shape[0])
    for s in _blocks(y.shape[0]):
        out[s] = (w / (x[None, :] - y[s, None])).sum(axis=1)
    return out


def gn_ladder(x, w, y, kmax):
    """G_n(y) for n = 2^0 .. 2^kmax; shape (len(y), kmax + 1)."""
    out = np.empty((y.shape[0], kmax + 1))
    inv_n2 = 4.0 ** -np.arange(kmax + 1)
    for s in _blocks(y.shape[0]):
        d = x[None, :] - y[s, None]
        d2 = d * d
        for k in range(kmax + 1):
            out[s, k] = (w / (d2 + inv_n2[k])).sum(axis=1)
    return out


def bisect_stieltjes(x, w, lo, hi, target, tol, maxiter):
    """Solve sum_k w_k/(x_k - y) = target[j] on each bracket [lo[j], hi[j]].

    The sum is increasing in y between atoms, so plain bisection converges;
    the caller guarantees the sign change.
    """
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        active = (hi - lo > tol) & (mid > lo) & (mid < hi)
        if not active.any():
            break
        f = stieltjes_real(x, w, mid[active])
        below = f < target[active]
        idx = np.flatnonzero(active)
        lo[idx[below]] = mid[active][below]
        hi[idx[~below]] = mid[active][~below]
    return 0.5 * (lo + hi)
