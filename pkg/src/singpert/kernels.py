"""Backend selection for the atom-sum kernels.

The compiled extension is used when it imports; setting ``SINGPERT_PURE=1``
forces the numpy fallback. ``BACKEND`` names the active choice.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("SINGPERT_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"


def available_backends():
    """Mapping name -> kernel module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["compiled"] = _kernels
    return out


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def herglotz_atoms(x, w, zre, zim):
    return _impl.herglotz_atoms(_f64(x), _f64(w), _f64(zre), _f64(zim))


def gn_atoms(x, w, lam, eta):
    return _impl.gn_atoms(_f64(x), _f64(w), _f64(lam), float(eta))


def stieltjes_real(x, w, y):
    return _impl.stieltjes_real(_f64(x), _f64(w), _f64(y))


def gn_ladder(x, w, y, kmax):
    return _impl.gn_ladder(_f64(x), _f64(w), _f64(y), int(kmax))


def bisect_stieltjes(x, w, lo, hi, target, tol, maxiter=200):
    return _impl.bisect_stieltjes(_f64(x), _f64(w), _f64(lo), _f64(hi),
                                  _f64(target), float(tol), int(maxiter))
