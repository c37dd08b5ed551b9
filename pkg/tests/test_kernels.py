"""The compiled and numpy kernels must agree to rounding."""
import numpy as np
import pytest

from singpert import kernels

BACKENDS = kernels.available_backends()
PY = BACKENDS["python"]


def _data(seed, n=300, m=700):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(-3, 3, n))
    w = rng.uniform(0.01, 1, n)
    y = rng.uniform(-4, 4, m)
    return x, w, y


def test_compiled_backend_built():
    # the editable install builds the extension; the fallback is for bare checkouts
    assert "compiled" in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_herglotz_atoms(name):
    impl = BACKENDS[name]
    x, w, y = _data(0)
    eta = np.full(y.size, 0.3)
    re, im = impl.herglotz_atoms(x, w, y, eta)
    z = y + 0.3j
    ref = (w[None, :] * (1 / (x[None, :] - z[:, None]) - x / (1 + x * x))).sum(axis=1)
    assert np.allclose(re, ref.real, rtol=1e-12, atol=1e-12)
    assert np.allclose(im, ref.imag, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_gn_and_ladder(name):
    impl = BACKENDS[name]
    x, w, y = _data(1)
    g = impl.gn_atoms(x, w, y, 0.25)
    ref = (w / ((x[None, :] - y[:, None]) ** 2 + 0.0625)).sum(axis=1)
    assert np.allclose(g, ref, rtol=1e-13)
    lad = impl.gn_ladder(x, w, y[:20], 10)
    assert lad.shape == (20, 11)
    assert np.allclose(lad[:, 2], impl.gn_atoms(x, w, y[:20], 0.25), rtol=1e-14)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_stieltjes_and_bisect(name):
    impl = BACKENDS[name]
    x = np.array([-1.0, 0.0, 2.0])
    w = np.array([0.5, 1.0, 0.25])
    lo = np.array([-1 + 1e-9, 1e-9])
    hi = np.array([-1e-9, 2 - 1e-9])
    target = np.array([0.3, -0.7])
    r = impl.bisect_stieltjes(x, w, lo, hi, target, 1e-13, 200)
    assert np.allclose(impl.stieltjes_real(x, w, r), target, atol=1e-8)
    assert np.all((r > lo) & (r < hi))


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
def test_backends_agree():
    C = BACKENDS["compiled"]
    x, w, y = _data(2)
    for a, b in zip(C.herglotz_atoms(x, w, y, np.full(y.size, 1e-3)),
                    PY.herglotz_atoms(x, w, y, np.full(y.size, 1e-3))):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.allclose(C.gn_ladder(x, w, y, 30), PY.gn_ladder(x, w, y, 30), rtol=1e-12)
    assert np.allclose(C.stieltjes_real(x, w, y), PY.stieltjes_real(x, w, y), rtol=1e-12, atol=1e-12)
    lo, hi = x[:-1] + 1e-9, x[1:] - 1e-9
    t = np.zeros(lo.size)
    assert np.allclose(C.bisect_stieltjes(x, w, lo, hi, t, 1e-12, 200),
                       PY.bisect_stieltjes(x, w, lo, hi, t, 1e-12, 200), atol=1e-11)


def test_pure_env_selects_fallback():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "import singpert; print(singpert.BACKEND)"],
                         env={"SINGPERT_PURE": "1", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
