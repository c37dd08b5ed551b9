import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from singpert.errors import NotNormalized, SameExtension, ValidationError
from singpert.oracle import (
    MatrixModel,
    ad_consistency_check,
    ad_route,
    decompose_eigenvector,
    eigenpairs,
    hausdorff,
    inner,
    krylov_cyclic_reduce,
    eigvec_identity_residual,
    mu_zero,
    natural_c,
    normalize_pair,
    perturb_direct,
    random_model,
    reconstruction_residual,
    secular_roots,
    spectral_measure,
    suite_case,
)
from singpert.params import theta_from_coupling


@pytest.fixture(scope="module")
def scalar_model():
    return MatrixModel.from_dict(json.loads((FIXTURES / "matrix_scalar.json").read_text()))


def test_scalar_fixture(scalar_model, closed_forms):
    ref = closed_forms["matrix_scalar"]
    assert scalar_model.normalized
    assert abs(natural_c(scalar_model) - ref["c"]) < 1e-12
    assert abs(theta_from_coupling(ref["alpha"], ref["c"]) - ref["theta"]) < 1e-12
    assert abs(ad_route(scalar_model, ref["alpha"])[0] - ref["eigenvalues"][0]) < 1e-10
    assert abs(perturb_direct(scalar_model, ref["alpha"])[0] - 4.5) < 1e-12


def test_model_validation():
    with pytest.raises(ValidationError):
        MatrixModel([[0, 1], [2, 0]], [1, 1])
    with pytest.raises(ValidationError):
        MatrixModel([[1]], [0])
    with pytest.raises(ValidationError):
        MatrixModel([[1, 0], [0, 1]], [1])


def test_normalization_required():
    m = MatrixModel([[1.0, 0], [0, -1.0]], [2.0, 1.0])
    with pytest.raises(NotNormalized):
        natural_c(m)
    mn, _ = normalize_pair(m, 1.0)
    assert mn.normalized


def test_mu_zero_equals_spectral_measure():
    m, _ = normalize_pair(random_model(3, 5), 1.0)
    a, b = spectral_measure(m), mu_zero(m)
    assert np.allclose(a.x, b.x) and np.allclose(a.w, b.w, rtol=1e-12)


def test_alpha_zero_is_same_extension():
    with pytest.raises(SameExtension):
        ad_route(random_model(0, 3), 0.0)


def test_complex_hermitian_model():
    rng = np.random.default_rng(7)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = MatrixModel((g + g.conj().T) / 2, rng.standard_normal(4) + 1j * rng.standard_normal(4))
    for alpha in (-1.0, 0.3, 4.0):
        assert ad_consistency_check(m, alpha) < 1e-8
    back = MatrixModel.from_dict(m.to_dict())
    assert np.array_equal(back.A, m.A) and np.array_equal(back.phi, m.phi)


def test_degenerate_model_reduced_to_cyclic_part():
    # eigenvalue 1 doubled; phi sees a single direction of it
    A = np.diag([1.0, 1.0, 3.0])
    m = MatrixModel(A, [1.0, 0.0, 1.0])
    red = krylov_cyclic_reduce(m)
    assert red.n == 2
    assert ad_consistency_check(m, 0.7) < 1e-8


def test_hausdorff():
    assert hausdorff([1, 2], [1, 2.5]) == 0.5
    assert hausdorff([], []) == 0.0
    assert math.isinf(hausdorff([1], []))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 10),
       st.sampled_from([-10.0, -1.0, -0.1, 0.1, 1.0, 10.0]))
def test_routes_agree(seed, n, alpha):
    m = random_model(seed, n)
    assert ad_consistency_check(m, alpha) < 1e-8
    assert hausdorff(secular_roots(m, alpha), perturb_direct(m, alpha)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8), st.floats(0.01, 50))
def test_interlacing(seed, n, alpha):
    m = random_model(seed, n)
    lam = np.linalg.eigvalsh(m.A)
    mu = np.array(perturb_direct(m, alpha))
    assert np.all(lam <= mu + 1e-12)
    assert np.all(mu[:-1] <= lam[1:] + 1e-12)


def test_eigenvector_decomposition_and_identities():
    m, _ = normalize_pair(random_model(11, 5), 1.0)
    pairs = eigenpairs(m, 0.8) + eigenpairs(m, -2.0)
    for theta, e, y in pairs:
        d = decompose_eigenvector(m, theta, e, y)
        assert reconstruction_residual(m, d, y) < 1e-10
        assert abs(inner(m.phi, d.x_part)) < 1e-10
        assert abs(inner(y, m.u_plus)) > 1e-8
    for i in range(len(pairs)):
        for j in range(len(pairs)):
            if i != j:
                assert eigvec_identity_residual(m, pairs[i], pairs[j]) < 1e-8


def test_suite_case_fields():
    case = suite_case(random_model(1, 4), 1.0, seed=1)
    assert set(case) == {"seed", "n", "alpha", "deviation", "secular_deviation", "flags"}
    assert case["flags"] == []
