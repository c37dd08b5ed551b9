"""Acceptance criteria 1-9, one pass/fail line each.

Every test records its line in ``conftest.ACCEPTANCE_LINES`` (echoed in the
terminal summary) before asserting, so a failing criterion still reports its
measured numbers.
"""
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, load_fixture
from singpert.herglotz import (
    boundary_value,
    g_n,
    inverse_square_moment,
    transform,
    transform_values,
)
from singpert.measure import Measure, Piece, Window, dyadic_benchmark, validate
from singpert.oracle import (
    SUITE_ALPHAS,
    ad_consistency_check,
    decompose_eigenvector,
    eigenpairs,
    hausdorff,
    normalize_pair,
    perturb_direct,
    secular_roots,
    suite_models,
)
from singpert.params import (
    angle_distance,
    chain,
    coupling_from_theta,
    theta_from_coupling,
)
from singpert.spectral import AdProblem, default_theta_sweep, forbidden_energy_scan


def record(k, ok, text):
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - {text}"
    ACCEPTANCE_LINES[k] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def suite():
    """200 fixed-seed models, n cycling 2..10, with both oracle routes timed."""
    t0 = time.perf_counter()
    models = suite_models(200, seed0=0)
    ad, sec = [], []
    for _, m in models:
        for a in SUITE_ALPHAS:
            ad.append(ad_consistency_check(m, a))
            direct = perturb_direct(m, a)
            sec.append(hausdorff(secular_roots(m, a), direct))
    return {"models": models, "ad": np.array(ad), "sec": np.array(sec),
            "seconds": time.perf_counter() - t0}


def test_criterion_1_ad_equivalence(suite):
    worst, secs = float(suite["ad"].max()), suite["seconds"]
    ok = worst < 1e-8 and secs < 60
    record(1, ok, f"AD route vs diagonalization: max deviation {worst:.3e} (< 1e-8) over "
                  f"{suite['ad'].size} cases, {secs:.1f} s (< 60 s)")


def test_criterion_2_secular_equivalence(suite):
    worst = float(suite["sec"].max())
    record(2, worst < 1e-9, f"secular roots vs diagonalization: max Hausdorff {worst:.3e} (< 1e-9)")


def test_criterion_3_closed_forms():
    d0, two, uni = load_fixture("delta0"), load_fixture("two_atoms"), load_fixture("uniform01")
    checks = {
        "delta0 F(i)=i": abs(transform(d0, 1j).value - 1j),
        "delta0 I(1)=1": abs(inverse_square_moment(d0, 1.0).moment - 1.0),
        "delta0 bv(1)=-1": abs(boundary_value(d0, 1.0) + 1.0),
        "two_atoms F(2i)=2i/5": abs(transform(two, 2j).value - 0.4j),
        "two_atoms bv(0)=0": abs(boundary_value(two, 0.0)),
        "uniform mass=pi/4": abs(validate(uni).mass - math.pi / 4),
        "uniform g1(0.5)=2atan(0.5)": abs(g_n(uni, 0.5, 1) - 2 * math.atan(0.5)),
    }
    worst = max(checks.values())
    bad = [k for k, v in checks.items() if not v < 1e-10]
    record(3, not bad, f"{len(checks)} closed-form fixtures, max error {worst:.3e} (< 1e-10)"
                       + (f"; failing: {bad}" if bad else ""))


def _random_measure(rng):
    k = rng.integers(0, 6)
    atoms = np.column_stack([rng.uniform(-5, 5, k), rng.uniform(1e-3, 2, k)])
    pieces = []
    for _ in range(rng.integers(0, 3)):
        a = rng.uniform(-4, 3)
        u, v = rng.uniform(0, 2, 2)
        pieces.append(Piece(a, a + rng.uniform(0.1, 2), (u - v * a, v)))
    if k == 0 and not pieces:
        atoms = np.array([[rng.uniform(-5, 5), 1.0]])
    return Measure(atoms, pieces)


def test_criterion_4_gn_contract():
    rng = np.random.default_rng(2024)
    ns = 2.0 ** np.arange(31)
    worst_id, worst_drop = 0.0, 0.0
    for _ in range(1000):
        m = _random_measure(rng)
        lam = rng.uniform(-6, 6)
        g = np.array([g_n(m, lam, n) for n in ns])
        im = transform_values(m, lam + 1j / ns).imag
        err = np.abs(g - ns * im) / np.maximum(1.0, np.abs(g))
        worst_id = max(worst_id, float(err.max()))
        drop = np.maximum(0.0, -np.diff(g)) / np.maximum(1.0, g[1:])
        worst_drop = max(worst_drop, float(drop.max()))
    # nondecrease is exact up to the stated 1e-13 rounding allowance
    ok = worst_id < 1e-12 and worst_drop <= 1e-13
    record(4, ok, f"1000 (measure, lambda) pairs, n = 2^0..2^30: max relative "
                  f"|g_n - n Im F| {worst_id:.3e} (< 1e-12); max relative decrease "
                  f"{worst_drop:.3e} (<= 1e-13 rounding)")


def test_criterion_5_parameter_chain():
    rng = np.random.default_rng(5)
    n = 10_000
    # alpha log-uniform in +-[1e-3, 1e3], c uniform in [-10, 10]
    alphas = rng.choice([-1.0, 1.0], n) * 10.0 ** rng.uniform(-3, 3, n)
    cs = rng.uniform(-10, 10, n)
    worst_chain, worst_inv = 0.0, 0.0
    for a, c in zip(alphas, cs):
        th = theta_from_coupling(a, c)
        worst_chain = max(worst_chain, angle_distance(th, chain(a, c)["theta"]))
        back = coupling_from_theta(th, c).alpha
        worst_inv = max(worst_inv, abs(back - a) / abs(a))
    fixture = abs(theta_from_coupling(0.5, 2.0) - math.atan(4.0))
    ok = worst_chain < 1e-12 and worst_inv < 1e-10 and fixture < 1e-12
    record(5, ok, f"{n} (alpha, c) pairs: chain vs direct {worst_chain:.3e} (< 1e-12 mod pi), "
                  f"inverse roundtrip relative {worst_inv:.3e} (< 1e-10), "
                  f"fixture (0.5, 2) -> atan 4 error {fixture:.3e}")


@pytest.mark.slow
def test_criterion_6_forbidden_energy_scan():
    p = AdProblem(dyadic_benchmark(8, 4.0), math.pi / 2)
    t0 = time.perf_counter()
    rep = forbidden_energy_scan(p, Window(-1.0, 1.0), 10_000,
                                default_theta_sweep(100, math.pi / 2))
    secs = time.perf_counter() - t0
    hits = sum(len(v) for _, v in rep.eigen_hits)
    ok = rep.all_hits_convergent and not rep.violations and secs < 120
    record(6, ok, f"dyadic(8, 4), grid 1e4, 100 angles: {hits} eigenvalues, "
                  f"{len(rep.violations)} at non-convergent points; forbidden_fraction "
                  f"{rep.forbidden_fraction:.4f}; {secs:.1f} s (< 120 s)")


def test_criterion_7_disjointness_and_interlacing(suite):
    min_dist, worst_interlace = math.inf, 0.0
    close_seeds = []
    for seed, m in suite["models"]:
        spectra = {a: np.array(perturb_direct(m, a)) for a in SUITE_ALPHAS}
        for i, a1 in enumerate(SUITE_ALPHAS):
            for a2 in SUITE_ALPHAS[i + 1:]:
                d = np.abs(np.subtract.outer(spectra[a1], spectra[a2])).min()
                min_dist = min(min_dist, float(d))
                if d <= 1e-6 and seed not in close_seeds:
                    close_seeds.append(seed)
        lam = np.linalg.eigvalsh(m.A)
        for a in SUITE_ALPHAS:
            if a > 0:
                mu = spectra[a]
                viol = max(float(np.max(lam - mu)), float(np.max(mu[:-1] - lam[1:])), 0.0)
                worst_interlace = max(worst_interlace, viol)
    ok = min_dist > 1e-6 and worst_interlace <= 1e-12
    record(7, ok, f"200 cyclic models x 6 couplings: min distance between spectra of distinct "
                  f"alpha {min_dist:.3e} (> 1e-6; models at or below: seeds {close_seeds}); "
                  f"worst interlacing violation {worst_interlace:.3e} (<= 1e-12)")


def test_criterion_8_eigenvector_identities(suite):
    worst_l1 = math.inf
    worst_l3 = 0.0
    pairs = 0
    for _, m in suite["models"]:
        mn, s2 = normalize_pair(m, 1.0)
        up = mn.u_plus
        rows = []
        for a in SUITE_ALPHAS:
            for theta, e, y in eigenpairs(mn, a * s2):
                d = decompose_eigenvector(mn, theta, e, y)
                rows.append((theta, e, y, d.c))
                worst_l1 = min(worst_l1, abs(np.vdot(y, up)))
        th = np.array([r[0] for r in rows])
        en = np.array([r[1] for r in rows])
        Y = np.column_stack([r[2] for r in rows])
        c = np.array([r[3] for r in rows])
        gram = Y.conj().T @ Y
        lhs = -4 * np.outer(c.conj(), c) * np.sin(np.subtract.outer(th, th))
        rhs = np.subtract.outer(en, en) * gram
        # residual scale max(1, |E1|, |E2|)
        scale = np.maximum(1.0, np.maximum.outer(np.abs(en), np.abs(en)))
        resid = np.abs(lhs - rhs) / scale
        np.fill_diagonal(resid, 0.0)
        worst_l3 = max(worst_l3, float(resid.max()))
        pairs += th.size * (th.size - 1)
    ok = worst_l1 > 1e-8 and worst_l3 < 1e-8
    record(8, ok, f"{pairs} ordered eigenpair pairs: min |<y, u+>| {worst_l1:.3e} (> 1e-8); "
                  f"max identity residual / max(1, |E1|, |E2|) {worst_l3:.3e} (< 1e-8)")


def test_criterion_9_cli_golden():
    from test_cli import CLI_GOLDEN, GOLDEN_RUNS, golden_output
    mismatched, unstable = [], []
    for name in sorted(GOLDEN_RUNS):
        first, second = golden_output(name), golden_output(name)
        if first != second:
            unstable.append(name)
        if first != (CLI_GOLDEN / f"{name}.out").read_text():
            mismatched.append(name)
    fixtures_ok = (
        abs(json.loads(golden_output("delta0_eval"))["value"]["im"] - 1) < 1e-10
        and abs(json.loads(golden_output("two_atoms_eval"))["value"]["im"] - 0.4) < 1e-10
        and abs(json.loads(golden_output("uniform_validate"))["mass_inv_one_plus_sq"]
                - math.pi / 4) < 1e-10
        and abs(json.loads(golden_output("couple_fixture"))["theta"] - math.atan(4)) < 1e-12
    )
    ok = not mismatched and not unstable and fixtures_ok
    record(9, ok, f"{len(GOLDEN_RUNS)} CLI runs with --no-meta: {len(unstable)} not "
                  f"byte-identical on re-run, {len(mismatched)} differ from golden files; "
                  f"closed-form fixtures through CLI {'ok' if fixtures_ok else 'WRONG'}")
