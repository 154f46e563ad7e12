import csv
import io
import json
import math

import numpy as np
import pytest

from minkowski_lab import identities as ident
from minkowski_lab.minkowski_core import question_mark
from minkowski_lab.oscillatory import p_integral


@pytest.mark.parametrize("x,s,eta", [(0.5, 0.0, 0.1), (1.0, 1.0, 0.03), (2.0, 3.0, 0.01)])
def test_bessel_identity(x, s, eta):
    r = ident.bessel_identity_residual(x, s, eta)
    assert r.residual < 1e-8 and r.passed


def test_bessel_identity_rejects_undamped():
    with pytest.raises(ValueError):
        ident.bessel_identity_quadrature(1.0, 1.0, 0.0)


def test_bessel_limit():
    r = ident.bessel_limit_residual(2.0, 3.0)
    assert r.residual < 1e-4


def test_richardson_exact_on_polynomials():
    # f(eta) = 3 + eta - 2 eta^2 is recovered exactly from three samples
    f = lambda e: 3 + e - 2 * e * e
    vals = [f(e) for e in (0.1, 0.01, 0.001)]
    assert ident._richardson(vals, 10.0) == pytest.approx(3.0, abs=1e-13)


@pytest.mark.parametrize("s", [1.0, 3.0])
def test_mock_measure(s):
    assert ident.mock_measure_residual(s).residual < 1e-6


def test_fourier_series_trend(table4096):
    for x in (1 / 3, 1 / 7):
        r = [ident.fourier_series_residual(x, N, table4096).residual for N in (16, 256, 4096)]
        assert r[0] > r[1] > r[2]
    for x in (0.0, 0.5, 1.0):
        assert ident.fourier_series_residual(x, 64, table4096).residual == 0.0


def test_fourier_series_guards(table4096):
    with pytest.raises(ValueError):
        ident.fourier_series_residual(1.5, 16, table4096)
    with pytest.raises(ValueError):
        ident.fourier_series_residual(0.3, 10_000, table4096)


@pytest.mark.parametrize("t", [2.0, -7.5, 0.5 + 3j, 2j * math.pi])
def test_symmetry(t):
    r = ident.symmetry_residual(t)
    assert r.passed
    if complex(t).real == 0:
        assert abs(r.extra["imag_part"]) < 1e-12


def test_partial_sums(table4096):
    st = ident.partial_sum_stats(4096, table4096)
    assert st["partial_sums_within_B"]
    assert st["W_ratio_4096_128"] < 3
    # 1/sin(pi x) >= 1 pointwise, so B exceeds the total mass
    assert st["B"] > 1.0
    assert st["B_error"] < 1e-8


def test_cos_inverse_integral():
    for m in (1, 2, 5):
        a = 2 * math.pi * m
        assert abs(ident.cos_inverse_integral(a) - p_integral(a, 0.0, 1e-12).value) < 1e-8


def test_a_integrand_bounded_near_zero():
    v = ident.a_integrand(2 * math.pi, np.array([1e-8, 1e-4, 1.0]))
    assert np.all(np.isfinite(v))
    assert np.max(np.abs(v)) < 10


@pytest.mark.parametrize("s", [0.1, 1.0, 2 * math.pi, 50.0])
def test_a_functional_finite(s):
    v = ident.a_functional(s, 1e3)
    assert np.isfinite(v)


def test_a_functional_increment_within_tail_bound():
    s, X = 2 * math.pi, 1e3
    a1, budget = ident.a_functional(s, X, return_budget=True)
    a2 = ident.a_functional(s, 2 * X)
    assert abs(a2 - a1) <= budget["tail_bound"]


def test_a_functional_guards():
    with pytest.raises(ValueError):
        ident.a_functional(-1.0, 100.0)
    with pytest.raises(ValueError):
        ident.a_functional(1.0, 0.5)


def test_denominator_modulus_at_least_one():
    for s in np.linspace(0.1, 60, 50):
        assert abs(2 * np.exp(2j * s) - np.exp(1j * s)) >= 1 - 1e-15


def test_theorem1_report_shape():
    r = ident.theorem1_residual(1.0, 2e3)
    assert r.extra["denominator_modulus"] >= 1
    assert r.truncation_budget["tail_bound"] > 0
    json.loads(r.to_json())


@pytest.fixture(scope="module")
def lemma_m1():
    return ident.empirical_lemma_constants(1, b_points=40)


def test_theorem2_residual(table4096, lemma_m1):
    r = ident.theorem2_residual(1, 512, table=table4096, lemma_constants=lemma_m1)
    assert r.passed
    assert r.truncation_budget["N"] == 512


def test_theorem2_residual_decreases(table4096, lemma_m1):
    r = [ident.theorem2_residual(1, N, table=table4096, lemma_constants=lemma_m1).residual
         for N in (16, 1024)]
    assert r[1] < r[0]


def test_theorem2_tail_budget(table4096, lemma_m1):
    with pytest.raises(ident.TailBudgetError):
        ident.theorem2_residual(1, 64, table=table4096, lemma_constants=lemma_m1, require_tail=1e-12)


def test_reports_to_csv():
    reps = [ident.bessel_identity_residual(1.0, 1.0, 0.1), ident.fourier_series_residual(0.5, 8)]
    rows = list(csv.reader(io.StringIO(ident.reports_to_csv(reps))))
    assert rows[0] == ["identity", "parameter", "residual", "bound", "pass"]
    assert rows[1][4] == "PASS" and rows[2][4] == ""
