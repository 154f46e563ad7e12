import json
import math

import mpmath
import numpy as np
import pytest

from minkowski_lab.appendix_refutation import (TestFunction, asymptotic_integral, decay_scan,
                                               naylor_integral)
from minkowski_lab.special_functions import Precision


def _oracle(f, tau, dps=60):
    # direct quadrature of K_{i tau}(x) f(x)/x with mpmath's own Bessel K
    with mpmath.workdps(dps):
        g = lambda x: mpmath.besselk(1j * tau, x).real * f(x) / x
        return float(mpmath.quad(g, [0.5, 0.75, 1]))


def test_zero_function():
    assert naylor_integral(TestFunction.zero(), 12.0) == 0.0


@pytest.mark.parametrize("tau", [2.0, 10.0])
def test_against_mpmath_besselk(tau):
    f = TestFunction.polynomial_cutoff()
    ref = _oracle(f, tau)
    assert naylor_integral(f, tau) == pytest.approx(ref, rel=1e-8)


def test_frozen_value():
    # exp(-5 pi) scale; frozen from the 256-bit evaluation, confirmed by mpmath besselk
    assert naylor_integral(TestFunction.polynomial_cutoff(), 10.0) == pytest.approx(5.79932369945782e-10, rel=1e-12)


def test_linearity():
    f, g = TestFunction.polynomial_cutoff(2), TestFunction.bump()
    h = f + 2.5 * g
    tau = 7.0
    with mpmath.workprec(256):
        lhs = naylor_integral(h, tau, as_mpf=True)
        rhs = naylor_integral(f, tau, as_mpf=True) + 2.5 * naylor_integral(g, tau, as_mpf=True)
        assert abs(lhs - rhs) <= 1e-30 * abs(rhs)


def test_test_function_evaluation():
    f = TestFunction.polynomial_cutoff(3)
    x = np.array([0.2, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(f(x), [0.0, 0.0, 0.125, 1.0])
    assert f(0.3) == 0.0
    with pytest.raises(ValueError):
        TestFunction("wiggle")


def test_leading_asymptotic_oracle():
    f = TestFunction.polynomial_cutoff()
    for tau, rel in ((20.0, 0.3), (40.0, 0.3)):
        exact = naylor_integral(f, tau)
        assert asymptotic_integral(f, tau) == pytest.approx(exact, rel=rel)


def test_displayed_asymptotic_is_off():
    f = TestFunction.polynomial_cutoff()
    exact = naylor_integral(f, 20.0)
    assert abs(asymptotic_integral(f, 20.0, form="displayed") / exact - 1) > 0.3


def test_precision_guard():
    with pytest.raises(Exception):
        naylor_integral(TestFunction.polynomial_cutoff(), 40.0, prec=Precision(64))
    with pytest.raises(ValueError):
        naylor_integral(TestFunction.polynomial_cutoff(), 50.0)


@pytest.fixture(scope="module")
def scan():
    return decay_scan(TestFunction.polynomial_cutoff(), (10.0, 20.0), 200)


def test_decay_scan_growth(scan):
    m15 = scan.window_maxima[1.5]
    assert max(m15) / min(m15) < 1.5
    assert scan.growth_factors[2.0][0] >= 1.2
    # lower normalisations decay across windows
    assert scan.growth_factors[0.5][0] < 1


def test_decay_scan_outputs(scan):
    d = json.loads(scan.to_json())
    assert set(d["window_maxima"]) == {"0.5", "1.0", "1.5", "2.0"}
    lines = scan.to_csv().splitlines()
    assert lines[0].startswith("tau") and len(lines) == 401


def test_bump_decays_faster():
    rep = decay_scan(TestFunction.bump(), (10.0, 20.0), 200)
    assert rep.growth_factors[2.0][0] < 1


def test_coarse_sampling_rejected():
    with pytest.raises(ValueError, match="too coarse"):
        decay_scan(TestFunction.polynomial_cutoff(), (10.0,), 10)
    with pytest.raises(ValueError):
        decay_scan(TestFunction.polynomial_cutoff(), (30.0,), 400)
