import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import sici

from minkowski_lab.oscillatory import (lemma_scan, p_integral, product_integral,
                                       stationary_phase_estimate, tail_integral, tail_profile)

# P(a, b) frozen from a Taylor-in-b series with incomplete-gamma terms
# (int_0^1 e^{ia/x} x^k dx in closed form), evaluated at 50 digits
P_FROZEN = [
    (1.0, 100.0, -0.016432193152735107),
    (6 * math.pi, 100 * math.pi, -0.03601932580664799),
    (3.0, 0.0, -0.15642389298673054),
    (0.7, -40.0, 0.024559742309464914),
    (2 * math.pi, 14 * math.pi, -0.14338499525403614),
    (0.5, 6.3, -0.02220905887936456),
]


@pytest.mark.parametrize("a,b,ref", P_FROZEN)
def test_p_frozen(a, b, ref):
    r = p_integral(a, b, 1e-12)
    assert abs(r.value - ref) < 1e-12
    assert r.error_estimate < 1e-10


def test_p_closed_forms():
    assert p_integral(0, 0).value == pytest.approx(1.0, abs=1e-14)
    assert p_integral(0, 5.0).value == pytest.approx(math.sin(5) / 5, abs=1e-13)
    for a in (0.3, 2.0, 40.0):
        ref = math.cos(a) + a * sici(a)[0] - a * math.pi / 2
        assert abs(p_integral(a, 0.0, 1e-12).value - ref) < 1e-11


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 200), st.floats(-2000, 2000))
def test_p_bounded(a, b):
    assert abs(p_integral(a, b).value) <= 1 + 1e-9


@pytest.mark.parametrize("a,b", [(1.0, 1e3), (50.0, -700.0), (0.01, 3e4)])
def test_tolerance_refinement(a, b):
    r1, r2 = p_integral(a, b, 1e-8), p_integral(a, b, 1e-9)
    assert abs(r1.value - r2.value) < 1e-8


def test_product_form():
    a, b = 2 * math.pi, 6 * math.pi
    r = product_integral(a, b, 1e-12)
    half = 0.5 * (p_integral(a, b, 1e-12).value + p_integral(a, -b, 1e-12).value)
    assert r.value == pytest.approx(half, abs=1e-15)


def test_tail_endpoints():
    assert tail_integral(2.0, 50.0, 1.0).value == 0.0
    assert tail_integral(2.0, 50.0, 0.0).value == pytest.approx(p_integral(2.0, 50.0).value, abs=1e-14)
    # additivity in eps
    a, b = 3.0, 400.0
    whole = tail_integral(a, b, 0.0, 1e-12).value
    eps, F = tail_profile(a, b)
    k = int(np.argmin(np.abs(eps - 0.3)))
    assert abs(F[0] - whole) < 1e-10
    assert abs(tail_integral(a, b, eps[k], 1e-12).value - F[k]) < 1e-10


def test_tiny_a_continuity():
    for a in (5e-324, 1e-300, 1e-16):
        r = p_integral(a, 7.0)
        assert abs(r.value - math.sin(7) / 7) < 1e-12


def test_invalid_arguments():
    with pytest.raises(ValueError):
        p_integral(-1.0, 2.0)
    with pytest.raises(ValueError):
        tail_integral(1.0, 2.0, 1.5)
    with pytest.raises(ValueError):
        p_integral(1.0, math.inf)


def test_stationary_phase_converges():
    a = 1.0
    errs = []
    for b in (1e2, 1e3, 1e4):
        sp = stationary_phase_estimate(a, b)
        assert sp.stationary_point == pytest.approx(math.sqrt(a / b))
        errs.append(abs(sp.value - p_integral(a, b, 1e-12).value) / sp.amplitude)
    assert errs[0] > errs[1] > errs[2]
    amp = [stationary_phase_estimate(a, b).amplitude for b in (1e2, 1.6e3)]
    assert amp[1] / amp[0] == pytest.approx(16 ** -0.75, rel=1e-12)
    with pytest.raises(ValueError):
        stationary_phase_estimate(5.0, 2.0)


def test_tail_profile_covers_supremum():
    a, b = 1.0, 500.0
    eps, F = tail_profile(a, b)
    dense = np.linspace(0.05, 1, 1500)
    sup_dense = max(abs(tail_integral(a, b, e).value) for e in dense)
    assert np.max(np.abs(F)) >= sup_dense - 1e-9


def test_lemma_scan_branches():
    rep = lemma_scan([0.0, 1.0, 5.0], [2 * math.pi, 50.0, 500.0, -2 * math.pi, -50.0, -500.0])
    assert rep.empirical_C_pos > 1.0          # the bound's constant must exceed 1
    assert rep.empirical_C_pos < 3.0
    assert 0 < rep.empirical_C_neg < 3.0
    d = json.loads(json.dumps(rep.as_dict()))
    assert d["a_grid"] == [0.0, 1.0, 5.0]
    rows = list(rep.rows())
    assert len(rows) == 18 and {r["branch"] for r in rows} == {"pos", "neg"}
    with pytest.raises(ValueError):
        lemma_scan([0.0], [1.0])


def test_lemma_scan_eps_grid_lower_than_exact():
    exact = lemma_scan([2.0], [300.0]).empirical_C_pos
    grid = lemma_scan([2.0], [300.0], eps_grid=np.linspace(0, 1, 50)).empirical_C_pos
    assert grid <= exact + 1e-9
