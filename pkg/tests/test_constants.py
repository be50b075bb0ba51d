import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcband.constants import (ShiftLemmaInstance, check_A_bounds, check_shift_lemma, ledger,
                              margin_chain, random_shift_instance)
from pcband.profiles import TrigPolynomial1D

PI2 = math.pi**2


def independent_ledger(d0):
    # written out from the closed forms without sharing code with the module
    a0 = 2 * PI2 / 3 / d0
    a1 = 2 * PI2 * d0
    th = 5 / 2 * d0**5 + d0**3
    d1 = 24 * a1 * d0**2 * th / PI2
    d2 = a0 * math.sqrt(a0) / 6 / PI2 / d0**2
    lam0 = max(2 * th, 3600 * th * th / a0, 4 * d0 * d0 * d2 * d2)
    return a0, a1, th, d1, d2, lam0, max(lam0, d0 * d1, 2 * d1 / d0, 4 * d1 * d1 / d2 / d2)


def test_ledger_d0_1():
    led = ledger(1.0)
    assert led.a0 == pytest.approx(6.5797, rel=1e-4)
    assert led.a1 == pytest.approx(19.7392, rel=1e-5)
    assert led.Theta == 3.5 and led.d1 == pytest.approx(168.0, rel=1e-14)
    assert led.d2 == pytest.approx(0.28502, rel=1e-4)
    assert led.lambda0 == pytest.approx(6702.3, rel=1e-4)
    assert led.Lambda0 == pytest.approx(1.3897e6, rel=1e-3)


def test_ledger_d0_2():
    led = ledger(2.0)
    assert led.Theta == 88.0 and led.d1 == pytest.approx(33792.0)
    assert led.d2 == pytest.approx(0.025192, rel=1e-4)
    assert led.lambda0 == pytest.approx(8.4737e6, rel=1e-4)
    assert led.Lambda0 == pytest.approx(7.20e12, rel=1e-3)
    assert ledger(2.0).Theta > ledger(1.0).Theta


def test_ledger_rejects_small_d0():
    with pytest.raises(ValueError):
        ledger(0.99)


@settings(max_examples=50)
@given(st.floats(1.0, 5.0))
def test_ledger_matches_independent(d0):
    led = ledger(d0)
    got = (led.a0, led.a1, led.Theta, led.d1, led.d2, led.lambda0, led.Lambda0)
    assert np.allclose(got, independent_ledger(d0), rtol=1e-12)


@settings(max_examples=50)
@given(st.floats(1.0, 5.0), st.floats(1.0, 100.0))
def test_margin_chain_above_Lambda0(d0, factor):
    led = ledger(d0)
    assert all(margin_chain(led, led.Lambda0 * factor).values())


def test_shift_lemma_example():
    res = check_shift_lemma(ShiftLemmaInstance(400.05, 1.0, 1.002, 0.1, 1.0, 1.0, 20))
    assert res.hypotheses_hold and res.holds
    assert res.nearest_m == 20 and res.nearest_distance == pytest.approx(0.75)


def test_shift_lemma_hypothesis_failures():
    res = check_shift_lemma(ShiftLemmaInstance(400.05, 1.0, 1.0, 0.1, 1.0, 1.0, 20))
    assert not res.hypotheses_hold and res.holds is None
    assert "window" in res.failures[0]
    res = check_shift_lemma(ShiftLemmaInstance(100.5, 1.0, 1.001, 0.6, 1.0, 1.0, 10))
    assert any("1296" in f for f in res.failures)
    assert any("empty" in f for f in res.failures)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_shift_lemma_random(seed):
    inst = random_shift_instance(np.random.default_rng(seed))
    res = check_shift_lemma(inst)
    assert res.hypotheses_hold and res.holds, inst


def test_A_bounds_counterexample():
    rep = check_A_bounds(TrigPolynomial1D.constant(1.0), 0.5, 1.0, 1.0)
    assert rep.diff == pytest.approx(PI2 / 3)
    assert not rep.stated["lipschitz_upper"]
    assert rep.corrected["lipschitz_upper"]
    assert rep.Bc == pytest.approx(2 * PI2 / 3)
    assert rep.stated["range_lower"]
    assert rep.ratio_stated == pytest.approx(4 / 3)


def test_A_bounds_zero_shift():
    rep = check_A_bounds(TrigPolynomial1D.constant(1.0), 0.0, 1.0, 1.0)
    assert rep.diff == 0.0 and rep.holds_stated and rep.holds_corrected


def test_A_bounds_preconditions():
    with pytest.raises(ValueError):
        check_A_bounds(TrigPolynomial1D.constant(1.0), 0.6, 1.0, 1.0)
    with pytest.raises(ValueError):
        check_A_bounds(TrigPolynomial1D(2.0, (1.0,), (0.0,)), 0.1, 1.5, 3.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.9), st.floats(-1.0, 1.0))
def test_A_bounds_corrected_everywhere(amp, t):
    eps0 = TrigPolynomial1D(1.0, (amp,), (0.0,))
    lo, hi = eps0.min_value, eps0.max_value
    rep = check_A_bounds(eps0, t * lo / 2, lo, hi)
    assert rep.holds_corrected
    assert rep.stated["lipschitz_lower"] and rep.stated["range_lower"]
    assert rep.stated["range_upper"]
