import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcband import _kernels, hill1d
from pcband.hill1d import HillProblem, Membership
from pcband.profiles import TrigPolynomial1D, TrigSeries1D

from conftest import ALPHAS, SUITE

PI2 = math.pi**2


def hp_of(p):
    return HillProblem(p)


def test_free_monodromy_at_pi_squared(free):
    m = hill1d.monodromy(hp_of(free), PI2)
    assert np.allclose(m.as_array(), [[-1, 0], [0, -1]], atol=1e-9)


@pytest.mark.parametrize("name", sorted(SUITE))
def test_lambda_zero_monodromy(name):
    m = hill1d.monodromy(hp_of(SUITE[name]), 0.0)
    assert np.allclose(m.as_array(), [[1, 1], [0, 1]], atol=1e-12)


def test_monodromy_matches_rk4(cos_profile):
    # fixed-step RK4, h = 1e-5, both solutions integrated together
    rk4 = [[-1.078016514285539, 0.1146491541451324],
           [1.414049726586748, -1.0780165142855536]]
    m = hill1d.monodromy(hp_of(cos_profile), 5.0)
    assert np.allclose(m.as_array(), rk4, rtol=1e-7, atol=0)
    assert hill1d.discriminant(hp_of(cos_profile), 5.0) == pytest.approx(
        rk4[0][0] + rk4[1][1], rel=1e-7)


def test_rejects_bad_tol(free):
    with pytest.raises(ValueError):
        hill1d.monodromy(hp_of(free), 1.0, tol=0.0)


def test_discriminant_examples(free, cos_profile):
    assert hill1d.discriminant(hp_of(free), PI2 / 4) == pytest.approx(0.0, abs=1e-9)
    assert hill1d.discriminant(hp_of(cos_profile), 0.0) == pytest.approx(2.0, abs=1e-12)


def test_callable_potential(free):
    hp = HillProblem(free, potential=lambda x: 1.0, potential_sup=1.0)
    assert hill1d.discriminant(hp, 3.0) == pytest.approx(2 * math.cos(2.0), abs=1e-9)


def test_trig_potential_matches_callable(cos_profile):
    rho = TrigSeries1D(0.5, (0.2,), (0.1,))
    a = hill1d.monodromy(HillProblem(cos_profile, rho), 7.0).as_array()
    b = hill1d.monodromy(HillProblem(cos_profile, lambda x: float(rho(x))), 7.0).as_array()
    assert np.allclose(a, b, atol=1e-12)


def test_underflow_reports_location(free):
    hp = HillProblem(free, potential=lambda x: math.nan if x > 0.5 else 0.0, potential_sup=0.0)
    with pytest.raises(hill1d.IntegrationError) as err:
        hill1d.monodromy(hp, 1.0)
    assert 0.4 < err.value.x <= 0.5 + 1e-9


def test_floquet_free_examples(free):
    hp = hp_of(free)
    assert hill1d.floquet_eigenvalue(hp, 1, math.pi / 2) == pytest.approx(PI2 / 4, abs=1e-9)
    assert hill1d.floquet_eigenvalue(hp, 2, math.pi / 2) == pytest.approx(9 * PI2 / 4, abs=1e-9)
    with pytest.raises(ValueError):
        hill1d.floquet_eigenvalue(hp, 0, 0.0)


def test_floquet_matches_fd_oracle(cos_profile):
    hp = hp_of(cos_profile)
    # fd_floquet_eigs at 4096 points, alpha = 0 and pi
    assert hill1d.floquet_eigenvalue(hp, 3, 0.0) == pytest.approx(21.953136931385107, rel=1e-5)
    assert hill1d.floquet_eigenvalue(hp, 3, math.pi) == pytest.approx(45.24044417279459, rel=1e-5)


def test_fd_examples(free):
    vals = hill1d.fd_floquet_eigs(hp_of(free), 0.0, 3)
    assert vals[0] == pytest.approx(0.0, abs=1e-6)
    assert np.allclose(vals[1:], 4 * PI2, rtol=1e-3)
    four = hill1d.fd_floquet_eigs(hp_of(TrigPolynomial1D.constant(4.0)), 0.0, 3)
    assert np.allclose(four, vals / 4, rtol=1e-10, atol=1e-9)
    with pytest.raises(ValueError):
        hill1d.fd_floquet_eigs(hp_of(free), 0.0, 3, grid_points=32)


def test_fd_oracle_at_pi(cos_profile):
    vals = hill1d.fd_floquet_eigs(hp_of(cos_profile), math.pi, 5)
    ref = [3.9287745438567034, 6.487211653377457, 45.24044417279459, 47.13961370393689,
           127.46517442924485]
    assert np.allclose(vals, ref, rtol=1e-9)


def test_band_examples(free):
    b = hill1d.band(hp_of(free), 2)
    assert (b.lo, b.hi) == pytest.approx((PI2, 4 * PI2), rel=1e-9)
    assert (b.lo_alpha, b.hi_alpha) == (math.pi, 0.0)
    b = hill1d.band(hp_of(TrigPolynomial1D.constant(4.0)), 1)
    assert (b.lo, b.hi) == pytest.approx((0.0, PI2 / 4), abs=1e-9)


def test_band_edges_match_oracle(cos_profile):
    hp = hp_of(cos_profile)
    fd0 = hill1d.fd_floquet_eigs(hp, 0.0, 5)
    fdpi = hill1d.fd_floquet_eigs(hp, math.pi, 5)
    for n in range(1, 6):
        b = hill1d.band(hp, n)
        lo, hi = sorted((fd0[n - 1], fdpi[n - 1]))
        assert abs(b.lo - lo) <= 1e-4 * (1 + lo)
        assert abs(b.hi - hi) <= 1e-4 * (1 + hi)


def test_in_spectrum_examples(free, cos_profile):
    assert hill1d.in_spectrum(hp_of(cos_profile), 0.0, 1e-3) is Membership.INDETERMINATE
    assert hill1d.in_spectrum(hp_of(free), 5.0, 1e-6) is Membership.CERTIFIED_IN
    with pytest.raises(ValueError):
        hill1d.in_spectrum(hp_of(free), 5.0, 0.0)


def test_gaps_free_and_constant(free):
    assert hill1d.gaps(hp_of(free), 200.0).gaps == []
    assert hill1d.gaps(hp_of(TrigPolynomial1D.constant(4.0)), 200.0).gaps == []


def test_gap_midpoints_certified_out():
    hp = hp_of(SUITE["cos_strong"])
    rep = hill1d.gaps(hp, 100.0)
    assert len(rep.gaps) >= 3
    for lo, hi in rep.gaps:
        assert hill1d.in_spectrum(hp, 0.5 * (lo + hi), 1e-8) is Membership.CERTIFIED_OUT


@pytest.mark.parametrize("name", sorted(SUITE))
def test_band_ordering_and_ground_state(name):
    hp = hp_of(SUITE[name])
    bands = [hill1d.band(hp, n) for n in range(1, 9)]
    assert bands[0].lo == pytest.approx(0.0, abs=1e-8)
    for a, b in zip(bands, bands[1:]):
        assert a.lo <= a.hi
        assert a.hi <= b.lo + 1e-8 * (1 + b.lo)
        assert a.hi <= b.hi


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(sorted(SUITE)), st.floats(0.0, math.pi), st.integers(1, 6))
def test_quasimomentum_symmetry(name, alpha, n):
    hp = hp_of(SUITE[name])
    a = hill1d.floquet_eigenvalue(hp, n, alpha)
    b = hill1d.floquet_eigenvalue(hp, n, 2 * math.pi - alpha)
    assert abs(a - b) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-0.3, 0.3), min_size=2, max_size=6), st.floats(0.0, 500.0))
def test_wronskian(coeffs, lam):
    half = len(coeffs) // 2
    cos, sin = tuple(coeffs[:half]), tuple(coeffs[half:2 * half])
    p = TrigPolynomial1D(1.0 + sum(map(abs, coeffs)), cos, sin)
    assert abs(hill1d.monodromy(hp_of(p), lam).det - 1.0) <= 1e-9


@pytest.mark.parametrize("name", ["cos", "mixed"])
def test_dense_alpha_sweep_stays_in_band(name):
    # edges are taken at alpha in {0, pi}; check no interior alpha escapes the band
    hp = hp_of(SUITE[name])
    for n in range(1, 7):
        b = hill1d.band(hp, n)
        for alpha in np.linspace(0.0, math.pi, 17):
            lam = hill1d.floquet_eigenvalue(hp, n, float(alpha))
            assert b.lo - 1e-8 * (1 + b.lo) <= lam <= b.hi + 1e-8 * (1 + b.hi)


@pytest.mark.parametrize("name", ["cos", "two_harmonics"])
def test_oracle_equivalence_sample(name):
    hp = hp_of(SUITE[name])
    for alpha in (ALPHAS[0], ALPHAS[2]):
        fd = hill1d.fd_floquet_eigs(hp, alpha, 6)
        for n in range(1, 7):
            lam = hill1d.floquet_eigenvalue(hp, n, alpha)
            assert abs(lam - fd[n - 1]) / (1 + lam) <= 1e-4


@pytest.mark.skipif(len(_kernels.available_backends()) < 2, reason="compiled kernel missing")
@pytest.mark.parametrize("lam", [0.0, 5.0, 120.0])
def test_backends_agree(lam):
    hp = hp_of(SUITE["mixed"])
    a = hill1d.monodromy(hp, lam, backend="compiled").as_array()
    b = hill1d.monodromy(hp, lam, backend="python").as_array()
    assert np.allclose(a, b, rtol=1e-11, atol=1e-12)


def test_csv_outputs(tmp_path, cos_profile):
    hp = hp_of(cos_profile)
    rep = hill1d.gaps(hp, 30.0)
    hill1d.write_bands_csv(tmp_path / "b.csv", rep.bands)
    hill1d.write_gaps_csv(tmp_path / "g.csv", rep.gaps)
    rows = list(csv.DictReader(open(tmp_path / "b.csv")))
    assert [int(r["n"]) for r in rows] == [b.index for b in rep.bands]
    gaps = list(csv.DictReader(open(tmp_path / "g.csv")))
    assert float(gaps[0]["width"]) == pytest.approx(rep.gaps[0][1] - rep.gaps[0][0])
