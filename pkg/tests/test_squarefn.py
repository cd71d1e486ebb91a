import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadicsq.density import Constant, LogPowerPlain, Power, Scale, SignModulate
from dyadicsq.dyadic import DyadicInterval, spine
from dyadicsq.squarefn import (
    TailNotCertifiedError,
    full_square_function,
    level_averages,
    martingale_difference,
    partial_mass,
    partial_mass_profile,
    spine_profile,
    weighted_snorm,
)

ALT_SF = SignModulate(Constant(1.0))  # sigma*f of the alternating family


def test_martingale_difference_alternating_spine():
    for k in range(0, 20):
        left, _ = martingale_difference(ALT_SF, spine(k))
        assert left == pytest.approx(2.0 * (-1.0) ** (k + 1) / 3.0, rel=1e-12)


def test_martingale_difference_constant():
    assert martingale_difference(Constant(5.0), DyadicInterval(3, 2)) == \
        pytest.approx((0.0, 0.0), abs=1e-13)


def test_martingale_difference_power_root():
    left, _ = martingale_difference(Power(1.0, -0.5), spine(0))
    assert left == pytest.approx(2.0 * (math.sqrt(2.0) - 1.0), rel=1e-12)


@settings(max_examples=30)
@given(st.integers(0, 10), st.integers(0, 2 ** 10 - 1),
       st.sampled_from([Power(1.0, -0.5), ALT_SF, Scale(2.0, Power(1.0, 0.25))]))
def test_mean_zero(level, index, g):
    q = DyadicInterval(level, index % 2 ** level if level else 0)
    dl, dr = martingale_difference(g, q)
    # the difference integrates to zero over its node
    scale = max(1.0, abs(dl), abs(dr))
    assert dl + dr == pytest.approx(0.0, abs=1e-11 * scale)


def test_spine_profile_alternating_closed_forms():
    prof = spine_profile(ALT_SF, 64)
    for n in range(1, 65):
        assert float(prof.s[n]) == pytest.approx((2.0 / 3.0) * math.sqrt(n), rel=1e-13)
    np.testing.assert_allclose(np.abs(np.asarray(prof.d_left, float)), 2.0 / 3.0, rtol=1e-13)


def test_spine_profile_constant_is_zero():
    prof = spine_profile(Constant(3.0), 32)
    np.testing.assert_allclose(np.asarray(prof.s[1:], float), 0.0, atol=1e-14)


def test_spine_profile_log_power_lower_bound():
    # |Delta_{I_k}| >= 1/(4 (k+2)^r), checked on I_{k+1} and measured on J_{k+1}
    r = 0.4
    prof = spine_profile(SignModulate(LogPowerPlain(r)), 2000)
    k = np.arange(prof.n_max)
    floor = 1.0 / (4.0 * (k + 2.0) ** r)
    assert np.all(np.abs(np.asarray(prof.d_left, float)) >= floor)
    assert np.all(np.abs(np.asarray(prof.d_right, float)) >= floor)


def test_full_square_function_constant_zero():
    leaf = full_square_function(Constant(2.0), 8)
    np.testing.assert_allclose(leaf.values, 0.0, atol=1e-13)


def test_full_square_function_alternating_equals_spine():
    depth = 10
    leaf = full_square_function(ALT_SF, depth)
    prof = spine_profile(ALT_SF, depth)
    for n in range(1, depth + 1):
        # leaves covering J_n = [2^-n, 2^(1-n))
        lo, hi = 2 ** (depth - n), 2 ** (depth - n + 1)
        np.testing.assert_allclose(leaf.values[lo:hi], float(prof.s[n]), rtol=1e-12)


def test_full_square_function_monotone_in_depth():
    for g in (Power(1.0, -0.5), ALT_SF):
        coarse = full_square_function(g, 8)
        fine = full_square_function(g, 10)
        assert np.all(np.repeat(coarse.values, 4) <= fine.values + 1e-13)


def test_spine_below_full_everywhere():
    depth = 10
    for g in (Power(1.0, -0.5), SignModulate(LogPowerPlain(0.4))):
        leaf = full_square_function(g, depth)
        prof = spine_profile(g, depth)
        for n in range(1, depth + 1):
            lo, hi = 2 ** (depth - n), 2 ** (depth - n + 1)
            assert np.all(leaf.values[lo:hi] >= float(prof.s[n]) - 1e-12)


@pytest.mark.parametrize("g", [Power(1.0, -0.5), ALT_SF, Constant(2.0),
                               Scale(0.5, Power(1.0, 0.25))])
def test_finite_depth_parseval(g):
    depth = 12
    avgs = level_averages(g, depth)
    total = 0.0
    for lev in range(depth):
        parent = avgs[lev]
        child = avgs[lev + 1].reshape(-1, 2)
        d = child - parent[:, None]
        total += float(np.sum(d * d)) * 2.0 ** -(lev + 1)
    e_n = float(np.sum(avgs[depth] ** 2)) * 2.0 ** -depth
    want = e_n - float(avgs[0][0]) ** 2
    assert total == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_weighted_snorm_closed_form_oracle():
    # alternating family, p = 4, beta = 1/2: shell series sums in closed form
    p, beta = 4.0, 0.5
    w = Power(1.0, -beta)
    x = 2.0 ** (beta - 1.0)
    series = x * (1.0 + x) / (1.0 - x) ** 3
    want = ((2.0 / 3.0) ** 4 * (2.0 ** (1.0 - beta) - 1.0) / (1.0 - beta) * series) ** 0.25
    got = weighted_snorm(ALT_SF, w, p, n_max=400)
    assert got == pytest.approx(want, rel=1e-10)


def test_weighted_snorm_zero_function():
    assert weighted_snorm(Constant(0.0), Power(1.0, -0.5), 3.0, n_max=64) == 0.0


def test_weighted_snorm_full_vs_spine_alternating():
    p = 3.0
    w = Power(1.0, -0.5)
    full = weighted_snorm(ALT_SF, w, p, mode="full", depth=14)
    sp = weighted_snorm(ALT_SF, w, p, n_max=2000)
    # the truncations differ but both approach the same series from below
    assert full == pytest.approx(sp, rel=2e-2)
    assert full <= sp * (1.0 + 1e-12)


def test_weighted_snorm_monotone_in_n_max():
    vals = [weighted_snorm(ALT_SF, Power(1.0, -0.5), 3.0, n_max=n, tail_rel_tol=1e-6)
            for n in (64, 128, 256)]
    assert vals[0] <= vals[1] <= vals[2]


def test_tail_not_certified():
    with pytest.raises(TailNotCertifiedError):
        weighted_snorm(Power(1.0, -0.99), Power(1.0, 0.5), 3.0, n_max=48)


def test_partial_mass_constant_zero():
    assert partial_mass(Constant(1.0), Power(1.0, -0.5), 3.0, 5) == 0.0


def test_partial_mass_monotone_and_positive():
    p, r = 3.0, 0.4
    from dyadicsq.density import LogPowerOverX
    sf = SignModulate(LogPowerPlain(r))
    w = LogPowerOverX(1.0, 2.0 - 2.0 * r)
    prof = spine_profile(sf, 600)
    ks = np.arange(1, 600, 7)
    m = partial_mass_profile(prof, w, p, ks)
    assert np.all(m > 0)
    assert np.all(np.diff(m) > 0)  # grows like k^((1-2r)(p/2-1))
