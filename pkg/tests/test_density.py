import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadicsq.density import (
    LN2,
    AffinePullback,
    Constant,
    Density,
    LogPowerOverX,
    LogPowerPlain,
    NonIntegrableError,
    PeriodicReflect,
    PiecewiseDyadic,
    Power,
    Restrict,
    Scale,
    SignModulate,
    Sum,
    affine_pullback,
    average,
    dual_power,
    integrate,
    quadrature_integrate,
    shell_mass,
)
from dyadicsq.dyadic import spine

CLOSED_FORM_DENSITIES = [
    Constant(0.7),
    Power(1.0, -0.5),
    Power(2.0, 0.25),
    LogPowerOverX(1.0, 1.2),
    Scale(0.5, Power(1.0, -0.25)),
    Sum((Constant(1.0), Power(1.0, -0.5))),
]


def test_power_full_mass():
    # integral of x^-beta over (0,1) is (1-beta)^-1
    assert integrate(Power(1.0, -0.5), 0.0, 1.0) == pytest.approx(2.0, rel=1e-14)


def test_constant_mass():
    assert integrate(Constant(3.0), 0.25, 0.75) == pytest.approx(1.5, rel=1e-14)


def test_log_power_over_x_full_mass():
    # c/(x (1-log2 x)^s), s = p*r with p=3, r=0.4: mass ln2/(pr-1)
    assert integrate(LogPowerOverX(1.0, 1.2), 0.0, 1.0) == pytest.approx(5.0 * LN2, rel=1e-12)


def test_average_sign_modulated_constant_on_spine():
    g = SignModulate(Constant(1.0))
    for k in range(0, 30):
        assert average(g, spine(k)) == pytest.approx((-1.0) ** k / 3.0, rel=1e-13)


def test_average_power_on_spine():
    assert average(Power(1.0, -0.5), spine(1)) == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-13)


def test_shell_mass_power_closed_form():
    beta = 0.5
    want = 2.0 ** -0.5 * (2.0 ** 0.5 - 1.0) / 0.5
    assert shell_mass(Power(1.0, -beta), 1) == pytest.approx(want, rel=1e-13)
    for n in range(1, 20):
        assert shell_mass(Constant(1.0), n) == pytest.approx(2.0 ** -n, rel=1e-14)


def test_log_power_plain_shell_mass_bracket():
    r = 0.4
    g = LogPowerPlain(r)
    for l in range(0, 25):
        m = shell_mass(g, l + 1)
        assert 2.0 ** -(l + 1) * (l + 2.0) ** -r <= m <= 2.0 ** -(l + 1) * (l + 1.0) ** -r


@given(st.integers(0, 400))
def test_log_power_plain_vectorized_shells_match_integrate(n0):
    g = LogPowerPlain(0.4)
    got = g.shell_masses_vec(n0 + 1, n0 + 1)[0]
    if n0 < 40:  # quad path only resolves shells above underflow
        assert got == pytest.approx(shell_mass(g, n0 + 1), rel=1e-10)
    assert got > 0.0 or n0 > 1070


@settings(max_examples=40)
@given(
    st.sampled_from(CLOSED_FORM_DENSITIES),
    st.floats(1e-6, 0.99, allow_nan=False),
    st.floats(1e-6, 0.99),
    st.floats(1e-6, 0.99),
)
def test_integrate_additivity(g, x1, x2, x3):
    a, b, c = sorted((x1, x2, x3))
    if a == b or b == c:
        return
    whole = integrate(g, a, c)
    parts = integrate(g, a, b) + integrate(g, b, c)
    assert parts == pytest.approx(whole, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("g", CLOSED_FORM_DENSITIES)
def test_closed_form_matches_quadrature(g):
    got = integrate(g, 0.125, 0.9)
    assert got == pytest.approx(quadrature_integrate(g, 0.125, 0.9), rel=1e-10)


def test_sign_modulate_magnitude_preserves_shell_mass():
    inner = Power(1.0, -0.3)
    g = SignModulate(inner)
    for n in range(1, 15):
        signed = integrate(g, 0.5 ** n, 0.5 ** (n - 1))
        assert abs(signed) == pytest.approx(shell_mass(inner, n), rel=1e-11)
        assert math.copysign(1.0, signed) == (-1.0) ** (n - 1)


def test_sign_modulate_pointwise_sign():
    g = SignModulate(Constant(1.0))
    assert g.value(0.6) == 1.0    # J_1
    assert g.value(0.3) == -1.0   # J_2
    assert g.value(0.2) == 1.0    # J_3


def test_affine_pullback_mass_scaling():
    inner = Power(1.0, -0.5)
    k = 5
    g = affine_pullback(inner, offset=2.0 ** -k, scale=2.0 ** -k)
    assert g.integrate(2.0 ** -k, 2.0 ** (1 - k)) == pytest.approx(
        2.0 ** -k * integrate(inner, 0.0, 1.0), rel=1e-12)
    assert g.integrate(0.0, 2.0 ** -k) == 0.0


def test_affine_pullback_identity():
    inner = Power(1.0, -0.5)
    ident = affine_pullback(inner, offset=0.0, scale=1.0)
    for a, b in [(0.0, 1.0), (0.25, 0.5), (0.1, 0.9)]:
        assert ident.integrate(a, b) == pytest.approx(inner.integrate(a, b), rel=1e-12)


def test_affine_pullback_reflected_orientation():
    inner = Power(1.0, -0.5)
    g = AffinePullback(inner, offset=0.5, scale=0.25, reflected=True)
    lo, hi = g.support
    assert (lo, hi) == (0.25, 0.5)
    # the singularity of the source sits at the right end of the image
    assert g.value(0.499) > g.value(0.26)
    assert g.integrate(0.25, 0.5) == pytest.approx(0.25 * 2.0, rel=1e-12)


def test_degenerate_pullback_scale():
    with pytest.raises(ValueError):
        AffinePullback(Constant(1.0), offset=0.0, scale=0.0)


def test_dual_power_closed_forms():
    p, beta = 3.0, 0.6
    d = dual_power(Power(1.0, -beta), p)
    assert isinstance(d, Power)
    assert d.gamma == pytest.approx(beta / (p - 1.0))
    assert dual_power(Constant(1.0), p).c == 1.0
    back = dual_power(dual_power(Power(1.0, beta * (p - 1.0)), p), p / (p - 1.0))
    assert back.gamma == pytest.approx(beta * (p - 1.0), rel=1e-12)
    with pytest.raises(TypeError):
        dual_power(SignModulate(Constant(1.0)), p)


def test_non_integrable_rejected():
    with pytest.raises(NonIntegrableError):
        Power(1.0, -1.0)
    with pytest.raises(NonIntegrableError):
        LogPowerOverX(1.0, 0.8).primitive(1.0)
    # away from 0 the same density integrates fine
    assert LogPowerOverX(1.0, 0.8).integrate(0.25, 0.5) > 0.0


def test_point_zero_convention():
    for g in (Power(1.0, -0.5), LogPowerOverX(1.0, 1.2), LogPowerPlain(0.4), Constant(2.0)):
        v = float(np.asarray(g.value(0.0)))
        if isinstance(g, Constant):
            continue
        assert v == 1.0


def test_spine_averages_generic_vs_closed_form():
    g = Power(1.0, -0.5)
    i_cf, j_cf = g.spine_averages(40)
    i_gen, j_gen = Density.spine_averages(g, 40)
    np.testing.assert_allclose(np.asarray(i_cf[1:], float), np.asarray(i_gen[1:], float), rtol=1e-12)
    np.testing.assert_allclose(np.asarray(j_cf[1:], float), np.asarray(j_gen[1:], float), rtol=1e-11)


def test_log_shell_masses_match_shell_mass():
    for g in (Power(1.0, -0.7), LogPowerOverX(1.0, 1.2), Constant(2.0)):
        logs = g.log_shell_masses(12)
        for n in range(1, 13):
            assert logs[n] == pytest.approx(math.log(shell_mass(g, n)), rel=1e-11)


def test_restrict():
    g = Restrict(Constant(1.0), 0.25, 0.75)
    assert g.integrate(0.0, 1.0) == pytest.approx(0.5, rel=1e-14)
    assert g.integrate(0.0, 0.2) == 0.0
    assert float(np.asarray(g.value(0.5))) == 1.0
    assert float(np.asarray(g.value(0.1))) == 0.0


def test_piecewise_dyadic_constant_blocks():
    g = PiecewiseDyadic(lambda n: AffinePullback(Constant(1.0), 2.0 ** -n, 2.0 ** -n))
    for n in range(1, 10):
        assert g.piece_mass(n) == pytest.approx(2.0 ** -n, rel=1e-12)
    assert g.suffix_mass(3) == pytest.approx(2.0 ** -3, rel=1e-12)
    assert g.integrate(0.0, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_piecewise_dyadic_suffix_mass_skips_empty_shells():
    # gluings with empty shells must not stop the tail summation early
    g = PiecewiseDyadic(
        lambda n: None if n % 2 == 0
        else AffinePullback(Constant(1.0), 2.0 ** -n, 2.0 ** -n))
    want = sum(2.0 ** -n for n in range(1, 120, 2))
    assert g.suffix_mass(0) == pytest.approx(want, rel=1e-13)
    assert g.integrate(0.0, 1.0) == pytest.approx(want, rel=1e-13)


def test_periodic_reflect_symmetry_and_period():
    g = PeriodicReflect(Power(1.0, 0.5))
    # the Lemma-style even branch: value at 1.75 is inner(2 - 1.75) = 0.25^0.5
    assert float(np.asarray(g.value(1.75))) == pytest.approx(0.5, rel=1e-13)
    ts = (np.arange(1, 1000) / 1024.0)
    for k in (-2, -1, 0, 1, 3):
        left = np.asarray(g.value(k - ts))
        right = np.asarray(g.value(k + ts))
        np.testing.assert_array_equal(left, right)
    xs = -3.0 + np.arange(1001) / 167.0
    np.testing.assert_array_equal(np.asarray(g.value(xs)), np.asarray(g.value(xs + 2.0)))


def test_periodic_reflect_integrals():
    g = PeriodicReflect(Power(1.0, -0.5))
    unit = 2.0
    # 8 unit cells, each carrying one (forward or reflected) copy of the mass
    assert g.integrate(-3.0, 5.0) == pytest.approx(8.0 * unit, rel=1e-12)
    assert g.integrate(0.0, 1.0) == pytest.approx(unit, rel=1e-12)
    assert g.integrate(1.0, 2.0) == pytest.approx(unit, rel=1e-12)
    # reflection: mass near an even integer is symmetric
    assert g.integrate(-0.25, 0.0) == pytest.approx(g.integrate(0.0, 0.25), rel=1e-12)
