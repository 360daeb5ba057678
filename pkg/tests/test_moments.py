import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from socpoly.errors import DomainError, PoleError
from socpoly.moments import (
    EnsembleSpec,
    SelbergParams,
    log_moment,
    moment_asymptotic,
    moment_barnes,
    moment_exact,
    moment_haar_so_even,
    normalization_c,
    selberg_integral,
)
from socpoly.oracles import moment_haar_quadrature_m1, moment_quadrature_m1, selberg_quadrature
from socpoly.special_fn import log_barnes_g

# 2-D Selberg value at (K=2, a=3/2, b=1/2, gamma=1), mpmath at 30 digits.
SELBERG_K2 = 4.93480220054467930941724549994
# E|Lambda''(1)|^{3/2} for M = 1 by mpmath quadrature.
MOMENT_N2_M1_S15 = 17.5604553856166986332472052242


def val(lc) -> float:
    return lc.value().real


# -- EnsembleSpec --------------------------------------------------------------


def test_spec_validation():
    assert EnsembleSpec(2, 6).N == 14
    assert EnsembleSpec(2, 0).N == 2
    for n, M in [(-1, 2), (1.5, 2), (0, -1), (1, 0), (0, 0)]:
        with pytest.raises(DomainError):
            EnsembleSpec(n, M)


def test_spec_support():
    spec = EnsembleSpec(3, 4)
    assert math.exp(spec.log_support_max) == pytest.approx(6 * 4**4)


# -- Selberg -------------------------------------------------------------------


def test_selberg_examples():
    assert val(selberg_integral(SelbergParams(1, 1, 1, 1))) == pytest.approx(2.0, rel=1e-14)
    assert val(selberg_integral(SelbergParams(2, 1, 1, 1))) == pytest.approx(8 / 3, rel=1e-14)
    assert val(selberg_integral(SelbergParams(2, 1.5, 0.5, 1))) == pytest.approx(SELBERG_K2, rel=1e-13)


def test_selberg_against_quadrature_k2():
    p = SelbergParams(2, 1.5, 0.5, 1.0)
    assert val(selberg_integral(p)) == pytest.approx(selberg_quadrature(p), rel=1e-8)


def test_selberg_domain():
    with pytest.raises(DomainError):
        SelbergParams(0, 1, 1)
    with pytest.raises(DomainError):
        SelbergParams(2, -0.5, 1)
    with pytest.raises(DomainError):
        SelbergParams(3, 1.0, 1.0, gamma=-0.6)


@given(st.integers(0, 8), st.integers(1, 40))
def test_normalization_times_selberg_is_one(n, M):
    spec = EnsembleSpec(n, M)
    total = normalization_c(spec).log_modulus + selberg_integral(SelbergParams(M, n + 0.5, 0.5, 1.0)).log_modulus
    assert abs(total) < 1e-11 * max(1.0, M * M)


def test_normalization_examples():
    assert val(normalization_c(EnsembleSpec(0, 1))) == pytest.approx(1 / math.pi, rel=1e-14)
    assert val(normalization_c(EnsembleSpec(1, 1))) == pytest.approx(1 / math.pi, rel=1e-14)


# -- exact moments -------------------------------------------------------------


@pytest.mark.parametrize("n, s, expected", [(1, 1.0, 3.0), (1, 2.0, 10.0), (0, 1.0, 2.0)])
def test_moment_exact_examples(n, s, expected):
    got = val(moment_exact(EnsembleSpec(n, 1), s))
    assert got == pytest.approx(expected, rel=1e-13)
    assert got == pytest.approx(moment_quadrature_m1(n, s), rel=1e-10)


def test_moment_exact_fractional():
    assert val(moment_exact(EnsembleSpec(2, 1), 1.5)) == pytest.approx(MOMENT_N2_M1_S15, rel=1e-12)


@given(st.integers(0, 6), st.integers(0, 200))
def test_moment_zero_is_one(n, M):
    if n + 2 * M < 2:
        return
    assert moment_exact(EnsembleSpec(n, M), 0.0).log_modulus == 0.0


def test_moment_point_mass_when_m_is_zero():
    # no free angles: |Lambda^{(n)}(1)| = n! exactly
    assert val(moment_exact(EnsembleSpec(3, 0), 2.0)) == pytest.approx(36.0)


@given(st.integers(0, 5), st.integers(1, 30), st.floats(-0.4, 6))
def test_moment_log_convex_in_s(n, M, s):
    # log E X^s is convex; second differences are nonnegative
    h = 0.05
    f = [moment_exact(EnsembleSpec(n, M), s + k * h).log_modulus for k in (-1, 0, 1)]
    assert f[0] - 2 * f[1] + f[2] >= -1e-9


@given(st.integers(0, 5), st.integers(1, 30), st.floats(0.1, 5))
def test_moment_bounded_by_support(n, M, s):
    # X <= n! 4^M, so E X^s <= (n! 4^M)^s
    spec = EnsembleSpec(n, M)
    assert moment_exact(spec, s).log_modulus <= s * spec.log_support_max + 1e-9


def test_moment_complex_conjugate_symmetry():
    spec = EnsembleSpec(2, 7)
    a = moment_exact(spec, 1.3 + 4.0j)
    b = moment_exact(spec, 1.3 - 4.0j)
    assert a.log_modulus == pytest.approx(b.log_modulus, rel=1e-13)
    assert a.phase == pytest.approx(-b.phase, abs=1e-11)


def test_log_moment_vectorised():
    s = np.array([0.5, 1.0, 2.0 + 1j])
    out = log_moment(2, 5, s)
    assert out.shape == (3,)
    for si, oi in zip(s, out):
        assert np.exp(oi) == pytest.approx(moment_exact(EnsembleSpec(2, 5), si).value(), rel=1e-12)


@pytest.mark.parametrize("n, s", [(0, -0.5), (1, -1.5), (2, -2.5), (1, -2.5)])
def test_moment_poles(n, s):
    with pytest.raises(PoleError):
        moment_exact(EnsembleSpec(n, 3), s)


# -- Haar ----------------------------------------------------------------------


def test_haar_examples():
    assert val(moment_haar_so_even(1, 1.0)) == pytest.approx(2.0, rel=1e-14)
    assert val(moment_haar_so_even(1, 1.7)) == pytest.approx(moment_haar_quadrature_m1(1.7), rel=1e-10)
    assert moment_haar_so_even(9, 0.0).log_modulus == pytest.approx(0.0, abs=1e-14)
    assert moment_haar_so_even(5, 2.0).log_modulus == pytest.approx(
        moment_exact(EnsembleSpec(0, 5), 2.0).log_modulus, rel=1e-13
    )
    with pytest.raises(PoleError):
        moment_haar_so_even(3, -0.5)


@given(st.integers(1, 50), st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_haar_equals_n0(M, s):
    a = moment_exact(EnsembleSpec(0, M), s).log_modulus
    b = moment_haar_so_even(M, s).log_modulus
    assert abs(math.expm1(a - b)) < 1e-12


# -- Barnes form and asymptotics -----------------------------------------------


@given(st.integers(0, 4), st.integers(1, 60), st.floats(0.0, 4.0))
def test_barnes_form_matches_gamma_product(n, M, s):
    spec = EnsembleSpec(n, M)
    assert moment_barnes(spec, s).log_modulus == pytest.approx(moment_exact(spec, s).log_modulus, abs=1e-9)


def test_asymptotic_examples():
    spec = EnsembleSpec(1, 10**4)
    ratio = math.exp(moment_exact(spec, 1.0).log_modulus - moment_asymptotic(spec, 1.0).log_modulus)
    assert 0.99 <= ratio <= 1.01
    assert moment_asymptotic(EnsembleSpec(3, 17), 0.0).log_modulus == pytest.approx(0.0, abs=1e-14)


def test_asymptotic_n0_limit_constant():
    # M-exponent vanishes for n = 0, s = 1: the moment tends to a constant
    limit = 0.5 * math.log(2 * math.pi) + 0.5 * math.log(2) + log_barnes_g(0.5) - log_barnes_g(1.5)
    spec = EnsembleSpec(0, 10**5)
    assert moment_asymptotic(spec, 1.0).log_modulus == pytest.approx(limit, abs=1e-12)
    assert moment_exact(spec, 1.0).log_modulus == pytest.approx(limit, abs=1e-4)


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("s", [1.0, 2.0])
def test_asymptotic_error_shrinks_with_m(n, s):
    errs = []
    for M in (100, 200, 400, 800, 1600):
        spec = EnsembleSpec(n, M)
        errs.append(abs(moment_exact(spec, s).log_modulus - moment_asymptotic(spec, s).log_modulus))
    assert all(b <= a or b < 1e-9 for a, b in zip(errs, errs[1:]))


def test_asymptotic_zero_of_g():
    # G(n + 1/2 + s) = 0 at n + 1/2 + s = -1
    with pytest.raises(DomainError):
        moment_asymptotic(EnsembleSpec(1, 5), -2.5)


# -- cross-route invariants ----------------------------------------------------


@given(st.integers(0, 5), st.integers(1, 30), st.floats(0.0, 4.0), st.floats(-3.0, 3.0))
def test_moment_equals_selberg_ratio(n, M, s, t):
    # E X^s = (n!)^s 2^{Ms} S(M, n + 1/2 + s, 1/2, 1) / S(M, n + 1/2, 1/2, 1)
    z = complex(s, t)
    ratio = selberg_integral(SelbergParams(M, n + 0.5 + z, 0.5, 1.0)).log - selberg_integral(
        SelbergParams(M, n + 0.5, 0.5, 1.0)
    ).log
    route = z * math.lgamma(n + 1) + M * z * math.log(2.0) + ratio
    got = moment_exact(EnsembleSpec(n, M), z).log
    assert abs(got.real - route.real) <= 1e-12 * max(1.0, abs(got.real))
    assert abs(math.remainder(got.imag - route.imag, 2 * math.pi)) < 1e-10


@given(st.integers(0, 5), st.integers(1, 50), st.floats(0.0, 4.0))
def test_real_moments_are_positive(n, M, s):
    assert moment_exact(EnsembleSpec(n, M), s).phase == 0.0
