import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import jv

from socpoly.errors import DomainError
from socpoly.level_density import (
    KernelContext,
    finite_scaled_kernel,
    kernel,
    kernel_spectral,
    m_level_density,
    one_level_density,
    scaled_kernel,
    scaled_one_level,
)
from socpoly.moments import EnsembleSpec
from socpoly.special_fn import JacobiParams, jacobi_norm, jacobi_poly
from socpoly.oracles import _log_joint, one_level_brute_force, two_point_brute_force

angle = st.floats(0.01, math.pi - 0.01)


def ctx(n, M):
    return KernelContext(EnsembleSpec(n, M))


def test_context_domain():
    with pytest.raises(DomainError):
        KernelContext(EnsembleSpec(2, 0))
    with pytest.raises(DomainError):
        kernel(ctx(1, 3), 0.0, 1.0)
    with pytest.raises(DomainError):
        one_level_density(ctx(1, 3), math.pi)


@given(st.integers(0, 5), st.integers(1, 40), angle, angle)
def test_cd_equals_spectral(n, M, t, p):
    c = ctx(n, M)
    a, b = kernel(c, t, p), kernel_spectral(c, t, p)
    scale = math.sqrt(kernel_spectral(c, t, t) * kernel_spectral(c, p, p))
    assert abs(a - b) <= 1e-8 * scale


@given(st.integers(0, 5), st.integers(1, 40), angle)
def test_diagonal_limit(n, M, t):
    c = ctx(n, M)
    assert kernel(c, t, t) == pytest.approx(kernel_spectral(c, t, t), rel=1e-9)
    # just inside the switch-over distance the two branches agree
    assert kernel(c, t, t + 1e-7) == pytest.approx(kernel_spectral(c, t, t + 1e-7), rel=1e-6)


@given(st.integers(0, 4), st.integers(1, 20), angle, angle)
def test_kernel_symmetric(n, M, t, p):
    c = ctx(n, M)
    assert kernel(c, t, p) == pytest.approx(kernel(c, p, t), rel=1e-12, abs=1e-300)


def test_kernel_vectorised():
    c = ctx(2, 5)
    t = np.linspace(0.1, 3.0, 7)
    out = kernel(c, t, t[::-1])
    assert out.shape == (7,)
    assert out[3] == pytest.approx(kernel(c, t[3], t[3]))


@pytest.mark.parametrize("n", range(4))
@pytest.mark.parametrize("M", [1, 3, 10, 20])
def test_one_level_integrates_to_m(n, M):
    x, w = np.polynomial.legendre.leggauss(4 * M + 2 * n + 20)
    t = 0.5 * math.pi * (x + 1)
    assert 0.5 * math.pi * np.dot(w, one_level_density(ctx(n, M), t)) == pytest.approx(M, abs=1e-8)


@pytest.mark.parametrize("n, M", [(0, 1), (2, 1), (1, 2), (3, 3)])
def test_one_level_against_joint_density(n, M):
    for t in (0.4, 1.7, 2.9):
        assert one_level_density(ctx(n, M), t) == pytest.approx(one_level_brute_force(EnsembleSpec(n, M), t), rel=1e-6)


@pytest.mark.parametrize("n, M", [(1, 2), (2, 3)])
def test_two_level_against_joint_density(n, M):
    c = ctx(n, M)
    t1, t2 = 0.8, 2.1
    assert m_level_density(c, [t1, t2]) == pytest.approx(two_point_brute_force(EnsembleSpec(n, M), t1, t2), rel=1e-5)


def test_m_level_density_properties():
    c = ctx(2, 5)
    assert m_level_density(c, [1.1]) == pytest.approx(one_level_density(c, 1.1))
    assert abs(m_level_density(c, [0.7, 0.7, 2.0])) < 1e-10
    with pytest.raises(DomainError):
        m_level_density(c, np.linspace(0.1, 3.0, 6))
    with pytest.raises(DomainError):
        m_level_density(c, [])


@given(st.integers(0, 3), st.integers(2, 8), st.lists(angle, min_size=2, max_size=3))
def test_m_level_nonnegative(n, M, thetas):
    if len(thetas) > M:
        return
    assert m_level_density(ctx(n, M), thetas) >= -1e-10


def test_m_level_full_is_joint_density():
    # with m = M the determinant is M! times the normalised joint density
    spec = EnsembleSpec(1, 3)
    t = np.array([0.5, 1.4, 2.6])
    assert m_level_density(KernelContext(spec), t) == pytest.approx(6 * math.exp(_log_joint(spec, t)), rel=1e-10)


# -- scaled limit --------------------------------------------------------------


def test_scaled_one_level_examples():
    assert scaled_one_level(1, 0.5) == pytest.approx(1.0, abs=1e-15)
    t = np.linspace(0.01, 3, 300)
    assert np.allclose(scaled_one_level(1, t), 1 - np.sin(2 * np.pi * t) / (2 * np.pi * t), atol=1e-12, rtol=0)


def test_scaled_one_level_three_term_form():
    # three-term form: J_{n-3/2}^2 + J_{n-1/2}^2 - (2n-1)/(theta pi) J_{n-1/2} J_{n-3/2}
    for n in range(1, 6):
        t = np.linspace(0.5, 3.0, 40)
        z = np.pi * t
        ref = 0.5 * np.pi**2 * t * (jv(n - 1.5, z) ** 2 + jv(n - 0.5, z) ** 2 - (2 * n - 1) / z * jv(n - 0.5, z) * jv(n - 1.5, z))
        assert np.allclose(scaled_one_level(n, t), ref, atol=1e-12)


@pytest.mark.parametrize("n", range(1, 5))
def test_small_theta_slope(n):
    t = np.geomspace(1e-3, 1e-2, 20)
    slope = np.polyfit(np.log(t), np.log(scaled_one_level(n, t)), 1)[0]
    assert slope == pytest.approx(2 * n, abs=0.02)


def test_scaled_density_ordering_and_mean():
    at = [scaled_one_level(n, 0.05) for n in range(1, 6)]
    assert all(a > b for a, b in zip(at, at[1:]))
    # far from the forced eigenvalue the density is one per unit length
    t = np.linspace(50, 51, 2001)
    assert np.trapezoid(scaled_one_level(3, t), t) == pytest.approx(1.0, abs=2e-3)


def test_scaled_kernel_closed_form_n1():
    # n = 1: J_{-1/2}, J_{1/2} give sin/cos closed forms
    t, p = 0.5, 1.0
    a, b = math.pi * t, math.pi * p
    jm = lambda x: math.sqrt(2 / (math.pi * x)) * math.cos(x)
    jp = lambda x: math.sqrt(2 / (math.pi * x)) * math.sin(x)
    ref = math.sqrt(a * b) * (t * jm(a) * jp(b) - p * jm(b) * jp(a)) / (p * p - t * t)
    assert scaled_kernel(1, t, p) == pytest.approx(ref, rel=1e-14)


@given(st.integers(1, 5), st.floats(0.05, 5), st.floats(0.05, 5))
def test_scaled_kernel_symmetric_and_continuous(n, t, p):
    assert scaled_kernel(n, t, p) == pytest.approx(scaled_kernel(n, p, t), rel=1e-9, abs=1e-12)
    assert scaled_kernel(n, t, t * (1 + 1e-6)) == pytest.approx(scaled_one_level(n, t), rel=1e-4, abs=1e-10)


def test_scaled_kernel_domain():
    with pytest.raises(DomainError):
        scaled_kernel(0, 0.5, 1.0)
    with pytest.raises(DomainError):
        scaled_one_level(2, 0.0)


@pytest.mark.parametrize("n", [1, 2])
def test_finite_kernel_converges(n):
    errs = []
    for M in (250, 500, 1000, 2000):
        errs.append(abs(finite_scaled_kernel(ctx(n, M), 0.7, 1.3) - scaled_kernel(n, 0.7, 1.3)))
    assert errs[-1] < 1e-3
    assert errs[-1] < errs[0]


@pytest.mark.parametrize("n", range(3))
@pytest.mark.parametrize("M", [1, 4, 10])
def test_reproducing_property(n, M):
    c = ctx(n, M)
    x, w = np.polynomial.legendre.leggauss(3 * M + 2 * n + 30)
    phi = 0.5 * math.pi * (x + 1)
    wt = (1 - np.cos(phi)) ** n
    for t, p in [(0.4, 1.9), (2.2, 2.7), (1.0, 1.0)]:
        lhs = 0.5 * math.pi * np.dot(w, wt * kernel(c, t, phi) * kernel(c, phi, p))
        assert lhs == pytest.approx(kernel(c, t, p), abs=1e-7 * max(1.0, abs(kernel(c, t, t))))


@pytest.mark.parametrize("n, M", [(0, 1), (1, 5), (3, 12), (5, 40)])
def test_one_level_positive(n, M):
    t = np.linspace(1e-3, math.pi - 1e-3, 1000)
    assert np.all(one_level_density(ctx(n, M), t) >= 0)


@pytest.mark.parametrize("n", range(4))
@pytest.mark.parametrize("j", [0, 1, 4])
def test_theta_and_x_weights_agree(n, j):
    # int P_j^2 (1 - cos t)^n dt equals h_j for the (n - 1/2, -1/2) Jacobi weight
    p = JacobiParams(n - 0.5, -0.5, j)
    val = integrate.quad(lambda t: jacobi_poly(p, math.cos(t)) ** 2 * (1 - math.cos(t)) ** n, 0, math.pi, epsabs=0, epsrel=1e-13)[0]
    assert val == pytest.approx(jacobi_norm(p), rel=1e-10)


@pytest.mark.slow
def test_two_level_brute_force_m4():
    spec = EnsembleSpec(1, 4)
    c = KernelContext(spec)
    for t1, t2 in [(0.6, 1.8), (1.2, 2.8)]:
        ref = two_point_brute_force(spec, t1, t2, epsrel=1e-7)
        assert m_level_density(c, [t1, t2]) == pytest.approx(ref, rel=1e-4)
