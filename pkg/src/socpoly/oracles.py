"""Slow, independent reference computations.

Nothing here is used by the production paths; these routines exist so that
the closed forms and fast algorithms can be checked against a second route
that shares as little code with them as possible.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .moments import EnsembleSpec, SelbergParams, log_moment, normalization_c

__all__ = [
    "log_barnes_g_product",
    "selberg_quadrature",
    "moment_quadrature_m1",
    "moment_haar_quadrature_m1",
    "small_x_residue",
    "density_n0_m1",
    "density_n1_m1",
    "cdf_n0_m1",
    "two_point_brute_force",
    "one_level_brute_force",
]

_EULER_GAMMA = 0.57721566490153286061


def log_barnes_g_product(z: float, terms: int = 10**6) -> float:
    """log G(z) from the Weierstrass product for G(1 + z), with a zeta tail.

    log G(1+z) = (z/2) log 2pi - ((1+gamma) z^2 + z)/2
                 + sum_k [k log(1 + z/k) - z + z^2/(2k)]
    The neglected k > K part is sum_{m>=3} (-1)^{m+1} z^m / m * zeta(m-1, K+1).
    """
    z = float(z)
    k = np.arange(1, terms + 1, dtype=float)
    body = np.sum(k * np.log1p(z / k) - z + z * z / (2 * k))
    tail = 0.0
    for m in range(3, 40):
        t = (-1) ** (m + 1) * z**m / m * special.zeta(m - 1, terms + 1)
        tail += t
        if abs(t) < 1e-18:
            break
    log_g1 = 0.5 * z * math.log(2 * math.pi) - 0.5 * ((1 + _EULER_GAMMA) * z * z + z) + body + tail
    # G(z) = G(1 + z) / Gamma(z)
    return log_g1 - math.lgamma(z)


def selberg_quadrature(params: SelbergParams, epsrel: float = 1e-10) -> float:
    """Selberg integral over [-1, 1]^K (K <= 3, real parameters) by nested quadrature."""
    K = params.K
    a, b, g = complex(params.alpha).real, complex(params.beta).real, params.gamma
    if K > 3:
        raise ValueError("nested quadrature oracle supports K <= 3 only")
    # QUADPACK's algebraic weight (x + 1)^{b-1} (1 - x)^{a-1}
    opts = dict(weight="alg", wvar=(b - 1.0, a - 1.0), epsabs=0.0, epsrel=epsrel, limit=200)

    def nest(fixed: tuple[float, ...]) -> float:
        if len(fixed) == K:
            v = 1.0
            for i in range(K):
                for j in range(i + 1, K):
                    v *= abs(fixed[i] - fixed[j]) ** (2 * g)
            return v
        return integrate.quad(lambda x: nest(fixed + (x,)), -1.0, 1.0, **opts)[0]

    return nest(())


def moment_quadrature_m1(n: int, s: float) -> float:
    """E|Lambda^{(n)}(1)|^s for M = 1 by 1-D quadrature over the single angle.

    With one free angle, |Lambda^{(n)}(1)| = n! 2 (1 - cos t) and the weight
    is (1 - cos t)^n dt.
    """
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    num = integrate.quad(lambda t: (1 - math.cos(t)) ** (n + s), 0, math.pi, **opts)[0]
    den = integrate.quad(lambda t: (1 - math.cos(t)) ** n, 0, math.pi, **opts)[0]
    return (math.factorial(n) * 2.0) ** s * num / den


def moment_haar_quadrature_m1(s: float) -> float:
    """E|Lambda(1)|^s over SO(2): uniform angle, |Lambda(1)| = 2(1 - cos t)."""
    val = integrate.quad(lambda t: (2 * (1 - math.cos(t))) ** s, 0, math.pi, epsabs=0.0, epsrel=1e-13)[0]
    return val / math.pi


def small_x_residue(spec: EnsembleSpec, radius: float = 0.25, nodes: int = 256) -> float:
    """Residue of the moment function at its first pole s = -(n + 1/2).

    Periodic trapezoid rule on a circle around the pole; converges
    geometrically since the next singularity is a unit distance away.
    """
    s0 = -(spec.n + 0.5)
    phi = 2 * math.pi * np.arange(nodes) / nodes
    w = radius * np.exp(1j * phi)
    vals = np.exp(log_moment(spec.n, spec.M, s0 + w)) * w
    return float(np.mean(vals).real)


def _theta_of_x(x):
    # x = 2(1 - cos t) = 4 sin^2(t/2)
    return 2.0 * np.arcsin(np.sqrt(np.asarray(x, dtype=float)) / 2.0)


def density_n0_m1(x):
    """Density of 2(1 - cos t), t uniform on [0, pi]."""
    return 1.0 / (2.0 * math.pi * np.sin(_theta_of_x(x)))


def density_n1_m1(x):
    """Density of 2(1 - cos t) for t with density (1 - cos t)/pi."""
    x = np.asarray(x, dtype=float)
    return x / (4.0 * math.pi * np.sqrt(x - x * x / 4.0))


def cdf_n0_m1(x):
    return _theta_of_x(x) / math.pi


def _log_joint(spec: EnsembleSpec, thetas: np.ndarray) -> float:
    c = np.cos(thetas)
    v = spec.n * np.sum(np.log1p(-c))
    for i in range(c.size):
        for j in range(i + 1, c.size):
            d = abs(c[i] - c[j])
            if d == 0.0:
                return -math.inf
            v += 2.0 * math.log(d)
    return v + normalization_c(spec).log_modulus


def two_point_brute_force(spec: EnsembleSpec, t1: float, t2: float, epsrel: float = 1e-7) -> float:
    """Two-point correlation at (t1, t2) by integrating out the other angles (M <= 4).

    Equals M (M - 1) times the two-angle marginal of the normalised joint density.
    """
    M = spec.M
    if not 2 <= M <= 4:
        raise ValueError("brute-force two-point oracle supports 2 <= M <= 4")
    rest = M - 2

    def f(*others):
        return math.exp(_log_joint(spec, np.array([t1, t2, *others])))

    if rest == 0:
        marg = f()
    else:
        ranges = [(0.0, math.pi)] * rest
        marg = integrate.nquad(f, ranges, opts=dict(epsabs=0.0, epsrel=epsrel, limit=100))[0]
    return M * (M - 1) * marg


def one_level_brute_force(spec: EnsembleSpec, t1: float, epsrel: float = 1e-8) -> float:
    """One-point density at t1 from the joint density (M <= 3)."""
    M = spec.M
    if not 1 <= M <= 3:
        raise ValueError("brute-force one-point oracle supports 1 <= M <= 3")

    def f(*others):
        return math.exp(_log_joint(spec, np.array([t1, *others])))

    if M == 1:
        marg = f()
    else:
        marg = integrate.nquad(f, [(0.0, math.pi)] * (M - 1), opts=dict(epsabs=0.0, epsrel=epsrel))[0]
    return M * marg
