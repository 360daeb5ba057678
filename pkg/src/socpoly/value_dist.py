"""Value distribution of |Lambda^{(n)}(1)| by inverse Mellin transform.

The moment function is known in closed form, so the density is

    P(x) = (1 / 2 pi i) int x^{-s-1} M(n, M, s) ds

along any upward path to the right of the first pole at s = -(n + 1/2).

Two quadratures are provided.  The default deforms the path into a parabola
through the saddle point of the integrand, after substituting
u = log(n! 4^M) - log x; the integrand then decays like exp(-c t^2) and a few
dozen nodes give close to double precision.  A literal vertical line
x = c + i t is available through :class:`MellinContour` for comparison, but
|M(c + it)| only decays like |t|^{M(1/2 - M)}, which for M = 1 is too slow to
be useful.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.optimize import brentq
from scipy.special import digamma, polygamma

from .errors import AccuracyWarning, ConvergenceWarning, DomainError
from .moments import EnsembleSpec, log_moment
from .special_fn import lgamma, log_barnes_g, log_gamma_ratio

__all__ = [
    "MellinContour",
    "DensityGrid",
    "density_at",
    "density_grid",
    "cdf_at",
    "cdf_grid",
    "density_moment",
    "small_x_coefficient",
    "small_x_coefficient_asymptotic",
    "tail_probability",
]

# Parabolic contour shape z(t) = sigma + (N/u) (-_MU t^2 + i _NU t), t in (-pi, pi).
_MU = 0.1194
_NU = 0.25
_SIGMA = 0.1309
_REL_TOL = 1e-9
_NODES = (32, 48, 64, 96, 128)
_WARN_TOL = 1e-6


@dataclass(frozen=True)
class MellinContour:
    """Vertical line Re s = c, truncated at |Im s| = t_max, ``steps`` Simpson panels."""

    c: float = 1.0
    t_max: float = 200.0
    steps: int = 4096

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise DomainError(f"contour abscissa must be positive, got c = {self.c}")
        if not self.t_max > 0:
            raise DomainError(f"t_max must be positive, got {self.t_max}")
        if int(self.steps) != self.steps or self.steps < 64:
            raise DomainError(f"steps must be an integer >= 64, got {self.steps}")


@dataclass(frozen=True)
class DensityGrid:
    """A sampled curve: strictly increasing abscissae and finite values."""

    abscissae: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.abscissae, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if a.shape != v.shape or a.ndim != 1:
            raise DomainError("abscissae and values must be 1-D and of equal length")
        if a.size > 1 and not np.all(np.diff(a) > 0):
            raise DomainError("abscissae must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("grid values must be finite")
        object.__setattr__(self, "abscissae", a)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.abscissae.size

    def trapezoid(self) -> float:
        return float(np.trapezoid(self.values, self.abscissae))


def _require_free(spec: EnsembleSpec) -> None:
    if spec.M < 1:
        raise DomainError("M = 0 gives a point mass at n!, which has no density")


# ---------------------------------------------------------------------------
# saddle-point parabola in u = log(n! 4^M) - log x


def _gamma_args(spec: EnsembleSpec) -> tuple[np.ndarray, np.ndarray, float]:
    n, M = spec.n, spec.M
    j = np.arange(1, M + 1, dtype=float)
    s0 = -(n + 0.5)
    return n - 0.5 + j + s0, n + M + j - 1.0 + s0, s0


def _saddle(spec: EnsembleSpec, u: float) -> float:
    # root in z > 0 of u + d/dz log F(z + s0); the j = 1 term makes it -inf at 0+
    a, b, _ = _gamma_args(spec)

    def g(z):
        return u + np.sum(digamma(a + z) - digamma(b + z))

    hi = 1.0
    while g(hi) < 0:
        hi *= 2.0
    return brentq(g, 1e-300, hi, xtol=1e-14, rtol=1e-12)


def _sd_u(spec: EnsembleSpec) -> float:
    a, b, s0 = _gamma_args(spec)
    return math.sqrt(np.sum(polygamma(1, a - s0) - polygamma(1, b - s0)))


def _log_f(spec: EnsembleSpec, s: np.ndarray) -> np.ndarray:
    # log E[Y^s] for Y = Lambda / (n! 4^M).  Pairing Gamma(a + s) with
    # Gamma(b + s) keeps full accuracy when |s| >> M.
    a, b, s0 = _gamma_args(spec)
    a, b = a - s0, b - s0
    const = float(np.sum(lgamma(b) - lgamma(a)).real)
    return np.sum(log_gamma_ratio(a + s[..., None], b + s[..., None]), axis=-1) + const


def _p_u(spec: EnsembleSpec, u: float, nodes: int) -> tuple[float, float]:
    """Density of U at u > 0 with ``nodes`` midpoint nodes on the full parabola.

    Also returns a roundoff estimate: the terms grow like exp(0.13 nodes), so
    cancellation, not truncation, limits the attainable accuracy.
    """
    _, _, s0 = _gamma_args(spec)
    lam = nodes / u
    sigma = max(_saddle(spec, u), _SIGMA * lam)
    t = -np.pi + (np.arange(nodes // 2, nodes) + 0.5) * (2 * np.pi / nodes)
    z = sigma + lam * (-_MU * t * t + 1j * _NU * t)
    dz = lam * (-2 * _MU * t + 1j * _NU)
    log_f = _log_f(spec, z + s0)
    vals = np.exp(z * u + log_f + s0 * u) * dz
    scale = 2.0 / nodes
    # each exponent carries a relative error of a few ulp of its own size
    err = 1e-15 * np.abs(vals) * (1.0 + np.abs(z * u) + np.abs(log_f))
    return float(scale * np.sum(vals).imag), float(scale * np.sum(err))


def _p_u_adaptive(spec: EnsembleSpec, u: float) -> float:
    # Refine until two node counts agree.  Past ~100 nodes roundoff grows
    # faster than truncation shrinks, so if no pair agrees to the target the
    # best-agreeing pair is used and a warning is raised only if even that
    # is poor.
    floor = 1e-15 / _sd_u(spec)
    prev, prev_noise = _p_u(spec, u, _NODES[0])
    best, best_gap = prev, math.inf
    for nodes in _NODES[1:]:
        cur, noise = _p_u(spec, u, nodes)
        gap = abs(cur - prev)
        if gap <= _REL_TOL * abs(cur) + max(noise, prev_noise) + floor:
            return cur
        if gap < best_gap:
            best, best_gap = prev, gap
        prev, prev_noise = cur, noise
    if best_gap > _WARN_TOL * abs(best) + floor:
        warnings.warn(
            f"inverse Mellin sum not converged at u = {u:.6g} (n={spec.n}, M={spec.M}); "
            f"relative disagreement {best_gap / abs(best):.1e}",
            ConvergenceWarning,
            stacklevel=3,
        )
    return best


# ---------------------------------------------------------------------------
# literal vertical line


def _density_vertical(spec: EnsembleSpec, x: float, contour: MellinContour) -> float:
    steps = contour.steps + contour.steps % 2
    t = np.linspace(0.0, contour.t_max, steps + 1)
    s = contour.c + 1j * t
    logx = math.log(x)
    vals = np.exp(log_moment(spec.n, spec.M, s) - (s + 1) * logx)
    mag = np.abs(vals)
    if mag[-1] > 1e-14 * mag.max():
        warnings.warn(
            f"vertical-line integrand at t_max = {contour.t_max} is "
            f"{mag[-1] / mag.max():.2e} of its peak",
            ConvergenceWarning,
            stacklevel=3,
        )
    # conjugate symmetry in t: integrate t >= 0 and double the real part
    return float(integrate.simpson(vals.real, x=t) / math.pi)


# ---------------------------------------------------------------------------
# public density API


def density_at(spec: EnsembleSpec, x: float, contour: MellinContour | None = None) -> float:
    """Density P(n, M, x) of |Lambda^{(n)}(1)| at ``x > 0``.

    Parameters
    ----------
    spec : EnsembleSpec
    x : float
        Point of evaluation.  The support is (0, n! 4^M]; the density is 0
        beyond it.
    contour : MellinContour, optional
        If given, integrate along this vertical line instead of the default
        saddle-point parabola.
    """
    _require_free(spec)
    x = float(x)
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    if contour is not None:
        return _density_vertical(spec, x, contour)
    u = spec.log_support_max - math.log(x)
    if u <= 0:
        return 0.0
    return _p_u_adaptive(spec, u) / x


def density_grid(spec: EnsembleSpec, x_grid, contour: MellinContour | None = None) -> DensityGrid:
    """``density_at`` on every point of an increasing grid."""
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("x_grid must be a nonempty 1-D sequence")
    if np.any(x <= 0):
        raise DomainError("all grid points must be positive")
    vals = np.array([density_at(spec, xi, contour) for xi in x])
    return DensityGrid(x, vals)


def _u_integral(spec: EnsembleSpec, weight, u_lo: float, u_hi: float) -> float:
    # integrate weight(u) p_U(u) du; u = v^2 tames the u^{M-1/2}-type edge at 0
    def f(v):
        u = v * v
        if u <= 0:
            return 0.0
        return 2 * v * weight(u) * _p_u_adaptive(spec, u)

    v_lo, v_hi = math.sqrt(u_lo), math.sqrt(u_hi)
    val, _ = integrate.quad(f, v_lo, v_hi, epsabs=0.0, epsrel=1e-11, limit=200)
    return val


def _u_upper(spec: EnsembleSpec, s: float = 0.0) -> float:
    # x^s p_U(u) ~ exp(-(n + 1/2 + s) u), negligible beyond this point
    return 40.0 / (spec.n + 0.5 + s) + 12 * _sd_u(spec) + 5.0


def density_moment(spec: EnsembleSpec, s: float = 0.0) -> float:
    """int_0^inf x^s P(n, M, x) dx by quadrature of the inverted density.

    Used to check the inversion against the closed-form moments: ``s = 0``
    is the total mass.
    """
    _require_free(spec)
    if not s > -(spec.n + 0.5):
        raise DomainError(f"moment diverges for s = {s} <= -(n + 1/2)")
    L = spec.log_support_max
    u_hi = _u_upper(spec, s)
    return _u_integral(spec, lambda u: math.exp(s * (L - u)), 0.0, u_hi)


def cdf_at(spec: EnsembleSpec, X: float) -> float:
    """P(|Lambda^{(n)}(1)| <= X) by quadrature of the density."""
    _require_free(spec)
    X = float(X)
    if X <= 0:
        return 0.0
    u_x = spec.log_support_max - math.log(X)
    if u_x <= 0:
        return 1.0
    u_hi = max(_u_upper(spec), u_x + 40.0 / (spec.n + 0.5))
    return _u_integral(spec, lambda u: 1.0, u_x, u_hi)


def cdf_grid(spec: EnsembleSpec, x_grid) -> DensityGrid:
    """CDF on an increasing grid, accumulated from piecewise quadratures."""
    _require_free(spec)
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0 or np.any(x <= 0) or np.any(np.diff(x) <= 0):
        raise DomainError("x_grid must be positive and strictly increasing")
    L = spec.log_support_max
    first = cdf_at(spec, x[0])
    u = np.maximum(L - np.log(x), 0.0)
    pieces = [
        _u_integral(spec, lambda _u: 1.0, u[i + 1], u[i]) if u[i] > u[i + 1] else 0.0
        for i in range(x.size - 1)
    ]
    return DensityGrid(x, np.minimum(first + np.concatenate([[0.0], np.cumsum(pieces)]), 1.0))


# ---------------------------------------------------------------------------
# small-x law


def _log_small_x_coefficient(spec: EnsembleSpec) -> float:
    n, M = spec.n, spec.M
    j = np.arange(1, M + 1, dtype=float)
    terms = lgamma(j) + lgamma(M + n + j - 1) - lgamma(n - 0.5 + j) - lgamma(M + j - 1.5)
    return (
        -(2 * n + 1) / 2 * math.lgamma(n + 1)
        - M * (2 * n + 1) * math.log(2)
        - math.lgamma(M)
        + float(np.sum(terms).real)
    )


def small_x_coefficient(spec: EnsembleSpec) -> float:
    """f(n, M): P(n, M, x) ~ f(n, M) x^{n - 1/2} as x -> 0."""
    _require_free(spec)
    return math.exp(_log_small_x_coefficient(spec))


def small_x_coefficient_asymptotic(spec: EnsembleSpec) -> float:
    """Large-M form of f(n, M)."""
    _require_free(spec)
    n, M = spec.n, spec.M
    log_f = (
        -(2 * n + 1) / 2 * math.lgamma(n + 1)
        + log_barnes_g(n + 0.5)
        + (-n * n / 2 + n / 2 + 3 / 8) * math.log(M)
        + (n * n / 2 - 1.5 * n - 7 / 8) * math.log(2)
        + (-n / 2 - 0.25) * math.log(math.pi)
    )
    return math.exp(log_f)


def tail_probability(spec: EnsembleSpec, X: float, threshold: float = 0.1) -> float:
    """Leading small-X approximation to P(|Lambda^{(n)}(1)| <= X).

    Warns with :class:`AccuracyWarning` when ``X`` exceeds ``threshold``
    times the mean of the distribution.
    """
    _require_free(spec)
    X = float(X)
    if X < 0:
        raise DomainError(f"X must be nonnegative, got {X}")
    if X == 0:
        return 0.0
    mean = math.exp(float(log_moment(spec.n, spec.M, 1.0).real))
    if X > threshold * mean:
        warnings.warn(
            f"X = {X:.4g} exceeds {threshold} x mean ({mean:.4g}); "
            "the small-X law is unreliable there",
            AccuracyWarning,
            stacklevel=2,
        )
    k = spec.n + 0.5
    return math.exp(math.log(X) * k + _log_small_x_coefficient(spec)) / k
