"""Moments of |Lambda^{(n)}(1)| over SO(n + 2M) with n eigenvalues pinned at 1.

The exact moment is a finite Gamma product, accumulated in log space term by
term so that complex ``s`` (needed for Mellin inversion) is handled without
branch bookkeeping.  The Selberg integral is kept as an independent route to
the same numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError
from .special_fn import LogComplex, lgamma, log_barnes_g, log_gamma_ratio

__all__ = [
    "EnsembleSpec",
    "SelbergParams",
    "selberg_integral",
    "normalization_c",
    "log_moment",
    "moment_exact",
    "moment_haar_so_even",
    "moment_barnes",
    "moment_asymptotic",
]

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class EnsembleSpec:
    """SO(N) with ``n`` eigenvalues forced to 1 and ``M`` free conjugate pairs."""

    n: int
    M: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"n must be a nonnegative integer, got {self.n!r}")
        if int(self.M) != self.M or self.M < 0:
            raise DomainError(f"M must be a nonnegative integer, got {self.M!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "M", int(self.M))
        if self.N < 2:
            raise DomainError(f"matrix dimension N = n + 2M must be >= 2, got {self.N}")

    @property
    def N(self) -> int:
        return self.n + 2 * self.M

    @property
    def alpha(self) -> float:
        """Jacobi parameter n - 1/2 of the conditioned weight in x = cos(theta)."""
        return self.n - 0.5

    @property
    def beta(self) -> float:
        return -0.5

    @property
    def log_support_max(self) -> float:
        """log of n! 4^M, the largest possible value of |Lambda^{(n)}(1)|."""
        return math.lgamma(self.n + 1) + 2 * self.M * _LOG2


@dataclass(frozen=True)
class SelbergParams:
    K: int
    alpha: complex
    beta: complex
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if self.K < 1:
            raise DomainError(f"K must be a positive integer, got {self.K!r}")
        a, b = complex(self.alpha).real, complex(self.beta).real
        if not (a > 0 and b > 0):
            raise DomainError("Selberg integral needs Re alpha > 0 and Re beta > 0")
        bounds = [1.0 / self.K]
        if self.K > 1:
            bounds += [a / (self.K - 1), b / (self.K - 1)]
        if not self.gamma > -min(bounds):
            raise DomainError(f"gamma = {self.gamma} outside the convergence region")


def selberg_integral(params: SelbergParams) -> LogComplex:
    """log of the Selberg integral over [-1, 1]^K.

    Integrand: prod |x_j - x_l|^{2 gamma} prod (1 - x_j)^{alpha-1} (1 + x_j)^{beta-1}.
    """
    K, a, b, g = params.K, complex(params.alpha), complex(params.beta), params.gamma
    j = np.arange(K, dtype=float)
    log2_pow = (g * K * (K - 1) + K * (a + b - 1)) * _LOG2
    terms = (
        lgamma(1 + g + j * g)
        + lgamma(a + j * g)
        + lgamma(b + j * g)
        - lgamma(1 + g + 0 * j)
        - lgamma(a + b + g * (K + j - 1))
    )
    return LogComplex.from_log(log2_pow + np.sum(terms))


def normalization_c(spec: EnsembleSpec) -> LogComplex:
    """log C(M, n), the constant normalising the conditioned eigenangle density."""
    n, M = spec.n, spec.M
    if M == 0:
        return LogComplex(0.0)
    j = np.arange(1, M + 1, dtype=float)
    log_inv = (M * (M - 1) + M * n) * _LOG2 + np.sum(
        lgamma(j + 1) + lgamma(n - 0.5 + j) + lgamma(j - 0.5) - lgamma(n + M + j - 1)
    )
    return LogComplex(-log_inv.real, -log_inv.imag)


def _check_poles(n: int, M: int, s: np.ndarray) -> None:
    # Gamma(n - 1/2 + s + j), j = 1..M, is singular iff n - 1/2 + s is an integer <= -1
    if M == 0:
        return
    hit = _near_nonpositive_int(n + 0.5 + s)
    if np.any(hit):
        bad = np.asarray(s)[hit].ravel()[0]
        raise PoleError(f"moment has a pole at s = {bad!r} for n = {n}")


def log_moment(n: int, M: int, s) -> np.ndarray:
    """Vectorised log of the exact moment E|Lambda^{(n)}(1)|^s (complex ``s``)."""
    s = np.asarray(s, dtype=complex)
    _check_poles(n, M, s)
    out = s * math.lgamma(n + 1)
    if M == 0:
        return out
    j = np.arange(1, M + 1, dtype=float)
    a = n - 0.5 + j
    b = n + M + j - 1.0
    ss = s[..., None]
    terms = log_gamma_ratio(a + ss, a) - log_gamma_ratio(b + ss, b)
    return out + 2 * M * _LOG2 * s + np.sum(terms, axis=-1)


def moment_exact(spec: EnsembleSpec, s: complex) -> LogComplex:
    """log of M(n, M, s) = E|Lambda^{(n)}(1)|^s from the closed Gamma product."""
    return LogComplex.from_log(log_moment(spec.n, spec.M, s))


def moment_haar_so_even(N: int, s: complex) -> LogComplex:
    """log of E Lambda(1)^s over Haar SO(2N)."""
    if N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    s = complex(s)
    j = np.arange(1, N + 1, dtype=float)
    if np.any(_near_nonpositive_int(s + j - 0.5)):
        raise PoleError(f"Haar moment has a pole at s = {s!r}")
    terms = lgamma(N + j - 1) + lgamma(s + j - 0.5) - lgamma(j - 0.5) - lgamma(s + j + N - 1)
    return LogComplex.from_log(2 * N * _LOG2 * s + np.sum(terms))


def _near_nonpositive_int(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    r = np.round(z.real)
    return (np.abs(z.real - r) <= 1e-12) & (np.abs(z.imag) <= 1e-12) & (r <= 0)


def _real_s(s) -> float:
    s = complex(s)
    if s.imag != 0:
        raise DomainError("Barnes G forms are implemented for real s only")
    return s.real


def moment_barnes(spec: EnsembleSpec, s: float) -> LogComplex:
    """The exact moment rewritten as a ratio of Barnes G values (real s only)."""
    s = _real_s(s)
    n, M = spec.n, spec.M
    h = n + 0.5
    if not h + s > 0:
        raise PoleError(f"s = {s} is at or left of the first pole -(n + 1/2)")
    G = log_barnes_g
    val = (
        s * math.lgamma(n + 1)
        + 2 * M * s * _LOG2
        + G(h + s + M)
        - G(h + s)
        + G(h)
        - G(h + M)
        + G(n + 2 * M)
        - G(n + M)
        + G(n + s + M)
        - G(n + s + 2 * M)
    )
    return LogComplex(val)


def moment_asymptotic(spec: EnsembleSpec, s: float) -> LogComplex:
    """Leading large-M behaviour of the moment (real s only).

    (n!)^s (2 pi)^{s/2} 2^{-s^2/2 - s(n-1)} G(n+1/2)/G(n+1/2+s) M^{s^2/2 + s(n-1/2)}
    """
    s = _real_s(s)
    n, M = spec.n, spec.M
    if M < 1:
        raise DomainError("the asymptotic form needs M >= 1")
    h = n + 0.5
    if not h + s > 0:
        raise PoleError(f"G(n + 1/2 + s) vanishes or is undefined at s = {s}")
    val = (
        s * math.lgamma(n + 1)
        + 0.5 * s * math.log(2 * math.pi)
        + (-0.5 * s * s - s * (n - 1)) * _LOG2
        + log_barnes_g(h)
        - log_barnes_g(h + s)
        + (0.5 * s * s + s * (n - 0.5)) * math.log(M)
    )
    return LogComplex(val)
