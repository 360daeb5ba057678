"""Eigenangle correlation functions of the conditioned ensemble.

In x = cos(theta) the M free angles form a determinantal process for the
Jacobi weight (1 - x)^{n - 1/2} (1 + x)^{-1/2}, equivalently (1 - cos t)^n dt.
The reproducing kernel here is the sum over the first M orthogonal
polynomials, degrees 0..M-1, so that the one-level density integrates to M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .moments import EnsembleSpec
from .special_fn import JacobiParams, bessel_j_half, jacobi_norm, jacobi_poly_all, lgamma

__all__ = [
    "KernelContext",
    "kernel",
    "kernel_spectral",
    "one_level_density",
    "m_level_density",
    "scaled_kernel",
    "scaled_one_level",
    "finite_scaled_kernel",
]

_DIAG_TOL = 1e-9


@dataclass(frozen=True)
class KernelContext:
    """Kernel parameters alpha = n - 1/2, beta = -1/2 and the number of angles M."""

    spec: EnsembleSpec

    def __post_init__(self) -> None:
        if self.spec.M < 1:
            raise DomainError("the kernel needs at least one free angle (M >= 1)")

    @property
    def alpha(self) -> float:
        return self.spec.n - 0.5

    @property
    def beta(self) -> float:
        return -0.5

    @property
    def cd_constant(self) -> float:
        """k_{M-1} / (k_M h_{M-1}) for the two top polynomials P_M, P_{M-1}."""
        n, M = self.spec.n, self.spec.M
        logs = lgamma(np.array([M + 1.0, M + n, M + n - 0.5, M - 0.5])).real
        return math.exp(
            (1 - n) * math.log(2.0)
            - math.log(2 * M + n - 1)
            + logs[0]
            + logs[1]
            - logs[2]
            - logs[3]
        )


def _check_angles(*thetas) -> None:
    for t in thetas:
        t = np.asarray(t, dtype=float)
        if np.any(~np.isfinite(t)) or np.any(t <= 0) or np.any(t >= math.pi):
            raise DomainError("angles must lie in the open interval (0, pi)")


def _top_pair(ctx: KernelContext, x, alpha_shift: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    M = ctx.spec.M
    P = jacobi_poly_all(M, ctx.alpha + alpha_shift, ctx.beta + alpha_shift, x)
    return P[M], P[M - 1]


def _derivative_pair(ctx: KernelContext, x) -> tuple[np.ndarray, np.ndarray]:
    # d/dx P_j = (j + alpha + beta + 1)/2 P_{j-1}^{(alpha+1, beta+1)}
    M = ctx.spec.M
    ab1 = ctx.alpha + ctx.beta + 1
    Q = jacobi_poly_all(max(M - 1, 0), ctx.alpha + 1, ctx.beta + 1, x)
    dM = 0.5 * (M + ab1) * Q[M - 1]
    dM1 = 0.5 * (M - 1 + ab1) * Q[M - 2] if M >= 2 else np.zeros_like(dM)
    return dM, dM1


def _kernel_x(ctx: KernelContext, x, y) -> np.ndarray:
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    c = ctx.cd_constant
    diff = x - y
    near = np.abs(diff) < _DIAG_TOL
    out = np.empty(x.shape)
    if np.any(~near):
        xo, yo = x[~near], y[~near]
        px, px1 = _top_pair(ctx, xo)
        py, py1 = _top_pair(ctx, yo)
        out[~near] = c * (px * py1 - px1 * py) / (xo - yo)
    if np.any(near):
        mid = 0.5 * (x[near] + y[near])
        p, p1 = _top_pair(ctx, mid)
        dp, dp1 = _derivative_pair(ctx, mid)
        out[near] = c * (dp * p1 - dp1 * p)
    return out


def kernel(ctx: KernelContext, theta, phi):
    """Christoffel-Darboux kernel K_M(theta, phi) of the conditioned ensemble.

    Parameters
    ----------
    ctx : KernelContext
    theta, phi : float or array_like
        Angles in (0, pi); broadcast against each other.
    """
    _check_angles(theta, phi)
    out = _kernel_x(ctx, np.cos(theta), np.cos(phi))
    return out if out.ndim else float(out)


def kernel_spectral(ctx: KernelContext, theta, phi):
    """The same kernel as the explicit sum of h_j^{-1} P_j P_j over j < M."""
    _check_angles(theta, phi)
    M = ctx.spec.M
    x, y = np.broadcast_arrays(np.cos(np.asarray(theta, float)), np.cos(np.asarray(phi, float)))
    Px = jacobi_poly_all(M - 1, ctx.alpha, ctx.beta, x)
    Py = jacobi_poly_all(M - 1, ctx.alpha, ctx.beta, y)
    inv_h = np.array([1.0 / jacobi_norm(JacobiParams(ctx.alpha, ctx.beta, j)) for j in range(M)])
    out = np.tensordot(inv_h, Px * Py, axes=1)
    return out if out.ndim else float(out)


def _weight_sqrt(n: int, theta) -> np.ndarray:
    # (2^n sin^{2n}(theta/2))^{1/2} = (1 - cos theta)^{n/2}
    return (2.0 * np.sin(0.5 * np.asarray(theta, dtype=float)) ** 2) ** (0.5 * n)


def one_level_density(ctx: KernelContext, theta):
    """Expected density of the free eigenangles at ``theta``; integrates to M."""
    _check_angles(theta)
    x = np.cos(theta)
    out = _weight_sqrt(ctx.spec.n, theta) ** 2 * _kernel_x(ctx, x, x)
    return out if out.ndim else float(out)


def m_level_density(ctx: KernelContext, thetas) -> float:
    """m-point correlation function: det of the weighted kernel matrix."""
    t = np.asarray(thetas, dtype=float).ravel()
    if t.size == 0 or t.size > ctx.spec.M:
        raise DomainError(f"need 1 <= m <= M = {ctx.spec.M} angles, got {t.size}")
    _check_angles(t)
    x = np.cos(t)
    w = _weight_sqrt(ctx.spec.n, t)
    mat = w[:, None] * w[None, :] * _kernel_x(ctx, x[:, None], x[None, :])
    return float(np.linalg.det(mat))


def finite_scaled_kernel(ctx: KernelContext, theta, phi):
    """(pi/M) w^{1/2} K_M w^{1/2} at angles pi theta / M, pi phi / M.

    Converges to :func:`scaled_kernel` as M grows.
    """
    M = ctx.spec.M
    a = math.pi * np.asarray(theta, dtype=float) / M
    b = math.pi * np.asarray(phi, dtype=float) / M
    _check_angles(a, b)
    n = ctx.spec.n
    out = (math.pi / M) * _weight_sqrt(n, a) * _weight_sqrt(n, b) * _kernel_x(ctx, np.cos(a), np.cos(b))
    return out if out.ndim else float(out)


def _check_order(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"scaled densities need an integer n >= 1, got {n!r}")


def scaled_one_level(n: int, theta):
    """Large-M one-level density near the forced eigenvalue, in units of mean spacing.

    Uses J_{n-1/2}^2 - J_{n-3/2} J_{n+1/2}, which equals the usual three-term
    bracket by the Bessel recurrence but does not cancel for small theta.
    """
    _check_order(n)
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("theta must be positive")
    z = math.pi * theta
    j_lo = bessel_j_half(n - 1, z)
    j_mid = bessel_j_half(n, z)
    j_hi = bessel_j_half(n + 1, z)
    out = 0.5 * math.pi**2 * theta * (j_mid * j_mid - j_lo * j_hi)
    return out if np.ndim(out) else float(out)


def scaled_kernel(n: int, theta: float, phi: float) -> float:
    """Bessel-kernel limit L(theta, phi) of the scaled finite kernel."""
    _check_order(n)
    theta, phi = float(theta), float(phi)
    if theta <= 0 or phi <= 0:
        raise DomainError("theta and phi must be positive")
    if theta == phi:
        return scaled_one_level(n, theta)
    a, b = math.pi * theta, math.pi * phi
    bracket = theta * bessel_j_half(n - 1, a) * bessel_j_half(n, b) - phi * bessel_j_half(
        n - 1, b
    ) * bessel_j_half(n, a)
    return math.sqrt(a * b) * bracket / (phi * phi - theta * theta)
