"""Cross-validation suite: every fast route against an independent one.

Each check reports the largest error it measured and the tolerance it was
held to.  ``quick=True`` trims grids and sample sizes so the whole suite runs
in well under a minute.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracles
from .ensemble import SamplerConfig, estimate_moment
from .errors import MixingWarning
from .level_density import (
    KernelContext,
    finite_scaled_kernel,
    kernel,
    kernel_spectral,
    one_level_density,
    scaled_kernel,
    scaled_one_level,
)
from .moments import (
    EnsembleSpec,
    SelbergParams,
    moment_asymptotic,
    moment_barnes,
    moment_exact,
    moment_haar_so_even,
    normalization_c,
    selberg_integral,
)
from .special_fn import lgamma, log_barnes_g
from .value_dist import density_at, density_moment, small_x_coefficient, small_x_coefficient_asymptotic

__all__ = ["Check", "run_checks", "format_line", "format_report", "CHECKS"]


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    error: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)


def _rel(a: float, b: float) -> float:
    return abs(a / b - 1.0)


def _value(lc) -> float:
    return math.exp(lc.log_modulus) * math.cos(lc.phase)


def check_moment_closed_form(quick: bool) -> tuple[float, float]:
    cases = [(1, 1), (1, 2), (0, 1)]
    err = max(_rel(_value(moment_exact(EnsembleSpec(n, 1), s)), oracles.moment_quadrature_m1(n, s)) for n, s in cases)
    return err, 1e-10


def check_haar(quick: bool) -> tuple[float, float]:
    Ms = (1, 2, 5, 10) if quick else range(1, 51)
    err = 0.0
    for M in Ms:
        for s in (0.5, 1.0, 2.0, 3.0):
            a = moment_exact(EnsembleSpec(0, M), s).log_modulus
            b = moment_haar_so_even(M, s).log_modulus
            err = max(err, abs(math.expm1(a - b)))
    return err, 1e-12


def check_selberg(quick: bool) -> tuple[float, float]:
    Ks = (1, 2) if quick else (1, 2, 3)
    err = 0.0
    for K in Ks:
        for a in (0.5, 1.0, 1.5, 2.5):
            p = SelbergParams(K, a, 0.5, 1.0)
            err = max(err, _rel(math.exp(selberg_integral(p).log_modulus), oracles.selberg_quadrature(p)))
    return err, 1e-6


def check_normalization(quick: bool) -> tuple[float, float]:
    err = 0.0
    for n in range(6):
        for M in range(1, 21):
            p = SelbergParams(M, n + 0.5, 0.5, 1.0)
            err = max(err, abs(math.expm1(normalization_c(EnsembleSpec(n, M)).log_modulus + selberg_integral(p).log_modulus)))
    return err, 1e-12


def check_barnes_recurrence(quick: bool) -> tuple[float, float]:
    err = 0.0
    for z in np.arange(0.5, 40.01, 0.5):
        err = max(err, abs(log_barnes_g(z + 1) - float(lgamma(z).real) - log_barnes_g(z)))
    return err, 1e-10


def check_barnes_product(quick: bool) -> tuple[float, float]:
    zs = (0.5,) if quick else (0.5, 1.5, 2.5)
    terms = 10**5 if quick else 10**6
    err = max(abs(math.expm1(log_barnes_g(z) - oracles.log_barnes_g_product(z, terms))) for z in zs)
    return err, 1e-8


def check_barnes_moment(quick: bool) -> tuple[float, float]:
    err = 0.0
    for n in range(4):
        for M in (1, 7, 40):
            spec = EnsembleSpec(n, M)
            for s in (0.5, 1.0, 2.0):
                err = max(err, abs(math.expm1(moment_barnes(spec, s).log_modulus - moment_exact(spec, s).log_modulus)))
    return err, 1e-10


def _mellin_grid(quick: bool):
    if quick:
        return [(0, 1), (1, 3), (2, 6)]
    return [(n, M) for n in range(4) for M in (1, 3, 6, 10)]


def check_mellin_mass(quick: bool) -> tuple[float, float]:
    err = max(abs(density_moment(EnsembleSpec(n, M), 0.0) - 1.0) for n, M in _mellin_grid(quick))
    return err, 1e-6


def check_mellin_moment(quick: bool) -> tuple[float, float]:
    err = 0.0
    for n, M in _mellin_grid(quick):
        spec = EnsembleSpec(n, M)
        err = max(err, _rel(density_moment(spec, 1.0), _value(moment_exact(spec, 1.0))))
    return err, 1e-5


def check_analytic_density(quick: bool) -> tuple[float, float]:
    xs = np.array([1e-6, 0.01, 0.5, 1.0, 2.0, 3.0, 3.9])
    e0, e1 = EnsembleSpec(0, 1), EnsembleSpec(1, 1)
    err = max(
        max(_rel(density_at(e0, x), oracles.density_n0_m1(x)) for x in xs),
        max(_rel(density_at(e1, x), oracles.density_n1_m1(x)) for x in xs),
    )
    return err, 1e-5


def check_tail_law(quick: bool) -> tuple[float, float]:
    grid = [(n, M) for n in range(4) for M in ((1, 8) if quick else range(1, 9))]
    x = 1e-6
    err = max(_rel(density_at(EnsembleSpec(n, M), x) / x ** (n - 0.5), small_x_coefficient(EnsembleSpec(n, M))) for n, M in grid)
    return err, 1e-2


def check_residue(quick: bool) -> tuple[float, float]:
    grid = [(n, M) for n in range(4) for M in range(1, 9)]
    err = max(_rel(oracles.small_x_residue(EnsembleSpec(n, M)), small_x_coefficient(EnsembleSpec(n, M))) for n, M in grid)
    return err, 1e-10


def check_asymptotics(quick: bool) -> tuple[float, float]:
    err = 0.0
    for n in range(3):
        spec = EnsembleSpec(n, 10**4)
        for s in (1.0, 2.0):
            err = max(err, abs(math.expm1(moment_exact(spec, s).log_modulus - moment_asymptotic(spec, s).log_modulus)))
        err = max(err, _rel(small_x_coefficient(spec), small_x_coefficient_asymptotic(spec)))
    return err, 2e-2


def check_kernel_cd(quick: bool) -> tuple[float, float]:
    rng = np.random.default_rng(12345)
    err = 0.0
    for n in range(4):
        for M in (1, 2, 5, 12, 30):
            ctx = KernelContext(EnsembleSpec(n, M))
            th, ph = rng.uniform(0.05, math.pi - 0.05, (2, 8))
            a = kernel(ctx, th, ph)
            b = kernel_spectral(ctx, th, ph)
            scale = np.maximum(np.abs(b), np.sqrt(np.abs(kernel_spectral(ctx, th, th) * kernel_spectral(ctx, ph, ph))))
            err = max(err, float(np.max(np.abs(a - b) / scale)))
            err = max(err, float(np.max(np.abs(kernel(ctx, th, th) / kernel_spectral(ctx, th, th) - 1))))
    return err, 1e-8


def check_one_level_mass(quick: bool) -> tuple[float, float]:
    err = 0.0
    for n in range(4):
        for M in (1, 3, 10, 20):
            ctx = KernelContext(EnsembleSpec(n, M))
            x, w = np.polynomial.legendre.leggauss(4 * M + 2 * n + 20)
            t = 0.5 * math.pi * (x + 1)
            err = max(err, abs(0.5 * math.pi * np.dot(w, one_level_density(ctx, t)) - M))
    return err, 1e-8


def check_scaled_convergence(quick: bool) -> tuple[float, float]:
    err = 0.0
    for n in (1, 2):
        ctx = KernelContext(EnsembleSpec(n, 2000))
        err = max(err, abs(finite_scaled_kernel(ctx, 0.7, 1.3) - scaled_kernel(n, 0.7, 1.3)))
    return err, 1e-3


def check_scaled_closed_form(quick: bool) -> tuple[float, float]:
    t = np.linspace(0.005, 3.0, 600)
    return float(np.max(np.abs(scaled_one_level(1, t) - (1 - np.sin(2 * math.pi * t) / (2 * math.pi * t))))), 1e-12


def check_small_theta_slope(quick: bool) -> tuple[float, float]:
    t = np.geomspace(1e-3, 1e-2, 20)
    err = 0.0
    for n in range(1, 5):
        slope = np.polyfit(np.log(t), np.log(scaled_one_level(n, t)), 1)[0]
        err = max(err, abs(slope - 2 * n))
    return err, 2e-2


def check_monte_carlo(quick: bool, seed: int = 0) -> tuple[float, float]:
    """Largest |MC - exact| / stderr; the tolerance is three standard errors."""
    grid = [(0, 1), (1, 5)] if quick else [(n, M) for n in range(3) for M in (1, 5, 10)]
    count = 20_000 if quick else 100_000
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MixingWarning)
        for n, M in grid:
            spec = EnsembleSpec(n, M)
            for s in (1.0, 2.0):
                mean, se = estimate_moment(spec, SamplerConfig(seed=seed), s, count)
                worst = max(worst, abs(mean - _value(moment_exact(spec, s))) / se)
    return worst, 3.0


CHECKS: list[tuple[str, Callable, bool]] = [
    ("moment closed form vs 1-D quadrature", check_moment_closed_form, True),
    ("conditioned n=0 vs Haar SO(2N) moments", check_haar, True),
    ("Selberg closed form vs nested quadrature", check_selberg, True),
    ("normalisation constant times Selberg integral", check_normalization, True),
    ("Barnes G recurrence on half-integers", check_barnes_recurrence, True),
    ("Barnes G vs defining product", check_barnes_product, True),
    ("moment as Barnes G ratio vs Gamma product", check_barnes_moment, True),
    ("inverse Mellin total mass", check_mellin_mass, True),
    ("inverse Mellin first moment", check_mellin_moment, True),
    ("inverse Mellin vs exact M=1 densities", check_analytic_density, True),
    ("small-x law at x=1e-6", check_tail_law, True),
    ("f(n,M) vs residue of the moment function", check_residue, True),
    ("large-M asymptotics at M=1e4", check_asymptotics, True),
    ("Christoffel-Darboux vs spectral sum", check_kernel_cd, True),
    ("one-level density integrates to M", check_one_level_mass, True),
    ("scaled kernel at M=2000 vs Bessel limit", check_scaled_convergence, True),
    ("n=1 scaled density closed form", check_scaled_closed_form, True),
    ("small-theta slope 2n of scaled density", check_small_theta_slope, True),
    ("Monte Carlo moments (in standard errors)", check_monte_carlo, True),
]


def run_checks(quick: bool = False, seed: int = 0, progress: Callable[[Check], None] | None = None) -> list[Check]:
    out = []
    for name, fn, _ in CHECKS:
        t0 = time.perf_counter()
        try:
            if fn is check_monte_carlo:
                err, tol = fn(quick, seed)
            else:
                err, tol = fn(quick)
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            err, tol = math.inf, 0.0
            name = f"{name} [{type(exc).__name__}: {exc}]"
        chk = Check(name, tol, float(err), time.perf_counter() - t0)
        out.append(chk)
        if progress is not None:
            progress(chk)
    return out


def format_line(chk: Check) -> str:
    status = "PASS" if chk.passed else "FAIL"
    return f"{status}  {chk.name:<52s} error={chk.error:.3e}  tol={chk.tolerance:.1e}  ({chk.seconds:.1f}s)"


def format_report(checks: list[Check]) -> str:
    lines = [format_line(c) for c in checks]
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines)
