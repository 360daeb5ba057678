"""Metropolis sampling of the conditioned eigenangle measure.

Two targets on [0, pi]^M:

* ``Model.INTERACTION``: prod (1 - cos t_j)^n prod_{j<k} (cos t_j - cos t_k)^2,
  the measure left on the free angles after n eigenvalues are pushed to 1;
* ``Model.INDEPENDENT``: the same without the (1 - cos t)^n factor, i.e. plain
  Haar SO(2M) next to an identity block.

A Metropolis step is one sweep: a reflected Gaussian proposal for each
coordinate in turn, each accepted or rejected on its own.  Every chain draws
from its own ``numpy`` PCG64 stream spawned from
``SeedSequence(seed, spawn_key=(chain,))``, so output is reproducible per
(seed, chain) regardless of how chains are scheduled.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator

import numba
import numpy as np

from .errors import DomainError, MixingWarning
from .moments import EnsembleSpec
from .value_dist import DensityGrid

__all__ = [
    "Model",
    "EigenConfig",
    "SamplerConfig",
    "Samples",
    "log_density",
    "sample",
    "derivative_value",
    "derivative_values",
    "estimate_moment",
    "empirical_cdf",
]

_BLOCK = 1 << 15
_ACCEPT_BAND = (0.1, 0.7)


class Model(enum.Enum):
    INTERACTION = "interaction"
    INDEPENDENT = "independent"


@dataclass(frozen=True)
class EigenConfig:
    """M free eigenangles in [0, pi]."""

    angles: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.angles, dtype=float).ravel()
        if np.any(~np.isfinite(a)) or np.any(a < 0) or np.any(a > math.pi):
            raise DomainError("eigenangles must lie in [0, pi]")
        object.__setattr__(self, "angles", a)

    def check(self, spec: EnsembleSpec) -> None:
        if self.angles.size != spec.M:
            raise DomainError(f"expected {spec.M} angles, got {self.angles.size}")


@dataclass(frozen=True)
class SamplerConfig:
    """Metropolis settings; ``None`` fields take M-dependent defaults."""

    seed: int = 0
    burn_in: int | None = None
    thinning: int = 10
    step_scale: float | None = None
    chains: int = 1
    model: Model = Model.INTERACTION

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")
        if self.burn_in is not None and self.burn_in < 0:
            raise DomainError("burn_in must be nonnegative")
        if int(self.thinning) != self.thinning or self.thinning < 1:
            raise DomainError("thinning must be a positive integer")
        if self.step_scale is not None and not 0 < self.step_scale < math.pi:
            raise DomainError("step_scale must lie in (0, pi)")
        if int(self.chains) != self.chains or self.chains < 1:
            raise DomainError("chains must be a positive integer")
        object.__setattr__(self, "model", Model(self.model))

    def resolved(self, spec: EnsembleSpec) -> "SamplerConfig":
        M = max(spec.M, 1)
        return replace(
            self,
            burn_in=10_000 * M if self.burn_in is None else int(self.burn_in),
            step_scale=math.pi / (2 * M) if self.step_scale is None else float(self.step_scale),
        )


@dataclass(frozen=True)
class Samples:
    """Recorded states, shape (chains, count, M), and per-chain acceptance rates."""

    angles: np.ndarray
    acceptance: np.ndarray

    @property
    def flat(self) -> np.ndarray:
        """All states merged in chain-index order, shape (chains * count, M)."""
        return self.angles.reshape(-1, self.angles.shape[-1])

    def configs(self) -> Iterator[EigenConfig]:
        for row in self.flat:
            yield EigenConfig(row)


# ---------------------------------------------------------------------------
# compiled chain


@numba.njit(cache=True, nogil=True)
def _log_target(theta, n):
    M = theta.shape[0]
    c = np.cos(theta)
    total = 0.0
    if n > 0:
        for j in range(M):
            h = np.sin(0.5 * theta[j])
            if h == 0.0:
                return -np.inf
            total += n * math.log(2.0 * h * h)
    for j in range(M):
        for k in range(j + 1, M):
            d = abs(c[j] - c[k])
            if d == 0.0:
                return -np.inf
            total += 2.0 * math.log(d)
    return total


@numba.njit(cache=True, nogil=True)
def _reflect(t):
    two_pi = 2.0 * np.pi
    y = t % two_pi
    if y > np.pi:
        y = two_pi - y
    return y


@numba.njit(cache=True, nogil=True)
def _coord_log(theta_j, c_j, c, j, n):
    # terms of the log target that involve coordinate j
    if n > 0:
        h = np.sin(0.5 * theta_j)
        if h == 0.0:
            return -np.inf
        total = n * math.log(2.0 * h * h)
    else:
        total = 0.0
    for k in range(c.shape[0]):
        if k != j:
            d = abs(c_j - c[k])
            if d == 0.0:
                return -np.inf
            total += 2.0 * math.log(d)
    return total


@numba.njit(cache=True, nogil=True)
def _run_block(state, n, step, normals, uniforms, perm_u, record_every, phase, out, n_out):
    """Advance the chain by one sweep per row of ``normals``.

    A sweep proposes a reflected Gaussian move for each coordinate in turn
    and accepts it by the Metropolis rule.  ``phase`` counts sweeps since the
    last record; a state is recorded (after a random relabelling) every
    ``record_every`` sweeps while ``n_out`` is below ``out.shape[0]``.
    Returns (phase, n_out, accepted coordinate moves).
    """
    M = state.shape[0]
    c = np.cos(state)
    accepted = 0
    for i in range(normals.shape[0]):
        for j in range(M):
            t_new = _reflect(state[j] + step * normals[i, j])
            c_new = math.cos(t_new)
            lp_new = _coord_log(t_new, c_new, c, j, n)
            if lp_new == -np.inf:
                continue
            lp_old = _coord_log(state[j], c[j], c, j, n)
            if math.log(uniforms[i, j]) < lp_new - lp_old:
                state[j] = t_new
                c[j] = c_new
                accepted += 1
        if record_every > 0:
            phase += 1
            if phase == record_every and n_out < out.shape[0]:
                phase = 0
                # the target is symmetric in the labels, so a uniform relabelling is a valid move
                for j in range(M - 1, 0, -1):
                    r = int(perm_u[i, j] * (j + 1))
                    if r > j:
                        r = j
                    tmp = state[j]
                    state[j] = state[r]
                    state[r] = tmp
                    tmp = c[j]
                    c[j] = c[r]
                    c[r] = tmp
                out[n_out, :] = state
                n_out += 1
    return phase, n_out, accepted


def _chain(M: int, n_eff: int, cfg: SamplerConfig, chain: int, count: int) -> tuple[np.ndarray, float]:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(chain,))))
    state = math.pi * (np.arange(1, M + 1) - 0.5) / M
    out = np.empty((count, M))
    n_out = 0
    accepted = 0
    total = 0
    # burn-in, then recording
    for sweeps, every in ((cfg.burn_in, 0), (count * cfg.thinning, cfg.thinning)):
        phase = 0
        done = 0
        while done < sweeps:
            b = min(_BLOCK, sweeps - done)
            normals = rng.standard_normal((b, M))
            uniforms = rng.random((b, M))
            perm_u = rng.random((b, M)) if every else np.zeros((b, M))
            phase, n_out, acc = _run_block(
                state, n_eff, cfg.step_scale, normals, uniforms, perm_u, every, phase, out, n_out
            )
            accepted += acc
            total += b * M
            done += b
    return out, accepted / max(total, 1)


def _workers(requested: int | None, chains: int) -> int:
    if requested is None:
        requested = int(os.environ.get("SOC_THREADS", "1") or 1)
    return max(1, min(requested, chains))


def sample(
    spec: EnsembleSpec, sampler: SamplerConfig, count: int, workers: int | None = None
) -> Samples:
    """Run ``sampler.chains`` Metropolis chains and record ``count`` states from each.

    Parameters
    ----------
    spec : EnsembleSpec
    sampler : SamplerConfig
    count : int
        Recorded states per chain.
    workers : int, optional
        Threads used to run chains concurrently (default: ``SOC_THREADS`` or 1).
        Results do not depend on it.
    """
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    M = spec.M
    if M < 1:
        raise DomainError("nothing to sample when M = 0")
    cfg = sampler.resolved(spec)
    n_eff = spec.n if cfg.model is Model.INTERACTION else 0
    jobs = range(cfg.chains)
    nw = _workers(workers, cfg.chains)
    if nw == 1:
        results = [_chain(M, n_eff, cfg, c, int(count)) for c in jobs]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(lambda c: _chain(M, n_eff, cfg, c, int(count)), jobs))
    angles = np.stack([r[0] for r in results])
    acc = np.array([r[1] for r in results])
    lo, hi = _ACCEPT_BAND
    if np.any((acc < lo) | (acc > hi)):
        warnings.warn(
            f"Metropolis acceptance rate(s) {np.round(acc, 3).tolist()} outside [{lo}, {hi}]",
            MixingWarning,
            stacklevel=2,
        )
    return Samples(angles, acc)


# ---------------------------------------------------------------------------
# observables


def log_density(spec: EnsembleSpec, config: EigenConfig, model: Model = Model.INTERACTION) -> float:
    """Unnormalised log density of ``config``; -inf where the density vanishes."""
    config.check(spec)
    n_eff = spec.n if Model(model) is Model.INTERACTION else 0
    return float(_log_target(np.ascontiguousarray(config.angles), n_eff))


def derivative_values(spec: EnsembleSpec, angles) -> np.ndarray:
    """n! 2^M prod_j (1 - cos t_j) for each row of ``angles``."""
    a = np.asarray(angles, dtype=float)
    if a.shape[-1] != spec.M:
        raise DomainError(f"expected {spec.M} angles per row, got {a.shape[-1]}")
    h = np.sin(0.5 * a)
    with np.errstate(divide="ignore"):
        logs = np.sum(np.log(4.0 * h * h), axis=-1)
    return np.exp(math.lgamma(spec.n + 1) + logs)


def derivative_value(spec: EnsembleSpec, config: EigenConfig) -> float:
    """|Lambda^{(n)}(1)| for a single configuration."""
    config.check(spec)
    return float(derivative_values(spec, config.angles[None, :])[0])


def _batch_stderr(x: np.ndarray, batches: int = 100) -> float:
    nb = min(batches, x.size)
    if nb < 2:
        return math.nan
    size = x.size // nb
    means = x[: nb * size].reshape(nb, size).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(nb))


def estimate_moment(
    spec: EnsembleSpec, sampler: SamplerConfig, s: float, count: int, workers: int | None = None
) -> tuple[float, float]:
    """Monte Carlo mean of |Lambda^{(n)}(1)|^s and its batch-means standard error.

    Always uses the interaction model, whatever ``sampler.model`` says.
    """
    s = float(s)
    if not s > -(spec.n + 0.5):
        raise DomainError(f"moment diverges for s = {s} <= -(n + 1/2)")
    if s == 0:
        return 1.0, 0.0
    cfg = replace(sampler, model=Model.INTERACTION)
    res = sample(spec, cfg, count, workers)
    # batch within each chain so that batches never straddle two chains
    vals = derivative_values(spec, res.angles) ** s
    means = vals.mean(axis=1)
    errs = np.array([_batch_stderr(v) for v in vals])
    k = vals.shape[0]
    return float(means.mean()), float(math.sqrt(np.sum(errs**2)) / k)


def empirical_cdf(
    spec: EnsembleSpec, sampler: SamplerConfig, count: int, workers: int | None = None
) -> DensityGrid:
    """Empirical CDF of |Lambda^{(n)}(1)| at its distinct sampled values."""
    res = sample(spec, sampler, count, workers)
    vals = derivative_values(spec, res.flat)
    # rejected proposals repeat states, so values are not distinct
    xs, counts = np.unique(vals, return_counts=True)
    return DensityGrid(xs, np.cumsum(counts) / vals.size)
