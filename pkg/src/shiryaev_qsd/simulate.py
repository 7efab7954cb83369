"""Euler-Maruyama Monte Carlo oracle for the absorbed diffusion
dR = dt + R dB.

Paths start at r0, are absorbed the first step their value reaches A,
and are clamped at 0 against discretization undershoot (the exact
process is nonnegative).  Outputs: the survival curve, a decay-rate
estimate from the log-linear tail of the survival curve, and the
empirical conditional (on survival) distribution pooled over snapshots
past burn-in -- the conditional law is time-invariant there, and pooling
multiplies the effective sample size.

A single seeded generator drives the whole run, so identical
configurations reproduce bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distribution import QsdParams, qsd_cdf
from .eigen import lambda_bounds
from .errors import AllAbsorbedError, ConfigError, MismatchedAError


def default_horizon(A: float) -> float:
    """Twenty expected decay times at the analytic lower bound."""
    return 20.0 / lambda_bounds(A)[0]


@dataclass(frozen=True)
class SimConfig:
    A: float
    r0: float = 0.0
    dt: float = 1e-4
    horizon: float | None = None  # None -> default_horizon(A)
    paths: int = 200_000
    seed: int = 0
    bins: int = 64
    record_dt: float = 0.1
    snapshot_dt: float = 0.5
    burn_in: float | None = None  # None -> horizon / 2

    def __post_init__(self):
        if not self.A > 0:
            raise ConfigError(f"A must be > 0, got {self.A}")
        if self.paths < 1:
            raise ConfigError(f"paths must be >= 1, got {self.paths}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if not (0.0 <= self.r0 < self.A):
            raise ConfigError(f"need 0 <= r0 < A, got r0={self.r0}, A={self.A}")
        if self.horizon is not None and not self.horizon > 0:
            raise ConfigError(f"horizon must be > 0, got {self.horizon}")

    def resolved_horizon(self) -> float:
        if self.horizon is not None:
            return self.horizon
        if math.isinf(self.A):
            raise ConfigError("horizon must be given explicitly when A is infinite")
        return default_horizon(self.A)


@dataclass(frozen=True)
class EmpiricalQsd:
    A: float
    bin_edges: np.ndarray
    conditional_density: np.ndarray
    survival: np.ndarray  # columns (t, fraction alive)
    lambda_hat: float
    lambda_hat_stderr: float
    snapshots: dict = field(repr=False)  # t -> positions of paths alive at t
    pooled_samples: np.ndarray = field(repr=False)


def _fit_decay(times, alive):
    """Count-weighted least-squares slope of log(alive) vs t."""
    mask = alive > 0
    t, n = times[mask], alive[mask]
    if t.size < 3:
        raise AllAbsorbedError("too few populated survival records for a tail fit")
    # var(log N) ~ 1/N for Poisson counts, so weights sqrt(N) make the
    # unscaled covariance directly interpretable
    coef, cov = np.polyfit(t, np.log(n), 1, w=np.sqrt(n), cov="unscaled")
    return -coef[0], math.sqrt(abs(cov[0, 0]))


def simulate(config: SimConfig) -> EmpiricalQsd:
    """Run the Euler-Maruyama scheme and assemble the empirical QSD."""
    A = config.A
    dt = config.dt
    horizon = config.resolved_horizon()
    n_steps = int(round(horizon / dt))
    if n_steps < 1:
        raise ConfigError("horizon shorter than one time step")
    burn_in = horizon / 2.0 if config.burn_in is None else config.burn_in

    record_every = max(1, int(round(config.record_dt / dt)))
    snap_every = max(1, int(round(config.snapshot_dt / dt)))

    rng = np.random.default_rng(config.seed)
    r = np.full(config.paths, float(config.r0))
    sqdt = math.sqrt(dt)

    times, alive = [0.0], [config.paths]
    snapshots = {}
    for k in range(1, n_steps + 1):
        r += dt + r * (sqdt * rng.standard_normal(r.size))
        np.clip(r, 0.0, None, out=r)
        if not math.isinf(A):
            r = r[r < A]
        t = k * dt
        if k % record_every == 0 or k == n_steps:
            times.append(t)
            alive.append(r.size)
        if k % snap_every == 0 or k == n_steps:
            if t >= burn_in - 1e-9:
                snapshots[round(t, 10)] = r.copy()
        if r.size == 0:
            raise AllAbsorbedError(
                f"all {config.paths} paths absorbed by t={t:.3f} < horizon={horizon}"
            )

    times = np.asarray(times)
    alive = np.asarray(alive, dtype=float)
    survival = np.column_stack([times, alive / config.paths])

    tail = times >= horizon / 2.0
    lambda_hat, stderr = _fit_decay(times[tail], alive[tail])

    pooled = np.concatenate([snapshots[t] for t in sorted(snapshots)])
    top = A if not math.isinf(A) else float(pooled.max()) * 1.001
    edges = np.linspace(0.0, top, config.bins + 1)
    density, _ = np.histogram(pooled, bins=edges, density=True)

    return EmpiricalQsd(
        A=A,
        bin_edges=edges,
        conditional_density=density,
        survival=survival,
        lambda_hat=lambda_hat,
        lambda_hat_stderr=stderr,
        snapshots=snapshots,
        pooled_samples=pooled,
    )


@dataclass(frozen=True)
class ComparisonReport:
    A: float
    sup_distance: float
    bin_discrepancies: np.ndarray
    lambda_hat: float
    lambda_analytic: float
    lambda_rel_error: float

    def passed(self, sup_tol: float = 0.02, lambda_rel_tol: float = 0.05) -> bool:
        return (self.sup_distance <= sup_tol
                and self.lambda_rel_error <= lambda_rel_tol)


def _cdf_interpolator(p: QsdParams, n_grid: int = 2000):
    """Analytic cdf tabulated on a grid; the cdf is smooth so linear
    interpolation is far below Monte Carlo resolution."""
    A = p.eigen.A
    xs = np.linspace(0.0, A, n_grid + 1)
    cdf = np.array([qsd_cdf(p, x) for x in xs])
    return xs, cdf


def compare_to_analytic(emp: EmpiricalQsd, p: QsdParams) -> ComparisonReport:
    """Sup-distance of the empirical conditional cdf from the analytic
    one, per-bin density discrepancies, and the decay-rate comparison."""
    if not math.isclose(emp.A, p.eigen.A, rel_tol=0.0, abs_tol=1e-12):
        raise MismatchedAError(f"empirical A={emp.A} vs analytic A={p.eigen.A}")

    xs, cdf = _cdf_interpolator(p)
    samples = np.sort(emp.pooled_samples)
    n = samples.size
    f = np.interp(samples, xs, cdf)
    i = np.arange(n)
    sup = float(np.max(np.maximum(np.abs(i / n - f), np.abs((i + 1) / n - f))))

    edge_cdf = np.interp(emp.bin_edges, xs, cdf)
    widths = np.diff(emp.bin_edges)
    analytic_density = np.diff(edge_cdf) / widths
    discrepancies = emp.conditional_density - analytic_density

    lam = p.eigen.lam
    rel = abs(emp.lambda_hat - lam) / lam
    return ComparisonReport(
        A=emp.A,
        sup_distance=sup,
        bin_discrepancies=discrepancies,
        lambda_hat=emp.lambda_hat,
        lambda_analytic=lam,
        lambda_rel_error=rel,
    )
