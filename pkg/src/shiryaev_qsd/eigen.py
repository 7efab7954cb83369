"""Principal eigenvalue of the absorbed Shiryaev diffusion.

For a given absorption level A > 0 the decay rate lambda_A is the
smallest positive root of W_{1, xi(lambda)/2}(2/A) = 0, where
xi(lambda) = sqrt(1 - 8 lambda) is purely real in [0, 1) for
lambda <= 1/8 and purely imaginary for lambda > 1/8.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

from . import numerics
from .errors import BracketFailure, DomainError
from .specfun import OrderParam, whittaker_w

DEFAULT_TOL = 1e-12

# residual scale guard: |W| at the root must be tiny relative to the
# objective's size near the bracket endpoints
RESIDUAL_REL = 1e-9


@dataclass(frozen=True)
class EigenSolution:
    """A solved (A, lambda_A) pair with its branch-tagged xi and residual."""

    A: float
    lam: float
    xi: OrderParam
    residual: float


def xi_of_lambda(lam: float) -> OrderParam:
    """Branch-tagged xi(lambda) = sqrt(1 - 8 lambda)."""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    d = 1.0 - 8.0 * lam
    if d >= 0:
        return OrderParam.real(math.sqrt(d))
    return OrderParam.imaginary(math.sqrt(-d))


def lambda_bounds(A: float) -> tuple[float, float]:
    """Strict lower/upper bounds for lambda_A from moment positivity."""
    if not A > 0:
        raise DomainError(f"A must be > 0, got {A}")
    lo = 1.0 / A + 1.0 / (A + A * A)
    hi = 1.0 / A + (1.0 + math.sqrt(4.0 * A + 1.0)) / (2.0 * A * A)
    return lo, hi


def eigen_objective(lam: float, A: float) -> float:
    """W_{1, xi(lambda)/2}(2/A); continuous across lambda = 1/8."""
    return whittaker_w(1.0, xi_of_lambda(lam).halved(), 2.0 / A)


@lru_cache(maxsize=512)
def principal_lambda(A: float, tol: float = DEFAULT_TOL) -> EigenSolution:
    """Smallest positive eigenvalue lambda_A for absorption level A.

    The moment-derived bounds bracket the principal root; the bracket is
    widened once on each side (with a warning) if the sign change is not
    captured, and [lo/4, lo] is scanned to rule out a spurious smaller
    root.
    """
    A = float(A)
    lo, hi = lambda_bounds(A)

    def f(lam):
        return eigen_objective(lam, A)

    def first_sign_change(a, b, n=48):
        # the bounds interval can contain higher eigenvalues too (their
        # spacing shrinks relative to the interval for small A), so find
        # the FIRST sign change rather than trusting the endpoints
        grid = [a + k * (b - a) / n for k in range(n + 1)]
        vals = [f(x) for x in grid]
        scan_scale = max(abs(v) for v in vals)
        for x0, x1, g0, g1 in zip(grid, grid[1:], vals, vals[1:]):
            if g0 == 0.0:
                return x0, x0, g0, g0, scan_scale
            if g0 * g1 < 0:
                return x0, x1, g0, g1, scan_scale
        return None

    found = first_sign_change(lo, hi)
    if found is None:
        warnings.warn(
            f"eigenvalue bounds ({lo}, {hi}) at A={A} missed the sign "
            "change; widening bracket once on each side",
            stacklevel=2,
        )
        found = first_sign_change(lo / 2.0, hi * 2.0, n=96)
        if found is None:
            raise BracketFailure(
                f"no sign change in widened bracket ({lo / 2.0}, {hi * 2.0}) "
                f"at A={A}; this indicates a special-function defect"
            )
    b_lo, b_hi, f_lo, f_hi, scan_scale = found

    # cheap insurance against a smaller root below the analytic bound
    guard = [lo / 4.0 + k * (lo - lo / 4.0) / 8.0 for k in range(9)]
    gvals = [f(x) for x in guard]
    for g0, g1 in zip(gvals, gvals[1:]):
        if g0 * g1 < 0:
            raise BracketFailure(
                f"spurious eigenvalue sign change below the lower bound at A={A}"
            )

    if b_lo == b_hi:
        lam = b_lo
    else:
        # tol acts relative to lambda's magnitude: the absolute lambda
        # scale spans five orders over the supported A range
        bracket = numerics.Bracket(b_lo, b_hi, f_lo, f_hi)
        lam = numerics.find_root(f, bracket, tol=tol * max(abs(b_hi), 1e-3))
    residual = abs(f(lam))
    if residual > RESIDUAL_REL * scan_scale:
        raise BracketFailure(
            f"eigenvalue residual {residual} too large at A={A} "
            f"(scale {scan_scale})"
        )
    return EigenSolution(A=A, lam=lam, xi=xi_of_lambda(lam), residual=residual)


def critical_A(tol: float = DEFAULT_TOL) -> float:
    """Absorption level at which lambda_A = 1/8 (the xi = 0 borderline),
    i.e. the root of W_{1,0}(2/A) = 0, bracketed in [5, 20]."""

    def f(A):
        return whittaker_w(1.0, OrderParam.real(0.0), 2.0 / A)

    bracket = numerics.bracket_from(f, 5.0, 20.0)
    return numerics.find_root(f, bracket, tol=tol)
