"""Moment series of the quasi-stationary distribution by independent
routes: the defining recurrence, a terminating 2F2 closed form, an
explicit power-series form, and direct quadrature against the pdf.

With M_n the n-th moment, the recurrence is

    (n(n-1)/2 + lambda) M_n + n M_{n-1} = lambda A^n,    M_0 = 1,

and the closed forms below solve it exactly.  All three analytic routes
are even in xi by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import numerics
from .distribution import QsdParams, qsd_pdf
from .specfun import as_real, hyp2f2

METHODS = ("recurrence", "2f2", "powerseries", "quadrature")


@dataclass(frozen=True)
class MomentSeries:
    params: QsdParams
    n_max: int
    values: tuple
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def moments_recurrence(p: QsdParams, n_max: int) -> MomentSeries:
    """Forward iteration of the defining recurrence."""
    lam, A = p.eigen.lam, p.eigen.A
    vals = [1.0]
    for n in range(1, n_max + 1):
        vals.append((lam * A**n - n * vals[n - 1]) / (n * (n - 1) / 2.0 + lam))
    return MomentSeries(p, n_max, tuple(vals), "recurrence")


def moment_2f2(p: QsdParams, n: int) -> float:
    """Closed form 2 lambda A^n / (n(n-1) + 2 lambda) times a terminating
    2F2 polynomial of degree n in 2/A."""
    if n < 0:
        raise ValueError("n must be >= 0")
    lam, A = p.eigen.lam, p.eigen.A
    half_xi = p.eigen.xi.halved().value
    f = hyp2f2(1.0, -float(n), 1.5 + half_xi - n, 1.5 - half_xi - n, 2.0 / A)
    return as_real(f) * 2.0 * lam * A**n / (n * (n - 1) + 2.0 * lam)


def moment_powerseries(p: QsdParams, n: int) -> float:
    """Explicit special-function-free form.

    The xi-dependent Pochhammer factors always appear in sign-conjugate
    pairs, so each pair is multiplied out as ((j +- 1/2)^2 - xi^2/4)
    with xi^2/4 = (1 - 8 lambda)/4 real; the whole evaluation stays in
    real arithmetic for both xi branches.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    lam, A = p.eigen.lam, p.eigen.A
    t = (1.0 - 8.0 * lam) / 4.0  # (xi/2)^2, real on both branches

    total = 0.0
    term = 1.0  # prod_{j<k} ((j-1/2)^2 - t) * (-A/2)^k / k!
    for k in range(n + 1):
        total += term
        term *= ((k - 0.5) ** 2 - t) * (-A / 2.0) / (k + 1.0)

    denom = 1.0  # prod_{j<n} ((j+1/2)^2 - t)
    pref = 1.0  # (-2)^n n!
    for j in range(n):
        denom *= (j + 0.5) ** 2 - t
        pref *= -2.0 * (j + 1.0)
    return pref / denom * total


def moments_quadrature(p: QsdParams, n_max: int, tol: float = 1e-9) -> MomentSeries:
    """Direct integrals int x^n q_A(x) dx as the independent check."""
    A = p.eigen.A
    vals = []
    for n in range(n_max + 1):
        res = numerics.integrate(lambda x: x**n * qsd_pdf(p, x), 0.0, A, tol=tol)
        vals.append(res.value)
    return MomentSeries(p, n_max, tuple(vals), "quadrature")


def moment_series(p: QsdParams, n_max: int, method: str = "recurrence") -> MomentSeries:
    """Moment series by the named route."""
    if method == "recurrence":
        return moments_recurrence(p, n_max)
    if method == "2f2":
        return MomentSeries(p, n_max,
                            tuple(moment_2f2(p, n) for n in range(n_max + 1)), "2f2")
    if method == "powerseries":
        return MomentSeries(p, n_max,
                            tuple(moment_powerseries(p, n) for n in range(n_max + 1)),
                            "powerseries")
    if method == "quadrature":
        return moments_quadrature(p, n_max)
    raise ValueError(f"unknown method {method!r}")


def variance(p: QsdParams) -> float:
    """Var[Z] = (lambda - (A lambda - 1)^2) / (lambda^2 (1 + lambda)),
    always strictly positive."""
    lam, A = p.eigen.lam, p.eigen.A
    v = (lam - (A * lam - 1.0) ** 2) / (lam * lam * (1.0 + lam))
    if not v > 0:
        raise ValueError(f"variance must be strictly positive, got {v}")
    return v


def mean(p: QsdParams) -> float:
    """First moment A - 1/lambda_A (always in (0, A))."""
    return p.eigen.A - 1.0 / p.eigen.lam


def max_rel_spread(values) -> float:
    """Max pairwise relative spread of a set of same-quantity estimates."""
    vals = list(values)
    scale = max(abs(v) for v in vals)
    if scale == 0.0:
        return 0.0
    return (max(vals) - min(vals)) / scale
