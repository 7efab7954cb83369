"""Laplace transform of the quasi-stationary distribution by four
independent routes:

  * quadrature    -- int_0^A e^{-sx} q_A(x) dx (the reference oracle)
  * moment-series -- sum (-s)^n M_n / n!
  * kdf1 / kdf2   -- two bivariate double-hypergeometric closed forms
  * bessel        -- modified-Bessel / incomplete-Weber closed form,
                     valid uniformly in s and A

plus the stationary limit 2 sqrt(2s) K_1(2 sqrt(2s)) and a residual
check against the governing ODE

    (s^2/2) L''(s) - (s - lambda) L(s) = lambda e^{-sA}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
from scipy.special import kv

from . import numerics
from .distribution import QsdParams, qsd_pdf
from .errors import DomainError, NonConvergenceError
from .specfun import (
    DEFAULT_SERIES,
    SeriesControl,
    bessel_i,
    bessel_k,
    kampe_de_feriet,
    weber_incomplete,
)

METHODS = ("quadrature", "moments", "kdf1", "kdf2", "bessel")

# below this s the lambda/s prefactor route switches to the series route
KDF2_S_FLOOR = 1e-8


@dataclass(frozen=True)
class LaplaceEval:
    s: float
    A: float
    value: float
    method: str
    err_estimate: float


def _check_s(s):
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")


def laplace_quadrature(p: QsdParams, s: float, tol: float = 1e-10) -> LaplaceEval:
    """Direct integral of e^{-sx} against the closed-form pdf."""
    _check_s(s)
    A = p.eigen.A
    res = numerics.integrate(lambda x: math.exp(-s * x) * qsd_pdf(p, x), 0.0, A,
                             tol=tol)
    return LaplaceEval(s, A, res.value, "quadrature", res.abs_err_estimate)


def laplace_moment_series(p: QsdParams, s: float,
                          ctl: SeriesControl = DEFAULT_SERIES) -> LaplaceEval:
    """Taylor expansion around s = 0, with the moments regenerated from
    the recurrence at a working precision sized to the alternating-sum
    cancellation (the partial terms peak near exp(sA))."""
    _check_s(s)
    lam, A = p.eigen.lam, p.eigen.A
    if s == 0.0:
        return LaplaceEval(s, A, 1.0, "moments", 0.0)
    peak = s * A / math.log(10.0)
    dps = 25 + int(1.2 * peak)
    if dps > 350:
        raise NonConvergenceError(
            f"moment series needs ~{dps} digits at s={s}, A={A}; refusing")
    with mp.workdps(dps):
        lam_m, A_m, s_m = mp.mpf(lam), mp.mpf(A), mp.mpf(s)
        tol = mp.mpf(ctl.rel_tol)
        total = mp.mpf(0)
        moment = mp.mpf(1)
        coeff = mp.mpf(1)  # (-s)^n / n!
        n = 0
        small = 0
        while True:
            term = coeff * moment
            total += term
            if n > s * A and abs(term) <= tol * (abs(total) + 1):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
            if n + 1 >= ctl.max_terms:
                raise NonConvergenceError(
                    f"moment series exceeded {ctl.max_terms} terms")
            n += 1
            moment = (lam_m * A_m**n - n * moment) / (n * (n - 1) / 2 + lam_m)
            coeff *= -s_m / n
        value = float(total)
    return LaplaceEval(s, A, value, "moments", ctl.rel_tol * max(1.0, abs(value)))


def laplace_kdf1(p: QsdParams, s: float,
                 ctl: SeriesControl = DEFAULT_SERIES) -> LaplaceEval:
    """Double series with numerator pair -1/2 -+ xi/2 and denominator
    pair 1/2 -+ xi/2, evaluated at (-sA, 2s)."""
    _check_s(s)
    A = p.eigen.A
    hx = p.eigen.xi.halved().value
    value = kampe_de_feriet(-0.5 - hx, -0.5 + hx, 0.5 - hx, 0.5 + hx,
                            -s * A, 2.0 * s, ctl)
    return LaplaceEval(s, A, value, "kdf1", ctl.rel_tol * max(1.0, abs(value)))


def laplace_kdf2(p: QsdParams, s: float,
                 ctl: SeriesControl = DEFAULT_SERIES) -> LaplaceEval:
    """(lambda/s) (F[...] - e^{-sA}) with the repeated-parameter double
    series; the removable singularity at s = 0 is taken via the
    moment-series route."""
    _check_s(s)
    if s < KDF2_S_FLOOR:
        ev = laplace_moment_series(p, s, ctl)
        return LaplaceEval(s, ev.A, ev.value, "kdf2", ev.err_estimate)
    lam, A = p.eigen.lam, p.eigen.A
    hx = p.eigen.xi.halved().value
    f = kampe_de_feriet(-0.5 - hx, -0.5 + hx, -0.5 - hx, -0.5 + hx,
                        -s * A, 2.0 * s, ctl)
    value = lam / s * (f - math.exp(-s * A))
    return LaplaceEval(s, A, value, "kdf2", ctl.rel_tol * max(1.0, abs(value)))


def laplace_bessel(p: QsdParams, s: float, tol: float = 1e-11) -> LaplaceEval:
    """Closed form through modified Bessel functions and incomplete
    Weber integrals; the only analytic route valid uniformly in s, A."""
    _check_s(s)
    lam, A = p.eigen.lam, p.eigen.A
    xi = p.eigen.xi
    if s == 0.0:
        return LaplaceEval(s, A, 1.0, "bessel", 0.0)
    u = 2.0 * math.sqrt(2.0 * s)
    ki = bessel_k(xi, u)
    ii = bessel_i(xi, u)
    w_i = weber_incomplete("I", u, A, xi, tol=tol)
    w_k = weber_incomplete("K", u, A, xi, tol=tol)
    value = u * ki / p.normalizer + 8.0 * lam * (u * ki * w_i - u * ii * w_k)
    return LaplaceEval(s, A, value, "bessel", 10 * tol * max(1.0, abs(value)))


def stationary_laplace(s: float) -> float:
    """Transform 2 sqrt(2s) K_1(2 sqrt(2s)) of the stationary law; 1 at
    s = 0 by the small-argument limit of K_1."""
    _check_s(s)
    if s == 0.0:
        return 1.0
    u = 2.0 * math.sqrt(2.0 * s)
    return u * float(kv(1, u))


def evaluate(p: QsdParams, s: float, method: str,
             ctl: SeriesControl = DEFAULT_SERIES) -> LaplaceEval:
    """Evaluate the transform by the named route."""
    if method == "quadrature":
        return laplace_quadrature(p, s)
    if method == "moments":
        return laplace_moment_series(p, s, ctl)
    if method == "kdf1":
        return laplace_kdf1(p, s, ctl)
    if method == "kdf2":
        return laplace_kdf2(p, s, ctl)
    if method == "bessel":
        return laplace_bessel(p, s)
    raise ValueError(f"unknown method {method!r}")


def ode_residual(p: QsdParams, s: float, h: float | None = None,
                 method: str = "bessel") -> float:
    """(s^2/2) L'' - (s - lambda) L - lambda e^{-sA} with L'' from
    central differences (one Richardson level) of the chosen route."""
    if s <= 0:
        raise DomainError(f"ODE residual needs s > 0, got {s}")
    if h is None:
        h = 1e-4 * max(1.0, s)

    def L(x):
        return evaluate(p, x, method).value

    def second(hh):
        return (L(s - hh) - 2.0 * L(s) + L(s + hh)) / (hh * hh)

    d2 = (4.0 * second(h / 2.0) - second(h)) / 3.0
    lam, A = p.eigen.lam, p.eigen.A
    return (s * s / 2.0) * d2 - (s - lam) * L(s) - lam * math.exp(-s * A)
