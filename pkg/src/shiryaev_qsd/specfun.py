"""Special functions: Gamma, Pochhammer, 2F2, Whittaker M/W, modified
Bessel I/K (real and purely imaginary order), the bivariate double
hypergeometric series F^{0:2;1}_{2:0;0}, and incomplete Weber integrals.

Whittaker and Bessel evaluations are delegated to mpmath (arbitrary
precision, complex indices, automatic handling of the logarithmic case
when the order parameter degenerates); everything is collapsed back to
float with an explicit imaginary-residue check.  All functions here are
pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.special import ive, kve

from .errors import (
    DenominatorPoleError,
    DivergenceError,
    EvaluationDomainError,
    ImaginaryResidueError,
    NonConvergenceError,
    ParameterPoleError,
    PoleError,
)

# working precision for mpmath-backed evaluations (decimal digits)
WORK_DPS = 25

# |imag| beyond this (relative) scale is treated as a bug, not noise
HARD_IMAG_TOL = 1e-6


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for power and double series."""

    rel_tol: float = 1e-14
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_SERIES = SeriesControl()


@dataclass(frozen=True)
class OrderParam:
    """A purely real or purely imaginary order/index parameter.

    The sign of ``magnitude`` is immaterial for every consumer in this
    package (all formulas are even in the order); it is kept so that
    sign-invariance can be exercised directly.
    """

    kind: str  # "real" | "imaginary"
    magnitude: float

    def __post_init__(self):
        if self.kind not in ("real", "imaginary"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not math.isfinite(self.magnitude):
            raise ValueError("magnitude must be finite")

    @classmethod
    def real(cls, magnitude):
        return cls("real", float(magnitude))

    @classmethod
    def imaginary(cls, magnitude):
        return cls("imaginary", float(magnitude))

    @property
    def value(self) -> complex:
        if self.kind == "real":
            return complex(self.magnitude, 0.0)
        return complex(0.0, self.magnitude)

    def negated(self) -> "OrderParam":
        return OrderParam(self.kind, -self.magnitude)

    def halved(self) -> "OrderParam":
        return OrderParam(self.kind, self.magnitude / 2.0)


def as_real(value, atol_scale: float = HARD_IMAG_TOL) -> float:
    """Collapse a complex value that must be real down to float.

    Raises ImaginaryResidueError when the imaginary part exceeds
    atol_scale * (1 + |value|); such a violation signals a bug rather
    than legitimate data.
    """
    value = complex(value)
    if abs(value.imag) > atol_scale * (1.0 + abs(value.real)):
        raise ImaginaryResidueError(
            f"non-negligible imaginary residue {value.imag} in {value}"
        )
    return value.real


def _order_complex(order) -> complex:
    """Coerce an OrderParam / real / purely-real-or-imaginary complex."""
    if isinstance(order, OrderParam):
        return order.value
    z = complex(order)
    if z.real != 0.0 and z.imag != 0.0:
        raise EvaluationDomainError(f"order must be purely real or imaginary: {z}")
    return z


def _canonical_order(order) -> complex:
    """|real part| or i*|imag part|; all consumers are even in the order."""
    z = _order_complex(order)
    return complex(abs(z.real), abs(z.imag))


def _is_nonpositive_integer(z) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real)


def gamma(z) -> complex:
    """Gamma function for complex z (moderate |z|)."""
    if _is_nonpositive_integer(z):
        raise PoleError(f"gamma pole at z={z}")
    with mp.workdps(WORK_DPS):
        return complex(mp.gamma(complex(z)))


def pochhammer(z, n: int) -> complex:
    """Rising factorial (z)_n = z (z+1) ... (z+n-1), with (z)_0 = 1.

    The direct product automatically yields the correct two-branch
    behavior for nonpositive-integer z (exact zero once the factors
    cross zero).
    """
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    out = complex(1.0)
    zc = complex(z)
    for k in range(n):
        out *= zc + k
    return out


def hyp2f2(a1, a2, b1, b2, z, ctl: SeriesControl = DEFAULT_SERIES) -> complex:
    """Generalized hypergeometric series with two upper and two lower
    parameters, sum_n (a1)_n (a2)_n / ((b1)_n (b2)_n) z^n / n!.

    When a1 or a2 is a nonpositive integer the exact terminating sum is
    used (a polynomial in z, no truncation error beyond rounding).
    """
    for b in (b1, b2):
        if _is_nonpositive_integer(b):
            raise DenominatorPoleError(f"lower parameter pole at {b}")
    a1, a2, b1, b2, z = (complex(v) for v in (a1, a2, b1, b2, z))

    n_stop = None
    if _is_nonpositive_integer(a1):
        n_stop = int(-a1.real)
    if _is_nonpositive_integer(a2):
        stop2 = int(-a2.real)
        n_stop = stop2 if n_stop is None else min(n_stop, stop2)

    total = complex(0.0)
    term = complex(1.0)
    small_streak = 0
    n = 0
    while True:
        total += term
        if n_stop is not None and n == n_stop:
            return total
        if n_stop is None:
            if abs(term) <= ctl.rel_tol * abs(total):
                small_streak += 1
                if small_streak >= 3:
                    return total
            else:
                small_streak = 0
            if n + 1 >= ctl.max_terms:
                raise NonConvergenceError(
                    f"2F2 series did not converge within {ctl.max_terms} terms"
                )
        term *= (a1 + n) * (a2 + n) * z / ((b1 + n) * (b2 + n) * (n + 1))
        n += 1


def _whittaker(which: str, a, order, z: float) -> float:
    if z <= 0:
        raise EvaluationDomainError(f"Whittaker functions need z > 0, got z={z}")
    b = _canonical_order(order)
    fn = mp.whitw if which == "w" else mp.whitm
    with mp.workdps(WORK_DPS):
        v = fn(float(a), mp.mpc(b), z)
        return as_real(complex(v))


def whittaker_m(a: float, order, z: float) -> float:
    """Whittaker M function with real first index and a purely real or
    purely imaginary second index; real-valued for z > 0."""
    b = _order_complex(order)
    if _is_nonpositive_integer(1 + 2 * b):
        raise ParameterPoleError(f"M undefined: 1+2b = {1 + 2 * b}")
    return _whittaker("m", a, order, z)


def whittaker_w(a: float, order, z: float) -> float:
    """Whittaker W function; even in its second index, which is
    canonicalized so that negating the order reproduces the value
    bitwise."""
    return _whittaker("w", a, order, z)


def _bessel_complex(kind: str, order, z: float):
    if z <= 0:
        raise EvaluationDomainError(f"modified Bessel functions need z > 0, got {z}")
    fn = mp.besseli if kind == "i" else mp.besselk
    with mp.workdps(WORK_DPS):
        return complex(fn(mp.mpc(_canonical_order(order)), z))


def bessel_i(order, z: float) -> float:
    """Modified Bessel function of the first kind.

    For purely imaginary order the real part is returned: it is the even
    real solution of the imaginary-order modified Bessel equation, and
    since K is real, every I/K cross combination used downstream is
    unchanged by dropping the (K-proportional) imaginary part.
    """
    return _bessel_complex("i", order, z).real


def bessel_k(order, z: float) -> float:
    """MacDonald function; real for real z > 0 and real or purely
    imaginary order, and even in the order (canonicalized)."""
    return as_real(_bessel_complex("k", order, z))


def kampe_de_feriet(a1, a2, b1, b2, u: float, v: float,
                    ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Double hypergeometric series
    sum_{i,j} (a1)_i (a2)_i (1)_j / ((b1)_{i+j} (b2)_{i+j}) u^i v^j / (i! j!).

    Absolutely convergent for all finite u, v, but the terms in u can
    peak near exp(|u|) before decaying, so the summation runs at an
    mpmath working precision sized to that cancellation.  Raises
    NonConvergenceError when the required precision or term budget is
    exceeded.
    """
    for b in (b1, b2):
        if _is_nonpositive_integer(b):
            raise DenominatorPoleError(f"lower parameter pole at {b}")
    if not (math.isfinite(u) and math.isfinite(v)):
        raise EvaluationDomainError("u and v must be finite")

    # digits lost to cancellation ~ log10 of the largest term
    peak = (abs(u) + 2.0 * math.sqrt(abs(v))) / math.log(10.0)
    dps = WORK_DPS + int(1.2 * peak)
    if dps > 350:
        raise NonConvergenceError(
            f"double series needs ~{dps} digits at u={u}, v={v}; refusing"
        )

    with mp.workdps(dps):
        a1m, a2m, b1m, b2m = (mp.mpmathify(complex(t)) for t in (a1, a2, b1, b2))
        um, vm = mp.mpf(u), mp.mpf(v)
        tol = mp.mpf(ctl.rel_tol)
        # rows near the peak exceed the final sum by ~exp(|u|), so any
        # truncation residue left inside a row survives the cancellation;
        # inner sums therefore run to working precision, not to rel_tol
        inner_tol = mp.mpf(10) ** (5 - dps)
        total = mp.mpc(0)
        row_coef = mp.mpc(1)  # (a1)_i (a2)_i u^i / i!
        terms_used = 0
        row_small = 0
        i = 0
        while True:
            # inner sum over j at fixed i, Pochhammers advanced in place
            denom = mp.rf(b1m, i) * mp.rf(b2m, i)
            term = 1 / denom
            inner = mp.mpc(0)
            small = 0
            j = 0
            while True:
                inner += term
                terms_used += 1
                # no absolute floor here: |inner| itself is super-
                # exponentially small at large i and an additive floor
                # would declare every term negligible
                if abs(term) <= inner_tol * abs(inner):
                    small += 1
                    if small >= 3:
                        break
                else:
                    small = 0
                if terms_used >= ctl.max_terms:
                    raise NonConvergenceError(
                        f"double series exceeded {ctl.max_terms} terms"
                    )
                term = term * vm / ((b1m + i + j) * (b2m + i + j))
                j += 1
            row = row_coef * inner
            total += row
            # partial sums track the current row through the cancellation
            # regime, so small rows are only trusted past the peak at
            # i ~ |u|, and only three in a row (sign flips give isolated
            # near-zero dips)
            if i > abs(u) and abs(row) <= tol * (abs(total) + mp.mpf("1e-300")):
                row_small += 1
                if row_small >= 3:
                    break
            else:
                row_small = 0
            row_coef = row_coef * (a1m + i) * (a2m + i) * um / (i + 1)
            i += 1
        return as_real(complex(total))


def _weber_integrand_real(kind: str, level: float, nu: float):
    # exponentially scaled Bessel avoids overflow before the Gaussian bites
    if kind == "I":
        return lambda x: ive(nu, x) * math.exp(x - level * x * x / 8.0) / (x * x)
    return lambda x: kve(nu, x) * math.exp(-x - level * x * x / 8.0) / (x * x)


def _weber_integrand_imag(kind: str, level: float, nu_mag: float):
    """Scaled integrand and unscale factor for the imaginary-order branch.

    K of order i*nu has envelope ~ e^{-pi nu/2} and Re I ~ e^{+pi nu/2},
    so the raw integrand can sit so far below the quadrature's absolute
    tolerance that it is never refined (the oscillatory mean is smaller
    still).  Scaling by e^{+-pi nu/2} makes the integrand O(1) and turns
    the absolute tolerance into an effectively relative one.
    """
    nu = mp.mpc(0.0, nu_mag)
    shift = math.pi * nu_mag / 2.0 if kind == "K" else -math.pi * nu_mag / 2.0
    fn = mp.besseli if kind == "I" else mp.besselk

    def f(x):
        # the Gaussian damping and the scale shift are applied before
        # leaving mpmath so no intermediate overflows float
        with mp.workdps(WORK_DPS):
            c = fn(nu, x) * mp.exp(shift - level * x * x / 8.0) / (x * x)
            c = complex(c)
        # K of imaginary order is real; for I the real part is the even
        # real solution used throughout
        return c.real

    return f, math.exp(-shift)


def weber_incomplete(kind: str, u: float, level: float, order,
                     tol: float = 1e-11) -> float:
    """Incomplete Weber integral int_u^inf exp(-level x^2/8) C(x) x^-2 dx
    with C the modified Bessel I or K function of the given order.

    Convergent for any u > 0 but divergent at u = 0, which is reported
    as DivergenceError.
    """
    if kind not in ("I", "K"):
        raise ValueError("kind must be 'I' or 'K'")
    if u <= 0:
        raise DivergenceError("incomplete Weber integrals diverge at u <= 0")
    z = _order_complex(order)
    if z.imag != 0.0:
        f, unscale = _weber_integrand_imag(kind, level, abs(z.imag))
    else:
        f = _weber_integrand_real(kind, level, abs(z.real))
        unscale = 1.0

    def panel(a, b):
        out = quad(f, a, b, epsabs=tol, epsrel=tol, limit=200, full_output=1)
        value, abs_err = out[0], out[1]
        if len(out) > 3 and abs_err > 100.0 * tol * max(1.0, abs(value)):
            raise NonConvergenceError(
                f"Weber integral over [{a}, {b}] did not converge: "
                f"estimated error {abs_err}"
            )
        return value

    if u < 1.0:
        # keep the near-origin growth of x^-2 C(x) in its own panel
        return unscale * (panel(u, 1.0) + panel(1.0, np.inf))
    return unscale * panel(u, np.inf)
