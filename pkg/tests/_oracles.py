"""Independent oracles for the special functions and closed-form fields.

Implemented deliberately *not* via the production algorithms:

* ``j0_quad``: J0(x) = (1/pi) * int_0^pi cos(x sin t) dt, periodic-trapezoid
  rule (spectrally convergent for entire periodic integrands).
* ``k0_quad``: K0(x) = int_0^inf exp(-x cosh t) dt, trapezoid with adaptive
  truncation (the integrand is even in t and decays double-exponentially, so
  the trapezoid rule is again spectrally accurate).
* ``j0_series40`` / ``y0_series40``: plain 40-term ascending series (small x
  only), used for the frozen single-point expected values and zero bisection.

mpmath (test-only dependency) supplies the large-argument Y0 reference, where
no elementary quadrature of comparable accuracy is available.
"""

import math

import numpy as np


def j0_quad(x: float) -> float:
    n = 256 + int(1.4 * x)
    t = (np.arange(n) + 0.5) * (np.pi / n)  # midpoint == shifted trapezoid, periodic
    return float(np.mean(np.cos(x * np.sin(t))))


def k0_quad(x: float) -> float:
    t_max = math.acosh(745.0 / x) if x < 745.0 else 1.0
    h = 2e-3
    n = int(t_max / h) + 2
    t = np.arange(n + 1) * h
    w = np.full(n + 1, h)
    w[0] = 0.5 * h
    w[-1] = 0.5 * h
    return float(np.sum(w * np.exp(-x * np.cosh(t))))


def j0_series40(x: float) -> float:
    acc = 0.0
    for j in range(40, 0, -1):
        acc = (acc + (-1.0) ** j) * (x * x / 4.0) / (j * j)
    return 1.0 + acc


_EULER_GAMMA = 0.5772156649015328606


def y0_series40(x: float) -> float:
    term = 1.0
    harm = 0.0
    acc = 0.0
    for j in range(1, 41):
        term *= (x * x / 4.0) / (j * j)
        harm += 1.0 / j
        acc += (-1.0) ** (j + 1) * harm * term
    return (2.0 / math.pi) * ((math.log(x / 2.0) + _EULER_GAMMA) * j0_series40(x) + acc)


def bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    assert flo * f(hi) < 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def fundamental_3d(k: float, r: float) -> complex:
    return (np.exp(1j * k * r) - np.exp(-k * r)) / (8.0 * np.pi * k * k * r)


def fundamental_2d(k: float, r: float) -> complex:
    h0 = j0_quad(k * r) + 1j * float(__import__("mpmath").bessely(0, k * r))
    return (1j / (8.0 * k * k)) * (h0 + (2j / np.pi) * k0_quad(k * r))
