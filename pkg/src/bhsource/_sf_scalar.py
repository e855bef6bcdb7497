"""Scalar special-function kernels: J0, Y0, K0, I0.

These are the algorithms of record; `_sf_numpy` carries vectorized
transcriptions of the same term recurrences, and the numba field kernels
inline the scalar forms below.  All functions assume their argument is inside
the mathematical domain (the public wrappers in `specfun` validate).

Algorithm layout:

* ``x < SERIES_CUT`` (J0/Y0) or ``x <= K0_SERIES_CUT`` (K0): ascending power
  series accumulated in double-double arithmetic.  Plain double accumulation
  loses ~5-6 digits at the top of the series range (partial sums reach
  I0(13) ~ 4.5e4 while J0 is O(1)); the compensated form keeps the absolute
  error near 1e-15.
* above the cut: Hankel-type asymptotic expansions truncated at the smallest
  term.  At the crossover the smallest term is ~1.5e-13 (J0/Y0 at 13) and
  ~8e-9 relative (K0 at 8.5, i.e. ~7e-13 absolute), shrinking fast beyond.

The shared coefficient family is a_k = ((2k-1)!!)^2 / (k! 8^k) with
a_k / a_{k-1} = (2k-1)^2 / (8k).
"""

import math

from ._dd import (
    dd_add,
    dd_inv_d,
    dd_mul,
    dd_mul_d,
    register_jitable,
    two_prod,
)

SERIES_CUT = 13.0
K0_SERIES_CUT = 8.5
EULER_GAMMA = 0.57721566490153286
TWO_OVER_PI = 0.63661977236758134
QUARTER_PI = 0.78539816339744831

# Term-size cutoffs: once a (positive) series term drops below _SERIES_EPS the
# remaining tail is < 2e-26 and cannot move a double result.
_SERIES_EPS = 1e-26
_ASYM_EPS = 1e-19
_MAX_SERIES_TERMS = 80
_MAX_ASYM_TERMS = 60


@register_jitable
def j0_series(x):
    """Ascending series for J0 on [0, SERIES_CUT)."""
    qh, ql = two_prod(x, x)
    qh *= 0.25
    ql *= 0.25
    th, tl = 1.0, 0.0
    sh, sl = 1.0, 0.0
    sign = -1.0
    j = 1
    while j <= _MAX_SERIES_TERMS:
        th, tl = dd_mul(th, tl, qh, ql)
        ih, il = dd_inv_d(1.0 * j * j)
        th, tl = dd_mul(th, tl, ih, il)
        sh, sl = dd_add(sh, sl, sign * th, sign * tl)
        if th < _SERIES_EPS:
            break
        sign = -sign
        j += 1
    return sh + sl


@register_jitable
def y0_series(x):
    """Ascending (log) series for Y0 on (0, SERIES_CUT)."""
    qh, ql = two_prod(x, x)
    qh *= 0.25
    ql *= 0.25
    th, tl = 1.0, 0.0
    hh, hl = 0.0, 0.0  # harmonic number H_j
    sh, sl = 0.0, 0.0
    sign = 1.0  # (-1)**(j+1) for j = 1
    j = 1
    while j <= _MAX_SERIES_TERMS:
        th, tl = dd_mul(th, tl, qh, ql)
        ih, il = dd_inv_d(1.0 * j * j)
        th, tl = dd_mul(th, tl, ih, il)
        rh, rl = dd_inv_d(1.0 * j)
        hh, hl = dd_add(hh, hl, rh, rl)
        uh, ul = dd_mul(th, tl, hh, hl)
        sh, sl = dd_add(sh, sl, sign * uh, sign * ul)
        if th < _SERIES_EPS:
            break
        sign = -sign
        j += 1
    lg = math.log(0.5 * x) + EULER_GAMMA
    return TWO_OVER_PI * (lg * j0_series(x) + (sh + sl))


@register_jitable
def k0_series(x):
    """Ascending series for K0 on (0, K0_SERIES_CUT]."""
    qh, ql = two_prod(x, x)
    qh *= 0.25
    ql *= 0.25
    th, tl = 1.0, 0.0
    i0h, i0l = 1.0, 0.0  # I0(x)
    hh, hl = 0.0, 0.0
    sh, sl = 0.0, 0.0
    j = 1
    while j <= _MAX_SERIES_TERMS:
        th, tl = dd_mul(th, tl, qh, ql)
        ih, il = dd_inv_d(1.0 * j * j)
        th, tl = dd_mul(th, tl, ih, il)
        i0h, i0l = dd_add(i0h, i0l, th, tl)
        rh, rl = dd_inv_d(1.0 * j)
        hh, hl = dd_add(hh, hl, rh, rl)
        uh, ul = dd_mul(th, tl, hh, hl)
        sh, sl = dd_add(sh, sl, uh, ul)
        if th < _SERIES_EPS:
            break
        j += 1
    lg = math.log(0.5 * x) + EULER_GAMMA
    ph, pl = dd_mul_d(i0h, i0l, lg)
    rh, rl = dd_add(sh, sl, -ph, -pl)
    return rh + rl


@register_jitable
def pq_asym(x):
    """Smallest-term-truncated P/Q sums of the Hankel asymptotic expansion.

    J0(x) = s*(P cos w - Q sin w), Y0(x) = s*(P sin w + Q cos w)
    with s = sqrt(2/(pi x)), w = x - pi/4.
    """
    p = 0.0
    q = 0.0
    u = 1.0
    ulast = 1.0e308
    sp = 1.0
    sq = -1.0
    k = 0
    while k <= _MAX_ASYM_TERMS and u < ulast:
        if k % 2 == 0:
            p += sp * u
            sp = -sp
        else:
            q += sq * u
            sq = -sq
        if u < _ASYM_EPS:
            break
        ulast = u
        k += 1
        num = (2.0 * k - 1.0) * (2.0 * k - 1.0)
        u = (u * num) / (8.0 * k * x)
    return p, q


@register_jitable
def j0_scalar(x):
    if x < SERIES_CUT:
        return j0_series(x)
    p, q = pq_asym(x)
    s = math.sqrt(2.0 / (math.pi * x))
    w = x - QUARTER_PI
    return s * (p * math.cos(w) - q * math.sin(w))


@register_jitable
def y0_scalar(x):
    if x < SERIES_CUT:
        return y0_series(x)
    p, q = pq_asym(x)
    s = math.sqrt(2.0 / (math.pi * x))
    w = x - QUARTER_PI
    return s * (p * math.sin(w) + q * math.cos(w))


@register_jitable
def k0_scalar(x):
    if x <= K0_SERIES_CUT:
        return k0_series(x)
    # K0(x) = sqrt(pi/(2x)) e^{-x} * sum_k (-1)^k a_k / x^k
    acc = 0.0
    u = 1.0
    ulast = 1.0e308
    sign = 1.0
    k = 0
    while k <= _MAX_ASYM_TERMS and u < ulast:
        acc += sign * u
        if u < _ASYM_EPS:
            break
        sign = -sign
        ulast = u
        k += 1
        num = (2.0 * k - 1.0) * (2.0 * k - 1.0)
        u = (u * num) / (8.0 * k * x)
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * acc
