"""Vectorized (pure numpy) special functions J0, Y0, K0.

Same term recurrences as `_sf_scalar` (see that module for the numerical
design); loops run a masked fixed-point iteration so every element follows
the identical truncation rule as the scalar code.  Inputs are 1-D float64
arrays already validated by `specfun`; work is done on the series/asymptotic
subsets separately (boolean-compressed) to keep temporaries small.
"""

import numpy as np

from . import _dd
from ._sf_scalar import (
    EULER_GAMMA,
    K0_SERIES_CUT,
    QUARTER_PI,
    SERIES_CUT,
    TWO_OVER_PI,
    _ASYM_EPS,
    _MAX_ASYM_TERMS,
    _MAX_SERIES_TERMS,
    _SERIES_EPS,
)

# Cap on elements processed per masked block; keeps the ~12 double-double
# temporaries of the series loops under ~100 MB.
_BLOCK = 1 << 19


def _blocks(n):
    for start in range(0, n, _BLOCK):
        yield slice(start, min(start + _BLOCK, n))


def _j0_series_block(x):
    qh, ql = _dd.two_prod(x, x)
    qh = qh * 0.25
    ql = ql * 0.25
    th = np.ones_like(x)
    tl = np.zeros_like(x)
    sh = np.ones_like(x)
    sl = np.zeros_like(x)
    sign = -1.0
    alive = np.ones(x.shape, dtype=bool)
    for j in range(1, _MAX_SERIES_TERMS + 1):
        th, tl = _dd.dd_mul(th, tl, qh, ql)
        ih, il = _dd.dd_inv_d(1.0 * j * j)
        th, tl = _dd.dd_mul(th, tl, ih, il)
        nh, nl = _dd.dd_add(sh, sl, sign * th, sign * tl)
        sh = np.where(alive, nh, sh)
        sl = np.where(alive, nl, sl)
        alive = alive & (th >= _SERIES_EPS)
        if not alive.any():
            break
        sign = -sign
    return sh + sl


def _y0_series_block(x):
    qh, ql = _dd.two_prod(x, x)
    qh = qh * 0.25
    ql = ql * 0.25
    th = np.ones_like(x)
    tl = np.zeros_like(x)
    sh = np.zeros_like(x)
    sl = np.zeros_like(x)
    hh, hl = 0.0, 0.0
    sign = 1.0
    alive = np.ones(x.shape, dtype=bool)
    for j in range(1, _MAX_SERIES_TERMS + 1):
        th, tl = _dd.dd_mul(th, tl, qh, ql)
        ih, il = _dd.dd_inv_d(1.0 * j * j)
        th, tl = _dd.dd_mul(th, tl, ih, il)
        rh, rl = _dd.dd_inv_d(1.0 * j)
        hh, hl = _dd.dd_add(hh, hl, rh, rl)
        uh, ul = _dd.dd_mul(th, tl, hh, hl)
        nh, nl = _dd.dd_add(sh, sl, sign * uh, sign * ul)
        sh = np.where(alive, nh, sh)
        sl = np.where(alive, nl, sl)
        alive = alive & (th >= _SERIES_EPS)
        if not alive.any():
            break
        sign = -sign
    lg = np.log(0.5 * x) + EULER_GAMMA
    return TWO_OVER_PI * (lg * _j0_series_block(x) + (sh + sl))


def _k0_series_block(x):
    qh, ql = _dd.two_prod(x, x)
    qh = qh * 0.25
    ql = ql * 0.25
    th = np.ones_like(x)
    tl = np.zeros_like(x)
    i0h = np.ones_like(x)
    i0l = np.zeros_like(x)
    sh = np.zeros_like(x)
    sl = np.zeros_like(x)
    hh, hl = 0.0, 0.0
    alive = np.ones(x.shape, dtype=bool)
    for j in range(1, _MAX_SERIES_TERMS + 1):
        th, tl = _dd.dd_mul(th, tl, qh, ql)
        ih, il = _dd.dd_inv_d(1.0 * j * j)
        th, tl = _dd.dd_mul(th, tl, ih, il)
        nh, nl = _dd.dd_add(i0h, i0l, th, tl)
        i0h = np.where(alive, nh, i0h)
        i0l = np.where(alive, nl, i0l)
        rh, rl = _dd.dd_inv_d(1.0 * j)
        hh, hl = _dd.dd_add(hh, hl, rh, rl)
        uh, ul = _dd.dd_mul(th, tl, hh, hl)
        nh, nl = _dd.dd_add(sh, sl, uh, ul)
        sh = np.where(alive, nh, sh)
        sl = np.where(alive, nl, sl)
        alive = alive & (th >= _SERIES_EPS)
        if not alive.any():
            break
    lg = np.log(0.5 * x) + EULER_GAMMA
    ph, pl = _dd.dd_mul_d(i0h, i0l, lg)
    rh, rl = _dd.dd_add(sh, sl, -ph, -pl)
    return rh + rl


def _pq_asym_block(x):
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    u = np.ones_like(x)
    ulast = np.full_like(x, 1.0e308)
    sp = 1.0
    sq = -1.0
    k = 0
    alive = np.ones(x.shape, dtype=bool)
    while k <= _MAX_ASYM_TERMS:
        dec = alive & (u < ulast)
        if k % 2 == 0:
            p = np.where(dec, p + sp * u, p)
            sp = -sp
        else:
            q = np.where(dec, q + sq * u, q)
            sq = -sq
        alive = dec & (u >= _ASYM_EPS)
        if not alive.any():
            break
        ulast = np.where(alive, u, ulast)
        k += 1
        num = (2.0 * k - 1.0) * (2.0 * k - 1.0)
        u = np.where(alive, (u * num) / (8.0 * k * x), u)
    return p, q


def _k0_asym_block(x):
    acc = np.zeros_like(x)
    u = np.ones_like(x)
    ulast = np.full_like(x, 1.0e308)
    sign = 1.0
    k = 0
    alive = np.ones(x.shape, dtype=bool)
    while k <= _MAX_ASYM_TERMS:
        dec = alive & (u < ulast)
        acc = np.where(dec, acc + sign * u, acc)
        alive = dec & (u >= _ASYM_EPS)
        if not alive.any():
            break
        sign = -sign
        ulast = np.where(alive, u, ulast)
        k += 1
        num = (2.0 * k - 1.0) * (2.0 * k - 1.0)
        u = np.where(alive, (u * num) / (8.0 * k * x), u)
    return np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) * acc


def j0(x):
    """J0 on a 1-D float64 array with x >= 0."""
    out = np.empty_like(x)
    for sl in _blocks(x.size):
        xs = x[sl]
        res = np.empty_like(xs)
        small = xs < SERIES_CUT
        if small.any():
            res[small] = _j0_series_block(xs[small])
        big = ~small
        if big.any():
            xb = xs[big]
            p, q = _pq_asym_block(xb)
            s = np.sqrt(2.0 / (np.pi * xb))
            w = xb - QUARTER_PI
            res[big] = s * (p * np.cos(w) - q * np.sin(w))
        out[sl] = res
    return out


def y0(x):
    """Y0 on a 1-D float64 array with x > 0."""
    out = np.empty_like(x)
    for sl in _blocks(x.size):
        xs = x[sl]
        res = np.empty_like(xs)
        small = xs < SERIES_CUT
        if small.any():
            res[small] = _y0_series_block(xs[small])
        big = ~small
        if big.any():
            xb = xs[big]
            p, q = _pq_asym_block(xb)
            s = np.sqrt(2.0 / (np.pi * xb))
            w = xb - QUARTER_PI
            res[big] = s * (p * np.sin(w) + q * np.cos(w))
        out[sl] = res
    return out


def k0(x):
    """K0 on a 1-D float64 array with x > 0."""
    out = np.empty_like(x)
    for sl in _blocks(x.size):
        xs = x[sl]
        res = np.empty_like(xs)
        small = xs <= K0_SERIES_CUT
        if small.any():
            res[small] = _k0_series_block(xs[small])
        big = ~small
        if big.any():
            res[big] = _k0_asym_block(xs[big])
        out[sl] = res
    return out
