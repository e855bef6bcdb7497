"""numba-compiled hot kernels: indicator fields on sampling grids.

Each grid node is written by exactly one ``prange`` iteration, so results are
bit-deterministic for any thread count.  No fastmath anywhere: the inlined
special-function series rely on strict IEEE ordering (see `_dd`).
"""

import math

import numpy as np
from numba import njit, prange

from ._sf_scalar import j0_scalar, k0_scalar, y0_scalar

BACKEND_NAME = "numba"


@njit(cache=True, parallel=True)
def _j0_arr(x, out):
    for i in prange(x.shape[0]):
        out[i] = j0_scalar(x[i])


@njit(cache=True, parallel=True)
def _y0_arr(x, out):
    for i in prange(x.shape[0]):
        out[i] = y0_scalar(x[i])


@njit(cache=True, parallel=True)
def _k0_arr(x, out):
    for i in prange(x.shape[0]):
        out[i] = k0_scalar(x[i])


def j0_array(x):
    out = np.empty_like(x)
    _j0_arr(np.ascontiguousarray(x), out)
    return out


def y0_array(x):
    out = np.empty_like(x)
    _y0_arr(np.ascontiguousarray(x), out)
    return out


def k0_array(x):
    out = np.empty_like(x)
    _k0_arr(np.ascontiguousarray(x), out)
    return out


@njit(cache=True, parallel=True)
def _ind2d(nodes, sensors, kgrid, coef, out):
    n_nodes = nodes.shape[0]
    n_sens = sensors.shape[0]
    n_freq = kgrid.shape[0]
    for i in prange(n_nodes):
        zx = nodes[i, 0]
        zy = nodes[i, 1]
        acc = complex(0.0, 0.0)
        for l in range(n_sens):
            dx = sensors[l, 0] - zx
            dy = sensors[l, 1] - zy
            r = math.sqrt(dx * dx + dy * dy)
            for j in range(n_freq):
                acc += coef[l, j] * j0_scalar(kgrid[j] * r)
        out[i] = abs(acc)


@njit(cache=True, parallel=True)
def _ind3d(nodes, sensors, kgrid, coef, out, uniform_step):
    n_nodes = nodes.shape[0]
    n_sens = sensors.shape[0]
    n_freq = kgrid.shape[0]
    for i in prange(n_nodes):
        zx = nodes[i, 0]
        zy = nodes[i, 1]
        zz = nodes[i, 2]
        acc = complex(0.0, 0.0)
        for l in range(n_sens):
            dx = sensors[l, 0] - zx
            dy = sensors[l, 1] - zy
            dz = sensors[l, 2] - zz
            r = math.sqrt(dx * dx + dy * dy + dz * dz)
            if uniform_step > 0.0:
                # phase recurrence: e^{-i k_j r} = e^{-i k_0 r} * rot^j
                ang = kgrid[0] * r
                ph = complex(math.cos(ang), -math.sin(ang))
                sang = uniform_step * r
                rot = complex(math.cos(sang), -math.sin(sang))
                for j in range(n_freq):
                    acc += coef[l, j] * ph
                    ph *= rot
            else:
                for j in range(n_freq):
                    ang = kgrid[j] * r
                    acc += coef[l, j] * complex(math.cos(ang), -math.sin(ang))
        out[i] = abs(acc)


def indicator_grid_2d(nodes, sensors, kgrid, coef):
    """|sum_l sum_j coef[l,j] * J0(k_j * |x_l - z_i|)| for each grid node."""
    out = np.empty(nodes.shape[0], dtype=np.float64)
    _ind2d(
        np.ascontiguousarray(nodes),
        np.ascontiguousarray(sensors),
        np.ascontiguousarray(kgrid),
        np.ascontiguousarray(coef),
        out,
    )
    return out


def _uniform_step(kgrid):
    if kgrid.shape[0] < 2:
        return 0.0
    steps = np.diff(kgrid)
    h = steps[0]
    if np.all(np.abs(steps - h) <= 1e-9 * abs(h)):
        return float(h)
    return 0.0


def indicator_grid_3d(nodes, sensors, kgrid, coef):
    """|sum_l sum_j coef[l,j] * exp(-i k_j |x_l - z_i|)| for each grid node."""
    out = np.empty(nodes.shape[0], dtype=np.float64)
    _ind3d(
        np.ascontiguousarray(nodes),
        np.ascontiguousarray(sensors),
        np.ascontiguousarray(kgrid),
        np.ascontiguousarray(coef),
        out,
        _uniform_step(kgrid),
    )
    return out
