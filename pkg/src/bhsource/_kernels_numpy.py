"""Pure-numpy fallback kernels (see `_kernels_numba` for the JIT twins).

Vectorized per sensor; node blocks are capped so the J0 argument matrix stays
within a modest memory budget.
"""

import numpy as np

from . import _sf_numpy

BACKEND_NAME = "numpy"

_NODE_BLOCK = 8192


def j0_array(x):
    return _sf_numpy.j0(np.ascontiguousarray(x, dtype=np.float64))


def y0_array(x):
    return _sf_numpy.y0(np.ascontiguousarray(x, dtype=np.float64))


def k0_array(x):
    return _sf_numpy.k0(np.ascontiguousarray(x, dtype=np.float64))


def _uniform_step(kgrid):
    if kgrid.shape[0] < 2:
        return 0.0
    steps = np.diff(kgrid)
    h = steps[0]
    if np.all(np.abs(steps - h) <= 1e-9 * abs(h)):
        return float(h)
    return 0.0


def indicator_grid_2d(nodes, sensors, kgrid, coef):
    """|sum_l sum_j coef[l,j] * J0(k_j * |x_l - z_i|)| for each grid node."""
    n_nodes = nodes.shape[0]
    total = np.zeros(n_nodes, dtype=np.complex128)
    for start in range(0, n_nodes, _NODE_BLOCK):
        block = slice(start, min(start + _NODE_BLOCK, n_nodes))
        for l in range(sensors.shape[0]):
            r = np.linalg.norm(nodes[block] - sensors[l], axis=1)
            args = r[:, None] * kgrid[None, :]
            b = _sf_numpy.j0(args.ravel()).reshape(args.shape)
            total[block] += b @ coef[l]
    return np.abs(total)


def indicator_grid_3d(nodes, sensors, kgrid, coef):
    """|sum_l sum_j coef[l,j] * exp(-i k_j |x_l - z_i|)| for each grid node."""
    n_nodes = nodes.shape[0]
    n_freq = kgrid.shape[0]
    total = np.zeros(n_nodes, dtype=np.complex128)
    step = _uniform_step(kgrid)
    for l in range(sensors.shape[0]):
        r = np.linalg.norm(nodes - sensors[l], axis=1)
        if step > 0.0:
            # phase recurrence over the uniform frequency grid
            phase = np.exp(-1j * kgrid[0] * r)
            rot = np.exp(-1j * step * r)
            for j in range(n_freq):
                total += coef[l, j] * phase
                phase *= rot
        else:
            for start in range(0, n_nodes, _NODE_BLOCK):
                block = slice(start, min(start + _NODE_BLOCK, n_nodes))
                args = r[block, None] * kgrid[None, :]
                total[block] += np.exp(-1j * args) @ coef[l]
    return np.abs(total)
