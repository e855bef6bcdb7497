"""Frequency-band integration.

All multi-frequency indicators reduce to trapezoid sums over the measured
frequency grid; this module is the single implementation of that rule.  The
semi-infinite variant exists for the verification suite's closed-form
integral checks and starts at ``step/2`` to stay off the logarithmic
singularities of Y0/K0 at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class BandIntegrand:
    """Sampled complex integrand on a strictly increasing frequency grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.complex128)
        if grid.ndim != 1 or values.ndim != 1 or grid.size != values.size:
            raise DomainError("BandIntegrand: grid and values must be equal-length 1-D")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise DomainError("BandIntegrand: non-finite entries")
        if grid.size >= 2 and not np.all(np.diff(grid) > 0):
            raise DomainError("BandIntegrand: grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Weights w with sum(w*f) == composite trapezoid rule over `grid`."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size < 2:
        raise DomainError("trapezoid_weights: need at least 2 grid points")
    dk = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += 0.5 * dk
    w[1:] += 0.5 * dk
    return w


def integrate_band(integrand: BandIntegrand) -> complex:
    """Composite trapezoid rule; exact for affine integrands."""
    if integrand.grid.size < 2:
        raise DomainError("integrate_band: need at least 2 grid points")
    return complex(np.sum(trapezoid_weights(integrand.grid) * integrand.values))


def integrate_semiinfinite_truncated(f, k_max: float, step: float) -> complex:
    """Trapezoid rule for int_0^inf f, truncated to [step/2, k_max].

    `f` must accept a 1-D float64 array and return matching values.
    """
    if k_max <= 0 or step <= 0:
        raise DomainError("integrate_semiinfinite_truncated: k_max and step must be > 0")
    n = int(np.floor((k_max - 0.5 * step) / step)) + 1
    if n < 2:
        raise DomainError("integrate_semiinfinite_truncated: band shorter than one step")
    grid = 0.5 * step + step * np.arange(n)
    return integrate_band(BandIntegrand(grid, np.asarray(f(grid))))
