"""Selection of the hot-kernel backend (numba JIT vs pure numpy).

The indicator-field kernels exist twice: a numba ``@njit(parallel=True)``
implementation and a vectorized numpy fallback.  The active one is chosen by
the ``BHSOURCE_BACKEND`` environment variable (``numba`` | ``numpy``; unset
or ``auto`` picks numba when importable).  ``BHSOURCE_THREADS`` caps the
numba thread count.

Everything outside the grid kernels (special-function public API, linear
algebra, quadrature) always runs the numpy reference path.
"""

from __future__ import annotations

import os
import warnings

from .errors import ConfigError

BACKEND_ENV = "BHSOURCE_BACKEND"
THREADS_ENV = "BHSOURCE_THREADS"

_active: str | None = None


def _numba_usable() -> bool:
    # Default to the always-available threading layer unless the user chose
    # one; the TBB/OMP probes are noisy when those libraries are stale.
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _numba_usable() else ("numpy",)


def _apply_thread_env() -> None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return
    import numba

    try:
        requested = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    limit = numba.config.NUMBA_NUM_THREADS
    clamped = max(1, min(requested, limit))
    if clamped != requested:
        warnings.warn(
            f"{THREADS_ENV}={requested} clamped to {clamped} "
            f"(launchable range is 1..{limit})",
            stacklevel=2,
        )
    numba.set_num_threads(clamped)


def active_backend() -> str:
    """Resolve (once) and return the active backend name."""
    global _active
    if _active is None:
        requested = os.environ.get(BACKEND_ENV, "auto").strip().lower() or "auto"
        if requested == "auto":
            _active = "numba" if _numba_usable() else "numpy"
        elif requested == "numpy":
            _active = "numpy"
        elif requested == "numba":
            if not _numba_usable():
                raise ConfigError(
                    f"{BACKEND_ENV}=numba requested but numba is not importable"
                )
            _active = "numba"
        else:
            raise ConfigError(
                f"{BACKEND_ENV} must be 'numba', 'numpy' or 'auto', got {requested!r}"
            )
        if _active == "numba":
            _apply_thread_env()
    return _active


def set_backend(name: str) -> str:
    """Force a backend at runtime (used by tests and the benchmark)."""
    global _active
    if name not in ("numba", "numpy"):
        raise ConfigError(f"unknown backend {name!r}")
    if name == "numba" and not _numba_usable():
        raise ConfigError("numba backend requested but numba is not importable")
    _active = name
    return _active


def kernels():
    """Return the active kernel module."""
    if active_backend() == "numba":
        from . import _kernels_numba as mod
    else:
        from . import _kernels_numpy as mod
    return mod
