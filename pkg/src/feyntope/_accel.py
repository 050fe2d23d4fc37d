"""Backend switch between numba-compiled kernels and the pure numpy path.

Set ``FEYNTOPE_DISABLE_NUMBA=1`` (or ``FEYNTOPE_BACKEND=numpy``) before import
to run every hot kernel through its numpy implementation.  The switch can
also be flipped at runtime with :func:`set_backend`, which is what the
benchmark script and the backend-agreement tests do.
"""

from __future__ import annotations

import os

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _env_backend() -> str:
    if os.environ.get("FEYNTOPE_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    name = os.environ.get("FEYNTOPE_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"FEYNTOPE_BACKEND must be 'numba' or 'numpy', got {name!r}")
    return name


_backend = _env_backend() if HAVE_NUMBA else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _backend = _backend, name
    return previous


def njit(*args, **kwargs):
    """``numba.njit`` with on-disk caching, or the identity without numba."""
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def thread_count() -> int:
    """Worker cap from ``FEYNTOPE_THREADS`` (default 1)."""
    raw = os.environ.get("FEYNTOPE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
