"""Kernel backend selection.

The hot loops in :mod:`btq._kernels` exist twice: a numba ``@njit`` version
and a plain numpy version.  ``BTQ_BACKEND=numpy`` forces the numpy path;
the default is numba when it can be imported.
"""
import os

try:
    import numba  # noqa: F401
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

_VALID = ("numba", "numpy")


def _initial_backend():
    requested = os.environ.get("BTQ_BACKEND", "numba").strip().lower()
    if requested not in _VALID:
        raise ValueError(f"BTQ_BACKEND must be one of {_VALID}, got {requested!r}")
    if requested == "numba" and not HAS_NUMBA:
        return "numpy"
    return requested


_backend = _initial_backend()


def get_backend():
    return _backend


def set_backend(name):
    """Switch backend at runtime (used by the benchmark and the kernel tests)."""
    global _backend
    name = name.lower()
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _backend = name
