"""Backend selection for the numeric hot kernels.

The compiled extension (``atrisk._ckernels``, Cython) is preferred when it
imported cleanly; otherwise the numpy fallback is used.  Set the environment
variable ``ATRISK_PURE_PYTHON=1`` to force the fallback, or call
:func:`set_backend` at runtime (used by the benchmark and the
backend-agreement tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels
    _BACKENDS["compiled"] = _ckernels
except ImportError:
    pass

if os.environ.get("ATRISK_PURE_PYTHON", "") == "1":
    _active_name = "python"
elif "compiled" in _BACKENDS:
    _active_name = "compiled"
else:
    _active_name = "python"


def available_backends():
    """Names of the importable kernel backends."""
    return tuple(sorted(_BACKENDS))


def active_backend():
    return _active_name


def set_backend(name):
    """Switch the active kernel backend; returns the previous name."""
    global _active_name
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; "
                         f"available: {available_backends()}")
    previous = _active_name
    _active_name = name
    return previous


def pairwise_sqdist(x, y):
    """Squared Euclidean distances between rows of x (n, d) and y (m, d)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2:
        raise ValueError("pairwise_sqdist expects 2-D matrices")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"column mismatch: {x.shape[1]} vs {y.shape[1]}")
    return _BACKENDS[_active_name].pairwise_sqdist(x, y)


def split_scan(values, labels):
    """Best Gini split of a pre-sorted feature column.

    values: float64 ascending; labels: 0/1 per row, aligned.
    Returns (found, weighted_gini, threshold).
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    if values.shape != labels.shape:
        raise ValueError("values and labels must be aligned 1-D arrays")
    return _BACKENDS[_active_name].split_scan(values, labels)
