"""Successor generation over integer marking vectors.

Two interchangeable backends compute, for one marking, the enabled ground
bindings and the markings they lead to. The numba backend walks CSR arrays;
the numpy backend uses dense consume/delta matrices. Set
``OCALIGN_DISABLE_NUMBA=1`` to force the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("OCALIGN_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None

HAVE_NUMBA = nb is not None


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not _DISABLE else "numpy"


def successors_numpy(marking, cons_dense, delta_dense):
    enabled = np.flatnonzero((cons_dense <= marking).all(axis=1))
    return enabled, marking + delta_dense[enabled]


def _successors_py(marking, cons_ptr, cons_idx, cons_val, delta_ptr, delta_idx, delta_val):
    n = cons_ptr.shape[0] - 1
    picked = np.empty(n, np.int64)
    count = 0
    for b in range(n):
        ok = True
        for k in range(cons_ptr[b], cons_ptr[b + 1]):
            if marking[cons_idx[k]] < cons_val[k]:
                ok = False
                break
        if ok:
            picked[count] = b
            count += 1
    out = np.empty((count, marking.shape[0]), marking.dtype)
    for j in range(count):
        b = picked[j]
        out[j, :] = marking
        for k in range(delta_ptr[b], delta_ptr[b + 1]):
            out[j, delta_idx[k]] += delta_val[k]
    return picked[:count], out


if HAVE_NUMBA:
    successors_csr = nb.njit(cache=True, nogil=True)(_successors_py)
else:  # pragma: no cover
    successors_csr = _successors_py


class SuccessorKernel:
    """Bound successor function for one compiled net and backend."""

    def __init__(self, cons_ptr, cons_idx, cons_val, delta_ptr, delta_idx, delta_val, n_tokens, backend=None):
        self.backend = backend or default_backend()
        if self.backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "numba" and not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        self._csr = (cons_ptr, cons_idx, cons_val, delta_ptr, delta_idx, delta_val)
        if self.backend == "numpy":
            n_b = cons_ptr.shape[0] - 1
            self._cons = np.zeros((n_b, n_tokens), np.int32)
            self._delta = np.zeros((n_b, n_tokens), np.int32)
            for b in range(n_b):
                s, e = cons_ptr[b], cons_ptr[b + 1]
                self._cons[b, cons_idx[s:e]] = cons_val[s:e]
                s, e = delta_ptr[b], delta_ptr[b + 1]
                np.add.at(self._delta[b], delta_idx[s:e], delta_val[s:e])

    def __call__(self, marking: np.ndarray):
        if self.backend == "numba":
            return successors_csr(marking, *self._csr)
        return successors_numpy(marking, self._cons, self._delta)


def warmup(backend: str | None = None) -> None:
    """Trigger JIT compilation so timings exclude it."""
    if (backend or default_backend()) != "numba":
        return
    ptr = np.zeros(2, np.int64)
    idx = np.zeros(0, np.int64)
    val = np.zeros(0, np.int32)
    successors_csr(np.zeros(1, np.int32), ptr[:1].copy(), idx, val, ptr[:1].copy(), idx, val)
