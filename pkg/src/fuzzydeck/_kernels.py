"""Hot numeric kernels for the clustering loop.

Two interchangeable backends: numba-jitted loops (default when numba imports)
and a vectorized pure-numpy path. Select with the ``FUZZYDECK_BACKEND``
environment variable ("numba" | "numpy") or :func:`set_backend`.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


_VALID = ("numba", "numpy")
_backend = os.environ.get("FUZZYDECK_BACKEND", "numba" if _HAVE_NUMBA else "numpy")
if _backend not in _VALID:
    raise ValueError(f"FUZZYDECK_BACKEND must be one of {_VALID}, got {_backend!r}")
if _backend == "numba" and not _HAVE_NUMBA:
    _backend = "numpy"


def active_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not importable")
    _backend = name


# ---------------------------------------------------------------------------
# numpy path


def _brackets_numpy(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    # index j in {0..k}: number of centroids <= x, i.e. v[j-1] <= x < v[j]
    return np.searchsorted(v, x, side="right")


def _memberships_numpy(x: np.ndarray, v: np.ndarray, m: float) -> np.ndarray:
    n, k = x.size, v.size
    u = np.zeros((n, k))
    j = _brackets_numpy(x, v)

    left_tail = j == 0
    right_tail = j == k
    u[left_tail, 0] = 1.0
    u[right_tail, k - 1] = 1.0

    mid = ~(left_tail | right_tail)
    idx = np.nonzero(mid)[0]
    if idx.size:
        jm = j[idx]
        dl = (x[idx] - v[jm - 1]) ** 2
        dr = (x[idx] - v[jm]) ** 2
        ul = np.empty(idx.size)
        on_left = dl == 0.0
        on_right = (dr == 0.0) & ~on_left
        both = ~(on_left | on_right)
        ul[on_left] = 1.0
        ul[on_right] = 0.0
        with np.errstate(over="ignore"):
            ratio = (dl[both] / dr[both]) ** (1.0 / (m - 1.0))
        ul[both] = 1.0 / (1.0 + ratio)
        u[idx, jm - 1] = ul
        u[idx, jm] = 1.0 - ul
    return u


def _centers_numpy(x: np.ndarray, u: np.ndarray, m: float):
    w = u**m
    den = w.sum(axis=0)
    num = w.T @ x
    return num, den


def _objective_numpy(x: np.ndarray, u: np.ndarray, v: np.ndarray, m: float) -> float:
    d = (x[:, None] - v[None, :]) ** 2
    return float(np.sum((u**m) * d))


# ---------------------------------------------------------------------------
# numba path


@njit(cache=True)
def _brackets_numba(x, v):
    return np.searchsorted(v, x, side="right")


@njit(cache=True)
def _memberships_numba(x, v, m):
    n = x.size
    k = v.size
    u = np.zeros((n, k))
    e = 1.0 / (m - 1.0)
    for i in range(n):
        xi = x[i]
        j = np.searchsorted(v, xi, side="right")
        if j == 0:
            u[i, 0] = 1.0
        elif j == k:
            u[i, k - 1] = 1.0
        else:
            dl = (xi - v[j - 1]) ** 2
            dr = (xi - v[j]) ** 2
            if dl == 0.0:
                u[i, j - 1] = 1.0
            elif dr == 0.0:
                u[i, j] = 1.0
            else:
                ul = 1.0 / (1.0 + (dl / dr) ** e)
                u[i, j - 1] = ul
                u[i, j] = 1.0 - ul
    return u


@njit(cache=True)
def _centers_numba(x, u, m):
    n, k = u.shape
    num = np.zeros(k)
    den = np.zeros(k)
    for i in range(n):
        for j in range(k):
            uij = u[i, j]
            if uij > 0.0:
                w = uij**m
                num[j] += w * x[i]
                den[j] += w
    return num, den


@njit(cache=True)
def _objective_numba(x, u, v, m):
    n, k = u.shape
    total = 0.0
    for i in range(n):
        for j in range(k):
            uij = u[i, j]
            if uij > 0.0:
                total += uij**m * (x[i] - v[j]) ** 2
    return total


# ---------------------------------------------------------------------------
# dispatch


def bracket_indices(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Left-bracketing index per observation, in {0..k} (0 = below all centroids)."""
    if _backend == "numba":
        return _brackets_numba(np.ascontiguousarray(x), np.ascontiguousarray(v))
    return _brackets_numpy(x, v)


def membership_matrix(x: np.ndarray, v: np.ndarray, m: float) -> np.ndarray:
    """Dense (n, k) optimal memberships under the two-adjacent-cluster constraint."""
    if _backend == "numba":
        return _memberships_numba(np.ascontiguousarray(x), np.ascontiguousarray(v), m)
    return _memberships_numpy(x, v, m)


def center_sums(x: np.ndarray, u: np.ndarray, m: float):
    """Weighted sums (numerator, denominator) for the center update."""
    if _backend == "numba":
        return _centers_numba(np.ascontiguousarray(x), np.ascontiguousarray(u), m)
    return _centers_numpy(x, u, m)


def objective_value(x: np.ndarray, u: np.ndarray, v: np.ndarray, m: float) -> float:
    """Weighted within-cluster squared error."""
    if _backend == "numba":
        return float(
            _objective_numba(
                np.ascontiguousarray(x), np.ascontiguousarray(u), np.ascontiguousarray(v), m
            )
        )
    return _objective_numpy(x, u, v, m)
