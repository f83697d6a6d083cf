"""Hot numeric loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and ``NETZERO_DISABLE_NUMBA`` is
not set to a truthy value. Integer kernels agree bit-for-bit between paths;
floating kernels agree to rounding (summation order differs).
"""

from __future__ import annotations

import os

import numpy as np
from scipy import sparse

_TRUTHY = {"1", "true", "yes", "on"}


def _numba_requested() -> bool:
    return os.environ.get("NETZERO_DISABLE_NUMBA", "").strip().lower() not in _TRUTHY


try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and _numba_requested()


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# pair counting: confusion matrices and per-segment label counts


def pair_counts_numpy(rows: np.ndarray, cols: np.ndarray, n_rows: int, n_cols: int) -> np.ndarray:
    flat = rows.astype(np.int64) * n_cols + cols.astype(np.int64)
    return np.bincount(flat, minlength=n_rows * n_cols).reshape(n_rows, n_cols).astype(np.int64)


def _pair_counts_py(rows, cols, n_rows, n_cols):
    out = np.zeros((n_rows, n_cols), dtype=np.int64)
    for i in range(rows.shape[0]):
        out[rows[i], cols[i]] += 1
    return out


# --------------------------------------------------------------------------
# grouped sums (yearly means over events)


def group_sums_numpy(keys: np.ndarray, values: np.ndarray, n_groups: int):
    sums = np.zeros((n_groups, values.shape[1]), dtype=np.float64)
    np.add.at(sums, keys, values)
    counts = np.bincount(keys, minlength=n_groups).astype(np.int64)
    return sums, counts


def _group_sums_py(keys, values, n_groups):
    sums = np.zeros((n_groups, values.shape[1]), dtype=np.float64)
    counts = np.zeros(n_groups, dtype=np.int64)
    for i in range(keys.shape[0]):
        g = keys[i]
        counts[g] += 1
        for j in range(values.shape[1]):
            sums[g, j] += values[i, j]
    return sums, counts


# --------------------------------------------------------------------------
# sparse softmax regression (hashed n-gram backend)


def sparse_logits_numpy(indptr, indices, data, n_features, W, b):
    X = sparse.csr_matrix((data, indices, indptr), shape=(len(indptr) - 1, n_features))
    return np.asarray(X @ W) + b


def _sparse_logits_py(indptr, indices, data, n_features, W, b):
    n = indptr.shape[0] - 1
    L = W.shape[1]
    out = np.empty((n, L), dtype=np.float64)
    for i in range(n):
        for c in range(L):
            out[i, c] = b[c]
        for p in range(indptr[i], indptr[i + 1]):
            f = indices[p]
            v = data[p]
            for c in range(L):
                out[i, c] += v * W[f, c]
    return out


def sgd_epoch_numpy(indptr, indices, data, n_features, y, order, batch_size, W, b, lrs):
    """One epoch of minibatch softmax-regression SGD, updating W and b in place.

    ``lrs`` holds one step size per minibatch. Returns the number of steps.
    """
    X = sparse.csr_matrix((data, indices, indptr), shape=(len(indptr) - 1, n_features))
    n = order.shape[0]
    step = 0
    for start in range(0, n, batch_size):
        rows = order[start:start + batch_size]
        m = rows.shape[0]
        Xb = X[rows]
        Z = np.asarray(Xb @ W) + b
        Z -= Z.max(axis=1, keepdims=True)
        P = np.exp(Z)
        P /= P.sum(axis=1, keepdims=True)
        P[np.arange(m), y[rows]] -= 1.0
        scale = lrs[step] / m
        coo = Xb.tocoo()
        np.add.at(W, coo.col, -scale * coo.data[:, None] * P[coo.row])
        b -= scale * P.sum(axis=0)
        step += 1
    return step


def _sgd_epoch_py(indptr, indices, data, n_features, y, order, batch_size, W, b, lrs):
    n = order.shape[0]
    L = W.shape[1]
    G = np.empty((batch_size, L), dtype=np.float64)
    z = np.empty(L, dtype=np.float64)
    step = 0
    for start in range(0, n, batch_size):
        stop = min(start + batch_size, n)
        m = stop - start
        for j in range(m):
            i = order[start + j]
            for c in range(L):
                z[c] = b[c]
            for p in range(indptr[i], indptr[i + 1]):
                f = indices[p]
                v = data[p]
                for c in range(L):
                    z[c] += v * W[f, c]
            zmax = z[0]
            for c in range(1, L):
                if z[c] > zmax:
                    zmax = z[c]
            s = 0.0
            for c in range(L):
                G[j, c] = np.exp(z[c] - zmax)
                s += G[j, c]
            for c in range(L):
                G[j, c] /= s
            G[j, y[i]] -= 1.0
        scale = lrs[step] / m
        # gradients are all computed from the pre-update weights
        for j in range(m):
            i = order[start + j]
            for p in range(indptr[i], indptr[i + 1]):
                f = indices[p]
                v = data[p]
                for c in range(L):
                    W[f, c] -= scale * v * G[j, c]
        for c in range(L):
            acc = 0.0
            for j in range(m):
                acc += G[j, c]
            b[c] -= scale * acc
        step += 1
    return step


if _HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    pair_counts_numba = _jit(_pair_counts_py)
    group_sums_numba = _jit(_group_sums_py)
    sparse_logits_numba = _jit(_sparse_logits_py)
    sgd_epoch_numba = _jit(_sgd_epoch_py)
else:  # pragma: no cover
    pair_counts_numba = group_sums_numba = sparse_logits_numba = sgd_epoch_numba = None


def pair_counts(rows, cols, n_rows: int, n_cols: int) -> np.ndarray:
    """Count (row, col) co-occurrences into an ``n_rows x n_cols`` int64 table."""
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    if rows.shape != cols.shape:
        raise ValueError("rows and cols must have equal length")
    if rows.size and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
        raise ValueError("index out of range")
    if USE_NUMBA:
        return pair_counts_numba(rows, cols, n_rows, n_cols)
    return pair_counts_numpy(rows, cols, n_rows, n_cols)


def group_sums(keys, values, n_groups: int):
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if USE_NUMBA:
        return group_sums_numba(keys, values, n_groups)
    return group_sums_numpy(keys, values, n_groups)


def sparse_logits(indptr, indices, data, n_features, W, b):
    if USE_NUMBA:
        return sparse_logits_numba(indptr, indices, data, n_features, W, b)
    return sparse_logits_numpy(indptr, indices, data, n_features, W, b)


def sgd_epoch(indptr, indices, data, n_features, y, order, batch_size, W, b, lrs):
    if USE_NUMBA:
        return sgd_epoch_numba(indptr, indices, data, n_features, y, order, batch_size, W, b, lrs)
    return sgd_epoch_numpy(indptr, indices, data, n_features, y, order, batch_size, W, b, lrs)
