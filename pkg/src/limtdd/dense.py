"""Brute-force dense tensor arithmetic; the ground truth for every diagram op.

Tensors are maps from binary index assignments to complex values, stored as
the 2^n vectorization under a fixed index order (first index is the most
significant bit).  Everything here is deliberately simple and independent
of the diagram code.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .xp import DENSE_RANK_CAP, EPS

RANK_CAP = DENSE_RANK_CAP


class DenseError(ValueError):
    pass


class DenseTensor:
    """Rank-n array of complex values over named binary indices."""

    __slots__ = ("indices", "data")

    def __init__(self, indices, data):
        indices = tuple(indices)
        if len(set(indices)) != len(indices):
            raise DenseError(f"duplicate index names in {indices}")
        if len(indices) > RANK_CAP:
            raise DenseError(f"rank {len(indices)} exceeds oracle cap {RANK_CAP}")
        data = np.asarray(data, dtype=complex).reshape(-1)
        if data.size != 2 ** len(indices):
            raise DenseError(f"need {2 ** len(indices)} values, got {data.size}")
        self.indices = indices
        self.data = data

    @property
    def rank(self):
        return len(self.indices)

    def array(self):
        """The data as an ndarray of shape (2,)*rank, axis 0 = first index."""
        return self.data.reshape((2,) * self.rank)

    def value(self, assignment):
        """Value at a {name: bit} assignment covering all indices."""
        i = 0
        for name in self.indices:
            i = (i << 1) | (assignment[name] & 1)
        return complex(self.data[i])

    def __str__(self):
        return f"DenseTensor({self.indices}, {np.round(self.data, 6)})"


def _merge_indices(a, b):
    """Union of two index tuples, preserving their common relative order."""
    out = []
    i = j = 0
    in_a = set(a)
    in_b = set(b)
    while i < len(a) or j < len(b):
        if i < len(a) and a[i] not in in_b:
            out.append(a[i])
            i += 1
        elif i < len(a) and j < len(b) and a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
        elif j < len(b) and b[j] not in in_a:
            out.append(b[j])
            j += 1
        else:
            raise DenseError(f"inconsistent index orders: {a} vs {b}")
    return tuple(out)


def _broadcast_to(t, indices):
    """Array of t broadcast over a superset index tuple (absent = replicated)."""
    order = tuple(n for n in indices if n in t.indices)
    if set(order) != set(t.indices):
        raise DenseError(f"{indices} does not cover {t.indices}")
    arr = t.array()
    if order != t.indices:
        arr = np.transpose(arr, [t.indices.index(n) for n in order])
    for k, name in enumerate(indices):
        if name not in t.indices:
            arr = np.expand_dims(arr, axis=k)
    return np.broadcast_to(arr, (2,) * len(indices))


def dense_transpose(t, indices):
    """Reorder t's axes to the given permutation of its index names."""
    indices = tuple(indices)
    if set(indices) != set(t.indices):
        raise DenseError("transpose needs a permutation of the index names")
    perm = [t.indices.index(n) for n in indices]
    return DenseTensor(indices, np.transpose(t.array(), perm).reshape(-1))


def dense_slice(t, x, c):
    """Fix index x to bit c; if x is absent, return t unchanged."""
    if x not in t.indices:
        return t
    ax = t.indices.index(x)
    arr = np.take(t.array(), c & 1, axis=ax)
    rest = t.indices[:ax] + t.indices[ax + 1:]
    return DenseTensor(rest, arr.reshape(-1))


def dense_contract(a, b, var):
    """Sum over `var` of the pointwise product; open shared indices match up."""
    var = set(var)
    shared = set(a.indices) & set(b.indices)
    if not var <= shared:
        raise DenseError(f"contracted indices {var} not shared by both tensors")
    union = _merge_indices(a.indices, b.indices)
    prod = _broadcast_to(a, union) * _broadcast_to(b, union)
    axes = tuple(k for k, name in enumerate(union) if name in var)
    out = prod.sum(axis=axes) if axes else prod
    rest = tuple(name for name in union if name not in var)
    return DenseTensor(rest, np.asarray(out).reshape(-1))


def dense_add(a, b):
    """Elementwise sum over the index union (absent indices broadcast)."""
    union = _merge_indices(a.indices, b.indices)
    out = _broadcast_to(a, union) + _broadcast_to(b, union)
    return DenseTensor(union, out.reshape(-1))


def dense_apply_lim(w, t):
    """Apply a LimWeight (rank == t.rank, factor i on t.indices[i]) to t."""
    if w.rank != t.rank:
        raise DenseError(f"weight rank {w.rank} != tensor rank {t.rank}")
    if w.is_zero():
        return DenseTensor(t.indices, np.zeros(t.data.size, dtype=complex))
    arr = t.array().copy()
    N = w.precision
    for i in range(w.rank):
        zi = w.op.z[i]
        if zi:
            omega2z = cmath.exp(1j * math.pi * 2 * zi / N)
            sl = [slice(None)] * w.rank
            sl[i] = 1
            arr[tuple(sl)] *= omega2z
        if w.op.x[i]:
            arr = np.flip(arr, axis=i)
    c = w.magnitude * cmath.exp(2j * math.pi * w.angle)
    if N and w.op.phase:
        c *= cmath.exp(1j * math.pi * w.op.phase / N)
    return DenseTensor(t.indices, (c * arr).reshape(-1))


def random_tensor(indices, seed):
    """Seeded tensor with uniform complex entries in the unit square."""
    rng = np.random.default_rng(seed)
    n = len(tuple(indices))
    data = rng.random(2 ** n) + 1j * rng.random(2 ** n)
    return DenseTensor(indices, data)


def dense_equal(a, b, tol=EPS):
    """Max-abs comparison over the broadcast index union."""
    union = _merge_indices(a.indices, b.indices)
    diff = _broadcast_to(a, union) - _broadcast_to(b, union)
    return float(np.max(np.abs(diff))) <= tol if diff.size else True


def max_abs_diff(a, b):
    union = _merge_indices(a.indices, b.indices)
    diff = _broadcast_to(a, union) - _broadcast_to(b, union)
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def to_json_dict(t):
    """{"indices": [...], "data": [[re, im], ...]} in vectorization order."""
    return {
        "indices": list(t.indices),
        "data": [[float(v.real), float(v.imag)] for v in t.data],
    }


def from_json_dict(d):
    data = [complex(re, im) for re, im in d["data"]]
    return DenseTensor(tuple(d["indices"]), data)
