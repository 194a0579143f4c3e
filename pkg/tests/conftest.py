"""Shared helpers: random operators/tensors and brute-force oracles."""

import itertools
import random

import numpy as np
import pytest

from limtdd import xp
from limtdd.dd import DDManager
from limtdd.dense import DenseTensor


def random_op(rng, N, n):
    return xp.xp_make(N, rng.randrange(2 * N) if N else 0,
                      [rng.randrange(2) for _ in range(n)],
                      [rng.randrange(N) if N else 0 for _ in range(n)])


def random_weight(rng, N, n, zero_ok=False):
    if zero_ok and rng.random() < 0.1:
        return xp.lim_zero(N, n)
    r = rng.uniform(0.1, 2.0)
    theta = rng.random()
    return xp.lim_make(r, theta, random_op(rng, N, n))


def manager_with(names, N=8, mode="limtdd", stab_mode="fast"):
    mgr = DDManager(precision=N, mode=mode, stab_mode=stab_mode)
    for name in names:
        mgr.order.register(name)
    return mgr


def all_xp_ops(N, n):
    """Every XP operator of precision N and rank n."""
    for p in range(2 * N):
        for xs in itertools.product((0, 1), repeat=n):
            for zs in itertools.product(range(N), repeat=n):
                yield xp.XPOperator(N, p, xs, zs)


def brute_stabilizers(vec, N):
    """All XP operators fixing a vector, as (p, x, z) triples."""
    n = int(np.log2(len(vec)))
    out = set()
    for op in all_xp_ops(N, n):
        if np.max(np.abs(xp.xp_to_dense(op) @ vec - vec)) < 1e-10:
            out.add((op.phase, op.x, op.z))
    return out


@pytest.fixture
def rng():
    return random.Random(20260810)
