"""Node stabilizer groups and stabilizer-aware weight minimization.

The stabilizer group of a node is the set of XP operators fixing its
vectorized tensor.  Groups are kept as capped explicit element sets built
by a bottom-up recursion over the node structure; overflowing the cap
degrades that node to the trivial group, which is always sound (it only
costs some merging).  Fast mode skips all of this and treats every group
as trivial, matching the default weight minimization.
"""

from __future__ import annotations

import math
from itertools import product

from . import xp
from ._lims import Lim, lim, lim_compare, lim_inverse, lim_mul, lim_unit
from .xp import EPS, XPOperator


class StabGroup:
    """A capped explicit stabilizer set over an ordered index tuple.

    Elements are (p, x, z) component triples aligned with `indices`.
    """

    __slots__ = ("precision", "indices", "elements", "degraded", "_buckets")

    def __init__(self, precision, indices, elements, degraded=False):
        self.precision = precision
        self.indices = tuple(indices)
        self.elements = frozenset(elements)
        self.degraded = degraded
        self._buckets = None

    def __len__(self):
        return len(self.elements)

    def is_trivial(self):
        return len(self.elements) <= 1

    def buckets(self):
        """(x, z) -> sorted phases; for w^{2z}-shifted membership tests."""
        if self._buckets is None:
            b = {}
            for p, x, z in self.elements:
                b.setdefault((x, z), []).append(p)
            self._buckets = {k: tuple(sorted(v)) for k, v in b.items()}
        return self._buckets

    def operators(self):
        """Elements as positional XPOperator values, deterministically sorted."""
        return [XPOperator(self.precision, p, x, z)
                for p, x, z in sorted(self.elements)]

    def generators(self):
        """A small generating subset, found greedily."""
        gens = []
        have = {_identity_parts(len(self.indices))}
        for el in sorted(self.elements):
            if el in have:
                continue
            gens.append(el)
            have = close_parts(have | {el}, self.precision)
        return [XPOperator(self.precision, p, x, z) for p, x, z in gens]

    def dump(self):
        return "\n".join(str(op) for op in self.operators())


def _identity_parts(n):
    return (0, (0,) * n, (0,) * n)


def _trivial(N, indices, degraded=False):
    return StabGroup(N, indices, {_identity_parts(len(indices))}, degraded)


def close_parts(elements, N, cap=8192):
    """Closure of a set of (p, x, z) triples under multiplication."""
    els = set(elements)
    frontier = list(els)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(els):
                for c in (xp.mul_parts(N, *a, *b), xp.mul_parts(N, *b, *a)):
                    if c not in els:
                        els.add(c)
                        nxt.append(c)
                        if len(els) > cap:
                            raise OverflowError("group closure exceeded cap")
        frontier = nxt
    return els


def _pad(group, indices, cap):
    """Extend a group to a superset index tuple.

    A broadcast dimension is fixed by exactly I and X, so each missing
    index doubles the element set.
    """
    indices = tuple(indices)
    if group.indices == indices:
        return group
    old_pos = {idx: k for k, idx in enumerate(group.indices)}
    extra = [k for k, idx in enumerate(indices) if idx not in old_pos]
    if len(group.elements) << len(extra) > cap:
        return _trivial(group.precision, indices, degraded=True)
    out = set()
    for p, x, z in group.elements:
        base_x = []
        base_z = []
        for idx in indices:
            k = old_pos.get(idx)
            base_x.append(0 if k is None else x[k])
            base_z.append(0 if k is None else z[k])
        for bits in product((0, 1), repeat=len(extra)):
            xs = list(base_x)
            for b, k in zip(bits, extra):
                xs[k] = b
            out.add((p, tuple(xs), tuple(base_z)))
    return StabGroup(group.precision, indices, out, group.degraded)


def _lim_parts(w, indices):
    """Aligned (p, x, z) of a weight's operator part."""
    pos = {idx: k for k, idx in enumerate(indices)}
    xs = [0] * len(indices)
    zs = [0] * len(indices)
    for i, xb, z in w.factors:
        xs[pos[i]] = xb
        zs[pos[i]] = z
    return w.p, tuple(xs), tuple(zs)


def _parts_to_lim(parts, indices, N):
    p, xs, zs = parts
    factors = tuple((idx, xs[k], zs[k]) for k, idx in enumerate(indices)
                    if xs[k] or zs[k])
    return Lim(1.0, 0.0, p, factors, N)


def _scalar_ratio_power(num, den, N):
    """Fold scalar(num)/scalar(den) into an exact w^K, or None.

    scalar() here excludes the operator phase; the ratio is a pure power
    of w exactly when the magnitudes match and the residual angle folds
    away.
    """
    probe = lim(num.r / den.r, num.theta - den.theta, 0, (), N)
    if abs(probe.r - 1.0) <= EPS and probe.theta <= EPS:
        return probe.p
    return None


def stab_rank1(w_low, w_high):
    """Stabilizers of the rank-1 tensor [w_low * 1, w_high * 1].

    Solves w^p X^b P^z [a, b] = [a, b] directly; covers the zero-entry
    base cases and entries equal up to an exact 2N-th root of unity.
    """
    import cmath
    import math
    N = w_high.precision if w_low.is_zero() else w_low.precision
    if N == 0:
        return _trivial(0, (0,))
    a = w_low.scalar() if hasattr(w_low, "scalar") else w_low.scalar_value()
    b = w_high.scalar() if hasattr(w_high, "scalar") else w_high.scalar_value()
    els = {_identity_parts(1)}
    if abs(a) <= EPS and abs(b) <= EPS:
        return StabGroup(N, (0,), els)
    if abs(b) <= EPS:
        for z in range(N):
            els.add((0, (0,), (z,)))
    elif abs(a) <= EPS:
        for z in range(N):
            els.add(((-2 * z) % (2 * N), (0,), (z,)))
    else:
        c = b / a
        if abs(abs(c) - 1.0) <= EPS:
            q = round(cmath.phase(c) / (math.pi / N)) % (2 * N)
            if abs(c - cmath.exp(1j * math.pi * q / N)) <= 10 * EPS:
                els.add((q, (1,), ((-q) % N,)))
    return StabGroup(N, (0,), close_parts(els, N))


def stab_node(mgr, v):
    """The (capped) stabilizer group of a node's tensor, memoized per node."""
    N = mgr.N
    if v.is_terminal():
        return StabGroup(N, (), {(0, (), ())})
    if N == 0:
        return _trivial(0, mgr.full_indices(v))
    hit = mgr._stab_memo.get(v.id)
    if hit is None:
        hit = _stab_node_raw(mgr, v)
        mgr._stab_memo[v.id] = hit
    return hit


def _stab_node_raw(mgr, v):
    N = mgr.N
    cap = mgr.stab_cap
    two_n = 2 * N
    sub = v.sub
    full = (v.index,) + sub
    w_l, w_h = v.low_w, v.high_w
    els = set()

    def emit(topx, topz, parts):
        p, xs, zs = parts
        els.add((p, (topx,) + xs, (topz,) + zs))
        return len(els) <= cap

    if w_l.is_zero():
        # tensor [0, B] with B = w_h * child: P^zh (x) w^{-2 zh} h e h^dag
        e1 = _pad(stab_node(mgr, v.high_t), sub, cap)
        if e1.degraded:
            return _trivial(N, full, degraded=True)
        h = _lim_parts(w_h, sub)
        hinv = xp.inv_parts(N, *h)
        for e in e1.elements:
            conj = xp.mul_parts(N, *xp.mul_parts(N, *h, *e), *hinv)
            for zh in range(N):
                if not emit(0, zh, ((conj[0] - 2 * zh) % two_n, conj[1], conj[2])):
                    return _trivial(N, full, degraded=True)
        return StabGroup(N, full, els)

    if w_h.is_zero():
        # tensor [A, 0]: any top phase, g fixing A
        e0 = _pad(stab_node(mgr, v.low_t), sub, cap)
        if e0.degraded:
            return _trivial(N, full, degraded=True)
        wl = _lim_parts(w_l, sub)
        wlinv = xp.inv_parts(N, *wl)
        for e in e0.elements:
            g = xp.mul_parts(N, *xp.mul_parts(N, *wl, *e), *wlinv)
            for zh in range(N):
                if not emit(0, zh, g):
                    return _trivial(N, full, degraded=True)
        return StabGroup(N, full, els)

    e0 = _pad(stab_node(mgr, v.low_t), sub, cap)
    e1 = _pad(stab_node(mgr, v.high_t), sub, cap)
    if e0.degraded or e1.degraded:
        return _trivial(N, full, degraded=True)
    h = _lim_parts(w_h, sub)
    hinv = xp.inv_parts(N, *h)
    wl = _lim_parts(w_l, sub)
    wlinv = xp.inv_parts(N, *wl)
    b1 = e1.buckets()
    # diagonal: g fixes the low branch and w^{2 zh} h^dag g h fixes the high
    for e in e0.elements:
        g = xp.mul_parts(N, *xp.mul_parts(N, *wl, *e), *wlinv)
        q = xp.mul_parts(N, *xp.mul_parts(N, *hinv, *g), *h)
        for pe in b1.get((q[1], q[2]), ()):
            diff = (pe - q[0]) % two_n
            if diff % 2 == 0:
                if not emit(0, diff // 2, g):
                    return _trivial(N, full, degraded=True)
    # antidiagonal: needs identical successors and a root-of-unity scalar ratio
    if v.low_t is v.high_t:
        K = _scalar_ratio_power(w_h, w_l, N)
        if K is not None:
            b0 = e0.buckets()
            for e in e0.elements:
                g = xp.mul_parts(N, *xp.mul_parts(N, *h, *e), *wlinv)
                g = ((g[0] + K) % two_n, g[1], g[2])
                q2 = xp.mul_parts(N, *xp.mul_parts(N, *wlinv, *g), *h)
                q2p = (q2[0] + K) % two_n
                for pe in b0.get((q2[1], q2[2]), ()):
                    diff = (pe - q2p) % two_n
                    if diff % 2 == 0:
                        if not emit(1, diff // 2, g):
                            return _trivial(N, full, degraded=True)
    return StabGroup(N, full, els)


def _lite_lims(mgr, v):
    """Structural stabilizers available without any group computation.

    A node whose two edges coincide is fixed by X on its own index
    (swapping identical children); that single rewrite is what fast-mode
    minimization gets to use.
    """
    unit = lim_unit(mgr.N)
    out = [unit]
    if (not v.is_terminal() and v.low_t is v.high_t
            and v.low_w.key() == v.high_w.key()):
        out.append(Lim(1.0, 0.0, 0, ((v.index, 1, 0),), mgr.N))
    return out


def min_weight(mgr, w0, v0, w1, v1, allow_swap):
    """Minimize g0^dag w0^dag w1 g1 over the stabilizer groups.

    Returns (w_min, g0, g1, swapped); with allow_swap the reversed product
    g1^dag w1^dag w0 g0 competes and wins only when strictly smaller.
    Fast mode sees only the structural child-swap stabilizers; full mode
    enumerates the capped groups.
    """
    N = mgr.N
    unit = lim_unit(N)
    m01 = lim_mul(lim_inverse(w0), w1)
    full = mgr.stab_mode == "full" and N > 0
    if full:
        indices = tuple(sorted(
            set(mgr.full_indices(v0)) | set(mgr.full_indices(v1))
            | set(w0.support()) | set(w1.support()),
            key=lambda i: i.key))
        e0 = _pad(stab_node(mgr, v0), indices, mgr.stab_cap)
        e1 = _pad(stab_node(mgr, v1), indices, mgr.stab_cap)
        full = not (e0.is_trivial() and e1.is_trivial())
    m10 = lim_mul(lim_inverse(w1), w0) if allow_swap else None
    if not full:
        lims0 = _lite_lims(mgr, v0) if N else [unit]
        lims1 = _lite_lims(mgr, v1) if N else [unit]
        if len(lims0) == 1 and len(lims1) == 1:
            if m10 is not None and lim_compare(m10, m01) < 0:
                return m10, unit, unit, True
            return m01, unit, unit, False
    else:
        els0 = sorted(e0.elements)
        els1 = sorted(e1.elements)
        lims0 = [_parts_to_lim(parts, indices, N) for parts in els0]
        lims1 = [_parts_to_lim(parts, indices, N) for parts in els1]
    best = None
    achievers0 = []
    for g0 in lims0:
        left = lim_mul(lim_inverse(g0), m01)
        for g1 in lims1:
            cand = lim_mul(left, g1)
            c = -1 if best is None else lim_compare(cand, best)
            if c < 0:
                best = cand
                achievers0 = [g0]
            elif c == 0:
                achievers0.append(g0)
    # the incoming weight w0*g0 must not depend on which achiever the scan
    # found first, so canonicalize the choice by the weight it produces
    best_g0 = unit
    best_inc = None
    for g0 in achievers0:
        inc = lim_mul(w0, g0)
        if best_inc is None or lim_compare(inc, best_inc) < 0:
            best_inc = inc
            best_g0 = g0
    if allow_swap:
        best2 = None
        achievers1 = []
        for g1 in lims1:
            left = lim_mul(lim_inverse(g1), m10)
            for g0 in lims0:
                cand = lim_mul(left, g0)
                c = -1 if best2 is None else lim_compare(cand, best2)
                if c < 0:
                    best2 = cand
                    achievers1 = [g1]
                elif c == 0:
                    achievers1.append(g1)
        if lim_compare(best2, best) < 0:
            best_g1 = unit
            best_inc = None
            for g1 in achievers1:
                inc = lim_mul(w1, g1)
                if best_inc is None or lim_compare(inc, best_inc) < 0:
                    best_inc = inc
                    best_g1 = g1
            return best2, unit, best_g1, True
    return best, best_g0, unit, False
