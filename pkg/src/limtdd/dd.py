"""Hash-consed tensor decision diagrams with XP edge maps.

A diagram is an incoming weighted edge into a DAG of binary nodes; edge
weights are LIMs stored sparsely as a canonical scalar plus per-index XP
factors.  Nodes are interned in a unique table, so structural equality is
reference identity within one manager.  Normalization follows three
principles: the low-edge weight is the unit (unless zero), children are
ordered by creation id, and the high weight is minimized over the node
stabilizer groups (fast mode treats those groups as trivial).

Precision 0 recovers the classic scalar-weighted diagram: no X swaps and
no phase extraction, just division by the first nonzero child weight.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import stab as _stab
from ._lims import (DDError, Idx, IndexOrder, Lim, lim, lim_complex,
                    lim_compare, lim_inverse, lim_mul, lim_phase,
                    lim_transpose, lim_unit, lim_with_factor, lim_without,
                    lim_zero)
from .dense import DenseTensor, _broadcast_to, _merge_indices, dense_apply_lim, dense_slice

_ALLOWED_PRECISIONS = frozenset([0] + [2 ** k for k in range(21)])


class Node:
    """Hash-consed diagram node; immutable after construction."""

    __slots__ = ("id", "index", "low_w", "low_t", "high_w", "high_t",
                 "sub", "subset")

    def __init__(self, nid, index, low_w, low_t, high_w, high_t, sub, subset):
        self.id = nid
        self.index = index
        self.low_w = low_w
        self.low_t = low_t
        self.high_w = high_w
        self.high_t = high_t
        self.sub = sub          # sorted Idx tuple strictly below `index`
        self.subset = subset    # frozenset of the same

    def is_terminal(self):
        return self.index is None

    def __repr__(self):
        return "Node<1>" if self.index is None else f"Node<{self.id}:{self.index.name}>"


class Edge:
    """A weighted reference to a node."""

    __slots__ = ("weight", "target")

    def __init__(self, weight, target):
        self.weight = weight
        self.target = target


class LimTDDHandle:
    """A diagram: incoming weight applied to a root node, plus its manager."""

    __slots__ = ("w", "node", "mgr")

    def __init__(self, w, node, mgr):
        self.w = w
        self.node = node
        self.mgr = mgr

    @property
    def incoming(self):
        return Edge(self.w, self.node)

    def is_zero(self):
        return self.w.is_zero()

    def size(self):
        return self.mgr.size(self)

    def indices(self):
        """Names of all indices the represented tensor may depend on."""
        return tuple(i.name for i in sorted(self.mgr._sem_indices(self),
                                            key=lambda i: i.key))

    def __repr__(self):
        return f"LimTDD({self.w!r} -> {self.node!r})"


class DDManager:
    """Owns the unique table, computed tables, index order, and statistics."""

    def __init__(self, precision=8, mode="limtdd", stab_mode="fast",
                 stab_cap=512):
        if mode not in ("tdd", "limtdd"):
            raise DDError(f"unknown mode {mode!r}")
        if stab_mode not in ("fast", "full"):
            raise DDError(f"unknown stab mode {stab_mode!r}")
        N = 0 if mode == "tdd" else int(precision)
        if N not in _ALLOWED_PRECISIONS:
            raise DDError(f"precision must be 0 or a power of 2 <= 2**20, got {N}")
        if mode == "limtdd" and N == 0:
            raise DDError("limtdd mode needs precision >= 1")
        self.N = N
        self.mode = mode
        self.stab_mode = stab_mode
        self.stab_cap = stab_cap
        self.order = IndexOrder()
        self.terminal = Node(0, None, None, None, None, None, (), frozenset())
        self._unique = {}
        self._computed = {}
        self._next_id = 1
        self._sub_intern = {(): ((), frozenset())}
        self._stab_memo = {}
        self._gen_memo = {}
        self._expand_memo = {}
        self.peak_nodes = 1
        self.checkpoints = []

    # -- small helpers ------------------------------------------------------

    def _idx(self, name):
        return name if isinstance(name, Idx) else self.order.get(name)

    def unit(self):
        return lim_unit(self.N)

    def zero(self):
        return lim_zero(self.N)

    def scalar_diagram(self, c):
        return LimTDDHandle(lim_complex(c, self.N), self.terminal, self)

    def zero_diagram(self):
        return LimTDDHandle(lim_zero(self.N), self.terminal, self)

    def node_count(self):
        return self._next_id

    def full_indices(self, node):
        """All indices a node's tensor may depend on, sorted."""
        return () if node.is_terminal() else (node.index,) + node.sub

    def _sem_indices(self, f):
        s = set(f.w.support())
        if not f.node.is_terminal():
            s.add(f.node.index)
            s.update(f.node.subset)
        return s

    # -- construction -------------------------------------------------------

    def make_dd(self, w, x, w0, v0, w1, v1):
        """Cons a node (x, w0 -> v0, w1 -> v1) under incoming weight w.

        Applies the zero rules and redundant-node elimination, then goes
        through the unique table.
        """
        xi = self._idx(x)
        if (w0.is_zero() and w1.is_zero()) or w.is_zero():
            return self.zero_diagram()
        if w0.is_zero():
            w0, v0 = self.zero(), self.terminal
        if w1.is_zero():
            w1, v1 = self.zero(), self.terminal
        for child in (v0, v1):
            if not child.is_terminal() and not xi.key < child.index.key:
                raise DDError(
                    f"index {xi.name} does not precede {child.index.name}")
        for lw in (w0, w1):
            for i, _, _ in lw.factors:
                if not xi.key < i.key:
                    raise DDError(
                        f"index {xi.name} does not precede factor on {i.name}")
        # stored edge weights act only inside the target's index set; a
        # factor on a skipped index forces the broadcast chain back in
        v0 = self._cover_factors(w0, v0)
        v1 = self._cover_factors(w1, v1)
        key = (xi, w0.key(), v0.id, w1.key(), v1.id)
        node = self._unique.get(key)
        if node is None:
            names = set()
            for child in (v0, v1):
                if not child.is_terminal():
                    names.add(child.index)
                    names.update(child.subset)
            for lw in (w0, w1):
                names.update(lw.support())
            sub = tuple(sorted(names, key=lambda i: i.key))
            cached = self._sub_intern.get(sub)
            if cached is None:
                cached = (sub, frozenset(sub))
                self._sub_intern[sub] = cached
            node = Node(self._next_id, xi, w0, v0, w1, v1, cached[0], cached[1])
            self._next_id += 1
            self._unique[key] = node
        return LimTDDHandle(w, node, self)

    def _cons_raw(self, x, w0, v0, w1, v1):
        """Unique-table consing with no reduction rules; returns the node."""
        key = (x, w0.key(), v0.id, w1.key(), v1.id)
        node = self._unique.get(key)
        if node is None:
            names = set()
            for child in (v0, v1):
                if not child.is_terminal():
                    names.add(child.index)
                    names.update(child.subset)
            for lw in (w0, w1):
                names.update(lw.support())
            sub = tuple(sorted(names, key=lambda i: i.key))
            cached = self._sub_intern.get(sub)
            if cached is None:
                cached = (sub, frozenset(sub))
                self._sub_intern[sub] = cached
            node = Node(self._next_id, x, w0, v0, w1, v1, cached[0], cached[1])
            self._next_id += 1
            self._unique[key] = node
        return node

    def _cover_factors(self, w, v):
        if not w.factors:
            return v
        have = v.subset if not v.is_terminal() else frozenset()
        extra = [i for i, _, _ in w.factors
                 if i not in have and (v.is_terminal() or i is not v.index)]
        if not extra:
            return v
        return self._expand_node(v, tuple(sorted(extra, key=lambda i: i.key)))

    def _expand_node(self, v, dims):
        """The node for Phi(v) broadcast over extra dims, made structural.

        Inserts unit-weight nodes with identical children for every missing
        index; the skipped-index convention keeps the semantics unchanged.
        """
        if not dims:
            return v
        key = (v.id, dims)
        hit = self._expand_memo.get(key)
        if hit is not None:
            return hit
        top = dims[0]
        if v.is_terminal() or top.key < v.index.key:
            core = self._expand_node(v, dims[1:])
            node = self._cons_raw(top, self.unit(), core, self.unit(), core)
        else:
            low = self._expand_node(v.low_t, dims)
            high = self._expand_node(v.high_t, dims)
            node = self._cons_raw(v.index, v.low_w, low, v.high_w, high)
        self._expand_memo[key] = node
        return node

    def _merge_expanded(self, v0, v1):
        """Re-expand skipped indices so isomorphic children share a node.

        Returns (v0, v1) with the two equal when one side's tensor is the
        other's (or a common) broadcast; otherwise unchanged, so diagram
        sizes never regress.
        """
        s0 = v0.subset | {v0.index} if not v0.is_terminal() else frozenset()
        s1 = v1.subset | {v1.index} if not v1.is_terminal() else frozenset()
        if s0 == s1:
            return v0, v1
        if s0 <= s1:
            cand = self._expand_node(v0, tuple(sorted(s1 - s0,
                                                      key=lambda i: i.key)))
            if cand is v1:
                return v1, v1
        elif s1 <= s0:
            cand = self._expand_node(v1, tuple(sorted(s0 - s1,
                                                      key=lambda i: i.key)))
            if cand is v0:
                return v0, v0
        else:
            c0 = self._expand_node(v0, tuple(sorted(s1 - s0,
                                                    key=lambda i: i.key)))
            c1 = self._expand_node(v1, tuple(sorted(s0 - s1,
                                                    key=lambda i: i.key)))
            if c0 is c1:
                return c0, c0
        return v0, v1

    def loc_norm(self, x, f0, f1):
        """Build the normalized diagram for xbar*F0 + x*F1."""
        xi = self._idx(x)
        w0, v0 = f0.w, f0.node
        w1, v1 = f1.w, f1.node
        if w0.is_zero() and w1.is_zero():
            return self.make_dd(self.unit(), xi, w0, v0, w1, v1)
        if self.N == 0:
            if w0.is_zero():
                return self.make_dd(w1, xi, self.zero(), self.terminal,
                                    self.unit(), v1)
            if w1.is_zero():
                return self.make_dd(w0, xi, self.unit(), v0,
                                    self.zero(), self.terminal)
            wh = lim_mul(lim_inverse(w0), w1)
            return self.make_dd(w0, xi, self.unit(), v0, wh, v1)
        if w0.is_zero() or w1.is_zero():
            # nonzero child always becomes the high child; a top X factor
            # records whether it was originally the low child
            was_low = w1.is_zero()
            fn = f0 if was_low else f1
            inc = lim_with_factor(fn.w, xi, 1, 0) if was_low else fn.w
            return self.make_dd(inc, xi, self.zero(), self.terminal,
                                self.unit(), fn.node)
        if v0 is not v1:
            v0, v1 = self._merge_expanded(v0, v1)
        outer = 0
        if v0.id > v1.id:
            w0, w1 = w1, w0
            v0, v1 = v1, v0
            outer = 1
        w_min, g0s, g1s, swapped = _stab.min_weight(
            self, w0, v0, w1, v1, allow_swap=v0 is v1)
        base = lim_mul(w1, g1s) if swapped else lim_mul(w0, g0s)
        b = 1 if swapped else 0
        k = w_min.p // 2
        resid = lim(w_min.r, w_min.theta, w_min.p - 2 * k, w_min.factors, self.N)
        inc = lim_with_factor(base, xi, (b + outer) & 1, k)
        return self.make_dd(inc, xi, self.unit(), v0, resid, v1)

    def generate(self, t):
        """The normalized diagram of a dense tensor (indices pre-registered)."""
        idxs = tuple(self._idx(name) for name in t.indices)
        for a, b in zip(idxs, idxs[1:]):
            if not a.key < b.key:
                raise DDError(f"tensor indices not in manager order: {t.indices}")
        return self._generate(t)

    def _generate(self, t):
        if t.rank == 0:
            return self.scalar_diagram(t.data[0])
        x = t.indices[0]
        r0 = self._generate(dense_slice(t, x, 0))
        r1 = self._generate(dense_slice(t, x, 1))
        return self.loc_norm(x, r0, r1)

    # -- slicing ------------------------------------------------------------

    def _slice_root(self, f, c):
        v = f.node
        xi = v.index
        fac = f.w.factor(xi)
        b, z = fac if fac is not None else (0, 0)
        t = c ^ b
        w_rest = lim_without(f.w, xi)
        if z and t:
            w_rest = lim_phase(w_rest, 2 * z)
        ew, child = (v.low_w, v.low_t) if t == 0 else (v.high_w, v.high_t)
        if ew.is_zero():
            return self.zero_diagram()
        return LimTDDHandle(lim_mul(w_rest, ew), child, self)

    def slicing(self, f, x, c):
        """The diagram of the tensor with index x fixed to bit c."""
        xi = self._idx(x)
        if f.w.is_zero():
            return f
        v = f.node
        if not v.is_terminal():
            if xi is v.index:
                return self._slice_root(f, c)
            if xi in v.subset:
                r0 = self.slicing(self._slice_root(f, 0), xi, c)
                r1 = self.slicing(self._slice_root(f, 1), xi, c)
                return self.loc_norm(v.index, r0, r1)
        fac = f.w.factor(xi)
        if fac is not None:
            b, z = fac
            t = c ^ b
            w2 = lim_without(f.w, xi)
            if z and t:
                w2 = lim_phase(w2, 2 * z)
            return LimTDDHandle(w2, v, self)
        return f

    # -- addition -----------------------------------------------------------

    def add(self, f, g):
        """The diagram of the tensor sum (absent indices broadcast)."""
        if f.w.is_zero():
            return g
        if g.w.is_zero():
            return f
        if f.node is g.node and f.w.op_key() == g.w.op_key():
            c = (f.w.r * cmath.exp(2j * math.pi * f.w.theta)
                 + g.w.r * cmath.exp(2j * math.pi * g.w.theta))
            r, phi = cmath.polar(c)
            w = lim(r, phi / (2 * math.pi), f.w.p, f.w.factors, self.N)
            if w.is_zero():
                return self.zero_diagram()
            return LimTDDHandle(w, f.node, self)
        if (g.node.id, g.w.sort_key()) < (f.node.id, f.w.sort_key()):
            f, g = g, f
        temp = g.w
        lw = lim_mul(lim_inverse(g.w), f.w)
        key = ("+", f.node.id, lw.key(), g.node.id)
        hit = self._computed.get(key)
        if hit is None:
            l2 = LimTDDHandle(lw, f.node, self)
            h2 = LimTDDHandle(self.unit(), g.node, self)
            x = self._top_index(l2, h2)
            if x is None:
                res = self.scalar_diagram(lw.scalar_value() + 1.0)
            else:
                r0 = self.add(self.slicing(l2, x, 0), self.slicing(h2, x, 0))
                r1 = self.add(self.slicing(l2, x, 1), self.slicing(h2, x, 1))
                res = self.loc_norm(x, r0, r1)
            hit = (res.w, res.node)
            self._computed[key] = hit
        return LimTDDHandle(lim_mul(temp, hit[0]), hit[1], self)

    def _top_index(self, *handles):
        best = None
        for h in handles:
            if not h.node.is_terminal():
                c = h.node.index
                if best is None or c.key < best.key:
                    best = c
            if h.w.factors:
                c = h.w.factors[0][0]
                if best is None or c.key < best.key:
                    best = c
        return best

    # -- contraction --------------------------------------------------------

    def contract(self, f, g, var):
        """Contract two diagrams over the named index set var.

        Indices the structures do not mention follow the broadcast
        convention: contracting over them contributes a factor of 2 each,
        matching the trivial-diagram closed form.
        """
        vset = frozenset(self._idx(v) for v in var)
        return self._cont(f, g, vset)

    @staticmethod
    def _touches(h, idx):
        if not h.node.is_terminal():
            if idx is h.node.index or idx in h.node.subset:
                return True
        return h.w.factor(idx) is not None

    def _cont(self, f, g, var):
        if f.w.is_zero() or g.w.is_zero():
            return self.zero_diagram()
        # factors on indices only one operand touches commute out of the
        # contraction; factors on contracted indices transfer between the
        # operands by the transpose rule; factors on shared open indices
        # must stay in place and ride through the recursion
        t0 = []
        rf = []
        for fac in f.w.factors:
            if fac[0] in var or self._touches(g, fac[0]):
                rf.append(fac)
            else:
                t0.append(fac)
        t1 = []
        rg_var = []
        rg_keep = []
        for fac in g.w.factors:
            if fac[0] in var:
                rg_var.append(fac)
            elif self._touches(f, fac[0]):
                rg_keep.append(fac)
            else:
                t1.append(fac)
        N = self.N
        temp0 = Lim(f.w.r, f.w.theta, f.w.p, tuple(t0), N)
        temp1 = Lim(g.w.r, g.w.theta, g.w.p, tuple(t1), N)
        wf = lim_mul(lim_transpose(Lim(1.0, 0.0, 0, tuple(rg_var), N)),
                     Lim(1.0, 0.0, 0, tuple(rf), N))
        wg = Lim(1.0, 0.0, 0, tuple(rg_keep), N)
        outer = lim_mul(temp0, temp1)
        if (f.node.is_terminal() and g.node.is_terminal() and not wg.factors
                and all(fac[0] in var for fac in wf.factors)):
            # summing X^b P^z [1,1] over one index gives 1 + w^{2z} for any b
            val = wf.scalar_value()
            for _, _, z in wf.factors:
                val *= 1.0 + cmath.exp(1j * math.pi * 2 * z / N)
            val *= 2 ** (len(var) - len(wf.factors))
            res = self.scalar_diagram(val)
            return LimTDDHandle(lim_mul(outer, res.w), res.node, self)
        key = ("*", f.node.id, wf.key(), g.node.id, wg.key(), var)
        hit = self._computed.get(key)
        if hit is None:
            f2 = LimTDDHandle(wf, f.node, self)
            g2 = LimTDDHandle(wg, g.node, self)
            x = self._top_index(f2, g2)
            if x in var:
                r0 = self._cont(self.slicing(f2, x, 0),
                                self.slicing(g2, x, 0), var - {x})
                r1 = self._cont(self.slicing(f2, x, 1),
                                self.slicing(g2, x, 1), var - {x})
                res = self.add(r0, r1)
            else:
                r0 = self._cont(self.slicing(f2, x, 0),
                                self.slicing(g2, x, 0), var)
                r1 = self._cont(self.slicing(f2, x, 1),
                                self.slicing(g2, x, 1), var)
                res = self.loc_norm(x, r0, r1)
            hit = (res.w, res.node)
            self._computed[key] = hit
        return LimTDDHandle(lim_mul(outer, hit[0]), hit[1], self)

    def renormalize(self, f):
        """Rebuild a diagram bottom-up through loc_norm.

        Operation results are sound but can carry representation noise
        (conjugated residuals from the add/contract weight transfers);
        rebuilding restores the same form generate would produce.
        """
        if self.N == 0 or f.w.is_zero():
            return f
        memo = {}

        def rebuild(h):
            if h.w.is_zero():
                return h
            v = h.node
            if v.is_terminal() and not h.w.factors:
                return h
            key = (v.id, h.w.key())
            r = memo.get(key)
            if r is None:
                x = self._top_index(h)
                h0 = rebuild(self.slicing(h, x, 0))
                h1 = rebuild(self.slicing(h, x, 1))
                res = self.loc_norm(x, h0, h1)
                r = (res.w, res.node)
                memo[key] = r
            return LimTDDHandle(r[0], r[1], self)

        return rebuild(f)

    # -- semantics ----------------------------------------------------------

    def _edge_tensor(self, w, target, memo):
        base = self._node_tensor(target, memo)
        if w.is_zero():
            return DenseTensor((), [0.0])
        if not w.factors and w.is_unit():
            return base
        sup = {self._idx(n) for n in base.indices} | set(w.support())
        idxs = tuple(sorted(sup, key=lambda i: i.key))
        names = tuple(i.name for i in idxs)
        t = DenseTensor(names, _broadcast_to(base, names).reshape(-1))
        return dense_apply_lim(w.to_weight(idxs), t)

    def _node_tensor(self, v, memo):
        if v.is_terminal():
            return DenseTensor((), [1.0])
        hit = memo.get(v.id)
        if hit is not None:
            return hit
        t0 = self._edge_tensor(v.low_w, v.low_t, memo)
        t1 = self._edge_tensor(v.high_w, v.high_t, memo)
        union = _merge_indices(t0.indices, t1.indices)
        a = np.stack([_broadcast_to(t0, union), _broadcast_to(t1, union)],
                     axis=0)
        t = DenseTensor((v.index.name,) + union, a.reshape(-1))
        memo[v.id] = t
        return t

    def to_tensor(self, f, indices=None):
        """Dense reconstruction (rank-capped); optionally over given indices."""
        t = self._edge_tensor(f.w, f.node, {})
        if indices is not None:
            indices = tuple(indices)
            missing = set(t.indices) - set(indices)
            if missing:
                raise DDError(f"requested indices drop {missing}")
            t = DenseTensor(indices, _broadcast_to(t, indices).reshape(-1))
        return t

    def amplitude(self, f, assignment):
        """Single-path evaluation of one tensor entry."""
        asg = {}
        for name, bit in assignment.items():
            if name in self.order:
                asg[self.order.get(name)] = bit & 1
        for i in self._sem_indices(f):
            if i not in asg:
                raise DDError(f"assignment missing index {i.name}")
        w, v = f.w, f.node
        val = 1.0 + 0j
        while True:
            if w.is_zero():
                return 0j
            val *= w.r * cmath.exp(2j * math.pi * w.theta)
            if self.N:
                ph = w.p
                for idx, b, z in w.factors:
                    t = asg[idx] ^ b
                    ph += 2 * z * t
                    asg[idx] = t
                if ph:
                    val *= cmath.exp(1j * math.pi * (ph % (2 * self.N)) / self.N)
            if v.is_terminal():
                return val
            bit = asg[v.index]
            w, v = (v.low_w, v.low_t) if bit == 0 else (v.high_w, v.high_t)

    # -- statistics and export ---------------------------------------------

    def size(self, f):
        """Number of distinct reachable nodes, terminal included."""
        seen = set()
        stack = [f.node]
        while stack:
            v = stack.pop()
            if v.id in seen:
                continue
            seen.add(v.id)
            if not v.is_terminal():
                stack.append(v.low_t)
                stack.append(v.high_t)
        return len(seen)

    def checkpoint(self, f):
        """Record the reachable size of a result; returns it."""
        s = self.size(f)
        self.checkpoints.append(s)
        if s > self.peak_nodes:
            self.peak_nodes = s
        return s

    def export_dot(self, f):
        """Graphviz text: dashed low edges, solid high edges, nodes by id."""
        nodes = []
        seen = set()
        stack = [f.node]
        while stack:
            v = stack.pop()
            if v.id in seen:
                continue
            seen.add(v.id)
            nodes.append(v)
            if not v.is_terminal():
                stack.append(v.low_t)
                stack.append(v.high_t)
        nodes.sort(key=lambda v: v.id)
        out = ["digraph limtdd {"]
        out.append('  inc [shape=point, label=""];')
        for v in nodes:
            label = "1" if v.is_terminal() else v.index.name
            out.append(f'  n{v.id} [label="{label}", shape=circle];')
        wlab = "" if f.w.is_unit() else f', label="{f.w.render()}"'
        out.append(f"  inc -> n{f.node.id} [style=solid{wlab}];")
        for v in nodes:
            if v.is_terminal():
                continue
            for style, ew, tgt in (("style=dashed", v.low_w, v.low_t),
                                   ("style=solid", v.high_w, v.high_t)):
                lab = "" if ew.is_unit() else f', label="{ew.render(v.sub)}"'
                out.append(f"  n{v.id} -> n{tgt.id} [{style}{lab}];")
        out.append("}")
        return "\n".join(out)
