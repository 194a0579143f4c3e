"""Sparse LIM weights over interned named indices.

Shared between the diagram engine and the stabilizer machinery.  A Lim is
a polar-canonical scalar, an XP phase p, and per-index (X, P^z) factors
stored sorted by index order with identity factors dropped, so equal
weights have equal encodings regardless of which indices they touch.
"""

from __future__ import annotations

import cmath
import math

from . import xp
from .xp import EPS, LimWeight, XPOperator


class DDError(ValueError):
    pass


class Idx:
    """Interned index name with a sortable order key (smaller = nearer root)."""

    __slots__ = ("name", "key")

    def __init__(self, name, key):
        self.name = name
        self.key = key

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return self.name


class IndexOrder:
    """Total order over interned index names, shared by all diagrams."""

    def __init__(self):
        self._by_name = {}
        self._auto = 0

    def register(self, name, key=None):
        idx = self._by_name.get(name)
        if key is None:
            if idx is not None:
                return idx
            key = (self._auto,)
            self._auto += 1
        else:
            key = tuple(key)
            if idx is not None:
                if idx.key != key:
                    raise DDError(
                        f"index {name!r} already registered with key {idx.key}")
                return idx
        idx = Idx(name, key)
        self._by_name[name] = idx
        return idx

    def get(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise DDError(f"unregistered index {name!r}") from None

    def __contains__(self, name):
        return name in self._by_name

    def names(self):
        return sorted(self._by_name, key=lambda n: self._by_name[n].key)


class Lim:
    """r * e^{2 pi i theta} * w^p * prod(X^x P^z on named indices), sparse."""

    __slots__ = ("r", "theta", "p", "factors", "N", "_key")

    def __init__(self, r, theta, p, factors, N):
        self.r = r
        self.theta = theta
        self.p = p
        self.factors = factors
        self.N = N
        self._key = None

    def is_zero(self):
        return self.r == 0.0

    def is_unit(self):
        return (not self.factors and self.p == 0
                and self.theta == 0.0 and abs(self.r - 1.0) <= EPS)

    def is_scalar(self):
        return not self.factors

    def has_unit_scalar(self):
        return abs(self.r - 1.0) <= EPS and self.theta <= EPS

    def scalar_value(self):
        c = self.r * cmath.exp(2j * math.pi * self.theta)
        if self.N and self.p:
            c *= cmath.exp(1j * math.pi * self.p / self.N)
        return c

    def factor(self, idx):
        for i, xb, z in self.factors:
            if i is idx:
                return xb, z
        return None

    def support(self):
        return tuple(f[0] for f in self.factors)

    def key(self):
        k = self._key
        if k is None:
            k = (int(round(self.r / EPS)), int(round(self.theta / EPS)),
                 self.p, tuple((f[0].name, f[1], f[2]) for f in self.factors))
            self._key = k
        return k

    def sort_key(self):
        return (tuple((f[0].key, f[1], f[2]) for f in self.factors),
                int(round(self.r / EPS)), int(round(self.theta / EPS)), self.p)

    def op_key(self):
        return (self.p, tuple((f[0].name, f[1], f[2]) for f in self.factors))

    def to_weight(self, indices):
        """Positional LimWeight aligned over the given index tuple."""
        pos = {idx: k for k, idx in enumerate(indices)}
        xs = [0] * len(indices)
        zs = [0] * len(indices)
        for i, xb, z in self.factors:
            xs[pos[i]] = xb
            zs[pos[i]] = z
        return LimWeight(self.r, self.theta,
                         XPOperator(self.N, self.p, tuple(xs), tuple(zs)))

    def render(self, indices=None):
        if indices is None:
            indices = self.support()
        return str(self.to_weight(tuple(indices)))

    def __repr__(self):
        fac = " ".join(f"{i.name}:X{xb}P{z}" for i, xb, z in self.factors)
        return f"Lim({self.r:.6g}, {self.theta:.6g}, w^{self.p}, [{fac}])"


def lim(r, theta, p, factors, N):
    """Canonicalized constructor."""
    if theta == 0.0 and r > EPS:
        # already folded; just snap the magnitude and reduce the phase
        if abs(r - 1.0) <= EPS:
            r = 1.0
        if N and not 0 <= p < 2 * N:
            p = p % (2 * N)
        elif N == 0:
            p = 0
        return Lim(r, 0.0, p, tuple(f for f in factors if f[1] or f[2]), N)
    r, theta, p = xp._canon_scalar(N, r, theta, p)
    if r == 0.0:
        return Lim(0.0, 0.0, 0, (), N)
    if abs(r - 1.0) <= EPS:
        r = 1.0
    return Lim(r, theta, p, tuple(f for f in factors if f[1] or f[2]), N)


def lim_unit(N):
    return Lim(1.0, 0.0, 0, (), N)


def lim_zero(N):
    return Lim(0.0, 0.0, 0, (), N)


def lim_complex(c, N):
    r, phi = cmath.polar(complex(c))
    return lim(r, phi / (2 * math.pi), 0, (), N)


def lim_mul(a, b):
    """Sparse product via the componentwise XP rules."""
    if a.is_zero() or b.is_zero():
        return Lim(0.0, 0.0, 0, (), a.N)
    if a.is_unit():
        return b
    if b.is_unit():
        return a
    if not a.factors and not b.factors:
        return lim(a.r * b.r, a.theta + b.theta, a.p + b.p, (), a.N)
    N = a.N
    p = a.p + b.p
    out = []
    i = j = 0
    fa, fb = a.factors, b.factors
    while i < len(fa) or j < len(fb):
        if j >= len(fb) or (i < len(fa) and fa[i][0].key < fb[j][0].key):
            out.append(fa[i])
            i += 1
        elif i >= len(fa) or fb[j][0].key < fa[i][0].key:
            out.append(fb[j])
            j += 1
        else:
            idx, xa, za = fa[i]
            _, xb, zb = fb[j]
            d = 2 * xb * za
            p += d
            xc = (xa + xb) & 1
            zc = (za + zb - d) % N
            if xc or zc:
                out.append((idx, xc, zc))
            i += 1
            j += 1
    return lim(a.r * b.r, a.theta + b.theta, p, tuple(out), N)


def lim_inverse(a):
    if a.is_zero():
        raise DDError("zero weight has no inverse")
    if not a.factors and a.p == 0:
        return lim(1.0 / a.r, -a.theta, 0, (), a.N)
    N = a.N
    p = -a.p
    out = []
    for idx, xb, z in a.factors:
        d = 2 * xb * z
        p -= d
        out.append((idx, xb, (d - z) % N))
    return lim(1.0 / a.r, -a.theta, p, tuple(out), N)


def lim_transpose(a):
    if a.is_zero() or not a.factors:
        return a
    N = a.N
    p = a.p
    out = []
    for idx, xb, z in a.factors:
        if xb and z:
            p += 2 * z
            out.append((idx, xb, (-z) % N))
        else:
            out.append((idx, xb, z))
    return lim(a.r, a.theta, p, tuple(out), N)


def lim_phase(a, dp):
    """a times w^{dp}."""
    if a.is_zero() or dp == 0 or a.N == 0:
        return a
    return lim(a.r, a.theta, a.p + dp, a.factors, a.N)


def lim_without(a, idx):
    for f in a.factors:
        if f[0] is idx:
            return Lim(a.r, a.theta, a.p,
                       tuple(g for g in a.factors if g[0] is not idx), a.N)
    return a


def lim_with_factor(a, idx, xb, z):
    """Insert a factor on an index not already in the support."""
    if a.N:
        xb &= 1
        z %= a.N
    else:
        xb = z = 0
    if not (xb or z):
        return a
    fac = list(a.factors)
    k = 0
    while k < len(fac) and fac[k][0].key < idx.key:
        k += 1
    if k < len(fac) and fac[k][0] is idx:
        raise DDError(f"factor on {idx.name} already present")
    fac.insert(k, (idx, xb, z))
    return Lim(a.r, a.theta, a.p, tuple(fac), a.N)


def lim_split(a, names):
    """(on, off): factors inside `names` plus the coefficient, and the rest."""
    on = tuple(f for f in a.factors if f[0] in names)
    off = tuple(f for f in a.factors if f[0] not in names)
    return (Lim(a.r, a.theta, a.p, on, a.N), Lim(1.0, 0.0, 0, off, a.N))


def lim_compare(a, b):
    """Lexicographic (x | z | r | theta | p) over the merged support."""
    i = j = 0
    fa, fb = a.factors, b.factors
    rows = []
    while i < len(fa) or j < len(fb):
        if j >= len(fb) or (i < len(fa) and fa[i][0].key < fb[j][0].key):
            rows.append((fa[i][1], fa[i][2], 0, 0))
            i += 1
        elif i >= len(fa) or fb[j][0].key < fa[i][0].key:
            rows.append((0, 0, fb[j][1], fb[j][2]))
            j += 1
        else:
            rows.append((fa[i][1], fa[i][2], fb[j][1], fb[j][2]))
            i += 1
            j += 1
    for xa, _, xb, _ in rows:
        if xa != xb:
            return -1 if xa < xb else 1
    for _, za, _, zb in rows:
        if za != zb:
            return -1 if za < zb else 1
    if abs(a.r - b.r) > EPS:
        return -1 if a.r < b.r else 1
    if abs(a.theta - b.theta) > EPS:
        return -1 if a.theta < b.theta else 1
    if a.p != b.p:
        return -1 if a.p < b.p else 1
    return 0
