"""Exact arithmetic for XP operators and LIM edge weights.

An XP operator of precision N is w^p * prod_i X^{x[i]} P^{z[i]}, where
w = exp(i*pi/N) is the 2N-th root of unity, P = diag(1, w^2), and the
components are integers with p mod 2N, x[i] mod 2, z[i] mod N.  Products
and inverses stay inside the group, so this algebra is exact.

A LimWeight is a complex scalar in polar-canonical form times an XP
operator: every integer multiple of 1/(2N) of the scalar angle is folded
into the operator phase p, leaving theta in [0, 1/(2N)).  Precision 0 is
the degenerate scalar-only group (plain complex weights).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

EPS = 1e-10
DENSE_RANK_CAP = 12


class XPError(ValueError):
    pass


# ---------------------------------------------------------------------------
# component-level arithmetic (plain ints/tuples; shared with the DD engine)

def mul_parts(N, p1, x1, z1, p2, x2, z2):
    """Componentwise product of two XP operators, D-correction folded in."""
    if N == 0:
        return 0, x1, z1
    m = 2 * N
    p = p1 + p2
    x = []
    z = []
    for i in range(len(x1)):
        d = 2 * x2[i] * z1[i]
        p += d
        x.append((x1[i] + x2[i]) & 1)
        z.append((z1[i] + z2[i] - d) % N)
    return p % m, tuple(x), tuple(z)


def inv_parts(N, p, x, z):
    """Components of the group inverse."""
    if N == 0:
        return 0, x, z
    m = 2 * N
    q = -p
    zz = []
    for i in range(len(x)):
        q -= 2 * x[i] * z[i]
        zz.append((2 * x[i] * z[i] - z[i]) % N)
    return q % m, tuple(x), tuple(zz)


def transpose_parts(N, p, x, z):
    """Components of the transpose: (X^b P^z)^T = P^z X^b renormalized."""
    if N == 0:
        return 0, x, z
    q = p
    zz = []
    for i in range(len(x)):
        if x[i]:
            q += 2 * z[i]
            zz.append((-z[i]) % N)
        else:
            zz.append(z[i])
    return q % (2 * N), x, tuple(zz)


# ---------------------------------------------------------------------------
# operator and weight types

@dataclass(frozen=True, slots=True)
class XPOperator:
    """w^p * X^{x[i]} P^{z[i]} over rank len(x) indices at precision N."""

    precision: int
    phase: int
    x: tuple
    z: tuple

    @property
    def rank(self):
        return len(self.x)

    def is_identity(self):
        return self.phase == 0 and not any(self.x) and not any(self.z)

    def is_diagonal(self):
        return not any(self.x)

    def __str__(self):
        xs = "".join(str(b) for b in self.x)
        zs = ",".join(str(v) for v in self.z)
        return f"XP_{self.precision}({self.phase}|{xs}|{zs})"


def xp_make(N, p, x, z):
    """Build an operator with all components reduced to canonical range."""
    if N < 0:
        raise XPError(f"precision must be >= 0, got {N}")
    x = tuple(b & 1 for b in x)
    if N == 0:
        if any(x) or any(z):
            raise XPError("precision 0 admits only the identity operator")
        return XPOperator(0, 0, x, tuple(0 for _ in z))
    return XPOperator(N, p % (2 * N), x, tuple(v % N for v in z))


def xp_identity(N, n):
    """The rank-n identity operator."""
    if N < 0 or n < 0:
        raise XPError("need N >= 0 and n >= 0")
    return XPOperator(N, 0, (0,) * n, (0,) * n)


def _check_compatible(a, b):
    if a.precision != b.precision:
        raise XPError(f"precision mismatch: {a.precision} vs {b.precision}")
    if a.rank != b.rank:
        raise XPError(f"rank mismatch: {a.rank} vs {b.rank}")


def xp_mul(a, b):
    """Exact product a * b."""
    _check_compatible(a, b)
    p, x, z = mul_parts(a.precision, a.phase, a.x, a.z, b.phase, b.x, b.z)
    return XPOperator(a.precision, p, x, z)


def xp_inverse(a):
    """Exact group inverse."""
    p, x, z = inv_parts(a.precision, a.phase, a.x, a.z)
    return XPOperator(a.precision, p, x, z)


def xp_transpose(a):
    """Matrix transpose, renormalized to XP form."""
    p, x, z = transpose_parts(a.precision, a.phase, a.x, a.z)
    return XPOperator(a.precision, p, x, z)


def xp_antisym(N, zvec):
    """The antisymmetric operator D_N(z); the z argument is unreduced."""
    if N == 0:
        return xp_identity(0, len(zvec))
    total = sum(zvec)
    return xp_make(N, total, (0,) * len(zvec), tuple(-v for v in zvec))


def xp_to_dense(a):
    """The defining 2^n x 2^n complex matrix; guarded for test-scale ranks."""
    n = a.rank
    if n > DENSE_RANK_CAP:
        raise XPError(f"rank {n} exceeds dense cap {DENSE_RANK_CAP}")
    if a.precision == 0:
        return np.eye(2 ** n, dtype=complex)
    w = cmath.exp(1j * math.pi / a.precision)
    out = np.array([[w ** a.phase]], dtype=complex)
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    for i in range(n):
        f = np.diag([1.0, w ** (2 * a.z[i])]).astype(complex)
        if a.x[i]:
            f = X @ f
        out = np.kron(out, f)
    return out


# ---------------------------------------------------------------------------
# LIM weights

def _canon_scalar(N, r, theta, p):
    """Fold 2N-th-root multiples of the angle into p; snap near-grid floats."""
    if r <= EPS:
        return 0.0, 0.0, 0
    theta = theta % 1.0
    if N == 0:
        if theta < EPS or theta > 1.0 - EPS:
            theta = 0.0
        return r, theta, 0
    m = 2 * N
    t = theta * m
    q = int(math.floor(t))
    frac = t - q
    if frac >= 1.0 - EPS * m:
        q += 1
        frac = 0.0
    elif frac <= EPS * m:
        frac = 0.0
    return r, frac / m, (p + q) % m


@dataclass(frozen=True, slots=True)
class LimWeight:
    """Polar-canonical scalar r*exp(2*pi*i*theta) times an XP operator."""

    magnitude: float
    angle: float
    op: XPOperator

    @property
    def precision(self):
        return self.op.precision

    @property
    def rank(self):
        return self.op.rank

    def is_zero(self):
        return self.magnitude == 0.0

    def is_unit(self):
        return abs(self.magnitude - 1.0) <= EPS and self.angle <= EPS and self.op.is_identity()

    def scalar(self):
        """The full complex coefficient r*e^{2 pi i theta}*w^p."""
        c = self.magnitude * cmath.exp(2j * math.pi * self.angle)
        if self.op.precision:
            c *= cmath.exp(1j * math.pi * self.op.phase / self.op.precision)
        return c

    def __str__(self):
        return f"{self.magnitude:.6g}∠{self.angle:.6g} · {self.op}"


def lim_make(r, theta, op):
    """Canonical LimWeight; a (near-)zero magnitude collapses to the zero weight."""
    N = op.precision
    r, theta, q = _canon_scalar(N, r, theta, op.phase)
    if r == 0.0:
        return LimWeight(0.0, 0.0, xp_identity(N, op.rank))
    if q != op.phase:
        op = XPOperator(N, q, op.x, op.z)
    return LimWeight(r, theta, op)


def lim_identity(N, n):
    return LimWeight(1.0, 0.0, xp_identity(N, n))


def lim_zero(N, n):
    return LimWeight(0.0, 0.0, xp_identity(N, n))


def lim_from_complex(c, N, n=0):
    """The scalar weight c times the rank-n identity."""
    r, phi = cmath.polar(complex(c))
    return lim_make(r, phi / (2 * math.pi), xp_identity(N, n))


def lim_mul(a, b):
    """Product of two weights, re-canonicalized."""
    if a.is_zero() or b.is_zero():
        return lim_zero(a.precision, a.rank)
    op = xp_mul(a.op, b.op)
    return lim_make(a.magnitude * b.magnitude, a.angle + b.angle, op)


def lim_inverse(a):
    """Full multiplicative inverse (scalar and operator)."""
    if a.is_zero():
        raise XPError("zero weight has no inverse")
    return lim_make(1.0 / a.magnitude, -a.angle, xp_inverse(a.op))


def lim_transpose(a):
    if a.is_zero():
        return a
    return lim_make(a.magnitude, a.angle, xp_transpose(a.op))


def lim_compare(a, b):
    """Total order on weights: lexicographic on (x | z | r | theta | p).

    Real parts compare with absolute tolerance EPS before falling through
    to the next field.  Returns -1, 0, or 1.
    """
    _check_compatible(a.op, b.op)
    if a.op.x != b.op.x:
        return -1 if a.op.x < b.op.x else 1
    if a.op.z != b.op.z:
        return -1 if a.op.z < b.op.z else 1
    if abs(a.magnitude - b.magnitude) > EPS:
        return -1 if a.magnitude < b.magnitude else 1
    if abs(a.angle - b.angle) > EPS:
        return -1 if a.angle < b.angle else 1
    if a.op.phase != b.op.phase:
        return -1 if a.op.phase < b.op.phase else 1
    return 0


def phase_extract(w):
    """Split w into w^{2k} times a residual with combined angle in [0, 1/N).

    The combined scalar angle is theta + p/(2N); with theta canonical the
    extraction is exact integer arithmetic: k = p // 2.
    """
    if w.is_zero():
        raise XPError("cannot extract phase from the zero weight")
    N = w.precision
    if N == 0:
        return 0, w
    k = w.op.phase // 2
    if k == 0:
        return 0, w
    op = XPOperator(N, w.op.phase - 2 * k, w.op.x, w.op.z)
    return k, LimWeight(w.magnitude, w.angle, op)


def lim_split(w, part):
    """Split w into factors on `part` (a set of positions) and the rest.

    The scalar coefficient and the operator phase travel entirely with the
    on-part; the off-part has unit scalar.  Factor supports are disjoint,
    so on * off == w exactly.
    """
    N = w.precision
    n = w.rank
    part = set(part)
    if not part.issubset(range(n)):
        raise XPError("part must be a subset of the weight's index positions")
    x_on = tuple(w.op.x[i] if i in part else 0 for i in range(n))
    z_on = tuple(w.op.z[i] if i in part else 0 for i in range(n))
    x_off = tuple(0 if i in part else w.op.x[i] for i in range(n))
    z_off = tuple(0 if i in part else w.op.z[i] for i in range(n))
    on = LimWeight(w.magnitude, w.angle, XPOperator(N, w.op.phase, x_on, z_on))
    off = LimWeight(1.0, 0.0, XPOperator(N, 0, x_off, z_off))
    if w.is_zero():
        off = lim_identity(N, n)
    return on, off


def lim_to_dense(w):
    """The 2^n x 2^n matrix r*e^{2 pi i theta} * dense(op)."""
    c = w.magnitude * cmath.exp(2j * math.pi * w.angle)
    return c * xp_to_dense(w.op)
