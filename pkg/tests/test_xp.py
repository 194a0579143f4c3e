"""XP operator and LIM weight arithmetic against dense linear algebra."""

import cmath
import math
import random

import numpy as np
import pytest

from limtdd import xp
from conftest import random_op, random_weight


def dense(op):
    return xp.xp_to_dense(op)


class TestOperatorBasics:
    def test_identity_components(self):
        op = xp.xp_identity(8, 2)
        assert (op.phase, op.x, op.z) == (0, (0, 0), (0, 0))

    def test_identity_dense(self):
        assert np.allclose(dense(xp.xp_identity(8, 1)), np.eye(2))

    def test_identity_unit_law(self, rng):
        for _ in range(100):
            n = rng.randrange(0, 4)
            a = random_op(rng, 8, n)
            assert xp.xp_mul(xp.xp_identity(8, n), a) == a
            assert xp.xp_mul(a, xp.xp_identity(8, n)) == a

    def test_x_times_p(self):
        x = xp.xp_make(8, 0, [1], [0])
        p = xp.xp_make(8, 0, [0], [1])
        assert xp.xp_mul(x, p) == xp.xp_make(8, 0, [1], [1])

    def test_minus_identity_squares_to_identity(self):
        minus = xp.xp_make(8, 8, [0], [0])
        assert xp.xp_mul(minus, minus).is_identity()

    def test_inverse_law(self, rng):
        for _ in range(100):
            N = rng.choice([2, 4, 8])
            a = random_op(rng, N, rng.randrange(0, 4))
            assert xp.xp_mul(a, xp.xp_inverse(a)).is_identity()

    def test_identity_inverse(self):
        assert xp.xp_inverse(xp.xp_identity(8, 2)).is_identity()

    def test_z_factor_is_involution(self):
        z = xp.xp_make(8, 0, [0], [4])
        assert xp.xp_inverse(z) == z
        assert np.allclose(dense(z) @ dense(z), np.eye(2))

    def test_inverse_matches_dense(self, rng):
        for _ in range(60):
            N = rng.choice([2, 4, 8])
            a = random_op(rng, N, rng.randrange(1, 4))
            inv = np.linalg.inv(dense(a))
            assert np.max(np.abs(dense(xp.xp_inverse(a)) - inv)) < 1e-12

    def test_antisym_zero(self):
        assert xp.xp_antisym(8, (0, 0)) == xp.xp_identity(8, 2)

    def test_antisym_direct(self):
        assert xp.xp_antisym(8, (2,)) == xp.xp_make(8, 2, [0], [6])

    def test_mul_closes_with_antisym_correction(self, rng):
        # dense check of the multiplication rule on random pairs
        for _ in range(100):
            N = rng.choice([1, 2, 4, 8])
            n = rng.randrange(1, 4)
            a, b = random_op(rng, N, n), random_op(rng, N, n)
            got = dense(xp.xp_mul(a, b))
            assert np.max(np.abs(got - dense(a) @ dense(b))) < 1e-12

    def test_precision_mismatch_raises(self):
        with pytest.raises(xp.XPError):
            xp.xp_mul(xp.xp_identity(4, 1), xp.xp_identity(8, 1))
        with pytest.raises(xp.XPError):
            xp.xp_mul(xp.xp_identity(8, 1), xp.xp_identity(8, 2))

    def test_group_associativity(self, rng):
        for _ in range(100):
            N = rng.choice([1, 2, 4, 8])
            n = rng.randrange(0, 4)
            a, b, c = (random_op(rng, N, n) for _ in range(3))
            assert xp.xp_mul(xp.xp_mul(a, b), c) == xp.xp_mul(a, xp.xp_mul(b, c))

    def test_dense_examples(self):
        assert np.allclose(dense(xp.xp_make(8, 0, [1], [0])), [[0, 1], [1, 0]])
        got = dense(xp.xp_make(8, 0, [0], [2]))
        assert np.allclose(got, np.diag([1, 1j]))
        got = dense(xp.xp_make(8, 4, [0], [0]))
        assert np.allclose(got, cmath.exp(1j * math.pi / 2) * np.eye(2))

    def test_dense_rank_guard(self):
        with pytest.raises(xp.XPError):
            xp.xp_to_dense(xp.xp_identity(2, 13))

    def test_transpose_matches_dense(self, rng):
        for _ in range(60):
            N = rng.choice([2, 4, 8])
            a = random_op(rng, N, rng.randrange(1, 4))
            assert np.max(np.abs(dense(xp.xp_transpose(a)) - dense(a).T)) < 1e-12

    def test_rendering(self):
        op = xp.xp_make(8, 12, [0, 1], [0, 4])
        assert str(op) == "XP_8(12|01|0,4)"


class TestWeights:
    def test_canonical_fold(self):
        w = xp.lim_from_complex(-1j, 8)
        assert w.magnitude == pytest.approx(1.0)
        assert w.angle == 0.0
        assert w.op.phase == 12

    def test_zero_weight_canonical(self):
        w = xp.lim_make(0.0, 0.3, xp.xp_make(8, 3, [1], [2]))
        assert w.is_zero() and w.angle == 0.0 and w.op.is_identity()

    def test_mul_inverse_unit(self, rng):
        for _ in range(60):
            N = rng.choice([2, 4, 8])
            w = random_weight(rng, N, rng.randrange(0, 3))
            assert xp.lim_mul(w, xp.lim_inverse(w)).is_unit()

    def test_scalar_cancellation(self):
        a = xp.lim_make(0.5, 0.0, xp.xp_make(8, 2, [1], [3]))
        b = xp.lim_make(2.0, 0.0, xp.xp_identity(8, 1))
        got = xp.lim_mul(a, b)
        assert got.magnitude == pytest.approx(1.0)
        assert got.op == xp.xp_make(8, 2, [1], [3])

    def test_mul_matches_dense(self, rng):
        for _ in range(60):
            N = rng.choice([2, 4, 8])
            n = rng.randrange(1, 3)
            a, b = random_weight(rng, N, n), random_weight(rng, N, n)
            got = xp.lim_to_dense(xp.lim_mul(a, b))
            want = xp.lim_to_dense(a) @ xp.lim_to_dense(b)
            assert np.max(np.abs(got - want)) < 1e-12

    def test_inverse_of_zero_raises(self):
        with pytest.raises(xp.XPError):
            xp.lim_inverse(xp.lim_zero(8, 1))

    def test_canonical_idempotent(self, rng):
        for _ in range(60):
            w = random_weight(rng, 8, 2)
            again = xp.lim_make(w.magnitude, w.angle, w.op)
            assert again == w
            assert w.angle < 1 / 16 + xp.EPS

    def test_compare_reflexive(self, rng):
        w = random_weight(rng, 8, 2)
        assert xp.lim_compare(w, w) == 0

    def test_compare_scalar_phase(self):
        a = xp.lim_make(1.0, 0.0, xp.xp_make(8, 0, [0], [4]))
        b = xp.lim_mul(xp.lim_from_complex(-1j, 8, 1),
                       xp.lim_make(1.0, 0.0, xp.xp_make(8, 0, [0], [4])))
        assert xp.lim_compare(a, b) < 0

    def test_compare_x_before_z(self):
        a = xp.lim_make(1.0, 0.0, xp.xp_make(8, 0, [1], [0]))
        b = xp.lim_make(1.0, 0.0, xp.xp_make(8, 0, [0], [7]))
        assert xp.lim_compare(b, a) < 0

    def test_compare_total_order(self, rng):
        ws = [random_weight(rng, 4, 2) for _ in range(30)]
        for a in ws:
            for b in ws:
                ab = xp.lim_compare(a, b)
                assert ab == -xp.lim_compare(b, a)
                for c in ws:
                    if ab < 0 and xp.lim_compare(b, c) < 0:
                        assert xp.lim_compare(a, c) < 0

    def test_phase_extract_minus_one(self):
        k, res = xp.phase_extract(xp.lim_from_complex(-1, 8))
        assert k == 4 and res.is_unit()

    def test_phase_extract_i(self):
        k, res = xp.phase_extract(xp.lim_from_complex(1j, 8))
        assert k == 2 and res.is_unit()

    def test_phase_extract_trivial(self):
        w = xp.lim_make(0.7, 0.01, xp.xp_make(8, 0, [1], [3]))
        k, res = xp.phase_extract(w)
        assert k == 0 and res == w

    def test_phase_extract_round_trip(self, rng):
        for _ in range(60):
            N = rng.choice([2, 4, 8])
            w = random_weight(rng, N, 1)
            k, res = xp.phase_extract(w)
            omega2k = cmath.exp(1j * math.pi * 2 * k / N)
            assert res.angle + res.op.phase / (2 * N) < 1 / N + xp.EPS
            got = omega2k * xp.lim_to_dense(res)
            assert np.max(np.abs(got - xp.lim_to_dense(w))) < 1e-12

    def test_phase_extract_zero_raises(self):
        with pytest.raises(xp.XPError):
            xp.phase_extract(xp.lim_zero(8, 0))

    def test_split_identity(self):
        w = xp.lim_identity(8, 3)
        on, off = xp.lim_split(w, {0, 1})
        assert on.is_unit() and off.is_unit()

    def test_split_by_definition(self):
        w = xp.lim_make(0.5, 0.1, xp.xp_make(8, 3, [1, 0, 1], [2, 5, 0]))
        on, off = xp.lim_split(w, {0})
        assert on.op.x == (1, 0, 0) and on.op.z == (2, 0, 0)
        assert on.magnitude == pytest.approx(0.5) and on.op.phase == w.op.phase
        assert off.op.x == (0, 0, 1) and off.op.z == (0, 5, 0)
        assert off.magnitude == pytest.approx(1.0) and off.op.phase == 0

    def test_split_recomposes(self, rng):
        for _ in range(60):
            N = rng.choice([2, 4, 8])
            n = rng.randrange(1, 4)
            w = random_weight(rng, N, n)
            part = {i for i in range(n) if rng.random() < 0.5}
            on, off = xp.lim_split(w, part)
            got = xp.lim_to_dense(on) @ xp.lim_to_dense(off)
            assert np.max(np.abs(got - xp.lim_to_dense(w))) < 1e-12

    def test_rendering(self):
        w = xp.lim_make(1.0, 0.0, xp.xp_make(8, 12, [0, 1], [0, 4]))
        assert "XP_8(12|01|0,4)" in str(w)
