"""Dense oracle arithmetic: slicing, contraction, LIM application, JSON."""

import itertools

import numpy as np
import pytest

from limtdd import dense, xp
from limtdd.dense import DenseTensor
from conftest import random_weight

C = 1 / (2 * np.sqrt(2))
EXAMPLE2 = C * np.array([1, 1, 1, -1, -1j, 1j, -1, -1])


def example2():
    return DenseTensor(("x3", "x2", "x1"), EXAMPLE2)


class TestSlice:
    def test_example2_slice(self):
        got = dense.dense_slice(example2(), "x3", 0)
        assert np.allclose(got.data, C * np.array([1, 1, 1, -1]))

    def test_absent_index(self):
        t = example2()
        assert dense.dense_slice(t, "y9", 0) is t

    def test_slices_reassemble(self):
        t = dense.random_tensor(("a", "b", "c", "d"), 5)
        s0 = dense.dense_slice(t, "a", 0)
        s1 = dense.dense_slice(t, "a", 1)
        assert np.allclose(np.concatenate([s0.data, s1.data]), t.data)


class TestContract:
    def test_rank1_inner(self):
        a = DenseTensor(("s",), [1, 1])
        b = DenseTensor(("s",), [1, 1])
        got = dense.dense_contract(a, b, {"s"})
        assert got.rank == 0 and got.data[0] == pytest.approx(2)

    def test_fig3_network(self):
        # the three-qubit circuit as a network of small tensors against
        # the known output value table
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        cz = np.diag([1, 1, 1, -1]).astype(complex)
        cs = np.diag([1, 1, 1, 1j]).astype(complex)
        cy = np.eye(4, dtype=complex)
        cy[2:, 2:] = [[0, -1j], [1j, 0]]
        net = DenseTensor(("a3",), [1, 0])
        net = dense.dense_contract(net, DenseTensor(("b3", "a3"), h.reshape(-1)), {"a3"})
        q2 = dense.dense_contract(DenseTensor(("a2",), [1, 0]),
                                  DenseTensor(("b2", "a2"), h.reshape(-1)), {"a2"})
        q1 = dense.dense_contract(DenseTensor(("a1",), [1, 0]),
                                  DenseTensor(("b1", "a1"), h.reshape(-1)), {"a1"})
        net = dense.dense_contract(net, q2, set())
        net = dense.dense_contract(net, q1, set())
        # cz on (q2, q1): tensor over (c2, c1, b2, b1)
        cz4 = cz.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
        net = dense.dense_contract(net, DenseTensor(("c2", "b2", "c1", "b1"),
                                                    cz4.reshape(-1)), {"b2", "b1"})
        cs4 = cs.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
        net = dense.dense_contract(net, DenseTensor(("c3", "b3", "d2", "c2"),
                                                    cs4.reshape(-1)), {"b3", "c2"})
        cy4 = cy.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
        net = dense.dense_contract(net, DenseTensor(("d3", "c3", "d1", "c1"),
                                                    cy4.reshape(-1)), {"c3", "c1"})
        got = dense.dense_transpose(net, ("d3", "d2", "d1"))
        assert np.max(np.abs(got.data - EXAMPLE2)) < 1e-12

    def test_outer_product(self):
        a = dense.random_tensor(("a",), 1)
        b = dense.random_tensor(("b",), 2)
        got = dense.dense_contract(a, b, set())
        for i in range(2):
            for j in range(2):
                want = a.data[i] * b.data[j]
                assert got.value({"a": i, "b": j}) == pytest.approx(want)

    def test_var_not_shared(self):
        a = dense.random_tensor(("a",), 1)
        b = dense.random_tensor(("b",), 2)
        with pytest.raises(dense.DenseError):
            dense.dense_contract(a, b, {"a"})

    def test_order_independent(self):
        a = dense.random_tensor(("x", "y"), 11)
        b = dense.random_tensor(("y", "z"), 12)
        c = dense.random_tensor(("z", "w"), 13)
        ab_c = dense.dense_contract(dense.dense_contract(a, b, {"y"}), c, {"z"})
        a_bc = dense.dense_contract(a, dense.dense_contract(b, c, {"z"}), {"y"})
        assert dense.max_abs_diff(ab_c, a_bc) < 1e-10

    def test_slice_product_recursion(self):
        # contraction over one index equals the sum of slice products
        a = dense.random_tensor(("x", "y"), 21)
        b = dense.random_tensor(("x", "z"), 22)
        whole = dense.dense_contract(a, b, {"x"})
        parts = dense.dense_add(
            dense.dense_contract(dense.dense_slice(a, "x", 0),
                                 dense.dense_slice(b, "x", 0), set()),
            dense.dense_contract(dense.dense_slice(a, "x", 1),
                                 dense.dense_slice(b, "x", 1), set()))
        assert dense.max_abs_diff(whole, parts) < 1e-12


class TestApplyLim:
    def test_identity(self):
        t = example2()
        got = dense.dense_apply_lim(xp.lim_identity(8, 3), t)
        assert np.allclose(got.data, t.data)

    def test_example3(self):
        w = xp.lim_make(1.0, 0.0, xp.xp_make(8, 0, [0, 0, 0], [2, 0, 0]))
        got = dense.dense_apply_lim(w, example2())
        want = C * np.array([1, 1, 1, -1, 1, -1, -1j, -1j])
        assert np.max(np.abs(got.data - want)) < 1e-12

    def test_matches_matrix_vector(self, rng):
        for _ in range(60):
            N = rng.choice([2, 4, 8])
            n = rng.randrange(1, 4)
            names = tuple(f"i{k}" for k in range(n))
            t = dense.random_tensor(names, rng.randrange(10 ** 6))
            w = random_weight(rng, N, n)
            got = dense.dense_apply_lim(w, t)
            want = xp.lim_to_dense(w) @ t.data
            assert np.max(np.abs(got.data - want)) < 1e-12

    def test_rank_mismatch(self):
        with pytest.raises(dense.DenseError):
            dense.dense_apply_lim(xp.lim_identity(8, 2), example2())


class TestPlumbing:
    def test_add_zero(self):
        t = example2()
        z = DenseTensor((), [0.0])
        assert dense.max_abs_diff(dense.dense_add(t, z), t) == 0

    def test_random_deterministic(self):
        a = dense.random_tensor(("a", "b"), 123)
        b = dense.random_tensor(("a", "b"), 123)
        assert np.array_equal(a.data, b.data)

    def test_add_commutes(self):
        a = dense.random_tensor(("a", "b"), 1)
        b = dense.random_tensor(("b", "c"), 2)
        assert dense.max_abs_diff(dense.dense_add(a, b), dense.dense_add(b, a)) == 0

    def test_add_broadcasts(self):
        a = dense.random_tensor(("a",), 3)
        b = dense.random_tensor(("b",), 4)
        got = dense.dense_add(a, b)
        for i, j in itertools.product(range(2), range(2)):
            assert got.value({"a": i, "b": j}) == pytest.approx(
                a.data[i] + b.data[j])

    def test_rank_cap(self):
        with pytest.raises(dense.DenseError):
            DenseTensor(tuple(f"i{k}" for k in range(13)), np.zeros(2 ** 13))

    def test_json_round_trip(self):
        t = example2()
        back = dense.from_json_dict(dense.to_json_dict(t))
        assert back.indices == t.indices
        assert np.max(np.abs(back.data - t.data)) < 1e-15
