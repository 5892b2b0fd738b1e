"""Tests for the dense symmetric linear algebra kernel.

The Jacobi eigensolver is the independent verification path for every
certificate, so it is tested against analytically known spectra and
against reconstruction/orthonormality invariants on random input.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algocert.matrixcore import (
    BlockLayout,
    MatrixError,
    SymMatrix,
    assemble,
    max_eig,
    min_eig,
    sym_eig,
)


class TestSymMatrix:
    def test_symmetrizes_input(self):
        m = SymMatrix([[1.0, 2.0], [0.0, 3.0]])
        assert np.allclose(m.entries, [[1.0, 1.0], [1.0, 3.0]])

    def test_rejects_non_square(self):
        with pytest.raises(MatrixError):
            SymMatrix(np.zeros((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(MatrixError):
            SymMatrix([[np.nan, 0.0], [0.0, 1.0]])
        with pytest.raises(MatrixError):
            SymMatrix([[np.inf]])

    def test_rejects_empty(self):
        with pytest.raises(MatrixError):
            SymMatrix(np.zeros((0, 0)))

    def test_immutable(self):
        m = SymMatrix(np.eye(2))
        with pytest.raises(AttributeError):
            m.dim = 3
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0

    def test_quad_form(self):
        # [1 2; 2 5] at v=(1,1): 1 + 2*2 + 5 = 10
        m = SymMatrix([[1.0, 2.0], [2.0, 5.0]])
        assert m.quad_form([1.0, 1.0]) == pytest.approx(10.0)

    def test_frobenius(self):
        m = SymMatrix([[3.0, 0.0], [0.0, 4.0]])
        assert m.frobenius() == pytest.approx(5.0)

    def test_equality_and_hash(self):
        a = SymMatrix(np.eye(2))
        b = SymMatrix(np.eye(2))
        assert a == b and hash(a) == hash(b)
        assert a != SymMatrix(2 * np.eye(2))


class TestSymEig:
    def test_diagonal_matrix(self):
        vals, vecs = sym_eig(SymMatrix(np.diag([3.0, -1.0, 2.0])))
        assert np.allclose(vals, [-1.0, 2.0, 3.0])
        assert np.allclose(np.abs(vecs.T @ vecs), np.eye(3), atol=1e-12)

    def test_known_2x2(self):
        # [[2,1],[1,2]] has eigenvalues 1 and 3
        vals, _ = sym_eig(SymMatrix([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(vals, [1.0, 3.0], atol=1e-12)

    def test_known_3x3_rank_one(self):
        # vv^T with v = (1,2,2): eigenvalues (0, 0, 9)
        v = np.array([1.0, 2.0, 2.0])
        vals, _ = sym_eig(SymMatrix(np.outer(v, v)))
        assert np.allclose(vals, [0.0, 0.0, 9.0], atol=1e-12)

    def test_one_dimensional(self):
        vals, vecs = sym_eig(SymMatrix([[7.0]]))
        assert vals[0] == pytest.approx(7.0)
        assert vecs[0, 0] == pytest.approx(1.0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=1, max_value=998244353))
    def test_random_reconstruction(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        a = rng.standard_normal((n, n))
        m = SymMatrix(a + a.T)
        vals, vecs = sym_eig(m)
        scale = max(1.0, m.frobenius())
        assert np.all(np.diff(vals) >= -1e-12 * scale)  # ascending
        assert np.allclose(vecs.T @ vecs, np.eye(n), atol=1e-10)
        assert np.allclose(vecs @ np.diag(vals) @ vecs.T, m.entries, atol=1e-10 * scale)

    def test_agrees_with_numpy(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            a = rng.standard_normal((5, 5))
            m = SymMatrix(a + a.T)
            vals, _ = sym_eig(m)
            assert np.allclose(vals, np.linalg.eigvalsh(m.entries), atol=1e-10)

    def test_min_max_eig(self):
        m = SymMatrix(np.diag([5.0, -2.0, 1.0]))
        assert min_eig(m) == pytest.approx(-2.0)
        assert max_eig(m) == pytest.approx(5.0)


class TestBlockLayout:
    def test_assemble_places_blocks(self):
        layout = BlockLayout(
            row_sizes=(1, 2),
            col_sizes=(2, 1),
            blocks={(0, 0): np.array([[1.0, 2.0]]), (1, 1): np.array([[3.0], [4.0]])},
        )
        out = assemble(layout)
        assert np.allclose(out, [[1.0, 2.0, 0.0], [0.0, 0.0, 3.0], [0.0, 0.0, 4.0]])

    def test_absent_blocks_are_zero(self):
        out = assemble(BlockLayout(row_sizes=(2,), col_sizes=(2,), blocks={}))
        assert np.allclose(out, np.zeros((2, 2)))

    def test_shape_mismatch_names_block(self):
        with pytest.raises(MatrixError, match=r"\(0, 1\)"):
            BlockLayout(
                row_sizes=(1,), col_sizes=(1, 2), blocks={(0, 1): np.zeros((1, 3))}
            )

    def test_index_out_of_grid(self):
        with pytest.raises(MatrixError, match="outside"):
            BlockLayout(row_sizes=(1,), col_sizes=(1,), blocks={(1, 0): np.zeros((1, 1))})

    def test_rejects_nonpositive_sizes(self):
        with pytest.raises(MatrixError):
            BlockLayout(row_sizes=(0,), col_sizes=(1,))
