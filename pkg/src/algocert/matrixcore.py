"""Dense real symmetric linear algebra used by every LMI builder.

All matrices in this toolkit are desk-scale (dims well below 100), so
everything is stored dense and the eigensolver is a cyclic Jacobi sweep,
which is unconditionally robust for symmetric input and keeps the
certificate re-validation path independent of any third-party
eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MatrixError",
    "SymMatrix",
    "BlockLayout",
    "sym_eig",
    "min_eig",
    "max_eig",
    "assemble",
]


class MatrixError(ValueError):
    """Raised for malformed matrix input (shape, symmetry, non-finite)."""


class SymMatrix:
    """Immutable dense real symmetric matrix.

    Input is symmetrized as (M + M^T)/2 on construction; non-finite
    entries are rejected.
    """

    __slots__ = ("entries", "dim")

    def __init__(self, entries) -> None:
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MatrixError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise MatrixError("dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            raise MatrixError("matrix has non-finite entries")
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "dim", a.shape[0])

    def __setattr__(self, name, value):
        raise AttributeError("SymMatrix is immutable")

    def __repr__(self) -> str:
        return f"SymMatrix(dim={self.dim})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SymMatrix) and np.array_equal(
            self.entries, other.entries
        )

    def __hash__(self):
        return hash((self.dim, self.entries.tobytes()))

    def frobenius(self) -> float:
        return float(math.sqrt(np.sum(self.entries * self.entries)))

    def quad_form(self, v) -> float:
        v = np.asarray(v, dtype=float).reshape(-1)
        return float(v @ self.entries @ v)


def _off_diagonal_frobenius(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(math.sqrt(np.sum(off * off)))


def sym_eig(m: SymMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, orthonormal eigenvectors as columns).
    Off-diagonal Frobenius threshold 1e-14 * ||M||_F, at most 100 sweeps.
    """
    a = m.entries.copy()
    n = m.dim
    v = np.eye(n)
    if n == 1:
        return a[0].copy(), v

    threshold = 1e-14 * max(m.frobenius(), 1e-300)
    for _ in range(100):
        if _off_diagonal_frobenius(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(tau * tau + 1.0))
                else:
                    t = -1.0 / (-tau + math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # a <- R^T a R with the Givens rotation R in plane (p, q)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def min_eig(m: SymMatrix) -> float:
    """Smallest eigenvalue, from the Jacobi eigendecomposition."""
    eigenvalues, _ = sym_eig(m)
    return float(eigenvalues[0])


def max_eig(m: SymMatrix) -> float:
    """Largest eigenvalue, from the Jacobi eigendecomposition."""
    eigenvalues, _ = sym_eig(m)
    return float(eigenvalues[-1])


@dataclass(frozen=True)
class BlockLayout:
    """Grid of dense rectangular blocks; absent blocks are zero.

    ``blocks`` maps (row-block, column-block) indices to arrays whose
    shapes must match the declared block sizes.
    """

    row_sizes: tuple[int, ...]
    col_sizes: tuple[int, ...]
    blocks: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        row_sizes = tuple(int(s) for s in self.row_sizes)
        col_sizes = tuple(int(s) for s in self.col_sizes)
        if not row_sizes or not col_sizes:
            raise MatrixError("block layout needs at least one row and column block")
        if any(s < 1 for s in row_sizes + col_sizes):
            raise MatrixError("block sizes must be positive")
        blocks = {}
        for (i, j), block in self.blocks.items():
            if not (0 <= i < len(row_sizes) and 0 <= j < len(col_sizes)):
                raise MatrixError(f"block index ({i}, {j}) outside the layout grid")
            b = np.atleast_2d(np.asarray(block, dtype=float))
            expected = (row_sizes[i], col_sizes[j])
            if b.shape != expected:
                raise MatrixError(
                    f"block ({i}, {j}) has shape {b.shape}, expected {expected}"
                )
            if not np.all(np.isfinite(b)):
                raise MatrixError(f"block ({i}, {j}) has non-finite entries")
            blocks[(i, j)] = b
        object.__setattr__(self, "row_sizes", row_sizes)
        object.__setattr__(self, "col_sizes", col_sizes)
        object.__setattr__(self, "blocks", blocks)


def assemble(layout: BlockLayout) -> np.ndarray:
    """Dense matrix with every block placed at its block offset."""
    row_offsets = np.concatenate(([0], np.cumsum(layout.row_sizes)))
    col_offsets = np.concatenate(([0], np.cumsum(layout.col_sizes)))
    out = np.zeros((row_offsets[-1], col_offsets[-1]))
    for (i, j), block in layout.blocks.items():
        out[
            row_offsets[i] : row_offsets[i + 1],
            col_offsets[j] : col_offsets[j + 1],
        ] = block
    return out
