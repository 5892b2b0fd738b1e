"""Algorithms-as-systems data model and oracle quadratic bounds.

A first-order method is split into a linear block in feedback with one or
more oracles (gradient, proximal map, projection).  Closed models have
only the oracle channel (y, u); open models add an external input d and a
performance output z.  An OracleBound is a symmetric matrix S over the
stacked increment vector with the convention

    (stacked increments)^T S (stacked increments) <= 0

for every pair of oracle input/output increments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrixcore import MatrixError, SymMatrix

__all__ = [
    "ModelError",
    "ClosedAlgorithmModel",
    "OpenAlgorithmModel",
    "OracleBound",
    "PlantSupply",
    "strongly_monotone_bound",
    "lipschitz_bound",
    "firmly_nonexpansive_bound",
    "sector_bound",
    "affine_equality_bound",
    "extend_bound_with_input",
    "stack_bounds",
    "small_gain_supply",
    "gradient_descent_model",
    "nesterov_model",
    "open_gradient_descent_gradient_noise",
    "open_nesterov_gradient_noise",
    "open_nesterov_measurement_noise",
    "to_closed",
]


class ModelError(ValueError):
    """Raised for inconsistent model or bound dimensions/parameters."""


def _as_matrix(arr, rows: int, cols: int, name: str) -> np.ndarray:
    a = np.atleast_2d(np.asarray(arr, dtype=float))
    if a.shape != (rows, cols):
        raise ModelError(f"{name} has shape {a.shape}, expected ({rows}, {cols})")
    if not np.all(np.isfinite(a)):
        raise ModelError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True)
class ClosedAlgorithmModel:
    """Linear block x+ = Ax + Bu, y = Cx + Du closed by an oracle u = phi(y)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        m = B.shape[1]
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        p = C.shape[0]
        object.__setattr__(self, "A", _as_matrix(A, n, n, "A"))
        object.__setattr__(self, "B", _as_matrix(B, n, m, "B"))
        object.__setattr__(self, "C", _as_matrix(C, p, n, "C"))
        object.__setattr__(self, "D", _as_matrix(self.D, p, m, "D"))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class OpenAlgorithmModel:
    """Nine-matrix linear block with oracle channel (y, u) and external (d, z).

    x+ = A x + B1 u + B2 d
    y  = C1 x + D11 u + D12 d
    z  = C2 x + D21 u + D22 d
    """

    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    D11: np.ndarray
    D12: np.ndarray
    C2: np.ndarray
    D21: np.ndarray
    D22: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        B1 = np.atleast_2d(np.asarray(self.B1, dtype=float))
        m = B1.shape[1]
        B2 = np.atleast_2d(np.asarray(self.B2, dtype=float))
        r = B2.shape[1]
        C1 = np.atleast_2d(np.asarray(self.C1, dtype=float))
        p = C1.shape[0]
        C2 = np.atleast_2d(np.asarray(self.C2, dtype=float))
        q = C2.shape[0]
        object.__setattr__(self, "A", _as_matrix(A, n, n, "A"))
        object.__setattr__(self, "B1", _as_matrix(B1, n, m, "B1"))
        object.__setattr__(self, "B2", _as_matrix(B2, n, r, "B2"))
        object.__setattr__(self, "C1", _as_matrix(C1, p, n, "C1"))
        object.__setattr__(self, "D11", _as_matrix(self.D11, p, m, "D11"))
        object.__setattr__(self, "D12", _as_matrix(self.D12, p, r, "D12"))
        object.__setattr__(self, "C2", _as_matrix(C2, q, n, "C2"))
        object.__setattr__(self, "D21", _as_matrix(self.D21, q, m, "D21"))
        object.__setattr__(self, "D22", _as_matrix(self.D22, q, r, "D22"))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B1.shape[1]

    @property
    def r(self) -> int:
        return self.B2.shape[1]

    @property
    def p(self) -> int:
        return self.C1.shape[0]

    @property
    def q(self) -> int:
        return self.C2.shape[0]


def to_closed(model: OpenAlgorithmModel) -> ClosedAlgorithmModel:
    """Drop the external channel (d = 0, z ignored)."""
    return ClosedAlgorithmModel(model.A, model.B1, model.C1, model.D11)


@dataclass(frozen=True)
class OracleBound:
    """Quadratic incremental constraint on an oracle channel.

    ``partition`` is the ordered list of (label, size) pairs of the stacked
    increment vector, e.g. (("y", p), ("u", m)) or (("y", p), ("u", m),
    ("d", r)).  The oracle guarantees increments^T S increments <= 0.
    """

    S: SymMatrix
    partition: tuple[tuple[str, int], ...]
    kind: str

    def __post_init__(self):
        partition = tuple((str(l), int(s)) for l, s in self.partition)
        if any(s < 1 for _, s in partition):
            raise ModelError("partition sizes must be positive")
        total = sum(s for _, s in partition)
        if self.S.dim != total:
            raise ModelError(
                f"bound matrix dim {self.S.dim} != partition total {total}"
            )
        object.__setattr__(self, "partition", partition)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.partition)

    def size(self, label: str) -> int:
        for l, s in self.partition:
            if l == label:
                return s
        raise ModelError(f"no channel {label!r} in partition {self.labels}")

    def form(self, *increments) -> float:
        """Evaluate the quadratic form on stacked increment vectors."""
        parts = [np.asarray(v, dtype=float).reshape(-1) for v in increments]
        stacked = np.concatenate(parts)
        if stacked.size != self.S.dim:
            raise ModelError(
                f"stacked increments have size {stacked.size}, expected {self.S.dim}"
            )
        return self.S.quad_form(stacked)


@dataclass(frozen=True)
class PlantSupply:
    """Quadratic supply rate of the plant over (zeta, nu) = (d, z) increments."""

    S_p: SymMatrix
    r: int
    q: int

    def __post_init__(self):
        if self.r < 1 or self.q < 1:
            raise ModelError("plant channel sizes must be positive")
        if self.S_p.dim != self.r + self.q:
            raise ModelError(
                f"plant supply dim {self.S_p.dim} != r + q = {self.r + self.q}"
            )


def small_gain_supply(mu_bar: float, r: int, q: int) -> PlantSupply:
    """Supply of a plant with incremental l2 gain at most ``mu_bar``.

    Normalized as S_p = diag(-(1/mu_bar^2) I_r, I_q) so that plugging it
    into the closed-loop LMI reproduces the open-gain LMI with
    mu = 1/mu_bar entry by entry.
    """
    if mu_bar <= 0:
        raise ModelError("mu_bar must be positive")
    blocks = np.zeros((r + q, r + q))
    blocks[:r, :r] = -(1.0 / mu_bar**2) * np.eye(r)
    blocks[r:, r:] = np.eye(q)
    return PlantSupply(SymMatrix(blocks), r, q)


def _two_block(top_left, top_right, bottom_right, dim: int) -> SymMatrix:
    s = np.zeros((2 * dim, 2 * dim))
    s[:dim, :dim] = top_left * np.eye(dim)
    s[:dim, dim:] = top_right * np.eye(dim)
    s[dim:, :dim] = top_right * np.eye(dim)
    s[dim:, dim:] = bottom_right * np.eye(dim)
    return SymMatrix(s)


def strongly_monotone_bound(mu: float, dim: int) -> OracleBound:
    """S = [[2 mu I, -I], [-I, 0]]: mu-strong monotonicity of the oracle."""
    if mu <= 0:
        raise ModelError("mu must be positive")
    if dim < 1:
        raise ModelError("dim must be at least 1")
    return OracleBound(
        _two_block(2.0 * mu, -1.0, 0.0, dim),
        (("y", dim), ("u", dim)),
        f"strongly-monotone({mu})",
    )


def lipschitz_bound(L: float, dim: int) -> OracleBound:
    """S = [[-L^2 I, 0], [0, I]]: form is ||du||^2 - L^2 ||dy||^2."""
    if L <= 0:
        raise ModelError("L must be positive")
    if dim < 1:
        raise ModelError("dim must be at least 1")
    return OracleBound(
        _two_block(-L * L, 0.0, 1.0, dim),
        (("y", dim), ("u", dim)),
        f"lipschitz({L})",
    )


def firmly_nonexpansive_bound(dim: int) -> OracleBound:
    """S = [[0, -I/2], [-I/2, I]]: form is ||du||^2 - du^T dy."""
    if dim < 1:
        raise ModelError("dim must be at least 1")
    return OracleBound(
        _two_block(0.0, -0.5, 1.0, dim),
        (("y", dim), ("u", dim)),
        "firmly-nonexpansive",
    )


def sector_bound(mu: float, L: float, dim: int) -> OracleBound:
    """Sector constraint 2 (du - mu dy)^T (du - L dy) <= 0.

    S = [[2 mu L I, -(mu + L) I], [-(mu + L) I, 2 I]].  Strictly tighter
    in the LMI than combining the strong-monotonicity and Lipschitz
    bounds with separate multipliers.
    """
    if mu < 0 or mu >= L:
        raise ModelError("sector bound needs 0 <= mu < L")
    if dim < 1:
        raise ModelError("dim must be at least 1")
    return OracleBound(
        _two_block(2.0 * mu * L, -(mu + L), 2.0, dim),
        (("y", dim), ("u", dim)),
        f"sector({mu},{L})",
    )


def affine_equality_bound(E, G, F=None) -> OracleBound:
    """Encodes an exactly known affine oracle u = E y + G d.

    S = M^T M with M = [-E, I, -G] over (y, u, d), so the form is
    ||du - E dy - G dd||^2 and "form <= 0" forces the equality on
    increments.  The coefficient on u is fixed to the identity.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    G = np.atleast_2d(np.asarray(G, dtype=float))
    m, p = E.shape
    if G.shape[0] != m:
        raise ModelError(f"G has {G.shape[0]} rows, expected {m}")
    r = G.shape[1]
    if F is not None:
        F = np.atleast_2d(np.asarray(F, dtype=float))
        if F.shape != (m, m) or not np.allclose(F, np.eye(m)):
            raise ModelError("the coefficient on u is fixed to the identity")
    mat = np.hstack([-E, np.eye(m), -G])
    return OracleBound(
        SymMatrix(mat.T @ mat),
        (("y", p), ("u", m), ("d", r)),
        "affine-equality",
    )


def extend_bound_with_input(bound: OracleBound, r: int) -> OracleBound:
    """Embed a (y, u) bound into the (y, u, d) partition by zero padding."""
    if bound.labels != ("y", "u"):
        raise ModelError(f"expected a (y, u) bound, got partition {bound.labels}")
    if r < 1:
        raise ModelError("r must be at least 1")
    dim = bound.S.dim
    s = np.zeros((dim + r, dim + r))
    s[:dim, :dim] = bound.S.entries
    return OracleBound(
        SymMatrix(s),
        bound.partition + (("d", r),),
        bound.kind,
    )


def stack_bounds(bounds: list[OracleBound]) -> OracleBound:
    """Block-diagonal stacking of per-channel bounds into one bound.

    Models several oracles acting on disjoint sub-channels of the same
    (y, u) interconnection; the stacked channel order is the list order.
    """
    if not bounds:
        raise ModelError("need at least one bound to stack")
    if any(b.labels != ("y", "u") for b in bounds):
        raise ModelError("stacking is defined for (y, u) bounds")
    p = sum(b.size("y") for b in bounds)
    m = sum(b.size("u") for b in bounds)
    s = np.zeros((p + m, p + m))
    y_off = 0
    u_off = p
    for b in bounds:
        py, mu = b.size("y"), b.size("u")
        e = b.S.entries
        s[y_off : y_off + py, y_off : y_off + py] = e[:py, :py]
        s[y_off : y_off + py, u_off : u_off + mu] = e[:py, py:]
        s[u_off : u_off + mu, y_off : y_off + py] = e[py:, :py]
        s[u_off : u_off + mu, u_off : u_off + mu] = e[py:, py:]
        y_off += py
        u_off += mu
    return OracleBound(
        SymMatrix(s),
        (("y", p), ("u", m)),
        "stacked(" + ",".join(b.kind for b in bounds) + ")",
    )


def gradient_descent_model(eta: float, q: int) -> ClosedAlgorithmModel:
    """Gradient descent x+ = x - eta u, y = x against the oracle u = phi(y)."""
    if q < 1:
        raise ModelError("q must be at least 1")
    i = np.eye(q)
    return ClosedAlgorithmModel(i, -eta * i, i, np.zeros((q, q)))


def _nesterov_blocks(eta: float, beta: float, q: int):
    i = np.eye(q)
    z = np.zeros((q, q))
    a = np.block([[(1.0 + beta) * i, -beta * i], [i, z]])
    b = np.vstack([-eta * i, z])
    c = np.hstack([(1.0 + beta) * i, -beta * i])
    return a, b, c


def nesterov_model(eta: float, beta: float, q: int) -> ClosedAlgorithmModel:
    """Accelerated (momentum) method with state (xi_k, xi_{k-1})."""
    if q < 1:
        raise ModelError("q must be at least 1")
    a, b, c = _nesterov_blocks(eta, beta, q)
    return ClosedAlgorithmModel(a, b, c, np.zeros((q, q)))


def open_gradient_descent_gradient_noise(eta: float, q: int) -> OpenAlgorithmModel:
    """Gradient descent with additive oracle noise d; z = x."""
    if q < 1:
        raise ModelError("q must be at least 1")
    i = np.eye(q)
    z = np.zeros((q, q))
    return OpenAlgorithmModel(
        A=i, B1=-eta * i, B2=-eta * i,
        C1=i, D11=z, D12=z,
        C2=i, D21=z, D22=z,
    )


def open_nesterov_gradient_noise(eta: float, beta: float, q: int) -> OpenAlgorithmModel:
    """Accelerated method with the gradient corrupted additively by d.

    The performance output is chosen as z = y (the signal the oracle
    sees); the scheme itself does not single out a z.
    """
    if q < 1:
        raise ModelError("q must be at least 1")
    a, b, c = _nesterov_blocks(eta, beta, q)
    zq = np.zeros((q, q))
    return OpenAlgorithmModel(
        A=a, B1=b, B2=b,
        C1=c, D11=zq, D12=zq,
        C2=c, D21=zq, D22=zq,
    )


def open_nesterov_measurement_noise(eta: float, beta: float, q: int) -> OpenAlgorithmModel:
    """Accelerated method with the gradient evaluated at y + d; z is noise-free."""
    if q < 1:
        raise ModelError("q must be at least 1")
    a, b, c = _nesterov_blocks(eta, beta, q)
    i = np.eye(q)
    zq = np.zeros((q, q))
    return OpenAlgorithmModel(
        A=a, B1=b, B2=np.zeros((2 * q, q)),
        C1=c, D11=zq, D12=i,
        C2=c, D21=zq, D22=zq,
    )
