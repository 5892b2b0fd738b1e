"""Executable oracles, trajectory rollouts, and empirical validators.

Every certificate produced by the LMI path can be cross-checked here
against simulated incremental trajectories: contraction ratios, energy
gains, oracle-bound conformance, and composite plant/algorithm storage
decrease.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrixcore import SymMatrix, min_eig
from .models import (
    ClosedAlgorithmModel,
    ModelError,
    OpenAlgorithmModel,
    OracleBound,
)

__all__ = [
    "ExecutableOracle",
    "Trajectory",
    "LinearPlant",
    "SimulationError",
    "eval_oracle",
    "rollout",
    "empirical_contraction",
    "empirical_gain",
    "check_oracle_bound",
    "spectral_radius",
    "composite_storage_check",
]

REPLAY_TOL = 1e-12


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class ExecutableOracle:
    """A concrete oracle map u = phi(y) or u = psi(y, d).

    Kinds and parameters:
      quadratic-gradient: params Q (symmetric PSD), b; u = Q y + b.
      soft-threshold: param lam; u = sign(y) * max(|y| - lam, 0).
      box-projection: params lo, hi (lo < hi componentwise); u = clamp(y).
      linear: param s; u = s * y.
      affine: params E, G; u = E y + G d.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        kinds = {
            "quadratic-gradient",
            "soft-threshold",
            "box-projection",
            "linear",
            "affine",
        }
        if self.kind not in kinds:
            raise SimulationError(f"unknown oracle kind {self.kind!r}")
        p = dict(self.params)
        if self.kind == "quadratic-gradient":
            q = np.atleast_2d(np.asarray(p["Q"], dtype=float))
            if q.shape[0] != q.shape[1] or not np.allclose(q, q.T):
                raise SimulationError("Q must be square symmetric")
            if np.linalg.eigvalsh(q)[0] < 0:
                raise SimulationError("Q must be positive semidefinite")
            p["Q"] = q
            p["b"] = np.asarray(p.get("b", np.zeros(q.shape[0])), dtype=float).reshape(-1)
            if p["b"].size != q.shape[0]:
                raise SimulationError("b size must match Q")
        elif self.kind == "soft-threshold":
            if float(p["lam"]) < 0:
                raise SimulationError("lam must be nonnegative")
            p["lam"] = float(p["lam"])
        elif self.kind == "box-projection":
            lo = np.asarray(p["lo"], dtype=float).reshape(-1)
            hi = np.asarray(p["hi"], dtype=float).reshape(-1)
            if lo.shape != hi.shape or np.any(lo >= hi):
                raise SimulationError("box-projection needs lo < hi componentwise")
            p["lo"], p["hi"] = lo, hi
        elif self.kind == "linear":
            p["s"] = float(p["s"])
        elif self.kind == "affine":
            e = np.atleast_2d(np.asarray(p["E"], dtype=float))
            g = np.atleast_2d(np.asarray(p["G"], dtype=float))
            if g.shape[0] != e.shape[0]:
                raise SimulationError("E and G row counts must match")
            p["E"], p["G"] = e, g
        object.__setattr__(self, "params", p)


def eval_oracle(oracle: ExecutableOracle, y, d=None) -> np.ndarray:
    """Evaluate u = phi(y) (or psi(y, d) for the affine kind)."""
    y = np.asarray(y, dtype=float).reshape(-1)
    p = oracle.params
    if oracle.kind == "quadratic-gradient":
        if y.size != p["Q"].shape[0]:
            raise SimulationError("y size does not match Q")
        return p["Q"] @ y + p["b"]
    if oracle.kind == "soft-threshold":
        return np.sign(y) * np.maximum(np.abs(y) - p["lam"], 0.0)
    if oracle.kind == "box-projection":
        if y.size != p["lo"].size:
            raise SimulationError("y size does not match the box")
        return np.clip(y, p["lo"], p["hi"])
    if oracle.kind == "linear":
        return p["s"] * y
    # affine
    if y.size != p["E"].shape[1]:
        raise SimulationError("y size does not match E")
    d = np.zeros(p["G"].shape[1]) if d is None else np.asarray(d, dtype=float).reshape(-1)
    if d.size != p["G"].shape[1]:
        raise SimulationError("d size does not match G")
    return p["E"] @ y + p["G"] @ d


@dataclass(frozen=True)
class Trajectory:
    """Signals of one rollout; states has K+1 rows, the rest K rows."""

    states: np.ndarray
    inputs: np.ndarray  # oracle outputs u
    outputs: np.ndarray  # oracle inputs y
    disturbances: np.ndarray | None = None
    performance: np.ndarray | None = None  # z

    @property
    def horizon(self) -> int:
        return self.states.shape[0] - 1


def _replay_check(model, traj: Trajectory) -> None:
    x, u = traj.states, traj.inputs
    for k in range(traj.horizon):
        if isinstance(model, ClosedAlgorithmModel):
            x_next = model.A @ x[k] + model.B @ u[k]
            y_k = model.C @ x[k] + model.D @ u[k]
        else:
            d_k = traj.disturbances[k]
            x_next = model.A @ x[k] + model.B1 @ u[k] + model.B2 @ d_k
            y_k = model.C1 @ x[k] + model.D11 @ u[k] + model.D12 @ d_k
        if np.max(np.abs(x_next - x[k + 1])) > REPLAY_TOL:
            raise SimulationError(f"replay check failed at step {k} (state)")
        if np.max(np.abs(y_k - traj.outputs[k])) > REPLAY_TOL:
            raise SimulationError(f"replay check failed at step {k} (output)")


def rollout(model, oracle: ExecutableOracle, x0, d_signal=None, K: int = 100) -> Trajectory:
    """Simulate K steps of the algorithm/oracle interconnection.

    Requires D11 = 0 (no algebraic loop): y_k is computed from the state
    (and disturbance), then u_k = oracle(y_k), then the state advances.
    """
    if K < 0:
        raise SimulationError("K must be nonnegative")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    is_open = isinstance(model, OpenAlgorithmModel)
    if is_open:
        if np.any(model.D11):
            raise SimulationError("algebraic loop: D11 must be zero for rollouts")
        if x0.size != model.n:
            raise SimulationError(f"x0 size {x0.size} != state dim {model.n}")
        if d_signal is None:
            d_signal = np.zeros((K, model.r))
        d_signal = np.asarray(d_signal, dtype=float).reshape(-1, model.r)
        if d_signal.shape[0] < K:
            raise SimulationError("d_signal shorter than the horizon")
    else:
        if np.any(model.D):
            raise SimulationError("algebraic loop: D must be zero for rollouts")
        if x0.size != model.n:
            raise SimulationError(f"x0 size {x0.size} != state dim {model.n}")

    states = np.zeros((K + 1, model.n))
    states[0] = x0
    inputs = np.zeros((K, model.m))
    outputs = np.zeros((K, model.p))
    dists = np.zeros((K, model.r)) if is_open else None
    perf = np.zeros((K, model.q)) if is_open else None
    for k in range(K):
        x = states[k]
        if is_open:
            d = d_signal[k]
            y = model.C1 @ x + model.D12 @ d
            u = eval_oracle(oracle, y, d if oracle.kind == "affine" else None)
            states[k + 1] = model.A @ x + model.B1 @ u + model.B2 @ d
            perf[k] = model.C2 @ x + model.D21 @ u + model.D22 @ d
            dists[k] = d
        else:
            y = model.C @ x
            u = eval_oracle(oracle, y)
            states[k + 1] = model.A @ x + model.B @ u
        inputs[k] = u
        outputs[k] = y
    traj = Trajectory(states, inputs, outputs, dists, perf)
    _replay_check(model, traj)
    return traj


def empirical_contraction(
    model: ClosedAlgorithmModel,
    oracle: ExecutableOracle,
    V: SymMatrix,
    trials: int = 100,
    K: int = 200,
    seed: int = 0,
) -> float:
    """Worst observed one-step ratio V(dx_{k+1}) / V(dx_k).

    Each trial simulates two trajectories from independent random
    initial states; steps with V(dx_k) < 1e-14 are skipped.  Returns 0
    if no step is valid.
    """
    if min_eig(V) <= 0:
        raise SimulationError("V must be positive definite")
    worst = 0.0
    seen = False
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        x1 = rng.standard_normal(model.n)
        x2 = rng.standard_normal(model.n)
        t1 = rollout(model, oracle, x1, K=K)
        t2 = rollout(model, oracle, x2, K=K)
        dx = t1.states - t2.states
        vals = np.array([V.quad_form(dx[k]) for k in range(K + 1)])
        for k in range(K):
            if vals[k] < 1e-14:
                continue
            seen = True
            worst = max(worst, vals[k + 1] / vals[k])
    return worst if seen else 0.0


def empirical_gain(
    model: OpenAlgorithmModel,
    oracle: ExecutableOracle,
    trials: int = 50,
    K: int = 500,
    seed: int = 0,
) -> float:
    """Worst sqrt(sum ||dz||^2 / sum ||dd||^2) over random disturbance
    increments with dx0 = 0 (both trajectories start at the same state).

    Disturbance differences are supported on the first K//2 steps so the
    finite sums approximate the infinite-horizon gain inequality.
    """
    if K < 1:
        raise SimulationError("K must be at least 1")
    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        x0 = rng.standard_normal(model.n)
        support = max(1, K // 2)
        d1 = np.zeros((K, model.r))
        d2 = np.zeros((K, model.r))
        d1[:support] = rng.standard_normal((support, model.r))
        d2[:support] = rng.standard_normal((support, model.r))
        t1 = rollout(model, oracle, x0, d_signal=d1, K=K)
        t2 = rollout(model, oracle, x0, d_signal=d2, K=K)
        num = float(np.sum((t1.performance - t2.performance) ** 2))
        den = float(np.sum((d1 - d2) ** 2))
        if den < 1e-14:
            continue
        worst = max(worst, np.sqrt(num / den))
    return worst


def check_oracle_bound(
    oracle: ExecutableOracle,
    bound: OracleBound,
    samples: int = 1000,
    seed: int = 0,
) -> tuple[bool, float]:
    """Empirically test the oracle against a quadratic bound.

    Evaluates the S-form on random increment pairs; passes iff the worst
    form value is <= 1e-10 (the bound convention is form <= 0).
    Returns (passed, worst_value).
    """
    rng = np.random.default_rng(seed)
    p = bound.size("y")
    r = bound.size("d") if "d" in bound.labels else 0
    worst = -np.inf
    for _ in range(samples):
        y1 = rng.standard_normal(p)
        y2 = rng.standard_normal(p)
        if r:
            d1 = rng.standard_normal(r)
            d2 = rng.standard_normal(r)
            u1 = eval_oracle(oracle, y1, d1 if oracle.kind == "affine" else None)
            u2 = eval_oracle(oracle, y2, d2 if oracle.kind == "affine" else None)
            val = bound.form(y1 - y2, u1 - u2, d1 - d2)
        else:
            u1 = eval_oracle(oracle, y1)
            u2 = eval_oracle(oracle, y2)
            val = bound.form(y1 - y2, u1 - u2)
        worst = max(worst, val)
    return worst <= 1e-10, float(worst)


def _char_poly(a: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients via Faddeev-LeVerrier."""
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def spectral_radius(a) -> float:
    """Magnitude of the dominant eigenvalue of a square matrix.

    Small matrices (dim <= 4) go through the characteristic polynomial
    (exact complex-pair handling); larger ones use power iteration with
    a random start, to tolerance 1e-9.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] != a.shape[1]:
        raise SimulationError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise SimulationError("matrix must be finite")
    n = a.shape[0]
    if n <= 4:
        roots = np.roots(_char_poly(a))
        return float(np.max(np.abs(roots))) if roots.size else 0.0
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    # power iteration on A'A gives sigma_max; use A^k growth for rho:
    # rho(A) = lim ||A^k v||^(1/k); iterate with periodic renormalization.
    w = v.copy()
    prev = 0.0
    for k in range(1, 20000):
        w = a @ w
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        w /= norm
        est = norm
        if k > 10 and abs(est - prev) <= 1e-9 * max(1.0, abs(est)):
            break
        prev = est
    return float(est)


@dataclass(frozen=True)
class LinearPlant:
    """Explicit linear plant xi+ = A xi + B nu, zeta = C xi, with a
    user-supplied incremental storage matrix P_p."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    P_p: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = a.shape[0]
        b = np.atleast_2d(np.asarray(self.B, dtype=float))
        c = np.atleast_2d(np.asarray(self.C, dtype=float))
        pp = np.atleast_2d(np.asarray(self.P_p, dtype=float))
        if a.shape != (n, n) or b.shape[0] != n or c.shape[1] != n:
            raise SimulationError("plant matrix shapes are inconsistent")
        if pp.shape != (n, n):
            raise SimulationError("P_p must be square of the plant state dim")
        if min_eig(SymMatrix(pp)) <= 0:
            raise SimulationError("P_p must be positive definite")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "P_p", (pp + pp.T) / 2.0)


def composite_storage_check(
    plant: LinearPlant,
    model: OpenAlgorithmModel,
    cert,
    oracle: ExecutableOracle,
    trials: int = 100,
    K: int = 200,
    seed: int = 0,
    step_tol: float = 1e-9,
) -> tuple[bool, float]:
    """Simulate the plant/algorithm loop on incremental pairs and check
    that V_c = V_p(d xi) + V(d x) never increases by more than step_tol.

    The loop closes with zeta = d (plant output feeds the algorithm's
    disturbance channel) and nu = z (algorithm performance output drives
    the plant).  Returns (passed, worst_increase).
    """
    if plant.B.shape[1] != model.q or plant.C.shape[0] != model.r:
        raise SimulationError(
            "plant channel sizes do not match the algorithm model (q, r)"
        )
    if np.any(model.D11):
        raise SimulationError("algebraic loop: D11 must be zero")
    if np.any(model.D22):
        raise SimulationError("algebraic loop through the plant: D22 must be zero")
    p_alg = cert.P.entries
    n_p = plant.A.shape[0]
    worst = -np.inf
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        xi = [rng.standard_normal(n_p), rng.standard_normal(n_p)]
        x = [rng.standard_normal(model.n), rng.standard_normal(model.n)]
        vc_prev = None
        for k in range(K + 1):
            dxi = xi[0] - xi[1]
            dx = x[0] - x[1]
            vc = float(dxi @ plant.P_p @ dxi + dx @ p_alg @ dx)
            if vc_prev is not None:
                worst = max(worst, vc - vc_prev)
            vc_prev = vc
            if k == K:
                break
            for i in range(2):
                d = plant.C @ xi[i]
                y = model.C1 @ x[i] + model.D12 @ d
                u = eval_oracle(oracle, y, d if oracle.kind == "affine" else None)
                z = model.C2 @ x[i] + model.D21 @ u + model.D22 @ d
                xi[i] = plant.A @ xi[i] + plant.B @ z
                x[i] = model.A @ x[i] + model.B1 @ u + model.B2 @ d
    if worst == -np.inf:
        worst = 0.0
    return worst <= step_tol, float(worst)
