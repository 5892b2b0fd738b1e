"""LMI assembly and the dense semidefinite feasibility engine.

Each dissipation test is assembled as an affine symmetric-matrix family
M(vars) = constant + sum_i vars_i * coeff_i in the storage entries of P
and the nonnegative oracle multipliers alpha_i, and is required to be
positive semidefinite.

Feasibility is decided by a built-in dense engine: maximize t subject to

    diag(M(vars) - margin*I, P(vars) - p_off*I) - t*I  >= 0,
    alpha >= 0, |vars| <= box_radius, trace(P) = n for homogeneous
    families (the normalization removes their scaling ray),

by logdet-barrier path following (damped Newton on
-eta*t - logdet(...) - barrier terms, eta increased geometrically).
Every answer is re-verified with the independent Jacobi eigensolver from
matrixcore, so engine incompleteness only costs conservatism (a
NotFound), never soundness.  NotFound means "no certificate found",
never "proved infeasible".
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import matrixcore
from .matrixcore import SymMatrix
from .models import (
    ClosedAlgorithmModel,
    ModelError,
    OpenAlgorithmModel,
    OracleBound,
    PlantSupply,
)

__all__ = [
    "FamilyVariable",
    "AffineMatrixFamily",
    "Certificate",
    "NotFound",
    "BisectionStep",
    "ScalarSearchResult",
    "closed_lmi",
    "open_gain_lmi",
    "closed_loop_lmi",
    "solve_feasibility",
    "maximize_rho",
    "bisect_gamma",
    "bisect_mu",
    "VERIFY_TOL",
    "P_FLOOR",
]

VERIFY_TOL = 1e-8
P_FLOOR = 1e-8


@dataclass(frozen=True)
class FamilyVariable:
    name: str
    kind: str  # "storage-entry" | "multiplier" | "free-scalar"
    storage_index: tuple[int, int] | None = None


@dataclass(frozen=True)
class AffineMatrixFamily:
    """Symmetric matrix family affine in scalar decision coordinates."""

    constant: np.ndarray
    coeffs: tuple[np.ndarray, ...]
    variables: tuple[FamilyVariable, ...]
    storage_dim: int

    def __post_init__(self):
        c = np.asarray(self.constant, dtype=float)
        if not np.all(np.isfinite(c)):
            raise ModelError("family constant has non-finite entries")
        c = (c + c.T) / 2.0
        coeffs = []
        for k, m in enumerate(self.coeffs):
            m = np.asarray(m, dtype=float)
            if m.shape != c.shape:
                raise ModelError(f"coefficient {k} shape {m.shape} != {c.shape}")
            if not np.all(np.isfinite(m)):
                raise ModelError(f"coefficient {k} has non-finite entries")
            coeffs.append((m + m.T) / 2.0)
        if len(coeffs) != len(self.variables):
            raise ModelError("one coefficient matrix per variable required")
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "variables", tuple(self.variables))

    @property
    def dim(self) -> int:
        return self.constant.shape[0]

    def value(self, assignment) -> np.ndarray:
        v = np.asarray(assignment, dtype=float).reshape(-1)
        if v.size != len(self.variables):
            raise ModelError(
                f"assignment has {v.size} entries, expected {len(self.variables)}"
            )
        out = self.constant.copy()
        for vi, coeff in zip(v, self.coeffs):
            out += vi * coeff
        return out

    def storage_matrix(self, assignment) -> np.ndarray:
        """Reconstruct P from the storage-entry coordinates."""
        v = np.asarray(assignment, dtype=float).reshape(-1)
        p = np.zeros((self.storage_dim, self.storage_dim))
        for vi, var in zip(v, self.variables):
            if var.kind == "storage-entry":
                i, j = var.storage_index
                p[i, j] = vi
                p[j, i] = vi
        return p


def _storage_variables(n: int) -> list[FamilyVariable]:
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(FamilyVariable(f"P[{i},{j}]", "storage-entry", (i, j)))
    return out


def _storage_basis(var: FamilyVariable, n: int) -> np.ndarray:
    i, j = var.storage_index
    u = np.zeros((n, n))
    u[i, j] = 1.0
    u[j, i] = 1.0
    if i == j:
        u[i, i] = 1.0
    return u


def _check_yu_bounds(bounds, p: int, m: int) -> None:
    for k, b in enumerate(bounds):
        if b.labels != ("y", "u"):
            raise ModelError(f"bound {k} must be on partition (y, u), got {b.labels}")
        if b.size("y") != p or b.size("u") != m:
            raise ModelError(
                f"bound {k} sizes (y={b.size('y')}, u={b.size('u')}) "
                f"do not match model (p={p}, m={m})"
            )


def closed_lmi(
    model: ClosedAlgorithmModel,
    bounds: list[OracleBound],
    gamma: float = 1.0,
) -> AffineMatrixFamily:
    """Dissipation LMI of the closed interconnection with rate weight gamma.

    Family over (x, u) increments, required PSD:

        [gamma*P - A'PA, -A'PB; -B'PA, -B'PB]
        + sum_i alpha_i [C D; 0 I]' S_i [C D; 0 I]

    gamma = 1 is the plain nonexpansiveness test.
    """
    if gamma <= 0:
        raise ModelError("gamma must be positive")
    n, m, p = model.n, model.m, model.p
    _check_yu_bounds(bounds, p, m)
    a, b, c, d = model.A, model.B, model.C, model.D
    t = np.block([[c, d], [np.zeros((m, n)), np.eye(m)]])

    variables = _storage_variables(n)
    coeffs = []
    for var in variables:
        u = _storage_basis(var, n)
        coeffs.append(
            np.block(
                [
                    [gamma * u - a.T @ u @ a, -a.T @ u @ b],
                    [-b.T @ u @ a, -b.T @ u @ b],
                ]
            )
        )
    for k, bound in enumerate(bounds):
        variables.append(FamilyVariable(f"alpha_{k}", "multiplier"))
        coeffs.append(t.T @ bound.S.entries @ t)

    return AffineMatrixFamily(
        constant=np.zeros((n + m, n + m)),
        coeffs=tuple(coeffs),
        variables=tuple(variables),
        storage_dim=n,
    )


def _open_storage_coeff(model: OpenAlgorithmModel, u: np.ndarray, gamma: float = 1.0):
    n, m, r = model.n, model.m, model.r
    j = np.block(
        [
            [np.eye(n), np.zeros((n, m)), np.zeros((n, r))],
            [model.A, model.B1, model.B2],
        ]
    )
    mid = np.block([[gamma * u, np.zeros((n, n))], [np.zeros((n, n)), -u]])
    return j.T @ mid @ j


def open_gain_lmi(
    model: OpenAlgorithmModel,
    bounds: list[OracleBound],
    mu: float,
) -> AffineMatrixFamily:
    """Incremental l2-gain LMI over (x, u, d) increments, required PSD.

    Storage quadratic term plus T' diag(sum_i alpha_i S_i, -I_z, mu^2 I_d) T
    with T stacking the (y, u, z, d) output maps.
    """
    if mu < 0:
        raise ModelError("mu must be nonnegative")
    n, m, p, q, r = model.n, model.m, model.p, model.q, model.r
    _check_yu_bounds(bounds, p, m)
    t = np.block(
        [
            [model.C1, model.D11, model.D12],
            [np.zeros((m, n)), np.eye(m), np.zeros((m, r))],
            [model.C2, model.D21, model.D22],
            [np.zeros((r, n)), np.zeros((r, m)), np.eye(r)],
        ]
    )
    mid_const = np.zeros((p + m + q + r, p + m + q + r))
    mid_const[p + m : p + m + q, p + m : p + m + q] = -np.eye(q)
    mid_const[p + m + q :, p + m + q :] = mu * mu * np.eye(r)

    variables = _storage_variables(n)
    coeffs = [_open_storage_coeff(model, _storage_basis(var, n)) for var in variables]
    for k, bound in enumerate(bounds):
        mid = np.zeros_like(mid_const)
        mid[: p + m, : p + m] = bound.S.entries
        variables.append(FamilyVariable(f"alpha_{k}", "multiplier"))
        coeffs.append(t.T @ mid @ t)

    return AffineMatrixFamily(
        constant=t.T @ mid_const @ t,
        coeffs=tuple(coeffs),
        variables=tuple(variables),
        storage_dim=n,
    )


def closed_loop_lmi(
    model: OpenAlgorithmModel,
    psi_bounds: list[OracleBound],
    plant: PlantSupply,
    gamma: float = 1.0,
) -> AffineMatrixFamily:
    """Interconnection LMI over (x, u, d) with plant supply subtracted.

    Storage quadratic term plus
    sum_i alpha_i T_psi' S_psi_i T_psi - T_p' S_p T_p, required PSD,
    where T_psi maps (x, u, d) -> (y, u, d) and T_p maps (x, u, d) ->
    (d, z) under the identifications zeta = d, nu = z.  gamma < 1 is an
    experimental rate-weighted variant (the base result only concludes
    nonexpansiveness).
    """
    if gamma <= 0:
        raise ModelError("gamma must be positive")
    n, m, p, q, r = model.n, model.m, model.p, model.q, model.r
    if plant.r != r or plant.q != q:
        raise ModelError(
            f"plant supply sizes (r={plant.r}, q={plant.q}) do not match "
            f"model (r={r}, q={q})"
        )
    for k, b in enumerate(psi_bounds):
        if b.labels != ("y", "u", "d"):
            raise ModelError(
                f"psi bound {k} must be on partition (y, u, d), got {b.labels}"
            )
        if (b.size("y"), b.size("u"), b.size("d")) != (p, m, r):
            raise ModelError(f"psi bound {k} sizes do not match model (p, m, r)")

    t_psi = np.block(
        [
            [model.C1, model.D11, model.D12],
            [np.zeros((m, n)), np.eye(m), np.zeros((m, r))],
            [np.zeros((r, n)), np.zeros((r, m)), np.eye(r)],
        ]
    )
    t_p = np.block(
        [
            [np.zeros((r, n)), np.zeros((r, m)), np.eye(r)],
            [model.C2, model.D21, model.D22],
        ]
    )

    variables = _storage_variables(n)
    coeffs = [
        _open_storage_coeff(model, _storage_basis(var, n), gamma) for var in variables
    ]
    for k, bound in enumerate(psi_bounds):
        variables.append(FamilyVariable(f"alpha_{k}", "multiplier"))
        coeffs.append(t_psi.T @ bound.S.entries @ t_psi)

    return AffineMatrixFamily(
        constant=-t_p.T @ plant.S_p.entries @ t_p,
        coeffs=tuple(coeffs),
        variables=tuple(variables),
        storage_dim=n,
    )


@dataclass(frozen=True)
class Certificate:
    """A feasibility certificate, re-verified by the Jacobi eigensolver."""

    P: SymMatrix
    multipliers: dict[str, float]
    scalar_kind: str | None
    scalar_value: float | None
    lmi_min_eig: float
    p_min_eig: float
    p_max_eig: float
    kappa: float
    assignment: np.ndarray

    def with_scalar(self, kind: str, value: float) -> "Certificate":
        return dataclasses.replace(self, scalar_kind=kind, scalar_value=value)


@dataclass(frozen=True)
class NotFound:
    """No certificate was found.  This is not a proof of infeasibility."""

    best_margin: float
    reason: str
    iterations: int


@dataclass(frozen=True)
class BisectionStep:
    value: float
    feasible: bool
    margin: float


@dataclass(frozen=True)
class ScalarSearchResult:
    kind: str
    value: float
    certificate: Certificate
    trace: tuple[BisectionStep, ...]


def _certificate_from_assignment(
    family: AffineMatrixFamily, v: np.ndarray, margin: float
) -> Certificate | None:
    """Re-verify an assignment with the Jacobi path; None if it fails."""
    m_val = SymMatrix(family.value(v))
    lmi_min = matrixcore.min_eig(m_val)
    if lmi_min < margin - VERIFY_TOL:
        return None
    p_mat = SymMatrix(family.storage_matrix(v))
    p_eigs, _ = matrixcore.sym_eig(p_mat)
    p_min, p_max = float(p_eigs[0]), float(p_eigs[-1])
    if p_min < P_FLOOR:
        return None
    multipliers = {
        var.name: float(vi)
        for vi, var in zip(v, family.variables)
        if var.kind == "multiplier"
    }
    return Certificate(
        P=p_mat,
        multipliers=multipliers,
        scalar_kind=None,
        scalar_value=None,
        lmi_min_eig=lmi_min,
        p_min_eig=p_min,
        p_max_eig=p_max,
        kappa=p_max / p_min,
        assignment=np.array(v, dtype=float),
    )


class _BarrierProblem:
    """max t s.t. G(v) - t I >= 0 plus scalar/box/trace constraints.

    G(v) = diag(M(v) - margin I, P(v) - p_off I).  Scalar barriers keep
    multipliers positive and every coordinate inside the box.
    """

    def __init__(self, family: AffineMatrixFamily, margin: float, box_radius: float):
        self.family = family
        self.nvars = len(family.variables)
        self.margin = margin
        self.box = box_radius
        self.t_cap = 1e9
        self.storage_idx = [
            k
            for k, var in enumerate(family.variables)
            if var.kind == "storage-entry"
        ]
        self.has_storage = bool(self.storage_idx)
        self.p_off = 2.0 * P_FLOOR
        dim = family.dim
        sdim = family.storage_dim if self.has_storage else 0
        self.gdim = dim + sdim
        # Per-variable block-diagonal coefficient of G.
        self.gcoeffs = []
        for k in range(self.nvars):
            g = np.zeros((self.gdim, self.gdim))
            g[:dim, :dim] = family.coeffs[k]
            if self.has_storage and family.variables[k].kind == "storage-entry":
                g[dim:, dim:] = _storage_basis(family.variables[k], sdim)
            self.gcoeffs.append(g)
        self.gconst = np.zeros((self.gdim, self.gdim))
        self.gconst[:dim, :dim] = family.constant - margin * np.eye(dim)
        if self.has_storage:
            self.gconst[dim:, dim:] = -self.p_off * np.eye(sdim)
        self.homogeneous = not np.any(family.constant)
        # trace(P) = n for homogeneous families (removes the scaling ray)
        self.trace_row = None
        if self.has_storage and self.homogeneous:
            row = np.zeros(self.nvars + 1)
            for k in self.storage_idx:
                i, j = family.variables[k].storage_index
                if i == j:
                    row[k] = 1.0
            self.trace_row = row
            self.trace_rhs = float(family.storage_dim)

    def g_matrix(self, v: np.ndarray) -> np.ndarray:
        g = self.gconst.copy()
        for vi, coeff in zip(v, self.gcoeffs):
            g += vi * coeff
        return g

    def start(self) -> np.ndarray:
        v = np.zeros(self.nvars)
        for k, var in enumerate(self.family.variables):
            if var.kind == "multiplier":
                v[k] = 1.0
            elif var.kind == "storage-entry":
                i, j = var.storage_index
                v[k] = 1.0 if i == j else 0.0
        g = self.g_matrix(v)
        t0 = float(np.linalg.eigvalsh(g)[0]) - 1.0
        return np.append(v, t0)

    def barrier_terms(self, w: np.ndarray):
        """Scalar barrier values as (residual list); None if violated."""
        v, t = w[:-1], w[-1]
        residuals = []
        for k, var in enumerate(self.family.variables):
            if var.kind == "multiplier":
                residuals.append((k, v[k]))
            residuals.append((k, self.box - v[k]))
            residuals.append((k, self.box + v[k]))
        residuals.append((self.nvars, self.t_cap - t))
        return residuals

    def is_interior(self, w: np.ndarray) -> bool:
        v, t = w[:-1], w[-1]
        z = self.g_matrix(v) - t * np.eye(self.gdim)
        try:
            np.linalg.cholesky(z)
        except np.linalg.LinAlgError:
            return False
        for k, var in enumerate(self.family.variables):
            if var.kind == "multiplier" and v[k] <= 0:
                return False
            if abs(v[k]) >= self.box:
                return False
        return t < self.t_cap

    def objective(self, w: np.ndarray, eta: float) -> float:
        v, t = w[:-1], w[-1]
        z = self.g_matrix(v) - t * np.eye(self.gdim)
        try:
            chol = np.linalg.cholesky(z)
        except np.linalg.LinAlgError:
            return np.inf
        f = -eta * t - 2.0 * float(np.sum(np.log(np.diag(chol))))
        for k, var in enumerate(self.family.variables):
            if var.kind == "multiplier":
                if v[k] <= 0:
                    return np.inf
                f -= np.log(v[k])
            if self.box - abs(v[k]) <= 0:
                return np.inf
            f -= np.log(self.box - v[k]) + np.log(self.box + v[k])
        if self.t_cap - t <= 0:
            return np.inf
        f -= np.log(self.t_cap - t)
        return f

    def grad_hess(self, w: np.ndarray, eta: float):
        v, t = w[:-1], w[-1]
        nall = self.nvars + 1
        z = self.g_matrix(v) - t * np.eye(self.gdim)
        zinv = np.linalg.inv(z)
        zinv = (zinv + zinv.T) / 2.0
        # d/dw_i (-logdet Z) = -tr(Zinv dZ/dw_i); dZ/dt = -I
        sg = [zinv @ gc for gc in self.gcoeffs]
        grad = np.zeros(nall)
        hess = np.zeros((nall, nall))
        for i in range(self.nvars):
            grad[i] = -np.trace(sg[i])
            for j in range(i, self.nvars):
                hij = float(np.sum(sg[i] * sg[j].T))
                hess[i, j] = hij
                hess[j, i] = hij
            hit = -float(np.sum(sg[i] * zinv.T))
            hess[i, -1] = hit
            hess[-1, i] = hit
        grad[-1] = -eta + float(np.trace(zinv))
        hess[-1, -1] = float(np.sum(zinv * zinv.T))
        for k, var in enumerate(self.family.variables):
            if var.kind == "multiplier":
                grad[k] += -1.0 / v[k]
                hess[k, k] += 1.0 / v[k] ** 2
            grad[k] += 1.0 / (self.box - v[k]) - 1.0 / (self.box + v[k])
            hess[k, k] += 1.0 / (self.box - v[k]) ** 2 + 1.0 / (self.box + v[k]) ** 2
        grad[-1] += 1.0 / (self.t_cap - t)
        hess[-1, -1] += 1.0 / (self.t_cap - t) ** 2
        return grad, hess

    def barrier_complexity(self) -> float:
        nu = float(self.gdim) + 1.0  # PSD block + t cap
        for var in self.family.variables:
            nu += 2.0  # box
            if var.kind == "multiplier":
                nu += 1.0
        return nu


def _newton_stage(prob: _BarrierProblem, w: np.ndarray, eta: float) -> np.ndarray:
    """Damped Newton minimization of the stage objective, with optional
    trace-equality constraint."""
    for _ in range(60):
        grad, hess = prob.grad_hess(w, eta)
        n = grad.size
        hess = hess + 1e-12 * np.eye(n)
        if prob.trace_row is not None:
            kkt = np.zeros((n + 1, n + 1))
            kkt[:n, :n] = hess
            kkt[:n, -1] = prob.trace_row
            kkt[-1, :n] = prob.trace_row
            rhs = np.zeros(n + 1)
            rhs[:n] = -grad
            rhs[-1] = prob.trace_rhs - float(prob.trace_row @ w)
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                break
            step = sol[:n]
        else:
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                break
        decrement = float(-grad @ step)
        if decrement < 0:
            break
        f0 = prob.objective(w, eta)
        alpha = 1.0
        accepted = False
        for _ in range(60):
            w_new = w + alpha * step
            f_new = prob.objective(w_new, eta)
            if f_new < f0 - 1e-4 * alpha * decrement + 1e-14 * abs(f0):
                w = w_new
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        if decrement / 2.0 < 1e-12:
            break
    return w


def solve_feasibility(
    family: AffineMatrixFamily,
    margin: float = 0.0,
    *,
    box_radius: float = 100.0,
    seed: int = 0,
) -> Certificate | NotFound:
    """Search for vars with M(vars) >= (margin - tol) I and P > 0.

    Success requires, re-verified by the independent Jacobi eigensolver,
    lambda_min(M(vars)) >= margin - 1e-8 and lambda_min(P) >= 1e-8
    (with trace(P) = n for homogeneous families).  The engine is a
    deterministic barrier method; ``seed`` is accepted for interface
    stability but has no effect.
    """
    if margin < 0:
        raise ModelError("margin must be nonnegative")
    del seed
    prob = _BarrierProblem(family, margin, box_radius)
    w = prob.start()
    if prob.trace_row is not None:
        # project the start onto the trace hyperplane (diagonal entries)
        row = prob.trace_row
        w = w + row * (prob.trace_rhs - float(row @ w)) / float(row @ row)
        if not prob.is_interior(w):
            v = w[:-1]
            w[-1] = float(np.linalg.eigvalsh(prob.g_matrix(v))[0]) - 1.0

    nu = prob.barrier_complexity()
    eta = 1.0
    stages = 0
    best_t = -np.inf
    best_v = w[:-1].copy()
    while eta * 1e-12 < nu and stages < 80:
        stages += 1
        w = _newton_stage(prob, w, eta)
        t = float(w[-1])
        if t > best_t:
            best_t = t
            best_v = w[:-1].copy()
        # t is within nu/eta of the true optimum at the stage minimizer
        if t + nu / eta < -VERIFY_TOL:
            return NotFound(
                best_margin=best_t,
                reason="barrier upper bound below tolerance",
                iterations=stages,
            )
        if t >= -0.25 * VERIFY_TOL:
            cert = _certificate_from_assignment(family, w[:-1], margin)
            if cert is not None:
                return cert
        eta *= 8.0

    cert = _certificate_from_assignment(family, best_v, margin)
    if cert is not None:
        return cert
    return NotFound(
        best_margin=best_t,
        reason="no verified certificate at the end of the barrier path",
        iterations=stages,
    )


def maximize_rho(
    model: ClosedAlgorithmModel,
    bounds: list[OracleBound],
    tol: float = 1e-6,
    *,
    rho_cap: float = 2.0**20,
) -> ScalarSearchResult | NotFound:
    """Largest rho with closed_lmi(gamma=1) >= rho I, by bisection.

    rho enters as the requested feasibility margin on the full (n + m)
    block; feasibility is monotone nonincreasing in rho.
    """
    if tol <= 0:
        raise ModelError("tol must be positive")
    family = closed_lmi(model, bounds, gamma=1.0)
    trace: list[BisectionStep] = []

    def attempt(rho: float):
        res = solve_feasibility(family, margin=rho)
        feasible = isinstance(res, Certificate)
        trace.append(
            BisectionStep(
                rho, feasible, res.lmi_min_eig if feasible else res.best_margin
            )
        )
        return res

    base = attempt(0.0)
    if isinstance(base, NotFound):
        return base
    probe = attempt(tol)
    if isinstance(probe, NotFound):
        return ScalarSearchResult("rho", 0.0, base.with_scalar("rho", 0.0), tuple(trace))
    lo, lo_cert = tol, probe
    hi = 2.0 * tol
    while hi <= rho_cap:
        res = attempt(hi)
        if isinstance(res, NotFound):
            break
        lo, lo_cert = hi, res
        hi *= 2.0
    else:
        return ScalarSearchResult("rho", lo, lo_cert.with_scalar("rho", lo), tuple(trace))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        res = attempt(mid)
        if isinstance(res, Certificate):
            lo, lo_cert = mid, res
        else:
            hi = mid
    return ScalarSearchResult("rho", lo, lo_cert.with_scalar("rho", lo), tuple(trace))


def bisect_gamma(
    model: ClosedAlgorithmModel,
    bounds: list[OracleBound],
    tol: float = 1e-6,
) -> ScalarSearchResult | NotFound:
    """Smallest certifiable contraction rate gamma in (0, 1].

    gamma enters the family only as +gamma*P on the state block with
    P >= 0, so feasibility is monotone nondecreasing in gamma and plain
    bisection applies.  NotFound if even gamma = 1 is not certified.
    """
    if tol <= 0:
        raise ModelError("tol must be positive")
    trace: list[BisectionStep] = []

    def attempt(gamma: float):
        res = solve_feasibility(closed_lmi(model, bounds, gamma=gamma))
        feasible = isinstance(res, Certificate)
        trace.append(
            BisectionStep(
                gamma, feasible, res.lmi_min_eig if feasible else res.best_margin
            )
        )
        return res

    top = attempt(1.0)
    if isinstance(top, NotFound):
        return top
    lo, hi, cert = 0.0, 1.0, top
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        res = attempt(mid)
        if isinstance(res, Certificate):
            hi, cert = mid, res
        else:
            lo = mid
    return ScalarSearchResult("gamma", hi, cert.with_scalar("gamma", hi), tuple(trace))


def bisect_mu(
    model: OpenAlgorithmModel,
    bounds: list[OracleBound],
    tol: float = 1e-6,
    *,
    mu_cap: float = 2.0**60,
) -> ScalarSearchResult | NotFound:
    """Smallest certifiable incremental l2 gain mu >= 0.

    mu enters the family as +mu^2 on the d block (a PSD direction), so
    feasibility is monotone nondecreasing in mu; the upper bracket is
    doubled from 1 until feasible or the cap is hit.
    """
    if tol <= 0:
        raise ModelError("tol must be positive")
    trace: list[BisectionStep] = []

    def attempt(mu: float):
        res = solve_feasibility(open_gain_lmi(model, bounds, mu=mu))
        feasible = isinstance(res, Certificate)
        trace.append(
            BisectionStep(
                mu, feasible, res.lmi_min_eig if feasible else res.best_margin
            )
        )
        return res

    at_zero = attempt(0.0)
    if isinstance(at_zero, Certificate):
        return ScalarSearchResult("mu", 0.0, at_zero.with_scalar("mu", 0.0), tuple(trace))
    lo = 0.0
    hi = 1.0
    res = attempt(hi)
    while isinstance(res, NotFound) and hi < mu_cap:
        lo = hi
        hi *= 2.0
        res = attempt(hi)
    if isinstance(res, NotFound):
        return NotFound(
            best_margin=res.best_margin,
            reason=f"no feasible mu up to {mu_cap}",
            iterations=res.iterations,
        )
    cert = res
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        res = attempt(mid)
        if isinstance(res, Certificate):
            hi, cert = mid, res
        else:
            lo = mid
    return ScalarSearchResult("mu", hi, cert.with_scalar("mu", hi), tuple(trace))
