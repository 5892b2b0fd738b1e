"""User-facing certification procedures with human-readable conclusions.

Each procedure assembles the relevant dissipation LMI, runs the
feasibility engine or a scalar bisection, and wraps the outcome in an
AnalysisReport carrying the certificate, the overshoot constant, and the
full solver diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lmi
from .lmi import (
    BisectionStep,
    Certificate,
    NotFound,
    ScalarSearchResult,
    bisect_gamma,
    bisect_mu,
    closed_lmi,
    closed_loop_lmi,
    maximize_rho,
    solve_feasibility,
)
from .models import (
    ClosedAlgorithmModel,
    ModelError,
    OpenAlgorithmModel,
    OracleBound,
    PlantSupply,
)

__all__ = [
    "AnalysisReport",
    "certify_nonexpansive",
    "certify_rate",
    "certify_margin",
    "certify_gain",
    "certify_closed_loop",
]


@dataclass(frozen=True)
class AnalysisReport:
    """Outcome of one certification run.

    verdict is one of: nonexpansive, contracting, exponential,
    gain, closed-loop-nonexpansive, not-certified.  scalar carries the
    certified rate gamma, margin rho, or gain mu when applicable.
    overshoot is Corollary-1's kappa = lambda_max(P)/lambda_min(P): the
    certified trajectory bound is ||dx_k||^2 <= gamma^k * kappa *
    ||dx_0||^2.  conclusion is a one-line human-readable statement.
    """

    verdict: str
    certificate: Certificate | None
    scalar: float | None
    overshoot: float | None
    conclusion: str
    diagnostics: dict
    trace: tuple[BisectionStep, ...] = ()

    def __post_init__(self):
        allowed = {
            "nonexpansive",
            "contracting",
            "exponential",
            "gain",
            "closed-loop-nonexpansive",
            "not-certified",
        }
        if self.verdict not in allowed:
            raise ModelError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "exponential":
            if self.certificate is None or self.scalar is None or self.scalar >= 1:
                raise ModelError("exponential verdict requires a certificate with gamma < 1")
        if (self.overshoot is not None) != (self.certificate is not None):
            raise ModelError("overshoot is reported iff a certificate is present")


def _not_certified(res: NotFound, what: str) -> AnalysisReport:
    return AnalysisReport(
        verdict="not-certified",
        certificate=None,
        scalar=None,
        overshoot=None,
        conclusion=f"no {what} certificate found ({res.reason}); "
        "this is not a proof that none exists",
        diagnostics={
            "best_margin": res.best_margin,
            "iterations": res.iterations,
            "reason": res.reason,
        },
    )


def _diag(cert: Certificate) -> dict:
    return {
        "lmi_min_eig": cert.lmi_min_eig,
        "p_min_eig": cert.p_min_eig,
        "p_max_eig": cert.p_max_eig,
        "multipliers": dict(cert.multipliers),
    }


def certify_nonexpansive(
    model: ClosedAlgorithmModel, bounds: list[OracleBound]
) -> AnalysisReport:
    """Certify V(dx_{k+1}) <= V(dx_k) for all conforming oracles."""
    res = solve_feasibility(closed_lmi(model, bounds, gamma=1.0))
    if isinstance(res, NotFound):
        return _not_certified(res, "nonexpansiveness")
    cert = res.with_scalar("gamma", 1.0)
    return AnalysisReport(
        verdict="nonexpansive",
        certificate=cert,
        scalar=1.0,
        overshoot=cert.kappa,
        conclusion="the algorithm is incrementally nonexpansive in the "
        "certified quadratic metric",
        diagnostics=_diag(cert),
    )


def certify_rate(
    model: ClosedAlgorithmModel,
    bounds: list[OracleBound],
    tol: float = 1e-6,
) -> AnalysisReport:
    """Certify the smallest exponential rate gamma* by bisection.

    The certified trajectory bound is
    ||dx_k||^2 <= gamma*^k * kappa * ||dx_0||^2 with
    kappa = lambda_max(P)/lambda_min(P).
    """
    res = bisect_gamma(model, bounds, tol=tol)
    if isinstance(res, NotFound):
        return _not_certified(res, "contraction-rate")
    cert = res.certificate
    verdict = "exponential" if res.value < 1.0 else "nonexpansive"
    return AnalysisReport(
        verdict=verdict,
        certificate=cert,
        scalar=res.value,
        overshoot=cert.kappa,
        conclusion=f"exponential contraction at rate gamma = {res.value:.9g}; "
        f"||dx_k||^2 <= gamma^k * {cert.kappa:.6g} * ||dx_0||^2"
        if verdict == "exponential"
        else "only nonexpansiveness (gamma = 1) was certified",
        diagnostics=_diag(cert),
        trace=res.trace,
    )


def certify_margin(
    model: ClosedAlgorithmModel,
    bounds: list[OracleBound],
    tol: float = 1e-6,
) -> AnalysisReport:
    """Certify strict contraction via the largest feasibility margin rho*."""
    res = maximize_rho(model, bounds, tol=tol)
    if isinstance(res, NotFound):
        return _not_certified(res, "contraction-margin")
    cert = res.certificate
    if res.value <= 0.0:
        return AnalysisReport(
            verdict="nonexpansive",
            certificate=cert,
            scalar=0.0,
            overshoot=cert.kappa,
            conclusion="feasible only at margin 0: nonexpansive, strict "
            "contraction not certified",
            diagnostics=_diag(cert),
            trace=res.trace,
        )
    return AnalysisReport(
        verdict="contracting",
        certificate=cert,
        scalar=res.value,
        overshoot=cert.kappa,
        conclusion=f"strict contraction with margin rho = {res.value:.9g}",
        diagnostics=_diag(cert),
        trace=res.trace,
    )


def certify_gain(
    model: OpenAlgorithmModel,
    bounds: list[OracleBound],
    tol: float = 1e-6,
) -> AnalysisReport:
    """Certify the smallest incremental l2 gain mu* by bisection.

    The certified inequality is sum ||dz_k||^2 <= V(dx_0) + mu*^2 *
    sum ||dd_k||^2 over any horizon.
    """
    res = bisect_mu(model, bounds, tol=tol)
    if isinstance(res, NotFound):
        return _not_certified(res, "gain")
    cert = res.certificate
    return AnalysisReport(
        verdict="gain",
        certificate=cert,
        scalar=res.value,
        overshoot=cert.kappa,
        conclusion=f"incremental l2 gain at most mu = {res.value:.9g}: "
        f"sum ||dz||^2 <= V(dx_0) + mu^2 * sum ||dd||^2",
        diagnostics=_diag(cert),
        trace=res.trace,
    )


def certify_closed_loop(
    model: OpenAlgorithmModel,
    psi_bounds: list[OracleBound],
    plant: PlantSupply,
    gamma: float = 1.0,
) -> AnalysisReport:
    """Certify nonexpansiveness of the plant/algorithm interconnection.

    Only the plant's supply rate S_p enters the LMI; the existence of a
    plant storage V_p dissipating S_p is the caller's obligation.  The
    certified composite storage is V_c = V_p + V with V from the
    returned certificate.  gamma < 1 is an experimental rate-weighted
    variant; the base result concludes nonexpansiveness only.
    """
    res = solve_feasibility(closed_loop_lmi(model, psi_bounds, plant, gamma=gamma))
    if isinstance(res, NotFound):
        return _not_certified(res, "closed-loop")
    cert = res.with_scalar("gamma", gamma)
    return AnalysisReport(
        verdict="closed-loop-nonexpansive",
        certificate=cert,
        scalar=gamma,
        overshoot=cert.kappa,
        conclusion="the plant/algorithm interconnection is incrementally "
        "nonexpansive with composite storage V_c = V_p + V "
        "(V_p dissipating S_p is assumed, not checked here)"
        + ("" if gamma == 1.0 else f"; experimental rate weight gamma = {gamma}"),
        diagnostics=_diag(cert),
    )
