"""Batch command-line front-end.

Reads a JSON problem description, dispatches to the certification or
simulation procedures, and emits deterministic machine-readable reports
(JSON) and sweep tables (CSV).

Subcommands: certify, simulate, sweep, validate-config.
Exit codes: 0 certified/pass, 2 not-certified, 1 error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import itertools
import json
import sys
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from . import certify as certify_mod
from . import models, simulate
from .models import ModelError

__all__ = ["ProblemConfig", "parse_config", "run", "sweep", "main"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemConfig:
    """A validated problem description (raw dict plus built objects)."""

    raw: dict
    system_kind: str  # "closed" | "open"
    model: object
    bounds: list
    oracle: simulate.ExecutableOracle | None
    plant_supply: models.PlantSupply | None
    linear_plant: simulate.LinearPlant | None
    mode: str
    tol: float
    seed: int
    horizon: int
    trials: int


def _schema() -> dict:
    text = resources.files("algocert.schemas").joinpath("config.schema.json").read_text()
    return json.loads(text)


_PRESETS_OPEN = {
    "gradient_descent_gradient_noise",
    "nesterov_gradient_noise",
    "nesterov_measurement_noise",
}


def _build_system(spec: dict):
    if "closed" in spec:
        s = spec["closed"]
        return "closed", models.ClosedAlgorithmModel(
            np.array(s["A"]), np.array(s["B"]), np.array(s["C"]), np.array(s["D"])
        )
    if "open" in spec:
        s = spec["open"]
        return "open", models.OpenAlgorithmModel(
            np.array(s["A"]),
            np.array(s["B1"]),
            np.array(s["B2"]),
            np.array(s["C1"]),
            np.array(s["D11"]),
            np.array(s["D12"]),
            np.array(s["C2"]),
            np.array(s["D21"]),
            np.array(s["D22"]),
        )
    name = spec["preset"]["name"]
    p = spec["preset"].get("params", {})
    dim = int(p.get("dim", 1))
    if name == "gradient_descent":
        return "closed", models.gradient_descent_model(p["eta"], dim)
    if name == "nesterov":
        return "closed", models.nesterov_model(p["eta"], p["beta"], dim)
    if name == "gradient_descent_gradient_noise":
        return "open", models.open_gradient_descent_gradient_noise(p["eta"], dim)
    if name == "nesterov_gradient_noise":
        return "open", models.open_nesterov_gradient_noise(p["eta"], p["beta"], dim)
    if name == "nesterov_measurement_noise":
        return "open", models.open_nesterov_measurement_noise(p["eta"], p["beta"], dim)
    if name == "example1_loop":
        # Closed-loop state matrix of the motivating scalar example:
        # plant xi+ = -xi + nu, algorithm u+ = u - eta*(u - K*xi).
        k_gain, eta = float(p["K"]), float(p["eta"])
        a = np.array([[-1.0, 1.0], [eta * k_gain, 1.0 - eta]])
        return "closed", models.ClosedAlgorithmModel(
            a, np.zeros((2, 1)), np.zeros((1, 2)), np.zeros((1, 1))
        )
    raise ConfigError(f"unknown preset {name!r}")


def _build_bounds(items: list) -> list:
    out = []
    for it in items:
        t = it["type"]
        if t == "strongly-monotone":
            out.append(models.strongly_monotone_bound(it["mu"], it.get("dim", 1)))
        elif t == "lipschitz":
            out.append(models.lipschitz_bound(it["L"], it.get("dim", 1)))
        elif t == "firmly-nonexpansive":
            out.append(models.firmly_nonexpansive_bound(it.get("dim", 1)))
        elif t == "sector":
            out.append(models.sector_bound(it["mu"], it["L"], it.get("dim", 1)))
        elif t == "affine-equality":
            out.append(models.affine_equality_bound(np.array(it["E"]), np.array(it["G"])))
        else:
            raise ConfigError(f"unknown bound type {t!r}")
    return out


def _build_oracle(spec: dict | None) -> simulate.ExecutableOracle | None:
    if spec is None:
        return None
    kind = spec["kind"]
    params = {k: v for k, v in spec.items() if k != "kind"}
    return simulate.ExecutableOracle(kind, params)


def parse_config(text: str) -> ProblemConfig:
    """Parse and validate a JSON problem description."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(s) for s in exc.absolute_path) or "<root>"
        raise ConfigError(f"config field {path}: {exc.message}") from exc

    if len(raw["system"]) != 1:
        raise ConfigError("exactly one of closed/open/preset system required")
    kind, model = _build_system(raw["system"])
    analysis = raw["analysis"]
    mode = analysis["mode"]
    if mode in ("gain", "closed-loop") and kind != "open":
        raise ConfigError(f"mode {mode!r} requires an open system")
    if mode in ("nonexpansive", "rate", "margin") and kind != "closed":
        raise ConfigError(f"mode {mode!r} requires a closed system")
    if mode == "sweep" and "sweep" not in raw:
        raise ConfigError("mode 'sweep' requires a sweep section")

    bounds = _build_bounds(raw.get("oracle_bounds", []))
    oracle = _build_oracle(raw.get("executable_oracle"))

    plant_supply = None
    linear_plant = None
    if "plant" in raw:
        pl = raw["plant"]
        if "linear" in pl:
            lp = pl["linear"]
            linear_plant = simulate.LinearPlant(
                np.array(lp["A"]), np.array(lp["B"]), np.array(lp["C"]), np.array(lp["P_p"])
            )
        if "S_p" in pl:
            if "r" not in pl or "q" not in pl:
                raise ConfigError("plant S_p requires explicit r and q")
            plant_supply = models.PlantSupply(
                models.SymMatrix(np.array(pl["S_p"])), pl["r"], pl["q"]
            )
        elif "small_gain_mu_bar" in pl:
            if "r" not in pl or "q" not in pl:
                raise ConfigError("small_gain_mu_bar requires explicit r and q")
            plant_supply = models.small_gain_supply(pl["small_gain_mu_bar"], pl["r"], pl["q"])
    if mode == "closed-loop" and plant_supply is None:
        raise ConfigError("mode 'closed-loop' requires a plant supply")
    if mode == "simulate" and oracle is None:
        raise ConfigError("mode 'simulate' requires an executable oracle")

    return ProblemConfig(
        raw=raw,
        system_kind=kind,
        model=model,
        bounds=bounds,
        oracle=oracle,
        plant_supply=plant_supply,
        linear_plant=linear_plant,
        mode=mode,
        tol=float(analysis.get("tol", 1e-6)),
        seed=int(analysis.get("seed", 0)),
        horizon=int(analysis.get("horizon", 200)),
        trials=int(analysis.get("trials", 100)),
    )


def _report_document(report: certify_mod.AnalysisReport, empirical: dict | None) -> dict:
    cert = report.certificate
    doc = {
        "verdict": report.verdict,
        "conclusion": report.conclusion,
        "scalar": report.scalar,
        "scalar_kind": cert.scalar_kind if cert else None,
        "kappa": report.overshoot,
        "certificate": None,
        "diagnostics": report.diagnostics,
        "trace": [
            {"value": s.value, "feasible": s.feasible, "margin": s.margin}
            for s in report.trace
        ],
    }
    if cert is not None:
        doc["certificate"] = {
            "P": cert.P.entries.tolist(),
            "multipliers": dict(sorted(cert.multipliers.items())),
            "lmi_min_eig": cert.lmi_min_eig,
            "p_min_eig": cert.p_min_eig,
            "p_max_eig": cert.p_max_eig,
        }
    if empirical is not None:
        doc["empirical"] = empirical
    return doc


def _empirical_cross_check(config: ProblemConfig, report) -> dict | None:
    """Optional simulation cross-check when an executable oracle is given."""
    if config.oracle is None or report.certificate is None:
        return None
    if config.system_kind == "closed":
        ratio = simulate.empirical_contraction(
            config.model,
            config.oracle,
            report.certificate.P,
            trials=min(config.trials, 20),
            K=min(config.horizon, 50),
            seed=config.seed,
        )
        return {"worst_storage_ratio": ratio}
    gain = simulate.empirical_gain(
        config.model,
        config.oracle,
        trials=min(config.trials, 10),
        K=min(config.horizon, 100),
        seed=config.seed,
    )
    return {"worst_energy_gain": gain}


def _run_simulate(config: ProblemConfig) -> dict:
    doc: dict = {"verdict": "simulated", "conclusion": "simulation completed"}
    if config.system_kind == "closed":
        from .matrixcore import SymMatrix

        ratio = simulate.empirical_contraction(
            config.model,
            config.oracle,
            SymMatrix(np.eye(config.model.n)),
            trials=config.trials,
            K=config.horizon,
            seed=config.seed,
        )
        doc["empirical"] = {"worst_storage_ratio": ratio}
    else:
        gain = simulate.empirical_gain(
            config.model,
            config.oracle,
            trials=config.trials,
            K=config.horizon,
            seed=config.seed,
        )
        doc["empirical"] = {"worst_energy_gain": gain}
    if config.bounds:
        checks = []
        for i, b in enumerate(config.bounds):
            ok, worst = simulate.check_oracle_bound(
                config.oracle, b, samples=1000, seed=config.seed
            )
            checks.append({"bound": i, "kind": b.kind, "passed": ok, "worst": worst})
        doc["empirical"]["bound_checks"] = checks
        if not all(c["passed"] for c in checks):
            doc["verdict"] = "not-certified"
            doc["conclusion"] = "an oracle bound check failed"
    return doc


def run(config: ProblemConfig) -> tuple[dict, int]:
    """Dispatch one analysis; returns (report document, exit code)."""
    if config.mode == "sweep":
        raise ConfigError("use sweep() for sweep mode")
    if config.mode == "simulate":
        doc = _run_simulate(config)
        return doc, (0 if doc["verdict"] == "simulated" else 2)
    if config.mode == "nonexpansive":
        report = certify_mod.certify_nonexpansive(config.model, config.bounds)
    elif config.mode == "rate":
        report = certify_mod.certify_rate(config.model, config.bounds, tol=config.tol)
    elif config.mode == "margin":
        report = certify_mod.certify_margin(config.model, config.bounds, tol=config.tol)
    elif config.mode == "gain":
        report = certify_mod.certify_gain(config.model, config.bounds, tol=config.tol)
    elif config.mode == "closed-loop":
        report = certify_mod.certify_closed_loop(
            config.model, config.bounds, config.plant_supply
        )
    else:
        raise ConfigError(f"unknown mode {config.mode!r}")
    doc = _report_document(report, _empirical_cross_check(config, report))
    return doc, (0 if report.verdict != "not-certified" else 2)


def _set_path(raw: dict, path: str, value) -> None:
    keys = path.split(".")
    node = raw
    for k in keys[:-1]:
        if isinstance(node, list):
            node = node[int(k)]
        else:
            if k not in node:
                raise ConfigError(f"sweep path {path!r}: missing key {k!r}")
            node = node[k]
    last = keys[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def _point_scalar(config: ProblemConfig, scalar: str) -> float | None:
    if scalar == "spectral_radius":
        a = config.model.A
        return simulate.spectral_radius(a)
    if scalar == "gamma":
        report = certify_mod.certify_rate(config.model, config.bounds, tol=config.tol)
    elif scalar == "rho":
        report = certify_mod.certify_margin(config.model, config.bounds, tol=config.tol)
    elif scalar == "mu":
        report = certify_mod.certify_gain(config.model, config.bounds, tol=config.tol)
    else:
        raise ConfigError(f"unknown sweep scalar {scalar!r}")
    return report.scalar if report.verdict != "not-certified" else None


def sweep(config: ProblemConfig) -> str:
    """Run the configured grid sweep; returns a CSV table as a string.

    Rows follow the lexicographic order of the Cartesian product of the
    grids in the order the parameters are listed.
    """
    if "sweep" not in config.raw:
        raise ConfigError("config has no sweep section")
    sw = config.raw["sweep"]
    params = sw["parameters"]
    scalar = sw["scalar"]
    for p in params:
        if not p["grid"]:
            raise ConfigError("empty sweep grid")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([p["path"] for p in params] + [scalar])
    for point in itertools.product(*(p["grid"] for p in params)):
        raw = copy.deepcopy(config.raw)
        for p, v in zip(params, point):
            _set_path(raw, p["path"], v)
        raw["analysis"] = dict(raw["analysis"])
        raw["analysis"]["mode"] = "nonexpansive" if scalar in ("gamma", "rho") else (
            "gain" if scalar == "mu" else "simulate"
        )
        # mode is irrelevant for scalar evaluation; rebuild system/bounds only
        kind, model = _build_system(raw["system"])
        point_config = ProblemConfig(
            raw=raw,
            system_kind=kind,
            model=model,
            bounds=_build_bounds(raw.get("oracle_bounds", [])),
            oracle=config.oracle,
            plant_supply=config.plant_supply,
            linear_plant=config.linear_plant,
            mode=config.mode,
            tol=config.tol,
            seed=config.seed,
            horizon=config.horizon,
            trials=config.trials,
        )
        value = _point_scalar(point_config, scalar)
        writer.writerow(
            [repr(float(v)) for v in point]
            + ["" if value is None else repr(float(value))]
        )
    return buf.getvalue()


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="algocert",
        description="Certify and simulate first-order algorithms via "
        "incremental dissipativity LMIs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("certify", "simulate", "sweep", "validate-config"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="path to a JSON config")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--tol", type=float, default=None, help="override config tol")
        sp.add_argument(
            "--format", choices=("json", "csv"), default=None, help="output format"
        )
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            text = fh.read()
        config = parse_config(text)
        if args.seed is not None or args.tol is not None:
            raw = copy.deepcopy(config.raw)
            raw.setdefault("analysis", {})
            if args.seed is not None:
                raw["analysis"]["seed"] = args.seed
            if args.tol is not None:
                raw["analysis"]["tol"] = args.tol
            config = parse_config(json.dumps(raw))

        if args.command == "validate-config":
            _emit(json.dumps({"valid": True}, sort_keys=True) + "\n", args.out)
            return 0
        if args.command == "sweep" or (
            args.command == "certify" and config.mode == "sweep"
        ):
            _emit(sweep(config), args.out)
            return 0
        if args.command == "simulate":
            if config.oracle is None:
                raise ConfigError("simulate requires an executable oracle")
            config = ProblemConfig(**{**config.__dict__, "mode": "simulate"})
            doc, code = run(config)
        else:
            doc, code = run(config)
        fmt = args.format or "json"
        if fmt == "json":
            _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
        else:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["key", "value"])
            for k in sorted(doc):
                writer.writerow([k, json.dumps(doc[k], sort_keys=True)])
            _emit(buf.getvalue(), args.out)
        return code
    except (ConfigError, ModelError, simulate.SimulationError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
