"""Command line front end: ``ase-lab <command> --config <file.json>``.

Configs are JSON objects.  Every command takes a ``model`` section; the
other keys depend on the command (see ``ALLOWED``).  Validation collects all
problems before reporting them.  Exit status: 0 on success, 1 on invalid
input, 2 when a quantity that must be finite is not.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analytic, conditions, sim
from .models import PathLossModel, check_feasibility, fading_from_dict, pathloss_from_dict

COMMANDS = ("feasibility", "limit", "conditions", "simulate", "sweep")
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

_SIM_KEYS = {"model", "fading", "theta0", "seed", "realizations", "n0", "window_radius",
             "far_field", "max_points", "block_size"}
ALLOWED = {
    "feasibility": {"model", "tolerance"},
    "limit": {"model", "tolerance"},
    "conditions": {"model", "fading", "r0", "lower_bound", "lambda0_grid", "moment_lambda0",
                   "oracle_realizations", "seed", "tolerance"},
    "simulate": _SIM_KEYS | {"lambda"},
    "sweep": _SIM_KEYS | {"lambda_grid"},
}
TOLERANCE_KEYS = {"gamma", "moment"}
DEFAULTS = {
    "fading": {"kind": "Rayleigh"},
    "theta0": [1.0],
    "seed": 0,
    "realizations": 100_000,
    "n0": None,
    "window_radius": None,
    "far_field": "gamma",
    "max_points": 400.0,
    "block_size": 2000,
    "lambda0_grid": list(conditions.DEFAULT_LAMBDA0_GRID),
    "moment_lambda0": [],
    "oracle_realizations": 0,
    "r0": None,
    "lower_bound": None,
    "tolerance": {"gamma": 1e-10, "moment": 1e-6},
}
CONFIG_BEGIN = "--- resolved config ---"
CONFIG_END = "--- end config ---"


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class NumericalFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    # fully resolved JSON-ready mapping, echoed into reports
    raw: dict
    model: PathLossModel
    fading: object = None
    lower_bound: PathLossModel | None = None

    def sim_config(self, lam: float) -> sim.SimConfig:
        r = self.raw
        return sim.SimConfig(self.model, self.fading, lam, n0=r["n0"],
                             window_radius=r["window_radius"], realizations=r["realizations"],
                             seed=r["seed"], theta0_list=tuple(r["theta0"]),
                             far_field=r["far_field"], max_points=r["max_points"],
                             block_size=r["block_size"])


# --------------------------------------------------------------------------
# config loading


def _number(problems, data, key, positive=False, integer=False, nonneg=False):
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        problems.append(f"{key}: expected a finite number, got {v!r}")
        return
    if integer and int(v) != v:
        problems.append(f"{key}: expected an integer, got {v!r}")
    if positive and not v > 0:
        problems.append(f"{key}: must be positive, got {v!r}")
    if nonneg and v < 0:
        problems.append(f"{key}: must be nonnegative, got {v!r}")


def _number_list(problems, data, key, positive=True):
    v = data[key]
    if not isinstance(v, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in v):
        problems.append(f"{key}: expected a list of numbers")
        return
    if positive and any(x <= 0 for x in v):
        problems.append(f"{key}: values must be positive")


def parse_config(data: dict, command: str) -> ExperimentConfig:
    """Validate a config mapping for ``command`` and fill defaults."""
    if command not in COMMANDS:
        raise ConfigError([f"unknown command {command!r}"])
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])
    problems: list[str] = []
    allowed = ALLOWED[command]
    for key in sorted(set(data) - allowed):
        problems.append(f"{key}: unknown key for '{command}' (allowed: {', '.join(sorted(allowed))})")
    for key in sorted({"model"} | ({"lambda"} if command == "simulate" else set())
                      | ({"lambda_grid"} if command == "sweep" else set())):
        if key not in data:
            problems.append(f"{key}: required")
    resolved = {k: v for k, v in DEFAULTS.items() if k in allowed}
    resolved.update({k: v for k, v in data.items() if k in allowed})
    if isinstance(resolved.get("tolerance"), dict):
        tol = dict(DEFAULTS["tolerance"])
        for k in sorted(set(resolved["tolerance"]) - TOLERANCE_KEYS):
            problems.append(f"tolerance.{k}: unknown key")
        tol.update({k: v for k, v in resolved["tolerance"].items() if k in TOLERANCE_KEYS})
        resolved["tolerance"] = tol

    model = fading = lower = None
    if "model" in data:
        try:
            model = pathloss_from_dict(data["model"]) if isinstance(data["model"], dict) else None
            if model is None:
                problems.append("model: expected an object with a 'kind'")
        except (ValueError, TypeError) as exc:
            problems.append(f"model: {exc}")
    if "fading" in resolved:
        try:
            fading = fading_from_dict(resolved["fading"])
        except (ValueError, TypeError, AttributeError) as exc:
            problems.append(f"fading: {exc}")
    if resolved.get("lower_bound") is not None:
        try:
            lower = pathloss_from_dict(resolved["lower_bound"])
        except (ValueError, TypeError, AttributeError) as exc:
            problems.append(f"lower_bound: {exc}")

    for key in ("seed", "realizations", "block_size", "oracle_realizations"):
        if key in resolved:
            _number(problems, resolved, key, integer=True, nonneg=True)
    if isinstance(resolved.get("seed"), int) and not 0 <= resolved["seed"] < 2**64:
        problems.append("seed: must be a 64-bit unsigned integer")
    if command in ("simulate", "sweep"):
        if isinstance(resolved["realizations"], (int, float)) and resolved["realizations"] < 100:
            problems.append("realizations: must be >= 100")
        _number_list(problems, resolved, "theta0", positive=False)
        if isinstance(resolved["theta0"], list) and any(
                isinstance(t, (int, float)) and t < 0 for t in resolved["theta0"]):
            problems.append("theta0: thresholds are linear and must be >= 0")
        for key in ("n0", "window_radius"):
            if resolved[key] is not None:
                _number(problems, resolved, key, positive=True)
        _number(problems, resolved, "max_points", positive=True)
        if resolved["far_field"] not in sim.FAR_FIELD_MODES:
            problems.append(f"far_field: must be one of {', '.join(sim.FAR_FIELD_MODES)}")
    if command == "simulate" and "lambda" in data:
        _number(problems, resolved, "lambda", positive=True)
    if command == "sweep" and "lambda_grid" in data:
        _number_list(problems, resolved, "lambda_grid")
        g = resolved["lambda_grid"]
        if isinstance(g, list) and all(isinstance(x, (int, float)) and x > 0 for x in g):
            if len(g) < 4:
                problems.append("lambda_grid: needs at least 4 values")
            if any(b <= a for a, b in zip(g[:-1], g[1:])):
                problems.append("lambda_grid: must be strictly increasing")
            elif len(g) >= 2 and g[-1] / g[0] < 1e3 * (1 - 1e-12):
                problems.append("lambda_grid: must span at least 3 decades")
    if command == "conditions":
        _number_list(problems, resolved, "lambda0_grid")
        _number_list(problems, resolved, "moment_lambda0")
        if resolved["r0"] is not None:
            _number(problems, resolved, "r0", positive=True)
    if "tolerance" in resolved:
        if not isinstance(resolved["tolerance"], dict):
            problems.append("tolerance: expected an object")
        else:
            for k, v in resolved["tolerance"].items():
                if not (isinstance(v, float) and 1e-14 < v < 1e-2):
                    problems.append(f"tolerance.{k}: must lie in (1e-14, 1e-2)")

    # feasibility gate for commands that need finite gamma
    if model is not None and command in ("simulate", "sweep"):
        report = check_feasibility(model)
        if report.failed_property == 3:
            problems.append("model: γ diverges (feasibility property 3 fails); "
                            "the dense-network limit and window rule need finite γ")
        elif not report.feasible:
            problems.append(f"model: infeasible path loss (property {report.failed_property} fails)")

    if problems:
        raise ConfigError(problems)
    resolved["model"] = model.to_dict()
    if fading is not None:
        resolved["fading"] = fading.to_dict()
    if lower is not None:
        resolved["lower_bound"] = lower.to_dict()
    if "theta0" in resolved:
        resolved["theta0"] = [float(t) for t in resolved["theta0"]]
    if command == "simulate" and resolved.get("n0") is None:
        resolved["n0"] = 1e-6 * model.l_zero()
    if command == "sweep":
        if resolved.get("n0") is None:
            resolved["n0"] = 1e-6 * model.l_zero()
        resolved["lambda_grid"] = [float(x) for x in resolved["lambda_grid"]]
    return ExperimentConfig(command, resolved, model, fading, lower)


def load_config(path, command: str, overrides: dict | None = None) -> ExperimentConfig:
    """Read a JSON config file; ``overrides`` replace top-level keys."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    if isinstance(data, dict):
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return parse_config(data, command)


# --------------------------------------------------------------------------
# commands


def theta_db_label(theta: float) -> str:
    if theta == 0:
        return "-inf"
    return f"{10 * math.log10(theta):.6g}"


def csv_header(thetas) -> str:
    cols = ["lambda", "ase", "ase_se"]
    for t in thetas:
        lab = theta_db_label(t)
        cols += [f"case_{lab}", f"pt_{lab}", f"cov_{lab}"]
    return ",".join(cols + ["limit", "n"])


def csv_row(est: sim.MetricEstimate, thetas, limit: float) -> str:
    vals = [est.lam, est.ase, est.ase_se]
    for t in thetas:
        vals += [est.constrained_ase[t], est.potential_throughput[t], est.coverage[t]]
    return ",".join([repr(float(v)) for v in vals + [limit]] + [str(est.n)])


def cmd_feasibility(cfg: ExperimentConfig) -> tuple[list[str], str | None]:
    rep = check_feasibility(cfg.model, cfg.raw["tolerance"]["gamma"])
    lines = [f"L0: {rep.l_zero:.6g}", f"bounded by L0: {rep.bounded}"]
    if rep.failed_property != 1:
        lines.append(f"gamma: {rep.gamma:.10g} ({rep.gamma_status})")
    lines.append("FEASIBLE" if rep.feasible else f"INFEASIBLE: property {rep.failed_property}")
    lines += [f"note: {n}" for n in rep.notes]
    return lines, None


def cmd_limit(cfg: ExperimentConfig) -> tuple[list[str], str | None]:
    try:
        lim = analytic.ase_limit(cfg.model, cfg.raw["tolerance"]["gamma"])
    except analytic.InfeasibleModelError as exc:
        raise NumericalFailure(str(exc)) from None
    lines = [f"L0: {lim.l_zero:.10g}", f"gamma: {lim.gamma:.10g}",
             f"limit: {lim.general_value:.6g}"]
    if lim.closed_form_value is not None:
        lines.append(f"closed form: {lim.closed_form_value:.6g} "
                     f"(relative difference {lim.agreement:.2e})")
    return lines, None


def _verdict_lines(v: conditions.ConditionVerdict) -> list[str]:
    word = {True: "holds", False: "fails", None: "inconclusive"}[v.holds]
    out = [f"condition set {v.corollary}: {word}"]
    if v.zeta is not None:
        out.append(f"  r0: {v.r0:.6g}  zeta: {v.zeta:.6g}")
    if v.lambda_c is not None:
        out.append(f"  empirical lambda_c: {v.lambda_c:.6g}")
    if v.witness is not None:
        out.append(f"  witness r: {v.witness:.6g}")
    for lam, res in v.details.items():
        out.append(f"  lambda0={lam:.6g}: {res.status} ({res.value:.6g})")
    out += [f"  note: {n}" for n in v.notes]
    return out


def cmd_conditions(cfg: ExperimentConfig) -> tuple[list[str], str | None]:
    r = cfg.raw
    rep = check_feasibility(cfg.model)
    if not rep.feasible:
        raise NumericalFailure(f"model infeasible: property {rep.failed_property}")
    lines = []
    grid = tuple(r["lambda0_grid"])
    if not cfg.model.random_state:
        lines += _verdict_lines(conditions.check_corollary2(cfg.model, r["r0"], grid))
    try:
        v5 = conditions.check_corollary5(cfg.model, cfg.lower_bound, r["r0"], grid)
        lines += _verdict_lines(v5)
    except ValueError as exc:
        lines.append(f"condition set 5: skipped ({exc})")
    for lam in r["moment_lambda0"]:
        fn = conditions.InterferenceFunctional(cfg.model, cfg.fading, float(lam))
        res = conditions.second_negative_moment(fn, r["tolerance"]["moment"])
        if res.status == conditions.DIVERGED:
            raise NumericalFailure(f"second negative moment diverges at lambda0={lam}")
        lines.append(f"E[I^-2] at lambda0={lam:.6g}: {res.value:.6g} ({res.status})")
        if r["oracle_realizations"]:
            mc = conditions.mc_negative_moment_oracle(fn, r["oracle_realizations"], r["seed"])
            lines.append(f"  simulated: {mc.mean:.6g} +/- {mc.stderr:.2g}")
    return lines, None


def _limit_or_fail(model) -> float:
    try:
        return analytic.ase_limit(model).general_value
    except analytic.InfeasibleModelError as exc:
        raise NumericalFailure(str(exc)) from None


def cmd_simulate(cfg: ExperimentConfig) -> tuple[list[str], str | None]:
    scfg = cfg.sim_config(cfg.raw["lambda"])
    est = sim.estimate_metrics(scfg)
    limit = _limit_or_fail(cfg.model)
    lines = [f"lambda: {est.lam:.6g}", f"ase: {est.ase:.6g} +/- {est.ase_se:.2g}",
             f"limit: {limit:.6g}", f"window radius: {est.window.radius:.6g}",
             f"empty-window redraws: {est.redraws}"]
    thetas = scfg.theta0_list
    return lines, csv_header(thetas) + "\n" + csv_row(est, thetas, limit) + "\n"


def cmd_sweep(cfg: ExperimentConfig) -> tuple[list[str], str | None]:
    template = cfg.sim_config(cfg.raw["lambda_grid"][0])
    limit = _limit_or_fail(cfg.model)
    rows = sim.lambda_sweep(template, cfg.raw["lambda_grid"])
    thetas = template.theta0_list
    lines = [f"limit: {limit:.6g}"]
    for row in rows:
        lines.append(f"lambda={row.lam:.6g}: ase {row.ase:.6g} +/- {row.ase_se:.2g}")
    body = "".join(csv_row(row.estimate, thetas, limit) + "\n" for row in rows)
    return lines, csv_header(thetas) + "\n" + body


HANDLERS = {"feasibility": cmd_feasibility, "limit": cmd_limit, "conditions": cmd_conditions,
            "simulate": cmd_simulate, "sweep": cmd_sweep}


def render_report(cfg: ExperimentConfig, lines: list[str]) -> str:
    head = [f"ase-lab {cfg.command}", f"model: {cfg.model}"]
    if cfg.fading is not None:
        head.append(f"fading: {cfg.fading}")
    blob = json.dumps(cfg.raw, indent=2, sort_keys=True)
    return "\n".join(head + lines + [CONFIG_BEGIN, blob, CONFIG_END]) + "\n"


def embedded_config(report: str) -> dict:
    """Recover the resolved config from a report."""
    start = report.index(CONFIG_BEGIN) + len(CONFIG_BEGIN)
    return json.loads(report[start:report.index(CONFIG_END)])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ase-lab", description="Dense-network ASE toolkit.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", help="CSV path (simulate, sweep) or report path (other commands)")
    p.add_argument("--seed", type=int)
    p.add_argument("--realizations", type=int)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.command in ("simulate", "sweep", "conditions"):
        overrides["seed"] = args.seed
    if args.command in ("simulate", "sweep"):
        overrides["realizations"] = args.realizations
    try:
        cfg = load_config(args.config, args.command, overrides)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_INVALID
    except ConfigError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_INVALID
    try:
        lines, table = HANDLERS[args.command](cfg)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = render_report(cfg, lines)
    sys.stdout.write(report)
    if args.out:
        out = Path(args.out)
        if table is None:
            out.write_text(report, encoding="utf-8")
        else:
            out.write_text(table, encoding="utf-8", newline="")
            out.with_name(out.name + ".report.txt").write_text(report, encoding="utf-8")
    elif table is not None:
        sys.stdout.write(table)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
