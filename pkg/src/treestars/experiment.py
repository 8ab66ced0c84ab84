"""JSON experiment configs, CSV reports and the preset table grids."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping

from .analytic import EmptyOriginSetError, UnsupportedAnalyticError, aggregate_moments, premium, scenario_moments
from .distributions import CostSpec, ParameterError, Pmf
from .model import SCENARIOS, ModelParams, MomentPair, ScenarioWeights
from .montecarlo import MODES, Estimate, RunConfig, combine_estimates, derive_seed, estimate_aggregate, estimate_scenario

HEADER = [
    "scenario",
    "offspring_pmf",
    "user_pmf",
    "p",
    "q",
    "cost_topology",
    "analytic_mean",
    "analytic_sd",
    "sim_mean",
    "sim_sd",
    "sim_se_mean",
    "replications",
    "seed",
    "degenerate_fraction",
    "analytic_premium_expectation",
    "analytic_premium_sd",
    "sim_premium_expectation",
    "sim_premium_sd",
]

REQUIRED = (
    "offspring_pmf",
    "user_pmf",
    "radius",
    "p",
    "q",
    "cost_contract",
    "cost_user",
    "scenario_weights",
    "lambda",
    "t",
    "loading_delta",
    "replications",
    "seed",
    "workers",
    "mode",
)


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams
    run: RunConfig
    out: str | None = None
    run_analytic: bool = True
    run_simulation: bool = True
    scenarios: tuple[int, ...] = SCENARIOS
    cost_topology: str = "custom"
    comment: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.run_analytic or self.run_simulation):
            raise ConfigError("run_analytic", "at least one of run_analytic and run_simulation must be true")


def _number(doc: Mapping, key: str, *, integer: bool = False) -> float:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(key, f"expected a finite number, got {value!r}")
    return int(value) if integer else float(value)


def _pmf(doc: Mapping, key: str) -> Pmf:
    value = doc[key]
    if not isinstance(value, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        raise ConfigError(key, f"expected a list of probabilities, got {value!r}")
    try:
        return Pmf(value)
    except ParameterError as exc:
        raise ConfigError(key, str(exc)) from None


def _cost(doc: Mapping, key: str) -> CostSpec:
    value = doc[key]
    if not isinstance(value, Mapping):
        raise ConfigError(key, "expected an object with family, mean and sd")
    missing = [k for k in ("family", "mean") if k not in value]
    if missing:
        raise ConfigError(key, f"missing {', '.join(missing)}")
    try:
        return CostSpec(str(value["family"]), float(value["mean"]), float(value.get("sd", 0.0)))
    except (ParameterError, TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None


def parse_config(document: Mapping[str, Any] | str) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a JSON document or its parsed mapping."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError("<document>", f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise ConfigError("<document>", "expected a JSON object")
    missing = [k for k in REQUIRED if k not in document]
    if missing:
        raise ConfigError(missing[0], "missing required field" + (f" (also missing {missing[1:]})" if missing[1:] else ""))

    radius = _number(document, "radius", integer=True)
    if radius < 0:
        raise ConfigError("radius", f"must be >= 0, got {radius}")
    p = _number(document, "p")
    q = _number(document, "q")
    for key, value in (("p", p), ("q", q)):
        if not 0 <= value <= 1:
            raise ConfigError(key, f"must lie in [0, 1], got {value}")
    weights_doc = document["scenario_weights"]
    if not isinstance(weights_doc, list):
        raise ConfigError("scenario_weights", "expected a list of 4 numbers")
    try:
        weights = ScenarioWeights(weights_doc)
    except (ParameterError, TypeError, ValueError) as exc:
        raise ConfigError("scenario_weights", str(exc)) from None
    lam = _number(document, "lambda")
    t = _number(document, "t")
    delta = _number(document, "loading_delta")
    for key, value in (("lambda", lam), ("t", t), ("loading_delta", delta)):
        if value < 0:
            raise ConfigError(key, f"must be >= 0, got {value}")

    params = ModelParams(
        offspring=_pmf(document, "offspring_pmf"),
        users=_pmf(document, "user_pmf"),
        radius=radius,
        p=p,
        q=q,
        cost_contract=_cost(document, "cost_contract"),
        cost_user=_cost(document, "cost_user"),
        weights=weights,
        lam=lam,
        t=t,
        delta=delta,
    )

    replications = _number(document, "replications", integer=True)
    if replications < 1:
        raise ConfigError("replications", f"must be >= 1, got {replications}")
    seed = _number(document, "seed", integer=True)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed", "must be an unsigned 64-bit integer")
    workers = _number(document, "workers", integer=True)
    if workers < 1:
        raise ConfigError("workers", f"must be >= 1, got {workers}")
    mode = document["mode"]
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {MODES}, got {mode!r}")
    run = RunConfig(replications, seed, workers, mode)

    scenarios = document.get("scenarios_to_report", list(SCENARIOS))
    if not isinstance(scenarios, list) or any(s not in SCENARIOS for s in scenarios):
        raise ConfigError("scenarios_to_report", f"expected a subset of {list(SCENARIOS)}, got {scenarios!r}")
    flags = {}
    for key in ("run_analytic", "run_simulation"):
        value = document.get(key, True)
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true or false, got {value!r}")
        flags[key] = value
    if not (flags["run_analytic"] or flags["run_simulation"]):
        raise ConfigError("run_analytic", "at least one of run_analytic and run_simulation must be true")
    out = document.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out", "expected a path string")
    return ExperimentConfig(
        params=params,
        run=run,
        out=out,
        run_analytic=flags["run_analytic"],
        run_simulation=flags["run_simulation"],
        scenarios=tuple(sorted(set(scenarios))),
        cost_topology=str(document.get("cost_topology", "custom")),
        comment=document.get("comment"),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<document>", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def config_to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    par, run = cfg.params, cfg.run
    doc: dict[str, Any] = {
        "offspring_pmf": par.offspring.to_list(),
        "user_pmf": par.users.to_list(),
        "radius": par.radius,
        "p": par.p,
        "q": par.q,
        "cost_contract": par.cost_contract.to_dict(),
        "cost_user": par.cost_user.to_dict(),
        "scenario_weights": list(par.weights.q),
        "lambda": par.lam,
        "t": par.t,
        "loading_delta": par.delta,
        "replications": run.replications,
        "seed": run.seed,
        "workers": run.workers,
        "mode": run.mode,
        "run_analytic": cfg.run_analytic,
        "run_simulation": cfg.run_simulation,
        "scenarios_to_report": list(cfg.scenarios),
        "cost_topology": cfg.cost_topology,
    }
    if cfg.out is not None:
        doc["out"] = cfg.out
    if cfg.comment is not None:
        doc["comment"] = cfg.comment
    return doc


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2)


def _money(x: float | None) -> str:
    return "" if x is None else f"{x:.2f}"


def _prob(x: float | None) -> str:
    return "" if x is None else f"{x:.6g}"


def format_pmf(pmf: Pmf) -> str:
    return "[" + ",".join(f"{x:g}" for x in pmf.probs) + "]"


def _analytic(params: ModelParams, scenario: int) -> MomentPair | None:
    try:
        return scenario_moments(params, scenario)
    except (UnsupportedAnalyticError, EmptyOriginSetError):
        return None


def _row(
    label: str,
    cfg: ExperimentConfig,
    analytic: MomentPair | None,
    sim: Estimate | None,
    seed: int | None,
    premiums: bool = False,
) -> dict[str, str]:
    par = cfg.params
    row = {
        "scenario": label,
        "offspring_pmf": format_pmf(par.offspring),
        "user_pmf": format_pmf(par.users),
        "p": _prob(par.p),
        "q": _prob(par.q),
        "cost_topology": cfg.cost_topology,
        "analytic_mean": _money(analytic.mean if analytic else None),
        "analytic_sd": _money(analytic.sd if analytic else None),
        "sim_mean": _money(sim.mean if sim else None),
        "sim_sd": _money(sim.sd if sim else None),
        "sim_se_mean": _money(sim.se_mean if sim else None),
        "replications": str(sim.replications) if sim else "",
        "seed": str(seed) if sim else "",
        "degenerate_fraction": _prob(sim.degenerate_fraction if sim else None),
    }
    for prefix, moments in (("analytic", analytic), ("sim", sim and MomentPair(sim.mean, sim.sd**2))):
        show = premiums and moments is not None
        row[f"{prefix}_premium_expectation"] = _money(premium(moments, par.delta, "expectation") if show else None)
        row[f"{prefix}_premium_sd"] = _money(premium(moments, par.delta, "std-dev") if show else None)
    return row


def run_experiment(cfg: ExperimentConfig) -> list[dict[str, str]]:
    """One CSV row per reported scenario plus an aggregate row for L_t.

    Analytic cells without a closed form are left empty. Writes the CSV to
    ``cfg.out`` when it is set.
    """
    par, run = cfg.params, cfg.run
    needed = sorted(set(cfg.scenarios) | set(par.weights.active()))
    analytic = {s: _analytic(par, s) for s in needed} if cfg.run_analytic else {}
    sims: dict[int, Estimate] = {}
    if cfg.run_simulation:
        for s in needed:
            sims[s] = estimate_scenario(par, s, replace(run, seed=derive_seed(run.seed, s)))

    rows = [
        _row(str(s), cfg, analytic.get(s), sims.get(s), derive_seed(run.seed, s)) for s in cfg.scenarios
    ]

    agg_analytic = None
    if cfg.run_analytic and all(analytic[s] is not None for s in par.weights.active()):
        agg_analytic = aggregate_moments(par.lam, par.t, par.weights, analytic)
    agg_sim = None
    if cfg.run_simulation:
        if run.mode == "per-scenario":
            agg_sim = combine_estimates(par, sims, run.replications)
        else:
            agg_sim = estimate_aggregate(par, run)
    rows.append(_row("aggregate", cfg, agg_analytic, agg_sim, run.seed, premiums=True))
    if cfg.out:
        write_csv(rows, cfg.out)
    return rows


def write_csv(rows: Iterable[Mapping[str, str]], path: str | Path | None = None) -> str:
    """Render rows with the fixed header; also write them to ``path`` if given."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write report to {path}: {exc.strerror}") from None
    return text


# Preset grids. Radius counts generations below the root: a tree drawn
# with three levels (root plus two generations) has radius 2.
TABLE_RADIUS = 2
DETERMINISTIC_OFFSPRING = Pmf([0.0, 0.0, 1.0])
RANDOM_OFFSPRING = Pmf([0.0, 0.4, 0.6])
DETERMINISTIC_USERS = Pmf([0.0, 0.0, 0.0, 0.0, 1.0])
RANDOM_USERS = Pmf([0.0, 0.1, 0.2, 0.3, 0.4])
COST_TOPOLOGIES = {
    "I": (CostSpec.lognormal(10000, 0), CostSpec.lognormal(1000, 0)),
    "II": (CostSpec.lognormal(10000, 5000), CostSpec.lognormal(1000, 0)),
    "III": (CostSpec.lognormal(10000, 0), CostSpec.lognormal(1000, 500)),
}
PQ_GRID = ((0.8, 0.8), (0.8, 0.2), (0.2, 0.8), (0.2, 0.2))
PMF_PAIRS = (
    (DETERMINISTIC_OFFSPRING, DETERMINISTIC_USERS),
    (DETERMINISTIC_OFFSPRING, RANDOM_USERS),
    (RANDOM_OFFSPRING, DETERMINISTIC_USERS),
    (RANDOM_OFFSPRING, RANDOM_USERS),
)
TABLE_SCENARIO = {2: 1, 3: 3}
RADIUS_NOTE = "radius counts generations below the root; a three-level tree has radius 2"


def table_grid(which: int) -> list[tuple[str, ModelParams]]:
    """(cost topology, params) for every row of table 2 or 3, in row order."""
    if which not in TABLE_SCENARIO:
        raise ValueError(f"table must be 2 or 3, got {which!r}")
    pairs = PMF_PAIRS if which == 2 else PMF_PAIRS[:1]
    grid = []
    for topology, (cc, cu) in COST_TOPOLOGIES.items():
        for p, q in PQ_GRID:
            for offspring, users in pairs:
                params = ModelParams(
                    offspring,
                    users,
                    TABLE_RADIUS,
                    p,
                    q,
                    cc,
                    cu,
                    weights=ScenarioWeights.only(TABLE_SCENARIO[which]),
                    lam=1.0,
                    t=1.0,
                    delta=0.1,
                )
                grid.append((topology, params))
    return grid


def table_config(topology: str, params: ModelParams, replications: int, seed: int, workers: int = 1) -> ExperimentConfig:
    scenario = params.weights.active()[0]
    return ExperimentConfig(
        params=params,
        run=RunConfig(max(replications, 1), seed, workers),
        run_analytic=True,
        run_simulation=replications > 0,
        scenarios=(scenario,),
        cost_topology=topology,
        comment=RADIUS_NOTE,
    )


def reproduce_tables(which: int, replications: int = 0, seed: int = 0, workers: int = 1) -> list[dict[str, str]]:
    """Analytic (and, if ``replications > 0``, simulated) rows of a preset table.

    Row ``i`` is simulated with seed ``derive_seed(seed, i)``.
    """
    rows = []
    for i, (topology, params) in enumerate(table_grid(which)):
        cfg = table_config(topology, params, replications, derive_seed(seed, i), workers)
        scenario = cfg.scenarios[0]
        sim = estimate_scenario(params, scenario, cfg.run) if cfg.run_simulation else None
        rows.append(_row(str(scenario), cfg, _analytic(params, scenario), sim, cfg.run.seed))
    return rows
