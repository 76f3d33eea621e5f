"""Scenario configuration, orchestration, and table emission.

Scenarios mirror the standard experiments: convergence of the learning run
against the best-response twin, robustness under roster churn, and sweeps
over the roster size comparing converged probabilities, expected ages, the
round-robin baseline, and the price of anarchy.

Configuration is INI text with three sections — ``[global]``, ``[scenario]``
and ``[nodes]`` — documented in the README.  All outputs are comma-separated
tables with a header row plus a ``manifest.json`` recording the config hash,
seed and versions; identical configurations produce byte-identical files.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import platform
from dataclasses import dataclass, field
from itertools import repeat
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .channel import expected_age
from .game import best_response_map, solve_ne
from .learning import ChurnEvent, GameConfig, Schedule, run_learning
from .model import NodeParams, derive_params
from .roundrobin import rr_expected_age, simulate_rr
from .welfare import price_of_anarchy

__all__ = ["ConfigError", "Scenario", "ScenarioResult", "parse_config", "run_scenario"]

SCENARIO_KINDS = (
    "convergence",
    "churn",
    "sweep_prob_vs_n",
    "sweep_age_vs_n",
    "sweep_poa_vs_n",
    "rr_compare",
)
_SWEEP_KINDS = ("sweep_prob_vs_n", "sweep_age_vs_n", "sweep_poa_vs_n", "rr_compare")

# Agreement gates between the learning endpoint and the equilibrium solver;
# a scenario run exits nonzero if its gate fails.
CONVERGENCE_GATE = 0.02
CHURN_GATE = 0.03
POA_GATE = 1e-9

_GLOBAL_KEYS = {
    "seed",
    "frame_length",
    "p_global_min",
    "kappa",
    "reinit_period",
    "mode",
    "reinit_kappa",
}
_SCENARIO_KEYS = {"kind", "n", "frames", "replicates", "n_min", "n_max", "churn"}
_NODE_KEYS = {"costs"}


class ConfigError(ValueError):
    """Malformed configuration, with the offending section/field named."""


@dataclass(frozen=True)
class Scenario:
    """What to run and at which scale."""

    kind: str
    n: int = 10
    frames: int = 200
    replicates: int = 5
    n_range: tuple[int, ...] = ()
    mode: str = "stochastic"
    reinit_kappa: bool = False
    p_global_min: float = 0.05
    costs: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"scenario.kind: unknown kind {self.kind!r}")
        if self.kind in _SWEEP_KINDS and not self.n_range:
            raise ConfigError(f"scenario.n_range: {self.kind} requires a nonempty range")
        if self.frames < 1:
            raise ConfigError(f"scenario.frames: must be >= 1, got {self.frames}")
        if self.replicates < 1:
            raise ConfigError(f"scenario.replicates: must be >= 1, got {self.replicates}")
        if self.mode not in ("stochastic", "expected"):
            raise ConfigError(f"global.mode: must be stochastic or expected, got {self.mode!r}")


@dataclass
class ScenarioResult:
    """Paths of emitted files and the outcome of the internal cross-checks."""

    files: dict[str, Path] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _parse_scalar(section: str, key: str, raw: str, kind, lo=None, hi=None):
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r}") from None
    if lo is not None and value < lo or hi is not None and value > hi:
        raise ConfigError(f"{section}.{key}: {value} outside [{lo}, {hi}]")
    return value


def _parse_schedule(raw: str, reinit_period: int | None) -> Schedule:
    token = raw.strip()
    if token == "reciprocal":
        return Schedule(kind="reciprocal", reinit_period=reinit_period)
    if token.startswith("constant:"):
        value = _parse_scalar("global", "kappa", token.split(":", 1)[1], float)
        return Schedule(kind="constant", value=value, reinit_period=reinit_period)
    if token.startswith("table:"):
        entries = tuple(
            _parse_scalar("global", "kappa", item, float)
            for item in token.split(":", 1)[1].split(",")
        )
        return Schedule(kind="table", table=entries, reinit_period=reinit_period)
    raise ConfigError(
        f"global.kappa: expected reciprocal, constant:<v> or table:<v,..>, got {raw!r}"
    )


def _parse_churn(raw: str, cost: float, p_global_min: float) -> tuple[ChurnEvent, ...]:
    events = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            delta_str, frame_str = token.split("@")
            delta = int(delta_str)
            frame = int(frame_str)
        except ValueError:
            raise ConfigError(
                f"scenario.churn: expected tokens like +7@20 or -7@80, got {token!r}"
            ) from None
        if delta == 0:
            raise ConfigError(f"scenario.churn: zero-size event at frame {frame}")
        if delta > 0:
            add = tuple(derive_params(cost, p_global_min) for _ in range(delta))
            events.append(ChurnEvent(frame=frame, add=add))
        else:
            events.append(ChurnEvent(frame=frame, remove=-delta))
    return tuple(events)


def parse_config(text: str) -> tuple[GameConfig, Scenario]:
    """Parse and validate configuration text into a run config and scenario.

    Unknown sections or keys, values outside their domain, and a missing
    scenario kind are all rejected with the offending field named.
    """
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"configuration text is not valid INI: {exc}") from None

    for section in parser.sections():
        if section not in ("global", "scenario", "nodes"):
            raise ConfigError(f"unknown section [{section}]")
    for section, allowed in (("global", _GLOBAL_KEYS), ("scenario", _SCENARIO_KEYS), ("nodes", _NODE_KEYS)):
        if parser.has_section(section):
            for key in parser[section]:
                if key not in allowed:
                    raise ConfigError(f"{section}.{key}: unknown key")

    g = parser["global"] if parser.has_section("global") else {}
    seed = _parse_scalar("global", "seed", g.get("seed", "0"), int, lo=0)
    frame_length = _parse_scalar("global", "frame_length", g.get("frame_length", "10000"), int, lo=1)
    p_global_min = _parse_scalar("global", "p_global_min", g.get("p_global_min", "0.05"), float)
    if not 0.0 < p_global_min < 0.5:
        raise ConfigError(
            f"global.p_global_min: {p_global_min} outside the admissible domain (0, 0.5)"
        )
    reinit_period_raw = _parse_scalar("global", "reinit_period", g.get("reinit_period", "0"), int, lo=0)
    reinit_period = reinit_period_raw if reinit_period_raw > 0 else None
    schedule = _parse_schedule(g.get("kappa", "reciprocal"), reinit_period)
    mode = g.get("mode", "stochastic").strip()
    reinit_kappa = _parse_scalar("global", "reinit_kappa", g.get("reinit_kappa", "false"), _parse_bool)

    if not parser.has_section("scenario") or "kind" not in parser["scenario"]:
        raise ConfigError("scenario.kind: missing (a [scenario] section with a kind is required)")
    s = parser["scenario"]
    kind = s["kind"].strip()
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"scenario.kind: unknown kind {kind!r} (one of {', '.join(SCENARIO_KINDS)})")

    defaults = _scenario_defaults(kind)
    n = _parse_scalar("scenario", "n", s.get("n", str(defaults["n"])), int, lo=1)
    frames = _parse_scalar("scenario", "frames", s.get("frames", str(defaults["frames"])), int, lo=1)
    replicates = _parse_scalar(
        "scenario", "replicates", s.get("replicates", str(defaults["replicates"])), int, lo=1
    )
    n_min = _parse_scalar("scenario", "n_min", s.get("n_min", str(defaults["n_min"])), int, lo=1)
    n_max = _parse_scalar("scenario", "n_max", s.get("n_max", str(defaults["n_max"])), int, lo=1)
    if n_max < n_min:
        raise ConfigError(f"scenario.n_max: {n_max} is below n_min {n_min}")
    n_range = tuple(range(n_min, n_max + 1)) if kind in _SWEEP_KINDS else ()

    costs_raw = parser["nodes"].get("costs", "1") if parser.has_section("nodes") else "1"
    costs = tuple(
        _parse_scalar("nodes", "costs", item, float) for item in costs_raw.split(",")
    )
    if any(c <= 0 for c in costs):
        raise ConfigError("nodes.costs: every cost must be positive")
    if kind in _SWEEP_KINDS and len(costs) > 1:
        raise ConfigError("nodes.costs: sweeps vary the roster size; give a single cost")
    if len(costs) not in (1, n):
        raise ConfigError(f"nodes.costs: expected 1 or {n} entries, got {len(costs)}")

    churn_events: tuple[ChurnEvent, ...] = ()
    if "churn" in s:
        if kind != "churn":
            raise ConfigError("scenario.churn: only valid for the churn scenario")
        churn_events = _parse_churn(s["churn"], costs[0], p_global_min)
    if kind == "churn":
        if not churn_events:
            churn_events = _parse_churn(defaults["churn"], costs[0], p_global_min)
        bad = [ev.frame for ev in churn_events if ev.frame > frames]
        if bad:
            raise ConfigError(f"scenario.churn: event frame {bad[0]} beyond frames={frames}")

    roster_costs = costs if len(costs) == n else costs * n
    nodes = tuple(derive_params(c, p_global_min) for c in roster_costs)
    config = GameConfig(
        nodes=nodes,
        frame_length=frame_length,
        schedule=schedule,
        seed=seed,
        churn_events=churn_events,
    )
    scenario = Scenario(
        kind=kind,
        n=n,
        frames=frames,
        replicates=replicates,
        n_range=n_range,
        mode=mode,
        reinit_kappa=reinit_kappa,
        p_global_min=p_global_min,
        costs=costs,
    )
    return config, scenario


def _parse_bool(raw: str) -> bool:
    token = raw.strip().lower()
    if token in ("true", "yes", "1", "on"):
        return True
    if token in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _scenario_defaults(kind: str) -> dict:
    base = {"n": 10, "frames": 200, "replicates": 5, "n_min": 1, "n_max": 20, "churn": ""}
    if kind == "churn":
        base.update(n=3, frames=120, churn="+7@20, -7@80")
    elif kind == "sweep_poa_vs_n":
        base.update(n_max=25, frames=150)
    elif kind in ("sweep_prob_vs_n", "sweep_age_vs_n"):
        base.update(frames=150)
    elif kind == "rr_compare":
        base.update(n_min=5, n_max=20, frames=150)
    return base


# ---------------------------------------------------------------------------
# scenario execution


def _format(value) -> str:
    if isinstance(value, float) or isinstance(value, np.floating):
        return f"{value:.12g}"
    return str(value)


def _write_table(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format(v) for v in row) + "\n")


def _write_manifest(path: Path, config_text: str, config: GameConfig, scenario: Scenario) -> None:
    manifest = {
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "seed": config.seed,
        "scenario": scenario.kind,
        "versions": {
            "aoilab": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _rosters_by_frame(
    config: GameConfig, frames: int
) -> list[tuple[NodeParams, ...]]:
    """Active roster at each frame, with churn applied at frame starts."""
    events = {ev.frame: ev for ev in config.churn_events}
    roster = list(config.nodes)
    out = []
    for frame in range(1, frames + 1):
        ev = events.get(frame)
        if ev is not None:
            if ev.remove:
                roster = roster[: len(roster) - ev.remove]
            roster.extend(ev.add)
        out.append(tuple(roster))
    return out


def _best_response_twin(trajectory, rosters) -> list[np.ndarray]:
    """Best-response iterates fed the same initial draws and churn as the run."""
    out: list[np.ndarray] = []
    previous: np.ndarray | None = None
    for record, roster in zip(trajectory.records, rosters):
        if previous is None:
            current = record.probs.copy()
        else:
            current = previous
            if len(record.probs) < len(current):
                current = current[: len(record.probs)]
            elif len(record.probs) > len(current):
                # Joining nodes enter the twin at the same initial draws.
                current = np.concatenate([current, record.probs[len(current):]])
        out.append(current)
        previous = best_response_map(current, roster)
    return out


def _run_convergence(config: GameConfig, scenario: Scenario, out_dir: Path) -> ScenarioResult:
    result = ScenarioResult()
    trajectory = run_learning(
        config, scenario.frames, mode=scenario.mode, reinit_on_churn=scenario.reinit_kappa
    )
    rosters = _rosters_by_frame(config, scenario.frames)
    twin = _best_response_twin(trajectory, rosters)

    with_roster = scenario.kind == "churn"
    header = ["frame", "node", "p_learning", "p_best_response"]
    if with_roster:
        header.append("roster_size")
    rows = []
    for record, br in zip(trajectory.records, twin):
        for pos in range(record.roster):
            row = [record.frame, pos, record.probs[pos], br[pos]]
            if with_roster:
                row.append(record.roster)
            rows.append(row)
    table = out_dir / f"{scenario.kind}.csv"
    _write_table(table, header, rows)
    result.files[scenario.kind] = table

    equilibrium = solve_ne(rosters[-1], tol=1e-10)
    gap = float(np.max(np.abs(trajectory.final_probs - equilibrium.probabilities)))
    gate = CHURN_GATE if with_roster else CONVERGENCE_GATE
    result.checks[f"final profile within {gate} of the equilibrium"] = gap <= gate
    return result


def _sweep_point(
    n: int, scenario: Scenario, config: GameConfig
) -> dict[str, float]:
    nodes = tuple(derive_params(scenario.costs[0], scenario.p_global_min) for _ in range(n))
    p_learning, p_rr, age_learning, age_rr = [], [], [], []
    for rep in range(scenario.replicates):
        # Every (roster size, replicate) pair owns its own entropy, so sweep
        # points never share streams and may run concurrently.
        rep_config = GameConfig(
            nodes=nodes,
            frame_length=config.frame_length,
            schedule=config.schedule,
            seed=config.seed + 100_000 * n + rep,
        )
        run = run_learning(rep_config, scenario.frames, mode=scenario.mode)
        p_vec = run.final_probs
        p_learning.append(float(np.mean(p_vec)))
        age_learning.append(
            float(np.mean([expected_age(p_vec, i) for i in range(n)]))
        )
        rr = simulate_rr(rep_config, scenario.frames)
        p_rr_mean = float(np.mean(rr.final_probs))
        p_rr.append(p_rr_mean)
        age_rr.append(rr_expected_age(p_rr_mean, n))
    welfare = price_of_anarchy(nodes, seed=config.seed)
    point = {"n": n, "poa": welfare.poa}
    for name, values in (
        ("p_learning", p_learning),
        ("p_rr", p_rr),
        ("age_learning", age_learning),
        ("age_rr", age_rr),
    ):
        arr = np.asarray(values)
        point[name] = float(arr.mean())
        point[f"{name}_se"] = (
            float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
        )
    return point


def _run_sweep(
    config: GameConfig, scenario: Scenario, out_dir: Path, workers: int = 1
) -> ScenarioResult:
    result = ScenarioResult()
    header = [
        "n",
        "p_learning",
        "p_learning_se",
        "p_rr",
        "p_rr_se",
        "age_learning",
        "age_learning_se",
        "age_rr",
        "age_rr_se",
        "poa",
    ]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(
                pool.map(_sweep_point, scenario.n_range, repeat(scenario), repeat(config))
            )
    else:
        points = [_sweep_point(n, scenario, config) for n in scenario.n_range]
    rows = [[point[key] for key in header] for point in points]
    table = out_dir / f"{scenario.kind}.csv"
    _write_table(table, header, rows)
    result.files[scenario.kind] = table

    result.checks["price of anarchy at least one"] = all(
        point["poa"] >= 1.0 - POA_GATE for point in points
    )
    ordering = [
        point["p_rr"] > point["p_learning"] for point in points if point["n"] >= 2
    ]
    result.checks["round-robin transmits more aggressively"] = all(ordering)
    return result


def run_scenario(
    config: GameConfig,
    scenario: Scenario,
    out_dir: str | Path,
    config_text: str = "",
    workers: int = 1,
) -> ScenarioResult:
    """Execute a scenario, emit its tables and manifest, run cross-checks.

    Identical configuration and seed produce byte-identical outputs whatever
    the ``workers`` count: sweep points are independent and collected in
    order.  The returned result carries per-check booleans; the CLI maps
    ``ok`` to the process exit code.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RuntimeError(f"cannot create output directory {out}: {exc}") from exc
    if scenario.kind in ("convergence", "churn"):
        result = _run_convergence(config, scenario, out)
    else:
        result = _run_sweep(config, scenario, out, workers=workers)
    manifest = out / "manifest.json"
    _write_manifest(manifest, config_text, config, scenario)
    result.files["manifest"] = manifest
    return result
