"""Experiment configurations and the per-command runners behind the CLI."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .constants import (
    CONNECT_SEEDS,
    DEFAULT_BOUNDARY_PAIRS,
    DEFAULT_PAIRS,
    DEFAULT_SAME_LEAF_PAIRS,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    GRAPH_CELL_BITS,
    GRAPH_ITERATIONS,
    GRAPH_SEEDS,
    GRAPH_TOL,
    LEAF_GRID,
    LEAF_SAMPLES,
    MAX_ORBITS,
    ORBIT_TOL,
    ROTATION_ITERATIONS,
)
from .errors import AnnulusLabError, ConfigError, RefinementError
from .models.annulus_maps import LiftedPoint, MapSpec
from .models.foliation import VERTICAL, FoliationRef, angle_class, pulled_back, pushed, tau
from .models.graphs import invariant_graph_scan, mather_connect_search
from .models.monotonicity import PairSampler, is_monotone
from .models.natural_lift import PairDomain, natural_lift
from .models.orbits import find_pq_orbits, leaf_intersection_extremes, rotation_number
from .models.save import (
    connect_to_dict,
    graph_to_dict,
    map_from_dict,
    map_to_dict,
    monotonicity_to_dict,
    orbit_to_dict,
)
from .states import Circle, Command, Direction

logger = logging.getLogger(__name__)

_ORBIT_PARAMS = {
    "tol": ORBIT_TOL,
    "leaf_grid": LEAF_GRID,
    "samples": LEAF_SAMPLES,
    "max_orbits": MAX_ORBITS,
    "exploratory": False,
}

# Every key a command accepts, with its default; None marks a required key.
PARAMETERS: dict[Command, dict[str, object]] = {
    Command.ANGLE: {"z": None, "z2": None, "foliation": None, "domain": None},
    Command.TAU: {
        "z": [0.5, 0.25],
        "z2": [0.5, 0.75],
        "foliation": None,
        "target": "pullback",
        "method": "auto",
        "field": None,
    },
    Command.MONOTONE: {
        "direction": Direction.DECREASING.value,
        "foliation": None,
        "pairs": DEFAULT_PAIRS,
        "same_leaf": DEFAULT_SAME_LEAF_PAIRS,
        "boundary": DEFAULT_BOUNDARY_PAIRS,
    },
    Command.ROTATION: {"circle": Circle.C0.value, "iterations": ROTATION_ITERATIONS},
    Command.FIND_ORBITS: {"p": None, "q": None, **_ORBIT_PARAMS},
    Command.GRAPH_SCAN: {
        "y_grid": GRAPH_SEEDS,
        "iterations": GRAPH_ITERATIONS,
        "tol": GRAPH_TOL,
        "cell_bits": GRAPH_CELL_BITS,
    },
    Command.CONNECT: {
        "eps": None,
        "budget": None,
        "seeds": CONNECT_SEEDS,
        "backward": False,
        "scan_iterations": GRAPH_ITERATIONS,
        "y_grid": GRAPH_SEEDS,
    },
    Command.EXTREMES: {"x": None, "tol": ORBIT_TOL, "samples": 4 * LEAF_SAMPLES},
    Command.SWEEP: {"pairs": None, **_ORBIT_PARAMS},
}

_CONFIG_KEYS = {"command", "map", "parameters", "seed"}
_OPTIONAL = {"foliation", "domain", "field"}


@dataclass
class ExperimentConfig:
    command: Command
    map: MapSpec
    parameters: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    @classmethod
    def from_dict(cls, d: dict, command: Command | str | None = None) -> ExperimentConfig:
        """Strict parse; ``command`` from the command line must match the file."""
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        name = d.get("command", command.value if isinstance(command, Command) else command)
        try:
            cmd = Command(name)
        except ValueError as exc:
            raise ConfigError(f"unknown command {name!r}") from exc
        if command is not None and Command(command) is not cmd:
            raise ConfigError(f"command line says {Command(command).value}, config says {cmd.value}")
        if "map" not in d:
            raise ConfigError("configuration needs a map")
        seed = d.get("seed", DEFAULT_SEED)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        return cls(cmd, map_from_dict(d["map"]), resolve_parameters(cmd, d.get("parameters", {})), seed)

    def to_dict(self) -> dict:
        return {
            "command": self.command.value,
            "map": map_to_dict(self.map),
            "parameters": self.parameters,
            "seed": self.seed,
        }


def resolve_parameters(command: Command, given: dict) -> dict:
    if not isinstance(given, dict):
        raise ConfigError("parameters must be a JSON object")
    table = PARAMETERS[command]
    unknown = set(given) - set(table)
    if unknown:
        raise ConfigError(f"unknown parameters for {command.value}: {sorted(unknown)}")
    required = [k for k, v in table.items() if v is None and k not in _OPTIONAL and k not in given]
    if required:
        raise ConfigError(f"{command.value} needs parameters {required}")
    return {**table, **given}


# ── Parameter helpers ─────────────────────────────────────────────────

def _point(value, name: str) -> LiftedPoint:
    try:
        x, y = value
        return LiftedPoint(float(x), float(y))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a pair [x, y] with y in [0, 1]") from exc


def _foliation(value) -> FoliationRef:
    return VERTICAL if value is None else FoliationRef(map_from_dict(value))


def _target(m: MapSpec, F: FoliationRef, value) -> FoliationRef:
    if value == "pullback":
        return pulled_back(F, m)
    if value == "pushforward":
        return pushed(F, m)
    if isinstance(value, dict):
        return FoliationRef(map_from_dict(value))
    raise ConfigError(f"target must be 'pullback', 'pushforward' or a map, got {value!r}")


_DOMAINS = {
    "leaf-complement": PairDomain.leaf_complement,
    "lower-half-order": PairDomain.lower_half_order,
    "boundary": lambda F: PairDomain.boundary_product(),
}


# ── Runners ───────────────────────────────────────────────────────────

def _run_angle(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    z, z2 = _point(p["z"], "z"), _point(p["z2"], "z2")
    F = _foliation(p["foliation"])
    out = {"class": angle_class(z, z2, F).value, "natural_lift": None}
    if p["domain"] is not None:
        if p["domain"] not in _DOMAINS:
            raise ConfigError(f"unknown domain {p['domain']!r}")
        out["natural_lift"] = natural_lift(_DOMAINS[p["domain"]](F), z, z2, F)
    return out


def _run_tau(cfg: ExperimentConfig) -> dict:
    p, m = cfg.parameters, cfg.map
    F = _foliation(p["foliation"])
    F2 = _target(m, F, p["target"])
    if p["field"] is None:
        z, z2 = _point(p["z"], "z"), _point(p["z2"], "z2")
        return {"tau": tau(z, z2, F, F2, method=p["method"])}

    n = p["field"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("field must be a positive integer")
    xs = [(i + 0.5) / n for i in range(n)]
    values: list[list[int | None]] = []
    for x0 in xs:
        row = []
        for x1 in xs:
            try:
                row.append(tau(LiftedPoint(x0, 0.25), LiftedPoint(x1, 0.75), F, F2, method=p["method"]))
            except AnnulusLabError as exc:
                logger.debug("tau field entry (%.4g, %.4g) failed: %s", x0, x1, exc)
                row.append(None)
        values.append(row)
    return {"field": {"n": n, "xs": xs, "y0": 0.25, "y1": 0.75, "values": values}}


def _run_monotone(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    sampler = PairSampler(p["pairs"], p["same_leaf"], p["boundary"], cfg.seed)
    try:
        direction = Direction(p["direction"])
    except ValueError as exc:
        raise ConfigError(f"unknown direction {p['direction']!r}") from exc
    report = is_monotone(cfg.map, _foliation(p["foliation"]), direction, sampler)
    return monotonicity_to_dict(report)


def _run_rotation(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    where = p["circle"]
    start = _point(where, "circle") if isinstance(where, list) else where
    result = rotation_number(cfg.map, start, p["iterations"])
    return {"value": result.value, "half_width": result.half_width}


def _orbits(m: MapSpec, p_: int, q_: int, params: dict) -> list[dict]:
    orbits = find_pq_orbits(
        m, p_, q_,
        tol=params["tol"],
        leaf_grid=params["leaf_grid"],
        samples=params["samples"],
        max_orbits=params["max_orbits"],
        exploratory=params["exploratory"],
    )
    return [orbit_to_dict(o) for o in orbits]


def _run_find_orbits(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    orbits = _orbits(cfg.map, p["p"], p["q"], p)
    return {"count": len(orbits), "orbits": orbits}


def _run_graph_scan(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    graphs = invariant_graph_scan(
        cfg.map, y_grid=p["y_grid"], iterations=p["iterations"], tol=p["tol"], cell_bits=p["cell_bits"]
    )
    return {"count": len(graphs), "seeds": p["y_grid"], "graphs": [graph_to_dict(g) for g in graphs]}


def _run_connect(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    report = mather_connect_search(
        cfg.map,
        p["eps"],
        p["budget"],
        seeds=p["seeds"],
        backward=p["backward"],
        scan_iterations=p["scan_iterations"],
        y_grid=p["y_grid"],
    )
    return connect_to_dict(report)


def _run_extremes(cfg: ExperimentConfig) -> dict:
    p = cfg.parameters
    ext = leaf_intersection_extremes(cfg.map, p["x"], tol=p["tol"], samples=p["samples"])
    return {
        "z0": [ext.z0.x, ext.z0.y],
        "z1": [ext.z1.x, ext.z1.y],
        "tau_check": ext.tau_check,
        "intersections": [[z.x, z.y] for z in ext.intersections],
    }


def _sweep_cell(m: MapSpec, p_: int, q_: int, params: dict) -> dict:
    cell = {"p": p_, "q": q_}
    try:
        cell["orbits"] = _orbits(m, p_, q_, params)
    except AnnulusLabError as exc:
        cell["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return cell


def _run_sweep(cfg: ExperimentConfig, threads: int = DEFAULT_THREADS) -> dict:
    p = cfg.parameters
    try:
        cells = [(int(a), int(b)) for a, b in p["pairs"]]
    except (TypeError, ValueError) as exc:
        raise ConfigError("pairs must be a list of [p, q]") from exc
    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        results = list(pool.map(lambda pq: _sweep_cell(cfg.map, *pq, p), cells))
    return {"cells": results}


RUNNERS: dict[Command, Callable[[ExperimentConfig], dict]] = {
    Command.ANGLE: _run_angle,
    Command.TAU: _run_tau,
    Command.MONOTONE: _run_monotone,
    Command.ROTATION: _run_rotation,
    Command.FIND_ORBITS: _run_find_orbits,
    Command.GRAPH_SCAN: _run_graph_scan,
    Command.CONNECT: _run_connect,
    Command.EXTREMES: _run_extremes,
}


def run(cfg: ExperimentConfig, threads: int = DEFAULT_THREADS) -> tuple[dict, int]:
    """Run one experiment and build its result document and exit code."""
    document = {"inputs": cfg.to_dict(), "version": __version__, "output": None}
    start = time.perf_counter()
    code = 0
    try:
        if cfg.command is Command.SWEEP:
            document["output"] = _run_sweep(cfg, threads)
        else:
            document["output"] = RUNNERS[cfg.command](cfg)
    except AnnulusLabError as exc:
        logger.error("%s failed: %s", cfg.command.value, exc)
        document["error"] = {"type": type(exc).__name__, "message": str(exc)}
        circle = getattr(exc, "circle", None)
        if circle is not None:
            document["error"]["circle"] = circle
        code = exc.exit_code
    except ValueError as exc:
        logger.error("%s failed inside a numeric routine: %s", cfg.command.value, exc)
        document["error"] = {"type": RefinementError.__name__, "message": str(exc)}
        code = RefinementError.exit_code
    document["wall_time"] = time.perf_counter() - start
    return document, code
