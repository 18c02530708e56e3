"""JSON (de)serialisation of maps, records and result documents.

Results go to the directory given on the command line, or to a per-user
location from platformdirs:
  Linux:   ~/.local/share/annulus_lab/runs
  macOS:   ~/Library/Application Support/annulus_lab/runs
  Windows: C:/Users/.../AppData/Local/annulus_lab/runs

Map documents are parsed strictly: unknown kinds, unknown keys and missing
keys all raise ConfigError.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from platformdirs import user_data_dir

from ..constants import APP_NAME, RESULT_FILE
from ..errors import ConfigError
from .annulus_maps import (
    BilliardMap,
    Compose,
    Deck,
    IntegrableTwist,
    Inverse,
    LiftedPoint,
    MapSpec,
    PinnedKick,
    Power,
)
from .billiards import ConvexCurve, Ellipse, FourierBoundary
from .foliation import FoliationRef
from .graphs import ConnectReport, GraphRecord
from .monotonicity import MonotonicityReport, PairRecord
from .orbits import OrbitRecord

RUNS_DIR = Path(user_data_dir(APP_NAME)) / "runs"


def _keys(d: dict, kind: str, required: set[str], optional: frozenset[str] = frozenset()) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{kind} must be a JSON object, got {type(d).__name__}")
    present = set(d) - {"kind"}
    if present - required - optional:
        raise ConfigError(f"unknown keys for {kind}: {sorted(present - required - optional)}")
    if required - present:
        raise ConfigError(f"missing keys for {kind}: {sorted(required - present)}")


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    return float(value)


def _integer(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


# ── Curves ────────────────────────────────────────────────────────────

def _curve_to_dict(c: ConvexCurve) -> dict:
    s = c.shape
    if isinstance(s, Ellipse):
        return {"kind": "Ellipse", "a": s.a, "b": s.b}
    return {"kind": "FourierBoundary", "radius": s.radius, "cos": list(s.cos), "sin": list(s.sin)}


def _curve_from_dict(d: dict) -> ConvexCurve:
    kind = d.get("kind") if isinstance(d, dict) else None
    try:
        if kind == "Ellipse":
            _keys(d, kind, {"a", "b"})
            return ConvexCurve(Ellipse(_number(d["a"], "a"), _number(d["b"], "b")))
        if kind == "FourierBoundary":
            _keys(d, kind, {"radius", "cos", "sin"})
            return ConvexCurve(
                FourierBoundary(
                    _number(d["radius"], "radius"),
                    tuple(_number(c, "cos") for c in d["cos"]),
                    tuple(_number(c, "sin") for c in d["sin"]),
                )
            )
    except ValueError as exc:
        raise ConfigError(f"invalid {kind}: {exc}") from exc
    raise ConfigError(f"unknown curve kind {kind!r}")


# ── Maps ──────────────────────────────────────────────────────────────

def map_to_dict(m: MapSpec) -> dict:
    """Canonical JSON form of a map tree."""
    match m:
        case IntegrableTwist(a=a, b=b):
            return {"kind": m.kind, "a": a, "b": b}
        case PinnedKick(eps=eps, harmonics=h, drift=drift):
            d = {"kind": m.kind, "eps": eps, "harmonics": list(h)}
            if drift:
                d["drift"] = drift
            return d
        case BilliardMap(curve=curve):
            return {"kind": m.kind, "curve": _curve_to_dict(curve)}
        case Compose(items=items):
            return {"kind": m.kind, "items": [map_to_dict(i) for i in items]}
        case Inverse(item=item):
            return {"kind": m.kind, "item": map_to_dict(item)}
        case Power(item=item, n=n):
            return {"kind": m.kind, "item": map_to_dict(item), "n": n}
        case Deck(n=n):
            return {"kind": m.kind, "n": n}
    raise ConfigError(f"cannot serialise {type(m).__name__}")


def map_from_dict(d: dict) -> MapSpec:
    kind = d.get("kind") if isinstance(d, dict) else None
    try:
        match kind:
            case "IntegrableTwist":
                _keys(d, kind, {"a", "b"})
                return IntegrableTwist(_number(d["a"], "a"), _number(d["b"], "b"))
            case "PinnedKick":
                _keys(d, kind, {"eps", "harmonics"}, frozenset({"drift"}))
                return PinnedKick(
                    _number(d["eps"], "eps"),
                    tuple(_number(c, "harmonics") for c in d["harmonics"]),
                    _number(d.get("drift", 0.0), "drift"),
                )
            case "BilliardMap":
                _keys(d, kind, {"curve"})
                return BilliardMap(_curve_from_dict(d["curve"]))
            case "Compose":
                _keys(d, kind, {"items"})
                return Compose(tuple(map_from_dict(i) for i in d["items"]))
            case "Inverse":
                _keys(d, kind, {"item"})
                return Inverse(map_from_dict(d["item"]))
            case "Power":
                _keys(d, kind, {"item", "n"})
                return Power(map_from_dict(d["item"]), _integer(d["n"], "n"))
            case "Deck":
                _keys(d, kind, {"n"})
                return Deck(_integer(d["n"], "n"))
    except ValueError as exc:
        raise ConfigError(f"invalid {kind}: {exc}") from exc
    raise ConfigError(f"unknown map kind {kind!r}")


# ── Records ───────────────────────────────────────────────────────────

def _point(z: LiftedPoint) -> list[float]:
    return [z.x, z.y]


def _finite(v: float) -> float | None:
    return v if math.isfinite(v) else None


def orbit_to_dict(o: OrbitRecord) -> dict:
    return {
        "points": [_point(z) for z in o.points],
        "type_pq": list(o.type_pq),
        "residual": o.residual,
        "well_ordered": o.well_ordered,
        "certified": o.certified,
    }


def orbit_from_dict(d: dict) -> OrbitRecord:
    return OrbitRecord(
        points=[LiftedPoint(x, y) for x, y in d["points"]],
        type_pq=tuple(d["type_pq"]),
        residual=d["residual"],
        well_ordered=d["well_ordered"],
        certified=d.get("certified", True),
    )


def _foliation_to_dict(F: FoliationRef) -> dict:
    return {"pushforward": map_to_dict(F.pushforward)}


def graph_to_dict(g: GraphRecord) -> dict:
    return {
        "samples": list(g.samples),
        "lipschitz_estimate": g.lipschitz_estimate,
        "lipschitz_bound": _finite(g.lipschitz_bound),
        "transverse_to": [_foliation_to_dict(F) for F in g.transverse_to],
        "seed": _point(g.seed),
        "rotation": g.rotation,
    }


def connect_to_dict(r: ConnectReport) -> dict:
    return {
        "status": r.status.value,
        "eps": r.eps,
        "budget": r.budget,
        "segment": [_point(z) for z in r.segment],
        "graph": graph_to_dict(r.graph) if r.graph else None,
        "iterations": r.iterations,
        "backward": r.backward,
    }


def _pair_record_to_dict(r: PairRecord) -> dict:
    return {
        "category": r.category,
        "pair": [_point(z) for z in r.pair],
        "tau": r.tau,
        "classes": [c.value for c in r.classes],
    }


def monotonicity_to_dict(r: MonotonicityReport) -> dict:
    return {
        "direction": r.direction.value,
        "samples": r.samples,
        "counterexamples": [_pair_record_to_dict(c) for c in r.counterexamples],
        "failures": [{"pair": [_point(z) for z in p], "error": e} for p, e in r.failures],
    }


# ── Result documents ──────────────────────────────────────────────────

def dump_result(document: dict) -> str:
    """Canonical text of a result document."""
    return json.dumps(document, sort_keys=True, indent=2)


def write_result(document: dict, out_dir: Path | None = None) -> Path:
    """Write ``result.json`` into out_dir (default RUNS_DIR) and return its path."""
    out_dir = Path(out_dir) if out_dir is not None else RUNS_DIR
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / RESULT_FILE
    path.write_text(dump_result(document) + "\n")
    return path


def load_result(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (json.JSONDecodeError, OSError) as exc:
        raise ConfigError(f"cannot read result document {path}: {exc}") from exc
