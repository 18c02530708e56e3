"""CSV exports of result documents for external plotting tools."""

from __future__ import annotations

import csv
import logging
from pathlib import Path

from .errors import UnsupportedKind
from .states import Command, PlotKind

logger = logging.getLogger(__name__)

_SOURCES = {
    PlotKind.PHASE_PORTRAIT: {Command.FIND_ORBITS, Command.SWEEP, Command.CONNECT},
    PlotKind.GRAPH_OVERLAY: {Command.GRAPH_SCAN},
    PlotKind.TAU_FIELD: {Command.TAU},
}


def _write(path: Path, header: list[str], rows) -> Path:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _points(path: Path, points: list[list[float]]) -> Path:
    return _write(path, ["index", "x", "y"], ([i, x, y] for i, (x, y) in enumerate(points)))


def emit_plot_data(document: dict, kind: PlotKind | str, out_dir: Path) -> list[Path]:
    """Write the CSV files for ``kind`` next to the result document."""
    kind = PlotKind(kind)
    command = Command(document["inputs"]["command"])
    output = document.get("output")
    if command not in _SOURCES[kind] or output is None:
        raise UnsupportedKind(f"{kind.value} cannot be drawn from a {command.value} result")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    match kind:
        case PlotKind.PHASE_PORTRAIT if command is Command.FIND_ORBITS:
            for k, orbit in enumerate(output["orbits"]):
                written.append(_points(out_dir / f"orbit_{k}.csv", orbit["points"]))
        case PlotKind.PHASE_PORTRAIT if command is Command.SWEEP:
            for cell in output["cells"]:
                for k, orbit in enumerate(cell.get("orbits", [])):
                    name = f"orbit_p{cell['p']}_q{cell['q']}_{k}.csv"
                    written.append(_points(out_dir / name, orbit["points"]))
        case PlotKind.PHASE_PORTRAIT:
            written.append(_points(out_dir / "segment.csv", output["segment"]))
        case PlotKind.GRAPH_OVERLAY:
            for k, graph in enumerate(output["graphs"]):
                n = len(graph["samples"])
                rows = ([(i + 0.5) / n, y] for i, y in enumerate(graph["samples"]))
                written.append(_write(out_dir / f"graph_{k}.csv", ["x", "y"], rows))
        case PlotKind.TAU_FIELD:
            field = output.get("field")
            if field is None:
                raise UnsupportedKind("tau-field needs a tau result computed with a field")
            rows = (
                [i, j, x0, x1, field["values"][i][j]]
                for i, x0 in enumerate(field["xs"])
                for j, x1 in enumerate(field["xs"])
            )
            written.append(_write(out_dir / "tau_field.csv", ["i", "j", "x0", "x1", "tau"], rows))

    logger.info("%s: wrote %d file(s) to %s", kind.value, len(written), out_dir)
    return written
