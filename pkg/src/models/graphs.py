"""Invariant graphs and connecting orbits.

Graphs are detected from orbit closures: an orbit is iterated, its x
coordinates binned into 2**cell_bits cells, and the cloud is accepted as a
graph when every cell holds a thin band of y values and no long run of
cells is empty. Accepted graphs are then re-checked for transversality to
m(V) and m^-1(V) and for the Lipschitz bound cot(beta) of the twist cone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..constants import (
    CONNECT_SEEDS,
    GRAPH_CELL_BITS,
    GRAPH_ITERATIONS,
    GRAPH_LIPSCHITZ_CAP,
    GRAPH_MAX_EMPTY_RUN,
    GRAPH_SEEDS,
    GRAPH_TOL,
    INV_GOLDEN,
    LIPSCHITZ_SLACK,
)
from ..errors import AnnulusLabError, InvalidParameter
from ..states import ConnectStatus, Side
from .annulus_maps import Inverse, LiftedPoint, MapSpec, twist_cone
from .foliation import VERTICAL, FoliationRef, pulled_back, pushed
from .natural_lift import GraphRegion

logger = logging.getLogger(__name__)


@dataclass
class GraphRecord:
    """A certified invariant graph y = psi(x), sampled at cell centres."""

    samples: tuple[float, ...]
    lipschitz_estimate: float
    transverse_to: list[FoliationRef]
    seed: LiftedPoint
    rotation: float
    lipschitz_bound: float

    @property
    def xs(self) -> np.ndarray:
        n = len(self.samples)
        return (np.arange(n) + 0.5) / n

    def height(self, x: float) -> float:
        return float(np.interp(x % 1.0, self.xs, self.samples, period=1.0))

    def lies_within(self, low: float, high: float) -> bool:
        return low < min(self.samples) and max(self.samples) < high

    def region(self, side: Side = Side.LOWER) -> GraphRegion:
        return GraphRegion(self.samples, side)


# ---------------------------------------------------------------------------
# Orbit-closure scan
# ---------------------------------------------------------------------------

def _orbit(m: MapSpec, z: LiftedPoint, iterations: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.empty(iterations + 1)
    ys = np.empty(iterations + 1)
    x, y = z.x, z.y
    for k in range(iterations + 1):
        xs[k], ys[k] = x, y
        x, y = m.lift(x, y)
    return xs, ys


def _longest_empty_run(occupied: np.ndarray) -> int:
    if not occupied.any():
        return len(occupied)
    start = int(np.argmax(occupied))
    run = best = 0
    for filled in np.roll(occupied, -start):
        run = 0 if filled else run + 1
        best = max(best, run)
    return best


def _leaf_order_preserved(curve_x: np.ndarray, curve_y: np.ndarray, F: FoliationRef) -> bool:
    xi = np.array([F.coordinates(LiftedPoint(x, y))[0] for x, y in zip(curve_x, curve_y)])
    return bool(np.all(np.diff(xi) > 0.0))


def _certify(
    m: MapSpec,
    seed: LiftedPoint,
    iterations: int,
    cells: int,
    tol: float,
    bound: float,
    slack: float,
) -> GraphRecord | None:
    xs, ys = _orbit(m, seed, iterations)
    width = 1.0 / cells
    idx = np.minimum(((xs % 1.0) * cells).astype(int), cells - 1)
    counts = np.bincount(idx, minlength=cells)
    occupied = counts > 0

    run = _longest_empty_run(occupied)
    if run > GRAPH_MAX_EMPTY_RUN:
        logger.debug("seed y=%.6g: %d empty cells in a row", seed.y, run)
        return None

    low = np.full(cells, np.inf)
    high = np.full(cells, -np.inf)
    np.minimum.at(low, idx, ys)
    np.maximum.at(high, idx, ys)
    allowance = tol + (min(bound, GRAPH_LIPSCHITZ_CAP) + slack) * width
    spread = float(np.max((high - low)[occupied]))
    if spread > allowance:
        logger.debug("seed y=%.6g: cell spread %.3g exceeds %.3g", seed.y, spread, allowance)
        return None

    centres = (np.arange(cells) + 0.5) * width
    means = np.bincount(idx, weights=ys, minlength=cells)[occupied] / counts[occupied]
    psi = np.interp(centres, centres[occupied], means, period=1.0)
    if float(np.max(np.abs(ys - np.interp(xs % 1.0, centres, psi, period=1.0)))) > allowance:
        logger.debug("seed y=%.6g: orbit leaves its own graph", seed.y)
        return None

    slopes = np.abs(np.diff(np.append(psi, psi[0]))) / width
    estimate = float(np.max(slopes))
    if np.isfinite(bound) and estimate > bound + slack:
        logger.warning(
            "graph from y=%.6g dropped: Lipschitz %.4g above cot(beta)=%.4g", seed.y, estimate, bound
        )
        return None

    closed_x = np.append(centres, centres[0] + 1.0)
    closed_y = np.append(psi, psi[0])
    leaves = [VERTICAL, pushed(VERTICAL, m), pulled_back(VERTICAL, m)]
    for F in leaves[1:]:
        try:
            transverse = _leaf_order_preserved(closed_x, closed_y, F)
        except AnnulusLabError as exc:
            logger.warning("graph from y=%.6g dropped: %s", seed.y, exc)
            return None
        if not transverse:
            logger.warning("graph from y=%.6g dropped: not transverse to %s", seed.y, F)
            return None

    return GraphRecord(
        samples=tuple(float(v) for v in np.clip(psi, 0.0, 1.0)),
        lipschitz_estimate=estimate,
        transverse_to=leaves,
        seed=seed,
        rotation=float((xs[-1] - xs[0]) / iterations),
        lipschitz_bound=bound,
    )


def invariant_graph_scan(
    m: MapSpec,
    y_grid: int = GRAPH_SEEDS,
    iterations: int = GRAPH_ITERATIONS,
    tol: float = GRAPH_TOL,
    cell_bits: int = GRAPH_CELL_BITS,
    slack: float = LIPSCHITZ_SLACK,
) -> list[GraphRecord]:
    """Certified invariant graphs grown from seeds (0, (j + 0.618...) / y_grid)."""
    if y_grid < 1 or iterations < 1:
        raise InvalidParameter("y_grid and iterations must be >= 1")
    if not m.non_wandering_certified:
        logger.warning("map has no invariant-measure certificate; graphs are exploratory")
    bound = twist_cone(m).lipschitz_bound
    graphs = []
    for j in range(y_grid):
        seed = LiftedPoint(0.0, (j + INV_GOLDEN) / y_grid)
        record = _certify(m, seed, iterations, 2**cell_bits, tol, bound, slack)
        if record is not None:
            graphs.append(record)
    logger.info("graph scan: %d of %d seeds certified", len(graphs), y_grid)
    return graphs


# ---------------------------------------------------------------------------
# Connecting orbits
# ---------------------------------------------------------------------------

@dataclass
class ConnectReport:
    """Outcome of a search for an orbit from near C0 to near C1.

    With ``backward`` the segment is an orbit of f^-1, i.e. an f-orbit run
    from C1 down to C0.
    """

    status: ConnectStatus
    eps: float
    budget: int
    segment: list[LiftedPoint] = field(default_factory=list)
    graph: GraphRecord | None = None
    iterations: int = 0
    backward: bool = False


def mather_connect_search(
    m: MapSpec,
    eps: float,
    budget: int,
    seeds: int = CONNECT_SEEDS,
    backward: bool = False,
    scan_iterations: int = GRAPH_ITERATIONS,
    y_grid: int = GRAPH_SEEDS,
) -> ConnectReport:
    """Look for a blocking graph, then for an orbit crossing the eps-strip."""
    if not 0.0 < eps < 0.5:
        raise InvalidParameter("eps must lie in (0, 1/2)")
    report = ConnectReport(ConnectStatus.INCONCLUSIVE, eps, budget, backward=backward)
    if budget <= 0:
        return report

    for graph in invariant_graph_scan(m, y_grid=y_grid, iterations=scan_iterations):
        if graph.lies_within(eps, 1.0 - eps):
            report.status, report.graph = ConnectStatus.BLOCKED, graph
            logger.info("blocked by the graph seeded at y=%.6g", graph.seed.y)
            return report

    f = Inverse(m) if backward else m
    per_seed = max(budget // seeds, 1)
    for j in range(seeds):
        z = LiftedPoint(j / seeds, eps / 2.0)
        segment = [z]
        for _ in range(per_seed):
            if report.iterations >= budget:
                return report
            z = f.apply(z)
            segment.append(z)
            report.iterations += 1
            if z.y >= 1.0 - eps:
                report.status, report.segment = ConnectStatus.CONNECTED, segment
                logger.info("connected after %d iterations", len(segment) - 1)
                return report
    return report
