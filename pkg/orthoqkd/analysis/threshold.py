"""
Tolerable error rates: the smallest error on the grid's I_B = chi boundary.

Boundary edges are adjacent cells whose flags differ. Each edge is refined by bisection on
I_B - chi; e varies continuously along the edge, so the bisection stops once the two ends
agree on e to within `E_TOLERANCE`. Edges are visited in order of their smaller e and the
search stops once no remaining edge can beat the best crossing found.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.analysis.grid import SecurityGrid, build_grid
from orthoqkd.analysis.models import (
    CellValues,
    Interpretation,
    attacked_model,
    evaluate_cell,
    parse_protocol,
)
from orthoqkd.protocols.base import ProtocolId


logger = AdapterLogger("orthoqkd")

E_TOLERANCE = 1e-4
_MAX_BISECTIONS = 60

Point = Tuple[float, float]


@dataclass(frozen=True)
class ThresholdResult:
    protocol: ProtocolId
    interpretation: Interpretation
    resolution: int
    e0: Optional[float] = None
    theta: Optional[float] = None
    attacked_fraction: Optional[float] = None

    @property
    def finite(self) -> bool:
        return self.e0 is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "protocol": str(self.protocol),
            "interpretation": self.interpretation.to_dict(),
            "label": self.interpretation.label,
            "resolution": self.resolution,
            "finite": self.finite,
            "e0": self.e0,
            "theta": self.theta,
            "lambda": self.attacked_fraction,
            "note": None if self.finite else "no finite threshold",
        }


def _values_at(grid: SecurityGrid, point: Point) -> CellValues:
    theta, fraction = point
    model = attacked_model(grid.protocol, theta, grid.interpretation.legs)
    return evaluate_cell(model, fraction, grid.interpretation)


def _bisect_edge(grid: SecurityGrid, start: Point, end: Point) -> Tuple[Point, float]:
    """Walk the edge from the flagged end towards the unflagged one; return the crossing."""
    low, high = start, end
    low_values, high_values = _values_at(grid, low), _values_at(grid, high)
    secure_low = low_values.flag
    for _ in range(_MAX_BISECTIONS):
        if abs(high_values.e - low_values.e) <= E_TOLERANCE:
            break
        middle = ((low[0] + high[0]) / 2, (low[1] + high[1]) / 2)
        middle_values = _values_at(grid, middle)
        if middle_values.flag == secure_low:
            low, low_values = middle, middle_values
        else:
            high, high_values = middle, middle_values
    point = ((low[0] + high[0]) / 2, (low[1] + high[1]) / 2)
    return point, (low_values.e + high_values.e) / 2


def boundary_edges(grid: SecurityGrid) -> List[Tuple[float, Point, Point]]:
    """Every pair of neighbouring cells with different flags, with the smaller e of the two."""
    flags, e = grid.flags, grid.e
    edges = []
    for i, j in zip(*np.nonzero(flags[:, :-1] != flags[:, 1:])):
        edges.append(
            (
                float(min(e[i, j], e[i, j + 1])),
                (float(grid.thetas[i]), float(grid.lambdas[j])),
                (float(grid.thetas[i]), float(grid.lambdas[j + 1])),
            )
        )
    for i, j in zip(*np.nonzero(flags[:-1, :] != flags[1:, :])):
        edges.append(
            (
                float(min(e[i, j], e[i + 1, j])),
                (float(grid.thetas[i]), float(grid.lambdas[j])),
                (float(grid.thetas[i + 1]), float(grid.lambdas[j])),
            )
        )
    return sorted(edges, key=lambda edge: edge[0])


def tolerable_error(grid: SecurityGrid) -> ThresholdResult:
    best: Optional[Tuple[float, Point]] = None
    edges = boundary_edges(grid)
    for lower_e, start, end in edges:
        if best is not None and lower_e >= best[0]:
            break
        point, e = _bisect_edge(grid, start, end)
        if best is None or e < best[0]:
            best = (e, point)
    if best is None:
        logger.debug(f"No I_B = chi boundary on the {grid.protocol} grid")
        return ThresholdResult(
            protocol=grid.protocol,
            interpretation=grid.interpretation,
            resolution=grid.resolution,
        )
    e0, (theta, fraction) = best
    logger.debug(
        f"{grid.protocol} ({grid.interpretation.label}): e0={e0:.5f} at theta={theta:.5f}, "
        f"lambda={fraction:.5f} from {len(edges)} boundary edges"
    )
    return ThresholdResult(
        protocol=grid.protocol,
        interpretation=grid.interpretation,
        resolution=grid.resolution,
        e0=float(e0),
        theta=float(theta),
        attacked_fraction=float(fraction),
    )


def monotonicity_violations(grid: SecurityGrid) -> List[Dict[str, Any]]:
    """Lambda rows along which I_B - chi changes sign more than once as theta grows."""
    flags = grid.flags
    violations = []
    for j, fraction in enumerate(grid.lambdas):
        changes = int(np.count_nonzero(np.diff(flags[:, j])))
        if changes > 1:
            violations.append({"lambda": float(fraction), "sign_changes": changes})
    return violations


def threshold_table(
    protocols: Optional[Sequence[Union[ProtocolId, str]]] = None,
    resolution: int = 200,
    interpretations: Optional[Sequence[Interpretation]] = None,
    theta_max: float = np.pi / 2,
) -> List[ThresholdResult]:
    """e0 for every protocol and interpretation combination."""
    protocols = [parse_protocol(protocol) for protocol in (protocols or list(ProtocolId))]
    interpretations = interpretations or Interpretation.variants()
    return [
        tolerable_error(build_grid(protocol, resolution, interpretation, theta_max))
        for protocol in protocols
        for interpretation in interpretations
    ]


@lru_cache(maxsize=None)
def default_bell_threshold(protocol: ProtocolId) -> float:
    """
    Abort threshold for the single-basis Bell checks: e0 on a coarse grid under the default
    interpretation. A grid without boundary puts no bound on the check error.
    """
    result = tolerable_error(build_grid(protocol, resolution=50))
    return result.e0 if result.finite else 1.0  # type: ignore
