from dataclasses import dataclass
from decimal import Decimal
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Union

import numpy as np
from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.analysis.models import (
    CellValues,
    Interpretation,
    attacked_crossings,
    attacked_model,
    crossings,
    evaluate_row,
    parse_protocol,
)
from orthoqkd.exceptions import AnalysisError
from orthoqkd.protocols.base import ProtocolId
from orthoqkd.utility import stable_float

if TYPE_CHECKING:
    import agate


logger = AdapterLogger("orthoqkd")

MIN_RESOLUTION = 50
COLUMNS = ("theta", "lambda", "e", "I_B", "chi", "flag")


@dataclass(frozen=True, eq=False)
class SecurityGrid:
    """
    The (theta, lambda) sweep of one protocol. Arrays are indexed [theta, lambda].
    """

    protocol: ProtocolId
    interpretation: Interpretation
    thetas: np.ndarray
    lambdas: np.ndarray
    e: np.ndarray
    bob: np.ndarray
    chi: np.ndarray
    theta_max: float

    @property
    def resolution(self) -> int:
        return len(self.thetas)

    @property
    def flags(self) -> np.ndarray:
        return (self.bob > self.chi).astype(int)

    @property
    def gap(self) -> np.ndarray:
        return self.bob - self.chi

    @property
    def flag_fraction(self) -> float:
        return float(self.flags.mean())

    @property
    def max_information_gap(self) -> float:
        """Largest chi - I_B anywhere on the grid: how far Eve gets ahead of Bob."""
        return float(np.max(self.chi - self.bob))

    def cell(self, theta_index: int, lambda_index: int) -> CellValues:
        return CellValues(
            e=float(self.e[theta_index, lambda_index]),
            bob=float(self.bob[theta_index, lambda_index]),
            chi=float(self.chi[theta_index, lambda_index]),
        )

    def rows(self) -> List[Dict[str, Union[float, int]]]:
        flags = self.flags
        return [
            {
                "theta": float(theta),
                "lambda": float(fraction),
                "e": float(self.e[i, j]),
                "I_B": float(self.bob[i, j]),
                "chi": float(self.chi[i, j]),
                "flag": int(flags[i, j]),
            }
            for i, theta in enumerate(self.thetas)
            for j, fraction in enumerate(self.lambdas)
        ]

    def as_table(self) -> "agate.Table":
        import agate

        def _number(value: Union[float, int]) -> Decimal:
            return Decimal(repr(stable_float(value))) if isinstance(value, float) else Decimal(value)

        return agate.Table(
            [[_number(row[column]) for column in COLUMNS] for row in self.rows()],
            column_names=COLUMNS,
            column_types=[agate.Number() for _ in COLUMNS],
        )

    def to_csv(self, path: str) -> None:
        self.as_table().to_csv(path)

    def metadata(self) -> Dict[str, Any]:
        return {
            "protocol": str(self.protocol),
            "resolution": self.resolution,
            "theta_max": self.theta_max,
            "bits_per_use": self.protocol.bits_per_use,
            "crossings": crossings(self.protocol),
            "attacked_crossings": attacked_crossings(self.protocol, self.interpretation.legs),
            "interpretation": self.interpretation.to_dict(),
            "flag_fraction": self.flag_fraction,
            "max_information_gap": self.max_information_gap,
        }


def build_grid(
    protocol: Union[ProtocolId, str],
    resolution: int = 200,
    interpretation: Optional[Interpretation] = None,
    theta_max: float = np.pi / 2,
) -> SecurityGrid:
    protocol = parse_protocol(protocol)
    if resolution < MIN_RESOLUTION:
        raise AnalysisError(
            f"Grid resolution must be at least {MIN_RESOLUTION} per axis, got {resolution}."
        )
    if not 0.0 < theta_max <= np.pi:
        raise AnalysisError(f"`theta_max` must lie in (0, pi], got {theta_max}.")
    interpretation = interpretation or Interpretation()
    thetas = np.linspace(0.0, theta_max, resolution)
    lambdas = np.linspace(0.0, 1.0, resolution)
    e = np.zeros((resolution, resolution))
    bob = np.zeros((resolution, resolution))
    chi = np.zeros((resolution, resolution))
    logger.debug(
        f"Sweeping {protocol} on a {resolution}x{resolution} grid ({interpretation.label})"
    )
    for i, theta in enumerate(thetas):
        e[i], bob[i], chi[i] = evaluate_row(
            attacked_model(protocol, float(theta), interpretation.legs), lambdas, interpretation
        )
    return SecurityGrid(
        protocol=protocol,
        interpretation=interpretation,
        thetas=thetas,
        lambdas=lambdas,
        e=e,
        bob=bob,
        chi=chi,
        theta_max=float(theta_max),
    )
