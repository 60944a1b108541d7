from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, Optional, Set, Tuple

import numpy as np
from dbt.adapters.relation_configs import (
    RelationConfigValidationMixin,
    RelationConfigValidationRule,
)
from dbt_common.dataclass_schema import StrEnum, dbtClassMixin

from orthoqkd.exceptions import AttackConfigError
from orthoqkd.qstate import DensityMatrix, partial_trace


class AttackKind(StrEnum):
    generic_probe = "generic_probe"
    symmetric = "symmetric"
    symmetric_ng = "symmetric_ng"
    intercept_resend = "intercept_resend"
    timing_delay = "timing_delay"
    pairing_guess = "pairing_guess"


class LegSelection(StrEnum):
    first = "first"
    second = "second"
    both = "both"

    @classmethod
    def default(cls) -> "LegSelection":
        return cls("both")

    def covers(self, leg: str) -> bool:
        return self == LegSelection.both or self.value == leg


class InterceptBasis(StrEnum):
    z = "z"
    x = "x"
    random = "random"

    @classmethod
    def default(cls) -> "InterceptBasis":
        return cls("z")


class DummyMode(StrEnum):
    none = "none"
    hold_both = "hold_both"

    @classmethod
    def default(cls) -> "DummyMode":
        return cls("none")


_PROBE_KINDS = (AttackKind.generic_probe, AttackKind.symmetric, AttackKind.symmetric_ng)


@dataclass(frozen=True, eq=True, unsafe_hash=True)
class AttackParams(dbtClassMixin, RelationConfigValidationMixin):
    """
    Eavesdropping parameters shared by every attack model.

    - theta / theta_prime: interaction strength in radians; theta_prime defaults to theta
    - attacked_fraction: probability that any one particle crossing is attacked (alias `lambda`)
    - overlap_epsilon / overlap_e: <eps0|eps1> and <E0|E1>; for `generic_probe`,
      overlap_epsilon is <u|d> = <R|C0^dag C1|R>; for `symmetric_ng` both are forced to cos(theta)
    - legs: which channel crossings Eve touches in two-leg protocols
    - basis: measurement basis for `intercept_resend`
    - delay_slots / dummy_mode: GV timing attacks
    - dump_matrices: keep full joint probe states in transcripts instead of summaries
    """

    kind: AttackKind
    theta: float = 0.0
    theta_prime: Optional[float] = None
    attacked_fraction: float = 1.0
    overlap_epsilon: Optional[float] = None
    overlap_e: Optional[float] = None
    legs: LegSelection = field(default_factory=LegSelection.default)
    basis: InterceptBasis = field(default_factory=InterceptBasis.default)
    delay_slots: int = 0
    dummy_mode: DummyMode = field(default_factory=DummyMode.default)
    dump_matrices: bool = False

    _ALIASES: ClassVar[Dict[str, str]] = {"lambda": "attacked_fraction"}

    def __post_init__(self):
        # keeps `frozen=True` while resolving defaults that depend on other fields
        if self.theta_prime is None:
            object.__setattr__(self, "theta_prime", self.theta)
        if self.kind == AttackKind.symmetric_ng:
            if self.overlap_epsilon is None:
                object.__setattr__(self, "overlap_epsilon", float(np.cos(self.theta)))
            if self.overlap_e is None:
                object.__setattr__(self, "overlap_e", float(np.cos(self.theta)))
        else:
            if self.overlap_epsilon is None:
                object.__setattr__(self, "overlap_epsilon", 0.0)
            if self.overlap_e is None:
                object.__setattr__(self, "overlap_e", 0.0)
        super().__post_init__()

    @classmethod
    def translate_aliases(cls, raw: Dict[str, Any]) -> Dict[str, Any]:
        return {cls._ALIASES.get(key, key): value for key, value in raw.items()}

    @classmethod
    def __pre_deserialize__(cls, data: Dict[str, Any]) -> Dict[str, Any]:
        data = super().__pre_deserialize__(data)
        return cls.translate_aliases(data)

    @property
    def validation_rules(self) -> Set[RelationConfigValidationRule]:
        return {
            RelationConfigValidationRule(
                validation_check=0.0 <= self.attacked_fraction <= 1.0,
                validation_error=AttackConfigError(
                    f"`attacked_fraction` (lambda) must lie in [0, 1], got {self.attacked_fraction}."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=bool(
                    np.isfinite(self.theta) and np.isfinite(self.theta_prime)  # type: ignore
                ),
                validation_error=AttackConfigError(
                    f"`theta` and `theta_prime` must be finite, got {self.theta} and {self.theta_prime}."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=abs(self.overlap_epsilon) <= 1.0 and abs(self.overlap_e) <= 1.0,  # type: ignore
                validation_error=AttackConfigError(
                    f"Probe overlaps must have magnitude at most 1, got "
                    f"`overlap_epsilon`={self.overlap_epsilon} and `overlap_e`={self.overlap_e}."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=not (
                    self.kind == AttackKind.symmetric_ng
                    and (
                        abs(self.overlap_epsilon - np.cos(self.theta)) > 1e-12  # type: ignore
                        or abs(self.overlap_e - np.cos(self.theta)) > 1e-12  # type: ignore
                        or self.theta_prime != self.theta
                    )
                ),
                validation_error=AttackConfigError(
                    "A `symmetric_ng` attack requires both probe overlaps to equal cos(theta) "
                    "and `theta_prime` to equal `theta`."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.delay_slots >= 0,
                validation_error=AttackConfigError(
                    f"`delay_slots` must be non-negative, got {self.delay_slots}."
                ),
            ),
        }

    @property
    def is_probe_attack(self) -> bool:
        return self.kind in _PROBE_KINDS

    def covers(self, leg: str) -> bool:
        return self.legs.covers(leg)


@dataclass(frozen=True, eq=False)
class ProbeRecord:
    """
    What one eavesdropping action left behind.

    `joint_state` is the post-interaction state of the touched particle group plus Eve's
    probe, when one exists. Pairing guesses keep their guessed pairs and Bell outcomes in
    `details` instead.
    """

    kind: AttackKind
    particle_ids: Tuple[int, ...]
    leg: Optional[str] = None
    joint_state: Optional[DensityMatrix] = None
    probe_qubits: Tuple[int, ...] = ()
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def attacked(self) -> bool:
        return len(self.particle_ids) > 0

    def probe_state(self) -> Optional[DensityMatrix]:
        if self.joint_state is None or not self.probe_qubits:
            return None
        return partial_trace(self.joint_state, list(self.probe_qubits))

    def summary(self, dump_matrices: bool = False) -> Dict[str, Any]:
        summary: Dict[str, Any] = {
            "kind": str(self.kind),
            "particle_ids": list(self.particle_ids),
            "leg": self.leg,
        }
        summary.update(self.details)
        probe = self.probe_state()
        if probe is not None:
            summary["probe_purity"] = probe.purity()
        if dump_matrices and self.joint_state is not None:
            entries = self.joint_state.entries
            summary["joint_state"] = {"real": entries.real.tolist(), "imag": entries.imag.tolist()}
        return summary
