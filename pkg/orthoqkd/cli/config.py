import json
from dataclasses import dataclass, field, fields
from typing import Any, ClassVar, Dict, List, Optional, Set

import numpy as np
from dbt.adapters.events.logging import AdapterLogger
from dbt.adapters.relation_configs import (
    RelationConfigValidationMixin,
    RelationConfigValidationRule,
)
from dbt_common.contracts.util import Replaceable
from dbt_common.dataclass_schema import StrEnum, ValidationError, dbtClassMixin
from dbt_common.exceptions import DbtRuntimeError
from typing_extensions import Self

from orthoqkd.analysis.grid import MIN_RESOLUTION
from orthoqkd.analysis.models import Interpretation
from orthoqkd.attacks.params import AttackParams
from orthoqkd.exceptions import ScenarioConfigError
from orthoqkd.protocols.base import ProtocolConfig, ProtocolId, ProtocolMode
from orthoqkd.utility import config_hash, evaluate_bool


logger = AdapterLogger("orthoqkd")


class ScenarioCommand(StrEnum):
    run = "run"
    sweep = "sweep"
    suites = "suites"
    threshold = "threshold"


class OutputFormat(StrEnum):
    csv = "csv"
    json = "json"


class SuiteName(StrEnum):
    duality = "duality"
    monogamy = "monogamy"
    heisenberg = "heisenberg"
    knowledge_bound = "knowledge_bound"
    ng_oracle = "ng_oracle"
    pairing = "pairing"


_STOCHASTIC = (ScenarioCommand.run, ScenarioCommand.suites)
_NEEDS_PROTOCOL = (ScenarioCommand.run, ScenarioCommand.sweep, ScenarioCommand.threshold)
_PROTOCOL_OPTIONS = (
    "message",
    "mode",
    "bb84_threshold",
    "bell_threshold",
    "disclose_fraction",
    "travel_slots",
    "delay_slots",
    "jitter_slots",
)


def _all_formats() -> List[OutputFormat]:
    return [OutputFormat.csv, OutputFormat.json]


def _all_suites() -> List[SuiteName]:
    return list(SuiteName)


@dataclass(frozen=True, eq=True)
class ScenarioConfig(dbtClassMixin, Replaceable, RelationConfigValidationMixin):
    """
    One CLI task.

    - run: one protocol run, written as a transcript
    - sweep: the (theta, lambda) security grid of a protocol
    - threshold: the tolerable error of a protocol, for the configured interpretation and,
      with `all_interpretations`, for every variant
    - suites: the verification suites named in `suites`
    """

    command: ScenarioCommand
    protocol: Optional[ProtocolId] = None
    n: int = 8
    seed: Optional[int] = None
    attack: Optional[AttackParams] = None
    message: Optional[str] = None
    mode: ProtocolMode = field(default_factory=ProtocolMode.default)
    bb84_threshold: float = 0.11
    bell_threshold: Optional[float] = None
    disclose_fraction: float = 0.5
    travel_slots: int = 2
    delay_slots: int = 1
    jitter_slots: int = 1
    resolution: int = 200
    theta_max: float = float(np.pi / 2)
    interpretation: Interpretation = field(default_factory=Interpretation)
    all_interpretations: bool = True
    suites: List[SuiteName] = field(default_factory=_all_suites)
    samples: int = 1000
    pairing_samples: int = 100_000
    output_dir: str = "."
    formats: List[OutputFormat] = field(default_factory=_all_formats)

    _ALIASES: ClassVar[Dict[str, str]] = {
        "out": "output_dir",
        "format": "formats",
    }

    @classmethod
    def from_dict(cls, config_dict) -> Self:
        kwargs_dict = dict(config_dict)

        if isinstance(formats := kwargs_dict.get("formats"), str):
            kwargs_dict["formats"] = [formats]

        if "all_interpretations" in kwargs_dict:
            kwargs_dict["all_interpretations"] = evaluate_bool(kwargs_dict["all_interpretations"])

        if isinstance(attack := kwargs_dict.get("attack"), dict):
            attack = AttackParams.translate_aliases(attack)
            if "dump_matrices" in attack:
                attack["dump_matrices"] = evaluate_bool(attack["dump_matrices"])
            kwargs_dict["attack"] = attack

        scenario_config: Self = super().from_dict(kwargs_dict)  # type: ignore
        return scenario_config

    @property
    def validation_rules(self) -> Set[RelationConfigValidationRule]:
        return {
            RelationConfigValidationRule(
                validation_check=self.command not in _NEEDS_PROTOCOL or self.protocol is not None,
                validation_error=ScenarioConfigError(
                    f"`protocol` is required for the '{self.command}' command."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.command not in _STOCHASTIC or self.seed is not None,
                validation_error=ScenarioConfigError(
                    f"`seed` is required for the stochastic '{self.command}' command."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.resolution >= MIN_RESOLUTION,
                validation_error=ScenarioConfigError(
                    f"`resolution` must be at least {MIN_RESOLUTION}, got {self.resolution}."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.samples >= 1 and self.pairing_samples >= 1,
                validation_error=ScenarioConfigError(
                    "`samples` and `pairing_samples` must be positive."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=len(self.formats) > 0,
                validation_error=ScenarioConfigError("`formats` must name at least one format."),
            ),
        }

    def protocol_config(self) -> ProtocolConfig:
        """The run described by this scenario, validated on construction."""
        options = {name: getattr(self, name) for name in _PROTOCOL_OPTIONS}
        return ProtocolConfig(
            protocol=self.protocol,  # type: ignore
            n=self.n,
            seed=self.seed,  # type: ignore
            attack=self.attack,
            **options,
        )

    @property
    def config_hash(self) -> str:
        return config_hash(self.to_dict(omit_none=True))


def _unknown_keys(raw: Dict[str, Any], known: Set[str], where: str) -> List[str]:
    return [f"{where}{key}" for key in raw if key not in known]


def _field_names(cls) -> Set[str]:
    return {item.name for item in fields(cls)}


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    """
    Parse a JSON scenario. Unknown keys are rejected, both at the top level and inside
    `attack` and `interpretation`. `overrides` replace top-level keys before validation.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioConfigError(f"scenario is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ScenarioConfigError("scenario must be a JSON object.")

    raw = {ScenarioConfig._ALIASES.get(key, key): value for key, value in raw.items()}
    raw.update(overrides or {})
    unknown = _unknown_keys(raw, _field_names(ScenarioConfig), "")
    if isinstance(raw.get("attack"), dict):
        raw["attack"] = AttackParams.translate_aliases(raw["attack"])
        unknown += _unknown_keys(raw["attack"], _field_names(AttackParams), "attack.")
    if isinstance(raw.get("interpretation"), dict):
        unknown += _unknown_keys(
            raw["interpretation"], _field_names(Interpretation), "interpretation."
        )
    if unknown:
        raise ScenarioConfigError(f"unknown key(s) {', '.join(sorted(unknown))}")

    try:
        ScenarioConfig.validate(raw)
    except ValidationError as exc:
        raise ScenarioConfigError(exc)

    try:
        scenario = ScenarioConfig.from_dict(raw)
        if scenario.command == ScenarioCommand.run:
            scenario.protocol_config()
    except ScenarioConfigError:
        raise
    except (ValidationError, DbtRuntimeError, ValueError, TypeError) as exc:
        raise ScenarioConfigError(exc)

    logger.debug(f"Parsed '{scenario.command}' scenario with hash {scenario.config_hash}")
    return scenario


def serialize(config: ScenarioConfig) -> str:
    return json.dumps(config.to_dict(omit_none=True), sort_keys=True, indent=2)
