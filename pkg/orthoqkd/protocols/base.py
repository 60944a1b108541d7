from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set, Tuple

import numpy as np
from dbt.adapters.events.logging import AdapterLogger
from dbt.adapters.relation_configs import (
    RelationConfigValidationMixin,
    RelationConfigValidationRule,
)
from dbt_common.contracts.util import Replaceable
from dbt_common.dataclass_schema import StrEnum, dbtClassMixin
from typing_extensions import Self

from orthoqkd.attacks.params import AttackKind, AttackParams, ProbeRecord
from orthoqkd.exceptions import AttackConfigError, CausalOrderError, ProtocolError
from orthoqkd.utility import spawn_generators


logger = AdapterLogger("orthoqkd")

# one independent stream per party; appending a name never shifts the earlier streams
STREAMS = ("alice", "bob", "eve", "message")


class ProtocolId(StrEnum):
    GV = "GV"
    PP = "PP"
    CL = "CL"
    DLL = "DLL"
    PP_GV = "PP_GV"
    CL_GV = "CL_GV"
    DLL_GV = "DLL_GV"

    @property
    def bits_per_use(self) -> int:
        return 1 if self in (ProtocolId.GV, ProtocolId.PP, ProtocolId.PP_GV) else 2

    @property
    def is_gv_variant(self) -> bool:
        return self in (ProtocolId.PP_GV, ProtocolId.CL_GV, ProtocolId.DLL_GV)

    @property
    def family(self) -> str:
        if self == ProtocolId.GV:
            return "single"
        if self in (ProtocolId.DLL, ProtocolId.DLL_GV):
            return "two_step"
        return "two_way"

    def message_length(self, n: int) -> int:
        if self == ProtocolId.GV:
            return n
        return (n // 4) * self.bits_per_use


class ProtocolMode(StrEnum):
    qkd = "qkd"
    qsdc = "qsdc"

    @classmethod
    def default(cls) -> "ProtocolMode":
        return cls("qkd")


class EventKind(StrEnum):
    transmission = "transmission"
    acknowledgement = "acknowledgement"
    announcement = "announcement"
    measurement = "measurement"


@dataclass(frozen=True, eq=True, unsafe_hash=True)
class ProtocolConfig(dbtClassMixin, Replaceable, RelationConfigValidationMixin):
    """
    One protocol run.

    - n: Bell pairs prepared (GV: rounds)
    - message: bit string to encode; drawn from the `message` stream when omitted
    - bb84_threshold: abort level for conjugate-basis checks and the GV sample test
    - bell_threshold: abort level for Bell-basis checks; defaults to the analytic tolerable
      error of the protocol
    - travel_slots / delay_slots / jitter_slots: GV timing, in integer time slots
    """

    protocol: ProtocolId
    n: int
    seed: int
    attack: Optional[AttackParams] = None
    message: Optional[str] = None
    mode: ProtocolMode = field(default_factory=ProtocolMode.default)
    bb84_threshold: float = 0.11
    bell_threshold: Optional[float] = None
    disclose_fraction: float = 0.5
    travel_slots: int = 2
    delay_slots: int = 1
    jitter_slots: int = 1

    @classmethod
    def from_dict(cls, config_dict) -> Self:
        kwargs_dict = dict(config_dict)

        # messages may also be given as a list of bits
        if isinstance(message := kwargs_dict.get("message"), list):
            kwargs_dict["message"] = "".join(str(int(bit)) for bit in message)

        if isinstance(attack := kwargs_dict.get("attack"), dict):
            kwargs_dict["attack"] = AttackParams.translate_aliases(attack)

        protocol_config: Self = super().from_dict(kwargs_dict)  # type: ignore
        return protocol_config

    @property
    def validation_rules(self) -> Set[RelationConfigValidationRule]:
        expected_length = self.protocol.message_length(self.n)
        return {
            RelationConfigValidationRule(
                validation_check=self.n >= 4 and self.n % 4 == 0,
                validation_error=ProtocolError(
                    f"`n` must be at least 4 and divisible by 4, got {self.n}."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.message is None
                or (len(self.message) == expected_length and set(self.message) <= {"0", "1"}),
                validation_error=ProtocolError(
                    f"`message` must be a bit string of length {expected_length} for "
                    f"{self.protocol} with n={self.n}, got '{self.message}'."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=0.0 <= self.bb84_threshold <= 1.0
                and (self.bell_threshold is None or 0.0 <= self.bell_threshold <= 1.0),
                validation_error=ProtocolError("Check thresholds must lie in [0, 1]."),
            ),
            RelationConfigValidationRule(
                validation_check=0.0 < self.disclose_fraction <= 1.0,
                validation_error=ProtocolError(
                    f"`disclose_fraction` must lie in (0, 1], got {self.disclose_fraction}."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.travel_slots >= 0
                and self.delay_slots >= 0
                and self.jitter_slots >= 1,
                validation_error=ProtocolError(
                    "`travel_slots` and `delay_slots` must be non-negative and `jitter_slots` "
                    "at least 1."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.attack is None
                or self.attack.kind != AttackKind.timing_delay
                or self.protocol == ProtocolId.GV,
                validation_error=AttackConfigError(
                    "A `timing_delay` attack can only target the GV protocol."
                ),
            ),
            RelationConfigValidationRule(
                validation_check=self.attack is None
                or self.attack.kind != AttackKind.pairing_guess
                or self.protocol.is_gv_variant,
                validation_error=AttackConfigError(
                    "A `pairing_guess` attack needs a reordering protocol (PP_GV, CL_GV, DLL_GV)."
                ),
            ),
        }

    def generators(self) -> Dict[str, np.random.Generator]:
        return spawn_generators(self.seed, STREAMS)

    def resolve_message(self, rng: np.random.Generator) -> str:
        if self.message is not None:
            return self.message
        length = self.protocol.message_length(self.n)
        return "".join(str(int(bit)) for bit in rng.integers(0, 2, size=length))


@dataclass
class GvTiming(dbtClassMixin):
    round: int
    send_slot: int
    receive_slot: int
    delay: int
    travel: int

    @property
    def passes(self) -> bool:
        return self.receive_slot == self.send_slot + self.travel + self.delay


@dataclass
class TranscriptEvent(dbtClassMixin):
    index: int
    kind: EventKind
    step: str
    party: str
    particle_ids: List[int] = field(default_factory=list)
    leg: Optional[str] = None
    slot: Optional[int] = None
    topic: Optional[str] = None
    payload: Dict[str, Any] = field(default_factory=dict)
    ack_id: Optional[int] = None
    basis: Optional[str] = None
    outcome: Optional[int] = None


class ProtocolTranscript:
    """
    Causal log of one protocol run.

    A classical disclosure names the acknowledgement it waits for; logging it before that
    acknowledgement exists is an internal error, not an abort.
    """

    def __init__(self, protocol: ProtocolId, seed: int, mode: ProtocolMode = ProtocolMode.qkd):
        self.protocol = protocol
        self.seed = seed
        self.mode = mode
        self.events: List[TranscriptEvent] = []
        self.error_rates: Dict[str, float] = {}
        self.thresholds: Dict[str, float] = {}
        self.sent_bits = ""
        self.decoded_bits = ""
        self.aborted = False
        self.abort_reason: Optional[str] = None
        self.counts: Dict[str, int] = {}
        self.timings: List[GvTiming] = []
        self.probe_records: List[ProbeRecord] = []
        self.extras: Dict[str, Any] = {}
        self._crossed: Dict[str, Set[int]] = {}

    def _log(self, kind: EventKind, step: str, party: str, **kwargs) -> TranscriptEvent:
        event = TranscriptEvent(index=len(self.events), kind=kind, step=step, party=party, **kwargs)
        self.events.append(event)
        return event

    def transmit(
        self,
        step: str,
        party: str,
        particle_ids: List[int],
        leg: str,
        slot: Optional[int] = None,
    ) -> TranscriptEvent:
        crossed = self._crossed.setdefault(leg, set())
        repeated = crossed.intersection(particle_ids)
        if repeated or len(set(particle_ids)) != len(particle_ids):
            raise ProtocolError(
                f"Particles {sorted(repeated) or list(particle_ids)} cross leg '{leg}' twice."
            )
        crossed.update(particle_ids)
        return self._log(
            EventKind.transmission,
            step,
            party,
            particle_ids=[int(pid) for pid in particle_ids],
            leg=leg,
            slot=slot,
        )

    def acknowledge(self, step: str, party: str, leg: str) -> int:
        return self._log(EventKind.acknowledgement, step, party, leg=leg).index

    def announce(
        self, step: str, party: str, topic: str, payload: Dict[str, Any], after_ack: int
    ) -> TranscriptEvent:
        if not (
            0 <= after_ack < len(self.events)
            and self.events[after_ack].kind == EventKind.acknowledgement
        ):
            raise CausalOrderError(
                f"Announcement '{topic}' in step {step} refers to missing acknowledgement {after_ack}."
            )
        return self._log(
            EventKind.announcement, step, party, topic=topic, payload=payload, ack_id=after_ack
        )

    def measure(
        self, step: str, party: str, particle_ids: List[int], basis: str, outcome: int
    ) -> TranscriptEvent:
        return self._log(
            EventKind.measurement,
            step,
            party,
            particle_ids=[int(pid) for pid in particle_ids],
            basis=basis,
            outcome=int(outcome),
        )

    def check(self, name: str, error_rate: float, threshold: float) -> bool:
        """Record a check result; abort when it exceeds the threshold. Returns True to go on."""
        self.error_rates[name] = error_rate
        self.thresholds[name] = threshold
        if error_rate > threshold:
            self.abort(f"{name} error rate {error_rate:.4f} exceeds threshold {threshold:.4f}")
        return not self.aborted

    def abort(self, reason: str) -> None:
        logger.debug(f"{self.protocol} run with seed {self.seed} aborted: {reason}")
        if not self.aborted:
            self.aborted = True
            self.abort_reason = reason

    def events_of(self, kind: EventKind) -> List[TranscriptEvent]:
        return [event for event in self.events if event.kind == kind]

    def transmitted(self, leg: str) -> Set[int]:
        return set(self._crossed.get(leg, set()))

    def to_dict(self, dump_matrices: bool = False) -> Dict[str, Any]:
        return {
            "protocol": str(self.protocol),
            "seed": self.seed,
            "mode": str(self.mode),
            "events": [event.to_dict(omit_none=True) for event in self.events],
            "error_rates": dict(self.error_rates),
            "thresholds": dict(self.thresholds),
            "sent_bits": self.sent_bits,
            "decoded_bits": self.decoded_bits,
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
            "counts": dict(self.counts),
            "timings": [timing.to_dict() for timing in self.timings],
            "probe_records": [record.summary(dump_matrices) for record in self.probe_records],
            **self.extras,
        }


def basis_audit(transcript: ProtocolTranscript) -> Set[str]:
    """Measurement bases used by the legitimate parties during a run."""
    return {
        event.basis
        for event in transcript.events_of(EventKind.measurement)
        if event.party in ("alice", "bob") and event.basis is not None
    }


def bit_error_rate(sent: str, decoded: str) -> float:
    if len(sent) != len(decoded):
        raise ProtocolError(
            f"Cannot compare {len(sent)} sent bits with {len(decoded)} decoded bits."
        )
    if not sent:
        return 0.0
    return sum(a != b for a, b in zip(sent, decoded)) / len(sent)


def check_positions(rng: np.random.Generator, population: int, size: int) -> Tuple[int, ...]:
    """A uniformly random sorted subset of `size` positions out of `population`."""
    return tuple(sorted(int(index) for index in rng.choice(population, size=size, replace=False)))
