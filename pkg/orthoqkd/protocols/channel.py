from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.attacks.interceptors import Eavesdropper, EavesdropperFactory
from orthoqkd.exceptions import ProtocolError
from orthoqkd.protocols.base import (
    GvTiming,
    ProtocolConfig,
    ProtocolId,
    ProtocolTranscript,
    TranscriptEvent,
    bit_error_rate,
)
from orthoqkd.protocols.coding import decode_all
from orthoqkd.protocols.memory import ParticleMemory
from orthoqkd.qstate import BELL_BASIS


logger = AdapterLogger("orthoqkd")


class QuantumChannel:
    """
    Carries particles between the parties. Every crossing is logged first and then handed to
    the eavesdropper, if there is one.
    """

    def __init__(
        self,
        memory: ParticleMemory,
        transcript: ProtocolTranscript,
        eavesdropper: Optional[Eavesdropper] = None,
    ) -> None:
        self.memory = memory
        self.transcript = transcript
        self.eavesdropper = eavesdropper

    def send(
        self, step: str, party: str, particle_ids: Sequence[int], leg: str
    ) -> TranscriptEvent:
        event = self.transcript.transmit(step, party, list(particle_ids), leg)
        logger.debug(f"{party} sends {len(particle_ids)} particle(s) on leg '{leg}' in {step}")
        if self.eavesdropper is not None:
            self.eavesdropper.on_transit(self.memory, particle_ids, leg)
        return event

    def send_timed(
        self,
        step: str,
        party: str,
        particle_id: int,
        round: int,
        send_slot: int,
        scheduled_slot: int,
        travel: int,
        delay: int,
    ) -> GvTiming:
        self.transcript.transmit(step, party, [particle_id], "first", slot=send_slot)
        honest_slot = send_slot + travel + delay
        receive_slot = honest_slot
        if self.eavesdropper is not None:
            receive_slot = self.eavesdropper.on_timed_transit(
                self.memory, particle_id, honest_slot, scheduled_slot
            )
        return GvTiming(
            round=round,
            send_slot=send_slot,
            receive_slot=receive_slot,
            delay=delay,
            travel=travel,
        )

    def collect_records(self) -> None:
        """Move whatever the eavesdropper left behind into the transcript."""
        if self.eavesdropper is not None:
            self.transcript.probe_records.extend(self.eavesdropper.records)
            self.eavesdropper.records = []


@dataclass
class ProtocolSession:
    """Everything one run shares: party generators, memory, transcript and channel."""

    config: ProtocolConfig
    alice: np.random.Generator
    bob: np.random.Generator
    memory: ParticleMemory
    transcript: ProtocolTranscript
    channel: QuantumChannel
    message: str

    def decode_pairs(self, step: str, pairs: Sequence[Tuple[int, int]]) -> None:
        """Bob's closing Bell measurements; the decoded symbols become the transcript's bits."""
        outcomes = []
        for pair in pairs:
            outcome = self.memory.measure(list(pair), BELL_BASIS, self.bob)
            self.transcript.measure(step, "bob", list(pair), "bell", outcome)
            outcomes.append(outcome)
        self.transcript.decoded_bits = decode_all(self.config.protocol, outcomes)
        self.transcript.error_rates["message"] = bit_error_rate(
            self.message, self.transcript.decoded_bits
        )

    def close(self) -> ProtocolTranscript:
        self.channel.collect_records()
        return self.transcript


def open_session(config: ProtocolConfig, expected: Sequence[ProtocolId]) -> ProtocolSession:
    if config.protocol not in expected:
        raise ProtocolError(
            f"Protocol '{config.protocol}' cannot be run here; expected one of "
            f"{', '.join(str(protocol) for protocol in expected)}."
        )
    rngs = config.generators()
    eavesdropper = None
    if config.attack is not None:
        eavesdropper = EavesdropperFactory(config.attack, rngs["eve"]).get_eavesdropper()
    memory = ParticleMemory()
    transcript = ProtocolTranscript(config.protocol, config.seed, config.mode)
    transcript.sent_bits = config.resolve_message(rngs["message"])
    logger.debug(f"Starting {config.protocol} run with n={config.n} and seed {config.seed}")
    return ProtocolSession(
        config=config,
        alice=rngs["alice"],
        bob=rngs["bob"],
        memory=memory,
        transcript=transcript,
        channel=QuantumChannel(memory, transcript, eavesdropper),
        message=transcript.sent_bits,
    )
