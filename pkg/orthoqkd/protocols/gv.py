"""
The GV protocol on a discrete clock.

Each round Alice prepares |psi_j> = H|j>, one wave packet per basis component, and starts it
at a jittered slot. The second packet is held back `delay_slots` so both arrive together;
Bob recombines and reads j off in the {|psi_0>, |psi_1>} basis. Test 1 compares send and
receive slots exactly; test 2 compares a disclosed sample of bits.
"""
import itertools
from fractions import Fraction
from typing import Dict, List

from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.attacks.params import AttackKind, AttackParams, DummyMode
from orthoqkd.exceptions import AttackConfigError
from orthoqkd.protocols.base import (
    ProtocolConfig,
    ProtocolId,
    ProtocolMode,
    ProtocolTranscript,
    bit_error_rate,
    check_positions,
)
from orthoqkd.protocols.channel import open_session
from orthoqkd.protocols.coding import gv_state
from orthoqkd.qstate import X_BASIS


logger = AdapterLogger("orthoqkd")


def run_gv(config: ProtocolConfig) -> ProtocolTranscript:
    session = open_session(config, (ProtocolId.GV,))
    transcript, n = session.transcript, config.n
    period = config.travel_slots + config.delay_slots + config.jitter_slots
    round_of: Dict[int, int] = {}

    decoded: List[str] = []
    for round_index, bit in enumerate(session.message):
        (particle,) = session.memory.prepare(gv_state(bit))
        round_of[particle] = round_index
        nominal = round_index * period
        offset = int(session.alice.integers(config.jitter_slots))
        timing = session.channel.send_timed(
            "GV1",
            "alice",
            particle,
            round=round_index,
            send_slot=nominal + offset,
            scheduled_slot=nominal + config.travel_slots + config.delay_slots,
            travel=config.travel_slots,
            delay=config.delay_slots,
        )
        transcript.timings.append(timing)
        outcome = session.memory.measure([particle], X_BASIS, session.bob)
        transcript.measure("GV2", "bob", [particle], "gv", outcome)
        decoded.append(str(outcome))
    transcript.decoded_bits = "".join(decoded)
    transcript.counts.update(transmitted_first=n)

    # Eve has already read whatever she held, whatever the tests say later
    session.channel.collect_records()
    if config.mode == ProtocolMode.qsdc:
        transcript.extras["leaked_bits"] = [
            {"round": round_of[record.particle_ids[0]], "bit": record.details["eve_bit"]}
            for record in transcript.probe_records
            if "eve_bit" in record.details
        ]

    # test 1
    late = [timing.round for timing in transcript.timings if not timing.passes]
    logger.debug(f"GV timing test: {len(late)} of {n} rounds arrived off schedule")
    transcript.error_rates["timing"] = len(late) / n
    transcript.thresholds["timing"] = 0.0
    if late:
        transcript.abort(f"timing test failed in rounds {late}")

    # test 2
    ack = transcript.acknowledge("GV3", "bob", "first")
    disclosed = check_positions(
        session.alice, n, max(1, int(round(config.disclose_fraction * n)))
    )
    transcript.announce(
        "GV3",
        "alice",
        "disclosed_rounds",
        {"rounds": list(disclosed), "bits": [session.message[index] for index in disclosed]},
        ack,
    )
    sample_error = bit_error_rate(
        "".join(session.message[index] for index in disclosed),
        "".join(decoded[index] for index in disclosed),
    )
    transcript.check("sample_test", sample_error, config.bb84_threshold)
    transcript.error_rates["message"] = bit_error_rate(session.message, transcript.decoded_bits)
    transcript.counts.update(disclosed=len(disclosed))
    transcript.extras["key_bits"] = "".join(
        decoded[index] for index in range(n) if index not in set(disclosed)
    )
    return session.close()


def timing_delay_attack(
    config: ProtocolConfig, delay_slots: int = 1, dummy_mode: DummyMode = DummyMode.none
) -> ProtocolTranscript:
    """
    Rerun a GV configuration with Eve holding every packet: either late by `delay_slots`, or
    read and replaced by a dummy on the public schedule.
    """
    if config.protocol != ProtocolId.GV:
        raise AttackConfigError(f"Timing attacks only apply to the GV protocol, not '{config.protocol}'.")
    attack = AttackParams(kind=AttackKind.timing_delay, delay_slots=delay_slots, dummy_mode=dummy_mode)
    return run_gv(config.replace(attack=attack))


def enumerate_dummy_detection(rounds: int, jitter_slots: int) -> Fraction:
    """
    Probability that a hold-both Eve, who forwards dummies on the public schedule, is caught
    by test 1 in at least one of `rounds` rounds. Enumerates every jitter pattern Alice can
    draw; Eve only passes a round when Alice happened to send without offset.
    """
    if rounds < 1 or jitter_slots < 1:
        raise AttackConfigError("Dummy detection needs at least one round and one jitter slot.")
    patterns = list(itertools.product(range(jitter_slots), repeat=rounds))
    caught = sum(1 for pattern in patterns if any(offset != 0 for offset in pattern))
    return Fraction(caught, len(patterns))
