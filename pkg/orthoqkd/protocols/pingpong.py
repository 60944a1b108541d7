"""
Two-way protocols: ping-pong (PP), its four-operation extension (CL), and the reordering
variants PP_GV and CL_GV.

Bob prepares |Psi+> pairs and keeps the home qubit of each; the travel qubit goes to Alice,
picks up an encoding operation, and comes back for Bob's Bell measurement.
"""
from typing import List, Sequence, Tuple

from orthoqkd.protocols.base import ProtocolConfig, ProtocolId, ProtocolTranscript, check_positions
from orthoqkd.protocols.channel import ProtocolSession, open_session
from orthoqkd.protocols.coding import encoding_operator, split_symbols
from orthoqkd.protocols.verification import (
    resolve_bell_threshold,
    verification_bb84,
    verification_bell,
)
from orthoqkd.qstate import BELL_BASIS, PSI_PLUS, PermutationMap, permute_particles
from orthoqkd.utility import draw_seed


Pair = Tuple[int, int]


def prepare_pairs(session: ProtocolSession, count: int) -> List[Pair]:
    return [session.memory.prepare(BELL_BASIS[PSI_PLUS]) for _ in range(count)]  # type: ignore


def encode(session: ProtocolSession, targets: Sequence[int]) -> None:
    """Apply one symbol of the message to each target qubit, in order."""
    symbols = split_symbols(session.message, session.config.protocol.bits_per_use)
    for target, symbol in zip(targets, symbols):
        session.memory.apply_unitary(encoding_operator(session.config.protocol, symbol), [target])


def split_return(session: ProtocolSession, positions: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Alice's random halving of what she still holds into message and check positions."""
    checks = set(check_positions(session.alice, len(positions), len(positions) // 2))
    message = [position for index, position in enumerate(positions) if index not in checks]
    returned_checks = [position for index, position in enumerate(positions) if index in checks]
    return message, returned_checks


def run_pp_family(config: ProtocolConfig) -> ProtocolTranscript:
    session = open_session(config, (ProtocolId.PP, ProtocolId.CL))
    transcript, n = session.transcript, config.n

    # PP1
    pairs = prepare_pairs(session, n)
    home = {travel: h for h, travel in pairs}
    session.channel.send("PP1", "bob", [travel for _, travel in pairs], "first")
    ack = transcript.acknowledge("PP2", "alice", "first")

    # PP2
    checked = check_positions(session.alice, n, n // 2)
    transcript.announce("PP2", "alice", "check_positions", {"positions": list(checked)}, ack)
    result = verification_bb84(
        session.memory,
        [(pairs[index][1], pairs[index][0]) for index in checked],
        session.alice,
        measure_rngs=(session.alice, session.bob),
        transcript=transcript,
        step="PP2",
    )
    transcript.counts.update(transmitted_first=n, checked_first=len(checked))
    if not transcript.check("check_first", result.error_rate, config.bb84_threshold):
        return session.close()

    # PP3
    remaining = [travel for index, (_, travel) in enumerate(pairs) if index not in set(checked)]
    message, returned_checks = split_return(session, remaining)
    encode(session, message)
    session.channel.send("PP3", "alice", remaining, "second")
    ack = transcript.acknowledge("PP4", "bob", "second")

    # PP4
    transcript.announce(
        "PP4",
        "alice",
        "check_positions",
        {"positions": [remaining.index(travel) for travel in returned_checks]},
        ack,
    )
    result = verification_bb84(
        session.memory,
        [(home[travel], travel) for travel in returned_checks],
        session.bob,
        transcript=transcript,
        step="PP4",
        parties=("bob", "bob"),
    )
    transcript.counts.update(
        transmitted_second=len(remaining), encoded=len(message), checked_second=len(returned_checks)
    )
    if not transcript.check("check_second", result.error_rate, config.bb84_threshold):
        return session.close()

    # PP5
    session.decode_pairs("PP5", [(home[travel], travel) for travel in message])
    return session.close()


def run_pp_gv_family(config: ProtocolConfig) -> ProtocolTranscript:
    session = open_session(config, (ProtocolId.PP_GV, ProtocolId.CL_GV))
    transcript, n = session.transcript, config.n
    bell_threshold = resolve_bell_threshold(config)

    # PP_GV1: n/2 candidate pairs keep their home qubit, n/2 check pairs travel whole
    pairs = prepare_pairs(session, n)
    check_indices = set(check_positions(session.bob, n, n // 2))
    candidates = [pair for index, pair in enumerate(pairs) if index not in check_indices]
    check_pairs = [pair for index, pair in enumerate(pairs) if index in check_indices]
    home = {travel: h for h, travel in candidates}
    stream = [travel for _, travel in candidates] + [pid for pair in check_pairs for pid in pair]
    shuffle = PermutationMap.random(len(stream), draw_seed(session.bob))
    sent: List[int] = permute_particles(stream, shuffle)
    session.channel.send("PP_GV1", "bob", sent, "first")
    ack = transcript.acknowledge("PP_GV2", "alice", "first")

    # PP_GV2: Bob reveals where the check pairs sit in the shuffled stream
    position = {pid: index for index, pid in enumerate(sent)}
    transcript.announce(
        "PP_GV2",
        "bob",
        "check_pairing",
        {"pairs": [[position[a], position[b]] for a, b in check_pairs]},
        ack,
    )
    result = verification_bell(
        session.memory, check_pairs, session.alice, transcript=transcript, step="PP_GV2"
    )
    transcript.counts.update(
        transmitted_first=len(sent), retained=len(candidates), checked_first=2 * len(check_pairs)
    )
    if not transcript.check("bell_check_first", result.error_rate, bell_threshold):
        return session.close()

    # PP_GV3: encode, reorder and send back
    received = [pid for pid in sent if pid in home]
    message, returned_checks = split_return(session, received)
    encode(session, message)
    reorder = PermutationMap.random(len(received), draw_seed(session.alice))
    returned: List[int] = permute_particles(received, reorder)
    session.channel.send("PP_GV3", "alice", returned, "second")
    ack = transcript.acknowledge("PP_GV4", "bob", "second")

    # PP_GV4: Alice reveals the reordering and the check subset
    back = {pid: index for index, pid in enumerate(returned)}
    transcript.announce(
        "PP_GV4",
        "alice",
        "return_order",
        {
            "permutation": list(reorder.mapping),
            "check_positions": sorted(back[travel] for travel in returned_checks),
            "message_positions": [back[travel] for travel in message],
        },
        ack,
    )
    result = verification_bell(
        session.memory,
        [(home[travel], travel) for travel in returned_checks],
        session.bob,
        transcript=transcript,
        step="PP_GV4",
        party="bob",
    )
    transcript.counts.update(
        transmitted_second=len(returned), encoded=len(message), checked_second=len(returned_checks)
    )
    if not transcript.check("bell_check_second", result.error_rate, bell_threshold):
        return session.close()

    session.decode_pairs("PP_GV5", [(home[travel], travel) for travel in message])
    return session.close()

