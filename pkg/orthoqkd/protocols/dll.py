"""
Two-step dense coding (DLL) and its reordering variant DLL_GV.

Alice prepares |Psi+> pairs (A, B), sends the A qubits ahead, and later sends the B qubits
after encoding two bits on each message pair. Bob decodes with a Bell measurement on (A, B).
"""
from typing import List

from orthoqkd.protocols.base import ProtocolConfig, ProtocolId, ProtocolTranscript, check_positions
from orthoqkd.protocols.channel import open_session
from orthoqkd.protocols.pingpong import encode, prepare_pairs, split_return
from orthoqkd.protocols.verification import (
    resolve_bell_threshold,
    verification_bb84,
    verification_bell,
)
from orthoqkd.qstate import PermutationMap, permute_particles
from orthoqkd.utility import draw_seed


def _run_dll(config: ProtocolConfig) -> ProtocolTranscript:
    session = open_session(config, (ProtocolId.DLL,))
    transcript, n = session.transcript, config.n

    # DLL1
    pairs = prepare_pairs(session, n)
    partner = {b: a for a, b in pairs}
    session.channel.send("DLL1", "alice", [a for a, _ in pairs], "first")
    ack = transcript.acknowledge("DLL2", "bob", "first")

    # DLL2: Bob picks the bases, both sides measure their halves of the check pairs
    checked = check_positions(session.alice, n, n // 2)
    transcript.announce("DLL2", "alice", "check_positions", {"positions": list(checked)}, ack)
    result = verification_bb84(
        session.memory,
        [(pairs[index][1], pairs[index][0]) for index in checked],
        session.bob,
        measure_rngs=(session.alice, session.bob),
        transcript=transcript,
        step="DLL2",
    )
    transcript.counts.update(transmitted_first=n, checked_first=len(checked))
    if not transcript.check("check_first", result.error_rate, config.bb84_threshold):
        return session.close()

    # DLL3
    kept = [b for index, (_, b) in enumerate(pairs) if index not in set(checked)]
    message, returned_checks = split_return(session, kept)
    encode(session, message)
    session.channel.send("DLL3", "alice", kept, "second")
    ack = transcript.acknowledge("DLL4", "bob", "second")

    # DLL4
    transcript.announce(
        "DLL4",
        "alice",
        "check_positions",
        {"positions": [kept.index(b) for b in returned_checks]},
        ack,
    )
    result = verification_bb84(
        session.memory,
        [(partner[b], b) for b in returned_checks],
        session.bob,
        transcript=transcript,
        step="DLL4",
        parties=("bob", "bob"),
    )
    transcript.counts.update(
        transmitted_second=len(kept), encoded=len(message), checked_second=len(returned_checks)
    )
    if not transcript.check("check_second", result.error_rate, config.bb84_threshold):
        return session.close()

    # DLL5
    session.decode_pairs("DLL5", [(partner[b], b) for b in message])
    return session.close()


def _run_dll_gv(config: ProtocolConfig) -> ProtocolTranscript:
    session = open_session(config, (ProtocolId.DLL_GV,))
    transcript, n = session.transcript, config.n
    bell_threshold = resolve_bell_threshold(config)

    # DLL_GV1: Alice keeps B of n/2 pairs, the other n/2 pairs travel whole
    pairs = prepare_pairs(session, n)
    check_indices = set(check_positions(session.alice, n, n // 2))
    candidates = [pair for index, pair in enumerate(pairs) if index not in check_indices]
    check_pairs = [pair for index, pair in enumerate(pairs) if index in check_indices]
    partner = {b: a for a, b in candidates}
    stream = [a for a, _ in candidates] + [pid for pair in check_pairs for pid in pair]
    shuffle = PermutationMap.random(len(stream), draw_seed(session.alice))
    sent: List[int] = permute_particles(stream, shuffle)
    session.channel.send("DLL_GV1", "alice", sent, "first")
    ack = transcript.acknowledge("DLL_GV2", "bob", "first")

    # DLL_GV2
    position = {pid: index for index, pid in enumerate(sent)}
    transcript.announce(
        "DLL_GV2",
        "alice",
        "check_pairing",
        {
            "permutation": list(shuffle.mapping),
            "pairs": [[position[a], position[b]] for a, b in check_pairs],
        },
        ack,
    )
    result = verification_bell(
        session.memory,
        check_pairs,
        session.bob,
        transcript=transcript,
        step="DLL_GV2",
        party="bob",
    )
    transcript.counts.update(
        transmitted_first=len(sent), retained=len(candidates), checked_first=2 * len(check_pairs)
    )
    if not transcript.check("bell_check_first", result.error_rate, bell_threshold):
        return session.close()

    # DLL_GV3
    kept = [b for _, b in candidates]
    message, returned_checks = split_return(session, kept)
    encode(session, message)
    reorder = PermutationMap.random(len(kept), draw_seed(session.alice))
    returned: List[int] = permute_particles(kept, reorder)
    session.channel.send("DLL_GV3", "alice", returned, "second")
    ack = transcript.acknowledge("DLL_GV4", "bob", "second")

    # DLL_GV4
    back = {pid: index for index, pid in enumerate(returned)}
    transcript.announce(
        "DLL_GV4",
        "alice",
        "return_order",
        {
            "permutation": list(reorder.mapping),
            "check_positions": sorted(back[b] for b in returned_checks),
            "message_positions": [back[b] for b in message],
        },
        ack,
    )
    result = verification_bell(
        session.memory,
        [(partner[b], b) for b in returned_checks],
        session.bob,
        transcript=transcript,
        step="DLL_GV4",
        party="bob",
    )
    transcript.counts.update(
        transmitted_second=len(returned), encoded=len(message), checked_second=len(returned_checks)
    )
    if not transcript.check("bell_check_second", result.error_rate, bell_threshold):
        return session.close()

    session.decode_pairs("DLL_GV5", [(partner[b], b) for b in message])
    return session.close()


def run_dll_family(config: ProtocolConfig) -> ProtocolTranscript:
    if config.protocol == ProtocolId.DLL_GV:
        return _run_dll_gv(config)
    return _run_dll(config)
