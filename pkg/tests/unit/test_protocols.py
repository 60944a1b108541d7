from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthoqkd.attacks.params import AttackKind, AttackParams, DummyMode, InterceptBasis
from orthoqkd.attacks.probes import flip_rate
from orthoqkd.exceptions import AttackConfigError, ProtocolError
from orthoqkd.protocols.base import (
    EventKind,
    ProtocolConfig,
    ProtocolId,
    ProtocolMode,
    basis_audit,
)
from orthoqkd.protocols.coding import (
    DENSE_CODING,
    DENSE_DECODING,
    decode_all,
    encoding_operator,
    split_symbols,
)
from orthoqkd.protocols.gv import enumerate_dummy_detection, timing_delay_attack
from orthoqkd.protocols.runner import run_protocol
from orthoqkd.protocols.verification import resolve_bell_threshold
from orthoqkd.qstate import BELL_BASIS, PSI_PLUS, apply_unitary


def _config(protocol, **kwargs):
    kwargs.setdefault("n", 8)
    kwargs.setdefault("seed", 42)
    return ProtocolConfig(protocol=protocol, **kwargs)


@pytest.fixture(params=list(ProtocolId))
def protocol(request):
    return request.param


def test_honest_run_delivers_the_message(protocol):
    transcript = run_protocol(_config(protocol))
    assert not transcript.aborted
    assert transcript.decoded_bits == transcript.sent_bits
    assert transcript.error_rates["message"] == 0.0
    assert len(transcript.sent_bits) == protocol.message_length(8)


def test_honest_run_checks_report_no_errors(protocol):
    transcript = run_protocol(_config(protocol))
    checks = {name: rate for name, rate in transcript.error_rates.items() if name != "message"}
    assert checks
    assert all(rate == 0.0 for rate in checks.values())


def test_given_message_is_used():
    transcript = run_protocol(_config(ProtocolId.CL, message="0110"))
    assert transcript.sent_bits == "0110"
    assert transcript.decoded_bits == "0110"


def test_runs_are_reproducible(protocol):
    first = run_protocol(_config(protocol, seed=9)).to_dict()
    second = run_protocol(_config(protocol, seed=9)).to_dict()
    assert first == second


@pytest.mark.parametrize(
    "protocol,counts",
    [
        (
            ProtocolId.PP,
            {"transmitted_first": 8, "checked_first": 4, "transmitted_second": 4, "encoded": 2, "checked_second": 2},
        ),
        (
            ProtocolId.PP_GV,
            {
                "transmitted_first": 12,
                "retained": 4,
                "checked_first": 8,
                "transmitted_second": 4,
                "encoded": 2,
                "checked_second": 2,
            },
        ),
        (
            ProtocolId.DLL_GV,
            {
                "transmitted_first": 12,
                "retained": 4,
                "checked_first": 8,
                "transmitted_second": 4,
                "encoded": 2,
                "checked_second": 2,
            },
        ),
        (ProtocolId.GV, {"transmitted_first": 8, "disclosed": 4}),
    ],
)
def test_particle_counts(protocol, counts):
    assert run_protocol(_config(protocol)).counts == counts


@pytest.mark.parametrize("protocol", [ProtocolId.PP_GV, ProtocolId.CL_GV, ProtocolId.DLL_GV])
def test_reordering_protocols_use_only_bell_measurements(protocol):
    assert basis_audit(run_protocol(_config(protocol))) == {"bell"}


def test_gv_uses_only_its_own_basis():
    assert basis_audit(run_protocol(_config(ProtocolId.GV))) == {"gv"}


@pytest.mark.parametrize("protocol", [ProtocolId.PP, ProtocolId.CL, ProtocolId.DLL])
def test_conjugate_check_protocols_use_two_bases(protocol):
    audit = basis_audit(run_protocol(_config(protocol, n=32)))
    assert audit == {"z", "x", "bell"}


def test_announcements_follow_acknowledgements(protocol):
    transcript = run_protocol(_config(protocol))
    for event in transcript.events_of(EventKind.announcement):
        assert transcript.events[event.ack_id].kind == EventKind.acknowledgement
        assert event.ack_id < event.index


def test_strong_probe_attack_is_caught_by_bell_checks():
    attack = AttackParams(kind=AttackKind.symmetric_ng, theta=np.pi / 2)
    transcript = run_protocol(_config(ProtocolId.PP_GV, n=32, attack=attack, bell_threshold=0.0))
    assert transcript.aborted
    assert transcript.error_rates["bell_check_first"] > 0.0
    assert transcript.probe_records


def test_intercept_resend_is_caught_by_conjugate_checks():
    attack = AttackParams(kind=AttackKind.intercept_resend)
    transcript = run_protocol(_config(ProtocolId.PP, n=64, attack=attack, bb84_threshold=0.0))
    assert transcript.aborted
    assert transcript.abort_reason.startswith("check_first")


def test_pairing_guess_attack_is_recorded():
    attack = AttackParams(kind=AttackKind.pairing_guess)
    transcript = run_protocol(_config(ProtocolId.DLL_GV, attack=attack))
    assert transcript.probe_records
    assert transcript.probe_records[0].kind == AttackKind.pairing_guess


def test_delayed_gv_packets_fail_the_timing_test():
    attack = AttackParams(kind=AttackKind.timing_delay, delay_slots=1)
    transcript = run_protocol(_config(ProtocolId.GV, attack=attack))
    assert transcript.aborted
    assert transcript.error_rates["timing"] == 1.0


def test_dummy_forwarding_leaks_bits_in_qsdc_mode():
    attack = AttackParams(kind=AttackKind.timing_delay, dummy_mode=DummyMode.hold_both)
    transcript = run_protocol(
        _config(ProtocolId.GV, n=16, attack=attack, mode=ProtocolMode.qsdc, jitter_slots=1)
    )
    # without jitter the dummies arrive exactly when honest packets would
    assert transcript.error_rates["timing"] == 0.0
    assert len(transcript.extras["leaked_bits"]) == 16


def test_dummy_detection_enumeration():
    assert enumerate_dummy_detection(4, 2) == Fraction(15, 16)
    assert enumerate_dummy_detection(3, 1) == 0
    with pytest.raises(AttackConfigError):
        enumerate_dummy_detection(0, 2)


@pytest.mark.parametrize(
    "kwargs,error",
    [
        ({"n": 6}, ProtocolError),
        ({"message": "01"}, ProtocolError),
        ({"message": "0a1b"}, ProtocolError),
        ({"disclose_fraction": 0.0}, ProtocolError),
        ({"jitter_slots": 0}, ProtocolError),
        ({"attack": AttackParams(kind=AttackKind.timing_delay)}, AttackConfigError),
        ({"attack": AttackParams(kind=AttackKind.pairing_guess)}, AttackConfigError),
    ],
)
def test_protocol_config_validation(kwargs, error):
    with pytest.raises(error):
        _config(ProtocolId.CL, **kwargs)


def test_protocol_config_accepts_bit_lists_and_aliases():
    config = ProtocolConfig.from_dict(
        {
            "protocol": "PP",
            "n": 8,
            "seed": 1,
            "message": [1, 0],
            "attack": {"kind": "symmetric_ng", "theta": 0.3, "lambda": 0.5},
        }
    )
    assert config.message == "10"
    assert config.attack.attacked_fraction == 0.5


def test_explicit_bell_threshold_wins():
    assert resolve_bell_threshold(_config(ProtocolId.PP_GV, bell_threshold=0.05)) == 0.05


def test_dense_coding_round_trip():
    for symbol, operator in DENSE_CODING.items():
        encoded = apply_unitary(BELL_BASIS[PSI_PLUS], operator, [1])
        outcome = max(range(4), key=lambda index: abs(BELL_BASIS[index].inner(encoded)))
        assert DENSE_DECODING[outcome] == symbol


def test_split_symbols_and_decoding():
    assert split_symbols("0110", 2) == ["01", "10"]
    with pytest.raises(ProtocolError):
        split_symbols("011", 2)
    with pytest.raises(ProtocolError):
        encoding_operator(ProtocolId.PP, "11")
    assert decode_all(ProtocolId.CL, [PSI_PLUS, PSI_PLUS]) == "0000"


@pytest.mark.parametrize("protocol", [ProtocolId.PP_GV, ProtocolId.CL_GV, ProtocolId.DLL_GV])
@pytest.mark.parametrize("n", [8, 16, 64])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_reordering_counts_scale_with_n(protocol, n, seed):
    transcript = run_protocol(_config(protocol, n=n, seed=seed))
    assert not transcript.aborted
    assert transcript.error_rates["message"] == 0.0
    assert transcript.counts["transmitted_first"] == 3 * n // 2
    assert transcript.counts["checked_first"] == n
    assert transcript.counts["encoded"] == n // 4


def test_replace_overrides_the_seed():
    config = _config(ProtocolId.CL, n=16)
    other = config.replace(seed=config.seed + 1)
    assert other.protocol == config.protocol
    assert other.seed == 43
    assert run_protocol(other).to_dict()["seed"] == 43


def test_timing_delay_attack_fails_test_one():
    transcript = timing_delay_attack(_config(ProtocolId.GV), delay_slots=2)
    assert transcript.aborted
    assert transcript.error_rates["timing"] == 1.0
    assert all(record.details["delay_slots"] == 2 for record in transcript.probe_records)


def test_timing_delay_attack_with_dummies_reads_every_bit():
    config = _config(ProtocolId.GV, n=16, mode=ProtocolMode.qsdc, jitter_slots=1)
    transcript = timing_delay_attack(config, dummy_mode=DummyMode.hold_both)
    leaked = {entry["round"]: str(entry["bit"]) for entry in transcript.extras["leaked_bits"]}
    assert transcript.error_rates["timing"] == 0.0
    assert "".join(leaked[index] for index in range(16)) == transcript.sent_bits


def test_timing_delay_attack_needs_gv():
    with pytest.raises(AttackConfigError):
        timing_delay_attack(_config(ProtocolId.PP))


@pytest.mark.parametrize("protocol_id", list(ProtocolId))
@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), n=st.sampled_from([8, 16, 64]))
def test_honest_runs_decode_exactly_for_any_seed(protocol_id, seed, n):
    transcript = run_protocol(_config(protocol_id, n=n, seed=seed))
    assert not transcript.aborted
    assert transcript.error_rates["message"] == 0.0
    assert transcript.decoded_bits == transcript.sent_bits
    assert len(transcript.sent_bits) == protocol_id.message_length(n)
    assert all(rate == 0.0 for rate in transcript.error_rates.values())
    if protocol_id in (ProtocolId.PP_GV, ProtocolId.CL_GV, ProtocolId.DLL_GV):
        assert transcript.counts["transmitted_first"] == 3 * n // 2
        assert transcript.counts["checked_first"] == n
        assert transcript.counts["encoded"] == n // 4


SEEDS = range(5)


def _mean_rate(protocol, key, n=256, **kwargs):
    rates = [
        run_protocol(_config(protocol, n=n, seed=seed, **kwargs)).error_rates[key]
        for seed in SEEDS
    ]
    return float(np.mean(rates))


def _three_sigma(rate, samples_per_run):
    return 3.0 * np.sqrt(rate * (1.0 - rate) / (samples_per_run * len(SEEDS)))


def test_intercept_resend_disturbs_a_quarter_of_conjugate_checks():
    attack = AttackParams(kind=AttackKind.intercept_resend)
    observed = _mean_rate(ProtocolId.PP, "check_first", attack=attack)
    assert abs(observed - 0.25) < _three_sigma(0.25, 128)


def test_computational_basis_resend_halves_bell_checks():
    attack = AttackParams(kind=AttackKind.intercept_resend, basis=InterceptBasis.z)
    observed = _mean_rate(ProtocolId.PP_GV, "bell_check_first", attack=attack, bell_threshold=1.0)
    assert abs(observed - 0.5) < _three_sigma(0.5, 128)


def test_copying_attack_halves_two_step_bell_checks():
    attack = AttackParams(kind=AttackKind.symmetric, theta=0.0, overlap_epsilon=0.0)
    observed = _mean_rate(ProtocolId.DLL_GV, "bell_check_first", attack=attack, bell_threshold=1.0)
    assert abs(observed - 0.5) < _three_sigma(0.5, 128)


def test_orthogonal_generic_attack_scrambles_gv():
    attack = AttackParams(kind=AttackKind.generic_probe, overlap_epsilon=0.0)
    observed = _mean_rate(ProtocolId.GV, "message", attack=attack, bb84_threshold=1.0)
    assert abs(observed - 0.5) < _three_sigma(0.5, 256)


def test_symmetric_attack_check_error_matches_the_flip_rate():
    theta = float(np.arccos(0.6))
    expected = flip_rate(theta)
    assert expected == pytest.approx(0.2)
    attack = AttackParams(kind=AttackKind.symmetric_ng, theta=theta)
    observed = _mean_rate(ProtocolId.PP, "check_first", attack=attack, bb84_threshold=1.0)
    assert abs(observed - expected) < _three_sigma(expected, 128)


def test_dummy_forwarding_disagrees_with_half_the_message():
    attack = AttackParams(kind=AttackKind.timing_delay, dummy_mode=DummyMode.hold_both)
    observed = _mean_rate(
        ProtocolId.GV,
        "message",
        attack=attack,
        mode=ProtocolMode.qsdc,
        jitter_slots=1,
        bb84_threshold=1.0,
    )
    assert abs(observed - 0.5) < _three_sigma(0.5, 256)
