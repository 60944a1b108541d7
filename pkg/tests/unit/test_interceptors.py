import numpy as np
import pytest

from orthoqkd.attacks.interceptors import (
    EavesdropperFactory,
    InterceptResendEavesdropper,
    PairingGuessEavesdropper,
    ProbeEavesdropper,
    TimingEavesdropper,
)
from orthoqkd.attacks.params import AttackKind, AttackParams, DummyMode, LegSelection
from orthoqkd.exceptions import AttackConfigError
from orthoqkd.protocols.memory import ParticleMemory
from orthoqkd.qstate import BELL_BASIS, PSI_PLUS, X_BASIS


def _eavesdropper(**kwargs):
    return EavesdropperFactory(AttackParams(**kwargs), np.random.default_rng(3)).get_eavesdropper()


@pytest.mark.parametrize(
    "kind,expected",
    [
        (AttackKind.generic_probe, ProbeEavesdropper),
        (AttackKind.symmetric, ProbeEavesdropper),
        (AttackKind.symmetric_ng, ProbeEavesdropper),
        (AttackKind.intercept_resend, InterceptResendEavesdropper),
        (AttackKind.pairing_guess, PairingGuessEavesdropper),
        (AttackKind.timing_delay, TimingEavesdropper),
    ],
)
def test_factory_picks_the_eavesdropper(kind, expected):
    assert isinstance(_eavesdropper(kind=kind), expected)


def test_probe_eavesdropper_only_touches_selected_legs():
    memory = ParticleMemory()
    _, travel = memory.prepare(BELL_BASIS[PSI_PLUS])
    eve = _eavesdropper(kind=AttackKind.symmetric_ng, theta=0.7, legs=LegSelection.second)
    eve.on_transit(memory, [travel], "first")
    assert eve.records == []
    eve.on_transit(memory, [travel], "second")
    assert len(eve.records) == 1
    assert eve.records[0].leg == "second"


def test_zero_fraction_leaves_particles_alone():
    memory = ParticleMemory()
    home, travel = memory.prepare(BELL_BASIS[PSI_PLUS])
    eve = _eavesdropper(kind=AttackKind.symmetric, theta=0.9, attacked_fraction=0.0)
    eve.on_transit(memory, [travel], "first")
    assert eve.records == []
    assert memory.state_of([home, travel]).fidelity(BELL_BASIS[PSI_PLUS]) == pytest.approx(1.0)


def test_intercept_resend_records_basis_and_outcome():
    memory = ParticleMemory()
    _, travel = memory.prepare(BELL_BASIS[PSI_PLUS])
    eve = _eavesdropper(kind=AttackKind.intercept_resend)
    eve.on_transit(memory, [travel], "first")
    (record,) = eve.records
    assert record.details["basis"] == "z"
    assert record.details["outcome"] in (0, 1)


def test_pairing_eavesdropper_attacks_whole_batches():
    memory = ParticleMemory()
    particles = [pid for _ in range(2) for pid in memory.prepare(BELL_BASIS[PSI_PLUS])]
    eve = _eavesdropper(kind=AttackKind.pairing_guess)
    eve.on_transit(memory, particles, "first")
    (record,) = eve.records
    assert record.particle_ids == tuple(particles)
    assert record.leg == "first"


def test_delaying_eavesdropper_arrives_late():
    memory = ParticleMemory()
    (particle,) = memory.prepare(X_BASIS[0])
    eve = _eavesdropper(kind=AttackKind.timing_delay, delay_slots=2)
    assert eve.on_timed_transit(memory, particle, honest_slot=5, scheduled_slot=4) == 7
    assert eve.records[0].details["arrival_slot"] == 7


def test_hold_both_eavesdropper_forwards_a_dummy_on_schedule():
    memory = ParticleMemory()
    (particle,) = memory.prepare(X_BASIS[1])
    eve = _eavesdropper(kind=AttackKind.timing_delay, dummy_mode=DummyMode.hold_both)
    assert eve.on_timed_transit(memory, particle, honest_slot=5, scheduled_slot=4) == 4
    details = eve.records[0].details
    assert details["eve_bit"] == 1
    assert memory.state_of([particle]).fidelity(X_BASIS[details["dummy_bit"]]) == pytest.approx(1.0)


def test_timing_eavesdropper_cannot_attack_pairs():
    memory = ParticleMemory()
    _, travel = memory.prepare(BELL_BASIS[PSI_PLUS])
    eve = _eavesdropper(kind=AttackKind.timing_delay)
    with pytest.raises(AttackConfigError):
        eve.on_transit(memory, [travel], "first")
